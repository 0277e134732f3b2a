"""Coadjoint-orbit machinery: brackets, flux quadrature, orbit labels.

The rotation algebra acts on its 3-dimensional dual with structure array
c[k, i, j] = epsilon_{ijk}; the 6-dimensional real form of the complex
2x2 unimodular algebra acts on a real 6-dimensional chart in which the
two quadratic invariants are plain bilinear expressions.  Orbit labels
(n, rho) are read off as the principal complex square root of the
invariant pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .numerics import TAU_GROUP, TAU_NUM


def _epsilon() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[i, j, k] = 1.0
        eps[j, i, k] = -1.0
    return eps


def su2_structure() -> np.ndarray:
    """Structure array c with [e_i, e_j] = sum_k c[k, i, j] e_k."""
    return np.transpose(_epsilon(), (2, 0, 1))


def sl2c_structure() -> np.ndarray:
    """Structure array of the 6-dimensional realified algebra.

    Basis order (J1, J2, J3, K1, K2, K3): rotations close onto rotations,
    a rotation and a boost close onto a boost, two boosts close onto a
    rotation with a minus sign.
    """
    eps = _epsilon()
    c = np.zeros((6, 6, 6))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                c[k, i, j] = eps[i, j, k]
                c[k + 3, i, j + 3] = eps[i, j, k]
                c[k + 3, i + 3, j] = -eps[j, i, k]
                c[k, i + 3, j + 3] = -eps[i, j, k]
    return c


@dataclass(frozen=True)
class DifferentiableFunction:
    """Scalar function on the dual space given by value and gradient."""

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]


def coordinate_function(i: int, dim: int = 3) -> DifferentiableFunction:
    """The i-th linear coordinate on the dual space (0-based index)."""
    if not 0 <= i < dim:
        raise ValueError(f"coordinate index {i} out of range for dimension {dim}")
    basis = np.zeros(dim)
    basis[i] = 1.0
    return DifferentiableFunction(
        value=lambda x, _i=i: float(np.asarray(x)[_i]),
        gradient=lambda x, _b=basis: _b.copy(),
    )


def poisson_bracket(
    f: DifferentiableFunction,
    g: DifferentiableFunction,
    point: Sequence[float],
    structure: np.ndarray | None = None,
) -> float:
    """Lie-Poisson bracket {f, g} at a point of the dual space."""
    x = np.asarray(point, dtype=float)
    c = su2_structure() if structure is None else structure
    df = np.asarray(f.gradient(x), dtype=float)
    dg = np.asarray(g.gradient(x), dtype=float)
    return float(np.einsum("kij,k,i,j->", c, x, df, dg))


def hamiltonian_vector_field(
    f: DifferentiableFunction,
    point: Sequence[float],
    structure: np.ndarray | None = None,
) -> np.ndarray:
    """Vector field generated by f, componentwise {f, x_j} at the point."""
    x = np.asarray(point, dtype=float)
    c = su2_structure() if structure is None else structure
    df = np.asarray(f.gradient(x), dtype=float)
    return np.einsum("kij,k,i->j", c, x, df)


def symplectic_eval(
    i: int,
    j: int,
    point: Sequence[float],
    structure: np.ndarray | None = None,
) -> float:
    """Orbit 2-form on the generator directions i and j at the point.

    Equals the pairing of the point with the bracket [e_i, e_j], which is
    the bracket of the corresponding coordinate functions.
    """
    x = np.asarray(point, dtype=float)
    c = su2_structure() if structure is None else structure
    return float(np.einsum("k,k->", c[:, i, j], x))


@dataclass(frozen=True)
class FluxResult:
    """Raw symplectic flux through a radius-j sphere with a convergence flag."""

    value: float
    n_theta: int
    n_phi: int
    coarse_value: float
    rel_step: float
    converged: bool


def su2_flux(j: float, n_nodes: int = 10000, conv_tol: float = 1e-5) -> FluxResult:
    """Integrate the orbit 2-form over the radius-j coadjoint sphere.

    Product quadrature: Gauss-Legendre in cos(theta) crossed with midpoint
    nodes in phi.  The orientation is fixed so the flux of a positive
    radius orbit is positive.  The result is the raw quadrature value; no
    closed-form normalization is folded in.  Convergence is judged by
    comparing against a half-resolution pass, and grids with fewer than 4
    polar nodes are flagged regardless.
    """
    if j <= 0:
        raise ValueError("orbit radius must be positive")
    n_theta = max(2, int(np.sqrt(n_nodes / 2)))
    n_phi = 2 * n_theta
    value = _flux_pass(j, n_theta, n_phi)
    coarse = _flux_pass(j, max(2, n_theta // 2), max(4, n_phi // 2))
    rel_step = abs(value - coarse) / max(1.0, abs(value))
    return FluxResult(
        value=value,
        n_theta=n_theta,
        n_phi=n_phi,
        coarse_value=coarse,
        rel_step=rel_step,
        converged=bool(rel_step <= conv_tol and n_theta >= 4),
    )


def _flux_pass(j: float, n_u: int, n_phi: int) -> float:
    c = su2_structure()
    u_nodes, u_w = np.polynomial.legendre.leggauss(n_u)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * np.pi / n_phi)
    phi_w = 2.0 * np.pi / n_phi
    u, p = np.meshgrid(u_nodes, phi, indexing="ij")
    w = np.outer(u_w, np.full(n_phi, phi_w))
    s = np.sqrt(1.0 - u**2)
    x = j * np.stack([s * np.cos(p), s * np.sin(p), u], axis=-1)
    dxdu = j * np.stack([-u / s * np.cos(p), -u / s * np.sin(p), np.ones_like(u)], axis=-1)
    dxdphi = j * np.stack([-s * np.sin(p), s * np.cos(p), np.zeros_like(u)], axis=-1)
    # columns of v are the generator fields at x; the form on two tangent
    # vectors is a^T W b once the tangents are written in generator
    # coefficients (least-squares, the generator fields span the tangent
    # plane but are not independent)
    v = np.einsum("kij,...k->...ji", c, x)
    wform = np.einsum("kij,...k->...ij", c, x)
    vp = np.linalg.pinv(v)
    a = np.einsum("...ij,...j->...i", vp, dxdu)
    b = np.einsum("...ij,...j->...i", vp, dxdphi)
    integrand = np.einsum("...i,...ij,...j->...", a, wform, b)
    # the (u, phi) coordinate order carries the inward orientation; flip
    # so that positive-radius orbits report positive flux
    return float(-np.sum(integrand * w))


# ---------------------------------------------------------------------------
# adjoint action of 2x2 unimodular complex matrices and its invariants

_CHART = np.array([[0, 1, 0], [1, 0, -1], [1j, 0, 1j]], dtype=complex)
_CHART_INV = np.linalg.inv(_CHART)


def sl2c_adjoint_matrix(g: np.ndarray, tol: float = TAU_GROUP) -> np.ndarray:
    """3x3 matrix of the adjoint action on quadratic polynomial coefficients.

    Input is a 2x2 complex matrix with unit determinant (checked).  The
    returned matrices multiply like the group elements themselves and
    preserve the quadratic form v1**2 - 4*v0*v2.
    """
    g = np.asarray(g, dtype=complex).reshape(2, 2)
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    scale = max(1.0, float(np.max(np.abs(g)) ** 2))
    if abs(det - 1.0) > tol * scale:
        raise ValueError(f"determinant {det!r} is not 1")
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    return np.array(
        [
            [d * d, c * d, c * c],
            [2 * b * d, a * d + b * c, 2 * a * c],
            [b * b, a * b, a * a],
        ]
    )


def adjoint_quadratic_form(v: np.ndarray) -> complex:
    """Invariant of the 3-dimensional adjoint action."""
    v = np.asarray(v, dtype=complex).reshape(3)
    return complex(v[1] * v[1] - 4.0 * v[0] * v[2])


def real6_action(g: np.ndarray, tol: float = TAU_GROUP) -> np.ndarray:
    """Real 6x6 matrix of the adjoint action in the invariant chart."""
    m = _CHART @ sl2c_adjoint_matrix(g, tol=tol) @ _CHART_INV
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def orbit_invariants(p: np.ndarray) -> tuple[float, float]:
    """The two quadratic invariants of a point in the real 6-chart."""
    p = np.asarray(p, dtype=float).reshape(6)
    x, y = p[:3], p[3:]
    return float(x @ x - y @ y), float(x @ y)


def orbit_label_from_invariants(i1: float, i2: float, tol: float = TAU_NUM) -> tuple[float, float]:
    """Orbit label (n, rho) with n + i*rho the principal root of i1 + 2i*i2.

    The principal branch keeps n >= 0; on the n = 0 boundary the sign of
    rho is a chart artifact and is normalized away.
    """
    z = np.sqrt(complex(i1, 2.0 * i2))
    n, rho = float(z.real), float(z.imag)
    scale = max(1.0, abs(n), abs(rho))
    if abs(n) <= tol * scale:
        n, rho = 0.0, abs(rho)
    if abs(rho) <= tol * scale:
        rho = 0.0
    return n, rho


def orbit_label_of_point(p: np.ndarray, tol: float = TAU_NUM) -> tuple[float, float]:
    i1, i2 = orbit_invariants(p)
    return orbit_label_from_invariants(i1, i2, tol=tol)


def random_sl2c(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random 2x2 complex matrix normalized to unit determinant."""
    while True:
        g = scale * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        if abs(det) > 1e-6:
            return g / np.sqrt(det)


# ---------------------------------------------------------------------------
# tensor product selection rules

def _check_half_integer(value: float, name: str) -> float:
    doubled = 2.0 * value
    if abs(doubled - round(doubled)) > TAU_NUM:
        raise ValueError(f"{name} must be a half-integer, got {value!r}")
    return round(doubled) / 2.0


def su2_tensor_decompose(j: float, l: float) -> list[float]:
    """Irreducible spins in the product of spins j and l.

    Runs from |j - l| to j + l in integer steps; the dimensions add up to
    (2j+1)(2l+1).
    """
    j = _check_half_integer(j, "j")
    l = _check_half_integer(l, "l")
    if j < 0 or l < 0:
        raise ValueError("spins must be nonnegative")
    lo, hi = abs(j - l), j + l
    count = int(round(hi - lo)) + 1
    return [lo + k for k in range(count)]


@dataclass(frozen=True)
class SpinSelectionRule:
    """Allowed discrete labels in a product of two principal-type labels.

    The discrete label m runs over nonnegative values congruent to
    `offset` mod 1; the continuous label is unconstrained.
    """

    offset: float
    n1: float
    n2: float

    def allowed_m(self, m_max: float) -> list[float]:
        first = self.offset
        out = []
        m = first
        while m <= m_max + TAU_NUM:
            out.append(m)
            m += 1.0
        return out

    def admits(self, m: float) -> bool:
        return abs((m - self.offset) - round(m - self.offset)) <= TAU_NUM and m >= -TAU_NUM


def sl2c_tensor_decompose(n1: float, n2: float) -> SpinSelectionRule:
    """Selection rule for the discrete label in a product of two orbits.

    The sum of the three discrete labels must be an integer, so the
    allowed m are congruent to -(n1 + n2) mod 1.  Symmetric in the two
    inputs.
    """
    n1 = _check_half_integer(n1, "n1")
    n2 = _check_half_integer(n2, "n2")
    offset = (-(n1 + n2)) % 1.0
    return SpinSelectionRule(offset=offset, n1=n1, n2=n2)
