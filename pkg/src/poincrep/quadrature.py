"""Quadrature node sets and zonal transforms.

Compact fibers are discretized on Fibonacci sphere lattices with equal
weights normalized to total mass 1; angular integrals that need spectral
accuracy use a Gauss-Legendre grid in cos(theta) crossed with midpoint
nodes in phi.  Noncompact hyperboloid fibers are truncated at a maximum
rapidity and carry the invariant measure of the window.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))

# Node-set sizes supported for sphere discretizations.
SPHERE_NODE_SIZES = (64, 256, 1024, 4096)
DEFAULT_RAPIDITY_MAX = 5.0


def fibonacci_sphere(n: int, total: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Quasi-uniform nodes on the unit 2-sphere with equal weights.

    Returns (nodes, weights): nodes is (n, 3), weights sum to `total`.
    """
    if n < 1:
        raise ValueError("need at least one node")
    i = np.arange(n)
    ct = 1.0 - 2.0 * (i + 0.5) / n
    st = np.sqrt(np.maximum(0.0, 1.0 - ct * ct))
    phi = GOLDEN_ANGLE * i
    nodes = np.stack([st * np.cos(phi), st * np.sin(phi), ct], axis=1)
    weights = np.full(n, total / n)
    return nodes, weights


def sphere_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre x midpoint product grid on the unit sphere.

    Returns (nodes (n_theta*n_phi, 3), weights summing to 4*pi).  Exact
    for spherical polynomials of degree below 2*n_theta in cos(theta).
    """
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * np.pi / n_phi)
    wphi = 2.0 * np.pi / n_phi
    ct = u[:, None] * np.ones_like(phi)[None, :]
    st = np.sqrt(np.maximum(0.0, 1.0 - ct * ct))
    nodes = np.stack(
        [st * np.cos(phi)[None, :], st * np.sin(phi)[None, :], ct], axis=-1
    ).reshape(-1, 3)
    weights = (wu[:, None] * np.full(n_phi, wphi)[None, :]).reshape(-1)
    return nodes, weights


def legendre_matrix(ct: np.ndarray, lmax: int) -> np.ndarray:
    """Legendre polynomials P_l(ct) for l = 0..lmax, shape (lmax+1, n)."""
    ct = np.asarray(ct, dtype=float)
    p = np.zeros((lmax + 1, ct.size))
    p[0] = 1.0
    if lmax >= 1:
        p[1] = ct
    for l in range(1, lmax):
        p[l + 1] = ((2 * l + 1) * ct * p[l] - l * p[l - 1]) / (l + 1)
    return p


class ZonalTransform:
    """Band-limited zonal analysis/synthesis on a sphere node set.

    Analysis solves the weighted least-squares fit of the first lmax+1
    Legendre modes (Gram system), synthesis evaluates the modes at the
    nodes.  Products of coefficient vectors model the axis-symmetric
    convolution of the underlying fields; on a finite node set this is
    accurate to quadrature error, which shrinks as the node count grows.
    """

    def __init__(self, n_nodes: int, lmax: int = 6):
        if lmax + 1 > n_nodes:
            raise ValueError("band limit exceeds node count")
        self.n_nodes = n_nodes
        self.lmax = lmax
        self.nodes, self.weights = fibonacci_sphere(n_nodes)
        self.ct = self.nodes[:, 2]
        self.p = legendre_matrix(self.ct, lmax)
        self._pw = self.p * self.weights
        self._gram = self._pw @ self.p.T

    def analyze(self, field: np.ndarray) -> np.ndarray:
        field = np.asarray(field, dtype=float)
        if field.shape != (self.n_nodes,):
            raise ValueError("field length does not match node set")
        return np.linalg.solve(self._gram, self._pw @ field)

    def synthesize(self, coef: np.ndarray) -> np.ndarray:
        coef = np.asarray(coef, dtype=float)
        if coef.shape != (self.lmax + 1,):
            raise ValueError("coefficient length does not match band limit")
        return coef @ self.p

    def convolve(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        return self.synthesize(self.analyze(f) * self.analyze(g))

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return float(np.sum(self.weights * np.asarray(f) * np.asarray(g)))

    def random_band_limited(self, rng: np.random.Generator, amplitude: float = 0.5) -> np.ndarray:
        """Random smooth zonal field with unit mean and decaying spectrum."""
        coef = np.zeros(self.lmax + 1)
        coef[0] = 1.0
        ell = np.arange(1, self.lmax + 1)
        coef[1:] = amplitude * rng.standard_normal(self.lmax) / (1.0 + ell) ** 2
        return self.synthesize(coef)


@dataclass(frozen=True)
class HyperboloidWindow:
    """Truncated future hyperboloid of a given radius.

    nodes are (n, 4) points with t > 0 and Minkowski square radius**2;
    weights carry the invariant measure of the rapidity window, so their
    sum is the window volume.
    """

    radius: float
    rapidity_max: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def volume(self) -> float:
        return float(np.sum(self.weights))


def hyperboloid_window(
    radius: float,
    n_rapidity: int = 16,
    n_sphere: int = 64,
    rapidity_max: float = DEFAULT_RAPIDITY_MAX,
) -> HyperboloidWindow:
    """Quadrature for the invariant measure on a truncated hyperboloid.

    The measure is radius**3 * sinh(chi)**2 dchi dOmega over rapidity
    chi in [0, rapidity_max].
    """
    if radius <= 0:
        raise ValueError("hyperboloid radius must be positive")
    x, wx = np.polynomial.legendre.leggauss(n_rapidity)
    chi = 0.5 * rapidity_max * (x + 1.0)
    wchi = 0.5 * rapidity_max * wx
    sph_nodes, sph_w = fibonacci_sphere(n_sphere, total=4.0 * np.pi)
    t = radius * np.cosh(chi)[:, None] * np.ones(n_sphere)[None, :]
    r_sp = radius * np.sinh(chi)
    spatial = r_sp[:, None, None] * sph_nodes[None, :, :]
    nodes = np.concatenate([t[..., None], spatial], axis=-1).reshape(-1, 4)
    meas = (radius**3 * np.sinh(chi) ** 2 * wchi)[:, None] * sph_w[None, :]
    return HyperboloidWindow(radius, rapidity_max, nodes, meas.reshape(-1))


def hyperboloid_window_volume(radius: float, rapidity_max: float = DEFAULT_RAPIDITY_MAX) -> float:
    """Closed form for the truncated hyperboloid volume."""
    return float(4.0 * np.pi * radius**3 * (np.sinh(2.0 * rapidity_max) / 4.0 - rapidity_max / 2.0))


def save_field_csv(path: str | Path, weights: np.ndarray, values: np.ndarray) -> None:
    """Write a sampled field as rows of (node index, weight, value)."""
    weights = np.asarray(weights, dtype=float)
    values = np.asarray(values, dtype=float)
    if weights.shape != values.shape:
        raise ValueError("weights and values must have the same length")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_index", "weight", "value"])
        for i, (w, v) in enumerate(zip(weights, values)):
            writer.writerow([i, repr(float(w)), repr(float(v))])


def load_field_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a sampled field written by save_field_csv."""
    weights: list[float] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:3] != ["node_index", "weight", "value"]:
            raise ValueError(f"unrecognized field file header: {header!r}")
        for row in reader:
            idx, w, v = row[:3]
            if int(idx) != len(weights):
                raise ValueError(f"node indices out of order at row {idx}")
            weights.append(float(w))
            values.append(float(v))
    return np.asarray(weights), np.asarray(values)
