"""Minkowski 4-vectors, Lorentz transforms, and translation orbits.

Signature convention is (+, -, -, -).  Orbits of the proper orthochronous
Lorentz group on translation space are labelled by a causal class plus a
nonnegative radius r, with interval +r**2 on timelike orbits and -r**2 on
spacelike ones; null and zero orbits have radius 0.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .numerics import TAU_GROUP, TAU_NUM
from .rng import substream

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

DEFAULT_RAPIDITY_MAX = 5.0


@dataclass(frozen=True)
class FourVector:
    t: float
    x1: float
    x2: float
    x3: float

    def __post_init__(self) -> None:
        for name in ("t", "x1", "x2", "x3"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "FourVector":
        arr = np.asarray(arr, dtype=float).reshape(4)
        return cls(arr[0], arr[1], arr[2], arr[3])

    @classmethod
    def zero(cls) -> "FourVector":
        return cls(0.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_text(cls, text: str) -> "FourVector":
        """Parse the comma-separated form 't,x1,x2,x3'."""
        parts = text.split(",")
        if len(parts) != 4:
            raise ValueError(f"expected 't,x1,x2,x3', got {text!r}")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError:
            raise ValueError(f"non-numeric component in {text!r}") from None

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x1, self.x2, self.x3])

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t + other.t, self.x1 + other.x1, self.x2 + other.x2, self.x3 + other.x3)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t - other.t, self.x1 - other.x1, self.x2 - other.x2, self.x3 - other.x3)

    def __neg__(self) -> "FourVector":
        return FourVector(-self.t, -self.x1, -self.x2, -self.x3)

    def __mul__(self, scalar: float) -> "FourVector":
        s = float(scalar)
        return FourVector(s * self.t, s * self.x1, s * self.x2, s * self.x3)

    __rmul__ = __mul__

    def minkowski_dot(self, other: "FourVector") -> float:
        return (
            self.t * other.t
            - self.x1 * other.x1
            - self.x2 * other.x2
            - self.x3 * other.x3
        )

    def interval(self) -> float:
        return self.minkowski_dot(self)

    def spatial_norm(self) -> float:
        return float(np.sqrt(self.x1**2 + self.x2**2 + self.x3**2))


def interval(v: FourVector | np.ndarray) -> float:
    if isinstance(v, FourVector):
        return v.interval()
    a = np.asarray(v, dtype=float).reshape(4)
    return float(a[0] * a[0] - a[1] * a[1] - a[2] * a[2] - a[3] * a[3])


class CausalClass(enum.Enum):
    ZERO = _kernels.CODE_ZERO
    TIMELIKE_FUTURE = _kernels.CODE_TIMELIKE_FUTURE
    TIMELIKE_PAST = _kernels.CODE_TIMELIKE_PAST
    NULL_FUTURE = _kernels.CODE_NULL_FUTURE
    NULL_PAST = _kernels.CODE_NULL_PAST
    SPACELIKE = _kernels.CODE_SPACELIKE

    @property
    def is_timelike(self) -> bool:
        return self in (CausalClass.TIMELIKE_FUTURE, CausalClass.TIMELIKE_PAST)

    @property
    def is_null(self) -> bool:
        return self in (CausalClass.NULL_FUTURE, CausalClass.NULL_PAST)


_CLASS_BY_CODE = {c.value: c for c in CausalClass}


@dataclass(frozen=True)
class OrbitLabel:
    causal_class: CausalClass
    radius: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius < 0.0:
            raise ValueError("orbit radius must be nonnegative")
        needs_zero = self.causal_class is CausalClass.ZERO or self.causal_class.is_null
        if needs_zero and self.radius != 0.0:
            raise ValueError(f"{self.causal_class.name} orbits have radius 0")
        if not needs_zero and self.radius == 0.0:
            raise ValueError(f"{self.causal_class.name} orbits need a positive radius")

    @classmethod
    def zero(cls) -> "OrbitLabel":
        return cls(CausalClass.ZERO, 0.0)

    def invariant(self) -> float:
        """Signed interval shared by every point of the orbit."""
        if self.causal_class.is_timelike:
            return self.radius**2
        if self.causal_class is CausalClass.SPACELIKE:
            return -(self.radius**2)
        return 0.0


def classify(v: FourVector | np.ndarray, tol: float = TAU_NUM) -> CausalClass:
    arr = v.as_array() if isinstance(v, FourVector) else np.asarray(v, dtype=float).reshape(4)
    codes, _ = _kernels.classify_radius(arr[None, :], tol)
    return _CLASS_BY_CODE[int(codes[0])]


def orbit_of(v: FourVector | np.ndarray, tol: float = TAU_NUM) -> OrbitLabel:
    arr = v.as_array() if isinstance(v, FourVector) else np.asarray(v, dtype=float).reshape(4)
    codes, radii = _kernels.classify_radius(arr[None, :], tol)
    return OrbitLabel(_CLASS_BY_CODE[int(codes[0])], float(radii[0]))


def classify_batch(vectors: np.ndarray, tol: float = TAU_NUM) -> tuple[np.ndarray, np.ndarray]:
    """Causal-class codes and radii for an (n, 4) array of vectors."""
    return _kernels.classify_radius(vectors, tol)


class LorentzTransform:
    """Proper orthochronous Lorentz transformation as a validated 4x4 matrix.

    The constructor rejects matrices that do not preserve the metric,
    reverse time orientation, or have determinant other than +1.  The
    metric-preservation defect is measured relative to the squared matrix
    norm, since the raw defect of a product of large boosts grows with it.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix: np.ndarray, tol: float = TAU_GROUP):
        m = np.asarray(matrix, dtype=float).reshape(4, 4).copy()
        scale = max(1.0, float(np.sum(m * m)))
        defect = float(np.max(np.abs(m.T @ METRIC @ m - METRIC)))
        if defect > tol * scale:
            raise ValueError(
                f"matrix does not preserve the metric: defect {defect:.3e} "
                f"exceeds {tol:.1e} * scale {scale:.3e}"
            )
        det = float(np.linalg.det(m))
        if abs(det - 1.0) > tol * scale:
            raise ValueError(f"determinant {det!r} is not +1")
        if m[0, 0] < 1.0 - tol * scale:
            raise ValueError(f"time orientation reversed: m[0,0] = {m[0, 0]!r}")
        m.flags.writeable = False
        self.matrix = m

    @classmethod
    def identity(cls) -> "LorentzTransform":
        return cls(np.eye(4))

    @classmethod
    def boost(cls, direction: Iterable[float], rapidity: float) -> "LorentzTransform":
        n = np.asarray(list(direction), dtype=float).reshape(3)
        norm = float(np.linalg.norm(n))
        if norm == 0.0:
            raise ValueError("boost direction must be nonzero")
        n = n / norm
        ch, sh = np.cosh(rapidity), np.sinh(rapidity)
        m = np.eye(4)
        m[0, 0] = ch
        m[0, 1:] = sh * n
        m[1:, 0] = sh * n
        m[1:, 1:] = np.eye(3) + (ch - 1.0) * np.outer(n, n)
        return cls(m)

    @classmethod
    def rotation(cls, axis: Iterable[float], angle: float) -> "LorentzTransform":
        n = np.asarray(list(axis), dtype=float).reshape(3)
        norm = float(np.linalg.norm(n))
        if norm == 0.0:
            raise ValueError("rotation axis must be nonzero")
        n = n / norm
        k = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
        r = np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)
        m = np.eye(4)
        m[1:, 1:] = r
        return cls(m)

    def apply(self, v: FourVector) -> FourVector:
        return FourVector.from_array(self.matrix @ v.as_array())

    def apply_batch(self, vectors: np.ndarray) -> np.ndarray:
        return np.asarray(vectors, dtype=float) @ self.matrix.T

    def compose(self, other: "LorentzTransform") -> "LorentzTransform":
        return LorentzTransform(self.matrix @ other.matrix)

    def inverse(self) -> "LorentzTransform":
        # g^-1 = eta g^T eta for metric-preserving g; cheaper and more
        # stable than a generic matrix inverse.
        return LorentzTransform(METRIC @ self.matrix.T @ METRIC)

    def is_close(self, other: "LorentzTransform", tol: float = TAU_GROUP) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.matrix))), float(np.max(np.abs(other.matrix))))
        return float(np.max(np.abs(self.matrix - other.matrix))) <= tol * scale

    def __repr__(self) -> str:
        return f"LorentzTransform({np.array2string(self.matrix, precision=6)})"


def random_rotation(rng: np.random.Generator) -> LorentzTransform:
    axis = rng.standard_normal(3)
    while float(np.linalg.norm(axis)) < 1e-12:
        axis = rng.standard_normal(3)
    return LorentzTransform.rotation(axis, float(rng.uniform(0.0, 2.0 * np.pi)))


def random_lorentz(
    rng: np.random.Generator, rapidity_max: float = DEFAULT_RAPIDITY_MAX
) -> LorentzTransform:
    """Random element: rotation, boost of bounded rapidity, rotation."""
    r1 = random_rotation(rng)
    direction = rng.standard_normal(3)
    while float(np.linalg.norm(direction)) < 1e-12:
        direction = rng.standard_normal(3)
    b = LorentzTransform.boost(direction, float(rng.uniform(0.0, rapidity_max)))
    r2 = random_rotation(rng)
    return r1.compose(b).compose(r2)


def _random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    norms = np.linalg.norm(v, axis=1)
    bad = norms < 1e-12
    if np.any(bad):
        v[bad] = np.array([0.0, 0.0, 1.0])
        norms[bad] = 1.0
    return v / norms[:, None]


def _sample_params(
    label: OrbitLabel, n: int, rng: np.random.Generator, rapidity_max: float
) -> tuple[np.ndarray, np.ndarray]:
    """Scalar parameter and direction for each sample; zero orbits use none."""
    if label.causal_class is CausalClass.ZERO:
        return np.zeros(n), np.zeros((n, 3))
    dirs = _random_directions(rng, n)
    if label.causal_class.is_timelike:
        chi = rng.uniform(0.0, rapidity_max, size=n)
    elif label.causal_class.is_null:
        chi = rng.uniform(-rapidity_max, rapidity_max, size=n)
    else:
        chi = rng.uniform(-rapidity_max, rapidity_max, size=n)
    return chi, dirs


def _build_orbit_points(label: OrbitLabel, chi: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    n = chi.shape[0]
    out = np.zeros((n, 4))
    cls = label.causal_class
    if cls is CausalClass.ZERO:
        return out
    if cls.is_timelike:
        sign = 1.0 if cls is CausalClass.TIMELIKE_FUTURE else -1.0
        out[:, 0] = sign * label.radius * np.cosh(chi)
        out[:, 1:] = label.radius * np.sinh(chi)[:, None] * dirs
    elif cls.is_null:
        sign = 1.0 if cls is CausalClass.NULL_FUTURE else -1.0
        energy = np.exp(chi)
        out[:, 0] = sign * energy
        out[:, 1:] = energy[:, None] * dirs
    else:
        out[:, 0] = label.radius * np.sinh(chi)
        out[:, 1:] = label.radius * np.cosh(chi)[:, None] * dirs
    return out


def sample_orbit(
    label: OrbitLabel,
    n: int,
    seed: int = 0,
    rapidity_max: float = DEFAULT_RAPIDITY_MAX,
) -> np.ndarray:
    """Draw n points of the orbit, deterministically in (label, n, seed).

    Timelike orbits boost the rest-frame seed point by a rapidity uniform
    on [0, rapidity_max] in a uniformly random direction; spacelike orbits
    use rapidity uniform on [-rapidity_max, rapidity_max]; null orbits
    scale a random ray by exp of a uniform on the same interval.  The zero
    orbit yields n copies of the origin.
    """
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    rng = substream(seed, "sample-orbit", label.causal_class.name, repr(label.radius))
    chi, dirs = _sample_params(label, n, rng, rapidity_max)
    return _build_orbit_points(label, chi, dirs)


@dataclass(frozen=True)
class SumRangeReport:
    """Empirical census of pointwise sums of two orbits."""

    label1: OrbitLabel
    label2: OrbitLabel
    n_pairs: int
    seed: int
    class_counts: Mapping[CausalClass, int]
    radius_ranges: Mapping[CausalClass, tuple[float, float]]
    radius_min: float
    radius_max: float

    @property
    def classes(self) -> set[CausalClass]:
        return set(self.class_counts)

    def single_class(self) -> CausalClass | None:
        if len(self.class_counts) == 1:
            return next(iter(self.class_counts))
        return None


def orbit_sum_range(
    label1: OrbitLabel,
    label2: OrbitLabel,
    n_pairs: int = 20000,
    seed: int = 0,
    collinear_fraction: float = 0.05,
    rapidity_max: float = DEFAULT_RAPIDITY_MAX,
    tol: float = TAU_NUM,
) -> SumRangeReport:
    """Sample sums v1 + v2 over the two orbits and report the class census.

    A collinear_fraction of the pairs is steered toward the extremal
    directions: half of them share both direction and scalar parameter
    exactly (hitting radius extremes such as r1 + r2, or the origin for
    opposite equal-radius timelike orbits), the other half sit within
    about 1e-3 of that stratum.
    """
    if n_pairs < 1:
        raise ValueError("need at least one pair")
    rng1 = substream(seed, "sum-range", "first", label1.causal_class.name, repr(label1.radius))
    rng2 = substream(seed, "sum-range", "second", label2.causal_class.name, repr(label2.radius))
    chi1, dirs1 = _sample_params(label1, n_pairs, rng1, rapidity_max)
    chi2, dirs2 = _sample_params(label2, n_pairs, rng2, rapidity_max)

    n_exact = int(n_pairs * collinear_fraction / 2.0)
    n_near = int(n_pairs * collinear_fraction / 2.0)
    if label1.causal_class is not CausalClass.ZERO and label2.causal_class is not CausalClass.ZERO:
        # the radius extremes sit on the aligned stratum: same rapidity,
        # and spatial directions parallel for matching time orientations
        # but antiparallel for opposite ones (so the sum can reach the
        # origin for equal-radius opposite orbits)
        orient = {
            CausalClass.TIMELIKE_FUTURE: 1,
            CausalClass.NULL_FUTURE: 1,
            CausalClass.TIMELIKE_PAST: -1,
            CausalClass.NULL_PAST: -1,
        }
        o1 = orient.get(label1.causal_class, 0)
        o2 = orient.get(label2.causal_class, 0)
        flip = -1.0 if o1 * o2 == -1 else 1.0
        if n_exact:
            chi2[:n_exact] = chi1[:n_exact]
            dirs2[:n_exact] = flip * dirs1[:n_exact]
        if n_near:
            sl = slice(n_exact, n_exact + n_near)
            jrng = substream(seed, "sum-range", "jitter")
            chi2[sl] = chi1[sl] + jrng.uniform(-1e-3, 1e-3, size=n_near)
            wobble = flip * dirs1[sl] + 1e-3 * jrng.standard_normal((n_near, 3))
            dirs2[sl] = wobble / np.linalg.norm(wobble, axis=1)[:, None]

    sums = _build_orbit_points(label1, chi1, dirs1) + _build_orbit_points(label2, chi2, dirs2)
    codes, radii = _kernels.classify_radius(sums, tol)

    counts: dict[CausalClass, int] = {}
    ranges: dict[CausalClass, tuple[float, float]] = {}
    for code in np.unique(codes):
        cls = _CLASS_BY_CODE[int(code)]
        mask = codes == code
        counts[cls] = int(np.sum(mask))
        ranges[cls] = (float(np.min(radii[mask])), float(np.max(radii[mask])))
    return SumRangeReport(
        label1=label1,
        label2=label2,
        n_pairs=n_pairs,
        seed=seed,
        class_counts=counts,
        radius_ranges=ranges,
        radius_min=float(np.min(radii)),
        radius_max=float(np.max(radii)),
    )
