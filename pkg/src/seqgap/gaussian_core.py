"""Dense Gaussian primitives: sampling, PSD square roots, ellipsoid membership,
and Monte Carlo checks of the norm-concentration bounds everything downstream
leans on.

Vectors and matrices are plain ``numpy`` arrays (float64, finite entries);
``as_vector`` / ``as_matrix`` are the validation chokepoints. An ellipsoid is
represented by a factor matrix A with E = A(B_2^k), which covers rank-deficient
shapes (image of a unit ball under any linear map) without special cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, IndefiniteMatrix, NotSymmetric

# membership decisions allow this much multiplicative slack on the radius so
# that boundary points (|z| == radius exactly) test as members
_RADIUS_SLACK = 1e-9


def as_vector(x, length: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    if length is not None and v.shape[0] != length:
        raise DimensionMismatch(f"expected length {length}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_matrix(a, shape: tuple[int, int] | None = None) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {m.shape}")
    if shape is not None and m.shape != shape:
        raise DimensionMismatch(f"expected shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def sample_std_gaussian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """iid standard normal vector; deterministic given the stream state."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return rng.standard_normal(dim)


def psd_sqrt(sigma, sym_tol: float = 1e-10, eig_tol: float = 1e-10) -> np.ndarray:
    """Symmetric square root S of a PSD matrix, S @ S.T == sigma.

    Route: symmetric eigendecomposition, clamp slightly negative eigenvalues
    to zero. Exact functional calculus is replaced by an explicit tolerance
    band: asymmetry beyond ``sym_tol`` (relative to the largest entry) raises
    ``NotSymmetric``; an eigenvalue below ``-eig_tol * |lambda|_max`` raises
    ``IndefiniteMatrix``.
    """
    a = as_matrix(sigma)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("psd_sqrt needs a square matrix")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    asym = float(np.abs(a - a.T).max(initial=0.0))
    if asym > sym_tol * scale:
        raise NotSymmetric(f"asymmetry {asym:.3e} exceeds tolerance {sym_tol * scale:.3e}")
    a = 0.5 * (a + a.T)
    w, q = np.linalg.eigh(a)
    wmax = max(float(w.max(initial=0.0)), 0.0)
    if float(w.min()) < -eig_tol * max(wmax, 1e-300):
        raise IndefiniteMatrix(f"eigenvalue {w.min():.3e} below -{eig_tol:.0e} * |sigma|")
    w = np.clip(w, 0.0, None)
    return (q * np.sqrt(w)) @ q.T


@dataclass(frozen=True)
class Ellipsoid:
    """E = factor(B_2^k): image of a Euclidean unit ball under a linear map.

    ``factor`` is n x k; rank-deficient factors describe degenerate (flat)
    ellipsoids. ``rank_tolerance`` is the residual band used to decide whether
    a point lies in the affine range of the factor.
    """

    factor: np.ndarray
    rank_tolerance: float = 1e-8
    _pinv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        f = as_matrix(self.factor)
        object.__setattr__(self, "factor", f)
        object.__setattr__(self, "_pinv", np.linalg.pinv(f))

    @property
    def ambient_dim(self) -> int:
        return self.factor.shape[0]


def ellipsoid_membership(e: Ellipsoid, x, radius: float) -> bool:
    """Whether x lies in radius * E.

    Decided by minimum-norm least squares: z = pinv(A) x must reproduce x
    within ``rank_tolerance * (1 + |x|)`` (range condition, which is what
    rejects points off a flat ellipsoid) and satisfy |z| <= radius up to a
    1e-9 relative slack so exact boundary points are members.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    xv = as_vector(x, e.ambient_dim)
    z = e._pinv @ xv
    resid = float(np.linalg.norm(e.factor @ z - xv))
    if resid > e.rank_tolerance * (1.0 + float(np.linalg.norm(xv))):
        return False
    return float(np.linalg.norm(z)) <= radius * (1.0 + _RADIUS_SLACK) + 1e-15


def ellipsoid_membership_many(e: Ellipsoid, xs, radius: float) -> np.ndarray:
    """Vectorized membership for rows of ``xs``; same decision rule."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    xm = np.asarray(xs, dtype=float)
    if xm.ndim != 2 or xm.shape[1] != e.ambient_dim:
        raise DimensionMismatch(f"expected (*, {e.ambient_dim}) array")
    z = xm @ e._pinv.T
    resid = np.linalg.norm(z @ e.factor.T - xm, axis=1)
    in_range = resid <= e.rank_tolerance * (1.0 + np.linalg.norm(xm, axis=1))
    small = np.linalg.norm(z, axis=1) <= radius * (1.0 + _RADIUS_SLACK) + 1e-15
    return in_range & small


def tail_bound_check(
    dim: int,
    norm_kind: str,
    trials: int,
    rng: np.random.Generator,
    chunk: int = 1 << 16,
) -> tuple[float, float]:
    """Monte Carlo estimate of a Gaussian norm tail against its proven bound.

    Estimates P(|Z|_2 > 3 sqrt(dim)) or P(|Z|_1 > 3 dim) for a standard
    Gaussian vector Z in R^dim and returns (estimate, exp(-2 dim)); the
    second entry always dominates the first up to sampling error.
    """
    if trials < 10_000:
        raise ValueError("trials must be >= 1e4 for a meaningful tail estimate")
    if norm_kind not in ("l1", "l2"):
        raise ValueError("norm_kind must be 'l1' or 'l2'")
    threshold = 3.0 * np.sqrt(dim) if norm_kind == "l2" else 3.0 * dim
    hits = 0
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        z = rng.standard_normal((b, dim))
        norms = np.linalg.norm(z, axis=1) if norm_kind == "l2" else np.abs(z).sum(axis=1)
        hits += int(np.count_nonzero(norms > threshold))
        done += b
    return hits / trials, float(np.exp(-2.0 * dim))
