"""Gaussian-mixture identification and the lower-bound certificate.

Conditioned on the disturbed coordinate subset J, the measurement Y = N X of
a hard-instance input is a uniform mixture of Gaussians: centers N u_i and
covariance sigma^2 N P_J N^T (possibly singular). The posterior over the
anchor index is computed exactly in the log domain. The distinctness
statistic D(y) = max_i P(I = i | y) drives the certified bound

    error >= c * (P(D <= 1/2) / 2  -  delta)

valid for the average error of *every* algorithm reading the information,
where delta is the truncation defect and c the anchor separation. Estimates
enter the certificate at their conservative interval ends.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import rng as rngmod
from .errors import DimensionMismatch, InconsistentObservation
from .gaussian_core import as_matrix, as_vector
from .hard_instance import HardInstanceSpec
from .protocol import Mode
from .stats import Estimate, wilson

# eigenvalues at or below RANK_CUT * lambda_max are treated as exact zeros
RANK_CUT = 1e-12


@dataclass(frozen=True)
class GaussianMixtureModel:
    """Uniform-weight Gaussian mixture; covariance shared across components."""

    centers: np.ndarray  # (M, n)
    covariance: np.ndarray  # (n, n) PSD, possibly singular

    def __post_init__(self):
        c = as_matrix(self.centers)
        s = as_matrix(self.covariance)
        if s.shape[0] != s.shape[1] or s.shape[0] != c.shape[1]:
            raise DimensionMismatch("covariance must be (n, n) matching centers (M, n)")
        if float(np.abs(s - s.T).max(initial=0.0)) > 1e-10 * max(1.0, float(np.abs(s).max(initial=0.0))):
            raise DimensionMismatch("covariance must be symmetric")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "covariance", 0.5 * (s + s.T))

    @property
    def num_components(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @cached_property
    def _eig(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(eigenvalues, eigenvectors, range mask) with the rank cut applied."""
        w, q = np.linalg.eigh(self.covariance)
        wmax = float(w.max(initial=0.0))
        in_range = w > RANK_CUT * max(wmax, 0.0)
        return w, q, in_range


@dataclass(frozen=True)
class PosteriorVector:
    """Posterior over mixture components.

    ``log_weights`` are log-densities up to one shared additive constant
    (stored max-subtracted, so the maximum is 0; impossible components carry
    -inf). ``normalized_probs`` sums to 1.
    """

    log_weights: np.ndarray
    normalized_probs: np.ndarray

    @property
    def argmax(self) -> int:
        # first occurrence = smallest index on ties
        return int(np.argmax(self.normalized_probs))

    @property
    def max_prob(self) -> float:
        return float(self.normalized_probs.max())


def normalize_log_weights(log_weights) -> PosteriorVector:
    """Stable normalization: invariant under adding any constant to all."""
    lw = np.asarray(log_weights, dtype=float)
    if lw.ndim != 1 or lw.size == 0:
        raise DimensionMismatch("log_weights must be a nonempty vector")
    top = lw.max()
    if not np.isfinite(top):
        raise InconsistentObservation("all component log-weights are -inf")
    shifted = lw - top
    probs = np.exp(shifted)
    probs /= probs.sum()
    return PosteriorVector(log_weights=shifted, normalized_probs=probs)


def conditioned_mixture(
    spec: HardInstanceSpec, measurement_matrix, subset_j
) -> GaussianMixtureModel:
    """Law of Y = N X given the disturbance subset: centers N u_i and
    covariance sigma^2 N P_J N^T (the disturbance is sigma P_J Z, so sigma
    enters squared)."""
    nmat = as_matrix(measurement_matrix)
    if nmat.shape[1] != spec.m:
        raise DimensionMismatch(f"matrix must have {spec.m} columns, got {nmat.shape[1]}")
    subset = np.asarray(subset_j, dtype=np.intp)
    if subset.size and (subset.min() < 0 or subset.max() >= spec.m):
        raise DimensionMismatch("subset index out of range")
    centers = spec.image_centers(nmat)
    nj = nmat[:, subset]
    cov = (spec.sigma**2) * (nj @ nj.T)
    return GaussianMixtureModel(centers=centers, covariance=cov)


def posterior(
    model: GaussianMixtureModel, y, rank_tolerance: float = 1e-8
) -> PosteriorVector:
    """Exact mixture posterior at observation y, log-domain throughout.

    Singular covariances are handled by splitting along the eigenbasis:
    probability is assigned only among components whose projection onto the
    null directions matches y within ``rank_tolerance * (1 + |y|)``; the
    Gaussian density is evaluated on the range directions and the shared
    normalizing constants cancel. Raises ``InconsistentObservation`` when no
    component matches (impossible under exact simulation of the model).
    """
    yv = as_vector(y, model.dim)
    w, q, in_range = model._eig
    diffs = yv[None, :] - model.centers  # (M, n)
    proj = diffs @ q  # components along eigvecs
    null_sq = (proj[:, ~in_range] ** 2).sum(axis=1)
    tol = rank_tolerance * (1.0 + float(np.linalg.norm(yv)))
    matched = null_sq <= tol * tol
    if not matched.any():
        raise InconsistentObservation(
            "observation lies off the affine support of every component"
        )
    quad = (proj[:, in_range] ** 2 / w[in_range]).sum(axis=1)
    lw = np.where(matched, -0.5 * quad, -np.inf)
    return normalize_log_weights(lw)


# ---------------------------------------------------------------------------
# Monte Carlo distinctness and the certificate
# ---------------------------------------------------------------------------


def _distinctness_chunk(
    spec: HardInstanceSpec,
    nmat: np.ndarray,
    centers: np.ndarray,
    batch: int,
    rng: np.random.Generator,
    rank_tolerance: float,
) -> np.ndarray:
    """D = max_i P(I=i | Y, J) for ``batch`` independent draws (vectorized)."""
    n_info, m = nmat.shape
    two_n = 2 * spec.n
    idx = rng.integers(spec.num_points, size=batch)
    subsets = rngmod.sample_subsets_batch(m, two_n, batch, rng)
    z = rng.standard_normal((batch, two_n))
    cols = nmat.T[subsets]  # (B, 2n, n_info)
    y = centers[idx] + spec.sigma * np.einsum("bkn,bk->bn", cols, z)
    cov = (spec.sigma**2) * np.einsum("bkn,bkm->bnm", cols, cols)
    w, q = np.linalg.eigh(cov)  # (B, n), (B, n, n)
    wmax = np.maximum(w.max(axis=1), 0.0)
    in_range = w > RANK_CUT * wmax[:, None]

    diffs = y[:, None, :] - centers[None, :, :]  # (B, M, n)
    proj = np.einsum("bmn,bnk->bmk", diffs, q)
    null_sq = np.where(in_range[:, None, :], 0.0, proj**2).sum(axis=2)
    tol = rank_tolerance * (1.0 + np.linalg.norm(y, axis=1))
    matched = null_sq <= (tol * tol)[:, None]
    w_safe = np.where(in_range, w, 1.0)
    quad = np.where(in_range[:, None, :], proj**2 / w_safe[:, None, :], 0.0).sum(axis=2)
    lw = np.where(matched, -0.5 * quad, -np.inf)
    top = lw.max(axis=1, keepdims=True)
    probs = np.exp(lw - top)
    return probs.max(axis=1) / probs.sum(axis=1)


def distinctness_probability(
    spec: HardInstanceSpec,
    measurement_matrix,
    threshold: float = 0.5,
    trials: int = 10_000,
    rng: np.random.Generator | None = None,
    rank_tolerance: float = 1e-8,
    max_chunk_floats: int = 1 << 23,
) -> Estimate:
    """Monte Carlo estimate of P(D(Y, J) <= threshold) under the untruncated
    law, with Wilson 99% interval. Each trial draws (I, J, Z), forms Y = N X,
    and evaluates the exact conditional posterior given J."""
    if trials < 10_000:
        raise ValueError("trials must be >= 1e4")
    if rng is None:
        raise ValueError("an explicit rng stream is required")
    nmat = as_matrix(measurement_matrix)
    if nmat.shape[1] != spec.m:
        raise DimensionMismatch(f"matrix must have {spec.m} columns")
    centers = spec.image_centers(nmat)
    per_trial = max(1, spec.num_points * nmat.shape[0])
    chunk = int(min(8192, max(8, max_chunk_floats // per_trial)))
    hits = 0
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        d = _distinctness_chunk(spec, nmat, centers, b, rng, rank_tolerance)
        hits += int(np.count_nonzero(d <= threshold))
        done += b
    return wilson(hits, trials)


def certificate_value(prob_distinct: float, delta: float, c: float) -> float:
    """Plain arithmetic of the certified bound: c (prob/2 - delta), floored at 0."""
    return max(0.0, c * (0.5 * prob_distinct - delta))


def conditional_error_bound(total_mass: float, max_component_mass: float, c: float) -> float:
    """Bound on inf_g E[|X - g| 1_surv] for c-separated component sets:
    c * min(T/2, T - max_i t_i) where T is surviving mass and t_i the mass
    surviving inside component i."""
    return c * min(0.5 * total_mass, total_mass - max_component_mass)


@dataclass(frozen=True)
class CertificateResult:
    """Certified lower bound with its Monte Carlo components."""

    bound: float  # conservative: interval ends against us
    bound_point: float  # plain plug-in of the point estimates
    prob_distinct: Estimate
    delta: Estimate
    c: float


def lower_bound_certificate(
    spec: HardInstanceSpec,
    measurement_matrix,
    trials: int = 10_000,
    rng: np.random.Generator | None = None,
) -> CertificateResult:
    """Certified average-error lower bound for any algorithm reading (Y, J).

    Uses the lower Wilson end of P(D <= 1/2) and the upper end of delta, so
    the reported bound never overstates; clipped below at zero.
    """
    if trials < 10_000:
        raise ValueError("trials must be >= 1e4")
    if rng is None:
        raise ValueError("an explicit rng stream is required")
    from .hard_instance import estimate_truncation_delta

    r_prob, r_delta = rngmod.split(rng, 2)
    prob = distinctness_probability(spec, measurement_matrix, 0.5, trials, r_prob)
    delta = estimate_truncation_delta(spec, max(trials, 10_000), r_delta)
    c = spec.separation_c
    bound = certificate_value(max(0.0, prob.lo), min(1.0, delta.hi), c)
    bound_point = certificate_value(prob.value, delta.value, c)
    return CertificateResult(
        bound=bound, bound_point=bound_point, prob_distinct=prob, delta=delta, c=c
    )


# ---------------------------------------------------------------------------
# Plug-in decoder used to exercise the bound
# ---------------------------------------------------------------------------


class BayesModeDecoder:
    """Posterior-mode decoder on the extended information (Y, J).

    Registers the rows of the measurement matrix non-adaptively, then outputs
    the anchor point with maximal conditional posterior (ties to the smallest
    index). Any certified lower bound must survive this decoder, which is the
    natural strongest plug-in.
    """

    name = "bayes-mode"
    mode = Mode.NONADAPTIVE

    def __init__(self, spec: HardInstanceSpec, measurement_matrix):
        self.spec = spec
        self.matrix = as_matrix(measurement_matrix)
        if self.matrix.shape[1] != spec.m:
            raise DimensionMismatch(f"matrix must have {spec.m} columns")

    def run(self, session, rng, side_info=None) -> np.ndarray:
        if side_info is None or "subset" not in side_info:
            raise ValueError("bayes-mode decoder needs the disturbance subset as side info")
        budget = min(self.matrix.shape[0], session.remaining)
        for row in self.matrix[:budget]:
            session.register(row)
        y = session.reveal()
        model = conditioned_mixture(self.spec, self.matrix[:budget], side_info["subset"])
        post = posterior(model, y)
        return self.spec.point(post.argmax)


def bayes_mode_decoder(spec: HardInstanceSpec, measurement_matrix) -> BayesModeDecoder:
    return BayesModeDecoder(spec, measurement_matrix)
