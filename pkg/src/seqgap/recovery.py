"""Recovery algorithms speaking the information-session protocol.

Upper-bound side of the laboratory: an adaptive two-stage sparse recovery
whose information cost grows only like log log of the ambient dimension,
plus the non-adaptive baselines it is compared against (Gaussian sketch with
linear decode, l1-minimization, greedy matching pursuit).

Adaptive recovery structure: stage one subsamples K candidate sets of
expected size eps*m/k, so that with constant probability a heavy coordinate
lands in a set where it dominates; stage two locates the heavy coordinate of
each set by repeatedly splitting the surviving candidates into blocks and
keeping the loudest. Rounds come in two flavors:

* robust rounds measure each of a few blocks directly with fresh Gaussian
  functionals restricted to the block, score by summed absolute value, and
  keep the argmax;
* once every non-kept block measures exactly zero, the remainder of the
  input restricted to the set is one-sparse and a single pair of
  measurements - one Gaussian functional and the same functional with its
  coefficients multiplied by the block label - identifies the heavy block
  among thousands at once through the ratio of the two values.

Every decision statistic is a ratio or an exact zero test of measurements,
so runs are homogeneous: scaling the input scales the output bit-exactly.
Found coordinates are read out exactly; the output is the input restricted
to the found set, hence never worse than the zero vector.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import ceil, log2

import numpy as np

from . import rng as rngmod
from .errors import BudgetExceeded, DimensionMismatch, DomainError, Infeasible, NotConvergedWarning
from .gaussian_core import as_matrix, as_vector
from .posterior import bayes_mode_decoder
from .protocol import Mode, SparseFunctional

# budget-formula implementation constant: one candidate set spends at most
# rounds * votes_per_round functionals (robust rounds use votes_per_round - 1,
# ratio rounds 2, verification 1), so c1 = 1 covers the whole stage
C1 = 1

# ratio rounds decode at most this many blocks in one measurement pair
_RATIO_BITS_CAP = 16

# robust rounds split into this many directly measured blocks
_ROBUST_BLOCKS = 4
_ROBUST_VOTES = 2  # functionals per block in a robust round


@dataclass(frozen=True)
class RecoveryConfig:
    """Knobs of the adaptive recovery; defaults are the calibrated desk values.

    ``votes_per_round`` is the per-round functional allowance. Constants are
    calibrated empirically on this implementation, not imported from the
    sparse-recovery literature.
    """

    k: int
    eps: float
    votes_per_round: int = 9
    rounds_per_candidate: int | None = None  # None: ceil(log2 log2 s) + 2
    num_candidate_sets: int | None = None  # None: ceil(k / eps)
    rng_seed: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 < self.eps <= 1.0:
            raise ValueError("eps must lie in (0, 1]")
        if self.votes_per_round < 3:
            raise ValueError("votes_per_round must be >= 3")
        if self.num_candidate_sets is not None and self.num_candidate_sets < 1:
            raise ValueError("num_candidate_sets must be >= 1")

    @property
    def candidate_sets(self) -> int:
        return self.num_candidate_sets or ceil(self.k / self.eps)


def rounds_cap(num_candidates: int) -> int:
    """Shrinkage rounds allowed for one candidate set: ceil(log2 log2 s) + 2."""
    s = max(num_candidates, 2)
    return int(ceil(log2(max(2.0, log2(s))))) + 2


def measurement_budget(m: int, k: int, eps: float, votes_per_round: int = 9) -> int:
    """Total functional budget of the adaptive recovery.

    c1 * ceil((k/eps) * (log2 log2 (m eps / k + 4) + 2) * votes_per_round)
    plus ceil(k/eps) exact readout queries, with c1 = 1 (one candidate set
    provably spends at most rounds * votes_per_round functionals). The round
    term is kept real-valued inside the ceiling so the budget is monotone in
    both k and m.
    """
    if m < 16 * k:
        raise DomainError(f"need m >= 16k, got m={m}, k={k}")
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    num_sets = ceil(k / eps)
    rounds = log2(log2(m * eps / k + 4.0)) + 2.0
    return C1 * ceil((k / eps) * rounds * votes_per_round) + num_sets


def best_k_term_error(x, k: int, norm_q: str = "l2") -> float:
    """Exact distance to the best k-sparse approximation: zero all but the k
    largest-magnitude entries (ties toward smaller index), take the norm."""
    xv = as_vector(x)
    if not 0 <= k <= xv.size:
        raise ValueError(f"need 0 <= k <= {xv.size}")
    if k == xv.size:
        return 0.0
    order = np.argsort(-np.abs(xv), kind="stable")
    tail = xv.copy()
    tail[order[:k]] = 0.0
    if norm_q == "l2":
        return float(np.linalg.norm(tail))
    if norm_q == "linf":
        return float(np.abs(tail).max(initial=0.0))
    if norm_q == "l1":
        return float(np.abs(tail).sum())
    raise ValueError("norm_q must be one of 'l1', 'l2', 'linf'")


# ---------------------------------------------------------------------------
# Non-adaptive baselines
# ---------------------------------------------------------------------------


class ZeroAlgorithm:
    """Outputs zero without looking; the budget-0 baseline."""

    name = "zero"
    mode = Mode.NONADAPTIVE

    def run(self, session, rng, side_info=None) -> np.ndarray:
        return np.zeros(session.dim)


class GaussianSketchAlgorithm:
    """Registers rows of a fresh iid Gaussian matrix, decodes linearly:
    output = N^T y / n. The classic non-adaptive randomized method."""

    name = "gaussian-linear"
    mode = Mode.NONADAPTIVE

    def __init__(self, n_rows: int | None = None):
        self.n_rows = n_rows

    def _sketch(self, session, rng):
        n = self.n_rows if self.n_rows is not None else session.remaining
        if n < 1:
            return None, None
        nmat = rng.standard_normal((n, session.dim))
        for row in nmat:
            session.register(row)
        y = session.reveal()
        return nmat, y

    def run(self, session, rng, side_info=None) -> np.ndarray:
        nmat, y = self._sketch(session, rng)
        if nmat is None:
            return np.zeros(session.dim)
        return nmat.T @ y / nmat.shape[0]


def gaussian_linear_sketch(n_rows: int | None = None) -> GaussianSketchAlgorithm:
    return GaussianSketchAlgorithm(n_rows)


def l1_min_decode(
    measurement_matrix,
    y,
    tol: float = 1e-6,
    max_iter: int = 100_000,
    rho: float = 1.0,
) -> np.ndarray:
    """Minimum-l1 point of {z : N z = y} by splitting iterations.

    Alternates a Euclidean projection onto the affine constraint with
    soft-thresholding (shrinkage); the returned iterate is the feasible one.
    Raises ``Infeasible`` when y is not in the range of N within 1e-8; warns
    ``NotConvergedWarning`` and returns the best iterate at the cap.
    """
    nmat = as_matrix(measurement_matrix)
    yv = as_vector(y, nmat.shape[0])
    ynorm = float(np.linalg.norm(yv))
    if ynorm == 0.0:
        return np.zeros(nmat.shape[1])
    pinv = np.linalg.pinv(nmat)
    x = pinv @ yv
    if float(np.linalg.norm(nmat @ x - yv)) > 1e-8 * (1.0 + ynorm):
        raise Infeasible("y is not in the range of the measurement matrix")

    def project(v):
        return v - pinv @ (nmat @ v - yv)

    z = x.copy()
    u = np.zeros_like(x)
    scale = max(1.0, float(np.linalg.norm(x)))
    for _ in range(max_iter):
        x = project(z - u)
        z_old = z
        z = np.sign(x + u) * np.maximum(np.abs(x + u) - 1.0 / rho, 0.0)
        u = u + x - z
        primal = float(np.linalg.norm(x - z))
        dual = float(np.linalg.norm(rho * (z - z_old)))
        if primal <= tol * scale and dual <= tol * scale:
            return project(z)
    warnings.warn("l1 decode hit the iteration cap", NotConvergedWarning, stacklevel=2)
    return project(z)


def greedy_decode(measurement_matrix, y, k: int, tol: float = 1e-12) -> np.ndarray:
    """Matching-pursuit decode: grow a support greedily, refit by least squares."""
    nmat = as_matrix(measurement_matrix)
    yv = as_vector(y, nmat.shape[0])
    support: list[int] = []
    z = np.zeros(nmat.shape[1])
    residual = yv.copy()
    for _ in range(min(k, nmat.shape[1])):
        scores = np.abs(nmat.T @ residual)
        scores[support] = -1.0
        j = int(np.argmax(scores))
        support.append(j)
        coef, *_ = np.linalg.lstsq(nmat[:, support], yv, rcond=None)
        z = np.zeros(nmat.shape[1])
        z[support] = coef
        residual = yv - nmat @ z
        if float(np.linalg.norm(residual)) <= tol * (1.0 + float(np.linalg.norm(yv))):
            break
    return z


class SketchDecodeAlgorithm:
    """Gaussian sketch with a pluggable non-linear decoder (l1 or greedy)."""

    mode = Mode.NONADAPTIVE

    def __init__(self, name: str, decoder, n_rows: int | None = None):
        self.name = name
        self.decoder = decoder
        self.n_rows = n_rows

    def run(self, session, rng, side_info=None) -> np.ndarray:
        n = self.n_rows if self.n_rows is not None else session.remaining
        if n < 1:
            return np.zeros(session.dim)
        nmat = rng.standard_normal((n, session.dim))
        for row in nmat:
            session.register(row)
        y = session.reveal()
        return self.decoder(nmat, y)


def l1_sketch_algorithm(n_rows: int | None = None, max_iter: int = 20_000) -> SketchDecodeAlgorithm:
    return SketchDecodeAlgorithm(
        "l1min", lambda nmat, y: l1_min_decode(nmat, y, max_iter=max_iter), n_rows
    )


def greedy_sketch_algorithm(n_rows: int | None = None, k: int | None = None) -> SketchDecodeAlgorithm:
    def decode(nmat, y):
        kk = k if k is not None else max(1, nmat.shape[0] // 4)
        return greedy_decode(nmat, y, kk)

    return SketchDecodeAlgorithm("greedy", decode, n_rows)


# ---------------------------------------------------------------------------
# Adaptive recovery
# ---------------------------------------------------------------------------


def _partition(indices: np.ndarray, blocks: int, rng: np.random.Generator):
    perm = rng.permutation(indices)
    return np.array_split(perm, blocks)


def adaptive_one_sparse(
    session,
    candidate_set,
    config: RecoveryConfig,
    rng: np.random.Generator,
    allowance: int | None = None,
) -> int | None:
    """Locate the dominant coordinate of the input within ``candidate_set``.

    Runs at most ceil(log2 log2 s) + 2 shrinkage rounds and spends at most
    ``allowance`` functionals (defaults to the session's remaining budget).
    Returns the located index, or None when the trail goes cold: every block
    measures exactly zero, the rounds or allowance run out before reaching a
    singleton, or the final verification measurement is exactly zero.
    """
    candidates = np.asarray(candidate_set, dtype=np.intp)
    if candidates.size == 0:
        return None
    if allowance is None:
        allowance = session.remaining
    cap = config.rounds_per_candidate or rounds_cap(candidates.size)
    votes = config.votes_per_round
    robust_cost = _ROBUST_BLOCKS * _ROBUST_VOTES  # <= votes - 1 for votes >= 9
    spent = 0
    current = candidates
    clean = False  # last round proved the set one-sparse (exact zeros elsewhere)

    def ratio_probe(indices):
        """One measurement pair; decodes the heavy block among up to 2^16 at
        once. Returns (picked block, residual off the nearest label)."""
        nonlocal spent
        blocks = _partition(indices, min(indices.size, 1 << _RATIO_BITS_CAP), rng)
        labels = np.concatenate([np.full(b.size, i + 1.0) for i, b in enumerate(blocks)])
        order = np.concatenate(blocks)
        g = rng.standard_normal(order.size)
        base = session.query(SparseFunctional(order, g))
        shifted = session.query(SparseFunctional(order, g * labels))
        spent += 2
        if base == 0.0:
            return None, np.inf
        ratio = shifted / base
        nearest = float(np.rint(ratio))
        pick = int(min(max(nearest, 1.0), len(blocks))) - 1
        return blocks[pick], abs(ratio - nearest)

    def robust_round(indices):
        """Direct per-block scores; keeps the argmax block. Returns
        (kept block or None, whether every other block measured exactly 0)."""
        nonlocal spent
        blocks = _partition(indices, min(indices.size, _ROBUST_BLOCKS), rng)
        scores = np.zeros(len(blocks))
        for b, block in enumerate(blocks):
            for _vote in range(_ROBUST_VOTES):
                g = rng.standard_normal(block.size)
                scores[b] += abs(session.query(SparseFunctional(block, g)))
                spent += 1
        if not np.any(scores > 0.0):
            return None, False
        keep = int(np.argmax(scores))
        others_zero = bool(np.all(scores[np.arange(len(blocks)) != keep] == 0.0))
        return blocks[keep], others_zero

    for _ in range(cap):
        if current.size == 1:
            break
        afford_robust = allowance - spent >= robust_cost + 3 and votes - 1 >= robust_cost
        if clean or not afford_robust:
            if allowance - spent < 3:
                return None
            picked, resid = ratio_probe(current)
            if picked is None:
                return None
            if resid <= 1e-6:
                current = picked
                clean = True
                continue
            # probe contradicts one-sparseness; keep the unshrunk set and fall
            # back to a robust split in the same round when affordable
            clean = False
            if allowance - spent >= robust_cost + 3 and votes - 1 >= robust_cost:
                kept, others_zero = robust_round(current)
                if kept is None:
                    return None
                clean = others_zero
                current = kept
            else:
                current = picked  # best effort at the budget edge
        else:
            kept, others_zero = robust_round(current)
            if kept is None:
                return None
            clean = others_zero
            current = kept

    if current.size != 1:
        return None
    if allowance - spent < 1 or session.remaining < 1:
        return None
    j = int(current[0])
    check = session.query(SparseFunctional(np.array([j]), rng.standard_normal(1)))
    return None if check == 0.0 else j


class AdaptiveKSparseAlgorithm:
    """Two-stage adaptive recovery with an l2/l2-style guarantee.

    Stage one draws K = ceil(k/eps) candidate sets by independent
    per-index Bernoulli(min(1, eps/k)) inclusion; stage two locates one heavy
    coordinate per set; the union of located indices (at most K of them) is
    read out exactly and everything else is zeroed. Failures degrade
    gracefully: the output is always a coordinate restriction of the input,
    so its error never exceeds the input norm.
    """

    name = "adaptive-ksparse"
    mode = Mode.ADAPTIVE

    def __init__(self, config: RecoveryConfig):
        self.config = config

    def run(self, session, rng, side_info=None) -> np.ndarray:
        m = session.dim
        cfg = self.config
        num_sets = cfg.candidate_sets
        include_p = min(1.0, cfg.eps / cfg.k)
        allowance = max(0, session.remaining - num_sets) // num_sets
        streams = rngmod.split(rng, num_sets)
        found: list[int] = []
        for t in range(num_sets):
            mask = streams[t].random(m) < include_p
            candidates = np.flatnonzero(mask)
            if candidates.size == 0:
                continue
            try:
                j = adaptive_one_sparse(session, candidates, cfg, streams[t], allowance)
            except BudgetExceeded:
                break
            if j is not None:
                found.append(j)
        located = sorted(set(found))
        out = np.zeros(m)
        for j in located:
            if session.remaining < 1:
                break
            out[j] = session.query(SparseFunctional(np.array([j]), np.array([1.0])))
        return out


def adaptive_k_sparse_recover(session, config: RecoveryConfig, rng) -> np.ndarray:
    """Functional form of the two-stage recovery against an open session."""
    return AdaptiveKSparseAlgorithm(config).run(session, rng)


# ---------------------------------------------------------------------------
# Name registry (CLI plug-in point)
# ---------------------------------------------------------------------------


def make_algorithm(name: str, context: dict):
    """Build a registered algorithm from an experiment context.

    Context keys used: ``budget`` (information budget), ``k``, ``eps``,
    ``recovery_config`` (overrides k/eps), ``spec`` and ``matrix`` for the
    posterior-mode decoder.
    """
    budget = context.get("budget")
    if name == "zero":
        return ZeroAlgorithm()
    if name == "gaussian-linear":
        return GaussianSketchAlgorithm(budget)
    if name == "l1min":
        return l1_sketch_algorithm(budget)
    if name == "greedy":
        return greedy_sketch_algorithm(budget, context.get("k"))
    if name == "adaptive-ksparse":
        cfg = context.get("recovery_config")
        if cfg is None:
            cfg = RecoveryConfig(k=context.get("k", 1), eps=context.get("eps", 0.5))
        return AdaptiveKSparseAlgorithm(cfg)
    if name == "bayes-mode":
        return bayes_mode_decoder(context["spec"], context["matrix"])
    raise KeyError(f"no algorithm registered under {name!r}")


REGISTERED_ALGORITHMS = (
    "zero",
    "gaussian-linear",
    "l1min",
    "greedy",
    "adaptive-ksparse",
    "bayes-mode",
)
