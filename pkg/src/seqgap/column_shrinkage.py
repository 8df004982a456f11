"""Iterative column selection with certified ellipsoid inclusions.

Given a measurement matrix N and a 2n-element coordinate subset J, the
procedure selects n dominant columns j_1, ..., j_n from J while shrinking a
candidate set m_0 = [m] ⊃ m_1 ⊃ ... ⊃ m_n: at each stage the remaining
candidates are sorted by the norm of their component orthogonal to the
already-selected columns, the top-sorted member of J is selected, and
everything sorted above it is discarded. The record of this run certifies,
column by column, that every candidate surviving to the end lies in the
rectangle spanned by the orthogonalized selected columns, and stage by stage
that this rectangle sits inside sqrt((4^i - 1)/3) times the ellipsoid
generated by the selected columns - jointly placing at least
|m_n| + n columns inside the 2^n-inflated noise ellipsoid of J.

The stage count K_n (1-based sort position of the last selection) has the
same law as the n-th largest element of a uniform 2n-subset, which is what
makes the surviving count exceed m/2 with probability at least 1/2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .errors import DimensionMismatch
from .gaussian_core import Ellipsoid, as_matrix, ellipsoid_membership_many
from .stats import Estimate, wilson

# a projected column counts as zero below this relative threshold
_ZERO_NORM_REL = 1e-10


@dataclass(frozen=True)
class ShrinkageTrace:
    """Full record of one run: everything needed to replay the certificates."""

    matrix: np.ndarray  # (n_info, m)
    subset: np.ndarray  # the 2n-element J, sorted
    selected: np.ndarray  # (n,) selected indices j_1..j_n in order
    k_values: np.ndarray  # (n,) 1-based sort positions k_1..k_n
    candidate_sets: tuple  # n+1 sorted index arrays m_0 ⊃ ... ⊃ m_n
    basis: np.ndarray  # (n, n_info) rows b_i = column j_i
    projected_basis: np.ndarray  # (n, n_info) rows P_{i-1} b_i
    effective: np.ndarray  # (n,) bool: projected norm above threshold
    n0: int  # dimension of the selected span per the first-zero rule
    final_set: np.ndarray  # selected ∪ m_n, sorted

    @property
    def num_steps(self) -> int:
        return self.selected.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "subset": self.subset.tolist(),
            "selected": self.selected.tolist(),
            "k_values": self.k_values.tolist(),
            "candidate_set_sizes": [len(c) for c in self.candidate_sets],
            "final_set": self.final_set.tolist(),
            "n0": self.n0,
            "effective": [bool(e) for e in self.effective],
        }


def run_shrinkage(measurement_matrix, subset_j) -> ShrinkageTrace:
    """Execute the selection/shrinkage iteration and record everything.

    Sorting is stable on candidate arrays kept in increasing index order, so
    equal projected norms break toward the smaller index, making the trace
    deterministic.
    """
    nmat = as_matrix(measurement_matrix)
    n, m = nmat.shape
    subset = np.unique(np.asarray(subset_j, dtype=np.intp))
    if subset.size == 0 or subset.min() < 0 or subset.max() >= m:
        raise DimensionMismatch("subset must be nonempty with indices in [0, m)")
    if subset.size != 2 * n:
        raise DimensionMismatch(
            f"subset must have 2n = {2 * n} distinct indices, got {subset.size}"
        )
    in_j = np.zeros(m, dtype=bool)
    in_j[subset] = True

    candidates = np.arange(m)
    candidate_sets = [candidates.copy()]
    ortho: list[np.ndarray] = []  # orthonormal basis of the selected span
    selected = np.empty(n, dtype=np.intp)
    k_values = np.empty(n, dtype=np.intp)
    basis = np.zeros((n, n))
    projected = np.zeros((n, n))
    effective = np.zeros(n, dtype=bool)

    for i in range(n):
        cols = nmat[:, candidates]  # (n, m_i)
        for qvec in ortho:
            cols = cols - np.outer(qvec, qvec @ cols)
        norms = np.linalg.norm(cols, axis=0)
        order = np.argsort(norms, kind="stable")
        sorted_cands = candidates[order]
        positions_in_j = np.flatnonzero(in_j[sorted_cands])
        k = int(positions_in_j[-1]) + 1  # 1-based position of the last J member
        j_sel = int(sorted_cands[k - 1])
        selected[i] = j_sel
        k_values[i] = k
        b = nmat[:, j_sel].copy()
        basis[i] = b
        pb = b.copy()
        for qvec in ortho:
            pb = pb - qvec * (qvec @ pb)
        projected[i] = pb
        norm_pb = float(np.linalg.norm(pb))
        if norm_pb > _ZERO_NORM_REL * float(np.linalg.norm(b)):
            effective[i] = True
            ortho.append(pb / norm_pb)
        candidates = np.sort(sorted_cands[: k - 1])
        candidate_sets.append(candidates.copy())

    # first stage i in [1, n-1] whose *next* selection projects to zero caps
    # the span dimension; scan steps 2..n for the first ineffective one
    n0 = n
    for step in range(1, n):
        if not effective[step]:
            n0 = step
            break

    final_set = np.union1d(selected, candidates)
    return ShrinkageTrace(
        matrix=nmat,
        subset=subset,
        selected=selected,
        k_values=k_values,
        candidate_sets=tuple(candidate_sets),
        basis=basis,
        projected_basis=projected,
        effective=effective,
        n0=n0,
        final_set=final_set,
    )


def verify_column_in_rectangle(trace: ShrinkageTrace, column_index: int) -> bool:
    """Certify c_j ∈ R_n: expand over the orthogonalized selected columns and
    require every coefficient in [-1, 1] and negligible residual off the span.

    Coefficient tolerance 1e-8 absolute on the unit interval; residual
    tolerance 1e-8 relative to |c_j| (a zero column passes trivially).
    """
    c = trace.matrix[:, column_index]
    recon = np.zeros_like(c)
    ok = True
    for i in range(trace.num_steps):
        if not trace.effective[i]:
            continue
        pb = trace.projected_basis[i]
        denom = float(pb @ pb)
        coeff = float(pb @ c) / denom
        if abs(coeff) > 1.0 + 1e-8:
            ok = False
        recon = recon + coeff * pb
    resid = float(np.linalg.norm(c - recon))
    if resid > 1e-8 * (float(np.linalg.norm(c)) + 1e-30):
        ok = False
    return ok


def verify_rectangle_in_ellipsoid(
    trace: ShrinkageTrace, stage_i: int, inflation_scale: float = 1.0
) -> bool:
    """Certify R_i ⊆ sqrt((4^i - 1)/3) E_{j_i} by testing every vertex.

    R_i is the set of [-1,1]-combinations of the first i orthogonalized
    columns; by convexity membership of all 2^i sign-pattern vertices in the
    ellipsoid generated by the first i selected columns certifies the full
    inclusion. ``inflation_scale`` rescales the proven radius (used by the
    checker's own failure self-test). Vertex enumeration is capped at i <= 20.
    """
    if not 1 <= stage_i <= trace.num_steps:
        raise ValueError(f"stage must be in [1, {trace.num_steps}]")
    if stage_i > 20:
        raise ValueError("vertex enumeration capped at 2^20")
    radius = inflation_scale * np.sqrt((4.0**stage_i - 1.0) / 3.0)
    factor = trace.matrix[:, trace.selected[:stage_i]]
    ell = Ellipsoid(factor=factor)
    pbs = trace.projected_basis[:stage_i]
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=stage_i)))
    vertices = signs @ pbs
    return bool(np.all(ellipsoid_membership_many(ell, vertices, radius)))


def measured_minimal_inflation(trace: ShrinkageTrace) -> float:
    """Smallest rho with all surviving columns inside rho * E_J (data only;
    the proven factor is 2^n and whether a polynomial factor suffices is
    outside what this trace can decide)."""
    factor = trace.matrix[:, trace.subset]
    cols = trace.matrix[:, trace.final_set].T
    z = cols @ np.linalg.pinv(factor).T
    return float(np.linalg.norm(z, axis=1).max(initial=0.0))


def inflated_count_probability(
    measurement_matrix,
    trials: int,
    rng: np.random.Generator,
    inflation: float | None = None,
) -> Estimate:
    """P(#{j : c_j ∈ 2^n E_J} >= m/2) over uniform 2n-subsets J, Wilson CI."""
    nmat = as_matrix(measurement_matrix)
    n_info, m = nmat.shape
    if 2 * n_info >= m:
        raise DimensionMismatch("need 2n < m")
    if trials < 500:
        raise ValueError("trials must be >= 500")
    radius = float(2.0**n_info) if inflation is None else inflation
    cols = nmat.T  # rows are the columns of N
    hits = 0
    for _ in range(trials):
        subset = rngmod.sample_subset(m, 2 * n_info, rng)
        ell = Ellipsoid(factor=nmat[:, subset])
        count = int(np.count_nonzero(ellipsoid_membership_many(ell, cols, radius)))
        if count >= m / 2:
            hits += 1
    return wilson(hits, trials)


def exact_kn_law(m: int, n: int) -> np.ndarray:
    """Exact pmf (over values 1..m) of the n-th largest element of a uniform
    2n-subset of {1..m}, by full enumeration. Demands C(m, 2n) to be small."""
    if 2 * n > m:
        raise ValueError("need 2n <= m")
    if m > 16:
        raise ValueError("full enumeration restricted to m <= 16")
    pmf = np.zeros(m + 1)
    count = 0
    for subset in itertools.combinations(range(1, m + 1), 2 * n):
        kth = sorted(subset, reverse=True)[n - 1]
        pmf[kth] += 1.0
        count += 1
    return pmf[1:] / count


def kn_law_check(m: int, n: int, trials: int, rng: np.random.Generator) -> float:
    """Total-variation distance between the empirical law of K_n from the
    shrinkage construction (fresh Gaussian matrix and uniform J per trial)
    and the exactly enumerated order-statistic law."""
    if 2 * n > m:
        raise ValueError("need 2n <= m")
    exact = exact_kn_law(m, n)
    counts = np.zeros(m + 1)
    for _ in range(trials):
        nmat = rng.standard_normal((n, m))
        subset = rngmod.sample_subset(m, 2 * n, rng)
        trace = run_shrinkage(nmat, subset)
        counts[int(trace.k_values[-1])] += 1.0
    emp = counts[1:] / trials
    return float(0.5 * np.abs(emp - exact).sum())
