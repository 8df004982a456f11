"""Adversarial input distribution for lower-bound experiments.

The random input is X = u_I + sigma * P_J Z: a uniformly chosen anchor point
u_I inside the l1 unit ball, disturbed by a standard Gaussian projected onto
2n uniformly random coordinates and scaled by sigma. Each anchor owns an l1
ball F_i = u_i + r0 B_1 that fits inside the unit ball; the measure is
truncated to the event that X stays inside its own ball, and averages against
the truncated measure are taken by zeroing the integrand off that event.

Defaults follow the regime that makes the construction hard for non-adaptive
measurements: anchors u_i = (2/3) e_i on the coordinate axes (one per
dimension), sigma = 1/(18 n), r0 = 1/3, pairwise sup-norm separation 1/3.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import rng as rngmod
from .errors import InvalidDimensions, InvalidGeometry, UnsupportedGeometry
from .gaussian_core import as_vector
from .protocol import Mode, run_algorithm
from .stats import Estimate, mean_ci, wilson

AXIS_FAMILY = "axis-2/3"
AXIS_SCALE = 2.0 / 3.0
_PAIR_CAP = 2_000_000  # max pairwise separations certified exactly


def _ball_distance_linf(diff: np.ndarray, slack: float) -> float:
    """Exact sup-norm distance between u + r0 B_1 and u' + r0 B_1 where
    diff = u - u' and slack = 2 r0.

    Equals min over w in slack * B_1 of |diff - w|_inf, solved by water
    filling: the smallest t >= 0 with sum_i max(|diff_i| - t, 0) <= slack.
    """
    a = np.sort(np.abs(diff))[::-1]
    if a.size == 0 or a[0] <= 0.0:
        return 0.0
    excess = np.cumsum(a)
    if float(excess[-1]) <= slack:
        return 0.0
    for j in range(1, a.size + 1):
        t = (float(excess[j - 1]) - slack) / j
        upper = a[j - 1]
        lower = a[j] if j < a.size else 0.0
        if lower <= t <= upper:
            return max(t, 0.0)
    return max((float(excess[-1]) - slack) / a.size, 0.0)


@dataclass(frozen=True)
class HardInstanceSpec:
    """Parameters of the adversarial distribution.

    ``points`` is either the sentinel ``"axis-2/3"`` (anchors (2/3) e_i,
    num_points == m, stored implicitly so large m stays cheap) or an explicit
    (M, m) array of anchor points.
    """

    m: int
    n: int
    num_points: int
    sigma: float
    r0: float
    separation_c: float
    points: Union[str, np.ndarray]

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise InvalidDimensions("m and n must be positive")
        if 2 * self.n >= self.m:
            raise InvalidDimensions(f"need 2n < m, got n={self.n}, m={self.m}")
        if self.sigma < 0 or not (0 < self.r0 <= 1):
            raise InvalidGeometry("need sigma >= 0 and 0 < r0 <= 1")
        if isinstance(self.points, str):
            if self.points != AXIS_FAMILY:
                raise InvalidGeometry(f"unknown point family {self.points!r}")
            if self.num_points != self.m:
                raise InvalidGeometry("axis family has exactly m points")
            if AXIS_SCALE + self.r0 > 1.0 + 1e-12:
                raise InvalidGeometry("axis ball escapes the unit ball")
            if AXIS_SCALE - self.r0 < self.separation_c - 1e-12:
                raise InvalidGeometry("axis family separation below separation_c")
        else:
            pts = np.asarray(self.points, dtype=float)
            if pts.shape != (self.num_points, self.m):
                raise InvalidGeometry(f"points must be ({self.num_points}, {self.m})")
            if not np.all(np.isfinite(pts)):
                raise InvalidGeometry("points must be finite")
            norms = np.abs(pts).sum(axis=1)
            if np.any(norms + self.r0 > 1.0 + 1e-12):
                bad = int(np.argmax(norms))
                raise InvalidGeometry(
                    f"ball around point {bad} escapes the unit ball "
                    f"(|u|_1 + r0 = {norms[bad] + self.r0:.6f} > 1)"
                )
            object.__setattr__(self, "points", pts)
            npairs = self.num_points * (self.num_points - 1) // 2
            if npairs > _PAIR_CAP:
                warnings.warn(
                    "too many point pairs to certify separation exactly; skipping",
                    stacklevel=2,
                )
            elif self.num_points > 1:
                _, dinf = separation_distances(self)
                if dinf < self.separation_c - 1e-12:
                    raise InvalidGeometry(
                        f"pairwise sup-norm separation {dinf:.6f} below "
                        f"required {self.separation_c}"
                    )

    @property
    def is_axis_family(self) -> bool:
        return isinstance(self.points, str)

    def point(self, i: int) -> np.ndarray:
        if not 0 <= i < self.num_points:
            raise IndexError(f"point index {i} out of range")
        if self.is_axis_family:
            u = np.zeros(self.m)
            u[i] = AXIS_SCALE
            return u
        return np.array(self.points[i])

    def image_centers(self, matrix: np.ndarray) -> np.ndarray:
        """Images of all anchors under a measurement matrix, shape (M, n_rows)."""
        nmat = np.asarray(matrix, dtype=float)
        if nmat.ndim != 2 or nmat.shape[1] != self.m:
            raise InvalidDimensions(f"matrix must have {self.m} columns")
        if self.is_axis_family:
            return AXIS_SCALE * nmat.T.copy()
        return self.points @ nmat.T

    def truncation_threshold(self) -> float:
        """Disturbance survives iff |Z_J|_1 <= r0 / sigma."""
        return np.inf if self.sigma == 0.0 else self.r0 / self.sigma


@dataclass(frozen=True)
class HardSample:
    """One draw of the adversarial input; fields satisfy x = u_I + sigma W
    bit-exactly in the arithmetic used, with W supported on subset_j."""

    index_i: int
    subset_j: np.ndarray
    z_on_subset: np.ndarray
    x: np.ndarray
    truncated_flag: bool

    @property
    def disturbance_w(self) -> np.ndarray:
        w = np.zeros(self.x.shape[0])
        w[self.subset_j] = self.z_on_subset
        return w


def build_spec(
    m: int,
    n: int,
    sigma: float | None = None,
    r0: float = 1.0 / 3.0,
    separation_c: float = 1.0 / 3.0,
    points: Union[str, np.ndarray] = AXIS_FAMILY,
    num_points: int | None = None,
) -> HardInstanceSpec:
    """Spec with the defaults sigma = 1/(18n), u_i = (2/3) e_i, M = m."""
    if m < 1 or n < 1:
        raise InvalidDimensions("m and n must be positive")
    if 2 * n >= m:
        raise InvalidDimensions(f"need 2n < m, got n={n}, m={m}")
    if sigma is None:
        sigma = 1.0 / (18.0 * n)
    if num_points is None:
        num_points = m if isinstance(points, str) else np.asarray(points).shape[0]
    return HardInstanceSpec(
        m=m,
        n=n,
        num_points=num_points,
        sigma=float(sigma),
        r0=float(r0),
        separation_c=float(separation_c),
        points=points,
    )


def draw_sample(spec: HardInstanceSpec, rng: np.random.Generator) -> HardSample:
    """I ~ Uniform[M], J ~ Uniform over 2n-subsets, Z standard normal on J."""
    i = int(rng.integers(spec.num_points))
    subset = rngmod.sample_subset(spec.m, 2 * spec.n, rng)
    z = rng.standard_normal(2 * spec.n)
    x = spec.point(i)
    x[subset] += spec.sigma * z
    truncated = bool(np.abs(z).sum() <= spec.truncation_threshold())
    return HardSample(
        index_i=i, subset_j=subset, z_on_subset=z, x=x, truncated_flag=truncated
    )


def separation_distances(spec: HardInstanceSpec) -> tuple[float, float]:
    """Exact pairwise minima (dist_1, dist_inf) over all anchor-ball pairs.

    The l1 distance between two l1 balls is |u - u'|_1 - 2 r0 (clipped at 0);
    the sup-norm distance is the water-filling minimum. For the axis family
    both are closed-form; explicit families are certified pair by pair, which
    is refused above a size cap.
    """
    if spec.num_points <= 1:
        return np.inf, np.inf
    slack = 2.0 * spec.r0
    if spec.is_axis_family:
        diff = np.zeros(2)
        diff[0] = AXIS_SCALE
        diff[1] = -AXIS_SCALE
        d1 = max(2.0 * AXIS_SCALE - slack, 0.0)
        dinf = _ball_distance_linf(diff, slack)
        return d1, dinf
    npairs = spec.num_points * (spec.num_points - 1) // 2
    if npairs > _PAIR_CAP:
        raise UnsupportedGeometry(
            f"{npairs} pairs exceed the exact-certification cap {_PAIR_CAP}"
        )
    pts = spec.points
    best1 = np.inf
    bestinf = np.inf
    for i in range(spec.num_points - 1):
        diffs = pts[i] - pts[i + 1 :]
        d1 = np.abs(diffs).sum(axis=1) - slack
        best1 = min(best1, float(np.clip(d1, 0.0, None).min()))
        for row in diffs:
            bestinf = min(bestinf, _ball_distance_linf(row, slack))
    return best1, bestinf


def estimate_truncation_delta(
    spec: HardInstanceSpec,
    trials: int,
    rng: np.random.Generator,
    chunk: int = 1 << 16,
) -> Estimate:
    """Monte Carlo estimate of delta = P(|W|_1 > r0/sigma), Wilson 99% CI.

    Only the 2n Gaussian coordinates matter for the event, so the subset and
    anchor draws are skipped.
    """
    if trials < 10_000:
        raise ValueError("trials must be >= 1e4")
    threshold = spec.truncation_threshold()
    if np.isinf(threshold):
        return wilson(0, trials)
    hits = 0
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        z = rng.standard_normal((b, 2 * spec.n))
        hits += int(np.count_nonzero(np.abs(z).sum(axis=1) > threshold))
        done += b
    return wilson(hits, trials)


def _norm(v: np.ndarray, norm_q: str) -> float:
    if norm_q == "l2":
        return float(np.linalg.norm(v))
    if norm_q == "linf":
        return float(np.abs(v).max(initial=0.0))
    raise ValueError("norm_q must be 'l2' or 'linf'")


def mu_average_error(
    spec: HardInstanceSpec,
    algorithm,
    norm_q: str,
    trials: int,
    rng: np.random.Generator,
    budget: int | None = None,
) -> Estimate:
    """Average error against the truncated measure: E[|A(X) - X|_q 1_surv].

    Each trial draws a sample from the untruncated law; samples that fail the
    truncation test contribute exactly 0 (they remain in the denominator),
    which is the integral against the sub-probability measure. The algorithm
    runs behind a fresh information session per trial with its own split
    stream, so trials are order-independent.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if budget is None:
        budget = spec.n
    streams = rngmod.split(rng, trials)
    errors = np.zeros(trials)
    for t in range(trials):
        sample = draw_sample(spec, streams[t])
        if not sample.truncated_flag:
            continue
        out, _ = run_algorithm(
            algorithm,
            sample.x,
            budget,
            mode=getattr(algorithm, "mode", Mode.ADAPTIVE),
            rng=streams[t],
            side_info={"subset": sample.subset_j, "spec": spec},
        )
        errors[t] = _norm(out - sample.x, norm_q)
    return mean_ci(errors)


# ---------------------------------------------------------------------------
# JSON round-trip (consumed by the experiment harness)
# ---------------------------------------------------------------------------


def spec_to_json_dict(spec: HardInstanceSpec) -> dict:
    return {
        "m": spec.m,
        "n": spec.n,
        "sigma": spec.sigma,
        "r0": spec.r0,
        "M": spec.num_points,
        "separation_c": spec.separation_c,
        "points": spec.points if spec.is_axis_family else np.asarray(spec.points).tolist(),
    }


def spec_from_json_dict(doc: dict) -> HardInstanceSpec:
    points = doc.get("points", AXIS_FAMILY)
    if not isinstance(points, str):
        points = np.asarray(points, dtype=float)
    return build_spec(
        m=int(doc["m"]),
        n=int(doc["n"]),
        sigma=float(doc["sigma"]) if "sigma" in doc else None,
        r0=float(doc.get("r0", 1.0 / 3.0)),
        separation_c=float(doc.get("separation_c", 1.0 / 3.0)),
        points=points,
        num_points=int(doc["M"]) if "M" in doc else None,
    )


def spec_to_json(spec: HardInstanceSpec) -> str:
    return json.dumps(spec_to_json_dict(spec), sort_keys=True)


def spec_from_json(text: str) -> HardInstanceSpec:
    return spec_from_json_dict(json.loads(text))
