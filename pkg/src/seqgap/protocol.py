"""Budget-enforced access to a hidden vector through linear functionals.

An algorithm never touches the input directly; it opens a session and pays
one unit of budget per functional evaluated. Adaptive sessions answer each
query immediately, so later functionals may depend on earlier values.
Non-adaptive sessions force the honest two-phase discipline: all functionals
are registered first, values are revealed in one batch, and any attempt to
interleave raises ``ProtocolViolation``. This boundary is what makes
adaptive-vs-non-adaptive comparisons meaningful.

Functionals may be dense vectors or sparse (indices, values) pairs; sparse
support keeps block-restricted measurements cheap at large ambient dimension.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Protocol, Union

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, ProtocolViolation
from .gaussian_core import as_vector


class Mode(str, enum.Enum):
    ADAPTIVE = "adaptive"
    NONADAPTIVE = "nonadaptive"


@dataclass(frozen=True)
class SparseFunctional:
    """Linear functional supported on few coordinates: L(x) = values . x[indices]."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        val = np.asarray(self.values, dtype=float)
        if idx.ndim != 1 or val.ndim != 1 or idx.shape != val.shape:
            raise DimensionMismatch("indices and values must be equal-length vectors")
        if not np.all(np.isfinite(val)):
            raise ValueError("functional coefficients must be finite")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)


FunctionalLike = Union[np.ndarray, SparseFunctional, list, tuple]


class InformationSession:
    """Ledger of linear-functional evaluations against a hidden input.

    The hidden vector is module-private by convention (name-mangled
    attribute); algorithms interact only through ``query`` / ``register`` /
    ``reveal``. The ledger records every (functional, value) pair, so a run
    is an exact, replayable transcript.
    """

    def __init__(self, x, budget: int, mode: Mode | str = Mode.ADAPTIVE):
        if budget < 0:
            raise ValueError("budget must be >= 0")
        self.__x = as_vector(x)
        self.budget = int(budget)
        self.mode = Mode(mode)
        self.ledger: list[tuple[FunctionalLike, float]] = []
        self._pending: list[FunctionalLike] = []
        self._revealed = False

    @property
    def dim(self) -> int:
        return self.__x.shape[0]

    @property
    def used(self) -> int:
        return len(self.ledger) + len(self._pending)

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def _evaluate(self, functional: FunctionalLike) -> float:
        if isinstance(functional, SparseFunctional):
            if functional.indices.size and (
                functional.indices.min() < 0 or functional.indices.max() >= self.dim
            ):
                raise DimensionMismatch("sparse functional index out of range")
            return float(np.dot(functional.values, self.__x[functional.indices]))
        vec = as_vector(functional, self.dim)
        return float(np.dot(vec, self.__x))

    def query(self, functional: FunctionalLike) -> float:
        """Adaptive evaluation: pay one budget unit, get the value now."""
        if self.mode is not Mode.ADAPTIVE:
            raise ProtocolViolation(
                "query() is adaptive usage; a nonadaptive session only supports "
                "register() followed by a single reveal()"
            )
        if self.used >= self.budget:
            raise BudgetExceeded(f"budget {self.budget} exhausted")
        value = self._evaluate(functional)
        self.ledger.append((functional, value))
        return value

    def register(self, functional: FunctionalLike) -> None:
        """Non-adaptive registration; no value is returned until reveal()."""
        if self.mode is not Mode.NONADAPTIVE:
            raise ProtocolViolation("register() requires a nonadaptive session")
        if self._revealed:
            raise ProtocolViolation("cannot register after reveal (interleaving)")
        if self.used >= self.budget:
            raise BudgetExceeded(f"budget {self.budget} exhausted")
        if isinstance(functional, SparseFunctional):
            pass
        else:
            functional = as_vector(functional, self.dim)
        self._pending.append(functional)

    def reveal(self) -> np.ndarray:
        """Evaluate all registered functionals at once; closes registration."""
        if self.mode is not Mode.NONADAPTIVE:
            raise ProtocolViolation("reveal() requires a nonadaptive session")
        if self._revealed:
            raise ProtocolViolation("reveal() may be called only once")
        self._revealed = True
        values = np.array([self._evaluate(f) for f in self._pending])
        self.ledger.extend(zip(self._pending, values.tolist()))
        self._pending = []
        return values


def open_session(x, budget: int, mode: Mode | str = Mode.ADAPTIVE) -> InformationSession:
    return InformationSession(x, budget, mode)


# ---------------------------------------------------------------------------
# Algorithm plug-in point
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Query:
    functional: FunctionalLike


@dataclass(frozen=True)
class Finish:
    output: np.ndarray


class Algorithm(Protocol):
    """Anything with a name, a mode, and a run(session, rng, side_info)."""

    name: str
    mode: Mode

    def run(self, session: InformationSession, rng, side_info=None) -> np.ndarray: ...


class CallbackAlgorithm:
    """Adapter for the two-callback style: next_action(history, rng) returns
    either Query(L) or Finish(output). Adaptive mode only (the callback sees
    values as they arrive)."""

    def __init__(self, next_action: Callable, name: str = "callback"):
        self.next_action = next_action
        self.name = name
        self.mode = Mode.ADAPTIVE

    def run(self, session: InformationSession, rng, side_info=None) -> np.ndarray:
        while True:
            action = self.next_action(tuple(session.ledger), rng)
            if isinstance(action, Finish):
                return as_vector(action.output)
            if isinstance(action, Query):
                session.query(action.functional)
                continue
            raise TypeError("next_action must return Query(...) or Finish(...)")


def run_algorithm(
    alg, x, budget: int, mode: Mode | str | None = None, rng=None, side_info=None
) -> tuple[np.ndarray, int]:
    """Execute an algorithm against a fresh session on hidden input x.

    Returns (output, measurements_used). ``mode`` defaults to the algorithm's
    declared mode. ``rng`` drives the algorithm's internal randomness only;
    the session itself is deterministic.
    """
    if callable(alg) and not hasattr(alg, "run"):
        alg = CallbackAlgorithm(alg)
    if mode is None:
        mode = getattr(alg, "mode", Mode.ADAPTIVE)
    session = InformationSession(x, budget, mode)
    output = alg.run(session, rng, side_info=side_info)
    return as_vector(output, session.dim), session.used
