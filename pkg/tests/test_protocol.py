import numpy as np
import pytest

from seqgap import (
    BudgetExceeded,
    CallbackAlgorithm,
    DimensionMismatch,
    Finish,
    InformationSession,
    Mode,
    ProtocolViolation,
    Query,
    SparseFunctional,
    make_rng,
    open_session,
    run_algorithm,
)


def eye_row(dim, j):
    v = np.zeros(dim)
    v[j] = 1.0
    return v


class TestSession:
    def test_budget_zero_blocks_everything(self):
        s = open_session([1.0, 2.0], 0, Mode.ADAPTIVE)
        with pytest.raises(BudgetExceeded):
            s.query([1.0, 0.0])
        s2 = open_session([1.0, 2.0], 0, Mode.NONADAPTIVE)
        with pytest.raises(BudgetExceeded):
            s2.register([1.0, 0.0])

    def test_full_recovery_with_budget_m(self):
        x = np.array([3.0, -1.0, 2.5])
        s = open_session(x, 3, Mode.ADAPTIVE)
        got = np.array([s.query(eye_row(3, j)) for j in range(3)])
        assert np.array_equal(got, x)

    def test_coordinate_and_zero_functionals(self):
        x = np.array([4.0, 5.0])
        s = open_session(x, 3, Mode.ADAPTIVE)
        assert s.query(eye_row(2, 1)) == 5.0
        assert s.query(np.zeros(2)) == 0.0

    def test_budget_exceeded_on_extra_query(self):
        s = open_session(np.ones(4), 2, Mode.ADAPTIVE)
        s.query(eye_row(4, 0))
        s.query(eye_row(4, 1))
        with pytest.raises(BudgetExceeded):
            s.query(eye_row(4, 2))

    def test_dimension_mismatch(self):
        s = open_session(np.ones(4), 2, Mode.ADAPTIVE)
        with pytest.raises(DimensionMismatch):
            s.query(np.ones(3))
        with pytest.raises(DimensionMismatch):
            s.query(SparseFunctional(np.array([7]), np.array([1.0])))

    def test_nonadaptive_query_is_violation(self):
        s = open_session(np.ones(4), 2, Mode.NONADAPTIVE)
        with pytest.raises(ProtocolViolation):
            s.query(eye_row(4, 0))

    def test_nonadaptive_interleaving_violation(self):
        s = open_session(np.arange(4.0), 4, Mode.NONADAPTIVE)
        s.register(eye_row(4, 0))
        values = s.reveal()
        assert values.tolist() == [0.0]
        with pytest.raises(ProtocolViolation):
            s.register(eye_row(4, 1))
        with pytest.raises(ProtocolViolation):
            s.reveal()

    def test_nonadaptive_batch_reveal(self):
        x = np.array([1.0, 2.0, 3.0])
        s = open_session(x, 3, Mode.NONADAPTIVE)
        for j in range(3):
            s.register(eye_row(3, j))
        assert s.reveal().tolist() == [1.0, 2.0, 3.0]
        assert s.used == 3

    def test_sparse_functional_matches_dense(self):
        rng = make_rng(0)
        x = rng.standard_normal(50)
        idx = np.array([3, 11, 40])
        vals = rng.standard_normal(3)
        dense = np.zeros(50)
        dense[idx] = vals
        s = open_session(x, 2, Mode.ADAPTIVE)
        assert s.query(SparseFunctional(idx, vals)) == s.query(dense)

    def test_ledger_is_exact_transcript(self):
        x = np.array([2.0, -1.0])
        s = open_session(x, 2, Mode.ADAPTIVE)
        s.query([1.0, 1.0])
        (functional, value), = s.ledger
        assert value == 1.0


class ReadFirstCoordinate:
    name = "read-first"
    mode = Mode.ADAPTIVE

    def run(self, session, rng, side_info=None):
        v = session.query(SparseFunctional(np.array([0]), np.array([1.0])))
        out = np.zeros(session.dim)
        out[0] = v
        return out


class TestRunAlgorithm:
    def test_zero_algorithm_zero_measurements(self):
        from seqgap.recovery import ZeroAlgorithm

        out, used = run_algorithm(ZeroAlgorithm(), np.ones(5), 3, rng=make_rng(0))
        assert used == 0
        assert np.array_equal(out, np.zeros(5))

    def test_sketch_uses_exactly_n(self):
        from seqgap.recovery import GaussianSketchAlgorithm

        out, used = run_algorithm(
            GaussianSketchAlgorithm(4), np.ones(16), 4, rng=make_rng(0)
        )
        assert used == 4

    def test_replay_bit_identical(self):
        from seqgap.recovery import GaussianSketchAlgorithm

        x = make_rng(5).standard_normal(32)
        out1, _ = run_algorithm(GaussianSketchAlgorithm(6), x, 6, rng=make_rng(9))
        out2, _ = run_algorithm(GaussianSketchAlgorithm(6), x, 6, rng=make_rng(9))
        assert np.array_equal(out1, out2)

    def test_callback_interface(self):
        def next_action(history, rng):
            if not history:
                return Query(np.array([1.0, 0.0]))
            return Finish(np.array([history[0][1], 0.0]))

        out, used = run_algorithm(next_action, np.array([7.0, 1.0]), 2, rng=make_rng(0))
        assert used == 1
        assert out.tolist() == [7.0, 0.0]

    def test_callback_class(self):
        alg = CallbackAlgorithm(lambda history, rng: Finish(np.zeros(3)), name="noop")
        out, used = run_algorithm(alg, np.ones(3), 0, rng=make_rng(0))
        assert used == 0

    def test_unqueried_direction_uncorrelated(self):
        # the output's guess at a never-queried +-1 coordinate carries no signal
        rng = make_rng(31)
        alg = ReadFirstCoordinate()
        trials = 2000
        agreement = 0
        for _ in range(trials):
            secret = 1.0 if rng.random() < 0.5 else -1.0
            x = np.array([rng.standard_normal(), secret, 0.0])
            out, _ = run_algorithm(alg, x, 1, rng=rng)
            guess = 1.0 if out[1] >= 0 else -1.0
            agreement += guess == secret
        # binomial(2000, 1/2): 5 sigma is ~112
        assert abs(agreement - trials / 2) <= 5 * np.sqrt(trials / 4)
