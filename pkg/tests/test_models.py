from fractions import Fraction as F

import numpy as np
import pytest
from tbctrl import (CostWeights, ModelId, ParameterSet, adjoint_rhs,
                    control_characterization, default_params, dynamics,
                    model_definition, running_cost, validate_params)
from tbctrl.core import TimeTable
from tbctrl.models import (MODELS, cost_state_vector, has_baseline,
                           neutral_control, uncontrolled_rhs)

EXPECTED_DIMS = {
    ModelId.SEIRS: (4, 1),
    ModelId.TWO_STRAIN: (6, 2),
    ModelId.REINFECTION: (4, 1),
    ModelId.ISOLATION_IMMIGRATION: (5, 2),
    ModelId.KOREA: (4, 3),
    ModelId.BOWONG: (4, 2),
    ModelId.POST_EXPOSURE: (5, 2),
}


def flagship_params():
    return ParameterSet({
        "Lambda": 143.0, "beta": 13.0, "c": 1.0, "mu": 0.0143, "sigma": 1.0,
        "k1": 1.0, "r1": 2.0, "r2": 1.0, "d1": 0.0, "N": 10000.0,
    })


def flagship_x0():
    n = 10000.0
    return np.array([(76 / 120) * n, (38 / 120) * n, (5 / 120) * n, (1 / 120) * n])


class TestCatalog:
    def test_seven_models_with_expected_dimensions(self):
        assert len(MODELS) == 7
        for mid, (m, nu) in EXPECTED_DIMS.items():
            d = model_definition(mid)
            assert (d.state_dim, d.control_dim) == (m, nu)

    def test_defaults_validate(self):
        for mid in ModelId:
            assert validate_params(mid, default_params(mid)) == []


class TestSeirsDynamics:
    def test_matches_exact_arithmetic_oracle(self):
        # oracle: direct substitution evaluated in exact rational arithmetic
        p = flagship_params()
        x = flagship_x0()
        mu, c, beta, sigma = F(0.0143), F(1), F(13), F(1)
        r1, r2, k1, d1, n, lam_in = F(2), F(1), F(1), F(0), F(10000), F(143)
        s, l1, i1, tr = (F(v) for v in x)
        th = beta * c / n
        exact = [
            lam_in - th * s * i1 - mu * s,
            th * s * i1 - (mu + r1) * l1 - k1 * l1 + sigma * th * tr * i1,
            k1 * l1 - (mu + r2 + d1) * i1,
            r1 * l1 + r2 * i1 - sigma * th * tr * i1 - mu * tr,
        ]
        frozen = (-3378.122222222222, -6069.5888888888885,
                  2744.0416666666665, 6703.669444444444)
        assert np.allclose([float(v) for v in exact], frozen, rtol=1e-12)
        got = dynamics(ModelId.SEIRS, 0.0, x, np.array([0.0]), p)
        assert np.allclose(got, [float(v) for v in exact], rtol=1e-12)

    def test_disease_free_subspace(self):
        p = flagship_params()
        x = np.array([7000.0, 0.0, 0.0, 500.0])
        f = dynamics(ModelId.SEIRS, 0.0, x, np.array([0.3]), p)
        assert f[1] == 0.0 and f[2] == 0.0
        assert f[0] == pytest.approx(143.0 - 0.0143 * 7000.0, rel=1e-14)

    def test_population_balance_when_inflow_matches_deaths(self):
        # Lambda = mu*N, d1 = 0, and sum(x) = N: component sums cancel up to rounding
        p = flagship_params()
        rng = np.random.default_rng(3)
        for _ in range(100):
            shares = rng.dirichlet(np.ones(4))
            x = shares * 10000.0
            u = rng.uniform(0.0, 1.0, size=1)
            f = dynamics(ModelId.SEIRS, 0.0, x, u, p)
            scale = float(np.max(np.abs(f))) + 143.0
            assert abs(float(np.sum(f))) <= 1e-12 * scale


class TestReductionIdentities:
    @pytest.mark.parametrize("mid", [m for m in ModelId if has_baseline(m)])
    def test_neutral_control_matches_baseline_exactly(self, mid):
        d = model_definition(mid)
        p = default_params(mid)
        u0 = neutral_control(mid)
        rng = np.random.default_rng(11)
        for _ in range(200):
            x = rng.uniform(1.0, 1e4, size=d.state_dim)
            a = dynamics(mid, 0.7, x, u0, p)
            b = uncontrolled_rhs(mid, 0.7, x, p)
            assert np.array_equal(a, b)


class TestControlLaws:
    def test_clamped_at_zero_when_adjoints_equal(self):
        p = flagship_params()
        w = CostWeights(a1=1.0, b=(100.0,))
        lam = np.array([0.0, 0.4, 0.4, 0.0])
        u = control_characterization(ModelId.SEIRS, 0.0, flagship_x0(), lam, p, w)
        assert u[0] == 0.0

    def test_interior_value(self):
        # k1 * L1 * (lam3 - lam2) / B = 1 * 37 * 1 / 100 = 0.37
        p = flagship_params()
        w = CostWeights(a1=1.0, b=(100.0,))
        x = np.array([100.0, 37.0, 5.0, 1.0])
        lam = np.array([0.0, 0.0, 1.0, 0.0])
        u = control_characterization(ModelId.SEIRS, 0.0, x, lam, p, w)
        assert u[0] == pytest.approx(0.37, rel=1e-12)

    def test_clamped_at_upper_bound(self):
        p = flagship_params()
        w = CostWeights(a1=1.0, b=(100.0,))
        x = np.array([100.0, 320.0, 5.0, 1.0])
        lam = np.array([0.0, 0.0, 1.0, 0.0])  # raw value 3.2
        u = control_characterization(ModelId.SEIRS, 0.0, x, lam, p, w)
        assert u[0] == 1.0

    @pytest.mark.parametrize("mid", list(ModelId))
    @pytest.mark.parametrize("scale", [0.25, 7.0])
    def test_invariant_under_joint_weight_adjoint_scaling(self, mid, scale):
        d = model_definition(mid)
        p = default_params(mid)
        w = CostWeights(a1=1.0, a2=0.5, b=tuple(50.0 for _ in range(d.control_dim)))
        ws = CostWeights(a1=scale * w.a1, a2=scale * w.a2,
                         b=tuple(scale * bi for bi in w.b))
        rng = np.random.default_rng(5)
        for _ in range(25):
            x = rng.uniform(1.0, 1e4, size=d.state_dim)
            lam = rng.uniform(-50.0, 50.0, size=d.state_dim)
            u1 = control_characterization(mid, 0.2, x, lam, p, w)
            u2 = control_characterization(mid, 0.2, x, scale * lam, p, ws)
            assert np.allclose(u1, u2, rtol=1e-9, atol=1e-12)

    def test_bowong_law_beats_dense_grid(self):
        # non-separable control coupling: exact box minimizer vs 101x101 grid
        from tbctrl import hamiltonian
        mid = ModelId.BOWONG
        p = default_params(mid)
        w = CostWeights(a1=1.0, b=(60.0, 40.0))
        rng = np.random.default_rng(17)
        axis = np.linspace(0.0, 1.0, 101)
        for _ in range(10):
            x = rng.uniform(1.0, 1e4, size=4)
            lam = rng.uniform(-80.0, 80.0, size=4)
            u_star = control_characterization(mid, 0.0, x, lam, p, w)
            h_star = hamiltonian(mid, 0.0, x, lam, u_star, p, w)
            h_grid = min(hamiltonian(mid, 0.0, x, lam, np.array([a, b]), p, w)
                         for a in axis for b in axis)
            assert h_star <= h_grid + 1e-10 * max(1.0, abs(h_star))


class TestRunningCost:
    def test_infectious_burden_only(self):
        w = CostWeights(a1=1.0, b=(100.0,))
        x = np.array([0.0, 0.0, 100.0, 0.0])
        assert running_cost(ModelId.SEIRS, x, np.array([0.0]), w) == 100.0

    def test_pure_effort(self):
        w = CostWeights(a1=1.0, b=(100.0,))
        x = np.zeros(4)
        assert running_cost(ModelId.SEIRS, x, np.array([1.0]), w) == 50.0

    def test_combined_burden_and_effort(self):
        # a1*I + a2*L + (B/2)u^2 = 10 + 10 + 12.5 on the two-strain aggregates
        w = CostWeights(a1=1.0, a2=2.0, b=(100.0, 100.0))
        x = np.array([0.0, 0.0, 0.0, 5.0, 10.0, 0.0])  # L2=5, I2=10
        got = running_cost(ModelId.TWO_STRAIN, x, np.array([0.5, 0.0]), w)
        assert got == pytest.approx(32.5, rel=1e-14)

    def test_cost_vector_patterns(self):
        w = CostWeights(a1=2.0, a2=3.0, b=(1.0, 1.0))
        vec = cost_state_vector(ModelId.TWO_STRAIN, w)
        assert np.array_equal(vec, [0.0, 0.0, 0.0, 3.0, 2.0, 0.0])


class TestValidateParams:
    def test_flagship_set_is_valid(self):
        assert validate_params(ModelId.SEIRS, flagship_params()) == []

    def test_treatment_failure_split_must_stay_below_one(self):
        p = default_params(ModelId.TWO_STRAIN).with_updates({"p": 0.7, "q": 0.5})
        msgs = validate_params(ModelId.TWO_STRAIN, p)
        assert any("p + q <= 1" in m for m in msgs)

    def test_missing_parameter_reported(self):
        p = ParameterSet({"beta": 13.0})
        msgs = validate_params(ModelId.SEIRS, p)
        assert any("missing parameter 'mu'" in m for m in msgs)

    def test_negative_rate_reported(self):
        p = flagship_params().with_updates({"mu": -0.1})
        msgs = validate_params(ModelId.SEIRS, p)
        assert any("'mu'" in m for m in msgs)

    def test_time_table_only_where_supported(self):
        p = flagship_params().with_updates({"mu": TimeTable((0.0, 1.0), (0.01, 0.02))})
        msgs = validate_params(ModelId.SEIRS, p)
        assert any("time-dependent" in m for m in msgs)

    def test_time_table_range_checked(self):
        p = default_params(ModelId.KOREA).with_updates(
            {"s": TimeTable((0.0, 1.0), (0.5, 1.5))})
        msgs = validate_params(ModelId.KOREA, p)
        assert any("'s'" in m for m in msgs)


class TestKoreaTimeDependence:
    def test_table_rates_enter_dynamics(self):
        p = default_params(ModelId.KOREA).with_updates(
            {"k": TimeTable((0.0, 10.0), (0.05, 0.25))})
        x = np.array([5000.0, 800.0, 300.0, 2000.0])
        u = np.zeros(3)
        f_early = dynamics(ModelId.KOREA, 0.0, x, u, p)
        f_late = dynamics(ModelId.KOREA, 10.0, x, u, p)
        # progression k*L1 appears in both the I inflow and the L1 outflow
        assert f_late[2] - f_early[2] == pytest.approx(0.2 * 800.0, rel=1e-12)

    def test_constant_and_single_row_table_agree(self):
        base = default_params(ModelId.KOREA)
        tab = base.with_updates({"k": TimeTable((0.0,), (base.value("k"),))})
        x = np.array([5000.0, 800.0, 300.0, 2000.0])
        u = np.array([0.2, 0.4, 0.1])
        assert np.array_equal(dynamics(ModelId.KOREA, 3.0, x, u, base),
                              dynamics(ModelId.KOREA, 3.0, x, u, tab))


class TestDegenerateInputs:
    @pytest.mark.parametrize("mid", [ModelId.REINFECTION, ModelId.KOREA,
                                     ModelId.BOWONG, ModelId.ISOLATION_IMMIGRATION])
    def test_zero_population_rejected(self, mid):
        from tbctrl.core import ValidationError
        d = model_definition(mid)
        p = default_params(mid)
        with pytest.raises(ValidationError):
            dynamics(mid, 0.0, np.zeros(d.state_dim), np.zeros(d.control_dim), p)

    def test_dimension_mismatch_rejected(self):
        from tbctrl.core import ValidationError
        p = flagship_params()
        with pytest.raises(ValidationError):
            dynamics(ModelId.SEIRS, 0.0, np.zeros(3), np.zeros(1), p)
        with pytest.raises(ValidationError):
            adjoint_rhs(ModelId.SEIRS, 0.0, np.zeros(4), np.zeros(3), np.zeros(1),
                        p, CostWeights(a1=1.0, b=(1.0,)))
