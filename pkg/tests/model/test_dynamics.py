"""Tests for rinzelkit.model.dynamics."""

import numpy as np
import pytest

from rinzelkit.analysis.certificate import absorbing_set
from rinzelkit.errors import DomainError, PreconditionError
from rinzelkit.model.dynamics import (
    energy,
    energy_of,
    energy_rate,
    energy_rate_of,
    first_integral_offsets,
    jacobian,
    jacobian_field,
    reduced_bound,
    reduced_field,
    reduced_rhs,
    rhs_classic,
    rhs_general,
    vector_field,
)
from rinzelkit.model.params import FhrParams, State
from rinzelkit.solvers.integrator import IntegratorConfig, integrate
from tests.conftest import sample_states

FD_STEP = 1e-6


def finite_difference_jacobian(f, x):
    cols = []
    for j in range(len(x)):
        step = FD_STEP * max(1.0, abs(x[j]))
        e = np.zeros_like(x)
        e[j] = step
        cols.append((f(0.0, x + e) - f(0.0, x - e)) / (2 * step))
    return np.column_stack(cols)


def random_params(rng):
    return FhrParams(
        D=1.0,
        a=rng.uniform(-2.0, 1.0),
        I=rng.uniform(-1.0, 1.0),
        eps=rng.uniform(0.01, 2.0),
        beta=rng.uniform(0.1, 2.0),
        c=rng.uniform(-1.0, 1.0),
        d=rng.uniform(0.1, 2.0),
        h=rng.uniform(-1.0, 1.0),
        delta=rng.uniform(0.01, 2.0),
        k=rng.uniform(0.5, 5.0),
    )


class TestVectorField:
    def test_origin(self, paper_params):
        du = rhs_general(paper_params, State(0.0, 0.0, 0.0))
        assert du.u == paper_params.I
        assert du.w == pytest.approx(paper_params.eps * paper_params.c)
        assert du.y == pytest.approx(paper_params.delta * paper_params.h)

    def test_classic_form_is_general_at_a_minus_one_k_three(self, paper_params):
        general = FhrParams(**dict(paper_params.to_dict(), a=-1.0, k=3.0))
        s = State(0.7, -0.2, 0.4)
        assert rhs_classic(paper_params, s).to_array() == pytest.approx(rhs_general(general, s).to_array())

    def test_classic_form_on_random_states(self, paper_params, rng):
        general = FhrParams(**dict(paper_params.to_dict(), a=-1.0, k=3.0))
        for u, w, y in rng.uniform(-5.0, 5.0, size=(100, 3)):
            s = State(u, w, y)
            scale = 1.0 + abs(u) + abs(u) ** 3 + abs(w) + abs(y) + abs(paper_params.I)
            diff = rhs_classic(paper_params, s).to_array() - rhs_general(general, s).to_array()
            assert np.max(np.abs(diff)) <= 1e-15 * scale

    def test_array_field_matches_state_field(self, paper_params):
        s = State(1.3, 0.2, -0.5)
        f = vector_field(paper_params)
        assert f(0.0, s.to_array()) == pytest.approx(rhs_general(paper_params, s).to_array())

    def test_unknown_form(self, paper_params):
        with pytest.raises(DomainError, match="cubic"):
            vector_field(paper_params, "cubic")
        with pytest.raises(DomainError):
            jacobian_field(paper_params, "cubic")


class TestJacobian:
    @pytest.mark.parametrize("form", ["general", "classic"])
    def test_matches_finite_differences(self, paper_params, rng, form):
        f = vector_field(paper_params, form)
        jac = jacobian_field(paper_params, form)
        for x in rng.uniform(-3.0, 3.0, size=(10, 3)):
            np.testing.assert_allclose(jac(0.0, x), finite_difference_jacobian(f, x), atol=1e-6)

    def test_random_parameters_and_states(self, rng):
        for _ in range(100):
            p = random_params(rng)
            x = rng.uniform(-3.0, 3.0, size=3)
            expected = finite_difference_jacobian(vector_field(p), x)
            np.testing.assert_allclose(jacobian(p, State.from_array(x)), expected, rtol=1e-6, atol=1e-7)

    def test_state_jacobian(self, paper_params):
        s = State(0.5, 0.0, 0.0)
        assert np.array_equal(jacobian(paper_params, s), jacobian_field(paper_params)(0.0, s.to_array()))


class TestEnergy:
    def test_energy(self):
        assert energy(State(1.0, 2.0, 2.0)) == 4.5

    def test_rate_is_chain_rule(self, paper_params, rng):
        for values in sample_states(rng, 20, 50.0):
            s = State.from_array(values)
            expected = float(np.dot(values, rhs_general(paper_params, s).to_array()))
            assert energy_rate(paper_params, s) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_rate_negative_far_outside_absorbing_ball(self, certified, rng):
        radius = absorbing_set(certified, 1.0).R
        directions = rng.normal(size=(100, 3))
        directions /= np.linalg.norm(directions, axis=1)[:, None]
        states = 10.0 * radius * directions
        rates = energy_rate_of(certified.params, states)
        assert np.all(rates < 0.0)
        assert np.all(rates <= -certified.C * energy_of(states) + certified.C1)

    def test_vectorized_forms_agree(self, paper_params, rng):
        states = np.array(sample_states(rng, 15, 10.0))
        assert energy_of(states) == pytest.approx([energy(State.from_array(s)) for s in states])
        assert energy_rate_of(paper_params, states) == pytest.approx(
            [energy_rate(paper_params, State.from_array(s)) for s in states]
        )


class TestReduction:
    def test_reduced_field(self, paper_params):
        f = reduced_field(paper_params, 0.5, -0.25)
        assert f(2.0, np.array([1.0]))[0] == pytest.approx(reduced_rhs(paper_params, 0.5, -0.25, 2.0, 1.0))

    def test_offsets(self):
        p = FhrParams(D=1.0, a=-1.0, I=0.5, eps=1.8, beta=2.0, c=0.4, d=-2.0, h=0.2, delta=-1.8, k=3.0)
        q1, q2 = first_integral_offsets(p, State(0.0, 0.1, 0.3))
        assert q1 == pytest.approx(0.5 - 0.6 / 2.0)
        assert q2 == pytest.approx((0.5 - 0.1 + 0.3) - q1)

    def test_equal_rate_constraint(self, paper_params):
        with pytest.raises(PreconditionError, match="beta\\*eps == delta\\*d"):
            first_integral_offsets(paper_params, State(0.0, 0.0, 0.0))

    def test_sign_constraint(self):
        p = FhrParams(D=1.0, a=-1.0, I=0.0, eps=1.8, beta=2.0, c=0.0, d=2.0, h=0.0, delta=1.8, k=3.0)
        with pytest.raises(PreconditionError, match="eps == -delta"):
            first_integral_offsets(p, State(0.0, 0.0, 0.0))

    def test_reduced_bound_roots(self, paper_params):
        assert reduced_bound(paper_params, 0.0, 0.0, 0.0, 10.0) == pytest.approx(np.sqrt(3.0))
        radius = reduced_bound(paper_params, -0.2, 0.2, 0.0, 100.0)
        assert radius ** 3 / 3.0 - radius == pytest.approx(0.4)
        assert reduced_bound(paper_params, -0.2, 0.2, 5.0, 100.0) == 5.0

    def test_reduced_bound_holds_along_solution(self, paper_params):
        f = reduced_field(paper_params, -0.5, 1.5)
        traj = integrate(f, 0.0, 50.0, [-2.5], IntegratorConfig(abs_tol=1e-10, rel_tol=1e-10)).trajectory
        bound = reduced_bound(paper_params, -0.5, 1.5, -2.5, 50.0)
        assert np.max(np.abs(traj.y)) <= bound * (1.0 + 1e-9)

    def test_reduced_bound_grows_with_rising_forcing(self):
        p = FhrParams(D=1.0, a=-1.0, I=0.0, eps=-0.1, beta=1.0, c=0.0, d=1.0, h=0.0, delta=0.1, k=3.0)
        short = reduced_bound(p, 0.0, 1.0, 0.0, 1.0)
        long = reduced_bound(p, 0.0, 1.0, 0.0, 10.0)
        assert long > short
        assert long ** 3 / 3.0 - long == pytest.approx(np.exp(1.0))
