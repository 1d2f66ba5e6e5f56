import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamma_probe.dynsys import (
    FractionalParts,
    Logistic,
    Orbit,
    StandardTheta,
    Stimulation,
    Tent,
    fractional_parts_orbit,
    generate_orbit,
    iterate_logistic,
    iterate_tent,
    load_orbit_csv,
    save_orbit_csv,
    spec_from_dict,
    spec_to_dict,
    step_standard,
    stimulation_term,
)


class TestMaps:
    @pytest.mark.parametrize(
        "x, t, expected",
        [(0.5, 0.5, 0.5), (0.25, 1.0, 0.5), (0.75, 0.7, 0.35)],
    )
    def test_tent(self, x, t, expected):
        assert iterate_tent(x, t) == pytest.approx(expected, abs=1e-15)

    def test_logistic(self):
        assert iterate_logistic(0.5, 4.0) == 1.0
        assert iterate_logistic(0.0, 3.7) == 0.0
        assert iterate_logistic(0.317, 3.7) == pytest.approx(0.8010907, abs=1e-12)

    @pytest.mark.parametrize("fn, bad", [(iterate_tent, 0.0), (iterate_tent, 1.5), (iterate_logistic, 4.1)])
    def test_parameter_range(self, fn, bad):
        with pytest.raises(ValueError):
            fn(0.3, bad)

    def test_standard_step(self):
        I, th = step_standard(0.5, 0.2, 0.6)
        # 0.6 * sin(0.2) = 0.11920160
        assert I == pytest.approx(0.5 + 0.6 * 0.19866933079506122, abs=1e-15)
        assert I == pytest.approx(0.6192016, abs=1e-7)
        assert th == pytest.approx(0.8192016, abs=1e-7)

    def test_standard_fixed_point(self):
        assert step_standard(0.0, 0.0, 1.0) == (0.0, 0.0)

    def test_standard_angle_reduction(self):
        I, th = step_standard(2 * math.pi, math.pi, 0.6)
        assert I == pytest.approx(2 * math.pi, abs=1e-15)
        # recompute the two-line recurrence by hand
        assert th == pytest.approx(math.fmod(math.pi + I, 2 * math.pi), abs=1e-12)
        assert th == pytest.approx(math.pi, abs=1e-9)
        assert 0.0 <= th < 2 * math.pi

    def test_standard_rejects_nonpositive_K(self):
        with pytest.raises(ValueError):
            step_standard(0.1, 0.1, 0.0)


class TestSpecs:
    @pytest.mark.parametrize(
        "make",
        [
            lambda: Tent(0.0),
            lambda: Tent(1.01),
            lambda: Tent(0.7, 1.0),
            lambda: Logistic(4.5),
            lambda: Logistic(3.7, 0.0),
            lambda: StandardTheta(-1.0),
            lambda: StandardTheta(0.6, 7.0),
            lambda: FractionalParts(1.5),
            lambda: Stimulation(1.0, 3),
            lambda: Stimulation(0.1, 1),
        ],
    )
    def test_out_of_range_rejected(self, make):
        with pytest.raises(ValueError):
            make()

    def test_dict_round_trip(self):
        for spec in (Tent(0.7, 0.17), Logistic(3.7), StandardTheta(0.6, 0.5, 0.2), FractionalParts(0.3)):
            assert spec_from_dict(spec_to_dict(spec)) == spec


class TestStimulation:
    def test_terms(self):
        stim = Stimulation(1e-4, 3)
        assert stimulation_term(6, stim) == 1e-4
        assert stimulation_term(7, stim) == 0.0
        assert stimulation_term(3, stim) == 1e-4

    @given(st.integers(2, 50), st.integers(1, 500))
    def test_support_is_multiples_of_tau(self, tau, n):
        stim = Stimulation(0.01, tau)
        assert (stimulation_term(n, stim) != 0.0) == (n % tau == 0)

    def test_no_stimulation(self):
        assert stimulation_term(10, None) == 0.0


class TestGenerateOrbit:
    def test_tent_three_values(self):
        o = generate_orbit(Tent(0.7, 0.17), 3)
        np.testing.assert_allclose(o.values, [0.17, 0.238, 0.3332], atol=1e-15)
        assert o.length == 3

    def test_first_stimulated_index_is_tau(self):
        o = generate_orbit(Logistic(3.7, 0.317), 2, Stimulation(1e-4, 2))
        np.testing.assert_allclose(o.values, [0.317, 0.8010907], atol=1e-12)

    def test_stimulated_third_value(self):
        o = generate_orbit(Logistic(3.7, 0.317), 3, Stimulation(1e-4, 2))
        x2 = 3.7 * 0.317 * (1 - 0.317)
        assert o.values[2] == 3.7 * x2 * (1 - x2) + 1e-4
        assert o.values[2] == pytest.approx(0.5896742, abs=1e-7)

    def test_standard_stores_normalized_theta(self):
        o = generate_orbit(StandardTheta(0.6, 0.5, 0.2), 2)
        assert o.values[0] == 0.2 / (2 * math.pi)
        assert o.values[1] == pytest.approx(0.8192016 / (2 * math.pi), abs=1e-7)

    def test_k_too_small(self):
        with pytest.raises(ValueError):
            generate_orbit(Tent(0.7), 1)

    @pytest.mark.parametrize("spec", [Tent(0.9, 0.3), Logistic(3.9, 0.2), StandardTheta(1.2, 1.0, 2.0)])
    def test_deterministic_and_prefix(self, spec):
        a = generate_orbit(spec, 500)
        b = generate_orbit(spec, 500)
        c = generate_orbit(spec, 501)
        assert a.values.tobytes() == b.values.tobytes()
        assert c.values[:500].tobytes() == a.values.tobytes()

    @given(st.floats(0.01, 1.0), st.floats(0.001, 0.999))
    @settings(max_examples=50, deadline=None)
    def test_tent_closure(self, t, x0):
        v = generate_orbit(Tent(t, x0), 200).values
        assert np.all(v >= 0.0) and np.all(v[1:] <= t)

    @given(st.floats(0.01, 4.0), st.floats(0.001, 0.999))
    @settings(max_examples=50, deadline=None)
    def test_logistic_closure(self, r, x0):
        v = generate_orbit(Logistic(r, x0), 200).values
        assert np.all(v >= 0.0) and np.all(v[1:] <= r / 4)

    def test_overflow_wrap_and_clamp(self):
        # F(x0) is near 1/2, so F(x1) is near 1 when the kick lands
        spec = Logistic(4.0, (1 - math.sqrt(0.5)) / 2)
        stim = Stimulation(0.5, 2)
        wrapped = generate_orbit(spec, 3, stim)
        clamped = generate_orbit(spec, 3, stim, overflow="clamp")
        raw = 4.0 * wrapped.values[1] * (1 - wrapped.values[1]) + 0.5
        assert raw > 1.0
        assert wrapped.values[2] == pytest.approx(raw - 1.0)
        assert clamped.values[2] == 1.0

    def test_wrap_is_noop_at_reference_settings(self):
        for spec in (Tent(0.7, 0.17), Logistic(3.7, 0.317)):
            a = generate_orbit(spec, 3000, Stimulation(1e-4, 7))
            b = generate_orbit(spec, 3000, Stimulation(1e-4, 7), overflow="clamp")
            assert a.values.tobytes() == b.values.tobytes()

    def test_burn_in(self):
        full = generate_orbit(Logistic(3.7, 0.317), 20)
        burnt = generate_orbit(Logistic(3.7, 0.317), 10, burn_in=10)
        assert burnt.values.tobytes() == full.values[10:].tobytes()

    def test_stimulated_standard_stays_in_unit_interval(self):
        v = generate_orbit(StandardTheta(0.6, 0.5, 0.2), 5000, Stimulation(0.3, 2)).values
        assert np.all((v >= 0) & (v <= 1))


class TestFractionalParts:
    def test_exact_rational(self):
        o = fractional_parts_orbit(0.25, 4)
        assert o.values.tolist() == [0.25, 0.5, 0.75, 0.0]
        assert o.is_exact

    def test_golden(self):
        a = 0.6180339887498949
        o = fractional_parts_orbit(a, 3)
        np.testing.assert_allclose(o.values, [a, 2 * a - 1, 3 * a - 1], atol=1e-15)

    def test_equidistribution(self):
        v = fractional_parts_orbit(0.3141421, 20000).values
        assert np.all((v >= 0) & (v < 1))
        assert abs(np.mean(v < 0.5) - 0.5) <= 0.02

    def test_running_sum_error_bound(self):
        from fractions import Fraction

        alpha = math.sqrt(2) - 1
        o = fractional_parts_orbit(alpha, 10**6)
        fa = Fraction(alpha)
        for n in (1, 17, 1000, 123457, 999999, 10**6):
            exact = float((fa * n) % 1)
            assert abs(o.values[n - 1] - exact) <= 2.0**-40

    def test_matches_generate_orbit(self):
        a = generate_orbit(FractionalParts(0.3), 50)
        b = fractional_parts_orbit(0.3, 50)
        assert a.values.tobytes() == b.values.tobytes()

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            fractional_parts_orbit(1.0, 10)

    def test_tiny_alpha_falls_back_to_floats(self):
        o = fractional_parts_orbit(1e-30 * math.pi, 5)
        assert not o.is_exact
        assert o.values[1] == pytest.approx(2e-30 * math.pi)


class TestOrbitContainer:
    def test_values_are_read_only(self):
        o = Orbit([0.1, 0.2])
        with pytest.raises(ValueError):
            o.values[0] = 0.5

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Orbit([0.1, 1.2])

    def test_csv_round_trip(self, tmp_path):
        o = generate_orbit(Logistic(3.9, 0.123), 100)
        path = tmp_path / "o.csv"
        save_orbit_csv(o, path)
        back = load_orbit_csv(path)
        assert back.values.tobytes() == o.values.tobytes()
        assert back.provenance == "external"

    def test_load_index_value_with_header(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("# comment\nindex,value\n1,0.5\n2,0.25\n")
        assert load_orbit_csv(path).values.tolist() == [0.5, 0.25]

    def test_normalize(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("10\n20\n15\n")
        with pytest.raises(ValueError):
            load_orbit_csv(path)
        assert load_orbit_csv(path, normalize=True).values.tolist() == [0.0, 1.0, 0.5]
