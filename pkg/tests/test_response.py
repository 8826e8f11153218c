import numpy as np
import pytest

from conftest import SINGLE, THREE, TWO_A, unit_history
from lambertdde import (
    Cosine,
    DelaySystem,
    Piece,
    Preshape,
    ResponseSeries,
    Step,
    Trajectory,
    Zero,
    compute_spectrum,
    forced_response,
    initial_response,
    integrate,
    psi,
    total_response,
    truncation_error_curve,
)

TIMES = np.linspace(0.0, 10.0, 641)


@pytest.fixture(scope="module")
def two_delay_oracle():
    pre = unit_history(TWO_A)
    return {
        "zero": integrate(TWO_A, pre, Zero(), 10.0, 64),
        "cos": integrate(TWO_A, pre, Cosine(), 10.0, 64),
    }


def test_initial_response_matches_oracle(two_delay_oracle):
    ref = two_delay_oracle["zero"]
    rs = ResponseSeries.build(TWO_A, unit_history(TWO_A), depth=5)
    x = initial_response(rs, ref.times)
    late = ref.times >= 1.0
    assert np.max(np.abs(x - ref.values)[late]) <= 1e-2


def test_total_response_matches_oracle(two_delay_oracle):
    ref = two_delay_oracle["cos"]
    rs = ResponseSeries.build(TWO_A, unit_history(TWO_A), Cosine(), depth=5)
    traj = total_response(rs, ref.times)
    late = ref.times >= 1.0
    assert np.max(np.abs(traj.values - ref.values)[late]) <= 1e-2
    assert traj.metadata["terms"] == 22
    assert traj.metadata["imag_residue"] < 1e-12


def test_zero_data_gives_zero_response():
    rs = ResponseSeries.build(TWO_A, Preshape.zero(2.0, x0=0.0), Zero(), depth=3)
    traj = total_response(rs, TIMES)
    assert np.all(traj.values == 0.0)
    assert all(r.CI == 0 for r in rs.spectrum.roots)


def test_initial_value_reproduced_at_time_zero():
    # phi(0-) = x0, so the series converges to x0 at t = 0.
    rs = ResponseSeries.build(SINGLE, unit_history(SINGLE), depth=20)
    assert initial_response(rs, 0.0) == pytest.approx(1.0, abs=1e-2)


def test_psi_converges_to_jump_midpoint_at_zero():
    # With zero history Psi jumps from 0 to 1 at t = 0; the truncated series
    # approaches the midpoint 1/2 there.
    spec = compute_spectrum(SINGLE, 40)
    assert psi(spec, 0.0) == pytest.approx(0.5, abs=1e-2)


def test_superposition():
    pre = Preshape((Piece(-2.0, -1.0, (0.5, 1.0)), Piece(-1.0, 0.0, (1.0, 0.0, -2.0))), 0.7)
    u = Cosine(1.3, 2.0, 0.4)
    spec = compute_spectrum(TWO_A, 4, pre)
    total = total_response(ResponseSeries(spec, pre.x0, pre, u, 1.5), TIMES).values
    free = total_response(ResponseSeries(spec, pre.x0, pre, Zero(), 1.5), TIMES).values
    spec0 = compute_spectrum(TWO_A, 4, Preshape.zero(2.0))
    forced = total_response(ResponseSeries(spec0, 0.0, Preshape.zero(2.0), u, 1.5), TIMES).values
    assert np.max(np.abs(total - (free + forced))) <= 1e-10


def test_forced_response_is_linear_in_gain():
    spec = compute_spectrum(THREE, 3)
    pre = Preshape.zero(3.0)
    one = forced_response(ResponseSeries(spec, 0.0, pre, Step(1.0, 0.5), 1.0), TIMES)
    two = forced_response(ResponseSeries(spec, 0.0, pre, Step(1.0, 0.5), -2.0), TIMES)
    assert np.allclose(two, -2.0 * one, atol=1e-14)


def test_scalar_and_array_inputs():
    spec = compute_spectrum(SINGLE, 2)
    assert np.ndim(psi(spec, 1.5)) == 0
    assert psi(spec, np.array([1.5]))[0] == psi(spec, 1.5)


def test_negative_time_rejected():
    spec = compute_spectrum(SINGLE, 2)
    with pytest.raises(ValueError):
        psi(spec, -0.1)


def test_psi_matches_method_of_steps_later_on():
    # Omega system: Psi = 1 on [0, 1] and 1 + (t - 1) on [1, 2].
    spec = compute_spectrum(DelaySystem(0.0, (1.0,), 1.0), 60)
    assert psi(spec, 1.5) == pytest.approx(1.5, abs=2e-2)


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory([0.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], [1.0, 2.0])
    assert len(Trajectory([0.0, 1.0], [1.0, 2.0])) == 2


def test_error_curve_trend(two_delay_oracle):
    ref = two_delay_oracle["cos"]
    curve = truncation_error_curve(
        TWO_A, unit_history(TWO_A), Cosine(), list(range(11)), ref.times, ref.values
    )
    errs = [e for _, e in curve]
    assert [k for k, _ in curve] == list(range(11))
    for prev, cur in zip(errs, errs[1:]):
        assert cur <= 1.05 * prev


def test_error_curve_repeated_depth_and_window(two_delay_oracle):
    ref = two_delay_oracle["cos"]
    pre = unit_history(TWO_A)
    full = truncation_error_curve(TWO_A, pre, Cosine(), [5, 5], ref.times, ref.values)
    assert full[0] == full[1]
    late = ref.times >= 2.0
    part = truncation_error_curve(TWO_A, pre, Cosine(), [5], ref.times[late], ref.values[late])
    assert part[0][1] < full[0][1]


def test_error_curve_grid_mismatch():
    with pytest.raises(ValueError):
        truncation_error_curve(SINGLE, unit_history(SINGLE), None, [1], TIMES, TIMES[:-1])
