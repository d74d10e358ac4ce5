import json
import math

import numpy as np
import pytest

from slspec.forward import (BracketError, ForwardError, SolverOptions,
                            SpectralData, calogero_bounds,
                            characteristic_values, count_above, count_states,
                            eigenvalues, forward, squarewell_oracle,
                            _state_profiles)
from slspec.potentials import make_potential


def test_calogero_square_well(sw):
    lo, hi = calogero_bounds(sw, 10.0)
    assert abs(lo - (10.0 / math.pi - 0.5)) < 1e-6
    assert abs(hi - 20.0 / math.pi) < 1e-6


def test_calogero_q1(q1):
    lo, hi = calogero_bounds(q1, 10.0)
    # int Q1 = pi/4 and int sqrt(Q1) = pi/2 on the half-line
    assert abs(hi - 10.0) < 1e-6
    assert abs(lo - (10.0 / 4.0 - 0.5)) < 1e-6


def test_calogero_linear_in_omega(q1):
    lo1, hi1 = calogero_bounds(q1, 7.0)
    lo2, hi2 = calogero_bounds(q1, 14.0)
    assert abs(hi2 - 2 * hi1) < 1e-9
    assert abs((lo2 + 0.5) - 2 * (lo1 + 0.5)) < 1e-9


@pytest.mark.parametrize("omega", [5.0, 10.0, 20.0])
def test_squarewell_oracle_equivalence(sw, omega):
    orc = squarewell_oracle(omega)
    xi = eigenvalues(sw, omega)
    assert len(xi) == orc.count
    assert np.max(np.abs(xi - orc.xi)) < 1e-8
    C = characteristic_values(sw, omega, xi)
    assert np.max(np.abs(C - orc.C) / orc.C) < 1e-6


def test_squarewell_oracle_structure():
    sd = squarewell_oracle(10.0)
    assert np.all(sd.xi < 10.0)
    assert np.all(np.diff(sd.xi) > 0)
    assert np.all(sd.C > 0)
    # residual-bound region: the top root stays below sqrt(99/100) omega
    assert sd.xi[-1] <= math.sqrt(0.99) * 10.0


def test_phase_guarded_ratio_bounds():
    # |omega - pi/2 + pi Z| >= 1/5 keeps 4 xi^2/C inside [1/(5 om^2), 220 om^2]
    for om in (10.0, 20.0):
        sd = squarewell_oracle(om)
        r = 4.0 * sd.xi**2 / sd.C
        assert np.all(r >= 1.0 / (5.0 * om * om))
        assert np.all(r <= 220.0 * om * om)


def test_count_bracket_and_ordering(q1, q1_sd10):
    lo, hi = calogero_bounds(q1, 10.0)
    assert math.floor(lo) <= q1_sd10.count <= math.ceil(hi)
    assert np.all(np.diff(q1_sd10.xi) > 0)
    assert q1_sd10.xi[0] > 0
    assert q1_sd10.xi[-1] <= 10.0 * math.sqrt(q1.q0) + 1e-9


def test_spectral_gap_floor(q1_sd10, q1_sd20):
    for sd in (q1_sd10, q1_sd20):
        gaps = np.diff(sd.xi)
        assert gaps.min() >= 1.0 / (5.0 * sd.omega)


def test_counts_match_zero_energy_oscillation(q1, sw):
    assert count_states(q1, 10.0) == 5
    assert count_states(sw, 10.0) == 3
    assert count_states(sw, 5.0) == 2
    assert count_above(q1, 10.0, 2.0) == 3


def test_empty_spectrum_below_threshold(sw):
    # no bound state survives at tiny coupling for the well read at omega=1
    # (nu cot nu = -xi has no root with 0 < xi < omega when omega < pi/2)
    xi = eigenvalues(sw, 1.0)
    assert len(xi) == 0


def test_characteristic_values_positive(q1, q1_sd10):
    assert np.all(q1_sd10.C > 0)


def test_profiles_match_square_well_closed_form(sw):
    sd = squarewell_oracle(10.0)
    profs = _state_profiles(sw, 10.0, sd.xi)
    for p, xi, C in zip(profs, sd.xi, sd.C):
        assert abs(p.C - C) / C < 1e-8
        # tail amplitude: phi = sqrt(2 xi/(1+xi)) e^xi sin(nu) e^(-xi x)
        nu = math.sqrt(100.0 - xi * xi)
        s_exact = math.sqrt(2 * xi / (1 + xi)) * math.exp(xi) * abs(math.sin(nu))
        assert abs(p.log_s - math.log(s_exact)) < 1e-7


def test_forward_packaging(q1, q1_sd10):
    assert q1_sd10.q0 == 1.0
    assert q1_sd10.q0_derivatives[0] == 0.0
    assert q1_sd10.count == len(q1_sd10.C)


def test_spectral_json_roundtrip(q1_sd10):
    text = q1_sd10.to_json()
    back = SpectralData.from_json(text)
    assert back.omega == q1_sd10.omega
    assert np.array_equal(back.xi, q1_sd10.xi)
    assert np.array_equal(back.C, q1_sd10.C)
    doc = json.loads(text)
    assert doc["version"] == 1
    doc["version"] = 99
    with pytest.raises(ForwardError):
        SpectralData.from_json(json.dumps(doc))


def test_truncation_sensitivity_passes(q1):
    opts = SolverOptions(sensitivity_check=True)
    xi = eigenvalues(q1, 10.0, opts)
    assert len(xi) == 5


def test_missing_decay_metadata_raises():
    bare = make_potential({
        "kind": "user_closed_form",
        "fn": lambda x: (1 + np.asarray(x) ** 2) ** -2,
        "m_smoothness": 0,
    })
    with pytest.raises(ForwardError):
        calogero_bounds(bare, 10.0)
