import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import values as ref
from rainuav import medium, validation
from rainuav.errors import DomainError
from rainuav.validation import ComparisonRow, ItuCoefficients, PweSettings

TEXTBOOK = PweSettings(polarizability=medium.TEXTBOOK)


@pytest.mark.parametrize("f", [10.0, 20.0, 30.0])
def test_itu_matches_regression_oracle(f):
    assert validation.itu_specific_attenuation(12.5, f) == pytest.approx(ref.ITU_GAMMA_12_5[f], rel=5e-4)  # tabulated to 4-5 digits


def test_table_is_sorted_and_covers_band():
    freqs = [c.frequency for c in validation.coefficient_table()]
    assert freqs == sorted(freqs)
    assert freqs[0] <= 1.0 and freqs[-1] >= 100.0


def test_unit_alpha_table_is_linear_in_rain_rate():
    table = (ItuCoefficients(1.0, 0.01, 1.0), ItuCoefficients(100.0, 0.5, 1.0))
    g = [validation.itu_specific_attenuation(r, 10.0, table) for r in (1.0, 2.0, 7.5)]
    assert g[1] == pytest.approx(2 * g[0], rel=1e-14)
    assert g[2] == pytest.approx(7.5 * g[0], rel=1e-14)


def test_interpolation_is_log_log_in_k_and_log_linear_in_alpha():
    table = (ItuCoefficients(1.0, 0.01, 1.0), ItuCoefficients(100.0, 1.0, 0.5))
    c = validation.coefficients(10.0, table)
    assert c.k == pytest.approx(0.1, rel=1e-14)
    assert c.alpha == pytest.approx(0.75, rel=1e-14)


def test_coefficients_continuous_at_table_nodes():
    for node in validation.coefficient_table()[1:-1]:
        at = validation.coefficients(node.frequency)
        near = validation.coefficients(node.frequency * (1 + 1e-9))
        assert at.k == pytest.approx(node.k, rel=1e-12)
        assert near.k == pytest.approx(at.k, rel=1e-6)
        assert near.alpha == pytest.approx(at.alpha, abs=1e-6)


@settings(max_examples=50)
@given(st.floats(1.0, 100.0), st.floats(0.1, 200.0), st.floats(0.01, 50.0))
def test_itu_monotone_in_rain_rate(f, r, dr):
    assert validation.itu_specific_attenuation(r + dr, f) > validation.itu_specific_attenuation(r, f)


def test_itu_zero_rain_and_domain():
    assert validation.itu_specific_attenuation(0.0, 10.0) == 0.0
    with pytest.raises(DomainError):
        validation.itu_specific_attenuation(-1.0, 10.0)
    with pytest.raises(DomainError):
        validation.itu_specific_attenuation(10.0, 0.5)
    with pytest.raises(DomainError):
        validation.itu_specific_attenuation(10.0, 150.0)


def test_relative_error_property():
    assert ComparisonRow(10.0, 2.0, 2.5).relative_error == 0.25
    assert ComparisonRow(10.0, 0.0, 0.0).relative_error == 0.0
    assert ComparisonRow(10.0, 0.0, 1.0).relative_error == np.inf


def test_empty_frequency_list():
    assert validation.compare_models(12.5, []) == []


def test_no_rain_gives_zero_on_both_sides():
    (row,) = validation.compare_models(0.0, [10.0])
    assert row.itu_db_per_km == 0.0
    assert row.pwe_db_per_km == 0.0
    assert row.relative_error == 0.0


def test_pwe_rejects_frequency_outside_table():
    with pytest.raises(DomainError):
        validation.compare_models(12.5, [200.0])


def test_pwe_attenuation_tracks_effective_medium():
    got = validation.pwe_specific_attenuation(12.5, 10.0, TEXTBOOK)
    eps = medium.effective_permittivity(medium.RainParameters(12.5), 10.0, medium.TEXTBOOK)
    assert got == pytest.approx(medium.paraxial_attenuation_db_per_km(eps, 10.0), rel=0.01)


def test_pwe_attenuation_monotone_in_rain_rate():
    g = [validation.pwe_specific_attenuation(r, 10.0, TEXTBOOK) for r in (5.0, 12.5, 25.0)]
    assert g[0] < g[1] < g[2]


def test_pwe_attenuation_deterministic():
    a = validation.pwe_specific_attenuation(12.5, 20.0, TEXTBOOK)
    b = validation.pwe_specific_attenuation(12.5, 20.0, TEXTBOOK)
    assert a == b


def test_write_comparison_csv(tmp_path):
    rows = [ComparisonRow(10.0, 0.3, 0.04), ComparisonRow(20.0, 1.3, 0.2)]
    path = tmp_path / "v.csv"
    validation.write_comparison_csv(path, rows)
    got = list(csv.DictReader(path.open()))
    assert [float(r["frequency_ghz"]) for r in got] == [10.0, 20.0]
    assert float(got[0]["rel_err"]) == pytest.approx(rows[0].relative_error)
