import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from translab.completeness import (SWEEP_HEADER, DictionaryError, annihilator_margin,
                                   best_approximation, build_dictionary, bump,
                                   completeness_sweep, default_targets, sweep_to_csv)
from translab.core import Grid, Interval, PolyGaussian
from translab.lambda_sets import TranslationSet

GAUSS = PolyGaussian((1.0,), 1.0)
UNIT = Interval(-1.0, 1.0)
GRID = Grid.uniform(UNIT, 401)


def test_single_column_dictionary():
    d = build_dictionary(GAUSS, GRID, TranslationSet.explicit([0.0]))
    assert d.shape == (401, 1)
    np.testing.assert_allclose(d.scaled[:, 0], np.exp(-GRID.points**2), rtol=1e-15)
    assert d.column_scales[0] == pytest.approx(1.0)


def test_duplicate_shifts_rejected_upstream():
    with pytest.raises(ValueError):
        TranslationSet.explicit([0.0, 0.0])


def test_far_translate_underflow():
    lam = TranslationSet.explicit([60.0])
    with pytest.raises(DictionaryError):
        build_dictionary(GAUSS, GRID, lam, log_domain=False)
    # log-domain scaling keeps the normalised shape exp(-(t-60)^2 + 59^2)
    d = build_dictionary(GAUSS, GRID, lam)
    t = GRID.points
    np.testing.assert_allclose(d.scaled[:, 0], np.exp(-(t - 60) ** 2 + 59**2), rtol=1e-10)
    assert d.column_scales[0] == 0.0  # true scale is below the double range
    assert d.log_scales[0] == pytest.approx(-59.0**2)


def test_polynomial_vanishing_on_grid_is_rejected():
    g = PolyGaussian((-1.0, 0.0, 1.0), 1.0)
    grid = Grid.uniform(Interval(-1.0, 1.0), 2)
    with pytest.raises(DictionaryError):
        build_dictionary(g, grid, TranslationSet.explicit([0.0]))
    # ...but only when every node vanishes
    build_dictionary(g, grid, TranslationSet.explicit([0.5]))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-6, 6), min_size=1, max_size=12, unique=True))
def test_scaled_columns_have_unit_sup(vals):
    d = build_dictionary(PolyGaussian((1.0, 0.5j, -0.3), 1.5), GRID, TranslationSet.explicit(vals))
    np.testing.assert_allclose(np.abs(d.scaled).max(axis=0), 1.0, atol=1e-12)
    assert np.all(d.log_scales > -np.inf)


def test_exact_member_is_reproduced():
    lam = TranslationSet.arithmetic(0.5, -1.0, 0, 6)
    d = build_dictionary(GAUSS, GRID, lam)
    r = best_approximation(d, d.scaled[:, 3])
    assert r.residual_sup <= 1e-10
    expected = np.zeros(len(lam))
    expected[3] = 1.0
    np.testing.assert_allclose(r.scaled_coefficients, expected, atol=1e-6)
    # in the unscaled basis the coefficient is 1 / column scale
    assert r.coefficients[3] == pytest.approx(1.0 / d.column_scales[3], rel=1e-6)


def test_zero_target():
    d = build_dictionary(GAUSS, GRID, TranslationSet.arithmetic(1, 0, 1, 5))
    r = best_approximation(d, np.zeros(401))
    assert r.residual_sup == 0 and r.residual_lp[2.0] == 0
    assert np.all(r.scaled_coefficients == 0)


def test_cutoff_and_shape_validation():
    d = build_dictionary(GAUSS, GRID, TranslationSet.arithmetic(1, 0, 1, 5))
    for bad in (0.0, 1.0, -1e-3):
        with pytest.raises(ValueError):
            best_approximation(d, np.zeros(401), cutoff=bad)
    with pytest.raises(ValueError):
        best_approximation(d, np.zeros(400))


def test_t_target_regression():
    # frozen from a truncated-SVD calibration run: 0.23052462303254684, band +-20%
    d = build_dictionary(GAUSS, GRID, TranslationSet.arithmetic(1, 0, 1, 20))
    r = best_approximation(d, GRID.points, cutoff=1e-12)
    assert r.residual_sup == pytest.approx(0.23052462303254684, rel=0.2)
    assert r.effective_rank <= 20


def test_residual_orthogonal_to_retained_directions():
    for lam in (TranslationSet.arithmetic(1, 0, 1, 40), TranslationSet.lacunary(2, 12),
                TranslationSet.power(0.5, 25)):
        d = build_dictionary(GAUSS, GRID, lam)
        for y in default_targets(GAUSS, GRID, lam.values[0]).values():
            r = best_approximation(d, y)
            u, s, _ = np.linalg.svd(d.scaled, full_matrices=False)
            proj = u[:, : r.effective_rank].conj().T @ r.residual
            assert np.max(np.abs(proj)) <= 1e-8


@settings(max_examples=15, deadline=None)
@given(k=st.floats(-50, 50).filter(lambda x: abs(x) > 1e-3))
def test_generator_scale_invariance(k):
    lam = TranslationSet.arithmetic(0.7, -1.2, 0, 9)
    y = np.cos(2 * GRID.points)
    r1 = best_approximation(build_dictionary(GAUSS, GRID, lam), y)
    r2 = best_approximation(build_dictionary(GAUSS.scaled(k), GRID, lam), y)
    assert r2.residual_sup == pytest.approx(r1.residual_sup, rel=1e-10)
    assert r2.residual_lp[2.0] == pytest.approx(r1.residual_lp[2.0], rel=1e-10)


def test_nested_sets_l2_monotone_at_full_rank():
    # adding columns cannot worsen a least-squares fit while no singular value is cut
    lam = TranslationSet.arithmetic(0.4, -1.0, 0, 11)
    y = np.sin(3 * GRID.points)
    prev = np.inf
    for k in range(1, len(lam) + 1):
        r = best_approximation(build_dictionary(GAUSS, GRID, lam.with_count(k)), y, p=(2.0,))
        assert r.effective_rank == k
        assert r.residual_lp[2.0] <= prev + 1e-10
        prev = r.residual_lp[2.0]


def test_bump_is_compactly_supported():
    t = np.linspace(-1, 1, 9)
    b = bump(t, -0.5, 0.5)
    assert b[4] == 1.0
    assert np.all(b[[0, 1, 2, 6, 7, 8]] == 0)


# calibration run: truncated SVD, Gaussian c=1, I=[-1,1], M=401, cutoff 1e-12
CAL_DIVERGENT = {5: 0.6732070963765108, 10: 0.23145573017234747,
                 20: 0.16624183976486892, 40: 0.1576131234484174}
CAL_LACUNARY_12 = 1.0211408304950136


def test_sweep_divergent_regression():
    rows = completeness_sweep(GAUSS, GRID, TranslationSet.arithmetic(1, 0, 1, 40), [5, 10, 20, 40],
                              targets={"sin3t": np.sin(3 * GRID.points)})
    res = [r.residual_sup for r in rows]
    assert res == pytest.approx([CAL_DIVERGENT[k] for k in (5, 10, 20, 40)], rel=0.5)
    assert all(b < a for a, b in zip(res, res[1:]))


def test_sweep_lacunary_stalls():
    rows = completeness_sweep(GAUSS, GRID, TranslationSet.lacunary(2, 12), [4, 8, 12],
                              targets={"sin3t": np.sin(3 * GRID.points)})
    assert rows[-1].residual_sup == pytest.approx(CAL_LACUNARY_12, rel=0.5)
    # stalled: the last doubling of K gains under 1%
    assert rows[-1].residual_sup >= 0.99 * rows[-2].residual_sup


def test_sweep_member_target_exact_at_every_size():
    rows = completeness_sweep(GAUSS, GRID, TranslationSet.arithmetic(1, 0, 1, 40), [5, 10, 20, 40])
    member = [r for r in rows if r.target == "member"]
    assert len(member) == 4 and all(r.residual_sup <= 1e-10 for r in member)
    assert {r.target for r in rows} == {"sin3t", "t2", "bump", "member"}


def test_sweep_grid_refinement_stability():
    fine = Grid.uniform(UNIT, 801)
    for lam in (TranslationSet.arithmetic(1, 0, 1, 40), TranslationSet.lacunary(2, 12)):
        coarse_rows = completeness_sweep(GAUSS, GRID, lam, [len(lam)])
        fine_rows = completeness_sweep(GAUSS, fine, lam, [len(lam)])
        for a, b in zip(coarse_rows, fine_rows):
            if a.target == "member":
                continue
            assert abs(b.residual_sup - a.residual_sup) <= 0.05 * a.residual_sup


def test_sweep_skips_bad_rows():
    tab = PolyGaussian((1.0,), 1.0)
    rows = completeness_sweep(tab, GRID, TranslationSet.explicit([0.0, 1.0, 3.0]),
                              [1, 2, 4], targets={"one": np.ones(401)})
    assert rows[-1].status.startswith("skipped")
    assert rows[0].status == "ok"


def test_sweep_sizes_must_increase():
    with pytest.raises(ValueError):
        completeness_sweep(GAUSS, GRID, TranslationSet.arithmetic(1, 0, 1, 5), [3, 2])


def test_sweep_csv_format():
    rows = completeness_sweep(GAUSS, GRID, TranslationSet.arithmetic(1, 0, 1, 5), [2, 5],
                              targets={"sin3t": np.sin(3 * GRID.points)})
    text = sweep_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER)
    fields = lines[1].split(",")
    assert fields[0] == "sin3t" and fields[1] == "2" and fields[-1] == "ok"
    assert float(fields[2]) == rows[0].residual_sup  # 17 significant digits round-trip


def test_annihilator_single_translate():
    d = build_dictionary(GAUSS, Grid.uniform(UNIT, 7), TranslationSet.explicit([0.3]))
    r = annihilator_margin(d, [])
    assert np.linalg.norm(r.weights) == pytest.approx(1.0)
    assert r.margin == pytest.approx(np.linalg.norm(d.scaled[:, 0]), rel=1e-12)


def test_annihilator_preconditions():
    d = build_dictionary(GAUSS, Grid.uniform(UNIT, 3), TranslationSet.explicit([0.0, 1.0, 2.0]))
    with pytest.raises(ValueError):
        annihilator_margin(d, [5.0])
    d = build_dictionary(GAUSS, GRID, TranslationSet.explicit([0.0, 1.0]))
    with pytest.raises(ValueError):
        annihilator_margin(d, [1.0])


def test_annihilator_margin_is_norm_of_transpose_action():
    d = build_dictionary(GAUSS, GRID, TranslationSet.lacunary(2, 6))
    r = annihilator_margin(d, [3.0])
    assert np.linalg.norm(d.scaled.T @ r.weights) == pytest.approx(r.margin, rel=1e-8)


def test_annihilator_lacunary_regression():
    # calibration run values (Gaussian c=1, I=[-1,1], M=401, lambda = 2..2^10)
    d = build_dictionary(GAUSS, GRID, TranslationSet.lacunary(2, 10))
    r = annihilator_margin(d, [3.0, 5.0, 6.0])
    assert r.margin == pytest.approx(2.5941028057557516e-05, rel=1e-4)
    assert r.probe_values[3.0] == pytest.approx(0.011620179829743438, rel=1e-3)
    assert r.probe_values[5.0] == pytest.approx(0.00522163553701623, rel=1e-3)
    assert r.probe_values[6.0] == pytest.approx(0.00494997827404546, rel=1e-3)
    assert r.probe_max == r.probe_values[3.0]


def test_annihilator_arithmetic_at_noise_floor():
    # consecutive integer translates are numerically dependent: both the margin
    # and the held-out response sit at rounding level
    d = build_dictionary(GAUSS, GRID, TranslationSet.arithmetic(1, 0, 1, 40))
    r = annihilator_margin(d, [41.0])
    assert r.margin < 1e-13
    assert r.probe_max < 1e-12


def test_annihilator_json():
    d = build_dictionary(GAUSS, GRID, TranslationSet.lacunary(2, 4))
    payload = json.loads(annihilator_margin(d, [3.0]).to_json())
    assert set(payload) == {"margin", "probe_max", "probes", "weights"}
    assert len(payload["weights"]) == 401 and payload["probes"][0]["lambda"] == 3.0
