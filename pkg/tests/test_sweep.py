from dataclasses import replace

import numpy as np
import pytest

from chirped_passage import SweepSpec, classify_region, run_sweep
from chirped_passage.sweep import default_spec, inversion_region_spec


@pytest.fixture(scope="module")
def coarse():
    return run_sweep(inversion_region_spec(5))


def test_single_adiabatic_cell():
    res = run_sweep(SweepSpec((2.995,), (-2.947,)))
    assert res.final_pops.shape == (1, 1, 4)
    assert res.population(1)[0, 0] >= 0.9
    assert classify_region(res).inverted[0, 0]
    assert res.flags[0, 0].tolist() == [True, True]


def test_nonadiabatic_cell_not_inverted():
    res = run_sweep(SweepSpec((2.995,), (-0.092,)))
    assert not classify_region(res).inverted[0, 0]
    assert res.flags[0, 0].tolist() == [False, True]


def test_no_field_stays_in_ground_state():
    res = run_sweep(SweepSpec((1.0, 3.0), (-3.0, 0.0, 2.0), peak_rabi=0.0))
    expected = np.broadcast_to([1.0, 0.0, 0.0, 0.0], res.final_pops.shape)
    np.testing.assert_allclose(res.final_pops, expected, atol=1e-9)


def test_coarse_inversion_region(coarse):
    region = classify_region(coarse)
    assert coarse.failures == []
    assert region.inverted_fraction >= 0.9
    assert region.agreement > 0.8


def test_positive_chirp_mirror_not_inverted():
    res = run_sweep(SweepSpec((2.5, 4.0), (2.0, 4.0)))
    region = classify_region(res)
    assert not region.inverted.any()
    # The magnitude-only analytic flags cannot see the sign: cells that pass
    # them still fail to invert.
    assert region.analytic.sum() == 3
    assert np.max(res.population(1)) < 0.01


def test_cell_independence(coarse):
    spec = coarse.spec
    sub = SweepSpec(spec.fwhm_axis[1::2], spec.chirp_axis[::3])
    res = run_sweep(sub)
    np.testing.assert_array_equal(res.final_pops, coarse.final_pops[1::2, ::3])


def test_worker_count_does_not_change_results():
    spec = SweepSpec((2.5, 3.5), (-3.0, -2.0, -1.0))
    a = run_sweep(spec, workers=1)
    b = run_sweep(spec, workers=3)
    np.testing.assert_array_equal(a.final_pops, b.final_pops)
    np.testing.assert_array_equal(a.flags, b.flags)


def test_three_level_sweep():
    res = run_sweep(SweepSpec((2.995,), (-2.947,), model="three"))
    assert res.final_pops.shape == (1, 1, 3)
    assert res.population(1)[0, 0] >= 0.9


@pytest.mark.parametrize("kw", [
    dict(fwhm_axis=(), chirp_axis=(-1.0,)),
    dict(fwhm_axis=(1.0, 1.0), chirp_axis=(-1.0,)),
    dict(fwhm_axis=(1.0, 2.0, 1.5), chirp_axis=(-1.0,)),
    dict(fwhm_axis=(-1.0, 1.0), chirp_axis=(-1.0,)),
    dict(fwhm_axis=(1.0,), chirp_axis=(-1.0,), model="two"),
    dict(fwhm_axis=(1.0,), chirp_axis=(-1.0,), model="three", detuning=0.1),
])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        SweepSpec(**kw)


def test_grid_builders():
    d = default_spec(4)
    assert d.fwhm_axis[0] == 0.5 and d.fwhm_axis[-1] == 4.5
    assert d.chirp_axis[0] == -4.0 and d.chirp_axis[-1] == 0.0
    p = inversion_region_spec()
    assert p.shape == (16, 16)
    assert (p.fwhm_axis[0], p.fwhm_axis[-1]) == (2.5, 4.0)
    assert (p.chirp_axis[0], p.chirp_axis[-1]) == (-4.0, -2.0)


def test_classify_threshold_validation(coarse):
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(ValueError):
            classify_region(coarse, bad)


def test_failed_cells_are_excluded():
    res = run_sweep(SweepSpec((2.995,), (-2.947, -0.092)))
    pops = res.final_pops.copy()
    pops[0, 1] = np.nan
    region = classify_region(replace(res, final_pops=pops))
    assert region.agreement == 1.0 and region.inverted_fraction == 1.0
