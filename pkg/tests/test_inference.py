import warnings

import numpy as np
import pytest

from mcemdsp.engine import EmConfig, Variant, fit
from mcemdsp.genetics import Dataset, FamilyRecord
from mcemdsp.inference import (
    REDUCED_VARIANT,
    DatasetMismatchError,
    Effect,
    TestResult,
    chi2_sf,
    lrt,
    test_df,
)
from mcemdsp.simulate import DISEASE_MODELS, SCENARIOS, simulate_dataset

CFG = EmConfig(max_iter=4, min_iter=2, mc_samples=400, mc_burnin=100)


def test_chi2_examples():
    assert chi2_sf(0, 3) == 1
    assert chi2_sf(3.841458820694124, 1) == pytest.approx(0.05, rel=1e-9)
    assert chi2_sf(5.991464547107979, 2) == pytest.approx(0.05, rel=1e-9)
    assert chi2_sf(2.0, 2) == pytest.approx(np.exp(-1))
    with pytest.raises(ValueError):
        chi2_sf(-1, 1)
    with pytest.raises(ValueError):
        chi2_sf(1, 0)


def test_df_rule():
    ds = Dataset([FamilyRecord(1, 1, 1, 0)])
    sib = Dataset([FamilyRecord(1, 1, 1, 0, ((1, 0),))])
    assert test_df(Effect.IMPRINTING, ds) == 1
    assert test_df(Effect.MATERNAL, sib) == 2
    assert test_df(Effect.ASSOCIATION, ds) == 6
    assert test_df(Effect.ASSOCIATION, sib) == 5


def test_neg_log10():
    r = TestResult(0.0, 1, 1.0, Effect.IMPRINTING, ())
    assert r.neg_log10_p == 0
    assert TestResult(99, 1, 0.0, Effect.IMPRINTING, ()).neg_log10_p == np.inf


@pytest.fixture(scope="module")
def fits():
    data = simulate_dataset(DISEASE_MODELS[5], SCENARIOS[2], 150, True, seed=11)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = {v: fit(data, CFG, v, np.random.default_rng(i)) for i, v in enumerate(Variant)}
    return data, out


def test_lrt_self_is_zero(fits):
    data, out = fits
    full = out[Variant.FULL]
    fake = type(full)(**{**full.__dict__, "model_variant": Variant.NO_IMPRINTING})
    res = lrt(full, fake, Effect.IMPRINTING, data)
    assert res.statistic == 0 and res.p_value == 1


@pytest.mark.parametrize("effect", list(Effect))
def test_lrt_runs(fits, effect):
    data, out = fits
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = lrt(out[Variant.FULL], out[REDUCED_VARIANT[effect]], effect, data)
    assert res.statistic >= 0 and 0 <= res.p_value <= 1
    assert res.df == test_df(effect, data)
    assert res.variant_pair == (Variant.FULL, REDUCED_VARIANT[effect])


def test_lrt_checks(fits):
    data, out = fits
    with pytest.raises(ValueError):
        lrt(out[Variant.NULL], out[Variant.NULL], Effect.ASSOCIATION, data)
    with pytest.raises(ValueError):
        lrt(out[Variant.FULL], out[Variant.NULL], Effect.IMPRINTING, data)
    other = Dataset(list(data.families)[:-1])
    with pytest.raises(DatasetMismatchError):
        lrt(out[Variant.FULL], out[Variant.NULL], Effect.ASSOCIATION, other)


def test_floor_warns(fits):
    data, out = fits
    full = out[Variant.FULL]
    # swapping roles makes the raw statistic negative
    better = type(full)(**{**full.__dict__, "model_variant": Variant.NO_MATERNAL})
    worse = type(full)(**{**full.__dict__, "theta_hat": out[Variant.NULL].theta_hat})
    with pytest.warns(RuntimeWarning, match="floored"):
        res = lrt(worse, better, Effect.MATERNAL, data)
    assert res.statistic == 0 and res.raw_statistic < 0
