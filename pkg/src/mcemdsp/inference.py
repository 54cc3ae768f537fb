"""Likelihood-ratio tests for association, imprinting and maternal effects.

Each statistic averages 2[log P(Y | Z; theta_full) - log P(Y | Z; theta_reduced)]
over the Full fit's final bank of mating-type draws and refers the result
to a chi-square law.
"""
import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .engine import Variant

__all__ = ["Effect", "TestResult", "DatasetMismatchError", "REDUCED_VARIANT", "test_df", "chi2_sf", "lrt"]


class Effect(enum.Enum):
    ASSOCIATION = "association"
    IMPRINTING = "imprinting"
    MATERNAL = "maternal"


REDUCED_VARIANT = {
    Effect.ASSOCIATION: Variant.NULL,
    Effect.IMPRINTING: Variant.NO_IMPRINTING,
    Effect.MATERNAL: Variant.NO_MATERNAL,
}


class DatasetMismatchError(ValueError):
    """The two fits were made on different datasets."""


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: int
    p_value: float
    effect: Effect
    variant_pair: tuple
    raw_statistic: float = float("nan")

    __test__ = False  # not a pytest class

    @property
    def neg_log10_p(self):
        return float("inf") if self.p_value == 0 else -np.log10(self.p_value)


def test_df(effect, data):
    """Degrees of freedom.  Association loses delta's identifiability without siblings."""
    effect = Effect(effect)
    if effect is Effect.IMPRINTING:
        return 1
    if effect is Effect.MATERNAL:
        return 2
    return 5 if data.has_siblings else 6


test_df.__test__ = False


def chi2_sf(x, df):
    """Upper-tail chi-square probability."""
    if x < 0:
        raise ValueError(f"statistic must be non-negative, got {x}")
    if df < 1 or int(df) != df:
        raise ValueError(f"df must be a positive integer, got {df}")
    return float(chi2.sf(x, int(df)))


def _bank_mean(values, weights):
    if weights is None:
        return float(values.mean())
    return float(np.dot(weights, values) / weights.sum())


def lrt(full, reduced, effect, data, shared_bank=True):
    """Likelihood-ratio test of ``effect`` from a Full and a reduced fit.

    With ``shared_bank`` (default) both log-likelihoods are averaged over
    the Full fit's final bank.  Otherwise each is averaged over its own
    fit's final bank.  Importance-sampling fits contribute their final
    weights.  Negative raw values are floored at 0 with a warning.
    """
    effect = Effect(effect)
    if full.model_variant is not Variant.FULL:
        raise ValueError(f"first fit must be the Full variant, got {full.model_variant.value}")
    expected = REDUCED_VARIANT[effect]
    if reduced.model_variant is not expected:
        raise ValueError(
            f"{effect.value} test needs the {expected.value} variant, got {reduced.model_variant.value}"
        )
    fp = data.fingerprint
    if full.data_fingerprint != fp or reduced.data_fingerprint != fp:
        raise DatasetMismatchError("fits were not made on the supplied dataset")

    bank, w = full.final_bank, full.final_weights
    ll_full = _bank_mean(bank.loglik_for(full.theta_hat, data), w)
    if shared_bank:
        ll_red = _bank_mean(bank.loglik_for(reduced.theta_hat, data), w)
    else:
        ll_red = _bank_mean(
            reduced.final_bank.loglik_for(reduced.theta_hat, data), reduced.final_weights
        )
    raw = 2.0 * (ll_full - ll_red)
    stat = raw
    if raw < 0:
        warnings.warn(f"{effect.value} statistic {raw:.4g} floored at 0", RuntimeWarning, stacklevel=2)
        stat = 0.0
    df = test_df(effect, data)
    return TestResult(stat, df, chi2_sf(stat, df), effect, (Variant.FULL, expected), raw)
