import numpy as np
import pytest
from scipy import stats

from mcemdsp import oracle
from mcemdsp.genetics import InvalidThetaError, mendel_compatible
from mcemdsp.simulate import (
    DISEASE_MODELS,
    SCENARIOS,
    DiseaseModel,
    Scenario,
    calibrate_delta,
    genotype_freqs,
    mating_type_probs,
    simulate_dataset,
    simulate_family,
    true_theta,
)


def test_genotype_freqs():
    np.testing.assert_allclose(genotype_freqs(0.3, 0), [0.49, 0.42, 0.09])
    assert genotype_freqs(0.1, 0.3).sum() == pytest.approx(1)
    assert mating_type_probs(SCENARIOS[1]).sum() == pytest.approx(1)


@pytest.mark.parametrize("model", sorted(DISEASE_MODELS))
@pytest.mark.parametrize("scenario", sorted(SCENARIOS))
def test_calibrated_prevalence(model, scenario):
    theta = true_theta(DISEASE_MODELS[model], SCENARIOS[scenario])
    prev = oracle.brute_force_prev(tuple(theta.as_array()), list(mating_type_probs(SCENARIOS[scenario])))
    assert prev == pytest.approx(SCENARIOS[scenario].prev, rel=1e-12)


def test_model4_delta_below_prevalence():
    assert calibrate_delta(DISEASE_MODELS[4], SCENARIOS[1]) < SCENARIOS[1].prev


def test_impossible_prevalence():
    with pytest.raises(InvalidThetaError):
        calibrate_delta(DiseaseModel(1, 30, 1, 1, 30), Scenario(0.3, 0.15, True))


def test_counts_and_mendel():
    data = simulate_dataset(DISEASE_MODELS[7], SCENARIOS[4], 300, True, seed=1)
    assert len(data) == 300
    for fam in data.families:
        assert mendel_compatible(fam.m, fam.f, fam.c1) and mendel_compatible(fam.m, fam.f, fam.c2)
        assert len(fam.siblings) == 1
        assert mendel_compatible(fam.m, fam.f, fam.siblings[0][0])


def test_ds_plus_extends_ds():
    a = simulate_dataset(DISEASE_MODELS[5], SCENARIOS[2], 50, False, seed=9)
    b = simulate_dataset(DISEASE_MODELS[5], SCENARIOS[2], 50, True, seed=9)
    assert [(f.m, f.f, f.c1, f.c2) for f in a.families] == [(f.m, f.f, f.c1, f.c2) for f in b.families]
    assert not a.has_siblings and b.has_siblings


def test_seed_reproducible():
    a = simulate_dataset(DISEASE_MODELS[2], SCENARIOS[1], 40, True, seed=5)
    b = simulate_dataset(DISEASE_MODELS[2], SCENARIOS[1], 40, True, seed=5)
    assert a.fingerprint == b.fingerprint


def _gof(samples, table):
    keys = sorted(table.nonzero())
    probs = np.array([table[k] for k in keys]) / table.total
    counts = np.array([samples.get(k, 0) for k in keys])
    assert sum(counts) == sum(samples.values())
    return stats.chisquare(counts, probs * counts.sum()).pvalue


@pytest.mark.parametrize("model, scenario", [(1, 2), (7, 4), (8, 3)])
def test_recruitment_law_matches_oracle(model, scenario):
    m, s = DISEASE_MODELS[model], SCENARIOS[scenario]
    data = simulate_dataset(m, s, 20000, seed=model * 10 + scenario)
    seen = {}
    for fam in data.families:
        key = (fam.m, fam.f, fam.c1, fam.c2)
        seen[key] = seen.get(key, 0) + 1
    table = oracle.enumerate_joint_table(tuple(true_theta(m, s).as_array()), list(mating_type_probs(s)))
    assert _gof(seen, table) > 1e-3


def test_single_family_law():
    m, s = DISEASE_MODELS[7], SCENARIOS[4]
    rng = np.random.default_rng(0)
    delta = calibrate_delta(m, s)
    seen = {}
    for _ in range(5000):
        fam = simulate_family(m, s, delta, False, rng)
        key = (fam.m, fam.f, fam.c1, fam.c2)
        seen[key] = seen.get(key, 0) + 1
    table = oracle.enumerate_joint_table(tuple(true_theta(m, s).as_array()), list(mating_type_probs(s)))
    assert _gof(seen, table) > 1e-3


def test_null_children_exchangeable():
    data = simulate_dataset(DISEASE_MODELS[1], SCENARIOS[2], 20000, seed=2)
    c1 = np.array([f.c1 for f in data.families])
    c2 = np.array([f.c2 for f in data.families])
    # affected and unaffected children have the same genotype law under no association
    table = np.array([np.bincount(c1, minlength=3), np.bincount(c2, minlength=3)])
    assert stats.chi2_contingency(table).pvalue > 1e-3
