import numpy as np
import pytest

from mcemdsp.genetics import (
    Dataset,
    FamilyRecord,
    InvalidThetaError,
    LikelihoodError,
    Origin,
    Theta,
    as_simplex,
    ds_denominator,
    joint_ds_table,
    log_likelihood_given_z,
    loglik_bank,
    max_penetrance,
    mendel_compatible,
    penetrance,
    sibling_block_prob,
    transmission_prob,
)
from mcemdsp.verify import random_mu, random_theta


def test_transmission_examples():
    assert transmission_prob(0, 0, 0) == 1
    assert transmission_prob(1, 1, 1, Origin.MATERNAL) == 0.25
    assert transmission_prob(2, 0, 1, Origin.MATERNAL) == 1
    assert transmission_prob(2, 0, 1, Origin.PATERNAL) == 0
    assert transmission_prob(1, 1, 1, Origin.AMBIGUOUS) == 0.5
    assert transmission_prob(0, 0, 2) == 0


def test_transmission_sums_to_one():
    for m in range(3):
        for f in range(3):
            assert sum(transmission_prob(m, f, c) for c in range(3)) == pytest.approx(1)


def test_transmission_origin_errors():
    with pytest.raises(ValueError):
        transmission_prob(1, 0, 1, Origin.AMBIGUOUS)
    with pytest.raises(ValueError):
        transmission_prob(1, 1, 1, Origin.UNAMBIGUOUS)
    with pytest.raises(ValueError):
        transmission_prob(3, 0, 0)


def test_penetrance_examples():
    theta = Theta(0.02, 1.5, 2.0, 1.8, 1.3, 1.7)
    assert penetrance(theta, 0, 0) == 0.02
    assert penetrance(theta, 2, 1, Origin.MATERNAL) == pytest.approx(0.02 * 1.5 * 1.7 * 1.8)
    null = Theta(0.1)
    for m in range(3):
        for c, o in ((0, None), (1, Origin.PATERNAL), (1, Origin.MATERNAL), (2, None)):
            assert penetrance(null, m, c, o or Origin.UNAMBIGUOUS) == 0.1
    with pytest.raises(ValueError):
        penetrance(theta, 1, 1, Origin.AMBIGUOUS)


def test_theta_validation():
    with pytest.raises(InvalidThetaError):
        Theta(0.5, r2=3)
    with pytest.raises(InvalidThetaError):
        Theta(-0.1)
    with pytest.raises(InvalidThetaError):
        Theta(1.0)
    with pytest.raises(InvalidThetaError):
        Theta(0.1, r1=float("nan"))
    # model 7 at high prevalence: the largest reachable cell is r2 * s2, not r1 r2 r_im s1 s2
    params = np.array([0.15, 1, 3, 3, 2, 2])
    assert max_penetrance(params) == pytest.approx(0.15 * 6)
    Theta.from_array(params)


def test_theta_replace_and_roundtrip():
    t = Theta(0.05, 2.0)
    assert t.replace(r_im=3.0).r_im == 3.0
    assert Theta.from_array(t.as_array()) == t


def test_denominator_examples(rng):
    d = 0.06
    mu = random_mu(rng)
    assert ds_denominator(Theta(d), mu) == pytest.approx(d * (1 - d))
    point = np.zeros(9)
    point[0] = 1
    assert ds_denominator(random_theta(rng).replace(delta=d), point) == pytest.approx(d * (1 - d))


def test_joint_table_sums_to_denominator(rng):
    for _ in range(20):
        theta, mu = random_theta(rng), random_mu(rng)
        assert joint_ds_table(theta, mu).sum() == pytest.approx(ds_denominator(theta, mu), abs=1e-14)
        assert np.count_nonzero(joint_ds_table(theta, mu)) == 29


def test_rim_one_makes_origin_irrelevant(rng):
    theta = random_theta(rng).replace(r_im=1.0)
    mu = random_mu(rng)
    d, r1, _, _, s1, _ = theta.as_array()
    # both heterozygous: naive product with P(c=1)=1/2
    naive = mu[4] * 0.5 * d * r1 * s1 * 0.25 * (1 - d * s1)
    assert joint_ds_table(theta, mu)[1, 1, 1, 0] == pytest.approx(naive)


def test_sibling_block_examples():
    theta = Theta(0.04)
    assert sibling_block_prob(theta, 0, 0, []) == 1
    assert sibling_block_prob(theta, 0, 0, [(0, 0)]) == pytest.approx(0.96)
    assert sibling_block_prob(theta, 0, 0, [(2, 0)]) == 0


def test_family_record_checks():
    with pytest.raises(ValueError, match="Mendel"):
        FamilyRecord(0, 0, 1, 0)
    with pytest.raises(ValueError):
        FamilyRecord(0, 3, 0, 0)
    fam = FamilyRecord(1, 1, 2, 0, [(1, True)])
    assert fam.siblings == ((1, 1),)
    assert mendel_compatible(2, 2, 2) and not mendel_compatible(2, 2, 1)


def test_dataset_counts():
    fams = [FamilyRecord(1, 0, 1, 0), FamilyRecord(1, 0, 0, 0, ((1, 1),)), FamilyRecord(2, 2, 2, 2)]
    data = Dataset(fams)
    assert data.n_mf[1, 0] == 2 and data.n_mf.sum() == 3
    assert data.ds_counts[1, 0, 1, 0] == 1
    assert data.sib_counts[1, 0, 1, 1] == 1
    assert data.has_siblings
    assert not Dataset(fams[:1]).has_siblings
    a_idx, a_cnt, b_idx, b_cnt = data.term_counts
    assert a_cnt.sum() == 3 + 1 and b_cnt.sum() == 3


def test_likelihood_delta_free_under_null(rng):
    data = Dataset([FamilyRecord(1, 1, 1, 0), FamilyRecord(0, 1, 0, 1), FamilyRecord(2, 1, 2, 1)])
    z = random_mu(rng)
    a = log_likelihood_given_z(Theta(0.01), z, data)
    b = log_likelihood_given_z(Theta(0.2), z, data)
    assert a == pytest.approx(b, abs=1e-10)


def test_likelihood_additive(rng):
    theta, z = random_theta(rng), random_mu(rng)
    fam = FamilyRecord(1, 2, 1, 2, ((2, 1),))
    one = log_likelihood_given_z(theta, z, Dataset([fam]))
    two = log_likelihood_given_z(theta, z, Dataset([fam, fam]))
    assert two == pytest.approx(2 * one, rel=1e-13)


def test_likelihood_names_family():
    # penetrance 1 for (m=2, c=2) makes an unaffected homozygote impossible
    theta = Theta.from_array([0.5, 1, 2, 1, 1, 1])
    data = Dataset([FamilyRecord(0, 0, 0, 0, family_id="ok"), FamilyRecord(2, 2, 2, 2, family_id="bad")])
    with pytest.raises(LikelihoodError, match="bad"):
        log_likelihood_given_z(theta, np.full(9, 1 / 9), data)


def test_loglik_bank_matches_scalar(rng):
    theta = random_theta(rng)
    data = Dataset([FamilyRecord(1, 1, 1, 0, ((0, 0),)), FamilyRecord(0, 2, 1, 1), FamilyRecord(2, 0, 1, 1)])
    z = rng.dirichlet(np.ones(9), size=5)
    bank = loglik_bank(theta.as_array(), np.log(z), z, data)
    for row, v in zip(z, bank):
        assert v == pytest.approx(log_likelihood_given_z(theta, row, data), rel=1e-12)


def test_as_simplex_errors():
    with pytest.raises(ValueError):
        as_simplex(np.ones(8) / 8)
    with pytest.raises(ValueError):
        as_simplex(np.full(9, 0.2))
    with pytest.raises(ValueError):
        as_simplex(np.r_[0.0, np.full(8, 1 / 8)])
