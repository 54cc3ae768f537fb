"""Simulation of discordant sib-pair data under the benchmark disease models."""
from dataclasses import dataclass

import numpy as np

from .genetics import STATE_PROBS, Dataset, FamilyRecord, InvalidThetaError, Theta, max_penetrance

__all__ = [
    "Scenario",
    "DiseaseModel",
    "DISEASE_MODELS",
    "SCENARIOS",
    "genotype_freqs",
    "mating_type_probs",
    "calibrate_delta",
    "true_theta",
    "simulate_family",
    "simulate_dataset",
]


@dataclass(frozen=True)
class Scenario:
    maf: float
    prev: float
    hwe: bool
    zeta_male: float = None
    zeta_female: float = None

    def __post_init__(self):
        if not 0 < self.maf <= 0.5:
            raise ValueError(f"maf must lie in (0, 0.5], got {self.maf}")
        if not 0 < self.prev < 1:
            raise ValueError(f"prevalence must lie in (0, 1), got {self.prev}")
        if self.zeta_male is None:
            object.__setattr__(self, "zeta_male", 0.0 if self.hwe else 0.1)
        if self.zeta_female is None:
            object.__setattr__(self, "zeta_female", 0.0 if self.hwe else 0.3)


@dataclass(frozen=True)
class DiseaseModel:
    r1: float
    r2: float
    r_im: float
    s1: float
    s2: float

    def __post_init__(self):
        if min(self.r1, self.r2, self.r_im, self.s1, self.s2) <= 0:
            raise ValueError("relative risks must be positive")

    def as_array(self):
        return np.array([self.r1, self.r2, self.r_im, self.s1, self.s2])


DISEASE_MODELS = {
    1: DiseaseModel(1, 1, 1, 1, 1),
    2: DiseaseModel(2, 3, 1, 1, 1),
    3: DiseaseModel(1, 3, 1, 1, 1),
    4: DiseaseModel(1, 3, 1, 2, 2),
    5: DiseaseModel(1, 3, 3, 1, 1),
    6: DiseaseModel(3, 3, 1 / 3, 1, 1),
    7: DiseaseModel(1, 3, 3, 2, 2),
    8: DiseaseModel(3, 3, 1 / 3, 2, 2),
}

SCENARIOS = {
    1: Scenario(0.1, 0.05, False),
    2: Scenario(0.3, 0.05, False),
    3: Scenario(0.1, 0.15, False),
    4: Scenario(0.3, 0.15, False),
    5: Scenario(0.1, 0.05, True),
    6: Scenario(0.3, 0.05, True),
    7: Scenario(0.1, 0.15, True),
    8: Scenario(0.3, 0.15, True),
}


def genotype_freqs(p, zeta):
    """Genotype frequencies (0, 1, 2 variant copies) under inbreeding coefficient zeta."""
    q = 1.0 - p
    return np.array([q * q * (1 - zeta) + q * zeta, 2 * p * q * (1 - zeta), p * p * (1 - zeta) + p * zeta])


def mating_type_probs(scenario):
    """mu[3m + f]: mothers and fathers pair independently from sex-specific laws."""
    mother = genotype_freqs(scenario.maf, scenario.zeta_female)
    father = genotype_freqs(scenario.maf, scenario.zeta_male)
    return np.outer(mother, father).reshape(9)


def _risk_table(model):
    r1, r2, r_im, s1, s2 = model.as_array()
    child = np.array([1.0, r1, r1 * r_im, r2])
    mother = np.array([1.0, s1, s2])
    return mother[:, None] * child[None, :]


def calibrate_delta(model, scenario):
    """Phenocopy rate giving population prevalence ``scenario.prev``."""
    mu = mating_type_probs(scenario).reshape(3, 3)
    mean_rr = float(np.sum(mu[:, :, None] * STATE_PROBS * _risk_table(model)[:, None, :]))
    delta = scenario.prev / mean_rr
    params = np.concatenate([[delta], model.as_array()])
    if delta >= 1 or max_penetrance(params) > 1:
        raise InvalidThetaError(
            f"prevalence {scenario.prev} needs penetrance above 1 under {model}"
        )
    return delta


def true_theta(model, scenario):
    return Theta.from_array([calibrate_delta(model, scenario), *model.as_array()])


def _draw_children(rng, mothers, fathers):
    """Origin-resolved child states (0, 1 paternal, 1 maternal, 2) for each parent pair."""
    trans = np.array([0.0, 0.5, 1.0])
    from_m = rng.random(mothers.shape) < trans[mothers]
    from_f = rng.random(fathers.shape) < trans[fathers]
    # state index: 0 none, 1 paternal only, 2 maternal only, 3 both
    return 2 * from_m.astype(np.int64) + from_f.astype(np.int64)


_STATE_TO_COUNT = np.array([0, 1, 1, 2])


def _recruit(rng, model, scenario, delta, n_families, batch=None):
    """Rejection-sample ``n_families`` discordant pairs.  Returns parallel arrays."""
    mu = mating_type_probs(scenario)
    pen = delta * _risk_table(model)
    batch = batch or max(64, 4 * n_families)
    parts = []
    got = 0
    while got < n_families:
        pair = rng.choice(9, size=batch, p=mu)
        m, f = pair // 3, pair % 3
        s1 = _draw_children(rng, m, f)
        s2 = _draw_children(rng, m, f)
        d1 = rng.random(batch) < pen[m, s1]
        d2 = rng.random(batch) < pen[m, s2]
        keep = d1 != d2
        # the affected child is the first proband
        aff = np.where(d1, s1, s2)[keep]
        unaff = np.where(d1, s2, s1)[keep]
        parts.append((m[keep], f[keep], aff, unaff))
        got += int(keep.sum())
    cat = [np.concatenate([p[i] for p in parts])[:n_families] for i in range(4)]
    return cat


def simulate_family(model, scenario, delta, with_extra_sibling, rng):
    """Draw one recruited family by rejection sampling."""
    mu = mating_type_probs(scenario)
    pen = delta * _risk_table(model)
    while True:
        pair = rng.choice(9, p=mu)
        m, f = np.array([pair // 3]), np.array([pair % 3])
        s1 = _draw_children(rng, m, f)[0]
        s2 = _draw_children(rng, m, f)[0]
        d1 = rng.random() < pen[m[0], s1]
        d2 = rng.random() < pen[m[0], s2]
        if d1 != d2:
            break
    aff, unaff = (s1, s2) if d1 else (s2, s1)
    sibs = ()
    if with_extra_sibling:
        s3 = _draw_children(rng, m, f)[0]
        sibs = ((int(_STATE_TO_COUNT[s3]), int(rng.random() < pen[m[0], s3])),)
    return FamilyRecord(int(m[0]), int(f[0]), int(_STATE_TO_COUNT[aff]), int(_STATE_TO_COUNT[unaff]), sibs)


def simulate_dataset(model, scenario, n_families, with_extra_sibling=False, seed=None, delta=None):
    """Simulate ``n_families`` recruited families.

    Probands come from one random stream and additional siblings from an
    independent one, so the DS+1 dataset for a seed is the DS dataset for
    the same seed with one sibling added per family.
    """
    if delta is None:
        delta = calibrate_delta(model, scenario)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    proband_seq, sibling_seq = root.spawn(2)
    rng = np.random.default_rng(proband_seq)
    m, f, aff, unaff = _recruit(rng, model, scenario, delta, n_families)
    sibs = [()] * n_families
    if with_extra_sibling:
        srng = np.random.default_rng(sibling_seq)
        s3 = _draw_children(srng, m, f)
        d3 = srng.random(n_families) < delta * _risk_table(model)[m, s3]
        sibs = [((int(_STATE_TO_COUNT[s]), int(d)),) for s, d in zip(s3, d3)]
    families = [
        FamilyRecord(int(m[i]), int(f[i]), int(_STATE_TO_COUNT[aff[i]]), int(_STATE_TO_COUNT[unaff[i]]),
                     sibs[i], family_id=f"F{i + 1:05d}")
        for i in range(n_families)
    ]
    return Dataset(families)
