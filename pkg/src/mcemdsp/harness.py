"""Replicate and per-SNP drivers shared by the command line and the acceptance suite.

Every task derives its own random stream from identifiers (base seed,
model, scenario, replicate, SNP id), never from arrival order, so results
do not depend on the number of worker processes.
"""
import hashlib
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .engine import EmConfig, FitError, Variant, fit, fit_importance
from .genetics import PARAM_NAMES
from .inference import REDUCED_VARIANT, Effect, lrt
from .simulate import DISEASE_MODELS, SCENARIOS, simulate_dataset, true_theta

__all__ = [
    "ENGINES",
    "snp_seed",
    "replicate_seed",
    "fit_variants",
    "TestReport",
    "run_tests",
    "ReplicateTask",
    "run_replicate",
    "run_tasks",
    "summarize_replicates",
]

ENGINES = {"mcem": fit, "mcem-is": fit_importance}
_VARIANT_ORDER = (Variant.FULL, Variant.NULL, Variant.NO_IMPRINTING, Variant.NO_MATERNAL)


def snp_seed(base_seed, snp_id):
    """64-bit seed from a hash of (base seed, SNP id)."""
    digest = hashlib.blake2b(f"{int(base_seed)}\x00{snp_id}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def replicate_seed(base_seed, model, scenario, n_families, ds_plus, rep):
    """Entropy for one simulated replicate; the same replicate index gives the
    same DS data whether or not extra siblings are requested."""
    del ds_plus  # DS and DS+1 replicates share probands
    return [int(base_seed), int(model), int(scenario), int(n_families), int(rep)]


def fit_variants(data, config, engine="mcem", seed=0, variants=_VARIANT_ORDER):
    """Fit each requested variant with its own stream spawned from ``seed``."""
    runner = ENGINES[engine]
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = dict(zip(_VARIANT_ORDER, root.spawn(len(_VARIANT_ORDER))))
    return {v: runner(data, config, v, np.random.default_rng(streams[v])) for v in variants}


@dataclass
class TestReport:
    fits: dict
    tests: dict
    warnings: list = field(default_factory=list)

    __test__ = False


def run_tests(data, config, engine="mcem", seed=0, effects=tuple(Effect), shared_bank=True):
    """Fit the Full model and the reduced variants needed for ``effects`` and test each."""
    effects = tuple(Effect(e) for e in effects)
    needed = (Variant.FULL,) + tuple(REDUCED_VARIANT[e] for e in effects)
    fits = fit_variants(data, config, engine, seed, variants=tuple(v for v in _VARIANT_ORDER if v in needed))
    notes = []
    tests = {}
    for e in effects:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            tests[e] = lrt(fits[Variant.FULL], fits[REDUCED_VARIANT[e]], e, data, shared_bank)
        notes.extend(str(w.message) for w in caught)
    return TestReport(fits, tests, notes)


@dataclass(frozen=True)
class ReplicateTask:
    model: int
    scenario: int
    n_families: int
    ds_plus: bool
    rep: int
    base_seed: int
    engine: str
    config: EmConfig
    effects: tuple = tuple(Effect)
    shared_bank: bool = True


def run_replicate(task):
    """Simulate, fit and test one replicate.  Returns a flat result dict.

    Failures are caught and reported in the ``error`` field so that a grid
    run survives individual numerical problems.
    """
    entropy = replicate_seed(task.base_seed, task.model, task.scenario, task.n_families, task.ds_plus, task.rep)
    data_seq, fit_seq = np.random.SeedSequence(entropy).spawn(2)
    out = {
        "model": task.model,
        "scenario": task.scenario,
        "n_families": task.n_families,
        "data_type": "DS+1" if task.ds_plus else "DS",
        "rep": task.rep,
        "engine": task.engine,
        "error": "",
    }
    model, scenario = DISEASE_MODELS[task.model], SCENARIOS[task.scenario]
    truth = true_theta(model, scenario).as_array()
    start = time.perf_counter()
    try:
        data = simulate_dataset(model, scenario, task.n_families, task.ds_plus, seed=data_seq)
        report = run_tests(data, task.config, task.engine, fit_seq, task.effects, task.shared_bank)
    except (FitError, ArithmeticError, ValueError) as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
        out["elapsed"] = time.perf_counter() - start
        return out
    out["elapsed"] = time.perf_counter() - start
    full = report.fits[Variant.FULL]
    out["converged"] = full.converged
    out["n_iter"] = full.n_iter
    out["fit_elapsed"] = full.elapsed
    est = full.theta_hat.as_array()
    for name, t, e in zip(PARAM_NAMES, truth, est):
        out[f"{name}_hat"] = float(e)
        out[f"{name}_relbias"] = float((e - t) / t)
    for e in Effect:
        res = report.tests.get(e)
        out[f"{e.value}_stat"] = res.statistic if res else float("nan")
        out[f"{e.value}_p"] = res.p_value if res else float("nan")
    return out


def run_tasks(fn, tasks, jobs=1):
    """Map ``fn`` over ``tasks``, in a process pool when ``jobs > 1``; order is preserved."""
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def summarize_replicates(results, level=0.05):
    """Aggregate replicate dicts by (model, scenario, n, data type, engine)."""
    groups = {}
    for r in results:
        key = (r["model"], r["scenario"], r["n_families"], r["data_type"], r["engine"])
        groups.setdefault(key, []).append(r)
    rows = []
    for key in sorted(groups):
        reps = groups[key]
        ok = [r for r in reps if not r["error"]]
        row = dict(zip(("model", "scenario", "n_families", "data_type", "engine"), key))
        row["n_replicates"] = len(reps)
        row["n_failed"] = len(reps) - len(ok)
        for e in Effect:
            p = np.array([r[f"{e.value}_p"] for r in ok], dtype=float)
            p = p[np.isfinite(p)]
            row[f"{e.value}_rejection"] = float(np.mean(p < level)) if p.size else float("nan")
        for name in PARAM_NAMES:
            b = np.array([r[f"{name}_relbias"] for r in ok], dtype=float)
            q = np.quantile(b, [0.25, 0.5, 0.75]) if b.size else [float("nan")] * 3
            row[f"{name}_relbias_q1"], row[f"{name}_relbias_median"], row[f"{name}_relbias_q3"] = map(float, q)
        row["mean_elapsed"] = float(np.mean([r["elapsed"] for r in reps])) if reps else float("nan")
        rows.append(row)
    return rows
