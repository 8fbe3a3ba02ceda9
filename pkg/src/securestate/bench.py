"""Batch experiments: random plants, attacks and noise, one CSV row per trial."""

import csv
import enum
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import Optional

import numpy as np

from ._validation import max_attack_cap
from .bounds import attack_threshold, delta_s, n_upper
from .residual import DEFAULT_EPSILON
from .scenario import (
    NoiseModel, generate_attack, noise_bounds, random_sparse_system, simulate_window,
)
from .search import SearchMode, secure_estimate
from .system import max_allowable_attacks

CSV_COLUMNS = (
    "p", "n", "s", "scheme", "noise", "seed", "iterations",
    "runtime_ms", "rel_error", "identified", "status",
)
DEFAULT_NOISE = NoiseModel("truncated_gaussian", sigma=1e-4, k=3.0)
MAX_SYSTEM_DRAWS = 200
# plants with delta_s this close to 1 have no usable attack threshold
DELTA_CEILING = 1.0 - 1e-9


class Preset(str, enum.Enum):
    SMALL_OPTIMALITY = "small_optimality"
    SCALING_P = "scaling_p"
    SCALING_N = "scaling_n"
    NOISELESS_BENCH = "noiseless_bench"
    NOISY_BENCH = "noisy_bench"
    CUSTOM = "custom"


@dataclass
class ExperimentConfig:
    """Experiment grid.

    `cells` lists ``(p, n)`` pairs. With ``fractions=None`` the number of
    attacked sensors equals the plant's ``s_bar`` and the attack magnitude is
    `magnitude_factor` times the detectability threshold (small plants only);
    otherwise ``s = round(fraction * p)`` and the magnitude is `magnitude`.
    """

    preset: Preset = Preset.CUSTOM
    cells: list = field(default_factory=lambda: [(10, 10)])
    fractions: Optional[list] = None
    schemes: list = field(default_factory=lambda: ["greedy", "random"])
    noises: list = field(default_factory=lambda: [NoiseModel()])
    trials: int = 25
    seed: int = 0
    epsilon: float = DEFAULT_EPSILON
    mode: SearchMode = SearchMode.EXACT
    density: float = 0.3
    magnitude: float = 1.0
    magnitude_factor: float = 2.0
    max_p: int = 60
    max_pn: int = 3600

    def validate(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.cells or not self.schemes or not self.noises:
            raise ValueError("cells, schemes and noises must be non-empty")
        for p, n in self.cells:
            if p > self.max_p or p * n > self.max_pn:
                raise ValueError(
                    f"cell p={p}, n={n} exceeds the resource guard "
                    f"(max_p={self.max_p}, max_pn={self.max_pn})"
                )
            if self.fractions is None and self.mode is SearchMode.HALF_P:
                raise ValueError("s = s_bar needs exact mode")
            for fraction in self.fractions or ():
                if round(fraction * p) > max_attack_cap(p):
                    raise ValueError(f"fraction {fraction} gives s > ceil(p/2) - 1 for p={p}")
        return self


def preset_config(preset, **overrides):
    preset = Preset(preset)
    base = {
        Preset.SMALL_OPTIMALITY: dict(
            cells=[(10, 10)], fractions=None, noises=[NoiseModel(), DEFAULT_NOISE],
            mode=SearchMode.EXACT),
        Preset.SCALING_P: dict(
            cells=[(20, 40), (40, 40), (60, 40)], fractions=[0.3], schemes=["random"],
            mode=SearchMode.HALF_P),
        Preset.SCALING_N: dict(
            cells=[(p, n) for p in (20, 40) for n in (20, 40, 60)], fractions=[0.3],
            schemes=["random"], mode=SearchMode.HALF_P),
        Preset.NOISELESS_BENCH: dict(
            cells=[(20, 20), (40, 40), (60, 60)], fractions=[0.1, 0.2, 0.3],
            mode=SearchMode.HALF_P),
        Preset.NOISY_BENCH: dict(
            cells=[(20, 20), (40, 40), (60, 60)], fractions=[0.1, 0.2, 0.3],
            noises=[DEFAULT_NOISE], mode=SearchMode.HALF_P),
        Preset.CUSTOM: {},
    }[preset]
    base.update(overrides)
    return ExperimentConfig(preset=preset, **base)


def noise_label(noise):
    if noise.is_none:
        return "none"
    return f"tg(sigma={noise.sigma:g},k={noise.k:g})"


@dataclass
class TrialSpec:
    p: int
    n: int
    fraction: Optional[float]
    scheme: str
    noise: NoiseModel
    seed: int
    epsilon: float = DEFAULT_EPSILON
    mode: SearchMode = SearchMode.EXACT
    density: float = 0.3
    magnitude: float = 1.0
    magnitude_factor: float = 2.0


@dataclass
class Trial:
    """A generated instance: plant, simulated window and its parameters."""

    spec: TrialSpec
    system: object
    window: object
    s: int
    s_bar: Optional[int]
    delta: Optional[float] = None
    threshold: Optional[float] = None


@dataclass
class TrialRecord:
    p: int
    n: int
    s: int
    scheme: str
    noise: str
    seed: int
    iterations: int
    runtime_ms: float
    rel_error: float
    identified: bool
    status: str
    fraction: Optional[float] = None
    s_bar: Optional[int] = None
    n_upper: Optional[int] = None
    delta_s: Optional[float] = None
    expanded: list = field(default_factory=list, repr=False)

    def csv_row(self):
        return [getattr(self, column) for column in CSV_COLUMNS]


def build_trial(spec):
    """Generate the instance for `spec`; everything derives from ``spec.seed``."""
    seeds = np.random.SeedSequence(spec.seed).generate_state(4)
    system_seed, attack_seed, state_seed, noise_seed = (int(s) for s in seeds)
    T = spec.n
    s_bar = delta = threshold = None
    if spec.fraction is None:
        draws = np.random.default_rng(system_seed)
        for _ in range(MAX_SYSTEM_DRAWS):
            system = random_sparse_system(spec.n, spec.p, spec.density,
                                          seed=int(draws.integers(2**63)))
            s_bar = max_allowable_attacks(system, T)
            if s_bar >= 1:
                delta = delta_s(system, s_bar, T)
                if delta < DELTA_CEILING:
                    break
        else:
            raise RuntimeError("no 2-sparse observable plant with a finite threshold found")
        s = s_bar
        w_bar = float(np.linalg.norm(noise_bounds(spec.noise, system, T)))
        threshold = attack_threshold(delta, w_bar, spec.epsilon)
        magnitude = spec.magnitude_factor * threshold
    else:
        system = random_sparse_system(spec.n, spec.p, spec.density, seed=system_seed)
        s = min(round(spec.fraction * spec.p), max_attack_cap(spec.p))
        magnitude = spec.magnitude
    attack = generate_attack(spec.scheme, spec.p, s, magnitude, T, seed=attack_seed)
    x0 = np.random.default_rng(state_seed).uniform(-1.0, 1.0, spec.n)
    window = simulate_window(system, x0, T, noise=spec.noise, attack=attack, seed=noise_seed)
    return Trial(spec, system, window, s, s_bar, delta, threshold)


def run_trial(spec):
    trial = build_trial(spec)
    window = trial.window
    result = secure_estimate(window, trial.system, window.noise_bounds, spec.epsilon,
                             trial.s_bar, spec.mode)
    x0 = window.x0
    if result.solved:
        rel_error = float(np.linalg.norm(x0 - result.x_hat) / np.linalg.norm(x0))
    else:
        rel_error = float("nan")
    return TrialRecord(
        p=spec.p, n=spec.n, s=trial.s, scheme=spec.scheme, noise=noise_label(spec.noise),
        seed=spec.seed, iterations=result.iterations, runtime_ms=1e3 * result.runtime,
        rel_error=rel_error, identified=result.solved and result.attacked == window.attack.support,
        status=result.status.value, fraction=spec.fraction, s_bar=trial.s_bar,
        n_upper=None if trial.s_bar is None else n_upper(spec.p, trial.s_bar, trial.s),
        delta_s=trial.delta, expanded=result.expanded,
    )


def trial_specs(config):
    """All trials of `config` in deterministic (cell, trial) order."""
    specs = []
    seed = config.seed
    fractions = config.fractions or [None]
    for (p, n), fraction, scheme, noise in product(
            config.cells, fractions, config.schemes, config.noises):
        for _ in range(config.trials):
            specs.append(TrialSpec(
                p, n, fraction, scheme, noise, seed, config.epsilon, config.mode,
                config.density, config.magnitude, config.magnitude_factor))
            seed += 1
    return specs


def worker_count():
    return max(1, int(os.environ.get("SSE_THREADS", "1")))


def run_bench(config, workers=None):
    specs = trial_specs(config.validate())
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [run_trial(spec) for spec in specs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_trial, specs))


def summarize(records):
    """Aggregate per (p, n, fraction, scheme, noise) cell, in first-seen order.

    ``s`` is reported as the sorted list of attack counts seen in the cell
    (a single value unless ``s`` follows each plant's ``s_bar``).
    """
    cells = {}
    for record in records:
        key = (record.p, record.n, record.fraction, record.scheme, record.noise)
        cells.setdefault(key, []).append(record)
    summary = []
    for (p, n, fraction, scheme, noise), group in cells.items():
        iterations = np.array([r.iterations for r in group], dtype=float)
        summary.append({
            "p": p, "n": n, "fraction": fraction,
            "s": sorted({r.s for r in group}), "scheme": scheme, "noise": noise,
            "trials": len(group),
            "iterations_mean": float(iterations.mean()),
            "iterations_std": float(iterations.std()),
            "iterations_min": int(iterations.min()),
            "iterations_max": int(iterations.max()),
            "runtime_ms_mean": float(np.mean([r.runtime_ms for r in group])),
            "misidentification_ratio": float(np.mean([not r.identified for r in group])),
            "solved": sum(r.status == "solved" for r in group),
        })
    return summary


def write_csv(records, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow(record.csv_row())
    return path


def spec_from_row(row, config):
    """Rebuild the trial spec behind one CSV row (given the config that produced it)."""
    noise = next(m for m in config.noises if noise_label(m) == row["noise"])
    p, n = int(row["p"]), int(row["n"])
    fraction = None
    if config.fractions is not None:
        fraction = next(f for f in config.fractions
                        if min(round(f * p), max_attack_cap(p)) == int(row["s"]))
    return replace(
        TrialSpec(p, n, fraction, row["scheme"], noise, int(row["seed"])),
        epsilon=config.epsilon, mode=config.mode, density=config.density,
        magnitude=config.magnitude, magnitude_factor=config.magnitude_factor,
    )
