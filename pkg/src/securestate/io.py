"""JSON and CSV persistence for systems, scenarios and results."""

import csv
import json
from pathlib import Path

import numpy as np

from .scenario import AttackScenario, NoiseModel
from .system import LtiSystem, StackedWindow


def _write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n")
    return path


def _read_json(path):
    return json.loads(Path(path).read_text())


def save_system(system, path, **extra):
    return _write_json(path, {**system.to_dict(), **extra})


def load_system(path):
    data = _read_json(path)
    return LtiSystem.from_dict(data), data


def save_scenario(window, path, noise=None, seed=None, system_ref=None, **extra):
    data = {
        "system_ref": system_ref,
        "seed": seed,
        "T": window.T,
        "p": window.p,
        "x0": None if window.x0 is None else window.x0.tolist(),
        "noise": (noise or NoiseModel()).to_dict(),
        "noise_bounds": None if window.noise_bounds is None else window.noise_bounds.tolist(),
        "attack": None if window.attack is None else window.attack.to_dict(),
        "Y": window.Y.tolist(),
    }
    data.update(extra)
    return _write_json(path, data)


def load_scenario(path):
    """Return ``(window, data)``; `data` is the raw decoded file."""
    data = _read_json(path)
    window = StackedWindow(
        np.asarray(data["Y"], dtype=float),
        T=int(data["T"]),
        p=int(data["p"]),
        x0=None if data.get("x0") is None else np.asarray(data["x0"]),
        attack=None if data.get("attack") is None else AttackScenario.from_dict(data["attack"]),
        noise_bounds=None if data.get("noise_bounds") is None
        else np.asarray(data["noise_bounds"]),
    )
    return window, data


def export_measurements_csv(window, path):
    """One row per time instant, one column per sensor."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"sensor_{i}" for i in range(window.p)])
        writer.writerows(window.as_matrix().tolist())
    return path


def save_json(data, path):
    return _write_json(path, data)
