"""Random plants, attack scenarios, bounded noise and simulated windows."""

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ._validation import check_positive_int, check_vector, max_attack_cap
from .system import LtiSystem, StackedWindow


class AttackScheme(str, enum.Enum):
    GREEDY = "greedy"
    RANDOM = "random"


@dataclass(frozen=True, eq=False)
class AttackScenario:
    """Fixed attack support with one stacked length-``T`` signal per sensor."""

    support: tuple
    signals: dict
    scheme: AttackScheme
    magnitude: float
    T: int

    def stacked(self, p):
        """Attack vector laid out like the stacked measurements."""
        e = np.zeros((self.T, p))
        for sensor, signal in self.signals.items():
            e[:, sensor] = signal
        return e.ravel()

    def to_dict(self):
        return {
            "support": list(self.support),
            "signals": {str(i): list(map(float, s)) for i, s in self.signals.items()},
            "scheme": self.scheme.value,
            "magnitude": self.magnitude,
            "T": self.T,
        }

    @classmethod
    def from_dict(cls, data):
        signals = {int(i): np.asarray(s, dtype=float) for i, s in data["signals"].items()}
        return cls(
            support=tuple(int(i) for i in data["support"]),
            signals=signals,
            scheme=AttackScheme(data["scheme"]),
            magnitude=float(data["magnitude"]),
            T=int(data["T"]),
        )

    @classmethod
    def empty(cls, T):
        return cls((), {}, AttackScheme.GREEDY, 0.0, T)


@dataclass(frozen=True)
class NoiseModel:
    """Bounded process and measurement noise.

    ``kind="truncated_gaussian"`` draws every scalar from a normal with
    standard deviation `sigma` (measurement) or `process_sigma` (process,
    defaults to `sigma`), truncated at ``k`` standard deviations.
    """

    kind: str = "none"
    sigma: float = 0.0
    k: float = 3.0
    process_sigma: float = field(default=None)

    def __post_init__(self):
        if self.kind not in ("none", "truncated_gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.process_sigma is None:
            object.__setattr__(self, "process_sigma", self.sigma)
        if self.sigma < 0 or self.process_sigma < 0 or self.k <= 0:
            raise ValueError("noise parameters must be non-negative (k positive)")

    @property
    def is_none(self):
        return self.kind == "none" or (self.sigma == 0 and self.process_sigma == 0)

    def sample(self, size, scale, rng):
        if self.is_none or scale == 0:
            return np.zeros(size)
        return stats.truncnorm.rvs(-self.k, self.k, scale=scale, size=size, random_state=rng)

    def to_dict(self):
        return {
            "kind": self.kind,
            "sigma": self.sigma,
            "k": self.k,
            "process_sigma": self.process_sigma,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def random_sparse_system(n, p, density=0.3, seed=None, max_spectral_radius=1.0):
    """Draw ``A`` and ``C`` with entries nonzero w.p. `density`, values in [0, 1].

    If the spectral radius of ``A`` exceeds `max_spectral_radius`, ``A`` is
    scaled down to it, so entries remain in [0, 1] while powers of ``A`` stay
    representable for long windows. Pass ``None`` to disable the scaling.
    """
    n = check_positive_int(n, "n")
    p = check_positive_int(p, "p")
    if not 0 < density <= 1:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    rng = np.random.default_rng(seed)

    def draw(shape):
        mask = rng.random(shape) < density
        return np.where(mask, rng.random(shape), 0.0)

    A = draw((n, n))
    C = draw((p, n))
    if max_spectral_radius is not None:
        radius = np.max(np.abs(np.linalg.eigvals(A)))
        if radius > max_spectral_radius:
            A = A * (max_spectral_radius / radius)
    return LtiSystem(A, C)


def generate_attack(scheme, p, s, magnitude, T, seed=None):
    """Pick `s` attacked sensors and a stacked signal of norm `magnitude` for each.

    Greedy attacks sensors ``0..s-1``; random draws a uniform `s`-subset.
    """
    scheme = AttackScheme(scheme)
    p = check_positive_int(p, "p")
    s = check_positive_int(s, "s", minimum=0)
    T = check_positive_int(T, "T")
    if s > max_attack_cap(p):
        raise ValueError(f"s={s} exceeds ceil(p/2) - 1 = {max_attack_cap(p)}")
    if magnitude < 0:
        raise ValueError("magnitude must be non-negative")
    rng = np.random.default_rng(seed)
    if scheme is AttackScheme.GREEDY:
        support = tuple(range(s))
    else:
        support = tuple(sorted(int(i) for i in rng.choice(p, size=s, replace=False)))
    signals = {}
    for sensor in support:
        direction = rng.standard_normal(T)
        signals[sensor] = magnitude * direction / np.linalg.norm(direction)
    return AttackScenario(support, signals, scheme, float(magnitude), T)


def noise_bound_for(model, system, T, i):
    """Worst-case norm of sensor `i`'s stacked noise block.

    Every scalar noise draw is bounded by ``k * sigma``; the process noise
    reaches block ``t`` through ``C_i A^j`` for ``j < t``.
    """
    return float(noise_bounds(model, system, T)[i])


def noise_bounds(model, system, T):
    """Vector of per-sensor bounds, see :func:`noise_bound_for`."""
    T = check_positive_int(T, "T")
    p = system.p
    if model.is_none:
        return np.zeros(p)
    w_max = model.k * model.sigma
    v_max = model.k * model.process_sigma
    # gains[j, i] = ||C_i A^j||_1
    gains = np.empty((max(T - 1, 0), p))
    row = system.C.copy()
    for j in range(T - 1):
        gains[j] = np.abs(row).sum(axis=1)
        row = row @ system.A
    per_block = np.empty((T, p))
    for t in range(T):
        per_block[t] = w_max + v_max * gains[:t].sum(axis=0)
    return np.sqrt(np.sum(per_block ** 2, axis=0))


def simulate_window(system, x0, T, noise=None, attack=None, seed=None):
    """Run the plant for `T` steps from `x0` and stack the attacked outputs."""
    T = check_positive_int(T, "T")
    x0 = check_vector(x0, "x0", system.n)
    noise = NoiseModel() if noise is None else noise
    attack = AttackScenario.empty(T) if attack is None else attack
    if attack.T != T:
        raise ValueError(f"attack window length {attack.T} differs from T={T}")
    rng = np.random.default_rng(seed)
    p = system.p
    e = attack.stacked(p).reshape(T, p)
    y = np.empty((T, p))
    w_stacked = np.empty((T, p))
    x = x0.copy()
    clean = x0.copy()
    for t in range(T):
        w = noise.sample(p, noise.sigma, rng)
        y[t] = system.C @ x + e[t] + w
        w_stacked[t] = system.C @ (x - clean) + w
        v = noise.sample(system.n, noise.process_sigma, rng)
        x = system.A @ x + v
        clean = system.A @ clean
    return StackedWindow(
        y.ravel(),
        T=T,
        p=p,
        x0=x0,
        attack=attack,
        noise_bounds=noise_bounds(noise, system, T),
        noise=w_stacked.ravel(),
    )
