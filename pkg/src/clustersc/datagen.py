"""Synthetic two-group panels built from shared sinusoid bases.

Each group draws one basis of n_components sinusoid rows

    v_i(j) = alpha_i * sin(2 pi omega_i * j / T + phi_i),   j = 1..T

with alpha ~ Beta, omega ~ Uniform, phi ~ Normal, then every unit mixes the
basis with fresh Uniform[0, 1] weights. Time is normalized to j / T so the
frequency parameter means the same thing at every panel length. Observations
add i.i.d. noise on top of the low-rank signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParamsError
from .panel import InterventionSplit, TimePanel


@dataclass(frozen=True)
class SignalSpec:
    """One group's basis distribution: rank and (alpha, omega, phi) params."""

    n_components: int
    alpha: tuple[float, float]  # Beta(a, b)
    omega: tuple[float, float]  # Uniform(lo, hi)
    phi: tuple[float, float]  # Normal(mean, sd)

    def __post_init__(self):
        if self.n_components < 1:
            raise InvalidParamsError(
                f"n_components must be >= 1, got {self.n_components}"
            )
        a, b = self.alpha
        if a <= 0 or b <= 0:
            raise InvalidParamsError(f"Beta parameters must be > 0, got {self.alpha}")
        lo, hi = self.omega
        if not lo < hi:
            raise InvalidParamsError(f"omega range must have lo < hi, got {self.omega}")
        if self.phi[1] < 0:
            raise InvalidParamsError(f"phi sd must be >= 0, got {self.phi[1]}")


GROUP_A_SPEC = SignalSpec(3, (2.0, 2.0), (1.0, 3.0), (0.0, 1.0))
GROUP_B_SPEC = SignalSpec(3, (2.0, 5.0), (3.0, 6.0), (0.0, 1.0))


@dataclass(frozen=True)
class NoiseSpec:
    """i.i.d. noise distribution: gaussian(sd), uniform(half_width), or
    student_t(dof, scale). Scales may be zero (noiseless); dof must be >= 3
    so the variance exists comfortably."""

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind == "gaussian":
            if len(self.params) != 1 or self.params[0] < 0:
                raise InvalidParamsError(f"gaussian needs sd >= 0, got {self.params}")
        elif self.kind == "uniform":
            if len(self.params) != 1 or self.params[0] < 0:
                raise InvalidParamsError(
                    f"uniform needs half_width >= 0, got {self.params}"
                )
        elif self.kind == "student_t":
            if len(self.params) != 2 or self.params[0] < 3 or self.params[1] < 0:
                raise InvalidParamsError(
                    f"student_t needs dof >= 3 and scale >= 0, got {self.params}"
                )
        else:
            raise InvalidParamsError(f"unknown noise kind {self.kind!r}")

    @classmethod
    def gaussian(cls, sd: float) -> "NoiseSpec":
        return cls("gaussian", (float(sd),))

    @classmethod
    def uniform(cls, half_width: float) -> "NoiseSpec":
        return cls("uniform", (float(half_width),))

    @classmethod
    def student_t(cls, dof: float, scale: float) -> "NoiseSpec":
        return cls("student_t", (float(dof), float(scale)))

    @property
    def scale(self) -> float:
        return self.params[-1]

    def sample(self, shape, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.normal(0.0, self.params[0], size=shape) if self.params[0] else np.zeros(shape)
        if self.kind == "uniform":
            h = self.params[0]
            return rng.uniform(-h, h, size=shape) if h else np.zeros(shape)
        dof, scale = self.params
        return scale * rng.standard_t(dof, size=shape)


def sinusoid_rows(alphas, omegas, phis, t_count: int) -> np.ndarray:
    """Evaluate sinusoid rows at normalized times 1/T .. T/T."""
    alphas = np.asarray(alphas, dtype=float)[:, None]
    omegas = np.asarray(omegas, dtype=float)[:, None]
    phis = np.asarray(phis, dtype=float)[:, None]
    t = np.arange(1, t_count + 1) / t_count
    return alphas * np.sin(2.0 * np.pi * omegas * t + phis)


def gen_sinusoid_basis(spec: SignalSpec, t_count: int, rng) -> np.ndarray:
    """Draw one (n_components, t_count) basis for a group."""
    rng = np.random.default_rng(rng)
    r = spec.n_components
    alphas = rng.beta(*spec.alpha, size=r)
    omegas = rng.uniform(*spec.omega, size=r)
    phis = rng.normal(*spec.phi, size=r)
    return sinusoid_rows(alphas, omegas, phis, t_count)


def gen_group(spec: SignalSpec, n_units: int, t_count: int, rng) -> np.ndarray:
    """One shared basis, fresh Uniform[0,1] mixing weights per unit."""
    rng = np.random.default_rng(rng)
    basis = gen_sinusoid_basis(spec, t_count, rng)
    weights = rng.uniform(0.0, 1.0, size=(n_units, spec.n_components))
    return weights @ basis


def add_noise(signal, noise: NoiseSpec, rng) -> np.ndarray:
    """signal + i.i.d. draws from the noise distribution."""
    signal = np.asarray(signal, dtype=float)
    rng = np.random.default_rng(rng)
    return signal + noise.sample(signal.shape, rng)


@dataclass
class SyntheticDataset:
    """Panel plus everything needed to score against the truth."""

    panel: TimePanel
    group_labels: list[str]
    true_signal: np.ndarray
    spec_a: SignalSpec
    spec_b: SignalSpec
    noise: NoiseSpec
    seed: int


def gen_dataset(
    spec_a: SignalSpec,
    spec_b: SignalSpec,
    n_a: int,
    n_b: int,
    t_count: int,
    t0: int,
    noise: NoiseSpec,
    seed: int,
) -> SyntheticDataset:
    """Stack group A over group B and add noise; reproducible from seed."""
    if n_a < 1 or n_b < 1:
        raise InvalidParamsError(f"both groups need units, got n_a={n_a}, n_b={n_b}")
    split = InterventionSplit(t0, t_count)  # validates 1 <= t0 < t_count
    rng = np.random.default_rng(seed)
    signal_a = gen_group(spec_a, n_a, t_count, rng)
    signal_b = gen_group(spec_b, n_b, t_count, rng)
    true_signal = np.vstack([signal_a, signal_b])
    values = add_noise(true_signal, noise, rng)
    width = len(str(n_a + n_b))
    unit_ids = [f"A{i + 1:0{width}d}" for i in range(n_a)]
    unit_ids += [f"B{i + 1:0{width}d}" for i in range(n_b)]
    t_width = len(str(t_count))
    time_labels = [f"t{j + 1:0{t_width}d}" for j in range(t_count)]
    panel = TimePanel(
        unit_ids=unit_ids, time_labels=time_labels, values=values, split=split
    )
    return SyntheticDataset(
        panel=panel,
        group_labels=["A"] * n_a + ["B"] * n_b,
        true_signal=true_signal,
        spec_a=spec_a,
        spec_b=spec_b,
        noise=noise,
        seed=seed,
    )
