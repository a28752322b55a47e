"""BPSK over AWGN and the stage-0 log-likelihood pairs fed to the decoders.

Mapping is x -> 1 - 2x. Eb/N0 is rate-adjusted:
sigma^2 = 1 / (2 * rate * 10**(ebn0_db / 10)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    ebn0_db: float
    rate: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError("rate must be in (0, 1]")

    @property
    def sigma2(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one Monte Carlo trial; (seed, trial) fully determine it."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def transmit(x, p: ChannelParams, rng: np.random.Generator | None = None) -> np.ndarray:
    x = np.asarray(x)
    if rng is None:
        rng = np.random.default_rng(p.seed)
    noise = rng.standard_normal(x.shape)
    return (1.0 - 2.0 * x) + np.sqrt(p.sigma2) * noise


def channel_ll(y, p: ChannelParams | float) -> np.ndarray:
    """LL pairs (..., 2) for received samples; index 0 is the bit-0 hypothesis.

    ``p`` may be the channel parameters or the noise variance directly.
    The common term -(y^2 + 1) / (2 sigma^2) is dropped.
    """
    sigma2 = p.sigma2 if isinstance(p, ChannelParams) else float(p)
    if not sigma2 > 0:
        raise ValueError("noise variance must be positive")
    y = np.asarray(y, dtype=float)
    half = y / sigma2
    return np.stack([half, -half], axis=-1)
