"""Bandwidth-limited discrete channel impulse responses.

A delay profile (continuous path delays) becomes a dense tap vector by
sampling the ideal sinc pulse at the system rate; negative-index sinc tails
are discarded, the upper index gets a fixed 6-tap guard beyond the maximum
delay spread.  Truncation keeps only the highest-power taps.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DelayRangeError, InvalidInputError

# Default number of leading taps kept by the real-time emulator.
DEFAULT_TAP_BUDGET = 28

SINC_GUARD_TAPS = 6


@dataclass(frozen=True)
class CirConfig:
    """Sampling grid for discrete CIRs.

    ``l_max`` (the tap vector length) is ceil(max_delay_spread * f_samp)
    plus the sinc guard plus one; it may be pinned explicitly when a tap
    count is already known (e.g. read back from a timeline file).
    """

    f_samp: float
    max_delay_spread: float = 3e-6
    l_guard: int = SINC_GUARD_TAPS
    l_max: int = field(default=0)

    def __post_init__(self):
        if self.f_samp <= 0.0:
            raise InvalidInputError(f"f_samp must be positive, got {self.f_samp}")
        if self.max_delay_spread <= 0.0:
            raise InvalidInputError(
                f"max_delay_spread must be positive, got {self.max_delay_spread}"
            )
        if self.l_max == 0:
            k_max = math.ceil(self.max_delay_spread * self.f_samp) + self.l_guard
            object.__setattr__(self, "l_max", k_max + 1)
        elif self.l_max < 1:
            raise InvalidInputError(f"l_max must be >= 1, got {self.l_max}")

    @property
    def k_max(self):
        return self.l_max - 1

    @classmethod
    def from_tap_count(cls, f_samp, l_max, l_guard=SINC_GUARD_TAPS):
        """Config with a known tap count (inverse of the ceil derivation)."""
        spread = max(l_max - 1 - l_guard, 1) / f_samp
        return cls(f_samp=f_samp, max_delay_spread=spread, l_guard=l_guard, l_max=l_max)


@dataclass
class DiscreteCir:
    """One snapshot's dense tap vector h[k], k = 0..l_max-1."""

    taps: np.ndarray
    f_samp: float
    snapshot_time: float = 0.0

    def __post_init__(self):
        self.taps = np.ascontiguousarray(self.taps, dtype=np.complex128)
        if self.taps.ndim != 1:
            raise InvalidInputError("taps must be a 1-D complex vector")
        if not np.all(np.isfinite(self.taps)):
            raise InvalidInputError("taps must be finite")

    @property
    def l_max(self):
        return len(self.taps)


@dataclass
class SortedCir:
    """Power-sorted top-L tap selection of a DiscreteCir."""

    indices: np.ndarray   # original tap positions, power-descending
    amps: np.ndarray      # tap values in the same order
    total_power: float    # sum |h[k]|^2 over the full vector
    retained_power: float  # sum |amps|^2

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if len(self.indices) != len(self.amps):
            raise InvalidInputError("indices and amps must have equal length")

    @property
    def l_sel(self):
        return len(self.indices)


def discretize(profile, cfg):
    """Sample a delay profile onto the tap grid: h[k] = sum_p a_p sinc(k - f_samp*tau_p).

    Negative-index sinc energy is dropped (the grid starts at k = 0).
    Raises :class:`DelayRangeError` naming the first offending path if any
    delay exceeds ``cfg.max_delay_spread``.
    """
    delays = np.asarray(profile.delays, dtype=np.float64)
    amps = np.asarray(profile.amps, dtype=np.complex128)
    over = np.nonzero(delays > cfg.max_delay_spread)[0]
    if over.size:
        p = int(over[0])
        raise DelayRangeError(
            f"path {p} delay {delays[p]:.6g} s exceeds max delay spread "
            f"{cfg.max_delay_spread:.6g} s",
            path_index=p,
        )
    taps = np.zeros(cfg.l_max, dtype=np.complex128)
    if delays.size:
        k = np.arange(cfg.l_max, dtype=np.float64)
        # (P, l_max) sinc kernel; P is small so the dense product is cheap
        kernel = np.sinc(k[np.newaxis, :] - cfg.f_samp * delays[:, np.newaxis])
        taps = amps @ kernel
    return DiscreteCir(taps=taps, f_samp=cfg.f_samp,
                       snapshot_time=profile.snapshot_time)


def sort_truncate(cir, l_sel):
    """Keep the ``l_sel`` highest-power taps, power-descending.

    Ties in power resolve to the smaller tap index so the selection is
    reproducible.  Zero-power taps are never selected.
    """
    if l_sel < 1:
        raise InvalidInputError(f"l_sel must be >= 1, got {l_sel}")
    powers = np.abs(cir.taps) ** 2
    # lexsort: primary key last -> descending power, then ascending index
    order = np.lexsort((np.arange(len(powers)), -powers))
    nonzero = order[powers[order] > 0.0]
    sel = nonzero[: min(l_sel, len(nonzero))]
    total = float(powers.sum())
    retained = float(powers[sel].sum())
    return SortedCir(indices=sel, amps=cir.taps[sel],
                     total_power=total, retained_power=retained)


def path_gain_total(cir):
    """Coherent path gain 10*log10(|sum_k h[k]|^2) in dB; -inf if the sum is zero."""
    power = abs(np.sum(cir.taps)) ** 2
    if power == 0.0:
        return float("-inf")
    return 10.0 * math.log10(power)
