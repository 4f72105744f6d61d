"""Per-slot convolution latency measurement against the slot-period budget."""

import time
from dataclasses import dataclass

import numpy as np

from .cir import SortedCir
from .emulator import (CARRY, EmulatorConfig, EmulatorState, IqSlot,
                       convolve_slot)
from .errors import InvalidInputError

DEFAULT_TAP_VECTOR_LEN = 146


@dataclass(frozen=True)
class BenchStats:
    """Latency summary of a bench run."""

    slot_count: int
    l_sel: int
    samples_per_slot: int
    min_s: float
    median_s: float
    p99_s: float
    max_s: float
    budget_s: float

    @property
    def passed(self):
        return self.median_s < self.budget_s


def bench(slot_count, l_sel, slot_format, seed=0, l_max=DEFAULT_TAP_VECTOR_LEN,
          noise_power_db=float("-inf")):
    """Time ``convolve_slot`` over synthetic random slots.

    Only the convolution call is timed; input generation happens outside the
    timer.  Noise defaults to off so the measurement isolates the tap
    accumulation (enable it via ``noise_power_db`` to measure the full path).
    """
    if slot_count < 1:
        raise InvalidInputError(f"slot_count must be >= 1, got {slot_count}")
    rng = np.random.default_rng(seed)
    l_sel = min(l_sel, l_max)
    indices = rng.choice(l_max, size=l_sel, replace=False)
    amps = rng.standard_normal(l_sel) + 1j * rng.standard_normal(l_sel)
    order = np.argsort(-np.abs(amps) ** 2, kind="stable")
    power = float((np.abs(amps) ** 2).sum())
    snapshot = SortedCir(indices=indices[order], amps=amps[order],
                         total_power=power, retained_power=power)

    cfg = EmulatorConfig(
        sorted_timeline=[snapshot],
        t_int=slot_count * slot_format.slot_duration,
        slot_format=slot_format,
        l_max=l_max,
        noise_power_db=noise_power_db,
        rng_seed=seed,
        history_mode=CARRY,
    )
    state = EmulatorState(cfg)

    n_s = slot_format.samples_per_slot
    pool = [
        rng.standard_normal(n_s) + 1j * rng.standard_normal(n_s)
        for _ in range(min(8, slot_count))
    ]
    latencies = np.empty(slot_count)
    for i in range(slot_count):
        slot = IqSlot(i, pool[i % len(pool)])
        t0 = time.perf_counter()
        convolve_slot(state, cfg, slot)
        latencies[i] = time.perf_counter() - t0

    latencies.sort()
    return BenchStats(
        slot_count=slot_count,
        l_sel=l_sel,
        samples_per_slot=n_s,
        min_s=float(latencies[0]),
        median_s=float(latencies[slot_count // 2]),
        p99_s=float(latencies[min(slot_count - 1, int(np.ceil(0.99 * slot_count)) - 1)]),
        max_s=float(latencies[-1]),
        budget_s=slot_format.slot_duration,
    )
