"""Cheap deterministic random sources for large Monte Carlo trial loops.

``random.Random`` and ``numpy.random.default_rng`` both cost ~15 us to
construct, which dominates a trial loop that derives a fresh source per
trial.  ``TrialRandom`` is a splitmix64 stream: construction is a couple
of integer ops, and each draw is a 64-bit mix, so per-trial sources stay
cheap while remaining independent of execution order.  Anything in this
package that needs randomness only calls ``.random()``, so stdlib and
numpy generators remain drop-in replacements.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    """splitmix64 finalizer: full-avalanche 64-bit mix."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class TrialRandom:
    """splitmix64 generator exposing ``random() -> float in [0, 1)``."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def random(self) -> float:
        self._state = (self._state + _GOLDEN) & _MASK64
        # 53 random bits scaled into [0, 1), matching random.Random.random
        return (_mix(self._state) >> 11) * 1.1102230246251565e-16


def trial_rng(master_seed: int, index: int) -> TrialRandom:
    """Independent random source for trial ``index`` of a seeded run.

    Results depend only on (master_seed, index), never on which worker
    runs the trial or in what order.
    """
    return TrialRandom(_mix((master_seed * _GOLDEN + index) & _MASK64))
