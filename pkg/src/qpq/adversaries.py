"""Cheating models for both parties.

Bob's strategies act only on what Alice actually sends him, never on the
ancilla she keeps: locating the photon (measure-and-reprepare), or
tapping/delaying the modes, which shows up at the honesty test as a loss
of coherence between his side and hers.  Alice's only cheat is injecting
extra photons to read more than one database entry per transaction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import exp

from .core import (
    DensityOperator,
    DomainError,
    Polarization,
    State,
    basis_state,
    dephase_between,
    measure_mode_occupation,
    to_density,
)
from .protocol import DatabaseConfig, bob_apply_database


class QueryIndex(enum.Enum):
    FIRST = "first"
    SECOND = "second"


class Pick(enum.Enum):
    """Which of the two arriving queries a measure-and-reprepare Bob grabs."""

    FIRST = "first"
    SECOND = "second"
    UNIFORM_RANDOM_ONE = "random"
    BOTH = "both"


@dataclass(frozen=True)
class Honest:
    pass


@dataclass(frozen=True)
class MeasureAndReprepare:
    pick: Pick = Pick.UNIFORM_RANDOM_ONE


@dataclass(frozen=True)
class PartialDephase:
    """Tap cheat abstracted to its effect: residual coherence gamma between
    Bob-side and Alice-side paths (1 = no tap, 0 = full collapse)."""

    gamma: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma!r}")


@dataclass(frozen=True)
class DelayTap:
    """Time delay tau in a photon of coherence time sigma_c; equivalent to
    PartialDephase(delay_to_gamma(tau, sigma_c))."""

    tau: float
    sigma_c: float

    def __post_init__(self) -> None:
        if self.sigma_c <= 0:
            raise DomainError("coherence time must be positive")
        if self.tau < 0:
            raise DomainError("delay must be non-negative")


BobStrategy = Honest | MeasureAndReprepare | PartialDephase | DelayTap


@dataclass(frozen=True)
class QueryInfo:
    """What Bob learned (or destroyed) answering one query."""

    query: str
    learned_mode: int | None = None
    collapsed: bool = False
    gamma_applied: float = 1.0

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "learned_mode": self.learned_mode,
            "collapsed": self.collapsed,
            "gamma_applied": self.gamma_applied,
        }


@dataclass(frozen=True)
class InfoRecord:
    """Bob's information take for a transaction; empty when he was honest."""

    entries: tuple[QueryInfo, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.entries)

    def merged(self, other: "InfoRecord") -> "InfoRecord":
        return InfoRecord(self.entries + other.entries)

    def to_list(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]


EMPTY_INFO = InfoRecord()


def delay_to_gamma(tau: float, sigma_c: float) -> float:
    """Residual coherence after delaying one arm by tau.

    Gaussian in the delay, gamma = exp(-tau^2 / (2 sigma_c^2)): unity at
    zero delay, and effectively zero once the delay exceeds the photon's
    coherence time severalfold, at which point the tap is as destructive
    as measure-and-reprepare.
    """
    if sigma_c <= 0:
        raise DomainError("coherence time must be positive")
    if tau < 0:
        raise DomainError("delay must be non-negative")
    x = tau / sigma_c
    return exp(-0.5 * x * x)


def resolve_pick(strategy: BobStrategy, rng) -> BobStrategy:
    """Fix a UNIFORM_RANDOM_ONE pick to FIRST or SECOND for one transaction.

    Measure-and-reprepare on "a random one of the two queries" is a
    per-transaction commitment, so the runner resolves it once, before
    any query goes out.  All other strategies pass through unchanged.
    """
    if isinstance(strategy, MeasureAndReprepare) and strategy.pick is Pick.UNIFORM_RANDOM_ONE:
        pick = Pick.FIRST if rng.random() < 0.5 else Pick.SECOND
        return MeasureAndReprepare(pick)
    return strategy


def apply_bob_strategy(
    strategy: BobStrategy,
    query_index: QueryIndex,
    state: State,
    db: DatabaseConfig,
    rng,
) -> tuple[State, InfoRecord]:
    """Bob's answer to one incoming query under a given strategy.

    Everything here touches only Bob-side modes: honest answering is the
    database rotation; measure-and-reprepare first looks for the photon
    among his modes (collapsing the superposed query half the time) and
    recreates a fresh H photon where he found it before answering
    honestly; the tap strategies answer honestly and then bleed the
    Bob/Alice coherence down by gamma.  Accepts a pure state or a density
    operator; dephasing always returns a density operator.
    """
    if isinstance(strategy, Honest):
        return bob_apply_database(state, db), EMPTY_INFO

    if isinstance(strategy, MeasureAndReprepare):
        pick = strategy.pick
        if pick is Pick.UNIFORM_RANDOM_ONE:
            raise DomainError(
                "unresolved random pick: call resolve_pick once per transaction"
            )
        tamper = pick is Pick.BOTH or pick.value == query_index.value
        if not tamper:
            return bob_apply_database(state, db), EMPTY_INFO
        reg = state.register
        found, post = measure_mode_occupation(state, reg.bob_modes, rng)
        if found is None:
            # Photon was never his to find; the superposition has collapsed
            # onto Alice's ancilla and he forwards what is left.
            info = QueryInfo(query_index.value, collapsed=True)
            return post, InfoRecord((info,))
        fresh = basis_state(reg, found, Polarization.H)
        info = QueryInfo(query_index.value, learned_mode=found.label)
        return bob_apply_database(fresh, db), InfoRecord((info,))

    if isinstance(strategy, PartialDephase):
        gamma = strategy.gamma
    elif isinstance(strategy, DelayTap):
        gamma = delay_to_gamma(strategy.tau, strategy.sigma_c)
    else:
        raise DomainError(f"unknown strategy {strategy!r}")

    rotated = to_density(bob_apply_database(state, db))
    reg = rotated.register
    out = dephase_between(rotated, reg.bob_modes, reg.alice_modes, gamma)
    return out, InfoRecord((QueryInfo(query_index.value, gamma_applied=gamma),))


class Placement(enum.Enum):
    TARGET_ONLY = "target-only"
    UNIFORM_RANDOM_MODES = "uniform"
    # Alice gambles that a contiguous block of modes ends up in one part;
    # under random partitions this buys her nothing.
    ALL_SAME_PART_ATTEMPT = "same-part-attempt"


@dataclass(frozen=True)
class AliceCheat:
    """t photons per transmitted signal; t = 1 on the target is honest."""

    t: int
    placement: Placement = Placement.TARGET_ONLY

    def __post_init__(self) -> None:
        if self.t < 1:
            raise DomainError("photon count must be at least 1")


def place_cheat_photons(cheat: AliceCheat, target_j: int, n_modes: int, rng) -> list[int]:
    """Mode labels Alice's t photons occupy; the target is always first.

    UNIFORM_RANDOM_MODES draws the t - 1 extras uniformly without
    replacement from the remaining modes.
    """
    if not 1 <= target_j <= n_modes:
        raise DomainError(f"target {target_j} outside 1..{n_modes}")
    if cheat.t > n_modes:
        raise DomainError(f"cannot place {cheat.t} photons in {n_modes} modes")
    if cheat.placement is Placement.TARGET_ONLY:
        if cheat.t != 1:
            raise DomainError("target-only placement holds exactly one photon")
        return [target_j]
    if cheat.placement is Placement.ALL_SAME_PART_ATTEMPT:
        return [(target_j - 1 + k) % n_modes + 1 for k in range(cheat.t)]
    others = [label for label in range(1, n_modes + 1) if label != target_j]
    # Partial Fisher-Yates using only rng.random()
    for k in range(cheat.t - 1):
        swap = k + int(rng.random() * (len(others) - k))
        others[k], others[swap] = others[swap], others[k]
    return [target_j] + others[: cheat.t - 1]


def parse_strategy(text: str) -> BobStrategy:
    """Parse a strategy descriptor: ``honest``, ``mr:random``,
    ``dephase:0.4``, ``delay:1.5,1.0``."""
    name, _, arg = text.strip().partition(":")
    try:
        if name == "honest":
            if arg:
                raise ValueError("takes no argument")
            return Honest()
        if name == "mr":
            return MeasureAndReprepare(Pick(arg) if arg else Pick.UNIFORM_RANDOM_ONE)
        if name == "dephase":
            return PartialDephase(float(arg))
        if name == "delay":
            tau, sigma = arg.split(",")
            return DelayTap(float(tau), float(sigma))
    except (ValueError, DomainError) as err:
        raise DomainError(f"bad strategy descriptor {text!r}: {err}") from err
    raise DomainError(f"unknown strategy {name!r}")


def strategy_label(strategy: BobStrategy) -> str:
    """Descriptor string for a strategy; inverse of :func:`parse_strategy`."""
    if isinstance(strategy, Honest):
        return "honest"
    if isinstance(strategy, MeasureAndReprepare):
        return f"mr:{strategy.pick.value}"
    if isinstance(strategy, PartialDephase):
        return f"dephase:{strategy.gamma!r}"
    if isinstance(strategy, DelayTap):
        return f"delay:{strategy.tau!r},{strategy.sigma_c!r}"
    raise DomainError(f"unknown strategy {strategy!r}")
