"""Privacy analysis: Monte Carlo harnesses, exact enumeration oracles, and
the delay/decoherence sweep.

User privacy is quantified by the probability that a cheating database
holder fires the D1 detector; data privacy by the probability that a
multi-photon user is exposed by the partition game.  Every Monte Carlo
estimator has an exact counterpart computed independently of the
simulator, so the sampled and analytic routes check each other.
"""

from __future__ import annotations

import csv
import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

from .adversaries import (
    AliceCheat,
    BobStrategy,
    DelayTap,
    Honest,
    MeasureAndReprepare,
    PartialDephase,
    Pick,
    Placement,
    delay_to_gamma,
    place_cheat_photons,
)
from .core import DomainError, dephase_between, to_density
from .protocol import (
    DatabaseConfig,
    HonestyVerdict,
    Ordering,
    TransactionPolicy,
    bob_apply_database,
    honesty_test_probabilities,
    prepare_superposed_query,
    run_transaction,
    transaction_register,
)
from .seeding import trial_rng


@dataclass(frozen=True)
class CatchEstimate:
    """Monte Carlo catch probability with its binomial standard error and,
    when available, the exact value from the matching oracle."""

    p_hat: float
    stderr: float
    trials: int
    exact: Fraction | None = None

    @classmethod
    def from_counts(cls, caught: int, trials: int, exact: Fraction | None = None):
        p = caught / trials
        return cls(p, sqrt(p * (1.0 - p) / trials), trials, exact)

    def within_sigmas(self, sigmas: float = 3.0) -> bool:
        """Does the estimate cover the exact value at the given width?"""
        if self.exact is None:
            raise DomainError("no exact value attached")
        return abs(self.p_hat - float(self.exact)) <= sigmas * max(self.stderr, 1e-300)


def estimate_user_privacy_catch(
    db: DatabaseConfig,
    j: int,
    strategy: BobStrategy,
    policy: TransactionPolicy | None,
    trials: int,
    seed: int,
    threads: int = 1,
) -> CatchEstimate:
    """Frequency of D1 verdicts over repeated independent transactions.

    Trial ``i`` draws its randomness from (seed, i) only, so the result is
    byte-identical for any ``threads`` value and any scheduling order.
    """
    if trials < 1:
        raise DomainError("need at least one trial")

    def count_d1(lo: int, hi: int) -> int:
        caught = 0
        for i in range(lo, hi):
            out = run_transaction(db, j, strategy, policy, trial_rng(seed, i))
            if out.verdict is HonestyVerdict.D1_FIRED:
                caught += 1
        return caught

    if threads <= 1:
        caught = count_d1(0, trials)
    else:
        step = -(-trials // threads)
        spans = [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            caught = sum(pool.map(lambda s: count_d1(*s), spans))

    try:
        exact = analytic_catch_oracle(strategy, policy, db=db, j=j)
    except DomainError:
        exact = None
    return CatchEstimate.from_counts(caught, trials, exact)


def analytic_catch_oracle(
    strategy: BobStrategy,
    policy: TransactionPolicy | None = None,
    *,
    db: DatabaseConfig | None = None,
    j: int | None = None,
) -> Fraction:
    """Exact catch probability by enumerating the transaction branch tree.

    Sums the D1 mass over ordering choice, Bob's pick, the found/absent
    collapse of a measured superposed query, guess correctness, and the
    detector probabilities, all as exact rationals.  Deliberately written
    against the protocol's arithmetic, not the simulator, so the two
    routes stay independent.  ``db``/``j`` are only consulted when the
    policy forces a guess (whether the forced guess matches A_j decides
    if the superposed-first test is ever meaningful).
    """
    if policy is None:
        policy = TransactionPolicy()
    half = Fraction(1, 2)

    if policy.ordering is None:
        orderings = [(Ordering.PLAIN_FIRST, half), (Ordering.SUPERPOSED_FIRST, half)]
    else:
        orderings = [(policy.ordering, Fraction(1))]

    # P(the superposed-first guess matches A_j); every implemented strategy
    # leaves the plain readout correct, so matching the retrieved bit is
    # matching A_j.
    if policy.guess is None:
        p_match = half
    else:
        if db is None or j is None:
            raise DomainError("a forced guess needs db and j to settle meaningfulness")
        p_match = Fraction(1 if policy.guess == db.bits[j - 1] else 0)

    if isinstance(strategy, (PartialDephase, DelayTap)):
        gamma = (
            Fraction(strategy.gamma)
            if isinstance(strategy, PartialDephase)
            else Fraction(delay_to_gamma(strategy.tau, strategy.sigma_c))
        )
        p_fire = (1 - gamma) / 2  # D1 Born probability on the dephased reply
    elif isinstance(strategy, Honest):
        p_fire = Fraction(0)
    elif isinstance(strategy, MeasureAndReprepare):
        p_fire = None  # depends on whether the superposed query was grabbed
    else:
        raise DomainError(f"no oracle for strategy {strategy!r}")

    total = Fraction(0)
    for ordering, w_order in orderings:
        superposed_at = Pick.SECOND if ordering is Ordering.PLAIN_FIRST else Pick.FIRST
        p_meaningful = Fraction(1) if ordering is Ordering.PLAIN_FIRST else p_match

        if not isinstance(strategy, MeasureAndReprepare):
            total += w_order * p_meaningful * p_fire
            continue

        if strategy.pick is Pick.UNIFORM_RANDOM_ONE:
            picks = [(Pick.FIRST, half), (Pick.SECOND, half)]
        else:
            picks = [(strategy.pick, Fraction(1))]
        for pick, w_pick in picks:
            if pick is not Pick.BOTH and pick is not superposed_at:
                continue  # only the plain query was grabbed: test unaffected
            # Superposed query measured: found (photon recreated in mode j)
            # or absent (collapsed onto the ancilla); either reply puts the
            # photon in a single arm, so D1 fires with probability 1/2.
            p_fire_mr = half * half + half * half
            total += w_order * w_pick * p_meaningful * p_fire_mr
    return total


def data_privacy_formula(x_parts: int, t: int) -> float:
    """Catch probability of the partition game: 1 - (1/X)^(t-1)."""
    return float(exact_data_privacy(x_parts, t))


def exact_data_privacy(x_parts: int, t: int) -> Fraction:
    if x_parts < 2:
        raise DomainError("need at least two parts")
    if t < 1:
        raise DomainError("photon count must be at least 1")
    return 1 - Fraction(1, x_parts) ** (t - 1)


@dataclass(frozen=True)
class PartitionGameConfig:
    """One data-privacy experiment: Bob splits N entries into X equal
    parts, Alice attacks with t photons."""

    n: int
    x_parts: int
    t: int
    trials: int
    seed: int
    target_j: int = 1
    placement: Placement = Placement.UNIFORM_RANDOM_MODES
    # True samples an explicit random equal partition of the N modes
    # (finite-N effects included); False uses the large-N model where each
    # photon's part is independent and uniform, for which the closed
    # formula is exact.
    finite_n: bool = False

    def __post_init__(self) -> None:
        if self.n < 1 or self.trials < 1:
            raise DomainError("n and trials must be positive")
        if self.x_parts < 2 or self.n % self.x_parts != 0:
            raise DomainError("X must be at least 2 and divide N")
        if not 1 <= self.t <= self.n:
            raise DomainError("need 1 <= t <= N photons")
        if not 1 <= self.target_j <= self.n:
            raise DomainError("target outside database")


def simulate_data_privacy_game(config: PartitionGameConfig) -> CatchEstimate:
    """Monte Carlo of the partition game.

    Per trial: Alice places her t photons, every photon lands in one of
    the X parts, she reveals the part holding her target, and Bob
    photodetects the other X - 1 parts; any photon he finds there exposes
    her.  The exact value is attached in the large-N model only.
    """
    cheat = AliceCheat(
        config.t,
        config.placement if config.t > 1 else Placement.TARGET_ONLY,
    )
    per_part = config.n // config.x_parts
    caught = 0
    for i in range(config.trials):
        rng = trial_rng(config.seed, i)
        modes = place_cheat_photons(cheat, config.target_j, config.n, rng)
        if config.finite_n:
            labels = list(range(1, config.n + 1))
            for k in range(config.n - 1):  # Fisher-Yates shuffle
                swap = k + int(rng.random() * (config.n - k))
                labels[k], labels[swap] = labels[swap], labels[k]
            part_of = {label: pos // per_part for pos, label in enumerate(labels)}
            parts = [part_of[m] for m in modes]
        else:
            parts = [int(rng.random() * config.x_parts) for _ in modes]
        revealed = parts[0]  # the part holding her genuine target
        if any(p != revealed for p in parts[1:]):
            caught += 1
    exact = None if config.finite_n else exact_data_privacy(config.x_parts, config.t)
    return CatchEstimate.from_counts(caught, config.trials, exact)


class CheckResult(enum.Enum):
    ACCEPT = "Accept"
    REJECT = "Reject"


def ideal_photon_number_check(occupied_modes) -> CheckResult:
    """Idealized joint measurement separating the 0/1-photon subspace from
    the rest: accept at most one occupied mode."""
    return CheckResult.ACCEPT if len(list(occupied_modes)) <= 1 else CheckResult.REJECT


@dataclass(frozen=True)
class SweepRow:
    tau: float
    gamma: float
    p_d0: float
    p_d1: float


def delay_sweep(taus, sigma_c: float, db: DatabaseConfig, j: int) -> list[SweepRow]:
    """Honesty-test detector probabilities versus tap delay.

    Each delay maps to a residual coherence gamma and the honest reply is
    dephased accordingly before the test (with the correct guess), so the
    D0 curve traces (1 + gamma)/2 from 1 down to 1/2.
    """
    taus = list(taus)
    if any(b < a for a, b in zip(taus, taus[1:])):
        raise DomainError("delays must be sorted ascending")
    if not 1 <= j <= db.n:
        raise DomainError(f"query index {j} outside database 1..{db.n}")
    reg = transaction_register(db.n)
    reply = to_density(bob_apply_database(prepare_superposed_query(reg, j), db))
    rows = []
    for tau in taus:
        gamma = delay_to_gamma(tau, sigma_c)
        rho = dephase_between(reply, reg.bob_modes, reg.alice_modes, gamma)
        p_d0, p_d1 = honesty_test_probabilities(rho, j, db.bits[j - 1])
        rows.append(SweepRow(tau, gamma, p_d0, p_d1))
    return rows


def config_preamble(config: dict) -> str:
    """Comment line embedding the fully resolved run configuration."""
    return "# config: " + json.dumps(config, sort_keys=True)


def write_estimates_csv(path, rows, config: dict) -> None:
    """CSV of catch estimates: scenario, exact, p_hat, stderr, trials, seed.

    ``rows`` yields (scenario, CatchEstimate, seed) triples.  The resolved
    config rides along as a leading comment so the artifact reproduces
    itself.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(config_preamble(config) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scenario", "exact", "p_hat", "stderr", "trials", "seed"])
        for scenario, est, seed in rows:
            exact = "" if est.exact is None else str(est.exact)
            writer.writerow([scenario, exact, repr(est.p_hat), repr(est.stderr), est.trials, seed])


def write_sweep_csv(path, rows, config: dict) -> None:
    """CSV of delay-sweep rows: tau, gamma, pD0, pD1."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(config_preamble(config) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tau", "gamma", "pD0", "pD1"])
        for row in rows:
            writer.writerow([repr(row.tau), repr(row.gamma), repr(row.p_d0), repr(row.p_d1)])


__all__ = [
    "CatchEstimate",
    "CheckResult",
    "PartitionGameConfig",
    "SweepRow",
    "analytic_catch_oracle",
    "data_privacy_formula",
    "delay_sweep",
    "estimate_user_privacy_catch",
    "exact_data_privacy",
    "ideal_photon_number_check",
    "simulate_data_privacy_game",
    "write_estimates_csv",
    "write_sweep_csv",
    "config_preamble",
]
