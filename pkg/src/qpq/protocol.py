"""The private-query protocol: queries, database rotations, honesty test,
and the two-query transaction state machine.

One transaction retrieves a single database bit A_j and consists of a
"plain" query (photon sent straight down mode j, answer read from its
polarization) and a "superposed" query (photon split between mode j and
an ancilla mode that never leaves Alice's lab).  The superposed reply
feeds an interferometric honesty test: an honest database holder always
lands the photon on the D0 ("don't know") detector, while any attempt to
locate the photon risks firing D1 ("cheat").
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

from .core import (
    ATOL_DIAGNOSTIC,
    DensityOperator,
    DomainError,
    ModeRegister,
    Polarization,
    PreconditionError,
    PureState,
    Side,
    State,
    alice_mode,
    apply_beam_splitter,
    apply_half_wave_plate,
    basis_state,
    bob_mode,
)

if TYPE_CHECKING:
    from .adversaries import BobStrategy, InfoRecord


class QueryKind(enum.Enum):
    PLAIN = "plain"
    SUPERPOSED = "superposed"


class Ordering(enum.Enum):
    PLAIN_FIRST = "PlainFirst"
    SUPERPOSED_FIRST = "SuperposedFirst"


class HonestyVerdict(enum.Enum):
    D0_FIRED = "D0Fired"
    D1_FIRED = "D1Fired"
    # Superposed-first test whose random guess turned out wrong; must be
    # discarded.
    NOT_MEANINGFUL = "NotMeaningful"
    # Reserved for transcripts of transactions that never reached the test.
    NOT_PERFORMED = "NotPerformed"


@dataclass(frozen=True)
class DatabaseConfig:
    """Bob's classical database: N bits A_1..A_N, immutable per transaction."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", tuple(self.bits))
        if len(self.bits) < 1:
            raise DomainError("database needs at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise DomainError(f"database bits must be 0 or 1, got {self.bits}")

    @property
    def n(self) -> int:
        return len(self.bits)

    @classmethod
    def random(cls, n: int, rng) -> "DatabaseConfig":
        if n < 1:
            raise DomainError("database needs at least one bit")
        return cls(tuple(1 if rng.random() < 0.5 else 0 for _ in range(n)))


@lru_cache(maxsize=None)
def transaction_register(n: int) -> ModeRegister:
    """Register for an N-bit transaction: Bob modes 1..N, then one Alice
    ancilla per mode (label j pairs with Bob mode j)."""
    if n < 1:
        raise DomainError("database needs at least one mode")
    modes = tuple(bob_mode(j) for j in range(1, n + 1)) + tuple(
        alice_mode(j) for j in range(1, n + 1)
    )
    return ModeRegister(modes)


def prepare_plain_query(register: ModeRegister, j: int) -> PureState:
    """|H> in Bob's mode j: the query that reads out A_j directly."""
    return basis_state(register, bob_mode(j), Polarization.H)


def prepare_superposed_query(register: ModeRegister, j: int) -> PureState:
    """Photon split 50/50 between Bob's mode j and Alice's ancilla.

    Built the way Alice builds it: an H photon shone on a beam splitter,
    one arm routed to Bob, the other kept in her lab.
    """
    photon = basis_state(register, bob_mode(j), Polarization.H)
    return apply_beam_splitter(photon, bob_mode(j), alice_mode(j))


@lru_cache(maxsize=4096)
def _cached_queries(n: int, j: int) -> tuple[PureState, PureState]:
    reg = transaction_register(n)
    return prepare_plain_query(reg, j), prepare_superposed_query(reg, j)


def bob_apply_database(state: State, db: DatabaseConfig) -> State:
    """Bob's honest answer: a half-wave plate in every mode with A_j = 1.

    Alice-side modes are untouched, so a plain query comes back as
    |A_j> in mode j and a superposed query keeps its ancilla arm intact.
    """
    reg = state.register
    if len(reg.bob_modes) != db.n:
        raise DomainError(
            f"register has {len(reg.bob_modes)} Bob-side modes,"
            f" database has {db.n} bits"
        )
    if not any(db.bits):
        return state
    # One pass over the plates (each is its own H/V swap on one mode);
    # the swap index pairs are memoized per bit pattern on the register.
    memo = reg._swap_pairs_memo
    pairs = memo.get(db.bits)
    if pairs is None:
        pairs = [reg.pair_by(Side.BOB, label) for label, bit in enumerate(db.bits, 1) if bit]
        memo[db.bits] = pairs
    if isinstance(state, PureState):
        v = state.amplitudes.copy()
        for i_h, i_v in pairs:
            v[i_h], v[i_v] = v[i_v], v[i_h]
        return PureState._wrap(reg, v)
    m = state.matrix.copy()
    for i_h, i_v in pairs:
        m[[i_h, i_v], :] = m[[i_v, i_h], :]
        m[:, [i_h, i_v]] = m[:, [i_v, i_h]]
    return DensityOperator._wrap(reg, m)


def alice_read_plain(state: State, j: int, rng) -> int:
    """Polarization readout of a plain reply: V means 1, H means 0.

    Same measurement as :func:`qpq.core.measure_polarization` on mode j,
    with the collapsed state dropped since the photon is consumed.

    Raises:
        PreconditionError: if the photon is not sitting in mode j, which
            an honest exchange guarantees; the transaction runner treats
            that as evidence of tampering.
    """
    i_h, i_v = state.register.pair_by(Side.BOB, j)
    if isinstance(state, PureState):
        x = state.amplitudes[i_h]
        y = state.amplitudes[i_v]
        p_h = x.real * x.real + x.imag * x.imag
        p_v = y.real * y.real + y.imag * y.imag
    else:
        p_h = float(state.matrix[i_h, i_h].real)
        p_v = float(state.matrix[i_v, i_v].real)
    if abs(p_h + p_v - 1.0) > ATOL_DIAGNOSTIC:
        raise PreconditionError(
            f"photon occupies mode {j} with probability {p_h + p_v:g}, not 1"
        )
    return 0 if rng.random() < p_h else 1


def honesty_test_probabilities(state: State, j: int, guess: int) -> tuple[float, float]:
    """Detector probabilities (pD0, pD1) of the honesty interferometer.

    The compensating plate undoes Bob's rotation if ``guess`` says A_j = 1,
    then the beam splitter recombines mode j with the ancilla.  D0 is the
    "+" port, D1 the "-" port, both gated on H polarization, which makes
    the whole arrangement a projector onto the expected superposed reply.
    pD0 + pD1 can fall below 1 when the reply's polarization was not
    compensated back to H; the sampling twin folds that leftover mass
    into D1, since any departure from the expected interference is
    evidence of tampering.
    """
    if guess not in (0, 1):
        raise DomainError(f"guess must be 0 or 1, got {guess!r}")
    reg = state.register
    j_h, j_v = reg.pair_by(Side.BOB, j)
    a_h, _ = reg.pair_by(Side.ALICE, j)
    if isinstance(state, PureState):
        # Closed form of the same plate + splitter composition (the density
        # branch below applies the optical elements literally).
        v = state.amplitudes
        x = v[j_v] if guess == 1 else v[j_h]  # H amplitude on j after A_pr
        y = v[a_h]
        plus = (x + y) * 2 ** -0.5
        minus = (x - y) * 2 ** -0.5
        return (
            plus.real * plus.real + plus.imag * plus.imag,
            minus.real * minus.real + minus.imag * minus.imag,
        )
    mode_j, mode_a = bob_mode(j), alice_mode(j)
    work = apply_half_wave_plate(state, mode_j) if guess == 1 else state
    out = apply_beam_splitter(work, mode_j, mode_a)
    m = out.matrix
    return float(m[j_h, j_h].real), float(m[a_h, a_h].real)


def honesty_test(state: State, j: int, guess: int, rng) -> HonestyVerdict:
    """Sample one run of the honesty interferometer.

    Returns D0_FIRED or D1_FIRED; whichever event is not the expected
    D0 click (including the photon surfacing with the wrong polarization
    or in neither port) counts as D1.
    """
    p_d0, _ = honesty_test_probabilities(state, j, guess)
    if rng.random() < p_d0:
        return HonestyVerdict.D0_FIRED
    return HonestyVerdict.D1_FIRED


@dataclass(frozen=True)
class TransactionPolicy:
    """Analysis overrides: pin the ordering and/or the random guess."""

    ordering: Ordering | None = None
    guess: int | None = None

    def __post_init__(self) -> None:
        if self.guess not in (None, 0, 1):
            raise DomainError(f"forced guess must be 0 or 1, got {self.guess!r}")


RANDOM_POLICY = TransactionPolicy()


@dataclass(frozen=True)
class TransactionOutcome:
    """Everything Alice knows after one two-query transaction."""

    retrieved_bit: int
    verdict: HonestyVerdict
    ordering: Ordering
    guess_used: int | None
    bob_info: "InfoRecord"


def run_transaction(
    db: DatabaseConfig,
    j: int,
    strategy: "BobStrategy",
    policy: TransactionPolicy | None,
    rng,
) -> TransactionOutcome:
    """One full transaction against a (possibly cheating) database holder.

    Plain-first: read A_j from the first reply, then honesty-test the
    superposed reply with the known value.  Superposed-first: commit to a
    uniformly random guess before anything comes back, test the first
    reply with it, then read A_j from the plain reply and discard the
    test if the guess was wrong.  Queries go out one at a time; the
    strategy is invoked once per query and sees a single in-flight state.

    Cheat-induced anomalies never raise: a plain reply whose photon went
    missing is recorded as a D1 verdict (retrieved_bit is then a
    placeholder 0 and carries no information).
    """
    adv = _adversaries

    if not 1 <= j <= db.n:
        raise DomainError(f"query index {j} outside database 1..{db.n}")
    if policy is None:
        policy = RANDOM_POLICY
    plain_q, superposed_q = _cached_queries(db.n, j)
    ordering = policy.ordering
    if ordering is None:
        ordering = Ordering.PLAIN_FIRST if rng.random() < 0.5 else Ordering.SUPERPOSED_FIRST
    strat = adv.resolve_pick(strategy, rng)
    apply_strategy = adv.apply_bob_strategy

    if ordering is Ordering.PLAIN_FIRST:
        reply1, info1 = apply_strategy(strat, adv.QueryIndex.FIRST, plain_q, db, rng)
        try:
            bit = alice_read_plain(reply1, j, rng)
            anomaly = False
        except PreconditionError:
            bit, anomaly = 0, True
        reply2, info2 = apply_strategy(strat, adv.QueryIndex.SECOND, superposed_q, db, rng)
        if anomaly:
            verdict = HonestyVerdict.D1_FIRED
        else:
            verdict = honesty_test(reply2, j, bit, rng)
        guess_used = None
    else:
        # Commit to the stand-in guess before Bob's first reply arrives.
        if policy.guess is None:
            guess_used = 1 if rng.random() < 0.5 else 0
        else:
            guess_used = policy.guess
        reply1, info1 = apply_strategy(strat, adv.QueryIndex.FIRST, superposed_q, db, rng)
        tentative = honesty_test(reply1, j, guess_used, rng)
        reply2, info2 = apply_strategy(strat, adv.QueryIndex.SECOND, plain_q, db, rng)
        try:
            bit = alice_read_plain(reply2, j, rng)
            anomaly = False
        except PreconditionError:
            bit, anomaly = 0, True
        if anomaly:
            verdict = HonestyVerdict.D1_FIRED
        elif guess_used != bit:
            verdict = HonestyVerdict.NOT_MEANINGFUL
        else:
            verdict = tentative

    return TransactionOutcome(
        retrieved_bit=bit,
        verdict=verdict,
        ordering=ordering,
        guess_used=guess_used,
        bob_info=info1.merged(info2),
    )


def to_transcript(
    outcome: TransactionOutcome,
    *,
    seed: int,
    j: int,
    strategy: "BobStrategy",
) -> dict:
    """One transaction as a JSON-serializable transcript record."""
    return {
        "seed": seed,
        "j": j,
        "ordering": outcome.ordering.value,
        "guess": outcome.guess_used,
        "retrieved_bit": outcome.retrieved_bit,
        "verdict": outcome.verdict.value,
        "strategy": _adversaries.strategy_label(strategy),
    }


@dataclass(frozen=True)
class SpatialModeEncoding:
    """Database index j rides on which spatial mode carries the photon."""

    n_modes: int


@dataclass(frozen=True)
class TimeSlotEncoding:
    """Database index j rides on the photon's arrival slot in a fiber."""

    n_modes: int
    slot_duration: float

    def __post_init__(self) -> None:
        if self.slot_duration <= 0:
            raise DomainError("slot duration must be positive")


ChannelEncoding = SpatialModeEncoding | TimeSlotEncoding


def encode_channel(encoding: ChannelEncoding, j: int):
    """Channel label of database index j: the mode index itself, or the
    time offset j * slot_duration."""
    if not 1 <= j <= encoding.n_modes:
        raise DomainError(f"index {j} outside 1..{encoding.n_modes}")
    if isinstance(encoding, SpatialModeEncoding):
        return j
    return j * encoding.slot_duration


def decode_channel(encoding: ChannelEncoding, label) -> int:
    """Inverse of :func:`encode_channel`; rejects labels off the grid."""
    if isinstance(encoding, SpatialModeEncoding):
        j = int(label)
        if j != label or not 1 <= j <= encoding.n_modes:
            raise DomainError(f"{label!r} is not a valid spatial channel label")
        return j
    j = round(label / encoding.slot_duration)
    if not 1 <= j <= encoding.n_modes or abs(label - j * encoding.slot_duration) > 1e-9 * encoding.slot_duration:
        raise DomainError(f"{label!r} is not on the slot grid")
    return j


# Imported last to break the protocol <-> adversaries cycle: adversaries
# needs DatabaseConfig and bob_apply_database from above, the transaction
# runner needs the strategy machinery at call time.
from . import adversaries as _adversaries  # noqa: E402
