"""Exact simulator for one photon spread over a set of polarized optical modes.

The Hilbert space is the single-photon sector: one basis label per
(mode, polarization) pair, so a register of M modes lives in dimension 2M.
A mode holding no photon simply carries zero amplitude on its two labels;
the vacuum is never an explicit basis state.  States are immutable; every
operation returns a new value, so states can be shared freely across
parallel workers.

Randomness enters only through an explicitly passed random source, which
can be any object with a ``random() -> float in [0, 1)`` method
(``random.Random``, ``numpy.random.Generator``, or the light-weight
per-trial source in :mod:`qpq.seeding`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from math import sqrt

import numpy as np

_INV_SQRT2 = 1.0 / sqrt(2.0)

# Tolerances: 1e-12 for algebraic identities, 1e-10 after long operation
# chains, 1e-9 for diagnostic preconditions on user-supplied states.
ATOL_ALGEBRA = 1e-12
ATOL_CHAIN = 1e-10
ATOL_DIAGNOSTIC = 1e-9


class DomainError(ValueError):
    """An argument lies outside an operation's domain."""


class PreconditionError(RuntimeError):
    """A state fails a diagnostic precondition; usually protocol misuse."""


class Side(enum.Enum):
    ALICE = "alice"
    BOB = "bob"


class Polarization(enum.Enum):
    H = 0
    V = 1

    def flipped(self) -> "Polarization":
        return Polarization.V if self is Polarization.H else Polarization.H


@dataclass(frozen=True, slots=True)
class ModeId:
    """A labeled optical mode, tagged by which lab it belongs to.

    Bob-side labels are database indices 1..N; Alice-side labels identify
    ancilla modes that never leave her lab.
    """

    label: int
    side: Side


def bob_mode(label: int) -> ModeId:
    return ModeId(label, Side.BOB)


def alice_mode(label: int) -> ModeId:
    return ModeId(label, Side.ALICE)


@dataclass(frozen=True)
class ModeRegister:
    """Ordered set of modes fixing the basis of a state.

    Basis ordering is mode-major, polarization-minor with H before V, and
    never changes for the lifetime of the register.
    """

    modes: tuple[ModeId, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", tuple(self.modes))
        if len(set(self.modes)) != len(self.modes):
            raise DomainError("register contains duplicate modes")

    @property
    def dim(self) -> int:
        return 2 * len(self.modes)

    @cached_property
    def _positions(self) -> dict[ModeId, int]:
        return {mode: 2 * k for k, mode in enumerate(self.modes)}

    @cached_property
    def _positions_by_key(self) -> dict[tuple[Side, int], int]:
        return {(m.side, m.label): 2 * k for k, m in enumerate(self.modes)}

    def __contains__(self, mode: ModeId) -> bool:
        return mode in self._positions

    def index(self, mode: ModeId, pol: Polarization) -> int:
        """Basis index of (mode, pol)."""
        return self.pair(mode)[pol.value]

    def pair(self, mode: ModeId) -> tuple[int, int]:
        """Basis indices (H, V) of a mode."""
        base = self._positions.get(mode)
        if base is None:
            raise DomainError(f"mode {mode} is not in the register")
        return base, base + 1

    def pair_by(self, side: Side, label: int) -> tuple[int, int]:
        """Basis indices (H, V) by (side, label), avoiding a ModeId alloc."""
        base = self._positions_by_key.get((side, label))
        if base is None:
            raise DomainError(f"mode {side.value}:{label} is not in the register")
        return base, base + 1

    def side_modes(self, side: Side) -> tuple[ModeId, ...]:
        return tuple(m for m in self.modes if m.side is side)

    @cached_property
    def _swap_pairs_memo(self) -> dict:
        # bit-pattern -> H/V swap pairs, filled lazily by bob_apply_database
        return {}

    @cached_property
    def bob_modes(self) -> tuple[ModeId, ...]:
        return self.side_modes(Side.BOB)

    @cached_property
    def alice_modes(self) -> tuple[ModeId, ...]:
        return self.side_modes(Side.ALICE)


@dataclass(frozen=True, slots=True)
class PureState:
    """Single-photon pure state: a normalized complex amplitude vector.

    Invariant: squared norm 1 (checked to 1e-9 at construction; operations
    preserve it to better than 1e-12 per step).
    """

    register: ModeRegister
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.register.dim,):
            raise DomainError(
                f"amplitude vector has shape {amps.shape}, register needs"
                f" ({self.register.dim},)"
            )
        n2 = float(np.vdot(amps, amps).real)
        if abs(n2 - 1.0) > ATOL_DIAGNOSTIC:
            raise DomainError(f"state is not normalized: |amps|^2 = {n2!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def _wrap(cls, register: ModeRegister, amplitudes: np.ndarray) -> "PureState":
        # Internal constructor for operation outputs, which are normalized
        # complex128 vectors by construction; skips the validation pass.
        obj = object.__new__(cls)
        object.__setattr__(obj, "register", register)
        object.__setattr__(obj, "amplitudes", amplitudes)
        return obj

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True, slots=True)
class DensityOperator:
    """Mixed state over the same single-photon basis.

    Must be Hermitian, unit trace, and positive semidefinite; operations
    preserve these by construction and :meth:`validate` checks them
    explicitly (kept out of ``__init__`` because it needs an eigensolve).
    """

    register: ModeRegister
    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=np.complex128)
        d = self.register.dim
        if mat.shape != (d, d):
            raise DomainError(
                f"matrix has shape {mat.shape}, register needs ({d}, {d})"
            )
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def _wrap(cls, register: ModeRegister, matrix: np.ndarray) -> "DensityOperator":
        obj = object.__new__(cls)
        object.__setattr__(obj, "register", register)
        object.__setattr__(obj, "matrix", matrix)
        return obj

    def trace(self) -> float:
        return float(self.matrix.trace().real)

    def validate(
        self,
        atol_hermitian: float = ATOL_ALGEBRA,
        atol_trace: float = ATOL_ALGEBRA,
        min_eigenvalue: float = -1e-10,
    ) -> "DensityOperator":
        """Check Hermiticity, unit trace and positivity; return self.

        Raises:
            DomainError: if any invariant fails at the given tolerance.
        """
        m = self.matrix
        herm = float(np.abs(m - m.conj().T).max())
        if herm > atol_hermitian:
            raise DomainError(f"not Hermitian: max |m - m^dag| = {herm:g}")
        tr = complex(m.trace())
        if abs(tr - 1.0) > atol_trace:
            raise DomainError(f"trace is {tr}, not 1")
        lo = float(np.linalg.eigvalsh(m).min())
        if lo < min_eigenvalue:
            raise DomainError(f"not positive semidefinite: min eigenvalue {lo:g}")
        return self


State = PureState | DensityOperator


def basis_state(register: ModeRegister, mode: ModeId, pol: Polarization) -> PureState:
    """The photon definitely in ``mode`` with polarization ``pol``."""
    amps = np.zeros(register.dim, dtype=np.complex128)
    amps[register.index(mode, pol)] = 1.0
    return PureState(register, amps)


def to_density(state: State) -> DensityOperator:
    """Rank-one projector of a pure state; identity on density operators."""
    if isinstance(state, DensityOperator):
        return state
    v = state.amplitudes
    return DensityOperator._wrap(state.register, np.outer(v, v.conj()))


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.register != b.register:
        raise DomainError("states live on different registers")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def apply_half_wave_plate(state: State, mode: ModeId) -> State:
    """Swap H and V amplitudes on one mode; all other modes untouched.

    Unitary and involutive: applying twice is the identity.
    """
    i_h, i_v = state.register.pair(mode)
    if isinstance(state, PureState):
        v = state.amplitudes.copy()
        v[i_h], v[i_v] = v[i_v], v[i_h]
        return PureState._wrap(state.register, v)
    m = state.matrix.copy()
    m[[i_h, i_v], :] = m[[i_v, i_h], :]
    m[:, [i_h, i_v]] = m[:, [i_v, i_h]]
    return DensityOperator._wrap(state.register, m)


def apply_beam_splitter(state: State, a: ModeId, b: ModeId) -> State:
    """50/50 beam splitter mixing modes ``a`` and ``b``.

    Polarization independent; per polarization the amplitudes map as
    (x_a, x_b) -> ((x_a + x_b)/sqrt2, (x_a - x_b)/sqrt2).  This real
    Hadamard convention is involutive, which also makes it serve as the
    recombining element of an interferometer.
    """
    if a == b:
        raise DomainError("beam splitter needs two distinct modes")
    reg = state.register
    a_h, a_v = reg.pair(a)
    b_h, b_v = reg.pair(b)
    if isinstance(state, PureState):
        v = state.amplitudes.copy()
        for i_a, i_b in ((a_h, b_h), (a_v, b_v)):
            x, y = v[i_a], v[i_b]
            v[i_a] = (x + y) * _INV_SQRT2
            v[i_b] = (x - y) * _INV_SQRT2
        return PureState._wrap(reg, v)
    m = state.matrix.copy()
    for i_a, i_b in ((a_h, b_h), (a_v, b_v)):
        ra = m[i_a, :].copy()
        rb = m[i_b, :]
        m[i_a, :] = (ra + rb) * _INV_SQRT2
        m[i_b, :] = (ra - rb) * _INV_SQRT2
    for i_a, i_b in ((a_h, b_h), (a_v, b_v)):
        ca = m[:, i_a].copy()
        cb = m[:, i_b]
        m[:, i_a] = (ca + cb) * _INV_SQRT2
        m[:, i_b] = (ca - cb) * _INV_SQRT2
    return DensityOperator._wrap(reg, m)


def _group_indices(register: ModeRegister, modes) -> np.ndarray:
    idx = []
    for mode in modes:
        idx.extend(register.pair(mode))
    return np.asarray(idx, dtype=np.intp)


def dephase_between(
    rho: DensityOperator,
    group_a,
    group_b,
    gamma: float,
) -> DensityOperator:
    """Scale coherences between two groups of modes by ``gamma``.

    Matrix elements with one index in ``group_a`` and the other in
    ``group_b`` are multiplied by gamma; everything else, the diagonal in
    particular, is untouched.  Trace preserving and completely positive
    for gamma in [0, 1]; gamma = 1 is the identity map and gamma = 0
    erases all which-side coherence.
    """
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma!r}")
    set_a, set_b = set(group_a), set(group_b)
    if set_a & set_b:
        raise DomainError("dephasing groups must be disjoint")
    idx_a = _group_indices(rho.register, set_a)
    idx_b = _group_indices(rho.register, set_b)
    m = rho.matrix.copy()
    if idx_a.size and idx_b.size:
        m[np.ix_(idx_a, idx_b)] *= gamma
        m[np.ix_(idx_b, idx_a)] *= gamma
    return DensityOperator._wrap(rho.register, m)


def mode_occupation_probability(state: State, mode: ModeId) -> float:
    """Probability of finding the photon in ``mode`` (either polarization)."""
    i_h, i_v = state.register.pair(mode)
    if isinstance(state, PureState):
        v = state.amplitudes
        x, y = v[i_h], v[i_v]
        return x.real * x.real + x.imag * x.imag + y.real * y.real + y.imag * y.imag
    m = state.matrix
    return float(m[i_h, i_h].real + m[i_v, i_v].real)


def measure_mode_occupation(
    state: State,
    modes,
    rng,
) -> tuple[ModeId | None, State]:
    """Projective which-mode measurement over a subset of modes.

    Asks "is the photon in one of these modes, and if so which one":
    outcomes are the measured modes plus the aggregate "absent" outcome
    (photon somewhere outside the measured set), returned as ``None``.
    The outcome is sampled with Born probabilities from ``rng`` and the
    matching renormalized projection is returned alongside it.  Modes are
    scanned in register order so a fixed seed fixes the outcome sequence.
    Accepts a pure state as the rank-one special case (projections of
    pure states stay pure).
    """
    reg = state.register
    if modes is reg.bob_modes or modes is reg.alice_modes:
        ordered = list(modes)  # already in register order
    else:
        wanted = set(modes)
        ordered = [m for m in reg.modes if m in wanted]
        if len(ordered) != len(wanted):
            raise DomainError("measured modes must all belong to the register")
    if not ordered:
        return None, state

    probs = [mode_occupation_probability(state, m) for m in ordered]
    u = rng.random()
    cum = 0.0
    found: ModeId | None = None
    for mode, p in zip(ordered, probs):
        cum += p
        if u < cum:
            found = mode
            break

    if isinstance(state, PureState):
        v = state.amplitudes
        w = np.zeros_like(v)
        if found is None:
            w[:] = v
            for m in ordered:
                i_h, i_v = reg.pair(m)
                w[i_h] = 0.0
                w[i_v] = 0.0
        else:
            i_h, i_v = reg.pair(found)
            w[i_h] = v[i_h]
            w[i_v] = v[i_v]
        n2 = float(np.vdot(w, w).real)
        return found, PureState._wrap(reg, w / sqrt(n2))

    keep = np.zeros(reg.dim, dtype=bool)
    if found is None:
        keep[:] = True
        for m in ordered:
            i_h, i_v = reg.pair(m)
            keep[i_h] = keep[i_v] = False
    else:
        i_h, i_v = reg.pair(found)
        keep[i_h] = keep[i_v] = True
    m_out = np.where(keep[:, None] & keep[None, :], state.matrix, 0.0)
    p_branch = float(m_out.trace().real)
    return found, DensityOperator._wrap(reg, m_out / p_branch)


def measure_polarization(state: State, mode: ModeId, rng) -> tuple[Polarization, State]:
    """H/V polarization readout of a photon known to sit in ``mode``.

    Raises:
        PreconditionError: if the photon is not in the mode with
            probability 1 (to 1e-9); the analyzer would see no photon,
            which signals protocol misuse rather than a random outcome.
    """
    reg = state.register
    i_h, i_v = reg.pair(mode)
    occ = mode_occupation_probability(state, mode)
    if abs(occ - 1.0) > ATOL_DIAGNOSTIC:
        raise PreconditionError(
            f"photon occupies mode {mode} with probability {occ:g}, not 1"
        )
    if isinstance(state, PureState):
        x = state.amplitudes[i_h]
        p_h = x.real * x.real + x.imag * x.imag
    else:
        p_h = float(state.matrix[i_h, i_h].real)
    outcome = Polarization.H if rng.random() < p_h else Polarization.V
    i_kept = i_h if outcome is Polarization.H else i_v
    if isinstance(state, PureState):
        w = np.zeros_like(state.amplitudes)
        amp = state.amplitudes[i_kept]
        w[i_kept] = amp / abs(amp)
        return outcome, PureState._wrap(reg, w)
    m_out = np.zeros_like(state.matrix)
    m_out[i_kept, i_kept] = 1.0
    return outcome, DensityOperator._wrap(reg, m_out)


def projector_probability(rho: State, target: PureState) -> float:
    """<target| rho |target>: exact overlap oracle, no optics involved."""
    if rho.register != target.register:
        raise DomainError("state and target live on different registers")
    t = target.amplitudes
    if isinstance(rho, PureState):
        amp = complex(np.vdot(t, rho.amplitudes))
        return amp.real * amp.real + amp.imag * amp.imag
    return float(np.real(np.vdot(t, rho.matrix @ t)))
