"""Linear-optics quantum private query: exact simulator, adversary models,
and privacy analysis."""

from .adversaries import (
    AliceCheat,
    BobStrategy,
    DelayTap,
    Honest,
    InfoRecord,
    MeasureAndReprepare,
    PartialDephase,
    Pick,
    Placement,
    QueryIndex,
    apply_bob_strategy,
    delay_to_gamma,
    parse_strategy,
    place_cheat_photons,
    resolve_pick,
    strategy_label,
)
from .analysis import (
    CatchEstimate,
    CheckResult,
    PartitionGameConfig,
    SweepRow,
    analytic_catch_oracle,
    data_privacy_formula,
    delay_sweep,
    estimate_user_privacy_catch,
    ideal_photon_number_check,
    simulate_data_privacy_game,
)
from .core import (
    DensityOperator,
    DomainError,
    ModeId,
    ModeRegister,
    Polarization,
    PreconditionError,
    PureState,
    Side,
    alice_mode,
    apply_beam_splitter,
    apply_half_wave_plate,
    basis_state,
    bob_mode,
    dephase_between,
    inner_product,
    measure_mode_occupation,
    measure_polarization,
    projector_probability,
    to_density,
)
from .protocol import (
    ChannelEncoding,
    DatabaseConfig,
    HonestyVerdict,
    Ordering,
    QueryKind,
    SpatialModeEncoding,
    TimeSlotEncoding,
    TransactionOutcome,
    TransactionPolicy,
    alice_read_plain,
    bob_apply_database,
    decode_channel,
    encode_channel,
    honesty_test,
    honesty_test_probabilities,
    prepare_plain_query,
    prepare_superposed_query,
    run_transaction,
    to_transcript,
    transaction_register,
)
from .seeding import TrialRandom, trial_rng

__version__ = "0.1.0"
