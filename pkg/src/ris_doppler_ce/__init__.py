"""Link-level simulator and estimators for surface-assisted wideband OFDM
uplink channel estimation under UE mobility."""

__version__ = "0.1.0"

from .channel import (
    Cir,
    LinkSet,
    SinglePathChannel,
    cfr_to_cir,
    cir_to_cfr,
    doppler_evolve,
    draw_linkset,
    dump_cir,
    evolve_ue_motion,
    gen_single_path,
    gen_tdl_cir,
    link_budget_db,
    load_cir,
    pathloss_db,
    single_path_cascade,
    subsurface_aperture_gain_db,
)
from .config import (
    ConfigError,
    GeometryConfig,
    OfdmConfig,
    PowerSweep,
    SimConfig,
    db_to_linear,
    dbm_to_milliwatts,
    load_config,
    loads_config,
    paper_preset,
    serialize,
    validate,
)
from .estimators import (
    EstimationResult,
    PathSet,
    SinglePathEstimate,
    SuperimposedEstimates,
    adjust_superimposed_cirs,
    bm1_estimate,
    bm2_estimate,
    dsa_adjust,
    dsa_estimate,
    measure_delta_beta,
    per_symbol_cfr,
    select_paths,
    single_path_estimate,
)
from .harness import (
    CSV_HEADER,
    SweepResult,
    SweepRow,
    run_multipath,
    run_rng,
    run_singlepath,
)
from .metrics import (
    BeamPattern,
    achievable_rate,
    nmse,
    rate_from_cfr,
    rate_ratio,
    strongest_tap_beam,
)
from .signal import (
    PilotSymbol,
    ReflectionMatrix,
    RxSymbol,
    awgn,
    dft_reflection_pattern,
    receive_symbol,
    single_on_pattern,
    zadoff_chu,
)
