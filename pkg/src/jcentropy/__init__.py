"""Entropy exchange in the Jaynes-Cummings model with fluctuating-temperature cavities."""

__version__ = "0.1.0"

from .specfun import (
    GIBBS,
    AccuracyError,
    SeriesAccuracy,
    hurwitz_zeta,
    lerch_phi_unit,
    q_exp,
    q_log,
)
from .superstat import (
    BracketError,
    DistKind,
    GammaSuperstat,
    MultiLevelSuperstat,
    PhotonDistribution,
    UndefinedTemperatureError,
    calibrate_beta_star,
    mean_photon_bose,
    mean_photon_q,
    photon_weights_gamma,
    photon_weights_gibbs,
    photon_weights_multilevel,
    physical_beta,
    q_internal_energy,
    q_partition,
    q_trace,
)
from .jcm import (
    AtomInit,
    BlockEvolver,
    EvolvedState,
    ModelParams,
    coefficients_at,
    manifold,
    oracle_evolve,
    reduced_atom,
    reduced_field,
)
from .entropy import (
    VON_NEUMANN,
    BlochPoint,
    EntropyKind,
    EntropyTrace,
    FieldEntropyForm,
    atom_entropy,
    bloch_sweep,
    entropy_of,
    entropy_trace,
    field_entropy,
    time_average,
    tsallis,
)
from .ensemble import (
    BetaEnsembleSpec,
    load_betas,
    sample_betas,
    save_betas,
)
