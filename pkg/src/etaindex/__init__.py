"""Spectral invariants of one-dimensional boundary value problems.

Exact lattice spectrum models on the circle, the partition/weight spectral
flow engine, eta/zeta regularization, an exact resolvent-symbol calculus,
and the per-mode index of spectral boundary value problems on a cylinder,
including mod-n index-defect invariants for covers.
"""

from .apsindex import (
    ApsConventions,
    CylinderFamily,
    InvResult,
    ModeProblem,
    aps_index,
    inv_invariant,
    lattice_cylinder,
    lift_problem,
    modn_index,
    verify_sf_theorem,
)
from .etazeta import (
    DyadicValue,
    EtaDecomposition,
    EtaResult,
    LatticePath,
    ZetaResult,
    dimension_functional,
    eta_decomposition,
    eta_invariant,
    eta_of_negated_power,
    hurwitz_zeta,
    relative_eta,
    zeta_check,
)
from .linalg import DenseHermitian, EighResult, Spectrum, eigh, kernel_dimension
from .opmodel import (
    CoverConfig,
    LatticeSpectrumModel,
    ModelOperator,
    OperatorMeta,
    SpectralFamily,
    family_from_curves,
    family_from_matrices,
    lattice_operator,
    lattice_shift_family,
    negate_operator,
    positive_power_operator,
    pullback_cover,
    pushforward_trivial,
    twist_flat,
)
from .seeley import (
    DiffSymbol,
    ParityReport,
    ResolventTerm,
    TrigPoly,
    XiPoly,
    local_zeta,
    parity_report,
    resolvent_symbols,
)
from .specflow import (
    Partition,
    SfReport,
    crossing_count_oracle,
    crossing_events,
    find_weight,
    loop_spectral_flow,
    rel_index,
    spectral_flow,
)

__version__ = "0.1.0"
