"""Channel-independent classical-quantum block codes and their verification."""

from .channel import (
    Channel,
    ExponentReport,
    average_state,
    channel_output,
    exponent_chain_check,
    hayashi_exponent,
    load_channel,
    mutual_information,
    phi,
    save_channel,
    trace_power_bound,
    universal_exponent,
)
from .coding import (
    Codebook,
    ErrorReport,
    UniversalDecoder,
    build_codebook,
    build_decoder,
    choose_threshold,
    error_bound_chain,
    error_probability,
    exponent_experiment,
    hayashi_nagaoka_check,
    threshold_projection,
    verify_packing,
)
from .combinatorics import (
    ConditionalType,
    TypeVector,
    YoungDiagram,
    conditional_type_class,
    conditional_types_of,
    entropy,
    enum_type_class,
    enum_types,
    enum_young,
    type_class_size,
    type_of,
)
from .errors import CapacityError, PackingError, ValidationError
from .schur_weyl import (
    check_commutation,
    check_conditional_dominance,
    check_universal_dominance,
    conditional_type_state,
    dim_irrep_sn,
    dim_irrep_su,
    isotypic_projector,
    sn_character,
    universal_state,
)

__version__ = "0.1.0"
