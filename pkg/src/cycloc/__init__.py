"""Binary cyclic codes with locality: trellis complexity and locality-aware decoding."""

from .cyclic import (CapacityError, CodeError, CyclicCode, LinearCode, ZeroSet, code_from_zeros,
                     contains, dual_zeros, encode, linear_code, load_code, punctured_zeros,
                     shortened_zeros, support_sets)
from .galois import FieldElement, build_field, get_field, nth_root
from .locality import availability_checks, count_intersecting_trains, add_trains, hierarchy
from .locosd import (LocalStructure, hierarchical_structure_for, locality_aware_decode,
                     qmld_hier, qmld_spc, qmld_success_bound, spc_structure_for)
from .ordering import Chain, enumerate_chains, gamma_order, identity_order
from .osd import ChannelSpec, DecodeOutcome, OsdConfig, find_mri, llr, osd_decode, transmit
from .trellis import (build_trellis, complexity, dimension_profile, max_state_bound,
                      profile_upper_bound, viterbi_decode)

__version__ = "0.1.0"
