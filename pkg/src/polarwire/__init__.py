"""Polar coding for binary-input symmetric wiretap channels.

Library layout:

- gf2: exact GF(2) linear algebra (generator matrices, ranks, nullspaces)
- channels: finite-alphabet DMC models, degradation, capacity, sampling
- polar: the polar transform, exact small-n oracles, belief combines
- construction: reliability profiles and wiretap set selection
- codec: the coset encoder and successive-cancellation decoders
- secrecy: equivocation oracles, rank-based estimates, the Fano bound,
  and the conditioned mutual-information scan
- experiments / cli: the reproducible simulation harness

All Python-level indices are 0-based; serialized artifacts (code specs,
CSV/JSON reports, CLI output) use 1-based indices.
"""

__version__ = "0.1.0"

from .channels import (DegradationKernel, DegradedPair, DiscreteChannel, bec,
                       bsc, capacity, compose_degraded, erasure_kernel,
                       flip_kernel, from_table, identity_kernel, make_channel,
                       sample_transmit, symmetry_check)
from .codec import (DecodeResult, WiretapCodeword, informed_sc_decode,
                    informed_sc_decode_batch, sc_decode, sc_decode_batch,
                    wiretap_encode, wiretap_encode_batch)
from .construction import (ConstructionInfeasible, RateAllocation,
                           RegionViolation, ReliabilityProfile,
                           WiretapCodeSpec, allocate_rate_equivocation,
                           bec_z_evolution, bec_z_profile, mc_z_estimate,
                           select_wiretap_sets)
from .experiments import (ExperimentConfig, RunReport, config_from_tree,
                          parse_kv_text, run_conjecture_scan,
                          run_fer_experiment, run_secrecy_experiment)
from .gf2 import (BitVector, Gf2Matrix, mat_vec_mul, parity_check_of,
                  polar_generator, rank_of_columns, reverse_shuffle)
from .polar import (BeliefPair, ExactSplitTable, belief_combine_f,
                    belief_combine_g, exact_combined_prob, exact_split_table,
                    polar_encode, split_channel_evidence)
from .secrecy import (ConjectureScanReport, EquivocationEstimate,
                      ErasurePattern, MutualInfoReport, bec_equivocation_mc,
                      binary_entropy, bit_mutual_info, conjecture_scan,
                      exact_equivocation, exact_equivocation_given_pattern,
                      fano_equivocation_bound, mutual_info_profile)
