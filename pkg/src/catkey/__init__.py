"""One-way key rates for BB84 and 6-state QKD with noisy and cat-code preprocessing."""

from catkey.bb84 import (BitPhaseDistribution, NoiseParams, SyndromeWeightTable, mutual_info_xe_bb84,
                         mutual_info_xy, rate_bb84, rate_bb84_opt, syndrome_table)
from catkey.entropy import (NumericalError, binary_entropy, eigh, shannon_entropy,
                            von_neumann_entropy)
from catkey.iterated import (IteratedParams, IteratedSyndromeDistribution,
                             iterated_syndrome_distribution, mutual_info_xe_iterated,
                             mutual_info_xy_iterated, rate_iterated, rate_iterated_opt)
from catkey.optimize import (OptimizationResult, ThresholdResult, find_threshold,
                             maximize_over_noise)
from catkey.schur import (SchurBlockStructure, block_structure, diagonal_block, mixture_entropy,
                          rotation_angle, wigner_block)
from catkey.sixstate import (SixStateChannel, SixStateEveStates, lo_rate,
                             mutual_info_xe_sixstate, rate_sixstate, rate_sixstate_opt)
from catkey.thresholds import iterated_threshold, threshold

__all__ = [
    "BitPhaseDistribution", "IteratedParams", "IteratedSyndromeDistribution", "NoiseParams",
    "NumericalError", "OptimizationResult", "SchurBlockStructure", "SixStateChannel",
    "SixStateEveStates", "SyndromeWeightTable", "ThresholdResult", "binary_entropy",
    "block_structure", "diagonal_block", "eigh", "find_threshold", "iterated_syndrome_distribution",
    "iterated_threshold", "lo_rate", "maximize_over_noise", "mixture_entropy",
    "mutual_info_xe_bb84", "mutual_info_xe_iterated", "mutual_info_xe_sixstate", "mutual_info_xy",
    "mutual_info_xy_iterated", "rate_bb84", "rate_bb84_opt", "rate_iterated", "rate_iterated_opt",
    "rate_sixstate", "rate_sixstate_opt", "rotation_angle", "shannon_entropy", "syndrome_table",
    "threshold", "von_neumann_entropy", "wigner_block",
]
