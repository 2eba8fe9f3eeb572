"""Exact finite-scale toolkit for one-way puzzles and their transforms."""

from .dist import (
    BlockStructure, Channel, FiniteDist, apply_channel, bernoulli_kl, entropy,
    kl_chain_decomposition, kl_divergence, min_entropy, optimal_distinguisher,
    product, product_iid, product_sd_bernoulli, statistical_distance,
)
from .efid import (
    EFIDPair, PipelineParams, ToeplitzSeed, build_efid_candidate, toeplitz_family, delta_bound, entropy_to_sd_bound,
    equalizer, owpuzz_to_nonuniform_efid, pipeline_params, qefid_to_owpuzz, repeat_efid,
    sd_amp_reps, toeplitz_extract, weak_puzzle_delta_floor,
)
from .errors import (
    ContractError, DomainError, OwpuzzError, ParseError, ResourceError, ValidationError, limits,
)
from .fileformat import load, parse_puzzle_file, serialize_puzzle
from .primitives import (
    NICommitment, OneTimeSig, PseudoDetPRG, heavy_output_count, lamport_from_puzzle,
    pseudodeterminism_error, puzzle_from_commitment, puzzle_from_ots, puzzle_from_prg,
    reduction_adversary_ots,
)
from .puzzle import (
    Adversary, ParamPair, ProductPuzzle, Puzzle, adversary_break, correctness_error,
    distributional_kl_floor, kl_sampling_hardness, measure, optimal_break, verifier_dpi_witness,
)
from .report import Report, analyze, check_invariants
from .transforms import (
    and_repeat, bot_guard, combine, correctness_guarantee, min_error_verifier, or_repeat,
    random_input, universal_ev, ver_relax,
)

__version__ = "0.1.0"
