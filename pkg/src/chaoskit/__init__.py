"""chaoskit: chaos-game genomic signatures and synthetic DNA reconstruction.

Computes CGR trajectories, FCGR matrices, and k-mer statistics of DNA
sequences, cross-checks their equivalences, and reconstructs synthetic
sequences (and their CGR images) from target k-mer distributions.
"""

from .seqcore import (
    ALPHABET,
    DnaSequence,
    KmerFrequencyVector,
    LetterPermutation,
    S_PERMUTATIONS,
    apply_permutation,
    count_kmers,
    kmer_from_index,
    kmer_index,
    occurrences,
    parse_fasta,
)
from .cgr import (
    CellIndices,
    CgrPoint,
    CgrTrajectory,
    FcgrMatrix,
    Symmetry,
    SYMMETRIES,
    avoided_kmer_image,
    cell_center,
    cell_indices_to_kmer,
    cgr_trajectory,
    fcgr_count,
    fcgr_geometric,
    fcgr_grid,
    fcgr_kronecker,
    fcgr_to_frequency_vector,
    kmer_cell_indices,
    label,
    last_point,
    permutation_for_symmetry,
    symmetry_apply_trajectory,
    symmetry_for_permutation,
)
from .distribution import (
    ConstraintSystem,
    KmerDistribution,
    build_constraints,
    empirical_distribution,
    hit_and_run_chain,
    hit_and_run_sample,
    marginal_residual,
    total_variation_l1,
    uniform_distribution,
)
from .debruijn import (
    DeBruijnMultigraph,
    ReconstructionReport,
    balance,
    connect,
    counts_from_distribution,
    error_bound,
    eulerian_path,
    flow_imbalance,
    reconstruct,
)
from .imaging import GrayImage, pgm_bytes, render_cgr, render_fcgr, write_pgm

__version__ = "0.1.0"

__all__ = [
    "ALPHABET",
    "CellIndices",
    "CgrPoint",
    "CgrTrajectory",
    "ConstraintSystem",
    "DeBruijnMultigraph",
    "DnaSequence",
    "FcgrMatrix",
    "GrayImage",
    "KmerDistribution",
    "KmerFrequencyVector",
    "LetterPermutation",
    "ReconstructionReport",
    "S_PERMUTATIONS",
    "SYMMETRIES",
    "Symmetry",
    "apply_permutation",
    "avoided_kmer_image",
    "balance",
    "build_constraints",
    "cell_center",
    "cell_indices_to_kmer",
    "cgr_trajectory",
    "connect",
    "count_kmers",
    "counts_from_distribution",
    "empirical_distribution",
    "error_bound",
    "eulerian_path",
    "fcgr_count",
    "fcgr_geometric",
    "fcgr_grid",
    "fcgr_kronecker",
    "fcgr_to_frequency_vector",
    "flow_imbalance",
    "hit_and_run_chain",
    "hit_and_run_sample",
    "kmer_cell_indices",
    "kmer_from_index",
    "kmer_index",
    "label",
    "last_point",
    "marginal_residual",
    "occurrences",
    "parse_fasta",
    "permutation_for_symmetry",
    "pgm_bytes",
    "reconstruct",
    "render_cgr",
    "render_fcgr",
    "symmetry_apply_trajectory",
    "symmetry_for_permutation",
    "total_variation_l1",
    "uniform_distribution",
    "write_pgm",
]
