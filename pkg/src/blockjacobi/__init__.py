"""Complex block Jacobi eigensolvers for Hermitian, normal and J-Hermitian
matrices under generalized serial pivot strategies, with a pivot-strategy
algebra, UBC transformation enforcement, and an annihilator/operator
verification layer."""

from .matcore import (
    BlockPartition,
    DimensionError,
    ElementaryBlockTransform,
    PartitionError,
    PartitionedHermitian,
    apply_similarity,
    block_off_norm,
    embed_transform,
    make_partition,
    off_norm,
    read_matrix_text,
    write_matrix_text,
)
from .pivot import (
    OrderingError,
    OrderingMatrix,
    PivotOrdering,
    admissible_transpose,
    apply_permutation,
    are_equivalent,
    column_cyclic,
    is_valid_cyclic,
    ordering_from_pairs,
    ordering_matrix,
    random_generalized_serial,
    reverse,
    row_cyclic,
    serial_with_permutations,
    shift,
)
from .rotations import (
    ComplexRotation,
    DefinitenessError,
    HyperbolicRotation,
    elementwise_jacobi,
    elementwise_j_jacobi,
    hyp_rotation,
    trig_rotation,
)
from .ubc import (
    SwapSequence,
    attribute_R_filter,
    enforce_ubc,
    gamma_ij,
    gamma_tilde,
    qr_column_pivoting,
)
from .annihilator import (
    build_annihilator_oracle,
    build_annihilator_structured,
    build_operator,
    empirical_mu,
    tau,
    vec0_inverse,
    vec_pi,
)
from .blocksolve import (
    ConvergenceTrace,
    PerturbationSpec,
    SolveResult,
    SolverConfig,
    block_step,
    preprocess_diagonal_blocks,
    solve_hermitian,
    solve_j_hermitian,
    solve_normal,
    solve_perturbed,
)

__version__ = "0.1.0"
