//! Homomorphism densities of graph patterns in Cayley graphs of finite abelian
//! groups, computed three independent ways (backtracking, kernel averaging and
//! a Fourier sum over circuit matrices), with an executable Sidorenko check for
//! even subdivisions.

pub mod cayley;
pub mod circuit;
pub mod graphs;
pub mod group;
pub mod homdensity;
pub mod sidorenko;
pub mod suite;

pub use cayley::{build_cayley, edge_density, spectrum, symmetric_subsets, SymmetricSet};
pub use circuit::{circuit_matrix, oriented_circuit_matrix, verify_kernel_image, CircuitMatrix};
pub use graphs::{
    builtin_graph, even_subdivision, standard_subdivision, SimpleGraph, SubdivisionPlan,
};
pub use group::{
    fourier_transform, inverse_transform, AbelianGroup, GroupElement, TAU_NUM, TAU_SYM,
};
pub use homdensity::{density, DensityValue, Method, MethodChoice, DEFAULT_BUDGET};
pub use sidorenko::{
    check_even_subdivision, check_sidorenko, quasirandomness_report, search_extremal,
    strictness_check, SidorenkoReport, Verdict,
};
