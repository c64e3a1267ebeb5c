//! Recurrence trees for nonlinear recurrences whose next term appears squared.
//!
//! When the next term `x` of a recurrence satisfies a degree-m polynomial whose
//! coefficients depend on earlier terms, each step offers up to m candidates.
//! Keeping all of them gives an m-ary tree. This crate builds such trees in
//! exact rational arithmetic for m = 2, classifies branches that leave ℚ, and
//! checks the known structure of the Somos-4 related families:
//!
//! - [`exact`]: rationals, exact square roots, quadratic root classification
//! - [`recurrence`]: the recurrence families and their step polynomials
//! - [`tree`]: tree construction, level statistics, path extraction, export
//! - [`somos`]: generalized Somos-4 sequences and the identities of their ratios
//! - [`analysis`]: the closed-form branch of the order-3 tree and the
//!   factorization of tree values over Somos-4 terms
//! - [`search`]: scanning first-order coefficient boxes for rational trees
//! - [`cli`]: the `rectree` command line

pub mod analysis;
pub mod cli;
pub mod exact;
pub mod recurrence;
pub mod search;
pub mod somos;
pub mod tree;

pub use exact::{exact_sqrt, solve_quadratic, QuadraticRoots, Rational, RootKind};
pub use recurrence::{
    make_first_order, make_order3_unfolding, make_somos_ratio_quadratic, step_polynomial,
    ParamPoint, Recurrence,
};
pub use tree::{build_tree, extract_path, is_rational_to_depth, level_stats, RecurrenceTree};
