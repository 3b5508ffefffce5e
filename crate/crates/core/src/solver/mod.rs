//! Stage-game solvers.

pub mod feasible;
pub mod guarantee;
pub mod min_entropy;
pub mod nash;
pub mod zero_sum;

pub use feasible::{check_feasible_ir, check_feasible_ir_with, FeasibilityVerdict, FeasibleDecomposition};
pub use guarantee::{guarantee_curve, stage_exploit_floor, upper_concave_envelope, GuaranteeCurve, GuaranteeSearch};
pub use min_entropy::{min_entropy_minmax, min_entropy_nash, optimal_face_vertices};
pub use nash::{enumerate_bimatrix_nash, NashEnumeration, NashEquilibrium};
pub use zero_sum::{minmax_profile, minmax_solution, solve_zero_sum, MinmaxSolution, ZeroSumSolution};
