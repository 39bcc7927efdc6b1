//! Reference algorithms for the enclosing-ball problem: an exact solver used
//! as ground truth and the core-set iteration the smoothed solver competes
//! with.

mod coreset;
mod welzl;

pub use coreset::{badoiu_clarkson, badoiu_clarkson_observed, coreset_iterations};
pub use welzl::{welzl_exact, ExactMebResult, MAX_EXACT_DIM};
