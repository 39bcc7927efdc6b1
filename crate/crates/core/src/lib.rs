//! Smoothed min-max minimization.
//!
//! The objective `f(x) = max_i f_i(x)` over a finite family of strongly
//! convex, smooth components is replaced by its LogSumExp smoothing
//!
//! ```text
//! f_s(x) = (1/s)·log Σ_i exp(s·f_i(x)),    f(x) ≤ f_s(x) ≤ f(x) + log(n)/s
//! ```
//!
//! which is then minimized with Nesterov's accelerated gradient descent.
//! Picking `s = 2·log(n)/ε` and running the resulting closed-form number of
//! steps yields an `ε`-optimal point of `f`.
//!
//! The [`meb`] module specializes this to the minimal enclosing ball problem,
//! `f(x) = max_i ‖x − c_i‖²`, giving a `(1+ε̃)`-approximate ball in
//! `Õ(nd/√ε̃)` time. [`baselines`] has the exact (Welzl) solver used as
//! ground truth and the core-set iteration it is compared against.
//!
//! ```
//! use smoothmax::meb::{solve_meb, MebConfig, PointCloud};
//!
//! let cloud = PointCloud::new(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]]).unwrap();
//! let ball = solve_meb(&cloud, &MebConfig::new(0.01).unwrap()).unwrap();
//! assert!(ball.radius <= 1.01);
//! ```

pub mod agd;
pub mod baselines;
pub mod cli;
pub mod error;
pub mod family;
pub mod meb;
pub mod smooth;
pub mod testkit;

pub use agd::{run_online, run_to_gap, OptimizerConfig, SolveReport};
pub use error::{Error, Result};
pub use family::{ComponentFamily, DomainConstants, QuadraticFamily};
pub use meb::{solve_meb, MebConfig, MebResult, PointCloud};
pub use smooth::{Reduction, SmoothEval, Smoother};
