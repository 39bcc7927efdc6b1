//! Python bindings: enclosing balls, the smoothed max of quadratic families
//! and the iteration-count formulas.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use smoothmax::agd::{self, OptimizerConfig};
use smoothmax::baselines;
use smoothmax::meb::{self, MebConfig, PointCloud};
use smoothmax::smooth::{self, Smoother};

fn value_error(e: smoothmax::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cloud(points: Vec<Vec<f64>>) -> PyResult<PointCloud> {
    PointCloud::new(points).map_err(value_error)
}

#[pyclass(name = "Ball", get_all, frozen)]
struct Ball {
    center: Vec<f64>,
    radius: f64,
    iterations: usize,
    planned_iterations: usize,
}

#[pymethods]
impl Ball {
    fn __repr__(&self) -> String {
        format!("Ball(radius={}, iterations={})", self.radius, self.iterations)
    }
}

#[pyclass(name = "ExactBall", get_all, frozen)]
struct ExactBall {
    center: Vec<f64>,
    radius: f64,
    support: Vec<usize>,
}

#[pymethods]
impl ExactBall {
    fn __repr__(&self) -> String {
        format!("ExactBall(radius={}, support={:?})", self.radius, self.support)
    }
}

#[pyclass(name = "SolveReport", get_all, frozen)]
struct SolveReport {
    x: Vec<f64>,
    value: f64,
    epsilon: f64,
    iterations: usize,
    planned_iterations: usize,
    gap_certificate: f64,
    s: f64,
    kappa: f64,
}

#[pymethods]
impl SolveReport {
    fn __repr__(&self) -> String {
        format!("SolveReport(value={}, iterations={})", self.value, self.iterations)
    }
}

/// `f(x) = max_i a_i·‖x − c_i‖²`.
#[pyclass(name = "QuadraticFamily", frozen)]
struct PyQuadraticFamily {
    inner: smoothmax::QuadraticFamily,
}

#[pymethods]
impl PyQuadraticFamily {
    #[new]
    fn new(centers: Vec<Vec<f64>>, curvatures: Vec<f64>) -> PyResult<Self> {
        smoothmax::QuadraticFamily::new(centers, curvatures)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    fn __len__(&self) -> usize {
        smoothmax::ComponentFamily::len(&self.inner)
    }

    /// `max_i f_i(x)`.
    fn value(&self, x: Vec<f64>) -> PyResult<f64> {
        smooth::max_component(&self.inner, &x).map(|v| v.0).map_err(value_error)
    }

    fn smooth_value(&self, x: Vec<f64>, s: f64) -> PyResult<f64> {
        let sm = Smoother::new(s).map_err(value_error)?;
        smooth::smooth_value(&self.inner, &sm, &x).map_err(value_error)
    }

    fn smooth_gradient(&self, x: Vec<f64>, s: f64) -> PyResult<Vec<f64>> {
        let sm = Smoother::new(s).map_err(value_error)?;
        smooth::smooth_gradient(&self.inner, &sm, &x).map_err(value_error)
    }

    /// Row-major nested lists.
    fn smooth_hessian(&self, x: Vec<f64>, s: f64) -> PyResult<Vec<Vec<f64>>> {
        let sm = Smoother::new(s).map_err(value_error)?;
        let h = smooth::smooth_hessian(&self.inner, &sm, &x).map_err(value_error)?;
        Ok(h.row_iter().map(|r| r.iter().copied().collect()).collect())
    }

    /// Minimizes the max to within `epsilon`, using constants valid on the
    /// ball of radius `domain_radius` around the origin; `distance` bounds
    /// `‖x1 − x*‖`.
    #[pyo3(signature = (epsilon, x1, distance, domain_radius))]
    fn run_to_gap(&self, epsilon: f64, x1: Vec<f64>, distance: f64, domain_radius: f64) -> PyResult<SolveReport> {
        let constants = self.inner.constants_on_ball(domain_radius).map_err(value_error)?;
        let r = agd::run_to_gap(&self.inner, &constants, &OptimizerConfig::new(epsilon, x1, distance))
            .map_err(value_error)?;
        Ok(SolveReport {
            x: r.x_final,
            value: r.f_final,
            epsilon: r.epsilon,
            iterations: r.iterations_run,
            planned_iterations: r.planned_iterations,
            gap_certificate: r.gap_certificate,
            s: r.constants.s,
            kappa: r.constants.kappa_s,
        })
    }
}

/// `(1+epsilon)`-approximate enclosing ball with the accelerated solver.
#[pyfunction]
fn solve_meb(points: Vec<Vec<f64>>, epsilon: f64) -> PyResult<Ball> {
    let cfg = MebConfig::new(epsilon).map_err(value_error)?;
    let r = meb::solve_meb(&cloud(points)?, &cfg).map_err(value_error)?;
    Ok(Ball {
        center: r.center,
        radius: r.radius,
        iterations: r.iterations,
        planned_iterations: r.planned_iterations,
    })
}

#[pyfunction]
fn badoiu_clarkson(points: Vec<Vec<f64>>, epsilon: f64) -> PyResult<Ball> {
    let r = baselines::badoiu_clarkson(&cloud(points)?, epsilon).map_err(value_error)?;
    Ok(Ball {
        center: r.center,
        radius: r.radius,
        iterations: r.iterations,
        planned_iterations: r.planned_iterations,
    })
}

#[pyfunction]
#[pyo3(signature = (points, seed = 0))]
fn welzl_exact(points: Vec<Vec<f64>>, seed: u64) -> PyResult<ExactBall> {
    let r = baselines::welzl_exact(&cloud(points)?, seed).map_err(value_error)?;
    Ok(ExactBall {
        center: r.center,
        radius: r.radius,
        support: r.support,
    })
}

#[pyfunction]
fn required_iterations_meb(epsilon: f64, n: usize) -> PyResult<usize> {
    meb::required_iterations_meb(epsilon, n).map_err(value_error)
}

#[pyfunction]
fn required_iterations_general(
    epsilon: f64,
    n: usize,
    gradient_bound: f64,
    strong_convexity: f64,
    smoothness: f64,
    distance: f64,
) -> PyResult<usize> {
    agd::required_iterations_general(epsilon, n, gradient_bound, strong_convexity, smoothness, distance)
        .map_err(value_error)
}

#[pyfunction]
fn smoother_for_gap(epsilon: f64, n: usize) -> f64 {
    agd::smoother_for_gap(epsilon, n)
}

#[pyfunction]
fn gap_bound(t: usize, strong_convexity: f64, kappa: f64, distance: f64, initial_gap: f64) -> f64 {
    agd::gap_bound(t, strong_convexity, kappa, distance, initial_gap)
}

#[pymodule]
fn smoothmax_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQuadraticFamily>()?;
    m.add_class::<Ball>()?;
    m.add_class::<ExactBall>()?;
    m.add_class::<SolveReport>()?;
    m.add_function(wrap_pyfunction!(solve_meb, m)?)?;
    m.add_function(wrap_pyfunction!(badoiu_clarkson, m)?)?;
    m.add_function(wrap_pyfunction!(welzl_exact, m)?)?;
    m.add_function(wrap_pyfunction!(required_iterations_meb, m)?)?;
    m.add_function(wrap_pyfunction!(required_iterations_general, m)?)?;
    m.add_function(wrap_pyfunction!(smoother_for_gap, m)?)?;
    m.add_function(wrap_pyfunction!(gap_bound, m)?)?;
    Ok(())
}
