use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use critreg::dynamics::{self, ActionSpec};
use critreg::exact_pl::rational::{fmt_rational, parse_rational};
use critreg::exact_pl::PLHomeo;
use critreg::io::{ActionFile, WitnessFile};
use critreg::{feasibility, regularity, stochastic, tsuboi};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn homeo(points: Vec<(String, String)>) -> PyResult<PLHomeo> {
    let pts = points
        .iter()
        .map(|(x, y)| Ok((parse_rational(x)?, parse_rational(y)?)))
        .collect::<Result<Vec<_>, critreg::exact_pl::PlError>>()
        .map_err(value_err)?;
    PLHomeo::new(pts).map_err(value_err)
}

fn breakpoints(map: &PLHomeo) -> Vec<(String, String)> {
    map.breakpoints().iter().map(|(x, y)| (fmt_rational(x), fmt_rational(y))).collect()
}

/// Exact image of `x` under the PL map with the given breakpoints.
#[pyfunction]
fn pl_eval(points: Vec<(String, String)>, x: &str) -> PyResult<String> {
    let m = homeo(points)?;
    Ok(fmt_rational(&m.eval(&parse_rational(x).map_err(value_err)?).map_err(value_err)?))
}

/// Support components of a PL map as `(lo, hi)` rational strings.
#[pyfunction]
fn pl_support(points: Vec<(String, String)>) -> PyResult<Vec<(String, String)>> {
    Ok(homeo(points)?.support_components().iter().map(|j| (fmt_rational(j.lo()), fmt_rational(j.hi()))).collect())
}

#[pyfunction]
fn thompson_generators() -> BTreeMap<String, Vec<(String, String)>> {
    critreg::exact_pl::standard_genset().iter().map(|(n, g)| (n.clone(), breakpoints(g))).collect()
}

/// First two-chain of the action file's generators at the budget, as
/// `(J1, g1, J2, g2)` strings.
#[pyfunction]
#[pyo3(signature = (action_text, budget=None))]
fn find_two_chain(action_text: &str, budget: Option<usize>) -> PyResult<Option<(String, String, String, String)>> {
    let f = ActionFile::parse(action_text).map_err(value_err)?;
    let spec = ActionSpec::new(f.generators, budget.unwrap_or(f.budget)).map_err(value_err)?;
    Ok(dynamics::find_two_chain(&spec)
        .map(|c| (c.j1.to_string(), c.g1.to_string(), c.j2.to_string(), c.g2.to_string())))
}

/// Verifies a witness file; returns `(accepted, failure, partial_sum)`.
#[pyfunction]
#[pyo3(signature = (witness_text, n_max, tail_tolerance=1e-3))]
fn verify_witness(witness_text: &str, n_max: usize, tail_tolerance: f64) -> PyResult<(bool, Option<String>, f64)> {
    let w = WitnessFile::parse(witness_text).map_err(value_err)?;
    let r = regularity::verify_nesting_witness(&w.witness, n_max, tail_tolerance).map_err(value_err)?;
    Ok((r.accepted(), r.failure.as_ref().map(|f| f.to_string()), r.partial_sum()))
}

#[pyfunction]
fn translation_witness(copies: i64) -> PyResult<String> {
    WitnessFile { name: "translation".into(), witness: dynamics::translation_example_witness(copies) }
        .to_text()
        .ok_or_else(|| value_err("witness is not PL"))
}

#[pyfunction]
fn min_k_for_tau(tau: f64) -> PyResult<usize> {
    regularity::min_k_for_tau(tau).map_err(value_err)
}

#[pyfunction]
fn k_tau_lower_bound(tau: f64) -> PyResult<usize> {
    regularity::k_tau_lower_bound(tau).map_err(value_err)
}

/// `(value, x, y)` of the grid Hölder estimate.
#[pyfunction]
fn holder_norm(xs: Vec<f64>, fs: Vec<f64>, tau: f64) -> PyResult<(f64, f64, f64)> {
    let e = regularity::holder_norm(&xs, &fs, tau).map_err(value_err)?;
    Ok((e.value, e.x, e.y))
}

/// `(tau, p, q, q', r)` of a feasible tuple, if one is found.
#[pyfunction]
fn find_feasible(tau: f64) -> Option<(f64, f64, f64, f64, f64)> {
    feasibility::find_feasible(tau).map(|p| (p.tau, p.p, p.q, p.q_prime, p.r))
}

#[pyfunction]
fn sup_tau(tolerance: f64) -> f64 {
    feasibility::sup_tau(tolerance)
}

/// `(mean, max, std_error)` for the documented test weight.
#[pyfunction]
fn omega_monte_carlo(tau: f64, n_max: usize, trials: usize, seed: u64) -> PyResult<(f64, f64, f64)> {
    let s = stochastic::omega_sum_monte_carlo(&stochastic::SeqWeight::test_weight(), tau, n_max, trials, seed)
        .map_err(value_err)?;
    Ok((s.mean, s.max, s.std_error))
}

#[pyfunction]
fn expectation_bound(d: usize, tau: f64, n_max: usize) -> PyResult<(f64, f64)> {
    let b = stochastic::expectation_bound(d, tau, n_max).map_err(value_err)?;
    Ok((b.partial, b.closed_form))
}

/// Largest relation deviation of the construction at a feasible tuple.
#[pyfunction]
#[pyo3(signature = (tau, n, samples=1000))]
fn tsuboi_max_deviation(tau: f64, n: usize, samples: usize) -> PyResult<f64> {
    let p = feasibility::find_feasible(tau).ok_or_else(|| value_err(format!("no feasible tuple for tau {tau}")))?;
    let act = tsuboi::build_action(&p, n).map_err(value_err)?;
    Ok(tsuboi::verify_commutations(&act, samples).max_deviation())
}

#[pymodule]
fn pycritreg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(pl_eval, m)?)?;
    m.add_function(wrap_pyfunction!(pl_support, m)?)?;
    m.add_function(wrap_pyfunction!(thompson_generators, m)?)?;
    m.add_function(wrap_pyfunction!(find_two_chain, m)?)?;
    m.add_function(wrap_pyfunction!(verify_witness, m)?)?;
    m.add_function(wrap_pyfunction!(translation_witness, m)?)?;
    m.add_function(wrap_pyfunction!(min_k_for_tau, m)?)?;
    m.add_function(wrap_pyfunction!(k_tau_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(holder_norm, m)?)?;
    m.add_function(wrap_pyfunction!(find_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(sup_tau, m)?)?;
    m.add_function(wrap_pyfunction!(omega_monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(expectation_bound, m)?)?;
    m.add_function(wrap_pyfunction!(tsuboi_max_deviation, m)?)?;
    Ok(())
}
