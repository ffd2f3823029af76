//! Equal-area solves over the sandwich and flower families, and the
//! asymmetric sandwich scan.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cluster::{Cluster, RegionId};
use crate::constructors::{
    make_flower_symmetric, make_sandwich, region_face, scale_cluster, ConstructError, COMPETITOR_X, COMPETITOR_Y,
};
use crate::newton::{damped_newton, NewtonOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    SolveFailed { what: &'static str, iterations: usize, residual: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub area: f64,
    pub stationarity: f64,
    pub pressure_formula: f64,
    pub turning: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    /// Solver parameters: radii for sandwiches, (p_center, p_outer) for the flower.
    pub radii: Vec<f64>,
    pub pressures: BTreeMap<RegionId, f64>,
    pub areas: BTreeMap<RegionId, f64>,
    pub perimeter: f64,
    pub residuals: Residuals,
    pub converged: bool,
    pub iterations: usize,
    #[serde(skip)]
    pub cluster: Cluster,
}

/// Newton settings used by all solves here.
pub fn solver_options() -> NewtonOptions {
    NewtonOptions::default()
}

fn summarize(
    cluster: Cluster,
    radii: Vec<f64>,
    target: f64,
    iterations: usize,
    converged: bool,
) -> Result<SolveResult, SolveError> {
    let areas = cluster.areas();
    let area = areas.values().fold(0.0f64, |m, a| m.max((a - target).abs()));
    let rep = cluster.check_stationary(1e-8).map_err(ConstructError::from)?;
    let residuals = Residuals {
        area,
        stationarity: rep.max_residual(),
        pressure_formula: rep.pressure_formula_residual,
        turning: rep.max_turning_residual(),
    };
    let converged = converged && residuals.area <= 1e-9 && residuals.stationarity <= 1e-8;
    Ok(SolveResult {
        radii,
        pressures: rep.pressures,
        areas,
        perimeter: cluster.perimeter(),
        residuals,
        converged,
        iterations,
        cluster,
    })
}

fn area_of(c: &Cluster, id: RegionId) -> Result<f64, ConstructError> {
    Ok(c.region_area(id)?)
}

/// Starting point for the symmetric sandwich at unit areas, from the competitor proportions.
pub fn sandwich_initial_guess() -> [f64; 2] {
    let s3 = 3f64.sqrt();
    [2.0 * (COMPETITOR_X + COMPETITOR_Y) / s3, s3 * COMPETITOR_Y]
}

fn sandwich_params(x: &[f64], symmetric: bool) -> [f64; 4] {
    if symmetric {
        [x[0], x[0], x[1], x[1]]
    } else {
        [x[0], x[1], x[2], x[3]]
    }
}

/// Equal-area sandwich from an explicit starting point: `[ρ, s]` when
/// symmetric, `[r1, r2, r3, r4]` otherwise.
pub fn solve_sandwich_from(x0: &[f64], target: f64, symmetric: bool) -> Result<SolveResult, SolveError> {
    let f = |x: &[f64]| -> Result<Vec<f64>, ConstructError> {
        let [r1, r2, r3, r4] = sandwich_params(x, symmetric);
        let c = make_sandwich(r1, r2, r3, r4)?;
        if symmetric {
            Ok(vec![area_of(&c, 1)? / target - 1.0, area_of(&c, 3)? / target - 1.0])
        } else {
            (1..=4).map(|i| Ok(area_of(&c, i)? / target - 1.0)).collect()
        }
    };
    let out = damped_newton(f, x0.to_vec(), &solver_options())?;
    if !out.converged {
        return Err(SolveError::SolveFailed {
            what: "equal-area sandwich",
            iterations: out.iterations,
            residual: out.residual,
        });
    }
    let radii = sandwich_params(&out.x, symmetric).to_vec();
    let c = make_sandwich(radii[0], radii[1], radii[2], radii[3])?;
    summarize(c, radii, target, out.iterations, out.converged)
}

pub fn solve_sandwich_equal_areas_at(target: f64, symmetric: bool) -> Result<SolveResult, SolveError> {
    let [rho, s] = sandwich_initial_guess();
    let k = target.sqrt();
    let x0 = if symmetric { vec![rho * k, s * k] } else { vec![rho * k, rho * k, s * k, s * k] };
    solve_sandwich_from(&x0, target, symmetric)
}

/// The stationary sandwich with all four areas equal to 1.
pub fn solve_sandwich_equal_areas(symmetric: bool) -> Result<SolveResult, SolveError> {
    solve_sandwich_equal_areas_at(1.0, symmetric)
}

/// Starting point (p_center, p_outer) for the unit-area flower.
pub fn flower_initial_guess() -> [f64; 2] {
    // Triple bubble holding the total area 4 fixes the outer scale.
    let per_region = std::f64::consts::PI / 2.0 + 1.0 / 3f64.sqrt();
    let p_outer = (3.0 * per_region / 4.0).sqrt();
    // Unit-area 120-degree triangle: chord c with c * kappa = 1.
    let theta = std::f64::consts::PI / 3.0;
    let seg = (theta - theta.sin()) / (8.0 * (theta / 2.0).sin().powi(2));
    let kappa = (3f64.sqrt() / 4.0 + 3.0 * seg).sqrt();
    [p_outer + kappa, p_outer]
}

pub fn solve_flower_from(x0: &[f64], target: f64) -> Result<SolveResult, SolveError> {
    let f = |x: &[f64]| -> Result<Vec<f64>, ConstructError> {
        let c = make_flower_symmetric(x[0], x[1])?;
        Ok(vec![area_of(&c, 1)? / target - 1.0, area_of(&c, 2)? / target - 1.0])
    };
    let out = damped_newton(f, x0.to_vec(), &solver_options())?;
    if !out.converged {
        return Err(SolveError::SolveFailed {
            what: "equal-area flower",
            iterations: out.iterations,
            residual: out.residual,
        });
    }
    let c = make_flower_symmetric(out.x[0], out.x[1])?;
    summarize(c, out.x.clone(), target, out.iterations, out.converged)
}

/// The symmetric flower with all four areas equal to 1.
pub fn solve_flower_equal_areas() -> Result<SolveResult, SolveError> {
    solve_flower_from(&flower_initial_guess(), 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub ratio: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    /// m(E₁) − m(E₂) after scaling to m(E₂) = 1.
    pub d_area: f64,
    pub perimeter: f64,
    pub converged: bool,
    pub iterations: usize,
    pub area_residual: f64,
    pub stationarity_residual: f64,
    pub error: Option<String>,
}

fn scan_row(ratio: f64, s0: f64) -> Result<(ScanRow, f64), SolveError> {
    let f = |x: &[f64]| -> Result<Vec<f64>, ConstructError> {
        let c = make_sandwich(ratio, 1.0, x[0], x[0])?;
        let m2 = area_of(&c, 2)?;
        Ok(vec![area_of(&c, 3)? / m2 - 1.0])
    };
    let out = damped_newton(f, vec![s0], &solver_options())?;
    let c = make_sandwich(ratio, 1.0, out.x[0], out.x[0])?;
    let m2 = area_of(&c, 2)?;
    let t = 1.0 / m2.sqrt();
    let c = scale_cluster(&c, t)?;
    let areas = c.areas();
    let area_residual = [3, 4].iter().map(|i| (areas[i] - areas[&2]).abs()).fold(0.0, f64::max);
    let stationarity = c.check_stationary(1e-8).map_err(ConstructError::from)?.max_residual();
    let converged = out.converged && area_residual <= 1e-9 && stationarity <= 1e-8;
    let row = ScanRow {
        ratio,
        r1: ratio * t,
        r2: t,
        r3: out.x[0] * t,
        d_area: areas[&1] - areas[&2],
        perimeter: c.perimeter(),
        converged,
        iterations: out.iterations,
        area_residual,
        stationarity_residual: stationarity,
        error: None,
    };
    Ok((row, out.x[0]))
}

/// For each r1/r2 ratio, solve r3 = r4 so that the triangles match the area of region 2.
/// Each row seeds the next; failed rows are recorded, not fatal.
pub fn asymmetry_scan(ratios: &[f64]) -> Vec<ScanRow> {
    let [rho, s] = sandwich_initial_guess();
    let mut seed = s / rho;
    ratios
        .iter()
        .map(|&ratio| {
            let failed = |msg: String| ScanRow {
                ratio,
                r1: f64::NAN,
                r2: f64::NAN,
                r3: f64::NAN,
                d_area: f64::NAN,
                perimeter: f64::NAN,
                converged: false,
                iterations: 0,
                area_residual: f64::NAN,
                stationarity_residual: f64::NAN,
                error: Some(msg),
            };
            if !(ratio >= 1.0) {
                return failed(format!("ratio {ratio} below 1"));
            }
            match scan_row(ratio, seed) {
                Ok((row, s_next)) => {
                    if row.converged {
                        seed = s_next;
                    }
                    row
                }
                Err(e) => failed(e.to_string()),
            }
        })
        .collect()
}

/// Central region of a solved flower, or the first triangle of a sandwich.
pub fn triangle_face(c: &Cluster, id: RegionId) -> Option<usize> {
    region_face(c, id).filter(|&f| c.faces()[f].darts.len() == 3)
}
