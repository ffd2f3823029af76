//! Closed-form estimates for minimizing clusters: isoperimetric bounds,
//! the three variations, and double-bubble pressure bounds.
//!
//! These are plain formula evaluators; the certificate ledger composes
//! them with rigorous enclosures.

use std::f64::consts::PI;

use thiserror::Error;

use crate::constructors::k8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("out of scope: {0}")]
    OutOfScope(String),
}

/// Printed constants, as decimals.
pub mod constants {
    pub const K0: f64 = 11.1962;
    pub const K1: f64 = 0.1605;
    pub const K2: f64 = 0.0244;
    pub const K3: f64 = 0.0408;
    pub const K4: f64 = 0.0411;
    pub const K5: f64 = 1.0044;
    pub const K6: f64 = 0.0425;
    pub const K7: f64 = 1.4199;
    pub const K9: f64 = 0.7154;
    pub const K10: f64 = 8.7939;
    pub const C1: f64 = 1.3168;
    pub const C2: f64 = 2.1606;
    pub const C3: f64 = 1.1606;
    pub const C4: f64 = 1.4186;
    pub const C5: f64 = 0.9747;
    pub const C7: f64 = 0.1992;
    pub const C8: f64 = 2.4990;
    pub const C9: f64 = 4.4111;
    pub const C10: f64 = 1.3466;
    pub const C11: f64 = 4.1064;
    pub const C12: f64 = 1.6829;
}

/// Target areas a₁…a_N, all positive.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaVector(Vec<f64>);

impl AreaVector {
    pub fn new(a: Vec<f64>) -> Result<Self, BoundsError> {
        if a.is_empty() {
            return Err(BoundsError::InvalidInput("empty area vector".into()));
        }
        if let Some(x) = a.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(BoundsError::InvalidInput(format!("area {x} is not positive")));
        }
        Ok(AreaVector(a))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// ‖a‖_{1/2} = (Σ √a_k)².
    pub fn half_norm(&self) -> f64 {
        self.0.iter().map(|x| x.sqrt()).sum::<f64>().powi(2)
    }

    /// ‖a‖_{−1} = (Σ 1/a_k)⁻¹.
    pub fn neg_norm(&self) -> f64 {
        1.0 / self.0.iter().map(|x| 1.0 / x).sum::<f64>()
    }

    /// 1-based access.
    fn get(&self, i: usize) -> Result<f64, BoundsError> {
        if i == 0 || i > self.0.len() {
            return Err(BoundsError::InvalidInput(format!("region index {i} not in 1..={}", self.0.len())));
        }
        Ok(self.0[i - 1])
    }
}

/// √π (√(Σa) + Σ√a).
pub fn isop_lower_bound(a: &AreaVector) -> f64 {
    PI.sqrt() * (a.total().sqrt() + a.as_slice().iter().map(|x| x.sqrt()).sum::<f64>())
}

/// Perimeter of a disk of area `m_c`; bounds the boundary length a small component can free.
pub fn var_i_bound(m_c: f64) -> f64 {
    2.0 * PI.sqrt() * m_c.sqrt()
}

/// Simplified lower bound a·y·(1 − y) with y = 16π a / (r² λ²).
pub fn var_ii_mass_lower(a_i: f64, r: u32, lam: f64) -> f64 {
    let y = 16.0 * PI * a_i / (f64::from(r * r) * lam * lam);
    a_i * y * (1.0 - y)
}

/// Smaller root of m² − (4a + r²λ²/(4π)) m + 4a² = 0, the bound before
/// the Taylor step. Computed as 4a²/(larger root) to avoid cancellation.
pub fn var_ii_mass_lower_exact(a_i: f64, r: u32, lam: f64) -> f64 {
    let b = f64::from(r * r) * lam * lam / (8.0 * PI);
    let s = 2.0 * a_i + b;
    let larger = s + (b * (4.0 * a_i + b)).sqrt();
    4.0 * a_i * a_i / larger
}

/// Pressure lower bound max(P(C)/(n m(C)) − 2/L, 2√π/(n√m(C)) − 2/L).
/// With `p_c = None` only the isoperimetric form is used.
pub fn var_iii_pressure_lower(p_c: Option<f64>, n: u32, m_c: f64, ell: f64) -> f64 {
    let n = f64::from(n);
    let iso = 2.0 * PI.sqrt() / (n * m_c.sqrt()) - 2.0 / ell;
    match p_c {
        Some(p) => iso.max(p / (n * m_c) - 2.0 / ell),
        None => iso,
    }
}

/// (6−n)π/(3P(C)) + (1 − ℓ/P(C)) p_min.
pub fn turning_pressure_lower(n: u32, p_c: f64, ell: f64, p_min: f64) -> f64 {
    (6.0 - f64::from(n)) * PI / (3.0 * p_c) + (1.0 - ell / p_c) * p_min
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerEstimate {
    /// m(C_i) ≥ (20/9) a_i² / (r² ‖a‖_{1/2}).
    pub mass: f64,
    /// Components of region i: M_i ≤ (9/20) N² ‖a‖_{1/2} / a_i.
    pub component_cap: f64,
    /// All components: M ≤ (9/20) N² ‖a‖_{1/2} / ‖a‖_{−1}.
    pub total_cap: f64,
}

pub fn lower_estimate(a: &AreaVector, i: usize, r: usize) -> Result<LowerEstimate, BoundsError> {
    let n = a.len();
    if n < 3 {
        return Err(BoundsError::OutOfScope(format!("needs N >= 3, got {n}")));
    }
    if !(3 <= r && r <= n) {
        return Err(BoundsError::InvalidInput(format!("r = {r} not in 3..={n}")));
    }
    let ai = a.get(i)?;
    let half = a.half_norm();
    let n2 = (n * n) as f64;
    Ok(LowerEstimate {
        mass: 20.0 / 9.0 * ai * ai / ((r * r) as f64 * half),
        component_cap: 9.0 / 20.0 * n2 * half / ai,
        total_cap: 9.0 / 20.0 * n2 * half / a.neg_norm(),
    })
}

/// k₈/√(max{a−a_i, a−a_j}) ≤ min{p_i,p_j} ≤ max{p_i,p_j} ≤ k₈/√(min{a_i,a_j}),
/// with a the total area and 1-based indices.
pub fn double_bubble_pressure_bounds(a: &AreaVector, i: usize, j: usize) -> Result<(f64, f64), BoundsError> {
    if i == j {
        return Err(BoundsError::InvalidInput("indices must differ".into()));
    }
    let (ai, aj) = (a.get(i)?, a.get(j)?);
    let total = a.total();
    let k = k8();
    Ok((k / (total - ai).max(total - aj).sqrt(), k / ai.min(aj).sqrt()))
}
