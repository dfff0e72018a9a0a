//! Closed-form robustness and Schmidt-robustness quantities and bounds for
//! pure states.

use serde::{Deserialize, Serialize};

use crate::error::EntglError;
use crate::linalg;
use crate::qstate::ComplexMatrix;
use crate::{tol, Result};

/// Ordered Schmidt coefficients of a pure state in an ambient local
/// dimension d; `sum a_i^2 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    coeffs: Vec<f64>,
    d: usize,
}

impl SchmidtSpectrum {
    pub fn new(mut coeffs: Vec<f64>, d: usize) -> Result<Self> {
        if coeffs.len() > d || coeffs.is_empty() {
            return Err(EntglError::DimensionMismatch(format!(
                "{} coefficients do not fit in local dimension {}",
                coeffs.len(),
                d
            )));
        }
        if coeffs.iter().any(|&c| c < -1e-15) {
            return Err(EntglError::ParamOutOfRange(
                "Schmidt coefficients must be nonnegative".into(),
            ));
        }
        coeffs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let norm: f64 = coeffs.iter().map(|c| c * c).sum();
        if (norm - 1.0).abs() > tol::NORM {
            return Err(EntglError::InvariantViolation(format!(
                "squared coefficients sum to {norm}, not 1"
            )));
        }
        Ok(Self { coeffs, d })
    }

    pub fn maximally_entangled(d: usize) -> Self {
        let c = 1.0 / (d as f64).sqrt();
        Self {
            coeffs: vec![c; d],
            d,
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Coefficient a_i, zero-padded beyond the stored length.
    fn a(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }
}

/// Robustness triple of a pure state: `R_s = R_g = (sum a_i)^2 - 1` and the
/// random robustness `R_r = a_1 a_2` (identity unnormalized in the mixing
/// convention).
pub fn robustness_pure(sp: &SchmidtSpectrum) -> (f64, f64, f64) {
    let s = sp.sum();
    let r_sg = s * s - 1.0;
    let r_r = sp.a(0) * sp.a(1);
    (r_sg, r_sg, r_r)
}

/// Generalised Schmidt-n robustness of the maximally entangled state:
/// `(d - n) / n`.
pub fn gen_schmidt_robustness_maxent(d: usize, n: usize) -> Result<f64> {
    if n < 1 || n > d {
        return Err(EntglError::InvalidOrder { n, d });
    }
    Ok((d - n) as f64 / n as f64)
}

/// Lower and upper bounds for the generalised Schmidt-n robustness:
/// `(sum a_i)^2 / n - 1` (clamped at zero) and `R_g (d - n) / ((d - 1) n)`.
pub fn gen_schmidt_robustness_bounds(sp: &SchmidtSpectrum, n: usize) -> Result<(f64, f64)> {
    let d = sp.d();
    if n < 1 || n > d {
        return Err(EntglError::InvalidOrder { n, d });
    }
    let s = sp.sum();
    let lower = (s * s / n as f64 - 1.0).max(0.0);
    let r_g = s * s - 1.0;
    let upper = r_g * (d - n) as f64 / ((d - 1) as f64 * n as f64);
    Ok((lower, upper))
}

/// Upper bound to the random Schmidt-n robustness:
/// `a_1 a_2 (d - n) / (d n - 1)`.
pub fn random_schmidt_upper(sp: &SchmidtSpectrum, n: usize) -> Result<f64> {
    let d = sp.d();
    if n < 1 || n > d {
        return Err(EntglError::InvalidOrder { n, d });
    }
    Ok(sp.a(0) * sp.a(1) * (d - n) as f64 / ((d * n) as f64 - 1.0))
}

/// Conjecture-based lower bound to the random Schmidt-n robustness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSchmidtLower {
    pub value: f64,
    pub lambda_min: f64,
    /// Always true: the bound comes from a conjectured class of optimal
    /// witnesses, not a proven formula.
    pub conjecture: bool,
}

/// Lower bound from the conjectured optimal witness class: the minimum
/// eigenvalue of `(1 - n J / (n d - 1)) (n D - B)` with `J` all ones,
/// `D = diag(b_i^2)`, `B_ij = b_i b_j`; the bound is `lambda_min / d^2`.
pub fn random_schmidt_lower(sp: &SchmidtSpectrum, n: usize) -> Result<RandomSchmidtLower> {
    let d = sp.d();
    if n < 1 || n >= d {
        return Err(EntglError::InvalidOrder { n, d });
    }
    let nf = n as f64;
    let df = d as f64;
    let factor = ComplexMatrix::from_fn(d, d, |i, j| {
        let jones = -nf / (nf * df - 1.0);
        let diag = if i == j { 1.0 } else { 0.0 };
        num_complex::Complex64::new(diag + jones, 0.0)
    });
    let core = ComplexMatrix::from_fn(d, d, |i, j| {
        let diag = if i == j { nf * sp.a(i) * sp.a(i) } else { 0.0 };
        num_complex::Complex64::new(diag - sp.a(i) * sp.a(j), 0.0)
    });
    let product = factor.matmul(&core);
    let eigs = linalg::general_eigenvalues(&product);
    let scale = product.one_norm().max(1.0);
    let lambda_min = eigs
        .iter()
        .filter(|z| z.im.abs() < 1e-8 * scale)
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    if !lambda_min.is_finite() {
        return Err(EntglError::InvariantViolation(
            "no real eigenvalue found for the witness matrix".into(),
        ));
    }
    Ok(RandomSchmidtLower {
        value: lambda_min / (df * df),
        lambda_min,
        conjecture: true,
    })
}
