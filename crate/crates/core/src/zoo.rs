//! Constructors for the named states and families, with their analytic
//! predicates attached as metadata.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::EntglError;
use crate::qstate::{
    diag_correlation_projector, kron, max_entangled_projector, reorder_subsystems, swap_operator,
    ComplexMatrix, QuantumState, C_ZERO,
};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Werner,
    Isotropic,
    Stormer,
    Uuvvf,
    Watrous,
    Rainbow,
    BellDiagonal,
    Chessboard,
    TilesUpb,
    Edge55,
    Edge66,
    MaxCorrelated,
}

/// A state from one of the named families, together with its parameters
/// and the analytic predicates known for that family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyPoint {
    pub family: Family,
    pub params: BTreeMap<String, f64>,
    pub state: QuantumState,
    pub flags: BTreeMap<String, bool>,
    /// Analytic Schmidt number, where the family determines it.
    pub schmidt_number: Option<usize>,
}

impl FamilyPoint {
    fn new(family: Family, state: QuantumState) -> Self {
        Self {
            family,
            params: BTreeMap::new(),
            state,
            flags: BTreeMap::new(),
            schmidt_number: None,
        }
    }

    fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    fn with_flag(mut self, key: &str, value: bool) -> Self {
        self.flags.insert(key.into(), value);
        self
    }
}

/// Werner state `(1 + beta F) / (d^2 + beta d)`; entangled iff
/// `beta < -1/d`, 1-distillable iff `beta < -1/2`.
pub fn werner(d: usize, beta: f64) -> Result<FamilyPoint> {
    if d < 2 {
        return Err(EntglError::ParamOutOfRange("werner needs d >= 2".into()));
    }
    if !(-1.0..=1.0).contains(&beta) {
        return Err(EntglError::ParamOutOfRange(format!(
            "werner parameter must lie in [-1, 1], got {beta}"
        )));
    }
    let norm = (d * d) as f64 + beta * d as f64;
    let m = ComplexMatrix::identity(d * d)
        .add(&swap_operator(d).scale(Complex64::new(beta, 0.0)))
        .scale(Complex64::new(1.0 / norm, 0.0));
    Ok(FamilyPoint::new(Family::Werner, QuantumState::new(m, vec![d, d])?)
        .with_param("d", d as f64)
        .with_param("beta", beta)
        .with_param("norm", norm)
        .with_flag("entangled", beta < -1.0 / d as f64)
        .with_flag("one_distillable", beta < -0.5))
}

/// Isotropic state `(1 + beta P_+) / (d^2 + beta)` with its analytic
/// Schmidt number: n is the smallest integer with
/// `beta <= d (n d - 1) / (d - n)`.
pub fn isotropic(d: usize, beta: f64) -> Result<FamilyPoint> {
    if d < 2 {
        return Err(EntglError::ParamOutOfRange("isotropic needs d >= 2".into()));
    }
    if beta < -1.0 {
        return Err(EntglError::ParamOutOfRange(format!(
            "isotropic parameter must be >= -1, got {beta}"
        )));
    }
    let norm = (d * d) as f64 + beta;
    let m = ComplexMatrix::identity(d * d)
        .add(&max_entangled_projector(d).scale(Complex64::new(beta, 0.0)))
        .scale(Complex64::new(1.0 / norm, 0.0));
    let mut n = d;
    for cand in 1..d {
        let upper = d as f64 * (cand as f64 * d as f64 - 1.0) / (d as f64 - cand as f64);
        if beta <= upper {
            n = cand;
            break;
        }
    }
    let mut point = FamilyPoint::new(Family::Isotropic, QuantumState::new(m, vec![d, d])?)
        .with_param("d", d as f64)
        .with_param("beta", beta)
        .with_param("norm", norm)
        .with_flag("entangled", n > 1);
    point.schmidt_number = Some(n);
    Ok(point)
}

/// The 3 (x) 3 one-parameter family `(1/7)[2 P_+ + alpha s_+ + (5 - alpha) s_-]`
/// with `s_+ = (1/3)(|01><01| + |12><12| + |20><20|)` and `s_- = F s_+ F`.
/// PPT exactly for `1 <= alpha <= 4`, separable for `2 <= alpha <= 3`.
pub fn stormer(alpha: f64) -> Result<FamilyPoint> {
    if !(0.0..=5.0).contains(&alpha) {
        return Err(EntglError::ParamOutOfRange(format!(
            "stormer parameter must lie in [0, 5], got {alpha}"
        )));
    }
    let d = 3;
    let mut s_plus = ComplexMatrix::zeros(9, 9);
    for (i, j) in [(0usize, 1usize), (1, 2), (2, 0)] {
        let idx = i * d + j;
        s_plus.set(idx, idx, Complex64::new(1.0 / 3.0, 0.0));
    }
    let f = swap_operator(d);
    let s_minus = f.matmul(&s_plus).matmul(&f);
    let m = max_entangled_projector(d)
        .scale(Complex64::new(2.0, 0.0))
        .add(&s_plus.scale(Complex64::new(alpha, 0.0)))
        .add(&s_minus.scale(Complex64::new(5.0 - alpha, 0.0)))
        .scale(Complex64::new(1.0 / 7.0, 0.0));
    Ok(FamilyPoint::new(Family::Stormer, QuantumState::new(m, vec![d, d])?)
        .with_param("alpha", alpha)
        .with_param("norm", 7.0)
        .with_flag("ppt", (1.0..=4.0).contains(&alpha))
        .with_flag("separable", (2.0..=3.0).contains(&alpha)))
}

/// The chessboard state on 3 (x) 3: the displayed 9x9 integer matrix over 12.
pub fn chessboard() -> FamilyPoint {
    #[rustfmt::skip]
    let raw: [f64; 81] = [
        1.0,  0.0,  1.0,  0.0,  0.0,  0.0,  1.0,  0.0, 0.0,
        0.0,  1.0,  0.0,  0.0,  0.0, -1.0,  0.0, -1.0, 0.0,
        1.0,  0.0,  2.0,  0.0, -1.0,  0.0,  0.0,  0.0, 0.0,
        0.0,  0.0,  0.0,  1.0,  0.0, -1.0,  0.0,  1.0, 0.0,
        0.0,  0.0, -1.0,  0.0,  1.0,  0.0,  1.0,  0.0, 0.0,
        0.0, -1.0,  0.0, -1.0,  0.0,  2.0,  0.0,  0.0, 0.0,
        1.0,  0.0,  0.0,  0.0,  1.0,  0.0,  2.0,  0.0, 0.0,
        0.0, -1.0,  0.0,  1.0,  0.0,  0.0,  0.0,  2.0, 0.0,
        0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0, 0.0,
    ];
    let m = ComplexMatrix::from_real(9, 9, &raw)
        .expect("9x9 literal")
        .scale(Complex64::new(1.0 / 12.0, 0.0));
    let state = QuantumState::new(m, vec![3, 3]).expect("valid chessboard state");
    FamilyPoint::new(Family::Chessboard, state)
        .with_param("norm", 12.0)
        .with_flag("ppt", true)
        .with_flag("entangled", true)
}

/// The five-vector unextendible product basis on 3 (x) 3 and its bound
/// entangled state `(1 - sum_j |psi_j><psi_j|) / 4`.
pub fn tiles_upb() -> (Vec<crate::qstate::PureStateVector>, FamilyPoint) {
    let d = 3usize;
    let s = 1.0 / 2f64.sqrt();
    let t = 1.0 / 3.0;
    let build = |coeffs: &[(usize, usize, f64)]| {
        let mut amps = vec![C_ZERO; 9];
        for &(i, j, c) in coeffs {
            amps[i * d + j] = Complex64::new(c, 0.0);
        }
        crate::qstate::PureStateVector::new(amps, d, d).expect("unit UPB vector")
    };
    let vectors = vec![
        // |0> (|0> - |1>) / sqrt 2
        build(&[(0, 0, s), (0, 1, -s)]),
        // (|0> - |1>) |2> / sqrt 2
        build(&[(0, 2, s), (1, 2, -s)]),
        // |2> (|1> - |2>) / sqrt 2
        build(&[(2, 1, s), (2, 2, -s)]),
        // (|1> - |2>) |0> / sqrt 2
        build(&[(1, 0, s), (2, 0, -s)]),
        // (|0>+|1>+|2>)(|0>+|1>+|2>) / 3
        build(&[
            (0, 0, t),
            (0, 1, t),
            (0, 2, t),
            (1, 0, t),
            (1, 1, t),
            (1, 2, t),
            (2, 0, t),
            (2, 1, t),
            (2, 2, t),
        ]),
    ];
    let mut sum = ComplexMatrix::zeros(9, 9);
    for v in &vectors {
        let proj = ComplexMatrix::from_fn(9, 9, |i, j| {
            v.amplitudes()[i] * v.amplitudes()[j].conj()
        });
        sum = sum.add(&proj);
    }
    let m = ComplexMatrix::identity(9)
        .sub(&sum)
        .scale(Complex64::new(0.25, 0.0));
    let state = QuantumState::new(m, vec![3, 3]).expect("valid UPB state");
    let point = FamilyPoint::new(Family::TilesUpb, state)
        .with_flag("ppt", true)
        .with_flag("entangled", true);
    (vectors, point)
}

fn edge_state(raw: &[f64; 81], family: Family) -> FamilyPoint {
    let m = ComplexMatrix::from_real(9, 9, raw)
        .expect("9x9 literal")
        .scale(Complex64::new(1.0 / 13.0, 0.0));
    let state = QuantumState::new(m, vec![3, 3]).expect("valid edge state");
    FamilyPoint::new(family, state)
        .with_param("norm", 13.0)
        .with_flag("ppt", true)
        .with_flag("entangled", true)
}

/// The (5,5) edge state: rank 5 with rank-5 partial transpose.
pub fn edge55() -> FamilyPoint {
    #[rustfmt::skip]
    let raw: [f64; 81] = [
        0.0,  0.0,  0.0,  0.0, 0.0,  0.0,  0.0,  0.0,  0.0,
        0.0,  2.0, -1.0,  0.0, 0.0,  0.0,  0.0,  0.0,  1.0,
        0.0, -1.0,  1.0,  0.0, 0.0,  0.0,  0.0,  0.0, -1.0,
        0.0,  0.0,  0.0,  3.0, 0.0, -1.0, -1.0,  0.0,  0.0,
        0.0,  0.0,  0.0,  0.0, 0.0,  0.0,  0.0,  0.0,  0.0,
        0.0,  0.0,  0.0, -1.0, 0.0,  1.0,  1.0,  0.0,  0.0,
        0.0,  0.0,  0.0, -1.0, 0.0,  1.0,  1.0,  0.0,  0.0,
        0.0,  0.0,  0.0,  0.0, 0.0,  0.0,  0.0,  2.0, -2.0,
        0.0,  1.0, -1.0,  0.0, 0.0,  0.0,  0.0, -2.0,  3.0,
    ];
    edge_state(&raw, Family::Edge55)
}

/// The (6,6) edge state: rank 6 with rank-6 partial transpose.
pub fn edge66() -> FamilyPoint {
    #[rustfmt::skip]
    let raw: [f64; 81] = [
         1.0,  0.0, 0.0,  0.0, 0.0,  0.0, 0.0,  0.0, -1.0,
         0.0,  2.0, 0.0, -1.0, 0.0,  0.0, 0.0,  0.0,  0.0,
         0.0,  0.0, 1.0,  0.0, 0.0,  0.0, 1.0,  0.0,  0.0,
         0.0, -1.0, 0.0,  1.0, 0.0,  0.0, 0.0,  0.0,  1.0,
         0.0,  0.0, 0.0,  0.0, 1.0,  0.0, 1.0,  0.0,  0.0,
         0.0,  0.0, 0.0,  0.0, 0.0,  1.0, 0.0, -1.0,  0.0,
         0.0,  0.0, 1.0,  0.0, 1.0,  0.0, 2.0,  0.0,  0.0,
         0.0,  0.0, 0.0,  0.0, 0.0, -1.0, 0.0,  1.0,  0.0,
        -1.0,  0.0, 0.0,  1.0, 0.0,  0.0, 0.0,  0.0,  3.0,
    ];
    edge_state(&raw, Family::Edge66)
}

fn uuvvf_admissible(d: f64, eps: f64, delta: f64) -> bool {
    let i1 = (d - 1.0) * (d - 1.0) + 2.0 * eps * d * (d - 1.0) + delta * d * d;
    let i2 = d * d - 1.0 + 2.0 * eps * d - delta * d * d;
    let i3 = (d + 1.0) * (d + 1.0) - 2.0 * eps * d * (d + 1.0) + delta * d * d;
    i1 >= -1e-12 && i2 >= -1e-12 && i3 >= -1e-12
}

/// Two-parameter invariant family on two d (x) d pairs:
/// `1 (x) 1 + ((eps d - 1)/d)(1 (x) F + F (x) 1) + ((1 - 2 eps d + delta d^2)/d^2) F (x) F`,
/// trace-normalized, as a bipartite state on (d^2, d^2) with the factors
/// grouped as (A1 A2 | B1 B2). The in-memory construction order is
/// (A1, B1, A2, B2); the pair operators act on (A1 B1) and (A2 B2).
pub fn uuvvf(d: usize, eps: f64, delta: f64) -> Result<FamilyPoint> {
    if d < 2 {
        return Err(EntglError::ParamOutOfRange("uuvvf needs d >= 2".into()));
    }
    let df = d as f64;
    if !uuvvf_admissible(df, eps, delta) {
        return Err(EntglError::ParamOutOfRange(format!(
            "uuvvf parameters (eps = {eps}, delta = {delta}) violate the admissibility inequalities"
        )));
    }
    let id_pair = ComplexMatrix::identity(d * d);
    let f_pair = swap_operator(d);
    let c1 = (eps * df - 1.0) / df;
    let c2 = (1.0 - 2.0 * eps * df + delta * df * df) / (df * df);
    let m = kron(&id_pair, &id_pair)
        .add(&kron(&id_pair, &f_pair).scale(Complex64::new(c1, 0.0)))
        .add(&kron(&f_pair, &id_pair).scale(Complex64::new(c1, 0.0)))
        .add(&kron(&f_pair, &f_pair).scale(Complex64::new(c2, 0.0)));
    // regroup (A1, B1, A2, B2) -> (A1, A2, B1, B2)
    let grouped = reorder_subsystems(&m, &[d, d, d, d], &[0, 2, 1, 3]);
    let norm = grouped.trace().re;
    let state = QuantumState::new(
        grouped.scale(Complex64::new(1.0 / norm, 0.0)),
        vec![d * d, d * d],
    )?;
    let psi_a = df * df + 3.0 * df * (eps * df - 1.0) + 2.0 * (1.0 - 2.0 * eps * df + delta * df * df);
    Ok(FamilyPoint::new(Family::Uuvvf, state)
        .with_param("d", df)
        .with_param("eps", eps)
        .with_param("delta", delta)
        .with_param("norm", norm)
        .with_flag("entangled", eps < 0.0 || delta < 0.0)
        .with_flag("separable", eps >= 0.0 && delta >= 0.0)
        .with_flag("one_distillable_psi_a", psi_a < 0.0)
        .with_flag("one_distillable_psi_b", eps < 1.0 / df - 0.5)
        .with_flag("one_distillable_psi_c", delta < 1.0 / (df * df) - 0.5))
}

/// Parameter map of projecting two copies of a uuvvf state onto the pair
/// of maximally entangled states across the copies.
pub fn uuvvf_two_copy_recursion(eps: f64, delta: f64, d: usize) -> (f64, f64) {
    let df = d as f64;
    let den = df * df * eps * eps + df * df - 1.0;
    let eps_next = eps * (df * df * delta + df * df - 1.0) / den;
    let delta_next = (eps * eps * (df * df - 1.0) + df * df * delta * delta) / den;
    (eps_next, delta_next)
}

/// The Watrous slice of the family: `1 - 2 eps d + delta d^2 = d^2`, i.e.
/// the coefficient of F (x) F is 1. Entangled iff eps < 0, 1-distillable
/// iff eps < 1/d - 1/2.
pub fn watrous(d: usize, eps: f64) -> Result<FamilyPoint> {
    let df = d as f64;
    if !(eps > 1.0 / df - 1.0 && eps < 1.0 + 1.0 / df) {
        return Err(EntglError::ParamOutOfRange(format!(
            "watrous parameter must lie in (1/d - 1, 1 + 1/d), got {eps}"
        )));
    }
    let delta = (df * df - 1.0 + 2.0 * eps * df) / (df * df);
    let mut point = uuvvf(d, eps, delta)?;
    point.family = Family::Watrous;
    point.flags.insert("entangled".into(), eps < 0.0);
    point
        .flags
        .insert("one_distillable".into(), eps < 1.0 / df - 0.5);
    Ok(point)
}

/// The asymmetric two-pair family on (m, d) with `3 <= m < d`: NPT iff
/// `eps < 0` or `delta < 0`; carries the PPT-entanglement flag
/// `eps m^2 (d^2 - 1) + d m delta (m - d) < 0`.
pub fn rainbow(m: usize, d: usize, eps: f64, delta: f64) -> Result<FamilyPoint> {
    if !(3 <= m && m < d) {
        return Err(EntglError::ParamOutOfRange(format!(
            "rainbow needs 3 <= m < d, got m = {m}, d = {d}"
        )));
    }
    let (mf, df) = (m as f64, d as f64);
    let i1 = 1.0 + delta + 2.0 * eps + 1.0 / (mf * df) - (eps + 1.0) * (mf + df) / (mf * df);
    let i2 = 1.0 - 1.0 / (mf * df) + eps * (mf + df) / (mf * df) - delta + 1.0 / mf - 1.0 / df;
    let i3 = 1.0 + delta - 2.0 * eps + 1.0 / (mf * df) + (1.0 - eps) * (mf + df) / (mf * df);
    // the mirrored sign pattern of i2; required for positivity of the
    // fourth joint eigenspace of the two swaps and strictly tighter than
    // i2 whenever m < d
    let i4 = 1.0 - 1.0 / (mf * df) + eps * (mf + df) / (mf * df) - delta - 1.0 / mf + 1.0 / df;
    if i1 < -1e-12 || i2 < -1e-12 || i3 < -1e-12 || i4 < -1e-12 {
        return Err(EntglError::ParamOutOfRange(format!(
            "rainbow parameters (eps = {eps}, delta = {delta}) violate the admissibility inequalities"
        )));
    }
    let id_m = ComplexMatrix::identity(m * m);
    let f_m = swap_operator(m);
    let id_d = ComplexMatrix::identity(d * d);
    let f_d = swap_operator(d);
    let m_op = kron(&id_m, &id_d)
        .add(&kron(&id_m, &f_d).scale(Complex64::new((df * eps - 1.0) / df, 0.0)))
        .add(&kron(&f_m, &id_d).scale(Complex64::new((mf * eps - 1.0) / mf, 0.0)))
        .add(&kron(&f_m, &f_d).scale(Complex64::new(
            (1.0 - (mf + df) * eps + df * mf * delta) / (df * mf),
            0.0,
        )));
    // memory order (A1, B1, A2, B2) with dim m on the first pair; regroup
    let grouped = reorder_subsystems(&m_op, &[m, m, d, d], &[0, 2, 1, 3]);
    let norm = grouped.trace().re;
    let state = QuantumState::new(
        grouped.scale(Complex64::new(1.0 / norm, 0.0)),
        vec![m * d, m * d],
    )?;
    let ppt_ent = rainbow_ppt_entangled_flag(m, d, eps, delta);
    Ok(FamilyPoint::new(Family::Rainbow, state)
        .with_param("m", mf)
        .with_param("d", df)
        .with_param("eps", eps)
        .with_param("delta", delta)
        .with_param("norm", norm)
        .with_flag("npt", eps < 0.0 || delta < 0.0)
        .with_flag("ppt_entangled", !(eps < 0.0 || delta < 0.0) && ppt_ent))
}

/// Witness inequality for PPT entanglement of the rainbow family:
/// `eps m^2 (d^2 - 1) + d m delta (m - d) < 0`.
pub fn rainbow_ppt_entangled_flag(m: usize, d: usize, eps: f64, delta: f64) -> bool {
    let (mf, df) = (m as f64, d as f64);
    eps * mf * mf * (df * df - 1.0) + df * mf * delta * (mf - df) < 0.0
}

/// The four Bell vectors: `B_ij` with phase index i and shift index j.
pub fn bell_vector(phase: u8, shift: u8) -> Vec<Complex64> {
    let s = 1.0 / 2f64.sqrt();
    let sign = if phase == 0 { 1.0 } else { -1.0 };
    let mut v = vec![C_ZERO; 4];
    if shift == 0 {
        v[0] = Complex64::new(s, 0.0); // |00>
        v[3] = Complex64::new(sign * s, 0.0); // |11>
    } else {
        v[1] = Complex64::new(s, 0.0); // |01>
        v[2] = Complex64::new(sign * s, 0.0); // |10>
    }
    v
}

/// Bell-diagonal two-qubit state with weights ordered
/// `(p_00, p_01, p_10, p_11)`.
pub fn bell_diagonal(p: [f64; 4]) -> Result<FamilyPoint> {
    if p.iter().any(|&x| x < -1e-15) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(EntglError::ParamOutOfRange(format!(
            "bell weights must be a probability vector, got {p:?}"
        )));
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    let order = [(0u8, 0u8), (0, 1), (1, 0), (1, 1)];
    for (w, (i, j)) in p.iter().zip(order) {
        let v = bell_vector(i, j);
        for r in 0..4 {
            for c in 0..4 {
                let val = m.get(r, c) + Complex64::new(*w, 0.0) * v[r] * v[c].conj();
                m.set(r, c, val);
            }
        }
    }
    Ok(
        FamilyPoint::new(Family::BellDiagonal, QuantumState::new(m, vec![2, 2])?)
            .with_param("p00", p[0])
            .with_param("p01", p[1])
            .with_param("p10", p[2])
            .with_param("p11", p[3])
            .with_flag("one_distillable", p[0] > 0.5),
    )
}

/// Maximally correlated state `sum_ij a_ij |ii><jj|` from a density-matrix
/// coefficient block.
pub fn max_correlated(coeff: &ComplexMatrix) -> Result<FamilyPoint> {
    if !coeff.is_square() {
        return Err(EntglError::NotSquare {
            rows: coeff.n_rows(),
            cols: coeff.n_cols(),
        });
    }
    let d = coeff.n_rows();
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m.set(i * d + i, j * d + j, coeff.get(i, j));
        }
    }
    Ok(
        FamilyPoint::new(Family::MaxCorrelated, QuantumState::new(m, vec![d, d])?)
            .with_param("d", d as f64),
    )
}

/// `Z = sum_i |ii><ii|`, re-exported here for family arithmetic.
pub fn correlation_projector(d: usize) -> ComplexMatrix {
    diag_correlation_projector(d)
}
