//! Pure-state transformation laws and the closed-form update rules of the
//! mixed-state distillation protocols.
//!
//! Throughout this module, spectra are the squared Schmidt coefficients
//! (probability vectors, descending). `SchmidtData` from a decomposition is
//! converted with `squared_spectrum`.

use serde::{Deserialize, Serialize};

use crate::error::EntglError;
use crate::qstate::SchmidtData;
use crate::Result;

/// Squared-coefficient spectrum of a decomposition, descending.
pub fn squared_spectrum(sd: &SchmidtData) -> Vec<f64> {
    let mut v: Vec<f64> = sd.coefficients.iter().map(|c| c * c).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

fn check_spectrum(p: &[f64]) -> Result<Vec<f64>> {
    if p.is_empty() || p.iter().any(|&x| x < -1e-12) {
        return Err(EntglError::ParamOutOfRange(
            "spectrum entries must be nonnegative".into(),
        ));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(EntglError::ParamOutOfRange(format!(
            "spectrum sums to {sum}, not 1"
        )));
    }
    let mut v = p.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(v)
}

/// Entanglement monotone `E_k = sum_{i >= k} lambda_i` (1-based k).
fn e_k(p: &[f64], k: usize) -> f64 {
    p.iter().skip(k - 1).sum()
}

/// Deterministic convertibility: the transformation succeeds with
/// certainty iff the target spectrum majorizes the source.
pub fn nielsen_feasible(source: &[f64], target: &[f64]) -> Result<bool> {
    let s = check_spectrum(source)?;
    let t = check_spectrum(target)?;
    let len = s.len().max(t.len());
    let mut ps = 0.0;
    let mut pt = 0.0;
    for k in 0..len {
        ps += s.get(k).copied().unwrap_or(0.0);
        pt += t.get(k).copied().unwrap_or(0.0);
        if pt < ps - 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Optimal probability of converting source into target:
/// `p = min_{k >= 2} E_k(source) / E_k(target)`, clamped to [0, 1].
pub fn max_conversion_prob(source: &[f64], target: &[f64]) -> Result<f64> {
    let s = check_spectrum(source)?;
    let t = check_spectrum(target)?;
    let len = s.len().max(t.len());
    let mut best = f64::INFINITY;
    for k in 2..=len {
        let et = e_k(&t, k);
        if et > 1e-15 {
            best = best.min(e_k(&s, k) / et);
        }
    }
    if !best.is_finite() {
        // target is a product state
        return Ok(1.0);
    }
    Ok(best.clamp(0.0, 1.0))
}

/// Optimal single-copy concentration: produces a maximally entangled
/// j-level state with probability `p_j = j (lambda_j - lambda_{j+1})`;
/// the average yield is `sum p_j log2 j`.
pub fn optimal_concentration(spectrum: &[f64]) -> Result<(Vec<f64>, f64)> {
    let p = check_spectrum(spectrum)?;
    let d = p.len();
    let mut probs = Vec::with_capacity(d);
    let mut avg = 0.0;
    for j in 1..=d {
        let next = if j < d { p[j] } else { 0.0 };
        let pj = j as f64 * (p[j - 1] - next);
        probs.push(pj);
        avg += pj * (j as f64).log2();
    }
    Ok((probs, avg))
}

/// Deterministic distillable entanglement `-log2 lambda_1`.
pub fn e_det(spectrum: &[f64]) -> Result<f64> {
    let p = check_spectrum(spectrum)?;
    Ok(-p[0].log2())
}

/// One round of the two-pair recurrence protocol on isotropic qubit pairs:
/// the kept pair's fidelity moves to
/// `(9 Y^2 + (1-Y)^2) / (9 Y^2 + 6 Y (1-Y) + 5 (1-Y)^2)`.
pub fn recurrence_step(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(EntglError::ParamOutOfRange(format!(
            "fidelity must lie in [0, 1], got {y}"
        )));
    }
    let q = 1.0 - y;
    Ok((9.0 * y * y + q * q) / (9.0 * y * y + 6.0 * y * q + 5.0 * q * q))
}

/// Iterate the recurrence map from y0 in (1/2, 1] until `1 - y < tol` or
/// the iteration cap; the trajectory is strictly increasing.
pub fn recurrence_iterate(y0: f64, tolerance: f64, max_iter: usize) -> Result<Vec<f64>> {
    if !(y0 > 0.5 && y0 <= 1.0) {
        return Err(EntglError::ParamOutOfRange(format!(
            "recurrence needs 1/2 < y0 <= 1, got {y0}"
        )));
    }
    let mut out = vec![y0];
    let mut y = y0;
    for _ in 0..max_iter {
        if 1.0 - y < tolerance {
            break;
        }
        y = recurrence_step(y)?;
        out.push(y);
    }
    Ok(out)
}

/// One round of the two-pair protocol on Bell-diagonal weights
/// `(p00, p01, p10, p11)`.
pub fn qpa_step(p: [f64; 4]) -> Result<[f64; 4]> {
    if p.iter().any(|&x| x < -1e-15) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(EntglError::ParamOutOfRange(format!(
            "weights must be a probability vector, got {p:?}"
        )));
    }
    let [p00, p01, p10, p11] = p;
    let norm = (p00 + p11) * (p00 + p11) + (p01 + p10) * (p01 + p10);
    Ok([
        (p00 * p00 + p11 * p11) / norm,
        (p01 * p01 + p10 * p10) / norm,
        2.0 * p01 * p10 / norm,
        2.0 * p00 * p11 / norm,
    ])
}

/// One full protocol round: the rotation step reorders the weights
/// descending (largest to `p00`) before the two-pair update.
pub fn qpa_round(p: [f64; 4]) -> Result<[f64; 4]> {
    let mut sorted = p;
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    qpa_step(sorted)
}

/// Bell-basis label: phase index and shift index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellIndex {
    pub phase: u8,
    pub shift: u8,
}

impl BellIndex {
    pub fn new(phase: u8, shift: u8) -> Self {
        assert!(phase <= 1 && shift <= 1, "Bell indices are bits");
        Self { phase, shift }
    }
}

/// Action of the bilateral XOR on a Bell pair:
/// `|B_ij> |B_kl| -> |B_{i xor k, j}> |B_{k, j xor l}>`.
pub fn bxor_bell(source: BellIndex, target: BellIndex) -> (BellIndex, BellIndex) {
    (
        BellIndex::new(source.phase ^ target.phase, source.shift),
        BellIndex::new(target.phase, source.shift ^ target.shift),
    )
}

/// Yield of the breeding protocol on a Bell-diagonal state: raw value
/// `1 - S(p)` (Shannon entropy in bits) and its clamp at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreedingYield {
    pub raw: f64,
    pub clamped: f64,
}

pub fn breeding_yield(p: [f64; 4]) -> Result<BreedingYield> {
    if p.iter().any(|&x| x < -1e-15) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(EntglError::ParamOutOfRange(format!(
            "weights must be a probability vector, got {p:?}"
        )));
    }
    let entropy: f64 = p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum();
    let raw = 1.0 - entropy;
    Ok(BreedingYield {
        raw,
        clamped: raw.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::Stream;
    use crate::qstate::{kron, ComplexMatrix, C_ZERO};
    use crate::zoo::bell_vector;
    use num_complex::Complex64;

    fn random_spectrum(len: usize, stream: &mut Stream) -> Vec<f64> {
        let mut v: Vec<f64> = (0..len).map(|_| stream.uniform() + 1e-6).collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    #[test]
    fn nielsen_examples() {
        assert!(nielsen_feasible(&[0.5, 0.5], &[0.7, 0.3]).unwrap());
        assert!(!nielsen_feasible(&[0.7, 0.3], &[0.5, 0.5]).unwrap());
        // partial sums: 0.5 >= 0.4 but 0.75 < 0.8
        assert!(!nielsen_feasible(&[0.4, 0.4, 0.2], &[0.5, 0.25, 0.25]).unwrap());
    }

    #[test]
    fn nielsen_matches_partial_sum_oracle() {
        let mut stream = Stream::new(91);
        for _ in 0..1000 {
            let da = 2 + (stream.next_u64() % 4) as usize;
            let db = 2 + (stream.next_u64() % 4) as usize;
            let s = random_spectrum(da, &mut stream);
            let t = random_spectrum(db, &mut stream);
            let got = nielsen_feasible(&s, &t).unwrap();
            // brute-force oracle over every prefix length
            let len = da.max(db);
            let mut ok = true;
            for k in 1..=len {
                let ps: f64 = s.iter().take(k).sum();
                let pt: f64 = t.iter().take(k).sum();
                if pt < ps - 1e-12 {
                    ok = false;
                    break;
                }
            }
            assert_eq!(got, ok);
        }
    }

    #[test]
    fn conversion_probability() {
        // qubit (cos^2, sin^2) -> Bell pair: p = 2 sin^2
        for theta in [0.3f64, 0.7, 1.0] {
            let c = theta.cos().powi(2);
            let s = theta.sin().powi(2);
            let (lo, hi) = if c >= s { (s, c) } else { (c, s) };
            let p = max_conversion_prob(&[hi, lo], &[0.5, 0.5]).unwrap();
            assert!((p - 2.0 * lo).abs() < 1e-12);
        }
        // feasible pairs convert with certainty
        assert_eq!(max_conversion_prob(&[0.5, 0.5], &[0.7, 0.3]).unwrap(), 1.0);
        // E_k arithmetic case
        let p = max_conversion_prob(&[0.5, 0.3, 0.2], &[1.0 / 3.0; 3]).unwrap();
        assert!((p - 0.6).abs() < 1e-12);
        // product target
        assert_eq!(max_conversion_prob(&[0.5, 0.5], &[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn conversion_consistency_with_nielsen() {
        let mut stream = Stream::new(92);
        for _ in 0..500 {
            let s = random_spectrum(3, &mut stream);
            let t = random_spectrum(3, &mut stream);
            let feasible = nielsen_feasible(&s, &t).unwrap();
            let p = max_conversion_prob(&s, &t).unwrap();
            if feasible {
                assert!((p - 1.0).abs() < 1e-9);
            } else {
                assert!(p < 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn concentration_examples() {
        let (p, avg) = optimal_concentration(&[0.25; 4]).unwrap();
        assert!((p[3] - 1.0).abs() < 1e-12);
        assert!((avg - 2.0).abs() < 1e-12);

        let (p, avg) = optimal_concentration(&[1.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert_eq!(avg, 0.0);

        let (p, avg) = optimal_concentration(&[0.5, 0.3, 0.2]).unwrap();
        assert!((p[0] - 0.2).abs() < 1e-12);
        assert!((p[1] - 0.2).abs() < 1e-12);
        assert!((p[2] - 0.6).abs() < 1e-12);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((avg - (0.2 + 0.6 * 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn concentration_distribution_and_entropy_bound() {
        let mut stream = Stream::new(93);
        for _ in 0..300 {
            let sp = random_spectrum(4, &mut stream);
            let (p, avg) = optimal_concentration(&sp).unwrap();
            assert!(p.iter().all(|&x| x >= -1e-12));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            let entropy: f64 = sp
                .iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| -x * x.log2())
                .sum();
            assert!(avg <= entropy + 1e-9);
        }
    }

    #[test]
    fn e_det_examples() {
        assert!((e_det(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(e_det(&[1.0]).unwrap(), 0.0);
        let v = e_det(&[0.5, 0.25, 0.25]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let entropy = 0.5f64.log2() * -0.5 + 2.0 * (0.25f64.log2() * -0.25);
        assert!(v <= entropy + 1e-12);
    }

    #[test]
    fn recurrence_fixed_points_and_growth() {
        assert!((recurrence_step(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((recurrence_step(0.5).unwrap() - 0.5).abs() < 1e-15);
        let y = recurrence_step(0.65).unwrap();
        assert!(y > 0.65);
        assert!(recurrence_step(1.2).is_err());
    }

    #[test]
    fn recurrence_fixed_point_structure() {
        // the only fixed points in [0.4, 1] are 1/2 and 1; slope < 1 at 1
        // (attractive) and > 1 at 1/2 (repulsive), by finite differences
        let mut roots = Vec::new();
        let n = 6000;
        for i in 0..n {
            let a = 0.4 + 0.6 * i as f64 / n as f64;
            let b = 0.4 + 0.6 * (i + 1) as f64 / n as f64;
            let fa = recurrence_step(a).unwrap() - a;
            let fb = recurrence_step(b).unwrap() - b;
            if fa == 0.0 || fa * fb < 0.0 {
                roots.push(0.5 * (a + b));
            }
        }
        // refine and compare against {1/2}; the fixed point at 1 sits on
        // the boundary
        assert!(roots.iter().any(|r| (r - 0.5).abs() < 1e-3));
        assert!(roots.iter().all(|r| (r - 0.5).abs() < 1e-3 || *r > 0.999));
        let h = 1e-6;
        let slope_at = |y: f64| {
            (recurrence_step(y + h).unwrap() - recurrence_step(y - h).unwrap()) / (2.0 * h)
        };
        assert!(slope_at(0.5) > 1.0);
        assert!(slope_at(1.0 - h) < 1.0);
    }

    #[test]
    fn recurrence_iteration() {
        let traj = recurrence_iterate(0.65, 1e-6, 200).unwrap();
        assert!(traj.len() <= 60);
        assert!(1.0 - traj.last().unwrap() < 1e-6);
        for w in traj.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert_eq!(recurrence_iterate(1.0, 1e-6, 10).unwrap().len(), 1);
        let traj = recurrence_iterate(0.51, 1e-6, 100_000).unwrap();
        for w in traj.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(recurrence_iterate(0.5, 1e-6, 10).is_err());
    }

    #[test]
    fn qpa_examples() {
        assert_eq!(qpa_step([1.0, 0.0, 0.0, 0.0]).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let out = qpa_step([0.25; 4]).unwrap();
        for x in out {
            assert!((x - 0.25).abs() < 1e-15);
        }
        // ordered input with p00 = 0.6 converges to the maximally
        // entangled corner under full rounds (rotation + update)
        let mut p = [0.6, 0.2, 0.15, 0.05];
        for _ in 0..64 {
            p = qpa_round(p).unwrap();
        }
        assert!(p[0] > 1.0 - 1e-6);
    }

    #[test]
    fn qpa_normalization_and_monotonicity() {
        // the protocol's rotation step hands the update an ordered weight
        // vector; monotonicity of p00 holds on those
        let mut stream = Stream::new(94);
        for _ in 0..1000 {
            let mut p = [0.0; 4];
            p[0] = 0.5 + 0.5 * stream.uniform();
            let mut rest: Vec<f64> = (0..3).map(|_| stream.uniform()).collect();
            let s: f64 = rest.iter().sum();
            rest.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for k in 0..3 {
                p[k + 1] = (1.0 - p[0]) * rest[k] / s;
            }
            let out = qpa_step(p).unwrap();
            assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(out[0] > p[0] - 1e-12, "{p:?} -> {out:?}");
        }
    }

    #[test]
    fn bxor_examples() {
        let id = bxor_bell(BellIndex::new(0, 0), BellIndex::new(0, 0));
        assert_eq!(id, (BellIndex::new(0, 0), BellIndex::new(0, 0)));
        let out = bxor_bell(BellIndex::new(1, 1), BellIndex::new(1, 0));
        assert_eq!(out, (BellIndex::new(0, 1), BellIndex::new(1, 1)));
    }

    #[test]
    fn bxor_matches_unitary_oracle() {
        // explicit 16x16 construction: XOR on Alice's halves (x) XOR on
        // Bob's halves, in the pair ordering (A1 B1 A2 B2)
        let xor = ComplexMatrix::from_real(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )
        .unwrap();
        // XOR_A (x) XOR_B in the ordering (A1, A2, B1, B2)
        let u_grouped = kron(&xor, &xor);
        for i in 0..2u8 {
            for j in 0..2u8 {
                for k in 0..2u8 {
                    for l in 0..2u8 {
                        // input |B_ij> (x) |B_kl> on (A1 B1 A2 B2)
                        let b1 = bell_vector(i, j);
                        let b2 = bell_vector(k, l);
                        let mut input = vec![C_ZERO; 16];
                        for x in 0..4 {
                            for y in 0..4 {
                                // (A1 B1) digits from b1, (A2 B2) from b2,
                                // memory order (A1, B1, A2, B2)
                                input[x * 4 + y] = b1[x] * b2[y];
                            }
                        }
                        // unitary acts on (A1, A2) and (B1, B2): reorder
                        // memory to (A1, A2, B1, B2) via perm, apply, return
                        let perm_in = reorder_vec(&input, &[2, 2, 2, 2], &[0, 2, 1, 3]);
                        let out = u_grouped.matvec(&perm_in);
                        let back = reorder_vec(&out, &[2, 2, 2, 2], &[0, 2, 1, 3]);
                        let (s, t) = bxor_bell(BellIndex::new(i, j), BellIndex::new(k, l));
                        let e1 = bell_vector(s.phase, s.shift);
                        let e2 = bell_vector(t.phase, t.shift);
                        for x in 0..4 {
                            for y in 0..4 {
                                let expect = e1[x] * e2[y];
                                assert!(
                                    (back[x * 4 + y] - expect).norm() < 1e-12,
                                    "B{i}{j} B{k}{l} mismatch at ({x},{y})"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    fn reorder_vec(v: &[Complex64], dims: &[usize], perm: &[usize]) -> Vec<Complex64> {
        let total: usize = dims.iter().product();
        let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
        let mut out = vec![C_ZERO; total];
        let mut digits = vec![0usize; dims.len()];
        let mut nd = vec![0usize; dims.len()];
        for (idx, &amp) in v.iter().enumerate() {
            crate::qstate::decompose(idx, dims, &mut digits);
            for k in 0..dims.len() {
                nd[k] = digits[perm[k]];
            }
            out[crate::qstate::compose(&nd, &new_dims)] = amp;
        }
        out
    }

    #[test]
    fn breeding_examples() {
        let y = breeding_yield([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(y.raw, 1.0);
        assert_eq!(y.clamped, 1.0);
        let y = breeding_yield([0.25; 4]).unwrap();
        assert!((y.raw + 1.0).abs() < 1e-12);
        assert_eq!(y.clamped, 0.0);
        // Bell-diagonal: yield equals S(rho_B) - S(rho) with rho_B = I/2
        let p = [0.85, 0.05, 0.05, 0.05];
        let y = breeding_yield(p).unwrap();
        let s: f64 = p.iter().map(|&x| -x * x.log2()).sum();
        assert!((y.raw - (1.0 - s)).abs() < 1e-12);
    }
}
