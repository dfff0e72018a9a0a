//! Random-state sampling under the product measure (uniform simplex
//! eigenvalues times Haar unitaries) and the volume-of-distillable-states
//! experiment.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distill;
use crate::error::EntglError;
use crate::linalg;
use crate::qstate::{partial_transpose, ComplexMatrix, QuantumState, C_ZERO};
use crate::{tol, Result};

/// SplitMix64 avalanche. Doubles as the stream-derivation hash: derived
/// streams are `Stream::new(mix(seed, index))`, which keeps every command
/// reproducible for a fixed seed regardless of thread count.
#[inline]
pub fn avalanche(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a master seed with a stream index.
#[inline]
pub fn mix(seed: u64, index: u64) -> u64 {
    avalanche(seed ^ avalanche(index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

/// Deterministic SplitMix64 random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
    spare_normal: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare_normal: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        avalanche(self.state)
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(v) = self.spare_normal.take() {
            return v;
        }
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Complex Gaussian with independent N(0,1) parts.
    #[inline]
    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phase
/// correction that makes the R-diagonal positive (equivalent to the polar
/// method).
pub fn haar_unitary(d: usize, stream: &mut Stream) -> ComplexMatrix {
    assert!(d >= 1);
    let entries: Vec<Complex64> = (0..d * d).map(|_| stream.complex_normal()).collect();
    let g = ComplexMatrix::new(d, d, entries).expect("finite Gaussian entries");
    let (q, r) = qr_decompose(&g);
    let mut u = q;
    for j in 0..d {
        let rjj = r.get(j, j);
        let phase = if rjj.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            rjj / rjj.norm()
        };
        for i in 0..d {
            u.set(i, j, u.get(i, j) * phase);
        }
    }
    u
}

/// Householder QR of a square complex matrix: `A = Q R`.
fn qr_decompose(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.n_rows();
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n {
        // Householder vector for column k
        let mut x: Vec<Complex64> = (k..n).map(|i| r.get(i, k)).collect();
        let norm_x: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let alpha = if x[0].norm() == 0.0 {
            Complex64::new(-norm_x, 0.0)
        } else {
            -(x[0] / x[0].norm()) * norm_x
        };
        x[0] -= alpha;
        let v_norm_sq: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sq == 0.0 {
            continue;
        }
        // apply H = I - 2 v v^dagger / |v|^2 to R (left) and accumulate in Q
        for col in 0..n {
            let dot: Complex64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| v.conj() * r.get(k + i, col))
                .sum();
            let f = dot * (2.0 / v_norm_sq);
            for (i, v) in x.iter().enumerate() {
                let val = r.get(k + i, col) - f * v;
                r.set(k + i, col, val);
            }
        }
        for row in 0..n {
            let dot: Complex64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| q.get(row, k + i) * *v)
                .sum();
            let f = dot * (2.0 / v_norm_sq);
            for (i, v) in x.iter().enumerate() {
                let val = q.get(row, k + i) - f * v.conj();
                q.set(row, k + i, val);
            }
        }
    }
    (q, r)
}

/// Uniform point on the probability simplex via sorted-uniform spacings,
/// renormalized so the sum is exactly 1.
pub fn simplex_eigenvalues(n: usize, stream: &mut Stream) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![1.0];
    }
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| stream.uniform()).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::with_capacity(n);
    let mut prev = 0.0;
    for &c in &cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(1.0 - prev);
    let sum: f64 = out.iter().sum();
    for x in &mut out {
        *x /= sum;
    }
    out
}

/// Random density matrix `U diag(lambda) U^dagger` with simplex-uniform
/// eigenvalues and Haar-random eigenbasis.
pub fn random_density(dims: &[usize], stream: &mut Stream) -> QuantumState {
    let n: usize = dims.iter().product();
    assert!(n >= 2);
    let lambda = simplex_eigenvalues(n, stream);
    let u = haar_unitary(n, stream);
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C_ZERO;
            for k in 0..n {
                acc += u.get(i, k) * lambda[k] * u.get(j, k).conj();
            }
            m.set(i, j, acc);
        }
    }
    QuantumState::from_trusted(m, dims.to_vec())
}

/// Per-trial outcome of the volume experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub ppt: bool,
    /// 1-based index of the first detecting random test, when detection
    /// happened during the test phase.
    pub detection_test_index: Option<usize>,
    /// Whether the state was detected at all (tests or local optimization).
    pub detected: bool,
    pub min_eigenvalue_found: f64,
}

/// Aggregate report of a volume run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeReport {
    pub d: usize,
    pub n_states: usize,
    pub n_tests_per_state: usize,
    pub opt_steps: usize,
    pub seed: u64,
    pub frac_ppt: f64,
    /// Fraction of NPT states never detected by the search.
    pub frac_npt_undetected: f64,
    /// Cumulative fraction of NPT states first detected at or before each
    /// test index (1-based).
    pub detection_curve: Vec<(usize, f64)>,
    pub wall_time_s: f64,
}

/// Sample `n_states` states on d (x) d, classify PPT versus NPT, and run
/// the randomized 1-distillability search on every NPT state.
pub fn volume_experiment(
    d: usize,
    n_states: usize,
    n_tests: usize,
    opt_steps: usize,
    seed: u64,
) -> Result<VolumeReport> {
    if !(2..=7).contains(&d) {
        return Err(EntglError::ParamOutOfRange(format!(
            "volume experiment supports 2 <= d <= 7, got {d}"
        )));
    }
    let start = std::time::Instant::now();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let records: Vec<ExperimentRecord> = (0..n_states)
        .into_par_iter()
        .map(|idx| {
            let mut stream = Stream::new(mix(seed, idx as u64));
            let state = random_density(&[d, d], &mut stream);
            let pt = partial_transpose(&state, 1).expect("bipartite by construction");
            let min_pt = linalg::herm_eigenvalues(&pt)[0];
            let rec = if min_pt >= -tol::PSD {
                ExperimentRecord {
                    ppt: true,
                    detection_test_index: None,
                    detected: false,
                    min_eigenvalue_found: min_pt,
                }
            } else {
                let outcome = distill::search_first_detection(
                    &pt,
                    (d, d),
                    n_tests,
                    opt_steps,
                    mix(seed, idx as u64),
                );
                ExperimentRecord {
                    ppt: false,
                    detection_test_index: outcome.first_test_index,
                    detected: outcome.detected,
                    min_eigenvalue_found: outcome.min_value,
                }
            };
            let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            if k % 1000 == 0 {
                eprintln!("volume d={d}: {k}/{n_states} states processed");
            }
            rec
        })
        .collect();

    let n_ppt = records.iter().filter(|r| r.ppt).count();
    let npt: Vec<&ExperimentRecord> = records.iter().filter(|r| !r.ppt).collect();
    let n_npt = npt.len().max(1);
    let undetected = npt.iter().filter(|r| !r.detected).count();
    let mut first_counts = vec![0usize; n_tests + 1];
    for r in &npt {
        if let Some(i) = r.detection_test_index {
            first_counts[i] += 1;
        }
    }
    let mut curve = Vec::with_capacity(n_tests);
    let mut cum = 0usize;
    for i in 1..=n_tests {
        cum += first_counts[i];
        curve.push((i, cum as f64 / n_npt as f64));
    }
    Ok(VolumeReport {
        d,
        n_states,
        n_tests_per_state: n_tests,
        opt_steps,
        seed,
        frac_ppt: n_ppt as f64 / n_states as f64,
        frac_npt_undetected: undetected as f64 / n_npt as f64,
        detection_curve: curve,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
