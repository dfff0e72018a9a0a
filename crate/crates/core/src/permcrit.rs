//! Permutation separability criteria: index-permutation maps on density
//! matrices, the trace-norm test, witness construction and the orbit
//! classification of independent criteria.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::EntglError;
use crate::linalg;
use crate::qstate::{compose, decompose, trace_norm, ComplexMatrix, QuantumState};
use crate::{Result};

/// One-line permutation of {1, .., 2r}; serialized as the 1-based
/// one-line array. Products are evaluated from left to right.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<u8>);

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_line().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<usize>::deserialize(deserializer)?;
        Permutation::from_one_line(&values).map_err(serde::de::Error::custom)
    }
}

impl Permutation {
    pub fn from_one_line(values: &[usize]) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in values {
            if v < 1 || v > n || seen[v - 1] {
                return Err(EntglError::InvariantViolation(format!(
                    "{values:?} is not a permutation of 1..{n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Self(values.iter().map(|&v| (v - 1) as u8).collect()))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n as u8).collect())
    }

    /// Global transposition: (1,2)(3,4)...(2r-1,2r).
    pub fn global_transpose(r: usize) -> Self {
        let mut v = Vec::with_capacity(2 * r);
        for w in 0..r {
            v.push(2 * w as u8 + 1);
            v.push(2 * w as u8);
        }
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 0-based image of a 0-based point.
    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.0[point] as usize
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Self(inv)
    }

    /// Left-to-right product: `(a.compose(b))(k) = b(a(k))`, apply `a`
    /// first, then `b`.
    pub fn compose(&self, then: &Self) -> Self {
        assert_eq!(self.0.len(), then.0.len());
        Self(self.0.iter().map(|&v| then.0[v as usize]).collect())
    }

    /// One-line notation with 1-based values.
    pub fn one_line(&self) -> Vec<usize> {
        self.0.iter().map(|&v| v as usize + 1).collect()
    }
}

/// A permutation criterion: an element of S_{2r} with the party count and
/// local dimension it is tested on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationCriterion {
    pub sigma: Permutation,
    pub r: usize,
    pub d: usize,
}

impl PermutationCriterion {
    pub fn new(sigma: Permutation, d: usize) -> Result<Self> {
        if sigma.len() % 2 != 0 || sigma.len() < 4 {
            return Err(EntglError::InvariantViolation(
                "permutation length must be an even number >= 4".into(),
            ));
        }
        if d < 2 {
            return Err(EntglError::ParamOutOfRange("local dimension must be >= 2".into()));
        }
        let r = sigma.len() / 2;
        Ok(Self { sigma, r, d })
    }

    pub fn from_one_line(values: &[usize], d: usize) -> Result<Self> {
        Self::new(Permutation::from_one_line(values)?, d)
    }

    /// Partial transposition of the last party: `[1 2 4 3]` for r = 2.
    pub fn partial_transpose(r: usize, d: usize) -> Self {
        let mut v: Vec<usize> = (1..=2 * r).collect();
        v.swap(2 * r - 2, 2 * r - 1);
        Self::from_one_line(&v, d).expect("valid by construction")
    }

    /// Realignment between the last two parties: `[1 3 2 4]` for r = 2.
    pub fn realignment(d: usize) -> Self {
        Self::from_one_line(&[1, 3, 2, 4], d).expect("valid by construction")
    }
}

/// Apply the index-permutation map: the output entry at multi-index
/// `(i_1 i_2, .., i_{2r-1} i_{2r})` (odd slots row digits, even slots
/// column digits per party) equals the input entry at the sigma-permuted
/// index vector.
pub fn apply_permutation(s: &QuantumState, c: &PermutationCriterion) -> Result<ComplexMatrix> {
    if s.dims().len() != c.r || s.dims().iter().any(|&d| d != c.d) {
        return Err(EntglError::DimensionMismatch(format!(
            "state dims {:?} do not match criterion on {} parties of dimension {}",
            s.dims(),
            c.r,
            c.d
        )));
    }
    Ok(apply_permutation_matrix(s.matrix(), c.r, c.d, &c.sigma))
}

/// Same index-permutation map on a raw matrix.
pub fn apply_permutation_matrix(
    m: &ComplexMatrix,
    r: usize,
    d: usize,
    sigma: &Permutation,
) -> ComplexMatrix {
    let total = d.pow(r as u32);
    assert_eq!(m.n_rows(), total);
    assert_eq!(sigma.len(), 2 * r);
    let dims = vec![d; r];
    let mut out = ComplexMatrix::zeros(total, total);
    let mut rd = vec![0usize; r];
    let mut cd = vec![0usize; r];
    let mut v = vec![0usize; 2 * r];
    let mut u_rd = vec![0usize; r];
    let mut u_cd = vec![0usize; r];
    for i in 0..total {
        decompose(i, &dims, &mut rd);
        for j in 0..total {
            decompose(j, &dims, &mut cd);
            for w in 0..r {
                v[2 * w] = rd[w];
                v[2 * w + 1] = cd[w];
            }
            for k in 0..r {
                u_rd[k] = v[sigma.apply(2 * k)];
                u_cd[k] = v[sigma.apply(2 * k + 1)];
            }
            out.set(i, j, m.get(compose(&u_rd, &dims), compose(&u_cd, &dims)));
        }
    }
    out
}

/// Trace norm of the permuted matrix; a value above 1 certifies
/// entanglement.
pub fn criterion_value(s: &QuantumState, c: &PermutationCriterion) -> Result<f64> {
    Ok(trace_norm(&apply_permutation(s, c)?))
}

/// Witness from a violated permutation criterion: with the singular value
/// decomposition `Lambda_sigma(rho) = U D V^dagger`,
/// `W = 1 - Lambda_{tau sigma^-1 tau}(V U^dagger)` Hermitianized, so that
/// `Tr(rho W) = 1 - ||Lambda_sigma(rho)||`.
pub fn permutation_witness(s: &QuantumState, c: &PermutationCriterion) -> Result<ComplexMatrix> {
    let permuted = apply_permutation(s, c)?;
    let (u, sv, v) = linalg::svd_full(&permuted);
    let value: f64 = sv.iter().sum();
    if value <= 1.0 + 1e-10 {
        return Err(EntglError::NotDetected(value));
    }
    let vu = v.matmul(&u.dagger());
    let tau = Permutation::global_transpose(c.r);
    let tilde = tau.compose(&c.sigma.inverse()).compose(&tau);
    let w0 = ComplexMatrix::identity(permuted.n_rows())
        .sub(&apply_permutation_matrix(&vu, c.r, c.d, &tilde));
    Ok(w0.add(&w0.dagger()).scale(Complex64::new(0.5, 0.0)))
}

/// The norm-preserving group: permutations of odd slots among themselves
/// and even slots among themselves, optionally composed with the global
/// transpose. Order 2 (r!)^2.
fn norm_preserving_group(r: usize) -> Vec<Permutation> {
    let odd_perms = all_permutations(r);
    let tau = Permutation::global_transpose(r);
    let mut out = Vec::with_capacity(2 * odd_perms.len() * odd_perms.len());
    for alpha in &odd_perms {
        for beta in &odd_perms {
            let mut v = vec![0u8; 2 * r];
            for w in 0..r {
                v[2 * w] = 2 * alpha[w] as u8;
                v[2 * w + 1] = 2 * beta[w] as u8 + 1;
            }
            let t = Permutation(v);
            out.push(t.compose(&tau));
            out.push(t);
        }
    }
    out
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permutations(&mut cur, n, &mut out);
    out
}

fn heap_permutations(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(cur, k - 1, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

const TAG_PARTY_CAP: usize = 6;
const CLASSIFY_PARTY_CAP: usize = 4;

/// Canonical tag: the lexicographically smallest element of
/// `{ g sigma t : g in {e, tau}, t in T }` where T is the norm-preserving
/// group. Two criteria are dependent iff their tags coincide.
pub fn canonical_tag(c: &PermutationCriterion) -> Result<Permutation> {
    if c.r > TAG_PARTY_CAP {
        return Err(EntglError::PartyCountTooLarge(c.r, TAG_PARTY_CAP));
    }
    let group = norm_preserving_group(c.r);
    let tau = Permutation::global_transpose(c.r);
    let mut best: Option<Permutation> = None;
    for g in [Permutation::identity(2 * c.r), tau] {
        let gs = g.compose(&c.sigma);
        for t in &group {
            let e = gs.compose(t);
            if best.as_ref().map_or(true, |b| e < *b) {
                best = Some(e);
            }
        }
    }
    Ok(best.expect("group is nonempty"))
}

/// Classification of the independent permutation criteria for `r` parties.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionClassification {
    pub r: usize,
    pub orbit_count: usize,
    /// Lexicographically smallest element of each orbit, in lexicographic
    /// order. The first one is always the identity (the trivial criterion).
    pub representatives: Vec<Permutation>,
    pub includes_identity: bool,
}

/// Enumerate all of S_{2r} and group criteria into dependence orbits.
pub fn classify_independent(r: usize) -> Result<CriterionClassification> {
    if !(2..=CLASSIFY_PARTY_CAP).contains(&r) {
        return Err(EntglError::PartyCountTooLarge(r, CLASSIFY_PARTY_CAP));
    }
    let n = 2 * r;
    let group = norm_preserving_group(r);
    let tau = Permutation::global_transpose(r);
    let id = Permutation::identity(n);
    let total: usize = (1..=n).product();
    let mut visited = vec![false; total];
    let mut representatives = Vec::new();

    // Walk S_{2r} in lexicographic order; the first unvisited element of an
    // orbit is its lexicographic minimum, hence the representative.
    let mut cur: Vec<u8> = (0..n as u8).collect();
    loop {
        let rank = lehmer_rank(&cur);
        if !visited[rank] {
            let sigma = Permutation(cur.clone());
            for g in [&id, &tau] {
                let gs = g.compose(&sigma);
                for t in &group {
                    visited[lehmer_rank(&gs.compose(t).0)] = true;
                }
            }
            representatives.push(sigma);
        }
        if !next_permutation(&mut cur) {
            break;
        }
    }
    let includes_identity = representatives.first() == Some(&id);
    Ok(CriterionClassification {
        r,
        orbit_count: representatives.len(),
        representatives,
        includes_identity,
    })
}

/// Number of orbits predicted by the counting formula
/// `(1/4)[C(2r, r) + 2^r + C(r, r/2) even(r)]`, identity included.
pub fn predicted_orbit_count(r: usize) -> usize {
    let binom = |n: usize, k: usize| -> usize {
        let mut acc = 1usize;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    };
    let even_term = if r % 2 == 0 { binom(r, r / 2) } else { 0 };
    (binom(2 * r, r) + (1 << r) + even_term) / 4
}

fn lehmer_rank(p: &[u8]) -> usize {
    let n = p.len();
    let mut rank = 0usize;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

fn next_permutation(p: &mut [u8]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Report of trace-norm collisions observed during random testing; see the
/// classification notes. Collisions are reported, never used to merge
/// orbits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormCollision {
    pub first: Permutation,
    pub second: Permutation,
    pub max_abs_diff: f64,
}

/// Scan representative pairs for numerically equal trace norms on random
/// states.
pub fn scan_norm_collisions(
    classification: &CriterionClassification,
    d: usize,
    n_states: usize,
    seed: u64,
    tolerance: f64,
) -> Vec<NormCollision> {
    use crate::montecarlo::{mix, random_density, Stream};
    let reps = &classification.representatives;
    let states: Vec<QuantumState> = (0..n_states)
        .map(|i| {
            let mut stream = Stream::new(mix(seed, i as u64));
            random_density(&vec![d; classification.r], &mut stream)
        })
        .collect();
    let values: Vec<Vec<f64>> = reps
        .iter()
        .map(|sigma| {
            let c = PermutationCriterion::new(sigma.clone(), d).expect("valid representative");
            states
                .iter()
                .map(|s| criterion_value(s, &c).expect("dims match"))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let max_diff = values[i]
                .iter()
                .zip(&values[j])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if max_diff < tolerance {
                out.push(NormCollision {
                    first: reps[i].clone(),
                    second: reps[j].clone(),
                    max_abs_diff: max_diff,
                });
            }
        }
    }
    out
}

/// Convenience: group criteria by tag equality.
pub fn tags_equal(a: &PermutationCriterion, b: &PermutationCriterion) -> Result<bool> {
    Ok(canonical_tag(a)? == canonical_tag(b)?)
}
