//! Free Λ-modules of superdimension (m|n) and their supermatrices.
//!
//! Matrices act on column coordinates: `g e_j = Σ_i e_i g_ij`, products are
//! plain row-by-column products in Λ. Basis vector `i` (0-based) has parity
//! 0 for `i < m` and 1 otherwise.

use std::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grassmann::{rat, Grassmann, GrassmannError, GrassmannJson, Rational};
use crate::linalg;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(SuperDim, SuperDim),
    #[error("matrix is not invertible (singular body)")]
    NotInvertible,
    #[error("superdimension {0} is not of the form (n|n)")]
    NotQueer(SuperDim),
    #[error("matrix is not homogeneous-even")]
    NotEven,
    #[error("matrix does not commute with P")]
    NotInQ,
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error("malformed matrix: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SuperDim {
    pub m: usize,
    pub n: usize,
}

impl SuperDim {
    pub fn new(m: usize, n: usize) -> Self {
        assert!(m + n >= 1, "superdimension must be nonzero");
        SuperDim { m, n }
    }

    pub fn total(&self) -> usize {
        self.m + self.n
    }

    /// Parity a_i of the 0-based basis vector `i`.
    #[inline]
    pub fn parity(&self, i: usize) -> u8 {
        (i >= self.m) as u8
    }

    pub fn tuple_parity(&self, idx: &[u8]) -> u8 {
        idx.iter().map(|&i| self.parity(i as usize)).sum::<u8>() % 2
    }

    pub fn is_queer(&self) -> bool {
        self.m == self.n
    }
}

impl fmt::Display for SuperDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.m, self.n)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct SuperMatrix {
    dim: SuperDim,
    budget: u8,
    entries: Vec<Grassmann>,
}

impl SuperMatrix {
    pub fn zero(dim: SuperDim, budget: u8) -> Self {
        let d = dim.total();
        SuperMatrix { dim, budget, entries: vec![Grassmann::zero(budget); d * d] }
    }

    pub fn identity(dim: SuperDim, budget: u8) -> Self {
        let mut a = Self::zero(dim, budget);
        for i in 0..dim.total() {
            a.set(i, i, Grassmann::one(budget));
        }
        a
    }

    /// Elementary matrix E_ij (0-based) with entry 1.
    pub fn elementary(dim: SuperDim, budget: u8, i: usize, j: usize) -> Self {
        let mut a = Self::zero(dim, budget);
        a.set(i, j, Grassmann::one(budget));
        a
    }

    /// Parity of E_ij: p(i) + p(j).
    pub fn elementary_parity(dim: SuperDim, i: usize, j: usize) -> u8 {
        (dim.parity(i) + dim.parity(j)) % 2
    }

    pub fn from_fn(dim: SuperDim, budget: u8, mut f: impl FnMut(usize, usize) -> Grassmann) -> Self {
        let d = dim.total();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let e = f(i, j);
                assert_eq!(e.budget(), budget, "entry budget mismatch");
                entries.push(e);
            }
        }
        SuperMatrix { dim, budget, entries }
    }

    pub fn from_rationals(dim: SuperDim, budget: u8, rows: &[Vec<Rational>]) -> Self {
        Self::from_fn(dim, budget, |i, j| Grassmann::scalar(budget, rows[i][j].clone()))
    }

    pub fn from_ints(dim: SuperDim, budget: u8, rows: &[&[i64]]) -> Self {
        Self::from_fn(dim, budget, |i, j| Grassmann::from_int(budget, rows[i][j]))
    }

    pub fn dim(&self) -> SuperDim {
        self.dim
    }

    pub fn budget(&self) -> u8 {
        self.budget
    }

    pub fn size(&self) -> usize {
        self.dim.total()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Grassmann {
        &self.entries[i * self.size() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Grassmann) {
        assert_eq!(v.budget(), self.budget, "entry budget mismatch");
        let d = self.size();
        self.entries[i * d + j] = v;
    }

    pub fn entries(&self) -> &[Grassmann] {
        &self.entries
    }

    pub fn body(&self) -> linalg::QMatrix {
        let d = self.size();
        (0..d).map(|i| (0..d).map(|j| self.get(i, j).body()).collect()).collect()
    }

    fn check_dim(&self, other: &Self) -> Result<(), MatrixError> {
        if self.dim != other.dim {
            return Err(MatrixError::DimMismatch(self.dim, other.dim));
        }
        if self.budget != other.budget {
            return Err(GrassmannError::BudgetMismatch(self.budget, other.budget).into());
        }
        Ok(())
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dim(other)?;
        let d = self.size();
        let mut out = Self::zero(self.dim, self.budget);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * d + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(SuperMatrix { dim: self.dim, budget: self.budget, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        SuperMatrix { dim: self.dim, budget: self.budget, entries: self.entries.iter().map(|a| -a).collect() }
    }

    /// Entrywise left multiplication by a scalar of Λ: (λA)_ij = λ A_ij.
    pub fn scale(&self, lambda: &Grassmann) -> Self {
        SuperMatrix { dim: self.dim, budget: self.budget, entries: self.entries.iter().map(|a| lambda * a).collect() }
    }

    pub fn with_budget(&self, budget: u8) -> Result<Self, MatrixError> {
        let entries = self.entries.iter().map(|e| e.with_budget(budget)).collect::<Result<_, _>>()?;
        Ok(SuperMatrix { dim: self.dim, budget, entries })
    }

    /// Block parity of entry (i, j) in an even matrix.
    #[inline]
    pub fn block_parity(&self, i: usize, j: usize) -> u8 {
        (self.dim.parity(i) + self.dim.parity(j)) % 2
    }

    /// Homogeneous of degree `p`: entry (i,j) has Z₂-degree p + a_i + a_j.
    pub fn is_homogeneous(&self, p: u8) -> bool {
        let d = self.size();
        (0..d).all(|i| {
            (0..d).all(|j| {
                let want = (p + self.block_parity(i, j)) % 2;
                let e = self.get(i, j);
                if want == 0 { e.is_even() } else { e.is_odd() }
            })
        })
    }

    pub fn is_even(&self) -> bool {
        self.is_homogeneous(0)
    }

    pub fn is_odd(&self) -> bool {
        self.is_homogeneous(1)
    }

    pub fn parity(&self) -> Option<u8> {
        if self.is_even() {
            Some(0)
        } else if self.is_odd() {
            Some(1)
        } else {
            None
        }
    }

    pub fn is_gl_element(&self) -> bool {
        self.is_even() && linalg::inverse(&self.body()).is_some()
    }

    /// Inverse via `Σ_k (−A₀⁻¹N)^k · A₀⁻¹`, where A₀ is the body and N the
    /// nilpotent remainder; the series stops once the powers vanish.
    pub fn mat_inv(&self) -> Result<Self, MatrixError> {
        let body_inv = linalg::inverse(&self.body()).ok_or(MatrixError::NotInvertible)?;
        let a0inv = Self::from_rationals(self.dim, self.budget, &body_inv);
        let soul = SuperMatrix {
            dim: self.dim,
            budget: self.budget,
            entries: self.entries.iter().map(Grassmann::soul).collect(),
        };
        let step = a0inv.mat_mul(&soul)?.neg();
        let mut acc = Self::identity(self.dim, self.budget);
        let mut power = acc.clone();
        loop {
            power = power.mat_mul(&step)?;
            if power.entries.iter().all(Grassmann::is_zero) {
                break;
            }
            acc = acc.add(&power)?;
        }
        acc.mat_mul(&a0inv)
    }

    /// Supertrace Σ_i (−1)^{a_i(1+|M|)} M_ii, extended linearly over the
    /// parity components; on even matrices this is tr(A) − tr(D).
    pub fn supertrace(&self) -> Grassmann {
        let mut acc = Grassmann::zero(self.budget);
        for i in 0..self.size() {
            let (even, odd) = self.get(i, i).z2_split();
            if self.dim.parity(i) == 1 {
                acc = &(&acc - &even) + &odd;
            } else {
                acc = &(&acc + &even) + &odd;
            }
        }
        acc
    }

    /// Odd part of tr(A + B) for an element of q(n) written as
    /// [[A, −B], [B, A]] (B is read from the lower-left block).
    pub fn queer_trace(&self) -> Result<Grassmann, MatrixError> {
        if !self.dim.is_queer() {
            return Err(MatrixError::NotQueer(self.dim));
        }
        let n = self.dim.n;
        let mut acc = Grassmann::zero(self.budget);
        for i in 0..n {
            acc = &(&acc + self.get(i, i)) + self.get(n + i, i);
        }
        Ok(acc.odd_part())
    }

    /// The alternative normalization str(P·M).
    pub fn queer_trace_p(&self) -> Result<Grassmann, MatrixError> {
        if !self.dim.is_queer() {
            return Err(MatrixError::NotQueer(self.dim));
        }
        let p = p_operator(self.dim.n, self.budget);
        Ok(p.mat_mul(self)?.supertrace())
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool, MatrixError> {
        Ok(self.mat_mul(other)? == other.mat_mul(self)?)
    }

    /// Membership in the set of even matrices commuting with P.
    pub fn is_in_queer(&self) -> bool {
        self.dim.is_queer()
            && self.is_even()
            && self.commutes_with(&p_operator(self.dim.n, self.budget)).unwrap_or(false)
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            m: self.dim.m,
            n: self.dim.n,
            entries: self.entries.iter().map(Grassmann::to_json).collect(),
        }
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self, MatrixError> {
        if j.m + j.n == 0 || j.m + j.n > 64 {
            return Err(MatrixError::Malformed("bad superdimension".into()));
        }
        let dim = SuperDim::new(j.m, j.n);
        let d = dim.total();
        if j.entries.len() != d * d {
            return Err(MatrixError::Malformed(format!("expected {} entries, got {}", d * d, j.entries.len())));
        }
        let entries = j.entries.iter().map(Grassmann::from_json).collect::<Result<Vec<_>, _>>()?;
        let budget = entries[0].budget();
        if entries.iter().any(|e| e.budget() != budget) {
            return Err(MatrixError::Malformed("entries disagree on budget".into()));
        }
        Ok(SuperMatrix { dim, budget, entries })
    }

    pub fn parse_json(text: &str) -> Result<Self, MatrixError> {
        let j: MatrixJson = serde_json::from_str(text).map_err(|e| MatrixError::Malformed(e.to_string()))?;
        Self::from_json(&j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<GrassmannJson>,
}

impl fmt::Debug for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SuperMatrix {} Λ{}", self.dim, self.budget)?;
        let d = self.size();
        for i in 0..d {
            let row: Vec<String> = (0..d).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Display for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// P = [[0, −I], [I, 0]] on (n|n); P² = −I.
pub fn p_operator(n: usize, budget: u8) -> SuperMatrix {
    let dim = SuperDim::new(n, n);
    let mut p = SuperMatrix::zero(dim, budget);
    for i in 0..n {
        p.set(i, n + i, Grassmann::from_int(budget, -1));
        p.set(n + i, i, Grassmann::one(budget));
    }
    p
}

/// The element [[A, −B], [B, A]] of the P-commutant from n×n blocks.
pub fn q_element(a: &[Vec<Grassmann>], b: &[Vec<Grassmann>], budget: u8) -> SuperMatrix {
    let n = a.len();
    SuperMatrix::from_fn(SuperDim::new(n, n), budget, |i, j| match (i < n, j < n) {
        (true, true) => a[i][j].clone(),
        (true, false) => -&b[i][j - n],
        (false, true) => b[i - n][j].clone(),
        (false, false) => a[i - n][j - n].clone(),
    })
}

/// Random even matrix (not necessarily invertible), nilpotent parts of
/// Z-degree ≤ `degree_cap`, about one extra monomial per entry.
pub fn random_even<R: Rng + ?Sized>(dim: SuperDim, budget: u8, degree_cap: u32, rng: &mut R) -> SuperMatrix {
    random_homogeneous(dim, budget, degree_cap, 0, rng)
}

pub fn random_homogeneous<R: Rng + ?Sized>(
    dim: SuperDim,
    budget: u8,
    degree_cap: u32,
    parity: u8,
    rng: &mut R,
) -> SuperMatrix {
    SuperMatrix::from_fn(dim, budget, |i, j| {
        let p = (parity + dim.parity(i) + dim.parity(j)) % 2;
        let extra = rng.gen_range(0..=1);
        Grassmann::random(budget, degree_cap, Some(p), extra, rng)
    })
}

fn random_invertible_body<R: Rng + ?Sized>(k: usize, rng: &mut R) -> linalg::QMatrix {
    loop {
        let m: linalg::QMatrix = (0..k).map(|_| (0..k).map(|_| rat(rng.gen_range(-2..=2))).collect()).collect();
        if k == 0 || linalg::inverse(&m).is_some() {
            return m;
        }
    }
}

/// Sampler for GL(U) points from an explicit RNG.
pub fn sample_gl<R: Rng + ?Sized>(dim: SuperDim, budget: u8, degree_cap: u32, rng: &mut R) -> SuperMatrix {
    let a0 = random_invertible_body(dim.m, rng);
    let d0 = random_invertible_body(dim.n, rng);
    let m = dim.m;
    let g = SuperMatrix::from_fn(dim, budget, |i, j| {
        let body = match (i < m, j < m) {
            (true, true) => a0[i][j].clone(),
            (false, false) => d0[i - m][j - m].clone(),
            _ => Rational::zero(),
        };
        let parity = dim.parity(i) ^ dim.parity(j);
        let extra = if degree_cap == 0 { 0 } else { rng.gen_range(0..=1) };
        let nil = Grassmann::random(budget, degree_cap, Some(parity), extra, rng).soul();
        &Grassmann::scalar(budget, body) + &nil
    });
    debug_assert!(g.is_gl_element());
    g
}

/// Sampler for Q(U) points: [[A, −B], [B, A]] with invertible even A.
pub fn sample_q<R: Rng + ?Sized>(n: usize, budget: u8, degree_cap: u32, rng: &mut R) -> SuperMatrix {
    let a0 = random_invertible_body(n, rng);
    let mut a = vec![vec![Grassmann::zero(budget); n]; n];
    let mut b = vec![vec![Grassmann::zero(budget); n]; n];
    for i in 0..n {
        for j in 0..n {
            let extra = if degree_cap == 0 { 0 } else { rng.gen_range(0..=1) };
            let nil = Grassmann::random(budget, degree_cap, Some(0), extra, rng).soul();
            a[i][j] = &Grassmann::scalar(budget, a0[i][j].clone()) + &nil;
            let extra = if degree_cap == 0 { 0 } else { rng.gen_range(0..=1) };
            b[i][j] = Grassmann::random(budget, degree_cap, Some(1), extra, rng);
        }
    }
    let g = q_element(&a, &b, budget);
    debug_assert!(g.is_gl_element());
    g
}

/// Random (possibly singular) element of the P-commutant.
pub fn sample_queer_algebra<R: Rng + ?Sized>(n: usize, budget: u8, degree_cap: u32, rng: &mut R) -> SuperMatrix {
    let mut a = vec![vec![Grassmann::zero(budget); n]; n];
    let mut b = vec![vec![Grassmann::zero(budget); n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = Grassmann::random(budget, degree_cap, Some(0), rng.gen_range(0..=1), rng);
            b[i][j] = Grassmann::random(budget, degree_cap, Some(1), rng.gen_range(0..=2), rng);
        }
    }
    q_element(&a, &b, budget)
}

pub fn random_gl(dim: SuperDim, budget: u8, degree_cap: u32, seed: u64) -> SuperMatrix {
    sample_gl(dim, budget, degree_cap, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_q(n: usize, budget: u8, degree_cap: u32, seed: u64) -> SuperMatrix {
    sample_q(n, budget, degree_cap, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn is_identity(a: &SuperMatrix) -> bool {
    let d = a.size();
    (0..d).all(|i| (0..d).all(|j| if i == j { a.get(i, j).is_one() } else { a.get(i, j).is_zero() }))
}
