//! Graded picture invariants ψ_σ, built two ways:
//!
//! - `picture_composed` transports the invariant endomorphism η(σ) of
//!   U^{⊗N} through the chain of identifications
//!   End(U^{⊗N}) → (U^{⊗N} ⊗ U*^{⊗N})* → (⊗W)* → S(W*), collecting each
//!   Koszul sign on the way (the normative route);
//! - `picture_formula` evaluates the closed sign formula monomial by
//!   monomial, and is validated against the composed route.
//!
//! Also: trace monomials tr_σ and the restitution check on (1,1)-shapes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grassmann::Grassmann;
use crate::polyring::{normal_order, MixedShape, Monomial, PointW0, PolyError, PolyVariable, SuperPolynomial};
use crate::supermodule::{sample_gl, MatrixError, SuperMatrix};
use crate::tensor::{
    eta_sign, gamma, index_tuples, multidegree_total, mu, nu, self_pairing_parity, tau, Permutation, TensorError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PictureError {
    #[error("no invariants: Σmᵢbᵢ ≠ Σmᵢtᵢ")]
    Inconsistent,
    #[error("permutation has size {0} but the multidegree gives N = {1}")]
    WrongSize(usize, usize),
    #[error("shape must consist of (1,1) summands")]
    NotTraceShape,
    #[error("matrices must be even")]
    NotEven,
    #[error("matrices must commute with P")]
    NotInQueer,
    #[error("index map f must send {{1..N}} into the list of matrices")]
    BadIndexMap,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Which placement of σ⁻¹ to use for the tuple w̲ inside the dual-basis
/// sign p(w̲, w̲) of the closed formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaReading {
    /// w̲ is made of the same index entries as the monomial it signs.
    Consistent,
    /// w̲ takes lower indices r_pos and σ⁻¹-permuted upper indices.
    Literal,
}

/// One copy of a summand inside the arrangement of ⊗W: (space, b, t).
#[derive(Debug, Clone, Copy)]
pub struct Block {
    pub space: usize,
    pub lower: usize,
    pub upper: usize,
}

/// Bookkeeping shared by both routes.
#[derive(Debug, Clone)]
pub struct PictureContext {
    pub shape: MixedShape,
    pub mult: Vec<usize>,
    pub n: usize,
    pub blocks: Vec<Block>,
    pub mu: Permutation,
}

impl PictureContext {
    pub fn new(shape: &MixedShape, mult: &[usize]) -> Result<Self, PictureError> {
        let n = multidegree_total(&shape.spaces, mult).map_err(|_| PictureError::Inconsistent)?;
        let mut blocks = Vec::new();
        for (space, (&(t, b), &m)) in shape.spaces.iter().zip(mult).enumerate() {
            for _ in 0..m {
                blocks.push(Block { space, lower: b, upper: t });
            }
        }
        Ok(PictureContext {
            shape: shape.clone(),
            mult: mult.to_vec(),
            n,
            blocks,
            mu: mu(&shape.spaces, mult)?,
        })
    }

    fn parities(&self, idx: &[u8]) -> Vec<u8> {
        idx.iter().map(|&i| self.shape.dim.parity(i as usize)).collect()
    }

    /// Cuts a tuple in ⊗W order into variables, one per block.
    fn split_blocks(&self, beta: &[u8]) -> Vec<PolyVariable> {
        let mut pos = 0;
        self.blocks
            .iter()
            .map(|blk| {
                let lower = beta[pos..pos + blk.lower].to_vec();
                let upper = beta[pos + blk.lower..pos + blk.lower + blk.upper].to_vec();
                pos += blk.lower + blk.upper;
                PolyVariable::new(blk.space, lower, upper)
            })
            .collect()
    }

    /// Transports the functional value at e_L ⊗ e_U* into S(W*): the η(μ)
    /// sign of β = μ⁻¹·(L,U), the dual-basis sign (−1)^{p(w̲,w̲)} over the
    /// blocks, and the normal-ordering sign of the monomial.
    pub fn transport(&self, lower: &[u8], upper: &[u8]) -> Option<(i32, Monomial)> {
        let full: Vec<u8> = lower.iter().chain(upper).copied().collect();
        let beta: Vec<u8> = (0..full.len()).map(|j| full[self.mu.apply(j)]).collect();
        let mut sign = eta_sign(&self.mu, &self.parities(&beta));
        let vars = self.split_blocks(&beta);
        let wpar: Vec<u8> = vars.iter().map(|v| v.parity(self.shape.dim)).collect();
        if self_pairing_parity(&wpar) == 1 {
            sign = -sign;
        }
        let (s, m) = normal_order(&vars, self.shape.dim)?;
        Some((sign * s, m))
    }

    fn check_perm(&self, sigma: &Permutation) -> Result<(), PictureError> {
        if sigma.len() != self.n {
            return Err(PictureError::WrongSize(sigma.len(), self.n));
        }
        Ok(())
    }
}

/// Transports an endomorphism of U^{⊗N} that maps basis tensors to signed
/// basis tensors into S(W*). `endo(L)` returns (s, L') with A e_L = s e_{L'};
/// the functional is e_L ⊗ e_U* ↦ ev[ν·τ·(A e_L ⊗ e_U*)], nonzero only at U = L'.
pub fn compose_endomorphism(
    ctx: &PictureContext,
    budget: u8,
    endo: impl Fn(&[u8]) -> (i32, Vec<u8>),
) -> SuperPolynomial {
    let n = ctx.n;
    let (t, v) = (tau(n), nu(n));
    let mut acc: BTreeMap<Monomial, i64> = BTreeMap::new();
    for l in index_tuples(ctx.shape.dim.total(), n) {
        let (s1, image) = endo(&l);
        let u = image.clone();
        let tup: Vec<u8> = image.iter().chain(&u).copied().collect();
        let s2 = eta_sign(&t, &ctx.parities(&tup));
        let tup = t.act_on(&tup);
        let s3 = eta_sign(&v, &ctx.parities(&tup));
        let tup = v.act_on(&tup);
        debug_assert!((0..n).all(|j| tup[2 * j] == tup[2 * j + 1]));
        if let Some((s4, m)) = ctx.transport(&l, &u) {
            *acc.entry(m).or_insert(0) += (s1 * s2 * s3 * s4) as i64;
        }
    }
    collect(ctx, budget, acc)
}

fn collect(ctx: &PictureContext, budget: u8, acc: BTreeMap<Monomial, i64>) -> SuperPolynomial {
    let mut p = SuperPolynomial::zero(ctx.shape.clone(), budget);
    for (m, c) in acc {
        p.add_term(m, Grassmann::from_int(budget, c));
    }
    p
}

/// ψ_σ by composition: η(σ) e_L = γ(L, σ⁻¹) e_{σ·L}, then transport.
pub fn picture_composed(shape: &MixedShape, mult: &[usize], sigma: &Permutation) -> Result<SuperPolynomial, PictureError> {
    let ctx = PictureContext::new(shape, mult)?;
    ctx.check_perm(sigma)?;
    let poly = compose_endomorphism(&ctx, 1, |l| (eta_sign(sigma, &ctx.parities(l)), sigma.act_on(l)));
    debug_assert!(poly.is_multihomogeneous(mult));
    Ok(poly)
}

/// ψ_σ from the closed formula. For each N-tuple r the monomial is
/// ∏ T(i)^{r_{upper positions}}_{r_{σ(lower positions)}} over the blocks,
/// with sign γ(r, σ) · (−1)^{q}, q = Σ_blocks (Σ lower parities)(Σ parities
/// of all earlier upper positions) + Σ a + Σ_{i<j} a_i a_j + p(w̲, w̲).
pub fn picture_formula(
    shape: &MixedShape,
    mult: &[usize],
    sigma: &Permutation,
    reading: FormulaReading,
) -> Result<SuperPolynomial, PictureError> {
    let ctx = PictureContext::new(shape, mult)?;
    ctx.check_perm(sigma)?;
    let n = ctx.n;
    let dim = shape.dim;
    let sigma_inv = sigma.inverse();
    let mut acc: BTreeMap<Monomial, i64> = BTreeMap::new();
    for r in index_tuples(dim.total(), n) {
        let a = ctx.parities(&r);
        let mut sign = gamma(&a, sigma);
        let mut q = 0u32;
        let mut vars = Vec::with_capacity(ctx.blocks.len());
        let mut wpar = Vec::with_capacity(ctx.blocks.len());
        let (mut lo_off, mut up_off) = (0usize, 0usize);
        for blk in &ctx.blocks {
            let lows: Vec<usize> = (0..blk.lower).map(|l| sigma.apply(lo_off + l)).collect();
            let ups: Vec<usize> = (up_off..up_off + blk.upper).collect();
            let s_low: u32 = lows.iter().map(|&x| a[x] as u32).sum();
            let s_before: u32 = (0..up_off).map(|k| a[k] as u32).sum();
            q += s_low * s_before;
            let lower: Vec<u8> = lows.iter().map(|&x| r[x]).collect();
            let upper: Vec<u8> = ups.iter().map(|&x| r[x]).collect();
            let w_par = match reading {
                FormulaReading::Consistent => (dim.tuple_parity(&lower) + dim.tuple_parity(&upper)) % 2,
                FormulaReading::Literal => {
                    let wl: Vec<u8> = (0..blk.lower).map(|l| r[lo_off + l]).collect();
                    let wu: Vec<u8> = ups.iter().map(|&x| r[sigma_inv.apply(x)]).collect();
                    (dim.tuple_parity(&wl) + dim.tuple_parity(&wu)) % 2
                }
            };
            wpar.push(w_par);
            vars.push(PolyVariable::new(blk.space, lower, upper));
            lo_off += blk.lower;
            up_off += blk.upper;
        }
        q += a.iter().map(|&x| x as u32).sum::<u32>();
        q += self_pairing_parity(&a) as u32;
        q += self_pairing_parity(&wpar) as u32;
        if q % 2 == 1 {
            sign = -sign;
        }
        if let Some((s, m)) = normal_order(&vars, dim) {
            *acc.entry(m).or_insert(0) += (sign * s) as i64;
        }
    }
    Ok(collect(&ctx, 1, acc))
}

/// Relation between two polynomials up to a global sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Equal,
    Negated,
    Different,
}

pub fn compare(p: &SuperPolynomial, q: &SuperPolynomial) -> Agreement {
    if p == q {
        Agreement::Equal
    } else if *p == q.neg() {
        Agreement::Negated
    } else {
        Agreement::Different
    }
}

fn check_index_map(n: usize, f: &[usize], count: usize) -> Result<(), PictureError> {
    if f.len() != n || f.iter().any(|&x| x >= count) {
        return Err(PictureError::BadIndexMap);
    }
    Ok(())
}

/// tr_σ(A₁,…,A_s) = ∏ over cycles (i₁ i₂ … i_r) of σ⁻¹ of
/// str(A_{f(i₁)} ⋯ A_{f(i_r)}), cycles listed from their smallest element.
/// `f` is 0-based.
pub fn trace_monomial(sigma: &Permutation, f: &[usize], mats: &[SuperMatrix]) -> Result<Grassmann, PictureError> {
    check_index_map(sigma.len(), f, mats.len())?;
    if mats.iter().any(|a| !a.is_even()) {
        return Err(PictureError::NotEven);
    }
    cycle_traces(sigma, mats[0].budget(), |i| Ok(mats[f[i]].clone()))
}

fn cycle_traces(
    sigma: &Permutation,
    budget: u8,
    factor: impl Fn(usize) -> Result<SuperMatrix, PictureError>,
) -> Result<Grassmann, PictureError> {
    let mut acc = Grassmann::one(budget);
    for cycle in sigma.inverse().cycles() {
        let mut prod = factor(cycle[0])?;
        for &i in &cycle[1..] {
            prod = prod.mat_mul(&factor(i)?)?;
        }
        acc = &acc * &prod.supertrace();
    }
    Ok(acc)
}

/// Queer trace monomial: per cycle of σ⁻¹, str(P^{ε_{i₁}} A_{f(i₁)} ⋯).
pub fn queer_trace_monomial(
    sigma: &Permutation,
    eps: &[u8],
    f: &[usize],
    mats: &[SuperMatrix],
) -> Result<Grassmann, PictureError> {
    check_index_map(sigma.len(), f, mats.len())?;
    if eps.len() != sigma.len() {
        return Err(PictureError::BadIndexMap);
    }
    if mats.iter().any(|a| !a.is_in_queer()) {
        return Err(PictureError::NotInQueer);
    }
    let n = mats[0].dim().n;
    let p = crate::supermodule::p_operator(n, mats[0].budget());
    cycle_traces(sigma, mats[0].budget(), |i| {
        if eps[i] == 1 { Ok(p.mat_mul(&mats[f[i]])?) } else { Ok(mats[f[i]].clone()) }
    })
}

/// Identification of a (1,1)-summand coordinate set with a supermatrix:
/// A_lj = (−1)^{a_j(a_l + 1)} λ_{lj}, where λ_{lj} is the coordinate of
/// e_l ⊗ e_j*.
pub fn point_to_matrix(w: &PointW0, space: usize) -> SuperMatrix {
    let dim = w.shape().dim;
    SuperMatrix::from_fn(dim, w.budget(), |l, j| {
        let c = w.coord(space, &[l as u8, j as u8]);
        if dim.parity(j) * (dim.parity(l) + 1) % 2 == 1 { -c } else { c }
    })
}

/// Inverse of [`point_to_matrix`], for even supermatrices.
pub fn matrices_to_point(shape: &MixedShape, mats: &[SuperMatrix]) -> PointW0 {
    let dim = shape.dim;
    let mut w = PointW0::zero(shape.clone(), mats[0].budget());
    for (space, a) in mats.iter().enumerate() {
        for l in 0..dim.total() {
            for j in 0..dim.total() {
                let c = a.get(l, j);
                let c = if dim.parity(j) * (dim.parity(l) + 1) % 2 == 1 { -c } else { c.clone() };
                w.set(space, vec![l as u8, j as u8], c);
            }
        }
    }
    w
}

/// The map f: {1..N} → {1..s} sending the first m₁ points to summand 1,
/// the next m₂ to summand 2, and so on (0-based).
pub fn block_index_map(mult: &[usize]) -> Vec<usize> {
    mult.iter().enumerate().flat_map(|(i, &m)| std::iter::repeat_n(i, m)).collect()
}

#[derive(Debug, Clone)]
pub struct RestitutionReport {
    pub trials: usize,
    pub counterexample: Option<String>,
}

impl RestitutionReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// On shape ((1,1))^s, checks evaluate(ψ_σ, w) = tr_σ(A₁,…,A_s) at random
/// even points (trial 0 uses a body-only point).
pub fn restitution_check(
    shape: &MixedShape,
    mult: &[usize],
    sigma: &Permutation,
    budget: u8,
    degree_cap: u32,
    trials: usize,
    seed: u64,
) -> Result<RestitutionReport, PictureError> {
    if shape.spaces.iter().any(|&s| s != (1, 1)) {
        return Err(PictureError::NotTraceShape);
    }
    let psi = picture_composed(shape, mult, sigma)?;
    let f = block_index_map(mult);
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let cap = if trial == 0 { 0 } else { degree_cap };
        let w = PointW0::random(shape, budget, cap, &mut rng);
        let mats: Vec<SuperMatrix> = (0..shape.num_spaces()).map(|s| point_to_matrix(&w, s)).collect();
        let lhs = psi.evaluate(&w)?;
        let rhs = trace_monomial(sigma, &f, &mats)?;
        if lhs != rhs {
            return Ok(RestitutionReport {
                trials,
                counterexample: Some(format!("trial {trial}: evaluate = {lhs}, tr_σ = {rhs}")),
            });
        }
    }
    Ok(RestitutionReport { trials, counterexample: None })
}

/// Checks evaluate(p, g·w) = evaluate(p, w) at one sampled GL pair.
pub fn invariance_defect(p: &SuperPolynomial, g: &SuperMatrix, w: &PointW0) -> Result<Option<(Grassmann, Grassmann)>, PictureError> {
    let before = p.evaluate(w)?;
    let after = p.evaluate(&crate::polyring::gl_act_point(g, w)?)?;
    Ok((before != after).then_some((before, after)))
}

/// Convenience sampler for a (g, w) pair from a seed.
pub fn sample_gl_pair(shape: &MixedShape, budget: u8, degree_cap: u32, seed: u64) -> (SuperMatrix, PointW0) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = sample_gl(shape.dim, budget, degree_cap, &mut rng);
    let w = PointW0::random(shape, budget, degree_cap, &mut rng);
    (g, w)
}

/// Textual closed picture: one box per factor, arrows i → σ⁻¹(i).
pub fn diagram(mult: &[usize], sigma: &Permutation) -> String {
    let f = block_index_map(mult);
    let inv = sigma.inverse();
    let mut s = String::new();
    for i in 0..sigma.len() {
        let j = inv.apply(i);
        let _ = writeln!(s, "[{}:T({})] --> [{}:T({})]", i + 1, f[i] + 1, j + 1, f[j] + 1);
    }
    s
}
