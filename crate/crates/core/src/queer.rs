//! The Sergeev superalgebra Λ Ser_k = ℚ[S_k] ⋉ Cl_k, its action Φ_k on
//! U^{⊗k} for U of superdimension (n|n), and the queer picture invariants.
//!
//! Basis elements are pairs (σ, I) standing for σ ⊗ c_{i₁}⋯c_{i_l} with
//! i₁ < ⋯ < i_l, encoded as a bitmask. Coefficients sit on the left.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::grassmann::{merge_sign, Grassmann};
use crate::picture::{compose_endomorphism, PictureContext, PictureError};
use crate::polyring::{normal_order, MixedShape, Monomial, SuperPolynomial};
use crate::supermodule::SuperDim;
use crate::tensor::{eta_sign, gamma, index_tuples, nu, self_pairing_parity, tau, Permutation, Slot, TensorElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueerError {
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("superdimension {0} is not of the form (n|n)")]
    NotQueer(SuperDim),
    #[error("the Sergeev action needs an all-U tensor of matching length")]
    WrongTensor,
    #[error("clifford index {0} outside 1..={1}")]
    BadClifford(usize, usize),
    #[error(transparent)]
    Picture(#[from] PictureError),
}

/// Sign of c_A c_B = ± c_{A △ B} with c_i² = −1 and c_i c_j = −c_j c_i:
/// (−1)^{#{(a, b) ∈ A×B : a > b} + |A ∩ B|}.
pub fn clifford_sign(a: u64, b: u64) -> i32 {
    let odd = merge_sign(a, b) as u32 ^ ((a & b).count_ones() & 1);
    if odd == 1 { -1 } else { 1 }
}

/// Image of the clifford monomial c_{i₁}⋯c_{i_l} under relabeling i ↦ π(i),
/// normal-ordered: returns (sign, mask).
fn relabel_clifford(mask: u64, pi: &Permutation) -> (i32, u64) {
    let images: Vec<usize> = (0..pi.len()).filter(|i| mask >> i & 1 == 1).map(|i| pi.apply(i)).collect();
    let mut inv = 0usize;
    for x in 0..images.len() {
        for y in x + 1..images.len() {
            if images[x] > images[y] {
                inv += 1;
            }
        }
    }
    let out = images.iter().fold(0u64, |m, &i| m | 1 << i);
    (if inv % 2 == 1 { -1 } else { 1 }, out)
}

#[derive(Clone, PartialEq, Eq)]
pub struct SergeevElement {
    k: usize,
    budget: u8,
    terms: BTreeMap<(Permutation, u64), Grassmann>,
}

impl SergeevElement {
    pub fn zero(k: usize, budget: u8) -> Self {
        SergeevElement { k, budget, terms: BTreeMap::new() }
    }

    pub fn basis(k: usize, budget: u8, sigma: Permutation, clifford: u64) -> Self {
        assert_eq!(sigma.len(), k);
        assert!(clifford >> k == 0, "clifford mask exceeds k");
        let mut x = Self::zero(k, budget);
        x.add_term(sigma, clifford, Grassmann::one(budget));
        x
    }

    pub fn one(k: usize, budget: u8) -> Self {
        Self::basis(k, budget, Permutation::identity(k), 0)
    }

    /// s_i = (i i+1), 0-based i.
    pub fn s(k: usize, budget: u8, i: usize) -> Self {
        Self::basis(k, budget, Permutation::transposition(k, i, i + 1), 0)
    }

    /// c_j, 0-based j.
    pub fn c(k: usize, budget: u8, j: usize) -> Self {
        Self::basis(k, budget, Permutation::identity(k), 1 << j)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Permutation, u64), &Grassmann)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, sigma: Permutation, clifford: u64, c: Grassmann) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((sigma, clifford)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, lambda: &Grassmann) -> Self {
        let mut r = Self::zero(self.k, self.budget);
        for ((s, m), c) in &self.terms {
            r.add_term(s.clone(), *m, lambda * c);
        }
        r
    }

    pub fn add(&self, other: &Self) -> Result<Self, QueerError> {
        if self.k != other.k {
            return Err(QueerError::SizeMismatch(self.k, other.k));
        }
        let mut r = self.clone();
        for ((s, m), c) in &other.terms {
            r.add_term(s.clone(), *m, c.clone());
        }
        Ok(r)
    }

    pub fn neg(&self) -> Self {
        self.scale(&Grassmann::from_int(self.budget, -1))
    }

    /// (λ σ⊗c_I)(μ τ⊗c_J) = λ (−1)^{|I||μ|} μ · στ ⊗ c_{τ⁻¹(I)} c_J.
    pub fn sergeev_mul(&self, other: &Self) -> Result<Self, QueerError> {
        if self.k != other.k {
            return Err(QueerError::SizeMismatch(self.k, other.k));
        }
        let mut r = Self::zero(self.k, self.budget);
        for ((sigma, ia), ca) in &self.terms {
            for ((t, jb), cb) in &other.terms {
                let (s1, moved) = relabel_clifford(*ia, &t.inverse());
                let s2 = clifford_sign(moved, *jb);
                let cb = cb.twist(ia.count_ones() % 2 == 1);
                let c = ca * &cb;
                r.add_term(sigma.compose(t), moved ^ jb, if s1 * s2 < 0 { -c } else { c });
            }
        }
        Ok(r)
    }
}

impl fmt::Debug for SergeevElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((s, m), c)| {
                let cl: Vec<String> = (0..self.k).filter(|i| m >> i & 1 == 1).map(|i| format!("c{}", i + 1)).collect();
                format!("({c})·{s}⊗{}", if cl.is_empty() { "1".into() } else { cl.join("") })
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Index i ↔ −i, i.e. i ↔ n + i in 0-based form.
#[inline]
fn flip(n: usize, i: u8) -> u8 {
    if (i as usize) < n { i + n as u8 } else { i - n as u8 }
}

/// Φ(c_h) e_L = γ̂(L, h) e_{L^h}: P acts on slot h (0-based) after passing
/// the earlier slots; γ̂ = (−1)^{a(l₁)+⋯+a(l_h)} includes P's own sign on
/// odd vectors.
pub fn clifford_on_basis(dim: SuperDim, h: usize, l: &[u8]) -> (i32, Vec<u8>) {
    let odd: usize = l[..=h].iter().filter(|&&i| dim.parity(i as usize) == 1).count();
    let mut out = l.to_vec();
    out[h] = flip(dim.n, l[h]);
    (if odd % 2 == 1 { -1 } else { 1 }, out)
}

/// Φ(σ ⊗ c_{i₁}⋯c_{i_l}) on a basis tensor: Clifford factors act right to
/// left, then η(σ).
pub fn sergeev_on_basis(dim: SuperDim, sigma: &Permutation, clifford: u64, l: &[u8]) -> (i32, Vec<u8>) {
    let mut sign = 1;
    let mut cur = l.to_vec();
    for h in (0..l.len()).rev() {
        if clifford >> h & 1 == 1 {
            let (s, next) = clifford_on_basis(dim, h, &cur);
            sign *= s;
            cur = next;
        }
    }
    let par: Vec<u8> = cur.iter().map(|&i| dim.parity(i as usize)).collect();
    sign *= eta_sign(sigma, &par);
    (sign, sigma.act_on(&cur))
}

/// Φ_k(x)(t), with λ·(e_β c) = (−1)^{|λ||β|} e_β λ c for coefficients of x.
pub fn sergeev_act(x: &SergeevElement, t: &TensorElement) -> Result<TensorElement, QueerError> {
    let dim = t.dim();
    if !dim.is_queer() {
        return Err(QueerError::NotQueer(dim));
    }
    if t.signature().len() != x.k || t.signature().iter().any(|s| *s != Slot::Up) {
        return Err(QueerError::WrongTensor);
    }
    let mut out = TensorElement::zero(dim, t.budget(), t.signature().to_vec());
    for ((sigma, mask), lambda) in &x.terms {
        let lambda = lambda.with_budget(t.budget()).map_err(|_| QueerError::WrongTensor)?;
        for (idx, c) in t.terms() {
            let (s, img) = sergeev_on_basis(dim, sigma, *mask, idx);
            let odd_img = dim.tuple_parity(&img) == 1;
            let coef = &lambda.twist(odd_img) * c;
            out.add_term(img, if s < 0 { -coef } else { coef });
        }
    }
    Ok(out)
}

fn queer_context(shape: &MixedShape, mult: &[usize]) -> Result<PictureContext, QueerError> {
    if !shape.dim.is_queer() {
        return Err(QueerError::NotQueer(shape.dim));
    }
    Ok(PictureContext::new(shape, mult)?)
}

/// Transport of Φ(x) into S(W*), extended left-Λ-linearly over the terms
/// of x. For x = σ ⊗ 1 this is the GL picture invariant ψ_σ.
pub fn queer_picture_composed(
    shape: &MixedShape,
    mult: &[usize],
    x: &SergeevElement,
) -> Result<SuperPolynomial, QueerError> {
    let ctx = queer_context(shape, mult)?;
    if x.k != ctx.n {
        return Err(QueerError::SizeMismatch(x.k, ctx.n));
    }
    let mut acc = SuperPolynomial::zero(shape.clone(), x.budget);
    for ((sigma, mask), lambda) in &x.terms {
        let p = compose_endomorphism(&ctx, x.budget, |l| sergeev_on_basis(shape.dim, sigma, *mask, l));
        acc = acc.add(&p.scale(lambda)).expect("same shape");
    }
    Ok(acc)
}

/// Reading of the closed φ_{c_h} formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueerReading {
    /// γ((Iʰ, Iʰ), (ν∘τ)⁻¹): the tuple fed to the τ, ν signs is the image
    /// pair, and ν is applied after τ.
    Corrected,
    /// γ((I, Iʰ), (τ∘ν)⁻¹) taken literally.
    Literal,
}

/// φ_{c_h} from the closed formula, h 0-based:
/// Σ_I γ(μ⁻¹·(I,Iʰ), μ⁻¹) γ(tuple, perm⁻¹) γ̂(I, h) (−1)^{p(w̲,w̲)} T_{μ⁻¹·(I,Iʰ)}.
pub fn queer_picture_formula(
    shape: &MixedShape,
    mult: &[usize],
    h: usize,
    reading: QueerReading,
) -> Result<SuperPolynomial, QueerError> {
    let ctx = queer_context(shape, mult)?;
    let n = ctx.n;
    if h >= n {
        return Err(QueerError::BadClifford(h + 1, n));
    }
    let dim = shape.dim;
    let par = |idx: &[u8]| -> Vec<u8> { idx.iter().map(|&i| dim.parity(i as usize)).collect() };
    let perm = match reading {
        QueerReading::Corrected => nu(n).compose(&tau(n)),
        QueerReading::Literal => tau(n).compose(&nu(n)),
    };
    let perm_inv = perm.inverse();
    let mu_inv = ctx.mu.inverse();
    let mut acc: BTreeMap<Monomial, i64> = BTreeMap::new();
    for i in index_tuples(dim.total(), n) {
        let mut ih = i.clone();
        ih[h] = flip(dim.n, i[h]);
        let full: Vec<u8> = i.iter().chain(&ih).copied().collect();
        let beta: Vec<u8> = (0..2 * n).map(|j| full[ctx.mu.apply(j)]).collect();
        let mut sign = gamma(&par(&beta), &mu_inv);
        let tuple: Vec<u8> = match reading {
            QueerReading::Corrected => ih.iter().chain(&ih).copied().collect(),
            QueerReading::Literal => full.clone(),
        };
        sign *= gamma(&par(&tuple), &perm_inv);
        let hat: usize = i[..=h].iter().filter(|&&x| dim.parity(x as usize) == 1).count();
        if hat % 2 == 1 {
            sign = -sign;
        }
        let mut pos = 0;
        let mut vars = Vec::new();
        let mut wpar = Vec::new();
        for blk in &ctx.blocks {
            let lower = beta[pos..pos + blk.lower].to_vec();
            let upper = beta[pos + blk.lower..pos + blk.lower + blk.upper].to_vec();
            pos += blk.lower + blk.upper;
            wpar.push((dim.tuple_parity(&lower) + dim.tuple_parity(&upper)) % 2);
            vars.push(crate::polyring::PolyVariable::new(blk.space, lower, upper));
        }
        if self_pairing_parity(&wpar) == 1 {
            sign = -sign;
        }
        if let Some((s, m)) = normal_order(&vars, dim) {
            *acc.entry(m).or_insert(0) += (sign * s) as i64;
        }
    }
    let mut p = SuperPolynomial::zero(shape.clone(), 1);
    for (m, c) in acc {
        p.add_term(m, Grassmann::from_int(1, c));
    }
    Ok(p)
}

/// The Sergeev element σ ⊗ c^{ε} for a 0/1 pattern ε.
pub fn sergeev_from_eps(sigma: Permutation, eps: &[u8], budget: u8) -> SergeevElement {
    let mask = eps.iter().enumerate().fold(0u64, |m, (i, &e)| if e == 1 { m | 1 << i } else { m });
    SergeevElement::basis(sigma.len(), budget, sigma, mask)
}

/// Sign relating φ_{σ⊗c^ε} at the point of matrices A to the P-twisted
/// trace monomial: the parity of reordering the Clifford positions from
/// increasing order into the reading order of the cycles of σ⁻¹.
pub fn clifford_reading_sign(sigma: &Permutation, eps: &[u8]) -> i32 {
    let order: Vec<usize> = sigma.inverse().cycles().concat().into_iter().filter(|&i| eps[i] == 1).collect();
    let mut inversions = 0;
    for i in 0..order.len() {
        inversions += order[i + 1..].iter().filter(|&&x| x < order[i]).count();
    }
    if inversions % 2 == 1 {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u8 = 4;

    #[test]
    fn clifford_relations() {
        let k = 3;
        for i in 0..k {
            let c = SergeevElement::c(k, B, i);
            assert_eq!(c.sergeev_mul(&c).unwrap(), SergeevElement::one(k, B).neg());
            for j in 0..k {
                if i != j {
                    let cj = SergeevElement::c(k, B, j);
                    assert_eq!(c.sergeev_mul(&cj).unwrap(), cj.sergeev_mul(&c).unwrap().neg());
                }
            }
        }
    }

    #[test]
    fn smash_product_relations() {
        let k = 3;
        for i in 0..k - 1 {
            let s = SergeevElement::s(k, B, i);
            assert_eq!(s.sergeev_mul(&s).unwrap(), SergeevElement::one(k, B));
            let ci = SergeevElement::c(k, B, i);
            let sci = s.sergeev_mul(&ci).unwrap().sergeev_mul(&s).unwrap();
            assert_eq!(sci, SergeevElement::c(k, B, i + 1));
        }
    }

    #[test]
    fn clifford_sign_table() {
        assert_eq!(clifford_sign(0b01, 0b01), -1);
        assert_eq!(clifford_sign(0b10, 0b01), -1);
        assert_eq!(clifford_sign(0b01, 0b10), 1);
        assert_eq!(clifford_sign(0b11, 0b11), -1);
        assert_eq!(clifford_sign(0b011, 0b110), -1);
    }

    #[test]
    fn action_examples() {
        let dim = SuperDim::new(1, 1);
        let t = TensorElement::basis(dim, B, TensorElement::all_up(2), vec![1, 1]);
        let s = SergeevElement::s(2, B, 0);
        assert_eq!(sergeev_act(&s, &t).unwrap(), t.neg());
        let v = TensorElement::basis(dim, B, TensorElement::all_up(1), vec![0]);
        let c = SergeevElement::c(1, B, 0);
        let pv = TensorElement::basis(dim, B, TensorElement::all_up(1), vec![1]);
        assert_eq!(sergeev_act(&c, &v).unwrap(), pv);
        assert_eq!(sergeev_act(&c, &pv).unwrap(), v.neg());
    }
}
