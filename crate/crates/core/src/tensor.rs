//! Tensor powers of U and U*: signed permutation actions, the diagonal
//! GL(U) action, the gl derivation action, the evaluation pairing, the
//! structural permutations τ, ν, μ, σ̂ and the invariant tensors θ_σ.
//!
//! Tensors carry right coefficients, `Σ_I e_I c_I`. Index tuples are 0-based
//! internally and 1-based in every external format.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grassmann::{Grassmann, GrassmannError};
use crate::supermodule::{MatrixError, SuperDim, SuperMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("dimension mismatch")]
    DimMismatch,
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
    #[error("inconsistent shape: {0}")]
    InconsistentShape(String),
    #[error("malformed tensor: {0}")]
    Malformed(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}

/// A permutation of {0..k−1} in one-line form: `images[i] = σ(i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation { images: (0..k).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, TensorError> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if x >= k || seen[x] {
                return Err(TensorError::BadPermutation(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based one-line images, e.g. `[2, 1, 3]`.
    pub fn from_one_based(images: &[usize]) -> Result<Self, TensorError> {
        if images.contains(&0) {
            return Err(TensorError::BadPermutation("images are 1-based".into()));
        }
        Self::from_images(images.iter().map(|x| x - 1).collect())
    }

    /// The transposition of 0-based positions `i` and `j`.
    pub fn transposition(k: usize, i: usize, j: usize) -> Self {
        let mut p = Self::identity(k);
        p.images.swap(i, j);
        p
    }

    /// Parses cycle notation over {1..k}, e.g. `(1 2)(3 4 5)`; `()` and
    /// `(1)` denote the identity. Entries may be separated by spaces or commas.
    pub fn parse_cycles(text: &str, k: usize) -> Result<Self, TensorError> {
        let bad = |why: &str| TensorError::BadPermutation(format!("`{text}`: {why}"));
        let mut images: Vec<usize> = (0..k).collect();
        let mut used = vec![false; k];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let close = body.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let cycle: Vec<usize> = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad("non-numeric entry")))
                .collect::<Result<_, _>>()?;
            for &x in &cycle {
                if x == 0 || x > k {
                    return Err(bad("entry out of range"));
                }
                if used[x - 1] {
                    return Err(bad("repeated entry"));
                }
                used[x - 1] = true;
            }
            for (i, &x) in cycle.iter().enumerate() {
                images[x - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
            rest = body[close + 1..].trim_start();
        }
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "composing permutations of different size");
        Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inversions(&self) -> usize {
        let k = self.len();
        (0..k).map(|i| (i + 1..k).filter(|&j| self.images[i] > self.images[j]).count()).sum()
    }

    /// σ·r = (r_{σ⁻¹(1)}, …, r_{σ⁻¹(k)}), i.e. entry `i` moves to `σ(i)`.
    pub fn act_on<T: Clone>(&self, r: &[T]) -> Vec<T> {
        assert_eq!(r.len(), self.len(), "sequence length must match permutation size");
        let mut out = r.to_vec();
        for (i, x) in r.iter().enumerate() {
            out[self.images[i]] = x.clone();
        }
        out
    }

    /// Disjoint cycles ordered by smallest element, each starting there.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// All permutations of size k in lexicographic order of images.
    pub fn all(k: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Permutation { images: cur.clone() });
            let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation, 1-based, fixed points omitted (identity is `()`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one: Vec<usize> = self.images.iter().map(|x| x + 1).collect();
        write!(f, "{one:?}")
    }
}

/// γ(p, σ) = ∏ (−1)^{p_{σ(i)} p_{σ(j)}} over i < j with σ(i) > σ(j):
/// every pair of entries whose relative order σ reverses contributes the
/// product of their parities. This reading satisfies the cocycle law
/// γ(p, στ) = γ(σ⁻¹·p, τ) γ(p, σ) with (σ⁻¹·p)_i = p_{σ(i)}.
pub fn gamma(parities: &[u8], sigma: &Permutation) -> i32 {
    assert_eq!(parities.len(), sigma.len(), "gamma: length mismatch");
    let k = sigma.len();
    let mut odd = 0u32;
    for i in 0..k {
        let si = sigma.apply(i);
        if parities[si] == 0 {
            continue;
        }
        for j in i + 1..k {
            let sj = sigma.apply(j);
            if si > sj && parities[sj] == 1 {
                odd ^= 1;
            }
        }
    }
    if odd == 1 { -1 } else { 1 }
}

/// The literal positional reading ∏_{(i,j) ∈ Inv(σ)} (−1)^{p_i p_j}.
/// Equals `gamma(p, σ⁻¹)`; kept for comparison.
pub fn gamma_positional(parities: &[u8], sigma: &Permutation) -> i32 {
    assert_eq!(parities.len(), sigma.len(), "gamma: length mismatch");
    let k = sigma.len();
    let mut odd = 0u32;
    for i in 0..k {
        for j in i + 1..k {
            if sigma.apply(i) > sigma.apply(j) && parities[i] == 1 && parities[j] == 1 {
                odd ^= 1;
            }
        }
    }
    if odd == 1 { -1 } else { 1 }
}

pub fn try_gamma(parities: &[u8], sigma: &Permutation) -> Result<i32, TensorError> {
    if parities.len() != sigma.len() {
        return Err(TensorError::LengthMismatch(parities.len(), sigma.len()));
    }
    Ok(gamma(parities, sigma))
}

/// Koszul sign of the signed permutation action: moving entry `j` of a
/// tuple with the given parities to position σ(j). Equals γ(p, σ⁻¹).
#[inline]
pub fn eta_sign(sigma: &Permutation, parities: &[u8]) -> i32 {
    gamma(parities, &sigma.inverse())
}

/// Σ_{i<j} p_i p_j mod 2 — the sign exponent p(v̲, v̲) of a tuple paired
/// with itself, also the dual-basis sign of tensor monomials.
pub fn self_pairing_parity(parities: &[u8]) -> u8 {
    let mut acc = 0u8;
    let mut seen_odd = 0u8;
    for &p in parities {
        acc ^= p & seen_odd;
        seen_odd ^= p;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    #[serde(rename = "U")]
    Up,
    #[serde(rename = "U*")]
    Down,
}

/// Λ-linear combination of basis tensors over a fixed slot signature.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    dim: SuperDim,
    budget: u8,
    signature: Vec<Slot>,
    terms: BTreeMap<Vec<u8>, Grassmann>,
}

impl TensorElement {
    pub fn zero(dim: SuperDim, budget: u8, signature: Vec<Slot>) -> Self {
        TensorElement { dim, budget, signature, terms: BTreeMap::new() }
    }

    pub fn basis(dim: SuperDim, budget: u8, signature: Vec<Slot>, idx: Vec<u8>) -> Self {
        let mut t = Self::zero(dim, budget, signature);
        t.add_term(idx, Grassmann::one(budget));
        t
    }

    pub fn all_up(k: usize) -> Vec<Slot> {
        vec![Slot::Up; k]
    }

    pub fn mixed(up: usize, down: usize) -> Vec<Slot> {
        let mut s = vec![Slot::Up; up];
        s.extend(std::iter::repeat_n(Slot::Down, down));
        s
    }

    pub fn dim(&self) -> SuperDim {
        self.dim
    }

    pub fn budget(&self) -> u8 {
        self.budget
    }

    pub fn signature(&self) -> &[Slot] {
        &self.signature
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Grassmann)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &[u8]) -> Grassmann {
        self.terms.get(idx).cloned().unwrap_or_else(|| Grassmann::zero(self.budget))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, idx: Vec<u8>, c: Grassmann) {
        assert_eq!(idx.len(), self.signature.len(), "index tuple length");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(idx);
        match entry {
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

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        if self.signature != other.signature {
            return Err(TensorError::SignatureMismatch);
        }
        if self.dim != other.dim {
            return Err(TensorError::DimMismatch);
        }
        let mut r = self.clone();
        for (i, c) in &other.terms {
            r.add_term(i.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = -&*c;
        }
        r
    }

    pub fn parities(&self, idx: &[u8]) -> Vec<u8> {
        idx.iter().map(|&i| self.dim.parity(i as usize)).collect()
    }

    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            dim: [self.dim.m, self.dim.n],
            budget: self.budget as u32,
            signature: self.signature.clone(),
            terms: self
                .terms
                .iter()
                .map(|(i, c)| TensorTermJson { idx: i.iter().map(|&x| x as usize + 1).collect(), coef: c.to_string() })
                .collect(),
        }
    }

    pub fn from_json(j: &TensorJson) -> Result<Self, TensorError> {
        let [m, n] = j.dim;
        if m + n == 0 || m + n > 255 {
            return Err(TensorError::Malformed("bad superdimension".into()));
        }
        if j.budget == 0 || j.budget > 64 {
            return Err(GrassmannError::BadBudget(j.budget).into());
        }
        if j.signature.is_empty() {
            return Err(TensorError::Malformed("empty signature".into()));
        }
        let dim = SuperDim::new(m, n);
        let mut t = Self::zero(dim, j.budget as u8, j.signature.clone());
        for term in &j.terms {
            if term.idx.len() != j.signature.len() {
                return Err(TensorError::Malformed("index length does not match signature".into()));
            }
            if term.idx.iter().any(|&x| x == 0 || x > m + n) {
                return Err(TensorError::Malformed("index out of range".into()));
            }
            let c = Grassmann::parse(j.budget as u8, &term.coef)?;
            t.add_term(term.idx.iter().map(|&x| (x - 1) as u8).collect(), c);
        }
        Ok(t)
    }

    pub fn parse_json(text: &str) -> Result<Self, TensorError> {
        let j: TensorJson = serde_json::from_str(text).map_err(|e| TensorError::Malformed(e.to_string()))?;
        Self::from_json(&j)
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(idx, c)| {
                let basis: Vec<String> = idx
                    .iter()
                    .zip(&self.signature)
                    .map(|(&i, s)| match s {
                        Slot::Up => format!("e{}", i + 1),
                        Slot::Down => format!("e{}*", i + 1),
                    })
                    .collect();
                format!("{}·({})", basis.join("⊗"), c)
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorTermJson {
    pub idx: Vec<usize>,
    pub coef: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorJson {
    pub dim: [usize; 2],
    pub budget: u32,
    pub signature: Vec<Slot>,
    pub terms: Vec<TensorTermJson>,
}

/// Enumerates all index tuples of length k over {0..d−1}.
pub fn index_tuples(d: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::with_capacity(k)];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..d as u8).map(move |i| {
                    let mut t2 = t.clone();
                    t2.push(i);
                    t2
                })
            })
            .collect();
    }
    out
}

/// σ·(e_I c) = γ(I, σ⁻¹) e_{σ·I} c; slot labels travel with their indices.
pub fn perm_act(sigma: &Permutation, t: &TensorElement) -> Result<TensorElement, TensorError> {
    if sigma.len() != t.signature.len() {
        return Err(TensorError::LengthMismatch(sigma.len(), t.signature.len()));
    }
    let mut out = TensorElement::zero(t.dim, t.budget, sigma.act_on(&t.signature));
    for (idx, c) in &t.terms {
        let s = eta_sign(sigma, &t.parities(idx));
        out.add_term(sigma.act_on(idx), if s < 0 { -c } else { c.clone() });
    }
    Ok(out)
}

/// Sign exponent p(f̲*, v̲) = Σ_j |v_j| (|f_{j+1}| + ⋯ + |f_k|).
pub fn pairing_parity(f: &[u8], v: &[u8]) -> u8 {
    let mut acc = 0u8;
    let mut later_f = 0u8;
    for j in (0..f.len()).rev() {
        acc ^= v[j] & later_f;
        later_f ^= f[j];
    }
    acc
}

/// ⟨f, v⟩ for f over (U*)^{⊗k} and v over U^{⊗k}:
/// ⟨e_J* c, e_I d⟩ = (−1)^{p(J,I) + |c||I|} δ_{JI} c d.
pub fn ev_pairing(f: &TensorElement, v: &TensorElement) -> Result<Grassmann, TensorError> {
    let k = f.signature.len();
    if v.signature.len() != k {
        return Err(TensorError::LengthMismatch(k, v.signature.len()));
    }
    if f.signature.iter().any(|s| *s != Slot::Down) || v.signature.iter().any(|s| *s != Slot::Up) {
        return Err(TensorError::SignatureMismatch);
    }
    if f.dim != v.dim {
        return Err(TensorError::DimMismatch);
    }
    let mut acc = Grassmann::zero(f.budget);
    for (idx, c) in &f.terms {
        let Some(d) = v.terms.get(idx) else { continue };
        let par = f.parities(idx);
        let flip = pairing_parity(&par, &par) == 1;
        let tuple_odd = f.dim.tuple_parity(idx) == 1;
        let term = &c.twist(tuple_odd) * d;
        acc += &(if flip { -term } else { term });
    }
    Ok(acc)
}

/// Matrix acting on a DOWN slot so that ⟨e_i*, e_j⟩ stays invariant:
/// G_ik = (−1)^{a_i(1+a_k)} (g⁻¹)_ki, with g* e_k* = Σ_i e_i* G_ik.
pub fn contragredient(g: &SuperMatrix) -> Result<SuperMatrix, TensorError> {
    let ginv = g.mat_inv()?;
    let dim = g.dim();
    Ok(SuperMatrix::from_fn(dim, g.budget(), |i, k| {
        let e = ginv.get(k, i);
        if dim.parity(i) * (1 + dim.parity(k)) % 2 == 1 { -e } else { e.clone() }
    }))
}

/// Acts by per-slot matrices on basis tuples, collecting coefficients to
/// the right with Koszul signs.
fn diag_act_with(mats: &[&SuperMatrix], t: &TensorElement) -> TensorElement {
    let dim = t.dim;
    let d = dim.total();
    let k = t.signature.len();
    let mut out = TensorElement::zero(dim, t.budget, t.signature.clone());
    for (idx, c) in &t.terms {
        // Depth-first over the images of each slot, carrying the running
        // product of matrix entries.
        let mut stack: Vec<(Vec<u8>, Vec<Grassmann>)> = vec![(Vec::with_capacity(k), Vec::with_capacity(k))];
        while let Some((img, ents)) = stack.pop() {
            let q = img.len();
            if q == k {
                let mut coef = Grassmann::one(t.budget);
                let mut later = 0u8;
                let mut twisted: Vec<Grassmann> = Vec::with_capacity(k);
                for s in (0..k).rev() {
                    twisted.push(ents[s].twist(later == 1));
                    later ^= dim.parity(img[s] as usize);
                }
                for e in twisted.iter().rev() {
                    coef = &coef * e;
                }
                out.add_term(img, &coef * c);
                continue;
            }
            let col = idx[q] as usize;
            for i in 0..d {
                let e = mats[q].get(i, col);
                if e.is_zero() {
                    continue;
                }
                let mut img2 = img.clone();
                img2.push(i as u8);
                let mut ents2 = ents.clone();
                ents2.push(e.clone());
                stack.push((img2, ents2));
            }
        }
    }
    out
}

/// Diagonal action of an even invertible g: UP slots by g, DOWN slots by
/// the contragredient matrix.
pub fn gl_diag_act(g: &SuperMatrix, t: &TensorElement) -> Result<TensorElement, TensorError> {
    if g.dim() != t.dim {
        return Err(TensorError::DimMismatch);
    }
    if !g.is_even() {
        return Err(MatrixError::NotEven.into());
    }
    let dual = if t.signature.contains(&Slot::Down) { Some(contragredient(g)?) } else { None };
    let mats: Vec<&SuperMatrix> = t
        .signature
        .iter()
        .map(|s| match s {
            Slot::Up => g,
            Slot::Down => dual.as_ref().unwrap(),
        })
        .collect();
    Ok(diag_act_with(&mats, t))
}

/// Signed Leibniz action of the elementary matrix E_ab (0-based) of parity
/// |x| = a_a + a_b. UP slots: E_ab e_b = e_a. DOWN slots carry the dual
/// action E_ab · e_a* = −(−1)^{|x| a_a} e_b*.
pub fn derivation_act(a: usize, b: usize, t: &TensorElement) -> Result<TensorElement, TensorError> {
    let dim = t.dim;
    if a >= dim.total() || b >= dim.total() {
        return Err(TensorError::Malformed("elementary matrix index out of range".into()));
    }
    let x_par = (dim.parity(a) + dim.parity(b)) % 2;
    let mut out = TensorElement::zero(dim, t.budget, t.signature.clone());
    for (idx, c) in &t.terms {
        let mut before = 0u8;
        for (j, slot) in t.signature.iter().enumerate() {
            let i = idx[j] as usize;
            let hit = match slot {
                Slot::Up if i == b => Some((a, 1i32)),
                Slot::Down if i == a => {
                    let s = if x_par * dim.parity(a) == 1 { 1 } else { -1 };
                    Some((b, s))
                }
                _ => None,
            };
            if let Some((new, mut s)) = hit {
                if x_par * before == 1 {
                    s = -s;
                }
                let mut img = idx.clone();
                img[j] = new as u8;
                out.add_term(img, if s < 0 { -c } else { c.clone() });
            }
            before ^= dim.parity(i);
        }
    }
    Ok(out)
}

/// Only the all-UP precondition of the plain derivation action.
pub fn derivation_act_up(a: usize, b: usize, t: &TensorElement) -> Result<TensorElement, TensorError> {
    if t.signature.iter().any(|s| *s != Slot::Up) {
        return Err(TensorError::SignatureMismatch);
    }
    derivation_act(a, b, t)
}

/// τ ∈ S_{2k}: j ↦ 2j for j < k, k + j ↦ 2j + 1 (0-based). It interleaves
/// (v₁…v_k, f₁…f_k) into (v₁, f₁, v₂, f₂, …).
pub fn tau(k: usize) -> Permutation {
    let mut images = Vec::with_capacity(2 * k);
    images.extend((0..k).map(|j| 2 * j));
    images.extend((0..k).map(|j| 2 * j + 1));
    Permutation { images }
}

/// ν = (1 2)(3 4)⋯(2k−1 2k).
pub fn nu(k: usize) -> Permutation {
    Permutation { images: (0..2 * k).map(|i| i ^ 1).collect() }
}

/// σ̂ ∈ S_{2N}: σ on the first N points, identity on the rest.
pub fn sigma_hat(sigma: &Permutation) -> Permutation {
    let n = sigma.len();
    let mut images = sigma.images.clone();
    images.extend(n..2 * n);
    Permutation { images }
}

/// A mixed shape summand U^{⊗b} ⊗ (U*)^{⊗t}, written (t, b).
pub type ShapePair = (usize, usize);

/// N = Σ m_i b_i, checked against Σ m_i t_i.
pub fn multidegree_total(shape: &[ShapePair], mult: &[usize]) -> Result<usize, TensorError> {
    if shape.len() != mult.len() {
        return Err(TensorError::InconsistentShape(format!(
            "{} summands but {} multiplicities",
            shape.len(),
            mult.len()
        )));
    }
    let weighted = |pick: fn(&ShapePair) -> usize| -> Option<usize> {
        shape.iter().zip(mult).try_fold(0usize, |acc, (s, &m)| acc.checked_add(pick(s).checked_mul(m)?))
    };
    let too_large = || TensorError::InconsistentShape("multidegree too large".into());
    let lower = weighted(|s| s.1).ok_or_else(too_large)?;
    let upper = weighted(|s| s.0).ok_or_else(too_large)?;
    if lower != upper {
        return Err(TensorError::InconsistentShape("no invariants: Σmᵢbᵢ ≠ Σmᵢtᵢ".into()));
    }
    Ok(lower)
}

/// μ ∈ S_{2N} sends position j of the arrangement of ⊗W (blocks of b lower
/// then t upper slots, summand by summand, copy by copy) to its position in
/// U^{⊗N} ⊗ (U*)^{⊗N}.
pub fn mu(shape: &[ShapePair], mult: &[usize]) -> Result<Permutation, TensorError> {
    let n = multidegree_total(shape, mult)?;
    let mut images = Vec::with_capacity(2 * n);
    let (mut lo, mut up) = (0, n);
    for (&(t, b), &m) in shape.iter().zip(mult) {
        for _ in 0..m {
            images.extend(lo..lo + b);
            lo += b;
            images.extend(up..up + t);
            up += t;
        }
    }
    Ok(Permutation { images })
}

pub fn structural_perms(
    shape: &[ShapePair],
    mult: &[usize],
) -> Result<(Permutation, Permutation, Permutation), TensorError> {
    let n = multidegree_total(shape, mult)?;
    Ok((tau(n), nu(n), mu(shape, mult)?))
}

/// θ_σ = Σ_I (−1)^{p(I,I)} γ(I, σ⁻¹) e_{σ·I} ⊗ e_I* over U^{⊗k} ⊗ (U*)^{⊗k}.
pub fn theta_sigma(dim: SuperDim, budget: u8, sigma: &Permutation) -> TensorElement {
    let k = sigma.len();
    let mut t = TensorElement::zero(dim, budget, TensorElement::mixed(k, k));
    for idx in index_tuples(dim.total(), k) {
        let par: Vec<u8> = idx.iter().map(|&i| dim.parity(i as usize)).collect();
        let mut s = eta_sign(sigma, &par);
        if self_pairing_parity(&par) == 1 {
            s = -s;
        }
        let mut full = sigma.act_on(&idx);
        full.extend_from_slice(&idx);
        t.add_term(full, Grassmann::from_int(budget, s as i64));
    }
    t
}

/// Φ(x ⊗ f̲*)(w̲) = x ⟨f̲*, w̲⟩: reads a tensor over U^{⊗k} ⊗ (U*)^{⊗k} as an
/// endomorphism of U^{⊗k} and applies it to `w`.
pub fn as_endomorphism(theta: &TensorElement, w: &TensorElement) -> Result<TensorElement, TensorError> {
    let k = w.signature.len();
    if theta.signature != TensorElement::mixed(k, k) || w.signature != TensorElement::all_up(k) {
        return Err(TensorError::SignatureMismatch);
    }
    let mut out = TensorElement::zero(w.dim, w.budget, w.signature.clone());
    for (idx, c) in &theta.terms {
        let (head, tail) = idx.split_at(k);
        let Some(d) = w.terms.get(tail) else { continue };
        let par: Vec<u8> = tail.iter().map(|&i| w.dim.parity(i as usize)).collect();
        // x c · ⟨e_J*, e_J d⟩; c is moved past nothing since the pairing
        // result is a scalar placed to the right of x.
        let tail_odd = w.dim.tuple_parity(tail) == 1;
        let mut coef = &c.twist(tail_odd) * d;
        if pairing_parity(&par, &par) == 1 {
            coef = -coef;
        }
        out.add_term(head.to_vec(), coef);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u8 = 4;

    #[test]
    fn gamma_examples() {
        let id = Permutation::identity(3);
        assert_eq!(gamma(&[1, 1, 0], &id), 1);
        let s = Permutation::transposition(2, 0, 1);
        assert_eq!(gamma(&[1, 1], &s), -1);
        assert_eq!(gamma(&[1, 0], &s), 1);
    }

    #[test]
    fn positional_reading_is_gamma_of_inverse() {
        for k in 1..=4 {
            for s in Permutation::all(k) {
                for bits in 0..1u32 << k {
                    let p: Vec<u8> = (0..k).map(|i| (bits >> i & 1) as u8).collect();
                    assert_eq!(gamma_positional(&p, &s), gamma(&p, &s.inverse()));
                }
            }
        }
    }

    #[test]
    fn cycle_parsing() {
        let p = Permutation::parse_cycles("(1 2 3)", 3).unwrap();
        assert_eq!(p.images(), &[1, 2, 0]);
        assert_eq!(p.to_string(), "(1 2 3)");
        assert!(Permutation::parse_cycles("()", 2).unwrap().is_identity());
        assert!(Permutation::parse_cycles("(1)(2)", 2).unwrap().is_identity());
        assert!(Permutation::parse_cycles("(1 1)", 2).is_err());
        assert!(Permutation::parse_cycles("(1 3)", 2).is_err());
        assert!(Permutation::parse_cycles("(1 2", 2).is_err());
        assert_eq!(Permutation::parse_cycles("(1,2)(3,4)", 4).unwrap(), nu(2));
    }

    #[test]
    fn structural_examples() {
        assert_eq!(tau(2).images(), &[0, 2, 1, 3]);
        assert_eq!(nu(2), Permutation::parse_cycles("(1 2)(3 4)", 4).unwrap());
        for n in 1..=4 {
            assert_eq!(mu(&[(1, 1)], &[n]).unwrap().inverse(), tau(n));
        }
        assert!(mu(&[(1, 2)], &[1]).is_err());
    }

    #[test]
    fn perm_act_examples() {
        let dim = SuperDim::new(1, 1);
        let t = TensorElement::basis(dim, B, TensorElement::all_up(2), vec![1, 1]);
        let s = Permutation::transposition(2, 0, 1);
        assert_eq!(perm_act(&s, &t).unwrap(), t.neg());
        let id = Permutation::identity(2);
        assert_eq!(perm_act(&id, &t).unwrap(), t);
    }

    #[test]
    fn pairing_examples() {
        let dim = SuperDim::new(1, 1);
        let f = |idx: Vec<u8>| TensorElement::basis(dim, B, vec![Slot::Down; idx.len()], idx);
        let v = |idx: Vec<u8>| TensorElement::basis(dim, B, vec![Slot::Up; idx.len()], idx);
        assert_eq!(ev_pairing(&f(vec![0]), &v(vec![0])).unwrap(), Grassmann::one(B));
        assert_eq!(ev_pairing(&f(vec![0]), &v(vec![1])).unwrap(), Grassmann::zero(B));
        assert_eq!(ev_pairing(&f(vec![1, 1]), &v(vec![1, 1])).unwrap(), Grassmann::from_int(B, -1));
        assert_eq!(ev_pairing(&f(vec![0, 1]), &v(vec![0, 1])).unwrap(), Grassmann::one(B));
    }

    #[test]
    fn derivation_examples() {
        let dim = SuperDim::new(1, 1);
        let up = |idx: Vec<u8>| TensorElement::basis(dim, B, TensorElement::all_up(2), idx);
        let x = |i: usize, j: usize, t: &TensorElement| derivation_act_up(i, j, t).unwrap();
        let two = |idx: Vec<u8>| {
            let mut t = TensorElement::zero(dim, B, TensorElement::all_up(2));
            t.add_term(idx, Grassmann::from_int(B, 2));
            t
        };
        assert_eq!(x(0, 0, &up(vec![0, 0])), two(vec![0, 0]));
        assert_eq!(x(1, 1, &up(vec![1, 1])), two(vec![1, 1]));
        let expected = up(vec![0, 1]).add(&up(vec![1, 0]).neg()).unwrap();
        assert_eq!(x(0, 1, &up(vec![1, 1])), expected);
        let mixed = TensorElement::basis(dim, B, TensorElement::mixed(1, 1), vec![0, 0]);
        assert!(derivation_act_up(0, 0, &mixed).is_err());
    }

    #[test]
    fn theta_identity_is_the_identity_map() {
        // p((i),(i)) = 0 for a single slot, so θ_id = e₁⊗e₁* + e₂⊗e₂*; the
        // supertrace sign only appears after the τ, ν transport.
        let dim = SuperDim::new(1, 1);
        let th = theta_sigma(dim, B, &Permutation::identity(1));
        let mut expected = TensorElement::zero(dim, B, TensorElement::mixed(1, 1));
        expected.add_term(vec![0, 0], Grassmann::one(B));
        expected.add_term(vec![1, 1], Grassmann::one(B));
        assert_eq!(th, expected);
        for i in 0..2u8 {
            let e = TensorElement::basis(dim, B, TensorElement::all_up(1), vec![i]);
            assert_eq!(as_endomorphism(&th, &e).unwrap(), e);
        }
    }

    #[test]
    fn all_permutations_enumerated() {
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::all(0).len(), 1);
    }
}
