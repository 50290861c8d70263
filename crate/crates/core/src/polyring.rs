//! The super polynomial ring S(W*) of a mixed tensor superspace
//! W = ⊕ᵢ U^{⊗bᵢ} ⊗ (U*)^{⊗tᵢ}, and evaluation at Λ-points of W₀.
//!
//! A variable `T(i)^{u…}_{l…}` is the coordinate dual to `e_l ⊗ e_u*` in
//! summand `i`; its parity is the parity of the index tuple. Monomials are
//! kept normal-ordered (sorted by space, lower, upper) with Λ coefficients on
//! the left.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grassmann::{Grassmann, GrassmannError};
use crate::supermodule::{SuperDim, SuperMatrix};
use crate::tensor::{gl_diag_act, index_tuples, ShapePair, TensorElement, TensorError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("shape mismatch")]
    ShapeMismatch,
    #[error("point is not even (coordinate {0:?} has the wrong parity)")]
    PointNotEven(String),
    #[error("malformed polynomial: {0}")]
    Malformed(String),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Summands (t_i, b_i) over a superdimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MixedShape {
    pub dim: SuperDim,
    pub spaces: Vec<ShapePair>,
}

impl MixedShape {
    pub fn new(dim: SuperDim, spaces: Vec<ShapePair>) -> Self {
        assert!(!spaces.is_empty(), "shape needs at least one summand");
        MixedShape { dim, spaces }
    }

    /// Parses `t1:b1,t2:b2,…`.
    pub fn parse(dim: SuperDim, text: &str) -> Result<Self, PolyError> {
        let bad = || PolyError::Malformed(format!("bad shape `{text}` (expected t1:b1,t2:b2,…)"));
        let mut spaces = Vec::new();
        for part in text.split(',').map(str::trim) {
            let (t, b) = part.split_once(':').ok_or_else(bad)?;
            let t: usize = t.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if t > 16 || b > 16 {
                return Err(PolyError::Malformed("tensor degree too large".into()));
            }
            spaces.push((t, b));
        }
        if spaces.is_empty() {
            return Err(bad());
        }
        Ok(MixedShape { dim, spaces })
    }

    pub fn num_spaces(&self) -> usize {
        self.spaces.len()
    }

    pub fn lower_len(&self, space: usize) -> usize {
        self.spaces[space].1
    }

    pub fn upper_len(&self, space: usize) -> usize {
        self.spaces[space].0
    }
}

impl fmt::Display for MixedShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.spaces.iter().map(|(t, b)| format!("{t}:{b}")).collect();
        write!(f, "{} {}", self.dim, parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyVariable {
    pub space: usize,
    pub lower: Vec<u8>,
    pub upper: Vec<u8>,
}

impl PolyVariable {
    pub fn new(space: usize, lower: Vec<u8>, upper: Vec<u8>) -> Self {
        PolyVariable { space, lower, upper }
    }

    pub fn parity(&self, dim: SuperDim) -> u8 {
        (dim.tuple_parity(&self.lower) + dim.tuple_parity(&self.upper)) % 2
    }

    /// Coordinate key: lower indices followed by upper indices.
    pub fn key(&self) -> Vec<u8> {
        let mut k = self.lower.clone();
        k.extend_from_slice(&self.upper);
        k
    }

    fn fmt_indices(idx: &[u8]) -> String {
        let parts: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        parts.join(",")
    }
}

impl fmt::Display for PolyVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "T({})^{{{}}}_{{{}}}",
            self.space + 1,
            Self::fmt_indices(&self.upper),
            Self::fmt_indices(&self.lower)
        )
    }
}

/// Normal-ordered monomial: strictly increasing variables with exponents.
pub type Monomial = Vec<(PolyVariable, u32)>;

fn monomial_parity(m: &Monomial, dim: SuperDim) -> u8 {
    m.iter().map(|(v, e)| v.parity(dim) * (*e as u8 % 2)).sum::<u8>() % 2
}

/// Normal-orders an ordered product of variables. Returns the Koszul sign
/// of the reordering, or `None` when an odd variable repeats.
pub fn normal_order(vars: &[PolyVariable], dim: SuperDim) -> Option<(i32, Monomial)> {
    let parity: Vec<u8> = vars.iter().map(|v| v.parity(dim)).collect();
    let mut flips = 0usize;
    for i in 0..vars.len() {
        if parity[i] == 0 {
            continue;
        }
        for j in i + 1..vars.len() {
            if parity[j] == 1 && vars[j] < vars[i] {
                flips += 1;
            }
        }
    }
    let mut sorted: Vec<(PolyVariable, u8)> = vars.iter().cloned().zip(parity).collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Monomial = Vec::new();
    for (v, p) in sorted {
        match out.last_mut() {
            Some((last, e)) if *last == v => {
                if p == 1 {
                    return None;
                }
                *e += 1;
            }
            _ => out.push((v, 1)),
        }
    }
    Some((if flips % 2 == 1 { -1 } else { 1 }, out))
}

#[derive(Clone, PartialEq, Eq)]
pub struct SuperPolynomial {
    shape: MixedShape,
    budget: u8,
    terms: BTreeMap<Monomial, Grassmann>,
}

impl SuperPolynomial {
    pub fn zero(shape: MixedShape, budget: u8) -> Self {
        SuperPolynomial { shape, budget, terms: BTreeMap::new() }
    }

    pub fn constant(shape: MixedShape, c: Grassmann) -> Self {
        let mut p = Self::zero(shape, c.budget());
        p.add_term(Vec::new(), c);
        p
    }

    pub fn variable(shape: MixedShape, budget: u8, v: PolyVariable) -> Self {
        let mut p = Self::zero(shape, budget);
        p.add_term(vec![(v, 1)], Grassmann::one(budget));
        p
    }

    pub fn shape(&self) -> &MixedShape {
        &self.shape
    }

    pub fn budget(&self) -> u8 {
        self.budget
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Grassmann)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Grassmann {
        self.terms.get(m).cloned().unwrap_or_else(|| Grassmann::zero(self.budget))
    }

    /// Adds `c · m` for an already normal-ordered monomial.
    pub fn add_term(&mut self, m: Monomial, c: Grassmann) {
        if c.is_zero() {
            return;
        }
        let c = self.lift(c);
        match self.terms.entry(m) {
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

    /// Raises the coefficient budget if `c` needs more generators.
    fn lift(&mut self, c: Grassmann) -> Grassmann {
        if c.budget() > self.budget {
            self.set_budget(c.budget());
        }
        if c.budget() < self.budget {
            c.with_budget(self.budget).expect("budget increase")
        } else {
            c
        }
    }

    fn set_budget(&mut self, budget: u8) {
        for c in self.terms.values_mut() {
            *c = c.with_budget(budget).expect("budget increase");
        }
        self.budget = budget;
    }

    /// Re-embeds all coefficients into Λ(budget).
    pub fn with_budget(&self, budget: u8) -> Result<Self, PolyError> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.clone(), c.with_budget(budget)?);
        }
        Ok(SuperPolynomial { shape: self.shape.clone(), budget, terms })
    }

    /// Adds `c · v₁ v₂ ⋯` for variables in the given order.
    pub fn add_product(&mut self, vars: &[PolyVariable], c: Grassmann) {
        if let Some((s, m)) = normal_order(vars, self.shape.dim) {
            self.add_term(m, if s < 0 { -c } else { c });
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        if self.shape != other.shape {
            return Err(PolyError::ShapeMismatch);
        }
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
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

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    /// Left multiplication by a scalar: λ · (c m) = (λc) m.
    pub fn scale(&self, lambda: &Grassmann) -> Self {
        let mut r = Self::zero(self.shape.clone(), self.budget.max(lambda.budget()));
        let lambda = lambda.with_budget(r.budget).expect("budget increase");
        for (m, c) in &self.terms {
            let c = c.with_budget(r.budget).expect("budget increase");
            r.add_term(m.clone(), &lambda * &c);
        }
        r
    }

    /// (c X)(d Y) = c (−1)^{|X||d|} d · XY, with XY normal-ordered.
    pub fn poly_mul(&self, other: &Self) -> Result<Self, PolyError> {
        if self.shape != other.shape {
            return Err(PolyError::ShapeMismatch);
        }
        let dim = self.shape.dim;
        let budget = self.budget.max(other.budget);
        let mut r = Self::zero(self.shape.clone(), budget);
        for (mx, cx) in &self.terms {
            let cx = cx.with_budget(budget)?;
            let px = monomial_parity(mx, dim);
            for (my, cy) in &other.terms {
                let Some((sign, m)) = merge_monomials(mx, my, dim) else { continue };
                let cy = cy.with_budget(budget)?.twist(px == 1);
                let c = &cx * &cy;
                r.add_term(m, if sign < 0 { -c } else { c });
            }
        }
        Ok(r)
    }

    /// Per-space counts of variables in a monomial.
    pub fn multidegree_of(&self, m: &Monomial) -> Vec<usize> {
        let mut deg = vec![0; self.shape.num_spaces()];
        for (v, e) in m {
            deg[v.space] += *e as usize;
        }
        deg
    }

    pub fn is_multihomogeneous(&self, mult: &[usize]) -> bool {
        self.terms.keys().all(|m| self.multidegree_of(m) == mult)
    }

    /// Substitutes every variable by its coordinate in `w`, multiplying
    /// left to right after the coefficient.
    pub fn evaluate(&self, w: &PointW0) -> Result<Grassmann, PolyError> {
        if self.shape != w.shape {
            return Err(PolyError::ShapeMismatch);
        }
        w.check_even()?;
        let mut acc = Grassmann::zero(w.budget);
        for (m, c) in &self.terms {
            let mut val = c.with_budget(w.budget)?;
            for (v, e) in m {
                let x = w.coord(v.space, &v.key());
                for _ in 0..*e {
                    val = &val * &x;
                    if val.is_zero() {
                        break;
                    }
                }
                if val.is_zero() {
                    break;
                }
            }
            acc += &val;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            shape: ShapeJson {
                dim: [self.shape.dim.m, self.shape.dim.n],
                spaces: self.shape.spaces.iter().map(|&(t, b)| [t, b]).collect(),
            },
            budget: self.budget as u32,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| PolyTermJson {
                    monomial: m
                        .iter()
                        .map(|(v, e)| VarJson {
                            space: v.space + 1,
                            lower: v.lower.iter().map(|&i| i as usize + 1).collect(),
                            upper: v.upper.iter().map(|&i| i as usize + 1).collect(),
                            exp: *e,
                        })
                        .collect(),
                    coef: c.to_string(),
                })
                .collect(),
        }
    }

    /// Accepts monomials in any order; they are normal-ordered on input.
    pub fn from_json(j: &PolyJson) -> Result<Self, PolyError> {
        let [m, n] = j.shape.dim;
        if m + n == 0 || m + n > 255 {
            return Err(PolyError::Malformed("bad superdimension".into()));
        }
        if j.shape.spaces.is_empty() {
            return Err(PolyError::Malformed("empty shape".into()));
        }
        if j.budget == 0 || j.budget > 64 {
            return Err(GrassmannError::BadBudget(j.budget).into());
        }
        let shape = MixedShape::new(SuperDim::new(m, n), j.shape.spaces.iter().map(|&[t, b]| (t, b)).collect());
        let budget = j.budget as u8;
        let mut p = Self::zero(shape.clone(), budget);
        for term in &j.terms {
            let c = Grassmann::parse(budget, &term.coef)?;
            let mut vars = Vec::new();
            for v in &term.monomial {
                if v.space == 0 || v.space > shape.num_spaces() {
                    return Err(PolyError::Malformed("space index out of range".into()));
                }
                let (t, b) = shape.spaces[v.space - 1];
                if v.lower.len() != b || v.upper.len() != t {
                    return Err(PolyError::Malformed("index tuple does not match shape".into()));
                }
                if v.lower.iter().chain(&v.upper).any(|&i| i == 0 || i > m + n) {
                    return Err(PolyError::Malformed("index out of range".into()));
                }
                if v.exp > 64 {
                    return Err(PolyError::Malformed("exponent too large".into()));
                }
                let var = PolyVariable::new(
                    v.space - 1,
                    v.lower.iter().map(|&i| (i - 1) as u8).collect(),
                    v.upper.iter().map(|&i| (i - 1) as u8).collect(),
                );
                for _ in 0..v.exp {
                    vars.push(var.clone());
                }
            }
            p.add_product(&vars, c);
        }
        Ok(p)
    }

    pub fn parse_json(text: &str) -> Result<Self, PolyError> {
        let j: PolyJson = serde_json::from_str(text).map_err(|e| PolyError::Malformed(e.to_string()))?;
        Self::from_json(&j)
    }

    pub fn to_latex(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mono: Vec<String> = m
                    .iter()
                    .map(|(v, e)| {
                        let base = format!(
                            "T^{{({})}}{{}}^{{{}}}_{{{}}}",
                            v.space + 1,
                            PolyVariable::fmt_indices(&v.upper),
                            PolyVariable::fmt_indices(&v.lower)
                        );
                        if *e > 1 { format!("\\left({base}\\right)^{{{e}}}") } else { base }
                    })
                    .collect();
                format!("{} {}", latex_coef(c), mono.join(" "))
            })
            .collect();
        parts.join(" + ").replace("+ -", "- ")
    }
}

fn latex_coef(c: &Grassmann) -> String {
    let s = c.to_string();
    if c.num_terms() > 1 {
        format!("\\left({}\\right)", s.replace('*', " "))
    } else if s == "1" {
        String::new()
    } else if s == "-1" {
        "-".into()
    } else {
        s.replace('*', " ")
    }
}

/// Merges two normal-ordered monomials, returning the Koszul sign of moving
/// the odd variables of `y` past the larger odd variables of `x`.
fn merge_monomials(x: &Monomial, y: &Monomial, dim: SuperDim) -> Option<(i32, Monomial)> {
    let mut flips = 0usize;
    for (vy, ey) in y {
        if vy.parity(dim) == 0 || ey % 2 == 0 {
            continue;
        }
        for (vx, ex) in x {
            if vx.parity(dim) == 1 && ex % 2 == 1 && vx > vy {
                flips += 1;
            }
        }
    }
    let mut out: BTreeMap<PolyVariable, u32> = x.iter().cloned().collect();
    for (v, e) in y {
        let slot = out.entry(v.clone()).or_insert(0);
        *slot += e;
        if *slot > 1 && v.parity(dim) == 1 {
            return None;
        }
    }
    Some((if flips % 2 == 1 { -1 } else { 1 }, out.into_iter().collect()))
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let cs = c.to_string();
            let (neg, body) = if c.num_terms() == 1 && cs.starts_with('-') {
                (true, cs[1..].to_string())
            } else if c.num_terms() > 1 {
                (false, format!("({cs})"))
            } else {
                (false, cs)
            };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono: Vec<String> = m
                .iter()
                .map(|(v, e)| if *e > 1 { format!("({v})^{e}") } else { v.to_string() })
                .collect();
            if mono.is_empty() {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{}", mono.join(" "))?;
            } else {
                write!(f, "{body}*{}", mono.join(" "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeJson {
    pub dim: [usize; 2],
    /// (t, b) per summand.
    pub spaces: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarJson {
    pub space: usize,
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
    pub exp: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub monomial: Vec<VarJson>,
    pub coef: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub shape: ShapeJson,
    pub budget: u32,
    pub terms: Vec<PolyTermJson>,
}

/// An even Λ-point w = Σ e_β λ_β of W, stored per summand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointW0 {
    shape: MixedShape,
    budget: u8,
    coords: Vec<BTreeMap<Vec<u8>, Grassmann>>,
}

impl PointW0 {
    pub fn zero(shape: MixedShape, budget: u8) -> Self {
        let coords = vec![BTreeMap::new(); shape.num_spaces()];
        PointW0 { shape, budget, coords }
    }

    pub fn shape(&self) -> &MixedShape {
        &self.shape
    }

    pub fn budget(&self) -> u8 {
        self.budget
    }

    /// Coordinate of basis tuple `key` (lower indices, then upper) in a summand.
    pub fn coord(&self, space: usize, key: &[u8]) -> Grassmann {
        self.coords[space].get(key).cloned().unwrap_or_else(|| Grassmann::zero(self.budget))
    }

    pub fn set(&mut self, space: usize, key: Vec<u8>, c: Grassmann) {
        let (t, b) = self.shape.spaces[space];
        assert_eq!(key.len(), t + b, "coordinate key length");
        if c.is_zero() {
            self.coords[space].remove(&key);
        } else {
            self.coords[space].insert(key, c);
        }
    }

    pub fn coords(&self, space: usize) -> impl Iterator<Item = (&Vec<u8>, &Grassmann)> {
        self.coords[space].iter()
    }

    pub fn check_even(&self) -> Result<(), PolyError> {
        let dim = self.shape.dim;
        for (space, map) in self.coords.iter().enumerate() {
            for (key, c) in map {
                let ok = if dim.tuple_parity(key) == 0 { c.is_even() } else { c.is_odd() };
                if !ok {
                    return Err(PolyError::PointNotEven(format!("space {} index {:?}", space + 1, key)));
                }
            }
        }
        Ok(())
    }

    pub fn summand_tensor(&self, space: usize) -> TensorElement {
        let (t, b) = self.shape.spaces[space];
        let mut te = TensorElement::zero(self.shape.dim, self.budget, TensorElement::mixed(b, t));
        for (k, c) in &self.coords[space] {
            te.add_term(k.clone(), c.clone());
        }
        te
    }

    /// Random even point: every coordinate gets a value of matching parity
    /// with small body (when even) and a sparse nilpotent part.
    pub fn random<R: Rng + ?Sized>(shape: &MixedShape, budget: u8, degree_cap: u32, rng: &mut R) -> Self {
        let mut w = Self::zero(shape.clone(), budget);
        let d = shape.dim.total();
        for (space, &(t, b)) in shape.spaces.iter().enumerate() {
            for key in index_tuples(d, t + b) {
                let p = shape.dim.tuple_parity(&key);
                let extra = if degree_cap == 0 { 0 } else { rng.gen_range(0..=1) };
                let c = Grassmann::random(budget, degree_cap, Some(p), extra, rng);
                w.set(space, key, c);
            }
        }
        w
    }

    /// Total number of nonzero Λ monomials across all coordinates.
    pub fn weight(&self) -> usize {
        self.coords.iter().flat_map(|m| m.values()).map(Grassmann::num_terms).sum()
    }
}

/// g·w: each summand transforms by the diagonal action (UP slots by g,
/// DOWN slots contragrediently).
pub fn gl_act_point(g: &SuperMatrix, w: &PointW0) -> Result<PointW0, PolyError> {
    if g.dim() != w.shape.dim {
        return Err(PolyError::ShapeMismatch);
    }
    let mut out = PointW0::zero(w.shape.clone(), w.budget);
    for space in 0..w.shape.num_spaces() {
        let moved = gl_diag_act(g, &w.summand_tensor(space))?;
        for (k, c) in moved.terms() {
            out.set(space, k.clone(), c.clone());
        }
    }
    Ok(out)
}
