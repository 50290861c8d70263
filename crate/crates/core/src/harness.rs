//! Randomized verification campaigns, counterexample minimization and
//! body-level duality checks. The command-line front end is a thin layer
//! over this module.
//!
//! Every campaign is a deterministic function of its [`RunConfig`]: trial
//! `t` draws from `ChaCha8Rng::seed_from_u64(seed + t)`, trials may run in
//! parallel, and results are collected in trial order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::grassmann::{rat, Grassmann, Rational};
use crate::linalg::{self, QMatrix};
use crate::picture::{
    block_index_map, compare, matrices_to_point, picture_composed, picture_formula, queer_trace_monomial,
    trace_monomial, Agreement, FormulaReading, PictureError,
};
use crate::polyring::{gl_act_point, MixedShape, PointW0, PolyError, PolyVariable, SuperPolynomial};
use crate::queer::{
    clifford_reading_sign, queer_picture_composed, queer_picture_formula, sergeev_from_eps, sergeev_on_basis, QueerError, QueerReading,
};
use crate::supermodule::{random_even, sample_gl, sample_q, sample_queer_algebra, SuperDim, SuperMatrix};
use crate::tensor::{derivation_act, index_tuples, multidegree_total, perm_act, Permutation, Slot, TensorElement};

pub const DEFAULT_TRIALS: usize = 20;
pub const DEFAULT_BUDGET: u8 = 6;
pub const DEFAULT_DEGREE_CAP: u32 = 4;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Picture(#[from] PictureError),
    #[error(transparent)]
    Queer(#[from] QueerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Gl,
    Q,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::Gl => "gl",
            Group::Q => "q",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Formula,
    Composed,
    Both,
}

/// Everything a campaign depends on.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub shape: MixedShape,
    pub mult: Vec<usize>,
    pub group: Group,
    pub sigma: Permutation,
    /// Clifford pattern ε of the Sergeev element σ ⊗ c^ε; `None` for a
    /// plain GL picture invariant.
    pub eps: Option<Vec<u8>>,
    pub reading: FormulaReading,
    pub budget: u8,
    pub degree_cap: u32,
    pub trials: usize,
    pub seed: u64,
}

impl RunConfig {
    /// A validated configuration with σ = id and default campaign settings.
    pub fn new(shape: MixedShape, mult: Vec<usize>) -> Result<Self, HarnessError> {
        let n = total(&shape, &mult)?;
        Ok(Self {
            shape,
            mult,
            group: Group::Gl,
            sigma: Permutation::identity(n),
            eps: None,
            reading: FormulaReading::Consistent,
            budget: DEFAULT_BUDGET,
            degree_cap: DEFAULT_DEGREE_CAP,
            trials: DEFAULT_TRIALS,
            seed: 0,
        })
    }

    pub fn dim(&self) -> SuperDim {
        self.shape.dim
    }

    /// N = Σmᵢbᵢ = Σmᵢtᵢ.
    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let n = total(&self.shape, &self.mult)?;
        if self.sigma.len() != n {
            return Err(PictureError::WrongSize(self.sigma.len(), n).into());
        }
        if let Some(eps) = &self.eps {
            if eps.len() != n || eps.iter().any(|&e| e > 1) {
                return Err(HarnessError::Config(format!("clifford pattern must be {n} digits of 0/1")));
            }
        }
        if (self.group == Group::Q || self.is_queer_invariant()) && !self.dim().is_queer() {
            return Err(QueerError::NotQueer(self.dim()).into());
        }
        if self.budget == 0 || self.budget > 63 {
            return Err(HarnessError::Config("lambda budget must be in 1..=63".into()));
        }
        Ok(())
    }

    pub fn is_queer_invariant(&self) -> bool {
        self.eps.as_ref().is_some_and(|e| e.contains(&1))
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            dim: [self.dim().m, self.dim().n],
            shape: self.shape.spaces.iter().map(|&(t, b)| format!("{t}:{b}")).collect::<Vec<_>>().join(","),
            mult: self.mult.clone(),
            group: self.group,
            perm: self.sigma.to_string(),
            eps: self.eps.as_ref().map(|e| e.iter().map(|d| char::from(b'0' + d)).collect()),
            lambda_gens: self.budget,
            degree_cap: self.degree_cap,
            trials: self.trials,
            seed: self.seed,
        }
    }
}

fn total(shape: &MixedShape, mult: &[usize]) -> Result<usize, HarnessError> {
    if mult.len() != shape.num_spaces() {
        return Err(HarnessError::Config(format!(
            "multidegree has {} entries but the shape has {} summands",
            mult.len(),
            shape.num_spaces()
        )));
    }
    multidegree_total(&shape.spaces, mult).map_err(|_| PictureError::Inconsistent.into())
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub dim: [usize; 2],
    pub shape: String,
    pub mult: Vec<usize>,
    pub group: Group,
    pub perm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    pub lambda_gens: u8,
    pub degree_cap: u32,
    pub trials: usize,
    pub seed: u64,
}

/// Hard limits on configurations accepted from text; beyond these the
/// term counts leave desk scale.
pub const MAX_TOTAL_DIM: usize = 8;
pub const MAX_N: usize = 6;

/// Flag values as typed on the command line.
#[derive(Debug, Clone, Default)]
pub struct Spec<'a> {
    /// `m,n`
    pub dim: &'a str,
    /// `t1:b1,t2:b2,…`
    pub shape: &'a str,
    /// `m1,m2,…`
    pub mult: &'a str,
    /// Cycle notation, 1-based; empty means the identity.
    pub perm: Option<&'a str>,
    /// 1-based position h of a single Clifford generator c_h.
    pub clifford: Option<usize>,
    /// 0/1 pattern ε, one digit per tensor factor.
    pub eps: Option<&'a str>,
}

pub fn parse_dim(text: &str) -> Result<SuperDim, HarnessError> {
    let parts = parse_list(text, "dimension")?;
    match parts[..] {
        [m, n] if m.checked_add(n).is_some_and(|d| (1..=MAX_TOTAL_DIM).contains(&d)) => Ok(SuperDim::new(m, n)),
        [_, _] => Err(HarnessError::Config(format!("dimension must satisfy 1 ≤ m+n ≤ {MAX_TOTAL_DIM}"))),
        _ => Err(HarnessError::Config(format!("dimension must be m,n, got {text:?}"))),
    }
}

pub fn parse_mult(text: &str) -> Result<Vec<usize>, HarnessError> {
    parse_list(text, "multidegree")
}

fn parse_list(text: &str, what: &str) -> Result<Vec<usize>, HarnessError> {
    text.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| HarnessError::Config(format!("bad {what} {text:?}"))))
        .collect()
}

pub fn parse_eps(text: &str) -> Result<Vec<u8>, HarnessError> {
    text.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(HarnessError::Config(format!("clifford pattern must consist of 0 and 1, got {text:?}"))),
        })
        .collect()
}

impl RunConfig {
    /// Builds and validates a configuration from flag text; campaign
    /// settings keep their defaults.
    pub fn from_spec(spec: &Spec) -> Result<Self, HarnessError> {
        let dim = parse_dim(spec.dim)?;
        let shape = MixedShape::parse(dim, spec.shape)?;
        let mult = parse_mult(spec.mult)?;
        if mult.len() == shape.num_spaces() && shape.spaces.iter().zip(&mult).any(|(&(t, b), &m)| m.saturating_mul(t.max(b)) > MAX_N)
        {
            return Err(HarnessError::Config(format!("total degree N is limited to {MAX_N}")));
        }
        let mut cfg = RunConfig::new(shape, mult)?;
        let n = cfg.n();
        if n > MAX_N {
            return Err(HarnessError::Config(format!("total degree N is limited to {MAX_N}")));
        }
        if let Some(p) = spec.perm.filter(|p| !p.trim().is_empty()) {
            cfg.sigma = Permutation::parse_cycles(p, n)
                .map_err(|e| HarnessError::Config(format!("bad permutation {p:?}: {e}")))?;
        }
        cfg.eps = match (spec.clifford, spec.eps) {
            (Some(_), Some(_)) => return Err(HarnessError::Config("give either --clifford or --eps, not both".into())),
            (Some(h), None) if (1..=n).contains(&h) => Some((0..n).map(|i| u8::from(i + 1 == h)).collect()),
            (Some(h), None) => return Err(QueerError::BadClifford(h, n).into()),
            (None, Some(e)) => Some(parse_eps(e)?),
            (None, None) => None,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub poly: SuperPolynomial,
    /// Set for [`Route::Both`].
    pub agreement: Option<Agreement>,
}

/// Builds the invariant selected by `cfg` along the requested route.
pub fn generate(cfg: &RunConfig, route: Route) -> Result<Generated, HarnessError> {
    cfg.validate()?;
    Ok(match route {
        Route::Composed => Generated { poly: composed(cfg)?, agreement: None },
        Route::Formula => Generated { poly: formula(cfg)?, agreement: None },
        Route::Both => {
            let a = composed(cfg)?;
            let b = formula(cfg)?;
            let agreement = Some(compare(&a, &b));
            Generated { poly: a, agreement }
        }
    })
}

fn composed(cfg: &RunConfig) -> Result<SuperPolynomial, HarnessError> {
    match &cfg.eps {
        Some(eps) if cfg.is_queer_invariant() => {
            let x = sergeev_from_eps(cfg.sigma.clone(), eps, 1);
            Ok(queer_picture_composed(&cfg.shape, &cfg.mult, &x)?)
        }
        _ => Ok(picture_composed(&cfg.shape, &cfg.mult, &cfg.sigma)?),
    }
}

fn formula(cfg: &RunConfig) -> Result<SuperPolynomial, HarnessError> {
    match &cfg.eps {
        Some(eps) if cfg.is_queer_invariant() => {
            let ones: Vec<usize> = (0..eps.len()).filter(|&i| eps[i] == 1).collect();
            if ones.len() != 1 || !cfg.sigma.is_identity() {
                return Err(HarnessError::Config(
                    "the closed formula covers 1 ⊗ c_h only; use --route composed for σ ⊗ c^ε".into(),
                ));
            }
            let reading = match cfg.reading {
                FormulaReading::Consistent => QueerReading::Corrected,
                FormulaReading::Literal => QueerReading::Literal,
            };
            Ok(queer_picture_formula(&cfg.shape, &cfg.mult, ones[0], reading)?)
        }
        _ => Ok(picture_formula(&cfg.shape, &cfg.mult, &cfg.sigma, cfg.reading)?),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub counterexample: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub config: ConfigEcho,
    pub trials: usize,
    pub failures: Vec<Failure>,
    /// True when no trial was run, so the pass carries no information.
    pub vacuous: bool,
    /// Wall-clock time; kept out of the serialized report so that output
    /// stays byte-identical across runs.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Draws one group element for `group` from `rng`.
pub fn sample_group<R: rand::Rng + ?Sized>(
    group: Group,
    dim: SuperDim,
    budget: u8,
    degree_cap: u32,
    rng: &mut R,
) -> SuperMatrix {
    match group {
        Group::Gl => sample_gl(dim, budget, degree_cap, rng),
        Group::Q => sample_q(dim.n, budget, degree_cap, rng),
    }
}

/// Runs `cfg.trials` random (group element, point) pairs against the
/// composed invariant and reports every pair where the value moved.
pub fn verify(cfg: &RunConfig) -> Result<VerifyReport, HarnessError> {
    let start = Instant::now();
    let poly = generate(cfg, Route::Composed)?.poly;
    let outcomes: Vec<Result<Option<Failure>, HarnessError>> =
        (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, &poly, cfg.seed.wrapping_add(t as u64))).collect();
    let mut failures = Vec::new();
    for o in outcomes {
        failures.extend(o?);
    }
    Ok(VerifyReport {
        config: cfg.echo(),
        trials: cfg.trials,
        failures,
        vacuous: cfg.trials == 0,
        elapsed: start.elapsed(),
    })
}

fn moves(poly: &SuperPolynomial, g: &SuperMatrix, w: &PointW0) -> Result<bool, HarnessError> {
    Ok(poly.evaluate(w)? != poly.evaluate(&gl_act_point(g, w)?)?)
}

fn run_trial(cfg: &RunConfig, poly: &SuperPolynomial, seed: u64) -> Result<Option<Failure>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = sample_group(cfg.group, cfg.dim(), cfg.budget, cfg.degree_cap, &mut rng);
    let w = PointW0::random(&cfg.shape, cfg.budget, cfg.degree_cap, &mut rng);
    if !moves(poly, &g, &w)? {
        return Ok(None);
    }
    let (g, w) = minimize(poly, cfg.group, g, w)?;
    let before = poly.evaluate(&w)?;
    let after = poly.evaluate(&gl_act_point(&g, &w)?)?;
    let counterexample = format!("value {before} becomes {after}; g = {}; w = {}", format_matrix(&g), format_point(&w));
    Ok(Some(Failure { seed, counterexample }))
}

/// Greedy shrinking of a failing pair: zero whole coordinates of w, then
/// drop single Λ terms of w and (for GL, where the result stays in the
/// group) nilpotent terms of g, keeping each step that still fails.
pub fn minimize(
    poly: &SuperPolynomial,
    group: Group,
    mut g: SuperMatrix,
    mut w: PointW0,
) -> Result<(SuperMatrix, PointW0), HarnessError> {
    let keys = |w: &PointW0| -> Vec<(usize, Vec<u8>)> {
        (0..w.shape().num_spaces()).flat_map(|s| w.coords(s).map(move |(k, _)| (s, k.clone()))).collect()
    };
    for (s, key) in keys(&w) {
        let mut t = w.clone();
        t.set(s, key, Grassmann::zero(w.budget()));
        if moves(poly, &g, &t)? {
            w = t;
        }
    }
    for (s, key) in keys(&w) {
        for mask in w.coord(s, &key).terms().map(|(m, _)| m).collect::<Vec<_>>() {
            let mut t = w.clone();
            t.set(s, key.clone(), drop_term(&w.coord(s, &key), mask));
            if moves(poly, &g, &t)? {
                w = t;
            }
        }
    }
    if group == Group::Gl {
        let d = g.size();
        for i in 0..d {
            for j in 0..d {
                for mask in g.get(i, j).terms().map(|(m, _)| m).filter(|&m| m != 0).collect::<Vec<_>>() {
                    let mut t = g.clone();
                    t.set(i, j, drop_term(g.get(i, j), mask));
                    if moves(poly, &t, &w)? {
                        g = t;
                    }
                }
            }
        }
    }
    Ok((g, w))
}

fn drop_term(x: &Grassmann, mask: u64) -> Grassmann {
    Grassmann::from_terms(x.budget(), x.terms().filter(|&(m, _)| m != mask).map(|(m, c)| (m, c.clone())))
}

/// One-line rendering `[[a, b], [c, d]]` for reports.
pub fn format_matrix(g: &SuperMatrix) -> String {
    let d = g.size();
    let rows: Vec<String> = (0..d)
        .map(|i| format!("[{}]", (0..d).map(|j| g.get(i, j).to_string()).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

/// A random even point drawn from `ChaCha8Rng::seed_from_u64(seed)`.
pub fn random_point(shape: &MixedShape, budget: u8, degree_cap: u32, seed: u64) -> PointW0 {
    PointW0::random(shape, budget, degree_cap, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `T(s)^{u}_{l} = value` for each nonzero coordinate, comma separated.
pub fn format_point(w: &PointW0) -> String {
    let mut out = String::new();
    for s in 0..w.shape().num_spaces() {
        let b = w.shape().lower_len(s);
        for (key, c) in w.coords(s) {
            let var = PolyVariable::new(s, key[..b].to_vec(), key[b..].to_vec());
            if !out.is_empty() {
                out.push_str(", ");
            }
            let _ = write!(out, "{var} = {c}");
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Outcome of a trace-monomial evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub matrices: Vec<String>,
    pub trace: String,
    /// The picture invariant at the point built from the matrices; in queer
    /// mode multiplied by the Clifford reading sign.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub picture_value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
}

/// Samples one matrix per summand of `(1,1)^s` and evaluates tr_σ (GL) or
/// the P-twisted queer trace monomial (when `cfg.eps` is set), and
/// compares it with the picture invariant at the matching point.
pub fn trace(cfg: &RunConfig) -> Result<TraceReport, HarnessError> {
    cfg.validate()?;
    if cfg.shape.spaces.iter().any(|&s| s != (1, 1)) {
        return Err(PictureError::NotTraceShape.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dim = cfg.dim();
    let f = block_index_map(&cfg.mult);
    let s = cfg.shape.num_spaces();
    match &cfg.eps {
        Some(eps) => {
            if !dim.is_queer() {
                return Err(QueerError::NotQueer(dim).into());
            }
            let mats: Vec<SuperMatrix> =
                (0..s).map(|_| sample_queer_algebra(dim.n, cfg.budget, cfg.degree_cap, &mut rng)).collect();
            let value = queer_trace_monomial(&cfg.sigma, eps, &f, &mats)?;
            let x = sergeev_from_eps(cfg.sigma.clone(), eps, 1);
            let phi = queer_picture_composed(&cfg.shape, &cfg.mult, &x)?;
            let mut at = phi.evaluate(&matrices_to_point(&cfg.shape, &mats))?;
            if clifford_reading_sign(&cfg.sigma, eps) < 0 {
                at = -at;
            }
            Ok(TraceReport {
                matrices: mats.iter().map(format_matrix).collect(),
                trace: value.to_string(),
                agree: Some(at == value),
                picture_value: Some(at.to_string()),
            })
        }
        None => {
            let mats: Vec<SuperMatrix> =
                (0..s).map(|_| random_even(dim, cfg.budget, cfg.degree_cap, &mut rng)).collect();
            let value = trace_monomial(&cfg.sigma, &f, &mats)?;
            let psi = picture_composed(&cfg.shape, &cfg.mult, &cfg.sigma)?;
            let at = psi.evaluate(&matrices_to_point(&cfg.shape, &mats))?;
            Ok(TraceReport {
                matrices: mats.iter().map(format_matrix).collect(),
                trace: value.to_string(),
                agree: Some(at == value),
                picture_value: Some(at.to_string()),
            })
        }
    }
}

/// A linear map on U^{⊗k} given on basis tensors as (coefficient, image)
/// pairs.
type BasisMap<'a> = dyn Fn(&[u8]) -> Vec<(Rational, Vec<u8>)> + 'a;

/// Result of comparing the commutant of the group action on U^{⊗k} with
/// the image of the symmetric group or Sergeev algebra, over ℚ.
#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub dim: [usize; 2],
    pub k: usize,
    pub group: Group,
    pub commutant_dim: usize,
    pub image_dim: usize,
    /// Rank of commutant and image together; equal spans iff it matches
    /// both dimensions.
    pub joint_rank: usize,
    pub agree: bool,
}

pub const DUALITY_MAX_TOTAL_DIM: usize = 3;
pub const DUALITY_MAX_K: usize = 3;

/// Body-level duality check. The commutant is the space of homogeneous
/// A ∈ End(U^{⊗k}) with ρ(x)A = (−1)^{|x||A|}Aρ(x) for every homogeneous
/// generator x of the Lie superalgebra, solved one generator at a time.
/// For q(n) the generators are [[E, 0], [0, E]] and [[0, E], [E, 0]]; the
/// [[A, −B], [B, A]] shape of Q(U) is what the odd ones become once an odd
/// Λ coefficient is moved past the basis vectors.
pub fn duality(dim: SuperDim, k: usize, group: Group) -> Result<DualityReport, HarnessError> {
    if dim.total() > DUALITY_MAX_TOTAL_DIM || k > DUALITY_MAX_K || k == 0 || dim.total() == 0 {
        return Err(HarnessError::Config(format!(
            "duality check is limited to 1 ≤ m+n ≤ {DUALITY_MAX_TOTAL_DIM} and 1 ≤ k ≤ {DUALITY_MAX_K}"
        )));
    }
    if group == Group::Q && !dim.is_queer() {
        return Err(QueerError::NotQueer(dim).into());
    }
    let basis = index_tuples(dim.total(), k);
    let pos: HashMap<Vec<u8>, usize> = basis.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let parity: Vec<u8> = basis.iter().map(|t| dim.tuple_parity(t)).collect();
    let size = basis.len();

    let matrix_of = |f: &BasisMap| -> QMatrix {
        let mut m = linalg::zeros(size, size);
        for (j, t) in basis.iter().enumerate() {
            for (c, img) in f(t) {
                let i = pos[&img];
                m[i][j] = &m[i][j] + &c;
            }
        }
        m
    };
    let tensor_terms = |t: &TensorElement| -> Vec<(Rational, Vec<u8>)> {
        t.terms().map(|(idx, c)| (c.body(), idx.clone())).collect()
    };
    let elementary = |a: usize, b: usize| -> QMatrix {
        matrix_of(&|t: &[u8]| {
            let e = TensorElement::basis(dim, 1, vec![Slot::Up; k], t.to_vec());
            tensor_terms(&derivation_act(a, b, &e).expect("index in range"))
        })
    };

    let mut generators: Vec<(QMatrix, u8)> = Vec::new();
    match group {
        Group::Gl => {
            for a in 0..dim.total() {
                for b in 0..dim.total() {
                    generators.push((elementary(a, b), (dim.parity(a) + dim.parity(b)) % 2));
                }
            }
        }
        Group::Q => {
            let n = dim.n;
            for a in 0..n {
                for b in 0..n {
                    let even = add(&elementary(a, b), &elementary(n + a, n + b), 1);
                    let odd = add(&elementary(n + a, b), &elementary(a, n + b), 1);
                    generators.push((even, 0));
                    generators.push((odd, 1));
                }
            }
        }
    }

    let mut commutant: Vec<Vec<Rational>> = Vec::new();
    for p in 0..2u8 {
        let mut space: Vec<QMatrix> = Vec::new();
        for i in 0..size {
            for j in 0..size {
                if (parity[i] + parity[j]) % 2 == p {
                    let mut e = linalg::zeros(size, size);
                    e[i][j] = rat(1);
                    space.push(e);
                }
            }
        }
        for (x, xp) in &generators {
            if space.is_empty() {
                break;
            }
            let sign = if xp * p == 1 { -1 } else { 1 };
            let columns: Vec<Vec<Rational>> =
                space.iter().map(|a| flatten(&add(&linalg::mul(x, a), &linalg::mul(a, x), -sign))).collect();
            let system = transpose(&columns, size * size);
            let null = linalg::nullspace(&system, space.len());
            space = null
                .iter()
                .map(|y| {
                    let mut acc = linalg::zeros(size, size);
                    for (c, a) in y.iter().zip(&space) {
                        if !c.is_zero() {
                            acc = add_scaled(&acc, a, c);
                        }
                    }
                    acc
                })
                .collect();
        }
        commutant.extend(space.iter().map(flatten));
    }

    let image: Vec<Vec<Rational>> = match group {
        Group::Gl => Permutation::all(k)
            .iter()
            .map(|sigma| {
                flatten(&matrix_of(&|t: &[u8]| {
                    let e = TensorElement::basis(dim, 1, vec![Slot::Up; k], t.to_vec());
                    tensor_terms(&perm_act(sigma, &e).expect("matching size"))
                }))
            })
            .collect(),
        Group::Q => {
            let mut v = Vec::new();
            for sigma in Permutation::all(k) {
                for mask in 0..1u64 << k {
                    v.push(flatten(&matrix_of(&|t: &[u8]| {
                        let (s, img) = sergeev_on_basis(dim, &sigma, mask, t);
                        vec![(rat(s as i64), img)]
                    })));
                }
            }
            v
        }
    };

    let commutant_dim = rank_of(&commutant);
    let image_dim = rank_of(&image);
    let joint: Vec<Vec<Rational>> = commutant.iter().chain(&image).cloned().collect();
    let joint_rank = rank_of(&joint);
    Ok(DualityReport {
        dim: [dim.m, dim.n],
        k,
        group,
        commutant_dim,
        image_dim,
        joint_rank,
        agree: commutant_dim == image_dim && joint_rank == image_dim,
    })
}


fn flatten(m: &QMatrix) -> Vec<Rational> {
    m.iter().flatten().cloned().collect()
}

/// a + s·b for s = ±1.
fn add(a: &QMatrix, b: &QMatrix, s: i64) -> QMatrix {
    add_scaled(a, b, &rat(s))
}

fn add_scaled(a: &QMatrix, b: &QMatrix, c: &Rational) -> QMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + c * y).collect()).collect()
}

/// Rows-by-columns matrix from a list of column vectors of length `rows`,
/// dropping all-zero rows.
fn transpose(columns: &[Vec<Rational>], rows: usize) -> QMatrix {
    (0..rows)
        .map(|r| columns.iter().map(|c| c[r].clone()).collect::<Vec<_>>())
        .filter(|row: &Vec<Rational>| row.iter().any(|x| !x.is_zero()))
        .collect()
}

fn rank_of(vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        0
    } else {
        linalg::rank(&vectors.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dim: SuperDim, shape: &str, mult: Vec<usize>) -> RunConfig {
        RunConfig::new(MixedShape::parse(dim, shape).unwrap(), mult).unwrap()
    }

    #[test]
    fn inconsistent_multidegree_is_rejected() {
        let err = RunConfig::new(MixedShape::parse(SuperDim::new(1, 1), "1:2").unwrap(), vec![1]).unwrap_err();
        assert_eq!(err.to_string(), "no invariants: Σmᵢbᵢ ≠ Σmᵢtᵢ");
    }

    #[test]
    fn verify_is_deterministic_and_passes() {
        let mut c = cfg(SuperDim::new(1, 1), "1:1", vec![2]);
        c.sigma = Permutation::parse_cycles("(1 2)", 2).unwrap();
        c.trials = 4;
        let a = verify(&c).unwrap();
        let b = verify(&c).unwrap();
        assert!(a.passed());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn spec_parsing() {
        let spec = Spec { dim: "1,1", shape: "1:1", mult: "3", perm: Some("(1 2)"), clifford: Some(2), eps: None };
        let c = RunConfig::from_spec(&spec).unwrap();
        assert_eq!(c.eps, Some(vec![0, 1, 0]));
        assert_eq!(c.sigma.to_string(), "(1 2)");
        let bad = Spec { dim: "1,1", shape: "1:2", mult: "1", ..Default::default() };
        assert_eq!(RunConfig::from_spec(&bad).unwrap_err().to_string(), "no invariants: Σmᵢbᵢ ≠ Σmᵢtᵢ");
        let q_on_gl = Spec { dim: "2,1", shape: "1:1", mult: "1", eps: Some("1"), ..Default::default() };
        assert!(RunConfig::from_spec(&q_on_gl).is_err());
        assert!(parse_dim("0,0").is_err());
        assert!(parse_eps("012").is_err());
    }

    #[test]
    fn zero_trials_is_vacuous() {
        let mut c = cfg(SuperDim::new(1, 1), "1:1", vec![1]);
        c.trials = 0;
        let r = verify(&c).unwrap();
        assert!(r.passed() && r.vacuous);
    }

    #[test]
    fn clifford_invariant_fails_under_gl() {
        let mut c = cfg(SuperDim::new(1, 1), "1:1", vec![1]);
        c.eps = Some(vec![1]);
        c.trials = 5;
        let r = verify(&c).unwrap();
        assert!(!r.passed());
        c.group = Group::Q;
        assert!(verify(&c).unwrap().passed());
    }

    #[test]
    fn both_routes_agree() {
        let c = cfg(SuperDim::new(2, 1), "2:1,0:1", vec![1, 1]);
        assert_eq!(generate(&c, Route::Both).unwrap().agreement, Some(Agreement::Equal));
    }

    #[test]
    fn duality_small_cases() {
        for group in [Group::Gl, Group::Q] {
            let r = duality(SuperDim::new(1, 1), 2, group).unwrap();
            assert!(r.agree, "{r:?}");
        }
        assert!(duality(SuperDim::new(1, 1), 3, Group::Q).unwrap().agree);
        assert!(duality(SuperDim::new(2, 1), 3, Group::Gl).unwrap().agree);
        assert!(duality(SuperDim::new(2, 2), 2, Group::Gl).is_err());
        assert!(duality(SuperDim::new(2, 1), 2, Group::Q).is_err());
    }

    #[test]
    fn trace_matches_picture() {
        let mut c = cfg(SuperDim::new(1, 1), "1:1,1:1", vec![2, 1]);
        c.sigma = Permutation::parse_cycles("(1 2 3)", 3).unwrap();
        assert_eq!(trace(&c).unwrap().agree, Some(true));
        c.eps = Some(vec![1, 1, 1]);
        assert_eq!(trace(&c).unwrap().agree, Some(true));
    }
}
