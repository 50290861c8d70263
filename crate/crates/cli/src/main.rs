//! `superinv`: generate, evaluate and verify graded picture invariants.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or configuration
//! error. Output on stdout is a deterministic function of the flags; timing
//! goes to stderr.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use superinv::harness::{self, Group, HarnessError, Route, RunConfig, Spec};
use superinv::picture::{diagram, Agreement, FormulaReading};
use superinv::polyring::SuperPolynomial;

#[derive(Parser)]
#[command(name = "superinv", version, about = "Invariants of mixed tensor superspaces under GL(m|n) and Q(n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a picture invariant as JSON (default) or LaTeX.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Print the closed picture (boxes and arrows) instead.
        #[arg(long)]
        diagram: bool,
    },
    /// Evaluate an invariant at a random even point drawn from --seed.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Evaluate this polynomial (JSON file) instead of a generated one.
        #[arg(long)]
        poly: Option<std::path::PathBuf>,
    },
    /// Check invariance on random (group element, point) pairs.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the commutant of the group action on U^{⊗k} with the image
    /// of the symmetric group (gl) or Sergeev algebra (q).
    Duality {
        #[command(flatten)]
        common: Common,
        /// Tensor power.
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Compare a trace monomial of random matrices with the picture
    /// invariant at the matching point; shapes (1,1)^s only.
    Trace {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum GroupArg {
    Gl,
    Q,
}

#[derive(Copy, Clone, ValueEnum)]
enum RouteArg {
    Formula,
    Composed,
    Both,
}

#[derive(Copy, Clone, ValueEnum)]
enum ReadingArg {
    Consistent,
    Literal,
}

#[derive(Args)]
struct Common {
    /// Superdimension m,n of U.
    #[arg(long, default_value = "1,1")]
    dim: String,
    /// Summands U^{⊗t} ⊗ U*^{⊗b} of W as t1:b1,t2:b2,…
    #[arg(long, default_value = "1:1")]
    shape: String,
    /// Multidegree m1,m2,…
    #[arg(long, default_value = "1")]
    mult: String,
    /// Permutation σ in cycle notation, e.g. "(1 2)(3)".
    #[arg(long)]
    perm: Option<String>,
    /// Insert the Clifford generator c_h (1-based).
    #[arg(long, conflicts_with = "eps")]
    clifford: Option<usize>,
    /// Clifford pattern ε as a 0/1 string, e.g. 0101.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, value_enum, default_value = "gl")]
    group: GroupArg,
    #[arg(long, value_enum, default_value = "composed")]
    route: RouteArg,
    /// Sign reading of the closed formula.
    #[arg(long, value_enum, default_value = "consistent")]
    reading: ReadingArg,
    /// Number of Grassmann generators.
    #[arg(long, default_value_t = harness::DEFAULT_BUDGET)]
    lambda_gens: u8,
    /// Maximal degree of random Grassmann coefficients.
    #[arg(long, default_value_t = harness::DEFAULT_DEGREE_CAP)]
    degree_cap: u32,
    #[arg(long, default_value_t = harness::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, conflicts_with = "latex")]
    json: bool,
    #[arg(long)]
    latex: bool,
}

impl Common {
    fn config(&self) -> Result<RunConfig, HarnessError> {
        let spec = Spec {
            dim: &self.dim,
            shape: &self.shape,
            mult: &self.mult,
            perm: self.perm.as_deref(),
            clifford: self.clifford,
            eps: self.eps.as_deref(),
        };
        let mut cfg = RunConfig::from_spec(&spec)?;
        cfg.group = match self.group {
            GroupArg::Gl => Group::Gl,
            GroupArg::Q => Group::Q,
        };
        cfg.reading = match self.reading {
            ReadingArg::Consistent => FormulaReading::Consistent,
            ReadingArg::Literal => FormulaReading::Literal,
        };
        cfg.budget = self.lambda_gens;
        cfg.degree_cap = self.degree_cap;
        cfg.trials = self.trials;
        cfg.seed = self.seed;
        cfg.validate()?;
        Ok(cfg)
    }

    fn route(&self) -> Route {
        match self.route {
            RouteArg::Formula => Route::Formula,
            RouteArg::Composed => Route::Composed,
            RouteArg::Both => Route::Both,
        }
    }
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("SUPERINV_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome, HarnessError> {
    match command {
        Command::Gen { common, diagram: draw } => gen(&common, draw),
        Command::Eval { common, poly } => eval(&common, poly),
        Command::Verify { common } => verify(&common),
        Command::Duality { common, k } => duality(&common, k),
        Command::Trace { common } => trace(&common),
    }
}

fn print_poly(p: &SuperPolynomial, latex: bool) {
    if latex {
        println!("{}", p.to_latex());
    } else {
        println!("{}", to_json(&p.to_json()));
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn gen(common: &Common, draw: bool) -> Result<Outcome, HarnessError> {
    let cfg = common.config()?;
    if draw {
        print!("{}", diagram(&cfg.mult, &cfg.sigma));
        return Ok(Outcome::Pass);
    }
    let route = common.route();
    let out = harness::generate(&cfg, route)?;
    match out.agreement {
        None => {
            print_poly(&out.poly, common.latex);
            Ok(Outcome::Pass)
        }
        Some(Agreement::Equal) => {
            println!("routes agree ({} terms)", out.poly.num_terms());
            Ok(Outcome::Pass)
        }
        Some(a) => {
            let formula = harness::generate(&cfg, Route::Formula)?.poly;
            let diff = out.poly.sub(&formula)?;
            let verdict = if a == Agreement::Negated { "formula = −composed" } else { "routes differ" };
            println!("{verdict}");
            println!("composed − formula = {diff}");
            Ok(Outcome::Fail)
        }
    }
}

fn eval(common: &Common, poly: Option<std::path::PathBuf>) -> Result<Outcome, HarnessError> {
    let p = match poly {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
            SuperPolynomial::parse_json(&text)?
        }
        None => harness::generate(&common.config()?, common.route())?.poly,
    };
    let w = harness::random_point(p.shape(), common.lambda_gens.max(p.budget()), common.degree_cap, common.seed);
    let value = p.evaluate(&w)?;
    if common.json {
        let out = serde_json::json!({ "point": harness::format_point(&w), "value": value.to_json() });
        println!("{}", to_json(&out));
    } else {
        println!("w = {}", harness::format_point(&w));
        println!("value = {value}");
    }
    Ok(Outcome::Pass)
}

fn verify(common: &Common) -> Result<Outcome, HarnessError> {
    let cfg = common.config()?;
    let report = harness::verify(&cfg)?;
    eprintln!("elapsed: {:.3}s", report.elapsed.as_secs_f64());
    if common.json {
        println!("{}", to_json(&report));
    } else if report.vacuous {
        println!("PASS (vacuous: 0 trials)");
    } else if report.passed() {
        println!("PASS: {} trials, group {}", report.trials, cfg.group.name());
    } else {
        println!("FAIL: {} of {} trials, group {}", report.failures.len(), report.trials, cfg.group.name());
        for f in &report.failures {
            println!("  seed {}: {}", f.seed, f.counterexample);
        }
    }
    Ok(if report.passed() { Outcome::Pass } else { Outcome::Fail })
}

fn duality(common: &Common, k: usize) -> Result<Outcome, HarnessError> {
    let dim = harness::parse_dim(&common.dim)?;
    let group = match common.group {
        GroupArg::Gl => Group::Gl,
        GroupArg::Q => Group::Q,
    };
    let r = harness::duality(dim, k, group)?;
    if common.json {
        println!("{}", to_json(&r));
    } else {
        let verdict = if r.agree { "spans agree" } else { "spans differ" };
        println!(
            "{verdict}: ({}|{}), k = {}, {}: commutant dim {}, image dim {}, joint rank {}",
            r.dim[0],
            r.dim[1],
            r.k,
            group.name(),
            r.commutant_dim,
            r.image_dim,
            r.joint_rank
        );
    }
    Ok(if r.agree { Outcome::Pass } else { Outcome::Fail })
}

fn trace(common: &Common) -> Result<Outcome, HarnessError> {
    let cfg = common.config()?;
    let r = harness::trace(&cfg)?;
    if common.json {
        println!("{}", to_json(&r));
    } else {
        for (i, m) in r.matrices.iter().enumerate() {
            println!("A{} = {m}", i + 1);
        }
        println!("trace = {}", r.trace);
        if let Some(v) = &r.picture_value {
            println!("invariant = {v}");
        }
        if let Some(a) = r.agree {
            println!("{}", if a { "match" } else { "mismatch" });
        }
    }
    Ok(if r.agree == Some(false) { Outcome::Fail } else { Outcome::Pass })
}
