//! Argument parsing and subcommand dispatch.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pretense_core::asymptotics::{
    euler_maclaurin_zeta, growth_fit_range, l_truncation_bounded, xi_from_sums, xi_tilde, CoefficientBound, LookupMode,
    XiSeries,
};
use pretense_core::constructions::{construct, ConstructionParams};
use pretense_core::degree::{alpha_coeffs_with_degree, determinant_profile, recursion_residual_with_degree};
use pretense_core::dirichlet::{convolve_table, dirichlet_inverse, solve_quotient, solve_quotient_up_to};
use pretense_core::metrics::{cutoff_grid, distance_beta, distance_classic, distance_strong, h_series, hhat_series};
use pretense_core::table::{default_grid, geometric_grid, max_exponent};
use pretense_core::{
    build_sieve, evaluate, partial_sums, Complex64, FunctionSpec, PartialSumSeries, Rule, SummationMode, ValueTable,
};

use crate::config::ExperimentConfig;
use crate::descriptor::Resolver;
use crate::verify::{run_bundle, Bundle};
use crate::{CliError, EXIT_OK};

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "pretense", version, about = "Multiplicative functions, pretentious distances and Dirichlet quotients")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by all subcommands; each subcommand reads the ones it needs.
#[derive(Debug, Args)]
pub struct Opts {
    /// Table length / cutoff.
    #[arg(long = "N", global = true)]
    pub n: Option<u64>,
    /// Spec descriptor (see `descriptor` docs), JSON path or `@name` from the config.
    #[arg(long, global = true)]
    pub spec: Option<String>,
    /// Second spec for two-function subcommands.
    #[arg(long = "with", global = true)]
    pub with: Option<String>,
    /// Weight exponent of the distance, or of the optimality twist.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Exponent sigma of H and Hhat, or the real part of s for `lseries`.
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Depth of the strong distance, inner truncation of H, or largest exponent.
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Prime cutoff of Hhat.
    #[arg(long = "Y", global = true)]
    pub y: Option<f64>,
    /// Exponent in xi(x) = S(x) / x^alpha.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Comma-separated checkpoints.
    #[arg(long, global = true, value_delimiter = ',')]
    pub checkpoints: Option<Vec<f64>>,
    /// Output file, or output directory for `verify`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random specs and verify bundles.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "PRETENSE_THREADS")]
    pub threads: Option<usize>,
    /// Lookup of xi off the sample grid.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Experiment configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Nearest,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sieve to N; prints the prime count and largest prime, `--out` writes the primes.
    Sieve,
    /// Values f(n), n <= N, as CSV.
    Eval,
    /// Partial sums at checkpoints as CSV.
    Sums,
    /// Dirichlet convolution of --spec and --with, n <= N.
    Convolve,
    /// Local series of h with g = f * h, f = --spec, g = --with, primes <= N.
    Quotient,
    /// Dirichlet inverse of --spec, n <= N.
    Inverse,
    /// Pretentious distance of --spec and --with (classic, --beta, or --beta with --k).
    Distance,
    /// H(sigma), or Hhat_Y(sigma) with --Y, of --spec (or of --with / --spec).
    Hseries,
    /// Degree-d diagnostics of --spec at primes <= N.
    Degree(DegreeArgs),
    /// Build a spec descriptor JSON.
    Construct(ConstructArgs),
    /// Growth exponent of a partial-sum CSV, or of the sums of --spec.
    GrowthFit(GrowthFitArgs),
    /// xi(x) = S(x) / x^alpha, and xi~ with --with h.
    Xi,
    /// Truncated Dirichlet series sum_{n <= N} f(n) n^{-s}.
    Lseries(LseriesArgs),
    /// Run a verification bundle and print its pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct DegreeArgs {
    /// Degree to test against instead of the declared one.
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// one, delta, moebius, liouville, alternating, character, kronecker,
    /// archimedean-twist, sparse-dyadic, optimality-twist, squarefree-restrict, divisor
    pub name: String,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub index: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub discriminant: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Comma-separated interval indices j.
    #[arg(long, value_delimiter = ',')]
    pub intervals: Option<Vec<u32>>,
    /// Cutoff for the sign rule of the optimality twist.
    #[arg(long)]
    pub cutoff: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GrowthFitArgs {
    /// Partial-sum CSV as written by `sums`.
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LseriesArgs {
    /// Imaginary part of s; the real part is --sigma.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub t: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub bundle: Bundle,
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("run `pretense --help` for usage");
            }
            e.exit_code()
        }
    }
}

/// Effective settings after merging flags over the config file.
struct Ctx {
    opts: Opts,
    cfg: ExperimentConfig,
}

impl Ctx {
    fn n(&self, default: u64) -> u64 {
        self.opts.n.or(self.cfg.n).unwrap_or(default)
    }

    fn seed(&self) -> u64 {
        self.opts.seed.or(self.cfg.seed).unwrap_or(0)
    }

    fn out(&self) -> Option<PathBuf> {
        self.opts.out.clone().or_else(|| self.cfg.out.clone())
    }

    fn resolver(&self, n: u64) -> Resolver<'_> {
        Resolver {
            named: &self.cfg.specs,
            twist_cutoff: n.max(2),
        }
    }

    fn spec(&self, n: u64) -> Result<FunctionSpec> {
        let text = self.opts.spec.as_deref().ok_or_else(|| usage("--spec is required"))?;
        self.resolver(n).resolve(text)
    }

    fn with(&self, n: u64) -> Result<FunctionSpec> {
        let text = self.opts.with.as_deref().ok_or_else(|| usage("--with is required"))?;
        self.resolver(n).resolve(text)
    }

    fn require<T: Copy>(&self, v: Option<T>, flag: &str) -> Result<T> {
        v.ok_or_else(|| usage(&format!("{flag} is required")))
    }

    /// `--checkpoints`, else the configured or default geometric grid up to `n`.
    fn checkpoints(&self, n: u64) -> Result<Vec<f64>> {
        if let Some(c) = &self.opts.checkpoints {
            if c.is_empty() || c.iter().any(|x| !x.is_finite()) {
                return Err(usage("--checkpoints must be a list of numbers"));
            }
            return Ok(c.clone());
        }
        match (self.cfg.grid_start, self.cfg.grid_ratio) {
            (None, None) => Ok(default_grid(n as f64)),
            (start, ratio) => {
                let start = start.unwrap_or(pretense_core::table::GRID_START);
                let ratio = ratio.unwrap_or_else(pretense_core::table::grid_ratio);
                if !(start > 0.0 && ratio > 1.0) {
                    return Err(usage("grid_start must be positive and grid_ratio above 1"));
                }
                Ok(geometric_grid(start, ratio, n as f64))
            }
        }
    }

    fn emit(&self, body: &str) -> Result<()> {
        match self.out() {
            Some(path) => write_file(&path, body),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(body.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}

fn usage(msg: &str) -> CliError {
    CliError::Usage(msg.to_string())
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, body)?;
    Ok(())
}

fn table_csv(t: &ValueTable) -> Result<String> {
    let mut buf = Vec::new();
    t.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

fn series_csv(s: &PartialSumSeries) -> Result<String> {
    let mut buf = Vec::new();
    s.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn execute(cli: Cli) -> Result<()> {
    let cfg = match &cli.opts.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let ctx = Ctx { opts: cli.opts, cfg };
    if let Some(threads) = ctx.opts.threads.or(ctx.cfg.threads) {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        // a pool may already exist when called in-process more than once
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match cli.command {
        Command::Sieve => cmd_sieve(&ctx),
        Command::Eval => {
            let n = ctx.n(1000);
            let spec = ctx.spec(n)?;
            ctx.emit(&table_csv(&evaluate(&spec, &build_sieve(n)?, n)?)?)
        }
        Command::Sums => cmd_sums(&ctx),
        Command::Convolve => {
            let n = ctx.n(1000);
            let sieve = build_sieve(n)?;
            let f = evaluate(&ctx.spec(n)?, &sieve, n)?;
            let h = evaluate(&ctx.with(n)?, &sieve, n)?;
            ctx.emit(&table_csv(&convolve_table(&f, &h, n)?)?)
        }
        Command::Quotient => {
            let n = ctx.n(100);
            let sieve = build_sieve(n.max(2))?;
            let (f, g) = (ctx.spec(n)?, ctx.with(n)?);
            let q = match ctx.opts.k {
                Some(k) => solve_quotient(&f, &g, sieve.primes(), k)?,
                None => solve_quotient_up_to(&f, &g, &sieve, n)?,
            };
            ctx.emit(&(q.to_json()? + "\n"))
        }
        Command::Inverse => {
            let n = ctx.n(1000);
            let sieve = build_sieve(n)?;
            let k = ctx.opts.k.unwrap_or_else(|| max_exponent(2, n).max(1));
            let inv = dirichlet_inverse(&ctx.spec(n)?, sieve.primes(), k)?;
            ctx.emit(&table_csv(&evaluate(&inv, &sieve, n)?)?)
        }
        Command::Distance => cmd_distance(&ctx),
        Command::Hseries => cmd_hseries(&ctx),
        Command::Degree(a) => cmd_degree(&ctx, &a),
        Command::Construct(a) => cmd_construct(&ctx, a),
        Command::GrowthFit(a) => cmd_growth_fit(&ctx, &a),
        Command::Xi => cmd_xi(&ctx),
        Command::Lseries(a) => cmd_lseries(&ctx, &a),
        Command::Verify(a) => cmd_verify(&ctx, a.bundle),
    }
}

fn cmd_sieve(ctx: &Ctx) -> Result<()> {
    let n = ctx.n(1_000_000);
    let sieve = build_sieve(n)?;
    let primes = sieve.primes();
    let largest = primes.last().map_or(0, |&p| p as u64);
    let summary = format!("limit,prime_count,largest_prime\n{n},{},{largest}\n", primes.len());
    match ctx.out() {
        Some(path) => {
            let mut body = String::with_capacity(primes.len() * 8);
            body.push_str("p\n");
            for p in primes {
                let _ = writeln!(body, "{p}");
            }
            write_file(&path, &body)?;
            print!("{summary}");
            Ok(())
        }
        None => {
            print!("{summary}");
            Ok(())
        }
    }
}

fn cmd_sums(ctx: &Ctx) -> Result<()> {
    let n = ctx.n(1_000_000);
    let spec = ctx.spec(n)?;
    let table = evaluate(&spec, &build_sieve(n)?, n)?;
    let ps = partial_sums(&table, &ctx.checkpoints(n)?, SummationMode::BlockParallelDeterministic)?;
    ctx.emit(&series_csv(&ps)?)
}

fn cmd_distance(ctx: &Ctx) -> Result<()> {
    let n = ctx.n(1_000_000);
    let sieve = build_sieve(n)?;
    let (f, g) = (ctx.spec(n)?, ctx.with(n)?);
    let cut: Vec<u64> = match &ctx.opts.checkpoints {
        Some(c) => c.iter().map(|&x| x as u64).collect(),
        None => cutoff_grid(n),
    };
    let report = match (ctx.opts.beta, ctx.opts.k) {
        (None, None) => distance_classic(&f, &g, &sieve, &cut)?,
        (Some(b), None) => distance_beta(&f, &g, b, &sieve, &cut)?,
        (Some(b), Some(k)) => distance_strong(&f, &g, b, k, &sieve, &cut)?,
        (None, Some(_)) => return Err(usage("--k needs --beta")),
    };
    ctx.emit(&(report.to_json()? + "\n"))
}

fn cmd_hseries(ctx: &Ctx) -> Result<()> {
    let sigma = ctx.require(ctx.opts.sigma, "--sigma")?;
    let n = ctx.n(1000);
    let spec = ctx.spec(n)?;
    let h = match ctx.opts.with {
        Some(_) => pretense_core::dirichlet::quotient_spec(&spec, &ctx.with(n)?),
        None => spec,
    };
    let k = ctx.opts.k.unwrap_or(pretense_core::metrics::DEFAULT_INNER_K);
    let report = match ctx.opts.y {
        Some(y) => hhat_series(&h, sigma, y, k)?,
        None => h_series(&h, sigma, k)?,
    };
    ctx.emit(&(report.to_json()? + "\n"))
}

fn cmd_degree(ctx: &Ctx, a: &DegreeArgs) -> Result<()> {
    let n = ctx.n(100);
    let f = ctx.spec(n)?;
    let d = match a.d.or(f.degree()) {
        Some(d) if d >= 1 => d,
        _ => return Err(usage("spec has no declared degree; pass --d")),
    };
    let kmax = ctx.opts.k.unwrap_or(d as u32 + 4);
    let sieve = build_sieve(n.max(2))?;
    let mut csv = String::from("p,d,identity_residual,recursion_residual,max_det_low,max_det_high\n");
    for &p in sieve.primes() {
        let p = p as u64;
        let coeffs = alpha_coeffs_with_degree(&f, p, d)?;
        let mut rec = 0.0f64;
        for m in 0..=kmax.saturating_sub(d as u32) {
            rec = rec.max(recursion_residual_with_degree(&f, p, m, d)?);
        }
        let (low, high) = determinant_profile(&f, p, d, kmax)?;
        let _ = writeln!(csv, "{p},{d},{},{rec},{low},{high}", coeffs.identity_residual());
    }
    ctx.emit(&csv)
}

fn cmd_construct(ctx: &Ctx, a: ConstructArgs) -> Result<()> {
    let base = match &ctx.opts.spec {
        Some(_) => Some(Box::new(ctx.spec(a.cutoff.unwrap_or(pretense_core::constructions::SIGN_RULE_CUTOFF))?)),
        None => None,
    };
    let params = ConstructionParams {
        name: a.name,
        q: a.q,
        index: a.index,
        t: a.t,
        beta: ctx.opts.beta,
        intervals: a.intervals.unwrap_or_default(),
        cutoff: a.cutoff,
        discriminant: a.discriminant,
        base,
    };
    let spec = construct(&params).map_err(|e| match e {
        pretense_core::Error::InvalidArgument(m) => CliError::Usage(m),
        other => other.into(),
    })?;
    ctx.emit(&(spec.to_json()? + "\n"))
}

fn cmd_growth_fit(ctx: &Ctx, a: &GrowthFitArgs) -> Result<()> {
    let series = match &a.csv {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(&format!("cannot read {}: {e}", path.display())))?;
            PartialSumSeries::read_csv(&text)?
        }
        None => {
            let n = ctx.n(1_000_000);
            let table = evaluate(&ctx.spec(n)?, &build_sieve(n)?, n)?;
            partial_sums(&table, &ctx.checkpoints(n)?, SummationMode::BlockParallelDeterministic)?
        }
    };
    let fit = growth_fit_range(&series, a.lo.unwrap_or(f64::NEG_INFINITY), a.hi.unwrap_or(f64::INFINITY))?;
    ctx.emit(&pretty(&fit)?)
}

fn cmd_xi(ctx: &Ctx) -> Result<()> {
    let n = ctx.n(10_000);
    let alpha = ctx.opts.alpha.unwrap_or(0.5);
    let sieve = build_sieve(n)?;
    let table = evaluate(&ctx.spec(n)?, &sieve, n)?;
    let points = ctx.checkpoints(n)?;
    let mode = match ctx.opts.mode.unwrap_or(Mode::Exact) {
        Mode::Exact => LookupMode::Exact,
        Mode::Nearest => LookupMode::Nearest,
    };
    let xi = match mode {
        LookupMode::Exact => XiSeries::exact(&table, alpha, &points)?,
        LookupMode::Nearest => {
            // samples from 1 so that every argument x / m >= 1 has a neighbour
            let grid = geometric_grid(1.0, pretense_core::table::grid_ratio(), n as f64);
            let ps = partial_sums(&table, &grid, SummationMode::BlockParallelDeterministic)?;
            xi_from_sums(&ps, alpha)?
        }
    };
    let h = match ctx.opts.with {
        Some(_) => Some(evaluate(&ctx.with(n)?, &sieve, n)?),
        None => None,
    };
    let mut csv = String::from(if h.is_some() {
        "x,xi_re,xi_im,xi_tilde_re,xi_tilde_im\n"
    } else {
        "x,xi_re,xi_im\n"
    });
    for &x in &points {
        let v = xi.at(x, mode)?;
        let _ = write!(csv, "{x},{},{}", v.re + 0.0, v.im + 0.0);
        if let Some(h) = &h {
            let t = xi_tilde(h, &xi, x, mode)?;
            let _ = write!(csv, ",{},{}", t.re + 0.0, t.im + 0.0);
        }
        csv.push('\n');
    }
    ctx.emit(&csv)
}

fn cmd_lseries(ctx: &Ctx, a: &LseriesArgs) -> Result<()> {
    let sigma = ctx.require(ctx.opts.sigma, "--sigma")?;
    let n = ctx.n(100_000);
    let spec = ctx.spec(n)?;
    let table = evaluate(&spec, &build_sieve(n)?, n)?;
    let s = Complex64::new(sigma, a.t);
    let mut lt = l_truncation_bounded(&table, s, n, CoefficientBound::UNIT)?;
    if !spec.bounded_by_one {
        lt.tail_bound = None;
    }
    let mut body = BTreeMap::new();
    body.insert("truncation", serde_json::to_value(&lt)?);
    if matches!(spec.rule, Rule::One) && a.t == 0.0 && sigma > 1.0 {
        body.insert("zeta_oracle", json!(euler_maclaurin_zeta(sigma)));
    }
    ctx.emit(&pretty(&body)?)
}

fn cmd_verify(ctx: &Ctx, bundle: Bundle) -> Result<()> {
    let report = run_bundle(bundle, ctx.opts.n.or(ctx.cfg.n), ctx.seed());
    let dir = ctx.out().unwrap_or_else(|| PathBuf::from("pretense-out"));
    report.write(&dir)?;
    print!("{}", report.table());
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed {
            failed: report.failed(),
            total: report.body.checks.len(),
        })
    }
}
