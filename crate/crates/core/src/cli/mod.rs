//! Experiment driver behind the `quatlat` binary.

pub mod config;

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num::{BigRational, Complex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amplifier::{
    build_amplifier, check_amplifier, eigenvalue_lower_bound, exponent_bound, microlocal_profile,
    minimal_type_profile, newform_bound, AmplifierSpec, HeckeCombo, SatakeSample,
};
use crate::arith::Factored;
use crate::balance::{balanced_search, smith_condition, BalanceSearchSpec};
use crate::coprime::{solve, verify, CombinationProblem};
use crate::counting::orders::UNIT_COUNT_K;
use crate::counting::{build_injection, sweep_counts, CountQuery};
use crate::error::{Error, Result};
use crate::lattice::{invariant_factors, Lattice4};
use crate::quat::{box_constant_for_basis, UpperHalfPoint, ZBox};

pub use config::{ExperimentConfig, Loaded};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "quatlat", version, about = "Lattice counting in quaternion orders")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; falls back to QUATLAT_THREADS, then the config.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Ball radius, overriding the config (a rational "num/den").
    #[arg(long, global = true)]
    pub delta: Option<String>,
    #[arg(long, global = true)]
    pub lmax: Option<u64>,
    /// Count only norms that are perfect squares.
    #[arg(long, global = true)]
    pub squares: bool,
    /// Record wall-clock times (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ramification, maximal order and box constant.
    Algebra,
    /// Level, shape and invariant factors of the configured order.
    Order,
    /// Certified counts at sampled points, as CSV.
    Count,
    /// Search for a balanced conjugate of the configured order.
    Balance {
        /// Order config file (JSON); defaults to the experiment config.
        #[arg(long)]
        order: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        kmax: u32,
        #[arg(long, default_value_t = 4096)]
        height: u64,
    },
    /// Coprime combinations, one problem per line: "a0,a1,..,an;N;c;bound".
    Coprime {
        /// Input file; stdin when absent. `bound` may be "auto".
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Amplifier coefficients for primes in [lambda, 2 lambda].
    Amp {
        #[arg(long)]
        lambda: f64,
        /// JSON object of eigenvalues, e.g. {"5": "1/2", "7": "-3/2"}.
        #[arg(long)]
        satake: Option<PathBuf>,
    },
    /// Sup-norm exponents from factored data.
    Exponent {
        /// Level N (or conductor C for minimal/newform, or n_p data for microlocal).
        #[arg(long)]
        n: String,
        #[arg(long, value_enum, default_value_t = Mode::Maingen)]
        mode: Mode,
        /// Central character conductor (newform mode).
        #[arg(long)]
        m: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Maingen,
    Minimal,
    Microlocal,
    Newform,
}

/// Exit code for an error: 1 usage/config, 2 theorem violation, 3 search
/// exhausted.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TheoremViolation(_) => 2,
        Error::SearchExhausted(_) => 3,
        _ => 1,
    }
}

fn threads(cli: &Cli, cfg: &ExperimentConfig) -> Result<usize> {
    if let Some(t) = cli.threads {
        return Ok(t);
    }
    if let Ok(v) = std::env::var("QUATLAT_THREADS") {
        return v.trim().parse().map_err(|_| Error::Config(format!("QUATLAT_THREADS={v:?} is not a count")));
    }
    Ok(cfg.threads)
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_path(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(d) = &cli.delta {
        cfg.delta = d.clone();
    }
    if let Some(l) = cli.lmax {
        cfg.sweep.l_max = l;
    }
    if cli.squares {
        cfg.sweep.squares_only = true;
    }
    if let Some(s) = cli.seed {
        cfg.sweep.seed = s;
    }
    Ok(cfg)
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let n = threads(cli, &cfg)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if n > 0 {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let out = pool.install(|| dispatch(cli, &cfg))?;
    emit(cli.out.as_deref(), &out)
}

/// Writes via a temporary file in the target directory, then renames.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.persist(p).map_err(|e| Error::Io(e.error))?;
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli, cfg: &ExperimentConfig) -> Result<String> {
    match &cli.command {
        Command::Algebra => cmd_algebra(&cfg.load()?),
        Command::Order => cmd_order(&cfg.load()?),
        Command::Count => cmd_count(&cfg.load()?, cli.timing),
        Command::Balance { order, kmax, height } => {
            let mut cfg = cfg.clone();
            if let Some(p) = order {
                let text = std::fs::read_to_string(p)?;
                cfg.order = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            }
            cmd_balance(&cfg.load()?, *kmax, *height)
        }
        Command::Coprime { input } => {
            let text = match input {
                Some(p) => std::fs::read_to_string(p)?,
                None => {
                    let mut s = String::new();
                    for line in std::io::stdin().lock().lines() {
                        s.push_str(&line?);
                        s.push('\n');
                    }
                    s
                }
            };
            cmd_coprime(&text)
        }
        Command::Amp { lambda, satake } => cmd_amp(*lambda, satake.as_deref(), &cfg.load()?),
        Command::Exponent { n, mode, m } => cmd_exponent(n, *mode, m.as_deref()),
    }
}

fn basis_line(l: &Loaded) -> String {
    let rows: Vec<String> = l.maximal.basis_rows().iter().flatten().map(|x| x.to_string()).collect();
    rows.join(" ")
}

fn cmd_algebra(l: &Loaded) -> Result<String> {
    let t = box_constant_for_basis(l.delta, &l.z_box, &l.alg, l.maximal.basis());
    let mut s = String::new();
    s += &format!("algebra ({}, {})\n", l.alg.p(), l.alg.q());
    s += &format!("ramified primes {:?}, d = {}\n", l.alg.ramified(), l.alg.d());
    s += &format!("maximal order basis (rows in 1, I, J, IJ): {}\n", basis_line(l));
    if l.saturated {
        s += "maximal order obtained by saturating Z + ZI + ZJ + ZIJ\n";
    }
    s += &format!("reduced discriminant {}\n", Lattice4::maximal(&l.maximal).reduced_discriminant()?);
    s += &format!("box constant t = {:.9} for delta = {} on {:?}\n", t.t, l.delta, l.z_box);
    Ok(s)
}

fn cmd_order(l: &Loaded) -> Result<String> {
    let o = &l.order;
    let max = Lattice4::maximal(&l.maximal);
    let mut s = String::new();
    s += &format!("hnf {:?} / {}\n", o.hnf(), o.den());
    s += &format!("level {}\n", o.level()?);
    s += &format!("order {}\n", o.is_order());
    if o.contains_one() {
        let sh = o.shape()?;
        s += &format!("shape ({}, {}, {}) e = {} [L : Z + L0] = {}\n", sh.m1, sh.m2, sh.m3, sh.e, sh.trace_index);
    }
    let f = invariant_factors(o, &max)?;
    s += &format!("invariant factors {} t1 = {} balanced {}\n", f, f.t1, f.balanced());
    if o.is_order() {
        s += &format!("reduced discriminant {}\n", o.reduced_discriminant()?);
    }
    Ok(s)
}

fn halton(mut i: u64, base: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points in bases 2 and 3 over the box, shifted by a seeded
/// jitter of at most half a cell and wrapped back into the box.
pub fn sample_points(b: &ZBox, samples: usize, seed: u64) -> Vec<UpperHalfPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cell = 0.5 / samples.max(1) as f64;
    (0..samples as u64)
        .map(|k| {
            let u = (halton(k + 1, 2) + rng.gen_range(-cell..cell)).rem_euclid(1.0);
            let v = (halton(k + 1, 3) + rng.gen_range(-cell..cell)).rem_euclid(1.0);
            let x = b.x_min + u * (b.x_max - b.x_min);
            let y = b.y_min + v * (b.y_max - b.y_min);
            UpperHalfPoint { x, y }
        })
        .collect()
}

fn cmd_count(l: &Loaded, timing: bool) -> Result<String> {
    let sweep = &l.config.sweep;
    let t = box_constant_for_basis(l.delta, &l.z_box, &l.alg, l.maximal.basis());
    let w = build_injection(&l.order, None)?;
    let mut meta = format!(
        "# quatlat {VERSION} t={:.12} K={UNIT_COUNT_K} delta={} box=[{},{}]x[{},{}] seed={} maximal_order={}",
        t.t,
        l.delta,
        l.z_box.x_min,
        l.z_box.x_max,
        l.z_box.y_min,
        l.z_box.y_max,
        sweep.seed,
        basis_line(l).replace(' ', ","),
    );
    meta += &format!(" witness=r2:{},r3:{},s2:{},s3:{}\n", w.r2, w.r3, w.s2, w.s3);
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    wtr.write_record([
        "run_id", "N", "M1", "M2", "M3", "e", "lmax", "squares_only", "delta", "z_x", "z_y", "t", "total",
        "explicit_bound", "ratio", "wall_ms",
    ])
    .map_err(csv_err)?;
    for (k, z) in sample_points(&l.z_box, sweep.samples, sweep.seed).into_iter().enumerate() {
        let q = CountQuery { lat: l.order.clone(), z, delta: l.delta, l_max: sweep.l_max, squares_only: sweep.squares_only };
        let r = sweep_counts(&q, &w, &t)?;
        let wall = if timing { r.wall_ms.to_string() } else { String::new() };
        wtr.write_record([
            k.to_string(),
            r.level.to_string(),
            r.shape.m1.to_string(),
            r.shape.m2.to_string(),
            r.shape.m3.to_string(),
            r.shape.e.to_string(),
            r.l_max.to_string(),
            r.squares_only.to_string(),
            format!("{}", r.delta),
            format!("{:.12}", z.x),
            format!("{:.12}", z.y),
            format!("{:.12}", r.t),
            r.total.to_string(),
            r.explicit_bound.to_string(),
            format!("{:.12e}", r.ratio),
            wall,
        ])
        .map_err(csv_err)?;
    }
    let body = wtr.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(meta + &String::from_utf8(body).expect("csv is utf-8"))
}

fn cmd_balance(l: &Loaded, kmax: u32, height: u64) -> Result<String> {
    let mut spec = BalanceSearchSpec::new(l.order.clone())?;
    spec.k_max = kmax;
    spec.height_max = height;
    let r = balanced_search(&spec)?.ok_or_else(|| {
        Error::SearchExhausted(format!("no balanced conjugate with norm exponent <= {kmax} and height <= {height}"))
    })?;
    let mut s = String::new();
    s += &format!("conjugator {} (norm {})\n", r.conjugator, r.norm);
    s += &format!("before {} after {}\n", r.before, r.after);
    s += &format!("smith condition {}\n", smith_condition(&r.order)?);
    s += &format!("candidates tried {}\n", r.candidates_tried);
    Ok(s)
}

fn parse_problem(line: &str) -> Result<CombinationProblem> {
    let bad = || Error::Usage(format!("expected \"a0,..,an;N;c;bound\", got {line:?}"));
    let parts: Vec<&str> = line.split(';').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(bad());
    }
    let a: Vec<i128> = parts[0].split(',').map(|x| x.trim().parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    let big_n: u64 = parts[1].parse().map_err(|_| bad())?;
    let c: u64 = parts[2].parse().map_err(|_| bad())?;
    let bound = if parts[3] == "auto" {
        CombinationProblem::auto_bound(big_n, c)
    } else {
        parts[3].parse().map_err(|_| bad())?
    };
    Ok(CombinationProblem { a, big_n, c, bound })
}

fn cmd_coprime(text: &str) -> Result<String> {
    let mut s = String::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let prob = parse_problem(line)?;
        let set = solve(&prob)?;
        if let Err(idx) = verify(&prob, &set) {
            return Err(Error::TheoremViolation(format!("solution for {line:?} fails at {idx:?}")));
        }
        let shown: Vec<String> = set.iter().take(8).map(|t| format!("{t:?}")).collect();
        s += &format!("{line} -> {} tuples, bound {}: {}{}\n", set.len(), prob.bound, shown.join(" "), if set.len() > 8 { " .." } else { "" });
    }
    Ok(s)
}

fn cmd_amp(lambda: f64, satake: Option<&Path>, l: &Loaded) -> Result<String> {
    let bad = l.alg.ramified().to_vec();
    let mut s = String::new();
    match satake {
        None => {
            let spec = AmplifierSpec::<Complex<BigRational>>::unit_signs(lambda, &bad);
            let k = build_amplifier(&spec)?;
            check_amplifier(&spec, &k)?;
            s += &format!("primes {:?}\n", spec.primes);
            s += &combo_lines(&k);
        }
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let raw: BTreeMap<String, String> =
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            let mut lam = BTreeMap::new();
            for (k, v) in raw {
                let p: u64 = k.parse().map_err(|_| Error::Config(format!("bad prime {k:?}")))?;
                lam.insert(p, config::parse_rational(&v)?);
            }
            let sample = SatakeSample::new(lam)?;
            let spec = AmplifierSpec::from_sample(lambda, &bad, &sample)?;
            let k = build_amplifier(&spec)?;
            check_amplifier(&spec, &k)?;
            let lb = eigenvalue_lower_bound(&spec.primes, &sample)?;
            let ev = k.eval(&sample)?;
            if ev != lb {
                return Err(Error::TheoremViolation(format!("eigenvalue {ev} differs from {lb}")));
            }
            s += &format!("primes {:?}\n", spec.primes);
            s += &combo_lines(&k);
            s += &format!("lambda_ur = {lb} >= |P|^2/8 = {}\n", BigRational::from_integer((spec.primes.len() * spec.primes.len()).into()) / BigRational::from_integer(8.into()));
        }
    }
    Ok(s)
}

fn combo_lines<C: crate::amplifier::Coeff + std::fmt::Display>(k: &HeckeCombo<C>) -> String {
    k.coeffs().iter().map(|(n, y)| format!("y_{n} = {y}\n")).collect()
}

fn cmd_exponent(n: &str, mode: Mode, m: Option<&str>) -> Result<String> {
    let f: Factored = n.parse()?;
    let r = match mode {
        Mode::Maingen => exponent_bound(&f),
        Mode::Minimal => minimal_type_profile(&f)?,
        Mode::Microlocal => microlocal_profile(&f.0)?,
        Mode::Newform => {
            let mf = match m {
                Some(x) => x.parse()?,
                None => Factored::one(),
            };
            newform_bound(&f, &mf)?
        }
    };
    Ok(r.to_string())
}
