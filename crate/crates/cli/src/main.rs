//! Command-line front end: sampling, exact disagreement tables, Monte
//! Carlo estimates, bound curves, assignment combinatorics, the LP
//! oracle, and simplex partition renderings.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::One;

use tvcouple::bounds::{emit_bounds_curve, kn_points};
use tvcouple::combi::{
    check_combi_identity, distance_profile, local_search_min_distant, pair_totals, Assignment,
    SubsetSpace,
};
use tvcouple::couplings::{sample, CouplingKind};
use tvcouple::exact::{
    clock_agreement, race_agreement, tuple_agreement_floor, tuple_alpha,
    tuple_disagreement_bound,
};
use tvcouple::lp::{min_sum_disagreement, minimax_disagreement, optimal_pair_coupling, LpReport};
use tvcouple::mc::{mc_estimate, EventSpec};
use tvcouple::randomness::{replicate_seed, GENERATOR_NAME};
use tvcouple::render::render_simplex;
use tvcouple::{DiscreteDistribution, Error, Family, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_KN_MAX_N: u64 = 120;

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim();
    let parsed = if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        t.parse()
    };
    parsed.map_err(|e| format!("seed must be decimal or 0x-hex: {e}"))
}

fn parse_coupling(s: &str) -> std::result::Result<CouplingKind, String> {
    CouplingKind::from_token(s).map_err(|e| e.to_string())
}

/// The exact and render commands cover the two couplings with exact
/// theory only; the star construction stays sampling-only.
fn parse_coupling_no_star(s: &str) -> std::result::Result<CouplingKind, String> {
    match parse_coupling(s)? {
        CouplingKind::Star => Err("this command accepts couplings i and ii only".into()),
        kind => Ok(kind),
    }
}

#[derive(Parser)]
#[command(name = "tvcouple", version, about = "Couplings of finite distributions with tight pairwise disagreement")]
struct Cli {
    /// JSON config file with default seed and size settings.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed, decimal or 0x-prefixed hex. Overrides config and TVCOUPLE_SEED.
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw coupled sample vectors, one row per replicate.
    Sample {
        #[arg(long, value_name = "FILE")]
        family: PathBuf,
        /// Coupling: i, ii, or star.
        #[arg(long, value_parser = parse_coupling)]
        coupling: Option<CouplingKind>,
        /// Number of replicates.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Exact disagreement probabilities per pair, or tuple bounds.
    Exact {
        #[arg(long, value_name = "FILE")]
        family: PathBuf,
        /// Coupling: i or ii.
        #[arg(long, value_parser = parse_coupling_no_star)]
        coupling: Option<CouplingKind>,
        /// Emit the full pairwise disagreement matrix (the default).
        #[arg(long, conflicts_with = "tuples")]
        pairs: bool,
        /// Emit agreement floors for every k-member tuple instead.
        #[arg(long, value_name = "K")]
        tuples: Option<usize>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Monte Carlo disagreement estimates with standard errors.
    Mc {
        #[arg(long, value_name = "FILE")]
        family: PathBuf,
        #[arg(long, value_parser = parse_coupling)]
        coupling: Option<CouplingKind>,
        /// Replicates (at least 1000).
        #[arg(long)]
        n: Option<u64>,
        /// A pair to tally; repeatable.
        #[arg(long, num_args = 2, value_names = ["A", "B"], action = clap::ArgAction::Append)]
        pair: Vec<String>,
        /// A comma-separated tuple to tally; repeatable.
        #[arg(long, value_name = "A,B,...", action = clap::ArgAction::Append)]
        tuple: Vec<String>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Lower-bound curve: x, F(x), and the best lower bound at x.
    Bounds {
        #[arg(long, value_name = "STEP")]
        grid_step: Option<f64>,
        /// Also list the k/n points where the k-fold bound applies.
        #[arg(long, value_name = "KMAX")]
        kn_points: Option<u64>,
        #[arg(long, value_name = "NMAX")]
        kn_max_n: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Value assignments on the k-distant subset graph.
    Assignments {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[command(subcommand)]
        mode: AssignMode,
    },
    /// LP ground truth for minimax or total pairwise disagreement.
    Oracle {
        #[arg(long, value_name = "FILE")]
        family: PathBuf,
        #[command(subcommand)]
        op: OracleOp,
    },
    /// Render the simplex partition of a coupling as SVG.
    Render {
        #[arg(long, value_parser = parse_coupling_no_star)]
        coupling: Option<CouplingKind>,
        /// Grid resolution (cells per side, at most 2000).
        #[arg(long)]
        resolution: Option<u32>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum AssignMode {
    /// Pick the smallest element of every subset.
    Greedy {
        #[arg(long, value_name = "FILE")]
        witness_out: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Choose by element-sum residue: MULT * sum mod MOD, zero mapped to MOD.
    #[command(name = "mod")]
    Modular {
        mult: u64,
        modulus: u64,
        #[arg(long, value_name = "FILE")]
        witness_out: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Steepest-descent search for few distant disagreeing pairs.
    Search {
        #[arg(long)]
        restarts: Option<u32>,
        #[arg(long)]
        max_moves: Option<u64>,
        #[arg(long, value_name = "FILE")]
        witness_out: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Enumerate every zero-free assignment.
    Exhaustive {
        #[arg(long, value_name = "FILE")]
        witness_out: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// The counting identity behind the disagreement lower bound.
    Identity {
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Distance profile of subset pairs: counts and exact shares.
    Profile {
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleOp {
    /// Minimise the worst pairwise disagreement.
    Minimax {
        #[arg(long)]
        joint: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Minimise the total pairwise disagreement.
    Minsum {
        #[arg(long)]
        joint: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Maximal coupling of two named members.
    Pair {
        a: String,
        b: String,
        #[arg(long)]
        joint: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<serde_json::Value>,
    coupling: Option<String>,
    n: Option<u64>,
    resolution: Option<u32>,
    grid_step: Option<f64>,
    restarts: Option<u32>,
}

/// Settled defaults: flags beat the config file, the config file beats
/// TVCOUPLE_SEED, which beats the built-in values.
struct Settings {
    config: ConfigFile,
}

impl Settings {
    fn load(path: &Option<PathBuf>) -> Result<Settings> {
        let config = match path {
            Some(p) => {
                let text = read_file(p)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::DomainError(format!("config {}: {e}", p.display())))?
            }
            None => ConfigFile::default(),
        };
        Ok(Settings { config })
    }

    fn seed(&self, flag: Option<u64>) -> Result<u64> {
        if let Some(s) = flag {
            return Ok(s);
        }
        if let Some(v) = &self.config.seed {
            return match v {
                serde_json::Value::Number(n) => n
                    .as_u64()
                    .ok_or_else(|| Error::DomainError(format!("config seed {n} out of range"))),
                serde_json::Value::String(s) => {
                    parse_seed(s).map_err(Error::DomainError)
                }
                other => Err(Error::DomainError(format!("config seed {other} unusable"))),
            };
        }
        match std::env::var("TVCOUPLE_SEED") {
            Ok(s) => parse_seed(&s).map_err(Error::DomainError),
            Err(_) => Ok(0),
        }
    }

    fn coupling(&self, flag: Option<CouplingKind>) -> Result<CouplingKind> {
        if let Some(kind) = flag {
            return Ok(kind);
        }
        match &self.config.coupling {
            Some(token) => CouplingKind::from_token(token),
            None => Ok(CouplingKind::Clock),
        }
    }

    fn n(&self, flag: Option<u64>, default: u64) -> u64 {
        flag.or(self.config.n).unwrap_or(default)
    }

    fn resolution(&self, flag: Option<u32>) -> u32 {
        flag.or(self.config.resolution).unwrap_or(240)
    }

    fn grid_step(&self, flag: Option<f64>) -> f64 {
        flag.or(self.config.grid_step).unwrap_or(0.01)
    }

    fn restarts(&self, flag: Option<u32>) -> u32 {
        flag.or(self.config.restarts).unwrap_or(32)
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::DomainError(format!("reading {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::DomainError(format!("writing {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn header(cmd: &str, seed: u64) -> String {
    format!("# tvcouple {VERSION} | cmd: {cmd} | seed: {seed} | rng: {GENERATOR_NAME}\n")
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn ratio_str(r: &Ratio<BigUint>) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn load_family(path: &Path) -> Result<Family> {
    Family::from_json(&read_file(path)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let settings = Settings::load(&cli.config)?;
    let seed = settings.seed(cli.seed)?;
    match cli.command {
        Command::Sample {
            family,
            coupling,
            n,
            out,
        } => {
            let family = load_family(&family)?;
            let kind = settings.coupling(coupling)?;
            let n = settings.n(n, 10);
            if n == 0 {
                return Err(Error::DomainError("need at least one replicate".into()));
            }
            let mut text = header("sample", seed);
            text.push_str(&format!("replicate,{}\n", family.names().join(",")));
            for r in 0..n {
                let draw = sample(&family, kind, replicate_seed(seed, r))?;
                let labels: Vec<&str> = draw
                    .values()
                    .iter()
                    .map(|&a| family.universe().label(a))
                    .collect();
                text.push_str(&format!("{r},{}\n", labels.join(",")));
            }
            emit(&out, &text)
        }
        Command::Exact {
            family,
            coupling,
            pairs: _,
            tuples,
            out,
        } => {
            let family = load_family(&family)?;
            let kind = settings.coupling(coupling)?;
            let text = match tuples {
                None => exact_pairs_csv(&family, kind, seed)?,
                Some(k) => exact_tuples_csv(&family, k, seed)?,
            };
            emit(&out, &text)
        }
        Command::Mc {
            family,
            coupling,
            n,
            pair,
            tuple,
            out,
        } => {
            let family = load_family(&family)?;
            let kind = settings.coupling(coupling)?;
            let n = settings.n(n, 100_000);
            let mut events: Vec<EventSpec> = pair
                .chunks(2)
                .map(|ab| EventSpec::Pair(ab[0].clone(), ab[1].clone()))
                .collect();
            for t in &tuple {
                let names: Vec<String> = t.split(',').map(|s| s.trim().to_string()).collect();
                events.push(EventSpec::Tuple(names));
            }
            if events.is_empty() {
                for (i, j) in family.pairs() {
                    events.push(EventSpec::Pair(
                        family.names()[i].clone(),
                        family.names()[j].clone(),
                    ));
                }
            }
            let estimates = mc_estimate(&family, kind, &events, n, seed)?;
            let mut text = header("mc", seed);
            text.push_str("label,estimate,stderr,n,seed\n");
            for e in estimates {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    e.label,
                    num(e.estimate),
                    num(e.stderr),
                    e.n,
                    e.seed
                ));
            }
            emit(&out, &text)
        }
        Command::Bounds {
            grid_step,
            kn_points: kmax,
            kn_max_n,
            out,
        } => {
            let step = settings.grid_step(grid_step);
            if !(step > 0.0 && step < 1.0) {
                return Err(Error::DomainError(format!(
                    "grid step must lie in (0, 1), got {step}"
                )));
            }
            let mut grid = Vec::new();
            let mut k = 1u64;
            loop {
                let x = k as f64 * step;
                if x >= 1.0 - 1e-12 {
                    break;
                }
                grid.push(x);
                k += 1;
            }
            let curve = emit_bounds_curve(&grid)?;
            let mut text = header("bounds", seed);
            text.push_str("x,F,lower\n");
            for row in &curve.rows {
                text.push_str(&format!(
                    "{},{},{}\n",
                    num(row.x),
                    num(row.f_value),
                    num(row.lower)
                ));
            }
            if let Some(kmax) = kmax {
                let nmax = kn_max_n.unwrap_or(DEFAULT_KN_MAX_N);
                text.push_str("# kn-points\n");
                text.push_str("k,n,x,bound\n");
                for p in kn_points(kmax, nmax)? {
                    text.push_str(&format!("{},{},{},{}\n", p.k, p.n, num(p.x), num(p.bound)));
                }
            }
            emit(&out, &text)
        }
        Command::Assignments { n, k, mode } => run_assignments(n, k, mode, seed, &settings),
        Command::Oracle { family, op } => {
            let family = load_family(&family)?;
            match op {
                OracleOp::Minimax { joint, out } => {
                    let report = minimax_disagreement(&family)?;
                    emit(&out, &oracle_csv("oracle minimax", seed, &report, joint))
                }
                OracleOp::Minsum { joint, out } => {
                    let report = min_sum_disagreement(&family)?;
                    emit(&out, &oracle_csv("oracle minsum", seed, &report, joint))
                }
                OracleOp::Pair { a, b, joint, out } => {
                    let pa: &DiscreteDistribution = family.member(family.index_of(&a)?);
                    let pb = family.member(family.index_of(&b)?);
                    let report = optimal_pair_coupling(pa, pb)?;
                    emit(&out, &oracle_csv("oracle pair", seed, &report, joint))
                }
            }
        }
        Command::Render {
            coupling,
            resolution,
            out,
        } => {
            let kind = settings.coupling(coupling)?;
            let resolution = settings.resolution(resolution);
            let render = render_simplex(kind, seed, resolution)?;
            let mut svg = String::new();
            svg.push_str(&format!(
                "<!-- tvcouple {VERSION} | cmd: render | seed: {seed} | rng: {GENERATOR_NAME} -->\n"
            ));
            svg.push_str(&render.to_svg());
            write_file(&out, &svg)?;
            let mut text = header("render", seed);
            text.push_str("field,value\n");
            text.push_str(&format!("out,{}\n", out.display()));
            text.push_str(&format!("coupling,{}\n", kind.token()));
            text.push_str(&format!("resolution,{resolution}\n"));
            let areas = render.region_areas();
            for (i, a) in areas.iter().enumerate() {
                text.push_str(&format!("area_{i},{}\n", num(*a)));
            }
            if let Some(u) = render.pivot() {
                text.push_str(&format!(
                    "pivot,{}|{}|{}\n",
                    num(u[0]),
                    num(u[1]),
                    num(u[2])
                ));
            }
            print!("{text}");
            Ok(())
        }
    }
}

fn exact_pairs_csv(family: &Family, kind: CouplingKind, seed: u64) -> Result<String> {
    let m = family.len();
    let mut matrix = vec![vec![0.0f64; m]; m];
    for (i, j) in family.pairs() {
        let breakdown = match kind {
            CouplingKind::Clock => clock_agreement(family.member(i), family.member(j))?,
            CouplingKind::Race => race_agreement(family.member(i), family.member(j))?,
            CouplingKind::Star => unreachable!("rejected at parse time"),
        };
        matrix[i][j] = breakdown.disagreement();
        matrix[j][i] = matrix[i][j];
    }
    let mut text = header("exact", seed);
    text.push_str(&format!("member,{}\n", family.names().join(",")));
    for (i, name) in family.names().iter().enumerate() {
        let cells: Vec<String> = matrix[i].iter().map(|&v| num(v)).collect();
        text.push_str(&format!("{name},{}\n", cells.join(",")));
    }
    Ok(text)
}

fn exact_tuples_csv(family: &Family, k: usize, seed: u64) -> Result<String> {
    if k < 2 || k > family.len() {
        return Err(Error::DomainError(format!(
            "tuple size must lie in 2..={}, got {k}",
            family.len()
        )));
    }
    let mut text = header("exact", seed);
    text.push_str("members,alpha,agreement_floor,not_all_equal_bound\n");
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let members: Vec<&DiscreteDistribution> =
            idx.iter().map(|&i| family.member(i)).collect();
        let names: Vec<&str> = idx.iter().map(|&i| family.names()[i].as_str()).collect();
        let alpha = tuple_alpha(&members)?;
        let floor = tuple_agreement_floor(&members)?;
        let bound = tuple_disagreement_bound(alpha, k)?;
        text.push_str(&format!(
            "{},{},{},{}\n",
            names.join("|"),
            num(alpha),
            num(floor),
            num(bound)
        ));
        // Advance the lexicographic k-combination.
        let m = family.len();
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(text);
            }
            pos -= 1;
            if idx[pos] + 1 <= m - (k - pos) {
                idx[pos] += 1;
                for later in pos + 1..k {
                    idx[later] = idx[later - 1] + 1;
                }
                break;
            }
        }
    }
}

fn kv(text: &mut String, key: &str, value: impl std::fmt::Display) {
    text.push_str(&format!("{key},{value}\n"));
}

fn assignment_csv(cmd: &str, seed: u64, mode: &str, a: &Assignment) -> Result<String> {
    let check = a.check_distant_bound()?;
    let profile = a.disagreement_profile()?;
    let mut text = header(cmd, seed);
    text.push_str("field,value\n");
    kv(&mut text, "n", a.space().n());
    kv(&mut text, "k", a.space().k());
    kv(&mut text, "mode", mode);
    kv(&mut text, "zeros", a.zero_count());
    kv(&mut text, "epsilon", ratio_str(&a.epsilon()));
    kv(&mut text, "distant_pairs", &check.distant);
    kv(&mut text, "threshold", ratio_str(&check.threshold));
    kv(&mut text, "meets_threshold", check.meets);
    kv(&mut text, "total_disagreements", profile.total());
    Ok(text)
}

fn witness_json(space: &Arc<SubsetSpace>, choices: &[u32]) -> Result<String> {
    Ok(Assignment::from_choices(space.clone(), choices.to_vec())?.to_json())
}

fn run_assignments(n: u64, k: u64, mode: AssignMode, seed: u64, settings: &Settings) -> Result<()> {
    match mode {
        AssignMode::Greedy { witness_out, out } => {
            let a = Assignment::greedy(n, k)?;
            if let Some(path) = witness_out {
                write_file(&path, &a.to_json())?;
            }
            emit(&out, &assignment_csv("assignments greedy", seed, "greedy", &a)?)
        }
        AssignMode::Modular {
            mult,
            modulus,
            witness_out,
            out,
        } => {
            let a = Assignment::affine_mod(n, k, mult, modulus)?;
            if let Some(path) = witness_out {
                write_file(&path, &a.to_json())?;
            }
            let mode = format!("mod {mult} {modulus}");
            emit(&out, &assignment_csv("assignments mod", seed, &mode, &a)?)
        }
        AssignMode::Search {
            restarts,
            max_moves,
            witness_out,
            out,
        } => {
            let restarts = settings.restarts(restarts);
            let max_moves = max_moves.unwrap_or(100_000);
            let report = local_search_min_distant(n, k, seed, restarts, max_moves)?;
            let space = Arc::new(SubsetSpace::new(n, k)?);
            if let Some(path) = witness_out {
                write_file(&path, &witness_json(&space, &report.best_choices)?)?;
            }
            let mut text = header("assignments search", seed);
            text.push_str("field,value\n");
            kv(&mut text, "n", n);
            kv(&mut text, "k", k);
            kv(&mut text, "best_distant", report.best_distant);
            kv(&mut text, "threshold", ratio_str(&report.threshold));
            kv(&mut text, "ever_below", report.ever_below);
            kv(&mut text, "restarts", report.restarts);
            kv(&mut text, "moves", report.moves);
            emit(&out, &text)
        }
        AssignMode::Exhaustive { witness_out, out } => {
            let report = tvcouple::combi::exhaustive_min_distant(n, k)?;
            let space = Arc::new(SubsetSpace::new(n, k)?);
            if let Some(path) = witness_out {
                write_file(&path, &witness_json(&space, &report.distant_witness)?)?;
            }
            let mut text = header("assignments exhaustive", seed);
            text.push_str("field,value\n");
            kv(&mut text, "n", n);
            kv(&mut text, "k", k);
            kv(&mut text, "states", report.states);
            kv(&mut text, "min_distant", report.min_distant);
            kv(&mut text, "min_total", report.min_total);
            match &report.threshold {
                Some(t) => kv(&mut text, "threshold", ratio_str(t)),
                None => kv(&mut text, "threshold", "none"),
            }
            kv(&mut text, "all_meet_total_lower", report.all_meet_total_lower);
            emit(&out, &text)
        }
        AssignMode::Identity { out } => {
            let check = check_combi_identity(n, k)?;
            let mut text = header("assignments identity", seed);
            text.push_str("field,value\n");
            kv(&mut text, "n", n);
            kv(&mut text, "k", k);
            kv(&mut text, "lhs", &check.lhs);
            kv(&mut text, "rhs", ratio_str(&check.rhs));
            kv(&mut text, "equal", check.equal);
            emit(&out, &text)
        }
        AssignMode::Profile { out } => {
            let totals = pair_totals(n, k)?;
            let shares = distance_profile(n, k)?;
            let mut text = header("assignments profile", seed);
            text.push_str("m,pairs,share\n");
            for (m, total) in &totals {
                text.push_str(&format!("{m},{total},{}\n", ratio_str(&shares[m])));
            }
            emit(&out, &text)
        }
    }
}

fn oracle_csv(cmd: &str, seed: u64, report: &LpReport, joint: bool) -> String {
    let mut text = header(cmd, seed);
    text.push_str("field,value\n");
    kv(&mut text, "objective", num(report.objective));
    kv(&mut text, "status", report.status);
    kv(&mut text, "iterations", report.iterations);
    kv(&mut text, "support", report.joint.len());
    if joint {
        text.push_str("# joint\n");
        text.push_str(&format!("{},weight\n", report.joint.names().join(",")));
        let universe = report.joint.universe();
        for (tuple, w) in report.joint.support().iter().zip(report.joint.weights()) {
            let labels: Vec<&str> = tuple.iter().map(|&a| universe.label(a)).collect();
            text.push_str(&format!("{},{}\n", labels.join(","), num(*w)));
        }
    }
    text
}
