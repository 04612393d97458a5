//! Command-line front end. JSON goes to stdout (or `--out`), human-readable
//! notes to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::conditions::{
    classify_existence, match_t21, match_t22, match_t23, match_t24, ConditionReport, PatternMode, Theorem,
};
use crate::engine::{construct, construct_auto, ConstructOptions, Piece, RootClass, RootFunction};
use crate::error::Error;
use crate::kernel::{OrbitSettings, Orientation};
use crate::monotone::SeedShape;
use crate::pm::{characteristic_interval, height, PmFunction, PmInput, DEFAULT_HEIGHT_CAP};
use crate::recipe::RootRecipe;
use crate::verify::{sample_csv, verify_root, VerifyOptions, DEFAULT_GRID, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONDITIONS: i32 = 3;
pub const EXIT_CONSTRUCTION: i32 = 4;

/// Overrides the default of `--cap` when the flag is absent.
pub const CAP_ENV: &str = "PMROOT_CAP";

#[derive(Parser, Debug)]
#[command(name = "pmroot", version, about = "Iterative square roots of piecewise-monotone interval maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Forts, fort count N, height H, characteristic interval K and range.
    Analyze {
        input: PathBuf,
        /// Iteration cap for the height (default 32, or $PMROOT_CAP).
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the hypothesis checks; exits 3 when none holds.
    Check {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = TheoremArg::Auto)]
        theorem: TheoremArg,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Builds a root and writes its recipe.
    Construct {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = TheoremArg::Auto)]
        theorem: TheoremArg,
        #[arg(long, value_enum, default_value_t = ClassArg::Any)]
        class: ClassArg,
        #[command(flatten)]
        mode: ModeArgs,
        /// Orbit step cap for the kernel (default 100000, or $PMROOT_CAP).
        #[arg(long)]
        cap: Option<usize>,
        /// JSON seed shape, e.g. {"kind":"power","exponent":2}.
        #[arg(long)]
        seed_spec: Option<PathBuf>,
        /// Resolve ambiguous pocket assignments by the mod-4 schedule.
        #[arg(long)]
        prefer_schedule: bool,
        /// Recipe path; without it the recipe goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a recipe against the map; exits 0 iff it passes.
    Verify {
        input: PathBuf,
        #[arg(long)]
        root: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Existence lookup for maps violating the characteristic endpoints condition.
    Classify {
        input: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV samples of the map, or of a root when --root is given.
    Sample {
        input: PathBuf,
        #[arg(long)]
        root: Option<PathBuf>,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct ModeArgs {
    /// Pattern search checks only the inclusions the assembly needs.
    #[arg(long, conflicts_with = "literal")]
    relaxed: bool,
    /// Pattern search reads both left extrema as maxima.
    #[arg(long)]
    literal: bool,
}

impl ModeArgs {
    fn mode(self) -> PatternMode {
        if self.relaxed {
            PatternMode::Relaxed
        } else if self.literal {
            PatternMode::Literal
        } else {
            PatternMode::Strict
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremArg {
    Auto,
    T21,
    T22,
    T23,
    T24,
}

impl TheoremArg {
    fn theorem(self) -> Option<Theorem> {
        match self {
            TheoremArg::Auto => None,
            TheoremArg::T21 => Some(Theorem::T21),
            TheoremArg::T22 => Some(Theorem::T22),
            TheoremArg::T23 => Some(Theorem::T23),
            TheoremArg::T24 => Some(Theorem::T24),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassArg {
    Inc,
    Dec,
    Any,
}

impl From<ClassArg> for RootClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Inc => RootClass::Increasing,
            ClassArg::Dec => RootClass::Decreasing,
            ClassArg::Any => RootClass::Any,
        }
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    use Error::*;
    match e {
        MalformedInput { .. } | InvalidDomain { .. } | UnsortedAbscissae { .. } | NonSelfMap { .. } | FlatSegment { .. }
        | OutOfDomain { .. } | Recipe(_) => EXIT_INPUT,
        ConditionsNotMet { .. }
        | NoApplicableTheorem { .. }
        | WrongLap { .. }
        | NoPattern { .. }
        | NotReversing { .. }
        | EvenFixedPointCount { .. }
        | PreconditionFailed(_)
        | NoCharacteristicInterval { .. } => EXIT_CONDITIONS,
        _ => EXIT_CONSTRUCTION,
    }
}

pub fn read_map(path: &Path) -> Result<PmFunction, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let input: PmInput = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(PmFunction::from_input(&input)?)
}

fn read_recipe(path: &Path) -> Result<RootRecipe, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    RootRecipe::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn cap_or_env(flag: Option<usize>, default: usize) -> Result<usize, Failure> {
    if let Some(c) = flag {
        return Ok(c);
    }
    match std::env::var(CAP_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| Failure::input(format!("{CAP_ENV}={s:?} is not a nonnegative integer"))),
        Err(_) => Ok(default),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| Failure::input(e.to_string()))
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    emit(out, &text)
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Analyze { input, cap, out } => analyze(&input, cap, out.as_deref()),
        Command::Check { input, theorem, mode, out } => check(&input, theorem, mode.mode(), out.as_deref()),
        Command::Construct { input, theorem, class, mode, cap, seed_spec, prefer_schedule, out } => {
            let mut settings = OrbitSettings { orbit_cap: cap_or_env(cap, OrbitSettings::default().orbit_cap)?, ..Default::default() };
            if let Some(path) = seed_spec {
                let text = fs::read_to_string(&path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                let seed: SeedShape =
                    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                seed.validate().map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                settings.seed = seed;
            }
            let opts = ConstructOptions { mode: mode.mode(), settings, prefer_schedule };
            cmd_construct(&input, theorem, class, &opts, out.as_deref())
        }
        Command::Verify { input, root, grid, tol, out } => cmd_verify(&input, &root, grid, tol, out.as_deref()),
        Command::Classify { input, order, class, height, out } => {
            let f = read_map(&input)?;
            let class = match class {
                ClassArg::Inc => Orientation::Increasing,
                ClassArg::Dec => Orientation::Decreasing,
                ClassArg::Any => return Err(Failure::input("--class must be inc or dec for classify")),
            };
            let verdict = classify_existence(&f, order, class, height)?;
            eprintln!("{:?}: {}", verdict.verdict, verdict.row.as_deref().unwrap_or("no matching row"));
            emit_json(out.as_deref(), &verdict)?;
            Ok(EXIT_OK)
        }
        Command::Sample { input, root, points, out } => {
            if points < 2 {
                return Err(Failure::input("--points must be at least 2"));
            }
            let f = read_map(&input)?;
            let csv = match root {
                Some(path) => sample_csv(&read_recipe(&path)?.instantiate(&f)?, points)?,
                None => sample_csv(&f, points)?,
            };
            emit(out.as_deref(), &csv)?;
            Ok(EXIT_OK)
        }
    }
}

fn analyze(input: &Path, cap: Option<usize>, out: Option<&Path>) -> Result<i32, Failure> {
    let f = read_map(input)?;
    let cap = cap_or_env(cap, DEFAULT_HEIGHT_CAP)?;
    let h = height(&f, cap)?;
    let k = characteristic_interval(&f).ok();
    let (a, b) = f.domain();
    let (lo, hi) = f.range();
    let report = json!({
        "domain": [a, b],
        "forts": f.forts().positions,
        "N": f.fort_count(),
        "H": h.value,
        "fortCounts": h.fort_counts,
        "budgetExhausted": h.budget_exhausted,
        "K": k.as_ref().map(|k| k.bounds),
        "kLap": k.as_ref().map(|k| k.lap_index),
        "lapCount": f.lap_count(),
        "range": [lo, hi],
    });
    eprintln!("N = {}, H = {}", f.fort_count(), h.value);
    emit_json(out, &report)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CheckEntry {
    theorem: Theorem,
    matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn check(input: &Path, theorem: TheoremArg, mode: PatternMode, out: Option<&Path>) -> Result<i32, Failure> {
    let f = read_map(input)?;
    let k = characteristic_interval(&f).map_err(|e| Failure { code: EXIT_CONDITIONS, message: e.to_string() });
    let laps = f.lap_count();
    let mirrored = matches!(&k, Ok(k) if laps > 1 && k.lap_index == laps - 1);
    let g = if mirrored { f.mirror_conjugate() } else { f.clone() };
    let theorems: Vec<Theorem> = match theorem.theorem() {
        Some(t) => vec![t],
        None => match &k {
            Ok(_) if laps == 1 => Vec::new(),
            Ok(_) => {
                let kg = characteristic_interval(&g)?.lap_index;
                if kg == 0 {
                    vec![Theorem::T21, Theorem::T23]
                } else {
                    vec![Theorem::T22, Theorem::T24]
                }
            }
            Err(_) => vec![Theorem::T21, Theorem::T22, Theorem::T23, Theorem::T24],
        },
    };
    let entries: Vec<CheckEntry> = theorems
        .iter()
        .map(|&t| {
            let r = match t {
                Theorem::T21 => match_t21(&g),
                Theorem::T22 => match_t22(&g, mode),
                Theorem::T23 => match_t23(&g),
                Theorem::T24 => match_t24(&g, mode),
            };
            match r {
                Ok(mut report) => {
                    report.mirrored = mirrored;
                    CheckEntry { theorem: t, matched: report.matched(), report: Some(report), error: None }
                }
                Err(Error::NoPattern { detail, mut report }) => {
                    report.mirrored = mirrored;
                    CheckEntry { theorem: t, matched: false, report: Some(*report), error: Some(detail) }
                }
                Err(e) => CheckEntry { theorem: t, matched: false, report: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    let matched: Vec<Theorem> = entries.iter().filter(|e| e.matched).map(|e| e.theorem).collect();
    for e in &entries {
        let why = e.report.as_ref().and_then(|r| r.failed_clause.clone()).or_else(|| e.error.clone());
        match (e.matched, why) {
            (true, _) => eprintln!("{}: matched", e.theorem),
            (false, Some(why)) => eprintln!("{}: not matched ({why})", e.theorem),
            (false, None) => eprintln!("{}: not matched", e.theorem),
        }
    }
    let report = json!({ "mirrored": mirrored, "matched": matched, "results": entries });
    emit_json(out, &report)?;
    Ok(if matched.is_empty() { EXIT_CONDITIONS } else { EXIT_OK })
}

fn summary(f: &PmFunction, root: &RootFunction) -> Result<Value, Failure> {
    let c = root.lap_endpoints();
    let mut laps = Vec::new();
    for lap in 0..c.len() - 1 {
        let base_lap = if root.mirrored() { c.len() - 2 - lap } else { lap };
        let piece = match root.pieces()[base_lap] {
            Piece::Kernel => "kernel".to_string(),
            Piece::Inverse { of_lap } => {
                let of = if root.mirrored() { c.len() - 2 - of_lap } else { of_lap };
                format!("inverse of lap {of} composed with F")
            }
        };
        laps.push(json!({
            "lap": lap,
            "interval": [c[lap], c[lap + 1]],
            "piece": piece,
            "values": [root.eval_piece(lap, c[lap])?, root.eval_piece(lap, c[lap + 1])?],
        }));
    }
    let (ka, kb) = root.kernel_interval();
    Ok(json!({
        "sourceTheorem": root.source_theorem(),
        "theoremCase": root.theorem_case(),
        "mirrored": root.mirrored(),
        "orientation": root.orientation(),
        "K": [ka, kb],
        "kernel": root.kernel().recipe(),
        "laps": laps,
        "schedule": root.schedule(),
        "fixtureHash": crate::recipe::fixture_hash(f),
    }))
}

fn cmd_construct(
    input: &Path,
    theorem: TheoremArg,
    class: ClassArg,
    opts: &ConstructOptions,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let f = read_map(input)?;
    let root = match theorem.theorem() {
        Some(t) => construct(&f, t, opts)?,
        None => construct_auto(&f, class.into(), opts)?,
    };
    let recipe = RootRecipe::from_root(&f, &root);
    let summary = summary(&f, &root)?;
    eprintln!(
        "constructed {} root via {}{}",
        match root.orientation() {
            Orientation::Increasing => "an increasing",
            Orientation::Decreasing => "a decreasing",
        },
        root.source_theorem(),
        if root.mirrored() { " (mirrored)" } else { "" }
    );
    match out {
        Some(path) => {
            emit(Some(path), &(recipe.to_json() + "\n"))?;
            emit_json(None, &summary)?;
        }
        None => emit(None, &(recipe.to_json() + "\n"))?,
    }
    Ok(EXIT_OK)
}

fn cmd_verify(input: &Path, root: &Path, grid: usize, tol: f64, out: Option<&Path>) -> Result<i32, Failure> {
    let f = read_map(input)?;
    let recipe = read_recipe(root)?;
    let g = recipe.instantiate(&f)?;
    if grid < 2 {
        return Err(Failure::input("--grid must be at least 2"));
    }
    let opts = VerifyOptions { grid, tol, ..Default::default() };
    let report = verify_root(&f, &g, &opts).map_err(|e| match e {
        e @ Error::EvaluationFailure { .. } => Failure { code: EXIT_VERIFY_FAILED, message: e.to_string() },
        e => e.into(),
    })?;
    eprintln!(
        "supResidual = {:e} at x = {}; rootHeight = {}; {}",
        report.sup_residual,
        report.sup_residual_at,
        report.root_height,
        if report.passed { "passed" } else { "FAILED" }
    );
    emit_json(out, &report)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
