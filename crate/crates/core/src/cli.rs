//! Command-line front end.
//!
//! [`run`] does all the work and returns the process exit code, writing to
//! the supplied streams so tests can drive it without spawning a process.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::applications::{
    analyze, bell_canonical, bell_chsh, bell_max, dense_coding_fidelity, phi1_overlap, reduction_checks,
    swapping_fidelity, teleportation_fidelity, teleportation_max, AnalysisReport, BellMode, ChshAngles,
    IdentityCheck, SphereQuadrature, BELL_TOL, DENSE_CODING_TOL, SWAP_TOL, TELEPORT_TOL,
};
use crate::concurrence::{concurrence, BoundsCheck};
use crate::ddim::{
    analyze_d, clock_shift_unitaries, default_budget_d, dense_coding_fidelity_d, fef_numeric_d, phi1_d,
    random_density_d, teleport_max_d, DdimReport,
};
use crate::fef::{fef_oracle_sphere, fef_oracle_unitary, fully_entangled_fraction, SphereBudget};
use crate::io::{self, ReadError};
use crate::optimize::SearchBudget;
use crate::states::{lower_family, random_density, sample_state, upper_family, werner, DensityMatrix, Family};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_IDENTITY: i32 = 4;
pub const EXIT_BOUNDS: i32 = 5;

/// Significant digits of every real in CSV output.
pub const CSV_DIGITS: usize = 12;

pub const CSV_HEADER: &str =
    "index,family,param1,param2,F,E,C,F_T_max,B_canonical,B_max_angles,lower_ok,upper_ok";

/// Points on each bound line in the fig2 companion file.
pub const BOUND_LINE_POINTS: usize = 101;

/// Oracle agreement tolerances: sphere search, unitary search.
pub const SPHERE_ORACLE_TOL: f64 = 1e-9;
pub const UNITARY_ORACLE_TOL: f64 = 1e-6;
pub const QUICK_ORACLE_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Analyze,
    Sample,
    Verify,
    Fig2,
    Ddim,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Raw,
    Fig2,
    Werner,
    Lower,
    Upper,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Raw => Family::RawEq25,
            FamilyArg::Fig2 => Family::Fig2Mixture,
            FamilyArg::Werner => Family::Werner,
            FamilyArg::Lower => Family::LowerFamily,
            FamilyArg::Upper => Family::UpperFamily,
        }
    }
}

/// Entanglement measures and protocol fidelities for two-qubit states.
#[derive(Clone, Debug, Parser)]
#[command(name = "entfrac", version)]
pub struct Cli {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Density-matrix JSON file (required for analyze).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Number of states; defaults depend on the command.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: Option<u64>,
    #[arg(long, value_enum, default_value = "raw")]
    pub family: FamilyArg,
    /// Worker threads for sampling; all cores when absent.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Optimizer starts per numeric maximization.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
    /// Smaller budgets and the looser oracle tolerance.
    #[arg(long)]
    pub quick: bool,
    /// Overrides the local-unitary oracle tolerance used by verify.
    #[arg(long)]
    pub oracle_tol: Option<f64>,
    /// Local dimension for ddim when no input file is given.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..=4))]
    pub dim: u64,
}

impl Cli {
    fn count_or(&self, default: u64) -> u64 {
        self.count.unwrap_or(if self.quick { default.min(10) } else { default })
    }

    pub fn search_budget(&self) -> SearchBudget {
        let base = if self.quick {
            SearchBudget::default().with_starts(4).with_max_evals(2000)
        } else {
            SearchBudget::default()
        };
        match self.budget {
            Some(n) => base.with_starts(n as usize),
            None => base,
        }
    }

    fn unitary_oracle_tol(&self) -> f64 {
        self.oracle_tol.unwrap_or(if self.quick { QUICK_ORACLE_TOL } else { UNITARY_ORACLE_TOL })
    }
}

/// Formats `x` with [`CSV_DIGITS`] significant digits, trailing zeros trimmed.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", CSV_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..CSV_DIGITS as i32).contains(&exp) {
        let decimals = (CSV_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// One sampled state and its measures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub index: u64,
    pub family: &'static str,
    pub params: Vec<f64>,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "F_T_max")]
    pub f_t_max: f64,
    #[serde(rename = "B_canonical")]
    pub b_canonical: f64,
    #[serde(rename = "B_max_angles")]
    pub b_max_angles: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl SampleRow {
    pub fn csv(&self) -> String {
        let param = |k: usize| self.params.get(k).map(|&p| fmt_real(p)).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.index,
            self.family,
            param(0),
            param(1),
            fmt_real(self.f),
            fmt_real(self.e),
            fmt_real(self.c),
            fmt_real(self.f_t_max),
            fmt_real(self.b_canonical),
            fmt_real(self.b_max_angles),
            self.lower_ok,
            self.upper_ok
        )
    }

    pub fn bounds_ok(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Regenerates draw `index` of `family` and evaluates its row.
pub fn sample_row(family: Family, seed: u64, index: u64, budget: &SearchBudget) -> SampleRow {
    let (rho, params) = sample_state(family, seed, index);
    let fef = fully_entangled_fraction(&rho).expect("sampled states are two-qubit");
    let c = concurrence(&rho).expect("sampled states are two-qubit").c;
    let bounds = BoundsCheck::from_values(fef.e, c);
    SampleRow {
        index,
        family: family.name(),
        params,
        f: fef.f,
        e: fef.e,
        c,
        f_t_max: teleportation_max(fef.f),
        b_canonical: bell_canonical(&rho).expect("two-qubit"),
        b_max_angles: bell_max(&rho, BellMode::Angles, budget).expect("two-qubit"),
        lower_ok: bounds.lower_ok,
        upper_ok: bounds.upper_ok,
    }
}

/// Rows `0..count` in index order, computed on `workers` threads.
pub fn sample_rows(family: Family, seed: u64, count: u64, budget: &SearchBudget, workers: Option<usize>) -> Vec<SampleRow> {
    let work = || (0..count).into_par_iter().map(|i| sample_row(family, seed, i, budget)).collect();
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    }
}

pub fn rows_to_csv(rows: &[SampleRow]) -> String {
    let mut s = String::with_capacity(rows.len() * 160);
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv());
        s.push('\n');
    }
    s
}

/// The two bound lines `E = C` and `E = 2C − 1` at evenly spaced `C`.
pub fn bound_lines_csv() -> String {
    let mut s = String::from("C,E_lower_bound_line,E_upper_bound_line\n");
    for k in 0..BOUND_LINE_POINTS {
        let c = k as f64 / (BOUND_LINE_POINTS - 1) as f64;
        let _ = writeln!(s, "{},{},{}", fmt_real(c), fmt_real(c), fmt_real(2.0 * c - 1.0));
    }
    s
}

/// Parses `argv` and runs; clap usage errors exit through clap.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(args);
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(&cli, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Analyze => cmd_analyze(cli, out, err),
        Command::Sample => cmd_sample(cli, out, err, cli.family.into(), false),
        Command::Fig2 => cmd_sample(cli, out, err, Family::Fig2Mixture, true),
        Command::Verify => cmd_verify(cli, out, err),
        Command::Ddim => cmd_ddim(cli, out, err),
    }
}

fn emit(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write, text: &str) -> Result<(), i32> {
    let res = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    };
    res.map_err(|e| {
        let _ = writeln!(err, "error: cannot write output: {e}");
        EXIT_FAILURE
    })
}

fn load(path: &Path, err: &mut dyn Write) -> Result<DensityMatrix, i32> {
    io::read_density(path).map_err(|e| {
        let code = match &e {
            ReadError::Invalid(_) => EXIT_INVARIANT,
            _ => EXIT_PARSE,
        };
        match &e {
            ReadError::Invalid(s) => {
                let _ = writeln!(err, "invariant failure [{}]: {s}", s.invariant().unwrap_or("unknown"));
            }
            other => {
                let _ = writeln!(err, "error: {other}");
            }
        }
        code
    })
}

fn cmd_analyze(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(path) = &cli.input else {
        let _ = writeln!(err, "error: analyze requires --in <file>");
        return EXIT_PARSE;
    };
    let rho = match load(path, err) {
        Ok(r) => r,
        Err(code) => return code,
    };
    if let Err(e) = rho.require_dim(4) {
        let _ = writeln!(err, "invariant failure [dimension]: {e}");
        return EXIT_INVARIANT;
    }
    let report = analyze(&rho, &cli.search_budget()).expect("validated two-qubit state");
    let checks = reduction_checks(&rho, &report).expect("validated two-qubit state");
    let failed: Vec<&IdentityCheck> = checks.iter().filter(|c| !c.pass).collect();
    if !failed.is_empty() {
        for c in failed {
            let _ = writeln!(err, "identity mismatch: {} deviation {:e} > {:e}", c.name, c.deviation, c.tolerance);
        }
        return EXIT_IDENTITY;
    }
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("finite reals") + "\n",
        Format::Csv => report_csv(&report),
    };
    match emit(cli, out, err, &text) {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

fn report_csv(r: &AnalysisReport) -> String {
    let vals = [
        r.f, r.e, r.c, r.f_dc, r.f_dc_max, r.f_t, r.f_t_max, r.f_es, r.f_es_max, r.b_canonical, r.b_max_angles,
        r.b_max_unitaries,
    ];
    format!(
        "F,E,C,F_DC,F_DC_max,F_T,F_T_max,F_ES,F_ES_max,B_canonical,B_max_angles,B_max_unitaries\n{}\n",
        vals.iter().map(|&v| fmt_real(v)).collect::<Vec<_>>().join(",")
    )
}

fn cmd_sample(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write, family: Family, fig2: bool) -> i32 {
    let count = cli.count_or(if fig2 { 100_000 } else { 1000 });
    let rows = sample_rows(family, cli.seed, count, &cli.search_budget(), cli.workers);
    let text = match cli.format {
        Format::Csv => rows_to_csv(&rows),
        Format::Json => serde_json::to_string_pretty(&rows).expect("finite reals") + "\n",
    };
    if let Err(code) = emit(cli, out, err, &text) {
        return code;
    }
    if fig2 {
        match &cli.out {
            Some(path) => {
                let companion = companion_path(path);
                if let Err(e) = std::fs::write(&companion, bound_lines_csv()) {
                    let _ = writeln!(err, "error: cannot write {}: {e}", companion.display());
                    return EXIT_FAILURE;
                }
            }
            None => {
                let _ = writeln!(err, "note: bound lines are written only alongside --out");
            }
        }
    }
    let bad: Vec<&SampleRow> = rows.iter().filter(|r| !r.bounds_ok()).collect();
    if bad.is_empty() {
        return EXIT_OK;
    }
    for r in &bad {
        let (rho, _) = sample_state(family, cli.seed, r.index);
        let _ = writeln!(
            err,
            "bound violation at index {} (family {}, seed {}): E={} C={}\n{}",
            r.index,
            family.name(),
            cli.seed,
            fmt_real(r.e),
            fmt_real(r.c),
            io::to_json(rho.matrix())
        );
    }
    EXIT_BOUNDS
}

/// `<out>.bounds.csv` next to the sample file.
pub fn companion_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".bounds.csv");
    PathBuf::from(name)
}

fn max_dev(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// The identity suite run by `verify`.
pub fn verify_suite(cli: &Cli) -> Vec<IdentityCheck> {
    let count = cli.count_or(100);
    let seed = cli.seed;
    let budget = cli.search_budget();
    let quad = SphereQuadrature::default();
    let states: Vec<DensityMatrix> = (0..count).map(|i| random_density(seed, i)).collect();

    let per_state = |f: &(dyn Fn(&DensityMatrix) -> f64 + Sync)| max_dev(states.par_iter().map(f).collect::<Vec<_>>().into_iter());

    let mut checks = vec![
        IdentityCheck::new(
            "dense_coding_reduction",
            per_state(&|r| (dense_coding_fidelity(r).unwrap() - phi1_overlap(r).unwrap()).abs()),
            DENSE_CODING_TOL,
        ),
        IdentityCheck::new(
            "teleportation_reduction",
            per_state(&|r| {
                (teleportation_fidelity(r, &quad).unwrap() - (1.0 + 2.0 * phi1_overlap(r).unwrap()) / 3.0).abs()
            }),
            TELEPORT_TOL,
        ),
        IdentityCheck::new(
            "swapping_reduction",
            per_state(&|r| (swapping_fidelity(r).unwrap() - phi1_overlap(r).unwrap()).abs()),
            SWAP_TOL,
        ),
        IdentityCheck::new(
            "bell_canonical_reduction",
            per_state(&|r| (bell_canonical(r).unwrap() - bell_chsh(r, ChshAngles::CANONICAL).unwrap()).abs()),
            BELL_TOL,
        ),
        IdentityCheck::new(
            "fef_sphere_oracle",
            per_state(&|r| (fully_entangled_fraction(r).unwrap().f - fef_oracle_sphere(r, SphereBudget::default())).abs()),
            SPHERE_ORACLE_TOL,
        ),
        IdentityCheck::new(
            "fef_unitary_oracle",
            per_state(&|r| (fully_entangled_fraction(r).unwrap().f - fef_oracle_unitary(r, &budget)).abs()),
            cli.unitary_oracle_tol(),
        ),
        IdentityCheck::new(
            "concurrence_bounds",
            per_state(&|r| {
                let e = fully_entangled_fraction(r).unwrap().e;
                let c = concurrence(r).unwrap().c;
                (e - c).max(c - (e + 1.0) / 2.0).max(0.0)
            }),
            crate::concurrence::BOUND_TOL,
        ),
    ];

    let grid = |n: usize| (0..n).map(move |k| k as f64 / (n - 1) as f64);
    checks.push(IdentityCheck::new(
        "werner_closed_forms",
        max_dev(grid(11).map(|p| {
            let w = werner(p).unwrap();
            let fef = fully_entangled_fraction(&w).unwrap();
            let target = ((3.0 * p - 1.0) / 2.0).max(0.0);
            (fef.f - (1.0 + 3.0 * p) / 4.0)
                .abs()
                .max((fef.e - target).abs())
                .max((concurrence(&w).unwrap().c - target).abs())
        })),
        1e-10,
    ));
    checks.push(IdentityCheck::new(
        "lower_family_closed_form",
        max_dev(grid(10).flat_map(|eps| {
            grid(10).map(move |t| {
                let theta = t * std::f64::consts::PI;
                let rho = lower_family(eps, theta).unwrap();
                let target = ((1.0 - eps) * theta.sin() - eps / 2.0).max(0.0);
                let e = fully_entangled_fraction(&rho).unwrap().e;
                (e - target).abs().max((concurrence(&rho).unwrap().c - target).abs())
            })
        })),
        1e-10,
    ));
    checks.push(IdentityCheck::new(
        "upper_family_closed_form",
        max_dev(grid(100).map(|z| {
            let rho = upper_family(0.5 * z).unwrap();
            let e = fully_entangled_fraction(&rho).unwrap().e;
            let c = concurrence(&rho).unwrap().c;
            (e - (2.0 * c - 1.0)).abs().max((e - (1.0 - z)).abs())
        })),
        1e-10,
    ));

    let ddim_count = count.min(20);
    checks.push(IdentityCheck::new(
        "ddim_dense_coding_reduction",
        max_dev((2..=3).flat_map(|d| {
            let us = clock_shift_unitaries(d);
            (0..ddim_count).map(move |i| {
                let rho = random_density_d(d, seed, i).unwrap();
                (dense_coding_fidelity_d(&rho, &us).unwrap() - rho.overlap(&phi1_d(d))).abs()
            })
        })),
        1e-12,
    ));
    let ddim_budget = match cli.budget {
        Some(n) => default_budget_d(2).with_starts(n as usize),
        None => default_budget_d(2),
    };
    checks.push(IdentityCheck::new(
        "ddim_fef_numeric_qubits",
        max_dev(
            states[..ddim_count as usize]
                .par_iter()
                .map(|r| (fef_numeric_d(r, &ddim_budget).unwrap() - fully_entangled_fraction(r).unwrap().f).abs())
                .collect::<Vec<_>>()
                .into_iter(),
        ),
        cli.unitary_oracle_tol(),
    ));
    checks.push(IdentityCheck::new(
        "ddim_teleport_endpoints",
        (teleport_max_d(1.0, 2).unwrap() - 1.0)
            .abs()
            .max((teleport_max_d(0.5, 2).unwrap() - 2.0 / 3.0).abs())
            .max((teleport_max_d(1.0, 5).unwrap() - 1.0).abs()),
        1e-12,
    ));
    checks
}

fn cmd_verify(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut checks = Vec::new();
    if let Some(path) = &cli.input {
        match io::read_density(path) {
            Ok(rho) => {
                if rho.require_dim(4).is_err() {
                    checks.push(IdentityCheck::new("input_state_invariants[dimension]", f64::INFINITY, 0.0));
                } else {
                    let report = analyze(&rho, &cli.search_budget()).expect("validated two-qubit state");
                    for mut c in reduction_checks(&rho, &report).expect("validated two-qubit state") {
                        c.name = format!("input_{}", c.name);
                        checks.push(c);
                    }
                }
            }
            Err(e) => {
                let name = match &e {
                    ReadError::Invalid(s) => format!("input_state_invariants[{}]", s.invariant().unwrap_or("unknown")),
                    _ => "input_state_parse".to_string(),
                };
                let _ = writeln!(err, "{name}: {e}");
                checks.push(IdentityCheck::new(name, f64::INFINITY, 0.0));
            }
        }
    }
    checks.extend(verify_suite(cli));

    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&checks).expect("serializable") + "\n",
        Format::Csv => {
            let mut s = String::from("identity,pass,max_deviation,tolerance\n");
            for c in &checks {
                let _ = writeln!(s, "{},{},{},{}", c.name, c.pass, fmt_real(c.deviation), fmt_real(c.tolerance));
            }
            s
        }
    };
    if let Err(code) = emit(cli, out, err, &text) {
        return code;
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        EXIT_OK
    } else {
        let _ = writeln!(err, "failed identities: {}", failed.join(", "));
        EXIT_FAILURE
    }
}

fn cmd_ddim(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let states: Vec<DensityMatrix> = match &cli.input {
        Some(path) => match load(path, err) {
            Ok(r) => vec![r],
            Err(code) => return code,
        },
        None => {
            let d = cli.dim as usize;
            (0..cli.count_or(1)).map(|i| random_density_d(d, cli.seed, i).expect("d in range")).collect()
        }
    };
    let mut reports: Vec<DdimReport> = Vec::with_capacity(states.len());
    for rho in &states {
        let d = rho.local_dim();
        let budget = match cli.budget {
            Some(n) => default_budget_d(d).with_starts(n as usize),
            None if cli.quick => default_budget_d(d).with_starts(d * d).with_max_evals(2000),
            None => default_budget_d(d),
        };
        match analyze_d(rho, &budget) {
            Ok(r) => reports.push(r),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INVARIANT;
            }
        }
    }
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&reports).expect("finite reals") + "\n",
        Format::Csv => {
            let mut s = String::from("index,d,phi1_overlap,F_DC,F_numeric,F_T_max,capacity_bits\n");
            for (i, r) in reports.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{i},{},{},{},{},{},{}",
                    r.d,
                    fmt_real(r.phi1_overlap),
                    fmt_real(r.dense_coding),
                    fmt_real(r.fef_numeric),
                    fmt_real(r.teleport_max),
                    fmt_real(r.capacity_bits)
                );
            }
            s
        }
    };
    match emit(cli, out, err, &text) {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::parse_from(std::iter::once("entfrac").chain(args.iter().copied()))
    }

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(-0.0), "0");
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(0.25), "0.25");
        assert_eq!(fmt_real(2.0 * std::f64::consts::SQRT_2), "2.82842712475");
        assert_eq!(fmt_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_real(1.5e-7), "1.5e-7");
        assert_eq!(fmt_real(-0.7), "-0.7");
        assert_eq!(fmt_real(123456789012345.0), "1.23456789012e14");
    }

    #[test]
    fn header_order_is_stable() {
        assert_eq!(CSV_HEADER.split(',').count(), 12);
        let row = sample_row(Family::Werner, 1, 0, &SearchBudget::default().with_starts(2));
        assert_eq!(row.csv().split(',').count(), 12);
        assert_eq!(row.csv().split(',').nth(3), Some(""));
    }

    #[test]
    fn bound_lines_have_expected_points() {
        let s = bound_lines_csv();
        assert_eq!(s.lines().count(), BOUND_LINE_POINTS + 1);
        assert_eq!(s.lines().nth(1), Some("0,0,-1"));
        assert_eq!(s.lines().last(), Some("1,1,1"));
    }

    #[test]
    fn count_must_be_positive() {
        assert!(Cli::try_parse_from(["entfrac", "--command", "sample", "--count", "0"]).is_err());
    }

    #[test]
    fn analyze_without_input_is_a_parse_error() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(&cli(&["--command", "analyze"]), &mut o, &mut e), EXIT_PARSE);
    }

    #[test]
    fn sample_is_worker_independent() {
        let b = SearchBudget::default().with_starts(2);
        let one = rows_to_csv(&sample_rows(Family::Fig2Mixture, 3, 20, &b, Some(1)));
        let four = rows_to_csv(&sample_rows(Family::Fig2Mixture, 3, 20, &b, Some(4)));
        assert_eq!(one, four);
        assert!(one.ends_with('\n') && !one.contains('\r'));
    }

    #[test]
    fn quick_verify_passes() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(&cli(&["--command", "verify", "--quick", "--count", "10"]), &mut o, &mut e);
        assert_eq!(code, EXIT_OK, "{}\n{}", String::from_utf8_lossy(&o), String::from_utf8_lossy(&e));
    }
}
