//! Command line front end for `pmk-core`.

pub mod error;
pub mod report;
pub mod spec;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pmk_core::dynamics::{markov_check, markov_order, structure_report};
use pmk_core::ktheory::{compute_ktheory, ktheory_at_order, signed_index_sets, KTheoryOptions, LapPolicy};
use pmk_core::oracle::{
    expected_conjugate_family_result, expected_family_result, expected_family_unit, family_unit_coordinates,
    oracle_i0_u0,
};
use pmk_core::Limits;

pub use error::CliError;
use report::{Check, Report};
use spec::MapSpec;

pub const MAX_BREAKPOINTS_VAR: &str = "PMK_MAX_BREAKPOINTS";

#[derive(Debug, Parser)]
#[command(name = "pmk", version, about = "Classify piecewise-linear circle maps and compute their K-theory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Leftmost,
    Rightmost,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// add wall-clock time to the report (makes it nondeterministic)
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degree, critical points, Markov structure and dynamical verdicts
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// K-groups and the class of the unit for a Markov map
    Ktheory {
        file: PathBuf,
        /// order k of the approximating algebras (default: minimized Markov order)
        #[arg(long)]
        order: Option<usize>,
        /// include every intermediate matrix
        #[arg(long)]
        verbose: bool,
        /// run even when simplicity is not established
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value = "leftmost")]
        lap_policy: Policy,
        #[command(flatten)]
        output: Output,
    },
    /// Cross-check the pipeline against brute-force constructions
    Oracle {
        #[arg(required_unless_present = "family", conflicts_with = "family")]
        file: Option<PathBuf>,
        /// use the tent family member with parameters M K
        #[arg(long, num_args = 2, value_names = ["M", "K"])]
        family: Option<Vec<i64>>,
        /// with --family, use the mirrored family
        #[arg(long, requires = "family")]
        conjugate: bool,
        #[command(flatten)]
        output: Output,
    },
}

/// Limits with the breakpoint cap taken from the environment if set.
pub fn limits_from_env() -> Result<Limits, CliError> {
    let mut limits = Limits::default();
    if let Ok(raw) = std::env::var(MAX_BREAKPOINTS_VAR) {
        limits.max_breakpoints = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_BREAKPOINTS_VAR}={raw:?} is not a nonnegative integer")))?;
    }
    Ok(limits)
}

pub fn load_spec(path: &PathBuf) -> Result<MapSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    spec::parse_spec(&text)
}

fn base_report(command: &str, spec: &MapSpec) -> Report {
    Report {
        tool: report::TOOL_NAME.into(),
        version: report::VERSION.into(),
        command: command.into(),
        input: report::input(spec),
        analysis: None,
        ktheory: None,
        oracle: None,
        timing_ms: None,
    }
}

fn render(r: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => report::to_json(r),
        Format::Text => Ok(report::to_text(r)),
    }
}

pub fn cmd_analyze(spec: &MapSpec, limits: Limits) -> Result<Report, CliError> {
    let map = spec.to_map(limits)?;
    let mut r = base_report("analyze", spec);
    r.analysis = Some(report::analysis(&structure_report(&map)?)?);
    Ok(r)
}

pub fn cmd_ktheory(
    spec: &MapSpec,
    limits: Limits,
    order: Option<usize>,
    verbose: bool,
    force: bool,
    policy: LapPolicy,
) -> Result<Report, CliError> {
    let map = spec.to_map(limits)?;
    let options = KTheoryOptions { order, policy, force };
    let result = compute_ktheory(&map, &options)?;
    let mut r = base_report("ktheory", spec);
    r.ktheory = Some(report::ktheory(&result, policy, force, verbose)?);
    Ok(r)
}

fn check(name: &str, pass: bool, detail: String, counterexample: Option<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail,
        counterexample: if pass { None } else { counterexample },
    }
}

/// Oracle checks on one map; `family` carries `(m, k, conjugate)` when the
/// closed forms apply.
pub fn cmd_oracle(spec: &MapSpec, limits: Limits, family: Option<(i64, i64, bool)>) -> Result<Report, CliError> {
    let map = spec.to_map(limits)?;
    let s = markov_check(&map)?.ok_or_else(|| {
        let at = pmk_core::dynamics::markov_violation(&map).map(|x| x.to_string()).unwrap_or_default();
        pmk_core::Error::NotMarkov(at)
    })?;
    let order = match markov_order(&map, &s, true) {
        Ok(o) => o.k,
        Err(pmk_core::Error::NotSimple(_)) => 1,
        Err(e) => return Err(e.into()),
    };
    let mut checks = Vec::new();

    let mut orders = vec![1, order, order + 1];
    orders.dedup();
    for &k in &orders {
        let sets = signed_index_sets(&map, &s, k)?;
        let o = oracle_i0_u0(&map, &s, k)?;
        let labels_ok = o.labels == sets.dpm;
        checks.push(check(
            &format!("index set D(±) at k={k}"),
            labels_ok,
            format!("{} labels from iterated-lift enumeration", o.labels.len()),
            Some(format!(
                "oracle {:?} vs pipeline {:?}",
                o.labels.iter().map(|(x, v)| report::d_label(x, *v)).collect::<Vec<_>>(),
                sets.dpm.iter().map(|(x, v)| report::d_label(x, *v)).collect::<Vec<_>>()
            )),
        ));
        let i0 = pmk_core::ktheory::matrix_i0(&s, &sets);
        let u0 = pmk_core::ktheory::matrix_u0(&s, &sets);
        let pass = labels_ok && o.i0 == i0 && o.u0 == u0 && o.mismatches.is_empty();
        checks.push(check(
            &format!("I0/U0 at k={k}"),
            pass,
            "matrix-unit embeddings equal the closed-form column rules".into(),
            Some(format!(
                "oracle I0 {} U0 {} vs rules I0 {i0} U0 {u0}; summand mismatches {:?}",
                o.i0, o.u0, o.mismatches
            )),
        ));
    }

    let base = ktheory_at_order(&map, &s, order, LapPolicy::Leftmost)?;
    let next = ktheory_at_order(&map, &s, order + 1, LapPolicy::Leftmost)?;
    let same = base.k0 == next.k0 && base.k1 == next.k1 && base.unit_class == next.unit_class;
    checks.push(check(
        &format!("order independence k={order} vs k={}", order + 1),
        same,
        format!("K0 = {}, K1 = {}, unit {:?}", base.k0, base.k1, base.unit_class),
        Some(format!(
            "k={}: K0 = {}, K1 = {}, unit {:?}",
            order + 1,
            next.k0,
            next.k1,
            next.unit_class
        )),
    ));
    let right = ktheory_at_order(&map, &s, order, LapPolicy::Rightmost)?;
    checks.push(check(
        "lap policy independence",
        right.b_tilde == base.b_tilde && right.k0 == base.k0 && right.k1 == base.k1,
        format!("B~ = {}", base.b_tilde),
        Some(format!("rightmost B~ = {}", right.b_tilde)),
    ));

    if let Some((m, k, conjugate)) = family {
        let (pm, pk) = if conjugate { (k, m) } else { (m, k) };
        if (pm >= 2 && pk >= 2) || (pm == pk && pm >= 1) {
            let want = if conjugate {
                expected_conjugate_family_result(m, k)
            } else {
                expected_family_result(m, k)
            };
            checks.push(check(
                "closed-form K-groups",
                base.k0 == want.k0 && base.k1 == want.k1,
                format!("expected K0 = {}, K1 = {}", want.k0, want.k1),
                Some(format!("pipeline K0 = {}, K1 = {}", base.k0, base.k1)),
            ));
            if !conjugate && k != m - 1 {
                checks.push(unit_check(m, k, &base));
            }
        }
    }

    let passed = checks.iter().all(|c| c.pass);
    let mut r = base_report("oracle", spec);
    r.oracle = Some(report::Oracle { order, checks, passed });
    Ok(r)
}

/// The unit class against the hand-derived coordinates on `Z_g ⊕ Z_T`.
fn unit_check(m: i64, k: i64, r: &pmk_core::ktheory::KTheoryResult) -> Check {
    let rep = r.a_side.cokernel_lift(&r.unit_class);
    let got = family_unit_coordinates(m, k, &rep);
    let (want, (g, t)) = expected_family_unit(m, k);
    check(
        "unit class closed form",
        got == want,
        format!("unit = ({}, {}) in Z/{g} + Z/{t}", want.0, want.1),
        Some(format!("pipeline unit maps to ({}, {})", got.0, got.1)),
    )
}

fn load_family(family: &[i64], conjugate: bool) -> Result<(MapSpec, (i64, i64, bool)), CliError> {
    let (m, k) = (family[0], family[1]);
    if m < 1 || k < 1 {
        return Err(CliError::Usage(format!("--family needs positive M and K, got {m} {k}")));
    }
    Ok((MapSpec::family(m, k, conjugate)?, (m, k, conjugate)))
}

/// Runs one parsed command line and returns the rendered report.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let limits = limits_from_env()?;
    let start = Instant::now();
    let (mut r, output) = match cli.command {
        Command::Analyze { file, output } => (cmd_analyze(&load_spec(&file)?, limits)?, output),
        Command::Ktheory {
            file,
            order,
            verbose,
            force,
            lap_policy,
            output,
        } => {
            let policy = match lap_policy {
                Policy::Leftmost => LapPolicy::Leftmost,
                Policy::Rightmost => LapPolicy::Rightmost,
            };
            (cmd_ktheory(&load_spec(&file)?, limits, order, verbose, force, policy)?, output)
        }
        Command::Oracle {
            file,
            family,
            conjugate,
            output,
        } => {
            let (spec, fam) = match (file, family) {
                (Some(f), None) => (load_spec(&f)?, None),
                (None, Some(v)) => {
                    let (s, f) = load_family(&v, conjugate)?;
                    (s, Some(f))
                }
                _ => return Err(CliError::Usage("give a file or --family M K".into())),
            };
            let r = cmd_oracle(&spec, limits, fam)?;
            let failed = r.oracle.as_ref().map_or(0, |o| o.checks.iter().filter(|c| !c.pass).count());
            if failed > 0 {
                // the report is still the useful output on failure
                eprint!("{}", render(&r, output.format)?);
                return Err(CliError::OracleFailed(failed));
            }
            (r, output)
        }
    };
    if output.timing {
        r.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    render(&r, output.format)
}

/// Convenience for tests: the report for a map file given as text.
pub fn analyze_text(text: &str) -> Result<Report, CliError> {
    cmd_analyze(&spec::parse_spec(text)?, limits_from_env()?)
}
