//! The machine-readable report. Field order is fixed by the struct
//! definitions, so serializing a parsed report reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use pmk_core::dynamics::{StructureReport, Verdict};
use pmk_core::ktheory::{KTheoryResult, LapPolicy, SignedIndexSets};
use pmk_core::{CircleInterval, CirclePoint, FGAbelianGroup, IntMatrix, Valency};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::spec::MapSpec;

pub const TOOL_NAME: &str = "pmk";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: Input,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<Analysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ktheory: Option<KTheory>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Oracle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Input {
    pub name: Option<String>,
    pub sha256: String,
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
    pub metadata: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub point: String,
    pub valency: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub entries: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub source: String,
    pub points: Vec<String>,
    pub intervals: Vec<String>,
    /// entry `(I, J)` counts laps of `J` mapping onto `I`
    pub incidence: LabeledMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub p: usize,
    /// `cycle[i]` is a union of closed arcs; `φ(cycle[i]) = cycle[i+1 mod p]`
    pub cycle: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub k: usize,
    pub n: usize,
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub field: String,
    pub justification: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub degree: i64,
    pub critical_points: Vec<CriticalPoint>,
    pub critical_values: Vec<String>,
    pub expanding: bool,
    pub markov: bool,
    pub partition: Option<Partition>,
    pub transitive: String,
    pub exact: String,
    pub global_period: Option<Period>,
    pub exceptional_fixed_points: Option<Vec<String>>,
    pub exceptional_critical_value: Option<String>,
    pub simple: String,
    pub quotient_form: Option<String>,
    pub markov_order: Option<Order>,
    pub provenance: Vec<Provenance>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub text: String,
    pub rank: usize,
    pub torsion: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitClass {
    /// the summand `coker(1 − Ã)` of K₀ holding the class
    pub group: Group,
    /// free coordinates first, then torsion residues
    pub coordinates: Vec<i64>,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Intermediate {
    pub coker_i0_minus_u0: Group,
    pub coker_one_minus_a: Group,
    pub ker_one_minus_a: Group,
    pub coker_one_minus_b: Group,
    pub ker_one_minus_b: Group,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrices {
    pub i0: LabeledMatrix,
    pub u0: LabeledMatrix,
    pub a: LabeledMatrix,
    pub b: LabeledMatrix,
    pub kernel_basis: LabeledMatrix,
    pub a_tilde: LabeledMatrix,
    pub b_tilde: LabeledMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KTheory {
    pub order: usize,
    pub lap_policy: String,
    pub forced: bool,
    pub k0: Group,
    pub k1: Group,
    pub k0_extension_split: bool,
    pub unit_class: UnitClass,
    pub groups: Intermediate,
    pub d_pm: Vec<String>,
    pub i_pm: Vec<String>,
    pub unit_vector: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Matrices>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oracle {
    pub order: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub fn int(x: &pmk_core::BigInt) -> Result<i64, CliError> {
    i64::try_from(x).map_err(|_| CliError::TooLarge(x.to_string()))
}

fn ints(xs: &[pmk_core::BigInt]) -> Result<Vec<i64>, CliError> {
    xs.iter().map(int).collect()
}

pub fn interval_label(iv: &CircleInterval) -> String {
    let (a, b) = iv.lifted_bounds();
    format!("({a},{b})")
}

/// `[a,b]` with `b` lifted past `a` so wrapping arcs read `[1/2,1]`.
fn closed_arc_label(a: &CirclePoint, b: &CirclePoint) -> String {
    if b.t() > a.t() {
        format!("[{a},{b}]")
    } else {
        format!("[{a},{}]", b.t() + pmk_core::rat(1, 1))
    }
}

pub fn d_label(x: &CirclePoint, v: Valency) -> String {
    format!("(d={x}, {v})")
}

pub fn i_label(iv: &CircleInterval, v: Valency) -> String {
    format!("(I={}, {v})", interval_label(iv))
}

pub fn labeled(m: &IntMatrix, rows: Vec<String>, columns: Vec<String>) -> Result<LabeledMatrix, CliError> {
    debug_assert_eq!((rows.len(), columns.len()), (m.rows(), m.cols()));
    let entries = m.to_rows().iter().map(|r| ints(r)).collect::<Result<_, _>>()?;
    Ok(LabeledMatrix {
        rows,
        columns,
        entries,
    })
}

pub fn group(g: &FGAbelianGroup) -> Result<Group, CliError> {
    Ok(Group {
        text: g.to_string(),
        rank: g.rank,
        torsion: ints(&g.torsion)?,
    })
}

fn verdict(v: Verdict) -> String {
    v.as_str().to_string()
}

pub fn input(spec: &MapSpec) -> Input {
    Input {
        name: spec.name.clone(),
        sha256: spec.sha256.clone(),
        breakpoints: spec.breakpoints.iter().map(ToString::to_string).collect(),
        values: spec.values.iter().map(ToString::to_string).collect(),
        metadata: spec.metadata.clone(),
    }
}

pub fn analysis(r: &StructureReport) -> Result<Analysis, CliError> {
    let partition = match (&r.partition, r.partition_source) {
        (Some(s), Some(src)) => {
            let names: Vec<String> = s.intervals.iter().map(interval_label).collect();
            Some(Partition {
                source: match src {
                    pmk_core::dynamics::PartitionSource::CriticalValues => "critical_values",
                    pmk_core::dynamics::PartitionSource::PostCriticalOrbit => "post_critical_orbit",
                }
                .into(),
                points: s.d.iter().map(ToString::to_string).collect(),
                intervals: names.clone(),
                incidence: labeled(&s.incidence, names.clone(), names)?,
            })
        }
        _ => None,
    };
    Ok(Analysis {
        degree: int(&r.degree)?,
        critical_points: r
            .critical_points
            .iter()
            .map(|(x, v)| CriticalPoint {
                point: x.to_string(),
                valency: v.to_string(),
            })
            .collect(),
        critical_values: r.critical_values.iter().map(ToString::to_string).collect(),
        expanding: r.expanding,
        markov: r.markov,
        partition,
        transitive: verdict(r.transitive),
        exact: verdict(r.exact),
        global_period: r.global_period.as_ref().map(|g| Period {
            p: g.p,
            cycle: g
                .cycle
                .iter()
                .map(|arcs| arcs.iter().map(|(a, b)| closed_arc_label(a, b)).collect())
                .collect(),
        }),
        exceptional_fixed_points: r
            .exceptional_fixed_points
            .as_ref()
            .map(|v| v.iter().map(ToString::to_string).collect()),
        exceptional_critical_value: r.exceptional_critical_value.as_ref().map(ToString::to_string),
        simple: verdict(r.simple),
        quotient_form: r.quotient_form.map(|q| q.to_string()),
        markov_order: r.markov_order.as_ref().map(|o| Order {
            k: o.k,
            n: o.n,
            bound: o.bound,
        }),
        provenance: r
            .provenance
            .iter()
            .map(|(f, j)| Provenance {
                field: f.clone(),
                justification: j.clone(),
            })
            .collect(),
        warnings: r.warnings.clone(),
    })
}

/// "free (-1), torsion (1 mod 2)" style rendering of a group element.
pub fn describe_element(g: &FGAbelianGroup, coords: &[i64]) -> String {
    if coords.is_empty() {
        return "0 (trivial group)".into();
    }
    let mut parts = Vec::new();
    if g.rank > 0 {
        let free: Vec<String> = coords[..g.rank].iter().map(ToString::to_string).collect();
        parts.push(format!("free ({})", free.join(", ")));
    }
    if !g.torsion.is_empty() {
        let tors: Vec<String> = coords[g.rank..]
            .iter()
            .zip(&g.torsion)
            .map(|(c, d)| format!("{c} mod {d}"))
            .collect();
        parts.push(format!("torsion ({})", tors.join(", ")));
    }
    parts.join(", ")
}

fn d_labels(sets: &SignedIndexSets) -> Vec<String> {
    sets.dpm.iter().map(|(x, v)| d_label(x, *v)).collect()
}

fn i_labels(sets: &SignedIndexSets) -> Vec<String> {
    sets.ipm.iter().map(|(iv, v)| i_label(iv, *v)).collect()
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn ktheory(r: &KTheoryResult, policy: LapPolicy, forced: bool, verbose: bool) -> Result<KTheory, CliError> {
    let d = d_labels(&r.sets);
    let i = i_labels(&r.sets);
    let coordinates = ints(&r.unit_class)?;
    let matrices = if verbose {
        let w = numbered("w", r.kernel_basis.cols());
        let c = numbered("c", r.b_tilde.rows());
        Some(Matrices {
            i0: labeled(&r.i0, i.clone(), d.clone())?,
            u0: labeled(&r.u0, i.clone(), d.clone())?,
            a: labeled(&r.a, d.clone(), d.clone())?,
            b: labeled(&r.b, i.clone(), i.clone())?,
            kernel_basis: labeled(&r.kernel_basis, d.clone(), w.clone())?,
            a_tilde: labeled(&r.a_tilde, w.clone(), w)?,
            b_tilde: labeled(&r.b_tilde, c.clone(), c)?,
        })
    } else {
        None
    };
    Ok(KTheory {
        order: r.order,
        lap_policy: match policy {
            LapPolicy::Leftmost => "leftmost",
            LapPolicy::Rightmost => "rightmost",
        }
        .into(),
        forced,
        k0: group(&r.k0)?,
        k1: group(&r.k1)?,
        k0_extension_split: r.k0_extension_split,
        unit_class: UnitClass {
            group: group(&r.coker_one_minus_a)?,
            text: describe_element(&r.coker_one_minus_a, &coordinates),
            coordinates,
        },
        groups: Intermediate {
            coker_i0_minus_u0: group(&r.coker_i0_u0)?,
            coker_one_minus_a: group(&r.coker_one_minus_a)?,
            ker_one_minus_a: group(&r.ker_one_minus_a)?,
            coker_one_minus_b: group(&r.coker_one_minus_b)?,
            ker_one_minus_b: group(&r.ker_one_minus_b)?,
        },
        d_pm: d,
        i_pm: i,
        unit_vector: ints(&r.unit_vector)?,
        matrices,
    })
}

pub fn to_json(r: &Report) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(r)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(s: &str) -> Result<Report, CliError> {
    Ok(serde_json::from_str(s)?)
}

fn write_matrix(out: &mut String, title: &str, m: &LabeledMatrix) {
    let _ = writeln!(out, "  {title}:");
    let width = m.rows.iter().map(String::len).max().unwrap_or(0);
    let _ = writeln!(out, "    {:width$}  {}", "", m.columns.join("  "));
    for (label, row) in m.rows.iter().zip(&m.entries) {
        let cells: Vec<String> = row
            .iter()
            .zip(&m.columns)
            .map(|(x, c)| format!("{x:>w$}", w = c.len()))
            .collect();
        let _ = writeln!(out, "    {label:width$}  {}", cells.join("  "));
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_else(|| "none".into())
}

pub fn to_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", r.tool, r.version, r.command);
    let _ = writeln!(
        out,
        "map {}  sha256 {}",
        r.input.name.as_deref().unwrap_or("(unnamed)"),
        r.input.sha256
    );
    let _ = writeln!(out, "  breakpoints: {}", r.input.breakpoints.join(", "));
    let _ = writeln!(out, "  values:      {}", r.input.values.join(", "));
    if let Some(a) = &r.analysis {
        let _ = writeln!(out, "analysis");
        let _ = writeln!(out, "  degree: {}", a.degree);
        let cps: Vec<String> = a.critical_points.iter().map(|c| format!("{} {}", c.point, c.valency)).collect();
        let _ = writeln!(out, "  critical points: {}", cps.join(", "));
        let _ = writeln!(out, "  critical values: {}", a.critical_values.join(", "));
        let _ = writeln!(out, "  expanding: {}  markov: {}", a.expanding, a.markov);
        if let Some(p) = &a.partition {
            let _ = writeln!(out, "  partition ({}): {}", p.source, p.points.join(", "));
        }
        let _ = writeln!(out, "  transitive: {}  exact: {}  simple: {}", a.transitive, a.exact, a.simple);
        if let Some(g) = &a.global_period {
            let cells: Vec<String> = g.cycle.iter().map(|c| c.join(" u ")).collect();
            let _ = writeln!(out, "  global period {}: {}", g.p, cells.join(" -> "));
        }
        let efp = a.exceptional_fixed_points.as_ref().map(|v| {
            if v.is_empty() {
                "none".to_string()
            } else {
                v.join(", ")
            }
        });
        let _ = writeln!(out, "  exceptional fixed points: {}", efp.unwrap_or_else(|| "undetermined".into()));
        let _ = writeln!(out, "  exceptional critical value: {}", opt(&a.exceptional_critical_value));
        let _ = writeln!(out, "  quotient form: {}", opt(&a.quotient_form));
        if let Some(o) = &a.markov_order {
            let _ = writeln!(out, "  markov order: {} (cover time {}, bound {})", o.k, o.n, o.bound);
        }
        for p in &a.provenance {
            let _ = writeln!(out, "  why {}: {}", p.field, p.justification);
        }
        for w in &a.warnings {
            let _ = writeln!(out, "  warning: {w}");
        }
    }
    if let Some(k) = &r.ktheory {
        let _ = writeln!(out, "ktheory (order {}, {} laps{})", k.order, k.lap_policy, if k.forced { ", forced" } else { "" });
        let _ = writeln!(out, "  K0 = {}{}", k.k0.text, if k.k0_extension_split { "" } else { " (extension not known to split)" });
        let _ = writeln!(out, "  K1 = {}", k.k1.text);
        let _ = writeln!(out, "  [1] in {}: {}", k.unit_class.group.text, k.unit_class.text);
        let g = &k.groups;
        let _ = writeln!(out, "  coker(I0-U0) = {}", g.coker_i0_minus_u0.text);
        let _ = writeln!(out, "  coker(1-A~) = {}  ker(1-A~) = {}", g.coker_one_minus_a.text, g.ker_one_minus_a.text);
        let _ = writeln!(out, "  coker(1-B~) = {}  ker(1-B~) = {}", g.coker_one_minus_b.text, g.ker_one_minus_b.text);
        let unit: Vec<String> = k.d_pm.iter().zip(&k.unit_vector).map(|(l, x)| format!("{l}: {x}")).collect();
        let _ = writeln!(out, "  unit vector: {}", unit.join(", "));
        if let Some(m) = &k.matrices {
            write_matrix(&mut out, "I0", &m.i0);
            write_matrix(&mut out, "U0", &m.u0);
            write_matrix(&mut out, "A", &m.a);
            write_matrix(&mut out, "B", &m.b);
            write_matrix(&mut out, "ker(I0-U0) basis", &m.kernel_basis);
            write_matrix(&mut out, "A~", &m.a_tilde);
            write_matrix(&mut out, "B~", &m.b_tilde);
        }
    }
    if let Some(o) = &r.oracle {
        let _ = writeln!(out, "oracle (order {})", o.order);
        for c in &o.checks {
            let _ = writeln!(out, "  {}: {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            if let Some(x) = &c.counterexample {
                let _ = writeln!(out, "    counterexample: {x}");
            }
        }
        let _ = writeln!(out, "  overall: {}", if o.passed { "PASS" } else { "FAIL" });
    }
    if let Some(t) = r.timing_ms {
        let _ = writeln!(out, "elapsed: {t} ms");
    }
    out
}
