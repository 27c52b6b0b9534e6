//! Argument definitions and dispatch.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use vmvt::applications as app;
use vmvt::congruences::lemma31_audit;
use vmvt::exponents::{best_bound, table1, GateConfig, RPolicy, TableVerdict};
use vmvt::meanvalue::{self as mv, ProfileCensus, Strategy};
use vmvt::recurrences::{bn_table, min_valid_r, s0_section11};
use vmvt::Error;

use crate::audit::{self, Scale};
use crate::report::{Class, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "vmvt", version, about = "Admissible exponents, censuses and audits for Vinogradov's mean value theorem")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: logical cores). Never changes results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Starting precision in bits for interval decisions.
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: u32,
    /// Memory budget in bytes for censuses.
    #[arg(long, global = true, default_value_t = mv::DEFAULT_MEMORY_BUDGET)]
    pub memory_budget: u64,
    /// Omit timestamps and timings from the report.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Smallest k at which the large-k results are applied.
    #[arg(long, global = true, default_value_t = 20)]
    pub large_k_gate: u64,
}

impl Global {
    pub fn gate(&self) -> GateConfig {
        GateConfig { large_k_gate: self.large_k_gate, bits: self.precision }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// `2 <= r <= r0(k)`.
    R0,
    /// `2 <= r <= k - 1` (exploratory).
    Unrestricted,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "verb", rename_all = "kebab-case")]
pub enum Cmd {
    /// Best admissible exponent per k with the published table alongside.
    Table {
        #[arg(long, default_value_t = 4)]
        kmin: u64,
        #[arg(long, default_value_t = 20)]
        kmax: u64,
        #[arg(long, value_enum, default_value_t = Policy::R0)]
        r_policy: Policy,
    },
    /// Is s variables covered at degree k?
    Certify {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        s: u64,
    },
    /// Count solutions J_{s,k}(X) of the Vinogradov system.
    Count {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        x: u64,
        /// convolve | meet_in_middle
        #[arg(long, default_value = "convolve")]
        strategy: String,
        /// Cross-check against brute-force pair comparison.
        #[arg(long)]
        oracle: bool,
        /// Census cache file (binary); read if present, written otherwise.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Write the full census as CSV.
        #[arg(long)]
        census_csv: Option<PathBuf>,
    },
    /// Audit the class-count bound for one congruence instance.
    Congruence {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
    },
    /// Tabulate B_n and A_n with the closed-form cross-check.
    Recurrence {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
        #[arg(long = "R", alias = "big-r")]
        big_r: u32,
        /// Also run the refined large-k iteration (k >= 8).
        #[arg(long)]
        refined: bool,
    },
    /// Waring asymptotic-formula bound and the constants xi, C.
    Waring {
        #[arg(long)]
        k: u64,
    },
    /// Tarry's problem bound W(k, h) <= k(k+1)/2 + 1.
    Tarry {
        #[arg(long)]
        k: u64,
    },
    /// Run every self-check.
    AuditAll {
        /// Full-size grids (slow).
        #[arg(long)]
        full: bool,
    },
}

impl Cmd {
    pub fn verb(&self) -> &'static str {
        match self {
            Cmd::Table { .. } => "table",
            Cmd::Certify { .. } => "certify",
            Cmd::Count { .. } => "count",
            Cmd::Congruence { .. } => "congruence",
            Cmd::Recurrence { .. } => "recurrence",
            Cmd::Waring { .. } => "waring",
            Cmd::Tarry { .. } => "tarry",
            Cmd::AuditAll { .. } => "audit-all",
        }
    }
}

/// Exit code for a library error.
pub fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Hypothesis(_) | Error::KTooSmall { .. } | Error::Degenerate(_) => EXIT_HYPOTHESIS,
        Error::BudgetExceeded { .. } | Error::MemoryBudget { .. } | Error::Overflow(_) | Error::Indeterminate { .. } => {
            EXIT_RESOURCE
        }
        _ => EXIT_USAGE,
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

pub fn run(cmd: &Cmd, g: &Global) -> Result<Outcome, Error> {
    match cmd {
        Cmd::Table { kmin, kmax, r_policy } => table(*kmin, *kmax, *r_policy, g),
        Cmd::Certify { k, s } => certify(*k, *s, g),
        Cmd::Count { k, s, x, strategy, oracle, cache, census_csv } => {
            count(*s, *k, *x, strategy, *oracle, cache.as_ref(), census_csv.as_ref(), g)
        }
        Cmd::Congruence { p, k, m, a, b } => congruence(*p, *k, *m, *a, *b),
        Cmd::Recurrence { k, r, s, big_r, refined } => recurrence(*k, *r, *s, *big_r, *refined),
        Cmd::Waring { k } => waring(*k, g),
        Cmd::Tarry { k } => tarry(*k, g),
        Cmd::AuditAll { full } => audit_all(if *full { Scale::Full } else { Scale::Quick }, g),
    }
}

fn table(kmin: u64, kmax: u64, policy: Policy, g: &Global) -> Result<Outcome, Error> {
    if kmin < 4 || kmin > kmax {
        return Err(Error::Precondition(format!("need 4 <= kmin <= kmax, got {kmin}..{kmax}")));
    }
    let cfg = g.gate();
    let rows: Vec<Value> = match policy {
        Policy::R0 => table1(kmin..=kmax, &cfg).iter().map(to_value).collect(),
        Policy::Unrestricted => (kmin..=kmax)
            .map(|k| {
                let bb = best_bound(k, RPolicy::Unrestricted, &cfg);
                json!({
                    "k": k,
                    "d_computed": bb.best.s_total,
                    "theorem": bb.best.theorem,
                    "r_star": bb.best.r,
                    "s_star": bb.best.s,
                    "note": bb.best.note,
                })
            })
            .collect(),
    };
    let discrepancy = rows.iter().any(|r| r["verdict"] == to_value(&TableVerdict::Discrepancy));
    let mut o = Outcome::new(json!({ "rows": rows }));
    o.class("rows.d_computed", Class::Exact).class("rows.d_table", Class::Exact);
    o.exit = if discrepancy { EXIT_VIOLATION } else { EXIT_OK };
    Ok(o)
}

fn certify(k: u64, s: u64, g: &Global) -> Result<Outcome, Error> {
    if k < 4 {
        return Err(Error::KTooSmall { k, min: 4 });
    }
    let bb = best_bound(k, RPolicy::UpToR0, &g.gate());
    let covering: Vec<&_> = bb.candidates.iter().filter(|c| c.is_admissible() && c.s_total.is_some_and(|t| t >= s)).collect();
    let covered = !covering.is_empty();
    // Report the smallest covering range, else the best one available.
    let cert = covering.iter().min_by_key(|c| c.s_total).copied().unwrap_or(&bb.best);
    let mut o = Outcome::new(json!({
        "k": k,
        "s": s,
        "covered": covered,
        "best_s_total": bb.best.s_total,
        "certificate": cert,
    }));
    o.class("best_s_total", Class::Exact).class("certificate.theta_plus", Class::Interval);
    o.exit = if covered { EXIT_OK } else { EXIT_HYPOTHESIS };
    Ok(o)
}

#[allow(clippy::too_many_arguments)]
fn count(
    s: u32,
    k: u32,
    x: u64,
    strategy: &str,
    oracle: bool,
    cache: Option<&PathBuf>,
    census_csv: Option<&PathBuf>,
    g: &Global,
) -> Result<Outcome, Error> {
    let strategy: Strategy = strategy.parse()?;
    let mut cache_state = Value::Null;
    let j = if cache.is_some() || census_csv.is_some() {
        if strategy != Strategy::Convolve {
            return Err(Error::Precondition("--cache and --census-csv need the convolve strategy".into()));
        }
        let census = match cache {
            Some(path) if path.exists() => {
                let c = ProfileCensus::read_binary(BufReader::new(File::open(path)?))?;
                if (c.s, c.k, c.x) != (s, k, x) {
                    return Err(Error::Format(format!(
                        "cache holds (s, k, X) = ({}, {}, {}), wanted ({s}, {k}, {x})",
                        c.s, c.k, c.x
                    )));
                }
                cache_state = json!("hit");
                c
            }
            _ => {
                let c = mv::census_with_budget(s, k, x, g.memory_budget)?;
                if let Some(path) = cache {
                    c.write_binary(BufWriter::new(File::create(path)?))?;
                    cache_state = json!("written");
                }
                c
            }
        };
        if let Some(path) = census_csv {
            census.write_csv(BufWriter::new(File::create(path)?))?;
        }
        census.sum_of_squares()
    } else {
        mv::j_with(s, k, x, strategy, g.memory_budget)?
    };
    let diag = mv::diagonal_bounds(s, k, x, &j);
    let oracle_j = if oracle { Some(mv::j_oracle(s, k, x)?) } else { None };
    let agrees = oracle_j.as_ref().map(|o| *o == j);
    let mut o = Outcome::new(json!({
        "s": s,
        "k": k,
        "x": x,
        "strategy": strategy,
        "j": j.to_string(),
        "diagonal": diag,
        "oracle": oracle_j.map(|b: BigInt| b.to_string()),
        "oracle_agrees": agrees,
        "cache": cache_state,
    }));
    o.class("j", Class::Exact).class("diagonal", Class::Exact).class("diagonal.ratio", Class::Diagnostic);
    o.exit = if !diag.holds || agrees == Some(false) { EXIT_VIOLATION } else { EXIT_OK };
    Ok(o)
}

fn congruence(p: u64, k: u32, m: u32, a: u32, b: u32) -> Result<Outcome, Error> {
    let r = lemma31_audit(p, k, m, a, b)?;
    let exit = if !r.in_hypothesis {
        EXIT_HYPOTHESIS
    } else if !(r.within_bound && r.monotone) {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    };
    let mut o = Outcome::new(to_value(&r));
    o.class("max_count", Class::Exact).class("bound", Class::Exact).class("histogram", Class::Exact);
    o.exit = exit;
    Ok(o)
}

fn recurrence(k: u64, r: u64, s: u64, big_r: u32, refined: bool) -> Result<Outcome, Error> {
    let t = bn_table(k, r, s, big_r)?;
    let mvr = min_valid_r(k, r, s, big_r)?;
    let refined_report = if refined { Some(s0_section11(k, s, big_r)?) } else { None };
    let mut exit = if t.closed_form_agrees == Some(false) { EXIT_VIOLATION } else { EXIT_OK };
    if let Some(rep) = &refined_report {
        if !rep.k_m_bounds_hold || rep.closed_form_consistent == Some(false) {
            exit = EXIT_VIOLATION;
        }
    }
    let mut o = Outcome::new(json!({
        "table": t,
        "min_valid_r": mvr,
        "refined": refined_report,
    }));
    o.class("table.rows", Class::Exact)
        .class("table.theta", Class::Exact)
        .class("refined.s0", Class::Interval)
        .class("refined.closed_form", Class::Interval);
    o.exit = exit;
    Ok(o)
}

fn waring(k: u64, g: &Global) -> Result<Outcome, Error> {
    let cfg = g.gate();
    let defect = app::critical_defect(k, &cfg)?;
    let u1 = app::u1(k, &cfg)?;
    let consts = app::xi_and_c(g.precision.max(64))?;
    let lead = app::u1_leading(&consts.xi)?;
    let mut o = Outcome::new(json!({
        "k": k,
        "critical_defect": defect,
        "defect_ceiling": app::defect_ceiling(k, g.precision),
        "u1": u1,
        "w_over_k": format!("{:.6}", u1.w as f64 / k as f64),
        "constants": consts,
        "leading_coefficient": lead,
    }));
    o.class("critical_defect", Class::Exact)
        .class("defect_ceiling", Class::Interval)
        .class("u1", Class::Exact)
        .class("w_over_k", Class::Diagnostic)
        .class("constants", Class::Interval)
        .class("leading_coefficient", Class::Interval);
    Ok(o)
}

fn tarry(k: u64, g: &Global) -> Result<Outcome, Error> {
    let t = app::tarry_bound(k, &g.gate())?;
    let exit = if t.holds { EXIT_OK } else { EXIT_HYPOTHESIS };
    let mut o = Outcome::new(to_value(&t));
    o.class("s", Class::Exact).class("bound", Class::Exact).class("rhs", Class::Interval).class("margin", Class::Interval);
    o.exit = exit;
    Ok(o)
}

fn audit_all(scale: Scale, g: &Global) -> Result<Outcome, Error> {
    let results = audit::run_all(scale, &g.gate());
    let pass = results.iter().all(|c| c.pass);
    let mut o = Outcome::new(json!({ "rows": results }));
    o.timings = results.iter().map(|c| (c.name.to_string(), c.elapsed.as_secs_f64())).collect();
    o.class("rows", Class::Exact);
    o.exit = if pass { EXIT_OK } else { EXIT_VIOLATION };
    Ok(o)
}
