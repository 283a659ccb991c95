use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use dcoal::cdi::{classify_cdi, fixation_bound, DEFAULT_DEPTH, DEFAULT_QMAX, DEFAULT_WINDOWS};
use dcoal::coalescent::{fixation_times, simulate_simple_poissonian, simulate_with_table, RateTable};
use dcoal::flows::{compose_check, duality_check, simulate_gfvi};
use dcoal::rng::stream;
use dcoal::stats::Estimate;
use dcoal::{
    AtomicProbabilityMeasure, CdiConfig, CoalescentTrajectory, DistinguishedPartition, Horizon,
    TestFunction,
};

use crate::args::{Format, MeasureArgs, OutputArgs};

fn emit(out: &OutputArgs, config: Value, body: Value, csv: impl FnOnce() -> String) -> Result<()> {
    let text = match out.format {
        Format::Json => {
            let mut doc = json!({ "config": config });
            if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
                doc.extend(body);
            }
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => csv(),
    };
    match &out.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn config(subcommand: &str, measures: Option<&MeasureArgs>, out: &OutputArgs, fields: Value) -> Value {
    let mut c = json!({ "subcommand": subcommand });
    if let Some(m) = measures {
        c["measures"] = m.describe();
    }
    if let (Value::Object(c), Value::Object(fields)) = (&mut c, fields) {
        c.extend(fields);
    }
    c["format"] = json!(out.format);
    c["out"] = json!(out.out.as_ref().map(|p| p.display().to_string()));
    c
}

/// Empty for non-finite values, which CSV has no spelling for.
fn cell(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        String::new()
    }
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    measures: MeasureArgs,
    /// Number of blocks b.
    #[arg(long)]
    b: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Serialize)]
struct RateRow {
    k: usize,
    lambda: Option<f64>,
    r: f64,
}

pub fn rates(a: RatesArgs) -> Result<()> {
    if a.b == 0 {
        bail!(dcoal::Error::Parse("--b must be at least 1".into()));
    }
    let params = a.measures.params()?;
    let rows = (1..=a.b)
        .map(|k| {
            Ok(RateRow {
                k,
                lambda: if k >= 2 { Some(params.lambda_rate(a.b, k)?) } else { None },
                r: params.r_rate(a.b, k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cfg = config("rates", Some(&a.measures), &a.output, json!({ "b": a.b }));
    emit(&a.output, cfg, json!({ "b": a.b, "rates": rows }), || {
        let mut s = String::from("b,k,lambda,r\n");
        for row in &rows {
            let lambda = row.lambda.map(cell).unwrap_or_default();
            let _ = writeln!(s, "{},{},{lambda},{}", a.b, row.k, cell(row.r));
        }
        s
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact jump chain from the rates λ_{b,k}, r_{b,k}.
    Gillespie,
    /// Coin flips driven by finite ν₀, ν₁.
    CoinFlip,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    measures: MeasureArgs,
    /// Ground size: starts from the singletons of {0,…,n}.
    #[arg(long)]
    n: usize,
    /// Time horizon; runs to absorption when omitted.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, default_value_t = 1)]
    replicas: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Method::Gillespie)]
    method: Method,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let params = a.measures.params()?;
    let horizon = a.t.map_or(Horizon::Absorption, Horizon::Time);
    let start = DistinguishedPartition::singletons(a.n);
    let table = match a.method {
        Method::Gillespie => Some(RateTable::new(&params, a.n)?),
        Method::CoinFlip => None,
    };
    let trajectories = (0..a.replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(a.seed, i as u64);
            Ok(match &table {
                Some(table) => simulate_with_table(table, &start, horizon, &mut rng)?,
                None => simulate_simple_poissonian(&params, &start, horizon, &mut rng)?,
            })
        })
        .collect::<Result<Vec<CoalescentTrajectory>>>()?;
    let cfg = config(
        "simulate",
        Some(&a.measures),
        &a.output,
        json!({ "n": a.n, "t": a.t, "replicas": a.replicas, "seed": a.seed, "method": a.method }),
    );
    let records: Vec<_> = trajectories.iter().map(|t| t.to_record(a.seed)).collect();
    emit(&a.output, cfg, json!({ "trajectories": records }), || {
        if let [single] = trajectories.as_slice() {
            return single.block_count_csv();
        }
        let mut s = String::from("replica,t,count\n");
        for (i, traj) in trajectories.iter().enumerate() {
            for (t, count) in traj.block_count_path() {
                let _ = writeln!(s, "{i},{t},{count}");
            }
        }
        s
    })
}

#[derive(Debug, Args)]
pub struct CdiCheckArgs {
    #[command(flatten)]
    measures: MeasureArgs,
    /// Depth N of the partial sums of 1/φ₁(n).
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    /// Upper limit Q of the ∫dq/ψ(q) integral.
    #[arg(long, default_value_t = DEFAULT_QMAX)]
    qmax: f64,
    /// Maximal number of dyadic windows.
    #[arg(long, default_value_t = DEFAULT_WINDOWS)]
    windows: usize,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn cdi_check(a: CdiCheckArgs) -> Result<()> {
    let params = a.measures.params()?;
    let cdi = CdiConfig { depth: a.depth, qmax: a.qmax, windows: a.windows };
    let verdict = classify_cdi(&params, &cdi)?;
    let cfg = config("cdi-check", Some(&a.measures), &a.output, json!({ "cdi": cdi }));
    let body = json!({ "verdict": verdict.verdict, "evidence": verdict.evidence });
    emit(&a.output, cfg, body, || {
        let e = &verdict.evidence;
        let mut s = String::from("window,q_lo,q_hi,increment,ratio,raabe\n");
        for (j, inc) in e.window_increments.iter().enumerate() {
            let lo = (j as f64).exp2();
            let (ratio, raabe) = match j.checked_sub(1) {
                Some(i) => (cell(e.window_ratios[i]), cell(e.raabe[i])),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(s, "{j},{lo},{},{},{ratio},{raabe}", 2.0 * lo, cell(*inc));
        }
        s
    })
}

#[derive(Debug, Args)]
pub struct FixationArgs {
    #[command(flatten)]
    measures: MeasureArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    replicas: usize,
    #[arg(long)]
    seed: u64,
    /// Depth of the partial sum in the bound Σ 1/φ(n).
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn fixation(a: FixationArgs) -> Result<()> {
    let params = a.measures.params()?;
    let bound = fixation_bound(&params, a.depth)?;
    let times = fixation_times(&params, &DistinguishedPartition::singletons(a.n), a.replicas, a.seed)?;
    let mc = Estimate::from_samples(&times);
    let cfg = config(
        "fixation",
        Some(&a.measures),
        &a.output,
        json!({ "n": a.n, "replicas": a.replicas, "seed": a.seed, "depth": a.depth }),
    );
    let body = json!({
        "bound": bound,
        "mc": mc,
        "mean_le_bound": bound.bound.map(|b| mc.mean <= b),
    });
    emit(&a.output, cfg, body, || {
        let mut s = String::from("replica,zeta\n");
        for (i, z) in times.iter().enumerate() {
            let _ = writeln!(s, "{i},{z}");
        }
        s
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Start {
    /// Lebesgue measure on [0,1].
    Lebesgue,
    /// All mass at 0.
    Dirac0,
}

#[derive(Debug, Args)]
pub struct GfviArgs {
    #[command(flatten)]
    measures: MeasureArgs,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    seed: u64,
    /// Number of equally spaced sample times in [0, t], endpoints included.
    #[arg(long, default_value_t = 11)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Start::Lebesgue)]
    z0: Start,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn gfvi(a: GfviArgs) -> Result<()> {
    let (nu0, nu1) = a.measures.intensities()?;
    if !(a.t >= 0.0 && a.t.is_finite()) {
        bail!(dcoal::Error::Parse(format!("--t {} must be finite and >= 0", a.t)));
    }
    let times: Vec<f64> = match a.samples {
        0 => vec![],
        1 => vec![a.t],
        k => (0..k).map(|i| a.t * i as f64 / (k - 1) as f64).collect(),
    };
    let z0 = match a.z0 {
        Start::Lebesgue => AtomicProbabilityMeasure::lebesgue(),
        Start::Dirac0 => AtomicProbabilityMeasure::dirac_at_zero(),
    };
    let traj = simulate_gfvi(&nu0, &nu1, &z0, a.t, &times, &mut stream(a.seed, 0))?;
    let cfg = config(
        "gfvi",
        Some(&a.measures),
        &a.output,
        json!({
            "t": a.t, "seed": a.seed, "samples": a.samples, "z0": a.z0,
            "nu0": nu0.to_string(), "nu1": nu1.to_string(),
        }),
    );
    emit(&a.output, cfg, serde_json::to_value(&traj)?, || {
        let mut s = String::from("t,w0,lebesgue,atoms,mean\n");
        for sample in &traj.states {
            let z = &sample.state;
            let _ = writeln!(s, "{},{},{},{},{}", sample.t, z.w0, z.lebesgue, z.atoms.len(), z.mean());
        }
        s
    })
}

#[derive(Debug, Args)]
pub struct DualityArgs {
    #[command(flatten)]
    measures: MeasureArgs,
    /// Arity of the test function.
    #[arg(long, default_value_t = 2)]
    p: usize,
    /// Test function: one, x1, product or sum.
    #[arg(long, default_value = "product")]
    f: String,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    replicas: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn duality(a: DualityArgs) -> Result<()> {
    let params = a.measures.params()?;
    let f = TestFunction::by_name(&a.f, a.p).map_err(|e| dcoal::Error::Parse(e.to_string()))?;
    let report = duality_check(&params, &f, a.t, a.replicas, a.seed)?;
    let cfg = config(
        "duality",
        Some(&a.measures),
        &a.output,
        json!({ "p": a.p, "f": a.f, "t": a.t, "replicas": a.replicas, "seed": a.seed }),
    );
    emit(&a.output, cfg, json!({ "report": report }), || {
        format!(
            "p,f,t,replicas,seed,lhs,lhs_se,rhs,rhs_se,z_score\n{},{},{},{},{},{},{},{},{},{}\n",
            report.p,
            report.test_function,
            report.t,
            report.replicas,
            report.seed,
            report.lhs.mean,
            report.lhs.se,
            report.rhs.mean,
            report.rhs.se,
            cell(report.z_score)
        )
    })
}

fn bridge_params(s: &str) -> Result<(f64, f64), String> {
    let (y, x) = s.split_once(',').ok_or_else(|| format!("expected y,x, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"));
    Ok((num(y)?, num(x)?))
}

#[derive(Debug, Args)]
pub struct BridgeTestArgs {
    /// First (earlier) bridge as y,x.
    #[arg(long, value_parser = bridge_params)]
    b1: (f64, f64),
    /// Second bridge as y,x.
    #[arg(long, value_parser = bridge_params)]
    b2: (f64, f64),
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long)]
    replicas: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn bridge_test(a: BridgeTestArgs) -> Result<()> {
    let report = compose_check(a.b1, a.b2, a.n, a.replicas, a.seed)?;
    let cfg = config(
        "bridge-test",
        None,
        &a.output,
        json!({ "b1": a.b1, "b2": a.b2, "n": a.n, "replicas": a.replicas, "seed": a.seed }),
    );
    emit(&a.output, cfg, json!({ "report": report }), || {
        let mut s = String::from("partition,composite,coagulated,exact\n");
        let mut keys: Vec<_> = report.exact.keys().chain(report.composite.keys()).chain(report.coagulated.keys()).collect();
        keys.sort();
        keys.dedup();
        let get = |m: &std::collections::BTreeMap<DistinguishedPartition, f64>, k| m.get(k).copied().unwrap_or(0.0);
        for k in keys {
            let _ = writeln!(
                s,
                "\"{k}\",{},{},{}",
                get(&report.composite, k),
                get(&report.coagulated, k),
                get(&report.exact, k)
            );
        }
        s
    })
}
