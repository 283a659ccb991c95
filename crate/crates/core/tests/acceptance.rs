//! Acceptance suite. Runs as a plain binary and prints one line per
//! criterion; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dcoal::cdi::{classify_cdi, dust_laplace_exponent, fixation_bound};
use dcoal::coalescent::{
    fixation_statistics, martingale_residual, simulate_poissonian, simulate_simple_poissonian,
    simulate_with_table, RateTable,
};
use dcoal::flows::{compose_check, duality_check, gfvi_martingale_residual, AtomicProbabilityMeasure, TestFunction};
use dcoal::measures::{lambda_rate, r_rate};
use dcoal::paintbox::sample_paintbox;
use dcoal::rng::{family_stream, stream};
use dcoal::stats::{chi_square_homogeneity, total_variation, EmpiricalLaw, Estimate};
use dcoal::{
    BoundedMeasure, CdiConfig, DistinguishedMassPartition, DistinguishedPartition,
    GeneralCoagulationSpec, Horizon, MParams, Verdict,
};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn m(s: &str) -> BoundedMeasure {
    s.parse().unwrap()
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

/// `B(a+p, c+q) / B(a, c)` as a finite product.
fn beta_ratio(a: f64, c: f64, p: usize, q: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..p {
        v *= (a + i as f64) / (a + c + i as f64);
    }
    for j in 0..q {
        v *= (c + j as f64) / (a + c + (p + j) as f64);
    }
    v
}

/// `∫ x^p (1−x)^q μ(dx)` for one component described by hand.
enum Oracle {
    AtZero(f64),
    Atom(f64, f64),
    Beta(f64, f64, f64),
}

impl Oracle {
    fn moment(&self, p: usize, q: usize) -> f64 {
        match *self {
            Oracle::AtZero(w) => if p == 0 { w } else { 0.0 },
            Oracle::Atom(x, w) => w * x.powi(p as i32) * (1.0 - x).powi(q as i32),
            Oracle::Beta(a, c, w) => w * beta_ratio(a, c, p, q),
        }
    }
}

fn rate_exactness() -> Outcome {
    let start = Instant::now();
    let cases = [
        ("dirac0:1", Oracle::AtZero(1.0)),
        ("dirac:0.3:2", Oracle::Atom(0.3, 2.0)),
        ("dirac:1:0.5", Oracle::Atom(1.0, 0.5)),
        ("uniform:1", Oracle::Beta(1.0, 1.0, 1.0)),
        ("beta:0.5:1.5:1", Oracle::Beta(0.5, 1.5, 1.0)),
        ("beta:1.5:0.5:1", Oracle::Beta(1.5, 0.5, 1.0)),
        ("beta:2:3:0.7", Oracle::Beta(2.0, 3.0, 0.7)),
    ];
    let mut worst = 0.0f64;
    for (text, oracle) in &cases {
        let lambda = m(text);
        for b in 1..=100 {
            for k in 1..=b {
                let r = r_rate(b, k, &lambda).unwrap();
                let want = oracle.moment(k - 1, b - k);
                worst = worst.max((r - want).abs() / want.abs().max(1.0));
                if k >= 2 {
                    let l = lambda_rate(b, k, &lambda).unwrap();
                    let want = oracle.moment(k - 2, b - k);
                    worst = worst.max((l - want).abs() / want.abs().max(1.0));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-10 && elapsed < Duration::from_secs(1),
        detail: format!("max error {worst:.1e} (tol 1e-10) over b <= 100, {} (limit 1s)", secs(elapsed)),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn phi2_identity() -> Outcome {
    let families = [
        "dirac0:1",
        "dirac:0.4:1.5",
        "dirac:1:1",
        "uniform:2",
        "beta:0.5:1.5:1",
        "beta:3:0.7:1",
        "pwc:0,1,0.5,2,1",
        "dirac0:0.5+uniform:1+dirac:0.2:0.3",
    ];
    let mut worst = 0.0f64;
    for text in families {
        let lambda0 = m(text);
        let mass = lambda0.total_mass();
        for n in 1..=50 {
            let mut sum = 0.0;
            for k in 2..=n + 1 {
                sum += (k - 1) as f64 * binomial(n, k - 1) * r_rate(n, k - 1, &lambda0).unwrap();
            }
            let want = mass * n as f64;
            worst = worst.max((sum - want).abs() / want);
        }
    }
    Outcome {
        pass: worst <= 1e-8,
        detail: format!("max relative error {worst:.1e} (tol 1e-8) over n <= 50, {} families", families.len()),
    }
}

fn cdi_classification() -> Outcome {
    let start = Instant::now();
    let cases = [
        ("dirac0:1", Verdict::ComesDown),
        ("uniform:1", Verdict::DoesNotComeDown),
        ("beta:0.5:1.5:1", Verdict::ComesDown),
        ("beta:1.5:0.5:1", Verdict::DoesNotComeDown),
    ];
    let config = CdiConfig::default();
    let mut wrong = Vec::new();
    for (l1, expected) in cases {
        for l0 in ["0", "dirac0:1", "uniform:1"] {
            let v = classify_cdi(&MParams::new(m(l0), m(l1)), &config).unwrap();
            if v.verdict != expected {
                wrong.push(format!("{l1} with Λ₀={l0}: {:?}", v.verdict));
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: wrong.is_empty() && elapsed < Duration::from_secs(30),
        detail: format!("{}/12 verdicts correct, {} (limit 30s){}", 12 - wrong.len(), secs(elapsed),
            if wrong.is_empty() { String::new() } else { format!("; wrong: {}", wrong.join(", ")) }),
    }
}

fn fixation() -> Outcome {
    let start = Instant::now();
    let params = MParams::kingman(1.0, 1.0).unwrap();
    // φ(n) = n(n−1)/2 + n = n(n+1)/2, and Σ 2/(n(n+1)) telescopes to 2.
    let reference = 2.0;
    let bound = fixation_bound(&params, 1_000).unwrap().bound.unwrap();
    let est = fixation_statistics(&params, &DistinguishedPartition::singletons(50), 10_000, 7).unwrap();
    let elapsed = start.elapsed();
    Outcome {
        pass: est.mean <= reference + 3.0 * est.se
            && est.mean >= 0.5
            && (bound - reference).abs() < 1e-6
            && elapsed < Duration::from_secs(60),
        detail: format!(
            "E[ζ] = {:.4} ± {:.4} (need <= 2 + 3SE and >= 0.5), computed bound {bound:.8}, {} (limit 60s)",
            est.mean, est.se, secs(elapsed)
        ),
    }
}

fn paintbox_laws() -> Outcome {
    // δ = 1 − 0.2 − 0.3 = 0.5. Singletons are read off π|[N] with N = 100,
    // where a tail label taken by one index only has probability ~1e-15.
    let s: DistinguishedMassPartition = "0.2;0.3".parse().unwrap();
    let samples = 100_000u64;
    let hits = (0..samples)
        .filter(|&i| {
            let pi = sample_paintbox(&s, 100, &mut stream(41, i));
            let labels = pi.labels();
            let sizes: Vec<usize> = pi.blocks().iter().map(Vec::len).collect();
            (1..=3).all(|e| labels[e] != 0 && sizes[labels[e]] == 1)
        })
        .count() as f64;
    let p = hits / samples as f64;
    let se = (0.125 * 0.875 / samples as f64).sqrt();
    let ok_singletons = (p - 0.125).abs() <= 3.0 * se;

    let n = 100_000usize;
    let freq = sample_paintbox(&s, n, &mut stream(42, 0)).empirical_frequencies().unwrap()[0];
    let se0 = (0.2 * 0.8 / n as f64).sqrt();
    let ok_freq = (freq - 0.2).abs() <= 3.0 * se0;
    Outcome {
        pass: ok_singletons && ok_freq,
        detail: format!(
            "P[1,2,3 singletons] = {p:.4} (0.125 ± {:.4}), block-0 frequency {freq:.4} (0.2 ± {:.4})",
            3.0 * se,
            3.0 * se0
        ),
    }
}

fn simulator_cross_validation() -> Outcome {
    let params = MParams::new(m("dirac:0.6:1"), m("dirac:0.5:1"));
    let spec = GeneralCoagulationSpec::new(
        0.0,
        0.0,
        vec![
            (DistinguishedMassPartition::new(0.6, vec![]).unwrap(), 1.0 / 0.6),
            (DistinguishedMassPartition::new(0.0, vec![0.5]).unwrap(), 1.0 / 0.25),
        ],
    )
    .unwrap();
    let start = DistinguishedPartition::singletons(4);
    let table = RateTable::new(&params, 4).unwrap();
    let replicas = 100_000u64;
    let horizon = Horizon::Time(1.0);
    let law = |family: u64, run: &dyn Fn(&mut dcoal::rng::SimRng) -> DistinguishedPartition| {
        (0..replicas).map(|i| run(&mut family_stream(6, family, i))).collect::<EmpiricalLaw<_>>()
    };
    let gillespie = law(0, &|rng| simulate_with_table(&table, &start, horizon, rng).unwrap().current().clone());
    let mixture = law(1, &|rng| simulate_poissonian(&spec, &start, horizon, rng).unwrap().current().clone());
    let coins = law(2, &|rng| simulate_simple_poissonian(&params, &start, horizon, rng).unwrap().current().clone());
    let a = chi_square_homogeneity(&gillespie, &mixture);
    let b = chi_square_homogeneity(&gillespie, &coins);
    Outcome {
        pass: a.p_value > 0.01 && b.p_value > 0.01,
        detail: format!(
            "chi-square p = {:.3} (paint-box mixture), {:.3} (coin flips), need > 0.01; {} states",
            a.p_value,
            b.p_value,
            gillespie.counts().len()
        ),
    }
}

/// Exact law of `Coag(π, π′)` by enumerating each index's category in
/// `(block 0, tail atom, dust)` for both paint-boxes.
fn composed_law_oracle(b1: (f64, f64), b2: (f64, f64), n: usize) -> BTreeMap<DistinguishedPartition, f64> {
    fn probs((y, x): (f64, f64)) -> [f64; 3] {
        [y, x, 1.0 - x - y]
    }
    // An index with category c draws label: 0 for block 0, 1 for the atom,
    // a fresh label for dust.
    fn paint(cats: &[usize]) -> Vec<usize> {
        let mut labels = vec![0];
        for (i, &c) in cats.iter().enumerate() {
            labels.push(match c {
                0 => 0,
                1 => 1,
                _ => 2 + i,
            });
        }
        labels
    }
    fn assignments(len: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out.into_iter().flat_map(|v| (0..3).map(move |c| [v.clone(), vec![c]].concat())).collect();
        }
        out
    }
    let (p1, p2) = (probs(b1), probs(b2));
    let mut law = BTreeMap::new();
    for outer in assignments(n) {
        let w1: f64 = outer.iter().map(|&c| p1[c]).product();
        if w1 == 0.0 {
            continue;
        }
        let labels = paint(&outer);
        let pi = DistinguishedPartition::from_labels(&labels).unwrap();
        let blocks = pi.non_distinguished_count();
        let block_of = pi.labels();
        for inner in assignments(blocks) {
            let w2: f64 = inner.iter().map(|&c| p2[c]).product();
            if w2 == 0.0 {
                continue;
            }
            let glued = paint(&inner);
            let final_labels: Vec<usize> = block_of.iter().map(|&blk| glued[blk]).collect();
            let c = DistinguishedPartition::from_labels(&final_labels).unwrap();
            *law.entry(c).or_insert(0.0) += w1 * w2;
        }
    }
    law
}

fn bridge_composition() -> Outcome {
    let grid = [(0.0, 0.5), (0.5, 0.0), (0.2, 0.3), (0.3, 0.6)];
    let mut worst = 0.0f64;
    let mut runs = 0;
    for n in [2, 3] {
        for &b1 in &grid {
            for &b2 in &grid {
                let r = compose_check(b1, b2, n, 100_000, 70 + runs).unwrap();
                let oracle = composed_law_oracle(b1, b2, n);
                worst = worst
                    .max(r.tv_composite_coagulated)
                    .max(total_variation(&r.composite, &oracle))
                    .max(total_variation(&r.coagulated, &oracle))
                    .max(total_variation(&r.exact, &oracle));
                runs += 1;
            }
        }
    }
    Outcome {
        pass: worst <= 0.02,
        detail: format!("max TV {worst:.4} (tol 0.02) over {runs} (y, x) pairs at n in {{2, 3}}"),
    }
}

fn duality() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut checks = 0;
    for (l0, l1) in [("dirac:1:1", "0"), ("dirac:0.6:1", "dirac:0.5:1")] {
        let params = MParams::new(m(l0), m(l1));
        for p in [1, 2] {
            let f = TestFunction::by_name(if p == 1 { "x1" } else { "product" }, p).unwrap();
            for t in [0.25, 1.0] {
                let r = duality_check(&params, &f, t, 100_000, 80 + checks).unwrap();
                worst = worst.max(r.z_score);
                checks += 1;
            }
        }
    }
    // Λ₀ = δ₁, Λ₁ = 0, f = id: index 1 is absorbed at rate 1, and Φ is ½
    // until then.
    let target = (-1.0f64).exp() / 2.0;
    let params = MParams::new(m("dirac:1:1"), BoundedMeasure::zero());
    let r = duality_check(&params, &TestFunction::first(1).unwrap(), 1.0, 100_000, 99).unwrap();
    let (zl, zr) = (r.lhs.z_against(target), r.rhs.z_against(target));
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 3.0 && zl <= 3.0 && zr <= 3.0 && elapsed < Duration::from_secs(120),
        detail: format!(
            "max grid z = {worst:.2} over {checks} cases; analytic case lhs {:.4}, rhs {:.4} vs {target:.4} (z = {zl:.2}, {zr:.2}); {} (limit 120s)",
            r.lhs.mean, r.rhs.mean, secs(elapsed)
        ),
    }
}

fn falling(x: usize, q: usize) -> f64 {
    (0..q).map(|i| x.saturating_sub(i) as f64).product()
}

fn dust_subordinator() -> Outcome {
    let s: DistinguishedMassPartition = "0.2;0.3".parse().unwrap();
    let spec = GeneralCoagulationSpec::new(0.0, 0.0, vec![(s.clone(), 1.0)]).unwrap();
    let n = 400;
    let start = DistinguishedPartition::singletons(n);
    let mut details = Vec::new();
    let mut pass = true;
    for (t, q) in [(0.5, 1usize), (1.0, 2usize)] {
        // One paint-box event keeps a dust fraction 0.5, so φ⁰(q) = 1 − 0.5^q.
        let oracle_exponent = 1.0 - 0.5f64.powi(q as i32);
        let lib_exponent = dust_laplace_exponent(q as f64, 0.0, &[(s.clone(), 1.0)]).unwrap();
        let target = (-t * oracle_exponent).exp();
        // An unbiased estimate of the chance that q distinct indices are all
        // singletons.
        let samples: Vec<f64> = (0..20_000u64)
            .map(|i| {
                let traj = simulate_poissonian(&spec, &start, Horizon::Time(t), &mut stream(90 + q as u64, i)).unwrap();
                falling(traj.current().singleton_count(), q) / falling(n, q)
            })
            .collect();
        let est = Estimate::from_samples(&samples);
        let z = est.z_against(target);
        pass &= z <= 3.0 && (lib_exponent - oracle_exponent).abs() < 1e-14;
        details.push(format!("(t={t}, q={q}): {:.4} ± {:.4} vs {target:.4}, z = {z:.2}", est.mean, est.se));
    }
    let phi_one = dust_laplace_exponent(1.0, 0.0, &[(s, 1.0)]).unwrap();
    pass &= (phi_one - 0.5).abs() < 1e-14;
    Outcome { pass, detail: format!("{}; φ⁰(1) = {phi_one}", details.join("; ")) }
}

fn martingales() -> Outcome {
    let start = Instant::now();
    let params = MParams::new(m("dirac0:0.5+beta:2:3:1"), m("dirac0:1+uniform:0.5"));
    let f = |pi: &DistinguishedPartition| {
        (pi.non_distinguished_count() as f64).powi(2) + pi.distinguished().len() as f64
    };
    let coal = martingale_residual(&params, &DistinguishedPartition::singletons(3), f, 0.5, 100_000, 101).unwrap();

    let (nu0, nu1) = (m("beta:1:2:1.5"), m("dirac:0.5:2+beta:2:2:1"));
    let prod = TestFunction::product(2).unwrap();
    let gfvi = gfvi_martingale_residual(&nu0, &nu1, &prod, &AtomicProbabilityMeasure::lebesgue(), 0.5, 40_000, 102)
        .unwrap();
    let (zc, zg) = (coal.z_against(0.0), gfvi.z_against(0.0));
    Outcome {
        pass: zc <= 3.0 && zg <= 3.0,
        detail: format!(
            "coalescent residual {:.2e} ± {:.1e} (z = {zc:.2}), GFVI residual {:.2e} ± {:.1e} (z = {zg:.2}); {}",
            coal.mean, coal.se, gfvi.mean, gfvi.se, secs(start.elapsed())
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("rate exactness", rate_exactness),
        ("phi2 identity", phi2_identity),
        ("CDI classification", cdi_classification),
        ("fixation bound", fixation),
        ("paint-box laws", paintbox_laws),
        ("simulator cross-validation", simulator_cross_validation),
        ("bridge/coagulation equivalence", bridge_composition),
        ("duality", duality),
        ("dust subordinator", dust_subordinator),
        ("generator/martingale checks", martingales),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        if !outcome.pass {
            failures += 1;
        }
        println!("{} criterion {}: {name}: {}", if outcome.pass { "PASS" } else { "FAIL" }, i + 1, outcome.detail);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
