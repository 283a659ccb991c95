use dcoal::paintbox::{exact_law, sample_paintbox, sample_paintbox_intervals, singleton_probability};
use dcoal::rng::{family_stream, stream};
use dcoal::stats::{chi_square_gof, EmpiricalLaw};
use dcoal::{DistinguishedMassPartition, DistinguishedPartition};

fn s(text: &str) -> DistinguishedMassPartition {
    text.parse().unwrap()
}

#[test]
fn sampler_matches_exact_law_on_three_elements() {
    for text in ["0.3;0.4,0.2", "0;0.5", "0.6;", "0.2;0.3"] {
        let mass = s(text);
        let law = exact_law(&mass, 3);
        assert!((law.values().sum::<f64>() - 1.0).abs() < 1e-12);
        let categorical: EmpiricalLaw<DistinguishedPartition> =
            (0..100_000).map(|i| sample_paintbox(&mass, 3, &mut family_stream(4, 0, i))).collect();
        let intervals: EmpiricalLaw<DistinguishedPartition> = (0..100_000)
            .map(|i| sample_paintbox_intervals(&mass, 3, &mut family_stream(4, 1, i)))
            .collect();
        for sample in [&categorical, &intervals] {
            let test = chi_square_gof(sample, &law, 5.0);
            assert!(test.p_value > 0.001, "{text}: {test:?}");
        }
    }
}

#[test]
fn block_frequencies_converge() {
    let mass = s("0.3;0.4,0.2");
    let n = 100_000;
    let pi = sample_paintbox(&mass, n, &mut stream(17, 0));
    let freqs = pi.empirical_frequencies().unwrap();
    let se = |p: f64| (p * (1.0 - p) / n as f64).sqrt();
    assert!((freqs[0] - 0.3).abs() < 4.0 * se(0.3), "{}", freqs[0]);
    let mut big: Vec<f64> = freqs[1..].iter().copied().filter(|&f| f > 1.0 / n as f64).collect();
    big.sort_by(|a, b| b.total_cmp(a));
    assert_eq!(big.len(), 2);
    assert!((big[0] - 0.4).abs() < 4.0 * se(0.4) && (big[1] - 0.2).abs() < 4.0 * se(0.2));
    let dust = pi.singleton_count() as f64 / n as f64;
    assert!((dust - 0.1).abs() < 4.0 * se(0.1), "{dust}");
}

#[test]
fn dust_free_boxes_have_no_singletons_in_the_limit() {
    let pi = sample_paintbox(&s("0.5;0.5"), 10_000, &mut stream(2, 0));
    assert_eq!(pi.singleton_count(), 0);
    assert_eq!(pi.num_blocks(), 2);
    assert_eq!(singleton_probability(&s("0.5;0.5"), 3), 0.0);
    let all_dust = sample_paintbox(&s("0;"), 50, &mut stream(2, 1));
    assert_eq!(all_dust, DistinguishedPartition::singletons(50));
}
