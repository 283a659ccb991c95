use dcoal::paintbox::{exact_law, sample_paintbox};
use dcoal::partitions::{compatibility_check, enumerate};
use dcoal::rng::family_stream;
use dcoal::stats::{chi_square_homogeneity, EmpiricalLaw};
use dcoal::{DistinguishedMassPartition, DistinguishedPartition, Permutation};
use proptest::prelude::*;

fn partition(max_n: usize) -> impl Strategy<Value = DistinguishedPartition> {
    (0..=max_n)
        .prop_flat_map(|n| prop::collection::vec(0usize..=n, n + 1))
        .prop_map(|labels| DistinguishedPartition::from_labels(&labels).unwrap())
}

/// A partition together with a coagulator on its block indices.
fn coag_pair() -> impl Strategy<Value = (DistinguishedPartition, DistinguishedPartition)> {
    partition(9).prop_flat_map(|pi| {
        let b = pi.num_blocks() - 1;
        prop::collection::vec(0usize..=b, b + 1)
            .prop_map(move |l| (pi.clone(), DistinguishedPartition::from_labels(&l).unwrap()))
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|tail| Permutation::new(std::iter::once(0).chain(tail).collect()).unwrap())
}

proptest! {
    #[test]
    fn text_form_round_trips(pi in partition(12)) {
        let back: DistinguishedPartition = pi.to_string().parse().unwrap();
        prop_assert_eq!(back, pi);
    }

    #[test]
    fn coag_commutes_with_restriction((pi, pi2) in coag_pair(), cut in 0usize..10) {
        let m = cut.min(pi.n());
        let full = pi.coag(&pi2).unwrap().restrict(m).unwrap();
        let small = pi.restrict(m).unwrap();
        // Blocks of π meeting [m] are the first #(π|[m]) blocks of π.
        let small2 = pi2.restrict(small.num_blocks() - 1).unwrap();
        prop_assert_eq!(small.coag(&small2).unwrap(), full.clone());
        prop_assert!(compatibility_check(&full, &pi.coag(&pi2).unwrap()));
    }

    #[test]
    fn coag_is_coarser((pi, pi2) in coag_pair()) {
        let c = pi.coag(&pi2).unwrap();
        let labels = c.labels();
        for block in pi.blocks() {
            prop_assert!(block.iter().all(|&e| labels[e] == labels[block[0]]));
        }
        prop_assert!(c.distinguished().len() >= pi.distinguished().len());
    }

    #[test]
    fn restriction_chains_are_compatible(pi in partition(12), a in 0usize..13, b in 0usize..13) {
        let (lo, hi) = (a.min(b).min(pi.n()), a.max(b).min(pi.n()));
        let mid = pi.restrict(hi).unwrap();
        prop_assert_eq!(mid.restrict(lo).unwrap(), pi.restrict(lo).unwrap());
        prop_assert!(compatibility_check(&pi.restrict(lo).unwrap(), &pi));
    }

    #[test]
    fn permutation_preserves_block_sizes(
        (pi, sigma) in partition(10).prop_flat_map(|pi| { let n = pi.n(); (Just(pi), permutation(n)) })
    ) {
        let moved = pi.permute(&sigma).unwrap();
        prop_assert_eq!(moved.block_sizes(), pi.block_sizes());
        prop_assert_eq!(moved.distinguished().len(), pi.distinguished().len());
        prop_assert_eq!(pi.permute(&Permutation::identity(pi.n())).unwrap(), pi);
    }
}

#[test]
fn coag_with_trivial_coagulators_exhaustively() {
    for n in 0..=8 {
        for pi in enumerate(n).unwrap() {
            let b = pi.num_blocks() - 1;
            assert_eq!(pi.coag(&DistinguishedPartition::singletons(b)).unwrap(), pi);
            assert!(pi.coag(&DistinguishedPartition::whole(b)).unwrap().is_whole());
        }
    }
}

#[test]
fn paintbox_law_is_exchangeable() {
    // Compare the law of π|{0,1,2} with the law of σπ for each σ fixing 0,
    // on independent samples.
    let s: DistinguishedMassPartition = "0.25;0.4,0.15".parse().unwrap();
    let draws = 50_000;
    let sample = |family: u64, sigma: &Permutation| -> EmpiricalLaw<DistinguishedPartition> {
        (0..draws)
            .map(|i| {
                let mut rng = family_stream(11, family, i);
                sample_paintbox(&s, 2, &mut rng).permute(sigma).unwrap()
            })
            .collect()
    };
    let base = sample(0, &Permutation::identity(2));
    let swap = Permutation::new(vec![0, 2, 1]).unwrap();
    let test = chi_square_homogeneity(&base, &sample(1, &swap));
    assert!(test.p_value > 0.001, "{test:?}");
    assert_eq!(base.counts().len(), enumerate(2).unwrap().len());

    // The exact law is itself invariant.
    let law = exact_law(&s, 3);
    let sigma = Permutation::new(vec![0, 3, 1, 2]).unwrap();
    for (pi, p) in &law {
        let q = law[&pi.permute(&sigma).unwrap()];
        assert!((p - q).abs() < 1e-14);
    }
}
