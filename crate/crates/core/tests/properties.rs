mod support;

use minimax_core::agglomerate::{agglomerate, linkage_distance, minimax_radius, CentroidFeatures};
use minimax_core::dissim::compute_dissimilarity;
use minimax_core::ingest::{read_pairwise, write_pairwise, ScoreOrientation};
use minimax_core::metrics::{max_minimax_radius, pairwise_confusion, MetricRecord};
use minimax_core::{prototypes, sweep, Clustering, DissimilarityMatrix, Linkage, Metric};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracle;

const ALL_RULES: [Linkage; 6] = [
    Linkage::Single,
    Linkage::Complete,
    Linkage::Average,
    Linkage::Centroid,
    Linkage::CentroidMeans,
    Linkage::Minimax,
];

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_naive_reference(seed in any::<u64>(), n in 3usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = oracle::random_features(&mut rng, n, 3);
        let from_features = compute_dissimilarity(&f, Metric::L2).unwrap();
        let random = oracle::random_dissimilarity(&mut rng, n);
        for rule in ALL_RULES {
            let d = if rule == Linkage::CentroidMeans { &from_features } else { &random };
            let cf = CentroidFeatures { features: &f, metric: Metric::L2 };
            let dend = agglomerate(d, rule, Some(cf)).unwrap();
            let naive = oracle::naive_agglomerate(d, rule, Some((&f, Metric::L2)));
            let leaders = dend.merge_leaders();
            for ((m, lead), want) in dend.merges().iter().zip(&leaders).zip(&naive) {
                prop_assert_eq!(*lead, (want.0, want.1), "{} merge order", rule);
                prop_assert!(close(m.height, want.2, 1e-12), "{}: {} vs {}", rule, m.height, want.2);
            }
        }
    }

    #[test]
    fn linkage_distance_matches_formulas(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..12);
        let f = oracle::random_features(&mut rng, n, 2);
        let d = compute_dissimilarity(&f, Metric::L1).unwrap();
        let (g, h) = oracle::random_groups(&mut rng, n, 5);
        let cf = CentroidFeatures { features: &f, metric: Metric::L1 };
        for rule in ALL_RULES {
            let got = linkage_distance(&g, &h, rule, &d, Some(&cf)).unwrap();
            let want = oracle::formula(&g, &h, rule, &d, Some((&f, Metric::L1)));
            prop_assert!(close(got, want, 1e-12), "{}: {} vs {}", rule, got, want);
        }
    }

    #[test]
    fn centroid_on_squared_euclidean_is_squared_mean_distance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..10);
        let f = oracle::random_features(&mut rng, n, 3);
        let l2 = compute_dissimilarity(&f, Metric::L2).unwrap();
        let sq = DissimilarityMatrix::from_condensed(n, l2.condensed().iter().map(|v| v * v).collect()).unwrap();
        let (g, h) = oracle::random_groups(&mut rng, n, 4);
        let via_d = linkage_distance(&g, &h, Linkage::Centroid, &sq, None).unwrap();
        let cf = CentroidFeatures { features: &f, metric: Metric::L2 };
        let via_means = linkage_distance(&g, &h, Linkage::CentroidMeans, &l2, Some(&cf)).unwrap();
        prop_assert!(close(via_d, via_means * via_means, 1e-10), "{} vs {}", via_d, via_means * via_means);
    }

    #[test]
    fn sandwich_on_arbitrary_groups(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..15);
        let d = oracle::random_dissimilarity(&mut rng, n);
        let (g, h) = oracle::random_groups(&mut rng, n, 6);
        let v = |r| linkage_distance(&g, &h, r, &d, None).unwrap();
        let (s, c, a, m) = (v(Linkage::Single), v(Linkage::Complete), v(Linkage::Average), v(Linkage::Minimax));
        prop_assert!(s <= m);
        prop_assert!(s <= a && a <= c);
    }

    #[test]
    fn sandwich_on_coexisting_clusters(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(3..25);
        let d = oracle::random_dissimilarity(&mut rng, n);
        let rule = Linkage::STANDARD[rng.random_range(0..5)];
        let dend = agglomerate(&d, rule, None).unwrap();
        let clusters = dend.cut(rng.random_range(2..=n)).unwrap().clusters();
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let v = |r| linkage_distance(&clusters[a], &clusters[b], r, &d, None).unwrap();
                let (s, c, m) = (v(Linkage::Single), v(Linkage::Complete), v(Linkage::Minimax));
                prop_assert!(s <= m && m <= c, "{}: {} {} {}", rule, s, m, c);
            }
        }
    }

    #[test]
    fn minimax_radius_matches_exhaustive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = oracle::random_dissimilarity(&mut rng, 14);
        let size = rng.random_range(1..=12);
        let (g, _) = oracle::random_groups(&mut rng, 14, size);
        let (proto, r) = minimax_radius(&g, &d).unwrap();
        prop_assert_eq!((proto, r), oracle::exhaustive_minimax(&g, &d));
        for &j in &g {
            prop_assert!(d.get(proto, j) <= r);
        }
    }

    #[test]
    fn monotone_rules_have_no_inversions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = oracle::random_features(&mut rng, 30, 4);
        let d = compute_dissimilarity(&f, Metric::L2).unwrap();
        for rule in [Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Minimax] {
            prop_assert_eq!(agglomerate(&d, rule, None).unwrap().inversions(), 0, "{}", rule);
        }
    }

    #[test]
    fn minimax_height_is_radius_of_merged_cluster(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 20;
        let d = oracle::random_dissimilarity(&mut rng, n);
        let dend = agglomerate(&d, Linkage::Minimax, None).unwrap();
        for (step, m) in dend.merges().iter().enumerate() {
            let c = dend.cut(n - step - 1).unwrap();
            let leader = dend.merge_leaders()[step].0;
            let members = &c.clusters()[c.assignment()[leader]];
            prop_assert!((m.height - minimax_radius(members, &d).unwrap().1).abs() <= 1e-12);
        }
    }

    #[test]
    fn cuts_are_nested_and_covered(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 16;
        let d = oracle::random_dissimilarity(&mut rng, n);
        let rule = ALL_RULES[rng.random_range(0..ALL_RULES.len())];
        prop_assume!(rule != Linkage::CentroidMeans);
        let dend = agglomerate(&d, rule, None).unwrap();
        let mut finer = dend.cut(n).unwrap();
        for k in (1..n).rev() {
            let coarser = dend.cut(k).unwrap();
            prop_assert_eq!(coarser.k(), k);
            for i in 0..n {
                for j in 0..n {
                    if finer.assignment()[i] == finer.assignment()[j] {
                        prop_assert_eq!(coarser.assignment()[i], coarser.assignment()[j]);
                    }
                }
            }
            let protos = prototypes(&coarser, &d).unwrap();
            for (i, &c) in coarser.assignment().iter().enumerate() {
                let p = protos.prototypes[c];
                prop_assert_eq!(coarser.assignment()[p.index], c);
                prop_assert!(d.get(p.index, i) <= p.radius);
            }
            finer = coarser;
        }
    }

    #[test]
    fn metrics_invariant_under_relabelling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..25);
        let k = rng.random_range(1..=n);
        let mut assignment: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
        let d = oracle::random_dissimilarity(&mut rng, n);
        let base = MetricRecord::evaluate(&Clustering::new(assignment.clone()).unwrap(), &d, &truth).unwrap();

        let mut ids: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() { ids.swap(i, rng.random_range(0..=i)); }
        let relabelled = Clustering::new(assignment.iter().map(|&c| ids[c]).collect()).unwrap();
        prop_assert_eq!(MetricRecord::evaluate(&relabelled, &d, &truth).unwrap(), base);

        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() { perm.swap(i, rng.random_range(0..=i)); }
        let pd = DissimilarityMatrix::from_fn(n, |i, j| d.get(perm[i], perm[j])).unwrap();
        assignment = perm.iter().map(|&p| assignment[p]).collect();
        let ptruth: Vec<usize> = perm.iter().map(|&p| truth[p]).collect();
        let permuted = MetricRecord::evaluate(&Clustering::new(assignment).unwrap(), &pd, &ptruth).unwrap();
        prop_assert_eq!(permuted.k, base.k);
        prop_assert_eq!(permuted.max_minimax_radius, base.max_minimax_radius);
        prop_assert_eq!(permuted.misclassification, base.misclassification);
        prop_assert_eq!(permuted.precision, base.precision);
        prop_assert_eq!(permuted.recall, base.recall);

        let cc = pairwise_confusion(&relabelled, &truth).unwrap();
        prop_assert_eq!(cc.total(), (n * (n - 1) / 2) as u64);
        prop_assert!((cc.misclassification() + cc.accuracy() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn recall_never_increases_with_k(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 24;
        let d = oracle::random_dissimilarity(&mut rng, n);
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let rule = Linkage::STANDARD[rng.random_range(0..5)];
        let dend = agglomerate(&d, rule, None).unwrap();
        let recs = sweep(&dend, &d, &truth, 1..=n).unwrap();
        for w in recs.windows(2) {
            prop_assert!(w[0].recall >= w[1].recall);
        }
        for r in &recs {
            prop_assert_eq!(*r, MetricRecord::evaluate(&dend.cut(r.k).unwrap(), &d, &truth).unwrap());
            prop_assert_eq!(r.max_minimax_radius, max_minimax_radius(&dend.cut(r.k).unwrap(), &d).unwrap());
        }
    }

    #[test]
    fn pairwise_file_round_trip(seed in any::<u64>(), n in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = DissimilarityMatrix::from_fn(n, |_, _| rng.random::<f64>() * 10f64.powi(rng.random_range(-6..6))).unwrap();
        let mut buf = Vec::new();
        write_pairwise(&d, &mut buf).unwrap();
        let (back, ids) = read_pairwise(&buf[..], ScoreOrientation::Dissimilarity, None, "mem".as_ref()).unwrap();
        prop_assert_eq!(ids, (0..n).map(|i| i.to_string()).collect::<Vec<_>>());
        prop_assert_eq!(back, d);
    }
}

#[test]
fn triangle_inequality_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let f = oracle::random_features(&mut rng, 3, 5);
        for metric in [Metric::L1, Metric::L2] {
            let d = compute_dissimilarity(&f, metric).unwrap();
            assert!(d.get(0, 2) <= d.get(0, 1) + d.get(1, 2) + 1e-9);
            assert!(d.get(0, 1) <= d.get(0, 2) + d.get(2, 1) + 1e-9);
            assert!(d.get(1, 2) <= d.get(1, 0) + d.get(0, 2) + 1e-9);
        }
    }
}

#[test]
fn minimax_can_exceed_complete_for_arbitrary_groups() {
    // G = {(-1,0), (1,0)}, H = {(0,1), (0,-1)}: every cross pair is sqrt(2)
    // apart but no member is within sqrt(2) of the opposite member of its own group.
    let f = minimax_core::FeatureMatrix::from_rows(&[vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]])
        .unwrap();
    let d = compute_dissimilarity(&f, Metric::L2).unwrap();
    let complete = linkage_distance(&[0, 1], &[2, 3], Linkage::Complete, &d, None).unwrap();
    let minimax = linkage_distance(&[0, 1], &[2, 3], Linkage::Minimax, &d, None).unwrap();
    assert!((complete - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(minimax, 2.0);
}

#[test]
fn dendrograms_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = oracle::random_dissimilarity(&mut rng, 40);
    for rule in Linkage::STANDARD {
        let a = agglomerate(&d, rule, None).unwrap();
        let b = agglomerate(&d, rule, None).unwrap();
        let bits = |x: &minimax_core::Dendrogram| x.heights().map(f64::to_bits).collect::<Vec<_>>();
        assert_eq!(a, b);
        assert_eq!(bits(&a), bits(&b));
    }
}

#[test]
fn ties_break_lexicographically() {
    // every pair equidistant: merges join leaders in ascending order
    let d = DissimilarityMatrix::from_fn(5, |_, _| 1.0).unwrap();
    for rule in [Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Minimax] {
        let dend = agglomerate(&d, rule, None).unwrap();
        assert_eq!(dend.merge_leaders(), vec![(0, 1), (0, 2), (0, 3), (0, 4)], "{rule}");
        assert_eq!(
            dend.merge_leaders(),
            oracle::naive_agglomerate(&d, rule, None)
                .iter()
                .map(|m| (m.0, m.1))
                .collect::<Vec<_>>()
        );
    }
}
