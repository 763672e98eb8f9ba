use kdeavg::bench::rng::replication_seed;
use kdeavg::bench::{ise, sample_density, Density};
use kdeavg::{average_estimator, BandwidthSet, Kde, Mode, Selector};

/// On most normal samples the averaged estimator is within 5% of the best
/// single-bandwidth estimator.
#[test]
fn averaged_estimator_close_to_best_single() {
    let spec = Density::Norm.spec();
    let n = 1000;
    let mut wins = 0;
    for r in 0..100 {
        let s =
            sample_density(Density::Norm, n, replication_seed(51, Density::Norm, n, r)).unwrap();
        let set = BandwidthSet::select(&s, &Selector::ALL).unwrap();
        let fit = average_estimator(&s, &set, Mode::Linear).unwrap();
        let best_single = set
            .values()
            .into_iter()
            .map(|h| ise(&Kde::new(s.clone(), h).unwrap(), &spec))
            .fold(f64::INFINITY, f64::min);
        if ise(&fit.estimator, &spec) <= 1.05 * best_single {
            wins += 1;
        }
    }
    assert!(wins >= 60, "{wins} of 100");
}

#[test]
fn convex_weights_are_a_mixture() {
    for d in Density::ALL {
        let s = sample_density(d, 300, 9).unwrap();
        let set = BandwidthSet::select(&s, &Selector::ALL).unwrap();
        let fit = average_estimator(&s, &set, Mode::Convex).unwrap();
        let w = &fit.estimator.weights().weights;
        assert!(w.iter().all(|&x| x >= 0.0), "{d}: {w:?}");
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let grid: Vec<f64> = (0..200).map(|i| -10.0 + 0.1 * i as f64).collect();
        assert!(fit.estimator.eval_many(&grid).iter().all(|&v| v >= 0.0));
    }
}
