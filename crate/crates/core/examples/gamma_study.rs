//! Calibration study for the curvature estimator on standard normal data.
//!
//! Draws 200 samples of size 2000, records the relative error of γ̂ against
//! the exact value and writes its quantiles in `key = value` form:
//!
//! ```bash
//! cargo run --release -p kdeavg --example gamma_study > crates/core/tests/fixtures/gamma_study.txt
//! ```

use kdeavg::bench::rng::replication_seed;
use kdeavg::bench::{sample_density, Density};
use kdeavg::curvature::{estimate_gamma, gamma_true};
use kdeavg::sample::quantile_sorted;

const STUDY_SEED: u64 = 0x5EED_CA1B;
const N: usize = 2000;
const REPS: usize = 200;

fn main() {
    let truth = gamma_true(&Density::Norm.spec()).expect("normal curvature");
    let mut errors: Vec<f64> = (0..REPS)
        .map(|r| {
            let s = sample_density(
                Density::Norm,
                N,
                replication_seed(STUDY_SEED, Density::Norm, N, r),
            )
            .expect("sample");
            let g = estimate_gamma(&s).expect("positive curvature");
            (g.gamma_hat - truth).abs() / truth
        })
        .collect();
    errors.sort_by(f64::total_cmp);
    println!("# relative error of the curvature estimate, Norm, n = {N}");
    println!("seed = {STUDY_SEED}");
    println!("n = {N}");
    println!("reps = {REPS}");
    for (key, p) in [("q25", 0.25), ("q50", 0.5), ("q75", 0.75), ("q90", 0.9)] {
        println!("{key} = {:.6}", quantile_sorted(&errors, p));
    }
}
