use kdeavg::bench::*;
use kdeavg::*;
use std::time::Instant;
fn main() {
    let s = sample_density(Density::Norm, 2000, 1).unwrap();
    let t = Instant::now();
    let h = bw_sheather_jones(&s).unwrap();
    println!("sj {:?}", t.elapsed());
    let t = Instant::now();
    let g = estimate_gamma(&s).unwrap();
    println!("gamma {:?} {g:?}", t.elapsed());
    let t = Instant::now();
    let set = BandwidthSet::select(&s, &Selector::ALL).unwrap();
    println!("select {:?}", t.elapsed());
    let t = Instant::now();
    let f = average_estimator(&s, &set, Mode::Linear).unwrap();
    println!("avg {:?}", t.elapsed());
    let k = Kde::new(s.clone(), h).unwrap();
    let grid = IseGrid::new(&Density::Norm.spec(), h);
    let t = Instant::now();
    let v = grid.kde_values(&k);
    println!("grid {:?} {}", t.elapsed(), v.len());
    let _ = f;
}
