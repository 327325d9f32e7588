//! Prints the worst statistic-to-threshold ratio over the acceptance
//! corpus, per check kind (diagnostic; not part of the test suite).

use secdist::verify::{check_w_symmetry, fuzz_multivariate_sets, fuzz_param_sets};
use secdist::{demo_sets, SecDensity};

fn main() {
    let n = 200_000;
    let mut sets: Vec<SecDensity> = fuzz_param_sets(50, 314_159)
        .iter()
        .map(|p| p.build().unwrap())
        .collect();
    sets.extend(demo_sets().iter().map(|p| p.build().unwrap()));
    sets.extend(fuzz_multivariate_sets(6, 271_828).unwrap());
    let mut worst_sign = (0.0f64, String::new());
    let mut worst_ks = (0.0f64, String::new());
    for (i, s) in sets.iter().enumerate() {
        let reports = check_w_symmetry(s, n, 500 + i as u64).unwrap();
        let r0 = reports[0].statistic / reports[0].threshold;
        let r1 = reports[1].statistic / reports[1].threshold;
        if r0 > worst_sign.0 {
            worst_sign = (r0, reports[0].check_name.clone());
        }
        if r1 > worst_ks.0 {
            worst_ks = (r1, reports[1].check_name.clone());
        }
    }
    println!("worst sign ratio: {:.3} ({})", worst_sign.0, worst_sign.1);
    println!("worst ks   ratio: {:.3} ({})", worst_ks.0, worst_ks.1);
}
