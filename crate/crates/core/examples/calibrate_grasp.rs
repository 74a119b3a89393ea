//! Share of corpus instances where GRASP lands within 5% of the optimum,
//! for a range of RCL widths.
//!
//! cargo run --release --example calibrate_grasp -- [instances] [iterations]

use scpcs::heur::{grasp, GraspConfig};
use scpcs::oracle::{brute_force_optimum, DEFAULT_MAX_SUBSETS};
use scpcs::testgen::corpus_instance;

fn main() {
    let mut args = std::env::args().skip(1);
    let count: u64 = args
        .next()
        .map_or(500, |a| a.parse().expect("instance count"));
    let iterations: u64 = args
        .next()
        .map_or(200, |a| a.parse().expect("iteration count"));
    let corpus: Vec<_> = (0..count)
        .map(|i| {
            let inst = corpus_instance(i);
            let opt = brute_force_optimum(&inst, DEFAULT_MAX_SUBSETS)
                .expect("corpus is coverable")
                .total;
            (inst, opt)
        })
        .collect();
    println!("alpha  within5%  optimal  worst_gap%");
    for alpha in [0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0] {
        let (mut close, mut exact, mut worst) = (0, 0, 0.0f64);
        for (inst, opt) in &corpus {
            let cfg = GraspConfig {
                iterations,
                rcl_alpha: alpha,
                seed: 1,
                ..Default::default()
            };
            let total = grasp(inst, &cfg).expect("coverable").total;
            let gap = 100.0 * (total - opt) as f64 / (*opt).max(1) as f64;
            close += usize::from(gap <= 5.0);
            exact += usize::from(total == *opt);
            worst = worst.max(gap);
        }
        println!(
            "{alpha:<5}  {:>8.2}  {:>7.2}  {worst:>9.2}",
            100.0 * close as f64 / count as f64,
            100.0 * exact as f64 / count as f64
        );
    }
}
