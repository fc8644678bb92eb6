//! The flow baseline: every agent gets a heavy item or `t` lights, for the largest `t`.

use fairalloc::{exact, flowkit, gen};

fn main() {
    let eps = "1/4".parse().unwrap();
    for seed in 0..5 {
        let inst = gen::gen_random(4, 2, 10, 0.5, eps, seed);
        let (value, alloc) = flowkit::baseline_solve(&inst);
        assert!(alloc.verify(&inst).is_empty());
        let (opt, _) = exact::opt(&inst).unwrap();
        println!(
            "seed {seed}: baseline {} vs OPT {} (guaranteed at least {} of OPT)",
            eps.format(value),
            eps.format(opt),
            eps
        );
    }
}
