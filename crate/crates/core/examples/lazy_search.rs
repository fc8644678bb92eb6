//! Layered search on an instance with small ε, where the light bundles are large.

use fairalloc::lazysearch::{self, PolyOptions};
use fairalloc::{flowkit, gen};

fn main() {
    let eps = "1/30".parse().unwrap();
    let inst = gen::gen_random(10, 2, 44, 0.7, eps, 62);
    let (base, _) = flowkit::baseline_solve(&inst);
    for p_sweep in [false, true] {
        let res = lazysearch::poly_solve(&inst, PolyOptions { p_sweep, ..Default::default() });
        println!(
            "p sweep {p_sweep}: value {} (baseline {}), T = {:?}, k = {:?}, r = {:?}, p = {:?}",
            eps.format(res.value),
            eps.format(base),
            res.certified_t.map(|t| eps.format(t)),
            res.k,
            res.r,
            res.p
        );
        println!(
            "  {} iterations, {} collapses, deepest layer {}, audit violations {}",
            res.stats.iterations,
            res.stats.collapses,
            res.stats.layers_peak,
            res.stats.audit.total()
        );
    }
}
