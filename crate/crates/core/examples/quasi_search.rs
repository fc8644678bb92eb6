//! Alternating-tree search: the closest-edge variant as a solver, and the
//! arbitrary-edge variant certifying a third of the LP threshold.

use fairalloc::{clp, exact, gen, treesearch};

fn main() {
    let eps = "1/4".parse().unwrap();
    let inst = gen::gen_random(5, 2, 10, 0.6, eps, 3);
    let (opt, _) = exact::opt(&inst).unwrap();

    let q = treesearch::quasi_solve(&inst, treesearch::DEFAULT_BUDGET);
    println!(
        "quasi: {} (OPT {}), certified target {:?}, r = {:?}, baseline used: {}",
        eps.format(q.value),
        eps.format(opt),
        q.certified_t.map(|t| eps.format(t)),
        q.r,
        q.used_baseline
    );
    println!(
        "  {} iterations, {} contractions, audit violations {}",
        q.stats.iterations,
        q.stats.contractions,
        q.stats.audit.total()
    );

    let est = clp::estimate_tstar(&inst, clp::DEFAULT_TOL).unwrap();
    let res = clp::solve_clp(&inst, est.tstar, clp::DEFAULT_TOL).unwrap();
    match treesearch::gap3_certify(&inst, &res, est.tstar) {
        Ok((alloc, stats)) => println!(
            "certified: T* = {}, allocation worth {} after {} iterations",
            eps.format(est.tstar),
            eps.format(alloc.min_value(&inst).unwrap()),
            stats.iterations
        ),
        Err(e) => println!("certification skipped: {e}"),
    }
}
