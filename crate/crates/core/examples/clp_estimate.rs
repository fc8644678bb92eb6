//! Column generation for the configuration LP and its threshold `T*`.

use fairalloc::{clp, exact, gen};

fn main() {
    let eps = "1/3".parse().unwrap();
    let inst = gen::gen_random(4, 2, 8, 0.6, eps, 11);
    let est = clp::estimate_tstar(&inst, clp::DEFAULT_TOL).unwrap();
    let (opt, _) = exact::opt(&inst).unwrap();
    println!(
        "T* = {} (lambda {:.6}, {} probes{}), OPT = {}",
        eps.format(est.tstar),
        est.lambda,
        est.probes,
        if est.near_boundary { ", near boundary" } else { "" },
        eps.format(opt)
    );

    let res = clp::solve_clp(&inst, est.tstar, clp::DEFAULT_TOL).unwrap();
    println!("{} rounds, {} columns in the final basis", res.rounds, res.columns.len());
    for (col, x) in res.columns.iter().filter(|(_, x)| *x > 1e-9) {
        println!("  agent {} takes {:?} with weight {x:.3}", col.agent, col.items);
    }
    let sol = clp::minimalize(&inst, &res, est.tstar).unwrap();
    let k = eps.k_of(est.tstar).unwrap();
    let h = clp::build_support_hypergraph(&sol, k.div_ceil(3) as usize).unwrap();
    for agent in 0..inst.n() {
        println!(
            "  agent {agent}: {} heavy and {} light support edges",
            h.heavy[agent].len(),
            h.light_edge_count(agent)
        );
    }
}
