//! Searches small instances for a configuration-LP value twice the optimum.

use std::time::Instant;

use fairalloc::gen::GapSearch;
use fairalloc::model::{serialize_instance, Epsilon};

fn main() {
    let eps: Epsilon = "1/2".parse().unwrap();
    let started = Instant::now();
    let w = GapSearch::new(4, 6, eps, 200_000, 1).stop_at(2, 1).run().unwrap();
    println!(
        "T* = {}, OPT = {}, ratio {:.3} after {} probes in {:.1?}",
        eps.format(w.tstar),
        eps.format(w.opt),
        w.ratio(),
        w.probes,
        started.elapsed()
    );
    println!("{}", serialize_instance(&w.instance));
}
