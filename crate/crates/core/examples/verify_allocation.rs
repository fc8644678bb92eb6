//! Verifying allocations, including a tampered one.

use fairalloc::driver::{self, Algo, SolveOptions};
use fairalloc::gen;
use fairalloc::model::{parse_allocation, serialize_allocation, Allocation};

fn main() {
    let eps = "1/2".parse().unwrap();
    let inst = gen::gen_random(3, 1, 6, 0.8, eps, 4);
    let solved = driver::solve(&inst, Algo::Auto, &SolveOptions::default()).unwrap();
    let text = serialize_allocation(&solved.allocation);
    println!("{text}");

    let back = parse_allocation(text.as_bytes()).unwrap();
    let threshold = solved.report.value.parse().unwrap();
    println!("{:?}", driver::verify(&inst, &back, Some(threshold)));

    let mut bundles = back.bundles().to_vec();
    if let Some(item) = bundles.iter().flatten().next().copied() {
        bundles.iter_mut().for_each(|b| {
            if !b.contains(&item) {
                b.push(item)
            }
        });
    }
    let tampered = Allocation::from_bundles(bundles);
    println!("{:?}", driver::verify(&inst, &tampered, None));
}
