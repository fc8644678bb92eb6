//! Exact optimum of a small instance, plus the feasibility test at the next value.

use fairalloc::exact;
use fairalloc::model::{Epsilon, Instance, ItemKind};

fn main() {
    let eps: Epsilon = "1/3".parse().unwrap();
    let kinds = vec![
        ItemKind::Heavy,
        ItemKind::Light,
        ItemKind::Light,
        ItemKind::Light,
        ItemKind::Light,
    ];
    let inst = Instance::new(eps, kinds, vec![vec![0, 1, 2], vec![0, 2, 3, 4], vec![0, 1, 4]]).unwrap();
    let (opt, alloc) = exact::opt(&inst).unwrap();
    println!("OPT = {}", eps.format(opt));
    for (agent, bundle) in alloc.bundles().iter().enumerate() {
        println!("  agent {agent}: {bundle:?} worth {}", eps.format(inst.weight(bundle)));
    }
    let values = inst.lattice_values();
    let above = values.iter().find(|v| eps.cmp(**v, opt).is_gt()).unwrap();
    let next = exact::feasible_at(&inst, *above).unwrap();
    println!("feasible at {}? {}", eps.format(*above), next.is_some());
}
