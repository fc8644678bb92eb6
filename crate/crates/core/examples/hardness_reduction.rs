//! 3-dimensional matching instances turned into allocation instances: a perfect
//! matching gives value 2ε, and without one nobody can do better than ε.

use fairalloc::{exact, gen};

fn main() {
    let eps = "1/3".parse().unwrap();
    let (yes, planted) = gen::gen_3dm_yes(3, 2, 7);
    println!("yes hypergraph: {:?}, planted {planted:?}", yes.edges());
    let inst = gen::reduce_3dm(&yes, eps);
    let (opt, _) = exact::opt(&inst).unwrap();
    println!("  {} agents, {} items, OPT = {}", inst.n(), inst.m(), eps.format(opt));

    let no = gen::gen_3dm_no(3, 2, 7);
    println!("no hypergraph: {:?}, perfect matching: {}", no.edges(), no.has_perfect_matching());
    let inst = gen::reduce_3dm(&no, eps);
    let (opt, _) = exact::opt(&inst).unwrap();
    println!("  {} agents, {} items, OPT = {}", inst.n(), inst.m(), eps.format(opt));
}
