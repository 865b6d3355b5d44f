//! Collapsing rank-2 families to rank 1 by making the base block singular.

use kmln::algebra::{assemble, det_block, numeric_rank, DEFAULT_TOL};
use kmln::families::{rank1_restrict, FamilyInstance, FamilyTag};
use kmln::sampling::rng_from_seed;

fn main() {
    let mut rng = rng_from_seed(5);
    for tag in FamilyTag::ALL.into_iter().filter(|t| t.generic_rank() == 2) {
        let inst = FamilyInstance::random(tag, &mut rng, false);
        let before = numeric_rank(&assemble(&inst.materialize().unwrap()), DEFAULT_TOL);
        let restricted = rank1_restrict(&inst).unwrap();
        let after = numeric_rank(&assemble(&restricted.materialize().unwrap()), DEFAULT_TOL);
        println!(
            "{tag:>6}: rank {before} -> {after}, |det base| = {:.1e}",
            det_block(&restricted.base[0]).norm()
        );
    }
}
