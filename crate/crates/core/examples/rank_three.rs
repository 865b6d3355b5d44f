//! The 16 rank-3 variants: a vanishing row and column.

use kmln::algebra::{assemble, compose, numeric_rank, DEFAULT_TOL};
use kmln::rank3::{free_components, random_variant, variant_constraints, variant_residual, zero_pattern_constraints, VariantId};
use kmln::sampling::rng_from_seed;

fn main() {
    let mut rng = rng_from_seed(9);
    for id in VariantId::all() {
        let published = variant_constraints(id);
        let agrees = published.equivalent(&zero_pattern_constraints(id));
        println!("{published}   [matches definition: {agrees}]");
    }

    let id = VariantId::new(1, 2).unwrap();
    let free: Vec<String> = free_components(id).iter().map(|c| c.to_string()).collect();
    println!("\n({id}) free components: {}", free.join(" "));
    let a = random_variant(id, &mut rng, true);
    let b = random_variant(id, &mut rng, true);
    let g = assemble(&a);
    println!("real member, rank {}:\n{g}", numeric_rank(&g, DEFAULT_TOL));
    let product = assemble(&compose(&a, &b));
    println!("product still has row 1 and column 2 zero: residual {:.1e}", variant_residual(id, &product));
}
