//! Building family members, recovering their constants and checking closure.
//!
//! Pass a family name to inspect another one: `cargo run --example families -- KM-3`

use kmln::algebra::{assemble, numeric_rank, DEFAULT_TOL};
use kmln::families::{closure_check, descriptor, membership, random_constants, FamilyInstance, FamilyTag};
use kmln::sampling::rng_from_seed;

fn main() {
    let tag = std::env::args()
        .nth(1)
        .map(|s| s.parse::<FamilyTag>().unwrap_or_else(|e| panic!("{e}")))
        .unwrap_or(FamilyTag::K5);

    println!("{}", descriptor(tag));

    let mut rng = rng_from_seed(3);
    let constants = random_constants(tag, &mut rng, false);
    let inst = FamilyInstance::random_with(tag, constants, &mut rng, false);
    let p = inst.materialize().unwrap();
    let g = assemble(&p);
    println!("\nmember:\n{g}");
    println!("rank {} (generic {}, published {})", numeric_rank(&g, DEFAULT_TOL), tag.generic_rank(), tag.paper_rank());

    let m = membership(tag, &p, DEFAULT_TOL).expect("a constructed member is recognized");
    for (c, v) in constants.iter() {
        println!("{c}: used {v:.6}, recovered {:.6}", m.recovered.get(c).unwrap());
    }

    let report = closure_check(tag, &constants, 100, 7, 1e-9).unwrap();
    println!("closure over {} products, worst residual {:.2e}", report.samples, report.worst_residual);
}
