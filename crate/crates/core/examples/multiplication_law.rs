//! Multiplying in parameter space agrees with the dense product.

use kmln::algebra::{assemble, compose, pauli_product};
use kmln::sampling::{random_params, rng_from_seed};
use kmln::types::{CVec4, ONE, ZERO};

fn main() {
    let s1 = CVec4::new(ZERO, ONE, ZERO, ZERO);
    let s2 = CVec4::new(ZERO, ZERO, ONE, ZERO);
    let [c0, c1, c2, c3] = pauli_product(&s1, &s2).to_array();
    println!("σ1 σ2 = ({c0}) + ({c1}, {c2}, {c3})·σ");

    let mut rng = rng_from_seed(1);
    let left = random_params(&mut rng, false);
    let right = random_params(&mut rng, false);

    let law = assemble(&compose(&left, &right));
    let dense = assemble(&left) * assemble(&right);
    println!("G'G via the law:\n{law:.4}\n");
    println!("relative difference from the dense product: {:.2e}", (law - dense).norm() / dense.norm());
}
