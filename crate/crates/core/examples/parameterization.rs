//! Writing a 4×4 matrix as four 2×2 blocks `c0 + c·σ` and reading it back.

use kmln::algebra::{assemble, det_block, disassemble, is_real_conditions};
use kmln::types::{CVec4, Complex, ParamSet, ZERO};

fn main() {
    let p = ParamSet {
        k: CVec4::real(1.0, 0.0, 0.0, 0.5),
        m: CVec4::real(2.0, 0.3, 0.0, 0.0),
        l: CVec4::new(ZERO, Complex::new(0.1, 0.0), Complex::new(0.0, 0.4), ZERO),
        n: CVec4::ZERO,
    };
    let g = assemble(&p);
    println!("G =\n{g}\n");

    // an imaginary second component is what keeps the matrix real
    println!("reality conditions hold: {}", is_real_conditions(&p, 1e-12));
    println!("largest imaginary entry: {}", g.max_imag());

    let back = disassemble(&g);
    println!("round trip error: {:.1e}", (back - p).norm());
    println!("det K = {}, det M = {}", det_block(&p.k), det_block(&p.m));
}
