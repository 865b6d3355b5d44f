//! The four-vector parameterization of 4×4 matrices and its multiplication law.
//!
//! A matrix `G` is written as four 2×2 blocks
//!
//! ```text
//!     | k0 + k·σ   n0 + n·σ |   | K  N |
//! G = |                     | = |      |
//!     | l0 + l·σ   m0 + m·σ |   | L  M |
//! ```
//!
//! and [`compose`] multiplies two matrices without leaving parameter space.

use nalgebra::Matrix4;

use crate::types::{Block2, CVec4, Complex, Mat4, ParamSet, Slot, I, ZERO};

/// Default relative threshold for [`numeric_rank`] and membership tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Absolute floor applied to every relative tolerance scale.
pub const SCALE_FLOOR: f64 = 1e-14;

/// Norm used as the denominator of a relative residual.
pub fn scale_of(norm: f64) -> f64 {
    norm.max(SCALE_FLOOR)
}

/// `c0·I + v1·σ1 + v2·σ2 + v3·σ3`.
pub fn block_from_pair(c0: Complex, v: [Complex; 3]) -> Block2 {
    let [v1, v2, v3] = v;
    Block2([[c0 + v3, v1 - I * v2], [v1 + I * v2, c0 - v3]])
}

pub fn block_of(c: &CVec4) -> Block2 {
    block_from_pair(c.c0, c.v)
}

/// Exact inverse of [`block_from_pair`].
pub fn pair_from_block(b: &Block2) -> CVec4 {
    let e = &b.0;
    let half = 0.5;
    CVec4::new(
        (e[0][0] + e[1][1]) * half,
        (e[0][1] + e[1][0]) * half,
        (e[1][0] - e[0][1]) / (I * 2.0),
        (e[0][0] - e[1][1]) * half,
    )
}

/// Builds `G` with blocks `K, N` on top and `L, M` below.
pub fn assemble(p: &ParamSet) -> Mat4 {
    let mut g = Mat4::ZERO;
    for slot in Slot::ALL {
        let (br, bc) = slot.block_position();
        g.set_block(br, bc, &block_of(p.get(slot)));
    }
    g
}

pub fn disassemble(g: &Mat4) -> ParamSet {
    let mut p = ParamSet::ZERO;
    for slot in Slot::ALL {
        let (br, bc) = slot.block_position();
        *p.get_mut(slot) = pair_from_block(&g.block(br, bc));
    }
    p
}

/// Product of two blocks in pair form:
/// `(a0 + a·σ)(b0 + b·σ) = (a0 b0 + a·b) + (a0 b + b0 a + i a×b)·σ`.
pub fn pauli_product(a: &CVec4, b: &CVec4) -> CVec4 {
    let cross = a.vector_cross(b);
    let mut v = [ZERO; 3];
    for (i, vi) in v.iter_mut().enumerate() {
        *vi = a.c0 * b.v[i] + a.v[i] * b.c0 + I * cross[i];
    }
    CVec4 {
        c0: a.c0 * b.c0 + a.vector_dot(b),
        v,
    }
}

/// Parameters of `assemble(left) · assemble(right)`.
///
/// `left` carries the primed quantities of the multiplication law, so the
/// left factor acts second: `K'' = K'K + N'L`, `N'' = K'N + N'M`,
/// `L'' = L'K + M'L`, `M'' = L'N + M'M`.
pub fn compose(left: &ParamSet, right: &ParamSet) -> ParamSet {
    let (k1, m1, l1, n1) = (&left.k, &left.m, &left.l, &left.n);
    let (k, m, l, n) = (&right.k, &right.m, &right.l, &right.n);
    ParamSet {
        k: pauli_product(k1, k) + pauli_product(n1, l),
        m: pauli_product(m1, m) + pauli_product(l1, n),
        n: pauli_product(k1, n) + pauli_product(n1, m),
        l: pauli_product(l1, k) + pauli_product(m1, l),
    }
}

/// Checks the conditions under which `assemble(p)` is real: every second
/// component (`k2, m2, l2, n2`) purely imaginary, every other component real.
///
/// `tol` is relative to the norm of `p`.
pub fn is_real_conditions(p: &ParamSet, tol: f64) -> bool {
    let bound = tol * scale_of(p.norm());
    Slot::ALL.iter().all(|&slot| {
        p.get(slot)
            .to_array()
            .iter()
            .enumerate()
            .all(|(i, c)| {
                let off = if i == 2 { c.re } else { c.im };
                off.abs() <= bound
            })
    })
}

/// Whether every entry of `g` is real to within `tol` relative to `‖g‖`.
pub fn is_real_matrix(g: &Mat4, tol: f64) -> bool {
    g.max_imag() <= tol * scale_of(g.norm())
}

/// `det(c0 + v·σ) = c0² − v·v`.
pub fn det_block(c: &CVec4) -> Complex {
    c.c0 * c.c0 - c.vector_dot(c)
}

/// Singular values of `g`, largest first.
pub fn singular_values(g: &Mat4) -> [f64; 4] {
    let m = Matrix4::<Complex>::from_fn(|r, c| g.0[r][c]);
    let sv = m.singular_values();
    let mut out = [sv[0], sv[1], sv[2], sv[3]];
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Number of singular values above `tol` times the largest one.
/// The zero matrix has rank 0.
pub fn numeric_rank(g: &Mat4, tol: f64) -> usize {
    let sv = singular_values(g);
    let largest = sv[0];
    if largest <= f64::MIN_POSITIVE {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * largest).count()
}
