//! Value types: complex 4-vectors, parameter sets, 2×2 blocks and 4×4 matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

/// Scalar field of every component.
pub type Complex = Complex64;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
/// The imaginary unit.
pub const I: Complex = Complex::new(0.0, 1.0);

/// A complex 4-vector `(c0; c1, c2, c3)`: scalar part `c0` and the vector
/// part contracted with the Pauli matrices.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec4 {
    pub c0: Complex,
    pub v: [Complex; 3],
}

impl CVec4 {
    pub const ZERO: CVec4 = CVec4 {
        c0: ZERO,
        v: [ZERO; 3],
    };

    pub const fn new(c0: Complex, v1: Complex, v2: Complex, v3: Complex) -> Self {
        CVec4 {
            c0,
            v: [v1, v2, v3],
        }
    }

    /// Pure scalar `c0·I`.
    pub const fn scalar(c0: Complex) -> Self {
        CVec4 { c0, v: [ZERO; 3] }
    }

    /// Builds a vector from real components.
    pub fn real(c0: f64, v1: f64, v2: f64, v3: f64) -> Self {
        CVec4::new(c0.into(), v1.into(), v2.into(), v3.into())
    }

    pub fn from_array(a: [Complex; 4]) -> Self {
        CVec4::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [Complex; 4] {
        [self.c0, self.v[0], self.v[1], self.v[2]]
    }

    pub fn scale(self, s: Complex) -> Self {
        CVec4 {
            c0: self.c0 * s,
            v: self.v.map(|x| x * s),
        }
    }

    /// Bilinear (not Hermitian) product of the vector parts, `v·w`.
    pub fn vector_dot(&self, other: &CVec4) -> Complex {
        self.v[0] * other.v[0] + self.v[1] * other.v[1] + self.v[2] * other.v[2]
    }

    /// Cross product `v × w` of the vector parts.
    pub fn vector_cross(&self, other: &CVec4) -> [Complex; 3] {
        let a = &self.v;
        let b = &other.v;
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    /// Hermitian inner product `Σ conj(self_i)·other_i`.
    pub fn hermitian_dot(&self, other: &CVec4) -> Complex {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.to_array().iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }
}

impl Add for CVec4 {
    type Output = CVec4;
    fn add(self, rhs: CVec4) -> CVec4 {
        CVec4 {
            c0: self.c0 + rhs.c0,
            v: [self.v[0] + rhs.v[0], self.v[1] + rhs.v[1], self.v[2] + rhs.v[2]],
        }
    }
}

impl Sub for CVec4 {
    type Output = CVec4;
    fn sub(self, rhs: CVec4) -> CVec4 {
        self + (-rhs)
    }
}

impl Neg for CVec4 {
    type Output = CVec4;
    fn neg(self) -> CVec4 {
        self.scale(-ONE)
    }
}

impl Mul<Complex> for CVec4 {
    type Output = CVec4;
    fn mul(self, rhs: Complex) -> CVec4 {
        self.scale(rhs)
    }
}

/// Names the four parameter vectors. `K` and `M` generate the diagonal
/// blocks, `N` the upper-right and `L` the lower-left block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    K,
    M,
    L,
    N,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::K, Slot::M, Slot::L, Slot::N];

    pub fn letter(self) -> char {
        match self {
            Slot::K => 'k',
            Slot::M => 'm',
            Slot::L => 'l',
            Slot::N => 'n',
        }
    }

    /// `(block row, block column)` of the 2×2 block this vector generates.
    pub fn block_position(self) -> (usize, usize) {
        match self {
            Slot::K => (0, 0),
            Slot::N => (0, 1),
            Slot::L => (1, 0),
            Slot::M => (1, 1),
        }
    }

    fn ordinal(self) -> usize {
        match self {
            Slot::K => 0,
            Slot::M => 1,
            Slot::L => 2,
            Slot::N => 3,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One of the 16 scalar parameters, e.g. `n2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    pub slot: Slot,
    pub index: usize,
}

impl Component {
    pub const fn new(slot: Slot, index: usize) -> Self {
        Component { slot, index }
    }

    /// All 16 components in `(k, m, l, n)` order.
    pub fn all() -> impl Iterator<Item = Component> {
        Slot::ALL
            .into_iter()
            .flat_map(|slot| (0..4).map(move |index| Component { slot, index }))
    }

    /// Position in the flattened `(k, m, l, n)` layout.
    pub fn flat_index(self) -> usize {
        self.slot.ordinal() * 4 + self.index
    }

    /// Parses names like `k0` or `n3`.
    pub fn parse(s: &str) -> Option<Component> {
        let mut chars = s.chars();
        let slot = match chars.next()? {
            'k' => Slot::K,
            'm' => Slot::M,
            'l' => Slot::L,
            'n' => Slot::N,
            _ => return None,
        };
        let index = chars.as_str().parse::<usize>().ok()?;
        (index < 4).then_some(Component { slot, index })
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.slot.letter(), self.index)
    }
}

/// The coordinate `(k, m, l, n)` of a 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParamSet {
    pub k: CVec4,
    pub m: CVec4,
    pub l: CVec4,
    pub n: CVec4,
}

impl ParamSet {
    pub const ZERO: ParamSet = ParamSet {
        k: CVec4::ZERO,
        m: CVec4::ZERO,
        l: CVec4::ZERO,
        n: CVec4::ZERO,
    };

    /// Parameters of the 4×4 identity.
    pub const IDENTITY: ParamSet = ParamSet {
        k: CVec4::scalar(ONE),
        m: CVec4::scalar(ONE),
        l: CVec4::ZERO,
        n: CVec4::ZERO,
    };

    pub fn get(&self, slot: Slot) -> &CVec4 {
        match slot {
            Slot::K => &self.k,
            Slot::M => &self.m,
            Slot::L => &self.l,
            Slot::N => &self.n,
        }
    }

    pub fn get_mut(&mut self, slot: Slot) -> &mut CVec4 {
        match slot {
            Slot::K => &mut self.k,
            Slot::M => &mut self.m,
            Slot::L => &mut self.l,
            Slot::N => &mut self.n,
        }
    }

    /// Flattened components in `(k, m, l, n)` order.
    pub fn components(&self) -> [Complex; 16] {
        let mut out = [ZERO; 16];
        for c in Component::all() {
            out[c.flat_index()] = self[c];
        }
        out
    }

    pub fn from_components(values: [Complex; 16]) -> Self {
        let mut p = ParamSet::ZERO;
        for c in Component::all() {
            p[c] = values[c.flat_index()];
        }
        p
    }

    pub fn map(&self, f: impl Fn(CVec4) -> CVec4) -> ParamSet {
        ParamSet {
            k: f(self.k),
            m: f(self.m),
            l: f(self.l),
            n: f(self.n),
        }
    }

    pub fn scale(&self, s: Complex) -> ParamSet {
        self.map(|v| v.scale(s))
    }

    /// Euclidean norm over all 16 components.
    pub fn norm(&self) -> f64 {
        Slot::ALL
            .iter()
            .map(|&s| self.get(s).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        Slot::ALL.iter().all(|&s| self.get(s).is_finite())
    }
}

impl Index<Component> for ParamSet {
    type Output = Complex;
    fn index(&self, c: Component) -> &Complex {
        let v = self.get(c.slot);
        match c.index {
            0 => &v.c0,
            i => &v.v[i - 1],
        }
    }
}

impl IndexMut<Component> for ParamSet {
    fn index_mut(&mut self, c: Component) -> &mut Complex {
        let v = self.get_mut(c.slot);
        match c.index {
            0 => &mut v.c0,
            i => &mut v.v[i - 1],
        }
    }
}

impl Sub for ParamSet {
    type Output = ParamSet;
    fn sub(self, rhs: ParamSet) -> ParamSet {
        ParamSet {
            k: self.k - rhs.k,
            m: self.m - rhs.m,
            l: self.l - rhs.l,
            n: self.n - rhs.n,
        }
    }
}

impl Add for ParamSet {
    type Output = ParamSet;
    fn add(self, rhs: ParamSet) -> ParamSet {
        ParamSet {
            k: self.k + rhs.k,
            m: self.m + rhs.m,
            l: self.l + rhs.l,
            n: self.n + rhs.n,
        }
    }
}

/// Dense 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Block2(pub [[Complex; 2]; 2]);

impl Block2 {
    pub const ZERO: Block2 = Block2([[ZERO; 2]; 2]);
    pub const IDENTITY: Block2 = Block2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn det(&self) -> Complex {
        let e = &self.0;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    pub fn scale(&self, s: Complex) -> Block2 {
        Block2(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn max_abs_diff(&self, other: &Block2) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }
}

impl Add for Block2 {
    type Output = Block2;
    fn add(self, rhs: Block2) -> Block2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] += rhs.0[r][c];
            }
        }
        out
    }
}

impl Mul for Block2 {
    type Output = Block2;
    fn mul(self, rhs: Block2) -> Block2 {
        let mut out = Block2::ZERO;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = self.0[r][0] * rhs.0[0][c] + self.0[r][1] * rhs.0[1][c];
            }
        }
        out
    }
}

/// The Pauli matrices `σ1, σ2, σ3`.
pub const PAULI: [Block2; 3] = [
    Block2([[ZERO, ONE], [ONE, ZERO]]),
    Block2([[ZERO, Complex::new(0.0, -1.0)], [I, ZERO]]),
    Block2([[ONE, ZERO], [ZERO, Complex::new(-1.0, 0.0)]]),
];

/// Dense 4×4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat4(pub [[Complex; 4]; 4]);

impl Mat4 {
    pub const ZERO: Mat4 = Mat4([[ZERO; 4]; 4]);

    pub fn identity() -> Mat4 {
        let mut m = Mat4::ZERO;
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> Complex) -> Mat4 {
        let mut m = Mat4::ZERO;
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = f(r, c);
            }
        }
        m
    }

    /// The 2×2 block at block coordinates `(br, bc)`.
    pub fn block(&self, br: usize, bc: usize) -> Block2 {
        let mut b = Block2::ZERO;
        for r in 0..2 {
            for c in 0..2 {
                b.0[r][c] = self.0[2 * br + r][2 * bc + c];
            }
        }
        b
    }

    pub fn set_block(&mut self, br: usize, bc: usize, b: &Block2) {
        for r in 0..2 {
            for c in 0..2 {
                self.0[2 * br + r][2 * bc + c] = b.0[r][c];
            }
        }
    }

    pub fn row(&self, i: usize) -> [Complex; 4] {
        self.0[i]
    }

    pub fn col(&self, j: usize) -> [Complex; 4] {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }

    pub fn scale(&self, s: Complex) -> Mat4 {
        Mat4(self.0.map(|row| row.map(|x| x * s)))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        (*self - *other).max_abs()
    }

    /// Largest imaginary part over all entries.
    pub fn max_imag(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|r, c| self.0[r][c] - rhs.0[r][c])
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|r, c| self.0[r][c] + rhs.0[r][c])
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|r, c| (0..4).map(|k| self.0[r][k] * rhs.0[k][c]).sum())
    }
}

/// One row per line; the precision flag applies to every part (default 3).
impl fmt::Display for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = f.precision().unwrap_or(3);
        for (i, row) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            for (j, z) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str("  ")?;
                }
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                write!(f, "{:>w$.p$}{sign}{:.p$}i", z.re, z.im.abs(), w = p + 3)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_layout_round_trips() {
        let names: Vec<String> = Component::all().map(|c| c.to_string()).collect();
        assert_eq!(names[0], "k0");
        assert_eq!(names[5], "m1");
        assert_eq!(names[15], "n3");
        for (i, c) in Component::all().enumerate() {
            assert_eq!(c.flat_index(), i);
            assert_eq!(Component::parse(&c.to_string()), Some(c));
        }
        assert_eq!(Component::parse("q1"), None);
        assert_eq!(Component::parse("k4"), None);
    }

    #[test]
    fn pauli_squares_are_identity() {
        for s in PAULI {
            assert_eq!(s * s, Block2::IDENTITY);
        }
    }

    #[test]
    fn pauli_products_cycle() {
        // σ1σ2 = iσ3 and cyclic permutations.
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            assert_eq!(PAULI[a] * PAULI[b], PAULI[c].scale(I));
            assert_eq!(PAULI[b] * PAULI[a], PAULI[c].scale(-I));
        }
    }
}
