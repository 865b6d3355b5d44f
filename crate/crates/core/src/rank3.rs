//! Rank-3 semigroups: matrices whose row `i` and column `j` vanish.
//!
//! For each of the 16 [`VariantId`]s the vanishing row and column translate
//! into seven linear equations on the parameters (two per touched block,
//! three for the block holding both). The published tables of those
//! equations are carried as data in [`variant_constraints`] and can be
//! checked against [`zero_pattern_constraints`], which derives them from the
//! definition.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::algebra::{assemble, scale_of};
use crate::sampling::{random_complex, SampleRng};
use crate::types::{Complex, Component, Mat4, ParamSet, Slot, I, ONE, ZERO};

/// Zero row `row` and zero column `col` of the assembled matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariantId {
    pub row: usize,
    pub col: usize,
}

impl VariantId {
    pub fn new(row: usize, col: usize) -> Option<VariantId> {
        (row < 4 && col < 4).then_some(VariantId { row, col })
    }

    pub fn all() -> impl Iterator<Item = VariantId> {
        (0..16).map(|i| VariantId {
            row: i / 4,
            col: i % 4,
        })
    }

    /// Position in [`VariantId::all`].
    pub fn ordinal(self) -> usize {
        self.row * 4 + self.col
    }

    /// `"00"` through `"33"`, optionally wrapped in parentheses.
    pub fn parse(s: &str) -> Option<VariantId> {
        let s = s.trim();
        let s = s
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(s);
        let digits: Vec<usize> = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()?;
        match digits[..] {
            [row, col] => VariantId::new(row, col),
            _ => None,
        }
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.row, self.col)
    }
}

impl FromStr for VariantId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        VariantId::parse(s).ok_or_else(|| format!("unknown variant '{s}'"))
    }
}

impl Serialize for VariantId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `lhs = 0` or `lhs = coef · rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equation {
    pub lhs: Component,
    pub rhs: Option<(Complex, Component)>,
}

impl Equation {
    pub fn zero(lhs: Component) -> Equation {
        Equation { lhs, rhs: None }
    }

    pub fn tie(lhs: Component, coef: Complex, rhs: Component) -> Equation {
        Equation {
            lhs,
            rhs: Some((coef, rhs)),
        }
    }

    /// `lhs − coef·rhs` evaluated at `p`.
    pub fn defect(&self, p: &ParamSet) -> Complex {
        match self.rhs {
            None => p[self.lhs],
            Some((c, r)) => p[self.lhs] - c * p[r],
        }
    }

    /// Same equation solved for the later of its two components.
    pub fn normalized(&self) -> Equation {
        match self.rhs {
            Some((c, r)) if r.flat_index() > self.lhs.flat_index() => {
                Equation::tie(r, ONE / c, self.lhs)
            }
            _ => *self,
        }
    }

    /// Parses `"k1=0"`, `"k0=-k3"`, `"n1=i n2"`, `"l1=-i l2"`.
    pub fn parse(s: &str) -> Option<Equation> {
        let (lhs, rhs) = s.split_once('=')?;
        let lhs = Component::parse(lhs.trim())?;
        let rhs: String = rhs.chars().filter(|c| !c.is_whitespace()).collect();
        if rhs == "0" {
            return Some(Equation::zero(lhs));
        }
        let (sign, rest) = match rhs.strip_prefix('-') {
            Some(r) => (-ONE, r),
            None => (ONE, rhs.strip_prefix('+').unwrap_or(&rhs)),
        };
        let (unit, comp) = match rest.strip_prefix('i') {
            Some(r) => (I, r),
            None => (ONE, rest),
        };
        Some(Equation::tie(lhs, sign * unit, Component::parse(comp)?))
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}=", self.lhs)?;
        match self.rhs {
            None => f.write_str("0"),
            Some((c, r)) => {
                let coef = if c == ONE {
                    ""
                } else if c == -ONE {
                    "-"
                } else if c == I {
                    "i "
                } else if c == -I {
                    "-i "
                } else {
                    return write!(f, "({c}) {r}");
                };
                write!(f, "{coef}{r}")
            }
        }
    }
}

/// The equations defining one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantConstraints {
    pub id: VariantId,
    pub equations: Vec<Equation>,
}

impl VariantConstraints {
    /// `‖defects‖ / ‖p‖`.
    pub fn residual(&self, p: &ParamSet) -> f64 {
        let sq: f64 = self.equations.iter().map(|e| e.defect(p).norm_sqr()).sum();
        sq.sqrt() / scale_of(p.norm())
    }

    fn normalized(&self) -> Vec<Equation> {
        let mut eqs: Vec<Equation> = self.equations.iter().map(Equation::normalized).collect();
        eqs.sort_by_key(|e| e.lhs.flat_index());
        eqs
    }

    /// Whether both lists state the same equations, up to order and to
    /// which side each component is written on.
    pub fn equivalent(&self, other: &VariantConstraints) -> bool {
        self.normalized() == other.normalized()
    }

    /// Components not determined by the equations, in canonical order.
    pub fn free_components(&self) -> Vec<Component> {
        let dependent: Vec<Component> = self.normalized().iter().map(|e| e.lhs).collect();
        Component::all().filter(|c| !dependent.contains(c)).collect()
    }

    /// Parameters with the given free components and the dependent ones
    /// filled in.
    pub fn solve(&self, free: &[Complex]) -> ParamSet {
        let names = self.free_components();
        assert_eq!(free.len(), names.len(), "variant {} has {} free components", self.id, names.len());
        let mut p = ParamSet::ZERO;
        for (c, &v) in names.iter().zip(free) {
            p[*c] = v;
        }
        for e in self.normalized() {
            p[e.lhs] = match e.rhs {
                None => ZERO,
                Some((c, r)) => c * p[r],
            };
        }
        p
    }
}

impl fmt::Display for VariantConstraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eqs: Vec<String> = self.equations.iter().map(|e| e.to_string()).collect();
        write!(f, "({}) {}", self.id, eqs.join(", "))
    }
}

const PUBLISHED: [&str; 16] = [
    "k1=0, k2=0, k0=-k3, n0=-n3, l0=-l3, n1=i n2, l1=-i l2",
    "k0=0, k3=0, k1=i k2, l1=i l2, l0=l3, n0=-n3, n1=i n2",
    "n1=0, n2=0, n0=-n3, m0=-m3, m1=-i m2, k0=-k3, k1=i k2",
    "n0=0, n3=0, n1=i n2, m0=m3, m1=i m2, k0=-k3, k1=i k2",
    "k0=0, k3=0, k1=-i k2, l0=-l3, l1=-i l2, n1=-i n2, n0=n3",
    "k1=0, k2=0, k0=k3, l0=l3, l1=i l2, n1=-i n2, n0=n3",
    "n0=0, n3=0, n1=-i n2, m0=-m3, m1=-i m2, k1=-i k2, k0=k3",
    "n1=0, n2=0, n0=n3, m0=m3, m1=i m2, k1=-i k2, k0=k3",
    "l1=0, l2=0, l0=-l3, m0=-m3, m1=i m2, k1=-i k2, k0=-k3",
    "l0=0, l3=0, l1=i l2, m0=-m3, m1=i m2, k1=i k2, k0=k3",
    "m1=0, m2=0, m0=-m3, n0=-n3, n1=-i n2, l1=i l2, l0=-l3",
    "m0=0, m3=0, m1=i m2, n0=n3, n1=i n2, l1=i l2, l0=-l3",
    "l0=0, l3=0, l1=-i l2, k0=-k3, k1=-i k2, m1=-i m2, m0=m3",
    "l1=0, l2=0, l0=l3, k0=k3, k1=i k2, m1=-i m2, m0=m3",
    "m0=0, m3=0, m1=-i m2, l0=l3, l1=-i l2, n1=-i n2, n0=-n3",
    "m1=0, m2=0, m0=m3, l0=l3, l1=-i l2, n1=i n2, n0=n3",
];

/// The published equation list for a variant.
pub fn variant_constraints(id: VariantId) -> &'static VariantConstraints {
    static TABLES: OnceLock<Vec<VariantConstraints>> = OnceLock::new();
    &TABLES.get_or_init(|| {
        VariantId::all()
            .zip(PUBLISHED)
            .map(|(id, line)| VariantConstraints {
                id,
                equations: line
                    .split(',')
                    .map(|e| Equation::parse(e).expect("well-formed table"))
                    .collect(),
            })
            .collect()
    })[id.ordinal()]
}

/// The equations forced by a vanishing row and column, derived from the
/// block form `[[c0+v3, v1−i v2], [v1+i v2, c0−v3]]`.
pub fn zero_pattern_constraints(id: VariantId) -> VariantConstraints {
    let (br, r) = (id.row / 2, id.row % 2);
    let (bc, c) = (id.col / 2, id.col % 2);
    // Local row 0 vanishes: c0 = -v3, v1 = i v2. Row 1: c0 = v3, v1 = -i v2.
    // Local column 0: c0 = -v3, v1 = -i v2. Column 1: c0 = v3, v1 = i v2.
    let row_rel = |r: usize| if r == 0 { (-ONE, I) } else { (ONE, -I) };
    let col_rel = |c: usize| if c == 0 { (-ONE, -I) } else { (ONE, I) };
    let comp = |s: Slot, i: usize| Component::new(s, i);

    let mut equations = Vec::with_capacity(7);
    for s in Slot::ALL {
        let (sr, sc) = s.block_position();
        let rel = match (sr == br, sc == bc) {
            (true, true) => {
                let (s0, t0) = row_rel(r);
                let (s1, t1) = col_rel(c);
                if s0 == s1 {
                    equations.push(Equation::zero(comp(s, 1)));
                    equations.push(Equation::zero(comp(s, 2)));
                    equations.push(Equation::tie(comp(s, 0), s0, comp(s, 3)));
                } else {
                    debug_assert_eq!(t0, t1);
                    equations.push(Equation::zero(comp(s, 0)));
                    equations.push(Equation::zero(comp(s, 3)));
                    equations.push(Equation::tie(comp(s, 1), t0, comp(s, 2)));
                }
                continue;
            }
            (true, false) => row_rel(r),
            (false, true) => col_rel(c),
            (false, false) => continue,
        };
        equations.push(Equation::tie(comp(s, 0), rel.0, comp(s, 3)));
        equations.push(Equation::tie(comp(s, 1), rel.1, comp(s, 2)));
    }
    VariantConstraints { id, equations }
}

/// The nine free components of a variant, in canonical order.
pub fn free_components(id: VariantId) -> Vec<Component> {
    variant_constraints(id).free_components()
}

/// Member of the variant with the given free components
/// (see [`free_components`] for their order).
pub fn construct_variant(id: VariantId, free: &[Complex; 9]) -> ParamSet {
    variant_constraints(id).solve(free)
}

/// Random member. With `real` set the free components follow the reality
/// conditions and the assembled matrix is real.
pub fn random_variant(id: VariantId, rng: &mut SampleRng, real: bool) -> ParamSet {
    let names = free_components(id);
    let mut free = [ZERO; 9];
    for (v, c) in free.iter_mut().zip(&names) {
        *v = if real {
            let x = random_complex(rng).re;
            if c.index == 2 {
                Complex::new(0.0, x)
            } else {
                Complex::new(x, 0.0)
            }
        } else {
            random_complex(rng)
        };
    }
    construct_variant(id, &free)
}

/// Largest entry of row `id.row` and column `id.col`, relative to `‖g‖`.
pub fn variant_residual(id: VariantId, g: &Mat4) -> f64 {
    let worst = g
        .row(id.row)
        .iter()
        .chain(g.col(id.col).iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    worst / scale_of(g.norm())
}

/// Every variant whose row and column vanish to within `tol · ‖g‖`.
pub fn variant_membership(g: &Mat4, tol: f64) -> Vec<VariantId> {
    VariantId::all()
        .filter(|&id| variant_residual(id, g) <= tol)
        .collect()
}

/// Cross-check of one published table against the definition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCheck {
    pub id: VariantId,
    /// The published equations state the derived ones.
    pub equivalent: bool,
    /// Worst [`variant_residual`] of members built from the published
    /// equations.
    pub residual: f64,
}

/// Compares the published table with [`zero_pattern_constraints`] and
/// measures the zero pattern of members built from the table.
pub fn table_consistency(id: VariantId, rng: &mut SampleRng) -> TableCheck {
    let published = variant_constraints(id);
    let derived = zero_pattern_constraints(id);
    let residual = (0..20)
        .map(|_| {
            let free: Vec<Complex> = (0..9).map(|_| random_complex(rng)).collect();
            variant_residual(id, &assemble(&published.solve(&free)))
        })
        .fold(0.0, f64::max);
    TableCheck {
        id,
        equivalent: published.equivalent(&derived),
        residual,
    }
}
