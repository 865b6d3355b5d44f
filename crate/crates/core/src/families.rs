//! Families of matrices cut out by linear restrictions on `(k, m, l, n)`.
//!
//! Each [`FamilyTag`] names one solution of the linear ansätze tying the
//! dependent parameter vectors to one, two or three free ("base") vectors.
//! A family together with fixed values of its constants is closed under
//! [`compose`]; most families consist of rank-2 matrices, a few are groups.
//!
//! The constraint tables live in [`descriptor`]. Everything else here
//! (construction, membership, closure and rank checks, the rank-1
//! restriction) is driven by those tables.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::algebra::{
    assemble, compose, det_block, is_real_conditions, numeric_rank, scale_of, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::sampling::{random_constant, random_cvec4, rng_from_seed, SampleRng};
use crate::types::{CVec4, Complex, Component, ParamSet, Slot, I, ONE, ZERO};

/// The 39 labeled families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyTag {
    K1,
    K2,
    K3,
    K4,
    K5,
    K6,
    K7,
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    N1,
    N2,
    N3,
    N4,
    L1,
    L2,
    L3,
    L4,
    KM1,
    KM2,
    KM3,
    KM4,
    KM5,
    LN1,
    LN2,
    KN1,
    KN2,
    ML1,
    ML2,
    KMN1,
    KMN2,
    KML1,
    KML2,
    NLK1,
    NLM1,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 39] = {
        use FamilyTag::*;
        [
            K1, K2, K3, K4, K5, K6, K7, M1, M2, M3, M4, M5, M6, M7, N1, N2, N3, N4, L1, L2, L3,
            L4, KM1, KM2, KM3, KM4, KM5, LN1, LN2, KN1, KN2, ML1, ML2, KMN1, KMN2, KML1, KML2,
            NLK1, NLM1,
        ]
    };

    /// Display name, e.g. `"KM-3"`.
    pub fn name(self) -> &'static str {
        use FamilyTag::*;
        match self {
            K1 => "K-1",
            K2 => "K-2",
            K3 => "K-3",
            K4 => "K-4",
            K5 => "K-5",
            K6 => "K-6",
            K7 => "K-7",
            M1 => "M-1",
            M2 => "M-2",
            M3 => "M-3",
            M4 => "M-4",
            M5 => "M-5",
            M6 => "M-6",
            M7 => "M-7",
            N1 => "N-1",
            N2 => "N-2",
            N3 => "N-3",
            N4 => "N-4",
            L1 => "L-1",
            L2 => "L-2",
            L3 => "L-3",
            L4 => "L-4",
            KM1 => "KM-1",
            KM2 => "KM-2",
            KM3 => "KM-3",
            KM4 => "KM-4",
            KM5 => "KM-5",
            LN1 => "LN-1",
            LN2 => "LN-2",
            KN1 => "KN-1",
            KN2 => "KN-2",
            ML1 => "ML-1",
            ML2 => "ML-2",
            KMN1 => "KMN-1",
            KMN2 => "KMN-2",
            KML1 => "KML-1",
            KML2 => "KML-2",
            NLK1 => "NLK-1",
            NLM1 => "NLM-1",
        }
    }

    /// Accepts `"K-5"`, `"K5"` and lowercase spellings.
    pub fn from_name(s: &str) -> Option<FamilyTag> {
        let canon: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect::<String>()
            .to_ascii_uppercase();
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.name().replace('-', "") == canon)
    }

    /// Position in [`FamilyTag::ALL`].
    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn bases(self) -> &'static [Slot] {
        &descriptor(self).bases
    }

    /// Rank the accompanying prose attributes to the family (4 for groups).
    pub fn paper_rank(self) -> usize {
        use FamilyTag::*;
        match self {
            K2 | M2 | KM1 | KN1 | ML1 | KMN1 | KML1 => 4,
            _ => 2,
        }
    }

    /// Generic numeric rank of a member, as established by sampling.
    pub fn generic_rank(self) -> usize {
        use FamilyTag::*;
        match self {
            K2 | M2 | KM1 | KM2 | KM4 | KM5 | KN2 | ML2 | KMN1 | KMN2 | KML1 | KML2 | NLK1
            | NLM1 => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FamilyTag::from_name(s).ok_or_else(|| format!("unknown family tag '{s}'"))
    }
}

impl Serialize for FamilyTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Scalar constants of the linear ansätze.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Const {
    A,
    B,
    C,
    D,
    Alpha,
    Beta,
    S,
    T,
}

impl Const {
    pub const ALL: [Const; 8] = [
        Const::A,
        Const::B,
        Const::C,
        Const::D,
        Const::Alpha,
        Const::Beta,
        Const::S,
        Const::T,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Const::A => "A",
            Const::B => "B",
            Const::C => "C",
            Const::D => "D",
            Const::Alpha => "alpha",
            Const::Beta => "beta",
            Const::S => "s",
            Const::T => "t",
        }
    }

    pub fn parse(s: &str) -> Option<Const> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Some(Const::A),
            "b" => Some(Const::B),
            "c" => Some(Const::C),
            "d" => Some(Const::D),
            "alpha" | "α" => Some(Const::Alpha),
            "beta" | "β" => Some(Const::Beta),
            "s" => Some(Const::S),
            "t" => Some(Const::T),
            _ => None,
        }
    }

    fn ordinal(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Values of the constants a family uses; unused ones are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FamilyConstants {
    values: [Option<Complex>; 8],
}

impl FamilyConstants {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, c: Const, value: impl Into<Complex>) -> Self {
        self.set(c, value.into());
        self
    }

    pub fn get(&self, c: Const) -> Option<Complex> {
        self.values[c.ordinal()]
    }

    pub fn set(&mut self, c: Const, value: Complex) {
        self.values[c.ordinal()] = Some(value);
    }

    pub fn remove(&mut self, c: Const) {
        self.values[c.ordinal()] = None;
    }

    /// Present constants in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (Const, Complex)> + '_ {
        Const::ALL
            .into_iter()
            .filter_map(|c| self.get(c).map(|v| (c, v)))
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(Option::is_none)
    }

    pub fn all_real(&self) -> bool {
        self.iter().all(|(_, v)| v.im == 0.0)
    }
}

impl Serialize for FamilyConstants {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        for (c, v) in self.iter() {
            map.serialize_entry(c.name(), &[v.re, v.im])?;
        }
        map.end()
    }
}

/// `factor · Π cᵉ` over the constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub factor: f64,
    pub exponents: [i8; 8],
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        factor: 1.0,
        exponents: [0; 8],
    };

    pub fn of(c: Const) -> Monomial {
        let mut exponents = [0; 8];
        exponents[c.ordinal()] = 1;
        Monomial {
            factor: 1.0,
            exponents,
        }
    }

    pub fn inv(self) -> Monomial {
        Monomial {
            factor: 1.0 / self.factor,
            exponents: self.exponents.map(|e| -e),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn exponent(&self, c: Const) -> i8 {
        self.exponents[c.ordinal()]
    }

    /// Constants involved, with their exponents.
    pub fn powers(&self) -> impl Iterator<Item = (Const, i8)> + '_ {
        Const::ALL
            .into_iter()
            .map(|c| (c, self.exponent(c)))
            .filter(|(_, e)| *e != 0)
    }

    /// `None` when a constant it needs is missing.
    pub fn eval(&self, consts: &FamilyConstants) -> Option<Complex> {
        let mut acc = Complex::from(self.factor);
        for (c, e) in self.powers() {
            acc *= consts.get(c)?.powi(i32::from(e));
        }
        Some(acc)
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    fn mul(self, rhs: Monomial) -> Monomial {
        let mut exponents = self.exponents;
        for (e, r) in exponents.iter_mut().zip(rhs.exponents) {
            *e += r;
        }
        Monomial {
            factor: self.factor * rhs.factor,
            exponents,
        }
    }
}

impl Neg for Monomial {
    type Output = Monomial;
    fn neg(self) -> Monomial {
        Monomial {
            factor: -self.factor,
            ..self
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "{}", self.factor);
        }
        if self.factor == -1.0 {
            f.write_str("-")?;
        } else if self.factor != 1.0 {
            write!(f, "{}·", self.factor)?;
        }
        let parts: Vec<String> = self
            .powers()
            .map(|(c, e)| {
                if e == 1 {
                    c.name().to_string()
                } else {
                    format!("{}^{}", c.name(), e)
                }
            })
            .collect();
        f.write_str(&parts.join("·"))
    }
}

/// Which components of a 4-vector a rule addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    /// The scalar component `c0`.
    Scalar,
    /// The vector part `(c1, c2, c3)`, all three with the same coefficients.
    Vector,
}

impl Part {
    pub fn indices(self) -> &'static [usize] {
        match self {
            Part::Scalar => &[0],
            Part::Vector => &[1, 2, 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: Monomial,
    pub source: Slot,
}

/// `target.part = Σ coef · source.part`. Free base vectors carry the
/// identity rule `x = 1·x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub target: Slot,
    pub part: Part,
    pub terms: Vec<Term>,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = match self.part {
            Part::Scalar => "0",
            Part::Vector => "",
        };
        write!(f, "{}{} = ", self.target, suffix)?;
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            let coef = term.coef.to_string();
            let (sign, body) = match coef.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", coef),
            };
            if i == 0 {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if body != "1" {
                write!(f, "{body}·")?;
            }
            write!(f, "{}{}", term.source, suffix)?;
        }
        Ok(())
    }
}

/// Complete rule set of one family: every component of the parameter set
/// is covered by exactly one rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintDescriptor {
    pub tag: FamilyTag,
    pub bases: Vec<Slot>,
    pub constants: Vec<Const>,
    /// Constants whose inverse appears; they must be nonzero.
    pub inverted: Vec<Const>,
    pub rules: Vec<Rule>,
}

impl ConstraintDescriptor {
    /// True when some dependent vector ties its scalar and vector parts to
    /// the base with different coefficients.
    pub fn is_split(&self) -> bool {
        Slot::ALL.iter().any(|&slot| {
            let scalar = self.rule(slot, Part::Scalar);
            let vector = self.rule(slot, Part::Vector);
            scalar.terms != vector.terms
        })
    }

    pub fn rule(&self, slot: Slot, part: Part) -> &Rule {
        self.rules
            .iter()
            .find(|r| r.target == slot && r.part == part)
            .expect("descriptor covers every component")
    }

    /// Checks that exactly the family's constants are present and the
    /// inverted ones are nonzero.
    pub fn validate(&self, consts: &FamilyConstants) -> Result<()> {
        let tag = self.tag;
        for &c in &self.constants {
            match consts.get(c) {
                None => return Err(Error::MissingConstant { tag, constant: c }),
                Some(v) if self.inverted.contains(&c) && v == ZERO => {
                    return Err(Error::ZeroConstantRequiringInverse { tag, constant: c })
                }
                Some(_) => {}
            }
        }
        if let Some((c, _)) = consts.iter().find(|(c, _)| !self.constants.contains(c)) {
            return Err(Error::UnexpectedConstant { tag, constant: c });
        }
        Ok(())
    }

    /// Evaluates every rule, reading base vectors from `base`. Constants
    /// must already be validated.
    pub fn evaluate(&self, consts: &FamilyConstants, base: &ParamSet) -> ParamSet {
        let mut out = ParamSet::ZERO;
        for rule in &self.rules {
            let coefs: Vec<Complex> = rule
                .terms
                .iter()
                .map(|t| t.coef.eval(consts).expect("constants validated"))
                .collect();
            for &idx in rule.part.indices() {
                let value = rule
                    .terms
                    .iter()
                    .zip(&coefs)
                    .map(|(t, &c)| c * base[Component::new(t.source, idx)])
                    .sum();
                out[Component::new(rule.target, idx)] = value;
            }
        }
        out
    }

    fn base_params(&self, base: &[CVec4]) -> Result<ParamSet> {
        if base.len() != self.bases.len() {
            return Err(Error::BaseCount {
                tag: self.tag,
                expected: self.bases.len(),
                got: base.len(),
            });
        }
        let mut p = ParamSet::ZERO;
        for (&slot, v) in self.bases.iter().zip(base) {
            *p.get_mut(slot) = *v;
        }
        Ok(p)
    }

    /// A copy with one rule perturbed so that closure no longer holds.
    /// Used to check that the verification suite catches broken tables.
    pub fn corrupted(&self) -> ConstraintDescriptor {
        let mut out = self.clone();
        let first_base = self.bases[0];
        if let Some(rule) = out
            .rules
            .iter_mut()
            .find(|r| !self.bases.contains(&r.target) && r.part == Part::Scalar)
        {
            rule.terms.push(Term {
                coef: Monomial {
                    factor: 2.0,
                    exponents: [0; 8],
                },
                source: first_base,
            });
        }
        out
    }
}

impl fmt::Display for ConstraintDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bases: Vec<String> = self.bases.iter().map(|s| s.to_string()).collect();
        write!(f, "{} [free: {}]", self.tag, bases.join(", "))?;
        for rule in &self.rules {
            if self.bases.contains(&rule.target) {
                continue;
            }
            write!(f, "; {rule}")?;
        }
        Ok(())
    }
}

struct Spec {
    tag: FamilyTag,
    bases: Vec<Slot>,
    rules: Vec<Rule>,
}

fn term(coef: Monomial, source: Slot) -> Term {
    Term { coef, source }
}

impl Spec {
    fn new(tag: FamilyTag, bases: &[Slot]) -> Spec {
        let rules = bases
            .iter()
            .flat_map(|&s| {
                [Part::Scalar, Part::Vector].map(|part| Rule {
                    target: s,
                    part,
                    terms: vec![term(Monomial::ONE, s)],
                })
            })
            .collect();
        Spec {
            tag,
            bases: bases.to_vec(),
            rules,
        }
    }

    fn both(self, target: Slot, terms: Vec<Term>) -> Spec {
        self.split(target, terms.clone(), terms)
    }

    fn split(mut self, target: Slot, scalar: Vec<Term>, vector: Vec<Term>) -> Spec {
        self.rules.push(Rule {
            target,
            part: Part::Scalar,
            terms: scalar,
        });
        self.rules.push(Rule {
            target,
            part: Part::Vector,
            terms: vector,
        });
        self
    }

    fn zero(self, target: Slot) -> Spec {
        self.both(target, Vec::new())
    }

    fn build(mut self) -> ConstraintDescriptor {
        self.rules.sort_by_key(|r| (r.target, r.part == Part::Vector));
        for slot in Slot::ALL {
            let n = self.rules.iter().filter(|r| r.target == slot).count();
            assert_eq!(n, 2, "{}: slot {slot} covered {n} times", self.tag);
        }
        let mut constants = Vec::new();
        let mut inverted = Vec::new();
        for t in self.rules.iter().flat_map(|r| &r.terms) {
            for (c, e) in t.coef.powers() {
                if !constants.contains(&c) {
                    constants.push(c);
                }
                if e < 0 && !inverted.contains(&c) {
                    inverted.push(c);
                }
            }
        }
        constants.sort();
        inverted.sort();
        ConstraintDescriptor {
            tag: self.tag,
            bases: self.bases,
            constants,
            inverted,
            rules: self.rules,
        }
    }
}

fn build_descriptor(tag: FamilyTag) -> ConstraintDescriptor {
    use FamilyTag::*;
    use Slot::{K, L, M, N};

    let one = Monomial::ONE;
    let a = Monomial::of(Const::A);
    let b = Monomial::of(Const::B);
    let c = Monomial::of(Const::C);
    let d = Monomial::of(Const::D);
    let al = Monomial::of(Const::Alpha);
    let be = Monomial::of(Const::Beta);
    let t = Monomial::of(Const::T);
    let x = term;

    let spec = match tag {
        // K & 0 / 0 & 0
        K1 => Spec::new(tag, &[K]).zero(N).zero(L).zero(M),
        // K & 0 / 0 & K
        K2 => Spec::new(tag, &[K]).zero(N).zero(L).both(M, vec![x(one, K)]),
        // K & 0 / DK & 0
        K3 => Spec::new(tag, &[K]).zero(N).both(L, vec![x(d, K)]).zero(M),
        // K & AK / 0 & 0
        K4 => Spec::new(tag, &[K]).both(N, vec![x(a, K)]).zero(L).zero(M),
        // K & AK / DK & ADK
        K5 => Spec::new(tag, &[K])
            .both(N, vec![x(a, K)])
            .both(L, vec![x(d, K)])
            .both(M, vec![x(a * d, K)]),
        // k0+kσ & A(k0+kσ) / t k0 - A⁻¹kσ & At k0 - kσ
        K6 => Spec::new(tag, &[K])
            .both(N, vec![x(a, K)])
            .split(L, vec![x(t, K)], vec![x(-a.inv(), K)])
            .split(M, vec![x(a * t, K)], vec![x(-one, K)]),
        // k0+kσ & αk0 + A kσ / -A⁻¹(k0+kσ) & -A⁻¹αk0 - kσ
        K7 => Spec::new(tag, &[K])
            .split(N, vec![x(al, K)], vec![x(a, K)])
            .both(L, vec![x(-a.inv(), K)])
            .split(M, vec![x(-(a.inv() * al), K)], vec![x(-one, K)]),
        // 0 & 0 / 0 & M
        M1 => Spec::new(tag, &[M]).zero(K).zero(N).zero(L),
        // M & 0 / 0 & M
        M2 => Spec::new(tag, &[M]).both(K, vec![x(one, M)]).zero(N).zero(L),
        // 0 & 0 / DM & M
        M3 => Spec::new(tag, &[M]).zero(K).zero(N).both(L, vec![x(d, M)]),
        // 0 & AM / 0 & M
        M4 => Spec::new(tag, &[M]).zero(K).both(N, vec![x(a, M)]).zero(L),
        // At m0 - mσ & A(m0+mσ) / t m0 - A⁻¹mσ & m0+mσ
        M5 => Spec::new(tag, &[M])
            .split(K, vec![x(a * t, M)], vec![x(-one, M)])
            .both(N, vec![x(a, M)])
            .split(L, vec![x(t, M)], vec![x(-a.inv(), M)]),
        // -αA⁻¹m0 - mσ & αm0 + A mσ / -A⁻¹(m0+mσ) & m0+mσ
        M6 => Spec::new(tag, &[M])
            .split(K, vec![x(-(al * a.inv()), M)], vec![x(-one, M)])
            .split(N, vec![x(al, M)], vec![x(a, M)])
            .both(L, vec![x(-a.inv(), M)]),
        // ADM & AM / DM & M
        M7 => Spec::new(tag, &[M])
            .both(K, vec![x(a * d, M)])
            .both(N, vec![x(a, M)])
            .both(L, vec![x(d, M)]),
        // AN & N / 0 & 0
        N1 => Spec::new(tag, &[N]).both(K, vec![x(a, N)]).zero(L).zero(M),
        // AN & N / A²N & AN
        N2 => Spec::new(tag, &[N])
            .both(K, vec![x(a, N)])
            .both(L, vec![x(a * a, N)])
            .both(M, vec![x(a, N)]),
        // αn0 + A nσ & n0+nσ / -αA n0 - A² nσ & -A(n0+nσ)
        N3 => Spec::new(tag, &[N])
            .split(K, vec![x(al, N)], vec![x(a, N)])
            .split(L, vec![x(-(al * a), N)], vec![x(-(a * a), N)])
            .both(M, vec![x(-a, N)]),
        // A(n0+nσ) & n0+nσ / βA n0 - A² nσ & β n0 - A nσ
        N4 => Spec::new(tag, &[N])
            .both(K, vec![x(a, N)])
            .split(L, vec![x(be * a, N)], vec![x(-(a * a), N)])
            .split(M, vec![x(be, N)], vec![x(-a, N)]),
        // AL & 0 / L & 0
        L1 => Spec::new(tag, &[L]).both(K, vec![x(a, L)]).zero(N).zero(M),
        // AL & A²L / L & AL
        L2 => Spec::new(tag, &[L])
            .both(K, vec![x(a, L)])
            .both(N, vec![x(a * a, L)])
            .both(M, vec![x(a, L)]),
        // αl0 + A lσ & -αA l0 - A² lσ / l0+lσ & -A(l0+lσ)
        L3 => Spec::new(tag, &[L])
            .split(K, vec![x(al, L)], vec![x(a, L)])
            .split(N, vec![x(-(al * a), L)], vec![x(-(a * a), L)])
            .both(M, vec![x(-a, L)]),
        // A(l0+lσ) & βA l0 - A² lσ / l0+lσ & β l0 - A lσ
        L4 => Spec::new(tag, &[L])
            .both(K, vec![x(a, L)])
            .split(N, vec![x(be * a, L)], vec![x(-(a * a), L)])
            .split(M, vec![x(be, L)], vec![x(-a, L)]),
        // K & 0 / 0 & M
        KM1 => Spec::new(tag, &[K, M]).zero(N).zero(L),
        // K & 0 / D(M-K) & M
        KM2 => Spec::new(tag, &[K, M])
            .zero(N)
            .both(L, vec![x(d, M), x(-d, K)]),
        // K & BM / B⁻¹K & M
        KM3 => Spec::new(tag, &[K, M])
            .both(N, vec![x(b, M)])
            .both(L, vec![x(b.inv(), K)]),
        // K & A(K-M) / 0 & M
        KM4 => Spec::new(tag, &[K, M])
            .both(N, vec![x(a, K), x(-a, M)])
            .zero(L),
        // K & A(K-M) / C(K-M) & M
        KM5 => Spec::new(tag, &[K, M])
            .both(N, vec![x(a, K), x(-a, M)])
            .both(L, vec![x(c, K), x(-c, M)]),
        // AL & N / L & A⁻¹N
        LN1 => Spec::new(tag, &[L, N])
            .both(K, vec![x(a, L)])
            .both(M, vec![x(a.inv(), N)]),
        // BN & N / L & B⁻¹L
        LN2 => Spec::new(tag, &[L, N])
            .both(K, vec![x(b, N)])
            .both(M, vec![x(b.inv(), L)]),
        // K & N / AK & AN
        KN1 => Spec::new(tag, &[K, N])
            .both(L, vec![x(a, K)])
            .both(M, vec![x(a, N)]),
        // K & N / 0 & K
        KN2 => Spec::new(tag, &[K, N]).zero(L).both(M, vec![x(one, K)]),
        // AL & AM / L & M
        ML1 => Spec::new(tag, &[M, L])
            .both(K, vec![x(a, L)])
            .both(N, vec![x(a, M)]),
        // M & 0 / L & M
        ML2 => Spec::new(tag, &[M, L]).both(K, vec![x(one, M)]).zero(N),
        // K & N / 0 & M
        KMN1 => Spec::new(tag, &[K, M, N]).zero(L),
        // K & N / -K+M+N & M
        KMN2 => Spec::new(tag, &[K, M, N]).both(L, vec![x(-one, K), x(one, M), x(one, N)]),
        // K & 0 / L & M
        KML1 => Spec::new(tag, &[K, M, L]).zero(N),
        // K & -M+K+L / L & M
        KML2 => Spec::new(tag, &[K, M, L]).both(N, vec![x(-one, M), x(one, K), x(one, L)]),
        // K & N / L & K + AN - A⁻¹L
        NLK1 => Spec::new(tag, &[K, N, L]).both(
            M,
            vec![x(one, K), x(a, N), x(-a.inv(), L)],
        ),
        // M + AL - A⁻¹N & N / L & M
        NLM1 => Spec::new(tag, &[M, N, L]).both(
            K,
            vec![x(one, M), x(a, L), x(-a.inv(), N)],
        ),
    };
    spec.build()
}

/// The standard descriptor set, indexed by tag.
#[derive(Debug, Clone)]
pub struct DescriptorTable {
    descriptors: Vec<ConstraintDescriptor>,
}

impl DescriptorTable {
    pub fn standard() -> &'static DescriptorTable {
        static TABLE: OnceLock<DescriptorTable> = OnceLock::new();
        TABLE.get_or_init(|| DescriptorTable {
            descriptors: FamilyTag::ALL.into_iter().map(build_descriptor).collect(),
        })
    }

    pub fn get(&self, tag: FamilyTag) -> &ConstraintDescriptor {
        &self.descriptors[tag.ordinal()]
    }

    /// A copy of this table with the descriptor of `tag` corrupted.
    pub fn with_fault(&self, tag: FamilyTag) -> DescriptorTable {
        let mut out = self.clone();
        out.descriptors[tag.ordinal()] = self.get(tag).corrupted();
        out
    }
}

/// The constraint descriptor of a family.
pub fn descriptor(tag: FamilyTag) -> &'static ConstraintDescriptor {
    DescriptorTable::standard().get(tag)
}

/// One concrete member of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyInstance {
    pub tag: FamilyTag,
    pub constants: FamilyConstants,
    pub base: Vec<CVec4>,
}

impl FamilyInstance {
    pub fn new(tag: FamilyTag, constants: FamilyConstants, base: Vec<CVec4>) -> Self {
        FamilyInstance {
            tag,
            constants,
            base,
        }
    }

    /// Random constants and base vectors.
    pub fn random(tag: FamilyTag, rng: &mut SampleRng, real: bool) -> Self {
        let constants = random_constants(tag, rng, real);
        Self::random_with(tag, constants, rng, real)
    }

    /// Random base vectors for fixed constants.
    pub fn random_with(
        tag: FamilyTag,
        constants: FamilyConstants,
        rng: &mut SampleRng,
        real: bool,
    ) -> Self {
        let base = tag.bases().iter().map(|_| random_cvec4(rng, real)).collect();
        FamilyInstance::new(tag, constants, base)
    }

    pub fn materialize(&self) -> Result<ParamSet> {
        construct(self.tag, &self.constants, &self.base)
    }
}

/// Draws every constant the family uses from the `[0.5, 2]` annulus.
pub fn random_constants(tag: FamilyTag, rng: &mut SampleRng, real: bool) -> FamilyConstants {
    let mut out = FamilyConstants::new();
    for &c in &descriptor(tag).constants {
        out.set(c, random_constant(rng, real));
    }
    out
}

/// Parameters of the family member with the given constants and base vectors.
pub fn construct(tag: FamilyTag, constants: &FamilyConstants, base: &[CVec4]) -> Result<ParamSet> {
    construct_with(descriptor(tag), constants, base)
}

pub fn construct_with(
    desc: &ConstraintDescriptor,
    constants: &FamilyConstants,
    base: &[CVec4],
) -> Result<ParamSet> {
    desc.validate(constants)?;
    let p = desc.base_params(base)?;
    Ok(desc.evaluate(constants, &p))
}

/// Relative residual of `p` against the family with the constants pinned.
pub fn residual_with(tag: FamilyTag, constants: &FamilyConstants, p: &ParamSet) -> Result<f64> {
    pinned_residual(descriptor(tag), constants, p)
}

fn pinned_residual(
    desc: &ConstraintDescriptor,
    constants: &FamilyConstants,
    p: &ParamSet,
) -> Result<f64> {
    desc.validate(constants)?;
    let recon = desc.evaluate(constants, p);
    Ok((*p - recon).norm() / scale_of(p.norm()))
}

/// A successful membership test.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub tag: FamilyTag,
    /// Recovered values of the determinate constants.
    pub recovered: FamilyConstants,
    /// Constants the matrix does not determine (their base factors vanish).
    pub indeterminate: Vec<Const>,
    pub residual: f64,
}

impl Serialize for Membership {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Constants<'a>(&'a Membership);
        impl Serialize for Constants<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let m = self.0;
                let mut map = s.serialize_map(None)?;
                for &c in &descriptor(m.tag).constants {
                    let v = m.recovered.get(c).map(|v| [v.re, v.im]);
                    map.serialize_entry(c.name(), &v)?;
                }
                map.end()
            }
        }
        let mut st = s.serialize_struct("Membership", 3)?;
        st.serialize_field("tag", &self.tag)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("constants", &Constants(self))?;
        st.end()
    }
}

struct Fit {
    constants: FamilyConstants,
    indeterminate: Vec<Const>,
    residual: f64,
}

/// Fits the family's constants to `p` and measures the relative residual.
///
/// Every rule is linear in the distinct constant monomials (`A`, `A⁻¹`,
/// `AD`, ...), so those are solved for jointly by least squares over all 16
/// component equations. Constants are then read back from the monomials and
/// the residual is evaluated with the consistent constants.
fn fit(desc: &ConstraintDescriptor, p: &ParamSet) -> Option<Fit> {
    let scale = scale_of(p.norm());

    let mut keys: Vec<[i8; 8]> = Vec::new();
    for t in desc.rules.iter().flat_map(|r| &r.terms) {
        if !t.coef.is_constant() && !keys.contains(&t.coef.exponents) {
            keys.push(t.coef.exponents);
        }
    }

    let mut rows: Vec<Vec<Complex>> = Vec::with_capacity(16);
    let mut rhs: Vec<Complex> = Vec::with_capacity(16);
    for rule in &desc.rules {
        for &idx in rule.part.indices() {
            let mut row = vec![ZERO; keys.len()];
            let mut r = p[Component::new(rule.target, idx)];
            for t in &rule.terms {
                let src = p[Component::new(t.source, idx)] * t.coef.factor;
                if t.coef.is_constant() {
                    r -= src;
                } else {
                    let j = keys.iter().position(|k| *k == t.coef.exponents).unwrap();
                    row[j] += src;
                }
            }
            rows.push(row);
            rhs.push(r);
        }
    }

    let determinate: Vec<usize> = (0..keys.len())
        .filter(|&j| rows.iter().map(|r| r[j].norm_sqr()).sum::<f64>().sqrt() > 1e-12 * scale)
        .collect();

    let mut mono_values: Vec<([i8; 8], Complex)> = Vec::new();
    if !determinate.is_empty() {
        let a = DMatrix::from_fn(rows.len(), determinate.len(), |i, j| rows[i][determinate[j]]);
        let b = DVector::from_vec(rhs);
        let svd = a.svd(true, true);
        let largest = svd.singular_values.max();
        let sol = svd.solve(&b, 1e-13 * largest).ok()?;
        for (j, &col) in determinate.iter().enumerate() {
            mono_values.push((keys[col], sol[j]));
        }
    }

    // Read constants back from monomials with a single unknown factor of
    // exponent ±1, iterating until nothing new is learned.
    let mut known = FamilyConstants::new();
    loop {
        let mut progress = false;
        for (exps, value) in &mono_values {
            let mono = Monomial {
                factor: 1.0,
                exponents: *exps,
            };
            let unknown: Vec<(Const, i8)> =
                mono.powers().filter(|(c, _)| known.get(*c).is_none()).collect();
            let [(c, e)] = unknown[..] else { continue };
            if e.abs() != 1 {
                continue;
            }
            let mut rest = ONE;
            for (k, ke) in mono.powers().filter(|(k, _)| *k != c) {
                rest *= known.get(k).unwrap().powi(i32::from(ke));
            }
            let power = value / rest;
            let v = if e == 1 { power } else { ONE / power };
            if !v.is_finite() {
                return None;
            }
            known.set(c, v);
            progress = true;
        }
        if !progress {
            break;
        }
    }

    let mut indeterminate = Vec::new();
    let mut eval_consts = FamilyConstants::new();
    for &c in &desc.constants {
        match known.get(c) {
            Some(v) => {
                if desc.inverted.contains(&c) && v == ZERO {
                    return None;
                }
                eval_consts.set(c, v);
            }
            None => {
                indeterminate.push(c);
                eval_consts.set(c, ONE);
            }
        }
    }
    let recon = desc.evaluate(&eval_consts, p);
    let residual = (*p - recon).norm() / scale;
    residual.is_finite().then_some(Fit {
        constants: known,
        indeterminate,
        residual,
    })
}

/// Tests whether `p` belongs to the family, recovering its constants.
///
/// `tol` bounds the residual relative to `‖p‖`.
pub fn membership(tag: FamilyTag, p: &ParamSet, tol: f64) -> Option<Membership> {
    membership_with(descriptor(tag), p, tol)
}

pub fn membership_with(desc: &ConstraintDescriptor, p: &ParamSet, tol: f64) -> Option<Membership> {
    let f = fit(desc, p)?;
    (f.residual <= tol).then_some(Membership {
        tag: desc.tag,
        recovered: f.constants,
        indeterminate: f.indeterminate,
        residual: f.residual,
    })
}

/// Outcome of a passing [`closure_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureReport {
    pub tag: FamilyTag,
    pub samples: usize,
    /// Worst residual of a product against the family with the same constants.
    pub worst_residual: f64,
    /// Constants recovered from the first product, for comparison with the
    /// fixed ones.
    pub product_constants: FamilyConstants,
    /// Largest relative imaginary entry seen among factors and products.
    pub worst_imag: f64,
}

/// Composes `samples` pairs of random members sharing `constants` and
/// checks each product against the same family with the same constants.
pub fn closure_check(
    tag: FamilyTag,
    constants: &FamilyConstants,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ClosureReport> {
    let mut rng = rng_from_seed(seed);
    closure_check_with(descriptor(tag), constants, samples, &mut rng, tol, false)
}

pub fn closure_check_with(
    desc: &ConstraintDescriptor,
    constants: &FamilyConstants,
    samples: usize,
    rng: &mut SampleRng,
    tol: f64,
    real: bool,
) -> Result<ClosureReport> {
    desc.validate(constants)?;
    let mut worst_residual = 0.0f64;
    let mut worst_imag = 0.0f64;
    let mut product_constants = None;
    for _ in 0..samples.max(1) {
        let left = random_member(desc, constants, rng, real);
        let right = random_member(desc, constants, rng, real);
        let product = compose(&left, &right);
        let residual = pinned_residual(desc, constants, &product)?;
        worst_residual = worst_residual.max(residual);
        if residual > tol {
            return Err(Error::ClosureViolation {
                tag: desc.tag,
                residual,
                left: Box::new(left),
                right: Box::new(right),
            });
        }
        for q in [&left, &right, &product] {
            let g = assemble(q);
            worst_imag = worst_imag.max(g.max_imag() / scale_of(g.norm()));
        }
        if product_constants.is_none() {
            product_constants = fit(desc, &product).map(|f| f.constants);
        }
    }
    Ok(ClosureReport {
        tag: desc.tag,
        samples: samples.max(1),
        worst_residual,
        product_constants: product_constants.unwrap_or_default(),
        worst_imag,
    })
}

pub(crate) fn random_member(
    desc: &ConstraintDescriptor,
    constants: &FamilyConstants,
    rng: &mut SampleRng,
    real: bool,
) -> ParamSet {
    let mut base = ParamSet::ZERO;
    for &slot in &desc.bases {
        *base.get_mut(slot) = random_cvec4(rng, real);
    }
    desc.evaluate(constants, &base)
}

/// Number of random instances [`rank_profile`] samples.
pub const RANK_PROFILE_SAMPLES: usize = 20;

/// Maximum numeric rank over random members with random constants.
pub fn rank_profile(tag: FamilyTag, seed: u64) -> usize {
    let mut rng = rng_from_seed(seed);
    rank_profile_with(descriptor(tag), RANK_PROFILE_SAMPLES, &mut rng, false)
}

pub fn rank_profile_with(
    desc: &ConstraintDescriptor,
    samples: usize,
    rng: &mut SampleRng,
    real: bool,
) -> usize {
    (0..samples)
        .map(|_| {
            let mut constants = FamilyConstants::new();
            for &c in &desc.constants {
                constants.set(c, random_constant(rng, real));
            }
            let p = random_member(desc, &constants, rng, real);
            numeric_rank(&assemble(&p), DEFAULT_TOL)
        })
        .max()
        .unwrap_or(0)
}

/// Collapses a member of a rank-2 family to rank ≤ 1 by making the base
/// block singular.
///
/// For families whose scalar and vector parts follow the same pattern the
/// scalar part becomes the principal root `c0 = sqrt(v·v)`. For the split
/// families the scalar part is zeroed and the vector part made null
/// (`v2 = i·sqrt(v1² + v3²)`), which makes every block singular; the same
/// route is taken for a reality-conditioned base with `v·v < 0`. Additional
/// base vectors are replaced by their projection onto the first one.
pub fn rank1_restrict(instance: &FamilyInstance) -> Result<FamilyInstance> {
    let tag = instance.tag;
    let rank = tag.generic_rank();
    if rank != 2 {
        return Err(Error::NotRankTwo { tag, rank });
    }
    let desc = descriptor(tag);
    desc.base_params(&instance.base)?;
    let first = instance.base[0];
    if first.norm() == 0.0 {
        return Err(Error::DegenerateBase { tag });
    }

    let singular = singular_base(first, desc.is_split());
    let denom = singular.norm_sqr();
    let mut base = vec![singular];
    for other in &instance.base[1..] {
        let coef = if denom > 0.0 {
            singular.hermitian_dot(other) / denom
        } else {
            ZERO
        };
        let projected = singular.scale(coef);
        if (*other - projected).norm() <= 1e-14 * other.norm() {
            base.push(*other);
        } else {
            base.push(projected);
        }
    }
    Ok(FamilyInstance::new(tag, instance.constants, base))
}

fn singular_base(v: CVec4, split: bool) -> CVec4 {
    let scale = scale_of(v.norm());
    let det = det_block(&v);
    let already_singular = det.norm() <= 1e-14 * scale * scale;
    if already_singular && (!split || v.c0.norm() <= 1e-14 * scale) {
        return v;
    }
    let vv = v.vector_dot(&v);
    let real = is_real_conditions(&ParamSet { k: v, ..ParamSet::ZERO }, 1e-12);
    if !split && !(real && vv.re < 0.0) {
        let mut out = v;
        out.c0 = vv.sqrt();
        return out;
    }
    let mut out = v;
    out.c0 = ZERO;
    out.v[1] = I * (v.v[0] * v.v[0] + v.v[2] * v.v[2]).sqrt();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{assemble, numeric_rank};
    use crate::sampling::{random_cvec4, rng_from_seed};
    use crate::types::{Mat4, ONE};

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn names_round_trip() {
        for tag in FamilyTag::ALL {
            assert_eq!(FamilyTag::from_name(tag.name()), Some(tag));
            assert_eq!(tag.name().parse::<FamilyTag>().unwrap(), tag);
        }
        assert_eq!(FamilyTag::from_name("kmn2"), Some(FamilyTag::KMN2));
        assert_eq!(FamilyTag::from_name("K-8"), None);
        assert_eq!(FamilyTag::ALL.len(), 39);
    }

    #[test]
    fn descriptor_examples() {
        assert_eq!(
            descriptor(FamilyTag::K1).to_string(),
            "K-1 [free: k]; m0 = 0; m = 0; l0 = 0; l = 0; n0 = 0; n = 0"
        );
        assert_eq!(
            descriptor(FamilyTag::KN1).to_string(),
            "KN-1 [free: k, n]; m0 = A·n0; m = A·n; l0 = A·k0; l = A·k"
        );
        assert_eq!(
            descriptor(FamilyTag::KML2).to_string(),
            "KML-2 [free: k, m, l]; n0 = -m0 + k0 + l0; n = -m + k + l"
        );
        assert_eq!(
            descriptor(FamilyTag::K6).to_string(),
            "K-6 [free: k]; m0 = A·t·k0; m = -k; l0 = t·k0; l = -A^-1·k; n0 = A·k0; n = A·k"
        );
    }

    #[test]
    fn constants_and_inversions() {
        let d = descriptor(FamilyTag::K6);
        assert_eq!(d.constants, vec![Const::A, Const::T]);
        assert_eq!(d.inverted, vec![Const::A]);
        assert!(d.is_split());
        assert!(!descriptor(FamilyTag::K5).is_split());
        assert_eq!(descriptor(FamilyTag::KM3).inverted, vec![Const::B]);
        assert_eq!(descriptor(FamilyTag::K1).constants, vec![]);
        for tag in FamilyTag::ALL {
            assert_eq!(descriptor(tag).rules.len(), 8, "{tag}");
        }
    }

    #[test]
    fn construct_k2_identity() {
        let p = construct(FamilyTag::K2, &FamilyConstants::new(), &[CVec4::scalar(ONE)]).unwrap();
        assert_eq!(assemble(&p), Mat4::identity());
    }

    #[test]
    fn construct_k3_block_form() {
        let consts = FamilyConstants::new().with(Const::D, 2.0);
        let p = construct(FamilyTag::K3, &consts, &[CVec4::scalar(ONE)]).unwrap();
        let g = assemble(&p);
        for i in 0..4 {
            for j in 0..4 {
                let expected = match (i, j) {
                    (0, 0) | (1, 1) => c(1.0),
                    (2, 0) | (3, 1) => c(2.0),
                    _ => ZERO,
                };
                assert_eq!(g.0[i][j], expected);
            }
        }
        assert_eq!(numeric_rank(&g, DEFAULT_TOL), 2);
    }

    #[test]
    fn construct_kmn2_identity() {
        let i = CVec4::scalar(ONE);
        let p = construct(FamilyTag::KMN2, &FamilyConstants::new(), &[i, i, CVec4::ZERO]).unwrap();
        assert_eq!(assemble(&p), Mat4::identity());
    }

    #[test]
    fn construct_rejects_bad_constants() {
        let k = [CVec4::scalar(ONE)];
        let zero_a = FamilyConstants::new().with(Const::A, 0.0).with(Const::T, 1.0);
        assert!(matches!(
            construct(FamilyTag::K6, &zero_a, &k),
            Err(Error::ZeroConstantRequiringInverse {
                constant: Const::A,
                ..
            })
        ));
        assert!(matches!(
            construct(FamilyTag::K3, &FamilyConstants::new(), &k),
            Err(Error::MissingConstant {
                constant: Const::D,
                ..
            })
        ));
        let extra = FamilyConstants::new().with(Const::A, 1.0);
        assert!(matches!(
            construct(FamilyTag::K2, &extra, &k),
            Err(Error::UnexpectedConstant { .. })
        ));
        assert!(matches!(
            construct(FamilyTag::KM1, &FamilyConstants::new(), &k),
            Err(Error::BaseCount { expected: 2, got: 1, .. })
        ));
    }

    #[test]
    fn membership_recovers_d() {
        let mut rng = rng_from_seed(11);
        let consts = FamilyConstants::new().with(Const::D, 2.0);
        let p = construct(FamilyTag::K3, &consts, &[random_cvec4(&mut rng, false)]).unwrap();
        let m = membership(FamilyTag::K3, &p, 1e-9).unwrap();
        assert!((m.recovered.get(Const::D).unwrap() - c(2.0)).norm() < 1e-10);
        assert!(m.indeterminate.is_empty());
    }

    #[test]
    fn identity_is_not_k3() {
        assert!(membership(FamilyTag::K3, &ParamSet::IDENTITY, 1e-9).is_none());
    }

    #[test]
    fn zero_is_member_everywhere_with_indeterminate_constants() {
        for tag in FamilyTag::ALL {
            let m = membership(tag, &ParamSet::ZERO, 1e-9).unwrap();
            assert_eq!(m.residual, 0.0);
            assert_eq!(m.indeterminate, descriptor(tag).constants, "{tag}");
        }
    }

    #[test]
    fn closure_zero_instance_is_trivial() {
        let consts = FamilyConstants::new().with(Const::D, 2.0);
        let zero = compose(&ParamSet::ZERO, &ParamSet::ZERO);
        assert_eq!(residual_with(FamilyTag::K3, &consts, &zero).unwrap(), 0.0);
    }

    #[test]
    fn closure_k3_fixed_d() {
        let consts = FamilyConstants::new().with(Const::D, 2.0);
        let report = closure_check(FamilyTag::K3, &consts, 100, 5, 1e-10).unwrap();
        assert!(report.worst_residual < 1e-10);
        let d = report.product_constants.get(Const::D).unwrap();
        assert!((d - c(2.0)).norm() < 1e-9);
    }

    #[test]
    fn corrupted_descriptor_breaks_closure() {
        let table = DescriptorTable::standard().with_fault(FamilyTag::K3);
        let consts = FamilyConstants::new().with(Const::D, 2.0);
        let mut rng = rng_from_seed(1);
        let res = closure_check_with(table.get(FamilyTag::K3), &consts, 10, &mut rng, 1e-9, false);
        assert!(matches!(res, Err(Error::ClosureViolation { .. })));
    }

    #[test]
    fn rank_profile_examples() {
        assert_eq!(rank_profile(FamilyTag::K2, 1), 4);
        assert_eq!(rank_profile(FamilyTag::N2, 1), 2);
        assert_eq!(rank_profile(FamilyTag::KMN2, 1), 4);
    }

    #[test]
    fn rank1_k3_example() {
        let consts = FamilyConstants::new().with(Const::D, 2.0);
        let inst = FamilyInstance::new(FamilyTag::K3, consts, vec![CVec4::real(0.3, 1.0, 0.0, 0.0)]);
        let r = rank1_restrict(&inst).unwrap();
        assert_eq!(r.base[0].c0, c(1.0));
        assert_eq!(det_block(&r.base[0]), ZERO);
        let g = assemble(&r.materialize().unwrap());
        assert_eq!(numeric_rank(&g, DEFAULT_TOL), 1);
    }

    #[test]
    fn rank1_is_idempotent() {
        let consts = FamilyConstants::new().with(Const::D, 2.0);
        let inst = FamilyInstance::new(FamilyTag::K3, consts, vec![CVec4::real(1.0, 1.0, 0.0, 0.0)]);
        assert_eq!(rank1_restrict(&inst).unwrap(), inst);

        let mut rng = rng_from_seed(4);
        let inst = FamilyInstance::random(FamilyTag::K7, &mut rng, false);
        let once = rank1_restrict(&inst).unwrap();
        assert_eq!(rank1_restrict(&once).unwrap(), once);
    }

    #[test]
    fn rank1_errors() {
        let inst = FamilyInstance::new(FamilyTag::K3, FamilyConstants::new().with(Const::D, 2.0), vec![CVec4::ZERO]);
        assert!(matches!(rank1_restrict(&inst), Err(Error::DegenerateBase { .. })));
        let inst = FamilyInstance::new(FamilyTag::K2, FamilyConstants::new(), vec![CVec4::scalar(ONE)]);
        assert!(matches!(rank1_restrict(&inst), Err(Error::NotRankTwo { rank: 4, .. })));
    }

    #[test]
    fn containment_spot_checks() {
        let mut rng = rng_from_seed(8);
        for _ in 0..10 {
            let k = random_cvec4(&mut rng, false);
            let p = construct(FamilyTag::K1, &FamilyConstants::new(), &[k]).unwrap();
            let k3 = FamilyConstants::new().with(Const::D, 0.0);
            let k4 = FamilyConstants::new().with(Const::A, 0.0);
            assert_eq!(residual_with(FamilyTag::K3, &k3, &p).unwrap(), 0.0);
            assert_eq!(residual_with(FamilyTag::K4, &k4, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn every_family_closed_roundtrips_and_has_its_generic_rank() {
        for real in [false, true] {
            let mut rng = rng_from_seed(if real { 77 } else { 76 });
            for tag in FamilyTag::ALL {
                let consts = random_constants(tag, &mut rng, real);
                let report =
                    closure_check_with(descriptor(tag), &consts, 30, &mut rng, 1e-10, real).unwrap();
                if real {
                    assert!(report.worst_imag < 1e-12, "{tag}");
                }
                let inst = FamilyInstance::random_with(tag, consts, &mut rng, real);
                let p = inst.materialize().unwrap();
                let m = membership(tag, &p, 1e-9).unwrap_or_else(|| panic!("{tag}"));
                for (c, v) in m.recovered.iter() {
                    assert!((v - consts.get(c).unwrap()).norm() < 1e-8, "{tag} {c}");
                }
                assert!(m.indeterminate.is_empty(), "{tag}");
                let rank = rank_profile_with(descriptor(tag), 20, &mut rng, real);
                assert_eq!(rank, tag.generic_rank(), "{tag} real={real}");
                if rank == 2 {
                    let r = rank1_restrict(&inst).unwrap();
                    let g = assemble(&r.materialize().unwrap());
                    assert!(numeric_rank(&g, DEFAULT_TOL) <= 1, "{tag} real={real}");
                    if real {
                        assert!(g.max_imag() < 1e-12 * g.norm().max(1.0), "{tag}");
                    }
                }
            }
        }
    }

    #[test]
    fn monomial_display() {
        let a = Monomial::of(Const::A);
        let t = Monomial::of(Const::T);
        assert_eq!((-a.inv()).to_string(), "-A^-1");
        assert_eq!((a * t).to_string(), "A·t");
        assert_eq!((a * a).to_string(), "A^2");
        assert_eq!(Monomial::ONE.to_string(), "1");
    }
}
