//! Truncated graded commutative polynomial algebra over exact rationals.
//!
//! A [`Ring`] is a fixed list of weighted generators together with a
//! truncation degree `D`; every monomial of total degree above `D` is zero.
//! [`GradedClass`] values are sparse maps from exponent vectors to nonzero
//! rational coefficients, so structural equality is mathematical equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Builds a rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders a rational as `p` or `p/q`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Self {
            name: name.into(),
            degree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingPresentation {
    generators: Vec<Generator>,
    truncation: u32,
}

/// Shared handle to an immutable ring presentation.
///
/// Two handles compare equal when their presentations do, so rings built
/// independently from the same generator list interoperate.
#[derive(Debug, Clone)]
pub struct Ring(Arc<RingPresentation>);

impl Ring {
    pub fn new(generators: Vec<Generator>, truncation: u32) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.degree == 0 {
                return Err(Error::InvalidPresentation(format!(
                    "generator `{}` has degree 0",
                    g.name
                )));
            }
            if g.name.is_empty() {
                return Err(Error::InvalidPresentation("empty generator name".into()));
            }
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::InvalidPresentation(format!(
                    "duplicate generator `{}`",
                    g.name
                )));
            }
        }
        Ok(Ring(Arc::new(RingPresentation {
            generators,
            truncation,
        })))
    }

    /// Convenience constructor from `(name, degree)` pairs.
    pub fn with_generators(gens: &[(&str, u32)], truncation: u32) -> Result<Self> {
        Self::new(
            gens.iter().map(|(n, d)| Generator::new(*n, *d)).collect(),
            truncation,
        )
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0.generators
    }

    pub fn truncation(&self) -> u32 {
        self.0.truncation
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.0.generators.iter().position(|g| g.name == name)
    }

    pub fn gen(&self, name: &str) -> Result<GradedClass> {
        let idx = self
            .generator_index(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        Ok(GradedClass::generator_at(self, idx))
    }

    pub fn zero(&self) -> GradedClass {
        GradedClass {
            ring: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> GradedClass {
        self.constant(Rational::one())
    }

    pub fn constant(&self, q: Rational) -> GradedClass {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Monomial::unit(self.generators().len()), q);
        }
        GradedClass {
            ring: self.clone(),
            terms,
        }
    }

    pub fn integer(&self, n: i64) -> GradedClass {
        self.constant(rat(n))
    }

    fn degree_of(&self, m: &Monomial) -> u32 {
        m.0.iter()
            .zip(self.generators())
            .map(|(e, g)| e * g.degree)
            .sum()
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Ring {}

impl Hash for Ring {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl PartialOrd for Ring {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ring {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            Ordering::Equal
        } else {
            self.0.cmp(&other.0)
        }
    }
}

/// Exponent vector, one entry per generator of the owning ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    fn unit(len: usize) -> Self {
        Monomial(vec![0; len])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedClass {
    ring: Ring,
    terms: BTreeMap<Monomial, Rational>,
}

impl GradedClass {
    fn generator_at(ring: &Ring, idx: usize) -> Self {
        let mut exps = vec![0; ring.generators().len()];
        exps[idx] = 1;
        let m = Monomial(exps);
        let mut terms = BTreeMap::new();
        if ring.degree_of(&m) <= ring.truncation() {
            terms.insert(m, Rational::one());
        }
        GradedClass {
            ring: ring.clone(),
            terms,
        }
    }

    /// Builds a class from explicit `(exponents, coefficient)` pairs,
    /// discarding terms above the truncation degree.
    pub fn from_terms(ring: &Ring, terms: Vec<(Vec<u32>, Rational)>) -> Result<Self> {
        let mut out = ring.zero();
        for (exps, q) in terms {
            if exps.len() != ring.generators().len() {
                return Err(Error::InvalidPresentation(format!(
                    "exponent vector of length {} for {} generators",
                    exps.len(),
                    ring.generators().len()
                )));
            }
            out.accumulate(Monomial(exps), q);
        }
        Ok(out)
    }

    fn accumulate(&mut self, m: Monomial, q: Rational) {
        if q.is_zero() || self.ring.degree_of(&m) > self.ring.truncation() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    /// Iterates `(exponents, coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(m, q)| (m.exponents(), q))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::unit(self.ring.generators().len()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    fn check_ring(&self, other: &GradedClass) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &GradedClass) -> Result<GradedClass> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, q) in &other.terms {
            out.accumulate(m.clone(), q.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedClass) -> Result<GradedClass> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedClass {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, q: &Rational) -> GradedClass {
        if q.is_zero() {
            return self.ring.zero();
        }
        GradedClass {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    /// Product with every term of degree above the truncation dropped.
    pub fn mul(&self, other: &GradedClass) -> Result<GradedClass> {
        self.check_ring(other)?;
        let mut out = self.ring.zero();
        let d = self.ring.truncation();
        for (ma, qa) in &self.terms {
            let da = self.ring.degree_of(ma);
            for (mb, qb) in &other.terms {
                if da + self.ring.degree_of(mb) > d {
                    continue;
                }
                out.accumulate(ma.times(mb), qa * qb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> GradedClass {
        let mut out = self.ring.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        out
    }

    /// Multiplicative inverse of a class with constant term 1.
    ///
    /// Writes `a = 1 + p` with `p` nilpotent (every term has positive
    /// degree) and sums the finite Neumann series `1 - p + p^2 - ...`.
    pub fn invert_unit(&self) -> Result<GradedClass> {
        let c0 = self.constant_term();
        if !c0.is_one() {
            return Err(Error::NotUnit(fmt_rational(&c0)));
        }
        let minus_p = self.sub(&self.ring.one())?.neg();
        let mut out = self.ring.one();
        let mut power = self.ring.one();
        for _ in 0..self.ring.truncation() {
            power = power.mul(&minus_p)?;
            if power.is_zero() {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out)
    }

    /// Homogeneous degree-`d` component.
    pub fn grade(&self, d: i64) -> Result<GradedClass> {
        let t = self.ring.truncation();
        if d < 0 || d > i64::from(t) {
            return Err(Error::DegreeOutOfRange {
                degree: d,
                truncation: t,
            });
        }
        Ok(self.grade_unchecked(d as u32))
    }

    /// Like [`grade`](Self::grade) but returns zero for degrees outside
    /// `0..=D` instead of failing.
    pub fn grade_or_zero(&self, d: i64) -> GradedClass {
        if d < 0 || d > i64::from(self.ring.truncation()) {
            self.ring.zero()
        } else {
            self.grade_unchecked(d as u32)
        }
    }

    fn grade_unchecked(&self, d: u32) -> GradedClass {
        GradedClass {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| self.ring.degree_of(m) == d)
                .map(|(m, q)| (m.clone(), q.clone()))
                .collect(),
        }
    }

    /// Degree of the highest nonzero term, `None` for the zero class.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| self.ring.degree_of(m)).max()
    }

    /// The common degree of all terms if the class is homogeneous and
    /// nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| self.ring.degree_of(m));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Applies the ring homomorphism sending generator `i` to `images[i]`.
    pub fn substitute(&self, images: &[GradedClass]) -> Result<GradedClass> {
        if images.len() != self.ring.generators().len() {
            return Err(Error::InvalidPresentation(format!(
                "{} images for {} generators",
                images.len(),
                self.ring.generators().len()
            )));
        }
        let target = match images.first() {
            Some(img) => img.ring.clone(),
            None => {
                return Ok(self.clone());
            }
        };
        if images.iter().any(|img| img.ring != target) {
            return Err(Error::RingMismatch);
        }
        let mut out = target.zero();
        for (m, q) in &self.terms {
            let mut term = target.constant(q.clone());
            for (e, img) in m.0.iter().zip(images) {
                if *e > 0 {
                    term = term.mul(&img.pow(*e))?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

impl fmt::Display for GradedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(ma, _), (mb, _)| {
            self.ring
                .degree_of(ma)
                .cmp(&self.ring.degree_of(mb))
                .then_with(|| mb.cmp(ma))
        });
        for (i, (m, q)) in ordered.into_iter().enumerate() {
            let mono: Vec<String> =
                m.0.iter()
                    .zip(self.ring.generators())
                    .filter(|(e, _)| **e > 0)
                    .map(|(e, g)| {
                        if *e == 1 {
                            g.name.clone()
                        } else {
                            format!("{}^{}", g.name, e)
                        }
                    })
                    .collect();
            let negative = q.is_negative();
            let mag = q.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            if mono.is_empty() {
                write!(f, "{}", fmt_rational(&mag))?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", fmt_rational(&mag))?;
                }
                write!(f, "{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}
