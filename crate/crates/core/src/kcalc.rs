//! Virtual bundles as integer-weighted formal sums of bundle symbols.
//!
//! Every term is a `(BundleSymbol, Twist)` pair with a nonzero integer
//! multiplicity. Total Chern and Segre classes extend multiplicatively,
//! with negative multiplicities going through [`GradedClass::invert_unit`].

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactring::{rat, GradedClass, Ring};

/// How a bundle's Chern classes are known.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChernModel {
    /// Chern roots, one degree-1 class per rank.
    Roots(Vec<GradedClass>),
    /// Chern classes `c_1..c_rank`; `c_i` is homogeneous of degree `i`.
    Formal(Vec<GradedClass>),
    /// Rank bookkeeping only.
    RankOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BundleSymbol {
    name: String,
    rank: u32,
    model: ChernModel,
    dualized: bool,
}

fn check_degree(c: &GradedClass, degree: u32, what: &str) -> Result<()> {
    match c.homogeneous_degree() {
        None if c.is_zero() => Ok(()),
        Some(d) if d == degree => Ok(()),
        _ => Err(Error::Precondition(format!(
            "{what} must be homogeneous of degree {degree}, got `{c}`"
        ))),
    }
}

fn common_ring<'a>(classes: impl IntoIterator<Item = &'a GradedClass>) -> Result<Option<Ring>> {
    let mut ring: Option<Ring> = None;
    for c in classes {
        match &ring {
            None => ring = Some(c.ring().clone()),
            Some(r) if r != c.ring() => return Err(Error::RingMismatch),
            Some(_) => {}
        }
    }
    Ok(ring)
}

impl BundleSymbol {
    pub fn with_roots(name: impl Into<String>, roots: Vec<GradedClass>) -> Result<Self> {
        for r in &roots {
            check_degree(r, 1, "Chern root")?;
        }
        common_ring(&roots)?;
        Ok(Self {
            name: name.into(),
            rank: roots.len() as u32,
            model: ChernModel::Roots(roots),
            dualized: false,
        })
    }

    /// A bundle whose Chern classes `c_1..c_r` are given directly.
    pub fn formal(name: impl Into<String>, classes: Vec<GradedClass>) -> Result<Self> {
        for (i, c) in classes.iter().enumerate() {
            check_degree(c, i as u32 + 1, "formal Chern class")?;
        }
        common_ring(&classes)?;
        Ok(Self {
            name: name.into(),
            rank: classes.len() as u32,
            model: ChernModel::Formal(classes),
            dualized: false,
        })
    }

    /// A formal bundle of rank `r` whose Chern classes are the ring
    /// generators `prefix1..prefix{r}`.
    pub fn formal_from_generators(
        name: impl Into<String>,
        ring: &Ring,
        prefix: &str,
        rank: u32,
    ) -> Result<Self> {
        let classes = (1..=rank)
            .map(|i| ring.gen(&format!("{prefix}{i}")))
            .collect::<Result<Vec<_>>>()?;
        Self::formal(name, classes)
    }

    pub fn rank_only(name: impl Into<String>, rank: u32) -> Self {
        Self {
            name: name.into(),
            rank,
            model: ChernModel::RankOnly,
            dualized: false,
        }
    }

    /// The trivial bundle of rank `r` (all roots zero).
    pub fn trivial(ring: &Ring, rank: u32) -> Self {
        Self {
            name: "O".into(),
            rank,
            model: ChernModel::Roots(vec![ring.zero(); rank as usize]),
            dualized: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn model(&self) -> &ChernModel {
        &self.model
    }

    pub fn is_dualized(&self) -> bool {
        self.dualized
    }

    pub fn dual(&self) -> Self {
        let model = match &self.model {
            ChernModel::Roots(roots) => {
                ChernModel::Roots(roots.iter().map(GradedClass::neg).collect())
            }
            ChernModel::Formal(cs) => ChernModel::Formal(
                cs.iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 0 { c.neg() } else { c.clone() })
                    .collect(),
            ),
            ChernModel::RankOnly => ChernModel::RankOnly,
        };
        Self {
            name: self.name.clone(),
            rank: self.rank,
            model,
            dualized: !self.dualized,
        }
    }

    fn ring(&self) -> Option<&Ring> {
        match &self.model {
            ChernModel::Roots(v) | ChernModel::Formal(v) => v.first().map(GradedClass::ring),
            ChernModel::RankOnly => None,
        }
    }

    /// Total Chern class of `self ⊗ twist`.
    fn chern_twisted(&self, ring: &Ring, twist: &Twist) -> Result<GradedClass> {
        if let Some(r) = self.ring() {
            if r != ring {
                return Err(Error::RingMismatch);
            }
        }
        if self.rank == 0 {
            return Ok(ring.one());
        }
        let t = twist.class_in(ring)?;
        match &self.model {
            ChernModel::Roots(roots) => {
                let mut out = ring.one();
                for r in roots {
                    out = out.mul(&ring.one().add(r)?.add(&t)?)?;
                }
                Ok(out)
            }
            ChernModel::Formal(cs) => {
                // c(E ⊗ L) = Σ_i c_i(E) (1 + c_1(L))^{r-i}
                let one_t = ring.one().add(&t)?;
                let mut out = one_t.pow(self.rank);
                for (i, c) in cs.iter().enumerate() {
                    let e = self.rank - (i as u32 + 1);
                    out = out.add(&c.mul(&one_t.pow(e))?)?;
                }
                Ok(out)
            }
            ChernModel::RankOnly => Err(Error::MissingChernData(self.display_name())),
        }
    }

    fn display_name(&self) -> String {
        if self.dualized {
            format!("{}*", self.name)
        } else {
            self.name.clone()
        }
    }
}

/// A formal line-bundle twist: a signed combination of named line tags and,
/// when known, its first Chern class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Twist {
    tags: BTreeMap<String, i64>,
    class: Option<GradedClass>,
}

impl Twist {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// A named line with first Chern class `class`.
    pub fn line(label: impl Into<String>, class: GradedClass) -> Result<Self> {
        check_degree(&class, 1, "twist class")?;
        Ok(Self {
            tags: BTreeMap::from([(label.into(), 1)]),
            class: Some(class),
        })
    }

    /// A named line with no Chern data.
    pub fn opaque(label: impl Into<String>) -> Self {
        Self {
            tags: BTreeMap::from([(label.into(), 1)]),
            class: None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tags(&self) -> &BTreeMap<String, i64> {
        &self.tags
    }

    pub fn combine(&self, other: &Twist) -> Result<Twist> {
        let mut tags = self.tags.clone();
        for (k, v) in &other.tags {
            let e = tags.entry(k.clone()).or_insert(0);
            *e += v;
            if *e == 0 {
                tags.remove(k);
            }
        }
        let class = match (self.known_class(), other.known_class()) {
            (Some(a), Some(b)) => match (a, b) {
                (Some(a), Some(b)) => Some(a.add(b)?),
                (Some(a), None) => Some(a.clone()),
                (None, Some(b)) => Some(b.clone()),
                (None, None) => None,
            },
            _ => None,
        };
        let class = class.filter(|_| !tags.is_empty());
        Ok(Twist { tags, class })
    }

    /// `Some(None)` for the trivial twist, `Some(Some(c))` when the class is
    /// known, `None` when unknown.
    fn known_class(&self) -> Option<Option<&GradedClass>> {
        if self.tags.is_empty() {
            Some(None)
        } else {
            self.class.as_ref().map(Some)
        }
    }

    pub fn dual(&self) -> Twist {
        Twist {
            tags: self.tags.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            class: self.class.as_ref().map(GradedClass::neg),
        }
    }

    fn class_in(&self, ring: &Ring) -> Result<GradedClass> {
        match self.known_class() {
            Some(None) => Ok(ring.zero()),
            Some(Some(c)) if c.ring() == ring => Ok(c.clone()),
            Some(Some(_)) => Err(Error::RingMismatch),
            None => Err(Error::MissingChernData(self.to_string())),
        }
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .tags
            .iter()
            .map(|(k, v)| {
                if *v == 1 {
                    k.clone()
                } else {
                    format!("{k}^{v}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

/// Element of the K-group: nonzero multiplicities on `(symbol, twist)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct KClass {
    terms: BTreeMap<(BundleSymbol, Twist), i64>,
}

impl KClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_symbol(sym: BundleSymbol) -> Self {
        Self::from_term(sym, Twist::trivial(), 1)
    }

    pub fn from_term(sym: BundleSymbol, twist: Twist, mult: i64) -> Self {
        let mut k = Self::zero();
        k.insert(sym, twist, mult);
        k
    }

    fn insert(&mut self, sym: BundleSymbol, twist: Twist, mult: i64) {
        if mult == 0 {
            return;
        }
        let key = (sym, twist);
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BundleSymbol, &Twist, i64)> {
        self.terms.iter().map(|((s, t), m)| (s, t, *m))
    }

    /// Direct sum.
    pub fn add(&self, other: &KClass) -> KClass {
        let mut out = self.clone();
        for ((s, t), m) in &other.terms {
            out.insert(s.clone(), t.clone(), *m);
        }
        out
    }

    pub fn neg(&self) -> KClass {
        self.scale(-1)
    }

    pub fn sub(&self, other: &KClass) -> KClass {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> KClass {
        let mut out = KClass::zero();
        for ((s, t), m) in &self.terms {
            out.insert(s.clone(), t.clone(), m * k);
        }
        out
    }

    /// Virtual rank; negative for virtual classes.
    pub fn rank(&self) -> i64 {
        self.terms
            .iter()
            .map(|((s, _), m)| m * i64::from(s.rank))
            .sum()
    }

    pub fn total_chern(&self, ring: &Ring) -> Result<GradedClass> {
        let mut out = ring.one();
        for ((s, t), m) in &self.terms {
            let c = s.chern_twisted(ring, t)?;
            let factor = if *m > 0 {
                c.pow(*m as u32)
            } else {
                c.invert_unit()?.pow(m.unsigned_abs() as u32)
            };
            out = out.mul(&factor)?;
        }
        Ok(out)
    }

    /// `s(k) = c(-k)`.
    pub fn total_segre(&self, ring: &Ring) -> Result<GradedClass> {
        self.neg().total_chern(ring)
    }

    pub fn dual(&self) -> KClass {
        let mut out = KClass::zero();
        for ((s, t), m) in &self.terms {
            out.insert(s.dual(), t.dual(), *m);
        }
        out
    }

    pub fn tensor_line(&self, twist: &Twist) -> Result<KClass> {
        let mut out = KClass::zero();
        for ((s, t), m) in &self.terms {
            out.insert(s.clone(), t.combine(twist)?, *m);
        }
        Ok(out)
    }

    /// Expands every root-modelled symbol into its line summands so that
    /// equality of normal forms is multiset equality of line classes.
    pub fn normal_form(&self) -> KClass {
        let mut out = KClass::zero();
        for ((s, t), m) in &self.terms {
            match &s.model {
                ChernModel::Roots(roots) => {
                    for r in roots {
                        let line = BundleSymbol {
                            name: String::new(),
                            rank: 1,
                            model: ChernModel::Roots(vec![r.clone()]),
                            dualized: false,
                        };
                        out.insert(line, t.clone(), *m);
                    }
                }
                _ => out.insert(s.clone(), t.clone(), *m),
            }
        }
        out
    }

    /// Normal form with trivial line summands dropped (reduced K-group).
    pub fn reduced(&self) -> KClass {
        let nf = self.normal_form();
        KClass {
            terms: nf
                .terms
                .into_iter()
                .filter(|((s, t), _)| {
                    !(t.is_trivial()
                        && matches!(&s.model, ChernModel::Roots(r) if r.iter().all(GradedClass::is_zero)))
                })
                .collect(),
        }
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((s, t), m)) in self.terms.iter().enumerate() {
            let sign = if *m < 0 { "-" } else { "+" };
            if i == 0 {
                if *m < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if m.abs() != 1 {
                write!(f, "{}*", m.abs())?;
            }
            let name = if s.name.is_empty() {
                match &s.model {
                    ChernModel::Roots(r) => format!("L({})", r[0]),
                    _ => "?".into(),
                }
            } else {
                s.display_name()
            };
            write!(f, "{name}")?;
            if !t.is_trivial() {
                write!(f, "⊗{t}")?;
            }
        }
        Ok(())
    }
}

/// Equality in K after expanding to normal forms.
pub fn k_equal(a: &KClass, b: &KClass) -> bool {
    a.normal_form() == b.normal_form()
}

/// The `d`-th symmetric power of a rank-2 bundle.
///
/// Root-modelled input yields roots `i*u1 + (d-i)*u2`. Formal input is
/// handled by splitting in an auxiliary ring and rewriting the result in
/// the elementary symmetric functions `c1`, `c2`.
pub fn sym_power(u: &BundleSymbol, d: u32) -> Result<KClass> {
    if u.rank != 2 {
        return Err(Error::RankMismatch {
            name: u.display_name(),
            rank: u.rank,
            expected: 2,
        });
    }
    let name = format!("S^{d}({})", u.display_name());
    let model = match &u.model {
        ChernModel::Roots(roots) => {
            let (u1, u2) = (&roots[0], &roots[1]);
            let mut out = Vec::with_capacity(d as usize + 1);
            for i in 0..=d {
                out.push(
                    u1.scale(&rat(i64::from(i)))
                        .add(&u2.scale(&rat(i64::from(d - i))))?,
                );
            }
            ChernModel::Roots(out)
        }
        ChernModel::Formal(cs) => ChernModel::Formal(sym_power_formal(&cs[0], &cs[1], d)?),
        ChernModel::RankOnly => ChernModel::RankOnly,
    };
    Ok(KClass::from_symbol(BundleSymbol {
        name,
        rank: d + 1,
        model,
        dualized: false,
    }))
}

/// Chern classes `c_1..c_{d+1}` of `S^d` of a rank-2 bundle with Chern
/// classes `c1`, `c2`.
fn sym_power_formal(c1: &GradedClass, c2: &GradedClass, d: u32) -> Result<Vec<GradedClass>> {
    let ring = c1.ring().clone();
    if c2.ring() != &ring {
        return Err(Error::RingMismatch);
    }
    let aux = Ring::with_generators(&[("u1", 1), ("u2", 1)], ring.truncation())?;
    let u1 = aux.gen("u1")?;
    let u2 = aux.gen("u2")?;
    let mut split = aux.one();
    for i in 0..=d {
        let root = u1
            .scale(&rat(i64::from(i)))
            .add(&u2.scale(&rat(i64::from(d - i))))?;
        split = split.mul(&aux.one().add(&root)?)?;
    }
    let e1 = u1.add(&u2)?;
    let e2 = u1.mul(&u2)?;
    // Peel off the lexicographically largest monomial u1^a u2^b (a >= b for
    // a symmetric polynomial) as coeff * e1^(a-b) * e2^b.
    let mut total = ring.zero();
    while let Some((exps, coeff)) = split.terms().last().map(|(e, q)| (e.to_vec(), q.clone())) {
        let (a, b) = (exps[0], exps[1]);
        if a < b {
            return Err(Error::Inconsistent(format!(
                "split product is not symmetric at u1^{a}*u2^{b}"
            )));
        }
        let peel = e1.pow(a - b).mul(&e2.pow(b))?.scale(&coeff);
        split = split.sub(&peel)?;
        total = total.add(&c1.pow(a - b).mul(&c2.pow(b))?.scale(&coeff))?;
    }
    Ok((1..=i64::from(d) + 1)
        .map(|j| total.grade_or_zero(j))
        .collect())
}
