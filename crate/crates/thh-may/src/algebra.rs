//! Graded-commutative F_p algebras presented by typed generators.
//!
//! A presentation is a list of generators, each exterior, polynomial,
//! truncated-polynomial, or divided-power, optionally tensored with a finite
//! structure-constant table for non-free answers. Monomials are basis words;
//! for a divided-power generator z the stored exponent e denotes the basis
//! class γ_e(z), multiplied by the rule γ_i(z)γ_j(z) = (i+j choose j)γ_{i+j}(z).

use crate::fp::{FpError, Prime};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error("bad generator `{0}`: {1}")]
    BadGenerator(String, String),
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("elements belong to different presentations")]
    PresentationMismatch,
    #[error("generator `{0}` not found")]
    UnknownGenerator(String),
    #[error("zero-degree generator `{0}`: basis enumeration would not terminate")]
    ZeroDegreeGenerator(String),
    #[error("structure table is invalid: {0}")]
    BadTable(String),
    #[error("cannot tensor two presentations that both carry structure tables")]
    TwoTables,
}

/// The four generator flavours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    Exterior,
    Polynomial,
    /// Truncated polynomial: powers < h vanish at h. Requires h >= 2.
    Truncated(u32),
    /// Divided power tower γ_e; exponents are γ-indices.
    DividedPower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: u32,
    /// Filtration grading used by the spectral-sequence engine.
    pub weight: u32,
    pub kind: GeneratorKind,
}

impl GeneratorSpec {
    pub fn exterior(name: &str, degree: u32, weight: u32) -> GeneratorSpec {
        GeneratorSpec {
            name: name.into(),
            degree,
            weight,
            kind: GeneratorKind::Exterior,
        }
    }
    pub fn polynomial(name: &str, degree: u32, weight: u32) -> GeneratorSpec {
        GeneratorSpec {
            name: name.into(),
            degree,
            weight,
            kind: GeneratorKind::Polynomial,
        }
    }
    pub fn truncated(name: &str, degree: u32, weight: u32, height: u32) -> GeneratorSpec {
        GeneratorSpec {
            name: name.into(),
            degree,
            weight,
            kind: GeneratorKind::Truncated(height),
        }
    }
    pub fn divided(name: &str, degree: u32, weight: u32) -> GeneratorSpec {
        GeneratorSpec {
            name: name.into(),
            degree,
            weight,
            kind: GeneratorKind::DividedPower,
        }
    }
}

/// A finite set of basis classes with an explicit multiplication table,
/// tensored with the free part of a presentation. Class 0 is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureTable {
    pub class_names: Vec<String>,
    pub degrees: Vec<u32>,
    pub weights: Vec<u32>,
    /// `products[i][j]` = Σ coeff · class, as (class index, coeff) pairs.
    pub products: Vec<Vec<Vec<(usize, u32)>>>,
}

impl StructureTable {
    /// Machine-check the table: unit behaviour, graded degrees/weights,
    /// graded commutativity, and associativity on the listed basis.
    pub fn validate(&self, p: Prime) -> Result<(), AlgebraError> {
        let n = self.class_names.len();
        let fail = |m: String| Err(AlgebraError::BadTable(m));
        if n == 0 || self.degrees.len() != n || self.weights.len() != n || self.products.len() != n
        {
            return fail("shape mismatch".into());
        }
        if self.degrees[0] != 0 {
            return fail("class 0 must be the unit in degree 0".into());
        }
        for (i, row) in self.products.iter().enumerate() {
            if row.len() != n {
                return fail(format!("row {i} has wrong length"));
            }
            for (j, entry) in row.iter().enumerate() {
                for &(k, c) in entry {
                    if k >= n || c == 0 || c >= p.get() {
                        return fail(format!("entry ({i},{j}) out of range"));
                    }
                    if self.degrees[k] != self.degrees[i] + self.degrees[j] {
                        return fail(format!("product ({i},{j}) is not degree-graded"));
                    }
                    if self.weights[k] != self.weights[i] + self.weights[j] {
                        return fail(format!("product ({i},{j}) is not weight-graded"));
                    }
                }
            }
        }
        let norm = |v: &[(usize, u32)]| -> BTreeMap<usize, u32> {
            let mut m = BTreeMap::new();
            for &(k, c) in v {
                let e = m.entry(k).or_insert(0u32);
                *e = p.add(*e, c);
            }
            m.retain(|_, c| *c != 0);
            m
        };
        for j in 0..n {
            if norm(&self.products[0][j]) != norm(&[(j, 1)]) || norm(&self.products[j][0]) != norm(&[(j, 1)]) {
                return fail(format!("class 0 is not a unit against class {j}"));
            }
        }
        for i in 0..n {
            for j in 0..n {
                // graded commutativity
                let sign_flip = self.degrees[i] % 2 == 1 && self.degrees[j] % 2 == 1;
                let mut ji = norm(&self.products[j][i]);
                if sign_flip {
                    for c in ji.values_mut() {
                        *c = p.neg(*c);
                    }
                    ji.retain(|_, c| *c != 0);
                }
                if norm(&self.products[i][j]) != ji {
                    return fail(format!("products ({i},{j}) and ({j},{i}) disagree"));
                }
                // associativity (i·j)·k = i·(j·k)
                for k in 0..n {
                    let mut lhs: BTreeMap<usize, u32> = BTreeMap::new();
                    for (&m1, &c1) in norm(&self.products[i][j]).iter() {
                        for (&m2, &c2) in norm(&self.products[m1][k]).iter() {
                            let e = lhs.entry(m2).or_insert(0);
                            *e = p.add(*e, p.mul(c1, c2));
                        }
                    }
                    lhs.retain(|_, c| *c != 0);
                    let mut rhs: BTreeMap<usize, u32> = BTreeMap::new();
                    for (&m1, &c1) in norm(&self.products[j][k]).iter() {
                        for (&m2, &c2) in norm(&self.products[i][m1]).iter() {
                            let e = rhs.entry(m2).or_insert(0);
                            *e = p.add(*e, p.mul(c1, c2));
                        }
                    }
                    rhs.retain(|_, c| *c != 0);
                    if lhs != rhs {
                        return fail(format!("associativity fails at ({i},{j},{k})"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn next_pres_id() -> u64 {
    static COUNTER: AtomicU64 = AtomicU64::new(1);
    COUNTER.fetch_add(1, Ordering::Relaxed)
}

/// A graded-commutative F_p algebra presentation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Presentation {
    p: Prime,
    gens: Vec<GeneratorSpec>,
    table: Option<StructureTable>,
    #[serde(skip, default = "next_pres_id")]
    id: u64,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.gens == other.gens && self.table == other.table
    }
}
impl Eq for Presentation {}

/// A basis word: optional structure-table class times generator powers.
/// Exponents are sorted by generator index and strictly positive; for a
/// divided-power generator the exponent e denotes γ_e.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    table: u16,
    exps: Vec<(u16, u32)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial {
            table: 0,
            exps: Vec::new(),
        }
    }

    pub fn gen(g: usize, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial {
            table: 0,
            exps: vec![(g as u16, e)],
        }
    }

    pub fn table_class(c: usize) -> Monomial {
        Monomial {
            table: c as u16,
            exps: Vec::new(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.table == 0 && self.exps.is_empty()
    }

    pub fn table_index(&self) -> usize {
        self.table as usize
    }

    pub fn exponents(&self) -> &[(u16, u32)] {
        &self.exps
    }

    pub fn exponent_of(&self, g: usize) -> u32 {
        self.exps
            .iter()
            .find(|&&(i, _)| i as usize == g)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    /// The monomial with one factor of generator `g` removed (γ-index
    /// decremented for divided towers). None if `g` does not divide.
    pub fn strip_one(&self, g: usize) -> Option<Monomial> {
        let pos = self.exps.iter().position(|&(i, _)| i as usize == g)?;
        let mut m = self.clone();
        if m.exps[pos].1 == 1 {
            m.exps.remove(pos);
        } else {
            m.exps[pos].1 -= 1;
        }
        Some(m)
    }
}

/// F_p-linear combination of monomials. Coefficients nonzero, reduced mod p.
#[derive(Clone, Debug, Default)]
pub struct Element {
    pres: u64,
    terms: BTreeMap<Monomial, u32>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        // zero is zero in every presentation
        self.terms == other.terms && (self.terms.is_empty() || self.pres == other.pres)
    }
}
impl Eq for Element {}

impl Element {
    pub fn zero() -> Element {
        Element::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// The lexicographically first monomial, if any.
    pub fn lead(&self) -> Option<&Monomial> {
        self.terms.keys().next()
    }
}

/// Lucas: the divided-power coefficient (i,j) = (i+j choose j) mod p.
pub fn binom_mod_p(i: u64, j: u64, p: Prime) -> u32 {
    let mut n = i + j;
    let mut k = j;
    let q = p.get() as u64;
    let mut acc = 1u32;
    while n > 0 || k > 0 {
        let nd = n % q;
        let kd = k % q;
        if kd > nd {
            return 0;
        }
        // C(nd, kd) by direct factorial arithmetic on digits < p
        let num = p.factorial(nd);
        let den = p.mul(p.factorial(kd), p.factorial(nd - kd));
        acc = p.mul(acc, p.mul(num, p.inv(den)));
        n /= q;
        k /= q;
    }
    acc
}

impl Presentation {
    pub fn new(p: Prime, gens: Vec<GeneratorSpec>) -> Result<Presentation, AlgebraError> {
        Presentation::with_table(p, gens, None)
    }

    pub fn with_table(
        p: Prime,
        gens: Vec<GeneratorSpec>,
        table: Option<StructureTable>,
    ) -> Result<Presentation, AlgebraError> {
        let mut seen = std::collections::BTreeSet::new();
        for g in &gens {
            if !seen.insert(g.name.clone()) {
                return Err(AlgebraError::DuplicateName(g.name.clone()));
            }
            match g.kind {
                GeneratorKind::Exterior => {
                    if g.degree % 2 == 0 {
                        return Err(AlgebraError::BadGenerator(
                            g.name.clone(),
                            "exterior generators must have odd degree".into(),
                        ));
                    }
                }
                GeneratorKind::Truncated(h) => {
                    if h < 2 {
                        return Err(AlgebraError::BadGenerator(
                            g.name.clone(),
                            "truncation height must be >= 2".into(),
                        ));
                    }
                    if g.degree % 2 == 1 {
                        return Err(AlgebraError::BadGenerator(
                            g.name.clone(),
                            "truncated generators must have even degree".into(),
                        ));
                    }
                }
                GeneratorKind::Polynomial | GeneratorKind::DividedPower => {
                    if g.degree % 2 == 1 {
                        return Err(AlgebraError::BadGenerator(
                            g.name.clone(),
                            "even degree required (odd squares vanish over F_p, p odd)".into(),
                        ));
                    }
                }
            }
        }
        if let Some(t) = &table {
            t.validate(p)?;
            for name in &t.class_names {
                if seen.contains(name) {
                    return Err(AlgebraError::DuplicateName(name.clone()));
                }
            }
        }
        Ok(Presentation {
            p,
            gens,
            table,
            id: next_pres_id(),
        })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn generators(&self) -> &[GeneratorSpec] {
        &self.gens
    }

    pub fn table(&self) -> Option<&StructureTable> {
        self.table.as_ref()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn gen_element(&self, name: &str) -> Result<Element, AlgebraError> {
        let idx = self
            .generator_index(name)
            .ok_or_else(|| AlgebraError::UnknownGenerator(name.into()))?;
        Ok(self.monomial_element(Monomial::gen(idx, 1), 1))
    }

    pub fn one(&self) -> Element {
        self.monomial_element(Monomial::one(), 1)
    }

    pub fn monomial_element(&self, m: Monomial, coeff: u32) -> Element {
        let c = coeff % self.p.get();
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Element {
            pres: self.id,
            terms,
        }
    }

    pub fn element_from_terms(&self, parts: Vec<(Monomial, u32)>) -> Element {
        let mut e = Element {
            pres: self.id,
            terms: BTreeMap::new(),
        };
        for (m, c) in parts {
            self.add_term(&mut e, m, c);
        }
        e
    }

    fn add_term(&self, e: &mut Element, m: Monomial, c: u32) {
        let c = c % self.p.get();
        if c == 0 {
            return;
        }
        let entry = e.terms.entry(m).or_insert(0);
        *entry = self.p.add(*entry, c);
        if *entry == 0 {
            // remove the zero entry; key clone avoided by re-probing
            let dead: Vec<Monomial> = e
                .terms
                .iter()
                .filter(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                e.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element, AlgebraError> {
        self.check_owned(a)?;
        self.check_owned(b)?;
        let mut out = a.clone();
        out.pres = self.id;
        for (m, &c) in &b.terms {
            self.add_term(&mut out, m.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, a: &Element, c: u32) -> Element {
        let c = c % self.p.get();
        let mut out = Element {
            pres: self.id,
            terms: BTreeMap::new(),
        };
        if c == 0 {
            return out;
        }
        for (m, &v) in &a.terms {
            out.terms.insert(m.clone(), self.p.mul(v, c));
        }
        out
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Result<Element, AlgebraError> {
        let nb = self.scale(b, self.p.neg(1));
        self.add(a, &nb)
    }

    fn check_owned(&self, e: &Element) -> Result<(), AlgebraError> {
        // Zero is presentation-agnostic.
        if e.terms.is_empty() || e.pres == self.id {
            Ok(())
        } else {
            Err(AlgebraError::PresentationMismatch)
        }
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        let mut d = self
            .table
            .as_ref()
            .map(|t| t.degrees[m.table as usize])
            .unwrap_or(0);
        for &(g, e) in &m.exps {
            d += self.gens[g as usize].degree * e;
        }
        d
    }

    pub fn monomial_weight(&self, m: &Monomial) -> u32 {
        let mut w = self
            .table
            .as_ref()
            .map(|t| t.weights[m.table as usize])
            .unwrap_or(0);
        for &(g, e) in &m.exps {
            w += self.gens[g as usize].weight * e;
        }
        w
    }


    /// Degree of a homogeneous element; None for 0 or inhomogeneous.
    pub fn element_degree(&self, e: &Element) -> Option<u32> {
        let mut it = e.terms.keys().map(|m| self.monomial_degree(m));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn element_weight(&self, e: &Element) -> Option<u32> {
        let mut it = e.terms.keys().map(|m| self.monomial_weight(m));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Product of two monomials as a (small) linear combination.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Vec<(Monomial, u32)> {
        let p = self.p;
        // Koszul sign from interleaving: concatenation is
        // [t_a][exps_a][t_b][exps_b]; move t_b, then each factor of exps_b,
        // into canonical position, counting odd-odd crossings.
        let odd_a: Vec<u16> = a
            .exps
            .iter()
            .filter(|&&(g, _)| self.gens[g as usize].degree % 2 == 1)
            .map(|&(g, _)| g)
            .collect();
        let mut crossings: u32 = 0;
        if let Some(t) = &self.table {
            if t.degrees[b.table as usize] % 2 == 1 {
                crossings += odd_a.len() as u32;
            }
        }
        for &(g, _) in &b.exps {
            if self.gens[g as usize].degree % 2 == 1 {
                crossings += odd_a.iter().filter(|&&h| h > g) .count() as u32;
                // odd table class of `a` sits before every generator factor,
                // so no extra crossing with it; table-class of b was already
                // moved fully left.
            }
        }
        let mut coeff = if crossings % 2 == 1 { p.neg(1) } else { 1 };

        // Merge exponents, kind by kind.
        let mut exps: Vec<(u16, u32)> = Vec::with_capacity(a.exps.len() + b.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < a.exps.len() || j < b.exps.len() {
            let next = if i < a.exps.len() && (j >= b.exps.len() || a.exps[i].0 < b.exps[j].0) {
                let v = a.exps[i];
                i += 1;
                v
            } else if j < b.exps.len() && (i >= a.exps.len() || b.exps[j].0 < a.exps[i].0) {
                let v = b.exps[j];
                j += 1;
                v
            } else {
                // same generator on both sides
                let (g, e1) = a.exps[i];
                let (_, e2) = b.exps[j];
                i += 1;
                j += 1;
                match self.gens[g as usize].kind {
                    GeneratorKind::Exterior => return Vec::new(),
                    GeneratorKind::Polynomial => (g, e1 + e2),
                    GeneratorKind::Truncated(h) => {
                        if e1 + e2 >= h {
                            return Vec::new();
                        }
                        (g, e1 + e2)
                    }
                    GeneratorKind::DividedPower => {
                        let c = binom_mod_p(e1 as u64, e2 as u64, p);
                        if c == 0 {
                            return Vec::new();
                        }
                        coeff = p.mul(coeff, c);
                        (g, e1 + e2)
                    }
                }
            };
            exps.push(next);
        }

        // Table classes multiply through the table.
        match (&self.table, a.table, b.table) {
            (None, _, _) | (_, 0, 0) => vec![(
                Monomial {
                    table: a.table.max(b.table),
                    exps,
                },
                coeff,
            )],
            (Some(t), ta, tb) => t.products[ta as usize][tb as usize]
                .iter()
                .map(|&(k, c)| {
                    (
                        Monomial {
                            table: k as u16,
                            exps: exps.clone(),
                        },
                        p.mul(coeff, c),
                    )
                })
                .filter(|&(_, c)| c != 0)
                .collect(),
        }
    }

    /// Bilinear, associative, graded-commutative product.
    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element, AlgebraError> {
        self.check_owned(a)?;
        self.check_owned(b)?;
        let mut out = Element {
            pres: self.id,
            terms: BTreeMap::new(),
        };
        for (ma, &ca) in &a.terms {
            for (mb, &cb) in &b.terms {
                let c = self.p.mul(ca, cb);
                for (m, k) in self.mul_monomials(ma, mb) {
                    self.add_term(&mut out, m, self.p.mul(c, k));
                }
            }
        }
        Ok(out)
    }

    pub fn power(&self, a: &Element, e: u32) -> Result<Element, AlgebraError> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.multiply(&acc, a)?;
        }
        Ok(acc)
    }

    /// All monomials of each total degree 0..=n_max, in deterministic order.
    pub fn basis_up_to(&self, n_max: u32) -> Result<Vec<Vec<Monomial>>, AlgebraError> {
        for g in &self.gens {
            if g.degree == 0 {
                return Err(AlgebraError::ZeroDegreeGenerator(g.name.clone()));
            }
        }
        let mut by_degree: Vec<Vec<Monomial>> = vec![Vec::new(); n_max as usize + 1];
        match &self.table {
            None => by_degree[0].push(Monomial::one()),
            Some(t) => {
                for (c, &d) in t.degrees.iter().enumerate() {
                    if d <= n_max {
                        by_degree[d as usize].push(Monomial::table_class(c));
                    }
                }
            }
        }
        for (gi, g) in self.gens.iter().enumerate() {
            let mut next: Vec<Vec<Monomial>> = vec![Vec::new(); n_max as usize + 1];
            let e_max = match g.kind {
                GeneratorKind::Exterior => 1,
                GeneratorKind::Truncated(h) => h - 1,
                GeneratorKind::Polynomial | GeneratorKind::DividedPower => n_max / g.degree,
            };
            for (d, monos) in by_degree.iter().enumerate() {
                for m in monos {
                    let mut e = 0u32;
                    loop {
                        let total = d as u64 + (e as u64) * g.degree as u64;
                        if total > n_max as u64 || e > e_max {
                            break;
                        }
                        let mut m2 = m.clone();
                        if e > 0 {
                            m2.exps.push((gi as u16, e));
                        }
                        next[total as usize].push(m2);
                        e += 1;
                    }
                }
            }
            by_degree = next;
        }
        for v in by_degree.iter_mut() {
            v.sort();
        }
        Ok(by_degree)
    }

    /// Complete duplicate-free list of canonical monomials of total degree n.
    pub fn basis_in_degree(&self, n: u32) -> Result<Vec<Monomial>, AlgebraError> {
        Ok(self.basis_up_to(n)?.swap_remove(n as usize))
    }

    pub fn poincare_series(&self, n_max: u32) -> Result<PoincareSeries, AlgebraError> {
        let dims = self
            .basis_up_to(n_max)?
            .iter()
            .map(|v| v.len() as u64)
            .collect();
        Ok(PoincareSeries {
            cutoff: n_max,
            dims,
        })
    }

    /// Tensor product: disjoint union of generators (and at most one table).
    pub fn tensor(&self, other: &Presentation) -> Result<Presentation, AlgebraError> {
        assert_eq!(self.p, other.p, "tensor over different primes");
        if self.table.is_some() && other.table.is_some() {
            return Err(AlgebraError::TwoTables);
        }
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Presentation::with_table(
            self.p,
            gens,
            self.table.clone().or_else(|| other.table.clone()),
        )
    }

    pub fn display_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        if m.table > 0 {
            parts.push(self.table.as_ref().unwrap().class_names[m.table as usize].clone());
        }
        for &(g, e) in &m.exps {
            let spec = &self.gens[g as usize];
            let atom = if spec.name.contains('^') || spec.name.contains('·') {
                format!("({})", spec.name)
            } else {
                spec.name.clone()
            };
            let s = match spec.kind {
                GeneratorKind::DividedPower if e >= 2 => format!("γ{}({})", e, spec.name),
                _ if e >= 2 => format!("{atom}^{e}"),
                _ => atom,
            };
            parts.push(s);
        }
        parts.join("·")
    }

    pub fn display_element(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in e.terms().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            if c != 1 || m.is_one() {
                let _ = write!(out, "{c}");
                if !m.is_one() {
                    out.push('·');
                }
            }
            if !m.is_one() {
                out.push_str(&self.display_monomial(m));
            }
        }
        out
    }
}

/// Dimension table of a connected graded algebra up to a cutoff.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoincareSeries {
    pub cutoff: u32,
    pub dims: Vec<u64>,
}

impl PoincareSeries {
    pub fn dim(&self, n: u32) -> u64 {
        self.dims.get(n as usize).copied().unwrap_or(0)
    }

    /// Convolution: the series of a tensor product.
    pub fn convolve(&self, other: &PoincareSeries) -> PoincareSeries {
        let cutoff = self.cutoff.min(other.cutoff);
        let mut dims = vec![0u64; cutoff as usize + 1];
        for (i, d) in dims.iter_mut().enumerate() {
            for k in 0..=i {
                *d += self.dims[k] * other.dims[i - k];
            }
        }
        PoincareSeries { cutoff, dims }
    }
}

/// The repacked form of a divided-power generator: Γ(z) ≅ P_p(z, γ_p(z), …).
#[derive(Clone, Debug)]
pub struct RepackedTower {
    /// Generator indices of z, γ_p(z), γ_{p²}(z), … in the repacked
    /// presentation, lowest first.
    pub family: Vec<usize>,
    pub base_name: String,
}

/// Replace every divided-power generator by its height-p truncated family,
/// instantiated up to the degree cutoff.
pub fn repacked_presentation(
    pres: &Presentation,
    n_max: u32,
) -> Result<(Presentation, Vec<RepackedTower>), AlgebraError> {
    let p = pres.prime().get();
    let mut gens = Vec::new();
    let mut towers = Vec::new();
    for g in pres.generators() {
        match g.kind {
            GeneratorKind::DividedPower => {
                let mut family = Vec::new();
                let mut step = 1u64;
                while step * g.degree as u64 <= n_max as u64 {
                    let name = if step == 1 {
                        g.name.clone()
                    } else {
                        format!("γ{}({})", step, g.name)
                    };
                    family.push(gens.len());
                    gens.push(GeneratorSpec::truncated(
                        &name,
                        (step * g.degree as u64) as u32,
                        (step * g.weight as u64) as u32,
                        p,
                    ));
                    step *= p as u64;
                }
                towers.push(RepackedTower {
                    family,
                    base_name: g.name.clone(),
                });
            }
            _ => gens.push(g.clone()),
        }
    }
    Ok((Presentation::with_table(pres.prime(), gens, pres.table().cloned())?, towers))
}

/// Express γ_e(z) in the repacked presentation: a unit times the product of
/// γ_{p^k}(z)^{d_k} where the d_k are the base-p digits of e.
pub fn gamma_repack(
    repacked: &Presentation,
    tower: &RepackedTower,
    e: u64,
) -> Result<Element, AlgebraError> {
    let p = repacked.prime();
    let q = p.get() as u64;
    let mut digits = Vec::new();
    let mut rest = e;
    while rest > 0 {
        digits.push((rest % q) as u32);
        rest /= q;
    }
    if digits.len() > tower.family.len() {
        return Err(AlgebraError::UnknownGenerator(format!(
            "γ{}({}) exceeds the instantiation cutoff",
            e, tower.base_name
        )));
    }
    // Π γ_{p^k}^{d_k} = (Π d_k!) γ_e, so γ_e = (Π d_k!)^{-1} Π γ_{p^k}^{d_k}.
    let mut unit = 1u32;
    let mut exps: Vec<(u16, u32)> = Vec::new();
    for (k, &d) in digits.iter().enumerate() {
        if d > 0 {
            unit = p.mul(unit, p.factorial(d as u64));
            exps.push((tower.family[k] as u16, d));
        }
    }
    exps.sort();
    Ok(repacked.monomial_element(Monomial { table: 0, exps }, p.inv(unit)))
}

/// Inverse direction: a pure monomial in one repacked family equals
/// `coeff · γ_e(z)`; returns (e, coeff).
pub fn gamma_unpack(repacked: &Presentation, tower: &RepackedTower, m: &Monomial) -> Option<(u64, u32)> {
    let p = repacked.prime();
    let q = p.get() as u64;
    let mut e = 0u64;
    let mut coeff = 1u32;
    for &(g, d) in m.exponents() {
        let k = tower.family.iter().position(|&f| f == g as usize)?;
        e += d as u64 * q.pow(k as u32);
        coeff = p.mul(coeff, p.factorial(d as u64));
    }
    Some((e, coeff))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn e_p_pres() -> Presentation {
        // E(α_1) ⊗ P(v_1) at p = 3
        Presentation::new(
            p3(),
            vec![
                GeneratorSpec::exterior("α_1", 3, 1),
                GeneratorSpec::polynomial("v_1", 4, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn binomial_examples() {
        let p = p3();
        assert_eq!(binom_mod_p(1, 2, p), 0); // C(3,1) = 3
        assert_eq!(binom_mod_p(0, 7, p), 1); // γ_0 is the unit
        assert_eq!(binom_mod_p(1, 1, p), 2); // C(2,1) = 2
    }

    #[test]
    fn binomial_matches_factorials() {
        // direct factorial arithmetic over the integers, reduced at the end
        fn exact(n: u64, k: u64) -> u64 {
            let mut num = 1u128;
            let mut den = 1u128;
            for t in 0..k {
                num *= (n - t) as u128;
                den *= (t + 1) as u128;
            }
            (num / den) as u64
        }
        for p in [3u32, 5, 7] {
            let prime = Prime::new(p).unwrap();
            for i in 0..=30u64 {
                for j in 0..=30u64 {
                    if i + j <= 33 {
                        assert_eq!(
                            binom_mod_p(i, j, prime) as u64,
                            exact(i + j, j) % p as u64,
                            "i={i} j={j} p={p}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn exterior_squares_vanish() {
        let pres = e_p_pres();
        let a = pres.gen_element("α_1").unwrap();
        assert!(pres.multiply(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn graded_commutativity_sign() {
        let pres = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::exterior("x", 3, 0),
                GeneratorSpec::exterior("y", 5, 0),
            ],
        )
        .unwrap();
        let x = pres.gen_element("x").unwrap();
        let y = pres.gen_element("y").unwrap();
        let xy = pres.multiply(&x, &y).unwrap();
        let yx = pres.multiply(&y, &x).unwrap();
        assert_eq!(pres.add(&xy, &yx).unwrap(), Element::zero());
    }

    #[test]
    fn divided_power_product_rule() {
        let pres = Presentation::new(p3(), vec![GeneratorSpec::divided("σb", 12, 3)]).unwrap();
        let g1 = pres.monomial_element(Monomial::gen(0, 1), 1);
        let g2 = pres.monomial_element(Monomial::gen(0, 2), 1);
        // γ_1·γ_2 = C(3,1) γ_3 = 0 at p = 3
        assert!(pres.multiply(&g1, &g2).unwrap().is_zero());
        let g3 = pres.monomial_element(Monomial::gen(0, 3), 1);
        let prod = pres.multiply(&g3, &g3).unwrap();
        // γ_3·γ_3 = C(6,3) γ_6 = 2 γ_6
        assert_eq!(prod.coeff(&Monomial::gen(0, 6)), 2);
    }

    #[test]
    fn presentation_mismatch_is_an_error() {
        let a = e_p_pres();
        let b = e_p_pres();
        let x = a.gen_element("α_1").unwrap();
        let y = b.gen_element("α_1").unwrap();
        assert_eq!(
            a.multiply(&x, &y).unwrap_err(),
            AlgebraError::PresentationMismatch
        );
    }

    #[test]
    fn basis_in_degree_examples() {
        let pres = e_p_pres();
        // degree 7: exactly α_1 v_1
        let b7 = pres.basis_in_degree(7).unwrap();
        assert_eq!(b7.len(), 1);
        assert_eq!(pres.display_monomial(&b7[0]), "α_1·v_1");
        // degree 0: the unit
        assert_eq!(pres.basis_in_degree(0).unwrap(), vec![Monomial::one()]);
        // Γ(x), |x| = 4: nothing in degree 10
        let gamma = Presentation::new(p3(), vec![GeneratorSpec::divided("x", 4, 0)]).unwrap();
        assert!(gamma.basis_in_degree(10).unwrap().is_empty());
        for k in [0u32, 4, 8, 12] {
            assert_eq!(gamma.basis_in_degree(k).unwrap().len(), 1);
        }
    }

    #[test]
    fn poincare_series_examples() {
        let pres = e_p_pres();
        let s = pres.poincare_series(8).unwrap();
        assert_eq!(s.dims, vec![1, 0, 0, 1, 1, 0, 0, 1, 1]);
    }

    #[test]
    fn poincare_series_of_tensor_is_convolution() {
        let a = Presentation::new(p3(), vec![GeneratorSpec::exterior("x", 3, 0)]).unwrap();
        let b = Presentation::new(p3(), vec![GeneratorSpec::polynomial("y", 4, 0)]).unwrap();
        let ab = a.tensor(&b).unwrap();
        let sa = a.poincare_series(20).unwrap();
        let sb = b.poincare_series(20).unwrap();
        assert_eq!(ab.poincare_series(20).unwrap(), sa.convolve(&sb));
    }

    #[test]
    fn zero_degree_generator_is_rejected_in_enumeration() {
        let pres =
            Presentation::new(p3(), vec![GeneratorSpec::polynomial("c", 0, 0)]).unwrap();
        assert!(matches!(
            pres.basis_in_degree(4),
            Err(AlgebraError::ZeroDegreeGenerator(_))
        ));
    }

    #[test]
    fn gamma_repack_examples() {
        let pres = Presentation::new(p3(), vec![GeneratorSpec::divided("z", 4, 1)]).unwrap();
        let (rep, towers) = repacked_presentation(&pres, 40).unwrap();
        let t = &towers[0];
        // e = 1: z itself
        let e1 = gamma_repack(&rep, t, 1).unwrap();
        assert_eq!(rep.display_element(&e1), "z");
        // e = 3 at p = 3: the generator γ3(z)
        let e3 = gamma_repack(&rep, t, 3).unwrap();
        assert_eq!(rep.display_element(&e3), "γ3(z)");
        // e = 5 at p = 3: γ_5 = 2 γ_3 z²
        let e5 = gamma_repack(&rep, t, 5).unwrap();
        assert_eq!(e5.len(), 1);
        let (m, c) = e5.terms().next().map(|(m, c)| (m.clone(), c)).unwrap();
        assert_eq!(c, 2);
        assert_eq!(rep.display_monomial(&m), "z^2·γ3(z)");
        // and unpack round-trips
        let (e, unit) = gamma_unpack(&rep, t, &m).unwrap();
        assert_eq!(e, 5);
        assert_eq!(unit, 2); // z²γ_3 = 2γ_5
    }

    #[test]
    fn divided_power_identity_survives_repacking() {
        // γ_i γ_j = (i,j) γ_{i+j}, checked in both presentations
        let p = p3();
        let pres = Presentation::new(p, vec![GeneratorSpec::divided("z", 2, 0)]).unwrap();
        let (rep, towers) = repacked_presentation(&pres, 40).unwrap();
        let t = &towers[0];
        for i in 0..=9u64 {
            for j in 0..=9u64 {
                if (i + j) * 2 > 40 {
                    continue;
                }
                let lhs = pres
                    .multiply(
                        &pres.monomial_element(Monomial::gen(0, i as u32), 1),
                        &pres.monomial_element(Monomial::gen(0, j as u32), 1),
                    )
                    .unwrap();
                let expected = pres.scale(
                    &pres.monomial_element(Monomial::gen(0, (i + j) as u32), 1),
                    binom_mod_p(i, j, p),
                );
                assert_eq!(lhs, expected, "γ_{i}γ_{j}");
                // repacked route
                let ri = gamma_repack(&rep, t, i).unwrap();
                let rj = gamma_repack(&rep, t, j).unwrap();
                let rij = rep.multiply(&ri, &rj).unwrap();
                let rtarget = rep.scale(
                    &gamma_repack(&rep, t, i + j).unwrap(),
                    binom_mod_p(i, j, p),
                );
                assert_eq!(rij, rtarget, "repacked γ_{i}γ_{j}");
            }
        }
    }

    #[test]
    fn structure_table_products() {
        // the non-free degree-0-through-33 answer shape: five classes over P ⊗ Γ
        let table = StructureTable {
            class_names: vec![
                "1".into(),
                "α_1".into(),
                "λ_1'".into(),
                "λ_2α_1".into(),
                "λ_2λ_1'".into(),
                "λ_2λ_1'α_1".into(),
            ],
            degrees: vec![0, 3, 13, 20, 30, 33],
            weights: vec![0, 1, 2, 2, 3, 4],
            products: {
                let mut prod = vec![vec![Vec::new(); 6]; 6];
                for j in 0..6 {
                    prod[0][j] = vec![(j, 1)];
                    prod[j][0] = vec![(j, 1)];
                }
                prod[1][4] = vec![(5, 1)];
                prod[4][1] = vec![(5, 1)];
                prod[2][3] = vec![(5, 1)];
                prod[3][2] = vec![(5, 1)];
                prod
            },
        };
        let pres = Presentation::with_table(
            p3(),
            vec![
                GeneratorSpec::polynomial("μ_2", 18, 0),
                GeneratorSpec::divided("σb", 12, 3),
            ],
            Some(table),
        )
        .unwrap();
        let a = pres.monomial_element(Monomial::table_class(1), 1);
        let ll = pres.monomial_element(Monomial::table_class(4), 1);
        let prod = pres.multiply(&a, &ll).unwrap();
        assert_eq!(prod.coeff(&Monomial::table_class(5)), 1);
        // dims 0..3 = [1, 0, 0, 1]
        assert_eq!(pres.poincare_series(3).unwrap().dims, vec![1, 0, 0, 1]);
        // α_1·α_1 through the table is zero
        assert!(pres.multiply(&a, &a).unwrap().is_zero());
    }
}
