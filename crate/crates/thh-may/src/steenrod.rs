//! The dual Steenrod algebra at an odd prime, comodule algebras over it, and
//! comodule primitives.
//!
//! A_* = P(ξ̄_1, ξ̄_2, …) ⊗ E(τ̄_0, τ̄_1, …) with |ξ̄_i| = 2(p^i − 1) and
//! |τ̄_i| = 2p^i − 1. Bars denote conjugate Milnor generators; the coproduct
//! on conjugates is
//!
//! ```text
//!   Δ(ξ̄_n) = Σ_{i+j=n} ξ̄_i ⊗ ξ̄_j^{p^i}
//!   Δ(τ̄_n) = 1 ⊗ τ̄_n + Σ_{i+j=n} τ̄_i ⊗ ξ̄_j^{p^i}
//! ```
//!
//! and is verified mechanically: the Hopf axioms are tested degreewise, and
//! the un-conjugated generators recovered through the antipode recursion
//! ([`DualSteenrod::literal_xi`], [`DualSteenrod::literal_tau`]) must satisfy
//! the textbook Milnor coproduct. Coactions are specified on the generators
//! of a comodule algebra and extended multiplicatively; primitives are
//! computed degreewise as the kernel of ψ − (1 ⊗ −).

use crate::algebra::{AlgebraError, Element, GeneratorKind, GeneratorSpec, Monomial, Presentation};
use crate::fp::{FpMatrix, Prime};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SteenrodError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("generator `{0}` has no coaction entry")]
    MissingCoaction(String),
    #[error("coaction of `{0}` is not degree-homogeneous: {1}")]
    InhomogeneousCoaction(String, String),
    #[error("coaction of `{0}` fails the counit condition")]
    CounitFails(String),
    #[error("divided-power generator `{0}` must have the primitive coaction")]
    DividedNotPrimitive(String),
    #[error("comodule axiom fails on generator `{0}`")]
    ComoduleAxiomFails(String),
    #[error("Hopf axiom fails: {0}")]
    HopfAxiomFails(String),
    #[error("no suspension generator for `{0}` in the target presentation")]
    MissingSuspension(String),
    #[error("structure tables are not supported in comodules")]
    TableNotSupported,
}

/// An element of a two-fold tensor product, keyed by monomial pairs.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Tensor2 {
    terms: BTreeMap<(Monomial, Monomial), u32>,
}

impl Tensor2 {
    pub fn zero() -> Tensor2 {
        Tensor2::default()
    }

    pub fn one() -> Tensor2 {
        let mut t = Tensor2::default();
        t.terms.insert((Monomial::one(), Monomial::one()), 1);
        t
    }

    pub fn term(a: Monomial, m: Monomial, c: u32) -> Tensor2 {
        let mut t = Tensor2::default();
        if c != 0 {
            t.terms.insert((a, m), c);
        }
        t
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), u32)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, p: Prime, a: Monomial, m: Monomial, c: u32) {
        let c = c % p.get();
        if c == 0 {
            return;
        }
        let e = self.terms.entry((a, m)).or_insert(0);
        *e = p.add(*e, c);
        if *e == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn add(&self, p: Prime, other: &Tensor2) -> Tensor2 {
        let mut out = self.clone();
        for ((a, m), &c) in &other.terms {
            out.add_term(p, a.clone(), m.clone(), c);
        }
        out
    }

    pub fn scale(&self, p: Prime, c: u32) -> Tensor2 {
        let mut out = Tensor2::default();
        for ((a, m), &v) in &self.terms {
            out.add_term(p, a.clone(), m.clone(), p.mul(v, c));
        }
        out
    }

    pub fn sub(&self, p: Prime, other: &Tensor2) -> Tensor2 {
        self.add(p, &other.scale(p, p.neg(1)))
    }

    /// Product in the tensor algebra: (a⊗m)(a'⊗m') = (−1)^{|m||a'|} aa' ⊗ mm'.
    pub fn mul(&self, left: &Presentation, right: &Presentation, other: &Tensor2) -> Tensor2 {
        let p = left.prime();
        let mut out = Tensor2::default();
        for ((a1, m1), &c1) in &self.terms {
            for ((a2, m2), &c2) in &other.terms {
                let sign = if right.monomial_degree(m1) % 2 == 1
                    && left.monomial_degree(a2) % 2 == 1
                {
                    p.neg(1)
                } else {
                    1
                };
                let c = p.mul(p.mul(c1, c2), sign);
                for (am, ac) in left.mul_monomials(a1, a2) {
                    for (mm, mc) in right.mul_monomials(m1, m2) {
                        out.add_term(p, am.clone(), mm, p.mul(c, p.mul(ac, mc)));
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, left: &Presentation, right: &Presentation, e: u32) -> Tensor2 {
        let mut acc = Tensor2::one();
        for _ in 0..e {
            acc = acc.mul(left, right, self);
        }
        acc
    }

    /// The right legs of the terms whose left leg is 1 (the counit side).
    pub fn counit_left(&self, right: &Presentation) -> Element {
        right.element_from_terms(
            self.terms
                .iter()
                .filter(|((a, _), _)| a.is_one())
                .map(|((_, m), &c)| (m.clone(), c))
                .collect(),
        )
    }

    /// True when every term has |a| + |m| equal to `degree`.
    pub fn homogeneous_of_degree(
        &self,
        left: &Presentation,
        right: &Presentation,
        degree: u32,
    ) -> bool {
        self.terms
            .keys()
            .all(|(a, m)| left.monomial_degree(a) + right.monomial_degree(m) == degree)
    }
}

/// Three-fold tensors; only what the coassociativity/comodule checks need.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Tensor3 {
    terms: BTreeMap<(Monomial, Monomial, Monomial), u32>,
}

impl Tensor3 {
    fn add_term(&mut self, p: Prime, key: (Monomial, Monomial, Monomial), c: u32) {
        let c = c % p.get();
        if c == 0 {
            return;
        }
        let e = self.terms.entry(key).or_insert(0);
        *e = p.add(*e, c);
        if *e == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }
}

/// The dual Steenrod algebra instantiated up to a degree cutoff.
#[derive(Clone, Debug)]
pub struct DualSteenrod {
    p: Prime,
    cutoff: u32,
    pres: Presentation,
    xi: Vec<usize>,
    tau: Vec<usize>,
}

impl DualSteenrod {
    pub fn new(p: Prime, cutoff: u32) -> DualSteenrod {
        let mut gens = Vec::new();
        let mut xi = Vec::new();
        let mut tau = Vec::new();
        let mut i = 0u32;
        loop {
            let deg = 2 * (p.get() as u64).pow(i) - 1;
            if deg > cutoff as u64 {
                break;
            }
            tau.push(gens.len());
            gens.push(GeneratorSpec::exterior(&format!("τ̄_{i}"), deg as u32, 0));
            i += 1;
        }
        let mut i = 1u32;
        loop {
            let deg = 2 * ((p.get() as u64).pow(i) - 1);
            if deg > cutoff as u64 {
                break;
            }
            xi.push(gens.len());
            gens.push(GeneratorSpec::polynomial(&format!("ξ̄_{i}"), deg as u32, 0));
            i += 1;
        }
        let pres = Presentation::new(p, gens).expect("dual Steenrod presentation");
        DualSteenrod {
            p,
            cutoff,
            pres,
            xi,
            tau,
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    /// Generator index of ξ̄_i (i ≥ 1) if instantiated.
    pub fn xi(&self, i: usize) -> Option<usize> {
        if i == 0 {
            return None;
        }
        self.xi.get(i - 1).copied()
    }

    /// Generator index of τ̄_i (i ≥ 0) if instantiated.
    pub fn tau(&self, i: usize) -> Option<usize> {
        self.tau.get(i).copied()
    }

    pub fn xi_count(&self) -> usize {
        self.xi.len()
    }

    pub fn tau_count(&self) -> usize {
        self.tau.len()
    }

    /// Δ on a single generator, from the conjugate tables.
    pub fn coproduct_gen(&self, gen: usize) -> Tensor2 {
        let p = self.p;
        let mut out = Tensor2::default();
        if let Some(n) = self.xi.iter().position(|&g| g == gen) {
            let n = n + 1; // this is ξ̄_n
            for i in 0..=n {
                let j = n - i;
                let left = if i == 0 {
                    Monomial::one()
                } else {
                    Monomial::gen(self.xi[i - 1], 1)
                };
                let right = if j == 0 {
                    Monomial::one()
                } else {
                    Monomial::gen(self.xi[j - 1], p.get().pow(i as u32))
                };
                out.add_term(p, left, right, 1);
            }
        } else if let Some(n) = self.tau.iter().position(|&g| g == gen) {
            out.add_term(p, Monomial::one(), Monomial::gen(self.tau[n], 1), 1);
            for i in 0..=n {
                let j = n - i;
                let left = Monomial::gen(self.tau[i], 1);
                let right = if j == 0 {
                    Monomial::one()
                } else {
                    Monomial::gen(self.xi[j - 1], p.get().pow(i as u32))
                };
                out.add_term(p, left, right, 1);
            }
        } else {
            panic!("not a dual Steenrod generator");
        }
        out
    }

    /// Multiplicative extension of Δ to monomials.
    pub fn coproduct_monomial(&self, m: &Monomial) -> Tensor2 {
        let mut acc = Tensor2::one();
        for &(g, e) in m.exponents() {
            let dg = self.coproduct_gen(g as usize);
            acc = acc.mul(&self.pres, &self.pres, &dg.pow(&self.pres, &self.pres, e));
        }
        acc
    }

    pub fn coproduct(&self, x: &Element) -> Tensor2 {
        let mut out = Tensor2::default();
        for (m, c) in x.terms() {
            out = out.add(self.p, &self.coproduct_monomial(m).scale(self.p, c));
        }
        out
    }

    /// The un-conjugated ξ_n in the conjugate basis, from the antipode
    /// recursion ξ_n = −Σ_{i+j=n, j≥1} ξ_i^{p^j} ξ̄_j.
    pub fn literal_xi(&self, n: usize) -> Element {
        if n == 0 {
            return self.pres.one();
        }
        let p = self.p;
        let mut acc = Element::zero();
        for j in 1..=n {
            let i = n - j;
            let xi_i = self.literal_xi(i);
            let pow = self
                .pres
                .power(&xi_i, p.get().pow(j as u32))
                .expect("power");
            let xbar_j = self
                .pres
                .monomial_element(Monomial::gen(self.xi[j - 1], 1), 1);
            let term = self.pres.multiply(&pow, &xbar_j).expect("product");
            acc = self.pres.add(&acc, &term).expect("sum");
        }
        self.pres.scale(&acc, p.neg(1))
    }

    /// The un-conjugated τ_n: τ_n = −Σ_{i+j=n} ξ_i^{p^j} τ̄_j.
    pub fn literal_tau(&self, n: usize) -> Element {
        let p = self.p;
        let mut acc = Element::zero();
        for j in 0..=n {
            let i = n - j;
            let xi_i = self.literal_xi(i);
            let pow = self
                .pres
                .power(&xi_i, p.get().pow(j as u32))
                .expect("power");
            let tbar_j = self
                .pres
                .monomial_element(Monomial::gen(self.tau[j], 1), 1);
            let term = self.pres.multiply(&pow, &tbar_j).expect("product");
            acc = self.pres.add(&acc, &term).expect("sum");
        }
        self.pres.scale(&acc, p.neg(1))
    }

    /// Coassociativity and counit on every basis monomial of degree ≤ n_max.
    pub fn check_hopf_axioms(&self, n_max: u32) -> Result<(), SteenrodError> {
        let p = self.p;
        let basis = self.pres.basis_up_to(n_max.min(self.cutoff))?;
        for monos in &basis {
            for m in monos {
                let d = self.coproduct_monomial(m);
                let left = d.counit_left(&self.pres);
                if left != self.pres.monomial_element(m.clone(), 1) {
                    return Err(SteenrodError::HopfAxiomFails(format!(
                        "(ε⊗id)Δ on {}",
                        self.pres.display_monomial(m)
                    )));
                }
                let right = self.pres.element_from_terms(
                    d.terms()
                        .filter(|((_, b), _)| b.is_one())
                        .map(|((a, _), c)| (a.clone(), c))
                        .collect(),
                );
                if right != self.pres.monomial_element(m.clone(), 1) {
                    return Err(SteenrodError::HopfAxiomFails(format!(
                        "(id⊗ε)Δ on {}",
                        self.pres.display_monomial(m)
                    )));
                }
                let mut lhs = Tensor3::default();
                for ((a, b), c) in d.terms() {
                    for ((a1, a2), c1) in self.coproduct_monomial(a).terms() {
                        lhs.add_term(p, (a1.clone(), a2.clone(), b.clone()), p.mul(c, c1));
                    }
                }
                let mut rhs = Tensor3::default();
                for ((a, b), c) in d.terms() {
                    for ((b1, b2), c1) in self.coproduct_monomial(b).terms() {
                        rhs.add_term(p, (a.clone(), b1.clone(), b2.clone()), p.mul(c, c1));
                    }
                }
                if lhs != rhs {
                    return Err(SteenrodError::HopfAxiomFails(format!(
                        "coassociativity on {}",
                        self.pres.display_monomial(m)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Primitive vectors per degree, in the monomial basis of the comodule.
#[derive(Clone, Debug)]
pub struct PrimitiveBasis {
    pub dims: Vec<u64>,
    pub by_degree: Vec<PrimitiveDegree>,
}

#[derive(Clone, Debug, Default)]
pub struct PrimitiveDegree {
    pub basis: Vec<Monomial>,
    pub vectors: Vec<Vec<u32>>,
}

impl PrimitiveBasis {
    pub fn elements(&self, pres: &Presentation, degree: u32) -> Vec<Element> {
        let d = &self.by_degree[degree as usize];
        d.vectors
            .iter()
            .map(|v| {
                pres.element_from_terms(
                    d.basis
                        .iter()
                        .zip(v)
                        .filter(|(_, &c)| c != 0)
                        .map(|(m, &c)| (m.clone(), c))
                        .collect(),
                )
            })
            .collect()
    }
}

/// An algebra equipped with an A_*-coaction specified on its generators.
#[derive(Clone, Debug)]
pub struct Comodule {
    steenrod: DualSteenrod,
    algebra: Presentation,
    coactions: Vec<Tensor2>,
}

impl Comodule {
    /// Build and validate: every generator needs an entry, each coaction must
    /// be degree-homogeneous (the transcription tripwire), satisfy the counit
    /// condition, and divided-power generators must be primitive.
    pub fn new(
        steenrod: DualSteenrod,
        algebra: Presentation,
        coactions: Vec<(String, Tensor2)>,
    ) -> Result<Comodule, SteenrodError> {
        if algebra.table().is_some() {
            return Err(SteenrodError::TableNotSupported);
        }
        let by_name: BTreeMap<&str, &Tensor2> =
            coactions.iter().map(|(n, t)| (n.as_str(), t)).collect();
        let mut table = Vec::new();
        for (gi, g) in algebra.generators().iter().enumerate() {
            let Some(&t) = by_name.get(g.name.as_str()) else {
                return Err(SteenrodError::MissingCoaction(g.name.clone()));
            };
            if !t.homogeneous_of_degree(steenrod.presentation(), &algebra, g.degree) {
                return Err(SteenrodError::InhomogeneousCoaction(
                    g.name.clone(),
                    format!("expected total degree {}", g.degree),
                ));
            }
            let gen_elt = algebra.monomial_element(Monomial::gen(gi, 1), 1);
            if t.counit_left(&algebra) != gen_elt {
                return Err(SteenrodError::CounitFails(g.name.clone()));
            }
            if matches!(g.kind, GeneratorKind::DividedPower)
                && *t != Tensor2::term(Monomial::one(), Monomial::gen(gi, 1), 1)
            {
                return Err(SteenrodError::DividedNotPrimitive(g.name.clone()));
            }
            table.push(t.clone());
        }
        Ok(Comodule {
            steenrod,
            algebra,
            coactions: table,
        })
    }

    pub fn algebra(&self) -> &Presentation {
        &self.algebra
    }

    pub fn steenrod(&self) -> &DualSteenrod {
        &self.steenrod
    }

    pub fn coaction_gen(&self, gen: usize) -> &Tensor2 {
        &self.coactions[gen]
    }

    /// ψ on a monomial: the product of generator coactions; γ_e classes of a
    /// (necessarily primitive) divided generator stay primitive.
    pub fn coaction_monomial(&self, m: &Monomial) -> Tensor2 {
        let a = self.steenrod.presentation();
        let mut acc = Tensor2::one();
        for &(g, e) in m.exponents() {
            let factor = match self.algebra.generators()[g as usize].kind {
                GeneratorKind::DividedPower => {
                    Tensor2::term(Monomial::one(), Monomial::gen(g as usize, e), 1)
                }
                _ => self.coactions[g as usize].pow(a, &self.algebra, e),
            };
            acc = acc.mul(a, &self.algebra, &factor);
        }
        acc
    }

    pub fn coaction(&self, x: &Element) -> Tensor2 {
        let mut out = Tensor2::default();
        for (m, c) in x.terms() {
            out = out.add(
                self.steenrod.p,
                &self.coaction_monomial(m).scale(self.steenrod.p, c),
            );
        }
        out
    }

    pub fn is_primitive(&self, x: &Element) -> bool {
        let mut expected = Tensor2::default();
        for (m, c) in x.terms() {
            expected.add_term(self.steenrod.p, Monomial::one(), m.clone(), c);
        }
        self.coaction(x) == expected
    }

    /// (Δ⊗id)ψ = (id⊗ψ)ψ on every generator.
    pub fn check_comodule_axiom(&self) -> Result<(), SteenrodError> {
        let p = self.steenrod.p;
        for (gi, g) in self.algebra.generators().iter().enumerate() {
            let psi = &self.coactions[gi];
            let mut lhs = Tensor3::default();
            for ((a, m), c) in psi.terms() {
                for ((a1, a2), c1) in self.steenrod.coproduct_monomial(a).terms() {
                    lhs.add_term(p, (a1.clone(), a2.clone(), m.clone()), p.mul(c, c1));
                }
            }
            let mut rhs = Tensor3::default();
            for ((a, m), c) in psi.terms() {
                for ((b, m2), c1) in self.coaction_monomial(m).terms() {
                    rhs.add_term(p, (a.clone(), b.clone(), m2.clone()), p.mul(c, c1));
                }
            }
            if lhs != rhs {
                return Err(SteenrodError::ComoduleAxiomFails(g.name.clone()));
            }
        }
        Ok(())
    }

    /// Degreewise basis of ker(ψ − (1 ⊗ −)) for degrees 0..=n_max.
    pub fn primitives(&self, n_max: u32) -> Result<PrimitiveBasis, SteenrodError> {
        let p = self.steenrod.p;
        let basis = self.algebra.basis_up_to(n_max)?;
        let mut dims = Vec::with_capacity(n_max as usize + 1);
        let mut by_degree = Vec::with_capacity(n_max as usize + 1);

        let mut pow_cache: BTreeMap<(usize, u32), Tensor2> = BTreeMap::new();

        for n in 0..=n_max {
            let monos = &basis[n as usize];
            if monos.is_empty() {
                dims.push(0);
                by_degree.push(PrimitiveDegree::default());
                continue;
            }
            // rows are pairs (a, m') with |a| ≥ 1, registered on first
            // touch: untouched pairs are zero rows and cannot cut the
            // kernel. The 1⊗− part cancels exactly by the counit condition.
            let mut row_index: BTreeMap<(Monomial, Monomial), usize> = BTreeMap::new();
            let mut entries: Vec<(usize, usize, u32)> = Vec::new();
            for (col, m) in monos.iter().enumerate() {
                let mut acc = Tensor2::one();
                for &(g, e) in m.exponents() {
                    let key = (g as usize, e);
                    let factor = pow_cache.entry(key).or_insert_with(|| {
                        match self.algebra.generators()[g as usize].kind {
                            GeneratorKind::DividedPower => {
                                Tensor2::term(Monomial::one(), Monomial::gen(g as usize, e), 1)
                            }
                            _ => self.coactions[g as usize].pow(
                                self.steenrod.presentation(),
                                &self.algebra,
                                e,
                            ),
                        }
                    });
                    acc = acc.mul(self.steenrod.presentation(), &self.algebra, factor);
                }
                for ((a, m2), c) in acc.terms() {
                    if a.is_one() {
                        continue;
                    }
                    let next = row_index.len();
                    let row = *row_index.entry((a.clone(), m2.clone())).or_insert(next);
                    entries.push((row, col, c));
                }
            }
            let mut matrix = FpMatrix::zero(p, row_index.len(), monos.len());
            for (row, col, c) in entries {
                matrix.set(row, col, c);
            }
            let kernel = matrix.kernel_basis();
            dims.push(kernel.len() as u64);
            by_degree.push(PrimitiveDegree {
                basis: monos.clone(),
                vectors: kernel,
            });
        }
        Ok(PrimitiveBasis { dims, by_degree })
    }
}

/// Transport Δ(gen) of a dual Steenrod generator into A_* ⊗ M along a
/// generator name map (right legs become M-monomials of the mapped names).
pub fn induced_coaction(
    steenrod: &DualSteenrod,
    a_gen: usize,
    m_pres: &Presentation,
    name_map: &BTreeMap<String, String>,
) -> Result<Tensor2, SteenrodError> {
    let p = steenrod.prime();
    let a_pres = steenrod.presentation();
    let mut out = Tensor2::default();
    for ((a, right), c) in steenrod.coproduct_gen(a_gen).terms() {
        let mut m = Monomial::one();
        for &(g, e) in right.exponents() {
            let a_name = &a_pres.generators()[g as usize].name;
            let m_name = name_map
                .get(a_name)
                .ok_or_else(|| SteenrodError::MissingCoaction(a_name.clone()))?;
            let idx = m_pres
                .generator_index(m_name)
                .ok_or_else(|| SteenrodError::MissingCoaction(m_name.clone()))?;
            for (mm, _) in m_pres.mul_monomials(&m, &Monomial::gen(idx, e)) {
                m = mm;
            }
        }
        out.add_term(p, a.clone(), m, c);
    }
    Ok(out)
}

/// (1 ⊗ σ) applied to a coaction: right legs are suspended by the odd
/// derivation with σ(g) the named suspension generator and σ(1) = 0.
pub fn suspend_coaction(
    t: &Tensor2,
    m_pres: &Presentation,
    sigma: &BTreeMap<usize, usize>,
) -> Result<Tensor2, SteenrodError> {
    let p = m_pres.prime();
    let mut out = Tensor2::default();
    for ((a, m), c) in t.terms() {
        for (sm, sc) in suspend_monomial(m_pres, m, sigma)? {
            out.add_term(p, a.clone(), sm, p.mul(c, sc));
        }
    }
    Ok(out)
}

/// σ as an odd derivation on a monomial: σ(xy) = σ(x)y + (−1)^{|x|} x σ(y),
/// with σ(g^e) = e g^{e−1} σg and σ(γ_e(g)) = γ_{e−1}(g) σg.
fn suspend_monomial(
    pres: &Presentation,
    m: &Monomial,
    sigma: &BTreeMap<usize, usize>,
) -> Result<Vec<(Monomial, u32)>, SteenrodError> {
    let p = pres.prime();
    let mono = |exps: &[(u16, u32)]| -> Monomial {
        let mut out = Monomial::one();
        for &(h, he) in exps {
            for (mm, _) in pres.mul_monomials(&out, &Monomial::gen(h as usize, he)) {
                out = mm;
            }
        }
        out
    };
    let mut merged: BTreeMap<Monomial, u32> = BTreeMap::new();
    let mut prefix_parity = 0u32;
    for (pos, &(g, e)) in m.exponents().iter().enumerate() {
        let gu = g as usize;
        let spec = &pres.generators()[gu];
        let factor_coeff = match spec.kind {
            GeneratorKind::DividedPower => 1u32,
            _ => e % p.get(),
        };
        if factor_coeff != 0 {
            let &sg = sigma
                .get(&gu)
                .ok_or_else(|| SteenrodError::MissingSuspension(spec.name.clone()))?;
            // prefix · (g^{e−1} σg) · suffix, with the derivation sign on
            // the prefix; the products restore canonical order
            let sign = if prefix_parity % 2 == 1 { p.neg(1) } else { 1 };
            let prefix = pres.monomial_element(
                mono(&m.exponents()[..pos]),
                p.mul(factor_coeff, sign),
            );
            let middle = pres
                .multiply(
                    &pres.monomial_element(Monomial::gen(gu, e - 1), 1),
                    &pres.monomial_element(Monomial::gen(sg, 1), 1),
                )
                .expect("product");
            let suffix = pres.monomial_element(mono(&m.exponents()[pos + 1..]), 1);
            let prod = pres
                .multiply(&pres.multiply(&prefix, &middle).expect("product"), &suffix)
                .expect("product");
            for (mm, mc) in prod.terms() {
                let entry = merged.entry(mm.clone()).or_insert(0);
                *entry = p.add(*entry, mc);
            }
        }
        prefix_parity += spec.degree * e;
    }
    merged.retain(|_, c| *c != 0);
    Ok(merged.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn generator_degrees() {
        let a = DualSteenrod::new(p3(), 30);
        let pres = a.presentation();
        assert_eq!(pres.generators()[a.tau(0).unwrap()].degree, 1);
        assert_eq!(pres.generators()[a.tau(1).unwrap()].degree, 5);
        assert_eq!(pres.generators()[a.tau(2).unwrap()].degree, 17);
        assert_eq!(pres.generators()[a.xi(1).unwrap()].degree, 4);
        assert_eq!(pres.generators()[a.xi(2).unwrap()].degree, 16);
        assert!(a.xi(3).is_none()); // degree 52 > 30
    }

    #[test]
    fn coproduct_of_tau0_and_unit() {
        let a = DualSteenrod::new(p3(), 10);
        let t0 = a.tau(0).unwrap();
        let d = a.coproduct_gen(t0);
        let mut expected = Tensor2::default();
        expected.add_term(p3(), Monomial::one(), Monomial::gen(t0, 1), 1);
        expected.add_term(p3(), Monomial::gen(t0, 1), Monomial::one(), 1);
        assert_eq!(d, expected);
        assert_eq!(a.coproduct_monomial(&Monomial::one()), Tensor2::one());
    }

    #[test]
    fn hopf_axioms_hold_to_degree_30() {
        let a = DualSteenrod::new(p3(), 30);
        a.check_hopf_axioms(30).unwrap();
    }

    #[test]
    fn antipode_recursion_satisfies_milnor_coproduct() {
        // Δ(ξ_n) = Σ ξ_i^{p^j} ⊗ ξ_j and Δ(τ_n) = τ_n⊗1 + Σ ξ_i^{p^j} ⊗ τ_j
        // with all symbols un-conjugated; this pins the conjugate tables.
        let a = DualSteenrod::new(p3(), 20);
        let p = a.prime();
        let pres = a.presentation();
        for n in 0..=2usize {
            let lhs = a.coproduct(&a.literal_xi(n));
            let mut rhs = Tensor2::default();
            for i in 0..=n {
                let j = n - i;
                let left = pres.power(&a.literal_xi(i), p.get().pow(j as u32)).unwrap();
                let right = a.literal_xi(j);
                for (lm, lc) in left.terms() {
                    for (rm, rc) in right.terms() {
                        rhs.add_term(p, lm.clone(), rm.clone(), p.mul(lc, rc));
                    }
                }
            }
            assert_eq!(lhs, rhs, "Δξ_{n}");
        }
        for n in 0..=1usize {
            let lhs = a.coproduct(&a.literal_tau(n));
            let mut rhs = Tensor2::default();
            for (m, c) in a.literal_tau(n).terms() {
                rhs.add_term(p, m.clone(), Monomial::one(), c);
            }
            for i in 0..=n {
                let j = n - i;
                let left = pres.power(&a.literal_xi(i), p.get().pow(j as u32)).unwrap();
                let right = a.literal_tau(j);
                for (lm, lc) in left.terms() {
                    for (rm, rc) in right.terms() {
                        rhs.add_term(p, lm.clone(), rm.clone(), p.mul(lc, rc));
                    }
                }
            }
            assert_eq!(lhs, rhs, "Δτ_{n}");
        }
    }

    #[test]
    fn antipode_identity_on_conjugates() {
        // m(χ⊗id)Δ(ξ_n) = 0 for n ≥ 1, expanded through the literals
        let a = DualSteenrod::new(p3(), 20);
        let p = a.prime();
        let pres = a.presentation();
        for n in 1..=2usize {
            let mut acc = Element::zero();
            for i in 0..=n {
                let j = n - i;
                let xbar = if i == 0 {
                    pres.one()
                } else {
                    pres.monomial_element(
                        Monomial::gen(a.xi(i).unwrap(), p.get().pow(j as u32)),
                        1,
                    )
                };
                let term = pres.multiply(&xbar, &a.literal_xi(j)).unwrap();
                acc = pres.add(&acc, &term).unwrap();
            }
            assert!(acc.is_zero(), "antipode identity fails for ξ_{n}");
        }
    }

    #[test]
    fn trivial_comodule_is_all_primitive() {
        let a = DualSteenrod::new(p3(), 12);
        let m = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::exterior("x", 3, 0),
                GeneratorSpec::polynomial("y", 4, 0),
            ],
        )
        .unwrap();
        let xi = m.generator_index("x").unwrap();
        let yi = m.generator_index("y").unwrap();
        let co = vec![
            (
                "x".to_string(),
                Tensor2::term(Monomial::one(), Monomial::gen(xi, 1), 1),
            ),
            (
                "y".to_string(),
                Tensor2::term(Monomial::one(), Monomial::gen(yi, 1), 1),
            ),
        ];
        let cm = Comodule::new(a, m.clone(), co).unwrap();
        cm.check_comodule_axiom().unwrap();
        let prim = cm.primitives(12).unwrap();
        assert_eq!(prim.dims, m.poincare_series(12).unwrap().dims);
    }

    #[test]
    fn suspension_is_an_odd_derivation() {
        // σ(xy) = σ(x)y + (−1)^{|x|} x σ(y) on a mixed two-factor monomial
        // with odd first factor
        let pres = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::exterior("x", 3, 0),
                GeneratorSpec::polynomial("y", 4, 0),
                GeneratorSpec::divided("σx", 4, 0),
                GeneratorSpec::exterior("σy", 5, 0),
            ],
        )
        .unwrap();
        let sigma: BTreeMap<usize, usize> = [(0usize, 2usize), (1, 3)].into_iter().collect();
        let x = pres.gen_element("x").unwrap();
        let y = pres.gen_element("y").unwrap();
        let xy = pres.multiply(&x, &y).unwrap();
        let got = pres.element_from_terms(
            suspend_monomial(&pres, xy.lead().unwrap(), &sigma).unwrap(),
        );
        // σ(x)y − xσ(y)
        let sx_y = pres
            .multiply(&pres.gen_element("σx").unwrap(), &y)
            .unwrap();
        let x_sy = pres
            .multiply(&x, &pres.gen_element("σy").unwrap())
            .unwrap();
        let expected = pres.sub(&sx_y, &x_sy).unwrap();
        assert_eq!(got, expected);
        // and σ of a p-th power vanishes
        let y3 = pres.power(&y, 3).unwrap();
        let got = suspend_monomial(&pres, y3.lead().unwrap(), &sigma).unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn homogeneity_tripwire_fires() {
        let a = DualSteenrod::new(p3(), 12);
        let m = Presentation::new(p3(), vec![GeneratorSpec::exterior("x", 3, 0)]).unwrap();
        let xi = m.generator_index("x").unwrap();
        let t0 = a.tau(0).unwrap();
        // τ̄_0 ⊗ x has degree 4 ≠ 3
        let mut bad = Tensor2::term(Monomial::one(), Monomial::gen(xi, 1), 1);
        bad.add_term(p3(), Monomial::gen(t0, 1), Monomial::gen(xi, 1), 1);
        let err = Comodule::new(a, m, vec![("x".to_string(), bad)]).unwrap_err();
        assert!(matches!(err, SteenrodError::InhomogeneousCoaction(..)));
    }
}
