//! A multiplicative bigraded spectral-sequence engine.
//!
//! A page is seeded from an algebra presentation: its classes are the
//! monomials of total degree ≤ the cutoff, placed at (degree, weight).
//! Differentials are given as generator-level rule families, extended to all
//! monomials by the graded Leibniz rule, validated for bidegree consistency
//! and d∘d = 0, and pages turn by computing cycles/boundaries cellwise.
//! Every differential drops total degree by one; the convention fixes how the
//! filtration weight moves and how (degree, weight) project to chart
//! coordinates (s, t).

use crate::algebra::{
    AlgebraError, Element, GeneratorKind, GeneratorSpec, Monomial, Presentation, StructureTable,
};
use crate::chart::{ChartModel, Dot, Stroke};
use crate::fp::{FpError, FpMatrix, Subquotient};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SseqError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error("rule family targets page {family} but the page is at r = {page}")]
    WrongPage { family: u32, page: u32 },
    #[error("rule source `{0}` is not a single generator power")]
    CompositeSource(String),
    #[error("rule source `{0}` does not exist on the page")]
    MissingSource(String),
    #[error("rule on `{0}` is bidegree-inconsistent: {1}")]
    BidegreeInconsistent(String, String),
    #[error("d∘d ≠ 0 at bidegree ({0}, {1}): a rule family was transcribed wrong")]
    DSquareNonzero(u32, u32),
    #[error("page already carries a populated differential")]
    AlreadyPopulated,
    #[error("page has been turned; reseed from a presentation to apply further rules")]
    TurnedPage,
    #[error("cannot advance from r = {0} to r = {1}")]
    BadAdvance(u32, u32),
    #[error("extension `{0}` is inconsistent with survivor degrees: {1}")]
    BadExtension(String, String),
    #[error("assembled presentation disagrees with the page in degree {0}: {1} vs {2}")]
    AssemblyMismatch(u32, u64, u64),
    #[error("table product check failed for `{0}`·`{1}`")]
    TableProductMismatch(String, String),
}

/// How the differential moves the (s, t) display bidegree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// d_r: (s, t) → (s − 1, t + r); s is the total degree, t the filtration.
    May,
    /// Homological convention d_r: (s, t) → (s − r, t + r − 1); s is the
    /// homological (filtration) degree, t the internal degree.
    Bokstedt,
}

impl Convention {
    /// Shift of the filtration weight under d_r (total degree always −1).
    pub fn weight_shift(self, r: u32) -> i64 {
        match self {
            Convention::May => r as i64,
            Convention::Bokstedt => -(r as i64),
        }
    }

    /// Chart coordinates of a class at (total degree, weight).
    pub fn chart_coords(self, degree: u32, weight: u32) -> (u32, u32) {
        match self {
            Convention::May => (degree, weight),
            Convention::Bokstedt => (weight, degree - weight),
        }
    }

    /// The documented (Δs, Δt) of d_r in chart coordinates.
    pub fn bidegree_shift(self, r: u32) -> (i64, i64) {
        match self {
            Convention::May => (-1, r as i64),
            Convention::Bokstedt => (-(r as i64), r as i64 - 1),
        }
    }

    /// Page number the sequence starts on.
    pub fn initial_page(self) -> u32 {
        match self {
            Convention::May => 1,
            Convention::Bokstedt => 2,
        }
    }
}

/// One generator-level differential rule: d_r(source) = target, optionally
/// only up to a unit scalar.
#[derive(Clone, Debug)]
pub struct Rule {
    pub source: Monomial,
    pub target: Element,
    pub up_to_unit: bool,
}

/// A family of rules for one page.
#[derive(Clone, Debug)]
pub struct RuleFamily {
    pub r: u32,
    pub rules: Vec<Rule>,
}

#[derive(Clone, Debug)]
struct Cell {
    degree: u32,
    basis: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    sq: Subquotient,
    names: Vec<String>,
}

impl Cell {
    fn dim(&self) -> usize {
        self.sq.dim()
    }
}

/// A page of the spectral sequence.
#[derive(Clone, Debug)]
pub struct Page {
    pub r: u32,
    pub convention: Convention,
    pub cutoff: u32,
    turns: u32,
    fresh: bool,
    pres: Presentation,
    cells: BTreeMap<(u32, u32), Cell>,
    diff: Option<Differential>,
}

#[derive(Clone, Debug)]
struct Differential {
    r: u32,
    /// Ambient-coordinate matrix per source bidegree; rows index the target
    /// cell basis, columns the source cell basis.
    matrices: BTreeMap<(u32, u32), FpMatrix>,
}

/// A reported possible-differential slot: both cells nonzero, nothing rules
/// the differential out on bidegree grounds alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub from: (u32, u32),
    pub to: (u32, u32),
    pub r: u32,
    pub source_dim: u64,
    pub target_dim: u64,
}

/// A hidden multiplicative extension base^p = target among survivors.
#[derive(Clone, Debug)]
pub struct PowerExtension {
    pub base: String,
    pub target: String,
}

/// Seed a page from a presentation: monomials of degree ≤ cutoff placed at
/// (degree, weight), zero differential, page number the convention's start.
pub fn init_page(
    pres: &Presentation,
    convention: Convention,
    cutoff: u32,
) -> Result<Page, SseqError> {
    let p = pres.prime();
    let basis = pres.basis_up_to(cutoff)?;
    let mut buckets: BTreeMap<(u32, u32), Vec<Monomial>> = BTreeMap::new();
    for (d, monos) in basis.iter().enumerate() {
        for m in monos {
            let w = pres.monomial_weight(m);
            buckets
                .entry((d as u32, w))
                .or_default()
                .push(m.clone());
        }
    }
    let mut cells = BTreeMap::new();
    for ((d, w), monos) in buckets {
        let dim = monos.len();
        let identity: Vec<Vec<u32>> = (0..dim)
            .map(|i| {
                let mut v = vec![0u32; dim];
                v[i] = 1;
                v
            })
            .collect();
        let sq = Subquotient::new(p, dim, &identity, &[])?;
        let names = monos.iter().map(|m| pres.display_monomial(m)).collect();
        let index = monos
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        cells.insert(
            (d, w),
            Cell {
                degree: d,
                basis: monos,
                index,
                sq,
                names,
            },
        );
    }
    Ok(Page {
        r: convention.initial_page(),
        convention,
        cutoff,
        turns: 0,
        fresh: true,
        pres: pres.clone(),
        cells,
        diff: None,
    })
}

impl Page {
    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    /// Largest total degree whose classes are fully resolved: each real page
    /// turn consumes one degree at the window edge, because incoming
    /// differentials from just outside the window are unknown.
    pub fn resolved_max(&self) -> u32 {
        self.cutoff - self.turns.min(self.cutoff)
    }

    pub fn turns(&self) -> u32 {
        self.turns
    }

    /// Charge the page with turns performed before its presentation was
    /// seeded (a reseed after a verified comparison inherits the window
    /// erosion of the pages it replaces).
    pub fn with_prior_turns(mut self, turns: u32) -> Page {
        self.turns += turns;
        self
    }

    /// Move to a later page without applying differentials (they are zero).
    pub fn advance_to(&self, r: u32) -> Result<Page, SseqError> {
        if self.diff.is_some() {
            return Err(SseqError::AlreadyPopulated);
        }
        if r < self.r {
            return Err(SseqError::BadAdvance(self.r, r));
        }
        let mut page = self.clone();
        page.r = r;
        Ok(page)
    }

    /// Class dimensions per bidegree (degree, weight).
    pub fn dims_by_bidegree(&self) -> BTreeMap<(u32, u32), u64> {
        self.cells
            .iter()
            .filter(|(_, c)| c.dim() > 0)
            .map(|(&k, c)| (k, c.dim() as u64))
            .collect()
    }

    /// Total class dimension per degree 0..=cutoff.
    pub fn column_dims(&self) -> Vec<u64> {
        let mut dims = vec![0u64; self.cutoff as usize + 1];
        for c in self.cells.values() {
            dims[c.degree as usize] += c.dim() as u64;
        }
        dims
    }

    /// Class names at a bidegree.
    pub fn class_names(&self, degree: u32, weight: u32) -> Vec<String> {
        self.cells
            .get(&(degree, weight))
            .map(|c| c.names.clone())
            .unwrap_or_default()
    }

    /// The class coordinates of an ambient element, if it is homogeneous and
    /// a cycle; None if it lies in a missing cell or is not a cycle.
    pub fn class_of_element(&self, e: &Element) -> Option<((u32, u32), Vec<u32>)> {
        if e.is_zero() {
            return None;
        }
        let d = self.pres.element_degree(e)?;
        let w = self.pres.element_weight(e)?;
        let cell = self.cells.get(&(d, w))?;
        let mut v = vec![0u32; cell.basis.len()];
        for (m, c) in e.terms() {
            v[*cell.index.get(m)?] = c;
        }
        cell.sq.class_coords(&v).ok().map(|k| ((d, w), k))
    }

    /// True when the monomial survives as a nonzero class on this page.
    pub fn class_is_nonzero(&self, m: &Monomial) -> bool {
        let e = self.pres.monomial_element(m.clone(), 1);
        self.class_of_element(&e)
            .map(|(_, k)| k.iter().any(|&c| c != 0))
            .unwrap_or(false)
    }

    fn rule_map(&self, family: &RuleFamily) -> Result<BTreeMap<Monomial, Element>, SseqError> {
        let mut rules = BTreeMap::new();
        for rule in &family.rules {
            if rule.source.table_index() != 0 || rule.source.exponents().len() != 1 {
                return Err(SseqError::CompositeSource(
                    self.pres.display_monomial(&rule.source),
                ));
            }
            let sd = self.pres.monomial_degree(&rule.source);
            if sd > self.cutoff || !self.cell_contains(&rule.source) {
                return Err(SseqError::MissingSource(
                    self.pres.display_monomial(&rule.source),
                ));
            }
            if !rule.target.is_zero() {
                let td = self
                    .pres
                    .element_degree(&rule.target)
                    .ok_or_else(|| {
                        SseqError::BidegreeInconsistent(
                            self.pres.display_monomial(&rule.source),
                            "target is not homogeneous".into(),
                        )
                    })?;
                let tw = self.pres.element_weight(&rule.target).unwrap();
                let sw = self.pres.monomial_weight(&rule.source);
                let expect_w = sw as i64 + self.convention.weight_shift(family.r);
                if td != sd - 1 || tw as i64 != expect_w {
                    return Err(SseqError::BidegreeInconsistent(
                        self.pres.display_monomial(&rule.source),
                        format!(
                            "source at ({sd},{sw}), target at ({td},{tw}), expected ({}, {})",
                            sd - 1,
                            expect_w
                        ),
                    ));
                }
            }
            rules.insert(rule.source.clone(), rule.target.clone());
        }
        Ok(rules)
    }

    fn cell_contains(&self, m: &Monomial) -> bool {
        let d = self.pres.monomial_degree(m);
        let w = self.pres.monomial_weight(m);
        self.cells
            .get(&(d, w))
            .map(|c| c.index.contains_key(m))
            .unwrap_or(false)
    }

    /// d of a single generator power, from an explicit rule, the derived
    /// power rule, or the divided-power default.
    fn d_of_class(
        &self,
        rules: &BTreeMap<Monomial, Element>,
        g: usize,
        e: u32,
    ) -> Result<Element, SseqError> {
        let class = Monomial::gen(g, e);
        if let Some(t) = rules.get(&class) {
            return Ok(t.clone());
        }
        if e == 1 {
            return Ok(Element::zero());
        }
        let Some(dg) = rules.get(&Monomial::gen(g, 1)) else {
            return Ok(Element::zero());
        };
        let spec = &self.pres.generators()[g];
        match spec.kind {
            GeneratorKind::DividedPower => {
                // the unique divided-power derivation: d(γ_e) = γ_{e−1}·d(γ_1)
                let prev = self.pres.monomial_element(Monomial::gen(g, e - 1), 1);
                Ok(self.pres.multiply(&prev, dg)?)
            }
            GeneratorKind::Polynomial | GeneratorKind::Truncated(_) => {
                let prev = self
                    .pres
                    .monomial_element(Monomial::gen(g, e - 1), e % self.pres.prime().get());
                Ok(self.pres.multiply(&prev, dg)?)
            }
            GeneratorKind::Exterior => unreachable!("exterior exponent > 1"),
        }
    }

    /// Leibniz extension d(xy) = d(x)y + (−1)^{|x|} x d(y) over the factors
    /// of a monomial.
    pub fn derivation_of_monomial(
        &self,
        rules: &BTreeMap<Monomial, Element>,
        m: &Monomial,
    ) -> Result<Element, SseqError> {
        let p = self.pres.prime();
        let mono = |exps: &[(u16, u32)]| -> Monomial {
            let mut m = Monomial::one();
            for &(h, he) in exps {
                for (mm, _) in self.pres.mul_monomials(&m, &Monomial::gen(h as usize, he)) {
                    m = mm;
                }
            }
            m
        };
        let mut acc = Element::zero();
        let mut prefix_parity = 0u32;
        for (pos, &(g, e)) in m.exponents().iter().enumerate() {
            let dc = self.d_of_class(rules, g as usize, e)?;
            if !dc.is_zero() {
                let sign = if prefix_parity % 2 == 1 { p.neg(1) } else { 1 };
                let prefix = self
                    .pres
                    .monomial_element(mono(&m.exponents()[..pos]), sign);
                let suffix = self
                    .pres
                    .monomial_element(mono(&m.exponents()[pos + 1..]), 1);
                let term = self
                    .pres
                    .multiply(&self.pres.multiply(&prefix, &dc)?, &suffix)?;
                acc = self.pres.add(&acc, &term)?;
            }
            prefix_parity += self.pres.generators()[g as usize].degree * e;
        }
        Ok(acc)
    }

    /// Populate d_r from a rule family: validate, extend by Leibniz to every
    /// monomial, and check d∘d = 0 inside the window.
    pub fn apply_rules(&self, family: &RuleFamily) -> Result<Page, SseqError> {
        if !self.fresh {
            return Err(SseqError::TurnedPage);
        }
        if self.diff.is_some() {
            return Err(SseqError::AlreadyPopulated);
        }
        if family.r != self.r {
            return Err(SseqError::WrongPage {
                family: family.r,
                page: self.r,
            });
        }
        let rules = self.rule_map(family)?;
        let shift = self.convention.weight_shift(self.r);
        let mut matrices: BTreeMap<(u32, u32), FpMatrix> = BTreeMap::new();
        for (&(d, w), cell) in &self.cells {
            if d == 0 {
                continue;
            }
            let tw = w as i64 + shift;
            let target = if tw >= 0 {
                self.cells.get(&(d - 1, tw as u32))
            } else {
                None
            };
            let t_dim = target.map(|c| c.basis.len()).unwrap_or(0);
            let mut matrix = FpMatrix::zero(self.pres.prime(), t_dim, cell.basis.len());
            let mut nonzero = false;
            for (col, m) in cell.basis.iter().enumerate() {
                let dm = self.derivation_of_monomial(&rules, m)?;
                if dm.is_zero() {
                    continue;
                }
                let Some(tcell) = target else {
                    return Err(SseqError::BidegreeInconsistent(
                        self.pres.display_monomial(m),
                        format!("derivative lands outside the populated cells at ({},{})", d - 1, tw),
                    ));
                };
                for (tm, c) in dm.terms() {
                    let Some(&row) = tcell.index.get(tm) else {
                        return Err(SseqError::BidegreeInconsistent(
                            self.pres.display_monomial(m),
                            format!(
                                "derivative term {} misses the target cell",
                                self.pres.display_monomial(tm)
                            ),
                        ));
                    };
                    matrix.set(row, col, c);
                    nonzero = true;
                }
            }
            if nonzero {
                matrices.insert((d, w), matrix);
            }
        }
        // d∘d = 0 wherever both maps are defined
        for (&(d, w), m1) in &matrices {
            let tw = (w as i64 + shift) as u32;
            if let Some(m2) = matrices.get(&(d - 1, tw)) {
                for col in 0..m1.cols() {
                    let mid: Vec<u32> = (0..m1.rows()).map(|r| m1.get(r, col)).collect();
                    let out = m2.apply(&mid);
                    if out.iter().any(|&c| c != 0) {
                        return Err(SseqError::DSquareNonzero(d, w));
                    }
                }
            }
        }
        let mut page = self.clone();
        page.diff = Some(Differential {
            r: self.r,
            matrices,
        });
        Ok(page)
    }

    /// Homology with respect to the populated differential; classes carry
    /// their representative monomial names through the turn. Without a
    /// populated differential this is the identity turn to page r + 1.
    pub fn turn_page(&self) -> Result<Page, SseqError> {
        let Some(diff) = &self.diff else {
            let mut page = self.clone();
            page.r += 1;
            return Ok(page);
        };
        let p = self.pres.prime();
        let shift = self.convention.weight_shift(diff.r);
        let mut new_cells: BTreeMap<(u32, u32), Cell> = BTreeMap::new();
        for (&(d, w), cell) in &self.cells {
            let dim = cell.basis.len();
            // cycles: kernel of the outgoing map
            let cycles: Vec<Vec<u32>> = match diff.matrices.get(&(d, w)) {
                Some(m) => m.kernel_basis(),
                None => (0..dim)
                    .map(|i| {
                        let mut v = vec![0u32; dim];
                        v[i] = 1;
                        v
                    })
                    .collect(),
            };
            // boundaries: image of the incoming map
            let source_w = w as i64 - shift;
            let mut boundaries: Vec<Vec<u32>> = Vec::new();
            if source_w >= 0 {
                if let Some(m_in) = diff.matrices.get(&(d + 1, source_w as u32)) {
                    for col in 0..m_in.cols() {
                        let v: Vec<u32> = (0..m_in.rows()).map(|r| m_in.get(r, col)).collect();
                        if v.iter().any(|&c| c != 0) {
                            boundaries.push(v);
                        }
                    }
                }
            }
            let sq = Subquotient::new(p, dim, &cycles, &boundaries)?;
            if sq.dim() == 0 {
                continue;
            }
            let names = sq
                .representatives()
                .iter()
                .map(|rep| {
                    let nonzero: Vec<usize> = rep
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(i, _)| i)
                        .collect();
                    if nonzero.len() == 1 {
                        self.pres.display_monomial(&cell.basis[nonzero[0]])
                    } else {
                        format!("[{} + …]", self.pres.display_monomial(&cell.basis[nonzero[0]]))
                    }
                })
                .collect();
            new_cells.insert(
                (d, w),
                Cell {
                    degree: d,
                    basis: cell.basis.clone(),
                    index: cell.index.clone(),
                    sq,
                    names,
                },
            );
        }
        Ok(Page {
            r: diff.r + 1,
            convention: self.convention,
            cutoff: self.cutoff,
            turns: self.turns + 1,
            fresh: false,
            pres: self.pres.clone(),
            cells: new_cells,
            diff: None,
        })
    }

    /// All bidegree-possible differentials d_r for r ≥ the current page:
    /// pairs of nonzero cells one degree apart whose weights differ by the
    /// convention's shift. An empty report certifies collapse in the window.
    pub fn bidegree_obstruction_report(&self) -> Vec<Obstruction> {
        let max_w = self.cells.keys().map(|&(_, w)| w).max().unwrap_or(0);
        let mut out = Vec::new();
        for r in self.r..=max_w + 1 {
            let shift = self.convention.weight_shift(r);
            for (&(d, w), cell) in &self.cells {
                if cell.dim() == 0 || d == 0 || d > self.resolved_max() {
                    continue;
                }
                let tw = w as i64 + shift;
                if tw < 0 {
                    continue;
                }
                let Some(tcell) = self.cells.get(&(d - 1, tw as u32)) else {
                    continue;
                };
                if tcell.dim() == 0 {
                    continue;
                }
                out.push(Obstruction {
                    from: self.convention.chart_coords(d, w),
                    to: self.convention.chart_coords(d - 1, tw as u32),
                    r,
                    source_dim: cell.dim() as u64,
                    target_dim: tcell.dim() as u64,
                });
            }
        }
        out
    }

    /// Obstruction slots whose source cell contains a class outside the span
    /// of products of positive-degree page classes. If this list is empty,
    /// every class in the window is a permanent cycle: differentials vanish
    /// on the indecomposables for bidegree reasons and extend to products by
    /// the Leibniz rule.
    pub fn collapse_obstructions(&self) -> Vec<Obstruction> {
        let p = self.pres.prime();
        // span of decomposables per cell, as a rank
        let rep_elements: BTreeMap<(u32, u32), Vec<Element>> = self
            .cells
            .iter()
            .map(|(&k, cell)| {
                let elts = cell
                    .sq
                    .representatives()
                    .iter()
                    .map(|rep| {
                        self.pres.element_from_terms(
                            cell.basis
                                .iter()
                                .zip(rep)
                                .filter(|(_, &c)| c != 0)
                                .map(|(m, &c)| (m.clone(), c))
                                .collect(),
                        )
                    })
                    .collect();
                (k, elts)
            })
            .collect();
        let mut product_vectors: BTreeMap<(u32, u32), Vec<Vec<u32>>> = BTreeMap::new();
        for (&(n1, w1), reps1) in &rep_elements {
            if n1 == 0 {
                continue;
            }
            for (&(n2, w2), reps2) in &rep_elements {
                if n2 == 0 || n2 < n1 {
                    continue;
                }
                let (n, w) = (n1 + n2, w1 + w2);
                if n > self.cutoff || !self.cells.contains_key(&(n, w)) {
                    continue;
                }
                for a in reps1 {
                    for b in reps2 {
                        if let Ok(Some((cell, coords))) = self.product_of_classes(a, b) {
                            if coords.iter().any(|&c| c != 0) {
                                product_vectors.entry(cell).or_default().push(coords);
                            }
                        }
                    }
                }
            }
        }
        let has_indecomposable = |key: &(u32, u32), dim: usize| -> bool {
            match product_vectors.get(key) {
                None => true,
                Some(vecs) => {
                    let m = FpMatrix::from_rows(p, dim, vecs);
                    m.rank() < dim
                }
            }
        };
        self.bidegree_obstruction_report()
            .into_iter()
            .filter(|ob| {
                // map chart coords back to (degree, weight)
                let (n, w) = match self.convention {
                    Convention::May => (ob.from.0, ob.from.1),
                    Convention::Bokstedt => (ob.from.0 + ob.from.1, ob.from.0),
                };
                let dim = self.cells.get(&(n, w)).map(|c| c.dim()).unwrap_or(0);
                has_indecomposable(&(n, w), dim)
            })
            .collect()
    }

    /// The product of two page classes, reduced to class coordinates in the
    /// target cell: multiply ambient representatives and reduce modulo
    /// boundaries.
    pub fn product_of_classes(
        &self,
        a: &Element,
        b: &Element,
    ) -> Result<Option<((u32, u32), Vec<u32>)>, SseqError> {
        let prod = self.pres.multiply(a, b)?;
        if prod.is_zero() {
            return Ok(None);
        }
        Ok(self.class_of_element(&prod))
    }

    /// Reassemble the survivors of a collapsed page into a presentation.
    ///
    /// Each surviving generator tower is kept with its observed height;
    /// power extensions base^p = target splice truncated towers into a
    /// polynomial algebra on the base. The result is verified against the
    /// page dimensions on the resolved window.
    pub fn assemble_survivors(
        &self,
        extensions: &[PowerExtension],
    ) -> Result<Presentation, SseqError> {
        let p = self.pres.prime();
        let pp = p.get();
        let mut kept: Vec<GeneratorSpec> = Vec::new();
        let mut heights: BTreeMap<String, u32> = BTreeMap::new();
        for (gi, g) in self.pres.generators().iter().enumerate() {
            let e_bound = match g.kind {
                GeneratorKind::Exterior => 1,
                GeneratorKind::Truncated(h) => h - 1,
                _ => self.cutoff / g.degree,
            };
            let mut alive = 0u32;
            for e in 1..=e_bound {
                if (e as u64) * (g.degree as u64) > self.cutoff as u64 {
                    break;
                }
                if self.class_is_nonzero(&Monomial::gen(gi, e)) {
                    alive = e;
                } else {
                    break;
                }
            }
            if alive == 0 {
                continue;
            }
            let full = (alive == e_bound) || ((alive + 1) as u64 * g.degree as u64) > self.cutoff as u64;
            let kind = if full {
                g.kind
            } else {
                GeneratorKind::Truncated(alive + 1)
            };
            heights.insert(g.name.clone(), alive + 1);
            kept.push(GeneratorSpec {
                name: g.name.clone(),
                degree: g.degree,
                weight: g.weight,
                kind,
            });
        }
        // splice chains base^p = target; a spliced-away target aliases to
        // the head of its chain, so later links resolve through it
        let original_degree: BTreeMap<String, u32> = self
            .pres
            .generators()
            .iter()
            .map(|g| (g.name.clone(), g.degree))
            .collect();
        let mut alias: BTreeMap<String, String> = BTreeMap::new();
        for ext in extensions {
            let base_deg = *original_degree.get(&ext.base).ok_or_else(|| {
                SseqError::BadExtension(ext.base.clone(), "unknown base class".into())
            })?;
            let head = alias.get(&ext.base).cloned().unwrap_or(ext.base.clone());
            let Some(bi) = kept.iter().position(|g| g.name == head) else {
                return Err(SseqError::BadExtension(
                    ext.base.clone(),
                    "base class did not survive".into(),
                ));
            };
            let Some(ti) = kept.iter().position(|g| g.name == ext.target) else {
                return Err(SseqError::BadExtension(
                    ext.target.clone(),
                    "target class did not survive".into(),
                ));
            };
            if kept[ti].degree as u64 != pp as u64 * base_deg as u64 {
                return Err(SseqError::BadExtension(
                    ext.base.clone(),
                    format!(
                        "degree of {} is not p times the degree of {}",
                        ext.target, ext.base
                    ),
                ));
            }
            kept[bi].kind = GeneratorKind::Polynomial;
            alias.insert(ext.target.clone(), head);
            kept.remove(ti);
        }
        let assembled = Presentation::new(p, kept)?;
        let dims = assembled.poincare_series(self.resolved_max())?;
        let page_dims = self.column_dims();
        for n in 0..=self.resolved_max() {
            if dims.dim(n) != page_dims[n as usize] {
                return Err(SseqError::AssemblyMismatch(
                    n,
                    dims.dim(n),
                    page_dims[n as usize],
                ));
            }
        }
        Ok(assembled)
    }

    /// Attach a structure table to the free survivor part: each table class
    /// comes with an ambient representative; products are verified on the
    /// page up to a unit, and the assembled presentation is verified against
    /// the page dimensions on the resolved window.
    pub fn attach_table(
        &self,
        free_gens: &[String],
        table: &StructureTable,
        reps: &[Element],
    ) -> Result<Presentation, SseqError> {
        let p = self.pres.prime();
        assert_eq!(table.class_names.len(), reps.len());
        // verify products up to unit, where the product degree is resolved
        for i in 0..reps.len() {
            for j in 0..reps.len() {
                let deg = self.pres.element_degree(&reps[i]).unwrap_or(0)
                    + self.pres.element_degree(&reps[j]).unwrap_or(0);
                if deg > self.resolved_max() {
                    continue;
                }
                let got = self.product_of_classes(&reps[i], &reps[j])?;
                let expected = &table.products[i][j];
                match (got, expected.is_empty()) {
                    (None, true) => {}
                    (Some((_, coords)), true) => {
                        if coords.iter().any(|&c| c != 0) {
                            return Err(SseqError::TableProductMismatch(
                                table.class_names[i].clone(),
                                table.class_names[j].clone(),
                            ));
                        }
                    }
                    (got, false) => {
                        // expected Σ c·class_k: build the expected ambient element
                        let mut expect = Element::zero();
                        for &(k, c) in expected {
                            expect = self.pres.add(&expect, &self.pres.scale(&reps[k], c))?;
                        }
                        let Some((cell, e_coords)) = self.class_of_element(&expect) else {
                            return Err(SseqError::TableProductMismatch(
                                table.class_names[i].clone(),
                                table.class_names[j].clone(),
                            ));
                        };
                        let Some((g_cell, g_coords)) = got else {
                            return Err(SseqError::TableProductMismatch(
                                table.class_names[i].clone(),
                                table.class_names[j].clone(),
                            ));
                        };
                        // equality up to a unit scalar
                        let ok = g_cell == cell && {
                            let lam = e_coords
                                .iter()
                                .zip(&g_coords)
                                .find(|(&e, _)| e != 0)
                                .map(|(&e, &g)| p.mul(g, p.inv(e)));
                            match lam {
                                None => g_coords.iter().all(|&c| c == 0),
                                Some(l) => {
                                    l != 0
                                        && e_coords
                                            .iter()
                                            .zip(&g_coords)
                                            .all(|(&e, &g)| p.mul(e, l) == g)
                                }
                            }
                        };
                        if !ok {
                            return Err(SseqError::TableProductMismatch(
                                table.class_names[i].clone(),
                                table.class_names[j].clone(),
                            ));
                        }
                    }
                }
            }
        }
        let gens: Vec<GeneratorSpec> = self
            .pres
            .generators()
            .iter()
            .filter(|g| free_gens.contains(&g.name))
            .cloned()
            .collect();
        let assembled = Presentation::with_table(p, gens, Some(table.clone()))?;
        let dims = assembled.poincare_series(self.resolved_max())?;
        let page_dims = self.column_dims();
        for n in 0..=self.resolved_max() {
            if dims.dim(n) != page_dims[n as usize] {
                return Err(SseqError::AssemblyMismatch(
                    n,
                    dims.dim(n),
                    page_dims[n as usize],
                ));
            }
        }
        Ok(assembled)
    }

    /// Export the page (and its populated differential, if any) as a chart.
    pub fn chart(&self) -> ChartModel {
        let mut dots = Vec::new();
        let mut s_max = 0;
        let mut t_max = 0;
        for (&(d, w), cell) in &self.cells {
            if cell.dim() == 0 {
                continue;
            }
            let (s, t) = self.convention.chart_coords(d, w);
            s_max = s_max.max(s);
            t_max = t_max.max(t);
            dots.push(Dot {
                s,
                t,
                label: cell.names.join(", "),
                multiplicity: cell.dim() as u32,
            });
        }
        let mut strokes = Vec::new();
        if let Some(diff) = &self.diff {
            let shift = self.convention.weight_shift(diff.r);
            for (&(d, w), m) in &diff.matrices {
                let nonzero = (0..m.rows()).any(|r| (0..m.cols()).any(|c| m.get(r, c) != 0));
                if nonzero {
                    let tw = (w as i64 + shift) as u32;
                    strokes.push(Stroke {
                        from: self.convention.chart_coords(d, w),
                        to: self.convention.chart_coords(d - 1, tw),
                        r: diff.r,
                    });
                }
            }
        }
        dots.sort_by_key(|d| (d.s, d.t));
        strokes.sort_by_key(|s| (s.from, s.to, s.r));
        ChartModel {
            dots,
            strokes,
            window: (s_max, t_max),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::Prime;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn init_page_of_ground_field() {
        let pres = Presentation::new(p3(), vec![]).unwrap();
        let page = init_page(&pres, Convention::May, 10).unwrap();
        let dims = page.dims_by_bidegree();
        assert_eq!(dims.len(), 1);
        assert_eq!(dims[&(0, 0)], 1);
    }

    #[test]
    fn init_page_of_exterior() {
        let pres =
            Presentation::new(p3(), vec![GeneratorSpec::exterior("α_1", 3, 1)]).unwrap();
        let page = init_page(&pres, Convention::May, 10).unwrap();
        let dims = page.dims_by_bidegree();
        assert_eq!(dims.len(), 2);
        assert_eq!(dims[&(0, 0)], 1);
        assert_eq!(dims[&(3, 1)], 1);
    }

    fn small_d1_page() -> Page {
        // E(λ_1) ⊗ Γ(σα_1) with d_1(λ_1) = σα_1
        let pres = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::exterior("λ_1", 5, 0),
                GeneratorSpec::divided("σα_1", 4, 1),
            ],
        )
        .unwrap();
        let page = init_page(&pres, Convention::May, 16).unwrap();
        let family = RuleFamily {
            r: 1,
            rules: vec![Rule {
                source: Monomial::gen(0, 1),
                target: pres.gen_element("σα_1").unwrap(),
                up_to_unit: true,
            }],
        };
        page.apply_rules(&family).unwrap()
    }

    #[test]
    fn leibniz_extension_example() {
        // d_1(λ_1 μ_1) = σα_1 μ_1 − λ_1 σṽ_1 for d(λ_1)=σα_1, d(μ_1)=σṽ_1
        let pres = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::exterior("λ_1", 5, 0),
                GeneratorSpec::polynomial("μ_1", 6, 0),
                GeneratorSpec::exterior("σṽ_1", 5, 1),
                GeneratorSpec::divided("σα_1", 4, 1),
            ],
        )
        .unwrap();
        let page = init_page(&pres, Convention::May, 24).unwrap();
        let rules: BTreeMap<Monomial, Element> = [
            (Monomial::gen(0, 1), pres.gen_element("σα_1").unwrap()),
            (Monomial::gen(1, 1), pres.gen_element("σṽ_1").unwrap()),
        ]
        .into_iter()
        .collect();
        let m = pres
            .multiply(
                &pres.gen_element("λ_1").unwrap(),
                &pres.gen_element("μ_1").unwrap(),
            )
            .unwrap();
        let lead = m.lead().unwrap().clone();
        let dm = page.derivation_of_monomial(&rules, &lead).unwrap();
        let t1 = pres
            .multiply(
                &pres.gen_element("σα_1").unwrap(),
                &pres.gen_element("μ_1").unwrap(),
            )
            .unwrap();
        let t2 = pres
            .multiply(
                &pres.gen_element("λ_1").unwrap(),
                &pres.gen_element("σṽ_1").unwrap(),
            )
            .unwrap();
        let expected = pres.sub(&t1, &t2).unwrap();
        assert_eq!(dm, expected);
    }

    #[test]
    fn d_on_product_of_cycles_vanishes() {
        let pres = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::exterior("a", 3, 0),
                GeneratorSpec::polynomial("b", 4, 0),
            ],
        )
        .unwrap();
        let page = init_page(&pres, Convention::May, 20).unwrap();
        let rules: BTreeMap<Monomial, Element> = BTreeMap::new();
        let ab = pres
            .multiply(&pres.gen_element("a").unwrap(), &pres.gen_element("b").unwrap())
            .unwrap();
        let dm = page
            .derivation_of_monomial(&rules, ab.lead().unwrap())
            .unwrap();
        assert!(dm.is_zero());
    }

    #[test]
    fn turn_page_with_zero_differential_is_identity() {
        let pres = Presentation::new(p3(), vec![GeneratorSpec::exterior("x", 3, 1)]).unwrap();
        let page = init_page(&pres, Convention::May, 10).unwrap();
        let turned = page.turn_page().unwrap();
        assert_eq!(turned.r, page.r + 1);
        assert_eq!(turned.dims_by_bidegree(), page.dims_by_bidegree());
        assert_eq!(turned.resolved_max(), page.resolved_max());
    }

    #[test]
    fn exterior_divided_d1_homology() {
        // survivors of E(λ_1)⊗Γ(σα_1) with d_1(λ_1)=σα_1: γ_{3m} and
        // λ_1·γ_{3m+2} classes, matching E(λ_1γ_2(σα_1)) ⊗ Γ(γ_3(σα_1))
        let page = small_d1_page();
        let e2 = page.turn_page().unwrap();
        let dims = e2.column_dims();
        let resolved = e2.resolved_max() as usize;
        let mut expected = vec![0u64; dims.len()];
        // classes: 1@0, σb=γ_3@12, L=λ_1γ_2@13; within 15: that's all
        expected[0] = 1;
        expected[12] = 1;
        expected[13] = 1;
        assert_eq!(&dims[..=resolved], &expected[..=resolved]);
        assert_eq!(e2.class_names(12, 3), vec!["γ3(σα_1)".to_string()]);
        assert_eq!(e2.class_names(13, 2), vec!["λ_1·γ2(σα_1)".to_string()]);
    }

    #[test]
    fn bidegree_inconsistent_rule_is_rejected() {
        let pres = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::exterior("x", 5, 0),
                GeneratorSpec::exterior("y", 3, 1),
            ],
        )
        .unwrap();
        let page = init_page(&pres, Convention::May, 10).unwrap();
        // degree drops by 2: invalid
        let family = RuleFamily {
            r: 1,
            rules: vec![Rule {
                source: Monomial::gen(0, 1),
                target: pres.gen_element("y").unwrap(),
                up_to_unit: false,
            }],
        };
        assert!(matches!(
            page.apply_rules(&family),
            Err(SseqError::BidegreeInconsistent(..))
        ));
    }

    #[test]
    fn d_square_check_fires() {
        // d(x) = y, d(y) = z with compatible bidegrees but d² ≠ 0
        let pres = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::polynomial("x", 4, 0),
                GeneratorSpec::exterior("y", 3, 1),
                GeneratorSpec::polynomial("z", 2, 2),
            ],
        )
        .unwrap();
        let page = init_page(&pres, Convention::May, 8).unwrap();
        let family = RuleFamily {
            r: 1,
            rules: vec![
                Rule {
                    source: Monomial::gen(0, 1),
                    target: pres.gen_element("y").unwrap(),
                    up_to_unit: false,
                },
                Rule {
                    source: Monomial::gen(1, 1),
                    target: pres.gen_element("z").unwrap(),
                    up_to_unit: false,
                },
            ],
        };
        assert!(matches!(
            page.apply_rules(&family),
            Err(SseqError::DSquareNonzero(..))
        ));
    }

    #[test]
    fn obstruction_report_single_class() {
        let pres = Presentation::new(p3(), vec![]).unwrap();
        let page = init_page(&pres, Convention::May, 10).unwrap();
        assert!(page.bidegree_obstruction_report().is_empty());
    }

    #[test]
    fn euler_characteristic_is_preserved_by_turning() {
        // window chosen so every d_1 pair is complete inside it
        let page = small_d1_page();
        let e2 = page.turn_page().unwrap();
        let top = e2.resolved_max() as usize;
        let chi = |dims: &[u64]| -> i64 {
            dims[..=top]
                .iter()
                .enumerate()
                .map(|(n, &d)| if n % 2 == 0 { d as i64 } else { -(d as i64) })
                .sum()
        };
        // degree 16 = γ_4(σα_1) is a complete pair with λ_1γ_3@17? no: 17 > 16.
        // cutoff 16, resolved 15: pairs (λ_1γ_k@5+4k, γ_{k+1}@4k+4) complete
        // for 5+4k ≤ 15, and γ_4@16 is outside the resolved window.
        assert_eq!(chi(&page.column_dims()), chi(&e2.column_dims()));
    }

    #[test]
    fn assemble_survivors_no_extensions() {
        let page = small_d1_page();
        let e2 = page.turn_page().unwrap();
        // E(λ_1)⊗Γ(σα_1) homology has non-generator survivors (λ_1γ_2 is not
        // a generator power), so assembly without a table must fail…
        let err = e2.assemble_survivors(&[]).unwrap_err();
        assert!(matches!(err, SseqError::AssemblyMismatch(..)));
        // …while a pure cycle page assembles to itself.
        let pres = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::exterior("x", 3, 0),
                GeneratorSpec::polynomial("y", 4, 1),
            ],
        )
        .unwrap();
        let page = init_page(&pres, Convention::May, 12)
            .unwrap()
            .apply_rules(&RuleFamily {
                r: 1,
                rules: vec![],
            })
            .unwrap()
            .turn_page()
            .unwrap();
        let assembled = page.assemble_survivors(&[]).unwrap();
        assert_eq!(assembled, pres);
    }

    #[test]
    fn power_extension_splices_towers() {
        // P_3(a) ⊗ P_3(b) with |b| = 3|a| splices into P(a) via a³ = b
        let pres = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::truncated("a", 2, 0, 3),
                GeneratorSpec::truncated("b", 6, 0, 3),
            ],
        )
        .unwrap();
        let page = init_page(&pres, Convention::May, 16)
            .unwrap()
            .apply_rules(&RuleFamily {
                r: 1,
                rules: vec![],
            })
            .unwrap()
            .turn_page()
            .unwrap();
        let spliced = page
            .assemble_survivors(&[PowerExtension {
                base: "a".into(),
                target: "b".into(),
            }])
            .unwrap();
        assert_eq!(spliced.generators().len(), 1);
        assert!(matches!(
            spliced.generators()[0].kind,
            GeneratorKind::Polynomial
        ));
        // dimension check happened inside assemble_survivors
    }

    #[test]
    fn power_extension_chains_resolve_through_the_head() {
        // a³ = b, b³ = c: the second link's base is already spliced away,
        // so it resolves through the head and everything becomes P(a)
        let pres = Presentation::new(
            p3(),
            vec![
                GeneratorSpec::truncated("a", 2, 0, 3),
                GeneratorSpec::truncated("b", 6, 0, 3),
                GeneratorSpec::truncated("c", 18, 0, 3),
            ],
        )
        .unwrap();
        let page = init_page(&pres, Convention::May, 26)
            .unwrap()
            .apply_rules(&RuleFamily {
                r: 1,
                rules: vec![],
            })
            .unwrap()
            .turn_page()
            .unwrap();
        let spliced = page
            .assemble_survivors(&[
                PowerExtension {
                    base: "a".into(),
                    target: "b".into(),
                },
                PowerExtension {
                    base: "b".into(),
                    target: "c".into(),
                },
            ])
            .unwrap();
        assert_eq!(spliced.generators().len(), 1);
        assert_eq!(spliced.generators()[0].name, "a");
        assert!(matches!(
            spliced.generators()[0].kind,
            GeneratorKind::Polynomial
        ));
    }

    #[test]
    fn chart_export_matches_page() {
        let page = small_d1_page();
        let chart = page.chart();
        chart.validate().unwrap();
        // a stroke per nonzero differential cell
        assert!(!chart.strokes.is_empty());
        for st in &chart.strokes {
            assert_eq!(st.from.0, st.to.0 + 1);
            assert_eq!(st.to.1, st.from.1 + 1);
        }
    }

    #[test]
    fn bokstedt_convention_shifts() {
        assert_eq!(Convention::Bokstedt.bidegree_shift(2), (-2, 1));
        assert_eq!(Convention::May.bidegree_shift(2), (-1, 2));
        assert_eq!(Convention::Bokstedt.weight_shift(2), -2);
    }

    #[test]
    fn monotone_window_consistency() {
        // the same computation at a larger cutoff agrees on the common window
        let small = small_d1_page().turn_page().unwrap();
        let pres = small.presentation().clone();
        let page = init_page(&pres, Convention::May, 32).unwrap();
        let family = RuleFamily {
            r: 1,
            rules: vec![Rule {
                source: Monomial::gen(0, 1),
                target: pres.gen_element("σα_1").unwrap(),
                up_to_unit: true,
            }],
        };
        let big = page.apply_rules(&family).unwrap().turn_page().unwrap();
        let top = small.resolved_max() as usize;
        assert_eq!(&small.column_dims()[..=top], &big.column_dims()[..=top]);
        // survivor naming is stable across windows
        for (&(d, w), _) in small.dims_by_bidegree().iter() {
            if d <= small.resolved_max() {
                assert_eq!(small.class_names(d, w), big.class_names(d, w));
            }
        }
    }
}
