//! Hochschild homology of connected graded F_p algebras.
//!
//! Free factors have closed forms: HH of an exterior algebra on x is
//! E(x) ⊗ Γ(σx), HH of a polynomial algebra on y is P(y) ⊗ E(σy), and HH is
//! strong symmetric monoidal, so tensor products assemble factorwise. The
//! closed form is what the pipeline uses; [`hh_bar_oracle`] recomputes
//! dimensions from the normalized cyclic bar complex and is the independent
//! cross-check.

use crate::algebra::{
    AlgebraError, GeneratorKind, GeneratorSpec, Monomial, PoincareSeries, Presentation,
};
use crate::fp::sparse_rank;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HochschildError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("no closed form for generator `{0}` of kind {1}; use the bar oracle")]
    UnsupportedKind(String, String),
    #[error("structure tables are not supported here")]
    TableNotSupported,
}

/// The literal suspension name σ⟨base⟩.
pub fn suspend_name(base: &str) -> String {
    format!("σ{base}")
}

/// Weight assigned to a suspended generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuspensionWeight {
    /// σx carries the filtration weight of x (the default).
    Inherit,
    /// σx carries weight 1 and γ_e(σx) weight e: the homological grading of
    /// the Hochschild complex itself, used to seed a Bökstedt-convention page.
    HochschildDegree,
}

/// Closed-form Hochschild homology of a tensor product of exterior and
/// polynomial generators: the input tensored with Γ(σx) for each exterior x
/// and E(σy) for each polynomial y, with suspensions of degree > `n_max`
/// omitted.
pub fn hh_free(
    pres: &Presentation,
    n_max: u32,
    mode: SuspensionWeight,
) -> Result<Presentation, HochschildError> {
    if pres.table().is_some() {
        return Err(HochschildError::TableNotSupported);
    }
    let mut gens: Vec<GeneratorSpec> = pres.generators().to_vec();
    for g in pres.generators() {
        let sdeg = g.degree + 1;
        let weight = match mode {
            SuspensionWeight::Inherit => g.weight,
            SuspensionWeight::HochschildDegree => 1,
        };
        let sgen = match g.kind {
            GeneratorKind::Exterior => GeneratorSpec::divided(&suspend_name(&g.name), sdeg, weight),
            GeneratorKind::Polynomial => {
                GeneratorSpec::exterior(&suspend_name(&g.name), sdeg, weight)
            }
            GeneratorKind::Truncated(_) => {
                return Err(HochschildError::UnsupportedKind(
                    g.name.clone(),
                    "truncated".into(),
                ))
            }
            GeneratorKind::DividedPower => {
                return Err(HochschildError::UnsupportedKind(
                    g.name.clone(),
                    "divided power".into(),
                ))
            }
        };
        if sdeg <= n_max {
            gens.push(sgen);
        }
    }
    Ok(Presentation::new(pres.prime(), gens)?)
}

/// The boundary of a cyclic bar word, as (word, coefficient) pairs.
///
/// Interior faces multiply adjacent entries with sign (−1)^i; the last face
/// rotates m_k to the front, picking up the Koszul sign of crossing
/// m_0 ⋯ m_{k−1}.
fn bar_boundary(pres: &Presentation, w: &[Monomial]) -> BTreeMap<Vec<Monomial>, u32> {
    let p = pres.prime();
    let k = w.len() - 1;
    let mut out: BTreeMap<Vec<Monomial>, u32> = BTreeMap::new();
    if k == 0 {
        return out;
    }
    let mut push = |word: Vec<Monomial>, c: u32| {
        if c == 0 {
            return;
        }
        let e = out.entry(word).or_insert(0);
        *e = p.add(*e, c);
    };
    for i in 0..k {
        let sign = if i % 2 == 0 { 1 } else { p.neg(1) };
        for (m, c) in pres.mul_monomials(&w[i], &w[i + 1]) {
            let mut nw = w.to_vec();
            nw[i] = m;
            nw.remove(i + 1);
            push(nw, p.mul(sign, c));
        }
    }
    let deg_rest: u32 = w[..k].iter().map(|m| pres.monomial_degree(m)).sum();
    let koszul = if pres.monomial_degree(&w[k]) % 2 == 1 && deg_rest % 2 == 1 {
        p.neg(1)
    } else {
        1
    };
    let sign = p.mul(if k.is_multiple_of(2) { 1 } else { p.neg(1) }, koszul);
    for (m, c) in pres.mul_monomials(&w[k], &w[0]) {
        let mut nw = Vec::with_capacity(k);
        nw.push(m);
        nw.extend_from_slice(&w[1..k]);
        push(nw, p.mul(sign, c));
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Dimensions of Hochschild homology in total (suspended) degree ≤ `n_max`,
/// computed from the normalized cyclic bar complex.
///
/// A word (m_0; m_1, …, m_k) has internal degree Σ|m_i| and homological
/// degree k; its displayed total degree is the sum of the two. Every tensor
/// factor past m_0 has positive degree, so each total degree is a finite
/// complex. Words split by their total generator-exponent vector, which every
/// face map preserves, and ranks are taken cellwise.
pub fn hh_bar_oracle(pres: &Presentation, n_max: u32) -> Result<PoincareSeries, HochschildError> {
    if pres.table().is_some() {
        return Err(HochschildError::TableNotSupported);
    }
    let p = pres.prime();
    // homology in display degree d needs boundaries from words one degree up
    let limit = n_max + 1;
    let basis = pres.basis_up_to(limit)?;

    type Word = Vec<Monomial>;
    let letters: Vec<(u32, Monomial)> = basis
        .iter()
        .enumerate()
        .skip(1)
        .flat_map(|(d, monos)| monos.iter().map(move |m| (d as u32, m.clone())))
        .collect();

    let key_of = |w: &Word| -> Vec<u32> {
        let mut key = vec![0u32; pres.generators().len()];
        for m in w {
            for &(g, e) in m.exponents() {
                key[g as usize] += e;
            }
        }
        key
    };

    fn extend(
        letters: &[(u32, Monomial)],
        word: &mut Vec<Monomial>,
        display: u32,
        n_max: u32,
        out: &mut Vec<Vec<Monomial>>,
    ) {
        out.push(word.clone());
        for (d, m) in letters {
            if display + d < n_max {
                word.push(m.clone());
                extend(letters, word, display + d + 1, n_max, out);
                word.pop();
            }
        }
    }

    let mut all_words: Vec<Word> = Vec::new();
    for (d0, monos) in basis.iter().enumerate() {
        for m0 in monos {
            let mut w = vec![m0.clone()];
            extend(&letters, &mut w, d0 as u32, limit, &mut all_words);
        }
    }

    let mut buckets: BTreeMap<(Vec<u32>, usize), Vec<Word>> = BTreeMap::new();
    for w in all_words {
        let k = w.len() - 1;
        buckets.entry((key_of(&w), k)).or_default().push(w);
    }
    for words in buckets.values_mut() {
        words.sort();
    }

    let mut ranks: BTreeMap<(Vec<u32>, usize), usize> = BTreeMap::new();
    for ((key, k), words) in &buckets {
        if *k == 0 {
            continue;
        }
        let Some(targets) = buckets.get(&(key.clone(), k - 1)) else {
            continue;
        };
        let index: BTreeMap<&Word, u32> = targets
            .iter()
            .enumerate()
            .map(|(i, w)| (w, i as u32))
            .collect();
        let rows: Vec<BTreeMap<u32, u32>> = words
            .iter()
            .map(|w| {
                bar_boundary(pres, w)
                    .iter()
                    .map(|(tw, &c)| (index[tw], c))
                    .collect()
            })
            .collect();
        ranks.insert((key.clone(), *k), sparse_rank(p, rows));
    }

    let mut dims = vec![0u64; n_max as usize + 1];
    for ((key, k), words) in &buckets {
        let internal: u32 = key
            .iter()
            .enumerate()
            .map(|(g, e)| pres.generators()[g].degree * e)
            .sum();
        let display = internal as usize + k;
        if display > n_max as usize {
            continue;
        }
        let out_rank = ranks.get(&(key.clone(), *k)).copied().unwrap_or(0);
        let in_rank = ranks.get(&(key.clone(), *k + 1)).copied().unwrap_or(0);
        dims[display] += (words.len() - out_rank - in_rank) as u64;
    }
    Ok(PoincareSeries {
        cutoff: n_max,
        dims,
    })
}
