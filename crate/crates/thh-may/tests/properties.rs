//! Property-based and structural invariants: rank–nullity on random
//! matrices, algebra laws on random elements, and the engine's self-oracle
//! (page homology against a direct chain-complex evaluation).

use proptest::prelude::*;
use std::collections::BTreeMap;
use thh_may::algebra::{GeneratorSpec, Monomial, Presentation};
use thh_may::fp::{FpMatrix, Prime};
use thh_may::scenarios::primitives_presentation;
use thh_may::sseq::{init_page, Convention};

fn arb_matrix(p: u32) -> impl Strategy<Value = FpMatrix> {
    (1usize..6, 1usize..6).prop_flat_map(move |(rows, cols)| {
        proptest::collection::vec(0u32..p, rows * cols).prop_map(move |data| {
            let prime = Prime::new(p).unwrap();
            let mut m = FpMatrix::zero(prime, rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, data[i * cols + j]);
                }
            }
            m
        })
    })
}

proptest! {
    #[test]
    fn rank_nullity(m in arb_matrix(3)) {
        let rank = m.rank();
        let kernel = m.kernel_basis();
        prop_assert_eq!(rank + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.apply(v).iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn rank_nullity_p5(m in arb_matrix(5)) {
        prop_assert_eq!(m.rank() + m.kernel_basis().len(), m.cols());
    }

    #[test]
    fn rref_idempotent(m in arb_matrix(7)) {
        let (r1, piv1) = m.rref();
        let (r2, piv2) = r1.rref();
        prop_assert_eq!(r1, r2);
        prop_assert_eq!(piv1, piv2);
    }
}

fn mixed_presentation() -> Presentation {
    Presentation::new(
        Prime::new(3).unwrap(),
        vec![
            GeneratorSpec::exterior("a", 3, 1),
            GeneratorSpec::exterior("b", 5, 0),
            GeneratorSpec::polynomial("c", 4, 1),
            GeneratorSpec::divided("d", 2, 0),
        ],
    )
    .unwrap()
}

fn arb_element() -> impl Strategy<Value = Vec<(u32, u32, u32, u32, u32)>> {
    // up to three monomials a^e0 b^e1 c^e2 γ_{e3}(d) with a coefficient
    proptest::collection::vec((0u32..2, 0u32..2, 0u32..4, 0u32..8, 1u32..3), 1..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(xs in arb_element(), ys in arb_element(), zs in arb_element()) {
        let pres = mixed_presentation();
        let build = |spec: &Vec<(u32, u32, u32, u32, u32)>| {
            let mut acc = thh_may::algebra::Element::zero();
            for &(e0, e1, e2, e3, c) in spec {
                let mut m = Monomial::one();
                for (g, e) in [(0, e0), (1, e1), (2, e2), (3, e3)] {
                    if e > 0 {
                        for (mm, _) in pres.mul_monomials(&m, &Monomial::gen(g, e)) {
                            m = mm;
                        }
                    }
                }
                acc = pres.add(&acc, &pres.monomial_element(m, c)).unwrap();
            }
            acc
        };
        let (x, y, z) = (build(&xs), build(&ys), build(&zs));
        let lhs = pres.multiply(&pres.multiply(&x, &y).unwrap(), &z).unwrap();
        let rhs = pres.multiply(&x, &pres.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplication_is_graded_commutative(xs in arb_element(), ys in arb_element()) {
        let pres = mixed_presentation();
        let build = |spec: &Vec<(u32, u32, u32, u32, u32)>| {
            let mut m = Monomial::one();
            let &(e0, e1, e2, e3, c) = &spec[0];
            for (g, e) in [(0usize, e0), (1, e1), (2, e2), (3, e3)] {
                if e > 0 {
                    for (mm, _) in pres.mul_monomials(&m, &Monomial::gen(g, e)) {
                        m = mm;
                    }
                }
            }
            (pres.monomial_element(m.clone(), c), pres.monomial_degree(&m))
        };
        let (x, dx) = build(&xs);
        let (y, dy) = build(&ys);
        let xy = pres.multiply(&x, &y).unwrap();
        let mut yx = pres.multiply(&y, &x).unwrap();
        if dx % 2 == 1 && dy % 2 == 1 {
            yx = pres.scale(&yx, 2); // −1 mod 3
        }
        prop_assert_eq!(xy, yx);
    }
}

#[test]
fn page_homology_matches_direct_chain_complex() {
    // the engine's cellwise subquotients against a whole-degree kernel/image
    // computation on the same differential
    let p = Prime::new(3).unwrap();
    let n_max = 24u32;
    let pres = primitives_presentation(p, n_max).unwrap();
    let page = init_page(&pres, Convention::May, n_max).unwrap();
    let rules: BTreeMap<Monomial, thh_may::algebra::Element> = [
        ("λ_1", "σα_1"),
        ("ε_1", "ṽ_1"),
        ("μ_1", "σṽ_1"),
    ]
    .into_iter()
    .map(|(s, t)| {
        (
            Monomial::gen(pres.generator_index(s).unwrap(), 1),
            pres.gen_element(t).unwrap(),
        )
    })
    .collect();

    // direct route: one matrix per total degree, ranks by row reduction
    let basis = pres.basis_up_to(n_max).unwrap();
    let mut ranks = vec![0usize; n_max as usize + 2];
    for n in 1..=n_max {
        let source = &basis[n as usize];
        let target = &basis[(n - 1) as usize];
        let index: BTreeMap<&Monomial, usize> =
            target.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut matrix = FpMatrix::zero(p, target.len(), source.len());
        for (col, m) in source.iter().enumerate() {
            let dm = page.derivation_of_monomial(&rules, m).unwrap();
            for (tm, c) in dm.terms() {
                matrix.set(index[tm], col, c);
            }
        }
        ranks[n as usize] = matrix.rank();
    }
    let mut direct = vec![0u64; n_max as usize + 1];
    for n in 0..=n_max as usize {
        direct[n] = (basis[n].len() - ranks[n] - ranks[n + 1]) as u64;
    }

    // engine route
    let family = thh_may::sseq::RuleFamily {
        r: 1,
        rules: rules
            .iter()
            .map(|(source, target)| thh_may::sseq::Rule {
                source: source.clone(),
                target: target.clone(),
                up_to_unit: true,
            })
            .collect(),
    };
    let e2 = page.apply_rules(&family).unwrap().turn_page().unwrap();
    let engine = e2.column_dims();
    let top = e2.resolved_max() as usize;
    assert_eq!(&engine[..=top], &direct[..=top]);
}

#[test]
fn scenario_verdicts_are_window_monotone() {
    // enlarging N never changes verdicts on previously resolved degrees
    let small = thh_may::scenarios::run_v1_may(3, 30).unwrap();
    let large = thh_may::scenarios::run_v1_may(3, 40).unwrap();
    for v in &small.verdicts {
        let w = &large.verdicts[v.degree as usize];
        assert_eq!((v.expected, v.got), (w.expected, w.got), "degree {}", v.degree);
    }
    let small = thh_may::scenarios::run_bokstedt(3, 24).unwrap();
    let large = thh_may::scenarios::run_bokstedt(3, 32).unwrap();
    for v in &small.verdicts {
        let w = &large.verdicts[v.degree as usize];
        assert_eq!((v.expected, v.got), (w.expected, w.got), "degree {}", v.degree);
    }
}

#[test]
fn v1_e2_obstruction_slots_are_the_rule_family_multiples() {
    // on the page carrying d_{p−1}, every bidegree-possible slot for r ≥ 2
    // comes from a multiple of the μ_1^{p−1}σṽ_1 class
    let p = Prime::new(3).unwrap();
    let n_max = 36u32;
    let pres = thh_may::scenarios::v1_e2_presentation(p, n_max).unwrap();
    let page = init_page(&pres, Convention::May, n_max)
        .unwrap()
        .advance_to(2)
        .unwrap();
    let report = page.bidegree_obstruction_report();
    // sources at total degrees 17, 29, 35: M, M·σb, M·μ_1^p
    let sources: Vec<u32> = report.iter().map(|ob| ob.from.0).collect();
    assert_eq!(sources, vec![17, 29, 35]);
    assert!(report.iter().all(|ob| ob.r == 2));
    // and after the differential the raw report is empty at this window
    let m_name = "μ_1^2·σṽ_1";
    let l_name = "λ_1γ2(σα_1)";
    let target = pres
        .multiply(
            &pres.gen_element("α_1").unwrap(),
            &pres.gen_element(l_name).unwrap(),
        )
        .unwrap();
    let family = thh_may::sseq::RuleFamily {
        r: 2,
        rules: vec![thh_may::sseq::Rule {
            source: Monomial::gen(pres.generator_index(m_name).unwrap(), 1),
            target,
            up_to_unit: true,
        }],
    };
    let e3 = page.apply_rules(&family).unwrap().turn_page().unwrap();
    assert!(e3.bidegree_obstruction_report().is_empty());
}
