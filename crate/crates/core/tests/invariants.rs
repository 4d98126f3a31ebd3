//! Structural invariants as properties over generator seeds.

use std::sync::Arc;

use proptest::prelude::*;

use relmonad::checker::{check_instance, PolicyChoice, Status, LAWS};
use relmonad::fincat::{opposite_category, product_category, tuples, validate_category, FinCategory};
use relmonad::gen::{gen_category, gen_instance, gen_profunctor, GenConfig, Instance, LawGroup, Payload};
use relmonad::kan::{mult_cell, theta_cell};
use relmonad::multimap::{enumerate_cells, sample_family, Arg, Evaluator, MultiMap, SlotType, TwoCell, DEFAULT_COEND_BUDGET};
use relmonad::presheaf::{colimit_finset, enumerate_nat_trans, representable, yoneda_action, Diagram, DEFAULT_NAT_BUDGET};
use relmonad::relmonad::{apply_t, fubini_disagreement, gamma, t_hat, unit_square};

fn cfg(seed: u64) -> GenConfig {
    GenConfig { seed, ..GenConfig::default() }
}

fn instance(seed: u64, group: LawGroup, index: usize) -> Instance {
    gen_instance(&cfg(seed), &Evaluator::default(), group, index).expect("generation succeeds")
}

/// Objects in finite slots and the fixed sample family in presheaf slots.
fn sample_args(f: &MultiMap) -> Vec<Vec<Arg>> {
    let choices: Vec<Vec<Arg>> = f
        .slots()
        .iter()
        .map(|s| match s {
            SlotType::Fin(c) => c.objects().map(Arg::Obj).collect(),
            SlotType::Psh(c) => sample_family(c).unwrap().into_iter().map(|a| Arg::Psh(a.presheaf)).collect(),
        })
        .collect();
    let dims: Vec<usize> = choices.iter().map(Vec::len).collect();
    tuples(&dims).into_iter().map(|t| t.iter().enumerate().map(|(k, &i)| choices[k][i].clone()).collect()).collect()
}

fn assert_bijective(ev: &Evaluator, cell: &TwoCell) {
    for args in sample_args(cell.src()) {
        let c = ev.component(cell, &args).unwrap();
        assert!(c.is_bijective(), "{cell} is not bijective at sizes {:?} → {:?}", c.src.sizes(), c.dst.sizes());
    }
}

fn small_category(seed: u64) -> Arc<FinCategory> {
    Arc::new(gen_category(&cfg(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn generated_categories_validate(seed in any::<u64>()) {
        prop_assert!(validate_category(&gen_category(&cfg(seed))).is_ok());
    }

    #[test]
    fn opposite_is_an_involution(seed in any::<u64>()) {
        let c = gen_category(&cfg(seed));
        prop_assert_eq!(opposite_category(&opposite_category(&c)), c);
    }

    #[test]
    fn nested_products_flatten(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (small_category(a), small_category(b), small_category(c));
        let flat = product_category(&[&a, &b, &c]);
        let left = product_category(&[&product_category(&[&a, &b]), &c]);
        prop_assert!(flat.same_tables(&left));
    }

    #[test]
    fn generated_profunctors_and_their_presheaves_are_functorial(seed in any::<u64>()) {
        let (x, y) = (small_category(seed), small_category(seed ^ 1));
        let p = gen_profunctor(&cfg(seed), &[x.clone()], &y).unwrap();
        prop_assert!(p.validate().is_ok());
        for b in x.objects() {
            prop_assert!(p.presheaf_at(&[b]).validate().is_ok());
        }
    }

    #[test]
    fn yoneda_is_full_and_faithful(seed in any::<u64>()) {
        let c = small_category(seed);
        for a in c.objects() {
            for b in c.objects() {
                let (ya, yb) = (Arc::new(representable(&c, a).unwrap()), Arc::new(representable(&c, b).unwrap()));
                let nats = enumerate_nat_trans(&ya, &yb, DEFAULT_NAT_BUDGET).unwrap();
                prop_assert_eq!(nats.len(), c.hom(a, b).len());
                for &m in c.hom(a, b) {
                    let ym = yoneda_action(&c, m).unwrap();
                    prop_assert!(nats.iter().any(|n| n.comps == ym.comps));
                }
            }
        }
    }

    #[test]
    fn colimits_of_discrete_and_invertible_diagrams(sizes in prop::collection::vec(0usize..4, 1..4), n in 1usize..4, k in 1usize..4) {
        let discrete = colimit_finset(&Diagram { sizes: sizes.clone(), arrows: vec![] });
        prop_assert_eq!(discrete.size, sizes.iter().sum::<usize>());
        // a chain of k+1 copies of an n-set joined by cyclic shifts
        let shift: Vec<usize> = (0..n).map(|e| (e + 1) % n).collect();
        let arrows = (0..k).map(|i| (i, i + 1, shift.clone())).collect();
        let glued = colimit_finset(&Diagram { sizes: vec![n; k + 1], arrows });
        prop_assert_eq!(glued.size, n);
    }

    /// `θ : i^t → 1` at a presheaf is the co-Yoneda comparison.
    #[test]
    fn co_yoneda_is_bijective(seed in any::<u64>()) {
        let ev = Evaluator::default();
        let x = small_category(seed);
        assert_bijective(&ev, &theta_cell(&x).unwrap().cell);
    }

    #[test]
    fn evaluation_is_deterministic(seed in any::<u64>()) {
        let inst = instance(seed, LawGroup::Strong, 0);
        let Payload::Strong { f, j, .. } = &inst.payload else { unreachable!() };
        let ft = f.strengthen(*j).unwrap();
        let (e1, e2) = (Evaluator::default(), Evaluator::default());
        for args in sample_args(&ft) {
            let a = e1.eval(&ft, &args).unwrap();
            let b = e2.eval(&ft, &args).unwrap();
            let again = e1.eval(&ft, &args).unwrap();
            prop_assert_eq!(&*a, &*b);
            prop_assert_eq!(&*a, &*again);
        }
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let inst = instance(seed, LawGroup::Strong, 0);
        let Payload::Strong { f, j, g, k, h } = &inst.payload else { unreachable!() };
        let ft = f.strengthen(*j).unwrap();
        let gt = g.strengthen(*k).unwrap();
        let left = ft.compose(*j, &gt).unwrap().compose(j + k, h).unwrap();
        let right = ft.compose(*j, &gt.compose(*k, h).unwrap()).unwrap();
        let ev = Evaluator::default();
        for args in sample_args(&left) {
            prop_assert_eq!(&*ev.eval(&left, &args).unwrap(), &*ev.eval(&right, &args).unwrap());
        }
    }

    /// Compared on genuine cells only: the injected mutations act per argument,
    /// so they are not natural in presheaf arguments and the exact policy,
    /// which relies on naturality, need not see them.
    #[test]
    fn transpose_and_sample_agree(seed in any::<u64>(), group in 0usize..2) {
        let inst = instance(seed, [LawGroup::RelPseudomonad, LawGroup::Strong][group], 0);
        let laws: Vec<&'static str> = LAWS.iter().map(|l| l.id).collect();
        let exact = check_instance(&inst, &laws, PolicyChoice::Exact, None, DEFAULT_COEND_BUDGET);
        let sampled = check_instance(&inst, &laws, PolicyChoice::Sample, None, DEFAULT_COEND_BUDGET);
        for (a, b) in exact.iter().zip(&sampled) {
            prop_assert_eq!(a.status, b.status, "{} disagrees: {:?} / {:?}", a.law, a.witness, b.witness);
        }
    }

    /// Distinct table cells `f ⇒ g`, strengthened, have distinct transposes.
    #[test]
    fn transpose_is_injective(seed in any::<u64>()) {
        let inst = instance(seed, LawGroup::LaxIdempotent, 0);
        let Payload::LaxId { f, j, g } = &inst.payload else { unreachable!() };
        let ev = Evaluator::default();
        let tables = enumerate_cells(&ev, f, g, DEFAULT_NAT_BUDGET, None, false).unwrap();
        let cells: Vec<TwoCell> = tables.into_iter().enumerate().map(|(n, t)| {
            TwoCell::strengthen(&TwoCell::table(&format!("β{n}"), f, g, t).unwrap(), *j).unwrap()
        }).collect();
        let differ = |x: &TwoCell, y: &TwoCell| sample_args(x.src()).iter().any(|args| ev.component(x, args).unwrap().comps != ev.component(y, args).unwrap().comps);
        for a in 0..cells.len() {
            for b in a + 1..cells.len() {
                prop_assert!(differ(&cells[a].transpose(*j).unwrap(), &cells[b].transpose(*j).unwrap()));
            }
        }
    }

    #[test]
    fn structural_cells_are_bijective(seed in any::<u64>()) {
        let inst = instance(seed, LawGroup::Strong, 0);
        let Payload::Strong { f, j, g, k, .. } = &inst.payload else { unreachable!() };
        let ev = Evaluator::default();
        assert_bijective(&ev, &TwoCell::unit_tilde(f, *j).unwrap());
        assert_bijective(&ev, &mult_cell(f, *j, g, *k).unwrap().cell);
        assert_bijective(&ev, &TwoCell::counit(&f.strengthen(*j).unwrap(), *j).unwrap());
    }

    #[test]
    fn gamma_is_invertible_and_matches_fubini(seed in any::<u64>()) {
        let inst = instance(seed, LawGroup::Pseudocommutative, 0);
        let Payload::Pscom { f, f3, .. } = &inst.payload else { unreachable!() };
        let ev = Evaluator::default();
        for (g, j, k) in [(f, 0, 1), (f3, 0, 2)] {
            let c = gamma(g, j, k).unwrap();
            assert_bijective(&ev, &c);
            for args in sample_args(c.src()) {
                prop_assert_eq!(fubini_disagreement(&ev, &c, g, j, k, &args).unwrap(), None);
            }
        }
        let reports = check_instance(&inst, &["pscom.inverse"], PolicyChoice::Exact, None, DEFAULT_COEND_BUDGET);
        prop_assert!(reports.iter().all(|r| r.status == Status::Pass));
    }

    #[test]
    fn unit_squares_and_t_hat_are_bijective(seed in any::<u64>()) {
        let inst = instance(seed, LawGroup::Multifunctor, 0);
        let Payload::Functors { f, i, g, .. } = &inst.payload else { unreachable!() };
        let ev = Evaluator::default();
        assert_bijective(&ev, &unit_square(f).unwrap());
        assert_bijective(&ev, &t_hat(f, *i, g).unwrap());
        prop_assert!(apply_t(f).unwrap().arity() == f.arity());
    }

    #[test]
    fn generation_and_checking_are_deterministic(seed in any::<u64>(), group in 0usize..7) {
        let group = LawGroup::ALL[group];
        let (a, b) = (instance(seed, group, 3), instance(seed, group, 3));
        prop_assert_eq!(a.to_text(), b.to_text());
        let laws: Vec<&'static str> = LAWS.iter().map(|l| l.id).collect();
        let ra = check_instance(&a, &laws, PolicyChoice::Exact, None, DEFAULT_COEND_BUDGET);
        let rb = check_instance(&b, &laws, PolicyChoice::Exact, None, DEFAULT_COEND_BUDGET);
        prop_assert_eq!(ra, rb);
    }
}

#[test]
fn every_generated_artifact_validates() {
    let ev = Evaluator::default();
    for group in LawGroup::ALL {
        for index in 0..10 {
            let inst = gen_instance(&GenConfig::default(), &ev, group, index).unwrap();
            for c in inst.categories() {
                assert!(validate_category(&c).is_ok());
            }
            let doc = relmonad::document::parse_document(&inst.to_text()).expect("instances serialize to valid documents");
            for (_, p) in &doc.profunctors {
                assert!(p.validate().is_ok());
            }
        }
    }
}

#[test]
fn default_bounds_exercise_nontrivial_merges() {
    let ev = Evaluator::default();
    for index in 0..10 {
        let inst = gen_instance(&GenConfig::default(), &ev, LawGroup::RelPseudomonad, index).unwrap();
        let Payload::Unary { f, .. } = &inst.payload else { unreachable!() };
        let ft = f.strengthen(0).unwrap();
        for args in sample_args(&ft) {
            ev.eval(&ft, &args).unwrap();
        }
    }
    assert!(ev.stats().merges > 0);
}

#[test]
fn every_law_belongs_to_exactly_one_group() {
    let mut ids: Vec<&str> = LAWS.iter().map(|l| l.id).collect();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), LAWS.len());
    for g in LawGroup::ALL {
        assert!(LAWS.iter().any(|l| l.group == g), "group {g} has no law");
    }
}
