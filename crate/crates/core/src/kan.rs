//! Strengthening as left Kan extension along `1,…,y,…,1` and its structural
//! 2-cells.
//!
//! `t̃` and the counit `σ` are computed directly from coend representatives;
//! `t̂` and `θ` are never given by formulas but obtained by untransposing
//! their defining triangles, so their uniqueness rests on the adjunction.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::FinCategory;
use crate::multimap::{MultiMap, SlotType, TwoCell};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrengthKind {
    UnitTilde,
    MultHat,
    Theta,
    Counit,
}

impl fmt::Display for StrengthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrengthKind::UnitTilde => "UNIT_TILDE",
            StrengthKind::MultHat => "MULT_HAT",
            StrengthKind::Theta => "THETA",
            StrengthKind::Counit => "COUNIT",
        })
    }
}

/// A structural cell together with where it came from.
#[derive(Clone, Debug)]
pub struct StrengthCell {
    pub kind: StrengthKind,
    pub cell: TwoCell,
    pub provenance: String,
}

/// `f^{t_j}`.
pub fn strengthen(f: &MultiMap, j: usize) -> Result<MultiMap> {
    f.strengthen(j)
}

/// `t̃_f : f → f^{t_j} ∘ⱼ i`, the coend coprojection at `(x, id_x)`.
pub fn unit_cell(f: &MultiMap, j: usize) -> Result<StrengthCell> {
    Ok(StrengthCell { kind: StrengthKind::UnitTilde, cell: TwoCell::unit_tilde(f, j)?, provenance: format!("{f}, slot {}", j + 1) })
}

/// `σ_h : (h ∘ⱼ i)^{t_j} → h` for a presheaf slot `j` of `h`.
pub fn counit_cell(h: &MultiMap, j: usize) -> Result<StrengthCell> {
    Ok(StrengthCell { kind: StrengthKind::Counit, cell: TwoCell::counit(h, j)?, provenance: format!("{h}, slot {}", j + 1) })
}

/// `(α ∘ⱼ i) · t̃_f` for `α` out of `f^{t_j}`.
pub fn transpose(alpha: &TwoCell, j: usize) -> Result<TwoCell> {
    alpha.transpose(j)
}

/// The cell `A^{t_p} → H` corresponding to `β : A → H ∘ₚ i`, namely `σ_H · β^{t_p}`.
pub fn untranspose(beta: &TwoCell, p: usize) -> Result<TwoCell> {
    let h = match beta.dst().body() {
        crate::multimap::Body::Compose(h, q, unit) if *q == p && matches!(unit.body(), crate::multimap::Body::Unit(_)) => h.clone(),
        _ => return Err(Error::NotExtension(format!("target of {beta} is not a composite with the unit in slot {}", p + 1))),
    };
    TwoCell::vert(&[TwoCell::strengthen(beta, p)?, TwoCell::counit(&h, p)?])
}

/// `t̂_{f,g} : (f^{t_j} ∘ⱼ g)^{t_{j+k}} → f^{t_j} ∘ⱼ g^{t_k}`: the cell whose
/// transpose is `f^{t_j} ∘ⱼ t̃_g`.
pub fn mult_cell(f: &MultiMap, j: usize, g: &MultiMap, k: usize) -> Result<StrengthCell> {
    let ft = f.strengthen(j)?;
    let a = ft.compose(j, g)?;
    let gt = g.strengthen(k)?;
    let h = ft.compose(j, &gt)?;
    let w = g.slots()[k].category().clone();
    let whiskered = TwoCell::post_whisker(&ft, j, &TwoCell::unit_tilde(g, k)?)?;
    let reassoc = TwoCell::canonical(whiskered.dst(), &h.compose(j + k, &MultiMap::unit(&w))?)?;
    let beta = TwoCell::vert(&[whiskered, reassoc])?;
    let cell = untranspose(&beta, j + k)?;
    debug_assert!(cell.src() == &a.strengthen(j + k)?);
    let name = format!("t̂[{f},{g}]");
    Ok(StrengthCell { kind: StrengthKind::MultHat, cell: cell.named(&name), provenance: format!("{f} slot {}, {g} slot {}", j + 1, k + 1) })
}

/// `θ_X : i^t → 1`: the cell whose transpose is the identity of `i`.
pub fn theta_cell(x: &Arc<FinCategory>) -> Result<StrengthCell> {
    let unit = MultiMap::unit(x);
    let beta = TwoCell::canonical(&unit, &MultiMap::ident(x).compose(0, &unit)?)?;
    let cell = untranspose(&beta, 0)?;
    Ok(StrengthCell { kind: StrengthKind::Theta, cell: cell.named("θ"), provenance: "unit".into() })
}

/// The finite slots of a map, in order.
pub fn fin_slots(f: &MultiMap) -> Vec<usize> {
    f.slots().iter().enumerate().filter(|(_, s)| matches!(s, SlotType::Fin(_))).map(|(k, _)| k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multimap::{Arg, Evaluator, MultiFunctor, MultiProfunctor, Policy, two_cell_equal};
    use crate::presheaf::{coproduct, representable, Presheaf};

    fn diamond() -> Arc<FinCategory> {
        Arc::new(FinCategory::free(&["a", "b", "c"], &[(0, 1), (0, 1), (1, 2)]))
    }

    fn pair_map(x: &Arc<FinCategory>) -> MultiMap {
        let pair = Arc::new(MultiFunctor::tupling("p", vec![x.clone(), x.clone()]));
        MultiMap::table("f", Arc::new(MultiProfunctor::yoneda_along(&pair)))
    }

    #[test]
    fn unit_cells_are_bijections() {
        let x = diamond();
        let f = pair_map(&x);
        let ev = Evaluator::default();
        for j in 0..2 {
            let t = unit_cell(&f, j).unwrap().cell;
            for a in x.objects() {
                for b in x.objects() {
                    assert!(ev.component(&t, &[Arg::Obj(a), Arg::Obj(b)]).unwrap().is_bijective());
                }
            }
        }
    }

    #[test]
    fn theta_is_the_co_yoneda_collapse() {
        let x = diamond();
        let theta = theta_cell(&x).unwrap().cell;
        let ev = Evaluator::default();
        let ys: Vec<Arc<Presheaf>> = x.objects().map(|a| Arc::new(representable(&x, a).unwrap())).collect();
        let mut args = ys.clone();
        args.push(Arc::new(coproduct(&ys[0], &ys[2]).unwrap()));
        args.push(Arc::new(Presheaf::empty(&x)));
        for p in args {
            let c = ev.component(&theta, &[Arg::Psh(p.clone())]).unwrap();
            assert!(c.is_bijective());
            assert!(c.validate().is_ok());
            assert!(c.dst.same_tables(&p));
        }
    }

    #[test]
    fn transpose_of_identity_is_unit() {
        let x = diamond();
        let ft = pair_map(&x).strengthen(1).unwrap();
        let ev = Evaluator::default();
        let id = TwoCell::identity(&ft);
        let t = unit_cell(&pair_map(&x), 1).unwrap().cell;
        let lhs = transpose(&id, 1).unwrap();
        for a in x.objects() {
            for b in x.objects() {
                let args = [Arg::Obj(a), Arg::Obj(b)];
                let l = ev.component(&lhs, &args).unwrap();
                let r = ev.component(&t, &args).unwrap();
                assert_eq!(l.comps, r.comps);
            }
        }
    }

    #[test]
    fn mult_cell_transposes_to_whiskered_unit() {
        let x = diamond();
        let f = pair_map(&x);
        let g = MultiMap::table("g", Arc::new(MultiProfunctor::yoneda_along(&MultiFunctor::identity(&x))));
        let that = mult_cell(&f, 0, &g, 0).unwrap().cell;
        let ev = Evaluator::default();
        let lhs = transpose(&that, 0).unwrap();
        let ft = f.strengthen(0).unwrap();
        let rhs = TwoCell::vert(&[
            TwoCell::post_whisker(&ft, 0, &TwoCell::unit_tilde(&g, 0).unwrap()).unwrap(),
            TwoCell::canonical(
                &ft.compose(0, &g.strengthen(0).unwrap().compose(0, &MultiMap::unit(&x)).unwrap()).unwrap(),
                lhs.dst(),
            )
            .unwrap(),
        ])
        .unwrap();
        assert!(two_cell_equal(&ev, &lhs, &rhs, Policy::Transpose).unwrap().holds());
    }
}
