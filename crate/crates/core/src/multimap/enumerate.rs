//! Exhaustive search for 2-cells between two all-finite maps.
//!
//! Components at each object tuple are drawn from the natural transformations
//! between the evaluated presheaves; tuples are visited in mixed-radix order
//! and naturality in every slot is checked against already-assigned tuples.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{mixed_index, tuples};
use crate::presheaf::{enumerate_nat_trans, PresheafMorphism};

use super::cell::CellTable;
use super::{Arg, Evaluator, MorArg, MultiMap};

/// Reorders candidate components at a tuple; used to draw a random cell.
pub type Shuffle<'a> = &'a mut dyn FnMut(&mut Vec<PresheafMorphism>);

struct Square {
    /// Index of the other tuple.
    other: usize,
    /// `src(m)` and `dst(m)` between this tuple (the source end) and `other`.
    src_mor: Arc<PresheafMorphism>,
    dst_mor: Arc<PresheafMorphism>,
}

/// All cells `src ⇒ dst`, or just the first one found when `first_only`.
pub fn enumerate_cells(
    ev: &Evaluator,
    src: &MultiMap,
    dst: &MultiMap,
    budget: usize,
    mut shuffle: Option<Shuffle<'_>>,
    first_only: bool,
) -> Result<Vec<CellTable>> {
    if src.slots() != dst.slots() || !src.is_all_fin() || !super::same_cat(src.codomain(), dst.codomain()) {
        return Err(Error::SlotMismatch(format!("cells can only be enumerated between parallel finite maps, got {src} and {dst}")));
    }
    let dims: Vec<usize> = src.slots().iter().map(|s| s.category().num_objects()).collect();
    let all = tuples(&dims);
    let mut cands = Vec::with_capacity(all.len());
    for t in &all {
        let args: Vec<Arg> = t.iter().map(|&x| Arg::Obj(x)).collect();
        let p = ev.eval(src, &args)?;
        let q = ev.eval(dst, &args)?;
        let mut c = enumerate_nat_trans(&p, &q, budget)?;
        if let Some(s) = shuffle.as_mut() {
            s(&mut c);
        }
        cands.push(c);
    }
    // squares[later] lists the constraints that tie a tuple to itself or an earlier one
    let mut squares: Vec<Vec<(usize, Square, bool)>> = (0..all.len()).map(|_| Vec::new()).collect();
    for (ti, t) in all.iter().enumerate() {
        let args: Vec<Arg> = t.iter().map(|&x| Arg::Obj(x)).collect();
        for (k, slot) in src.slots().iter().enumerate() {
            let c = slot.category();
            for m in c.hom_out(t[k]) {
                let mut t2 = t.clone();
                t2[k] = c.tgt(m);
                let oi = mixed_index(&t2, dims.iter().copied());
                let sq = Square {
                    other: oi,
                    src_mor: ev.eval_mor(src, &args, k, &MorArg::Mor(m))?,
                    dst_mor: ev.eval_mor(dst, &args, k, &MorArg::Mor(m))?,
                };
                // `true`: this tuple is the source end of the square
                if oi <= ti {
                    squares[ti].push((ti, sq, true));
                } else {
                    squares[oi].push((ti, sq, false));
                }
            }
        }
    }
    let mut chosen: Vec<usize> = vec![0; all.len()];
    let mut out = Vec::new();
    let mut visited = 0usize;
    search(&cands, &squares, 0, &mut chosen, &mut out, &mut visited, budget, first_only)?;
    Ok(out
        .into_iter()
        .map(|ch| CellTable { dims: dims.clone(), comps: ch.iter().enumerate().map(|(ti, &c)| cands[ti][c].comps.clone()).collect() })
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn search(
    cands: &[Vec<PresheafMorphism>],
    squares: &[Vec<(usize, Square, bool)>],
    ti: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    visited: &mut usize,
    budget: usize,
    first_only: bool,
) -> Result<bool> {
    if ti == cands.len() {
        out.push(chosen.clone());
        return Ok(first_only);
    }
    for c in 0..cands[ti].len() {
        *visited += 1;
        if *visited > budget {
            return Err(Error::Budget { what: "cell search".into(), needed: *visited, limit: budget });
        }
        chosen[ti] = c;
        let ok = squares[ti].iter().all(|(from, sq, here_is_src)| {
            let (a, b) = if *here_is_src { (ti, sq.other) } else { (*from, ti) };
            let (pa, pb) = (&cands[a][chosen[a]], &cands[b][chosen[b]]);
            // naturality: dst(m) ∘ α_a = α_b ∘ src(m)
            pa.then(&sq.dst_mor).comps == sq.src_mor.then(pb).comps
        });
        if ok && search(cands, squares, ti + 1, chosen, out, visited, budget, first_only)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCategory;
    use crate::multimap::{MultiFunctor, MultiProfunctor, TwoCell};

    #[test]
    fn cells_between_hom_maps_match_yoneda() {
        // cells y∘1 ⇒ y∘1 over a free category are the natural endomorphisms
        // of the identity functor, which on a connected free category with no
        // loops are only the identity
        let x = Arc::new(FinCategory::free(&["a", "b", "c"], &[(0, 1), (0, 1), (1, 2)]));
        let f = MultiMap::table("f", Arc::new(MultiProfunctor::yoneda_along(&MultiFunctor::identity(&x))));
        let ev = Evaluator::default();
        let cells = enumerate_cells(&ev, &f, &f, 1_000_000, None, false).unwrap();
        assert_eq!(cells.len(), 1);
        let id = TwoCell::table("α", &f, &f, cells[0].clone()).unwrap();
        for a in x.objects() {
            let c = ev.component(&id, &[Arg::Obj(a)]).unwrap();
            assert_eq!(c.comps, ev.component(&TwoCell::identity(&f), &[Arg::Obj(a)]).unwrap().comps);
        }
    }

    #[test]
    fn first_only_stops_early() {
        let x = Arc::new(FinCategory::walking_arrow());
        let f = MultiMap::table("f", Arc::new(MultiProfunctor::yoneda_along(&MultiFunctor::identity(&x))));
        let ev = Evaluator::default();
        assert_eq!(enumerate_cells(&ev, &f, &f, 1000, None, true).unwrap().len(), 1);
    }
}
