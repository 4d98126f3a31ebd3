//! The presheaf construction as a strong relative pseudomonad: the action
//! `Tf` on functors of several variables, its comparison cells `T̂`, the unit
//! squares `ī_f`, square extension `α*`, and the interchange `γ` between the
//! two orders of strengthening.
//!
//! `γ` is built from lax idempotency (unit, reindexing, counit); the Fubini
//! comparison of nested coends is kept as an independent oracle.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::FinCategory;
use crate::kan::{mult_cell, theta_cell};
use crate::presheaf::{representable, Presheaf};
use crate::multimap::{Arg, Evaluator, MorArg, MultiFunctor, MultiMap, SlotType, TwoCell};

/// `X ↦ Psh X` with unit `y`, extension `f ↦ f^t` and cells `t̃`, `t̂`, `θ`,
/// read as a unary relative pseudomonad.
#[derive(Clone, Copy, Debug, Default)]
pub struct StrongRelPseudomonad;

impl StrongRelPseudomonad {
    pub fn unit(&self, x: &Arc<FinCategory>) -> MultiMap {
        MultiMap::unit(x)
    }

    pub fn extend(&self, f: &MultiMap) -> Result<MultiMap> {
        f.strengthen(0)
    }

    /// `η_f : f → f* i`.
    pub fn eta(&self, f: &MultiMap) -> Result<TwoCell> {
        TwoCell::unit_tilde(f, 0)
    }

    /// `μ_{f,g} : (f* g)* → f* g*`.
    pub fn mu(&self, f: &MultiMap, g: &MultiMap) -> Result<TwoCell> {
        Ok(mult_cell(f, 0, g, 0)?.cell)
    }

    pub fn theta(&self, x: &Arc<FinCategory>) -> Result<TwoCell> {
        Ok(theta_cell(x)?.cell)
    }
}

/// `f̄ = i ∘ Jf`.
pub fn bar(f: &Arc<MultiFunctor>) -> Result<MultiMap> {
    MultiMap::unit(f.codomain()).reindex(0, f)
}

/// `Tf = f̄^{t₁…tₙ}`, leftmost slot strengthened first.
pub fn apply_t(f: &Arc<MultiFunctor>) -> Result<MultiMap> {
    let order: Vec<usize> = (0..f.arity()).collect();
    bar(f)?.strengthen_all(&order)
}

/// `f ∘ (g₁,…,gₙ)` for unary `gᵢ`, substituted from the last slot to the first.
pub fn compose_all(f: &MultiMap, gs: &[MultiMap]) -> Result<MultiMap> {
    if gs.len() != f.arity() {
        return Err(Error::SlotMismatch(format!("{f} takes {} arguments, got {}", f.arity(), gs.len())));
    }
    (0..gs.len()).rev().try_fold(f.clone(), |acc, k| acc.compose(k, &gs[k]))
}

/// `α ∘ (g₁,…,gₙ)`, whiskered in the same nesting as [`compose_all`].
pub fn pre_whisker_all(alpha: &TwoCell, gs: &[MultiMap]) -> Result<TwoCell> {
    (0..gs.len()).rev().try_fold(alpha.clone(), |acc, k| TwoCell::pre_whisker(&acc, k, &gs[k]))
}

/// Vertical composite that bridges structurally different but definitionally
/// equal boundaries with `∼` cells.
pub fn chain(cells: &[TwoCell]) -> Result<TwoCell> {
    let mut out: Vec<TwoCell> = Vec::with_capacity(cells.len() * 2);
    for c in cells {
        if let Some(prev) = out.last() {
            if prev.dst() != c.src() {
                out.push(TwoCell::canonical(prev.dst(), c.src())?);
            }
        }
        out.push(c.clone());
    }
    TwoCell::vert(&out)
}

/// [`chain`] followed by `∼` into `target` when needed.
pub fn chain_to(cells: &[TwoCell], target: &MultiMap) -> Result<TwoCell> {
    let c = chain(cells)?;
    if c.dst() == target {
        Ok(c)
    } else {
        c.then(&TwoCell::canonical(c.dst(), target)?)
    }
}

fn range(a: usize, b: usize) -> Vec<usize> {
    (a..b).collect()
}

/// `T̂_{f,g} : T(f ∘ᵢ g) → Tf ∘ᵢ Tg`: reindex, one `t̃`, then one `t̂` per slot of `g`.
pub fn t_hat(f: &Arc<MultiFunctor>, i: usize, g: &Arc<MultiFunctor>) -> Result<TwoCell> {
    let (n, m) = (f.arity(), g.arity());
    let fg = Arc::new(f.compose(i, g)?);
    let total = n + m - 1;
    let src = apply_t(&fg)?;
    let fprime = bar(f)?.strengthen_all(&range(0, i))?;
    let gbar = bar(g)?;
    let unit = TwoCell::reindexed(&TwoCell::unit_tilde(&fprime, i)?, i, g)?;
    let fpt = fprime.strengthen(i)?;
    let to_gbar = TwoCell::canonical(unit.dst(), &fpt.compose(i, &gbar)?)?;
    let mut cells = vec![TwoCell::strengthen_all(&TwoCell::vert(&[unit, to_gbar])?, &range(i, total))?];
    for r in 0..m {
        let gr = gbar.strengthen_all(&range(0, r))?;
        let th = mult_cell(&fprime, i, &gr, r)?.cell;
        cells.push(TwoCell::strengthen_all(&th, &range(i + r + 1, total))?);
    }
    let target = apply_t(f)?.compose(i, &apply_t(g)?)?;
    let first = TwoCell::canonical(&src, cells[0].src())?;
    cells.insert(0, first);
    Ok(chain_to(&cells, &target)?.named(&format!("T̂[{},{}]", f.name(), g.name())))
}

/// `T̃_X : T1_X → 1`, i.e. `θ` read through `T1 = i^t`.
pub fn t_tilde(x: &Arc<FinCategory>) -> Result<TwoCell> {
    let id = Arc::new(MultiFunctor::identity(x));
    let t1 = apply_t(&id)?;
    let theta = theta_cell(x)?.cell;
    Ok(TwoCell::canonical(&t1, theta.src())?.then(&theta)?.named("T̃"))
}

/// `ī_f : i ∘ Jf → Tf ∘ (i,…,i)`, one `t̃` per slot.
pub fn unit_square(f: &Arc<MultiFunctor>) -> Result<TwoCell> {
    let fbar = bar(f)?;
    let n = f.arity();
    if n == 0 {
        return Ok(TwoCell::identity(&fbar).named("ī"));
    }
    let units: Vec<MultiMap> = f.slots().iter().map(MultiMap::unit).collect();
    let mut cells = Vec::with_capacity(n);
    for k in 0..n {
        let mut c = TwoCell::unit_tilde(&fbar.strengthen_all(&range(0, k))?, k)?;
        for s in (0..k).rev() {
            c = TwoCell::pre_whisker(&c, s, &units[s])?;
        }
        cells.push(c);
    }
    let target = compose_all(&apply_t(f)?, &units)?;
    Ok(chain_to(&cells, &target)?.named(&format!("ī[{}]", f.name())))
}

/// A square `α : h ∘ Jf → Tf′ ∘ (g₁,…,gₙ)` with `h`, `gᵢ` unary.
#[derive(Clone, Debug)]
pub struct Square {
    pub h: MultiMap,
    pub f: Arc<MultiFunctor>,
    pub f2: Arc<MultiFunctor>,
    pub gs: Vec<MultiMap>,
    pub alpha: TwoCell,
}

impl Square {
    pub fn new(h: MultiMap, f: Arc<MultiFunctor>, f2: Arc<MultiFunctor>, gs: Vec<MultiMap>, alpha: TwoCell) -> Result<Square> {
        let src = h.reindex(0, &f)?;
        let dst = compose_all(&apply_t(&f2)?, &gs)?;
        if h.arity() != 1 || gs.iter().any(|g| g.arity() != 1) {
            return Err(Error::SlotMismatch("square sides must be unary".into()));
        }
        let alpha = if alpha.src() == &src && alpha.dst() == &dst { alpha } else { chain_to(&[TwoCell::canonical(&src, alpha.src())?, alpha], &dst)? };
        Ok(Square { h, f, f2, gs, alpha })
    }

    /// The square `ī_f` with `h`, `gᵢ` units.
    pub fn unit(f: &Arc<MultiFunctor>) -> Result<Square> {
        let h = MultiMap::unit(f.codomain());
        let gs = f.slots().iter().map(MultiMap::unit).collect();
        Square::new(h, f.clone(), f.clone(), gs, unit_square(f)?)
    }

    pub fn src(&self) -> Result<MultiMap> {
        self.h.reindex(0, &self.f)
    }

    pub fn dst(&self) -> Result<MultiMap> {
        compose_all(&apply_t(&self.f2)?, &self.gs)
    }
}

/// `α* : h* ∘ Tf → Tf′ ∘ (g₁*,…,gₙ*)`: unwind `Tf` with `t̂⁻¹` and `t̃⁻¹`,
/// strengthen `α`, then rebuild slot by slot, rotating the strengthening
/// order of `f̄′` with `γ` so the slot being extended is outermost.
pub fn extend_square(sq: &Square) -> Result<TwoCell> {
    let n = sq.f.arity();
    let fbar = bar(&sq.f)?;
    let ht = sq.h.strengthen(0)?;
    let mut cells = Vec::new();
    for r in (0..n).rev() {
        let fr = fbar.strengthen_all(&range(0, r))?;
        let th = mult_cell(&sq.h, 0, &fr, r)?.cell;
        cells.push(TwoCell::inverse(&TwoCell::strengthen_all(&th, &range(r + 1, n))?));
    }
    let eta = TwoCell::reindexed(&TwoCell::unit_tilde(&sq.h, 0)?, 0, &sq.f)?;
    let eta = eta.then(&TwoCell::canonical(eta.dst(), &ht.compose(0, &fbar)?)?)?;
    cells.push(TwoCell::inverse(&TwoCell::strengthen_all(&eta, &range(0, n))?));
    cells.push(TwoCell::strengthen_all(&sq.alpha, &range(0, n))?);
    let f2bar = bar(&sq.f2)?;
    let mut order = range(0, n);
    let mut gs = sq.gs.clone();
    for r in 0..n {
        let target: Vec<usize> = (r + 1..n).chain(0..=r).collect();
        let perm = gamma_perm(&f2bar, &order, &target)?;
        cells.push(TwoCell::strengthen_all(&pre_whisker_all(&perm.cell, &gs)?, &range(r, n))?);
        let base = f2bar.strengthen_all(&target[..n - 1])?;
        let mut a = base;
        for k in (0..n).rev().filter(|&k| k != r) {
            a = a.compose(k, &gs[k])?;
        }
        let th = mult_cell(&a, r, &sq.gs[r], 0)?.cell;
        cells.push(TwoCell::strengthen_all(&th, &range(r + 1, n))?);
        gs[r] = sq.gs[r].strengthen(0)?;
        order = target;
    }
    let start = ht.compose(0, &apply_t(&sq.f)?)?;
    let target = compose_all(&apply_t(&sq.f2)?, &gs)?;
    let first = TwoCell::canonical(&start, cells[0].src())?;
    cells.insert(0, first);
    Ok(chain_to(&cells, &target)?.named(&format!("{}*", sq.alpha.name())))
}

fn two_fin(g: &MultiMap, j: usize, k: usize) -> Result<()> {
    if j >= k {
        return Err(Error::Invalid(format!("interchange needs slots j < k, got {} and {}", j + 1, k + 1)));
    }
    for s in [j, k] {
        if !matches!(g.slots().get(s), Some(SlotType::Fin(_))) {
            return Err(Error::SlotMismatch(format!("slot {} of {g} is not finite", s + 1)));
        }
    }
    Ok(())
}

/// `γ_g : g^{t_k t_j} → g^{t_j t_k}` for `j < k`: `(t̃ⱼ)^{t_k t_j}`, `∼`, then the counit at `j`.
pub fn gamma(g: &MultiMap, j: usize, k: usize) -> Result<TwoCell> {
    two_fin(g, j, k)?;
    let st = g.strengthen(j)?.strengthen(k)?;
    let lift = TwoCell::strengthen(&TwoCell::strengthen(&TwoCell::unit_tilde(g, j)?, k)?, j)?;
    let x = g.slots()[j].category().clone();
    let mid = st.compose(j, &MultiMap::unit(&x))?.strengthen(j)?;
    let c = TwoCell::canonical(lift.dst(), &mid)?;
    Ok(TwoCell::vert(&[lift, c, TwoCell::counit(&st, j)?])?.named(&format!("γ[{}]", g.name())))
}

/// The mirrored composite `g^{t_j t_k} → g^{t_k t_j}`, a two-sided inverse of `γ_g`.
pub fn gamma_inv(g: &MultiMap, j: usize, k: usize) -> Result<TwoCell> {
    two_fin(g, j, k)?;
    let ts = g.strengthen(k)?.strengthen(j)?;
    let lift = TwoCell::strengthen(&TwoCell::strengthen(&TwoCell::unit_tilde(g, k)?, j)?, k)?;
    let y = g.slots()[k].category().clone();
    let mid = ts.compose(k, &MultiMap::unit(&y))?.strengthen(k)?;
    let c = TwoCell::canonical(lift.dst(), &mid)?;
    Ok(TwoCell::vert(&[lift, c, TwoCell::counit(&ts, k)?])?.named(&format!("γ⁻¹[{}]", g.name())))
}

/// `γ_{σ;f} : f^{order} → f^{target}` together with the word it was built from.
#[derive(Clone, Debug)]
pub struct PermutationCell {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    /// Adjacent transpositions, as positions in the current order.
    pub word: Vec<usize>,
    pub cell: TwoCell,
}

/// The cell along an explicit word of adjacent transpositions of `order`
/// (an application order of strengthenings of `f`).
pub fn gamma_word(f: &MultiMap, order: &[usize], word: &[usize]) -> Result<PermutationCell> {
    let start = f.strengthen_all(order)?;
    let mut cur = order.to_vec();
    let mut cells = vec![TwoCell::identity(&start)];
    for &p in word {
        if p + 1 >= cur.len() {
            return Err(Error::Invalid(format!("transposition at position {} out of range", p + 1)));
        }
        let prefix = f.strengthen_all(&cur[..p])?;
        let (a, b) = (cur[p], cur[p + 1]);
        let step = if a > b { gamma(&prefix, b, a)? } else { gamma_inv(&prefix, a, b)? };
        cells.push(TwoCell::strengthen_all(&step, &cur[p + 2..])?);
        cur.swap(p, p + 1);
    }
    let cell = if cells.len() > 1 { TwoCell::vert(&cells[1..])? } else { cells.pop().expect("identity") };
    Ok(PermutationCell { from: order.to_vec(), to: cur, word: word.to_vec(), cell })
}

/// A bubble-sort word taking `order` to `target`.
pub fn sorting_word(order: &[usize], target: &[usize]) -> Result<Vec<usize>> {
    let pos: HashMap<usize, usize> = target.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut key: Vec<usize> = order.iter().map(|s| pos.get(s).copied()).collect::<Option<_>>().ok_or_else(|| {
        Error::Invalid(format!("{target:?} is not a permutation of {order:?}"))
    })?;
    if key.len() != target.len() {
        return Err(Error::Invalid(format!("{target:?} is not a permutation of {order:?}")));
    }
    let mut word = Vec::new();
    for pass in 0..key.len() {
        for p in 0..key.len().saturating_sub(pass + 1) {
            if key[p] > key[p + 1] {
                key.swap(p, p + 1);
                word.push(p);
            }
        }
    }
    Ok(word)
}

pub fn gamma_perm(f: &MultiMap, order: &[usize], target: &[usize]) -> Result<PermutationCell> {
    gamma_word(f, order, &sorting_word(order, target)?)
}

/// Independent check of a candidate `γ_g` against the Fubini bijection: both
/// double coends are compared with the quotient of the flat set
/// `{(x, p, x′, q, v) | p ∈ P(x), q ∈ Q(x′), v ∈ g(…,x,…,x′,…)(z)}`
/// by both coend relations at once. Returns a description of the first
/// disagreement.
pub fn fubini_disagreement(ev: &Evaluator, candidate: &TwoCell, g: &MultiMap, j: usize, k: usize, args: &[Arg]) -> Result<Option<String>> {
    two_fin(g, j, k)?;
    let (xc, yc) = (g.slots()[j].category().clone(), g.slots()[k].category().clone());
    let p = as_presheaf(&args[j], &xc)?;
    let q = as_presheaf(&args[k], &yc)?;
    let ts = g.strengthen(k)?.strengthen(j)?;
    let st = g.strengthen(j)?.strengthen(k)?;
    if candidate.src() != &g.strengthen(k)?.strengthen(j)? || candidate.dst() != &g.strengthen(j)?.strengthen(k)? {
        return Err(Error::SlotMismatch(format!("{candidate} is not a cell {} → {}", g.strengthen(k)?.strengthen(j)?, g.strengthen(j)?.strengthen(k)?)));
    }
    let phi = ev.component(candidate, args)?;
    let at = |x: usize, x2: usize| {
        let mut a = args.to_vec();
        a[j] = Arg::Obj(x);
        a[k] = Arg::Obj(x2);
        a
    };
    let z_cat = g.codomain().clone();
    for z in z_cat.objects() {
        // flat elements, indexed in a map
        let mut index: HashMap<(usize, usize, usize, usize, usize), usize> = HashMap::new();
        for x in xc.objects() {
            for e in 0..p.size(x) {
                for x2 in yc.objects() {
                    for e2 in 0..q.size(x2) {
                        let n = ev.eval(g, &at(x, x2))?.size(z);
                        for v in 0..n {
                            let id = index.len();
                            index.insert((x, e, x2, e2, v), id);
                        }
                    }
                }
            }
        }
        let mut uf = UnionFind::new(index.len());
        for x in xc.objects() {
            for x2 in yc.objects() {
                let a = at(x, x2);
                let gv = ev.eval(g, &a)?;
                for v in 0..gv.size(z) {
                    for m in xc.hom_out(x) {
                        let gm = ev.eval_mor(g, &a, j, &MorArg::Mor(m))?;
                        let t = xc.tgt(m);
                        for e in 0..p.size(t) {
                            for e2 in 0..q.size(x2) {
                                let l = index[&(x, p.act(m)[e], x2, e2, v)];
                                let r = index[&(t, e, x2, e2, gm.comps[z][v])];
                                uf.union(l, r);
                            }
                        }
                    }
                    for m in yc.hom_out(x2) {
                        let gm = ev.eval_mor(g, &a, k, &MorArg::Mor(m))?;
                        let t = yc.tgt(m);
                        for e2 in 0..q.size(t) {
                            for e in 0..p.size(x) {
                                let l = index[&(x, e, x2, q.act(m)[e2], v)];
                                let r = index[&(x, e, t, e2, gm.comps[z][v])];
                                uf.union(l, r);
                            }
                        }
                    }
                }
            }
        }
        let classes = uf.count();
        let ts_val = ev.eval(&ts, args)?;
        let st_val = ev.eval(&st, args)?;
        if ts_val.size(z) != classes || st_val.size(z) != classes {
            return Ok(Some(format!(
                "at {}: double coends have {} and {} elements, the flat quotient {}",
                z_cat.obj_name(z),
                ts_val.size(z),
                st_val.size(z),
                classes
            )));
        }
        let outer_ts = ev.coend(&ts, args)?;
        let outer_st = ev.coend(&st, args)?;
        let mut seen = vec![false; index.len()];
        for w in 0..ts_val.size(z) {
            let (x, e, v1) = outer_ts.rep(z, w);
            let mut a = args.to_vec();
            a[j] = Arg::Obj(x);
            let (x2, e2, v) = ev.coend(&g.strengthen(k)?, &a)?.rep(z, v1);
            let left = uf.find(index[&(x, e, x2, e2, v)]);
            let w2 = phi.comps[z][w];
            let (y2, f2, u1) = outer_st.rep(z, w2);
            let mut b = args.to_vec();
            b[k] = Arg::Obj(y2);
            let (y1, f1, u) = ev.coend(&g.strengthen(j)?, &b)?.rep(z, u1);
            let right = uf.find(index[&(y1, f1, y2, f2, u)]);
            if left != right {
                return Ok(Some(format!(
                    "at {}: γ sends element {} to {}, which lie over different flat classes",
                    z_cat.obj_name(z),
                    ts_val.at(z).label(w),
                    st_val.at(z).label(w2)
                )));
            }
            if seen[left] {
                return Ok(Some(format!("at {}: two elements of the double coend share a flat class", z_cat.obj_name(z))));
            }
            seen[left] = true;
        }
    }
    Ok(None)
}

fn as_presheaf(a: &Arg, x: &Arc<FinCategory>) -> Result<Arc<Presheaf>> {
    match a {
        Arg::Psh(p) => Ok(p.clone()),
        Arg::Obj(o) => Ok(Arc::new(representable(x, *o)?)),
    }
}

/// A plain union-find, kept separate from the colimit machinery so the Fubini
/// oracle does not share code with the evaluator.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&a| self.find(a) == a).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multimap::{two_cell_equal, MultiProfunctor, Mutation, Policy};
    use crate::presheaf::{coproduct, representable, Presheaf};

    fn arrow() -> Arc<FinCategory> {
        Arc::new(FinCategory::walking_arrow())
    }

    fn hom_pair(x: &Arc<FinCategory>) -> MultiMap {
        let pair = MultiFunctor::tupling("p", vec![x.clone(), x.clone()]);
        MultiMap::table("g", Arc::new(MultiProfunctor::yoneda_along(&pair)))
    }

    fn psh_args(x: &Arc<FinCategory>) -> Vec<Arc<Presheaf>> {
        let ya = Arc::new(representable(x, 0).unwrap());
        let yb = Arc::new(representable(x, 1).unwrap());
        vec![ya.clone(), yb.clone(), Arc::new(coproduct(&ya, &yb).unwrap()), Arc::new(Presheaf::empty(x))]
    }

    #[test]
    fn gamma_is_inverted_by_its_mirror() {
        let x = arrow();
        let g = hom_pair(&x);
        let ev = Evaluator::default();
        let there = gamma(&g, 0, 1).unwrap();
        let back = gamma_inv(&g, 0, 1).unwrap();
        let round = there.then(&back).unwrap();
        let id = TwoCell::identity(there.src());
        assert!(two_cell_equal(&ev, &round, &id, Policy::Transpose).unwrap().holds());
        assert!(two_cell_equal(&ev, &round, &id, Policy::Sample).unwrap().holds());
    }

    #[test]
    fn gamma_matches_fubini() {
        let x = arrow();
        let g = hom_pair(&x);
        let ev = Evaluator::default();
        for p in psh_args(&x) {
            for q in psh_args(&x) {
                let args = [Arg::Psh(p.clone()), Arg::Psh(q.clone())];
                let c = gamma(&g, 0, 1).unwrap();
                assert_eq!(fubini_disagreement(&ev, &c, &g, 0, 1, &args).unwrap(), None);
            }
        }
    }

    #[test]
    fn identity_gamma_is_caught_by_fubini() {
        let x = arrow();
        let g = hom_pair(&x);
        let ev = Evaluator::default();
        let bad = TwoCell::mutated(&gamma(&g, 0, 1).unwrap(), Mutation::IndexIdentity);
        let ps = psh_args(&x);
        let mut caught = false;
        for p in &ps {
            for q in &ps {
                let args = [Arg::Psh(p.clone()), Arg::Psh(q.clone())];
                caught |= fubini_disagreement(&ev, &bad, &g, 0, 1, &args).unwrap().is_some();
            }
        }
        assert!(caught);
    }

    #[test]
    fn t_of_tupling_at_representables_is_representable() {
        let x = arrow();
        let pair = Arc::new(MultiFunctor::tupling("p", vec![x.clone(), x.clone()]));
        let tf = apply_t(&pair).unwrap();
        let ev = Evaluator::default();
        for a in x.objects() {
            for b in x.objects() {
                let ya = Arc::new(representable(&x, a).unwrap());
                let yb = Arc::new(representable(&x, b).unwrap());
                let v = ev.eval(&tf, &[Arg::Psh(ya), Arg::Psh(yb)]).unwrap();
                let expect = representable(pair.codomain(), pair.obj_at(&[a, b])).unwrap();
                assert_eq!(v.sizes(), expect.sizes());
            }
        }
    }

    #[test]
    fn unit_square_and_t_hat_are_bijective() {
        let x = arrow();
        let pair = Arc::new(MultiFunctor::tupling("p", vec![x.clone(), x.clone()]));
        let ev = Evaluator::default();
        let ib = unit_square(&pair).unwrap();
        for a in x.objects() {
            for b in x.objects() {
                assert!(ev.component(&ib, &[Arg::Obj(a), Arg::Obj(b)]).unwrap().is_bijective());
            }
        }
        let id = Arc::new(MultiFunctor::identity(&x));
        let th = t_hat(&pair, 1, &id).unwrap();
        for p in psh_args(&x) {
            for q in psh_args(&x) {
                let c = ev.component(&th, &[Arg::Psh(p.clone()), Arg::Psh(q.clone())]).unwrap();
                assert!(c.is_bijective());
            }
        }
    }

    #[test]
    fn extending_the_unit_square_is_invertible() {
        let x = arrow();
        let pair = Arc::new(MultiFunctor::tupling("p", vec![x.clone(), x.clone()]));
        let ev = Evaluator::default();
        let ext = extend_square(&Square::unit(&pair).unwrap()).unwrap();
        for p in psh_args(&x) {
            for q in psh_args(&x) {
                let c = ev.component(&ext, &[Arg::Psh(p.clone()), Arg::Psh(q.clone())]).unwrap();
                assert!(c.validate().is_ok());
                assert!(c.is_bijective());
            }
        }
    }

    #[test]
    fn sorting_words_reach_their_target() {
        let w = sorting_word(&[0, 1, 2], &[2, 0, 1]).unwrap();
        let mut cur = vec![0, 1, 2];
        for p in w {
            cur.swap(p, p + 1);
        }
        assert_eq!(cur, vec![2, 0, 1]);
        assert!(sorting_word(&[0, 1], &[0, 2]).is_err());
    }
}
