//! Memoised evaluation of multimaps at object and morphism arguments.
//!
//! Presheaf arguments are interned so caches can be keyed by small ids; the
//! caches are semantically invisible. Strengthenings are evaluated pointwise
//! as coends: the colimit over the elements `(x, e)` of the presheaf argument
//! of the sets `f(…, x, …)(z)`, computed by union-find with least
//! representatives.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::presheaf::{elements, representable, yoneda_action, Colimit, Diagram, Elements, FinSet, Presheaf, PresheafMorphism};

use super::{Arg, Body, MorArg, MultiMap, SlotType};

pub const DEFAULT_COEND_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum ArgKey {
    Obj(usize),
    Psh(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum MorKey {
    Mor(usize),
    Nat(u32),
}

/// Counters for instrumentation; all deterministic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Unions that joined distinct classes while computing coends.
    pub merges: usize,
    pub coends: usize,
    /// Diagram elements processed, a machine-independent work measure.
    pub work: usize,
}

/// The pointwise coend behind one evaluation of a strengthening.
#[derive(Debug)]
pub struct Coend {
    pub arg: Arc<Presheaf>,
    pub elements: Arc<Elements>,
    /// Value of the inner map at each object of the strengthened slot, where needed.
    pub inner: Vec<Option<Arc<Presheaf>>>,
    pub per_z: Vec<Colimit>,
    /// The resulting presheaf on the codomain.
    pub value: Arc<Presheaf>,
}

impl Coend {
    /// Class of the element `v` of `inner(x)(z)` over `(x, e)`.
    pub fn class(&self, z: usize, x: usize, e: usize, v: usize) -> usize {
        self.per_z[z].class_of[self.elements.index(x, e)][v]
    }

    /// Representative `((x, e), v)` of a class.
    pub fn rep(&self, z: usize, c: usize) -> (usize, usize, usize) {
        let (idx, v) = self.per_z[z].reps[c];
        let (x, e) = self.elements.objects[idx];
        (x, e, v)
    }
}

type ArgsKey = (u64, Vec<ArgKey>);

/// Evaluation context. Not shared between threads; create one per task.
pub struct Evaluator {
    budget: usize,
    psh_intern: RefCell<HashMap<u64, Vec<(Arc<Presheaf>, u32)>>>,
    psh_by_id: RefCell<Vec<Arc<Presheaf>>>,
    nat_intern: RefCell<HashMap<(u32, u32, Vec<Vec<usize>>), u32>>,
    values: RefCell<HashMap<ArgsKey, Arc<Presheaf>>>,
    mors: RefCell<HashMap<(u64, Vec<ArgKey>, usize, MorKey), Arc<PresheafMorphism>>>,
    coends: RefCell<HashMap<ArgsKey, Arc<Coend>>>,
    pub(crate) cells: RefCell<HashMap<ArgsKey, Arc<PresheafMorphism>>>,
    elements: RefCell<HashMap<u32, Arc<Elements>>>,
    stats: RefCell<EvalStats>,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::new(DEFAULT_COEND_BUDGET)
    }
}

impl Evaluator {
    pub fn new(budget: usize) -> Evaluator {
        Evaluator {
            budget,
            psh_intern: RefCell::default(),
            psh_by_id: RefCell::default(),
            nat_intern: RefCell::default(),
            values: RefCell::default(),
            mors: RefCell::default(),
            coends: RefCell::default(),
            cells: RefCell::default(),
            elements: RefCell::default(),
            stats: RefCell::default(),
        }
    }

    /// Budget from `RELMONAD_BUDGET`, else the default.
    pub fn from_env() -> Result<Evaluator> {
        match std::env::var("RELMONAD_BUDGET") {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map(Evaluator::new)
                .map_err(|_| Error::Invalid(format!("RELMONAD_BUDGET must be a natural number, got {v:?}"))),
            Err(_) => Ok(Evaluator::default()),
        }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn stats(&self) -> EvalStats {
        *self.stats.borrow()
    }

    /// The canonical shared copy of a presheaf and its id.
    pub fn intern(&self, p: Arc<Presheaf>) -> (Arc<Presheaf>, u32) {
        let fp = p.fingerprint();
        if let Some(bucket) = self.psh_intern.borrow().get(&fp) {
            for (q, id) in bucket {
                if Arc::ptr_eq(q, &p) || **q == *p {
                    return (q.clone(), *id);
                }
            }
        }
        let id = self.psh_by_id.borrow().len() as u32;
        self.psh_by_id.borrow_mut().push(p.clone());
        self.psh_intern.borrow_mut().entry(fp).or_default().push((p.clone(), id));
        (p, id)
    }

    fn intern_nat(&self, phi: &PresheafMorphism) -> u32 {
        let (_, s) = self.intern(phi.src.clone());
        let (_, d) = self.intern(phi.dst.clone());
        let key = (s, d, phi.comps.clone());
        let mut table = self.nat_intern.borrow_mut();
        let next = table.len() as u32;
        *table.entry(key).or_insert(next)
    }

    pub(crate) fn keys(&self, args: &[Arg]) -> Vec<ArgKey> {
        args.iter()
            .map(|a| match a {
                Arg::Obj(x) => ArgKey::Obj(*x),
                Arg::Psh(p) => ArgKey::Psh(self.intern(p.clone()).1),
            })
            .collect()
    }

    fn mor_key(&self, m: &MorArg) -> MorKey {
        match m {
            MorArg::Mor(k) => MorKey::Mor(*k),
            MorArg::Nat(phi) => MorKey::Nat(self.intern_nat(phi)),
        }
    }

    pub fn elements_of(&self, p: &Arc<Presheaf>) -> Arc<Elements> {
        let (p, id) = self.intern(p.clone());
        if let Some(e) = self.elements.borrow().get(&id) {
            return e.clone();
        }
        let e = Arc::new(elements(&p));
        self.elements.borrow_mut().insert(id, e.clone());
        e
    }

    /// `f(args)` as a presheaf on the codomain of `f`.
    pub fn eval(&self, f: &MultiMap, args: &[Arg]) -> Result<Arc<Presheaf>> {
        f.check_args(args)?;
        let key = (f.id(), self.keys(args));
        if let Some(v) = self.values.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = self.eval_uncached(f, args)?;
        let (v, _) = self.intern(v);
        self.values.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    fn eval_uncached(&self, f: &MultiMap, args: &[Arg]) -> Result<Arc<Presheaf>> {
        match f.body() {
            Body::Table(p) => {
                let b: Vec<usize> = args.iter().map(obj).collect();
                Ok(Arc::new(p.presheaf_at(&b)))
            }
            Body::Unit(x) => Ok(Arc::new(representable(x, obj(&args[0]))?)),
            Body::Ident(_) => Ok(psh(&args[0]).clone()),
            Body::Strengthen(..) => Ok(self.coend(f, args)?.value.clone()),
            Body::Compose(g, i, h) => {
                let (g_args, _) = self.split_compose(*i, h, args)?;
                self.eval(g, &g_args)
            }
            Body::Reindex(g, i, func) => {
                let c: Vec<usize> = args[*i..*i + func.arity()].iter().map(obj).collect();
                let mut g_args = args[..*i].to_vec();
                g_args.push(Arg::Obj(func.obj_at(&c)));
                g_args.extend_from_slice(&args[*i + func.arity()..]);
                self.eval(g, &g_args)
            }
            Body::PlugObject(g, i, a) => {
                let mut g_args = args.to_vec();
                g_args.insert(*i, Arg::Obj(*a));
                self.eval(g, &g_args)
            }
        }
    }

    /// Arguments of the outer map of a composite, with the inner map evaluated.
    fn split_compose(&self, i: usize, h: &MultiMap, args: &[Arg]) -> Result<(Vec<Arg>, Vec<Arg>)> {
        let m = h.arity();
        let h_args = args[i..i + m].to_vec();
        let q = self.eval(h, &h_args)?;
        let mut g_args = args[..i].to_vec();
        g_args.push(Arg::Psh(q));
        g_args.extend_from_slice(&args[i + m..]);
        Ok((g_args, h_args))
    }

    /// The coend data of a strengthening node at the given arguments.
    pub fn coend(&self, f: &MultiMap, args: &[Arg]) -> Result<Arc<Coend>> {
        let (g, j) = match f.body() {
            Body::Strengthen(g, j) => (g, *j),
            _ => return Err(Error::NotExtension(f.to_string())),
        };
        f.check_args(args)?;
        let key = (f.id(), self.keys(args));
        if let Some(c) = self.coends.borrow().get(&key) {
            return Ok(c.clone());
        }
        let p = self.intern(psh(&args[j]).clone()).0;
        let els = self.elements_of(&p);
        let x_cat = p.base().clone();
        let y = f.codomain().clone();
        let mut inner: Vec<Option<Arc<Presheaf>>> = vec![None; x_cat.num_objects()];
        let mut total = 0usize;
        for x in x_cat.objects() {
            if p.size(x) == 0 {
                continue;
            }
            let mut a = args.to_vec();
            a[j] = Arg::Obj(x);
            let v = self.eval(g, &a)?;
            total += p.size(x) * v.total_size();
            if total > self.budget {
                return Err(Error::Budget { what: format!("coend for {f}"), needed: total, limit: self.budget });
            }
            inner[x] = Some(v);
        }
        // the function f(m) for each base morphism carrying an arrow of elements
        let mut arrow_maps: HashMap<usize, Arc<PresheafMorphism>> = HashMap::new();
        for &(m, _, _) in &els.arrows {
            if let std::collections::hash_map::Entry::Vacant(slot) = arrow_maps.entry(m) {
                let mut a = args.to_vec();
                a[j] = Arg::Obj(x_cat.src(m));
                slot.insert(self.eval_mor(g, &a, j, &MorArg::Mor(m))?);
            }
        }
        let mut per_z = Vec::with_capacity(y.num_objects());
        let mut merges = 0;
        for z in y.objects() {
            let sizes: Vec<usize> =
                els.objects.iter().map(|&(x, _)| inner[x].as_ref().map_or(0, |v| v.size(z))).collect();
            let arrows = els.arrows.iter().map(|&(m, s, t)| (s, t, arrow_maps[&m].comps[z].clone())).collect();
            let col = crate::presheaf::colimit_finset(&Diagram { sizes, arrows });
            merges += col.merges;
            per_z.push(col);
        }
        {
            let mut st = self.stats.borrow_mut();
            st.merges += merges;
            st.coends += 1;
            st.work += total;
        }
        let value = coend_presheaf(&els, &inner, &per_z, &y);
        let (value, _) = self.intern(value);
        let c = Arc::new(Coend { arg: p, elements: els, inner, per_z, value });
        self.coends.borrow_mut().insert(key, c.clone());
        Ok(c)
    }

    /// `f` applied to a morphism in slot `k`, the other arguments fixed:
    /// a morphism from `f(args)` to `f(args[k := target])`.
    pub fn eval_mor(&self, f: &MultiMap, args: &[Arg], k: usize, mor: &MorArg) -> Result<Arc<PresheafMorphism>> {
        f.check_args(args)?;
        let slot = f.slots().get(k).ok_or_else(|| Error::TypeMismatch(format!("{f} has no slot {}", k + 1)))?;
        match (slot, &args[k], mor) {
            (SlotType::Fin(c), Arg::Obj(x), MorArg::Mor(m)) if *m < c.num_morphisms() && c.src(*m) == *x => {}
            (SlotType::Psh(_), Arg::Psh(p), MorArg::Nat(phi)) if *phi.src == **p => {}
            _ => return Err(Error::TypeMismatch(format!("morphism argument for slot {} of {f} does not start at the argument", k + 1))),
        }
        let key = (f.id(), self.keys(args), k, self.mor_key(mor));
        if let Some(v) = self.mors.borrow().get(&key) {
            return Ok(v.clone());
        }
        let src = self.eval(f, args)?;
        let mut tgt_args = args.to_vec();
        tgt_args[k] = mor.target(slot);
        let dst = self.eval(f, &tgt_args)?;
        let comps = self.eval_mor_comps(f, args, &tgt_args, k, mor)?;
        let v = Arc::new(PresheafMorphism { src, dst, comps });
        self.mors.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    fn eval_mor_comps(&self, f: &MultiMap, args: &[Arg], tgt_args: &[Arg], k: usize, mor: &MorArg) -> Result<Vec<Vec<usize>>> {
        match f.body() {
            Body::Table(p) => {
                let b: Vec<usize> = args.iter().map(obj).collect();
                let m = mor_of(mor);
                let y = p.codomain();
                let mut t = vec![0];
                t.extend_from_slice(&b);
                Ok(y.objects()
                    .map(|z| {
                        t[0] = z;
                        p.act(k + 1, m, &t).to_vec()
                    })
                    .collect())
            }
            Body::Unit(x) => Ok(yoneda_action(x, mor_of(mor))?.comps),
            Body::Ident(_) => match mor {
                MorArg::Nat(phi) => Ok(phi.comps.clone()),
                MorArg::Mor(_) => unreachable!("checked by slot type"),
            },
            Body::Strengthen(g, j) => {
                let j = *j;
                let c = self.coend(f, args)?;
                let c2 = self.coend(f, tgt_args)?;
                let y = f.codomain();
                if k == j {
                    let phi = match mor {
                        MorArg::Nat(phi) => phi,
                        MorArg::Mor(_) => unreachable!("checked by slot type"),
                    };
                    Ok(y.objects()
                        .map(|z| {
                            (0..c.per_z[z].size)
                                .map(|cl| {
                                    let (x, e, v) = c.rep(z, cl);
                                    c2.class(z, x, phi.comps[x][e], v)
                                })
                                .collect()
                        })
                        .collect())
                } else {
                    let mut inner_maps: Vec<Option<Arc<PresheafMorphism>>> = vec![None; c.inner.len()];
                    for (x, v) in c.inner.iter().enumerate() {
                        if v.is_some() {
                            let mut a = args.to_vec();
                            a[j] = Arg::Obj(x);
                            inner_maps[x] = Some(self.eval_mor(g, &a, k, mor)?);
                        }
                    }
                    Ok(y.objects()
                        .map(|z| {
                            (0..c.per_z[z].size)
                                .map(|cl| {
                                    let (x, e, v) = c.rep(z, cl);
                                    let psi = inner_maps[x].as_ref().expect("inner value present");
                                    c2.class(z, x, e, psi.comps[z][v])
                                })
                                .collect()
                        })
                        .collect())
                }
            }
            Body::Compose(g, i, h) => {
                let (i, m) = (*i, h.arity());
                let (g_args, h_args) = self.split_compose(i, h, args)?;
                if k >= i && k < i + m {
                    let phi = self.eval_mor(h, &h_args, k - i, mor)?;
                    Ok(self.eval_mor(g, &g_args, i, &MorArg::Nat(phi))?.comps.clone())
                } else {
                    let k2 = if k < i { k } else { k + 1 - m };
                    Ok(self.eval_mor(g, &g_args, k2, mor)?.comps.clone())
                }
            }
            Body::Reindex(g, i, func) => {
                let (i, a) = (*i, func.arity());
                let c: Vec<usize> = args[i..i + a].iter().map(obj).collect();
                let mut g_args = args[..i].to_vec();
                g_args.push(Arg::Obj(func.obj_at(&c)));
                g_args.extend_from_slice(&args[i + a..]);
                if k >= i && k < i + a {
                    let xm = func.mor_at(k - i, mor_of(mor), &c);
                    Ok(self.eval_mor(g, &g_args, i, &MorArg::Mor(xm))?.comps.clone())
                } else {
                    let k2 = if k < i { k } else { k + 1 - a };
                    Ok(self.eval_mor(g, &g_args, k2, mor)?.comps.clone())
                }
            }
            Body::PlugObject(g, i, a) => {
                let mut g_args = args.to_vec();
                g_args.insert(*i, Arg::Obj(*a));
                let k2 = if k < *i { k } else { k + 1 };
                Ok(self.eval_mor(g, &g_args, k2, mor)?.comps.clone())
            }
        }
    }
}

pub(crate) fn obj(a: &Arg) -> usize {
    match a {
        Arg::Obj(x) => *x,
        Arg::Psh(_) => panic!("object argument expected"),
    }
}

pub(crate) fn psh(a: &Arg) -> &Arc<Presheaf> {
    match a {
        Arg::Psh(p) => p,
        Arg::Obj(_) => panic!("presheaf argument expected"),
    }
}

fn mor_of(m: &MorArg) -> usize {
    match m {
        MorArg::Mor(k) => *k,
        MorArg::Nat(_) => panic!("morphism argument expected"),
    }
}

/// The presheaf carried by a coend: classes at each `z`, acting through representatives.
fn coend_presheaf(
    els: &Elements,
    inner: &[Option<Arc<Presheaf>>],
    per_z: &[Colimit],
    y: &Arc<crate::fincat::FinCategory>,
) -> Arc<Presheaf> {
    let sets = per_z.iter().map(|col| FinSet::anonymous(col.size)).collect();
    let act = y
        .morphisms()
        .map(|u| {
            let (zs, zt) = (y.src(u), y.tgt(u));
            (0..per_z[zt].size)
                .map(|cl| {
                    let (idx, v) = per_z[zt].reps[cl];
                    let x = els.objects[idx].0;
                    let inner = inner[x].as_ref().expect("inner value present");
                    per_z[zs].class_of[idx][inner.act(u)[v]]
                })
                .collect()
        })
        .collect();
    Arc::new(Presheaf::from_raw(y.clone(), sets, act))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCategory;
    use crate::multimap::{MultiFunctor, MultiProfunctor};

    fn diamond() -> Arc<FinCategory> {
        // two parallel arrows a ⇉ b, then b → c
        Arc::new(FinCategory::free(&["a", "b", "c"], &[(0, 1), (0, 1), (1, 2)]))
    }

    fn ys(x: &Arc<FinCategory>) -> Vec<Arc<Presheaf>> {
        x.objects().map(|a| Arc::new(representable(x, a).unwrap())).collect()
    }

    #[test]
    fn strengthened_unit_collapses_on_representables() {
        let x = diamond();
        let ev = Evaluator::default();
        let it = MultiMap::unit(&x).strengthen(0).unwrap();
        for y in ys(&x) {
            let v = ev.eval(&it, &[Arg::Psh(y.clone())]).unwrap();
            assert_eq!(v.sizes(), y.sizes());
            assert!(v.validate().is_ok());
        }
        let empty = Arc::new(Presheaf::empty(&x));
        assert_eq!(ev.eval(&it, &[Arg::Psh(empty)]).unwrap().total_size(), 0);
        assert!(ev.stats().merges > 0);
    }

    #[test]
    fn strengthened_table_at_representable_matches_table() {
        let x = diamond();
        let pair = Arc::new(MultiFunctor::tupling("p", vec![x.clone(), x.clone()]));
        let f = MultiMap::table("f", Arc::new(MultiProfunctor::yoneda_along(&pair)));
        let ft = f.strengthen(1).unwrap();
        let ev = Evaluator::default();
        let yx = ys(&x);
        for a in x.objects() {
            for b in x.objects() {
                let direct = ev.eval(&f, &[Arg::Obj(a), Arg::Obj(b)]).unwrap();
                let via = ev.eval(&ft, &[Arg::Obj(a), Arg::Psh(yx[b].clone())]).unwrap();
                assert_eq!(direct.sizes(), via.sizes());
            }
        }
    }

    #[test]
    fn morphism_evaluation_is_functorial() {
        let x = diamond();
        let pair = Arc::new(MultiFunctor::tupling("p", vec![x.clone(), x.clone()]));
        let f = MultiMap::table("f", Arc::new(MultiProfunctor::yoneda_along(&pair)));
        let ft = f.strengthen(0).unwrap();
        let ev = Evaluator::default();
        let p = Arc::new(crate::presheaf::coproduct(&ys(&x)[1], &ys(&x)[2]).unwrap());
        for m in x.morphisms() {
            let arg = vec![Arg::Psh(p.clone()), Arg::Obj(x.src(m))];
            let fm = ev.eval_mor(&ft, &arg, 1, &MorArg::Mor(m)).unwrap();
            assert!(fm.validate().is_ok());
            if x.is_identity(m) {
                assert_eq!(fm.comps, PresheafMorphism::identity(&fm.src).comps);
            }
            for n in x.morphisms().filter(|&n| x.src(n) == x.tgt(m)) {
                let arg2 = vec![Arg::Psh(p.clone()), Arg::Obj(x.tgt(m))];
                let fnm = ev.eval_mor(&ft, &arg2, 1, &MorArg::Mor(n)).unwrap();
                let direct = ev.eval_mor(&ft, &arg, 1, &MorArg::Mor(x.compose(n, m))).unwrap();
                assert_eq!(fm.then(&fnm).comps, direct.comps);
            }
        }
    }

    #[test]
    fn evaluation_is_deterministic_across_evaluators() {
        let x = diamond();
        let it = MultiMap::unit(&x).strengthen(0).unwrap();
        let p = Arc::new(crate::presheaf::coproduct(&ys(&x)[0], &ys(&x)[2]).unwrap());
        let a = Evaluator::default().eval(&it, &[Arg::Psh(p.clone())]).unwrap();
        let b = Evaluator::default().eval(&it, &[Arg::Psh(p)]).unwrap();
        assert!(a.same_tables(&b));
    }

    #[test]
    fn budget_is_enforced() {
        let x = diamond();
        let it = MultiMap::unit(&x).strengthen(0).unwrap();
        let ev = Evaluator::new(2);
        let err = ev.eval(&it, &[Arg::Psh(ys(&x)[2].clone())]).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }
}
