//! 2-cells between parallel multimaps as expression trees, evaluated into
//! components: one presheaf morphism per argument tuple.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::mixed_index;
use crate::presheaf::{element_map, representable, Presheaf, PresheafMorphism};

use super::eval::{obj, psh};
use super::{describe_args, fresh_id, Arg, Body, MorArg, MultiFunctor, MultiMap, SlotType, Evaluator};

/// A deliberate defect applied to the components of a cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Swap the images of elements 0 and 1 at the first codomain object with at least two elements.
    SwapImages,
    /// As `SwapImages`, but only at the given tuple of objects of the finite slots.
    SwapImagesAt(Vec<usize>),
    /// Replace every component by the index identity, clamped into the target.
    IndexIdentity,
}

/// Explicit components of a cell between all-finite maps, indexed by object
/// tuple (in slot order), then codomain object, then element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellTable {
    pub dims: Vec<usize>,
    pub comps: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug)]
pub enum CellBody {
    Identity,
    /// Vertical composite, applied left to right.
    Vert(Vec<TwoCell>),
    /// `f ∘ᵢ α`.
    PostWhisker(MultiMap, usize, TwoCell),
    /// `α ∘ᵢ g`.
    PreWhisker(TwoCell, usize, MultiMap),
    /// `α ∘ᵢ JF` for a functor into a finite slot.
    Reindexed(TwoCell, usize, Arc<MultiFunctor>),
    /// `α^{t_j}`.
    Strengthen(TwoCell, usize),
    /// `t̃_f : f → f^{t_j} ∘ⱼ i`.
    UnitTilde(MultiMap, usize),
    /// `σ_h : (h ∘ⱼ i)^{t_j} → h`.
    Counit(MultiMap, usize),
    /// A comparison between maps whose evaluations coincide as tables.
    Canonical,
    Inverse(TwoCell),
    Table(Arc<CellTable>),
    Mutated(TwoCell, Mutation),
}

#[derive(Debug)]
pub struct CellNode {
    id: u64,
    name: String,
    src: MultiMap,
    dst: MultiMap,
    body: CellBody,
}

/// A 2-cell; cheap to clone.
#[derive(Clone, Debug)]
pub struct TwoCell(Arc<CellNode>);

impl fmt::Display for TwoCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

fn parallel(f: &MultiMap, g: &MultiMap) -> bool {
    f.slots() == g.slots() && super::same_cat(f.codomain(), g.codomain())
}

fn wrap(name: &str) -> String {
    if name.contains(' ') {
        format!("({name})")
    } else {
        name.to_string()
    }
}

impl TwoCell {
    fn make(name: String, src: MultiMap, dst: MultiMap, body: CellBody) -> TwoCell {
        TwoCell(Arc::new(CellNode { id: fresh_id(), name, src, dst, body }))
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn src(&self) -> &MultiMap {
        &self.0.src
    }

    pub fn dst(&self) -> &MultiMap {
        &self.0.dst
    }

    pub fn body(&self) -> &CellBody {
        &self.0.body
    }

    /// The same cell under another display name.
    pub fn named(&self, name: &str) -> TwoCell {
        TwoCell(Arc::new(CellNode {
            id: self.0.id,
            name: name.to_string(),
            src: self.0.src.clone(),
            dst: self.0.dst.clone(),
            body: self.0.body.clone(),
        }))
    }

    pub fn identity(f: &MultiMap) -> TwoCell {
        TwoCell::make(format!("1_{}", wrap(f.name())), f.clone(), f.clone(), CellBody::Identity)
    }

    pub fn vert(cells: &[TwoCell]) -> Result<TwoCell> {
        let first = cells.first().ok_or_else(|| Error::Invalid("empty vertical composite".into()))?;
        for w in cells.windows(2) {
            if w[0].dst() != w[1].src() {
                return Err(Error::SlotMismatch(format!("cannot compose {} with {}: {} ≠ {}", w[0], w[1], w[0].dst(), w[1].src())));
            }
        }
        if cells.len() == 1 {
            return Ok(first.clone());
        }
        let last = cells.last().expect("nonempty");
        let name = cells.iter().map(|c| wrap(c.name())).collect::<Vec<_>>().join(" ; ");
        Ok(TwoCell::make(name, first.src().clone(), last.dst().clone(), CellBody::Vert(cells.to_vec())))
    }

    /// `then` after `self`.
    pub fn then(&self, next: &TwoCell) -> Result<TwoCell> {
        TwoCell::vert(&[self.clone(), next.clone()])
    }

    pub fn post_whisker(f: &MultiMap, i: usize, alpha: &TwoCell) -> Result<TwoCell> {
        let src = f.compose(i, alpha.src())?;
        let dst = f.compose(i, alpha.dst())?;
        let name = format!("{} ∘{} {}", wrap(f.name()), i + 1, wrap(alpha.name()));
        Ok(TwoCell::make(name, src, dst, CellBody::PostWhisker(f.clone(), i, alpha.clone())))
    }

    pub fn pre_whisker(alpha: &TwoCell, i: usize, g: &MultiMap) -> Result<TwoCell> {
        let src = alpha.src().compose(i, g)?;
        let dst = alpha.dst().compose(i, g)?;
        let name = format!("{} ∘{} {}", wrap(alpha.name()), i + 1, wrap(g.name()));
        Ok(TwoCell::make(name, src, dst, CellBody::PreWhisker(alpha.clone(), i, g.clone())))
    }

    pub fn reindexed(alpha: &TwoCell, i: usize, func: &Arc<MultiFunctor>) -> Result<TwoCell> {
        let src = alpha.src().reindex(i, func)?;
        let dst = alpha.dst().reindex(i, func)?;
        let name = format!("{} ∘{} J{}", wrap(alpha.name()), i + 1, func.name());
        Ok(TwoCell::make(name, src, dst, CellBody::Reindexed(alpha.clone(), i, func.clone())))
    }

    pub fn strengthen(alpha: &TwoCell, j: usize) -> Result<TwoCell> {
        let src = alpha.src().strengthen(j)?;
        let dst = alpha.dst().strengthen(j)?;
        let name = format!("{}^t{}", wrap(alpha.name()), j + 1);
        Ok(TwoCell::make(name, src, dst, CellBody::Strengthen(alpha.clone(), j)))
    }

    pub fn strengthen_all(alpha: &TwoCell, order: &[usize]) -> Result<TwoCell> {
        order.iter().try_fold(alpha.clone(), |a, &j| TwoCell::strengthen(&a, j))
    }

    pub fn unit_tilde(f: &MultiMap, j: usize) -> Result<TwoCell> {
        let x = match f.slots().get(j) {
            Some(SlotType::Fin(x)) => x.clone(),
            _ => return Err(Error::SlotMismatch(format!("slot {} of {} is not finite", j + 1, f))),
        };
        let dst = f.strengthen(j)?.compose(j, &MultiMap::unit(&x))?;
        Ok(TwoCell::make(format!("t̃{}[{}]", j + 1, f.name()), f.clone(), dst, CellBody::UnitTilde(f.clone(), j)))
    }

    pub fn counit(h: &MultiMap, j: usize) -> Result<TwoCell> {
        let x = match h.slots().get(j) {
            Some(SlotType::Psh(x)) => x.clone(),
            _ => return Err(Error::SlotMismatch(format!("slot {} of {} is not a presheaf slot", j + 1, h))),
        };
        let src = h.compose(j, &MultiMap::unit(&x))?.strengthen(j)?;
        Ok(TwoCell::make(format!("σ{}[{}]", j + 1, h.name()), src, h.clone(), CellBody::Counit(h.clone(), j)))
    }

    pub fn canonical(src: &MultiMap, dst: &MultiMap) -> Result<TwoCell> {
        if !parallel(src, dst) {
            return Err(Error::SlotMismatch(format!("{src} and {dst} are not parallel")));
        }
        Ok(TwoCell::make("∼".into(), src.clone(), dst.clone(), CellBody::Canonical))
    }

    pub fn inverse(alpha: &TwoCell) -> TwoCell {
        TwoCell::make(format!("{}⁻¹", wrap(alpha.name())), alpha.dst().clone(), alpha.src().clone(), CellBody::Inverse(alpha.clone()))
    }

    pub fn table(name: &str, src: &MultiMap, dst: &MultiMap, table: CellTable) -> Result<TwoCell> {
        if !parallel(src, dst) || !src.is_all_fin() {
            return Err(Error::SlotMismatch(format!("a table cell needs parallel finite maps, got {src} and {dst}")));
        }
        let dims: Vec<usize> = src.slots().iter().map(|s| s.category().num_objects()).collect();
        if dims != table.dims || table.comps.len() != dims.iter().product::<usize>() {
            return Err(Error::Structure(format!("cell table {name} has the wrong shape")));
        }
        Ok(TwoCell::make(name.into(), src.clone(), dst.clone(), CellBody::Table(Arc::new(table))))
    }

    pub fn mutated(alpha: &TwoCell, m: Mutation) -> TwoCell {
        TwoCell::make(format!("{}†", wrap(alpha.name())), alpha.src().clone(), alpha.dst().clone(), CellBody::Mutated(alpha.clone(), m))
    }
}

impl Evaluator {
    /// The component `α(args) : src(args) → dst(args)`.
    pub fn component(&self, alpha: &TwoCell, args: &[Arg]) -> Result<Arc<PresheafMorphism>> {
        alpha.src().check_args(args)?;
        let key = (alpha.id(), self.keys(args));
        if let Some(v) = self.cells.borrow().get(&key) {
            return Ok(v.clone());
        }
        let src = self.eval(alpha.src(), args)?;
        let dst = self.eval(alpha.dst(), args)?;
        let comps = self.component_comps(alpha, args)?;
        let v = Arc::new(PresheafMorphism { src, dst, comps });
        self.cells.borrow_mut().insert(key, v.clone());
        Ok(v)
    }

    fn component_comps(&self, alpha: &TwoCell, args: &[Arg]) -> Result<Vec<Vec<usize>>> {
        let y = alpha.src().codomain().clone();
        match alpha.body() {
            CellBody::Identity => Ok(identity_comps(&*self.eval(alpha.src(), args)?)),
            CellBody::Vert(cells) => {
                let mut acc = (*self.component(&cells[0], args)?).clone();
                for c in &cells[1..] {
                    acc = acc.then(&*self.component(c, args)?);
                }
                Ok(acc.comps)
            }
            CellBody::PostWhisker(f, i, inner) => {
                let m = inner.src().arity();
                let phi = self.component(inner, &args[*i..*i + m])?;
                let mut f_args = args[..*i].to_vec();
                f_args.push(Arg::Psh(phi.src.clone()));
                f_args.extend_from_slice(&args[*i + m..]);
                Ok(self.eval_mor(f, &f_args, *i, &MorArg::Nat(phi))?.comps.clone())
            }
            CellBody::PreWhisker(inner, i, g) => {
                let m = g.arity();
                let q = self.eval(g, &args[*i..*i + m])?;
                let mut f_args = args[..*i].to_vec();
                f_args.push(Arg::Psh(q));
                f_args.extend_from_slice(&args[*i + m..]);
                Ok(self.component(inner, &f_args)?.comps.clone())
            }
            CellBody::Reindexed(inner, i, func) => {
                let a = func.arity();
                let c: Vec<usize> = args[*i..*i + a].iter().map(obj).collect();
                let mut f_args = args[..*i].to_vec();
                f_args.push(Arg::Obj(func.obj_at(&c)));
                f_args.extend_from_slice(&args[*i + a..]);
                Ok(self.component(inner, &f_args)?.comps.clone())
            }
            CellBody::Strengthen(inner, j) => {
                let c = self.coend(alpha.src(), args)?;
                let c2 = self.coend(alpha.dst(), args)?;
                let mut parts: Vec<Option<Arc<PresheafMorphism>>> = vec![None; c.inner.len()];
                for (x, v) in c.inner.iter().enumerate() {
                    if v.is_some() {
                        let mut a = args.to_vec();
                        a[*j] = Arg::Obj(x);
                        parts[x] = Some(self.component(inner, &a)?);
                    }
                }
                Ok(y.objects()
                    .map(|z| {
                        (0..c.per_z[z].size)
                            .map(|cl| {
                                let (x, e, v) = c.rep(z, cl);
                                let a = parts[x].as_ref().expect("component present");
                                c2.class(z, x, e, a.comps[z][v])
                            })
                            .collect()
                    })
                    .collect())
            }
            CellBody::UnitTilde(f, j) => {
                let x_cat = f.slots()[*j].category().clone();
                let x = obj(&args[*j]);
                let yx = self.intern(Arc::new(representable(&x_cat, x)?)).0;
                let ft = match alpha.dst().body() {
                    Body::Compose(ft, _, _) => ft.clone(),
                    _ => unreachable!("unit cell targets a composite"),
                };
                let mut a = args.to_vec();
                a[*j] = Arg::Psh(yx);
                let c = self.coend(&ft, &a)?;
                let id_pos = x_cat.hom(x, x).iter().position(|&k| k == x_cat.id(x)).expect("identity in hom");
                let fx = self.eval(f, args)?;
                Ok(y.objects().map(|z| (0..fx.size(z)).map(|v| c.class(z, x, id_pos, v)).collect()).collect())
            }
            CellBody::Counit(h, j) => {
                let x_cat = h.slots()[*j].category().clone();
                let p = psh(&args[*j]).clone();
                let c = self.coend(alpha.src(), args)?;
                let mut out: Vec<Vec<Option<usize>>> = y.objects().map(|z| vec![None; c.per_z[z].size]).collect();
                for &(x, e) in &c.elements.objects {
                    let yx = self.intern(Arc::new(representable(&x_cat, x)?)).0;
                    let ebar = Arc::new(element_map(&yx, &p, x, e));
                    let mut a = args.to_vec();
                    a[*j] = Arg::Psh(yx);
                    let hm = self.eval_mor(h, &a, *j, &MorArg::Nat(ebar))?;
                    for z in y.objects() {
                        for (v, &w) in hm.comps[z].iter().enumerate() {
                            let cl = c.class(z, x, e, v);
                            match out[z][cl] {
                                None => out[z][cl] = Some(w),
                                Some(w0) if w0 == w => {}
                                Some(_) => {
                                    return Err(Error::Invalid(format!(
                                        "counit {} is not well defined on a class at {}",
                                        alpha,
                                        y.obj_name(z)
                                    )))
                                }
                            }
                        }
                    }
                }
                Ok(out.into_iter().map(|row| row.into_iter().map(|w| w.expect("every class has a member")).collect()).collect())
            }
            CellBody::Canonical => {
                let s = self.eval(alpha.src(), args)?;
                let d = self.eval(alpha.dst(), args)?;
                if Arc::ptr_eq(&s, &d) || *s == *d {
                    Ok(identity_comps(&s))
                } else {
                    Err(Error::NotCanonical {
                        src: alpha.src().to_string(),
                        dst: alpha.dst().to_string(),
                        at: format!("{}, {}", describe_args(alpha.src().slots(), args, &[]), first_difference(&s, &d)),
                    })
                }
            }
            CellBody::Inverse(inner) => {
                let phi = self.component(inner, args)?;
                match phi.inverse() {
                    Some(inv) => Ok(inv.comps),
                    None => Err(Error::NotInvertible {
                        cell: inner.to_string(),
                        at: describe_args(inner.src().slots(), args, &[]),
                    }),
                }
            }
            CellBody::Table(t) => {
                let b: Vec<usize> = args.iter().map(obj).collect();
                Ok(t.comps[mixed_index(&b, t.dims.iter().copied())].clone())
            }
            CellBody::Mutated(inner, m) => {
                let mut comps = self.component(inner, args)?.comps.clone();
                match m {
                    Mutation::SwapImages => swap_first(&mut comps),
                    Mutation::SwapImagesAt(t) => {
                        let here = args.iter().zip(alpha.src().slots()).filter(|(_, s)| s.is_fin()).map(|(a, _)| obj(a));
                        if here.eq(t.iter().copied()) {
                            swap_first(&mut comps);
                        }
                    }
                    Mutation::IndexIdentity => {
                        let d = self.eval(alpha.dst(), args)?;
                        for (z, row) in comps.iter_mut().enumerate() {
                            let n = d.size(z);
                            for (c, v) in row.iter_mut().enumerate() {
                                *v = c.min(n.saturating_sub(1));
                            }
                        }
                    }
                }
                Ok(comps)
            }
        }
    }
}

fn identity_comps(p: &crate::presheaf::Presheaf) -> Vec<Vec<usize>> {
    p.base().objects().map(|x| (0..p.size(x)).collect()).collect()
}

fn swap_first(comps: &mut [Vec<usize>]) {
    if let Some(row) = comps.iter_mut().find(|r| r.len() >= 2) {
        row.swap(0, 1);
    }
}

/// Where two presheaves on the same category first differ.
fn first_difference(p: &Presheaf, q: &Presheaf) -> String {
    let c = p.base();
    for x in c.objects() {
        if p.size(x) != q.size(x) {
            return format!("object {} has {} vs {} elements", c.obj_name(x), p.size(x), q.size(x));
        }
    }
    for m in c.morphisms() {
        if let Some(e) = (0..p.size(c.tgt(m))).find(|&e| p.act(m)[e] != q.act(m)[e]) {
            return format!("object {} element {}: {} sends it to {} vs {}", c.obj_name(c.tgt(m)), e, c.mor_name(m), p.act(m)[e], q.act(m)[e]);
        }
    }
    "element labels differ".into()
}


