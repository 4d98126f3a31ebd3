//! Finite multi-profunctors `Y^op × B₁ × … × Bₙ → FinSet` and functors of
//! several variables between finite categories.
//!
//! Both are stored per variable: an action table for each coordinate and each
//! morphism of that coordinate, indexed by the remaining coordinates. Joint
//! functoriality is the per-coordinate laws plus interchange between
//! coordinates, so the product category is never materialised.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{mixed_index, tuples, FinCategory, FunctorTable};
use crate::presheaf::{parse_label_set, FinSet, Presheaf, PresheafMorphism};


fn others_index(t: &[usize], k: usize, dims: &[usize]) -> usize {
    t.iter().zip(dims).enumerate().filter(|&(i, _)| i != k).fold(0, |acc, (_, (&x, &n))| acc * n + x)
}

fn without(dims: &[usize], k: usize) -> Vec<usize> {
    dims.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &n)| n).collect()
}

fn with_coord(others: &[usize], k: usize, v: usize) -> Vec<usize> {
    let mut t = others.to_vec();
    t.insert(k, v);
    t
}

/// Coordinate 0 is the contravariant codomain variable, coordinate `i + 1` the
/// covariant slot `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiProfunctor {
    codomain: Arc<FinCategory>,
    slots: Vec<Arc<FinCategory>>,
    dims: Vec<usize>,
    values: Vec<usize>,
    /// `act[k][m][others]`: the function from the value at the tuple whose
    /// coordinate `k` is the "from" end of `m` to the value at its other end.
    act: Vec<Vec<Vec<Vec<usize>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfunctorViolation {
    pub law: &'static str,
    pub tuple: Vec<usize>,
    pub detail: String,
}

impl std::fmt::Display for ProfunctorViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} fails at tuple {:?}: {}", self.law, self.tuple, self.detail)
    }
}

impl MultiProfunctor {
    pub fn codomain(&self) -> &Arc<FinCategory> {
        &self.codomain
    }

    pub fn slots(&self) -> &[Arc<FinCategory>] {
        &self.slots
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn coordinate(&self, k: usize) -> &Arc<FinCategory> {
        if k == 0 {
            &self.codomain
        } else {
            &self.slots[k - 1]
        }
    }

    /// Ends of `m` in coordinate `k` as (from, to).
    pub fn ends(&self, k: usize, m: usize) -> (usize, usize) {
        let c = self.coordinate(k);
        if k == 0 {
            (c.tgt(m), c.src(m))
        } else {
            (c.src(m), c.tgt(m))
        }
    }

    /// Builds the tables from functions; `action(k, m, t)` is called with
    /// `t[k]` the "from" end of `m` and must return the image of each element.
    pub fn from_fn(
        codomain: Arc<FinCategory>,
        slots: Vec<Arc<FinCategory>>,
        value: impl Fn(&[usize]) -> usize,
        mut action: impl FnMut(usize, usize, &[usize]) -> Vec<usize>,
    ) -> Result<MultiProfunctor> {
        let mut dims = vec![codomain.num_objects()];
        dims.extend(slots.iter().map(|c| c.num_objects()));
        let values: Vec<usize> = tuples(&dims).iter().map(|t| value(t)).collect();
        let mut p = MultiProfunctor { codomain, slots, dims, values, act: Vec::new() };
        let mut act = Vec::with_capacity(p.dims.len());
        for k in 0..p.dims.len() {
            let others = tuples(&without(&p.dims, k));
            let c = p.coordinate(k).clone();
            let mut per_m = Vec::with_capacity(c.num_morphisms());
            for m in c.morphisms() {
                let (from, to) = p.ends(k, m);
                let mut rows = Vec::with_capacity(others.len());
                for o in &others {
                    let t = with_coord(o, k, from);
                    let row = action(k, m, &t);
                    let dst = p.value(&with_coord(o, k, to));
                    if row.len() != p.value(&t) || row.iter().any(|&v| v >= dst) {
                        return Err(Error::Structure(format!(
                            "action of {} in coordinate {} at {:?} has the wrong shape",
                            c.mor_name(m),
                            k,
                            t
                        )));
                    }
                    rows.push(row);
                }
                per_m.push(rows);
            }
            act.push(per_m);
        }
        p.act = act;
        Ok(p)
    }

    /// The table of `y ∘ F`: `(z; b) ↦ hom(z, F(b))`.
    pub fn yoneda_along(func: &MultiFunctor) -> MultiProfunctor {
        let y = func.codomain().clone();
        let pos = |s: usize, t: usize, h: usize| y.hom(s, t).iter().position(|&k| k == h).expect("composite in hom");
        MultiProfunctor::from_fn(
            y.clone(),
            func.slots().to_vec(),
            |t| y.hom(t[0], func.obj_at(&t[1..])).len(),
            |k, m, t| {
                let fb = func.obj_at(&t[1..]);
                let hs = y.hom(t[0], fb);
                if k == 0 {
                    hs.iter().map(|&h| pos(y.src(m), fb, y.compose(h, m))).collect()
                } else {
                    let fm = func.mor_at(k - 1, m, &t[1..]);
                    hs.iter().map(|&h| pos(t[0], y.tgt(fm), y.compose(fm, h))).collect()
                }
            },
        )
        .expect("shapes follow from the functor")
    }

    pub fn value(&self, t: &[usize]) -> usize {
        self.values[mixed_index(t, self.dims.iter().copied())]
    }

    /// The action of `m` in coordinate `k` at a tuple whose coordinate `k` is the "from" end.
    pub fn act(&self, k: usize, m: usize, t: &[usize]) -> &[usize] {
        &self.act[k][m][others_index(t, k, &self.dims)]
    }

    pub(crate) fn act_mut(&mut self, k: usize, m: usize, t: &[usize]) -> &mut Vec<usize> {
        let o = others_index(t, k, &self.dims);
        &mut self.act[k][m][o]
    }

    pub fn total_size(&self) -> usize {
        self.values.iter().sum()
    }

    /// The presheaf on the codomain obtained by fixing the slot objects.
    pub fn presheaf_at(&self, b: &[usize]) -> Presheaf {
        let y = &self.codomain;
        let mut t = vec![0];
        t.extend_from_slice(b);
        let sets = y
            .objects()
            .map(|z| {
                t[0] = z;
                FinSet::anonymous(self.value(&t))
            })
            .collect();
        let act = y
            .morphisms()
            .map(|u| {
                t[0] = y.tgt(u);
                self.act(0, u, &t).to_vec()
            })
            .collect();
        Presheaf::from_raw(y.clone(), sets, act)
    }

    /// The morphism of presheaves induced by `m` in slot `i` at slot objects `b`.
    pub fn slot_morphism(&self, i: usize, m: usize, b: &[usize], src: Arc<Presheaf>, dst: Arc<Presheaf>) -> PresheafMorphism {
        let mut t = vec![0];
        t.extend_from_slice(b);
        let comps = self
            .codomain
            .objects()
            .map(|z| {
                t[0] = z;
                self.act(i + 1, m, &t).to_vec()
            })
            .collect();
        PresheafMorphism { src, dst, comps }
    }

    /// Exhaustive check of identities, composition in each coordinate and
    /// interchange between coordinates.
    pub fn validate(&self) -> std::result::Result<(), ProfunctorViolation> {
        let all = tuples(&self.dims);
        for k in 0..self.dims.len() {
            let c = self.coordinate(k).clone();
            for t in &all {
                let id = c.id(t[k]);
                let row = self.act(k, id, t);
                if let Some(e) = row.iter().enumerate().position(|(e, &v)| e != v) {
                    return Err(ProfunctorViolation {
                        law: "identity",
                        tuple: t.clone(),
                        detail: format!("{} moves element {}", c.mor_name(id), e),
                    });
                }
            }
            // composition: acting by m then n equals acting by the composite
            for m in c.morphisms() {
                for n in c.morphisms() {
                    let (comp, first, second) = if k == 0 {
                        // contravariant: from tgt(m) to src(m), then along n with tgt(n) = src(m)
                        if c.tgt(n) != c.src(m) {
                            continue;
                        }
                        (c.compose(m, n), m, n)
                    } else {
                        if c.src(n) != c.tgt(m) {
                            continue;
                        }
                        (c.compose(n, m), m, n)
                    };
                    if c.is_identity(first) || c.is_identity(second) {
                        continue;
                    }
                    let (from, mid) = self.ends(k, first);
                    for o in tuples(&without(&self.dims, k)) {
                        let t = with_coord(&o, k, from);
                        let tm = with_coord(&o, k, mid);
                        let a = self.act(k, first, &t);
                        let b = self.act(k, second, &tm);
                        let direct = self.act(k, comp, &t);
                        if let Some(e) = (0..a.len()).find(|&e| b[a[e]] != direct[e]) {
                            return Err(ProfunctorViolation {
                                law: if k == 0 { "contravariance" } else { "covariance" },
                                tuple: t,
                                detail: format!(
                                    "{} then {} differs from {} on element {}",
                                    c.mor_name(first),
                                    c.mor_name(second),
                                    c.mor_name(comp),
                                    e
                                ),
                            });
                        }
                    }
                }
            }
        }
        for k in 0..self.dims.len() {
            for l in k + 1..self.dims.len() {
                let (ck, cl) = (self.coordinate(k).clone(), self.coordinate(l).clone());
                for m in ck.morphisms().filter(|&m| !ck.is_identity(m)) {
                    for n in cl.morphisms().filter(|&n| !cl.is_identity(n)) {
                        let (fk, tk) = self.ends(k, m);
                        let (fl, tl) = self.ends(l, n);
                        for t in all.iter().filter(|t| t[k] == fk && t[l] == fl) {
                            let mut a = t.clone();
                            a[k] = tk;
                            let mut b = t.clone();
                            b[l] = tl;
                            let (m1, n2) = (self.act(k, m, t), self.act(l, n, &a));
                            let (n1, m2) = (self.act(l, n, t), self.act(k, m, &b));
                            if let Some(e) = (0..m1.len()).find(|&e| n2[m1[e]] != m2[n1[e]]) {
                                return Err(ProfunctorViolation {
                                    law: "interchange",
                                    tuple: t.clone(),
                                    detail: format!("{} and {} do not commute on element {}", ck.mor_name(m), cl.mor_name(n), e),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn write_profunctor_body(p: &MultiProfunctor, slot_names: &[String]) -> String {
    let mut out = String::new();
    let name_tuple = |t: &[usize]| -> String {
        let y = p.codomain.obj_name(t[0]);
        let bs: Vec<&str> = t[1..].iter().enumerate().map(|(i, &b)| p.slots[i].obj_name(b)).collect();
        format!("({}; {})", y, bs.join(","))
    };
    for t in tuples(&p.dims) {
        let labels: Vec<String> = (0..p.value(&t)).map(|e| e.to_string()).collect();
        out.push_str(&format!("at {} = {{{}}}\n", name_tuple(&t), labels.join(",")));
    }
    for k in 0..p.dims.len() {
        let c = p.coordinate(k).clone();
        let coord = if k == 0 { "y".to_string() } else { slot_names.get(k - 1).cloned().unwrap_or_else(|| k.to_string()) };
        for m in c.morphisms().filter(|&m| !c.is_identity(m)) {
            let (from, _) = p.ends(k, m);
            for o in tuples(&without(&p.dims, k)) {
                let t = with_coord(&o, k, from);
                for (e, &v) in p.act(k, m, &t).iter().enumerate() {
                    out.push_str(&format!("act {} {} {} : {} -> {}\n", coord, c.mor_name(m), name_tuple(&t), e, v));
                }
            }
        }
    }
    out
}

fn parse_tuple(s: &str, p_cats: &[&FinCategory], line: usize) -> Result<Vec<usize>> {
    let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')'));
    let inner = inner.ok_or(Error::Parse { line, msg: "expected (<y>; <b1>,...)".into() })?;
    let (y, rest) = inner.split_once(';').ok_or(Error::Parse { line, msg: "expected `;` in tuple".into() })?;
    let mut names = vec![y.trim().to_string()];
    if !rest.trim().is_empty() {
        names.extend(rest.split(',').map(|s| s.trim().to_string()));
    }
    if names.len() != p_cats.len() {
        return Err(Error::Parse { line, msg: format!("tuple has {} entries, expected {}", names.len(), p_cats.len()) });
    }
    names
        .iter()
        .zip(p_cats)
        .map(|(n, c)| c.object_by_name(n).ok_or(Error::Parse { line, msg: format!("dangling object {n}") }))
        .collect()
}

/// Parses `at (<y>; <b1>,...) = {..}` and `act <coord> <mor> (<tuple>) : <l> -> <l>`
/// lines, where `<coord>` is `y` or a slot name.
pub fn parse_profunctor_body<'a>(
    codomain: &Arc<FinCategory>,
    slots: &[Arc<FinCategory>],
    slot_names: &[String],
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<MultiProfunctor> {
    let mut cats: Vec<&FinCategory> = vec![codomain];
    cats.extend(slots.iter().map(|c| &**c));
    let mut dims = vec![codomain.num_objects()];
    dims.extend(slots.iter().map(|c| c.num_objects()));
    let mut sets: HashMap<Vec<usize>, FinSet> = HashMap::new();
    let mut acts: HashMap<(usize, usize, Vec<usize>, usize), (usize, usize)> = HashMap::new();
    let mut pending = Vec::new();
    for (ln, raw) in lines {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("at ") {
            let (tup, set) = rest.rsplit_once('=').ok_or(Error::Parse { line: ln, msg: "expected `at (..) = {..}`".into() })?;
            let t = parse_tuple(tup, &cats, ln)?;
            let fs = FinSet::labeled(parse_label_set(set, ln)?).map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?;
            if sets.insert(t, fs).is_some() {
                return Err(Error::Parse { line: ln, msg: "duplicate value line".into() });
            }
        } else if let Some(rest) = line.strip_prefix("act ") {
            let open = rest.find('(').ok_or(Error::Parse { line: ln, msg: "expected tuple".into() })?;
            let close = rest.find(')').ok_or(Error::Parse { line: ln, msg: "expected tuple".into() })?;
            let head: Vec<&str> = rest[..open].split_whitespace().collect();
            let tail: Vec<&str> = rest[close + 1..].split_whitespace().collect();
            if head.len() != 2 || tail.len() != 4 || tail[0] != ":" || tail[2] != "->" {
                return Err(Error::Parse { line: ln, msg: "expected `act <coord> <mor> (<tuple>) : <l> -> <l>`".into() });
            }
            let k = if head[0] == "y" {
                0
            } else {
                1 + slot_names
                    .iter()
                    .position(|n| n == head[0])
                    .ok_or(Error::Parse { line: ln, msg: format!("unknown coordinate {}", head[0]) })?
            };
            let m = cats[k].morphism_by_name(head[1]).ok_or(Error::Parse { line: ln, msg: format!("dangling morphism {}", head[1]) })?;
            let t = parse_tuple(&rest[open..=close], &cats, ln)?;
            pending.push((ln, k, m, t, tail[1].to_string(), tail[3].to_string()));
        }
    }
    let all = tuples(&dims);
    for t in &all {
        if !sets.contains_key(t) {
            return Err(Error::Parse { line: 0, msg: format!("no value for tuple {t:?}") });
        }
    }
    for (ln, k, m, t, from, to) in pending {
        let c = cats[k];
        let (f_end, t_end) = if k == 0 { (c.tgt(m), c.src(m)) } else { (c.src(m), c.tgt(m)) };
        if t[k] != f_end {
            return Err(Error::Parse { line: ln, msg: "tuple does not sit at the source of the action".into() });
        }
        let mut t2 = t.clone();
        t2[k] = t_end;
        let e = sets[&t].position(&from).ok_or(Error::Parse { line: ln, msg: format!("dangling label {from}") })?;
        let v = sets[&t2].position(&to).ok_or(Error::Parse { line: ln, msg: format!("dangling label {to}") })?;
        if acts.insert((k, m, t, e), (v, ln)).is_some() {
            return Err(Error::Parse { line: ln, msg: "duplicate action line".into() });
        }
    }
    let mut missing = None;
    let p = MultiProfunctor::from_fn(
        codomain.clone(),
        slots.to_vec(),
        |t| sets[t].size(),
        |k, m, t| {
            let c = cats[k];
            (0..sets[t].size())
                .map(|e| match acts.get(&(k, m, t.to_vec(), e)) {
                    Some(&(v, _)) => v,
                    None if c.is_identity(m) => e,
                    None => {
                        missing.get_or_insert(format!("action of {} undefined at {:?} on {}", c.mor_name(m), t, e));
                        0
                    }
                })
                .collect()
        },
    )?;
    if let Some(msg) = missing {
        return Err(Error::Parse { line: 0, msg });
    }
    Ok(p)
}

/// A functor `C₁ × … × Cₘ → X`, stored per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiFunctor {
    name: String,
    slots: Vec<Arc<FinCategory>>,
    codomain: Arc<FinCategory>,
    dims: Vec<usize>,
    obj: Vec<usize>,
    /// `mor[k][m][others]`: image of `m` in variable `k` with the other variables fixed.
    mor: Vec<Vec<Vec<usize>>>,
}

impl MultiFunctor {
    pub fn from_fn(
        name: &str,
        slots: Vec<Arc<FinCategory>>,
        codomain: Arc<FinCategory>,
        obj: impl Fn(&[usize]) -> usize,
        mor: impl Fn(usize, usize, &[usize]) -> usize,
    ) -> Result<MultiFunctor> {
        let dims: Vec<usize> = slots.iter().map(|c| c.num_objects()).collect();
        let objs: Vec<usize> = tuples(&dims).iter().map(|t| obj(t)).collect();
        if objs.iter().any(|&x| x >= codomain.num_objects()) {
            return Err(Error::Structure(format!("functor {name} sends an object outside its codomain")));
        }
        let mut mors = Vec::with_capacity(slots.len());
        for (k, c) in slots.iter().enumerate() {
            let others = tuples(&without(&dims, k));
            let mut per_m = Vec::with_capacity(c.num_morphisms());
            for m in c.morphisms() {
                let rows: Vec<usize> = others.iter().map(|o| mor(k, m, &with_coord(o, k, c.src(m)))).collect();
                if rows.iter().any(|&x| x >= codomain.num_morphisms()) {
                    return Err(Error::Structure(format!("functor {name} sends a morphism outside its codomain")));
                }
                per_m.push(rows);
            }
            mors.push(per_m);
        }
        let f = MultiFunctor { name: name.to_string(), slots, codomain, dims, obj: objs, mor: mors };
        f.validate()?;
        Ok(f)
    }

    /// The functor `C₁ × … × Cₘ → C₁ × … × Cₘ` into the product category,
    /// regarded as a functor of `m` variables.
    pub fn tupling(name: &str, slots: Vec<Arc<FinCategory>>) -> MultiFunctor {
        let refs: Vec<&FinCategory> = slots.iter().map(|c| &**c).collect();
        let prod = Arc::new(crate::fincat::product_category(&refs));
        let obj_dims: Vec<usize> = slots.iter().map(|c| c.num_objects()).collect();
        let mor_dims: Vec<usize> = slots.iter().map(|c| c.num_morphisms()).collect();
        let cs = slots.clone();
        MultiFunctor::from_fn(
            name,
            slots,
            prod,
            |t| mixed_index(t, obj_dims.iter().copied()),
            |k, m, t| {
                let ms: Vec<usize> = t.iter().enumerate().map(|(l, &x)| if l == k { m } else { cs[l].id(x) }).collect();
                mixed_index(&ms, mor_dims.iter().copied())
            },
        )
        .expect("tupling is a functor")
    }

    pub fn identity(x: &Arc<FinCategory>) -> MultiFunctor {
        MultiFunctor::from_fn("1", vec![x.clone()], x.clone(), |t| t[0], |_, m, _| m).expect("identity is a functor")
    }

    /// `F ∘ᵢ G`: substitute `G` into variable `i` of `F`.
    pub fn compose(&self, i: usize, g: &MultiFunctor) -> Result<MultiFunctor> {
        match self.slots.get(i) {
            Some(c) if super::same_cat(c, g.codomain()) => {}
            _ => return Err(Error::SlotMismatch(format!("variable {} of {} does not accept {}", i + 1, self.name, g.name))),
        }
        let m = g.arity();
        let mut slots = self.slots[..i].to_vec();
        slots.extend(g.slots.iter().cloned());
        slots.extend(self.slots[i + 1..].iter().cloned());
        let outer = |t: &[usize]| -> Vec<usize> {
            let mut o = t[..i].to_vec();
            o.push(g.obj_at(&t[i..i + m]));
            o.extend_from_slice(&t[i + m..]);
            o
        };
        let name = format!("{}∘{}{}", self.name, i + 1, g.name);
        MultiFunctor::from_fn(&name, slots, self.codomain.clone(), |t| self.obj_at(&outer(t)), |k, mor, t| {
            let o = outer(t);
            if k < i {
                self.mor_at(k, mor, &o)
            } else if k < i + m {
                self.mor_at(i, g.mor_at(k - i, mor, &t[i..i + m]), &o)
            } else {
                self.mor_at(k + 1 - m, mor, &o)
            }
        })
    }

    pub fn from_functor(name: &str, f: &FunctorTable) -> Result<MultiFunctor> {
        f.validate()?;
        MultiFunctor::from_fn(name, vec![f.src.clone()], f.dst.clone(), |t| f.obj_map[t[0]], |_, m, _| f.mor_map[m])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn slots(&self) -> &[Arc<FinCategory>] {
        &self.slots
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn codomain(&self) -> &Arc<FinCategory> {
        &self.codomain
    }

    pub fn obj_at(&self, t: &[usize]) -> usize {
        self.obj[mixed_index(t, self.dims.iter().copied())]
    }

    /// Image of `m` in variable `k` at a tuple whose coordinate `k` is `src(m)`.
    pub fn mor_at(&self, k: usize, m: usize, t: &[usize]) -> usize {
        self.mor[k][m][others_index(t, k, &self.dims)]
    }

    pub fn validate(&self) -> Result<()> {
        let x = &self.codomain;
        let all = tuples(&self.dims);
        let bad = |msg: String| Err(Error::Structure(format!("functor {}: {}", self.name, msg)));
        for (k, c) in self.slots.iter().enumerate() {
            for t in &all {
                if self.mor_at(k, c.id(t[k]), t) != x.id(self.obj_at(t)) {
                    return bad(format!("identity not preserved at {t:?}"));
                }
                for m in c.hom_out(t[k]) {
                    let img = self.mor_at(k, m, t);
                    let mut t2 = t.clone();
                    t2[k] = c.tgt(m);
                    if x.src(img) != self.obj_at(t) || x.tgt(img) != self.obj_at(&t2) {
                        return bad(format!("image of {} has the wrong ends", c.mor_name(m)));
                    }
                    for n in c.hom_out(c.tgt(m)) {
                        let lhs = self.mor_at(k, c.compose(n, m), t);
                        let rhs = x.compose(self.mor_at(k, n, &t2), img);
                        if lhs != rhs {
                            return bad(format!("composite {}∘{} not preserved", c.mor_name(n), c.mor_name(m)));
                        }
                    }
                }
            }
        }
        for k in 0..self.slots.len() {
            for l in k + 1..self.slots.len() {
                for t in &all {
                    for m in self.slots[k].hom_out(t[k]) {
                        for n in self.slots[l].hom_out(t[l]) {
                            let mut a = t.clone();
                            a[k] = self.slots[k].tgt(m);
                            let mut b = t.clone();
                            b[l] = self.slots[l].tgt(n);
                            let p1 = x.compose(self.mor_at(l, n, &a), self.mor_at(k, m, t));
                            let p2 = x.compose(self.mor_at(k, m, &b), self.mor_at(l, n, t));
                            if p1 != p2 {
                                return bad(format!("variables {} and {} do not interchange at {t:?}", k + 1, l + 1));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow() -> Arc<FinCategory> {
        Arc::new(FinCategory::walking_arrow())
    }

    /// `hom_Y(-, y0)` paired with nothing: a representable with zero slots.
    fn representable_table(y: &Arc<FinCategory>, y0: usize) -> MultiProfunctor {
        MultiProfunctor::from_fn(
            y.clone(),
            vec![],
            |t| y.hom(t[0], y0).len(),
            |_, u, t| {
                let src = y.src(u);
                y.hom(t[0], y0).iter().map(|&k| y.hom(src, y0).iter().position(|&h| h == y.compose(k, u)).unwrap()).collect()
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_slot_table_is_a_presheaf() {
        let y = arrow();
        let p = representable_table(&y, 1);
        assert!(p.validate().is_ok());
        let ps = p.presheaf_at(&[]);
        assert!(ps.same_tables(&crate::presheaf::representable(&y, 1).unwrap()));
    }

    #[test]
    fn hom_profunctor_validates_and_detects_corruption() {
        // hom(y, b) on Y^op × Y, with two parallel arrows a ⇉ b followed by b → c
        let y = Arc::new(FinCategory::free(&["a", "b", "c"], &[(0, 1), (0, 1), (1, 2)]));
        let yy = y.clone();
        let pos = move |s: usize, t: usize, f: usize| yy.hom(s, t).iter().position(|&h| h == f).unwrap();
        let y2 = y.clone();
        let p = MultiProfunctor::from_fn(
            y.clone(),
            vec![y.clone()],
            |t| y.hom(t[0], t[1]).len(),
            |k, m, t| {
                let hs = y2.hom(t[0], t[1]);
                if k == 0 {
                    hs.iter().map(|&h| pos(y2.src(m), t[1], y2.compose(h, m))).collect()
                } else {
                    hs.iter().map(|&h| pos(t[0], y2.tgt(m), y2.compose(m, h))).collect()
                }
            },
        )
        .unwrap();
        assert!(p.validate().is_ok());
        assert_eq!(p.total_size(), 8);
        let text = write_profunctor_body(&p, &["b".into()]);
        let lines: Vec<(usize, &str)> = text.lines().enumerate().collect();
        let q = parse_profunctor_body(&y, &[y.clone()], &["b".into()], lines.into_iter()).unwrap();
        assert_eq!(q, p);
        // send e2 to e2∘e1 instead of e2∘e0 under precomposition with e0
        let e0 = y.morphism_by_name("e0").unwrap();
        let wrong = y.morphism_by_name("e2.e1").unwrap();
        let mut bad = p.clone();
        bad.act_mut(0, e0, &[1, 2])[0] = y.hom(0, 2).iter().position(|&h| h == wrong).unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn broken_interchange_is_reported() {
        let a = arrow();
        // two slots, constant value 2: the first slot swaps, the second collapses only when the first sits at a
        let p = MultiProfunctor::from_fn(
            Arc::new(FinCategory::terminal()),
            vec![a.clone(), a.clone()],
            |_| 2,
            |k, m, t| {
                let c = &a;
                if c.is_identity(m) {
                    vec![0, 1]
                } else if k == 1 {
                    vec![1, 0]
                } else if t[1] == 0 {
                    vec![0, 0]
                } else {
                    vec![0, 1]
                }
            },
        )
        .unwrap();
        assert_eq!(p.validate().unwrap_err().law, "interchange");
    }

    #[test]
    fn multifunctor_checks() {
        let a = arrow();
        let f = MultiFunctor::from_fn("id", vec![a.clone()], a.clone(), |t| t[0], |_, m, _| m).unwrap();
        assert_eq!(f.obj_at(&[1]), 1);
        // constant functor sending the arrow to an identity, but objects differ: rejected
        let bad = MultiFunctor::from_fn("bad", vec![a.clone()], a.clone(), |t| t[0], |_, _, t| a.id(t[0]));
        assert!(bad.is_err());
        // "or" on the arrow 0 → 1: a functor of two variables
        let e = a.morphism_by_name("e0").unwrap();
        let or = MultiFunctor::from_fn(
            "or",
            vec![a.clone(), a.clone()],
            a.clone(),
            |t| t[0].max(t[1]),
            |k, m, t| {
                let other = t[1 - k];
                if a.is_identity(m) || other == 1 {
                    a.id(t[0].max(t[1]).max(a.tgt(m) * usize::from(other == 1)))
                } else {
                    e
                }
            },
        );
        assert!(or.is_ok());
    }
}
