//! Finite sets, presheaves on finite categories, the Yoneda embedding,
//! colimits of finite-set diagrams and categories of elements.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{parse_category_lines, write_category, FinCategory, FunctorTable};

#[derive(Clone, Debug)]
pub struct FinSet {
    size: usize,
    labels: Option<Arc<Vec<String>>>,
}

impl FinSet {
    /// Elements labelled by their index.
    pub fn anonymous(size: usize) -> FinSet {
        FinSet { size, labels: None }
    }

    pub fn labeled(labels: Vec<String>) -> Result<FinSet> {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::Invalid(format!("duplicate label {l}")));
            }
        }
        Ok(FinSet { size: labels.len(), labels: Some(Arc::new(labels)) })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(ls) => ls[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        match &self.labels {
            Some(ls) => ls.iter().position(|l| l == label),
            None => label.parse::<usize>().ok().filter(|&i| i < self.size),
        }
    }
}

/// A contravariant functor from `base` to finite sets. `act[m]` maps the
/// value at the target of `m` to the value at its source.
#[derive(Clone, Debug)]
pub struct Presheaf {
    base: Arc<FinCategory>,
    sets: Vec<FinSet>,
    act: Vec<Vec<usize>>,
    fingerprint: u64,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Presheaf) -> bool {
        self.fingerprint == other.fingerprint
            && (Arc::ptr_eq(&self.base, &other.base) || self.base == other.base)
            && self.same_tables(other)
    }
}

impl Eq for Presheaf {}

impl Presheaf {
    /// Shape-checked constructor; functoriality is checked by [`Presheaf::validate`].
    pub fn new(base: Arc<FinCategory>, sets: Vec<FinSet>, act: Vec<Vec<usize>>) -> Result<Presheaf> {
        if sets.len() != base.num_objects() || act.len() != base.num_morphisms() {
            return Err(Error::Structure("presheaf tables do not match the base category".into()));
        }
        for m in base.morphisms() {
            let (s, t) = (base.src(m), base.tgt(m));
            if act[m].len() != sets[t].size() || act[m].iter().any(|&v| v >= sets[s].size()) {
                return Err(Error::Structure(format!("action of {} has the wrong shape", base.mor_name(m))));
            }
        }
        Ok(Presheaf::from_raw(base, sets, act))
    }

    pub(crate) fn from_raw(base: Arc<FinCategory>, sets: Vec<FinSet>, act: Vec<Vec<usize>>) -> Presheaf {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        base.num_objects().hash(&mut h);
        base.num_morphisms().hash(&mut h);
        for s in &sets {
            s.size().hash(&mut h);
        }
        act.hash(&mut h);
        Presheaf { base, sets, act, fingerprint: h.finish() }
    }

    pub fn empty(base: &Arc<FinCategory>) -> Presheaf {
        let sets = vec![FinSet::anonymous(0); base.num_objects()];
        Presheaf::from_raw(base.clone(), sets, vec![Vec::new(); base.num_morphisms()])
    }

    /// The constant one-element presheaf.
    pub fn terminal(base: &Arc<FinCategory>) -> Presheaf {
        let sets = vec![FinSet::anonymous(1); base.num_objects()];
        Presheaf::from_raw(base.clone(), sets, vec![vec![0]; base.num_morphisms()])
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn at(&self, x: usize) -> &FinSet {
        &self.sets[x]
    }

    pub fn size(&self, x: usize) -> usize {
        self.sets[x].size()
    }

    pub fn act(&self, m: usize) -> &[usize] {
        &self.act[m]
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn total_size(&self) -> usize {
        self.sets.iter().map(|s| s.size()).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(|s| s.size()).collect()
    }

    /// Equal sizes and actions; labels are ignored.
    pub fn same_tables(&self, other: &Presheaf) -> bool {
        self.sets.len() == other.sets.len()
            && self.sets.iter().zip(&other.sets).all(|(a, b)| a.size() == b.size())
            && self.act == other.act
    }

    /// Identity and contravariance, exhaustively. On failure returns the
    /// offending morphisms and the element where the sides disagree.
    pub fn validate(&self) -> std::result::Result<(), FunctorialityFailure> {
        let c = &*self.base;
        for a in c.objects() {
            let id = &self.act[c.id(a)];
            if let Some(e) = (0..self.size(a)).find(|&e| id[e] != e) {
                return Err(FunctorialityFailure { g: c.mor_name(c.id(a)).into(), f: None, object: a, element: e });
            }
        }
        for f in c.morphisms() {
            if c.is_identity(f) {
                continue;
            }
            for g in c.hom_out(c.tgt(f)) {
                if c.is_identity(g) {
                    continue;
                }
                let gf = c.compose(g, f);
                let z = c.tgt(g);
                for e in 0..self.size(z) {
                    if self.act[gf][e] != self.act[f][self.act[g][e]] {
                        return Err(FunctorialityFailure {
                            g: c.mor_name(g).into(),
                            f: Some(c.mor_name(f).into()),
                            object: z,
                            element: e,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Presheaf> {
        for (x, ls) in labels.into_iter().enumerate() {
            if ls.len() != self.sets[x].size() {
                return Err(Error::Structure("label count differs from set size".into()));
            }
            self.sets[x] = FinSet::labeled(ls)?;
        }
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorialityFailure {
    pub g: String,
    pub f: Option<String>,
    pub object: usize,
    pub element: usize,
}

impl std::fmt::Display for FunctorialityFailure {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.f {
            None => write!(out, "action of identity {} moves element {} at object {}", self.g, self.element, self.object),
            Some(f) => write!(
                out,
                "act({}∘{}) differs from act({})∘act({}) on element {} at object {}",
                self.g, f, f, self.g, self.element, self.object
            ),
        }
    }
}

/// A natural family of functions between presheaves on one base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresheafMorphism {
    pub src: Arc<Presheaf>,
    pub dst: Arc<Presheaf>,
    pub comps: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityFailure {
    pub morphism: String,
    pub object: usize,
    pub element: usize,
}

impl PresheafMorphism {
    pub fn new(src: Arc<Presheaf>, dst: Arc<Presheaf>, comps: Vec<Vec<usize>>) -> Result<PresheafMorphism> {
        let c = src.base();
        if comps.len() != c.num_objects() || dst.base().num_objects() != c.num_objects() {
            return Err(Error::Structure("component count does not match the base".into()));
        }
        for x in c.objects() {
            if comps[x].len() != src.size(x) || comps[x].iter().any(|&v| v >= dst.size(x)) {
                return Err(Error::Structure(format!("component at {} has the wrong shape", c.obj_name(x))));
            }
        }
        Ok(PresheafMorphism { src, dst, comps })
    }

    pub fn identity(p: &Arc<Presheaf>) -> PresheafMorphism {
        let comps = p.base().objects().map(|x| (0..p.size(x)).collect()).collect();
        PresheafMorphism { src: p.clone(), dst: p.clone(), comps }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &PresheafMorphism) -> PresheafMorphism {
        let comps = self.comps.iter().zip(&next.comps).map(|(a, b)| a.iter().map(|&v| b[v]).collect()).collect();
        PresheafMorphism { src: self.src.clone(), dst: next.dst.clone(), comps }
    }

    pub fn validate(&self) -> std::result::Result<(), NaturalityFailure> {
        let c = self.src.base();
        for m in c.morphisms() {
            let (a, b) = (c.src(m), c.tgt(m));
            for e in 0..self.src.size(b) {
                let left = self.comps[a][self.src.act(m)[e]];
                let right = self.dst.act(m)[self.comps[b][e]];
                if left != right {
                    return Err(NaturalityFailure { morphism: c.mor_name(m).into(), object: b, element: e });
                }
            }
        }
        Ok(())
    }

    pub fn is_bijective(&self) -> bool {
        self.comps.iter().enumerate().all(|(x, f)| {
            f.len() == self.dst.size(x) && {
                let mut hit = vec![false; f.len()];
                f.iter().all(|&v| !std::mem::replace(&mut hit[v], true))
            }
        })
    }

    pub fn inverse(&self) -> Option<PresheafMorphism> {
        if !self.is_bijective() {
            return None;
        }
        let comps = self
            .comps
            .iter()
            .map(|f| {
                let mut inv = vec![0; f.len()];
                for (i, &v) in f.iter().enumerate() {
                    inv[v] = i;
                }
                inv
            })
            .collect();
        Some(PresheafMorphism { src: self.dst.clone(), dst: self.src.clone(), comps })
    }
}

/// `hom(-, a)`, acting by precomposition. Elements are labelled by morphism names.
pub fn representable(c: &Arc<FinCategory>, a: usize) -> Result<Presheaf> {
    if a >= c.num_objects() {
        return Err(Error::Unknown { kind: "object", name: a.to_string() });
    }
    let sets = c
        .objects()
        .map(|b| FinSet::labeled(c.hom(b, a).iter().map(|&k| c.mor_name(k).to_string()).collect()))
        .collect::<Result<Vec<_>>>()?;
    let act = c
        .morphisms()
        .map(|m| {
            let (b, b2) = (c.src(m), c.tgt(m));
            let target = c.hom(b, a);
            c.hom(b2, a).iter().map(|&k| index_in(target, c.compose(k, m))).collect()
        })
        .collect();
    Ok(Presheaf::from_raw(c.clone(), sets, act))
}

fn index_in(list: &[usize], v: usize) -> usize {
    list.iter().position(|&x| x == v).expect("composite lies in its hom-set")
}

/// `y(f) : y(a) → y(b)`, postcomposition with `f : a → b`.
pub fn yoneda_action(c: &Arc<FinCategory>, f: usize) -> Result<PresheafMorphism> {
    if f >= c.num_morphisms() {
        return Err(Error::Unknown { kind: "morphism", name: f.to_string() });
    }
    let (a, b) = (c.src(f), c.tgt(f));
    let ya = Arc::new(representable(c, a)?);
    let yb = Arc::new(representable(c, b)?);
    let comps = c.objects().map(|x| c.hom(x, a).iter().map(|&k| index_in(c.hom(x, b), c.compose(f, k))).collect()).collect();
    Ok(PresheafMorphism { src: ya, dst: yb, comps })
}

/// The map `y(x) → P` picking out `e ∈ P(x)`: `k ↦ P(k)(e)`.
pub fn element_map(ya: &Arc<Presheaf>, p: &Arc<Presheaf>, x: usize, e: usize) -> PresheafMorphism {
    let c = p.base();
    let comps = c.objects().map(|w| c.hom(w, x).iter().map(|&k| p.act(k)[e]).collect()).collect();
    PresheafMorphism { src: ya.clone(), dst: p.clone(), comps }
}

/// A diagram of finite sets given by object sizes and arrow functions.
/// Arrows need only generate the shape; composites add no identifications.
#[derive(Clone, Debug, Default)]
pub struct Diagram {
    pub sizes: Vec<usize>,
    pub arrows: Vec<(usize, usize, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colimit {
    pub size: usize,
    /// Class of each element, indexed by diagram object then element.
    pub class_of: Vec<Vec<usize>>,
    /// Least `(diagram object, element)` in each class; classes are numbered
    /// in increasing order of representative.
    pub reps: Vec<(usize, usize)>,
    /// Unions that joined two distinct classes.
    pub merges: usize,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Keeps the smaller root, so each root is the least member of its class.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Quotient of the disjoint union by the equivalence generated by the arrows.
pub fn colimit_finset(d: &Diagram) -> Colimit {
    let mut offsets = Vec::with_capacity(d.sizes.len() + 1);
    let mut total = 0;
    for &s in &d.sizes {
        offsets.push(total);
        total += s;
    }
    let mut uf = DisjointSets::new(total);
    let mut merges = 0;
    for (i, j, f) in &d.arrows {
        for (e, &v) in f.iter().enumerate() {
            if uf.union(offsets[*i] + e, offsets[*j] + v) {
                merges += 1;
            }
        }
    }
    let mut class_of_flat = vec![usize::MAX; total];
    let mut reps = Vec::new();
    let mut owner = vec![0usize; total];
    for (i, &s) in d.sizes.iter().enumerate() {
        for e in 0..s {
            owner[offsets[i] + e] = i;
        }
    }
    for k in 0..total {
        let r = uf.find(k);
        if r == k {
            class_of_flat[k] = reps.len();
            reps.push((owner[k], k - offsets[owner[k]]));
        } else {
            class_of_flat[k] = class_of_flat[r];
        }
    }
    let class_of = d.sizes.iter().enumerate().map(|(i, &s)| (0..s).map(|e| class_of_flat[offsets[i] + e]).collect()).collect();
    Colimit { size: reps.len(), class_of, reps, merges }
}

/// Colimit of a covariant diagram over a finite category, after checking
/// that the diagram is functorial.
pub fn colimit_over(shape: &FinCategory, sizes: &[usize], act: &[Vec<usize>]) -> Result<Colimit> {
    if sizes.len() != shape.num_objects() || act.len() != shape.num_morphisms() {
        return Err(Error::Structure("diagram does not match its shape".into()));
    }
    for m in shape.morphisms() {
        let (s, t) = (shape.src(m), shape.tgt(m));
        if act[m].len() != sizes[s] || act[m].iter().any(|&v| v >= sizes[t]) {
            return Err(Error::Structure(format!("arrow {} has the wrong shape", shape.mor_name(m))));
        }
        if shape.is_identity(m) && act[m].iter().enumerate().any(|(e, &v)| e != v) {
            return Err(Error::Invalid(format!("non-functorial diagram: identity {} moves an element", shape.mor_name(m))));
        }
    }
    for f in shape.morphisms() {
        for g in shape.hom_out(shape.tgt(f)) {
            let gf = shape.compose(g, f);
            if (0..sizes[shape.src(f)]).any(|e| act[gf][e] != act[g][act[f][e]]) {
                return Err(Error::Invalid(format!(
                    "non-functorial diagram at {}∘{}",
                    shape.mor_name(g),
                    shape.mor_name(f)
                )));
            }
        }
    }
    let arrows = shape
        .morphisms()
        .filter(|&m| !shape.is_identity(m))
        .map(|m| (shape.src(m), shape.tgt(m), act[m].clone()))
        .collect();
    Ok(colimit_finset(&Diagram { sizes: sizes.to_vec(), arrows }))
}

/// Elements `(x, e)` of a presheaf, ordered by object then element, with one
/// arrow `(x, P(m)(e')) → (x', e')` per base morphism `m : x → x'` and `e' ∈ P(x')`.
#[derive(Clone, Debug)]
pub struct Elements {
    pub objects: Vec<(usize, usize)>,
    pub offsets: Vec<usize>,
    /// `(base morphism, source element index, target element index)`
    pub arrows: Vec<(usize, usize, usize)>,
}

impl Elements {
    pub fn index(&self, x: usize, e: usize) -> usize {
        self.offsets[x] + e
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

/// Elements with arrows for non-identity base morphisms only; identities add
/// nothing to a colimit.
pub fn elements(p: &Presheaf) -> Elements {
    let c = p.base();
    let mut objects = Vec::with_capacity(p.total_size());
    let mut offsets = Vec::with_capacity(c.num_objects());
    for x in c.objects() {
        offsets.push(objects.len());
        for e in 0..p.size(x) {
            objects.push((x, e));
        }
    }
    let mut arrows = Vec::new();
    for m in c.morphisms() {
        if c.is_identity(m) {
            continue;
        }
        let (x, x2) = (c.src(m), c.tgt(m));
        for e2 in 0..p.size(x2) {
            arrows.push((m, offsets[x] + p.act(m)[e2], offsets[x2] + e2));
        }
    }
    Elements { objects, offsets, arrows }
}

/// Pushout of `f : C → A` and `g : C → B`, computed pointwise by union-find.
/// Elements of `A` come first; classes are numbered by least representative.
pub fn pushout(f: &PresheafMorphism, g: &PresheafMorphism) -> Result<Presheaf> {
    let (a, b, c) = (&f.dst, &g.dst, &f.src);
    let base = c.base();
    if !(Arc::ptr_eq(c, &g.src) || **c == *g.src) || a.base() != base || b.base() != base {
        return Err(Error::Structure("pushout legs must share their source and base".into()));
    }
    let parts = [a, b, c];
    let cols: Vec<Colimit> = base
        .objects()
        .map(|x| {
            colimit_finset(&Diagram {
                sizes: parts.iter().map(|p| p.size(x)).collect(),
                arrows: vec![(2, 0, f.comps[x].clone()), (2, 1, g.comps[x].clone())],
            })
        })
        .collect();
    let sets = cols.iter().map(|col| FinSet::anonymous(col.size)).collect();
    let act = base
        .morphisms()
        .map(|m| {
            let (s, t) = (base.src(m), base.tgt(m));
            cols[t].reps.iter().map(|&(i, e)| cols[s].class_of[i][parts[i].act(m)[e]]).collect()
        })
        .collect();
    Ok(Presheaf::from_raw(base.clone(), sets, act))
}

/// Coproduct `P + Q`, with the elements of `P` first at every object.
pub fn coproduct(p: &Arc<Presheaf>, q: &Arc<Presheaf>) -> Result<Presheaf> {
    let e = Arc::new(Presheaf::empty(p.base()));
    let none = |d: &Arc<Presheaf>| PresheafMorphism { src: e.clone(), dst: d.clone(), comps: vec![Vec::new(); p.base().num_objects()] };
    pushout(&none(p), &none(q))
}

/// The category of elements as a full table, with its projection to the base.
pub fn category_of_elements(p: &Arc<Presheaf>) -> (FinCategory, FunctorTable) {
    let c = p.base();
    let els = elements(p);
    let obj_names: Vec<String> =
        els.objects.iter().map(|&(x, e)| format!("({},{})", c.obj_name(x), p.at(x).label(e))).collect();
    let mut mors = Vec::new();
    let mut base_of = Vec::new();
    let mut index = HashMap::new();
    for m in c.morphisms() {
        let (x, x2) = (c.src(m), c.tgt(m));
        for e2 in 0..p.size(x2) {
            let s = els.index(x, p.act(m)[e2]);
            let t = els.index(x2, e2);
            index.insert((m, e2), mors.len());
            mors.push((format!("({},{})", c.mor_name(m), p.at(x2).label(e2)), s, t));
            base_of.push(m);
        }
    }
    let ident: Vec<usize> = els.objects.iter().map(|&(x, e)| index[&(c.id(x), e)]).collect();
    let mut comp = Vec::new();
    for m1 in c.morphisms() {
        for e1 in 0..p.size(c.tgt(m1)) {
            let f = index[&(m1, e1)];
            for m2 in c.hom_out(c.tgt(m1)) {
                for e2 in 0..p.size(c.tgt(m2)) {
                    if p.act(m2)[e2] == e1 {
                        comp.push((index[&(m2, e2)], f, index[&(c.compose(m2, m1), e2)]));
                    }
                }
            }
        }
    }
    let cat = FinCategory::from_parts(obj_names, mors, ident, &comp).expect("category of elements is well formed");
    let cat = Arc::new(cat);
    let proj = FunctorTable {
        src: cat.clone(),
        dst: c.clone(),
        obj_map: els.objects.iter().map(|&(x, _)| x).collect(),
        mor_map: base_of,
    };
    (Arc::try_unwrap(cat).unwrap_or_else(|a| (*a).clone()), proj)
}

pub const DEFAULT_NAT_BUDGET: usize = 1_000_000;

/// Every natural transformation `p → q`, by exhaustive search over component
/// functions filtered by naturality. Fails when more than `budget` candidate
/// partial families would have to be examined.
pub fn enumerate_nat_trans(p: &Arc<Presheaf>, q: &Arc<Presheaf>, budget: usize) -> Result<Vec<PresheafMorphism>> {
    if !(Arc::ptr_eq(p.base(), q.base()) || p.base() == q.base()) {
        return Err(Error::TypeMismatch("presheaves on different bases".into()));
    }
    let c = p.base().clone();
    let n = c.num_objects();
    let mut out = Vec::new();
    let mut comps: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut visited = 0usize;
    search_nat(&c, p, q, 0, &mut comps, &mut out, &mut visited, budget)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search_nat(
    c: &Arc<FinCategory>,
    p: &Arc<Presheaf>,
    q: &Arc<Presheaf>,
    x: usize,
    comps: &mut Vec<Vec<usize>>,
    out: &mut Vec<PresheafMorphism>,
    visited: &mut usize,
    budget: usize,
) -> Result<()> {
    if x == c.num_objects() {
        out.push(PresheafMorphism { src: p.clone(), dst: q.clone(), comps: comps.clone() });
        return Ok(());
    }
    let (ps, qs) = (p.size(x), q.size(x));
    if ps > 0 && qs == 0 {
        return Ok(());
    }
    let mut f = vec![0usize; ps];
    loop {
        *visited += 1;
        if *visited > budget {
            return Err(Error::Budget { what: "natural transformation search".into(), needed: *visited, limit: budget });
        }
        comps[x] = f.clone();
        if consistent_upto(c, p, q, comps, x) {
            search_nat(c, p, q, x + 1, comps, out, visited, budget)?;
        }
        // next function in lexicographic order
        let mut k = ps;
        loop {
            if k == 0 {
                comps[x].clear();
                return Ok(());
            }
            k -= 1;
            f[k] += 1;
            if f[k] < qs {
                break;
            }
            f[k] = 0;
        }
    }
}

fn consistent_upto(c: &FinCategory, p: &Presheaf, q: &Presheaf, comps: &[Vec<usize>], x: usize) -> bool {
    for m in c.morphisms() {
        let (a, b) = (c.src(m), c.tgt(m));
        if a > x || b > x || (a != x && b != x) {
            continue;
        }
        for e in 0..p.size(b) {
            if comps[a][p.act(m)[e]] != q.act(m)[comps[b][e]] {
                return false;
            }
        }
    }
    true
}

pub fn write_presheaf(p: &Presheaf) -> String {
    let c = p.base();
    let mut out = write_category(c);
    out.push_str(&write_presheaf_body(p));
    out
}

pub fn write_presheaf_body(p: &Presheaf) -> String {
    let c = p.base();
    let mut out = String::new();
    for x in c.objects() {
        let labels: Vec<String> = (0..p.size(x)).map(|e| p.at(x).label(e)).collect();
        out.push_str(&format!("at {} = {{{}}}\n", c.obj_name(x), labels.join(",")));
    }
    for m in c.morphisms() {
        if c.is_identity(m) {
            continue;
        }
        let (s, t) = (c.src(m), c.tgt(m));
        for e in 0..p.size(t) {
            out.push_str(&format!("act {} : {} -> {}\n", c.mor_name(m), p.at(t).label(e), p.at(s).label(p.act(m)[e])));
        }
    }
    out
}

/// Parses a category file followed by `at`/`act` lines.
pub fn parse_presheaf(text: &str) -> Result<Presheaf> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let is_body = |l: &str| {
        let t = l.trim_start();
        t.starts_with("at ") || t.starts_with("act ")
    };
    let cat = Arc::new(parse_category_lines(lines.iter().copied().filter(|(_, l)| !is_body(l)))?);
    parse_presheaf_body(&cat, lines.into_iter().filter(|(_, l)| is_body(l)))
}

pub(crate) fn parse_label_set(s: &str, line: usize) -> Result<Vec<String>> {
    let s = s.trim();
    if !s.starts_with('{') || !s.ends_with('}') {
        return Err(Error::Parse { line, msg: "expected {labels}".into() });
    }
    let inner = &s[1..s.len() - 1];
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(inner.split(',').map(|l| l.trim().to_string()).collect())
}

pub(crate) fn parse_presheaf_body<'a>(
    c: &Arc<FinCategory>,
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<Presheaf> {
    let mut sets: Vec<Option<FinSet>> = vec![None; c.num_objects()];
    let mut acts: Vec<Vec<Option<usize>>> = Vec::new();
    let mut pending: Vec<(usize, usize, String, String)> = Vec::new();
    for (ln, raw) in lines {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("at ") {
            let (obj, set) = rest.split_once('=').ok_or(Error::Parse { line: ln, msg: "expected `at <obj> = {..}`".into() })?;
            let x = c.object_by_name(obj.trim()).ok_or(Error::Parse { line: ln, msg: format!("dangling object {}", obj.trim()) })?;
            if sets[x].is_some() {
                return Err(Error::Parse { line: ln, msg: format!("duplicate value for {}", obj.trim()) });
            }
            let fs = FinSet::labeled(parse_label_set(set, ln)?).map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?;
            sets[x] = Some(fs);
        } else if let Some(rest) = line.strip_prefix("act ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != 5 || toks[1] != ":" || toks[3] != "->" {
                return Err(Error::Parse { line: ln, msg: "expected `act <mor> : <label> -> <label>`".into() });
            }
            let m = c.morphism_by_name(toks[0]).ok_or(Error::Parse { line: ln, msg: format!("dangling morphism {}", toks[0]) })?;
            pending.push((ln, m, toks[2].to_string(), toks[4].to_string()));
        }
    }
    let sets: Vec<FinSet> = sets
        .into_iter()
        .enumerate()
        .map(|(x, s)| s.ok_or(Error::Parse { line: 0, msg: format!("no value for object {}", c.obj_name(x)) }))
        .collect::<Result<_>>()?;
    for m in c.morphisms() {
        acts.push(vec![None; sets[c.tgt(m)].size()]);
    }
    for (ln, m, from, to) in pending {
        let (s, t) = (c.src(m), c.tgt(m));
        let e = sets[t].position(&from).ok_or(Error::Parse { line: ln, msg: format!("dangling label {from}") })?;
        let v = sets[s].position(&to).ok_or(Error::Parse { line: ln, msg: format!("dangling label {to}") })?;
        if acts[m][e].replace(v).is_some() {
            return Err(Error::Parse { line: ln, msg: format!("duplicate action of {} on {}", c.mor_name(m), from) });
        }
    }
    let mut act = Vec::with_capacity(c.num_morphisms());
    for m in c.morphisms() {
        if c.is_identity(m) {
            let t = c.tgt(m);
            act.push((0..sets[t].size()).map(|e| acts[m][e].unwrap_or(e)).collect());
        } else {
            let row = acts[m]
                .iter()
                .enumerate()
                .map(|(e, v)| v.ok_or(Error::Parse { line: 0, msg: format!("action of {} undefined on element {e}", c.mor_name(m)) }))
                .collect::<Result<Vec<usize>>>()?;
            act.push(row);
        }
    }
    Presheaf::new(c.clone(), sets, act)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow() -> Arc<FinCategory> {
        Arc::new(FinCategory::walking_arrow())
    }

    #[test]
    fn representables_on_walking_arrow() {
        let c = arrow();
        let yb = representable(&c, 1).unwrap();
        assert_eq!(yb.sizes(), vec![1, 1]);
        let ya = representable(&c, 0).unwrap();
        assert_eq!(ya.sizes(), vec![1, 0]);
        assert!(yb.validate().is_ok() && ya.validate().is_ok());
        let t = Arc::new(FinCategory::terminal());
        assert_eq!(representable(&t, 0).unwrap().sizes(), vec![1]);
        assert!(representable(&c, 5).is_err());
    }

    #[test]
    fn yoneda_action_on_identity_and_edge() {
        let c = arrow();
        let id = yoneda_action(&c, c.id(0)).unwrap();
        assert_eq!(id, PresheafMorphism::identity(&id.src));
        let e = yoneda_action(&c, c.morphism_by_name("e0").unwrap()).unwrap();
        assert!(e.validate().is_ok());
        assert_eq!(e.comps, vec![vec![0], vec![]]);
    }

    #[test]
    fn colimit_examples() {
        let one = colimit_finset(&Diagram { sizes: vec![3], arrows: vec![] });
        assert_eq!(one.size, 3);
        // {x, y} → {u}, both to u
        let arrow = colimit_finset(&Diagram { sizes: vec![2, 1], arrows: vec![(0, 1, vec![0, 0])] });
        assert_eq!(arrow.size, 1);
        assert_eq!(arrow.merges, 2);
        let disc = colimit_finset(&Diagram { sizes: vec![2, 3], arrows: vec![] });
        assert_eq!(disc.size, 5);
        assert_eq!(disc.reps[2], (1, 0));
    }

    #[test]
    fn colimit_over_rejects_non_functorial() {
        let c = FinCategory::free(&["a", "b", "c"], &[(0, 1), (1, 2)]);
        let mut act: Vec<Vec<usize>> = c.morphisms().map(|m| if c.is_identity(m) { vec![0, 1] } else { vec![0, 1] }).collect();
        assert_eq!(colimit_over(&c, &[2, 2, 2], &act).unwrap().size, 2);
        let gf = c.morphism_by_name("e1.e0").unwrap();
        act[gf] = vec![1, 0];
        assert!(colimit_over(&c, &[2, 2, 2], &act).is_err());
    }

    #[test]
    fn elements_of_terminal_and_representable() {
        let t = Arc::new(FinCategory::terminal());
        let (e, _) = category_of_elements(&Arc::new(Presheaf::terminal(&t)));
        assert_eq!((e.num_objects(), e.num_morphisms()), (1, 1));
        let c = Arc::new(FinCategory::free(&["a", "b", "c"], &[(0, 1), (1, 2), (0, 2)]));
        let yc = Arc::new(representable(&c, 2).unwrap());
        let (el, proj) = category_of_elements(&yc);
        assert!(crate::fincat::validate_category(&el).is_ok());
        assert!(proj.validate().is_ok());
        // (c, id_c) receives exactly one morphism from every element
        let top = el.object_by_name("(c,1c)").unwrap();
        for o in el.objects() {
            assert_eq!(el.hom(o, top).len(), 1);
        }
    }

    #[test]
    fn nat_trans_counts() {
        let t = Arc::new(FinCategory::terminal());
        let one = Arc::new(Presheaf::terminal(&t));
        assert_eq!(enumerate_nat_trans(&one, &one, DEFAULT_NAT_BUDGET).unwrap().len(), 1);
        let c = arrow();
        let empty = Arc::new(Presheaf::empty(&c));
        let yb = Arc::new(representable(&c, 1).unwrap());
        assert_eq!(enumerate_nat_trans(&empty, &yb, DEFAULT_NAT_BUDGET).unwrap().len(), 1);
        assert!(enumerate_nat_trans(&yb, &yb, 1).is_err());
    }

    #[test]
    fn pushout_and_coproduct() {
        let c = arrow();
        let ya = Arc::new(representable(&c, 0).unwrap());
        let yb = Arc::new(representable(&c, 1).unwrap());
        let sum = coproduct(&ya, &yb).unwrap();
        assert_eq!(sum.sizes(), vec![2, 1]);
        assert!(sum.validate().is_ok());
        // gluing two copies of y(b) along y(a) → y(b) identifies the elements over a only
        let m = c.morphism_by_name("e0").unwrap();
        let ym = yoneda_action(&c, m).unwrap();
        let glued = pushout(&ym, &ym).unwrap();
        assert_eq!(glued.sizes(), vec![1, 2]);
        assert!(glued.validate().is_ok());
        assert_eq!(glued.act(m), &[0, 0]);
    }

    #[test]
    fn presheaf_text_roundtrip() {
        let c = Arc::new(FinCategory::free(&["a", "b"], &[(0, 1), (0, 1)]));
        let p = representable(&c, 1).unwrap();
        let text = write_presheaf(&p);
        let q = parse_presheaf(&text).unwrap();
        assert!(q.same_tables(&p));
        assert!(parse_presheaf(&text.replace("at b = {1b}", "at b = {1b}\nat b = {x}")).is_err());
    }
}
