//! Table-backed finite categories, functors and natural transformations.
//!
//! Objects and morphisms are dense indices. Composition is a full table over
//! composable pairs, so every law check is a plain loop.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinCategory {
    obj_names: Vec<String>,
    mor_names: Vec<String>,
    src: Vec<usize>,
    tgt: Vec<usize>,
    ident: Vec<usize>,
    hom: Vec<Vec<usize>>,
    comp: Vec<u32>,
}

/// First violated category law, naming the morphisms involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategoryViolation {
    MissingComposite { g: String, f: String },
    BrokenIdentity { id: String, f: String },
    BrokenAssociativity { h: String, g: String, f: String },
}

impl fmt::Display for CategoryViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CategoryViolation::MissingComposite { g, f } => write!(out, "MissingComposite({g},{f})"),
            CategoryViolation::BrokenIdentity { id, f } => write!(out, "BrokenIdentity({id},{f})"),
            CategoryViolation::BrokenAssociativity { h, g, f } => {
                write!(out, "BrokenAssociativity({h},{g},{f})")
            }
        }
    }
}

impl FinCategory {
    /// Builds a category from raw tables. `comp` lists `(g, f, g∘f)`; pairs
    /// that are not composable, or whose result lands in the wrong hom-set,
    /// are rejected here. Missing composites are left for
    /// [`validate_category`] to report.
    pub fn from_parts(
        obj_names: Vec<String>,
        mors: Vec<(String, usize, usize)>,
        ident: Vec<usize>,
        comp: &[(usize, usize, usize)],
    ) -> Result<FinCategory> {
        let n = obj_names.len();
        let m = mors.len();
        if ident.len() != n {
            return Err(Error::Structure(format!("{} identities for {} objects", ident.len(), n)));
        }
        let mut mor_names = Vec::with_capacity(m);
        let mut src = Vec::with_capacity(m);
        let mut tgt = Vec::with_capacity(m);
        let mut hom = vec![Vec::new(); n * n];
        for (i, (name, s, t)) in mors.into_iter().enumerate() {
            if s >= n || t >= n {
                return Err(Error::Structure(format!("morphism {name} has a dangling endpoint")));
            }
            hom[s * n + t].push(i);
            mor_names.push(name);
            src.push(s);
            tgt.push(t);
        }
        for (a, &i) in ident.iter().enumerate() {
            if i >= m || src[i] != a || tgt[i] != a {
                return Err(Error::Structure(format!("identity of {} is not an endomorphism of it", obj_names[a])));
            }
        }
        let mut table = vec![NONE; m * m];
        for &(g, f, gf) in comp {
            if g >= m || f >= m || gf >= m {
                return Err(Error::Structure("composite refers to unknown morphism".into()));
            }
            if tgt[f] != src[g] {
                return Err(Error::Structure(format!(
                    "composite {}∘{} of non-composable pair",
                    mor_names[g], mor_names[f]
                )));
            }
            if src[gf] != src[f] || tgt[gf] != tgt[g] {
                return Err(Error::Structure(format!(
                    "composite {}∘{} = {} lands in the wrong hom-set",
                    mor_names[g], mor_names[f], mor_names[gf]
                )));
            }
            if table[g * m + f] != NONE && table[g * m + f] as usize != gf {
                return Err(Error::Structure(format!(
                    "conflicting composites for {}∘{}",
                    mor_names[g], mor_names[f]
                )));
            }
            table[g * m + f] = gf as u32;
        }
        Ok(FinCategory { obj_names, mor_names, src, tgt, ident, hom, comp: table })
    }

    /// The category with one object and its identity.
    pub fn terminal() -> FinCategory {
        FinCategory::from_parts(vec!["*".into()], vec![("id*".into(), 0, 0)], vec![0], &[(0, 0, 0)])
            .expect("terminal category is well formed")
    }

    /// The walking arrow `a → b`.
    pub fn walking_arrow() -> FinCategory {
        FinCategory::free(&["a", "b"], &[(0, 1)])
    }

    /// Free category on an acyclic multigraph; morphisms are paths. Panics on
    /// a cycle, since the path set would be infinite.
    pub fn free(objects: &[&str], edges: &[(usize, usize)]) -> FinCategory {
        let names: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
        let labels: Vec<String> = edges.iter().enumerate().map(|(i, _)| format!("e{i}")).collect();
        FinCategory::free_named(names, edges, &labels)
    }

    pub fn free_named(objects: Vec<String>, edges: &[(usize, usize)], edge_names: &[String]) -> FinCategory {
        let n = objects.len();
        // paths as edge lists, grouped by source; a path is extended at its target
        let mut paths: Vec<(usize, usize, Vec<usize>)> = (0..n).map(|a| (a, a, Vec::new())).collect();
        let mut frontier: Vec<usize> = (0..n).collect();
        let mut guard = 0usize;
        while !frontier.is_empty() {
            guard += 1;
            assert!(guard <= n + 1, "free category requested on a cyclic graph");
            let mut next = Vec::new();
            for &p in &frontier {
                let (s, t, ref es) = paths[p].clone();
                for (ei, &(a, b)) in edges.iter().enumerate() {
                    if a == t {
                        let mut es2 = es.clone();
                        es2.push(ei);
                        paths.push((s, b, es2));
                        next.push(paths.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        // identities first, then by (source, target, length, edge sequence)
        let mut order: Vec<usize> = (0..paths.len()).collect();
        order.sort_by(|&x, &y| {
            let (sx, tx, ex) = &paths[x];
            let (sy, ty, ey) = &paths[y];
            (!ex.is_empty(), sx, tx, ex.len(), ex).cmp(&(!ey.is_empty(), sy, ty, ey.len(), ey))
        });
        let sorted: Vec<(usize, usize, Vec<usize>)> = order.into_iter().map(|i| paths[i].clone()).collect();
        let index: HashMap<(usize, Vec<usize>), usize> =
            sorted.iter().enumerate().map(|(i, (s, _, es))| ((*s, es.clone()), i)).collect();
        let mors: Vec<(String, usize, usize)> = sorted
            .iter()
            .map(|(s, t, es)| {
                let name = if es.is_empty() {
                    format!("1{}", objects[*s])
                } else {
                    // composition order: last edge leftmost
                    es.iter().rev().map(|&e| edge_names[e].clone()).collect::<Vec<_>>().join(".")
                };
                (name, *s, *t)
            })
            .collect();
        let mut comp = Vec::new();
        for (f, (fs, ft, fe)) in sorted.iter().enumerate() {
            for (g, (gs, _, ge)) in sorted.iter().enumerate() {
                if gs == ft {
                    let mut es = fe.clone();
                    es.extend_from_slice(ge);
                    comp.push((g, f, index[&(*fs, es)]));
                }
            }
        }
        FinCategory::from_parts(objects, mors, (0..n).collect(), &comp).expect("free category is well formed")
    }

    /// The chain `0 → 1 → … → n-1` as a free category.
    pub fn chain(n: usize) -> FinCategory {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        FinCategory::free(&refs, &edges)
    }

    /// The thin category on a preorder given by a reflexive, transitive relation.
    pub fn thin(objects: &[&str], le: impl Fn(usize, usize) -> bool) -> Result<FinCategory> {
        let n = objects.len();
        let mut mors = Vec::new();
        let mut at = HashMap::new();
        for a in 0..n {
            at.insert((a, a), mors.len());
            mors.push((format!("1{}", objects[a]), a, a));
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && le(a, b) {
                    at.insert((a, b), mors.len());
                    mors.push((format!("{}{}", objects[a], objects[b]), a, b));
                }
            }
        }
        let mut comp = Vec::new();
        for (f, &(_, a, b)) in mors.iter().enumerate() {
            for (g, &(_, b2, c)) in mors.iter().enumerate() {
                if b2 == b {
                    let gf = *at.get(&(a, c)).ok_or_else(|| Error::Structure("relation is not transitive".into()))?;
                    comp.push((g, f, gf));
                }
            }
        }
        FinCategory::from_parts(objects.iter().map(|s| s.to_string()).collect(), mors, (0..n).collect(), &comp)
    }

    /// The poset `a ≤ b, c ≤ d` with a commuting square.
    pub fn commuting_square() -> FinCategory {
        let le = |x: usize, y: usize| x == y || x == 0 || y == 3;
        FinCategory::thin(&["a", "b", "c", "d"], le).expect("square is a preorder")
    }

    /// The cyclic group `Z/n` as a one-object category; morphism `k` is `k`.
    pub fn cyclic_group(n: usize) -> FinCategory {
        let mors = (0..n).map(|k| (format!("g{k}"), 0, 0)).collect();
        let comp: Vec<(usize, usize, usize)> = (0..n).flat_map(|g| (0..n).map(move |f| (g, f, (g + f) % n))).collect();
        FinCategory::from_parts(vec!["*".into()], mors, vec![0], &comp).expect("cyclic group is well formed")
    }

    /// The monoid `{1, e}` with `e∘e = e`.
    pub fn idempotent_monoid() -> FinCategory {
        let comp = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)];
        FinCategory::from_parts(vec!["*".into()], vec![("1".into(), 0, 0), ("e".into(), 0, 0)], vec![0], &comp)
            .expect("idempotent monoid is well formed")
    }

    /// Non-identity morphisms that do not factor through two non-identities.
    pub fn indecomposables(&self) -> Vec<usize> {
        self.morphisms()
            .filter(|&m| {
                !self.is_identity(m)
                    && !self.morphisms().any(|f| {
                        !self.is_identity(f)
                            && self.src(f) == self.src(m)
                            && self.hom_out(self.tgt(f)).into_iter().any(|g| !self.is_identity(g) && self.compose(g, f) == m)
                    })
            })
            .collect()
    }

    pub fn num_objects(&self) -> usize {
        self.obj_names.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.mor_names.len()
    }

    pub fn objects(&self) -> std::ops::Range<usize> {
        0..self.obj_names.len()
    }

    pub fn morphisms(&self) -> std::ops::Range<usize> {
        0..self.mor_names.len()
    }

    pub fn obj_name(&self, a: usize) -> &str {
        &self.obj_names[a]
    }

    pub fn mor_name(&self, f: usize) -> &str {
        &self.mor_names[f]
    }

    pub fn object_by_name(&self, name: &str) -> Option<usize> {
        self.obj_names.iter().position(|n| n == name)
    }

    pub fn morphism_by_name(&self, name: &str) -> Option<usize> {
        self.mor_names.iter().position(|n| n == name)
    }

    pub fn src(&self, f: usize) -> usize {
        self.src[f]
    }

    pub fn tgt(&self, f: usize) -> usize {
        self.tgt[f]
    }

    pub fn id(&self, a: usize) -> usize {
        self.ident[a]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.ident[self.src[f]] == f
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.hom[a * self.num_objects() + b]
    }

    /// `g ∘ f`, if both are composable and the entry exists.
    pub fn try_compose(&self, g: usize, f: usize) -> Option<usize> {
        let v = self.comp[g * self.num_morphisms() + f];
        (v != NONE).then_some(v as usize)
    }

    /// `g ∘ f`; panics on a missing entry (validated categories have none).
    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.try_compose(g, f)
            .unwrap_or_else(|| panic!("no composite {}∘{}", self.mor_names[g], self.mor_names[f]))
    }

    /// Same tables, names ignored.
    pub fn same_tables(&self, other: &FinCategory) -> bool {
        self.src == other.src
            && self.tgt == other.tgt
            && self.ident == other.ident
            && self.hom == other.hom
            && self.comp == other.comp
    }

    pub fn is_thin(&self) -> bool {
        self.hom.iter().all(|h| h.len() <= 1)
    }
}

pub fn validate_category(c: &FinCategory) -> std::result::Result<(), CategoryViolation> {
    let name = |f: usize| c.mor_name(f).to_string();
    for f in c.morphisms() {
        for g in c.morphisms() {
            if c.tgt(f) == c.src(g) && c.try_compose(g, f).is_none() {
                return Err(CategoryViolation::MissingComposite { g: name(g), f: name(f) });
            }
        }
    }
    for f in c.morphisms() {
        let l = c.id(c.tgt(f));
        if c.compose(l, f) != f {
            return Err(CategoryViolation::BrokenIdentity { id: name(l), f: name(f) });
        }
        let r = c.id(c.src(f));
        if c.compose(f, r) != f {
            return Err(CategoryViolation::BrokenIdentity { id: name(r), f: name(f) });
        }
    }
    for f in c.morphisms() {
        for g in c.hom_out(c.tgt(f)) {
            let gf = c.compose(g, f);
            for h in c.hom_out(c.tgt(g)) {
                if c.compose(h, gf) != c.compose(c.compose(h, g), f) {
                    return Err(CategoryViolation::BrokenAssociativity { h: name(h), g: name(g), f: name(f) });
                }
            }
        }
    }
    Ok(())
}

impl FinCategory {
    /// Morphisms with the given source, in id order.
    pub fn hom_out(&self, a: usize) -> Vec<usize> {
        self.morphisms().filter(|&f| self.src[f] == a).collect()
    }

    pub fn hom_in(&self, b: usize) -> Vec<usize> {
        self.morphisms().filter(|&f| self.tgt[f] == b).collect()
    }
}

/// Product of categories. Objects and morphisms are tuples ordered
/// lexicographically, first factor most significant. The empty product is
/// the terminal category.
pub fn product_category(cs: &[&FinCategory]) -> FinCategory {
    let obj_tuples = tuples(&cs.iter().map(|c| c.num_objects()).collect::<Vec<_>>());
    let mor_tuples = tuples(&cs.iter().map(|c| c.num_morphisms()).collect::<Vec<_>>());
    let obj_index = |t: &[usize]| -> usize { mixed_index(t, cs.iter().map(|c| c.num_objects())) };
    let mor_index = |t: &[usize]| -> usize { mixed_index(t, cs.iter().map(|c| c.num_morphisms())) };
    let tuple_name = |parts: Vec<&str>| format!("⟨{}⟩", parts.join("×"));
    let obj_names =
        obj_tuples.iter().map(|t| tuple_name(t.iter().zip(cs).map(|(&a, c)| c.obj_name(a)).collect())).collect();
    let mors = mor_tuples
        .iter()
        .map(|t| {
            let name = tuple_name(t.iter().zip(cs).map(|(&f, c)| c.mor_name(f)).collect());
            let s: Vec<usize> = t.iter().zip(cs).map(|(&f, c)| c.src(f)).collect();
            let d: Vec<usize> = t.iter().zip(cs).map(|(&f, c)| c.tgt(f)).collect();
            (name, obj_index(&s), obj_index(&d))
        })
        .collect();
    let ident = obj_tuples
        .iter()
        .map(|t| mor_index(&t.iter().zip(cs).map(|(&a, c)| c.id(a)).collect::<Vec<_>>()))
        .collect();
    let mut comp = Vec::new();
    for (fi, f) in mor_tuples.iter().enumerate() {
        for (gi, g) in mor_tuples.iter().enumerate() {
            let parts: Option<Vec<usize>> =
                g.iter().zip(f).zip(cs).map(|((&gk, &fk), c)| c.try_compose(gk, fk)).collect();
            let composable = g.iter().zip(f).zip(cs).all(|((&gk, &fk), c)| c.tgt(fk) == c.src(gk));
            if composable {
                if let Some(p) = parts {
                    comp.push((gi, fi, mor_index(&p)));
                }
            }
        }
    }
    FinCategory::from_parts(obj_names, mors, ident, &comp).expect("product of valid categories is well formed")
}

/// All tuples over `0..sizes[k]`, lexicographic.
pub fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for i in 0..n {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Lexicographic rank of a tuple in a mixed-radix system.
pub fn mixed_index(t: &[usize], sizes: impl IntoIterator<Item = usize>) -> usize {
    t.iter().zip(sizes).fold(0, |acc, (&x, n)| acc * n + x)
}

/// Opposite category: same ids and names, endpoints swapped, composition reversed.
pub fn opposite_category(c: &FinCategory) -> FinCategory {
    let n = c.num_objects();
    let m = c.num_morphisms();
    let mut hom = vec![Vec::new(); n * n];
    for a in 0..n {
        for b in 0..n {
            hom[a * n + b] = c.hom(b, a).to_vec();
        }
    }
    let mut comp = vec![NONE; m * m];
    for g in 0..m {
        for f in 0..m {
            comp[g * m + f] = c.comp[f * m + g];
        }
    }
    FinCategory {
        obj_names: c.obj_names.clone(),
        mor_names: c.mor_names.clone(),
        src: c.tgt.clone(),
        tgt: c.src.clone(),
        ident: c.ident.clone(),
        hom,
        comp,
    }
}

#[derive(Clone, Debug)]
pub struct FunctorTable {
    pub src: Arc<FinCategory>,
    pub dst: Arc<FinCategory>,
    pub obj_map: Vec<usize>,
    pub mor_map: Vec<usize>,
}

impl FunctorTable {
    pub fn identity(c: &Arc<FinCategory>) -> FunctorTable {
        FunctorTable {
            src: c.clone(),
            dst: c.clone(),
            obj_map: c.objects().collect(),
            mor_map: c.morphisms().collect(),
        }
    }

    /// Checks endpoints, identities and composition exhaustively.
    pub fn validate(&self) -> Result<()> {
        let (c, d) = (&*self.src, &*self.dst);
        if self.obj_map.len() != c.num_objects() || self.mor_map.len() != c.num_morphisms() {
            return Err(Error::Structure("functor tables have the wrong length".into()));
        }
        for f in c.morphisms() {
            let ff = self.mor_map[f];
            if ff >= d.num_morphisms() || d.src(ff) != self.obj_map[c.src(f)] || d.tgt(ff) != self.obj_map[c.tgt(f)] {
                return Err(Error::Invalid(format!("functor does not preserve endpoints of {}", c.mor_name(f))));
            }
        }
        for a in c.objects() {
            if self.mor_map[c.id(a)] != d.id(self.obj_map[a]) {
                return Err(Error::Invalid(format!("functor does not preserve the identity of {}", c.obj_name(a))));
            }
        }
        for f in c.morphisms() {
            for g in c.hom_out(c.tgt(f)) {
                if self.mor_map[c.compose(g, f)] != d.compose(self.mor_map[g], self.mor_map[f]) {
                    return Err(Error::Invalid(format!(
                        "functor does not preserve {}∘{}",
                        c.mor_name(g),
                        c.mor_name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn then(&self, next: &FunctorTable) -> FunctorTable {
        FunctorTable {
            src: self.src.clone(),
            dst: next.dst.clone(),
            obj_map: self.obj_map.iter().map(|&a| next.obj_map[a]).collect(),
            mor_map: self.mor_map.iter().map(|&f| next.mor_map[f]).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NatTransTable {
    pub src: FunctorTable,
    pub dst: FunctorTable,
    pub components: Vec<usize>,
}

impl NatTransTable {
    pub fn validate(&self) -> Result<()> {
        let c = &*self.src.src;
        let d = &*self.src.dst;
        if !Arc::ptr_eq(&self.src.src, &self.dst.src) && *self.src.src != *self.dst.src {
            return Err(Error::TypeMismatch("transformation between functors with different sources".into()));
        }
        for a in c.objects() {
            let k = self.components[a];
            if d.src(k) != self.src.obj_map[a] || d.tgt(k) != self.dst.obj_map[a] {
                return Err(Error::TypeMismatch(format!("component at {} has the wrong type", c.obj_name(a))));
            }
        }
        for f in c.morphisms() {
            let (a, b) = (c.src(f), c.tgt(f));
            let left = d.compose(self.dst.mor_map[f], self.components[a]);
            let right = d.compose(self.components[b], self.src.mor_map[f]);
            if left != right {
                return Err(Error::Invalid(format!("naturality square at {} does not commute", c.mor_name(f))));
            }
        }
        Ok(())
    }
}

pub fn write_category(c: &FinCategory) -> String {
    let mut out = String::new();
    for a in c.objects() {
        out.push_str(&format!("obj {}\n", c.obj_name(a)));
    }
    for f in c.morphisms() {
        out.push_str(&format!("mor {} : {} -> {}\n", c.mor_name(f), c.obj_name(c.src(f)), c.obj_name(c.tgt(f))));
    }
    for a in c.objects() {
        out.push_str(&format!("id {} = {}\n", c.obj_name(a), c.mor_name(c.id(a))));
    }
    for f in c.morphisms() {
        for g in c.morphisms() {
            if c.is_identity(f) || c.is_identity(g) {
                continue;
            }
            if let Some(gf) = c.try_compose(g, f) {
                out.push_str(&format!("comp {} {} = {}\n", c.mor_name(g), c.mor_name(f), c.mor_name(gf)));
            }
        }
    }
    out
}

/// Parses the line format written by [`write_category`]. Composites with an
/// identity may be omitted; they are filled in. Other missing composites are
/// left for validation.
pub fn parse_category(text: &str) -> Result<FinCategory> {
    parse_category_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

pub(crate) fn parse_category_lines<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<FinCategory> {
    let mut objs: Vec<String> = Vec::new();
    let mut obj_ix: HashMap<String, usize> = HashMap::new();
    let mut mors: Vec<(String, usize, usize)> = Vec::new();
    let mut mor_ix: HashMap<String, usize> = HashMap::new();
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut comps: Vec<(usize, usize, usize)> = Vec::new();
    let mut seen_comp: HashMap<(usize, usize), usize> = HashMap::new();
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    for (ln, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "obj" => {
                if toks.len() != 2 {
                    return Err(err(ln, "expected `obj <id>`".into()));
                }
                if obj_ix.contains_key(toks[1]) {
                    return Err(err(ln, format!("duplicate object {}", toks[1])));
                }
                obj_ix.insert(toks[1].to_string(), objs.len());
                objs.push(toks[1].to_string());
            }
            "mor" => {
                if toks.len() != 6 || toks[2] != ":" || toks[4] != "->" {
                    return Err(err(ln, "expected `mor <id> : <src> -> <tgt>`".into()));
                }
                if mor_ix.contains_key(toks[1]) {
                    return Err(err(ln, format!("duplicate morphism {}", toks[1])));
                }
                let s = *obj_ix.get(toks[3]).ok_or_else(|| err(ln, format!("dangling object {}", toks[3])))?;
                let t = *obj_ix.get(toks[5]).ok_or_else(|| err(ln, format!("dangling object {}", toks[5])))?;
                mor_ix.insert(toks[1].to_string(), mors.len());
                mors.push((toks[1].to_string(), s, t));
            }
            "id" => {
                if toks.len() != 4 || toks[2] != "=" {
                    return Err(err(ln, "expected `id <obj> = <mor>`".into()));
                }
                let a = *obj_ix.get(toks[1]).ok_or_else(|| err(ln, format!("dangling object {}", toks[1])))?;
                let f = *mor_ix.get(toks[3]).ok_or_else(|| err(ln, format!("dangling morphism {}", toks[3])))?;
                if ids.insert(a, f).is_some() {
                    return Err(err(ln, format!("duplicate identity for {}", toks[1])));
                }
            }
            "comp" => {
                if toks.len() != 5 || toks[3] != "=" {
                    return Err(err(ln, "expected `comp <g> <f> = <gf>`".into()));
                }
                let look = |t: &str| mor_ix.get(t).copied().ok_or_else(|| err(ln, format!("dangling morphism {t}")));
                let (g, f, gf) = (look(toks[1])?, look(toks[2])?, look(toks[4])?);
                if seen_comp.insert((g, f), gf).is_some() {
                    return Err(err(ln, format!("duplicate composite {} {}", toks[1], toks[2])));
                }
                comps.push((g, f, gf));
            }
            other => return Err(err(ln, format!("unknown directive {other}"))),
        }
    }
    let mut ident = Vec::with_capacity(objs.len());
    for (a, name) in objs.iter().enumerate() {
        ident.push(*ids.get(&a).ok_or_else(|| Error::Parse { line: 0, msg: format!("object {name} has no identity") })?);
    }
    let is_id = |f: usize| ident.contains(&f);
    for f in 0..mors.len() {
        let (s, t) = (mors[f].1, mors[f].2);
        for (g, f2) in [(ident[t], f), (f, ident[s])] {
            if !seen_comp.contains_key(&(g, f2)) && (is_id(g) || is_id(f2)) {
                seen_comp.insert((g, f2), f);
                comps.push((g, f2, f));
            }
        }
    }
    FinCategory::from_parts(objs, mors, ident, &comps).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> FinCategory {
        FinCategory::free(&["a", "b", "c"], &[(0, 1), (1, 2)])
    }

    #[test]
    fn terminal_and_chain_validate() {
        assert_eq!(validate_category(&FinCategory::terminal()), Ok(()));
        let c = chain3();
        assert_eq!(c.num_morphisms(), 6);
        assert_eq!(validate_category(&c), Ok(()));
    }

    #[test]
    fn deleted_composite_is_reported() {
        let c = chain3();
        let ab = c.morphism_by_name("e0").unwrap();
        let bc = c.morphism_by_name("e1").unwrap();
        let mut text = String::new();
        for line in write_category(&c).lines() {
            if line == "comp e1 e0 = e1.e0" {
                continue;
            }
            text.push_str(line);
            text.push('\n');
        }
        let broken = parse_category(&text).unwrap();
        assert_eq!(
            validate_category(&broken),
            Err(CategoryViolation::MissingComposite { g: c.mor_name(bc).into(), f: c.mor_name(ab).into() })
        );
    }

    #[test]
    fn broken_identity_is_reported() {
        // a monoid {1, x} with x∘1 declared as 1
        let c = FinCategory::from_parts(
            vec!["*".into()],
            vec![("1".into(), 0, 0), ("x".into(), 0, 0)],
            vec![0],
            &[(0, 0, 0), (0, 1, 1), (1, 0, 0), (1, 1, 1)],
        )
        .unwrap();
        assert!(matches!(validate_category(&c), Err(CategoryViolation::BrokenIdentity { .. })));
    }

    #[test]
    fn products() {
        let t = product_category(&[]);
        assert_eq!((t.num_objects(), t.num_morphisms()), (1, 1));
        let c = chain3();
        let tc = product_category(&[&FinCategory::terminal(), &c]);
        assert_eq!((tc.num_objects(), tc.num_morphisms()), (c.num_objects(), c.num_morphisms()));
        let w = FinCategory::walking_arrow();
        let ww = product_category(&[&w, &w]);
        assert_eq!((ww.num_objects(), ww.num_morphisms()), (4, 9));
        assert_eq!(validate_category(&ww), Ok(()));
    }

    #[test]
    fn opposite_of_walking_arrow() {
        let w = FinCategory::walking_arrow();
        let o = opposite_category(&w);
        let e = o.morphism_by_name("e0").unwrap();
        assert_eq!((o.src(e), o.tgt(e)), (1, 0));
        assert_eq!(validate_category(&o), Ok(()));
        assert_eq!(opposite_category(&o), w);
        assert_eq!(opposite_category(&FinCategory::terminal()), FinCategory::terminal());
    }

    #[test]
    fn text_roundtrip_and_rejections() {
        let c = chain3();
        assert_eq!(parse_category(&write_category(&c)).unwrap(), c);
        assert!(parse_category("obj a\nobj a\n").is_err());
        assert!(parse_category("obj a\nmor f : a -> b\n").is_err());
        assert!(parse_category("obj a\nid a = g\n").is_err());
    }

    #[test]
    fn functor_and_transformation_checks() {
        let w = Arc::new(FinCategory::walking_arrow());
        let id = FunctorTable::identity(&w);
        assert!(id.validate().is_ok());
        let bad = FunctorTable { obj_map: vec![1, 0], ..id.clone() };
        assert!(bad.validate().is_err());
        let nt = NatTransTable { src: id.clone(), dst: id.clone(), components: vec![w.id(0), w.id(1)] };
        assert!(nt.validate().is_ok());
        // constant functors at a and b, joined by the edge
        let e = w.morphism_by_name("e0").unwrap();
        let ca = FunctorTable { src: w.clone(), dst: w.clone(), obj_map: vec![0, 0], mor_map: vec![w.id(0); 3] };
        let cb = FunctorTable { src: w.clone(), dst: w.clone(), obj_map: vec![1, 1], mor_map: vec![w.id(1); 3] };
        assert!(ca.validate().is_ok() && cb.validate().is_ok());
        let k = NatTransTable { src: ca, dst: cb, components: vec![e, e] };
        assert!(k.validate().is_ok());
    }

    #[test]
    fn hand_written_library_validates() {
        for c in [FinCategory::commuting_square(), FinCategory::cyclic_group(3), FinCategory::idempotent_monoid(), FinCategory::chain(3)] {
            assert_eq!(validate_category(&c), Ok(()));
        }
        let sq = FinCategory::commuting_square();
        assert_eq!(sq.num_morphisms(), 9);
        assert_eq!(sq.indecomposables().len(), 4);
        // chain of 3: three identities, two edges, one composite
        assert_eq!(FinCategory::chain(3).num_morphisms(), 6);
        assert_eq!(FinCategory::cyclic_group(3).indecomposables().len(), 0);
    }
}
