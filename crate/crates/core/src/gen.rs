//! Seeded generation of finite categories, multi-profunctors, functors of
//! several variables, squares, and the per-law instances built from them.
//!
//! Everything is a pure function of the configuration: each instance draws
//! from its own ChaCha stream keyed by (seed, law group, index).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fincat::{tuples, validate_category, write_category, FinCategory};
use crate::multimap::{enumerate_cells, write_profunctor_body, Evaluator, MultiFunctor, MultiMap, MultiProfunctor, TwoCell};
use crate::relmonad::{apply_t, compose_all, Square};

/// Free categories with more morphisms than this are redrawn.
const MAX_MORPHISMS: usize = 16;
/// Objects allowed in the codomain of a tupling.
const MAX_PRODUCT: usize = 9;
/// Candidate budget when searching for 2-cells between generated maps.
const SQUARE_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub max_objects: usize,
    pub max_edges: usize,
    pub max_value_size: usize,
    pub max_arity: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 42, max_objects: 3, max_edges: 3, max_value_size: 2, max_arity: 3 }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_objects == 0 || self.max_arity < 2 {
            return Err(Error::Invalid("need at least one object and arity bound at least 2".into()));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "seed={} max_objects={} max_edges={} max_values={} max_arity={}",
            self.seed, self.max_objects, self.max_edges, self.max_value_size, self.max_arity
        )
    }
}

/// SplitMix64 finaliser, used to derive independent stream seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub struct Gen {
    cfg: GenConfig,
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(cfg: &GenConfig, stream: u64) -> Gen {
        Gen { cfg: cfg.clone(), rng: ChaCha8Rng::seed_from_u64(mix(cfg.seed ^ mix(stream))) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Free category on a random DAG with at most `max_objects` objects and
    /// `max_edges` edges, redrawn until it has at most `MAX_MORPHISMS` morphisms.
    pub fn dag_category(&mut self, max_objects: usize, max_edges: usize) -> FinCategory {
        let names = ["a", "b", "c", "d", "e", "f", "g", "h"];
        loop {
            let n = self.rng.gen_range(1..=max_objects.clamp(1, names.len()));
            let m = if n < 2 { 0 } else { self.rng.gen_range(0..=max_edges) };
            let mut edges = Vec::with_capacity(m);
            for _ in 0..m {
                let a = self.rng.gen_range(0..n - 1);
                let b = self.rng.gen_range(a + 1..n);
                edges.push((a, b));
            }
            edges.sort();
            let c = FinCategory::free(&names[..n], &edges);
            if c.num_morphisms() <= MAX_MORPHISMS {
                debug_assert!(validate_category(&c).is_ok());
                return c;
            }
        }
    }

    /// Mostly free categories on DAGs; sometimes one of the hand-written
    /// non-free categories, to exercise non-trivial endomorphisms and
    /// commuting squares.
    pub fn category(&mut self) -> Arc<FinCategory> {
        let roll = self.rng.gen_range(0..10);
        let c = match roll {
            0 => FinCategory::cyclic_group(2),
            1 => FinCategory::idempotent_monoid(),
            2 if self.cfg.max_objects >= 4 => FinCategory::commuting_square(),
            _ => self.dag_category(self.cfg.max_objects, self.cfg.max_edges),
        };
        Arc::new(c)
    }

    pub fn profunctor(&mut self, codomain: &Arc<FinCategory>, slots: &[Arc<FinCategory>]) -> Result<MultiProfunctor> {
        let pieces = if self.rng.gen_range(0..12) == 0 { 0 } else { self.rng.gen_range(1..=2) };
        let bound = self.cfg.max_value_size;
        let extra = self.rng.gen_bool(0.3);
        random_quotient(&mut self.rng, codomain, slots, pieces, bound, extra)
    }

    pub fn table_map(&mut self, name: &str, codomain: &Arc<FinCategory>, slots: &[Arc<FinCategory>]) -> Result<MultiMap> {
        Ok(MultiMap::table(name, Arc::new(self.profunctor(codomain, slots)?)))
    }

    /// A random functor `c → d`: objects at random, indecomposable morphisms
    /// to random morphisms between the images, everything else by
    /// composition. Redrawn when the result is not a functor; falls back to
    /// a constant functor.
    pub fn unary_functor(&mut self, name: &str, c: &Arc<FinCategory>, d: &Arc<FinCategory>) -> MultiFunctor {
        if c.same_tables(d) && self.rng.gen_bool(0.3) {
            if let Ok(f) = MultiFunctor::from_fn(name, vec![c.clone()], d.clone(), |t| t[0], |_, m, _| m) {
                return f;
            }
        }
        let gens = c.indecomposables();
        for _ in 0..20 {
            let obj: Vec<usize> = c.objects().map(|_| self.rng.gen_range(0..d.num_objects())).collect();
            let mut img: Vec<Option<usize>> = vec![None; c.num_morphisms()];
            for a in c.objects() {
                img[c.id(a)] = Some(d.id(obj[a]));
            }
            let mut ok = true;
            for &m in &gens {
                let cands = d.hom(obj[c.src(m)], obj[c.tgt(m)]);
                match cands.choose(&mut self.rng) {
                    Some(&x) => img[m] = Some(x),
                    None => ok = false,
                }
            }
            if !ok {
                continue;
            }
            let mut changed = true;
            while changed {
                changed = false;
                for m in c.morphisms() {
                    if img[m].is_some() {
                        continue;
                    }
                    let split = c.morphisms().find_map(|f| {
                        let f_img = img[f].filter(|_| c.src(f) == c.src(m) && !c.is_identity(f))?;
                        c.hom_out(c.tgt(f)).into_iter().find_map(|g| {
                            (!c.is_identity(g) && c.compose(g, f) == m).then(|| img[g].map(|gi| d.compose(gi, f_img)))?
                        })
                    });
                    if let Some(x) = split {
                        img[m] = Some(x);
                        changed = true;
                    }
                }
            }
            if img.iter().any(|x| x.is_none()) {
                continue;
            }
            if let Ok(f) = MultiFunctor::from_fn(name, vec![c.clone()], d.clone(), |t| obj[t[0]], |_, m, _| img[m].expect("assigned")) {
                return f;
            }
        }
        let z = self.rng.gen_range(0..d.num_objects());
        MultiFunctor::from_fn(name, vec![c.clone()], d.clone(), |_| z, |_, _, _| d.id(z)).expect("constant functor")
    }

    /// A random functor `slots₁ × … × slotsₙ → d`, combining unary functors
    /// by composition when `d` is a commutative monoid, by maxima when `d` is
    /// a chain, and otherwise through a projection.
    pub fn functor_into(&mut self, name: &str, slots: &[Arc<FinCategory>], d: &Arc<FinCategory>) -> MultiFunctor {
        let n = slots.len();
        if n == 1 {
            return self.unary_functor(name, &slots[0], d);
        }
        let us: Vec<MultiFunctor> = slots.iter().map(|c| self.unary_functor(name, c, d)).collect();
        let u_obj = |k: usize, x: usize| us[k].obj_at(&[x]);
        let u_mor = |k: usize, m: usize, x: usize| us[k].mor_at(0, m, &[x]);
        if d.num_objects() == 1 && is_commutative(d) {
            if let Ok(f) = MultiFunctor::from_fn(name, slots.to_vec(), d.clone(), |_| 0, |k, m, t| u_mor(k, m, t[k])) {
                return f;
            }
        }
        if d.is_thin() && is_total(d) {
            let rank = |x: usize| d.objects().filter(|&y| !d.hom(y, x).is_empty()).count();
            let top = |t: &[usize]| (0..n).map(|k| u_obj(k, t[k])).max_by_key(|&x| rank(x)).expect("non-empty");
            let f = MultiFunctor::from_fn(name, slots.to_vec(), d.clone(), top, |k, m, t| {
                let mut t2 = t.to_vec();
                t2[k] = slots[k].tgt(m);
                d.hom(top(t), top(&t2))[0]
            });
            if let Ok(f) = f {
                return f;
            }
        }
        let r = self.rng.gen_range(0..n);
        let u = &us[r];
        MultiFunctor::from_fn(name, slots.to_vec(), d.clone(), |t| u.obj_at(&[t[r]]), |k, m, t| {
            if k == r {
                u.mor_at(0, m, &[t[r]])
            } else {
                d.id(u.obj_at(&[t[r]]))
            }
        })
        .expect("projection followed by a functor")
    }

    /// A functor of several variables with a codomain of its own choosing:
    /// the tupling into the product, a chain, `Z/3`, or a generated category.
    pub fn functor(&mut self, name: &str, slots: &[Arc<FinCategory>]) -> MultiFunctor {
        let product: usize = slots.iter().map(|c| c.num_objects()).product();
        let roll = self.rng.gen_range(0..4);
        if roll == 0 && slots.len() > 1 && product <= MAX_PRODUCT {
            return MultiFunctor::tupling(name, slots.to_vec());
        }
        let d = match roll {
            1 => Arc::new(FinCategory::chain(self.rng.gen_range(2..=3))),
            2 => Arc::new(FinCategory::cyclic_group(3)),
            _ => self.category(),
        };
        self.functor_into(name, slots, &d)
    }

    fn arity(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi.min(self.cfg.max_arity).max(lo))
    }

    fn categories(&mut self, n: usize) -> Vec<Arc<FinCategory>> {
        (0..n).map(|_| self.category()).collect()
    }

    /// A random square `h ∘ Jf → Tf′ ∘ (g₁,…,gₙ)` with `f` given; `None` when
    /// no cell was found within a few draws.
    pub fn square(&mut self, ev: &Evaluator, f: &Arc<MultiFunctor>, tag: &str) -> Result<Option<Square>> {
        for attempt in 0..6 {
            let slots2 = self.categories(f.arity());
            let f2 = Arc::new(self.functor(&format!("{tag}′"), &slots2));
            let y2 = f2.codomain().clone();
            let h = self.table_map(&format!("h{tag}"), &y2, &[f.codomain().clone()])?;
            let gs: Vec<MultiMap> = (0..f.arity())
                .map(|r| self.table_map(&format!("g{tag}{}", r + 1), &slots2[r], &[f.slots()[r].clone()]))
                .collect::<Result<_>>()?;
            let src = h.reindex(0, f)?;
            let dst = compose_all(&apply_t(&f2)?, &gs)?;
            let mut shuffle = |c: &mut Vec<_>| c.shuffle(&mut self.rng);
            let found = match enumerate_cells(ev, &src, &dst, SQUARE_BUDGET, Some(&mut shuffle), true) {
                Ok(found) => found,
                Err(Error::Budget { .. }) => continue,
                Err(e) => return Err(e),
            };
            if let Some(table) = found.into_iter().next() {
                let alpha = TwoCell::table(&format!("α{tag}"), &src, &dst, table)?;
                return Square::new(h, f.clone(), f2, gs, alpha).map(Some);
            }
            let _ = attempt;
        }
        Ok(None)
    }
}

fn is_commutative(d: &FinCategory) -> bool {
    d.morphisms().all(|f| d.morphisms().all(|g| d.compose(g, f) == d.compose(f, g)))
}

fn is_total(d: &FinCategory) -> bool {
    d.objects().all(|a| d.objects().all(|b| !d.hom(a, b).is_empty() || !d.hom(b, a).is_empty()))
}

/// A union-find with path halving; the generator's own, for congruences.
struct Classes(Vec<usize>);

impl Classes {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }
}

/// A coproduct of `pieces` representables at random generators, quotiented
/// by the congruence generated by random identifications until every value
/// has at most `bound` elements (plus one extra identification if `extra`).
pub fn random_quotient(
    rng: &mut ChaCha8Rng,
    codomain: &Arc<FinCategory>,
    slots: &[Arc<FinCategory>],
    pieces: usize,
    bound: usize,
    extra: bool,
) -> Result<MultiProfunctor> {
    let mut cats: Vec<Arc<FinCategory>> = vec![codomain.clone()];
    cats.extend(slots.iter().cloned());
    let dims: Vec<usize> = cats.iter().map(|c| c.num_objects()).collect();
    let all = tuples(&dims);
    let pieces = if bound == 0 { 0 } else { pieces };
    let gens: Vec<Vec<usize>> = (0..pieces).map(|_| dims.iter().map(|&n| rng.gen_range(0..n)).collect()).collect();
    // an element is (piece, h₀, h₁, …) with h₀ : t₀ → g₀ and hₖ : gₖ → tₖ
    let mut elems: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut at_tuple: Vec<Vec<usize>> = Vec::with_capacity(all.len());
    let mut index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    for t in &all {
        let mut here = Vec::new();
        for (p, g) in gens.iter().enumerate() {
            let homs: Vec<&[usize]> =
                (0..cats.len()).map(|k| if k == 0 { cats[0].hom(t[0], g[0]) } else { cats[k].hom(g[k], t[k]) }).collect();
            let sizes: Vec<usize> = homs.iter().map(|h| h.len()).collect();
            for pick in tuples(&sizes) {
                let hs: Vec<usize> = pick.iter().enumerate().map(|(k, &i)| homs[k][i]).collect();
                index.insert((p, hs.clone()), elems.len());
                here.push(elems.len());
                elems.push((p, hs));
            }
        }
        at_tuple.push(here);
    }
    let tuple_of = |hs: &[usize]| -> Vec<usize> {
        hs.iter().enumerate().map(|(k, &h)| if k == 0 { cats[0].src(h) } else { cats[k].tgt(h) }).collect()
    };
    // images of an element under each applicable action
    let moves = |e: usize| -> Vec<usize> {
        let (p, hs) = &elems[e];
        let t = tuple_of(hs);
        let mut out = Vec::new();
        for (k, c) in cats.iter().enumerate() {
            let ms = if k == 0 { c.hom_in(t[0]) } else { c.hom_out(t[k]) };
            for m in ms {
                let mut h2 = hs.clone();
                h2[k] = if k == 0 { c.compose(hs[0], m) } else { c.compose(m, hs[k]) };
                out.push(index[&(*p, h2)]);
            }
        }
        out
    };
    let mut uf = Classes((0..elems.len()).collect());
    let merge = |uf: &mut Classes, a: usize, b: usize| {
        let mut work = vec![(a, b)];
        while let Some((a, b)) = work.pop() {
            let (ra, rb) = (uf.find(a), uf.find(b));
            if ra == rb {
                continue;
            }
            uf.0[ra.max(rb)] = ra.min(rb);
            work.extend(moves(a).into_iter().zip(moves(b)));
        }
    };
    let classes_at = |uf: &mut Classes, ti: usize| -> Vec<usize> {
        let mut reps: Vec<usize> = at_tuple[ti].iter().map(|&e| uf.find(e)).collect();
        reps.sort();
        reps.dedup();
        reps
    };
    let mut extra = extra;
    loop {
        let sizes: Vec<Vec<usize>> = (0..all.len()).map(|ti| classes_at(&mut uf, ti)).collect();
        let worst = (0..all.len()).max_by_key(|&ti| (sizes[ti].len(), std::cmp::Reverse(ti))).filter(|_| !all.is_empty());
        let target = match worst {
            Some(ti) if sizes[ti].len() > bound => ti,
            _ if extra => {
                extra = false;
                let multi: Vec<usize> = (0..all.len()).filter(|&ti| sizes[ti].len() >= 2).collect();
                match multi.choose(rng) {
                    Some(&ti) => ti,
                    None => break,
                }
            }
            _ => break,
        };
        let cs = &sizes[target];
        let i = rng.gen_range(0..cs.len());
        let mut j = rng.gen_range(0..cs.len() - 1);
        if j >= i {
            j += 1;
        }
        merge(&mut uf, cs[i], cs[j]);
    }
    let reps: Vec<Vec<usize>> = (0..all.len()).map(|ti| classes_at(&mut uf, ti)).collect();
    let pos: HashMap<usize, usize> = reps.iter().flat_map(|r| r.iter().enumerate().map(|(i, &c)| (c, i))).collect();
    let ti_of = |t: &[usize]| crate::fincat::mixed_index(t, dims.iter().copied());
    let value = |t: &[usize]| reps[ti_of(t)].len();
    let mut uf2 = Classes(uf.0.clone());
    MultiProfunctor::from_fn(codomain.clone(), slots.to_vec(), value, |k, m, t| {
        reps[ti_of(t)]
            .iter()
            .map(|&c| {
                let (p, hs) = &elems[c];
                let mut h2 = hs.clone();
                h2[k] = if k == 0 { cats[0].compose(hs[0], m) } else { cats[k].compose(m, hs[k]) };
                pos[&uf2.find(index[&(*p, h2)])]
            })
            .collect()
    })
}

pub fn gen_category(cfg: &GenConfig) -> FinCategory {
    Gen::new(cfg, 0).dag_category(cfg.max_objects, cfg.max_edges)
}

pub fn gen_profunctor(cfg: &GenConfig, slots: &[Arc<FinCategory>], codomain: &Arc<FinCategory>) -> Result<MultiProfunctor> {
    Gen::new(cfg, 1).profunctor(codomain, slots)
}

/// The groups of laws; each has its own instance shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LawGroup {
    RelPseudomonad,
    Strong,
    Multifunctor,
    Pseudocommutative,
    Multicategorical,
    LaxIdempotent,
    Yoneda,
}

impl LawGroup {
    pub const ALL: [LawGroup; 7] = [
        LawGroup::RelPseudomonad,
        LawGroup::Strong,
        LawGroup::Multifunctor,
        LawGroup::Pseudocommutative,
        LawGroup::Multicategorical,
        LawGroup::LaxIdempotent,
        LawGroup::Yoneda,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            LawGroup::RelPseudomonad => "rpm",
            LawGroup::Strong => "strong",
            LawGroup::Multifunctor => "mfun",
            LawGroup::Pseudocommutative => "pscom",
            LawGroup::Multicategorical => "multicat",
            LawGroup::LaxIdempotent => "laxid",
            LawGroup::Yoneda => "yoneda",
        }
    }

    pub fn from_tag(s: &str) -> Option<LawGroup> {
        LawGroup::ALL.into_iter().find(|g| g.tag() == s)
    }
}

impl fmt::Display for LawGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The shapes each law group needs.
#[derive(Clone, Debug)]
pub enum Payload {
    /// A chain `f : X → Psh Y`, `g : Y → Psh Z`, `h : Z → Psh W`.
    Unary { f: MultiMap, g: MultiMap, h: MultiMap },
    /// `f` with slot `j`, `g` into that slot with slot `k`, unary `h` into it.
    Strong { f: MultiMap, j: usize, g: MultiMap, k: usize, h: MultiMap },
    /// Functors `f`, `g` into variable `i` of `f`, `h` into variable `j` of `g`.
    Functors { f: Arc<MultiFunctor>, i: usize, g: Arc<MultiFunctor>, j: usize, h: Arc<MultiFunctor> },
    /// A two-slot `f`, `g` into its first slot (slot `l`), `h` into its
    /// second (slot `m`), and a three-slot `f3`.
    Pscom { f: MultiMap, g: MultiMap, l: usize, h: MultiMap, m: usize, f3: MultiMap },
    /// Composable squares `α : f → f′` and `β : f′ → f″`.
    Squares { alpha: Square, beta: Square },
    /// `f` with slot `j` and a parallel `g` (the cocone target is `g^t ∘ⱼ i`).
    LaxId { f: MultiMap, j: usize, g: MultiMap },
    Categories(Vec<Arc<FinCategory>>),
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub group: LawGroup,
    pub index: usize,
    pub seed: u64,
    pub payload: Payload,
}

fn profunctor_of(f: &MultiMap) -> Option<&Arc<MultiProfunctor>> {
    match f.body() {
        crate::multimap::Body::Table(p) => Some(p),
        _ => None,
    }
}

impl Instance {
    /// Object counts of the categories involved, in order of appearance.
    pub fn sizes(&self) -> Vec<usize> {
        self.categories().iter().map(|c| c.num_objects()).collect()
    }

    pub fn categories(&self) -> Vec<Arc<FinCategory>> {
        let mut out: Vec<Arc<FinCategory>> = Vec::new();
        let mut push = |c: &Arc<FinCategory>| {
            if !out.iter().any(|o| Arc::ptr_eq(o, c)) {
                out.push(c.clone());
            }
        };
        let mut maps = Vec::new();
        let mut funcs = Vec::new();
        match &self.payload {
            Payload::Unary { f, g, h } => maps.extend([f, g, h]),
            Payload::Strong { f, g, h, .. } => maps.extend([f, g, h]),
            Payload::Pscom { f, g, h, f3, .. } => maps.extend([f, g, h, f3]),
            Payload::LaxId { f, g, .. } => maps.extend([f, g]),
            Payload::Functors { f, g, h, .. } => funcs.extend([f, g, h]),
            Payload::Squares { alpha, beta } => {
                for s in [alpha, beta] {
                    funcs.extend([&s.f, &s.f2]);
                }
            }
            Payload::Categories(cs) => cs.iter().for_each(&mut push),
        }
        for m in maps {
            m.slots().iter().for_each(|s| push(s.category()));
            push(m.codomain());
        }
        for f in funcs {
            f.slots().iter().for_each(&mut push);
            push(f.codomain());
        }
        out
    }

    pub fn descriptor(&self) -> String {
        let sizes: Vec<String> = self.sizes().iter().map(|n| n.to_string()).collect();
        format!("{}#{} seed={} objects=[{}]", self.group, self.index, self.seed, sizes.join(","))
    }

    /// The generated tables in the text formats of the category and
    /// profunctor modules.
    pub fn to_text(&self) -> String {
        let cats = self.categories();
        let mut out = String::new();
        for (i, c) in cats.iter().enumerate() {
            out.push_str(&format!("category C{i}\n{}end\n", write_category(c)));
        }
        let cat_name = |c: &Arc<FinCategory>| format!("C{}", cats.iter().position(|o| Arc::ptr_eq(o, c)).unwrap_or(usize::MAX));
        let mut tables: Vec<&MultiMap> = Vec::new();
        match &self.payload {
            Payload::Unary { f, g, h } => tables.extend([f, g, h]),
            Payload::Strong { f, g, h, .. } => tables.extend([f, g, h]),
            Payload::Pscom { f, g, h, f3, .. } => tables.extend([f, g, h, f3]),
            Payload::LaxId { f, g, .. } => tables.extend([f, g]),
            Payload::Squares { alpha, beta } => {
                for s in [alpha, beta] {
                    tables.push(&s.h);
                    tables.extend(s.gs.iter());
                }
            }
            _ => {}
        }
        for t in tables {
            if let Some(p) = profunctor_of(t) {
                let slots: Vec<String> = p.slots().iter().map(cat_name).collect();
                let names: Vec<String> = (1..=p.arity()).map(|k| format!("s{k}")).collect();
                out.push_str(&format!(
                    "profunctor {} : {} -> {}\n{}end\n",
                    t.name(),
                    slots.join(","),
                    cat_name(p.codomain()),
                    write_profunctor_body(p, &names)
                ));
            }
        }
        out
    }
}

fn instance_seed(cfg: &GenConfig, group: LawGroup, index: usize) -> u64 {
    mix(cfg.seed ^ mix((group as u64 + 1) << 32 | index as u64))
}

pub fn gen_instance(cfg: &GenConfig, ev: &Evaluator, group: LawGroup, index: usize) -> Result<Instance> {
    cfg.validate()?;
    let seed = instance_seed(cfg, group, index);
    let mut g = Gen { cfg: cfg.clone(), rng: ChaCha8Rng::seed_from_u64(seed) };
    let payload = match group {
        LawGroup::RelPseudomonad => {
            let [x, y, z, w] = [g.category(), g.category(), g.category(), g.category()];
            Payload::Unary { f: g.table_map("f", &y, &[x])?, g: g.table_map("g", &z, &[y])?, h: g.table_map("h", &w, &[z])? }
        }
        LawGroup::Strong => {
            let n = g.arity(2, 3);
            let fs = g.categories(n);
            let j = g.rng.gen_range(0..n);
            let m = g.arity(1, 2);
            let gs = g.categories(m);
            let k = g.rng.gen_range(0..m);
            let hs = g.categories(1);
            let y = g.category();
            let f = g.table_map("f", &y, &fs)?;
            let gm = g.table_map("g", &fs[j], &gs)?;
            let h = g.table_map("h", &gs[k], &hs)?;
            Payload::Strong { f, j, g: gm, k, h }
        }
        LawGroup::Multifunctor => {
            let n = g.arity(1, 2);
            let xs = g.categories(n);
            let f = Arc::new(g.functor("F", &xs));
            let i = g.rng.gen_range(0..n);
            let m = g.arity(1, 2);
            let ws = g.categories(m);
            let gf = Arc::new(g.functor_into("G", &ws, &xs[i]));
            let j = g.rng.gen_range(0..m);
            let vs = g.categories(1);
            let h = Arc::new(g.functor_into("H", &vs, &ws[j]));
            Payload::Functors { f, i, g: gf, j, h }
        }
        LawGroup::Pseudocommutative => {
            let xs = g.categories(2);
            let y = g.category();
            let f = g.table_map("f", &y, &xs)?;
            let ma = g.arity(1, 2);
            let gsl = g.categories(ma);
            let l = g.rng.gen_range(0..ma);
            let gm = g.table_map("g", &xs[0], &gsl)?;
            let mb = g.arity(1, 2);
            let hsl = g.categories(mb);
            let m = g.rng.gen_range(0..mb);
            let h = g.table_map("h", &xs[1], &hsl)?;
            let x3 = g.categories(3);
            let f3 = g.table_map("k", &y, &x3)?;
            Payload::Pscom { f, g: gm, l, h, m, f3 }
        }
        LawGroup::Multicategorical => {
            let xs = g.categories(2);
            let f = Arc::new(g.functor("F", &xs));
            let alpha = match g.square(ev, &f, "")? {
                Some(a) => a,
                None => Square::unit(&f)?,
            };
            let beta = match g.square(ev, &alpha.f2, "′")? {
                Some(b) => b,
                None => Square::unit(&alpha.f2)?,
            };
            Payload::Squares { alpha, beta }
        }
        LawGroup::LaxIdempotent => {
            let n = g.arity(1, 2);
            let xs = g.categories(n);
            let j = g.rng.gen_range(0..n);
            let y = g.category();
            let f = g.table_map("f", &y, &xs)?;
            let mut target = g.table_map("g", &y, &xs)?;
            // a target without cocones makes the universal property vacuous; `f` itself has at least `t̃`
            let x = xs[j].clone();
            let cocone_target = target.strengthen(j)?.compose(j, &MultiMap::unit(&x))?;
            if enumerate_cells(ev, &f, &cocone_target, SQUARE_BUDGET, None, true)?.is_empty() {
                if let Some(p) = profunctor_of(&f) {
                    target = MultiMap::table("g", p.clone());
                }
            }
            Payload::LaxId { f, j, g: target }
        }
        LawGroup::Yoneda => Payload::Categories(vec![g.category(), Arc::new(g.dag_category(cfg.max_objects, cfg.max_edges))]),
    };
    Ok(Instance { group, index, seed, payload })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_categories_validate() {
        let cfg = GenConfig { seed: 42, max_objects: 4, max_edges: 6, ..GenConfig::default() };
        let c = gen_category(&cfg);
        assert_eq!(validate_category(&c), Ok(()));
        assert!(c.same_tables(&gen_category(&cfg)));
        let one = GenConfig { max_objects: 1, max_edges: 0, ..cfg };
        assert!(gen_category(&one).same_tables(&FinCategory::terminal()));
    }

    #[test]
    fn profunctors_are_functorial_and_bounded() {
        for seed in 0..40 {
            let cfg = GenConfig { seed, ..GenConfig::default() };
            let mut g = Gen::new(&cfg, 7);
            let y = g.category();
            let xs = g.categories(2);
            let p = g.profunctor(&y, &xs).unwrap();
            assert_eq!(p.validate(), Ok(()));
            let dims = p.dims().to_vec();
            assert!(tuples(&dims).iter().all(|t| p.value(t) <= cfg.max_value_size));
        }
    }

    #[test]
    fn zero_bound_gives_empty_profunctor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Arc::new(FinCategory::walking_arrow());
        let p = random_quotient(&mut rng, &x, &[x.clone()], 2, 0, false).unwrap();
        assert_eq!(p.total_size(), 0);
    }

    #[test]
    fn terminal_slots_give_a_presheaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = Arc::new(FinCategory::walking_arrow());
        let t = Arc::new(FinCategory::terminal());
        let p = random_quotient(&mut rng, &y, &[t.clone(), t], 1, 3, false).unwrap();
        assert!(p.presheaf_at(&[0, 0]).validate().is_ok());
    }

    #[test]
    fn functors_validate() {
        for seed in 0..40 {
            let cfg = GenConfig { seed, ..GenConfig::default() };
            let mut g = Gen::new(&cfg, 9);
            let xs = g.categories(2);
            assert!(g.functor("F", &xs).validate().is_ok());
            let d = g.category();
            assert!(g.functor_into("G", &xs, &d).validate().is_ok());
        }
    }

    #[test]
    fn instances_are_deterministic() {
        let cfg = GenConfig::default();
        let ev = Evaluator::default();
        for group in LawGroup::ALL {
            let a = gen_instance(&cfg, &ev, group, 3).unwrap();
            let b = gen_instance(&cfg, &ev, group, 3).unwrap();
            assert_eq!(a.to_text(), b.to_text());
            assert_eq!(a.descriptor(), b.descriptor());
        }
    }
}
