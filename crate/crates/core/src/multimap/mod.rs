//! Multimorphisms `B₁,…,Bₙ → Psh Y` as expression trees over finite tables,
//! strengthenings and substitutions, together with 2-cells between them.
//!
//! A slot is either a finite category `X` (an image of `J`) or a presheaf
//! category `Psh X`. All-finite maps are backed by multi-profunctors, i.e.
//! set-valued functors on `Y^op × B₁ × … × Bₙ`.

mod cell;
mod enumerate;
mod equal;
mod eval;
mod profunctor;

pub use cell::{CellBody, CellTable, Mutation, TwoCell};
pub use enumerate::{enumerate_cells, Shuffle};
pub use equal::{sample_family, two_cell_equal, Policy, SampleArg, Verdict, Witness};
pub use eval::{Coend, EvalStats, Evaluator, DEFAULT_COEND_BUDGET};
pub use profunctor::{parse_profunctor_body, write_profunctor_body, MultiFunctor, MultiProfunctor};

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::FinCategory;
use crate::presheaf::{Presheaf, PresheafMorphism};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

pub(crate) fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

pub(crate) fn same_cat(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[derive(Clone, Debug)]
pub enum SlotType {
    Fin(Arc<FinCategory>),
    Psh(Arc<FinCategory>),
}

impl SlotType {
    pub fn category(&self) -> &Arc<FinCategory> {
        match self {
            SlotType::Fin(c) | SlotType::Psh(c) => c,
        }
    }

    pub fn is_fin(&self) -> bool {
        matches!(self, SlotType::Fin(_))
    }
}

impl PartialEq for SlotType {
    fn eq(&self, other: &SlotType) -> bool {
        match (self, other) {
            (SlotType::Fin(a), SlotType::Fin(b)) | (SlotType::Psh(a), SlotType::Psh(b)) => same_cat(a, b),
            _ => false,
        }
    }
}

/// An argument for one slot: an object of a finite slot or a presheaf.
#[derive(Clone, Debug)]
pub enum Arg {
    Obj(usize),
    Psh(Arc<Presheaf>),
}

/// A morphism argument for one slot.
#[derive(Clone, Debug)]
pub enum MorArg {
    Mor(usize),
    Nat(Arc<PresheafMorphism>),
}

impl MorArg {
    pub fn target(&self, slot: &SlotType) -> Arg {
        match self {
            MorArg::Mor(m) => Arg::Obj(slot.category().tgt(*m)),
            MorArg::Nat(phi) => Arg::Psh(phi.dst.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Body {
    Table(Arc<MultiProfunctor>),
    /// Left Kan extension along the Yoneda embedding in one finite slot.
    Strengthen(MultiMap, usize),
    /// `f ∘ᵢ g`: `g` substituted into the presheaf slot `i` of `f`.
    Compose(MultiMap, usize, MultiMap),
    /// Precomposition of a finite slot with a functor of several variables.
    Reindex(MultiMap, usize, Arc<MultiFunctor>),
    /// A finite slot fixed to one object.
    PlugObject(MultiMap, usize, usize),
    /// The Yoneda embedding `X → Psh X`.
    Unit(Arc<FinCategory>),
    /// The identity `Psh X → Psh X`.
    Ident(Arc<FinCategory>),
}

#[derive(Debug)]
pub struct MapNode {
    id: u64,
    name: String,
    slots: Vec<SlotType>,
    codomain: Arc<FinCategory>,
    body: Body,
}

/// A multimorphism into a presheaf category; cheap to clone.
#[derive(Clone, Debug)]
pub struct MultiMap(Arc<MapNode>);

impl PartialEq for MultiMap {
    fn eq(&self, other: &MultiMap) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.slots != other.0.slots || !same_cat(&self.0.codomain, &other.0.codomain) {
            return false;
        }
        match (&self.0.body, &other.0.body) {
            (Body::Table(a), Body::Table(b)) => Arc::ptr_eq(a, b) || a == b,
            (Body::Strengthen(f, i), Body::Strengthen(g, j)) => i == j && f == g,
            (Body::Compose(f, i, g), Body::Compose(f2, i2, g2)) => i == i2 && f == f2 && g == g2,
            (Body::Reindex(f, i, a), Body::Reindex(g, j, b)) => i == j && (Arc::ptr_eq(a, b) || a == b) && f == g,
            (Body::PlugObject(f, i, a), Body::PlugObject(g, j, b)) => i == j && a == b && f == g,
            (Body::Unit(a), Body::Unit(b)) | (Body::Ident(a), Body::Ident(b)) => same_cat(a, b),
            _ => false,
        }
    }
}

impl Eq for MultiMap {}

impl fmt::Display for MultiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

fn wrap(name: &str) -> String {
    if name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
        name.to_string()
    } else {
        format!("({name})")
    }
}

impl MultiMap {
    fn make(name: String, slots: Vec<SlotType>, codomain: Arc<FinCategory>, body: Body) -> MultiMap {
        MultiMap(Arc::new(MapNode { id: fresh_id(), name, slots, codomain, body }))
    }

    pub fn table(name: &str, p: Arc<MultiProfunctor>) -> MultiMap {
        let slots = p.slots().iter().map(|c| SlotType::Fin(c.clone())).collect();
        MultiMap::make(name.to_string(), slots, p.codomain().clone(), Body::Table(p))
    }

    pub fn unit(x: &Arc<FinCategory>) -> MultiMap {
        MultiMap::make("i".into(), vec![SlotType::Fin(x.clone())], x.clone(), Body::Unit(x.clone()))
    }

    pub fn ident(x: &Arc<FinCategory>) -> MultiMap {
        MultiMap::make("1".into(), vec![SlotType::Psh(x.clone())], x.clone(), Body::Ident(x.clone()))
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn slots(&self) -> &[SlotType] {
        &self.0.slots
    }

    pub fn arity(&self) -> usize {
        self.0.slots.len()
    }

    pub fn codomain(&self) -> &Arc<FinCategory> {
        &self.0.codomain
    }

    pub fn body(&self) -> &Body {
        &self.0.body
    }

    pub fn is_all_fin(&self) -> bool {
        self.0.slots.iter().all(SlotType::is_fin)
    }

    /// `f^{t_j}`: the finite slot `j` becomes a presheaf slot.
    pub fn strengthen(&self, j: usize) -> Result<MultiMap> {
        match self.0.slots.get(j) {
            Some(SlotType::Fin(x)) => {
                let mut slots = self.0.slots.clone();
                slots[j] = SlotType::Psh(x.clone());
                Ok(MultiMap::make(format!("{}^t{}", wrap(&self.0.name), j + 1), slots, self.0.codomain.clone(), Body::Strengthen(self.clone(), j)))
            }
            Some(SlotType::Psh(_)) => Err(Error::SlotMismatch(format!("slot {} of {} is already a presheaf slot", j + 1, self))),
            None => Err(Error::SlotMismatch(format!("{} has no slot {}", self, j + 1))),
        }
    }

    /// Strengthens the given slots in order, leftmost applied first.
    pub fn strengthen_all(&self, order: &[usize]) -> Result<MultiMap> {
        order.iter().try_fold(self.clone(), |f, &j| f.strengthen(j))
    }

    /// `f ∘ᵢ g`, splicing the slots of `g` in at position `i`.
    pub fn compose(&self, i: usize, g: &MultiMap) -> Result<MultiMap> {
        match self.0.slots.get(i) {
            Some(SlotType::Psh(x)) if same_cat(x, g.codomain()) => {
                let mut slots = self.0.slots[..i].to_vec();
                slots.extend(g.slots().iter().cloned());
                slots.extend(self.0.slots[i + 1..].iter().cloned());
                let name = format!("{} ∘{} {}", wrap(&self.0.name), i + 1, wrap(g.name()));
                Ok(MultiMap::make(name, slots, self.0.codomain.clone(), Body::Compose(self.clone(), i, g.clone())))
            }
            Some(_) => Err(Error::SlotMismatch(format!("slot {} of {} does not accept {}", i + 1, self, g))),
            None => Err(Error::SlotMismatch(format!("{} has no slot {}", self, i + 1))),
        }
    }

    /// `f ∘ᵢ F` for a functor `F : C₁ × … × Cₘ → X` into the finite slot `i`.
    pub fn reindex(&self, i: usize, func: &Arc<MultiFunctor>) -> Result<MultiMap> {
        match self.0.slots.get(i) {
            Some(SlotType::Fin(x)) if same_cat(x, func.codomain()) => {
                let mut slots = self.0.slots[..i].to_vec();
                slots.extend(func.slots().iter().map(|c| SlotType::Fin(c.clone())));
                slots.extend(self.0.slots[i + 1..].iter().cloned());
                let name = format!("{} ∘{} J{}", wrap(&self.0.name), i + 1, func.name());
                Ok(MultiMap::make(name, slots, self.0.codomain.clone(), Body::Reindex(self.clone(), i, func.clone())))
            }
            Some(_) => Err(Error::SlotMismatch(format!("slot {} of {} does not accept J{}", i + 1, self, func.name()))),
            None => Err(Error::SlotMismatch(format!("{} has no slot {}", self, i + 1))),
        }
    }

    pub fn plug_object(&self, i: usize, a: usize) -> Result<MultiMap> {
        match self.0.slots.get(i) {
            Some(SlotType::Fin(x)) if a < x.num_objects() => {
                let mut slots = self.0.slots.clone();
                slots.remove(i);
                let name = format!("{}[{}:={}]", wrap(&self.0.name), i + 1, x.obj_name(a));
                Ok(MultiMap::make(name, slots, self.0.codomain.clone(), Body::PlugObject(self.clone(), i, a)))
            }
            _ => Err(Error::SlotMismatch(format!("cannot plug an object into slot {} of {}", i + 1, self))),
        }
    }

    /// Checks that arguments match the slot types.
    pub fn check_args(&self, args: &[Arg]) -> Result<()> {
        if args.len() != self.arity() {
            return Err(Error::TypeMismatch(format!("{} expects {} arguments, got {}", self, self.arity(), args.len())));
        }
        for (k, (s, a)) in self.0.slots.iter().zip(args).enumerate() {
            let ok = match (s, a) {
                (SlotType::Fin(c), Arg::Obj(x)) => *x < c.num_objects(),
                (SlotType::Psh(c), Arg::Psh(p)) => same_cat(c, p.base()),
                _ => false,
            };
            if !ok {
                return Err(Error::TypeMismatch(format!("argument {} of {} has the wrong type", k + 1, self)));
            }
        }
        Ok(())
    }
}

/// Human-readable rendering of an argument tuple.
pub fn describe_args(slots: &[SlotType], args: &[Arg], names: &[Option<String>]) -> String {
    let parts: Vec<String> = args
        .iter()
        .enumerate()
        .map(|(k, a)| match a {
            Arg::Obj(x) => slots[k].category().obj_name(*x).to_string(),
            Arg::Psh(p) => match names.get(k).and_then(|n| n.clone()) {
                Some(n) => n,
                None => format!("P{:?}", p.sizes()),
            },
        })
        .collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_bookkeeping() {
        let x = Arc::new(FinCategory::walking_arrow());
        let i = MultiMap::unit(&x);
        let it = i.strengthen(0).unwrap();
        assert!(!it.slots()[0].is_fin());
        assert!(it.strengthen(0).is_err());
        let c = it.compose(0, &i).unwrap();
        assert_eq!(c.arity(), 1);
        assert!(c.slots()[0].is_fin());
        assert!(i.compose(0, &i).is_err());
        assert_eq!(i.strengthen(0).unwrap(), it);
        assert_ne!(it, i);
    }
}
