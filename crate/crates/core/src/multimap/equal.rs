//! Deciding equality of parallel 2-cells.
//!
//! `Transpose` is exact: a cell out of an iterated strengthening is determined
//! by its transpose along the strengthening adjunction, so both cells are
//! transposed until no presheaf slot remains and then compared on every object
//! tuple. `Sample` compares components at a fixed family of presheaf
//! arguments; a failure is a genuine counterexample, a pass is evidence only.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{tuples, FinCategory};
use crate::presheaf::{coproduct, pushout, representable, yoneda_action, Presheaf};

use super::{describe_args, Arg, Body, Evaluator, MultiMap, SlotType, TwoCell};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Policy {
    Transpose,
    Sample,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Transpose => "TRANSPOSE",
            Policy::Sample => "SAMPLE",
        })
    }
}

/// A named presheaf argument used by the `Sample` policy.
#[derive(Clone, Debug)]
pub struct SampleArg {
    pub name: String,
    pub presheaf: Arc<Presheaf>,
}

/// A concrete point where two cells disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub args: String,
    pub object: String,
    pub element: String,
    pub left: String,
    pub right: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {} object {} element {}: {} vs {}", self.args, self.object, self.element, self.left, self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub policy: Policy,
    /// Argument tuples compared.
    pub compared: usize,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Representables `y a`, sums `y a + y b` for `a ≤ b`, and one gluing
/// `y a ⊔_{y c} y a` along the first non-identity morphism `c → a`.
pub fn sample_family(x: &Arc<FinCategory>) -> Result<Vec<SampleArg>> {
    let ys: Vec<Arc<Presheaf>> = x.objects().map(|a| representable(x, a).map(Arc::new)).collect::<Result<_>>()?;
    let mut out: Vec<SampleArg> =
        x.objects().map(|a| SampleArg { name: format!("y{}", x.obj_name(a)), presheaf: ys[a].clone() }).collect();
    for a in x.objects() {
        for b in a..x.num_objects() {
            out.push(SampleArg {
                name: format!("y{}+y{}", x.obj_name(a), x.obj_name(b)),
                presheaf: Arc::new(coproduct(&ys[a], &ys[b])?),
            });
        }
    }
    if let Some(m) = x.morphisms().find(|&m| !x.is_identity(m)) {
        let ym = yoneda_action(x, m)?;
        let a = x.obj_name(x.tgt(m));
        out.push(SampleArg { name: format!("y{a}⊔[{}]y{a}", x.mor_name(m)), presheaf: Arc::new(pushout(&ym, &ym)?) });
    }
    Ok(out)
}

fn parallel(a: &TwoCell, b: &TwoCell) -> bool {
    let (s, t) = (a.src(), b.src());
    s.slots() == t.slots() && a.dst().slots() == s.slots() && b.dst().slots() == s.slots() && super::same_cat(s.codomain(), t.codomain())
}

/// Decides `α = β` under the given policy.
pub fn two_cell_equal(ev: &Evaluator, alpha: &TwoCell, beta: &TwoCell, policy: Policy) -> Result<Verdict> {
    if !parallel(alpha, beta) {
        return Err(Error::SlotMismatch(format!("{alpha} and {beta} are not parallel")));
    }
    match policy {
        Policy::Transpose => {
            let (mut a, mut b) = (alpha.clone(), beta.clone());
            while !a.src().is_all_fin() {
                let j = outer_strengthening(a.src())?;
                a = a.transpose(j)?;
                b = b.transpose(j)?;
            }
            let dims: Vec<usize> = a.src().slots().iter().map(|s| s.category().num_objects()).collect();
            let mut compared = 0;
            for t in tuples(&dims) {
                let args: Vec<Arg> = t.into_iter().map(Arg::Obj).collect();
                compared += 1;
                if let Some(w) = compare_at(ev, &a, &b, &args, &[])? {
                    return Ok(Verdict { policy, compared, witness: Some(w) });
                }
            }
            Ok(Verdict { policy, compared, witness: None })
        }
        Policy::Sample => {
            let slots = alpha.src().slots().to_vec();
            let mut choices: Vec<Vec<(Arg, Option<String>)>> = Vec::with_capacity(slots.len());
            for s in &slots {
                choices.push(match s {
                    SlotType::Fin(c) => c.objects().map(|x| (Arg::Obj(x), None)).collect(),
                    SlotType::Psh(c) => {
                        sample_family(c)?.into_iter().map(|s| (Arg::Psh(s.presheaf), Some(s.name))).collect()
                    }
                });
            }
            let dims: Vec<usize> = choices.iter().map(Vec::len).collect();
            let mut compared = 0;
            for t in tuples(&dims) {
                let args: Vec<Arg> = t.iter().enumerate().map(|(k, &i)| choices[k][i].0.clone()).collect();
                let names: Vec<Option<String>> = t.iter().enumerate().map(|(k, &i)| choices[k][i].1.clone()).collect();
                compared += 1;
                if let Some(w) = compare_at(ev, alpha, beta, &args, &names)? {
                    return Ok(Verdict { policy, compared, witness: Some(w) });
                }
            }
            Ok(Verdict { policy, compared, witness: None })
        }
    }
}

/// The slot of the outermost strengthening of a map, if it is one.
fn outer_strengthening(f: &MultiMap) -> Result<usize> {
    match f.body() {
        Body::Strengthen(_, j) => Ok(*j),
        _ => Err(Error::NotExtension(format!("{f} is not an iterated strengthening; use the SAMPLE policy"))),
    }
}

fn compare_at(ev: &Evaluator, a: &TwoCell, b: &TwoCell, args: &[Arg], names: &[Option<String>]) -> Result<Option<Witness>> {
    let pa = ev.component(a, args)?;
    let pb = ev.component(b, args)?;
    let y = a.src().codomain();
    let at = describe_args(a.src().slots(), args, names);
    for (which, l, r) in [("source", &pa.src, &pb.src), ("target", &pa.dst, &pb.dst)] {
        if !(Arc::ptr_eq(l, r) || **l == **r) {
            return Ok(Some(Witness {
                args: at,
                object: "-".into(),
                element: "-".into(),
                left: format!("{which} sizes {:?}", l.sizes()),
                right: format!("{which} sizes {:?}", r.sizes()),
            }));
        }
    }
    for z in y.objects() {
        if let Some(e) = (0..pa.comps[z].len()).find(|&e| pa.comps[z][e] != pb.comps[z][e]) {
            return Ok(Some(Witness {
                args: at,
                object: y.obj_name(z).to_string(),
                element: pa.src.at(z).label(e),
                left: pa.dst.at(z).label(pa.comps[z][e]),
                right: pb.dst.at(z).label(pb.comps[z][e]),
            }));
        }
    }
    Ok(None)
}

impl TwoCell {
    /// The transpose `(α ∘ⱼ i) · t̃_f` of a cell `α` out of `f^{t_j}`.
    pub fn transpose(&self, j: usize) -> Result<TwoCell> {
        let f = match self.src().body() {
            Body::Strengthen(f, k) if *k == j => f.clone(),
            _ => return Err(Error::NotExtension(format!("source of {self} is not a strengthening in slot {}", j + 1))),
        };
        let x = f.slots()[j].category().clone();
        let unit = TwoCell::unit_tilde(&f, j)?;
        let whiskered = TwoCell::pre_whisker(self, j, &MultiMap::unit(&x))?;
        TwoCell::vert(&[unit, whiskered])
    }
}
