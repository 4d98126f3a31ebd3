//! Coherence laws as pairs of composite 2-cells, decided by
//! [`two_cell_equal`], plus the defect injectors used to show each law can
//! fail.
//!
//! Every law is built from the named structural cells; the anonymous `∼`
//! cells between them are canonical comparisons, which fail loudly if the
//! two boundaries do not evaluate to identical tables.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{tuples, FinCategory};
use crate::gen::{gen_instance, GenConfig, Instance, LawGroup, Payload};
use crate::kan::{mult_cell, theta_cell, untranspose};
use crate::multimap::{
    enumerate_cells, sample_family, two_cell_equal, Arg, Body, Evaluator, MultiFunctor, MultiMap, MultiProfunctor, Mutation,
    Policy, SlotType, TwoCell, Verdict,
};
use crate::presheaf::{enumerate_nat_trans, representable, yoneda_action, DEFAULT_NAT_BUDGET};
use crate::relmonad::{
    apply_t, chain, chain_to, compose_all, extend_square, fubini_disagreement, gamma, gamma_inv, gamma_word, sorting_word,
    t_hat, unit_square, Square,
};

/// Deliberate defects, each caught by at least one law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Injector {
    /// Two images of `θ` swapped.
    ThetaCorrupt,
    /// Two images of `t̂` swapped.
    ThatCorrupt,
    /// `γ` replaced by the index identity.
    GammaIdentity,
    /// `T̂` claimed to land in `Tf` strengthened in the reverse order.
    ScrambledT,
    /// `t̃` perturbed at a single object tuple, so it is no longer natural.
    BrokenNaturality,
    /// One action entry of a generated profunctor changed so it is no longer a functor.
    BrokenContravariance,
    /// Two images of the counit `σ` swapped.
    CounitCorrupt,
}

impl Injector {
    pub const ALL: [Injector; 7] = [
        Injector::ThetaCorrupt,
        Injector::ThatCorrupt,
        Injector::GammaIdentity,
        Injector::ScrambledT,
        Injector::BrokenNaturality,
        Injector::BrokenContravariance,
        Injector::CounitCorrupt,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Injector::ThetaCorrupt => "theta-corrupt",
            Injector::ThatCorrupt => "that-corrupt",
            Injector::GammaIdentity => "gamma-identity",
            Injector::ScrambledT => "scrambled-T",
            Injector::BrokenNaturality => "broken-naturality",
            Injector::BrokenContravariance => "broken-contravariance",
            Injector::CounitCorrupt => "counit-corrupt",
        }
    }

    pub fn from_tag(s: &str) -> Result<Injector> {
        Injector::ALL.into_iter().find(|i| i.tag() == s).ok_or(Error::Unknown { kind: "injector", name: s.into() })
    }
}

impl fmt::Display for Injector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One law: its id, group, and the two legs being compared.
pub struct LawSpec {
    pub id: &'static str,
    pub group: LawGroup,
    pub statement: &'static str,
}

pub const LAWS: &[LawSpec] = &[
    LawSpec { id: "rpm.assoc", group: LawGroup::RelPseudomonad, statement: "μ_{h*g,f} ; μ_{h,g}f*  =  (μ_{h,g}f)* ; ∼ ; μ_{h,g*f} ; h*μ_{g,f}" },
    LawSpec { id: "rpm.unit", group: LawGroup::RelPseudomonad, statement: "(η_f)* ; μ_{f,i} ; f*θ  =  1_{f*}" },
    LawSpec { id: "rpm.lemma1", group: LawGroup::RelPseudomonad, statement: "η_{g*f} ; μ_{g,f}i  =  g*η_f" },
    LawSpec { id: "rpm.lemma2", group: LawGroup::RelPseudomonad, statement: "μ_{i,f} ; θf*  =  (θf)*" },
    LawSpec { id: "rpm.lemma3", group: LawGroup::RelPseudomonad, statement: "η_i ; θi  =  1_i" },
    LawSpec { id: "strong.pentagon", group: LawGroup::Strong, statement: "t̂_{f^t∘g,h} ; t̂_{f,g}h^t  =  (t̂_{f,g}h)^t ; ∼ ; t̂_{f,g^t∘h} ; f^t∘t̂_{g,h}" },
    LawSpec { id: "strong.unit", group: LawGroup::Strong, statement: "(t̃_f)^t ; t̂_{f,i} ; f^t∘θ  =  1_{f^t}" },
    LawSpec { id: "strong.lemma1", group: LawGroup::Strong, statement: "t̃_{f^t∘g} ; t̂_{f,g}∘i  =  f^t∘t̃_g" },
    LawSpec { id: "strong.lemma2", group: LawGroup::Strong, statement: "t̂_{i,f} ; θ∘f^t  =  (θ∘f)^t" },
    LawSpec { id: "strong.lemma3", group: LawGroup::Strong, statement: "t̃_i ; θ∘i  =  1_i" },
    LawSpec { id: "mfun.unit-left", group: LawGroup::Multifunctor, statement: "T̂_{1,f} ; T̃∘Tf  =  ∼" },
    LawSpec { id: "mfun.unit-right", group: LawGroup::Multifunctor, statement: "T̂_{f,1} ; Tf∘T̃  =  ∼" },
    LawSpec { id: "mfun.assoc", group: LawGroup::Multifunctor, statement: "T̂_{f,g∘h} ; Tf∘T̂_{g,h}  =  ∼ ; T̂_{f∘g,h} ; T̂_{f,g}∘Th" },
    LawSpec { id: "mfun.invertible", group: LawGroup::Multifunctor, statement: "T̂_{f,g} and T̃ have bijective components" },
    LawSpec { id: "pscom.1", group: LawGroup::Pseudocommutative, statement: "t̃_{f^t} ; γ_f∘i  =  (t̃_f)^t" },
    LawSpec { id: "pscom.2", group: LawGroup::Pseudocommutative, statement: "(t̃_f)^s ; ∼ ; γ_f∘i  =  t̃_{f^s}" },
    LawSpec { id: "pscom.3", group: LawGroup::Pseudocommutative, statement: "t̂_{f^t,g} ; γ_f∘g^t  =  (γ_f∘g)^t ; ∼ ; γ_{f^s∘g} ; (t̂_{f,g})^t" },
    LawSpec { id: "pscom.4", group: LawGroup::Pseudocommutative, statement: "(t̂_{f,h})^s ; ∼ ; γ_f∘h^t  =  γ_{f^t∘h} ; ∼ ; (γ_f∘h)^t ; t̂_{f^s,h}" },
    LawSpec { id: "pscom.5", group: LawGroup::Pseudocommutative, statement: "(γ_{f})^s ; γ_{f^t} ; (γ_f)^u  =  γ_{f^u} ; (γ_f)^t ; γ_{f^s}" },
    LawSpec { id: "pscom.inverse", group: LawGroup::Pseudocommutative, statement: "γ ; γ⁻¹  =  1  and  γ⁻¹ ; γ  =  1" },
    LawSpec { id: "pscom.fubini", group: LawGroup::Pseudocommutative, statement: "γ agrees with the flat double-coend quotient" },
    LawSpec { id: "braiding", group: LawGroup::Pseudocommutative, statement: "γ_σ is independent of the word in adjacent transpositions" },
    LawSpec { id: "multicat.eta", group: LawGroup::Multicategorical, statement: "t̃_h Jf ; ∼ ; h*ī_f ; ∼ ; α*(i,…,i)  =  α ; Tf′(t̃_{g₁},…,t̃_{gₙ}) ; ∼" },
    LawSpec { id: "multicat.mu", group: LawGroup::Multicategorical, statement: "μ_{h′,h}Tf ; ∼ ; h′*α* ; ∼ ; β*(g*)  =  (β·α)* ; Tf″(μ_{g′,g},…)" },
    LawSpec { id: "multicat.theta", group: LawGroup::Multicategorical, statement: "ī_f* ; Tf(θ,…,θ) ; ∼  =  θTf ; ∼" },
    LawSpec { id: "laxid.unit-invertible", group: LawGroup::LaxIdempotent, statement: "t̃_f ; t̃_f⁻¹  =  1  and  t̃_f⁻¹ ; t̃_f  =  1" },
    LawSpec { id: "laxid.triangle-1", group: LawGroup::LaxIdempotent, statement: "(t̃_f)^t ; σ_{f^t}  =  1_{f^t}" },
    LawSpec { id: "laxid.triangle-2", group: LawGroup::LaxIdempotent, statement: "t̃_{h∘i} ; σ_h∘i  =  1_{h∘i}" },
    LawSpec { id: "laxid.kan", group: LawGroup::LaxIdempotent, statement: "every cocone f ⇒ g^t∘i factors uniquely through t̃_f" },
    LawSpec { id: "yoneda", group: LawGroup::Yoneda, statement: "Nat(y a, y b) is exactly y applied to hom(a, b)" },
];

pub fn law(id: &str) -> Option<&'static LawSpec> {
    LAWS.iter().find(|l| l.id == id)
}

/// Expands a comma-separated filter of law ids, group tags, or `all`.
pub fn select_laws(filter: &str) -> Result<Vec<&'static str>> {
    let mut out = Vec::new();
    for part in filter.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let hits: Vec<&'static str> = if part == "all" {
            LAWS.iter().map(|l| l.id).collect()
        } else if let Some(g) = LawGroup::from_tag(part) {
            LAWS.iter().filter(|l| l.group == g).map(|l| l.id).collect()
        } else if let Some(l) = law(part) {
            vec![l.id]
        } else {
            return Err(Error::Unknown { kind: "law", name: part.into() });
        };
        for h in hits {
            if !out.contains(&h) {
                out.push(h);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Invalid("empty law filter".into()));
    }
    Ok(LAWS.iter().map(|l| l.id).filter(|id| out.contains(id)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub law: &'static str,
    pub instance: String,
    pub policy: Policy,
    pub status: Status,
    /// Argument tuples compared; a machine-independent cost measure.
    pub compared: usize,
    /// Coend elements processed by the evaluator for this instance so far.
    pub work: usize,
    pub witness: Option<String>,
}

/// How equalities are decided: exactly wherever possible, or by sampling only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyChoice {
    /// `TRANSPOSE` where both sides start at an iterated strengthening or an
    /// all-finite map, `SAMPLE` otherwise.
    Exact,
    Sample,
}

impl PolicyChoice {
    pub fn parse(s: &str) -> Result<PolicyChoice> {
        match s {
            "transpose" | "exact" | "auto" => Ok(PolicyChoice::Exact),
            "sample" => Ok(PolicyChoice::Sample),
            _ => Err(Error::Unknown { kind: "policy", name: s.into() }),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            PolicyChoice::Exact => "transpose",
            PolicyChoice::Sample => "sample",
        }
    }
}

/// What a law check produced before it is turned into a report.
struct Outcome {
    policy: Policy,
    compared: usize,
    witness: Option<String>,
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Outcome {
        Outcome { policy: v.policy, compared: v.compared, witness: v.witness.map(|w| w.to_string()) }
    }
}

/// The cells used by the laws, with the active injector applied.
pub struct Ctx<'a> {
    pub ev: &'a Evaluator,
    pub choice: PolicyChoice,
    pub inject: Option<Injector>,
}

impl Ctx<'_> {
    fn is(&self, i: Injector) -> bool {
        self.inject == Some(i)
    }

    pub fn theta(&self, x: &Arc<FinCategory>) -> Result<TwoCell> {
        let c = theta_cell(x)?.cell;
        Ok(if self.is(Injector::ThetaCorrupt) { TwoCell::mutated(&c, Mutation::SwapImages) } else { c })
    }

    pub fn mult(&self, f: &MultiMap, j: usize, g: &MultiMap, k: usize) -> Result<TwoCell> {
        let c = mult_cell(f, j, g, k)?.cell;
        Ok(if self.is(Injector::ThatCorrupt) { TwoCell::mutated(&c, Mutation::SwapImages) } else { c })
    }

    pub fn unit_tilde(&self, f: &MultiMap, j: usize) -> Result<TwoCell> {
        let c = TwoCell::unit_tilde(f, j)?;
        if self.is(Injector::BrokenNaturality) {
            let fin = f.slots().iter().filter(|s| s.is_fin()).count();
            let mut at = vec![0; fin];
            // the last object, so a non-identity morphism usually arrives there
            if let Some(SlotType::Fin(x)) = f.slots().get(j) {
                let pos = f.slots()[..j].iter().filter(|s| s.is_fin()).count();
                at[pos] = x.num_objects() - 1;
            }
            return Ok(TwoCell::mutated(&c, Mutation::SwapImagesAt(at)));
        }
        Ok(c)
    }

    pub fn counit(&self, h: &MultiMap, j: usize) -> Result<TwoCell> {
        let c = TwoCell::counit(h, j)?;
        Ok(if self.is(Injector::CounitCorrupt) { TwoCell::mutated(&c, Mutation::SwapImages) } else { c })
    }

    pub fn gamma(&self, g: &MultiMap, j: usize, k: usize) -> Result<TwoCell> {
        let c = gamma(g, j, k)?;
        Ok(if self.is(Injector::GammaIdentity) { TwoCell::mutated(&c, Mutation::IndexIdentity) } else { c })
    }

    pub fn t_hat(&self, f: &Arc<MultiFunctor>, i: usize, g: &Arc<MultiFunctor>) -> Result<TwoCell> {
        let c = t_hat(f, i, g)?;
        if self.is(Injector::ScrambledT) {
            let reversed: Vec<usize> = (0..f.arity()).rev().collect();
            let tf = crate::relmonad::bar(f)?.strengthen_all(&reversed)?;
            let claimed = tf.compose(i, &apply_t(g)?)?;
            return c.then(&TwoCell::canonical(c.dst(), &claimed)?)?.then(&TwoCell::canonical(&claimed, c.dst())?);
        }
        Ok(c)
    }

    /// `T̃ : T1 → 1`.
    pub fn t_tilde(&self, x: &Arc<FinCategory>) -> Result<TwoCell> {
        let id = Arc::new(MultiFunctor::identity(x));
        let theta = self.theta(x)?;
        TwoCell::canonical(&apply_t(&id)?, theta.src())?.then(&theta)
    }

    /// Decides `lhs = rhs`, bridging structurally different but equal boundaries.
    pub fn decide(&self, lhs: &TwoCell, rhs: &TwoCell) -> Result<Verdict> {
        let mut rhs = rhs.clone();
        if rhs.src() != lhs.src() {
            rhs = TwoCell::canonical(lhs.src(), rhs.src())?.then(&rhs)?;
        }
        if rhs.dst() != lhs.dst() {
            rhs = rhs.then(&TwoCell::canonical(rhs.dst(), lhs.dst())?)?;
        }
        match self.choice {
            PolicyChoice::Sample => two_cell_equal(self.ev, lhs, &rhs, Policy::Sample),
            PolicyChoice::Exact => match two_cell_equal(self.ev, lhs, &rhs, Policy::Transpose) {
                Err(Error::NotExtension(_)) => two_cell_equal(self.ev, lhs, &rhs, Policy::Sample),
                other => other,
            },
        }
    }

    fn sample_policy(&self) -> Policy {
        Policy::Sample
    }
}

/// Argument tuples for a map: objects in finite slots, the fixed sample
/// family in presheaf slots.
fn sample_args(f: &MultiMap) -> Result<Vec<Vec<Arg>>> {
    let mut choices: Vec<Vec<Arg>> = Vec::new();
    for s in f.slots() {
        choices.push(match s {
            SlotType::Fin(c) => c.objects().map(Arg::Obj).collect(),
            SlotType::Psh(c) => sample_family(c)?.into_iter().map(|a| Arg::Psh(a.presheaf)).collect(),
        });
    }
    let dims: Vec<usize> = choices.iter().map(Vec::len).collect();
    Ok(tuples(&dims).into_iter().map(|t| t.iter().enumerate().map(|(k, &i)| choices[k][i].clone()).collect()).collect())
}

/// Checks that every component of `cell` at the sample arguments is a bijection.
fn bijective(ev: &Evaluator, cell: &TwoCell) -> Result<Outcome> {
    let mut compared = 0;
    for args in sample_args(cell.src())? {
        compared += 1;
        let c = ev.component(cell, &args)?;
        if !c.is_bijective() {
            let at = crate::multimap::describe_args(cell.src().slots(), &args, &[]);
            return Ok(Outcome {
                policy: Policy::Sample,
                compared,
                witness: Some(format!("{cell} is not bijective at {at}: sizes {:?} → {:?}", c.src.sizes(), c.dst.sizes())),
            });
        }
    }
    Ok(Outcome { policy: Policy::Sample, compared, witness: None })
}

fn combine(outcomes: Vec<Outcome>) -> Outcome {
    let mut compared = 0;
    let mut policy = Policy::Transpose;
    for o in outcomes {
        compared += o.compared;
        if o.policy == Policy::Sample {
            policy = Policy::Sample;
        }
        if o.witness.is_some() {
            return Outcome { policy: o.policy, compared, witness: o.witness };
        }
    }
    Outcome { policy, compared, witness: None }
}

// ---- law constructions ----------------------------------------------------

fn psh_of(f: &MultiMap, j: usize) -> Arc<FinCategory> {
    f.slots()[j].category().clone()
}

/// The strength pentagon for `f` (slot `j`), `g` (slot `k`), `h` (slot `l`).
pub fn pentagon(ctx: &Ctx, f: &MultiMap, j: usize, g: &MultiMap, k: usize, h: &MultiMap, l: usize) -> Result<(TwoCell, TwoCell)> {
    let ft = f.strengthen(j)?;
    let fg = ft.compose(j, g)?;
    let that_fg = ctx.mult(f, j, g, k)?;
    let lhs = chain(&[ctx.mult(&fg, j + k, h, l)?, TwoCell::pre_whisker(&that_fg, j + k, &h.strengthen(l)?)?])?;
    let gth = g.strengthen(k)?.compose(k, h)?;
    let rhs = chain_to(
        &[
            TwoCell::strengthen(&TwoCell::pre_whisker(&that_fg, j + k, h)?, j + k + l)?,
            ctx.mult(f, j, &gth, k + l)?,
            TwoCell::post_whisker(&ft, j, &ctx.mult(g, k, h, l)?)?,
        ],
        lhs.dst(),
    )?;
    Ok((lhs, rhs))
}

/// `(t̃_f)^t ; t̂_{f,i} ; f^t∘θ = 1`.
pub fn strength_unit(ctx: &Ctx, f: &MultiMap, j: usize) -> Result<(TwoCell, TwoCell)> {
    let x = psh_of(f, j);
    let ft = f.strengthen(j)?;
    let lhs = chain_to(
        &[
            TwoCell::strengthen(&ctx.unit_tilde(f, j)?, j)?,
            ctx.mult(f, j, &MultiMap::unit(&x), 0)?,
            TwoCell::post_whisker(&ft, j, &ctx.theta(&x)?)?,
        ],
        &ft,
    )?;
    Ok((lhs, TwoCell::identity(&ft)))
}

pub fn strength_lemma1(ctx: &Ctx, f: &MultiMap, j: usize, g: &MultiMap, k: usize) -> Result<(TwoCell, TwoCell)> {
    let ft = f.strengthen(j)?;
    let fg = ft.compose(j, g)?;
    let w = psh_of(g, k);
    let lhs = chain(&[ctx.unit_tilde(&fg, j + k)?, TwoCell::pre_whisker(&ctx.mult(f, j, g, k)?, j + k, &MultiMap::unit(&w))?])?;
    let rhs = chain_to(&[TwoCell::post_whisker(&ft, j, &ctx.unit_tilde(g, k)?)?], lhs.dst())?;
    Ok((lhs, rhs))
}

pub fn strength_lemma2(ctx: &Ctx, f: &MultiMap, j: usize) -> Result<(TwoCell, TwoCell)> {
    let y = f.codomain().clone();
    let ft = f.strengthen(j)?;
    let theta = ctx.theta(&y)?;
    let lhs = chain_to(&[ctx.mult(&MultiMap::unit(&y), 0, f, j)?, TwoCell::pre_whisker(&theta, 0, &ft)?], &ft)?;
    let rhs = chain_to(&[TwoCell::strengthen(&TwoCell::pre_whisker(&theta, 0, f)?, j)?], &ft)?;
    Ok((lhs, rhs))
}

pub fn strength_lemma3(ctx: &Ctx, x: &Arc<FinCategory>) -> Result<(TwoCell, TwoCell)> {
    let i = MultiMap::unit(x);
    let lhs = chain_to(&[ctx.unit_tilde(&i, 0)?, TwoCell::pre_whisker(&ctx.theta(x)?, 0, &i)?], &i)?;
    Ok((lhs, TwoCell::identity(&i)))
}

pub fn mfun_unit_left(ctx: &Ctx, f: &Arc<MultiFunctor>) -> Result<(TwoCell, TwoCell)> {
    let y = f.codomain().clone();
    let id = Arc::new(MultiFunctor::identity(&y));
    let tf = apply_t(f)?;
    let lhs = chain_to(&[ctx.t_hat(&id, 0, f)?, TwoCell::pre_whisker(&ctx.t_tilde(&y)?, 0, &tf)?], &tf)?;
    let rhs = TwoCell::canonical(lhs.src(), &tf)?;
    Ok((lhs, rhs))
}

pub fn mfun_unit_right(ctx: &Ctx, f: &Arc<MultiFunctor>, i: usize) -> Result<(TwoCell, TwoCell)> {
    let x = f.slots()[i].clone();
    let id = Arc::new(MultiFunctor::identity(&x));
    let tf = apply_t(f)?;
    let lhs = chain_to(&[ctx.t_hat(f, i, &id)?, TwoCell::post_whisker(&tf, i, &ctx.t_tilde(&x)?)?], &tf)?;
    let rhs = TwoCell::canonical(lhs.src(), &tf)?;
    Ok((lhs, rhs))
}

pub fn mfun_assoc(
    ctx: &Ctx,
    f: &Arc<MultiFunctor>,
    i: usize,
    g: &Arc<MultiFunctor>,
    j: usize,
    h: &Arc<MultiFunctor>,
) -> Result<(TwoCell, TwoCell)> {
    let gh = Arc::new(g.compose(j, h)?);
    let fg = Arc::new(f.compose(i, g)?);
    let lhs = chain(&[ctx.t_hat(f, i, &gh)?, TwoCell::post_whisker(&apply_t(f)?, i, &ctx.t_hat(g, j, h)?)?])?;
    let rhs = chain_to(
        &[ctx.t_hat(&fg, i + j, h)?, TwoCell::pre_whisker(&ctx.t_hat(f, i, g)?, i + j, &apply_t(h)?)?],
        lhs.dst(),
    )?;
    Ok((lhs, rhs))
}

pub fn pscom_1(ctx: &Ctx, f: &MultiMap, j: usize, k: usize) -> Result<(TwoCell, TwoCell)> {
    let x = psh_of(f, j);
    let rhs = TwoCell::strengthen(&ctx.unit_tilde(f, j)?, k)?;
    let lhs = chain_to(
        &[ctx.unit_tilde(&f.strengthen(k)?, j)?, TwoCell::pre_whisker(&ctx.gamma(f, j, k)?, j, &MultiMap::unit(&x))?],
        rhs.dst(),
    )?;
    Ok((lhs, rhs))
}

pub fn pscom_2(ctx: &Ctx, f: &MultiMap, j: usize, k: usize) -> Result<(TwoCell, TwoCell)> {
    let w = psh_of(f, k);
    let rhs = ctx.unit_tilde(&f.strengthen(j)?, k)?;
    let lhs = chain_to(
        &[TwoCell::strengthen(&ctx.unit_tilde(f, k)?, j)?, TwoCell::pre_whisker(&ctx.gamma(f, j, k)?, k, &MultiMap::unit(&w))?],
        rhs.dst(),
    )?;
    Ok((lhs, rhs))
}

/// `g` substituted into slot `j` of `f`, with `g`'s slot `l` strengthened.
pub fn pscom_3(ctx: &Ctx, f: &MultiMap, j: usize, k: usize, g: &MultiMap, l: usize) -> Result<(TwoCell, TwoCell)> {
    let m = g.arity();
    let gf = ctx.gamma(f, j, k)?;
    let lhs = chain(&[ctx.mult(&f.strengthen(k)?, j, g, l)?, TwoCell::pre_whisker(&gf, j, &g.strengthen(l)?)?])?;
    let fsg = f.strengthen(j)?.compose(j, g)?;
    let rhs = chain_to(
        &[
            TwoCell::strengthen(&TwoCell::pre_whisker(&gf, j, g)?, j + l)?,
            ctx.gamma(&fsg, j + l, k + m - 1)?,
            TwoCell::strengthen(&ctx.mult(f, j, g, l)?, k + m - 1)?,
        ],
        lhs.dst(),
    )?;
    Ok((lhs, rhs))
}

/// `h` substituted into slot `k` of `f`, with `h`'s slot `l` strengthened.
pub fn pscom_4(ctx: &Ctx, f: &MultiMap, j: usize, k: usize, h: &MultiMap, l: usize) -> Result<(TwoCell, TwoCell)> {
    let gf = ctx.gamma(f, j, k)?;
    let lhs = chain(&[TwoCell::strengthen(&ctx.mult(f, k, h, l)?, j)?, TwoCell::pre_whisker(&gf, k, &h.strengthen(l)?)?])?;
    let fth = f.strengthen(k)?.compose(k, h)?;
    let rhs = chain_to(
        &[
            ctx.gamma(&fth, j, k + l)?,
            TwoCell::strengthen(&TwoCell::pre_whisker(&gf, k, h)?, k + l)?,
            ctx.mult(&f.strengthen(j)?, k, h, l)?,
        ],
        lhs.dst(),
    )?;
    Ok((lhs, rhs))
}

/// The hexagon relating the six orders of strengthening slots `a < b < c`.
pub fn pscom_5(ctx: &Ctx, f: &MultiMap, a: usize, b: usize, c: usize) -> Result<(TwoCell, TwoCell)> {
    let lhs = chain(&[
        TwoCell::strengthen(&ctx.gamma(f, b, c)?, a)?,
        ctx.gamma(&f.strengthen(b)?, a, c)?,
        TwoCell::strengthen(&ctx.gamma(f, a, b)?, c)?,
    ])?;
    let rhs = chain_to(
        &[ctx.gamma(&f.strengthen(c)?, a, b)?, TwoCell::strengthen(&ctx.gamma(f, a, c)?, b)?, ctx.gamma(&f.strengthen(a)?, b, c)?],
        lhs.dst(),
    )?;
    Ok((lhs, rhs))
}

/// Two words for the same permutation of the strengthening order of a
/// three-slot map: the sorting word and a different one.
pub fn braiding_words(target: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let w = sorting_word(&[0, 1, 2], target)?;
    let alt = match w.as_slice() {
        [0, 1, 0] => vec![1, 0, 1],
        [1, 0, 1] => vec![0, 1, 0],
        _ => {
            let mut v = vec![1, 1];
            v.extend(&w);
            v
        }
    };
    Ok((w, alt))
}

/// `σ_{h^t}`-style composite in each slot of `Tf″ ∘ (…)`: whiskers `cells[r]`
/// into slot `r` of `base ∘ (gs)`, replacing `gs[r]` by the cell's target.
fn whisker_each(base: &MultiMap, gs: &[MultiMap], cells: &[TwoCell]) -> Result<Vec<TwoCell>> {
    let n = gs.len();
    let mut cur = gs.to_vec();
    let mut out = Vec::with_capacity(n);
    for r in 0..n {
        let mut m = base.clone();
        for k in (0..n).rev().filter(|&k| k != r) {
            m = m.compose(k, &cur[k])?;
        }
        out.push(TwoCell::post_whisker(&m, r, &cells[r])?);
        cur[r] = cells[r].dst().clone();
    }
    Ok(out)
}

pub fn multicat_eta(ctx: &Ctx, sq: &Square) -> Result<(TwoCell, TwoCell)> {
    let units: Vec<MultiMap> = sq.f.slots().iter().map(MultiMap::unit).collect();
    let ht = sq.h.strengthen(0)?;
    let ext = extend_square(sq)?;
    let lhs = chain(&[
        TwoCell::reindexed(&ctx.unit_tilde(&sq.h, 0)?, 0, &sq.f)?,
        TwoCell::post_whisker(&ht, 0, &unit_square(&sq.f)?)?,
        crate::relmonad::pre_whisker_all(&ext, &units)?,
    ])?;
    let tildes: Vec<TwoCell> = sq.gs.iter().map(|g| ctx.unit_tilde(g, 0)).collect::<Result<_>>()?;
    let mut cells = vec![sq.alpha.clone()];
    cells.extend(whisker_each(&apply_t(&sq.f2)?, &sq.gs, &tildes)?);
    let rhs = chain_to(&cells, lhs.dst())?;
    Ok((lhs, rhs))
}

pub fn multicat_mu(ctx: &Ctx, alpha: &Square, beta: &Square) -> Result<(TwoCell, TwoCell)> {
    let delta = compose_squares(alpha, beta)?;
    let tf = apply_t(&alpha.f)?;
    let h2t = beta.h.strengthen(0)?;
    let gst: Vec<MultiMap> = alpha.gs.iter().map(|g| g.strengthen(0)).collect::<Result<_>>()?;
    let lhs = chain(&[
        TwoCell::pre_whisker(&ctx.mult(&beta.h, 0, &alpha.h, 0)?, 0, &tf)?,
        TwoCell::post_whisker(&h2t, 0, &extend_square(alpha)?)?,
        crate::relmonad::pre_whisker_all(&extend_square(beta)?, &gst)?,
    ])?;
    let mus: Vec<TwoCell> =
        beta.gs.iter().zip(&alpha.gs).map(|(g2, g)| ctx.mult(g2, 0, g, 0)).collect::<Result<_>>()?;
    let dgst: Vec<MultiMap> = delta.gs.iter().map(|g| g.strengthen(0)).collect::<Result<_>>()?;
    let mut cells = vec![extend_square(&delta)?];
    cells.extend(whisker_each(&apply_t(&beta.f2)?, &dgst, &mus)?);
    let rhs = chain_to(&cells, lhs.dst())?;
    Ok((lhs, rhs))
}

/// The pasted square `β·α : (h′* ∘ h) ∘ Jf → Tf″ ∘ (g′ᵢ* ∘ gᵢ)`.
pub fn compose_squares(alpha: &Square, beta: &Square) -> Result<Square> {
    let h2t = beta.h.strengthen(0)?;
    let h = h2t.compose(0, &alpha.h)?;
    let gs: Vec<MultiMap> =
        beta.gs.iter().zip(&alpha.gs).map(|(g2, g)| g2.strengthen(0)?.compose(0, g)).collect::<Result<_>>()?;
    let cell = chain_to(
        &[
            TwoCell::canonical(&h.reindex(0, &alpha.f)?, &h2t.compose(0, &alpha.h.reindex(0, &alpha.f)?)?)?,
            TwoCell::post_whisker(&h2t, 0, &alpha.alpha)?,
            crate::relmonad::pre_whisker_all(&extend_square(beta)?, &alpha.gs)?,
        ],
        &compose_all(&apply_t(&beta.f2)?, &gs)?,
    )?;
    Square::new(h, alpha.f.clone(), beta.f2.clone(), gs, cell.named("β·α"))
}

pub fn multicat_theta(ctx: &Ctx, f: &Arc<MultiFunctor>) -> Result<(TwoCell, TwoCell)> {
    let ext = extend_square(&Square::unit(f)?)?;
    let tf = apply_t(f)?;
    let units_t: Vec<MultiMap> = f.slots().iter().map(|x| MultiMap::unit(x).strengthen(0)).collect::<Result<_>>()?;
    let thetas: Vec<TwoCell> = f.slots().iter().map(|x| ctx.theta(x)).collect::<Result<_>>()?;
    let mut cells = vec![ext];
    cells.extend(whisker_each(&tf, &units_t, &thetas)?);
    let lhs = chain_to(&cells, &tf)?;
    let y = f.codomain().clone();
    let rhs = chain_to(&[TwoCell::pre_whisker(&ctx.theta(&y)?, 0, &tf)?], &tf)?;
    Ok((lhs, rhs))
}

pub fn laxid_triangle_1(ctx: &Ctx, f: &MultiMap, j: usize) -> Result<(TwoCell, TwoCell)> {
    let ft = f.strengthen(j)?;
    let lhs = chain(&[TwoCell::strengthen(&ctx.unit_tilde(f, j)?, j)?, ctx.counit(&ft, j)?])?;
    Ok((lhs, TwoCell::identity(&ft)))
}

pub fn laxid_triangle_2(ctx: &Ctx, f: &MultiMap, j: usize) -> Result<(TwoCell, TwoCell)> {
    let h = f.strengthen(j)?;
    let x = psh_of(f, j);
    let hi = h.compose(j, &MultiMap::unit(&x))?;
    let lhs = chain(&[ctx.unit_tilde(&hi, j)?, TwoCell::pre_whisker(&ctx.counit(&h, j)?, j, &MultiMap::unit(&x))?])?;
    Ok((lhs, TwoCell::identity(&hi)))
}

/// Cocones `β : f ⇒ g^t ∘ⱼ i` enumerated exhaustively: each is recovered
/// from its untranspose, and distinct cocones have untransposes that differ
/// at some sample argument.
fn laxid_kan(ctx: &Ctx, f: &MultiMap, j: usize, g: &MultiMap) -> Result<Outcome> {
    let x = psh_of(f, j);
    let target = g.strengthen(j)?.compose(j, &MultiMap::unit(&x))?;
    let tables = enumerate_cells(ctx.ev, f, &target, DEFAULT_NAT_BUDGET, None, false)?;
    let mut compared = 0;
    let mut seen: HashSet<Vec<Vec<Vec<usize>>>> = HashSet::new();
    let samples = sample_args(&g.strengthen(j)?)?;
    for (n, t) in tables.into_iter().enumerate() {
        let beta = TwoCell::table(&format!("β{n}"), f, &target, t)?;
        let un = untranspose(&beta, j)?;
        let back = ctx.unit_tilde(f, j)?.then(&TwoCell::pre_whisker(&un, j, &MultiMap::unit(&x))?)?;
        let v = ctx.decide(&back, &beta)?;
        compared += v.compared;
        if let Some(w) = v.witness {
            return Ok(Outcome { policy: v.policy, compared, witness: Some(format!("cocone {n} is not the transpose of its untranspose: {w}")) });
        }
        let mut fp = Vec::with_capacity(samples.len());
        for a in &samples {
            fp.push(ctx.ev.component(&un, a)?.comps.clone());
        }
        compared += samples.len();
        if !seen.insert(fp) {
            return Ok(Outcome {
                policy: Policy::Sample,
                compared,
                witness: Some(format!("cocone {n} has the same untranspose as an earlier one")),
            });
        }
    }
    Ok(Outcome { policy: Policy::Transpose, compared, witness: None })
}

fn yoneda_check(cats: &[Arc<FinCategory>], budget: usize) -> Result<Outcome> {
    let mut compared = 0;
    for c in cats {
        for a in c.objects() {
            for b in c.objects() {
                compared += 1;
                let ya = Arc::new(representable(c, a)?);
                let yb = Arc::new(representable(c, b)?);
                let nats = enumerate_nat_trans(&ya, &yb, budget)?;
                let hom = c.hom(a, b);
                let witness = |msg: String| Outcome { policy: Policy::Transpose, compared, witness: Some(msg) };
                if nats.len() != hom.len() {
                    return Ok(witness(format!(
                        "{} transformations y{} ⇒ y{} but {} morphisms",
                        nats.len(),
                        c.obj_name(a),
                        c.obj_name(b),
                        hom.len()
                    )));
                }
                let mut hit = vec![false; nats.len()];
                for &m in hom {
                    let ym = yoneda_action(c, m)?;
                    match nats.iter().position(|n| n.comps == ym.comps) {
                        Some(p) if !hit[p] => hit[p] = true,
                        _ => return Ok(witness(format!("y({}) is not among the enumerated transformations", c.mor_name(m)))),
                    }
                }
            }
        }
    }
    Ok(Outcome { policy: Policy::Transpose, compared, witness: None })
}

/// A copy of `p` with one action entry changed so that it is no longer a
/// functor, or `None` if no single change breaks it. Slot coordinates are
/// tried before the codomain coordinate.
pub fn break_contravariance(p: &MultiProfunctor) -> Option<MultiProfunctor> {
    for k in (1..=p.arity()).chain([0]) {
        let c = p.coordinate(k).clone();
        for m in c.morphisms().filter(|&m| !c.is_identity(m)) {
            let (from, to) = p.ends(k, m);
            let mut others: Vec<usize> = p.dims().to_vec();
            others.remove(k);
            for o in tuples(&others) {
                let mut t = o.clone();
                t.insert(k, from);
                let mut t2 = o.clone();
                t2.insert(k, to);
                let n = p.value(&t2);
                for e in 0..p.value(&t) {
                    for v in 0..n {
                        let mut q = p.clone();
                        let row = q.act_mut(k, m, &t);
                        if row[e] == v {
                            continue;
                        }
                        row[e] = v;
                        if q.validate().is_err() {
                            return Some(q);
                        }
                    }
                }
            }
        }
    }
    None
}

fn corrupt_map(f: &MultiMap) -> MultiMap {
    match f.body() {
        Body::Table(p) => match break_contravariance(p) {
            Some(q) => MultiMap::table(f.name(), Arc::new(q)),
            None => f.clone(),
        },
        _ => f.clone(),
    }
}

/// Applies an instance-level injector.
fn prepare(inst: &Instance, inject: Option<Injector>) -> Instance {
    if inject != Some(Injector::BrokenContravariance) {
        return inst.clone();
    }
    let mut out = inst.clone();
    out.payload = match &inst.payload {
        Payload::Unary { f, g, h } => Payload::Unary { f: corrupt_map(f), g: g.clone(), h: h.clone() },
        Payload::Strong { f, j, g, k, h } => Payload::Strong { f: corrupt_map(f), j: *j, g: g.clone(), k: *k, h: h.clone() },
        Payload::Pscom { f, g, l, h, m, f3 } => {
            Payload::Pscom { f: corrupt_map(f), g: g.clone(), l: *l, h: h.clone(), m: *m, f3: corrupt_map(f3) }
        }
        Payload::LaxId { f, j, g } => Payload::LaxId { f: corrupt_map(f), j: *j, g: g.clone() },
        other => other.clone(),
    };
    out
}

fn equal(ctx: &Ctx, legs: Result<(TwoCell, TwoCell)>) -> Result<Outcome> {
    let (l, r) = legs?;
    ctx.decide(&l, &r).map(Outcome::from)
}

/// Runs one law on one instance.
fn run_law(ctx: &Ctx, id: &str, inst: &Instance) -> Result<Outcome> {
    match (&inst.payload, id) {
        (Payload::Unary { f, g, h }, _) => {
            let x = psh_of(f, 0);
            match id {
                "rpm.assoc" => equal(ctx, pentagon(ctx, h, 0, g, 0, f, 0)),
                "rpm.unit" => Ok(combine(vec![equal(ctx, strength_unit(ctx, f, 0))?, equal(ctx, strength_unit(ctx, g, 0))?])),
                "rpm.lemma1" => equal(ctx, strength_lemma1(ctx, g, 0, f, 0)),
                "rpm.lemma2" => equal(ctx, strength_lemma2(ctx, f, 0)),
                "rpm.lemma3" => equal(ctx, strength_lemma3(ctx, &x)),
                _ => Err(Error::Invalid(format!("{id} does not apply to {}", inst.group))),
            }
        }
        (Payload::Strong { f, j, g, k, h }, _) => match id {
            "strong.pentagon" => equal(ctx, pentagon(ctx, f, *j, g, *k, h, 0)),
            "strong.unit" => equal(ctx, strength_unit(ctx, f, *j)),
            "strong.lemma1" => equal(ctx, strength_lemma1(ctx, f, *j, g, *k)),
            "strong.lemma2" => equal(ctx, strength_lemma2(ctx, f, *j)),
            "strong.lemma3" => equal(ctx, strength_lemma3(ctx, &psh_of(f, *j))),
            _ => Err(Error::Invalid(format!("{id} does not apply to {}", inst.group))),
        },
        (Payload::Functors { f, i, g, j, h }, _) => match id {
            "mfun.unit-left" => equal(ctx, mfun_unit_left(ctx, f)),
            "mfun.unit-right" => equal(ctx, mfun_unit_right(ctx, f, *i)),
            "mfun.assoc" => equal(ctx, mfun_assoc(ctx, f, *i, g, *j, h)),
            "mfun.invertible" => Ok(combine(vec![
                bijective(ctx.ev, &ctx.t_hat(f, *i, g)?)?,
                bijective(ctx.ev, &ctx.t_tilde(f.codomain())?)?,
            ])),
            _ => Err(Error::Invalid(format!("{id} does not apply to {}", inst.group))),
        },
        (Payload::Pscom { f, g, l, h, m, f3 }, _) => match id {
            "pscom.1" => equal(ctx, pscom_1(ctx, f, 0, 1)),
            "pscom.2" => equal(ctx, pscom_2(ctx, f, 0, 1)),
            "pscom.3" => equal(ctx, pscom_3(ctx, f, 0, 1, g, *l)),
            "pscom.4" => equal(ctx, pscom_4(ctx, f, 0, 1, h, *m)),
            "pscom.5" => equal(ctx, pscom_5(ctx, f3, 0, 1, 2)),
            "pscom.inverse" => {
                let (gm, gi) = (ctx.gamma(f, 0, 1)?, gamma_inv(f, 0, 1)?);
                Ok(combine(vec![
                    ctx.decide(&gm.then(&gi)?, &TwoCell::identity(gm.src()))?.into(),
                    ctx.decide(&gi.then(&gm)?, &TwoCell::identity(gi.src()))?.into(),
                ]))
            }
            "pscom.fubini" => fubini(ctx, f, f3),
            "braiding" => braiding(ctx, f3),
            _ => Err(Error::Invalid(format!("{id} does not apply to {}", inst.group))),
        },
        (Payload::Squares { alpha, beta }, _) => match id {
            "multicat.eta" => equal(ctx, multicat_eta(ctx, alpha)),
            "multicat.mu" => equal(ctx, multicat_mu(ctx, alpha, beta)),
            "multicat.theta" => equal(ctx, multicat_theta(ctx, &alpha.f)),
            _ => Err(Error::Invalid(format!("{id} does not apply to {}", inst.group))),
        },
        (Payload::LaxId { f, j, g }, _) => match id {
            "laxid.unit-invertible" => {
                let t = ctx.unit_tilde(f, *j)?;
                let inv = TwoCell::inverse(&t);
                Ok(combine(vec![
                    ctx.decide(&t.then(&inv)?, &TwoCell::identity(f))?.into(),
                    ctx.decide(&inv.then(&t)?, &TwoCell::identity(t.dst()))?.into(),
                ]))
            }
            "laxid.triangle-1" => equal(ctx, laxid_triangle_1(ctx, f, *j)),
            "laxid.triangle-2" => equal(ctx, laxid_triangle_2(ctx, f, *j)),
            "laxid.kan" => laxid_kan(ctx, f, *j, g),
            _ => Err(Error::Invalid(format!("{id} does not apply to {}", inst.group))),
        },
        (Payload::Categories(cs), "yoneda") => yoneda_check(cs, DEFAULT_NAT_BUDGET),
        _ => Err(Error::Invalid(format!("{id} does not apply to {}", inst.group))),
    }
}

fn fubini(ctx: &Ctx, f: &MultiMap, f3: &MultiMap) -> Result<Outcome> {
    let mut compared = 0;
    for (g, j, k) in [(f, 0, 1), (f3, 0, 1), (f3, 0, 2), (f3, 1, 2)] {
        let cand = ctx.gamma(g, j, k)?;
        for args in sample_args(cand.src())? {
            compared += 1;
            if let Some(w) = fubini_disagreement(ctx.ev, &cand, g, j, k, &args)? {
                let at = crate::multimap::describe_args(cand.src().slots(), &args, &[]);
                return Ok(Outcome { policy: ctx.sample_policy(), compared, witness: Some(format!("{cand} at {at}: {w}")) });
            }
        }
    }
    Ok(Outcome { policy: Policy::Sample, compared, witness: None })
}

fn braiding(ctx: &Ctx, f3: &MultiMap) -> Result<Outcome> {
    let mut outs = Vec::new();
    for target in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let (w1, w2) = braiding_words(&target)?;
        let a = gamma_word(f3, &[0, 1, 2], &w1)?;
        let b = gamma_word(f3, &[0, 1, 2], &w2)?;
        let mut o: Outcome = ctx.decide(&a.cell, &b.cell)?.into();
        if let Some(w) = o.witness.take() {
            o.witness = Some(format!("order {target:?}, words {w1:?} and {w2:?}: {w}"));
        }
        outs.push(o);
    }
    Ok(combine(outs))
}

fn report(id: &'static str, inst: &Instance, ev: &Evaluator, r: Result<Outcome>) -> LawReport {
    let work = ev.stats().work;
    let instance = inst.descriptor();
    match r {
        Ok(o) => LawReport {
            law: id,
            instance,
            policy: o.policy,
            status: if o.witness.is_some() { Status::Fail } else { Status::Pass },
            compared: o.compared,
            work,
            witness: o.witness,
        },
        // a canonical comparison or an inverse that does not exist is a concrete counterexample
        Err(e @ (Error::NotCanonical { .. } | Error::NotInvertible { .. })) => {
            LawReport { law: id, instance, policy: Policy::Sample, status: Status::Fail, compared: 0, work, witness: Some(e.to_string()) }
        }
        Err(e) => LawReport { law: id, instance, policy: Policy::Sample, status: Status::Error, compared: 0, work, witness: Some(e.to_string()) },
    }
}

/// Checks the selected laws of one group on one instance.
pub fn check_instance(inst: &Instance, laws: &[&'static str], choice: PolicyChoice, inject: Option<Injector>, budget: usize) -> Vec<LawReport> {
    let inst = prepare(inst, inject);
    let ev = Evaluator::new(budget);
    let ctx = Ctx { ev: &ev, choice, inject };
    LAWS.iter()
        .filter(|l| l.group == inst.group && laws.contains(&l.id))
        .map(|l| report(l.id, &inst, &ev, run_law(&ctx, l.id, &inst)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub gen: GenConfig,
    /// Instances per group; `None` uses the per-group defaults.
    pub instances: Option<usize>,
    pub laws: Vec<&'static str>,
    pub policy: PolicyChoice,
    pub inject: Option<Injector>,
    pub budget: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            gen: GenConfig::default(),
            instances: None,
            laws: LAWS.iter().map(|l| l.id).collect(),
            policy: PolicyChoice::Exact,
            inject: None,
            budget: crate::multimap::DEFAULT_COEND_BUDGET,
        }
    }
}

/// Default instance counts per group.
pub fn default_instances(group: LawGroup) -> usize {
    match group {
        LawGroup::RelPseudomonad | LawGroup::Strong => 100,
        LawGroup::Multifunctor | LawGroup::Pseudocommutative => 50,
        LawGroup::Multicategorical | LawGroup::LaxIdempotent | LawGroup::Yoneda => 25,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub config: String,
    pub reports: Vec<LawReport>,
}

pub const MACHINE_VERSION: &str = "relmonad-report 1";

impl SuiteReport {
    pub fn count(&self, s: Status) -> usize {
        self.reports.iter().filter(|r| r.status == s).count()
    }

    pub fn to_machine(&self) -> String {
        let mut out = format!("{MACHINE_VERSION}\nconfig\t{}\nlaw\tinstance\tpolicy\tverdict\tcompared\twork\twitness\n", self.config);
        for r in &self.reports {
            let w = r.witness.as_deref().unwrap_or("-").replace(['\t', '\n'], " ");
            out.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.law, r.instance, r.policy, r.status, r.compared, r.work, w));
        }
        out.push_str(&format!(
            "summary\tpass={}\tfail={}\terror={}\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Error)
        ));
        out
    }

    /// Failures and errors in full; passes aggregated per law.
    pub fn to_text(&self) -> String {
        let mut out = format!("configuration: {}\n", self.config);
        for l in LAWS {
            let rs: Vec<&LawReport> = self.reports.iter().filter(|r| r.law == l.id).collect();
            if rs.is_empty() {
                continue;
            }
            let pass = rs.iter().filter(|r| r.status == Status::Pass).count();
            let exact = rs.iter().filter(|r| r.policy == Policy::Transpose).count();
            let tag = if pass == rs.len() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {:<22} {pass}/{} instances ({exact} exact)\n", l.id, rs.len()));
            for r in rs.iter().filter(|r| r.status != Status::Pass) {
                out.push_str(&format!("    {} {}: {}\n", r.status, r.instance, r.witness.as_deref().unwrap_or("")));
            }
        }
        out.push_str(&format!(
            "total: {} passed, {} failed, {} errors\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Error)
        ));
        out
    }
}

pub fn describe_config(cfg: &SuiteConfig) -> String {
    format!(
        "{} instances={} laws={} policy={} inject={} budget={}",
        cfg.gen.describe(),
        cfg.instances.map_or("default".to_string(), |n| n.to_string()),
        if cfg.laws.len() == LAWS.len() { "all".to_string() } else { cfg.laws.join(",") },
        cfg.policy.tag(),
        cfg.inject.map_or("none", |i| i.tag()),
        cfg.budget
    )
}

/// Generates and checks every selected law group. Instances are checked on
/// worker threads; results are merged in (group, instance, law) order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.gen.validate()?;
    let mut jobs: Vec<(LawGroup, usize)> = Vec::new();
    for g in LawGroup::ALL {
        if LAWS.iter().any(|l| l.group == g && cfg.laws.contains(&l.id)) {
            let n = cfg.instances.unwrap_or_else(|| default_instances(g));
            jobs.extend((0..n).map(|i| (g, i)));
        }
    }
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8).max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: std::sync::Mutex<Vec<Option<Result<Vec<LawReport>>>>> = std::sync::Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let (g, idx) = jobs[i];
                let ev = Evaluator::new(cfg.budget);
                let r = gen_instance(&cfg.gen, &ev, g, idx).map(|inst| check_instance(&inst, &cfg.laws, cfg.policy, cfg.inject, cfg.budget));
                results.lock().expect("no panics while holding the lock")[i] = Some(r);
            });
        }
    });
    let mut reports = Vec::new();
    for r in results.into_inner().expect("workers finished") {
        reports.extend(r.expect("every job ran")?);
    }
    Ok(SuiteReport { config: describe_config(cfg), reports })
}

/// For `explain`: the two legs of a law as built on a small instance.
pub fn legs_for(id: &str, cfg: &GenConfig) -> Result<Option<(String, String)>> {
    let spec = law(id).ok_or(Error::Unknown { kind: "law", name: id.into() })?;
    let ev = Evaluator::default();
    let inst = gen_instance(cfg, &ev, spec.group, 0)?;
    let ctx = Ctx { ev: &ev, choice: PolicyChoice::Exact, inject: None };
    let legs = match (&inst.payload, id) {
        (Payload::Unary { f, g, h }, "rpm.assoc") => pentagon(&ctx, h, 0, g, 0, f, 0)?,
        (Payload::Unary { f, .. }, "rpm.unit") => strength_unit(&ctx, f, 0)?,
        (Payload::Unary { f, g, .. }, "rpm.lemma1") => strength_lemma1(&ctx, g, 0, f, 0)?,
        (Payload::Unary { f, .. }, "rpm.lemma2") => strength_lemma2(&ctx, f, 0)?,
        (Payload::Unary { f, .. }, "rpm.lemma3") => strength_lemma3(&ctx, &psh_of(f, 0))?,
        (Payload::Strong { f, j, g, k, h }, "strong.pentagon") => pentagon(&ctx, f, *j, g, *k, h, 0)?,
        (Payload::Strong { f, j, .. }, "strong.unit") => strength_unit(&ctx, f, *j)?,
        (Payload::Strong { f, j, g, k, .. }, "strong.lemma1") => strength_lemma1(&ctx, f, *j, g, *k)?,
        (Payload::Strong { f, j, .. }, "strong.lemma2") => strength_lemma2(&ctx, f, *j)?,
        (Payload::Strong { f, j, .. }, "strong.lemma3") => strength_lemma3(&ctx, &psh_of(f, *j))?,
        (Payload::Functors { f, .. }, "mfun.unit-left") => mfun_unit_left(&ctx, f)?,
        (Payload::Functors { f, i, .. }, "mfun.unit-right") => mfun_unit_right(&ctx, f, *i)?,
        (Payload::Functors { f, i, g, j, h }, "mfun.assoc") => mfun_assoc(&ctx, f, *i, g, *j, h)?,
        (Payload::Pscom { f, .. }, "pscom.1") => pscom_1(&ctx, f, 0, 1)?,
        (Payload::Pscom { f, .. }, "pscom.2") => pscom_2(&ctx, f, 0, 1)?,
        (Payload::Pscom { f, g, l, .. }, "pscom.3") => pscom_3(&ctx, f, 0, 1, g, *l)?,
        (Payload::Pscom { f, h, m, .. }, "pscom.4") => pscom_4(&ctx, f, 0, 1, h, *m)?,
        (Payload::Pscom { f3, .. }, "pscom.5") => pscom_5(&ctx, f3, 0, 1, 2)?,
        (Payload::Squares { alpha, .. }, "multicat.eta") => multicat_eta(&ctx, alpha)?,
        (Payload::Squares { alpha, beta }, "multicat.mu") => multicat_mu(&ctx, alpha, beta)?,
        (Payload::Squares { alpha, .. }, "multicat.theta") => multicat_theta(&ctx, &alpha.f)?,
        (Payload::LaxId { f, j, .. }, "laxid.triangle-1") => laxid_triangle_1(&ctx, f, *j)?,
        (Payload::LaxId { f, j, .. }, "laxid.triangle-2") => laxid_triangle_2(&ctx, f, *j)?,
        _ => return Ok(None),
    };
    Ok(Some((legs.0.name().to_string(), legs.1.name().to_string())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(group: LawGroup, idx: usize, inject: Option<Injector>) -> Vec<LawReport> {
        let cfg = GenConfig::default();
        let ev = Evaluator::default();
        let inst = gen_instance(&cfg, &ev, group, idx).unwrap();
        let laws: Vec<&'static str> = LAWS.iter().map(|l| l.id).collect();
        check_instance(&inst, &laws, PolicyChoice::Exact, inject, crate::multimap::DEFAULT_COEND_BUDGET)
    }

    #[test]
    fn law_filter_expands_groups_and_rejects_unknown() {
        assert_eq!(select_laws("pscom").unwrap().len(), 8);
        assert_eq!(select_laws("yoneda,rpm.unit").unwrap(), vec!["rpm.unit", "yoneda"]);
        assert!(matches!(select_laws("nosuch"), Err(Error::Unknown { .. })));
    }

    #[test]
    fn braiding_words_differ_and_agree() {
        for t in [[0, 1, 2], [2, 1, 0], [1, 2, 0]] {
            let (a, b) = braiding_words(&t).unwrap();
            assert_ne!(a, b);
            for w in [a, b] {
                let mut cur = vec![0, 1, 2];
                for p in w {
                    cur.swap(p, p + 1);
                }
                assert_eq!(cur, t.to_vec());
            }
        }
    }

    #[test]
    fn every_group_passes_on_a_seeded_instance() {
        for g in LawGroup::ALL {
            for r in run(g, 0, None) {
                assert_eq!(r.status, Status::Pass, "{} on {}: {:?}", r.law, r.instance, r.witness);
            }
        }
    }

    #[test]
    fn broken_contravariance_is_detected_by_validation() {
        let x = Arc::new(FinCategory::walking_arrow());
        let p = MultiProfunctor::yoneda_along(&MultiFunctor::identity(&x));
        let q = break_contravariance(&p);
        assert!(q.map_or(true, |q| q.validate().is_err()));
    }
}
