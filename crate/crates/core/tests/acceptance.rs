//! End-to-end acceptance: each criterion runs as a function returning its
//! verdict; the driver prints one line per criterion and fails if any did.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use relmonad::checker::{run_suite, select_laws, Injector, LawReport, PolicyChoice, Status, SuiteConfig, SuiteReport};
use relmonad::fincat::FinCategory;
use relmonad::gen::{gen_instance, GenConfig, Instance, LawGroup, Payload};
use relmonad::multimap::{Evaluator, Policy};
use relmonad::presheaf::{enumerate_nat_trans, representable, DEFAULT_NAT_BUDGET};

type Verdict = Result<String, String>;

/// Categories ≤4 objects, profunctor values ≤3 elements.
fn desk_regime() -> GenConfig {
    GenConfig { max_objects: 4, max_value_size: 3, ..GenConfig::default() }
}

fn suite(gen: GenConfig, laws: &str, instances: usize, policy: PolicyChoice) -> Result<SuiteReport, String> {
    let cfg = SuiteConfig {
        gen,
        instances: Some(instances),
        laws: select_laws(laws).map_err(|e| e.to_string())?,
        policy,
        ..SuiteConfig::default()
    };
    run_suite(&cfg).map_err(|e| e.to_string())
}

fn instances(gen: &GenConfig, group: LawGroup, n: usize) -> Vec<Instance> {
    let ev = Evaluator::default();
    (0..n).map(|i| gen_instance(gen, &ev, group, i).expect("generation succeeds")).collect()
}

fn show(r: &LawReport) -> String {
    format!("{} {} {}: {}", r.law, r.instance, r.status, r.witness.as_deref().unwrap_or(""))
}

/// Every report passes and at least `min` distinct instances were checked.
fn all_pass(report: &SuiteReport, min: usize) -> Result<usize, String> {
    if let Some(bad) = report.reports.iter().find(|r| r.status != Status::Pass) {
        return Err(show(bad));
    }
    let distinct: BTreeSet<&str> = report.reports.iter().map(|r| r.instance.as_str()).collect();
    if distinct.len() < min {
        return Err(format!("only {} instances checked", distinct.len()));
    }
    Ok(distinct.len())
}

fn all_exact(report: &SuiteReport) -> Result<(), String> {
    match report.reports.iter().find(|r| r.policy != Policy::Transpose) {
        Some(r) => Err(format!("{} on {} was decided by sampling", r.law, r.instance)),
        None => Ok(()),
    }
}

/// The same laws decided by sampling alone reach the same verdicts.
fn sampling_agrees(report: &SuiteReport, gen: GenConfig, laws: &str, n: usize) -> Result<(), String> {
    let sampled = suite(gen, laws, n, PolicyChoice::Sample)?;
    for (a, b) in report.reports.iter().zip(&sampled.reports) {
        if (a.law, &a.instance, a.status) != (b.law, &b.instance, b.status) {
            return Err(format!("exact and sampled verdicts differ: {} / {}", show(a), show(b)));
        }
    }
    Ok(())
}

fn max_objects(insts: &[Instance]) -> usize {
    insts.iter().flat_map(|i| i.sizes()).max().unwrap_or(0)
}

fn rel_pseudomonad() -> Verdict {
    let start = Instant::now();
    let report = suite(desk_regime(), "rpm", 100, PolicyChoice::Exact)?;
    let n = all_pass(&report, 100)?;
    all_exact(&report)?;
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        return Err(format!("took {elapsed:?}"));
    }
    sampling_agrees(&report, desk_regime(), "rpm", 100)?;
    let objs = max_objects(&instances(&desk_regime(), LawGroup::RelPseudomonad, 100));
    if objs > 4 {
        return Err(format!("a category has {objs} objects"));
    }
    Ok(format!("{n} instances, all exact, {elapsed:.1?}"))
}

fn strong() -> Verdict {
    let report = suite(desk_regime(), "strong", 100, PolicyChoice::Exact)?;
    let n = all_pass(&report, 100)?;
    all_exact(&report)?;
    sampling_agrees(&report, desk_regime(), "strong", 100)?;
    let arities: BTreeSet<usize> = instances(&desk_regime(), LawGroup::Strong, 100)
        .iter()
        .map(|i| match &i.payload {
            Payload::Strong { f, .. } => f.arity(),
            _ => 0,
        })
        .collect();
    if !arities.contains(&2) || !arities.contains(&3) {
        return Err(format!("strengthened maps have arities {arities:?} only"));
    }
    Ok(format!("{n} instances, all exact, arities {arities:?}"))
}

fn multifunctor() -> Verdict {
    let report = suite(GenConfig::default(), "mfun", 50, PolicyChoice::Exact)?;
    Ok(format!("{} instances", all_pass(&report, 50)?))
}

fn pseudocommutativity() -> Verdict {
    let laws = "pscom.1,pscom.2,pscom.3,pscom.4,pscom.5,pscom.inverse,pscom.fubini";
    let report = suite(GenConfig::default(), laws, 50, PolicyChoice::Exact)?;
    if !report.reports.iter().any(|r| r.law == "pscom.fubini") {
        return Err("the Fubini comparison did not run".into());
    }
    Ok(format!("{} instances, five diagrams and the Fubini comparison", all_pass(&report, 50)?))
}

fn braiding() -> Verdict {
    let report = suite(GenConfig::default(), "braiding", 50, PolicyChoice::Exact)?;
    Ok(format!("{} three-slot maps, all six permutations", all_pass(&report, 50)?))
}

fn lax_idempotency() -> Verdict {
    let report = suite(GenConfig::default(), "laxid", 25, PolicyChoice::Exact)?;
    let n = all_pass(&report, 25)?;
    let objs = max_objects(&instances(&GenConfig::default(), LawGroup::LaxIdempotent, 25));
    if objs > 3 {
        return Err(format!("a category has {objs} objects"));
    }
    for law in ["laxid.triangle-1", "laxid.triangle-2"] {
        if let Some(r) = report.reports.iter().find(|r| r.law == law && r.policy != Policy::Transpose) {
            return Err(format!("{law} on {} was not decided exactly", r.instance));
        }
    }
    Ok(format!("{n} instances, triangles exact, cocones enumerated"))
}

fn multicategorical() -> Verdict {
    let report = suite(GenConfig::default(), "multicat", 25, PolicyChoice::Exact)?;
    let n = all_pass(&report, 25)?;
    for inst in instances(&GenConfig::default(), LawGroup::Multicategorical, 25) {
        if let Payload::Squares { alpha, beta } = &inst.payload {
            if alpha.f.arity() != 2 || beta.f.arity() != 2 {
                return Err(format!("{} is not a binary square", inst.descriptor()));
            }
        }
    }
    let sampled = report.reports.iter().filter(|r| r.policy == Policy::Sample).count();
    Ok(format!("{n} binary instances, {sampled}/{} checks sampled", report.reports.len()))
}

/// Morphisms `a → b` counted straight from the morphism list.
fn count_hom(c: &FinCategory, a: usize, b: usize) -> usize {
    c.morphisms().filter(|&m| c.src(m) == a && c.tgt(m) == b).count()
}

fn yoneda() -> Verdict {
    let gen = GenConfig::default();
    let mut cats: Vec<Arc<FinCategory>> = Vec::new();
    for group in LawGroup::ALL {
        for inst in instances(&gen, group, relmonad::checker::default_instances(group)) {
            cats.extend(inst.categories());
        }
    }
    let mut pairs = 0;
    for c in &cats {
        for a in c.objects() {
            for b in c.objects() {
                let (ya, yb) = (Arc::new(representable(c, a).unwrap()), Arc::new(representable(c, b).unwrap()));
                let nats = enumerate_nat_trans(&ya, &yb, DEFAULT_NAT_BUDGET).map_err(|e| e.to_string())?;
                if nats.len() != count_hom(c, a, b) {
                    return Err(format!("{} transformations y{} ⇒ y{} but {} morphisms", nats.len(), c.obj_name(a), c.obj_name(b), count_hom(c, a, b)));
                }
                pairs += 1;
            }
        }
    }
    let report = suite(gen, "yoneda", 25, PolicyChoice::Exact)?;
    all_pass(&report, 25)?;
    Ok(format!("{} categories, {pairs} object pairs", cats.len()))
}

/// Each injector must produce a failing verdict with a witness; groups are
/// tried in order until one catches it.
fn mutation_sensitivity() -> Verdict {
    let mut caught = Vec::new();
    for inj in Injector::ALL {
        let mut hit = None;
        for group in LawGroup::ALL {
            let cfg = SuiteConfig { laws: select_laws(group.tag()).unwrap(), inject: Some(inj), ..SuiteConfig::default() };
            let report = run_suite(&cfg).map_err(|e| e.to_string())?;
            if let Some(r) = report.reports.iter().find(|r| r.status == Status::Fail && r.witness.as_deref().is_some_and(|w| !w.is_empty())) {
                hit = Some(r.law);
                break;
            }
        }
        match hit {
            Some(law) => caught.push(format!("{inj}→{law}")),
            None => return Err(format!("{inj} is not caught by any law")),
        }
    }
    Ok(caught.join(", "))
}

fn determinism() -> Verdict {
    let run = || {
        let mut out = Vec::new();
        let code = relmonad::cli::run(["relmonad", "verify", "--seed", "42", "--format", "machine"], &mut out);
        (code, out)
    };
    let (c1, a) = run();
    let (c2, b) = run();
    if a.is_empty() || a != b || c1 != c2 {
        return Err(format!("reports differ (exit codes {c1}, {c2}; {} vs {} bytes)", a.len(), b.len()));
    }
    Ok(format!("{} identical bytes, exit code {c1}", a.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("relative pseudomonad axioms and derived lemmas", rel_pseudomonad),
        ("strength axioms and derived lemmas", strong),
        ("pseudo-multifunctor axioms for T", multifunctor),
        ("pseudocommutativity and Fubini agreement", pseudocommutativity),
        ("braiding well-definedness", braiding),
        ("lax idempotency", lax_idempotency),
        ("multicategorical compatibility", multicategorical),
        ("Yoneda oracle", yoneda),
        ("mutation sensitivity", mutation_sensitivity),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let line = match check() {
            Ok(detail) => format!("criterion {:>2} PASS {name}: {detail}\n", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("criterion {:>2} FAIL {name}: {why}\n", i + 1)
            }
        };
        // written directly so the lines show without --nocapture
        std::io::stderr().write_all(line.as_bytes()).unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
