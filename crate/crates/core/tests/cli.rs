//! The command-line contract: exit codes, report formats, `compute`, and the
//! `export`/`replay` round trip.

use std::path::PathBuf;
use std::sync::Arc;

use relmonad::checker::MACHINE_VERSION;
use relmonad::cli::{run, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use relmonad::document::write_functor_body;
use relmonad::fincat::{write_category, FinCategory};
use relmonad::multimap::{write_profunctor_body, MultiFunctor, MultiProfunctor};
use relmonad::presheaf::representable;

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(std::iter::once("relmonad").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).expect("utf-8 output"))
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("relmonad-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

/// Rows of a machine report between the column header and the summary.
fn rows(machine: &str) -> Vec<Vec<&str>> {
    machine.lines().skip(3).filter(|l| !l.starts_with("summary\t")).map(|l| l.split('\t').collect()).collect()
}

#[test]
fn passing_failing_and_unusable_runs_have_distinct_exit_codes() {
    assert_eq!(cli(&["verify", "--laws", "rpm", "--instances", "3"]).0, EXIT_PASS);
    assert_eq!(cli(&["verify", "--laws", "rpm", "--instances", "5", "--inject", "theta-corrupt"]).0, EXIT_FAIL);
    assert_eq!(cli(&["verify", "--laws", "nosuch"]).0, EXIT_USAGE);
    assert_eq!(cli(&["verify", "--inject", "nosuch"]).0, EXIT_USAGE);
    assert_eq!(cli(&["verify", "--policy", "guess"]).0, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]).0, EXIT_USAGE);
}

#[test]
fn machine_report_layout() {
    let (code, out) = cli(&["verify", "--laws", "strong,yoneda", "--instances", "2", "--format", "machine"]);
    assert_eq!(code, EXIT_PASS);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], MACHINE_VERSION);
    assert!(lines[1].starts_with("config\t"));
    assert_eq!(lines[2], "law\tinstance\tpolicy\tverdict\tcompared\twork\twitness");
    let body = rows(&out);
    assert!(!body.is_empty());
    for r in &body {
        assert_eq!(r.len(), 7, "{r:?}");
        assert_eq!(r[3], "pass");
        assert!(r[4].parse::<usize>().is_ok() && r[5].parse::<usize>().is_ok());
    }
    assert_eq!(*lines.last().unwrap(), format!("summary\tpass={}\tfail=0\terror=0", body.len()));
}

#[test]
fn text_report_names_every_selected_law() {
    let (code, out) = cli(&["verify", "--laws", "laxid", "--instances", "2"]);
    assert_eq!(code, EXIT_PASS);
    for id in ["laxid.unit-invertible", "laxid.triangle-1", "laxid.triangle-2", "laxid.kan"] {
        assert!(out.lines().any(|l| l.starts_with("PASS") && l.contains(id)), "{id} missing from\n{out}");
    }
}

#[test]
fn explain_lists_both_legs() {
    let (code, out) = cli(&["explain", "--laws", "rpm.unit"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("rpm.unit") && out.contains("left:") && out.contains("right:"), "{out}");
}

/// A document with the walking arrow `A`, the non-identity endofunctor
/// collapsing it onto its target, and the unit profunctor `y : A → Psh A`.
fn arrow_document() -> (Arc<FinCategory>, String) {
    let a = Arc::new(FinCategory::walking_arrow());
    let top = a.objects().last().unwrap();
    let collapse = MultiFunctor::from_fn("F", vec![a.clone()], a.clone(), |_| top, |_, _, _| a.id(top)).unwrap();
    let identity = MultiFunctor::from_fn("I", vec![a.clone()], a.clone(), |t| t[0], |_, m, _| m).unwrap();
    let unit = MultiProfunctor::yoneda_along(&identity);
    let text = format!(
        "category A\n{}end\nfunctor F : A -> A\n{}end\nprofunctor y : A -> A\n{}end\npresheaf P on A\n{}end\n",
        write_category(&a),
        write_functor_body(&collapse),
        write_profunctor_body(&unit, &["s1".to_string()]),
        relmonad::presheaf::write_presheaf_body(&representable(&a, top).unwrap()),
    );
    (a, text)
}

fn sizes_line(out: &str) -> &str {
    out.lines().find(|l| l.starts_with("sizes ")).expect("a sizes line")
}

fn sizes_of(a: &FinCategory, p: &relmonad::presheaf::Presheaf) -> String {
    let parts: Vec<String> = a.objects().map(|x| format!("{}:{}", a.obj_name(x), p.size(x))).collect();
    format!("sizes {}", parts.join(" "))
}

#[test]
fn compute_applies_t_and_strengthenings() {
    let (a, text) = arrow_document();
    let input = scratch("arrow.txt", &text);
    let input = input.to_str().unwrap();
    let top = a.objects().last().unwrap();
    for x in a.objects() {
        let arg = format!("y({})", a.obj_name(x));
        // T F at a representable is represented by the image object
        let (code, out) = cli(&["compute", "--input", input, "--map", "F", "--apply-t", "--args", &arg]);
        assert_eq!(code, EXIT_PASS, "{out}");
        assert_eq!(sizes_line(&out), sizes_of(&a, &representable(&a, top).unwrap()));
        // the strengthened unit fixes representables
        let (code, out) = cli(&["compute", "--input", input, "--map", "y", "--strengthen", "1", "--args", &arg]);
        assert_eq!(code, EXIT_PASS, "{out}");
        assert_eq!(sizes_line(&out), sizes_of(&a, &representable(&a, x).unwrap()));
    }
    let (code, out) = cli(&["compute", "--input", input, "--map", "y", "--strengthen", "1", "--args", "empty"]);
    assert_eq!(code, EXIT_PASS);
    assert!(sizes_line(&out).split(' ').skip(1).all(|kv| kv.ends_with(":0")), "{out}");
    let (code, out) = cli(&["compute", "--input", input, "--map", "y", "--strengthen", "1", "--args", "P"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(sizes_line(&out), sizes_of(&a, &representable(&a, top).unwrap()));
    // unstrengthened slots take objects
    let name = a.obj_name(top).to_string();
    assert_eq!(cli(&["compute", "--input", input, "--map", "y", "--args", &name]).0, EXIT_PASS);
}

#[test]
fn compute_rejects_bad_input() {
    let (_, text) = arrow_document();
    let good = scratch("good.txt", &text);
    let good = good.to_str().unwrap();
    let broken = scratch("broken.txt", &text.replacen("end\n", "", 1));
    assert_eq!(cli(&["compute", "--input", broken.to_str().unwrap(), "--map", "y", "--args", "empty"]).0, EXIT_USAGE);
    assert_eq!(cli(&["compute", "--input", "/nonexistent/relmonad", "--map", "y", "--args", "empty"]).0, EXIT_USAGE);
    assert_eq!(cli(&["compute", "--input", good, "--map", "nosuch", "--args", "empty"]).0, EXIT_USAGE);
    assert_eq!(cli(&["compute", "--input", good, "--map", "y", "--strengthen", "1", "--args", "empty,empty"]).0, EXIT_USAGE);
    assert_eq!(cli(&["compute", "--input", good, "--map", "y", "--strengthen", "2", "--args", "empty"]).0, EXIT_USAGE);
}

#[test]
fn exported_instances_replay() {
    let (code, file) = cli(&["export", "--group", "pscom", "--index", "1"]);
    assert_eq!(code, EXIT_PASS);
    let path = scratch("pscom.txt", &file);
    let (code, out) = cli(&["replay", path.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    let (_, direct) = cli(&["verify", "--laws", "pscom", "--instances", "2", "--format", "machine"]);
    let replayed: Vec<Vec<&str>> = rows(&out);
    let expected: Vec<Vec<&str>> = rows(&direct).into_iter().filter(|r| r[1] == replayed[0][1]).collect();
    assert_eq!(replayed, expected);
}

#[test]
fn replayed_failures_keep_their_witness() {
    let (code, out) = cli(&["verify", "--laws", "rpm", "--instances", "5", "--inject", "theta-corrupt", "--format", "machine"]);
    assert_eq!(code, EXIT_FAIL);
    let body = rows(&out);
    let fail = body.iter().find(|r| r[3] == "fail").expect("a failing row");
    let index = fail[1].split_whitespace().next().unwrap().split_once('#').unwrap().1;
    let (_, file) = cli(&["export", "--group", "rpm", "--index", index, "--inject", "theta-corrupt"]);
    let path = scratch("rpm-fail.txt", &file);
    let (code, again) = cli(&["replay", path.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(code, EXIT_FAIL);
    let same = rows(&again).into_iter().find(|r| r[0] == fail[0]).expect("the failing law is replayed");
    assert_eq!((same[3], same[6]), (fail[3], fail[6]));
}

#[test]
fn damaged_replay_files_are_rejected() {
    let (_, file) = cli(&["export", "--group", "rpm", "--index", "0"]);
    let truncated = scratch("truncated.txt", &file[..file.len() / 2]);
    assert_eq!(cli(&["replay", truncated.to_str().unwrap()]).0, EXIT_USAGE);
    let header_only: String = file.lines().take(2).map(|l| format!("{l}\n")).collect();
    let short = scratch("short.txt", &header_only);
    assert_eq!(cli(&["replay", short.to_str().unwrap()]).0, EXIT_USAGE);
    let reseeded = scratch("reseeded.txt", &file.replacen("seed=42", "seed=43", 1));
    assert_eq!(cli(&["replay", reseeded.to_str().unwrap()]).0, EXIT_USAGE);
    let versioned = scratch("versioned.txt", &file.replacen("relmonad-instance 1", "relmonad-instance 9", 1));
    assert_eq!(cli(&["replay", versioned.to_str().unwrap()]).0, EXIT_USAGE);
}
