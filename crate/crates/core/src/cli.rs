//! Command-line entry point: `verify`, `compute`, `replay`, `explain`, `export`.
//!
//! Exit codes: 0 all laws pass, 1 some law fails, 2 usage, parse or resource
//! error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::checker::{
    check_instance, describe_config, law, legs_for, run_suite, select_laws, Injector, PolicyChoice, Status, SuiteConfig,
    SuiteReport, LAWS,
};
use crate::document::parse_document;
use crate::error::{Error, Result};
use crate::fincat::FinCategory;
use crate::gen::{gen_instance, GenConfig, LawGroup};
use crate::multimap::{describe_args, Arg, Evaluator, MultiMap, SlotType};
use crate::presheaf::{representable, write_presheaf_body, Presheaf};
use crate::relmonad::apply_t;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Header of a replay file.
pub const INSTANCE_VERSION: &str = "relmonad-instance 1";

#[derive(Parser, Debug)]
#[command(name = "relmonad", about = "Presheaf relative pseudomonad over finite categories: evaluation and coherence-law checking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate seeded instances and check the selected laws on them.
    Verify(VerifyArgs),
    /// Evaluate a strengthening or `Tf` from a text file at given arguments.
    Compute(ComputeArgs),
    /// Re-run the laws recorded in an exported instance file.
    Replay(ReplayArgs),
    /// Print each law with the two composites it compares.
    Explain(ExplainArgs),
    /// Write one generated instance as a replay file.
    Export(ExportArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub max_objects: usize,
    #[arg(long, default_value_t = 3)]
    pub max_edges: usize,
    /// Bound on the number of elements of each profunctor value.
    #[arg(long, default_value_t = 2)]
    pub max_values: usize,
    #[arg(long, default_value_t = 3)]
    pub max_arity: usize,
}

impl GenArgs {
    fn config(&self) -> GenConfig {
        GenConfig {
            seed: self.seed,
            max_objects: self.max_objects,
            max_edges: self.max_edges,
            max_value_size: self.max_values,
            max_arity: self.max_arity,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct CheckArgs {
    /// Comma-separated law ids, group tags (rpm, strong, mfun, pscom, multicat, laxid, yoneda) or `all`.
    #[arg(long, default_value = "all")]
    pub laws: String,
    /// `transpose` (exact wherever applicable) or `sample`.
    #[arg(long, default_value = "transpose")]
    pub policy: String,
    /// Defect to inject before checking.
    #[arg(long)]
    pub inject: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub check: CheckArgs,
    /// Instances per law group (default: per-group counts).
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    /// Text file with category, presheaf, profunctor and functor blocks.
    #[arg(long)]
    pub input: PathBuf,
    /// Profunctor to strengthen, or functor for `--apply-t`.
    #[arg(long)]
    pub map: String,
    /// Slots (1-based, in application order) to strengthen.
    #[arg(long, value_delimiter = ',')]
    pub strengthen: Vec<usize>,
    /// Evaluate `T` of the named functor instead.
    #[arg(long)]
    pub apply_t: bool,
    /// One argument per slot: an object name, `y(<object>)`, `empty`, or a presheaf name.
    #[arg(long, value_delimiter = ',')]
    pub args: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExplainArgs {
    #[arg(long, default_value = "all")]
    pub laws: String,
    #[command(flatten)]
    pub gen: GenArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    /// Law group tag.
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub check: CheckArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command, writing
/// to `stdout` unless `--out` is given. Returns the exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = write!(stdout, "{e}");
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stdout, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Verify(a) => cmd_verify(&a, stdout),
        Command::Compute(a) => cmd_compute(&a, stdout),
        Command::Replay(a) => cmd_replay(&a, stdout),
        Command::Explain(a) => cmd_explain(&a, stdout),
        Command::Export(a) => cmd_export(&a, stdout),
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Invalid(format!("cannot write output: {e}"))),
    }
}

fn budget() -> Result<usize> {
    Ok(Evaluator::from_env()?.budget())
}

fn suite_config(gen: &GenArgs, check: &CheckArgs, instances: Option<usize>) -> Result<SuiteConfig> {
    let cfg = SuiteConfig {
        gen: gen.config(),
        instances,
        laws: select_laws(&check.laws)?,
        policy: PolicyChoice::parse(&check.policy)?,
        inject: check.inject.as_deref().map(Injector::from_tag).transpose()?,
        budget: budget()?,
    };
    cfg.gen.validate()?;
    Ok(cfg)
}

fn exit_code(r: &SuiteReport) -> i32 {
    if r.count(Status::Fail) > 0 {
        EXIT_FAIL
    } else if r.count(Status::Error) > 0 {
        EXIT_USAGE
    } else {
        EXIT_PASS
    }
}

fn render(r: &SuiteReport, f: Format) -> String {
    match f {
        Format::Text => r.to_text(),
        Format::Machine => r.to_machine(),
    }
}

pub fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let cfg = suite_config(&a.gen, &a.check, a.instances)?;
    let report = run_suite(&cfg)?;
    emit(&a.out, stdout, &render(&report, a.format))?;
    Ok(exit_code(&report))
}

fn parse_arg(doc: &crate::document::Document, slot: &SlotType, s: &str) -> Result<Arg> {
    let s = s.trim();
    let c = slot.category();
    let obj = |n: &str| c.object_by_name(n).ok_or(Error::Unknown { kind: "object", name: n.into() });
    Ok(match slot {
        SlotType::Fin(_) => Arg::Obj(obj(s)?),
        SlotType::Psh(_) => {
            let p: Presheaf = if let Some(n) = s.strip_prefix("y(").and_then(|r| r.strip_suffix(')')) {
                representable(c, obj(n.trim())?)?
            } else if s == "empty" {
                Presheaf::empty(c)
            } else {
                let p = doc.presheaf(s)?;
                if !crate::multimap::same_cat(p.base(), c) {
                    return Err(Error::TypeMismatch(format!("presheaf {s} is not on the category of its slot")));
                }
                (**p).clone()
            };
            Arg::Psh(Arc::new(p))
        }
    })
}

fn write_evaluation(p: &Presheaf) -> String {
    let c: &Arc<FinCategory> = p.base();
    let sizes: Vec<String> = c.objects().map(|x| format!("{}:{}", c.obj_name(x), p.size(x))).collect();
    format!("sizes {}\n{}", sizes.join(" "), write_presheaf_body(p))
}

pub fn cmd_compute(a: &ComputeArgs, stdout: &mut dyn Write) -> Result<i32> {
    let text = fs::read_to_string(&a.input).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", a.input.display())))?;
    let doc = parse_document(&text)?;
    let map = if a.apply_t {
        if !a.strengthen.is_empty() {
            return Err(Error::Invalid("--apply-t and --strengthen are exclusive".into()));
        }
        apply_t(doc.functor(&a.map)?)?
    } else {
        let base = MultiMap::table(&a.map, doc.profunctor(&a.map)?.clone());
        let order: Vec<usize> = a
            .strengthen
            .iter()
            .map(|&s| s.checked_sub(1).ok_or_else(|| Error::Invalid("slots are numbered from 1".into())))
            .collect::<Result<_>>()?;
        base.strengthen_all(&order)?
    };
    if a.args.len() != map.arity() {
        return Err(Error::SlotMismatch(format!("{map} takes {} arguments, got {}", map.arity(), a.args.len())));
    }
    let args: Vec<Arg> = map.slots().iter().zip(&a.args).map(|(s, x)| parse_arg(&doc, s, x)).collect::<Result<_>>()?;
    let ev = Evaluator::from_env()?;
    let p = ev.eval(&map, &args)?;
    let header = format!("{map} at {}\n", describe_args(map.slots(), &args, &a.args.iter().cloned().map(Some).collect::<Vec<_>>()));
    emit(&a.out, stdout, &(header + &write_evaluation(&p)))?;
    Ok(EXIT_PASS)
}

/// A replay file: checking parameters, then the instance tables.
pub fn instance_file(gen: &GenConfig, group: LawGroup, index: usize, laws: &[&str], policy: PolicyChoice, inject: Option<Injector>) -> Result<String> {
    let ev = Evaluator::new(budget()?);
    let inst = gen_instance(gen, &ev, group, index)?;
    Ok(format!(
        "{INSTANCE_VERSION}\ngenerator {}\ninstance group={group} index={index}\ncheck laws={} policy={} inject={}\n{}",
        gen.describe(),
        laws.join(","),
        policy.tag(),
        inject.map_or("none", |i| i.tag()),
        inst.to_text()
    ))
}

pub fn cmd_export(a: &ExportArgs, stdout: &mut dyn Write) -> Result<i32> {
    let group = LawGroup::from_tag(&a.group).ok_or(Error::Unknown { kind: "law group", name: a.group.clone() })?;
    let cfg = suite_config(&a.gen, &a.check, None)?;
    let laws: Vec<&str> = cfg.laws.iter().copied().filter(|id| law(id).is_some_and(|l| l.group == group)).collect();
    if laws.is_empty() {
        return Err(Error::Invalid(format!("no selected law belongs to group {group}")));
    }
    emit(&a.out, stdout, &instance_file(&cfg.gen, group, a.index, &laws, cfg.policy, cfg.inject)?)?;
    Ok(EXIT_PASS)
}

fn key_values<'a>(line: &'a str, head: &str, ln: usize) -> Result<Vec<(&'a str, &'a str)>> {
    let rest = line.strip_prefix(head).ok_or(Error::Parse { line: ln, msg: format!("expected a `{}` line", head.trim()) })?;
    rest.split_whitespace()
        .map(|kv| kv.split_once('=').ok_or(Error::Parse { line: ln, msg: format!("expected key=value, got `{kv}`") }))
        .collect()
}

fn value<'a>(kvs: &[(&'a str, &'a str)], key: &str, ln: usize) -> Result<&'a str> {
    kvs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).ok_or(Error::Parse { line: ln, msg: format!("missing `{key}`") })
}

fn number<T: std::str::FromStr>(kvs: &[(&str, &str)], key: &str, ln: usize) -> Result<T> {
    value(kvs, key, ln)?.parse().map_err(|_| Error::Parse { line: ln, msg: format!("`{key}` is not a number") })
}

/// Regenerates the instance from the recorded parameters, insists that its
/// tables match the stored ones, then re-runs the recorded laws.
pub fn replay_text(text: &str) -> Result<SuiteReport> {
    let mut lines = text.lines();
    let mut next = |ln: usize| lines.next().ok_or(Error::Parse { line: ln, msg: "file is truncated".into() });
    let version = next(1)?;
    if version != INSTANCE_VERSION {
        return Err(Error::Parse { line: 1, msg: format!("unsupported header `{version}`, expected `{INSTANCE_VERSION}`") });
    }
    let g = key_values(next(2)?, "generator ", 2)?;
    let gen = GenConfig {
        seed: number(&g, "seed", 2)?,
        max_objects: number(&g, "max_objects", 2)?,
        max_edges: number(&g, "max_edges", 2)?,
        max_value_size: number(&g, "max_values", 2)?,
        max_arity: number(&g, "max_arity", 2)?,
    };
    let i = key_values(next(3)?, "instance ", 3)?;
    let tag = value(&i, "group", 3)?;
    let group = LawGroup::from_tag(tag).ok_or(Error::Parse { line: 3, msg: format!("unknown group {tag}") })?;
    let index: usize = number(&i, "index", 3)?;
    let c = key_values(next(4)?, "check ", 4)?;
    let laws = select_laws(value(&c, "laws", 4)?)?;
    let policy = PolicyChoice::parse(value(&c, "policy", 4)?)?;
    let inject = match value(&c, "inject", 4)? {
        "none" => None,
        t => Some(Injector::from_tag(t)?),
    };
    let stored: String = text.lines().skip(4).map(|l| format!("{l}\n")).collect();
    parse_document(&stored)?;
    let ev = Evaluator::new(budget()?);
    let inst = gen_instance(&gen, &ev, group, index)?;
    if inst.to_text() != stored {
        return Err(Error::Invalid("stored tables differ from the instance the recorded parameters generate".into()));
    }
    let cfg = SuiteConfig { gen, instances: Some(1), laws, policy, inject, budget: budget()? };
    Ok(SuiteReport { config: describe_config(&cfg), reports: check_instance(&inst, &cfg.laws, policy, inject, cfg.budget) })
}

pub fn cmd_replay(a: &ReplayArgs, stdout: &mut dyn Write) -> Result<i32> {
    let text = read(&a.file)?;
    let report = replay_text(&text)?;
    emit(&a.out, stdout, &render(&report, a.format))?;
    Ok(exit_code(&report))
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", p.display())))
}

pub fn cmd_explain(a: &ExplainArgs, stdout: &mut dyn Write) -> Result<i32> {
    let ids = select_laws(&a.laws)?;
    let cfg = a.gen.config();
    let mut out = String::new();
    for l in LAWS.iter().filter(|l| ids.contains(&l.id)) {
        out.push_str(&format!("{}  [{}]\n    {}\n", l.id, l.group, l.statement));
        if let Some((lhs, rhs)) = legs_for(l.id, &cfg)? {
            out.push_str(&format!("    left:  {lhs}\n    right: {rhs}\n"));
        }
    }
    emit(&a.out, stdout, &out)?;
    Ok(EXIT_PASS)
}
