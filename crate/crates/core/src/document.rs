//! Named blocks of categories, presheaves, multi-profunctors and functors in
//! one text file.
//!
//! ```text
//! category C
//! obj a
//! ...
//! end
//! presheaf P on C
//! at a = {p,q}
//! end
//! profunctor f : C,C -> C
//! at (a; a,b) = {0}
//! end
//! functor F : C,C -> C
//! obj (a,b) = b
//! mor s1 u (a,b) = v
//! end
//! ```
//!
//! Slots are named `s1`, `s2`, … inside profunctor and functor bodies.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{parse_category_lines, tuples, FinCategory};
use crate::multimap::{parse_profunctor_body, MultiFunctor, MultiProfunctor};
use crate::presheaf::{parse_presheaf_body, Presheaf};

#[derive(Clone, Debug, Default)]
pub struct Document {
    pub categories: Vec<(String, Arc<FinCategory>)>,
    pub presheaves: Vec<(String, Arc<Presheaf>)>,
    pub profunctors: Vec<(String, Arc<MultiProfunctor>)>,
    pub functors: Vec<(String, Arc<MultiFunctor>)>,
}

fn find<'a, T>(items: &'a [(String, T)], kind: &'static str, name: &str) -> Result<&'a T> {
    items.iter().find(|(n, _)| n == name).map(|(_, v)| v).ok_or(Error::Unknown { kind, name: name.into() })
}

impl Document {
    pub fn category(&self, name: &str) -> Result<&Arc<FinCategory>> {
        find(&self.categories, "category", name)
    }

    pub fn presheaf(&self, name: &str) -> Result<&Arc<Presheaf>> {
        find(&self.presheaves, "presheaf", name)
    }

    pub fn profunctor(&self, name: &str) -> Result<&Arc<MultiProfunctor>> {
        find(&self.profunctors, "profunctor", name)
    }

    pub fn functor(&self, name: &str) -> Result<&Arc<MultiFunctor>> {
        find(&self.functors, "functor", name)
    }
}

fn slot_names(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("s{k}")).collect()
}

/// `<name> : C1,C2 -> C0`
fn parse_signature<'a>(rest: &'a str, line: usize) -> Result<(&'a str, Vec<&'a str>, &'a str)> {
    let bad = || Error::Parse { line, msg: "expected `<name> : <slots> -> <codomain>`".into() };
    let (name, sig) = rest.split_once(':').ok_or_else(bad)?;
    let (slots, cod) = sig.split_once("->").ok_or_else(bad)?;
    let slots: Vec<&str> = slots.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    Ok((name.trim(), slots, cod.trim()))
}

pub fn parse_document(text: &str) -> Result<Document> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let mut doc = Document::default();
    let mut i = 0;
    while i < lines.len() {
        let (ln, raw) = lines[i];
        let head = raw.trim();
        i += 1;
        if head.is_empty() || head.starts_with('#') {
            continue;
        }
        let start = i;
        while i < lines.len() && lines[i].1.trim() != "end" {
            i += 1;
        }
        if i == lines.len() {
            return Err(Error::Parse { line: ln, msg: "block is not closed by `end`".into() });
        }
        let body = lines[start..i].iter().copied();
        i += 1;
        let (kind, rest) = head.split_once(' ').ok_or(Error::Parse { line: ln, msg: format!("unexpected line `{head}`") })?;
        let rest = rest.trim();
        let lookup = |n: &str| doc.category(n).cloned().map_err(|_| Error::Parse { line: ln, msg: format!("dangling category {n}") });
        match kind {
            "category" => {
                let c = parse_category_lines(body)?;
                crate::fincat::validate_category(&c).map_err(|v| Error::Parse { line: ln, msg: v.to_string() })?;
                doc.categories.push((rest.to_string(), Arc::new(c)));
            }
            "presheaf" => {
                let (name, on) = rest.split_once(" on ").ok_or(Error::Parse { line: ln, msg: "expected `presheaf <name> on <category>`".into() })?;
                let c = lookup(on.trim())?;
                let p = parse_presheaf_body(&c, body)?;
                p.validate().map_err(|v| Error::Parse { line: ln, msg: v.to_string() })?;
                doc.presheaves.push((name.trim().to_string(), Arc::new(p)));
            }
            "profunctor" => {
                let (name, slots, cod) = parse_signature(rest, ln)?;
                let slots: Vec<Arc<FinCategory>> = slots.into_iter().map(lookup).collect::<Result<_>>()?;
                let p = parse_profunctor_body(&lookup(cod)?, &slots, &slot_names(slots.len()), body)?;
                p.validate().map_err(|v| Error::Parse { line: ln, msg: v.to_string() })?;
                doc.profunctors.push((name.to_string(), Arc::new(p)));
            }
            "functor" => {
                let (name, slots, cod) = parse_signature(rest, ln)?;
                let slots: Vec<Arc<FinCategory>> = slots.into_iter().map(lookup).collect::<Result<_>>()?;
                let f = parse_functor_body(name, &slots, &lookup(cod)?, body)?;
                doc.functors.push((name.to_string(), Arc::new(f)));
            }
            _ => return Err(Error::Parse { line: ln, msg: format!("unknown block kind `{kind}`") }),
        }
    }
    Ok(doc)
}

fn parse_objects(s: &str, cats: &[Arc<FinCategory>], line: usize) -> Result<Vec<usize>> {
    let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or(Error::Parse { line, msg: "expected (<b1>,...)".into() })?;
    let names: Vec<&str> = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.len() != cats.len() {
        return Err(Error::Parse { line, msg: format!("tuple has {} entries, expected {}", names.len(), cats.len()) });
    }
    names.iter().zip(cats).map(|(n, c)| c.object_by_name(n).ok_or(Error::Parse { line, msg: format!("dangling object {n}") })).collect()
}

fn parse_functor_body<'a>(
    name: &str,
    slots: &[Arc<FinCategory>],
    cod: &Arc<FinCategory>,
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<MultiFunctor> {
    let names = slot_names(slots.len());
    let mut obj: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut mor: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
    for (ln, raw) in lines {
        let line = raw.trim();
        let bad = |msg: &str| Error::Parse { line: ln, msg: msg.into() };
        if let Some(rest) = line.strip_prefix("obj ") {
            let (t, y) = rest.rsplit_once('=').ok_or_else(|| bad("expected `obj (<tuple>) = <object>`"))?;
            let t = parse_objects(t, slots, ln)?;
            let y = cod.object_by_name(y.trim()).ok_or_else(|| bad("dangling object"))?;
            if obj.insert(t, y).is_some() {
                return Err(bad("duplicate object line"));
            }
        } else if let Some(rest) = line.strip_prefix("mor ") {
            let (lhs, n) = rest.rsplit_once('=').ok_or_else(|| bad("expected `mor <slot> <mor> (<tuple>) = <mor>`"))?;
            let open = lhs.find('(').ok_or_else(|| bad("expected tuple"))?;
            let head: Vec<&str> = lhs[..open].split_whitespace().collect();
            if head.len() != 2 {
                return Err(bad("expected `mor <slot> <mor> (<tuple>) = <mor>`"));
            }
            let k = names.iter().position(|s| s == head[0]).ok_or_else(|| bad("unknown slot"))?;
            let m = slots[k].morphism_by_name(head[1]).ok_or_else(|| bad("dangling morphism"))?;
            let t = parse_objects(&lhs[open..], slots, ln)?;
            if t[k] != slots[k].src(m) {
                return Err(bad("tuple does not sit at the source of the morphism"));
            }
            let n = cod.morphism_by_name(n.trim()).ok_or_else(|| bad("dangling morphism"))?;
            if mor.insert((k, m, t), n).is_some() {
                return Err(bad("duplicate morphism line"));
            }
        } else if !line.is_empty() && !line.starts_with('#') {
            return Err(bad("expected an `obj` or `mor` line"));
        }
    }
    let dims: Vec<usize> = slots.iter().map(|c| c.num_objects()).collect();
    if let Some(t) = tuples(&dims).into_iter().find(|t| !obj.contains_key(t)) {
        return Err(Error::Parse { line: 0, msg: format!("functor {name} has no object for {t:?}") });
    }
    let missing = std::cell::Cell::new(false);
    let f = MultiFunctor::from_fn(
        name,
        slots.to_vec(),
        cod.clone(),
        |t| obj[t],
        |k, m, t| match mor.get(&(k, m, t.to_vec())) {
            Some(&n) => n,
            None if slots[k].is_identity(m) => cod.id(obj[t]),
            None => {
                missing.set(true);
                cod.id(obj[t])
            }
        },
    );
    if missing.get() {
        return Err(Error::Parse { line: 0, msg: format!("functor {name} is missing morphism lines") });
    }
    f
}

pub fn write_functor_body(f: &MultiFunctor) -> String {
    let names = slot_names(f.arity());
    let cod = f.codomain();
    let dims: Vec<usize> = f.slots().iter().map(|c| c.num_objects()).collect();
    let tuple = |t: &[usize]| {
        let parts: Vec<&str> = t.iter().enumerate().map(|(k, &b)| f.slots()[k].obj_name(b)).collect();
        format!("({})", parts.join(","))
    };
    let mut out = String::new();
    for t in tuples(&dims) {
        out.push_str(&format!("obj {} = {}\n", tuple(&t), cod.obj_name(f.obj_at(&t))));
    }
    for (k, c) in f.slots().iter().enumerate() {
        for m in c.morphisms().filter(|&m| !c.is_identity(m)) {
            for t in tuples(&dims).into_iter().filter(|t| t[k] == c.src(m)) {
                out.push_str(&format!("mor {} {} {} = {}\n", names[k], c.mor_name(m), tuple(&t), cod.mor_name(f.mor_at(k, m, &t))));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::write_category;
    use crate::multimap::write_profunctor_body;

    #[test]
    fn functor_and_profunctor_round_trip() {
        let a = Arc::new(FinCategory::walking_arrow());
        let f = MultiFunctor::tupling("F", vec![a.clone(), a.clone()]);
        let p = MultiProfunctor::yoneda_along(&f);
        let text = format!(
            "category A\n{}end\ncategory P\n{}end\nfunctor F : A,A -> P\n{}end\nprofunctor y : A,A -> P\n{}end\n",
            write_category(&a),
            write_category(f.codomain()),
            write_functor_body(&f),
            write_profunctor_body(&p, &slot_names(2))
        );
        let doc = parse_document(&text).unwrap();
        let g = doc.functor("F").unwrap();
        for t in tuples(&[2, 2]) {
            assert_eq!(g.obj_at(&t), f.obj_at(&t));
        }
        assert!(doc.profunctor("y").unwrap().dims() == p.dims());
    }

    #[test]
    fn unclosed_and_dangling_blocks_are_parse_errors() {
        assert!(matches!(parse_document("category C\nobj a\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_document("presheaf P on D\nend\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_document("widget W\nend\n"), Err(Error::Parse { .. })));
    }
}
