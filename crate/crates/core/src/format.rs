//! Text formats for algebras, homomorphisms, split points, groupoids and
//! witnesses, and loading a directory of them as a linked suite.
//!
//! ```text
//! algebra SL2
//! size 2
//! const 0 = 0
//! op meet/2 = [0 0 0 1]
//!
//! hom pi1 : SL2xSL2 -> SL2 = [0 0 1 1]
//!
//! point proj : SL2xSL2 -> SL2
//! p = [0 0 1 1]
//! s = [0 3]
//! ```
//!
//! `#` starts a comment everywhere.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::algebra::{AlgebraRef, FiniteAlgebra, Signature, Symbol};
use crate::error::{Error, Result};
use crate::hom::Homomorphism;
use crate::points::{validate_point, GroupoidData, SplitPoint};
use crate::term::Term;
use crate::witness::{LocalMode, LocalWitness, MaltsevWitness};
use crate::Elem;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_list(line: usize, s: &str) -> Result<Vec<Elem>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| parse_error(line, "expected `[...]`"))?;
    inner
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| parse_error(line, format!("`{t}` is not an element index")))
        })
        .collect()
}

fn parse_number(line: usize, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| parse_error(line, format!("`{}` is not a number", s.trim())))
}

/// `keyword rest`, requiring the keyword.
fn keyword<'a>(line: usize, l: &'a str, kw: &str) -> Result<&'a str> {
    match l.split_once(char::is_whitespace) {
        Some((k, rest)) if k == kw => Ok(rest.trim()),
        _ => Err(parse_error(line, format!("expected `{kw} ...`"))),
    }
}

/// `key = [..]`.
fn assignment(line: usize, l: &str) -> Result<(String, Vec<Elem>)> {
    let (k, v) = l
        .split_once('=')
        .ok_or_else(|| parse_error(line, "expected `<name> = [...]`"))?;
    Ok((k.trim().to_string(), parse_list(line, v)?))
}

/// `<name> : <dom> -> <cod>`.
fn arrow_header(line: usize, s: &str) -> Result<(String, String, String)> {
    let (name, rest) = s
        .split_once(':')
        .ok_or_else(|| parse_error(line, "expected `<name> : <dom> -> <cod>`"))?;
    let (dom, cod) = rest
        .split_once("->")
        .ok_or_else(|| parse_error(line, "expected `<dom> -> <cod>`"))?;
    let word = |w: &str| -> Result<String> {
        let w = w.trim();
        if w.is_empty() || w.contains(char::is_whitespace) {
            return Err(parse_error(line, format!("`{w}` is not a name")));
        }
        Ok(w.to_string())
    };
    Ok((word(name)?, word(dom)?, word(cod)?))
}

pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    let mut it = lines(text);
    let (l1, first) = it.next().ok_or_else(|| parse_error(1, "empty algebra file"))?;
    let name = keyword(l1, first, "algebra")?.to_string();
    let (l2, second) = it.next().ok_or_else(|| parse_error(l1, "missing `size`"))?;
    let size = parse_number(l2, keyword(l2, second, "size")?)?;
    let mut symbols = Vec::new();
    let mut tables = Vec::new();
    let mut designated: Option<String> = None;
    for (ln, l) in it {
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match kw {
            "const" => {
                if designated.is_some() {
                    return Err(parse_error(ln, "only one designated constant is allowed"));
                }
                let (sym, value) = rest
                    .split_once('=')
                    .ok_or_else(|| parse_error(ln, "expected `const <symbol> = <element>`"))?;
                let sym = sym.trim().to_string();
                symbols.push(Symbol::new(sym.clone(), 0));
                tables.push(vec![parse_number(ln, value)?]);
                designated = Some(sym);
            }
            "op" => {
                let (head, table) = rest
                    .split_once('=')
                    .ok_or_else(|| parse_error(ln, "expected `op <name>/<arity> = [...]`"))?;
                let (sym, arity) = head
                    .trim()
                    .rsplit_once('/')
                    .ok_or_else(|| parse_error(ln, "expected `<name>/<arity>`"))?;
                symbols.push(Symbol::new(sym.trim(), parse_number(ln, arity)?));
                tables.push(parse_list(ln, table)?);
            }
            other => return Err(parse_error(ln, format!("unknown directive `{other}`"))),
        }
    }
    // tables follow the signature's sorted symbol order
    let mut order: Vec<usize> = (0..symbols.len()).collect();
    order.sort_by(|&i, &j| symbols[i].name.cmp(&symbols[j].name));
    let tables = order.iter().map(|&i| tables[i].clone()).collect();
    let sig = Signature::new(symbols, designated.as_deref())?;
    FiniteAlgebra::new(name, size, sig, tables)
}

/// A homomorphism description with unresolved algebra names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomDesc {
    pub name: String,
    pub dom: String,
    pub cod: String,
    pub map: Vec<Elem>,
}

pub fn parse_hom(text: &str) -> Result<HomDesc> {
    let mut it = lines(text);
    let (ln, l) = it.next().ok_or_else(|| parse_error(1, "empty homomorphism file"))?;
    let rest = keyword(ln, l, "hom")?;
    let (head, map) = rest
        .rsplit_once('=')
        .ok_or_else(|| parse_error(ln, "expected `= [...]`"))?;
    let (name, dom, cod) = arrow_header(ln, head)?;
    if let Some((ln, _)) = it.next() {
        return Err(parse_error(ln, "trailing content after the homomorphism"));
    }
    Ok(HomDesc {
        name,
        dom,
        cod,
        map: parse_list(ln, map)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointDesc {
    pub name: String,
    pub total: String,
    pub base: String,
    pub p: Vec<Elem>,
    pub s: Vec<Elem>,
}

pub fn parse_point(text: &str) -> Result<PointDesc> {
    let mut it = lines(text);
    let (ln, l) = it.next().ok_or_else(|| parse_error(1, "empty point file"))?;
    let (name, total, base) = arrow_header(ln, keyword(ln, l, "point")?)?;
    let mut p = None;
    let mut s = None;
    for (ln, l) in it {
        let (k, v) = assignment(ln, l)?;
        let slot = match k.as_str() {
            "p" => &mut p,
            "s" => &mut s,
            other => return Err(parse_error(ln, format!("unknown map `{other}`"))),
        };
        if slot.replace(v).is_some() {
            return Err(parse_error(ln, format!("`{k}` given twice")));
        }
    }
    let missing = |k: &str| parse_error(ln, format!("point `{name}` lacks `{k}`"));
    Ok(PointDesc {
        p: p.ok_or_else(|| missing("p"))?,
        s: s.ok_or_else(|| missing("s"))?,
        name,
        total,
        base,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidDesc {
    pub name: String,
    pub objects: String,
    pub arrows: String,
    pub composable: String,
    pub maps: BTreeMap<String, Vec<Elem>>,
}

const GROUPOID_MAPS: [&str; 7] = ["d1", "d2", "s", "m", "inv", "p1", "p2"];

pub fn parse_groupoid(text: &str) -> Result<GroupoidDesc> {
    let mut it = lines(text);
    let (ln, l) = it.next().ok_or_else(|| parse_error(1, "empty groupoid file"))?;
    let name = keyword(ln, l, "groupoid")?.to_string();
    let mut parts: [Option<String>; 3] = [None, None, None];
    let mut maps = BTreeMap::new();
    for (ln, l) in it {
        if l.contains('=') {
            let (k, v) = assignment(ln, l)?;
            if !GROUPOID_MAPS.contains(&k.as_str()) {
                return Err(parse_error(ln, format!("unknown structure map `{k}`")));
            }
            if maps.insert(k.clone(), v).is_some() {
                return Err(parse_error(ln, format!("`{k}` given twice")));
            }
            continue;
        }
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let slot = match kw {
            "objects" => 0,
            "arrows" => 1,
            "composable" => 2,
            other => return Err(parse_error(ln, format!("unknown directive `{other}`"))),
        };
        parts[slot] = Some(rest.trim().to_string());
    }
    for k in GROUPOID_MAPS {
        if !maps.contains_key(k) {
            return Err(parse_error(ln, format!("groupoid `{name}` lacks `{k}`")));
        }
    }
    let [objects, arrows, composable] = parts;
    let missing = |k: &str| parse_error(ln, format!("groupoid `{name}` lacks `{k}`"));
    Ok(GroupoidDesc {
        objects: objects.ok_or_else(|| missing("objects"))?,
        arrows: arrows.ok_or_else(|| missing("arrows"))?,
        composable: composable.ok_or_else(|| missing("composable"))?,
        name,
        maps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessFile {
    Anticommutative(MaltsevWitness),
    Local(LocalWitness, LocalMode),
}

/// `witness <name> : anticommutative | local | ddcc`, then one term per
/// line: `u`/`v`/`p` or `b`/`c`/`p`. `m` and `n` are the line counts.
pub fn parse_witness(text: &str) -> Result<(String, WitnessFile)> {
    let mut it = lines(text);
    let (ln, l) = it.next().ok_or_else(|| parse_error(1, "empty witness file"))?;
    let (name, kind) = keyword(ln, l, "witness")?
        .split_once(':')
        .ok_or_else(|| parse_error(ln, "expected `witness <name> : <kind>`"))?;
    let (name, kind) = (name.trim().to_string(), kind.trim());
    let keys: [&str; 3] = match kind {
        "anticommutative" => ["u", "v", "p"],
        "local" | "ddcc" => ["b", "c", "p"],
        other => return Err(parse_error(ln, format!("unknown witness kind `{other}`"))),
    };
    let mut lists: [Vec<Term>; 3] = Default::default();
    for (ln, l) in it {
        let (k, t) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let slot = keys
            .iter()
            .position(|&key| key == k)
            .ok_or_else(|| parse_error(ln, format!("unexpected `{k}` in a {kind} witness")))?;
        let term: Term = t.parse().map_err(|e| match e {
            Error::Parse { message, .. } => parse_error(ln, message),
            other => other,
        })?;
        lists[slot].push(term);
    }
    let [first, second, p] = lists;
    let (m, n) = (first.len(), p.len());
    let file = match kind {
        "anticommutative" => WitnessFile::Anticommutative(MaltsevWitness {
            m,
            n,
            u: first,
            v: second,
            p,
        }),
        _ => WitnessFile::Local(
            LocalWitness {
                m,
                n,
                b: first,
                c: second,
                p,
            },
            if kind == "local" {
                LocalMode::Local
            } else {
                LocalMode::Ddcc
            },
        ),
    };
    Ok((name, file))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Attaches the file name to parse errors.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

fn lookup<'a>(algebras: &'a BTreeMap<String, AlgebraRef>, name: &str) -> Result<&'a AlgebraRef> {
    algebras
        .get(name)
        .ok_or_else(|| Error::DanglingReference(name.to_string()))
}

pub fn resolve_hom(desc: &HomDesc, algebras: &BTreeMap<String, AlgebraRef>) -> Result<Homomorphism> {
    Homomorphism::new(
        lookup(algebras, &desc.dom)?.clone(),
        lookup(algebras, &desc.cod)?.clone(),
        desc.map.clone(),
    )
}

pub fn resolve_point(desc: &PointDesc, algebras: &BTreeMap<String, AlgebraRef>) -> Result<SplitPoint> {
    let total = lookup(algebras, &desc.total)?;
    let base = lookup(algebras, &desc.base)?;
    let p = Homomorphism::new(total.clone(), base.clone(), desc.p.clone())?;
    let s = Homomorphism::new(base.clone(), total.clone(), desc.s.clone())?;
    validate_point(p, s)
}

pub fn resolve_groupoid(
    desc: &GroupoidDesc,
    algebras: &BTreeMap<String, AlgebraRef>,
) -> Result<GroupoidData> {
    let c0 = lookup(algebras, &desc.objects)?.clone();
    let c1 = lookup(algebras, &desc.arrows)?.clone();
    let c2 = lookup(algebras, &desc.composable)?.clone();
    let hom = |k: &str, dom: &AlgebraRef, cod: &AlgebraRef| {
        Homomorphism::new(dom.clone(), cod.clone(), desc.maps[k].clone()).map_err(|e| {
            Error::MalformedGroupoid(format!("structure map `{k}`: {e}"))
        })
    };
    Ok(GroupoidData {
        d1: hom("d1", &c1, &c0)?,
        d2: hom("d2", &c1, &c0)?,
        s: hom("s", &c0, &c1)?,
        m: hom("m", &c2, &c1)?,
        sigma: hom("inv", &c1, &c1)?,
        p1: hom("p1", &c2, &c1)?,
        p2: hom("p2", &c2, &c1)?,
        c0,
        c1,
        c2,
    })
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    };
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

fn with_extension(paths: &[PathBuf], ext: &str) -> Vec<PathBuf> {
    paths
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .cloned()
        .collect()
}

/// Every `.alg` file in `dir`, by algebra name.
pub fn load_algebras(dir: &Path) -> Result<BTreeMap<String, AlgebraRef>> {
    let mut algebras = BTreeMap::new();
    for path in with_extension(&sorted_entries(dir)?, "alg") {
        let a = in_file(&path, parse_algebra(&read_file(&path)?))?;
        let name = a.name().to_string();
        if algebras.insert(name.clone(), Arc::new(a)).is_some() {
            return Err(Error::DuplicateName(name));
        }
    }
    Ok(algebras)
}

/// A directory of fixtures, cross-linked by name.
#[derive(Debug, Clone, Default)]
pub struct FixtureSuite {
    pub algebras: BTreeMap<String, AlgebraRef>,
    pub homs: BTreeMap<String, Homomorphism>,
    pub points: BTreeMap<String, SplitPoint>,
    pub groupoids: BTreeMap<String, GroupoidData>,
}

pub fn load_fixture_suite(dir: &Path) -> Result<FixtureSuite> {
    let paths = sorted_entries(dir)?;
    let algebras = load_algebras(dir)?;
    let mut suite = FixtureSuite {
        algebras,
        ..FixtureSuite::default()
    };
    fn insert<T>(map: &mut BTreeMap<String, T>, name: String, value: T) -> Result<()> {
        if map.contains_key(&name) {
            return Err(Error::DuplicateName(name));
        }
        map.insert(name, value);
        Ok(())
    }
    for path in with_extension(&paths, "hom") {
        let desc = in_file(&path, parse_hom(&read_file(&path)?))?;
        let h = resolve_hom(&desc, &suite.algebras)?;
        insert(&mut suite.homs, desc.name, h)?;
    }
    for path in with_extension(&paths, "point") {
        let desc = in_file(&path, parse_point(&read_file(&path)?))?;
        let p = resolve_point(&desc, &suite.algebras)?;
        insert(&mut suite.points, desc.name, p)?;
    }
    for path in with_extension(&paths, "gpd") {
        let desc = in_file(&path, parse_groupoid(&read_file(&path)?))?;
        let g = resolve_groupoid(&desc, &suite.algebras)?;
        insert(&mut suite.groupoids, desc.name, g)?;
    }
    Ok(suite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn algebra_round_trip() {
        for a in fixtures::all() {
            let text = a.to_string();
            assert_eq!(parse_algebra(&text).unwrap(), a, "{text}");
        }
    }

    #[test]
    fn algebra_errors() {
        let bad_entry = "algebra SL2\nsize 2\nconst 0 = 0\nop meet/2 = [0 0 0 2]\n";
        assert!(matches!(parse_algebra(bad_entry), Err(Error::EntryOutOfRange { .. })));
        let bad_len = "algebra SL2\nsize 2\nop meet/2 = [0 0 0]\n";
        assert!(matches!(parse_algebra(bad_len), Err(Error::TableLength { .. })));
        let dup = "algebra A\nsize 2\nop f/1 = [0 1]\nop f/1 = [1 0]\n";
        assert!(matches!(parse_algebra(dup), Err(Error::DuplicateSymbol(_))));
        let garbage = "algebra A\nsize two\n";
        assert!(matches!(parse_algebra(garbage), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# the semilattice\nalgebra SL2\n\nsize 2 # two elements\nop meet/2 = [0 0 0 1]\nconst 0 = 0\n";
        assert_eq!(parse_algebra(text).unwrap(), fixtures::sl2());
    }

    #[test]
    fn homs_and_points() {
        let h = parse_hom("hom pi1 : SL2xSL2 -> SL2 = [0 0 1 1]").unwrap();
        assert_eq!(h.map, vec![0, 0, 1, 1]);
        assert_eq!((h.dom.as_str(), h.cod.as_str()), ("SL2xSL2", "SL2"));
        let mut algebras = BTreeMap::new();
        algebras.insert("SL2".to_string(), Arc::new(fixtures::sl2()));
        assert!(matches!(resolve_hom(&h, &algebras), Err(Error::DanglingReference(n)) if n == "SL2xSL2"));
        algebras.insert("SL2xSL2".to_string(), Arc::new(fixtures::sl2xsl2()));
        assert!(resolve_hom(&h, &algebras).is_ok());

        let p = parse_point("point proj : SL2xSL2 -> SL2\np = [0 0 1 1]\ns = [0 3]\n").unwrap();
        assert!(resolve_point(&p, &algebras).is_ok());
        let bad = parse_point("point proj : SL2xSL2 -> SL2\np = [0 0 1 1]\ns = [0 0]\n").unwrap();
        assert!(matches!(resolve_point(&bad, &algebras), Err(Error::SplitLaw(1))));
    }

    #[test]
    fn witnesses() {
        let (name, w) = parse_witness("witness hand : anticommutative\nu x1\nv 0\np meet(x2, x1)\n").unwrap();
        assert_eq!(name, "hand");
        match w {
            WitnessFile::Anticommutative(w) => {
                assert_eq!((w.m, w.n), (1, 1));
                assert_eq!(w.p[0].to_string(), "meet(x2, x1)");
            }
            other => panic!("{other:?}"),
        }
        let (_, w) = parse_witness("witness t : ddcc\np x1\n").unwrap();
        assert!(matches!(w, WitnessFile::Local(_, LocalMode::Ddcc)));
        assert!(parse_witness("witness t : local\nu x1\n").is_err());
        assert!(parse_witness("witness t : local\np f(x1\n").is_err());
    }
}
