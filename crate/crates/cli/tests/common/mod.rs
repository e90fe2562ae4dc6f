#![allow(dead_code)]

use std::path::PathBuf;

use anticomm::commutation::{decide_anticommutative, find_cooperator};
use anticomm::format::{load_fixture_suite, parse_witness, read_file, FixtureSuite, WitnessFile};
use anticomm::free::{has_jonsson_tarski_term, has_majority_term};
use anticomm::lemmas::{
    ddcc_on_product, decide_locally_anticommutative, shifting_lemma_holds, shifting_on_pullback,
    triangular_lemma_holds, triangular_on_pullback,
};
use anticomm::points::{check_point_anticommutativity, verify_internal_groupoid};
use anticomm::witness::{verify_anticommutativity_witness, verify_local_witness};
use anticomm::{AlgebraRef, Limits};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> String {
    fixtures_dir().join(name).display().to_string()
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// In-process run.
pub fn run(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = anticomm_cli::run(
        std::iter::once("anticomm").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Runs the built binary.
pub fn run_binary(args: &[&str]) -> Output {
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_anticomm"))
        .args(args)
        .output()
        .unwrap();
    Output {
        code: o.status.code().unwrap(),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

pub struct Case {
    pub args: Vec<String>,
    /// The verdict of the corresponding library call.
    pub holds: bool,
}

/// Every command on the shipped fixtures, with verdicts from direct library
/// calls.
pub fn command_matrix() -> Vec<Case> {
    let suite: FixtureSuite = load_fixture_suite(&fixtures_dir()).unwrap();
    let limits = Limits::default();
    let alg = |name: &str| -> AlgebraRef { suite.algebras[name].clone() };
    let file = |f: &str| fixture(f);
    let mut cases = Vec::new();
    let mut push = |args: Vec<String>, holds: bool| cases.push(Case { args, holds });
    let pointed = [("sl2.alg", "SL2"), ("z2.alg", "Z2"), ("ps2.alg", "PS2"), ("maj2.alg", "MAJ2")];
    for (f, n) in pointed {
        let v = decide_anticommutative(&[alg(n)], &limits).unwrap();
        push(vec!["check".into(), "anticommutative".into(), file(f)], v.holds);
    }
    for (f, n) in pointed.iter().copied().chain([("l2.alg", "L2")]) {
        let v = decide_locally_anticommutative(&[alg(n)], &limits).unwrap();
        push(vec!["check".into(), "locally-anticommutative".into(), file(f)], v.holds);
        let cap = limits.max_con_size;
        let t = triangular_lemma_holds(&alg(n), cap).unwrap();
        push(vec!["check".into(), "triangular".into(), file(f)], t.holds);
        let s = shifting_lemma_holds(&alg(n), cap).unwrap();
        push(vec!["check".into(), "shifting".into(), file(f)], s.holds);
        let d = ddcc_on_product(&alg(n), &alg(n)).unwrap();
        push(vec!["check".into(), "ddcc".into(), file(f), file(f)], d.holds);
        let kinds: &[&str] = if n == "L2" { &["majority"] } else { &["majority", "jt"] };
        for &kind in kinds {
            let t = if kind == "majority" {
                has_majority_term(&[alg(n)], &limits).unwrap()
            } else {
                has_jonsson_tarski_term(&[alg(n)], &limits).unwrap()
            };
            push(vec!["terms".into(), kind.into(), file(f)], t.is_some());
        }
    }
    for (f, n) in [("z2xz2.alg", "Z2xZ2"), ("sl2xsl2.alg", "SL2xSL2")] {
        let t = triangular_lemma_holds(&alg(n), limits.max_con_size).unwrap();
        push(vec!["check".into(), "triangular".into(), file(f)], t.holds);
    }
    for (a, b) in [("pi1", "pi1"), ("pi1", "pi2"), ("sum", "sum")] {
        let (f, g) = (&suite.homs[a], &suite.homs[b]);
        let (fa, fb) = (file(&format!("{a}.hom")), file(&format!("{b}.hom")));
        let t = triangular_on_pullback(f, g).unwrap();
        push(vec!["check".into(), "pullback-triangular".into(), fa.clone(), fb.clone()], t.holds);
        let s = shifting_on_pullback(f, g).unwrap();
        push(vec!["check".into(), "pullback-shifting".into(), fa.clone(), fb.clone()], s.holds);
        let c = find_cooperator(f, g).unwrap();
        push(vec!["commute".into(), fa, fb], c.is_some());
    }
    for (name, p) in &suite.points {
        let v = check_point_anticommutativity(p).unwrap();
        push(vec!["check".into(), "point".into(), file(&format!("{name}.point"))], v.holds);
    }
    for (w, basis) in [("sl2-hand.wit", "SL2"), ("z2-bad.wit", "Z2")] {
        let (_, parsed) = parse_witness(&read_file(&fixtures_dir().join(w)).unwrap()).unwrap();
        let holds = match &parsed {
            WitnessFile::Anticommutative(x) => verify_anticommutativity_witness(x, &[alg(basis)]),
            WitnessFile::Local(x, mode) => verify_local_witness(x, &[alg(basis)], *mode),
        };
        let f = if basis == "SL2" { "sl2.alg" } else { "z2.alg" };
        push(vec!["verify".into(), "witness".into(), file(w), file(f)], holds.unwrap().passes());
    }
    for (name, g) in &suite.groupoids {
        let v = verify_internal_groupoid(g).unwrap();
        push(vec!["verify".into(), "groupoid".into(), file(&format!("{name}.gpd"))], v.valid);
    }
    push(vec!["suite".into(), fixtures_dir().display().to_string()], true);
    cases
}

/// Invocations that must exit 2.
pub fn error_matrix() -> Vec<Vec<String>> {
    let missing = fixture("missing.alg");
    vec![
        vec!["check".into(), "anticommutative".into(), missing],
        vec!["check".into(), "anticommutative".into(), fixture("l2.alg")],
        vec!["frobnicate".into()],
        vec!["terms".into(), "jt".into(), fixture("l2.alg")],
        vec!["check".into(), "ddcc".into(), fixture("sl2.alg")],
        vec!["verify".into(), "witness".into(), fixture("sl2-hand.wit"), fixture("z2.alg")],
        vec![
            "check".into(),
            "triangular".into(),
            fixture("sl2xsl2.alg"),
            "--max-con-size".into(),
            "2".into(),
        ],
        vec![
            "check".into(),
            "anticommutative".into(),
            fixture("sl2.alg"),
            "--max-free-size".into(),
            "1".into(),
        ],
    ]
}
