//! Front end for the `anticomm` binary: argument parsing, fixture loading,
//! dispatch to the library and report rendering.
//!
//! Exit codes: 0 when the property holds, 1 when it fails (the report then
//! carries a witness or counterexample), 2 on usage, parse, cap or I/O
//! errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anticomm::commutation::{decide_anticommutative, find_cooperator};
use anticomm::format::{self, WitnessFile};
use anticomm::free::{has_jonsson_tarski_term, has_majority_term};
use anticomm::lemmas::{
    ddcc_on_product, decide_locally_anticommutative, shifting_lemma_holds, shifting_on_pullback,
    triangular_lemma_holds, triangular_on_pullback, LemmaVerdict,
};
use anticomm::points::{check_point_anticommutativity, verify_internal_groupoid, SplitPoint};
use anticomm::witness::{
    verify_anticommutativity_witness, verify_local_witness, WitnessCheck,
};
use anticomm::{AlgebraRef, Congruence, Homomorphism, Limits, Term};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "anticomm", version, about = "Decide anticommutativity and related properties of finite algebras")]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Print the report as a single JSON object.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest free algebra to generate.
    #[arg(long, global = true, value_name = "N")]
    pub max_free_size: Option<usize>,
    /// Largest algebra whose congruence lattice is enumerated.
    #[arg(long, global = true, value_name = "N")]
    pub max_con_size: Option<usize>,
    /// Also write the rendered report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Report `ms` as 0 so that reports are byte-stable.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

impl Options {
    fn limits(&self) -> Limits {
        let d = Limits::default();
        Limits {
            max_free_size: self.max_free_size.unwrap_or(d.max_free_size),
            max_con_size: self.max_con_size.unwrap_or(d.max_con_size),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a property.
    #[command(subcommand)]
    Check(Check),
    /// Whether two homomorphisms with a common codomain commute.
    Commute { f: PathBuf, g: PathBuf },
    /// Search the free algebra for a majority or Jónsson–Tarski term.
    Terms {
        kind: TermKind,
        #[arg(required = true)]
        algebras: Vec<PathBuf>,
    },
    /// Check a witness or a groupoid.
    #[command(subcommand)]
    Verify(Verify),
    /// Load and cross-link a fixture directory.
    Suite { dir: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Check {
    /// The variety generated by the algebras is anticommutative.
    Anticommutative {
        #[arg(required = true)]
        algebras: Vec<PathBuf>,
    },
    /// The variety generated by the algebras is locally anticommutative.
    LocallyAnticommutative {
        #[arg(required = true)]
        algebras: Vec<PathBuf>,
    },
    /// The triangular lemma over the whole congruence lattice.
    Triangular { algebra: PathBuf },
    /// The shifting lemma over the whole congruence lattice.
    Shifting { algebra: PathBuf },
    /// Directly decomposable congruence classes on a product.
    Ddcc { a: PathBuf, b: PathBuf },
    /// The triangular lemma for kernel pairs on a pullback.
    PullbackTriangular { f: PathBuf, g: PathBuf },
    /// The shifting lemma for kernel pairs on a pullback.
    PullbackShifting { f: PathBuf, g: PathBuf },
    /// Anticommutativity of the fibre of a split point.
    Point { point: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    Witness {
        witness: PathBuf,
        #[arg(required = true)]
        algebras: Vec<PathBuf>,
    },
    Groupoid { groupoid: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TermKind {
    Majority,
    Jt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub file: String,
    /// Hex SHA-256 of the file contents.
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputFile>,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    pub ms: u64,
    pub version: String,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.holds {
            EXIT_HOLDS
        } else {
            EXIT_FAILS
        }
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
            s.push('\n');
            return s;
        }
        let mut s = format!(
            "{} {}\n",
            if self.holds { "HOLDS" } else { "FAILS" },
            self.command
        );
        for (label, payload) in [("witness", &self.witness), ("counterexample", &self.counterexample)] {
            if let Some(v) = payload {
                s += &format!("{label}:\n");
                render_value(&mut s, v, 1);
            }
        }
        for input in &self.inputs {
            s += &format!("input {} sha256:{}\n", input.file, input.hash);
        }
        s
    }
}

fn render_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(out, v, depth + 1);
                    }
                    Value::Array(items) if items.iter().all(Value::is_string) && !items.is_empty() => {
                        for (i, item) in items.iter().enumerate() {
                            out.push_str(&format!("{pad}{k}{} = {}\n", i + 1, item.as_str().unwrap()));
                        }
                    }
                    other => out.push_str(&format!("{pad}{k} = {}\n", scalar(other))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] anticomm::Error),
    #[error("cannot write `{path}`: {message}")]
    Output { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

/// Reads input files, hashing each once, and resolves algebra names against
/// the `.alg` files next to the file that mentions them.
#[derive(Default)]
struct Loader {
    inputs: Vec<InputFile>,
    directories: BTreeMap<PathBuf, BTreeMap<String, (PathBuf, AlgebraRef)>>,
}

impl Loader {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let text = format::read_file(path)?;
        let file = path.display().to_string();
        if !self.inputs.iter().any(|i| i.file == file) {
            self.inputs.push(InputFile {
                file,
                hash: hex::encode(Sha256::digest(text.as_bytes())),
            });
        }
        Ok(text)
    }

    fn algebra(&mut self, path: &Path) -> Result<AlgebraRef, CliError> {
        let text = self.read(path)?;
        Ok(Arc::new(format::parse_algebra(&text).map_err(|e| in_file(path, e))?))
    }

    fn algebras(&mut self, paths: &[PathBuf]) -> Result<Vec<AlgebraRef>, CliError> {
        paths.iter().map(|p| self.algebra(p)).collect()
    }

    /// The algebras in the directory of `near`, by name.
    fn named(&mut self, near: &Path) -> Result<BTreeMap<String, AlgebraRef>, CliError> {
        let dir = near.parent().map(Path::to_path_buf).unwrap_or_default();
        let dir = if dir.as_os_str().is_empty() { PathBuf::from(".") } else { dir };
        if !self.directories.contains_key(&dir) {
            let mut found = BTreeMap::new();
            let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| anticomm::Error::Io {
                    path: dir.display().to_string(),
                    message: e.to_string(),
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "alg"))
                .collect();
            paths.sort();
            for path in paths {
                let text = format::read_file(&path)?;
                let a = format::parse_algebra(&text).map_err(|e| in_file(&path, e))?;
                let name = a.name().to_string();
                if found.insert(name.clone(), (path, Arc::new(a))).is_some() {
                    return Err(anticomm::Error::DuplicateName(name).into());
                }
            }
            self.directories.insert(dir.clone(), found);
        }
        Ok(self.directories[&dir]
            .iter()
            .map(|(k, (_, a))| (k.clone(), a.clone()))
            .collect())
    }

    /// Records the `.alg` files behind the names a description used.
    fn used(&mut self, near: &Path, names: &[&str]) -> Result<(), CliError> {
        let dir = near.parent().map(Path::to_path_buf).unwrap_or_default();
        let dir = if dir.as_os_str().is_empty() { PathBuf::from(".") } else { dir };
        let paths: Vec<PathBuf> = names
            .iter()
            .filter_map(|n| self.directories.get(&dir).and_then(|d| d.get(*n)))
            .map(|(p, _)| p.clone())
            .collect();
        for p in paths {
            self.read(&p)?;
        }
        Ok(())
    }

    fn hom(&mut self, path: &Path) -> Result<Homomorphism, CliError> {
        let text = self.read(path)?;
        let desc = format::parse_hom(&text).map_err(|e| in_file(path, e))?;
        let algebras = self.named(path)?;
        let h = format::resolve_hom(&desc, &algebras)?;
        self.used(path, &[&desc.dom, &desc.cod])?;
        Ok(h)
    }

    fn point(&mut self, path: &Path) -> Result<SplitPoint, CliError> {
        let text = self.read(path)?;
        let desc = format::parse_point(&text).map_err(|e| in_file(path, e))?;
        let algebras = self.named(path)?;
        let p = format::resolve_point(&desc, &algebras)?;
        self.used(path, &[&desc.total, &desc.base])?;
        Ok(p)
    }
}

fn in_file(path: &Path, e: anticomm::Error) -> anticomm::Error {
    match e {
        anticomm::Error::Parse { line, message } => anticomm::Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

/// A verdict before timing and inputs are attached.
struct Outcome {
    holds: bool,
    witness: Option<Value>,
    counterexample: Option<Value>,
}

impl Outcome {
    fn holds(witness: Option<Value>) -> Outcome {
        Outcome {
            holds: true,
            witness,
            counterexample: None,
        }
    }

    fn fails(counterexample: Value) -> Outcome {
        Outcome {
            holds: false,
            witness: None,
            counterexample: Some(counterexample),
        }
    }

    fn lemma(v: LemmaVerdict) -> Outcome {
        match v.counterexample {
            Some(c) => Outcome::fails(to_value(&c)),
            None => Outcome::holds(None),
        }
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("payloads serialize")
}

/// Classes of a congruence on pairs, each pair written through `label`.
fn labelled_classes(
    theta: &Congruence,
    pair_of: impl Fn(usize) -> (usize, usize),
    label: impl Fn(usize) -> Term,
) -> Value {
    let classes: Vec<Vec<[String; 2]>> = theta
        .classes()
        .into_iter()
        .map(|class| {
            class
                .into_iter()
                .map(|e| {
                    let (a, b) = pair_of(e);
                    [label(a).to_string(), label(b).to_string()]
                })
                .collect()
        })
        .collect();
    to_value(&classes)
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Check(check) => format!(
            "check {}",
            match check {
                Check::Anticommutative { .. } => "anticommutative",
                Check::LocallyAnticommutative { .. } => "locally-anticommutative",
                Check::Triangular { .. } => "triangular",
                Check::Shifting { .. } => "shifting",
                Check::Ddcc { .. } => "ddcc",
                Check::PullbackTriangular { .. } => "pullback-triangular",
                Check::PullbackShifting { .. } => "pullback-shifting",
                Check::Point { .. } => "point",
            }
        ),
        Command::Commute { .. } => "commute".into(),
        Command::Terms { kind, .. } => match kind {
            TermKind::Majority => "terms majority".into(),
            TermKind::Jt => "terms jt".into(),
        },
        Command::Verify(Verify::Witness { .. }) => "verify witness".into(),
        Command::Verify(Verify::Groupoid { .. }) => "verify groupoid".into(),
        Command::Suite { .. } => "suite".into(),
    }
}

fn dispatch(command: &Command, options: &Options, loader: &mut Loader) -> Result<Outcome, CliError> {
    let limits = options.limits();
    Ok(match command {
        Command::Check(Check::Anticommutative { algebras }) => {
            let basis = loader.algebras(algebras)?;
            let v = decide_anticommutative(&basis, &limits)?;
            match v.witness {
                Some(w) => Outcome::holds(Some(to_value(&w))),
                None => Outcome::fails(json!({
                    "free_size": v.free.size(),
                    "classes": labelled_classes(&v.theta, |e| v.square.unpair(e), |e| v.free.label(e)),
                    "note": v.note,
                })),
            }
        }
        Command::Check(Check::LocallyAnticommutative { algebras }) => {
            let basis = loader.algebras(algebras)?;
            let v = decide_locally_anticommutative(&basis, &limits)?;
            match v.witness {
                Some(w) => Outcome::holds(Some(to_value(&w))),
                None => Outcome::fails(json!({
                    "free_size": v.free.size(),
                    "classes": labelled_classes(&v.theta, |e| v.kernel.pair_of(e), |e| v.free.label(e)),
                    "note": v.note,
                })),
            }
        }
        Command::Check(Check::Triangular { algebra }) => {
            let a = loader.algebra(algebra)?;
            Outcome::lemma(triangular_lemma_holds(&a, limits.max_con_size)?)
        }
        Command::Check(Check::Shifting { algebra }) => {
            let a = loader.algebra(algebra)?;
            Outcome::lemma(shifting_lemma_holds(&a, limits.max_con_size)?)
        }
        Command::Check(Check::Ddcc { a, b }) => {
            let (a, b) = (loader.algebra(a)?, loader.algebra(b)?);
            Outcome::lemma(ddcc_on_product(&a, &b)?)
        }
        Command::Check(Check::PullbackTriangular { f, g }) => {
            let (f, g) = (loader.hom(f)?, loader.hom(g)?);
            Outcome::lemma(triangular_on_pullback(&f, &g)?)
        }
        Command::Check(Check::PullbackShifting { f, g }) => {
            let (f, g) = (loader.hom(f)?, loader.hom(g)?);
            Outcome::lemma(shifting_on_pullback(&f, &g)?)
        }
        Command::Check(Check::Point { point }) => {
            let p = loader.point(point)?;
            Outcome::lemma(check_point_anticommutativity(&p)?)
        }
        Command::Commute { f, g } => {
            let (f, g) = (loader.hom(f)?, loader.hom(g)?);
            match find_cooperator(&f, &g)? {
                Some(c) => Outcome::holds(Some(json!({
                    "product": c.product.algebra.name(),
                    "rho": c.rho.map(),
                }))),
                None => Outcome::fails(json!({
                    "product": format!("{}x{}", f.dom().name(), g.dom().name()),
                    "cooperator": Value::Null,
                })),
            }
        }
        Command::Terms { kind, algebras } => {
            let basis = loader.algebras(algebras)?;
            let term = match kind {
                TermKind::Majority => has_majority_term(&basis, &limits)?,
                TermKind::Jt => has_jonsson_tarski_term(&basis, &limits)?,
            };
            match term {
                Some(t) => Outcome::holds(Some(json!({ "term": t.to_string() }))),
                None => Outcome::fails(json!({ "term": Value::Null })),
            }
        }
        Command::Verify(Verify::Witness { witness, algebras }) => {
            let text = loader.read(witness)?;
            let (name, file) = format::parse_witness(&text).map_err(|e| in_file(witness, e))?;
            let basis = loader.algebras(algebras)?;
            let check = match &file {
                WitnessFile::Anticommutative(w) => verify_anticommutativity_witness(w, &basis)?,
                WitnessFile::Local(w, mode) => verify_local_witness(w, &basis, *mode)?,
            };
            match check {
                WitnessCheck::Passes => Outcome::holds(Some(json!({ "name": name }))),
                WitnessCheck::Fails(failure) => Outcome::fails(to_value(&failure)),
            }
        }
        Command::Verify(Verify::Groupoid { groupoid }) => {
            let text = loader.read(groupoid)?;
            let desc = format::parse_groupoid(&text).map_err(|e| in_file(groupoid, e))?;
            let algebras = loader.named(groupoid)?;
            let g = format::resolve_groupoid(&desc, &algebras)?;
            loader.used(groupoid, &[&desc.objects, &desc.arrows, &desc.composable])?;
            let v = verify_internal_groupoid(&g)?;
            match v.failure {
                None => Outcome::holds(Some(json!({ "name": desc.name, "injective": v.injective }))),
                Some(f) => Outcome::fails(to_value(&f)),
            }
        }
        Command::Suite { dir } => {
            let suite = format::load_fixture_suite(dir)?;
            let mut files: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| anticomm::Error::Io {
                    path: dir.display().to_string(),
                    message: e.to_string(),
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    p.extension()
                        .is_some_and(|x| ["alg", "hom", "point", "gpd"].iter().any(|e| x == *e))
                })
                .collect();
            files.sort();
            for f in &files {
                loader.read(f)?;
            }
            let names = |keys: Vec<&String>| keys.into_iter().cloned().collect::<Vec<_>>();
            Outcome::holds(Some(json!({
                "algebras": names(suite.algebras.keys().collect()),
                "homs": names(suite.homs.keys().collect()),
                "points": names(suite.points.keys().collect()),
                "groupoids": names(suite.groupoids.keys().collect()),
            })))
        }
    })
}

/// Runs a parsed command line and builds its report.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut loader = Loader::default();
    let outcome = dispatch(&cli.command, &cli.options, &mut loader)?;
    let ms = if cli.options.no_timing {
        0
    } else {
        start.elapsed().as_millis() as u64
    };
    Ok(Report {
        command: command_name(&cli.command),
        inputs: loader.inputs,
        holds: outcome.holds,
        witness: outcome.witness,
        counterexample: outcome.counterexample,
        ms,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `stdout`, diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_HOLDS };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = execute(&cli).and_then(|report| {
        let rendered = report.render(cli.options.json);
        if let Some(path) = &cli.options.out {
            fs::write(path, &rendered).map_err(|e| CliError::Output {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        }
        Ok((report, rendered))
    });
    match result {
        Ok((report, rendered)) => {
            let _ = stdout.write_all(rendered.as_bytes());
            report.exit_code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}
