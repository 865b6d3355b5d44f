//! The `kmln` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 invalid constants.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::algebra::{assemble, compose, numeric_rank, singular_values, DEFAULT_TOL};
use crate::classify::classify;
use crate::document::{MatrixDocument, Meta, Subject};
use crate::error::Error;
use crate::families::{construct, descriptor, Const, DescriptorTable, FamilyConstants, FamilyInstance, FamilyTag};
use crate::rank3::{random_variant, VariantId};
use crate::sampling::{random_constant, rng_from_seed};
use crate::types::Complex;
use crate::verify::{run_suite_with, Selection, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONSTANTS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kmln", version, about = "Four-vector parameterization of 4x4 matrices and its degenerate semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a member of a family (e.g. K-5) or a rank-3 variant (e.g. 00).
    Gen(GenArgs),
    /// Report rank, reality and every family and variant membership.
    Classify(ClassifyArgs),
    /// Multiply two documents through the parameter-space law.
    Compose(ComposeArgs),
    /// Numeric rank and singular values.
    Rank(ClassifyArgs),
    /// Run the verification suite and print one JSON record per check.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Family name or variant id.
    tag: String,
    /// Constant value, NAME=re or NAME=re,im. Unset constants are drawn from the seed.
    #[arg(long = "const", value_name = "NAME=VALUE")]
    constants: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Real constants and reality-conditioned parameters.
    #[arg(long)]
    real: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Document path; standard input when omitted or "-".
    input: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive_f64)]
    tol: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ComposeArgs {
    /// Left factor ("-" for standard input).
    left: PathBuf,
    /// Right factor ("-" for standard input).
    right: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive_f64)]
    tol: f64,
    /// Restrict family checks to these tags (comma separated or repeated).
    #[arg(long = "family", visible_alias = "families", value_delimiter = ',', value_parser = parse_tag)]
    families: Vec<FamilyTag>,
    /// Restrict variant checks to these ids.
    #[arg(long = "variant", visible_alias = "variants", value_delimiter = ',', value_parser = parse_variant)]
    variants: Vec<VariantId>,
    #[arg(long)]
    real: bool,
    /// Treat published-rank discrepancies as failures.
    #[arg(long)]
    strict: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Corrupt one family's descriptor before running (for testing the suite).
    #[arg(long, hide = true, value_parser = parse_tag)]
    inject_fault: Option<FamilyTag>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

fn family_names() -> String {
    FamilyTag::ALL.map(|t| t.name()).join(", ")
}

fn parse_tag(s: &str) -> Result<FamilyTag, String> {
    FamilyTag::from_name(s).ok_or_else(|| format!("unknown family '{s}'; valid: {}", family_names()))
}

fn parse_variant(s: &str) -> Result<VariantId, String> {
    VariantId::parse(s).ok_or_else(|| format!("unknown variant '{s}'; valid: 00 through 33"))
}

enum Failure {
    Usage(String),
    Constants(String),
    Verify,
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Constants(_) => EXIT_CONSTANTS,
            Failure::Verify => EXIT_VERIFY_FAILED,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Constants(e.to_string())
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn read_input(&mut self, path: Option<&PathBuf>) -> Result<String, Failure> {
        match path {
            Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
            _ => {
                let mut s = String::new();
                self.stdin
                    .read_to_string(&mut s)
                    .map_err(|e| Failure::Usage(format!("standard input: {e}")))?;
                Ok(s)
            }
        }
    }

    fn read_document(&mut self, path: Option<&PathBuf>) -> Result<MatrixDocument, Failure> {
        let text = self.read_input(path)?;
        let name = path.map_or("<stdin>".into(), |p| p.display().to_string());
        MatrixDocument::from_json(&text).map_err(|e| Failure::Usage(format!("{name}: {e}")))
    }

    fn emit(&mut self, output: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
        match output {
            Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(format!("standard output: {e}"))),
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
    };
    let result = match cli.command {
        Command::Gen(a) => gen(&mut io, a),
        Command::Classify(a) => {
            io.read_document(a.input.as_ref()).and_then(|doc| {
                let report = classify(&doc.matrix(), a.tol);
                io.emit(a.output.as_ref(), &json_line(&report))
            })
        }
        Command::Compose(a) => compose_cmd(&mut io, a),
        Command::Rank(a) => io.read_document(a.input.as_ref()).and_then(|doc| {
            let g = doc.matrix();
            let out = serde_json::json!({
                "rank": numeric_rank(&g, a.tol),
                "singular_values": singular_values(&g),
            });
            io.emit(a.output.as_ref(), &json_line(&out))
        }),
        Command::Verify(a) => verify_cmd(&mut io, a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Constants(m) => {
                    let _ = writeln!(io.stderr, "error: {m}");
                }
                Failure::Verify => {}
            }
            f.code()
        }
    }
}

fn parse_constant(s: &str) -> Result<(Const, Complex), Failure> {
    let bad = || Failure::Usage(format!("--const expects NAME=re or NAME=re,im, got '{s}'"));
    let (name, value) = s.split_once('=').ok_or_else(bad)?;
    let c = Const::parse(name.trim()).ok_or_else(|| {
        Failure::Usage(format!(
            "unknown constant '{name}'; valid: {}",
            Const::ALL.map(|c| c.name()).join(", ")
        ))
    })?;
    let mut parts = value.split(',').map(|x| x.trim().parse::<f64>());
    let re = parts.next().and_then(Result::ok).ok_or_else(bad)?;
    let im = match parts.next() {
        None => 0.0,
        Some(Ok(x)) => x,
        Some(Err(_)) => return Err(bad()),
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok((c, Complex::new(re, im)))
}

fn gen(io: &mut Io<'_>, a: GenArgs) -> Result<(), Failure> {
    let subject = Subject::parse(&a.tag).ok_or_else(|| {
        Failure::Usage(format!(
            "unknown tag '{}'; valid families: {}; valid variants: 00 through 33",
            a.tag,
            family_names()
        ))
    })?;
    let given = a
        .constants
        .iter()
        .map(|s| parse_constant(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = rng_from_seed(a.seed);
    let (params, constants) = match subject {
        Subject::Family(tag) => {
            let mut constants = FamilyConstants::new();
            for &c in &descriptor(tag).constants {
                constants.set(c, random_constant(&mut rng, a.real));
            }
            for &(c, v) in &given {
                constants.set(c, v);
            }
            let inst = FamilyInstance::random_with(tag, constants, &mut rng, a.real);
            (construct(tag, &constants, &inst.base)?, constants)
        }
        Subject::Variant(id) => {
            if let Some((c, _)) = given.first() {
                return Err(Failure::Constants(format!("variant {id} takes no constants (got {c})")));
            }
            (random_variant(id, &mut rng, a.real), FamilyConstants::new())
        }
    };
    let doc = MatrixDocument::from_params(params).with_meta(Meta {
        tag: subject.name(),
        constants,
        seed: Some(a.seed),
    });
    io.emit(a.output.as_ref(), &(doc.to_json() + "\n"))
}

fn compose_cmd(io: &mut Io<'_>, a: ComposeArgs) -> Result<(), Failure> {
    if a.left.as_os_str() == "-" && a.right.as_os_str() == "-" {
        return Err(Failure::Usage("only one factor can be read from standard input".into()));
    }
    let left = io.read_document(Some(&a.left))?;
    let right = io.read_document(Some(&a.right))?;
    let product = compose(&left.params(), &right.params());
    let doc = MatrixDocument::from_params(product);
    debug_assert_eq!(doc.matrix, Some(assemble(&product)));
    io.emit(a.output.as_ref(), &(doc.to_json() + "\n"))
}

fn verify_cmd(io: &mut Io<'_>, a: VerifyArgs) -> Result<(), Failure> {
    fn selection<T>(v: Vec<T>) -> Selection<T> {
        if v.is_empty() {
            Selection::All
        } else {
            Selection::Only(v)
        }
    }
    let cfg = SuiteConfig {
        seed: a.seed,
        samples: a.samples as usize,
        tol: a.tol,
        families: selection(a.families),
        variants: selection(a.variants),
        real_mode: a.real,
    };
    let table = match a.inject_fault {
        Some(tag) => DescriptorTable::standard().with_fault(tag),
        None => DescriptorTable::standard().clone(),
    };
    let report = run_suite_with(&cfg, &table);
    io.emit(a.output.as_ref(), &report.to_json_lines())?;
    let _ = writeln!(io.stderr, "{}", report.summary());
    let discrepant = report.discrepancies().next().is_some();
    if !report.passed() || (a.strict && discrepant) {
        return Err(Failure::Verify);
    }
    Ok(())
}
