use std::ffi::OsString;
use std::fmt;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use superdatum::analysis::{self, EquivalenceResult};
use superdatum::catalog::{build_datum, build_grs, corpus, corpus_alphas, FamilyTag};
use superdatum::grs::{check_lemmas, Grs};
use superdatum::lattice::ZMatrix;
use superdatum::linalg::{fmt_q, Matrix};
use superdatum::rootdatum::{fmt_coords, verify_grs, RootDatum, SpanMode};
use superdatum::superalgebra::{
    self, check_invariant_form, check_jacobi, invariant_forms, root_decomposition, AlgebraFamily,
    FormStatus, SuperAlgebra,
};
use superdatum::supermatrix::{berezinian, sample_supermatrices, GrassmannElement, SuperMatrix};

use crate::document::{fmt_row, parse_document, serialize, DocError, Document};
use crate::report::{Finding, Report, Status};

pub const SEED_VAR: &str = "SUPERDATUM_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "superdatum",
    version,
    about = "Root data of basic Lie superalgebras"
)]
pub struct Cli {
    /// Output style for reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EmitKind {
    Grs,
    Rootdatum,
}

#[derive(Args, Debug, Default)]
pub struct Source {
    /// Catalog family, e.g. `SL 2 1`, `D21a 1/2` or `GL(2,1)`.
    #[arg(long, num_args = 1.., value_name = "NAME [PARAM]...", allow_negative_numbers = true)]
    pub family: Option<Vec<String>>,
    /// Document to read; `-` reads standard input.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "family")]
    pub input: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct AlgebraSource {
    /// Matrix realization, e.g. `gl 2 1`, `osp 3 2`, `d21a 1/2` or `gl(2|1)`.
    #[arg(long, num_args = 1.., value_name = "NAME [PARAM]...", allow_negative_numbers = true)]
    pub algebra: Option<Vec<String>>,
    /// Superalgebra document to read; `-` reads standard input.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "algebra")]
    pub input: Option<String>,
    /// Pass to the quotient by the center.
    #[arg(long)]
    pub quotient_center: bool,
    /// Replace the algebra by its odd doubling.
    #[arg(long)]
    pub double_odd: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the catalog corpus, or emit one entry as a document.
    Catalog {
        #[arg(long, num_args = 1.., value_name = "NAME [PARAM]...", allow_negative_numbers = true)]
        family: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = EmitKind::Rootdatum)]
        emit: EmitKind,
        /// Largest datum rank listed.
        #[arg(long, default_value_t = 4)]
        max_rank: usize,
    },
    /// Check a root datum (classical axioms and BQR) or a root system (BQR and lemmas).
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = SpanMode::Rational)]
        mode: SpanMode,
    },
    /// Split a root system into irreducible components.
    Decompose {
        #[command(flatten)]
        source: Source,
    },
    /// Identify an irreducible root system with a catalog family.
    Recognize {
        #[command(flatten)]
        source: Source,
    },
    /// Decide whether two root data are equivalent.
    Equiv {
        /// Repeat once per datum; `--family` sources come before `--in` sources.
        #[arg(long, num_args = 1.., value_name = "NAME [PARAM]...", allow_negative_numbers = true)]
        family: Vec<String>,
        #[arg(long = "in", value_name = "FILE")]
        input: Vec<String>,
    },
    /// Build a matrix realization and compare its weights with the catalog.
    Realize {
        #[command(flatten)]
        source: AlgebraSource,
        /// Print the superalgebra document instead of a report.
        #[arg(long)]
        emit: bool,
    },
    /// Compute invariant supersymmetric forms and decide non-degeneracy.
    Forms {
        #[command(flatten)]
        source: AlgebraSource,
    },
    /// Berezinian of a supermatrix over a Grassmann algebra.
    Ber {
        #[arg(long, num_args = 2, value_names = ["M", "N"], required = true)]
        blocks: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        generators: usize,
        /// One matrix row of comma-separated entries such as `1 + θ1θ2`.
        #[arg(long = "row", value_name = "ENTRIES", allow_hyphen_values = true)]
        rows: Vec<String>,
        /// Instead, test multiplicativity on this many random pairs.
        #[arg(long, value_name = "PAIRS", conflicts_with = "rows")]
        check: Option<usize>,
    },
}

/// Input problems; all exit with status 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Doc(DocError),
    Core(superdatum::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Doc(e) => e.fmt(f),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        CliError::Doc(e)
    }
}

impl From<superdatum::Error> for CliError {
    fn from(e: superdatum::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// What a command produced: a report, or a document to print verbatim.
pub enum Output {
    Report(Report),
    Document(Document, i32),
}

/// Runs the command line, returning the process exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = match Cli::try_parse_from(protect_negative_params(args)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command, stdin) {
        Ok(Output::Report(r)) => {
            let text = match cli.format {
                OutputFormat::Table => r.render_table(),
                OutputFormat::Machine => serialize(&Document::Report(r.clone())),
            };
            let _ = out.write_all(text.as_bytes());
            r.exit_code()
        }
        Ok(Output::Document(d, code)) => {
            let _ = out.write_all(serialize(&d).as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn is_negative_rational(s: &str) -> bool {
    s.strip_prefix('-').is_some_and(|t| {
        t.starts_with(|c: char| c.is_ascii_digit())
            && t.chars().all(|c| c.is_ascii_digit() || c == '/')
    })
}

/// Prefixes negative rationals such as `-2/3` after `--family` or `--algebra`
/// with a space so the parser takes them as values; parameters are trimmed later.
fn protect_negative_params<I, T>(args: I) -> Vec<OsString>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut in_params = false;
    args.into_iter()
        .map(|a| {
            let a: OsString = a.into();
            let Some(s) = a.to_str() else { return a };
            if s == "--family" || s == "--algebra" {
                in_params = true;
                a
            } else if in_params && is_negative_rational(s) {
                format!(" {s}").into()
            } else {
                if s.starts_with('-') {
                    in_params = false;
                }
                a
            }
        })
        .collect()
}

pub fn execute(cmd: &Command, stdin: &mut dyn Read) -> CliResult<Output> {
    match cmd {
        Command::Catalog {
            family,
            emit,
            max_rank,
        } => catalog(family.as_deref(), *emit, *max_rank),
        Command::Verify { source, mode } => verify(source, *mode, stdin).map(Output::Report),
        Command::Decompose { source } => decompose(source, stdin).map(Output::Report),
        Command::Recognize { source } => recognize(source, stdin).map(Output::Report),
        Command::Equiv { family, input } => equiv(family, input, stdin).map(Output::Report),
        Command::Realize { source, emit } => realize(source, *emit, stdin),
        Command::Forms { source } => forms(source, stdin).map(Output::Report),
        Command::Ber {
            blocks,
            generators,
            rows,
            check,
        } => ber(blocks, *generators, rows, *check).map(Output::Report),
    }
}

// ---------------------------------------------------------------------------
// Inputs

/// Splits `NAME(a,b)`, `NAME(a|b)` and `D(2,1;a)` into a name and parameters.
fn split_call(words: &[String]) -> CliResult<(String, Vec<String>)> {
    let Some(first) = words.first() else {
        return Err(CliError::Usage("expected a family name".into()));
    };
    if words.len() == 1 {
        if let Some(open) = first.find('(') {
            let inner = first[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| CliError::Usage(format!("unbalanced parentheses in {first:?}")))?;
            let name = &first[..open];
            if let Some(a) = inner.strip_prefix("2,1;") {
                if name.eq_ignore_ascii_case("d") {
                    return Ok(("d21a".into(), vec![a.trim().to_string()]));
                }
            }
            let params = inner
                .split([',', '|'])
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            return Ok((name.to_string(), params));
        }
    }
    Ok((
        first.clone(),
        words[1..].iter().map(|w| w.trim().to_string()).collect(),
    ))
}

fn parse_tag(words: &[String]) -> CliResult<FamilyTag> {
    let (name, params) = split_call(words)?;
    let params: Vec<&str> = params.iter().map(String::as_str).collect();
    Ok(FamilyTag::parse(&name, &params)?)
}

fn read_input(path: &str, stdin: &mut dyn Read) -> CliResult<String> {
    let mut text = String::new();
    if path == "-" {
        stdin
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io(format!("reading standard input: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {path}: {e}")))?;
    }
    Ok(text)
}

fn read_document(path: &str, stdin: &mut dyn Read) -> CliResult<Document> {
    let text = read_input(path, stdin)?;
    Ok(parse_document(&text)?)
}

enum Subject {
    Datum(RootDatum),
    Grs(Grs),
}

fn load(source: &Source, stdin: &mut dyn Read, prefer_grs: bool) -> CliResult<(String, Subject)> {
    if let Some(words) = &source.family {
        let tag = parse_tag(words)?;
        if prefer_grs {
            return Ok((
                tag.family.to_string(),
                Subject::Grs(build_grs(&tag.family)?),
            ));
        }
        return Ok((tag.to_string(), Subject::Datum(build_datum(&tag)?)));
    }
    let Some(path) = &source.input else {
        return Err(CliError::Usage("give --family or --in".into()));
    };
    match read_document(path, stdin)? {
        Document::Grs(g) => Ok((path.clone(), Subject::Grs(g))),
        Document::RootDatum(d) => Ok((path.clone(), Subject::Datum(d))),
        other => Err(CliError::Usage(format!(
            "{path}: expected a grs or rootdatum document, found {}",
            other.kind()
        ))),
    }
}

fn load_grs(source: &Source, stdin: &mut dyn Read) -> CliResult<(String, Result<Grs, String>)> {
    let (name, subject) = load(source, stdin, true)?;
    Ok(match subject {
        Subject::Grs(g) => (name, Ok(g)),
        Subject::Datum(d) => (
            name,
            d.shadow().map_err(|e| format!("shadow root system: {e}")),
        ),
    })
}

fn load_algebra(
    source: &AlgebraSource,
    stdin: &mut dyn Read,
) -> CliResult<(SuperAlgebra, Option<AlgebraFamily>)> {
    let (mut sa, family) = if let Some(words) = &source.algebra {
        let (name, params) = split_call(words)?;
        let params: Vec<&str> = params.iter().map(String::as_str).collect();
        let fam = AlgebraFamily::parse(&name, &params)?;
        (superalgebra::realize(&fam)?, Some(fam))
    } else if let Some(path) = &source.input {
        match read_document(path, stdin)? {
            Document::SuperAlgebra(sa) => (sa, None),
            other => {
                return Err(CliError::Usage(format!(
                    "{path}: expected a superalgebra document, found {}",
                    other.kind()
                )))
            }
        }
    } else {
        return Err(CliError::Usage("give --algebra or --in".into()));
    };
    if source.quotient_center {
        sa = superalgebra::quotient_center(&sa);
    }
    if source.double_odd {
        sa = superalgebra::double_odd(&sa);
    }
    Ok((sa, family))
}

fn matrix_text(m: &Matrix) -> String {
    m.to_rows()
        .iter()
        .map(|r| fmt_row(r))
        .collect::<Vec<_>>()
        .join("\n")
}

fn zmatrix_text(m: &ZMatrix) -> String {
    m.iter()
        .map(|r| fmt_coords(r))
        .collect::<Vec<_>>()
        .join("\n")
}

// ---------------------------------------------------------------------------
// Commands

fn catalog(family: Option<&[String]>, emit: EmitKind, max_rank: usize) -> CliResult<Output> {
    if let Some(words) = family {
        let tag = parse_tag(words)?;
        let doc = match emit {
            EmitKind::Grs => Document::Grs(build_grs(&tag.family)?),
            EmitKind::Rootdatum => Document::RootDatum(build_datum(&tag)?),
        };
        return Ok(Output::Document(doc, 0));
    }
    let mut report = Report::new("catalog", format!("corpus up to rank {max_rank}"));
    for tag in corpus(max_rank, 4, 3, &corpus_alphas()) {
        match build_datum(&tag) {
            Ok(d) if d.rank() <= max_rank => {
                let odd: usize = d.odd().values().sum();
                report.push(Finding::info(
                    tag.to_string(),
                    format!(
                        "{} rank {}, {} even, {} odd",
                        tag.family.algebra_name(),
                        d.rank(),
                        d.even().len(),
                        odd
                    ),
                ));
            }
            Ok(_) => {}
            Err(e) => report.push(Finding::new(tag.to_string(), "fail", e.to_string())),
        }
    }
    report.set("entries", report.findings.len());
    Ok(Output::Report(report.settle()))
}

fn verify(source: &Source, mode: SpanMode, stdin: &mut dyn Read) -> CliResult<Report> {
    let (name, subject) = load(source, stdin, false)?;
    let mut report = Report::new("verify", name);
    match subject {
        Subject::Datum(d) => {
            report.set("kind", "rootdatum");
            report.add_classical(&d.verify_classical());
            report.add_bqr(&d.verify_bqr(mode));
        }
        Subject::Grs(g) => {
            report.set("kind", "grs");
            report.add_bqr(&verify_grs(&g, mode));
            for (lemma, w) in check_lemmas(&g).results {
                report.push(Finding::check(
                    lemma.label(),
                    w.is_none(),
                    w.unwrap_or_default(),
                ));
            }
        }
    }
    Ok(report.settle())
}

fn decompose(source: &Source, stdin: &mut dyn Read) -> CliResult<Report> {
    let (name, grs) = load_grs(source, stdin)?;
    let mut report = Report::new("decompose", name);
    let grs = match grs {
        Ok(g) => g,
        Err(e) => {
            report.push(Finding::new("input", "fail", e));
            return Ok(report.fail());
        }
    };
    let parts = analysis::decompose(&grs);
    for (i, c) in parts.iter().enumerate() {
        let kind = match analysis::recognize(c) {
            Ok(r) => r
                .family
                .map_or_else(|| "unrecognized".to_string(), |f| f.to_string()),
            Err(e) => e.to_string(),
        };
        let detail = format!(
            "{} roots ({} even, {} odd), span rank {}: {kind}",
            c.len(),
            c.count(superdatum::grs::Parity::Even),
            c.count(superdatum::grs::Parity::Odd),
            c.span_rank()
        );
        report.push(Finding::info(format!("component {}", i + 1), detail));
    }
    report.set("components", parts.len());
    Ok(report)
}

fn recognize(source: &Source, stdin: &mut dyn Read) -> CliResult<Report> {
    let (name, grs) = load_grs(source, stdin)?;
    let mut report = Report::new("recognize", name);
    let grs = match grs {
        Ok(g) => g,
        Err(e) => {
            report.push(Finding::new("input", "fail", e));
            return Ok(report.fail());
        }
    };
    match analysis::recognize(&grs) {
        Err(e) => {
            report.push(Finding::new("irreducible", "fail", e.to_string()));
            Ok(report.fail())
        }
        Ok(rec) => {
            for n in &rec.notes {
                report.push(Finding::info("note", n.clone()));
            }
            match &rec.family {
                None => {
                    report.push(Finding::new("family", "fail", "no catalog family matches"));
                    Ok(report.fail())
                }
                Some(f) => {
                    report.push(Finding::new("family", "pass", f.to_string()));
                    report.set("family", f);
                    report.set("algebra", f.algebra_name());
                    if let Some(s) = &rec.scale {
                        report.set("scale", fmt_q(s));
                    }
                    if let Some(w) = &rec.witness {
                        report.set("witness", matrix_text(w));
                    }
                    Ok(report)
                }
            }
        }
    }
}

/// Splits flattened `--family` values at each token that starts with a letter.
fn group_tags(words: &[String]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for w in words {
        match out.last_mut() {
            Some(g) if !w.starts_with(|c: char| c.is_ascii_alphabetic()) => g.push(w.clone()),
            _ => out.push(vec![w.clone()]),
        }
    }
    out
}

fn equiv(families: &[String], inputs: &[String], stdin: &mut dyn Read) -> CliResult<Report> {
    let mut data = Vec::new();
    for words in group_tags(families) {
        let tag = parse_tag(&words)?;
        data.push((tag.to_string(), build_datum(&tag)?));
    }
    for path in inputs {
        match read_document(path, stdin)? {
            Document::RootDatum(d) => data.push((path.clone(), d)),
            other => {
                return Err(CliError::Usage(format!(
                    "{path}: expected a rootdatum document, found {}",
                    other.kind()
                )))
            }
        }
    }
    let [(n1, d1), (n2, d2)] = <[_; 2]>::try_from(data).map_err(|v: Vec<_>| {
        CliError::Usage(format!(
            "equiv needs exactly two root data, got {}",
            v.len()
        ))
    })?;
    let mut report = Report::new("equiv", format!("{n1} vs {n2}"));
    match analysis::equivalent(&d1, &d2) {
        EquivalenceResult::Equivalent(e) => {
            report.push(Finding::new("equivalent", "pass", ""));
            report.set("matrix", zmatrix_text(&e.matrix));
            report.set("identity", e.is_identity());
            Ok(report)
        }
        EquivalenceResult::NotEquivalent { reason } => {
            report.push(Finding::new("equivalent", "fail", reason));
            Ok(report.fail())
        }
    }
}

fn realize(source: &AlgebraSource, emit: bool, stdin: &mut dyn Read) -> CliResult<Output> {
    let (sa, family) = load_algebra(source, stdin)?;
    let mut report = Report::new("realize", sa.name().to_string());
    let (e, o) = sa.dim();
    report.set("dimension", format!("({e}|{o})"));
    report.set("cartan_rank", sa.cartan().len());
    match check_jacobi(&sa) {
        None => report.push(Finding::new("super-Jacobi", "pass", "")),
        Some(v) => {
            let (i, j, k) = v.triple;
            let l = sa.labels();
            let detail = format!(
                "({}, {}, {}) leaves {}",
                l[i],
                l[j],
                l[k],
                sa.format_element(&v.residual)
            );
            report.push(Finding::new("super-Jacobi", "fail", detail));
        }
    }
    match root_decomposition(&sa) {
        Err(err) => report.push(Finding::new("root decomposition", "fail", err.to_string())),
        Ok(rd) => {
            let roots: Vec<_> = rd.roots().collect();
            let even = roots.iter().filter(|(_, s)| !s.even.is_empty()).count();
            let odd = roots.iter().filter(|(_, s)| !s.odd.is_empty()).count();
            report.set(
                "weights",
                format!(
                    "{} nonzero ({even} with even part, {odd} with odd part)",
                    roots.len()
                ),
            );
            let mono = rd.is_monodromy();
            report.push(Finding::info(
                "monodromy",
                if mono {
                    "every root space is one-dimensional"
                } else {
                    "some root space has dimension > 1"
                },
            ));
            if let Some(cf) = family.as_ref().and_then(AlgebraFamily::catalog_family) {
                if !source.quotient_center || sa.cartan_coords().is_some() {
                    let grs = build_grs(&cf)?;
                    match rd.compare_with(&sa, &grs) {
                        Ok(None) => {
                            report.push(Finding::new("catalog roots", "pass", cf.to_string()))
                        }
                        Ok(Some(diff)) => report.push(Finding::new("catalog roots", "fail", diff)),
                        Err(err) => {
                            report.push(Finding::new("catalog roots", "fail", err.to_string()))
                        }
                    }
                }
            }
        }
    }
    let report = report.settle();
    if emit {
        let code = report.exit_code();
        return Ok(Output::Document(Document::SuperAlgebra(sa), code));
    }
    Ok(Output::Report(report))
}

fn seed() -> CliResult<u64> {
    match std::env::var(SEED_VAR) {
        Err(_) => Ok(0),
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_VAR}={s:?} is not an unsigned integer"))),
    }
}

fn forms(source: &AlgebraSource, stdin: &mut dyn Read) -> CliResult<Report> {
    let (sa, _) = load_algebra(source, stdin)?;
    let seed = seed()?;
    let mut report = Report::new("forms", sa.name().to_string());
    let forms = invariant_forms(&sa, seed);
    report.set("seed", seed);
    report.set("forms", forms.basis.len());
    let bad = forms
        .basis
        .iter()
        .find_map(|f| check_invariant_form(&sa, f));
    report.push(Finding::check(
        "invariance",
        bad.is_none(),
        bad.unwrap_or_default(),
    ));
    match &forms.status {
        FormStatus::NonDegenerate(w) => {
            report.push(Finding::new("non-degenerate", "pass", "explicit witness"));
            report.set("witness", matrix_text(w));
        }
        FormStatus::Degenerate(cert) => {
            report.push(Finding::new("non-degenerate", "fail", cert.to_string()));
        }
        FormStatus::Undecided(why) => {
            report.push(Finding::new(
                "non-degenerate",
                "fail",
                format!("undecided: {why}"),
            ));
        }
    }
    Ok(report.settle())
}

fn ber(blocks: &[usize], gens: usize, rows: &[String], check: Option<usize>) -> CliResult<Report> {
    let (m, n) = (blocks[0], blocks[1]);
    if let Some(pairs) = check {
        let seed = seed()?;
        let mut report = Report::new(
            "ber",
            format!("random ({m}|{n}) pairs over {gens} generators"),
        );
        let sample = sample_supermatrices(m, n, gens, 2 * pairs, seed);
        let mut failure = None;
        for (i, pair) in sample.chunks(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            let lhs = berezinian(&a.mul(b)?)?;
            let rhs = &berezinian(a)? * &berezinian(b)?;
            if lhs != rhs {
                failure = Some(format!("pair {i}: Ber(AB) = {lhs}, Ber(A)Ber(B) = {rhs}"));
                break;
            }
        }
        report.set("seed", seed);
        report.set("pairs", pairs);
        report.push(Finding::check(
            "Ber(AB) = Ber(A)Ber(B)",
            failure.is_none(),
            failure.unwrap_or_default(),
        ));
        return Ok(report.settle());
    }
    if rows.len() != m + n {
        return Err(CliError::Usage(format!(
            "expected {} --row values, got {}",
            m + n,
            rows.len()
        )));
    }
    let entries = rows
        .iter()
        .map(|r| {
            r.split(',')
                .map(|e| GrassmannElement::parse(e.trim(), gens))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let g = SuperMatrix::new(m, n, entries)?;
    let mut report = Report::new(
        "ber",
        format!("({m}|{n}) supermatrix over {gens} generators"),
    );
    match berezinian(&g) {
        Ok(b) => {
            report.push(Finding::new("invertible", "pass", ""));
            report.set("ber", b);
        }
        Err(superdatum::Error::NotInvertible) => {
            report.push(Finding::new(
                "invertible",
                "fail",
                "a diagonal block has singular body",
            ));
            report.status = Status::Fail;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(report)
}
