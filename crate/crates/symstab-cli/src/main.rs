//! `symstab`: command-line calculator for square classes, forms, symmetric
//! pair classification and finite-group cohomology.
//!
//! Exit codes: 0 for success or a true answer, 1 for a false answer or a
//! failed `--check`, 2 for usage and parse errors.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use symstab::cohom::{Group, InvolutiveGroup};
use symstab::hermform::{HermForm, QuadExt};
use symstab::oracle::{hilbert_oracle, isotropy_oracle};
use symstab::quadform::QuadForm;
use symstab::sqclass::{hilbert, LocalField, SquareClass};
use symstab::stability::{
    check_row, classify, summary_table, sweep, sweep_all, Family, PairField, PairSpec, Row,
    SummaryLine, SweepBounds, Tri, Verdict,
};

#[derive(Parser)]
#[command(name = "symstab", version, about = "Stability of symmetric pairs over local fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert symbol {a, b} over R or Q_p.
    Hilbert {
        /// `R` or `Qp:<p>`.
        field: LocalField,
        /// First argument, an integer or ratio.
        #[arg(allow_hyphen_values = true)]
        a: String,
        /// Second argument, an integer or ratio.
        #[arg(allow_hyphen_values = true)]
        b: String,
        /// Also run the brute-force conic search.
        #[arg(long)]
        oracle: bool,
    },
    /// Calculators for quadratic (`qf(...)`) and Hermitian (`hf(...)`) forms.
    Form {
        #[command(subcommand)]
        op: FormOp,
    },
    /// Classify one symmetric pair.
    Pair(PairArgs),
    /// Classify every pair of a family within bounds.
    Sweep(SweepArgs),
    /// First cohomology of a finite group with involution.
    Cohom(CohomArgs),
    /// Brute-force checks.
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
}

#[derive(Subcommand)]
enum FormOp {
    /// Rank, determinant and Hasse invariant (or signature / norm class).
    Invariants { form: String },
    /// Whether two forms are equivalent.
    Equiv { a: String, b: String },
    /// Witt index.
    Mu { form: String },
    /// Witt decomposition: number of hyperbolic planes and anisotropic kernel.
    Witt { form: String },
    /// Whether a quadratic form represents a class.
    Rep {
        form: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Whether the first form is a subform of the second.
    Leq { c: String, b: String },
}

#[derive(Subcommand)]
enum OracleOp {
    /// Hilbert symbol by conic search.
    Hilbert {
        field: LocalField,
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        b: i64,
    },
    /// Isotropy of a quadratic form by exhaustive search.
    Isotropy { form: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
    Plain,
}

#[derive(Args)]
struct PairArgs {
    /// Family tag, e.g. `SLxGL`, `O`, `U`, `quaternion`.
    family: Family,
    /// Base field for GLxGL and SLxGL: `C`, `R` or `Qp:<p>`.
    #[arg(long)]
    field: Option<PairField>,
    /// `dim V+,dim V-` for GLxGL and SLxGL.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Quadratic extension, e.g. `Qp:3,d=p` or `C/R`.
    #[arg(long)]
    ext: Option<QuadExt>,
    /// Dimension for the extension families.
    #[arg(long)]
    dim: Option<usize>,
    /// Form on V+ for O and U pairs.
    #[arg(long)]
    bplus: Option<String>,
    /// Form on V- for O and U pairs.
    #[arg(long)]
    bminus: Option<String>,
    /// Form for GL_O and GL_U.
    #[arg(long)]
    b: Option<String>,
    /// Prime for the quaternion example.
    #[arg(short)]
    p: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Family tag or `all`.
    family: String,
    /// `C`, `R` or `Qp:<p>`.
    #[arg(long)]
    field: PairField,
    #[arg(long, default_value_t = 4)]
    max_dim: usize,
    #[arg(long, default_value_t = 3)]
    max_sig: usize,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-derive the cross-checks of every row; exit 1 on a violation.
    #[arg(long)]
    check: bool,
    /// Print the per-family summary instead of the rows.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct CohomArgs {
    /// Builtin group: `1`, `Z<n>`, `D<n>`, `Q8`, `S<n>` or `AxB`.
    #[arg(long, conflicts_with = "file")]
    builtin: Option<String>,
    /// JSON file with `elements`, `mul` and optional `theta`.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Involution: `id`, `flip`, `inv`, `conj:<h>` or `auto:<k>`.
    #[arg(long)]
    involution: Option<String>,
    /// List the named involutions of the group and exit.
    #[arg(long)]
    list: bool,
}

/// Failure modes: usage errors exit 2, failed checks exit 1.
enum Failure {
    Usage(String),
    Check(String),
}

impl From<symstab::Error> for Failure {
    fn from(e: symstab::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Hilbert { field, a, b, oracle } => cmd_hilbert(field, &a, &b, oracle),
        Command::Form { op } => cmd_form(op),
        Command::Pair(args) => cmd_pair(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Cohom(args) => cmd_cohom(args),
        Command::Oracle { op } => cmd_oracle(op),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn integer(s: &str) -> Result<i64, Failure> {
    s.trim().parse().map_err(|_| Failure::Usage(format!("`{s}` is not an integer")))
}

fn cmd_hilbert(field: LocalField, a: &str, b: &str, oracle: bool) -> Outcome {
    let ca = SquareClass::parse_token(field, a)?;
    let cb = SquareClass::parse_token(field, b)?;
    let value = hilbert(&ca, &cb)?;
    println!("{value}");
    if oracle {
        let (x, y) = (integer(a)?, integer(b)?);
        let check = hilbert_oracle(field, x, y)?;
        let verdict = if check == value { "agrees" } else { "DISAGREES" };
        println!("oracle: {check} ({verdict})");
        if check != value {
            return Err(Failure::Check(format!("engine {value}, oracle {check}")));
        }
    }
    Ok(true)
}

enum AnyForm {
    Quad(QuadForm),
    Herm(HermForm),
}

fn parse_form(s: &str) -> Result<AnyForm, Failure> {
    if s.trim_start().starts_with("hf(") {
        Ok(AnyForm::Herm(s.parse()?))
    } else {
        Ok(AnyForm::Quad(s.parse()?))
    }
}

fn answer(b: bool) -> Outcome {
    println!("{b}");
    Ok(b)
}

fn mixed() -> Failure {
    Failure::Usage("both forms must be quadratic or both Hermitian".into())
}

fn cmd_form(op: FormOp) -> Outcome {
    match op {
        FormOp::Invariants { form } => {
            let json = match parse_form(&form)? {
                AnyForm::Quad(q) => serde_json::to_string(&q.invariants())?,
                AnyForm::Herm(h) => match h.signature() {
                    Some((pos, neg)) => serde_json::json!({"rank": h.rank(), "pos": pos, "neg": neg}).to_string(),
                    None => serde_json::json!({"rank": h.rank(), "det": h.det_class().name()}).to_string(),
                },
            };
            println!("{json}");
            Ok(true)
        }
        FormOp::Equiv { a, b } => match (parse_form(&a)?, parse_form(&b)?) {
            (AnyForm::Quad(a), AnyForm::Quad(b)) => answer(a.equivalent(&b)?),
            (AnyForm::Herm(a), AnyForm::Herm(b)) => answer(a.herm_equivalent(&b)?),
            _ => Err(mixed()),
        },
        FormOp::Mu { form } => {
            let mu = match parse_form(&form)? {
                AnyForm::Quad(q) => q.mu(),
                AnyForm::Herm(h) => h.herm_mu(),
            };
            println!("{mu}");
            Ok(true)
        }
        FormOp::Witt { form } => {
            match parse_form(&form)? {
                AnyForm::Quad(q) => {
                    let (k, core) = q.witt_decompose();
                    let kernel = QuadForm::from_invariants(&core)?;
                    println!("{k} hyperbolic plane(s) + {kernel}");
                }
                AnyForm::Herm(h) => {
                    let k = h.herm_mu();
                    println!("{k} hyperbolic plane(s) + anisotropic kernel of rank {}", h.rank() - 2 * k);
                }
            }
            Ok(true)
        }
        FormOp::Rep { form, x } => match parse_form(&form)? {
            AnyForm::Quad(q) => {
                let x = SquareClass::parse_token(q.field(), &x)?;
                answer(q.represents(&x)?)
            }
            AnyForm::Herm(_) => Err(Failure::Usage("rep takes a quadratic form".into())),
        },
        FormOp::Leq { c, b } => match (parse_form(&c)?, parse_form(&b)?) {
            (AnyForm::Quad(c), AnyForm::Quad(b)) => answer(c.is_subform(&b)?),
            (AnyForm::Herm(c), AnyForm::Herm(b)) => answer(c.herm_is_subform(&b)?),
            _ => Err(mixed()),
        },
    }
}

fn need<T>(v: Option<T>, flag: &str, family: Family) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("{family} needs {flag}")))
}

fn build_spec(args: &PairArgs) -> Result<PairSpec, Failure> {
    let family = args.family;
    let quad = |s: &Option<String>, flag: &str| -> Result<QuadForm, Failure> {
        Ok(need(s.as_deref(), flag, family)?.parse()?)
    };
    let herm = |s: &Option<String>, flag: &str| -> Result<HermForm, Failure> {
        Ok(need(s.as_deref(), flag, family)?.parse()?)
    };
    Ok(match family {
        Family::GlxGl | Family::SlxGl => {
            let field = need(args.field, "--field", family)?;
            let dims = need(args.dims.clone(), "--dims", family)?;
            let [dim_plus, dim_minus] = dims[..] else {
                return Err(Failure::Usage("--dims takes two values, e.g. --dims 2,1".into()));
            };
            if family == Family::GlxGl {
                PairSpec::GlxGl { field, dim_plus, dim_minus }
            } else {
                PairSpec::SlxGl { field, dim_plus, dim_minus }
            }
        }
        Family::GlFOverE | Family::SlFOverE | Family::GlBasechange | Family::SlBasechange => {
            let ext = need(args.ext, "--ext", family)?;
            let dim = need(args.dim, "--dim", family)?;
            match family {
                Family::GlFOverE => PairSpec::GlFOverE { ext, dim },
                Family::SlFOverE => PairSpec::SlFOverE { ext, dim },
                Family::GlBasechange => PairSpec::GlBasechange { ext, dim },
                _ => PairSpec::SlBasechange { ext, dim },
            }
        }
        Family::OPair => PairSpec::OPair {
            bplus: quad(&args.bplus, "--bplus")?,
            bminus: quad(&args.bminus, "--bminus")?,
        },
        Family::UPair => PairSpec::UPair {
            bplus: herm(&args.bplus, "--bplus")?,
            bminus: herm(&args.bminus, "--bminus")?,
        },
        Family::GlO => PairSpec::GlO { b: quad(&args.b, "--b")? },
        Family::GlU => PairSpec::GlU { b: herm(&args.b, "--b")? },
        Family::Quaternion => PairSpec::Quaternion { p: need(args.p, "-p", family)? },
    })
}

fn cmd_pair(args: PairArgs) -> Outcome {
    let spec = build_spec(&args)?;
    let verdict = classify(&spec)?;
    let row = Row { spec, verdict };
    let mut out = io::stdout().lock();
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&row)?)?,
        Format::Plain => write_verdict_plain(&mut out, &row.verdict)?,
        other => render_rows(&mut out, std::slice::from_ref(&row), other)?,
    }
    Ok(true)
}

fn write_verdict_plain(out: &mut impl Write, v: &Verdict) -> io::Result<()> {
    writeln!(out, "stable: {}", v.stable)?;
    writeln!(out, "s-stable: {}", v.s_stable)?;
    writeln!(out, "p-stable: {}", v.p_stable)?;
    writeln!(out, "gelfand: {}", v.gelfand)?;
    writeln!(out, "citations: {}", v.citations.join(", "))
}

const ROW_HEADER: [&str; 7] = ["family", "params", "stable", "s_stable", "p_stable", "gelfand", "citations"];

fn row_cells(row: &Row) -> [String; 7] {
    let v = &row.verdict;
    [
        row.spec.family().tag().to_string(),
        row.spec.params().to_string(),
        v.stable.to_string(),
        v.s_stable.to_string(),
        v.p_stable.to_string(),
        v.gelfand.to_string(),
        v.citations.join(";"),
    ]
}

fn markdown_table(out: &mut impl Write, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    writeln!(out, "| {} |", header.join(" | "))?;
    writeln!(out, "|{}", " --- |".repeat(header.len()))?;
    for r in rows {
        let cells: Vec<String> = r.iter().map(|c| c.replace('|', "\\|")).collect();
        writeln!(out, "| {} |", cells.join(" | "))?;
    }
    Ok(())
}

fn render_rows(out: &mut impl Write, rows: &[Row], format: Format) -> Result<(), Failure> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(rows)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(ROW_HEADER)?;
            for row in rows {
                w.write_record(row_cells(row))?;
            }
            w.flush()?;
        }
        Format::Markdown => {
            let cells: Vec<Vec<String>> = rows.iter().map(|r| row_cells(r).to_vec()).collect();
            markdown_table(out, &ROW_HEADER, &cells)?;
        }
        Format::Plain => {
            for row in rows {
                let c = row_cells(row);
                writeln!(out, "{} {} stable={} s={} p={} gelfand={}", c[0], c[1], c[2], c[3], c[4], c[5])?;
            }
        }
    }
    Ok(())
}

const SUMMARY_HEADER: [&str; 6] = ["family", "field", "stable", "s_stable", "p_stable", "gelfand"];

fn summary_cells(line: &SummaryLine) -> Vec<String> {
    vec![
        line.family.clone(),
        line.field_kind.clone(),
        line.stable.clone(),
        line.s_stable.clone(),
        line.p_stable.clone(),
        line.gelfand.clone(),
    ]
}

fn render_summary(out: &mut impl Write, lines: &[SummaryLine], format: Format) -> Result<(), Failure> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(lines)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(SUMMARY_HEADER)?;
            for l in lines {
                w.write_record(summary_cells(l))?;
            }
            w.flush()?;
        }
        Format::Markdown => {
            let cells: Vec<Vec<String>> = lines.iter().map(summary_cells).collect();
            markdown_table(out, &SUMMARY_HEADER, &cells)?;
        }
        Format::Plain => {
            for l in lines {
                writeln!(out, "{}", summary_cells(l).join(" / "))?;
            }
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Outcome {
    let bounds = SweepBounds { max_dim: args.max_dim, max_sig: args.max_sig };
    let rows = if args.family.eq_ignore_ascii_case("all") {
        sweep_all(args.field, bounds)?
    } else {
        sweep(args.family.parse()?, args.field, bounds)?
    };
    let mut buf = Vec::new();
    if args.summary {
        render_summary(&mut buf, &summary_table(&rows), args.format)?;
    } else {
        render_rows(&mut buf, &rows, args.format)?;
    }
    match &args.out {
        Some(path) => fs::write(path, &buf)?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    if args.check {
        let violations: Vec<String> = rows
            .iter()
            .flat_map(|row| {
                check_row(row)
                    .into_iter()
                    .map(move |v| format!("{} {}: {v}", row.spec.family(), row.spec.params()))
            })
            .collect();
        if !violations.is_empty() {
            return Err(Failure::Check(violations.join("\n")));
        }
        let unknown = rows.iter().filter(|r| r.verdict.gelfand == Tri::Unknown).count();
        eprintln!("checked {} rows, {unknown} with Gelfand unknown", rows.len());
    }
    Ok(true)
}

fn cmd_cohom(args: CohomArgs) -> Outcome {
    let ig = match (&args.builtin, &args.file) {
        (Some(name), None) => {
            let group = Arc::new(Group::builtin(name)?);
            if args.list {
                for (name, _) in group.involution_menu() {
                    println!("{name}");
                }
                return Ok(true);
            }
            let theta = group.involution_by_name(args.involution.as_deref().unwrap_or("id"))?;
            InvolutiveGroup::new(group, theta)?
        }
        (None, Some(path)) => {
            let ig = InvolutiveGroup::from_json(&fs::read_to_string(path)?)?;
            match &args.involution {
                Some(name) => {
                    let group = Arc::clone(ig.group());
                    let theta = group.involution_by_name(name)?;
                    InvolutiveGroup::new(group, theta)?
                }
                None => ig,
            }
        }
        _ => return Err(Failure::Usage("give exactly one of --builtin or --file".into())),
    };
    let group = ig.group();
    let h1 = ig.h1();
    println!("|G| = {}", group.order());
    println!("|G^theta| = {}", ig.fixed_subgroup().len());
    println!("|S| = {}", ig.symmetric_part().len());
    println!("|H^1| = {}", h1.len());
    for class in &h1 {
        println!("  [{}] orbit size {}", group.name(class.representative), class.orbit.len());
    }
    let n = group.order();
    let agree = (0..n).filter(|&g| ig.centralizer_criterion(g) == ig.double_coset_stable(g)).count();
    let stable = (0..n).filter(|&g| ig.double_coset_stable(g)).count();
    println!("stable elements: {stable} of {n}");
    println!("centralizer criterion agrees with double cosets on {agree} of {n} elements");
    if agree != n {
        return Err(Failure::Check("centralizer criterion disagrees with double cosets".into()));
    }
    Ok(true)
}

fn cmd_oracle(op: OracleOp) -> Outcome {
    match op {
        OracleOp::Hilbert { field, a, b } => {
            println!("{}", hilbert_oracle(field, a, b)?);
            Ok(true)
        }
        OracleOp::Isotropy { form } => {
            let q: QuadForm = form.parse()?;
            answer(isotropy_oracle(&q)?)
        }
    }
}
