//! Command-line front end: `macmahon <verb> <noun> [flags]`.
//!
//! Exit codes: 0 when the command ran and every check passed, 1 when a
//! verification failed (a witness is printed), 2 for usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::detector::{
    certify, psi1, psi2, search_const_detectors, search_poly_detectors, verify_psi3, verify_table1,
    Certificate, Detector,
};
use crate::error::{Error, Result};
use crate::partition::{brute_m, brute_n, u_series, PartVector};
use crate::quasimodular::{f_series, g_series, h_series, ramanujan_residuals};
use crate::series::{format_rational, rat, QSeries};
use crate::shuffle::{convolution_reduce, filtration_maxima, sym_u, times_n_reduce, LinComb};

pub const DEFAULT_TRUNCATION: usize = 120;
pub const DEFAULT_VERIFY_TRUNCATION: usize = 150;
pub const TRUNC_ENV: &str = "MACMAHON_TRUNC";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "macmahon", version, about = "MacMahonesque partition functions and prime-detecting expressions")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "table", global = true)]
    format: OutputFormat,
    /// Worker threads for parallel steps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Evaluate partition functions and q-series.
    #[command(subcommand)]
    Compute(ComputeCmd),
    /// Check identities and prime-detecting expressions.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Rewrite products and n-multiples as combinations of M_v.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Search for prime-detecting expressions.
    #[command(subcommand)]
    Search(SearchCmd),
}

#[derive(Subcommand, Debug)]
enum ComputeCmd {
    /// M_v(n) by enumeration.
    #[command(name = "M", alias = "m")]
    M {
        #[arg(long, help = "Exponent vector, comma separated (e.g. 1,1)")]
        vec: PartVector,
        #[arg(long, help = "Integer argument n")]
        n: u64,
    },
    /// N_v(n) by enumeration.
    #[command(name = "N", alias = "n")]
    N {
        #[arg(long, help = "Exponent vector, comma separated (e.g. 1,1)")]
        vec: PartVector,
        #[arg(long, help = "Integer argument n")]
        n: u64,
    },
    /// Generating series U_v to q^trunc.
    #[command(name = "U", alias = "u")]
    U {
        #[arg(long, help = "Exponent vector, comma separated (e.g. 1,1)")]
        vec: PartVector,
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
    /// Symmetrized series over all rearrangements of an all-odd vector.
    Sym {
        #[arg(long, help = "Exponent vector, comma separated (e.g. 1,1)")]
        vec: PartVector,
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
    /// Eisenstein series G_k.
    #[command(name = "G", alias = "g")]
    G {
        #[arg(long, help = "Weight index k")]
        k: u32,
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
    /// Prime-detecting form H_k.
    #[command(name = "H", alias = "h")]
    H {
        #[arg(long, help = "Weight index k")]
        k: u32,
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
    /// f_{k,l} for odd k < l.
    #[command(name = "F", alias = "f")]
    F {
        #[arg(long, help = "Weight index k")]
        k: u32,
        #[arg(long, help = "Second index l")]
        l: u32,
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Derivative identities for G_2, G_4, G_6.
    Ramanujan {
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
    /// The five polynomial-coefficient detectors against their H forms.
    Table1 {
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
    /// A detector read from a JSON file.
    Detect {
        #[arg(long, help = "JSON detector file")]
        expr: PathBuf,
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
    /// The constant-coefficient detectors Psi_1, Psi_2, Psi_3.
    Psi {
        #[arg(long, help = "Which detector (1, 2 or 3)", value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum ReduceCmd {
    /// Convolution of M_a and M_b as a combination of M_v.
    Conv {
        #[arg(long, help = "First exponent vector")]
        a: PartVector,
        #[arg(long, help = "Second exponent vector")]
        b: PartVector,
    },
    /// n M_v(n) as a combination of M_w.
    Timesn {
        #[arg(long, help = "Exponent vector, comma separated (e.g. 1,1)")]
        vec: PartVector,
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum SearchCmd {
    /// Constant-coefficient detectors with |v| <= d.
    Const {
        #[arg(long, help = "Bound on |v|")]
        d: u32,
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
    /// Polynomial-coefficient detectors in M_1..M_max_a.
    Poly {
        #[arg(long, help = "Largest a in M_a")]
        max_a: usize,
        #[arg(long, help = "Largest polynomial degree in n")]
        max_deg: usize,
        #[arg(long, help = "Highest power of q (falls back to MACMAHON_TRUNC)")]
        trunc: Option<usize>,
    },
}

fn truncation(flag: Option<usize>, default: usize) -> Result<usize> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(TRUNC_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("{TRUNC_ENV} must be a nonnegative integer, got {v:?}")))?,
            Err(_) => default,
        },
    };
    if n == 0 {
        return Err(Error::invalid("--trunc must be at least 1"));
    }
    Ok(n)
}

fn render_series(s: &QSeries, format: OutputFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            out = serde_json::to_string(s)?;
            out.push('\n');
        }
        OutputFormat::Csv => {
            out.push_str("n,coefficient\n");
            for (n, c) in s.coeffs().iter().enumerate() {
                let _ = writeln!(out, "{n},{}", format_rational(c));
            }
        }
        OutputFormat::Table => {
            let width = s.truncation().to_string().len().max(1);
            for (n, c) in s.coeffs().iter().enumerate() {
                let _ = writeln!(out, "{n:>width$}  {}", format_rational(c));
            }
        }
    }
    Ok(out)
}

fn render_lincomb(l: &LinComb, format: OutputFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            out = serde_json::to_string(l)?;
            out.push('\n');
        }
        OutputFormat::Csv => {
            out.push_str("vector,coefficient\n");
            for (w, c) in l.iter() {
                let _ = writeln!(out, "\"{w}\",{}", format_rational(c));
            }
        }
        OutputFormat::Table => {
            for (w, c) in l.iter() {
                let _ = writeln!(out, "{:>12}  {w}", format_rational(c));
            }
        }
    }
    Ok(out)
}

fn render_scalar(label: Value, value: String, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut v = label;
            v["value"] = Value::String(value);
            format!("{v}\n")
        }
        OutputFormat::Csv => format!("value\n{value}\n"),
        OutputFormat::Table => format!("{value}\n"),
    }
}

fn render_certificates(certs: &[Certificate], format: OutputFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            out = serde_json::to_string(certs)?;
            out.push('\n');
        }
        OutputFormat::Csv => {
            out.push_str("detector,range,composites,prime_table_sha256\n");
            for c in certs {
                let _ = writeln!(
                    out,
                    "\"{}\",{},{},{}",
                    c.detector.replace('"', "\"\""),
                    c.range,
                    c.composite_values.len(),
                    c.prime_table_sha256
                );
            }
        }
        OutputFormat::Table => {
            for c in certs {
                let _ = writeln!(
                    out,
                    "PASS  {}  (n <= {}, {} composites positive, primes sha256 {})",
                    c.detector,
                    c.range,
                    c.composite_values.len(),
                    &c.prime_table_sha256[..16]
                );
            }
        }
    }
    Ok(out)
}

fn render_detectors(header: &[(&str, String)], detectors: &[Detector], format: OutputFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            let mut v = serde_json::Map::new();
            for (k, val) in header {
                v.insert((*k).to_string(), Value::String(val.clone()));
            }
            v.insert(
                "detectors".into(),
                Value::Array(detectors.iter().map(Detector::to_json).collect()),
            );
            out = serde_json::to_string(&Value::Object(v))?;
            out.push('\n');
        }
        OutputFormat::Csv => {
            out.push_str("index,detector\n");
            for (i, d) in detectors.iter().enumerate() {
                let _ = writeln!(out, "{},\"{d}\"", i + 1);
            }
        }
        OutputFormat::Table => {
            for (k, val) in header {
                let _ = writeln!(out, "# {k}: {val}");
            }
            for (i, d) in detectors.iter().enumerate() {
                let _ = writeln!(out, "{:>3}  {d}", i + 1);
            }
        }
    }
    Ok(out)
}

fn execute(verb: Verb, format: OutputFormat) -> Result<String> {
    match verb {
        Verb::Compute(cmd) => compute(cmd, format),
        Verb::Verify(cmd) => verify(cmd, format),
        Verb::Reduce(cmd) => reduce(cmd, format),
        Verb::Search(cmd) => search(cmd, format),
    }
}

fn compute(cmd: ComputeCmd, format: OutputFormat) -> Result<String> {
    let text = match cmd {
        ComputeCmd::M { vec, n } => {
            let v = brute_m(&vec, n)?;
            render_scalar(json!({"function": "M", "vector": vec, "n": n}), v.to_string(), format)
        }
        ComputeCmd::N { vec, n } => {
            let v = brute_n(&vec, n)?;
            render_scalar(json!({"function": "N", "vector": vec, "n": n}), v.to_string(), format)
        }
        ComputeCmd::U { vec, trunc } => {
            render_series(&u_series(&vec, truncation(trunc, DEFAULT_TRUNCATION)?), format)?
        }
        ComputeCmd::Sym { vec, trunc } => {
            render_series(&sym_u(&vec, truncation(trunc, DEFAULT_TRUNCATION)?)?, format)?
        }
        ComputeCmd::G { k, trunc } => render_series(&g_series(k, truncation(trunc, DEFAULT_TRUNCATION)?)?, format)?,
        ComputeCmd::H { k, trunc } => render_series(&h_series(k, truncation(trunc, DEFAULT_TRUNCATION)?)?, format)?,
        ComputeCmd::F { k, l, trunc } => {
            render_series(&f_series(k, l, truncation(trunc, DEFAULT_TRUNCATION)?)?, format)?
        }
    };
    Ok(text)
}

fn verify(cmd: VerifyCmd, format: OutputFormat) -> Result<String> {
    match cmd {
        VerifyCmd::Ramanujan { trunc } => {
            let n = truncation(trunc, DEFAULT_VERIFY_TRUNCATION)?;
            if n < 10 {
                return Err(Error::InsufficientTruncation { needed: 10, have: n });
            }
            let names = ["D G2", "D G4", "D G6"];
            let residuals = ramanujan_residuals(n)?;
            for (name, r) in names.iter().zip(&residuals) {
                if let Some(i) = r.first_difference(&QSeries::zero(n)) {
                    return Err(Error::verification(format!("{name} identity fails at q^{i}"), Some(i)));
                }
            }
            let text = match format {
                OutputFormat::Json => format!("{}\n", json!({"identities": names, "range": n, "passed": true})),
                OutputFormat::Csv => {
                    let mut s = "identity,range,passed\n".to_string();
                    for name in names {
                        let _ = writeln!(s, "{name},{n},true");
                    }
                    s
                }
                OutputFormat::Table => names.iter().map(|name| format!("PASS  {name}  (q^0..q^{n})\n")).collect(),
            };
            Ok(text)
        }
        VerifyCmd::Table1 { trunc } => {
            let certs = verify_table1(truncation(trunc, DEFAULT_VERIFY_TRUNCATION)?)?;
            Ok(render_certificates(&certs, format)?)
        }
        VerifyCmd::Detect { expr, trunc } => {
            let n = truncation(trunc, DEFAULT_VERIFY_TRUNCATION)?;
            let text = std::fs::read_to_string(&expr)
                .map_err(|e| Error::Io(format!("{}: {e}", expr.display())))?;
            let det = Detector::from_json(&text)?;
            let cert = certify(det.to_string(), &det.series(n)?)?;
            Ok(render_certificates(&[cert], format)?)
        }
        VerifyCmd::Psi { which, trunc } => {
            let n = truncation(trunc, DEFAULT_VERIFY_TRUNCATION)?;
            if n < 30 {
                return Err(Error::InsufficientTruncation { needed: 30, have: n });
            }
            let cert = match which {
                1 => certify(format!("Psi_1 = {}", psi1()), &psi1().series(n))?,
                2 => {
                    let s2 = psi2().series(n);
                    let s1 = psi1().series(n).scale(&rat(36, 11));
                    if let Some(i) = s2.first_difference(&s1) {
                        return Err(Error::verification(format!("Psi_2 != (36/11) Psi_1 at q^{i}"), Some(i)));
                    }
                    certify(format!("Psi_2 = {}", psi2()), &s2)?
                }
                _ => verify_psi3(n)?,
            };
            Ok(render_certificates(&[cert], format)?)
        }
    }
}

fn reduce(cmd: ReduceCmd, format: OutputFormat) -> Result<String> {
    let l = match cmd {
        ReduceCmd::Conv { a, b } => {
            if a.entries().contains(&0) || b.entries().contains(&0) {
                return Err(Error::invalid("convolution letters must be >= 1"));
            }
            let l = convolution_reduce(&a, &b);
            let bound = a.filtration_weight() + b.filtration_weight();
            let (fw, _) = filtration_maxima(&l);
            if fw > bound {
                return Err(Error::verification(
                    format!("product exceeds the filtration bound {bound} (found {fw})"),
                    None,
                ));
            }
            l
        }
        ReduceCmd::Timesn { vec, trunc } => times_n_reduce(&vec, truncation(trunc, DEFAULT_TRUNCATION)?)?,
    };
    Ok(render_lincomb(&l, format)?)
}

fn search(cmd: SearchCmd, format: OutputFormat) -> Result<String> {
    match cmd {
        SearchCmd::Const { d, trunc } => {
            let s = search_const_detectors(d, truncation(trunc, DEFAULT_VERIFY_TRUNCATION)?)?;
            let header = [
                ("weight", s.weight.to_string()),
                ("bound", s.bound.to_string()),
                ("count", s.detectors.len().to_string()),
                ("observed_max_weight", s.observed_max_weight.to_string()),
                ("targets", s.targets.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")),
            ];
            let dets: Vec<Detector> = s.detectors.into_iter().map(Detector::Const).collect();
            Ok(render_detectors(&header, &dets, format)?)
        }
        SearchCmd::Poly { max_a, max_deg, trunc } => {
            let found = search_poly_detectors(max_a, max_deg, truncation(trunc, DEFAULT_VERIFY_TRUNCATION)?)?;
            let header = [
                ("max_a", max_a.to_string()),
                ("max_deg", max_deg.to_string()),
                ("dimension", found.len().to_string()),
            ];
            let dets: Vec<Detector> = found.into_iter().map(Detector::Poly).collect();
            Ok(render_detectors(&header, &dets, format)?)
        }
    }
}

/// Writes `text` to `path` through a temporary file in the same directory.
fn write_atomically(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verification { .. }
        | Error::NotInSpan { .. }
        | Error::NoRepresentation { .. }
        | Error::SpanDeficiency(_) => 1,
        Error::InvalidArgument(_) | Error::InsufficientTruncation { .. } | Error::Parse(_) | Error::Io(_) => 2,
    }
}

/// Runs the command line `argv` (including the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            let _ = writeln!(err, "error: --jobs must be at least 1");
            return 2;
        }
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let outcome = execute(cli.verb, cli.format).and_then(|text| match &cli.out {
        Some(path) => write_atomically(path, &text),
        None => {
            let _ = out.write_all(text.as_bytes());
            Ok(())
        }
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
