mod failure;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use flatpol::chow::{verify_vol_eq_pol, within_limits, VerificationReport};
use flatpol::cone::{alpha, beta, IntervalVector, IntervalVectorJson};
use flatpol::exec::Execution;
use flatpol::lorentz::{certify_C_lorentzian, sample_tuples, LorentzianCertificate};
use flatpol::matroid::{Constructor, FlatLattice, Matroid, MatroidError, MatroidSpec};
use flatpol::pol::PolCache;
use flatpol::poset::GradedSubposet;
use flatpol::rational::format_q;
use flatpol::subset::Subset;
use flatpol::unipoly::is_log_concave;

use failure::Failure;

#[derive(Parser)]
#[command(name = "flatpol", version, about = "Exact basis polynomials, cone-Lorentzian certificates and Chow-ring checks for matroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic and reduced characteristic polynomials, with the
    /// log-concavity check of the absolute coefficients.
    Charpoly {
        #[command(flatten)]
        source: Source,
        /// Element used for the reduced polynomial.
        #[arg(long, default_value_t = 0)]
        element: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Print pol_K^L, optionally evaluated at alpha, beta or a vector file.
    Pol {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        interval: IntervalArg,
        /// `alpha`, `beta`, or an interval-vector JSON file.
        #[arg(long, value_name = "alpha|beta|FILE")]
        eval: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Certify the C-Lorentzian conditions of pol_K^L at sampled cone points.
    Certify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        interval: IntervalArg,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON list of direction tuples to use instead of sampling.
        #[arg(long, value_name = "FILE")]
        directions: Option<PathBuf>,
        /// Evaluate samples on one thread.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Check that the Chow-ring volume polynomial equals pol_K^L.
    ChowVerify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        interval: IntervalArg,
        /// Every interval within the size limits.
        #[arg(long, conflicts_with = "interval")]
        all: bool,
        /// With --all, only intervals with d(K,L) at most this.
        #[arg(long, requires = "all")]
        max_d: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Lattice, semimodularity, balance and interval-connectivity predicates.
    PosetCheck {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Matroid JSON: bases, or a uniform/graphic/fano constructor.
    #[arg(long, value_name = "FILE")]
    matroid: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["R", "N"])]
    uniform: Option<Vec<usize>>,
    /// JSON edge list `[[u, v], ...]`.
    #[arg(long, value_name = "FILE")]
    graphic: Option<PathBuf>,
    #[arg(long)]
    fano: bool,
    /// Graded sub-poset JSON `{"n": int, "sets": [[...], ...]}`.
    #[arg(long, value_name = "FILE")]
    poset: Option<PathBuf>,
}

#[derive(Args)]
struct IntervalArg {
    /// Endpoints as comma-separated elements (`""` or `[]` for the empty set).
    #[arg(long, num_args = 2, value_names = ["K", "L"], allow_hyphen_values = true)]
    interval: Option<Vec<String>>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Deserialize)]
struct PosetFile {
    n: usize,
    sets: Vec<Subset>,
}

enum Structure {
    Matroid(Box<Matroid>, Box<FlatLattice>),
    Poset(GradedSubposet),
}

impl Structure {
    fn poset(&self) -> &GradedSubposet {
        match self {
            Structure::Matroid(_, l) => l.poset(),
            Structure::Poset(p) => p,
        }
    }

    fn matroid(&self) -> Result<&Matroid, Failure> {
        match self {
            Structure::Matroid(m, _) => Ok(m),
            Structure::Poset(_) => Err(Failure::input("NeedsMatroid", "this command needs a matroid source")),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input("Io", format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::input("Parse", format!("{}: {e}", path.display())))
}

fn load(source: &Source) -> Result<Structure, Failure> {
    let spec = if let Some(path) = &source.matroid {
        parse_json::<MatroidSpec>(path)?
    } else if let Some(rn) = &source.uniform {
        MatroidSpec::Constructor(Constructor::Uniform { r: rn[0], n: rn[1] })
    } else if let Some(path) = &source.graphic {
        MatroidSpec::Constructor(Constructor::Graphic {
            edges: parse_json(path)?,
        })
    } else if source.fano {
        MatroidSpec::Constructor(Constructor::Fano)
    } else if let Some(path) = &source.poset {
        let file: PosetFile = parse_json(path)?;
        return Ok(Structure::Poset(GradedSubposet::from_sets(file.n, file.sets)?));
    } else {
        unreachable!("clap requires a source")
    };
    let m = spec.build()?;
    let lattice = m.flats_lattice()?;
    Ok(Structure::Matroid(Box::new(m), Box::new(lattice)))
}

fn parse_subset(s: &str) -> Result<Subset, Failure> {
    let body = s.trim().trim_start_matches(['[', '{']).trim_end_matches([']', '}']);
    let mut elems = Vec::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let e: usize = part
            .parse()
            .map_err(|_| Failure::input("Parse", format!("bad element {part:?} in {s:?}")))?;
        if e >= flatpol::subset::MAX_GROUND {
            return Err(Failure::input("Parse", format!("element {e} is too large")));
        }
        elems.push(e);
    }
    Ok(Subset::from_elems(elems))
}

fn resolve_interval(p: &GradedSubposet, arg: &IntervalArg) -> Result<(usize, usize), Failure> {
    match &arg.interval {
        Some(kl) => {
            let lo = parse_subset(&kl[0])?;
            let hi = parse_subset(&kl[1])?;
            Ok(p.interval(lo, hi)?)
        }
        None => match (p.bottom(), p.top()) {
            (Some(a), Some(b)) if a != b => Ok((a, b)),
            _ => Err(Failure::input("NoDefaultInterval", "poset has no bottom < top; pass --interval")),
        },
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("serializable")),
        Format::Text => print!("{}", text()),
    }
}

fn charpoly(source: &Source, element: usize, format: Format) -> Result<(), Failure> {
    let s = load(source)?;
    let m = s.matroid()?;
    let loops = m.loops();
    if !loops.is_empty() {
        return Err(MatroidError::HasLoops(loops).into());
    }
    let chi = m.characteristic_polynomial()?;
    let reduced = m.reduced_characteristic_polynomial(element)?;
    let coeffs = reduced.abs_coeffs_from_top();
    let log_concave = is_log_concave(&coeffs);
    let coeff_strings: Vec<String> = coeffs.iter().map(format_q).collect();
    let value = json!({
        "characteristic": chi.to_string(),
        "reduced": reduced.to_string(),
        "element": element,
        "coefficients": coeff_strings,
        "log_concave": log_concave,
    });
    emit(format, &value, || {
        format!(
            "chi(t) = {chi}\nreduced chi(t) = {reduced}\n|coefficients| = {}\nlog-concave: {log_concave}\n",
            coeff_strings.join(", ")
        )
    });
    Ok(())
}

fn pol(source: &Source, interval: &IntervalArg, eval: Option<&str>, format: Format) -> Result<(), Failure> {
    let s = load(source)?;
    let p = s.poset();
    let (a, b) = resolve_interval(p, interval)?;
    let mut cache = PolCache::new(p);
    let poly = cache.pol(a, b)?;
    let d = p.d(a, b).expect("interval");
    let evaluation = match eval {
        None => None,
        Some(what) => {
            let coords = cache.coords(a, b)?;
            let point: IntervalVector = match what {
                "alpha" => alpha(&coords),
                "beta" => beta(&coords),
                path => {
                    let v = parse_json::<IntervalVectorJson>(Path::new(path))?.to_vector()?;
                    if v.coords().lo() != coords.lo() || v.coords().hi() != coords.hi() {
                        return Err(Failure::input(
                            "WrongInterval",
                            format!("vector lives on [{}, {}], expected [{}, {}]", v.coords().lo(), v.coords().hi(), coords.lo(), coords.hi()),
                        ));
                    }
                    v
                }
            };
            Some((what.to_string(), format_q(&cache.eval_at(a, b, &point)?)))
        }
    };
    let value = json!({
        "K": p.element(a),
        "L": p.element(b),
        "d": d,
        "pol": poly.to_string(),
        "eval": evaluation.as_ref().map(|(at, v)| json!({"at": at, "value": v})),
    });
    emit(format, &value, || {
        let mut out = format!("{poly}\n");
        if let Some((at, v)) = &evaluation {
            out.push_str(&format!("pol({at}) = {v}\n"));
        }
        out
    });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn certify(
    source: &Source,
    interval: &IntervalArg,
    samples: usize,
    seed: u64,
    directions: Option<&Path>,
    sequential: bool,
    format: Format,
) -> Result<bool, Failure> {
    let s = load(source)?;
    let p = s.poset();
    let (a, b) = resolve_interval(p, interval)?;
    let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
    let mut cache = PolCache::new(p);
    let (tuples, seed) = match directions {
        Some(path) => {
            let raw: Vec<Vec<IntervalVectorJson>> = parse_json(path)?;
            let tuples = raw
                .iter()
                .map(|t| t.iter().map(IntervalVectorJson::to_vector).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            (tuples, None)
        }
        None => {
            if samples == 0 {
                return Err(Failure::input("NoSamples", "--samples must be at least 1"));
            }
            let d = p.d(a, b).expect("interval");
            (sample_tuples(&cache, a, b, d, samples, seed)?, Some(seed))
        }
    };
    let cert: LorentzianCertificate = certify_C_lorentzian(&mut cache, a, b, &tuples, seed, exec)?;
    emit(format, &cert, || {
        let mut out = format!("interval [{}, {}], d = {}\n", cert.lo, cert.hi, cert.d);
        for sample in &cert.samples {
            let inertia = sample
                .inertia
                .map(|t| format!(", inertia ({}, {}, {})", t.n_plus, t.n_zero, t.n_minus))
                .unwrap_or_default();
            out.push_str(&format!(
                "sample {}: contraction {}{inertia}: {}\n",
                sample.index,
                sample.contraction,
                if sample.passed { "pass" } else { "FAIL" }
            ));
        }
        out.push_str(&format!("verdict: {}\n", cert.verdict));
        out
    });
    if let Some(i) = cert.first_failure() {
        eprintln!("error [CertificationFailure]: sample {i} fails");
    }
    Ok(cert.verdict)
}

#[derive(Serialize)]
struct ChowSummary {
    reports: Vec<VerificationReport>,
    skipped: Vec<(Subset, Subset)>,
    verdict: bool,
}

fn chow_verify(source: &Source, interval: &IntervalArg, all: bool, max_d: Option<usize>, format: Format) -> Result<bool, Failure> {
    let s = load(source)?;
    let p = s.poset();
    let mut cache = PolCache::new(p);
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    if all {
        for (a, b) in p.strict_pairs().collect::<Vec<_>>() {
            let d = p.d(a, b).expect("strict pair");
            if max_d.is_some_and(|m| d > m) {
                continue;
            }
            if !within_limits(p, a, b) {
                skipped.push((p.element(a), p.element(b)));
                continue;
            }
            reports.push(verify_vol_eq_pol(&mut cache, a, b)?);
        }
    } else {
        let (a, b) = resolve_interval(p, interval)?;
        reports.push(verify_vol_eq_pol(&mut cache, a, b)?);
    }
    let verdict = reports.iter().all(|r| r.equal);
    let summary = ChowSummary { reports, skipped, verdict };
    emit(format, &summary, || {
        let mut out = String::new();
        for r in &summary.reports {
            let dims: Vec<String> = r.graded_dims.iter().map(|k| k.to_string()).collect();
            out.push_str(&format!(
                "[{}, {}] d = {}, graded dimensions {}: {}\n",
                r.lo,
                r.hi,
                r.d,
                dims.join(", "),
                match &r.witness {
                    None => "vol = pol".to_string(),
                    Some(w) => format!("DIFFERENT at {w}"),
                }
            ));
        }
        for (lo, hi) in &summary.skipped {
            out.push_str(&format!("[{lo}, {hi}] skipped: over size limits\n"));
        }
        out.push_str(&format!("verdict: {}\n", summary.verdict));
        out
    });
    Ok(verdict)
}

fn poset_check(source: &Source, format: Format) -> Result<(), Failure> {
    let s = load(source)?;
    let p = s.poset();
    let witness = p.interval_connectivity_witness().map(|(a, b)| (p.element(a), p.element(b)));
    let value = json!({
        "elements": p.len(),
        "graded": true,
        "lattice": p.is_lattice(),
        "semimodular": p.is_semimodular(),
        "balanced": p.is_balanced(),
        "one_balanced": p.is_one_balanced(),
        "interval_connected": witness.is_none(),
        "disconnected_interval": witness,
    });
    emit(format, &value, || {
        let mut out = format!(
            "elements: {}\ngraded: true\nlattice: {}\nsemimodular: {}\nbalanced: {}\none-balanced: {}\ninterval-connected: {}\n",
            p.len(),
            p.is_lattice(),
            p.is_semimodular(),
            p.is_balanced(),
            p.is_one_balanced(),
            witness.is_none()
        );
        if let Some((lo, hi)) = witness {
            out.push_str(&format!("disconnected interval: [{lo}, {hi}]\n"));
        }
        out
    });
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Charpoly { source, element, out } => charpoly(&source, element, out.format).map(|_| true),
        Command::Pol {
            source,
            interval,
            eval,
            out,
        } => pol(&source, &interval, eval.as_deref(), out.format).map(|_| true),
        Command::Certify {
            source,
            interval,
            samples,
            seed,
            directions,
            sequential,
            out,
        } => certify(&source, &interval, samples, seed, directions.as_deref(), sequential, out.format),
        Command::ChowVerify {
            source,
            interval,
            all,
            max_d,
            out,
        } => chow_verify(&source, &interval, all, max_d, out.format),
        Command::PosetCheck { source, out } => poset_check(&source, out.format).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(f) => {
            eprintln!("error [{}]: {}", f.kind, f.message);
            ExitCode::from(f.code)
        }
    }
}
