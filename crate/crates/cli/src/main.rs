use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use heisodo::chain::{ChainError, OdometerChain};
use heisodo::chain_file::{parse_chain, ParseError, StageError};
use heisodo::coset_sim::{self, eigenfunction_check, projection_check, unit_generators, SimError, COSET_LIMIT};
use heisodo::heis_spectrum::{self, decompose, spectral_triples, SpectrumError};
use heisodo::zd_spectrum::{self, eigenvalues};
use heisodo::{classify, validate_chain, ClassificationReport, CosetSpace, GroupElement, SubgroupTriple};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "heisodo", version, about = "Heisenberg odometer chains and their spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-stage diagnostics and the nesting verdict.
    Validate { path: PathBuf },
    /// Flat / (x,y)-product / pure product classification.
    Classify {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = ClassifyFormat::Report)]
        format: ClassifyFormat,
    },
    /// Spectral triples and Z^2 eigenvalues of one stage.
    Spectrum {
        path: PathBuf,
        #[arg(long)]
        stage: usize,
        /// Group equivalent triples and print the completeness certificate.
        #[arg(long)]
        dedup: bool,
        #[arg(long, value_enum, default_value_t = SpectrumFormat::Report)]
        format: SpectrumFormat,
    },
    /// Coset dynamics: eigenfunction and projection checks, or an orbit.
    Simulate {
        path: PathBuf,
        #[arg(long)]
        stage: usize,
        /// Random pairs for the projection check; also caps the eigenpairs tested.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the orbit of the identity coset under the unit generators as CSV.
        #[arg(long)]
        orbit: bool,
    },
    /// Character-theoretic completeness check of every stage, or one.
    Decompose {
        path: PathBuf,
        #[arg(long)]
        stage: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifyFormat {
    Report,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpectrumFormat {
    Report,
    Csv,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

const INVALID: u8 = 2;
const PARSE: u8 = 3;
const RANGE: u8 = 4;
const NUMERIC: u8 = 5;

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::new(PARSE, format!("parse error: {}", e))
    }
}

impl From<StageError> for Failure {
    fn from(e: StageError) -> Self {
        Failure::new(INVALID, format!("invalid chain: {}", e))
    }
}

impl From<ChainError> for Failure {
    fn from(e: ChainError) -> Self {
        Failure::new(INVALID, format!("invalid chain: {}", e))
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let code = match e {
            SimError::TooLarge { .. } => RANGE,
            SimError::NotNormal | SimError::NotNested => INVALID,
            SimError::UnknownCoset(_) | SimError::NotInvariant(_) => NUMERIC,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SpectrumError> for Failure {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::Sim(s) => s.into(),
            SpectrumError::ModulusTooLarge(_) => Failure::new(RANGE, e.to_string()),
            SpectrumError::NotNormal | SpectrumError::Lattice(_) => Failure::new(INVALID, e.to_string()),
            SpectrumError::NumericalAmbiguity { .. } | SpectrumError::NotQuotientRep(_) => {
                Failure::new(NUMERIC, e.to_string())
            }
        }
    }
}

fn load(path: &PathBuf) -> Result<OdometerChain, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(PARSE, format!("cannot read {}: {}", path.display(), e)))?;
    let spec = parse_chain(&text)?;
    Ok(validate_chain(spec.to_triples()?)?)
}

fn stage(chain: &OdometerChain, n: usize) -> Result<&SubgroupTriple, Failure> {
    chain
        .stage(n)
        .ok_or_else(|| Failure::new(RANGE, format!("stage {} out of range 1..={}", n, chain.len())))
}

/// Rejects stages whose quotient is too big to enumerate.
fn bounded(t: &SubgroupTriple, n: usize) -> Result<(), Failure> {
    if t.index() > COSET_LIMIT.into() {
        return Err(Failure::new(
            RANGE,
            format!("stage {} has index {}, above the limit {}", n, t.index(), COSET_LIMIT),
        ));
    }
    Ok(())
}

fn validate(path: &PathBuf) -> Result<String, Failure> {
    let chain = load(path)?;
    let mut out = String::new();
    writeln!(out, "stages: {}", chain.len()).unwrap();
    for (d, t) in chain.diagnostics().iter().zip(chain.stages()) {
        let v: Vec<String> = d.shortest.iter().map(|c| c.to_string()).collect();
        writeln!(
            out,
            "stage {}: {}  index {}  m {}  shortest ({}) |v|^2 {}  defect {}",
            d.stage,
            t,
            d.index,
            d.m,
            v.join(", "),
            d.shortest_norm_sq,
            d.defect
        )
        .unwrap();
    }
    writeln!(out, "nested: yes").unwrap();
    writeln!(out, "{}", chain.triviality()).unwrap();
    Ok(out)
}

fn report_json(r: &ClassificationReport) -> Value {
    let finding = |f: &heisodo::chain::Finding| json!({"verdict": f.verdict.to_string(), "evidence": f.evidence});
    let sandwich: Vec<Value> = r
        .sandwich
        .iter()
        .map(|s| {
            json!({
                "stage": s.stage,
                "next_stage": s.next_stage,
                "delta": s.delta.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "verified": s.verified,
            })
        })
        .collect();
    json!({
        "class": r.class_name(),
        "flat": finding(&r.flat),
        "xy_product": finding(&r.xy_product),
        "pure_product": finding(&r.pure_product),
        "witness": r.witness,
        "sandwich": sandwich,
        "notes": r.notes,
    })
}

fn classify_cmd(path: &PathBuf, format: ClassifyFormat) -> Result<String, Failure> {
    let chain = load(path)?;
    let r = classify(&chain);
    let mut out = String::new();
    match format {
        ClassifyFormat::Json => {
            let mut v = report_json(&r);
            v["triviality"] = Value::String(chain.triviality().to_string());
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json values serialize")).unwrap();
        }
        ClassifyFormat::Report => {
            writeln!(out, "class: {}", r.class_name()).unwrap();
            for (label, f) in [("flat", &r.flat), ("(x,y)-product", &r.xy_product), ("pure product", &r.pure_product)] {
                writeln!(out, "{}: {}", label, f.verdict).unwrap();
                for e in &f.evidence {
                    writeln!(out, "  - {}", e).unwrap();
                }
            }
            if let Some(w) = &r.witness {
                let w: Vec<String> = w.iter().map(|s| s.to_string()).collect();
                writeln!(out, "witness stages: {}", w.join(", ")).unwrap();
            }
            for s in &r.sandwich {
                let d: Vec<String> = s.delta.iter().map(|x| x.to_string()).collect();
                writeln!(
                    out,
                    "sandwich {} -> {}: diag({}) {}",
                    s.stage,
                    s.next_stage,
                    d.join(", "),
                    if s.verified { "verified" } else { "NOT verified" }
                )
                .unwrap();
            }
            for n in &r.notes {
                writeln!(out, "note: {}", n).unwrap();
            }
        }
    }
    Ok(out)
}

fn spectrum_cmd(path: &PathBuf, n: usize, dedup: bool, format: SpectrumFormat) -> Result<(String, bool), Failure> {
    let chain = load(path)?;
    let t = stage(&chain, n)?;
    bounded(t, n)?;
    let pairs = eigenvalues(t.lat()).map_err(|e| Failure::new(INVALID, e.to_string()))?;
    let mut out = String::new();
    let mut ok = true;
    let (triples, classes, certificate) = if dedup {
        let d = decompose(t)?;
        ok = d.report.passed();
        (d.triples, Some(d.classes), Some(d.report.certificate_line()))
    } else {
        let mut ts = spectral_triples(t)?;
        ts.sort();
        (ts, None, None)
    };
    match format {
        SpectrumFormat::Csv => {
            out.push_str(&heis_spectrum::to_csv(&triples, classes.as_deref()));
            out.push('\n');
            out.push_str(&zd_spectrum::to_csv(&pairs));
        }
        SpectrumFormat::Report => {
            writeln!(out, "stage {}: {}  index {}", n, t, t.index()).unwrap();
            match &classes {
                Some(cs) => {
                    writeln!(out, "classes: {}", cs.len()).unwrap();
                    for (k, c) in cs.iter().enumerate() {
                        writeln!(out, "  [{}] dim {}  {}  ({} triples)", k, c.dim(), c.representative, c.members.len())
                            .unwrap();
                    }
                }
                None => {
                    writeln!(out, "spectral triples: {}", triples.len()).unwrap();
                    for tr in &triples {
                        writeln!(out, "  {}", tr).unwrap();
                    }
                }
            }
            writeln!(out, "Z^2 eigenvalues of the associated lattice: {}", pairs.len()).unwrap();
            for p in &pairs {
                writeln!(out, "  {}", p).unwrap();
            }
        }
    }
    if let Some(line) = certificate {
        if matches!(format, SpectrumFormat::Csv) {
            out.push('\n');
        }
        writeln!(out, "{}", line).unwrap();
    }
    Ok((out, ok))
}

fn simulate_cmd(path: &PathBuf, n: usize, samples: usize, seed: u64, orbit: bool) -> Result<(String, bool), Failure> {
    let chain = load(path)?;
    let t = stage(&chain, n)?;
    bounded(t, n)?;
    let space = CosetSpace::new(t)?;
    let gens = unit_generators();
    if orbit {
        let o = space.orbit(&GroupElement::identity(), &gens)?;
        return Ok((coset_sim::orbit_csv(&o), true));
    }
    let mut out = String::new();
    let mut ok = true;
    writeln!(out, "stage {}: {}  cosets {}", n, t, space.len()).unwrap();
    writeln!(out, "transitive: {}", if space.is_transitive() { "yes" } else { "no" }).unwrap();
    let pairs: Vec<_> = eigenvalues(t.lat())
        .map_err(|e| Failure::new(INVALID, e.to_string()))?
        .into_iter()
        .collect();
    let stride = pairs.len().div_ceil(samples.max(1)).max(1);
    let tested: Vec<_> = pairs.iter().step_by(stride).collect();
    let mut failures = 0;
    for p in &tested {
        for g in &gens {
            if !eigenfunction_check(&space, p, g)? {
                failures += 1;
                writeln!(out, "eigenfunction {} FAILED at {}", p, g).unwrap();
            }
        }
    }
    ok &= failures == 0;
    writeln!(
        out,
        "eigenfunctions: {} of {} pairs x {} generators, {}",
        tested.len(),
        pairs.len(),
        gens.len(),
        if failures == 0 { "OK" } else { "FAILED" }
    )
    .unwrap();
    match chain.stage(n + 1) {
        Some(fine) if fine.index() <= COSET_LIMIT.into() => {
            let pass = projection_check(t, fine, samples, seed)?;
            ok &= pass;
            writeln!(
                out,
                "projection {} -> {}: {} (samples {}, seed {})",
                n + 1,
                n,
                if pass { "OK" } else { "FAILED" },
                samples,
                seed
            )
            .unwrap();
        }
        Some(_) => writeln!(out, "projection {} -> {}: skipped, finer stage too large", n + 1, n).unwrap(),
        None => writeln!(out, "projection: no finer stage").unwrap(),
    }
    Ok((out, ok))
}

fn decompose_cmd(path: &PathBuf, only: Option<usize>) -> Result<(String, bool), Failure> {
    let chain = load(path)?;
    let stages: Vec<usize> = match only {
        Some(n) => {
            stage(&chain, n)?;
            vec![n]
        }
        None => (1..=chain.len()).collect(),
    };
    let mut out = String::new();
    let mut ok = true;
    for n in stages {
        let t = stage(&chain, n)?;
        if t.index() > COSET_LIMIT.into() {
            if only.is_some() {
                bounded(t, n)?;
            }
            writeln!(out, "stage {}: index {} skipped, above the limit {}", n, t.index(), COSET_LIMIT).unwrap();
            continue;
        }
        let d = decompose(t)?;
        ok &= d.report.passed();
        let dims: Vec<String> = d.classes.iter().map(|c| c.dim().to_string()).collect();
        writeln!(out, "stage {}: {} classes, dimensions [{}]", n, d.classes.len(), dims.join(", ")).unwrap();
        writeln!(out, "  {}", d.report.certificate_line()).unwrap();
    }
    Ok((out, ok))
}

fn run(cli: Cli) -> Result<(String, bool), Failure> {
    match cli.command {
        Command::Validate { path } => validate(&path).map(|s| (s, true)),
        Command::Classify { path, format } => classify_cmd(&path, format).map(|s| (s, true)),
        Command::Spectrum {
            path,
            stage,
            dedup,
            format,
        } => spectrum_cmd(&path, stage, dedup, format),
        Command::Simulate {
            path,
            stage,
            samples,
            seed,
            orbit,
        } => simulate_cmd(&path, stage, samples, seed, orbit),
        Command::Decompose { path, stage } => decompose_cmd(&path, stage),
    }
}

fn main() -> ExitCode {
    // Usage errors exit 1; 2 is reserved for invalid chains.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok((out, ok)) => {
            print!("{}", out);
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(NUMERIC)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
