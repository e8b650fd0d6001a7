//! `colfin`: batch front end to the column-finite matrix library.
//!
//! Exit status: 0 on success, 1 when a verification or computation fails,
//! 2 on usage and parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use colfin::format::{element_from_json, DescriptorDocument, ElementDocument, WitnessDocument};
use colfin::lattice::{lattice_graph, normal_closure_with_witness, quotient_image, LabelStyle};
use colfin::procedures::replay;
use colfin::verify::{run_suite, sample, trial_rng, SuiteParams, VerifyError};
use colfin::{classify_minimal_node, Element, FieldSpec, LatticeNode};

#[derive(Parser)]
#[command(name = "colfin", version, about = "Normal subgroups of the column-finite general linear group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the least lattice node containing an element, with its (α, δ) image.
    Classify { input: PathBuf },
    /// Compute the normal closure of the given elements.
    Closure {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Write a transvection certificate here when the closure contains SL_fr.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the lattice of named normal subgroups as a DOT graph.
    LatticeDot {
        /// `names` (default) or `math` for the mathematical labels.
        #[arg(long, default_value = "names")]
        labels: LabelStyle,
        /// Validate the partial order against the edge list.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded property suite.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        window: usize,
        #[arg(long, default_value = "Q")]
        field: FieldSpec,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a witness file and compare the product with its target.
    VerifyWitness { witness: PathBuf },
    /// Print a random element whose least node is `node`.
    Gen {
        node: LatticeNode,
        #[arg(long, default_value = "Q")]
        field: FieldSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        window: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn check(e: impl std::fmt::Display) -> Failure {
    Failure::Check(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Classify { input } => classify(&input),
        Command::Closure { inputs, witness, out } => closure(&inputs, witness.as_deref(), out.as_deref()),
        Command::LatticeDot { labels, check, out } => lattice_dot(labels, check, out.as_deref()),
        Command::Verify { suite, trials, seed, window, field, json, out } => {
            verify(&suite, &SuiteParams { trials, seed, window, field }, json, out.as_deref())
        }
        Command::VerifyWitness { witness } => verify_witness(&witness),
        Command::Gen { node, field, seed, window, out } => gen(node, field, seed, window, out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_element(path: &Path) -> Result<Element, Failure> {
    element_from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn classify(input: &Path) -> Outcome {
    let g = load_element(input)?;
    let node = classify_minimal_node(&g).map_err(check)?;
    if node == LatticeNode::GLcf {
        println!("{node}");
    } else {
        let (alpha, delta) = quotient_image(&g).map_err(check)?;
        println!("{node} ({alpha},{delta})");
    }
    Ok(())
}

fn closure(inputs: &[PathBuf], witness: Option<&Path>, out: Option<&Path>) -> Outcome {
    let gens = inputs.iter().map(|p| load_element(p)).collect::<Result<Vec<_>, _>>()?;
    let spec = gens[0].spec();
    if let Some(g) = gens.iter().find(|g| g.spec() != spec) {
        return Err(usage(format!("inputs mix fields {spec} and {}", g.spec())));
    }
    let (descriptor, w) = normal_closure_with_witness(spec, &gens).map_err(check)?;
    let doc = DescriptorDocument::of(spec, &descriptor);
    emit(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("descriptor serializes")), out)?;
    if let Some(path) = witness {
        match w {
            Some(w) => {
                let json = serde_json::to_string_pretty(&WitnessDocument::of_closure(&w)).expect("witness serializes");
                fs::write(path, json + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
            None => eprintln!("note: closure {descriptor} has no transvection certificate; {} not written", path.display()),
        }
    }
    Ok(())
}

fn lattice_dot(labels: LabelStyle, validate: bool, out: Option<&Path>) -> Outcome {
    let graph = lattice_graph();
    if validate {
        graph.check().map_err(check)?;
    }
    emit(&graph.to_dot(labels), out)
}

fn verify(suite: &str, params: &SuiteParams, json: bool, out: Option<&Path>) -> Outcome {
    let report = run_suite(suite, params).map_err(|e| match e {
        VerifyError::UnknownSuite(_) | VerifyError::Unsupported(_) | VerifyError::AmbientTooLarge { .. } => usage(e),
        e => check(e),
    })?;
    let text = if json { report.to_json() + "\n" } else { report.to_text() };
    emit(&text, out)?;
    if report.passed() {
        Ok(())
    } else {
        Err(check(format!("suite {suite} reported {} failures", report.failures.len())))
    }
}

fn verify_witness(path: &Path) -> Outcome {
    let doc: WitnessDocument = serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let (source, scalar, w) = doc.parse().map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if w.target.as_transvection().is_none() {
        return Err(check("target is not an elementary transvection"));
    }
    let balance: i64 = w.word.iter().map(|l| i64::from(l.exponent)).sum();
    if !scalar.is_one() && balance != 0 {
        return Err(check(format!("exponents sum to {balance}; the scalar {scalar} does not cancel")));
    }
    let product = replay(&source, &w.word).map_err(check)?;
    let mut keys: Vec<(usize, usize)> = product.delta().keys().chain(w.target.delta().keys()).copied().collect();
    keys.sort_unstable();
    if let Some(&(i, j)) = keys.iter().find(|&&(i, j)| product.get(i, j) != w.target.get(i, j)) {
        return Err(check(format!("replay differs from the target at ({i},{j}): got {}, expected {}", product.get(i, j), w.target.get(i, j))));
    }
    println!("OK: {} letters replay to the target", w.word.len());
    Ok(())
}

fn gen(node: LatticeNode, field: FieldSpec, seed: u64, window: usize, out: Option<&Path>) -> Outcome {
    let mut rng = trial_rng(seed, 0);
    let e = sample::node_element(field, &mut rng, node, window).map_err(usage)?;
    let doc = ElementDocument::of(&e).map_err(check)?;
    emit(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("element serializes")), out)
}
