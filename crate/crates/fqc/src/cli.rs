//! Command line interface.
//!
//! Every subcommand prints one JSON payload on standard output (pretty by
//! default, compact with `--json`) and reserves standard error for
//! diagnostics. Identical inputs and seeds give byte-identical payloads.
//!
//! Exit codes: 0 all requested checks passed, 1 a check failed, 2 bad
//! input, 3 internal inconsistency.

use crate::circuit::{library_arity, library_kind, Circuit, CircuitKind};
use crate::encodings::{self, Encoding};

use crate::linalg::{self, max_abs_diff, vec_distance, CVec};
use crate::protocols;
use crate::superfast::{self, GraphSpec};
use crate::verify::{self, Suite, SuiteOptions};
use crate::{codes, Error, Result, DENSE_WIDTH_CAP};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::s;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "fqc",
    version,
    about = "Compile circuits over local fermionic modes to qubit circuits, and check the results"
)]
struct Cli {
    /// Seed for every randomised component.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Tolerance for dense comparisons.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,

    /// Emit compact single-line JSON instead of pretty-printed JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transpile a fermionic or qubit circuit file under an encoding.
    Transpile(TranspileArgs),
    /// Apply a circuit file to a state and print the resulting amplitudes.
    Simulate(SimulateArgs),
    /// Run one of the named invariant suites.
    Verify(VerifyArgs),
    /// Work with the one-qubit-per-edge encoding of an interaction graph.
    Superfast(SuperfastArgs),
    /// Sample or force the adaptive measurement protocol.
    Protocol(ProtocolArgs),
    /// Build Majorana pair codes and search their distance.
    Code(CodeArgs),
}

#[derive(Args, Debug)]
struct TranspileArgs {
    /// Circuit JSON file ("-" for standard input).
    input: String,

    #[arg(long, value_parser = parse_encoding)]
    encoding: Encoding,

    /// Write the transpiled circuit JSON here as well.
    #[arg(long)]
    out: Option<String>,

    /// Densely check that the output represents the input (width permitting).
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Circuit JSON file ("-" for standard input).
    input: String,

    /// Occupation-number index of the initial basis state.
    #[arg(long, default_value_t = 0, conflicts_with = "state")]
    basis: usize,

    /// JSON file holding the initial amplitudes as [re, im] pairs.
    #[arg(long)]
    state: Option<String>,

    /// Write the output amplitudes here as well.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,

    /// Number of randomised repetitions inside the suites.
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Algebra,
    Encodings,
    Superfast,
    Protocol,
    Codes,
    All,
}

#[derive(Args, Debug)]
struct SuperfastArgs {
    #[command(subcommand)]
    action: SuperfastAction,
}

#[derive(Subcommand, Debug)]
enum SuperfastAction {
    /// Print the cycle stabilizer generators of the graph.
    Stabilizers { graph: String },
    /// Print the codespace dimension cut out by the stabilizers.
    Dim { graph: String },
    /// Transpile one library gate on an edge of the graph.
    Transpile {
        graph: String,
        /// Endpoint modes of the gate, as "j,k"; must be an edge.
        #[arg(long)]
        modes: String,
        /// Library gate name.
        #[arg(long, default_value = "fswap")]
        gate: String,
        /// Gate parameters, comma separated.
        #[arg(long)]
        params: Option<String>,
        /// Write the transpiled circuit JSON here as well.
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the vacuum state of the encoding and the circuit preparing it.
    Vacuum { graph: String },
}

#[derive(Args, Debug)]
struct ProtocolArgs {
    #[command(subcommand)]
    action: ProtocolAction,
}

#[derive(Subcommand, Debug)]
enum ProtocolAction {
    /// Run the protocol on random valid inputs and report each branch.
    Run {
        #[arg(long, default_value_t = 8)]
        trials: usize,
        /// Pin the two outcomes instead of sampling, as "z,y"
        /// (e.g. "+1,-i").
        #[arg(long, allow_hyphen_values = true)]
        force_branch: Option<String>,
    },
}

#[derive(Args, Debug)]
struct CodeArgs {
    #[command(subcommand)]
    action: CodeAction,
}

#[derive(Args, Debug)]
struct CodeSelector {
    /// Code family to build (needs --l).
    #[arg(long, value_enum, default_value_t = Family::ShorLike)]
    family: Family,

    /// Side length of the rectangular family; the code has l*l qubits.
    #[arg(long, conflicts_with = "tau")]
    l: Option<usize>,

    /// Explicit pairing of the Majorana generators, comma separated.
    #[arg(long)]
    tau: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    ShorLike,
}

#[derive(Subcommand, Debug)]
enum CodeAction {
    /// Print the stabilizers and logicals of a code.
    Stabilizers {
        #[command(flatten)]
        selector: CodeSelector,
    },
    /// Search the code distance by weight-ordered enumeration.
    Distance {
        #[command(flatten)]
        selector: CodeSelector,
        #[arg(long, default_value_t = 4)]
        max_weight: usize,
    },
}

fn parse_encoding(s: &str) -> Result<Encoding> {
    s.parse()
}

/// Entry point: returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let compact = cli.json;
    let (payload, code) = dispatch(&cli);
    let rendered = if compact {
        serde_json::to_string(&payload)
    } else {
        serde_json::to_string_pretty(&payload)
    };
    match rendered {
        Ok(text) => println!("{text}"),
        Err(e) => {
            eprintln!("failed to render payload: {e}");
            return 3;
        }
    }
    code
}

/// Map an error to the exit code contract: malformed or out-of-range input
/// is 2, violated internal invariants are 3, and an exhausted-but-clean
/// search is a failed check, 1.
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InconsistentStabilizers(_)
        | Error::NotQuadratic { .. }
        | Error::OutsideCode { .. }
        | Error::ImprobableBranch { .. } => 3,
        Error::DistanceSearchExhausted { .. } => 1,
        _ => 2,
    }
}

fn dispatch(cli: &Cli) -> (Value, i32) {
    let outcome = match &cli.command {
        Command::Transpile(args) => cmd_transpile(cli, args),
        Command::Simulate(args) => cmd_simulate(cli, args),
        Command::Verify(args) => Ok(cmd_verify(cli, args)),
        Command::Superfast(args) => cmd_superfast(cli, args),
        Command::Protocol(args) => cmd_protocol(cli, args),
        Command::Code(args) => cmd_code(cli, args),
    };
    match outcome {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {e}");
            (json!({ "error": e.to_string() }), exit_code_for(&e))
        }
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn amplitudes_json(v: &CVec) -> Value {
    Value::Array(v.iter().map(|a| json!([a.re, a.im])).collect())
}

fn amplitudes_from_json(value: &Value) -> Result<CVec> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::BadInput("amplitudes must be an array of [re, im] pairs".into()))?;
    let mut out = CVec::zeros(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let pair = row.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
            Error::BadInput(format!("amplitude {i} is not an [re, im] pair"))
        })?;
        let re = pair[0].as_f64().ok_or_else(|| Error::BadInput("non-numeric amplitude".into()))?;
        let im = pair[1].as_f64().ok_or_else(|| Error::BadInput("non-numeric amplitude".into()))?;
        out[i] = linalg::c64(re, im);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// transpile
// ---------------------------------------------------------------------------

/// Dense representation check for a transpiled circuit: the encoded image of
/// the input action must equal the output action on encoded states.
fn transpile_deviation(original: &Circuit, transpiled: &Circuit, encoding: Encoding) -> Result<f64> {
    let mut dev: f64 = 0.0;
    match encoding {
        Encoding::Standard => {
            dev = max_abs_diff(&original.evaluate()?, &transpiled.evaluate()?);
        }
        Encoding::Tree => {
            let m = original.total_width();
            let u_f = original.evaluate()?;
            let wide = transpiled.total_width();
            for n in 0..(1usize << m) {
                let want = encodings::tree_encode_state(&u_f.column(n).to_owned(), m)?;
                let encoded = encodings::tree_encode(n as u64, m).x as usize;
                let out = transpiled.apply(&linalg::basis_state(1 << wide, encoded))?;
                for idx in (1 << m)..out.len() {
                    dev = dev.max(out[idx].norm());
                }
                dev = dev.max(vec_distance(&out.slice(s![..1 << m]).to_owned(), &want));
            }
        }
        Encoding::Pair => {
            let n = original.total_width();
            let u_q = original.evaluate()?;
            for b in 0..(1usize << n) {
                let encoded =
                    encodings::pair_encode_state(&linalg::basis_state(1 << n, b), n)?;
                let got = transpiled.apply(&encoded)?;
                let want = encodings::pair_encode_state(&u_q.column(b).to_owned(), n)?;
                dev = dev.max(vec_distance(&got, &want));
            }
        }
    }
    Ok(dev)
}

fn cmd_transpile(cli: &Cli, args: &TranspileArgs) -> Result<(Value, i32)> {
    let circuit = Circuit::from_json_str(&read_input(&args.input)?)?;
    let (out, report) = encodings::transpile(&circuit, args.encoding)?;
    if let Some(path) = &args.out {
        std::fs::write(path, out.to_json_string())?;
    }
    let mut payload = json!({
        "report": report,
        "circuit": out.to_json(),
    });
    let mut code = 0;
    if args.verify {
        let verification = if out.total_width() <= DENSE_WIDTH_CAP {
            let deviation = transpile_deviation(&circuit, &out, args.encoding)?;
            if deviation > cli.tolerance {
                code = 3;
            }
            json!({ "ran": true, "deviation": deviation })
        } else {
            json!({ "ran": false, "reason": "width above the dense cap" })
        };
        payload["verification"] = verification;
    }
    Ok((payload, code))
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(_cli: &Cli, args: &SimulateArgs) -> Result<(Value, i32)> {
    let circuit = Circuit::from_json_str(&read_input(&args.input)?)?;
    let width = circuit.total_width();
    if width > DENSE_WIDTH_CAP {
        return Err(Error::WidthCap { requested: width, cap: DENSE_WIDTH_CAP });
    }
    let dim = 1usize << width;
    let input = match &args.state {
        Some(path) => {
            let value: Value = serde_json::from_str(&read_input(path)?)?;
            let amps = amplitudes_from_json(&value)?;
            if amps.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: amps.len() });
            }
            amps
        }
        None => {
            if args.basis >= dim {
                return Err(Error::IndexOutOfRange { index: args.basis, width });
            }
            linalg::basis_state(dim, args.basis)
        }
    };
    let output = circuit.apply(&input)?;
    let amplitudes = amplitudes_json(&output);
    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_string(&amplitudes)?)?;
    }
    let payload = json!({
        "kind": circuit.kind,
        "width": width,
        "norm": linalg::norm(&output),
        "amplitudes": amplitudes,
    });
    Ok((payload, 0))
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> (Value, i32) {
    let opts = SuiteOptions { seed: cli.seed, tolerance: cli.tolerance, trials: args.trials };
    let suites: Vec<Suite> = match args.suite {
        SuiteArg::Algebra => vec![Suite::Algebra],
        SuiteArg::Encodings => vec![Suite::Encodings],
        SuiteArg::Superfast => vec![Suite::Superfast],
        SuiteArg::Protocol => vec![Suite::Protocol],
        SuiteArg::Codes => vec![Suite::Codes],
        SuiteArg::All => Suite::EVERY.to_vec(),
    };
    let reports = verify::run_suites(&suites, &opts);
    let passed = reports.iter().all(|r| r.passed);
    let payload = if reports.len() == 1 {
        serde_json::to_value(&reports[0]).expect("report serializes")
    } else {
        json!({ "seed": cli.seed, "passed": passed, "suites": reports })
    };
    (payload, i32::from(!passed))
}

// ---------------------------------------------------------------------------
// superfast
// ---------------------------------------------------------------------------

fn load_graph(path: &str) -> Result<GraphSpec> {
    GraphSpec::from_json(&read_input(path)?)
}

fn parse_index_pair(text: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::BadInput(format!("expected \"j,k\", got {text:?}")));
    }
    let j = parts[0].trim().parse::<usize>().map_err(|_| {
        Error::BadInput(format!("bad index {:?}", parts[0]))
    })?;
    let k = parts[1].trim().parse::<usize>().map_err(|_| {
        Error::BadInput(format!("bad index {:?}", parts[1]))
    })?;
    Ok((j, k))
}

fn cmd_superfast(_cli: &Cli, args: &SuperfastArgs) -> Result<(Value, i32)> {
    match &args.action {
        SuperfastAction::Stabilizers { graph } => {
            let g = load_graph(graph)?;
            let stabilizers = superfast::stabilizer_generators(&g)?;
            let rendered: Vec<String> = stabilizers.iter().map(|s| s.to_string()).collect();
            let payload = json!({
                "vertices": g.vertex_count(),
                "edge_qubits": g.edge_count(),
                "count": rendered.len(),
                "stabilizers": rendered,
            });
            Ok((payload, 0))
        }
        SuperfastAction::Dim { graph } => {
            let g = load_graph(graph)?;
            let dim = superfast::codespace_dimension(&g)?;
            let dim_value = u64::try_from(dim)
                .map(Value::from)
                .unwrap_or_else(|_| Value::String(dim.to_string()));
            let payload = json!({
                "vertices": g.vertex_count(),
                "edge_qubits": g.edge_count(),
                "dimension": dim_value,
            });
            Ok((payload, 0))
        }
        SuperfastAction::Transpile { graph, modes, gate, params, out } => {
            let g = load_graph(graph)?;
            let (j, k) = parse_index_pair(modes)?;
            let params: Vec<f64> = match params {
                None => vec![],
                Some(text) => text
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::BadInput(format!("bad parameter {p:?}")))
                    })
                    .collect::<Result<_>>()?,
            };
            if library_kind(gate) != Some(CircuitKind::Fermionic) || library_arity(gate) != Some(2)
            {
                return Err(Error::BadInput(format!(
                    "{gate:?} is not a two-mode fermionic library gate"
                )));
            }
            let matrix = crate::circuit::library_matrix(gate, &params)?;
            let circuit = superfast::transpile_local_gate(&matrix, j, k, &g)?;
            if let Some(path) = out {
                std::fs::write(path, circuit.to_json_string())?;
            }
            let payload = json!({
                "gate": gate,
                "modes": [j, k],
                "gates": circuit.gate_count(),
                "circuit": circuit.to_json(),
            });
            Ok((payload, 0))
        }
        SuperfastAction::Vacuum { graph } => {
            let g = load_graph(graph)?;
            let (state, prep) = superfast::vacuum_state(&g)?;
            let payload = json!({
                "edge_qubits": g.edge_count(),
                "amplitudes": amplitudes_json(&state),
                "circuit": prep.to_json(),
            });
            Ok((payload, 0))
        }
    }
}

// ---------------------------------------------------------------------------
// protocol
// ---------------------------------------------------------------------------

fn parse_branch(text: &str) -> Result<(i8, i8)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::BadInput(format!("expected \"z,y\", got {text:?}")));
    }
    let z = match parts[0] {
        "+1" | "+" | "1" => 1,
        "-1" | "-" => -1,
        other => return Err(Error::BadInput(format!("bad z outcome {other:?}"))),
    };
    let y = match parts[1] {
        "+i" | "+" | "i" => 1,
        "-i" | "-" => -1,
        other => return Err(Error::BadInput(format!("bad y outcome {other:?}"))),
    };
    Ok((z, y))
}

fn cmd_protocol(cli: &Cli, args: &ProtocolArgs) -> Result<(Value, i32)> {
    let ProtocolAction::Run { trials, force_branch } = &args.action;
    let forced = force_branch.as_deref().map(parse_branch).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut rows = Vec::with_capacity(*trials);
    let mut counts = std::collections::BTreeMap::<String, usize>::new();
    for _ in 0..*trials {
        let input = protocols::random_protocol_input(&mut rng, 4)?;
        let (output, record) = protocols::run_protocol(&input, forced, &mut rng)?;
        let fidelity = protocols::protocol_fidelity(&input, &output)?;
        let branch = format!("{},{}", record.z, record.y);
        *counts.entry(branch.clone()).or_default() += 1;
        rows.push(json!({
            "branch": branch,
            "correction": record.correction,
            "probability": record.probability,
            "fidelity": fidelity,
        }));
    }
    let payload = json!({
        "seed": cli.seed,
        "trials": trials,
        "rows": rows,
        "branch_counts": counts,
    });
    Ok((payload, 0))
}

// ---------------------------------------------------------------------------
// code
// ---------------------------------------------------------------------------

fn build_code(selector: &CodeSelector) -> Result<codes::MajoranaCode> {
    match (&selector.tau, selector.l) {
        (Some(text), _) => {
            let tau: Vec<usize> = text
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::BadInput(format!("bad index {p:?}")))
                })
                .collect::<Result<_>>()?;
            if tau.len() % 2 != 0 {
                return Err(Error::BadInput("the pairing needs an even number of indices".into()));
            }
            codes::permutation_code(&tau, tau.len() / 2)
        }
        (None, Some(l)) => match selector.family {
            Family::ShorLike => codes::shor_like_code(l),
        },
        (None, None) => Err(Error::BadInput("pass either --l or --tau".into())),
    }
}

fn code_summary(code: &codes::MajoranaCode) -> Value {
    let stabilizers: Vec<String> = code.stabilizers().iter().map(|s| s.to_string()).collect();
    json!({
        "qubits": code.num_qubits(),
        "stabilizers": stabilizers,
        "logical_x": code.logical_x().to_string(),
        "logical_y": code.logical_y().to_string(),
    })
}

fn cmd_code(_cli: &Cli, args: &CodeArgs) -> Result<(Value, i32)> {
    match &args.action {
        CodeAction::Stabilizers { selector } => {
            let code = build_code(selector)?;
            Ok((code_summary(&code), 0))
        }
        CodeAction::Distance { selector, max_weight } => {
            let code = build_code(selector)?;
            let report = codes::code_distance(&code, *max_weight)?;
            let mut payload = code_summary(&code);
            payload["distance"] = json!(report.distance);
            payload["witness"] = json!(report.witness.to_string());
            Ok((payload, 0))
        }
    }
}
