use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use recourse_core::adversary::{pairing_norecourse, SingleEdgeMode};
use recourse_core::allflip::{af_run_sequence, AllFlipConfig, InitialOrientation};
use recourse_core::bmatch::{BMatchConfig, BMatchState, PickPolicy};
use recourse_core::bounds::{evaluate, summarize, verify};
use recourse_core::dot::{bmatch_dot, orientation_dot};
use recourse_core::format::{witness_to_text, SequenceFile, TraceFile, TraceHeader, Verdict};
use recourse_core::gen::{arboricity_bounded, bmatch_feasible, random_forest};
use recourse_core::oracle::{arboricity, min_max_indegree, min_max_load, OracleMode, Witness};
use recourse_core::orient_sp::{greedy_run_sequence, sp_run_sequence};
use recourse_core::{
    Adversary, Error, ErrorClass, FixingOrienter, OrientationDriver, PathTiePolicy,
    ShortestPathOrienter, SpConfig, StepRecord, UnsaturatedTiePolicy,
};

const EXIT_REJECTED: u8 = 1;
const EXIT_BOUND: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "recourse",
    version,
    about = "Online orientation and b-matching with recourse"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Input file (sequence file, or a trace for `verify`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed for randomized policies and generators.
    #[arg(long, env = "RECOURSE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Shortest-path orientation of an acyclic edge sequence.
    OrientSp {
        #[command(flatten)]
        io: Io,
        /// In-degree constraint; defaults to the sequence header.
        #[arg(long = "c")]
        c: Option<u32>,
        #[arg(long, value_enum, default_value_t = SpPolicy::Default)]
        policy: SpPolicy,
    },
    /// All-flip orientation of a graph with bounded arboricity.
    OrientAllflip {
        #[command(flatten)]
        io: Io,
        /// Promised in-degree; defaults to the sequence header.
        #[arg(long = "delta")]
        delta: Option<u32>,
        /// Maintained in-degree; defaults to twice the promise.
        #[arg(long = "Delta")]
        big_delta: Option<u32>,
        #[arg(long, value_enum, default_value_t = InitialPolicy::Second)]
        policy: InitialPolicy,
    },
    /// Shortest augmenting path b-matching.
    Bmatch {
        #[command(flatten)]
        io: Io,
        #[arg(long = "K")]
        k: Option<u32>,
        #[arg(long = "C")]
        big_c: Option<u32>,
        #[arg(long, value_enum, default_value_t = MatchPolicy::Lowest)]
        policy: MatchPolicy,
    },
    /// Greedy orientation without recourse.
    Greedy {
        #[command(flatten)]
        io: Io,
    },
    /// Run an adaptive construction and record what it emitted.
    Adversary {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum)]
        construction: Construction,
        #[arg(long)]
        param: u64,
        #[arg(long, value_enum, default_value_t = SpPolicy::Default)]
        policy: SpPolicy,
        /// Where to write the emitted sequence; defaults to `<output>.seq`.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Offline optimum of a small instance.
    Oracle {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum)]
        metric: MetricArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
    },
    /// Recompute all checks of a trace file.
    Verify {
        #[command(flatten)]
        io: Io,
    },
    /// Generate an instance and its witness.
    Gen {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Number of edges or arrivals.
        #[arg(long)]
        n: Option<usize>,
        /// Number of nodes for arboricity-bounded graphs.
        #[arg(long)]
        nodes: Option<u32>,
        /// In-degree constraint or forest count.
        #[arg(long = "c")]
        c: Option<u32>,
        #[arg(long = "K")]
        k: Option<u32>,
        #[arg(long = "C")]
        big_c: Option<u32>,
    },
    /// Run a sequence and print the final state in Graphviz format.
    ExportDot {
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpPolicy {
    /// Ties go to the second endpoint.
    Default,
    /// Ties go to the first endpoint.
    First,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitialPolicy {
    First,
    Second,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatchPolicy {
    Lowest,
    First,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    BuildTm,
    SingleStep,
    Linear,
    SingleEdge,
    SingleEdgeFaithful,
    TwoFlip,
    TwoFlipFixing,
    Pairing,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    MinMaxIndegree,
    MinMaxLoad,
    Arboricity,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Exhaustive,
    Feasibility,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Forest,
    ArboricityBounded,
    BmatchFeasible,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0} check(s) failed")]
    Bound(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_REJECTED,
            CliError::Bound(_) => EXIT_BOUND,
            CliError::Core(e) => match e.class() {
                ErrorClass::Rejected => EXIT_REJECTED,
                ErrorClass::Infeasible | ErrorClass::Contract => EXIT_INFEASIBLE,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Option<PathBuf>) -> CliResult<String> {
    let path = path
        .as_ref()
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn sp_config(c: u32, policy: SpPolicy, seed: u64) -> SpConfig {
    match policy {
        SpPolicy::Default => SpConfig::new(c),
        SpPolicy::First => SpConfig::new(c).with_ties(
            UnsaturatedTiePolicy::TowardFirst,
            PathTiePolicy::FirstEndpoint,
        ),
        SpPolicy::Random => SpConfig::random(c, seed),
    }
}

fn orientation_input(
    io: &Io,
) -> CliResult<(u32, Vec<(recourse_core::NodeId, recourse_core::NodeId)>)> {
    match SequenceFile::parse(&read(&io.input)?)? {
        SequenceFile::Orientation { constraint, edges } => Ok((constraint, edges)),
        SequenceFile::BMatching { .. } => Err(CliError::Core(Error::RejectedInput(
            "expected an orientation sequence".into(),
        ))),
    }
}

fn matching_input(io: &Io) -> CliResult<(u32, u32, Vec<Vec<recourse_core::NodeId>>)> {
    match SequenceFile::parse(&read(&io.input)?)? {
        SequenceFile::BMatching {
            promised,
            factor,
            arrivals,
        } => Ok((promised, factor, arrivals)),
        SequenceFile::Orientation { .. } => Err(CliError::Core(Error::RejectedInput(
            "expected a b-matching sequence".into(),
        ))),
    }
}

/// Writes the trace, then reports failing verdicts as a bound failure.
fn emit_trace(
    io: &Io,
    algorithm: &str,
    params: BTreeMap<String, u64>,
    construction: Option<&str>,
    steps: Vec<StepRecord>,
) -> CliResult<()> {
    let header = TraceHeader {
        algorithm: algorithm.to_string(),
        params,
        construction: construction.map(str::to_string),
    };
    let verdicts = evaluate(&header, &steps)?;
    let failed = verdicts.iter().filter(|v| !v.holds).count();
    for v in verdicts.iter().filter(|v| !v.holds) {
        eprintln!(
            "bound failed: {} observed {} limit {}",
            v.name, v.observed, v.limit
        );
    }
    let summary = summarize(&steps, verdicts);
    let trace = TraceFile {
        header,
        steps,
        summary,
    };
    write(io.output.as_deref(), &trace.to_text())?;
    if failed > 0 {
        return Err(CliError::Bound(failed));
    }
    Ok(())
}

fn params(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn run_adversary<D: OrientationDriver>(
    driver: &mut D,
    construction: Construction,
    param: u64,
) -> CliResult<recourse_core::Recording> {
    let mut adv = Adversary::new(driver);
    let small =
        |p: u64| u32::try_from(p).map_err(|_| CliError::Usage(format!("--param {p} is too large")));
    match construction {
        Construction::BuildTm => {
            let m = small(param)?;
            if !(1..=20).contains(&m) {
                return Err(CliError::Usage("build-tm depth must be in 1..=20".into()));
            }
            adv.build_tm(m)?;
        }
        Construction::SingleStep => {
            if param > 1 << 20 {
                return Err(CliError::Usage(
                    "single-step size is limited to 2^20".into(),
                ));
            }
            adv.single_step_log_flips(param)?;
        }
        Construction::Linear => {
            adv.linear_total_flips(param)?;
        }
        Construction::SingleEdge | Construction::SingleEdgeFaithful => {
            let k = small(param)?;
            if !(1..=6).contains(&k) {
                return Err(CliError::Usage(
                    "single-edge rounds must be in 1..=6".into(),
                ));
            }
            let mode = if matches!(construction, Construction::SingleEdge) {
                SingleEdgeMode::Robust
            } else {
                SingleEdgeMode::Faithful
            };
            let out = adv.single_edge_flips(k, mode)?;
            if !out.rounds_without_flip.is_empty() {
                eprintln!(
                    "watched edge dodged rounds {:?} by tie-breaking",
                    out.rounds_without_flip
                );
            }
        }
        Construction::TwoFlip | Construction::TwoFlipFixing => {
            adv.two_flip_forcer(param)?;
        }
        Construction::Pairing => unreachable!("pairing is static"),
    }
    Ok(adv.into_recording())
}

fn construction_name(c: Construction) -> &'static str {
    match c {
        Construction::BuildTm => "build-tm",
        Construction::SingleStep => "single-step",
        Construction::Linear => "linear",
        Construction::SingleEdge => "single-edge",
        Construction::SingleEdgeFaithful => "single-edge-faithful",
        Construction::TwoFlip => "two-flip",
        Construction::TwoFlipFixing => "two-flip-fixing",
        Construction::Pairing => "pairing",
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::OrientSp { io, c, policy } => {
            let (header_c, edges) = orientation_input(&io)?;
            let c = c.unwrap_or(header_c);
            let steps = sp_run_sequence(sp_config(c, policy, io.seed), &edges)?;
            emit_trace(&io, "orient-sp", params(&[("c", c as u64)]), None, steps)
        }
        Command::Greedy { io } => {
            let (_, edges) = orientation_input(&io)?;
            let steps = greedy_run_sequence(&edges)?;
            emit_trace(&io, "greedy", BTreeMap::new(), None, steps)
        }
        Command::OrientAllflip {
            io,
            delta,
            big_delta,
            policy,
        } => {
            let (header_c, edges) = orientation_input(&io)?;
            let delta = delta.unwrap_or(header_c);
            let big = big_delta.unwrap_or(2 * delta);
            let initial = match policy {
                InitialPolicy::First => InitialOrientation::TowardFirst,
                InitialPolicy::Second => InitialOrientation::TowardSecond,
                InitialPolicy::Random => InitialOrientation::Random { seed: io.seed },
            };
            let cfg = AllFlipConfig::new(delta, big)?.with_initial(initial);
            let steps = af_run_sequence(cfg, &edges)?;
            emit_trace(
                &io,
                "orient-allflip",
                params(&[("delta", delta as u64), ("Delta", big as u64)]),
                None,
                steps,
            )
        }
        Command::Bmatch {
            io,
            k,
            big_c,
            policy,
        } => {
            let (hk, hc, arrivals) = matching_input(&io)?;
            let (k, c) = (k.unwrap_or(hk), big_c.unwrap_or(hc));
            let pick = match policy {
                MatchPolicy::Lowest => PickPolicy::LowestLoadThenId,
                MatchPolicy::First => PickPolicy::FirstListed,
                MatchPolicy::Random => PickPolicy::Random { seed: io.seed },
            };
            let cfg = BMatchConfig::new(k, c)?.with_pick(pick);
            let steps = recourse_core::bmatch::bm_run_sequence(cfg, &arrivals)?;
            emit_trace(
                &io,
                "bmatch",
                params(&[("K", k as u64), ("C", c as u64)]),
                None,
                steps,
            )
        }
        Command::Adversary {
            io,
            construction,
            param,
            policy,
            record,
        } => {
            let (edges, steps) = if let Construction::Pairing = construction {
                let edges = pairing_norecourse(param);
                let steps = greedy_run_sequence(&edges)?;
                (edges, steps)
            } else {
                let cfg = sp_config(2, policy, io.seed);
                let rec = if let Construction::TwoFlipFixing = construction {
                    run_adversary(&mut FixingOrienter::new(cfg)?, construction, param)?
                } else {
                    run_adversary(&mut ShortestPathOrienter::new(cfg)?, construction, param)?
                };
                (rec.edges, rec.trace)
            };
            let record = record.or_else(|| io.output.as_deref().map(|o| sidecar(o, ".seq")));
            if let Some(path) = record {
                let seq = SequenceFile::Orientation {
                    constraint: 2,
                    edges,
                };
                write(Some(&path), &seq.to_text())?;
            }
            emit_trace(
                &io,
                "adversary",
                params(&[("c", 2), ("param", param)]),
                Some(construction_name(construction)),
                steps,
            )
        }
        Command::Oracle { io, metric, mode } => {
            let mode = match mode {
                ModeArg::Auto => OracleMode::Auto,
                ModeArg::Exhaustive => OracleMode::Exhaustive,
                ModeArg::Feasibility => OracleMode::Feasibility,
            };
            let report = match metric {
                MetricArg::MinMaxIndegree => min_max_indegree(&orientation_input(&io)?.1, mode)?,
                MetricArg::Arboricity => arboricity(&orientation_input(&io)?.1)?,
                MetricArg::MinMaxLoad => min_max_load(&matching_input(&io)?.2, mode)?,
            };
            let line = serde_json::to_string(&report).expect("reports serialize");
            write(io.output.as_deref(), &format!("{line}\n"))
        }
        Command::Verify { io } => {
            let trace = TraceFile::parse(&read(&io.input)?)?;
            let verdicts = verify(&trace)?;
            let mut text = String::new();
            for Verdict {
                name,
                limit,
                observed,
                holds,
            } in &verdicts
            {
                let tag = if *holds { "PASS" } else { "FAIL" };
                text.push_str(&format!("{tag} {name} observed={observed} limit={limit}\n"));
            }
            write(io.output.as_deref(), &text)?;
            let failed = verdicts.iter().filter(|v| !v.holds).count();
            if failed > 0 {
                return Err(CliError::Bound(failed));
            }
            Ok(())
        }
        Command::Gen {
            io,
            kind,
            n,
            nodes,
            c,
            k,
            big_c,
        } => {
            let need_n =
                || n.ok_or_else(|| CliError::Usage("--n is required for this kind".into()));
            let (seq, witness) = match kind {
                GenKind::Forest => {
                    if nodes.is_some() || k.is_some() || big_c.is_some() {
                        return Err(CliError::Usage("forest takes only --n and --c".into()));
                    }
                    let f = random_forest(need_n()?, io.seed);
                    let seq = SequenceFile::Orientation {
                        constraint: c.unwrap_or(2),
                        edges: f.edges,
                    };
                    (seq, Witness::Orientation(f.heads))
                }
                GenKind::ArboricityBounded => {
                    if n.is_some() || k.is_some() || big_c.is_some() {
                        return Err(CliError::Usage(
                            "arboricity-bounded takes only --nodes and --c".into(),
                        ));
                    }
                    let nodes =
                        nodes.ok_or_else(|| CliError::Usage("--nodes is required".into()))?;
                    let forests = c.unwrap_or(2);
                    let g = arboricity_bounded(nodes, forests, io.seed)?;
                    let seq = SequenceFile::Orientation {
                        constraint: forests,
                        edges: g.edges,
                    };
                    (seq, Witness::Orientation(g.heads))
                }
                GenKind::BmatchFeasible => {
                    if nodes.is_some() || c.is_some() {
                        return Err(CliError::Usage(
                            "bmatch-feasible takes only --n, --K and --C".into(),
                        ));
                    }
                    let (k, factor) = (k.unwrap_or(1), big_c.unwrap_or(2));
                    if factor < 2 {
                        return Err(CliError::Usage("--C must be at least 2".into()));
                    }
                    let inst = bmatch_feasible(need_n()?, k, io.seed)?;
                    let seq = SequenceFile::BMatching {
                        promised: k,
                        factor,
                        arrivals: inst.arrivals,
                    };
                    (seq, Witness::Assignment(inst.assignment))
                }
            };
            write(io.output.as_deref(), &seq.to_text())?;
            if let Some(out) = io.output.as_deref() {
                write(Some(&sidecar(out, ".witness")), &witness_to_text(&witness))?;
            }
            Ok(())
        }
        Command::ExportDot { io } => {
            let text = match SequenceFile::parse(&read(&io.input)?)? {
                SequenceFile::Orientation { constraint, edges } => {
                    let mut alg = ShortestPathOrienter::new(SpConfig::new(constraint))?;
                    for (i, &(u, v)) in edges.iter().enumerate() {
                        alg.process_edge(u, v).map_err(|e| e.at_step(i))?;
                    }
                    orientation_dot(alg.state())
                }
                SequenceFile::BMatching {
                    promised,
                    factor,
                    arrivals,
                } => {
                    let mut state = BMatchState::new(BMatchConfig::new(promised, factor)?)?;
                    for (i, a) in arrivals.iter().enumerate() {
                        state.process_arrival(a).map_err(|e| e.at_step(i))?;
                    }
                    bmatch_dot(&state)
                }
            };
            write(io.output.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
