//! `automeasure`: exact checks on invariant measures of bi-permutative
//! cellular automata, one subcommand per operation.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use report::{to_value, Inputs, RunReport, SCHEMA};

#[derive(Debug, Parser)]
#[command(name = "automeasure", version, about)]
struct Cli {
    /// Print the full JSON run report instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Longest cylinder word evaluated (defaults to AUTOMEASURE_DEPTH_CAP or 14).
    #[arg(long, global = true)]
    depth_cap: Option<usize>,
    /// Include wall time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Local rules.
    #[command(subcommand)]
    Rule(RuleCmd),
    /// Finite groups.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Cylinder measures.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Conditional distributions at index 0.
    #[command(subcommand)]
    Conditional(ConditionalCmd),
    /// The automaton lifted to subsets.
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Measures built from set-valued measures.
    #[command(subcommand)]
    Synth(SynthCmd),
    /// The times-p-times-q circle system.
    #[command(subcommand)]
    Rlp(RlpCmd),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum RuleCmd {
    /// Left and right permutativity.
    Check { rule: PathBuf },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum GroupCmd {
    /// Order, subgroups and normal subgroups; with --subgroup, its cosets and
    /// the zero-entropy sufficient condition.
    Info {
        group: PathBuf,
        /// Comma separated subgroup elements.
        #[arg(long)]
        subgroup: Option<String>,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum MeasureCmd {
    /// Consistency, shift invariance and (with --rule) rule invariance.
    Check {
        spec: PathBuf,
        #[arg(long)]
        rule: Option<PathBuf>,
        #[arg(short, default_value_t = 6)]
        n: usize,
    },
    /// Block entropies H_0..H_n and the rate estimate H_n - H_{n-1}.
    Entropy {
        spec: PathBuf,
        #[arg(short, default_value_t = 10)]
        n: usize,
    },
    /// Mass of one cylinder.
    Eval { spec: PathBuf, word: String },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum ConditionalCmd {
    /// Uniformity census over all conditioning words of length n; with a
    /// rule, also the support-size invariance under it.
    Census {
        spec: PathBuf,
        rule: Option<PathBuf>,
        #[arg(short, default_value_t = 8)]
        n: usize,
    },
    /// Coset census over a group alphabet.
    Coset {
        spec: PathBuf,
        #[arg(long)]
        group: PathBuf,
        #[arg(short, default_value_t = 6)]
        n: usize,
    },
    /// Mass of conditioning words whose index-0 support is fixed by the tail from index k.
    TailProbe {
        spec: PathBuf,
        #[arg(short, default_value_t = 2)]
        k: usize,
        #[arg(short, default_value_t = 8)]
        n: usize,
    },
    /// Conditional at index 0 given one future word.
    At {
        spec: PathBuf,
        word: String,
        /// Report whether the support is a right coset.
        #[arg(long)]
        group: Option<PathBuf>,
        /// Condition on the rule image instead of the shift.
        #[arg(long, conflicts_with = "group")]
        rule: Option<PathBuf>,
    },
    /// Partition of the coset H w_1 by the H-coset each element forces at index 0.
    UPartition {
        spec: PathBuf,
        word: String,
        #[arg(long)]
        group: PathBuf,
        /// Comma separated subgroup elements.
        #[arg(long)]
        subgroup: String,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum LiftCmd {
    /// Words of size-k subsets whose lifted images keep size k for N steps.
    ZWords {
        rule: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(short = 'L', default_value_t = 4)]
        len: usize,
        #[arg(short = 'N', default_value_t = 2)]
        steps: usize,
        /// Use the group rule of this group and check the coset verdict.
        #[arg(long)]
        group: Option<PathBuf>,
    },
    /// Finite-depth set-valued factor map of a measure.
    Pi {
        spec: PathBuf,
        rule: PathBuf,
        #[arg(short, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = automeasure::lifted::DEFAULT_MARGIN)]
        margin: usize,
    },
    /// Whether the factor map intertwines the rule with its lift.
    Intertwine {
        spec: PathBuf,
        rule: PathBuf,
        #[arg(short, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = automeasure::lifted::DEFAULT_MARGIN)]
        margin: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum SynthCmd {
    /// Synthesize a measure from a set-valued measure.
    Run {
        nu: PathBuf,
        rule: PathBuf,
        #[arg(short, default_value_t = 5)]
        n: usize,
        /// Check shift and rule invariance of the result.
        #[arg(long)]
        verify: bool,
        /// Push the result back through the factor map and compare with nu.
        #[arg(long)]
        round_trip: bool,
        #[arg(long, default_value_t = automeasure::lifted::DEFAULT_MARGIN)]
        margin: usize,
        /// Also write the synthesized measure spec to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lift a Ledrappier-invariant measure to the dihedral group D_m.
    Dihedral {
        #[arg(short)]
        m: usize,
        nu2: PathBuf,
        #[arg(short, default_value_t = 5)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Serialize)]
struct PQ {
    #[arg(short, default_value_t = 2)]
    p: u64,
    #[arg(short, default_value_t = 3)]
    q: u64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum RlpCmd {
    /// Reciprocity counts for l = 2..=l_max.
    Counts {
        #[command(flatten)]
        #[serde(flatten)]
        pq: PQ,
        #[arg(long, default_value_t = 12)]
        l_max: usize,
    },
    /// Space-time digit diagram of a rational point.
    Diagram {
        #[command(flatten)]
        #[serde(flatten)]
        pq: PQ,
        #[arg(short, default_value = "1/5")]
        x: String,
        #[arg(short, default_value_t = 8)]
        w: usize,
        #[arg(short = 'H', default_value_t = 8)]
        h: usize,
    },
}

impl Command {
    fn name(&self) -> String {
        let value = to_value(self);
        let (group, inner) = value.as_object().and_then(|o| o.iter().next()).expect("tagged enum");
        match inner.as_object().and_then(|o| o.keys().next()) {
            Some(sub) => format!("{group} {}", sub.replace('_', "-")),
            None => group.clone(),
        }
    }

    fn args(&self) -> serde_json::Value {
        let value = to_value(self);
        value
            .as_object()
            .and_then(|o| o.values().next())
            .and_then(|v| v.as_object())
            .and_then(|o| o.values().next())
            .cloned()
            .unwrap_or_default()
    }
}

pub struct Settings {
    pub depth_cap: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let settings = Settings {
        depth_cap: cli
            .depth_cap
            .unwrap_or_else(automeasure::measures::depth_cap_from_env),
    };
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let outcome = match commands::run(&cli.command, &settings, &mut inputs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let code = outcome.verdict.exit_code();
    if cli.json {
        let report = RunReport {
            schema: SCHEMA,
            command: cli.command.name(),
            args: cli.command.args(),
            inputs: inputs.into_digests(),
            verdict: outcome.verdict,
            result: outcome.result,
            wall_time_ms: cli.timing.then(|| start.elapsed().as_millis()),
        };
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{}", outcome.text);
        if cli.timing {
            println!("wall time: {} ms", start.elapsed().as_millis());
        }
    }
    ExitCode::from(code as u8)
}
