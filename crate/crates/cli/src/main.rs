//! `ogdmis`: embed, solve, verify, anneal and benchmark from the command line.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ogdmis_core::anneal::{
    self, largest_stable_dt, read_schedule, reference_schedule, spam_correct, spam_corrupt,
    ConfusionMatrix,
};
use ogdmis_core::rydberg::{read_register, RegisterFile};
use ogdmis_core::scaling::{run_scaling, ScalingConfig};
use ogdmis_core::{
    embed, exact_mis, greedy_min_degree, greedy_random, measure, mis_probability, read_graph,
    verify_encoding, write_embedding, EmbedParams, InteractionModel, RegisterParams, TieBreak,
    DEFAULT_DELTA_OVER_U,
};

#[derive(Parser)]
#[command(
    name = "ogdmis",
    version,
    about = "Compile MIS instances into 3D Rydberg-atom registers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a graph file ({"n", "edges"}) and write the embedding JSON.
    Embed {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_retries: usize,
        /// Ancilla detuning as a fraction of each chain's bond energy.
        #[arg(long, default_value_t = 0.5)]
        detuning_fraction: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve MIS on a graph file and print the result JSON.
    Solve {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMethod::Exact)]
        method: SolveMethod,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that every diagonal ground state of an embedding encodes an MIS.
    Verify {
        embedding: PathBuf,
        #[arg(long, value_enum, default_value_t = Model::FullTails)]
        model: Model,
        /// Global detuning in nearest-neighbour lattice interactions, used
        /// when the file carries no params block.
        #[arg(long, default_value_t = DEFAULT_DELTA_OVER_U)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Anneal an embedding or register file and report P_MIS.
    Anneal {
        /// Embedding or register JSON; omit with --k33-plus.
        register: Option<PathBuf>,
        /// Use the built-in K₃₃⁺ register.
        #[arg(long, conflicts_with = "register")]
        k33_plus: bool,
        /// Schedule JSON; otherwise the reference schedule is used.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Final detuning of the reference schedule in MHz.
        #[arg(long, default_value_t = 1.5)]
        delta_f: f64,
        /// Duration of the reference schedule in µs.
        #[arg(long, default_value_t = 16.0)]
        duration: f64,
        /// Global detuning for plain embeddings, as for `verify`.
        #[arg(long, default_value_t = DEFAULT_DELTA_OVER_U)]
        delta: f64,
        /// 0 reports the exact Born distribution.
        #[arg(long, default_value_t = 0)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Integration step in µs; defaults to the largest stable step.
        #[arg(long)]
        dt: Option<f64>,
        /// Readout errors "P(g|r),P(r|g)" to apply and then correct.
        #[arg(long, value_parser = parse_pair)]
        spam: Option<(f64, f64)>,
        /// Distribution CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embedding-overhead benchmark over random graphs.
    Scaling {
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0.5)]
        edge_prob: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_retries: usize,
        /// Record elapsed_ms as 0 so reruns are byte-identical.
        #[arg(long)]
        reproducible: bool,
        /// Record CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Exact,
    Greedy,
    GreedyMinDegree,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    FullTails,
    BlockadeCutoff,
}

impl From<Model> for InteractionModel {
    fn from(m: Model) -> Self {
        match m {
            Model::FullTails => InteractionModel::FullTails,
            Model::BlockadeCutoff => InteractionModel::BlockadeCutoff,
        }
    }
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or("expected two comma-separated values")?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let kind = e
                .downcast_ref::<ogdmis_core::Error>()
                .map(|e| e.kind())
                .unwrap_or("cli");
            eprintln!("{}", json!({ "error": kind, "message": format!("{e:#}") }));
            ExitCode::FAILURE
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes to `out`, or prints to stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Embed {
            graph,
            seed,
            max_retries,
            detuning_fraction,
            out,
        } => {
            let g = read_graph(&read(&graph)?)?;
            let params = EmbedParams {
                seed,
                max_retries,
                detuning_fraction,
                ..EmbedParams::default()
            };
            let e = embed(&g, &params)?;
            emit(out.as_deref(), &write_embedding(&e))?;
        }
        Command::Solve {
            graph,
            method,
            seed,
            out,
        } => {
            let g = read_graph(&read(&graph)?)?;
            let r = match method {
                SolveMethod::Exact => exact_mis(&g)?,
                SolveMethod::Greedy => greedy_random(&g, seed),
                SolveMethod::GreedyMinDegree => greedy_min_degree(&g, TieBreak::LowestId, seed),
            };
            emit(out.as_deref(), &r.to_json())?;
        }
        Command::Verify {
            embedding,
            model,
            delta,
            out,
        } => {
            let f = read_register(&read(&embedding)?, |e| {
                RegisterParams::for_embedding(e, delta)
            })?;
            let r = verify_encoding(&f.embedding, &f.params, model.into())?;
            emit(out.as_deref(), &serde_json::to_string_pretty(&r)?)?;
            if !r.ok {
                eprintln!(
                    "{}",
                    json!({ "error": "verification_failed", "message": r.diagnostics.join("; ") })
                );
                return Ok(ExitCode::from(2));
            }
        }
        Command::Anneal {
            register,
            k33_plus,
            schedule,
            delta_f,
            duration,
            delta,
            shots,
            seed,
            dt,
            spam,
            out,
        } => {
            let f: RegisterFile = match (register, k33_plus) {
                (_, true) => anneal::k33_plus_register_file(),
                (Some(path), false) => {
                    read_register(&read(&path)?, |e| RegisterParams::for_embedding(e, delta))?
                }
                (None, false) => bail!("give a register file or --k33-plus"),
            };
            let reg = f.register()?;
            let target = f.target_graph()?;
            let s = match schedule {
                Some(p) => read_schedule(&read(&p)?)?,
                None => reference_schedule(TAU * delta_f, duration)?,
            };
            let dt = match dt {
                Some(dt) => dt,
                None => largest_stable_dt(&reg, &f.params, &s)?,
            };
            let psi = ogdmis_core::evolve(&reg, &f.params, &s, dt)?;
            let d = measure(&psi, shots, seed);
            let on_vertices = d.project(target.n())?;
            let mut summary = json!({
                "atoms": reg.len(),
                "T_us": s.duration,
                "dt_us": dt,
                "shots": shots,
                "p_mis": mis_probability(&on_vertices, &target)?,
            });
            if let Some((g, r)) = spam {
                let c = ConfusionMatrix::new(g, r)?;
                let noisy = spam_corrupt(&d, &c, seed)?;
                let fixed = spam_correct(&noisy, &c)?;
                summary["p_mis_spam"] =
                    json!(mis_probability(&noisy.project(target.n())?, &target)?);
                summary["p_mis_corrected"] =
                    json!(mis_probability(&fixed.project(target.n())?, &target)?);
            }
            emit(out.as_deref(), &d.to_csv())?;
            eprintln!("{summary}");
        }
        Command::Scaling {
            sizes,
            samples,
            edge_prob,
            seed,
            max_retries,
            reproducible,
            out,
        } => {
            let cfg = ScalingConfig {
                sizes,
                samples,
                edge_prob,
                seed,
                embed: EmbedParams {
                    max_retries,
                    ..EmbedParams::default()
                },
                reproducible,
            };
            let report = run_scaling(&cfg)?;
            emit(out.as_deref(), &report.to_csv())?;
            eprintln!(
                "{}",
                json!({
                    "sizes": report.sizes,
                    "fit_n_plus": report.fit_n_plus,
                    "fit_overhead": report.fit_overhead,
                    "all_valid": report.all_valid(),
                })
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
