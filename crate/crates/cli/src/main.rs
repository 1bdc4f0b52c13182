use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use freezetag::harness::documents::{
    parse_instance, parse_meta, parse_n3dm, parse_schedule, serialize_instance, serialize_schedule, to_pretty,
    ReductionMeta,
};
use freezetag::harness::{render_svg, verify_reduction, ShiftPolicy, VerifyOptions};
use freezetag::model::{build_distance_matrix, evaluate_tree, validate_tree, WakeupTree};
use freezetag::n3dm::{brute_force_match, shift_w, N3dmInstance};
use freezetag::reduction::{construct_reduction, required_shift, ReductionArtifacts};
use freezetag::reduction::{embed_grid, perturb_unique, scale_to_integers};
use freezetag::solvers::{greedy_schedule, solve_branch_bound_with, BranchBoundOptions, SolveStatus};
use freezetag::Rational;

/// Freeze-tag solvers and the N3DM reduction, with exact rational arithmetic.
#[derive(Parser)]
#[command(name = "freezetag", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce an N3DM document to a freeze-tag instance.
    Reduce {
        n3dm: PathBuf,
        #[arg(long, default_value = "auto")]
        shift: ShiftPolicy,
        /// Write the instance here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write reduction metadata (L, epsilon, delta, groups) here.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Solve an instance exactly (default) or greedily.
    Solve {
        instance: PathBuf,
        #[arg(long, conflicts_with = "greedy")]
        exact: bool,
        #[arg(long)]
        greedy: bool,
        /// Answer "is there a schedule with makespan at most BOUND?".
        #[arg(long, value_name = "BOUND", conflicts_with = "greedy")]
        decision: Option<Rational>,
        #[command(flatten)]
        budget: Budget,
        /// Write the schedule found here.
        #[arg(long)]
        schedule_out: Option<PathBuf>,
    },
    /// Check that a schedule is a wake-up tree and report its makespan.
    VerifySchedule {
        instance: PathBuf,
        schedule: PathBuf,
        /// Also decide whether the makespan is at most BOUND.
        #[arg(long, value_name = "BOUND")]
        bound: Option<Rational>,
    },
    /// Decide an N3DM instance by brute force.
    N3dmSolve {
        n3dm: PathBuf,
        /// Print the matching as JSON instead of a YES/NO line.
        #[arg(long)]
        json: bool,
    },
    /// Run the end-to-end reduction check and print a JSON report.
    VerifyReduction {
        n3dm: PathBuf,
        #[arg(long, default_value = "auto")]
        shift: ShiftPolicy,
        /// Also compute the exact freeze-tag optimum.
        #[arg(long)]
        optimize: bool,
        #[command(flatten)]
        budget: Budget,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit 3 when equivalence fails and 4 when the solver gave up.
        #[arg(long)]
        strict: bool,
    },
    /// Reduce an N3DM document and scale it to integer coordinates.
    Scale {
        n3dm: PathBuf,
        #[arg(long, default_value = "auto")]
        shift: ShiftPolicy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed an integer instance in a grid and compare BFS with L1 distances.
    EmbedGrid { instance: PathBuf },
    /// Move colocated robots apart.
    Perturb {
        instance: PathBuf,
        #[arg(long)]
        rho: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw an instance and optionally a schedule as SVG.
    Render {
        instance: PathBuf,
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Reduction metadata, for group colors and labels.
        #[arg(long)]
        meta: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Budget {
    #[arg(long)]
    node_limit: Option<u64>,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    no_symmetry: bool,
    #[arg(long)]
    no_dominance: bool,
}

impl Budget {
    fn options(&self, bound: Option<Rational>) -> Result<BranchBoundOptions> {
        let defaults = BranchBoundOptions::default();
        let time_limit = match self.time_limit {
            Some(s) => Some(Duration::try_from_secs_f64(s).context("invalid --time-limit")?),
            None => None,
        };
        Ok(BranchBoundOptions {
            bound,
            symmetry_breaking: !self.no_symmetry,
            dominance: !self.no_dominance,
            node_limit: self.node_limit.or(defaults.node_limit),
            time_limit,
        })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display())),
        None => say(text),
    }
}

/// Prints a line to stdout; a closed pipe ends the process quietly.
fn say(text: &str) -> Result<()> {
    let mut stdout = io::stdout().lock();
    match writeln!(stdout, "{text}").and_then(|_| stdout.flush()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => std::process::exit(0),
        r => r.context("writing stdout"),
    }
}

fn reduce(inst: &N3dmInstance, shift: ShiftPolicy) -> Result<(ReductionArtifacts, i64)> {
    let k = match shift {
        ShiftPolicy::Auto => required_shift(inst),
        ShiftPolicy::Fixed(k) => k,
        ShiftPolicy::Off => 0,
    };
    Ok((construct_reduction(&shift_w(inst, k)?)?, k))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Reduce { n3dm, shift, out, meta } => {
            let (art, k) = reduce(&parse_n3dm(&read(&n3dm)?)?, shift)?;
            if k > 0 {
                eprintln!("shifted W by {k}");
            }
            emit(&serialize_instance(&art.instance), out.as_deref())?;
            if let Some(path) = meta {
                emit(&to_pretty(&ReductionMeta::new(&art, k)), Some(&path))?;
            }
        }
        Command::Solve {
            instance,
            exact: _,
            greedy,
            decision,
            budget,
            schedule_out,
        } => {
            let inst = parse_instance(&read(&instance)?)?;
            let result = if greedy {
                greedy_schedule(&inst)?
            } else {
                solve_branch_bound_with(&inst, &budget.options(decision)?)?
            };
            if let (Some(path), Some(tree)) = (&schedule_out, &result.tree) {
                emit(&serialize_schedule(tree), Some(path))?;
            }
            if decision.is_some() {
                say(match result.status {
                    SolveStatus::Yes => "YES",
                    SolveStatus::No => "NO",
                    _ => "INCONCLUSIVE",
                })?;
            } else {
                emit(&to_pretty(&result), None)?;
            }
        }
        Command::VerifySchedule {
            instance,
            schedule,
            bound,
        } => {
            let inst = parse_instance(&read(&instance)?)?;
            let tree: WakeupTree = serde_json::from_str(&read(&schedule)?).context("parsing schedule")?;
            match validate_tree(&tree, &inst, None) {
                Err(violations) => {
                    if bound.is_some() {
                        for v in &violations {
                            eprintln!("{v}");
                        }
                        say("NO")?;
                    } else {
                        emit(&to_pretty(&json!({ "valid": false, "violations": violations })), None)?;
                    }
                }
                Ok(()) => {
                    let eval = evaluate_tree(&tree, &inst)?;
                    match bound {
                        Some(b) => say(if eval.makespan <= b { "YES" } else { "NO" })?,
                        None => emit(
                            &to_pretty(&json!({
                                "valid": true,
                                "makespan": eval.makespan,
                                "arrival": eval.arrival,
                            })),
                            None,
                        )?,
                    }
                }
            }
        }
        Command::N3dmSolve { n3dm, json } => {
            let inst = parse_n3dm(&read(&n3dm)?)?;
            let matching = brute_force_match(&inst)?;
            if json {
                emit(
                    &to_pretty(&json!({ "answer": matching.is_some(), "matching": matching })),
                    None,
                )?;
            } else {
                say(if matching.is_some() { "YES" } else { "NO" })?;
            }
        }
        Command::VerifyReduction {
            n3dm,
            shift,
            optimize,
            budget,
            out,
            strict,
        } => {
            let inst = parse_n3dm(&read(&n3dm)?)?;
            let opts = VerifyOptions {
                shift,
                solver: budget.options(None)?,
                optimize,
            };
            let report = verify_reduction(&inst, &opts)?;
            emit(&to_pretty(&report), out.as_deref())?;
            if strict {
                match report.equivalence_holds {
                    Some(false) => return Ok(ExitCode::from(3)),
                    None => return Ok(ExitCode::from(4)),
                    Some(true) => {}
                }
            }
        }
        Command::Scale { n3dm, shift, out } => {
            let (art, _) = reduce(&parse_n3dm(&read(&n3dm)?)?, shift)?;
            let (scaled, factor) = scale_to_integers(&art)?;
            eprintln!("scale factor {factor}");
            emit(&serialize_instance(&scaled), out.as_deref())?;
        }
        Command::EmbedGrid { instance } => {
            let inst = parse_instance(&read(&instance)?)?;
            let grid = embed_grid(&inst)?;
            let bfs = grid.robot_distances();
            let m = build_distance_matrix(&inst)?;
            let matches =
                (0..inst.len()).all(|i| (0..inst.len()).all(|j| Rational::from(bfs[i][j] as i64) == m.get(i, j)));
            emit(
                &to_pretty(&json!({
                    "width": grid.width,
                    "height": grid.height,
                    "origin": [grid.origin.0.to_string(), grid.origin.1.to_string()],
                    "cells": grid.cells,
                    "bfs_matches_l1": matches,
                })),
                None,
            )?;
        }
        Command::Perturb { instance, rho, out } => {
            let inst = parse_instance(&read(&instance)?)?;
            emit(&serialize_instance(&perturb_unique(&inst, rho)?), out.as_deref())?;
        }
        Command::Render {
            instance,
            schedule,
            meta,
            out,
        } => {
            let inst = parse_instance(&read(&instance)?)?;
            let tree = match &schedule {
                Some(path) => Some(parse_schedule(&read(path)?, &inst)?),
                None => None,
            };
            let meta = match &meta {
                Some(path) => Some(parse_meta(&read(path)?)?),
                None => None,
            };
            if let Some(m) = &meta {
                if m.groups.len() != inst.len() {
                    bail!(
                        "metadata describes {} robots, instance has {}",
                        m.groups.len(),
                        inst.len()
                    );
                }
            }
            let svg = render_svg(&inst, tree.as_ref(), meta.as_ref().map(|m| &m.groups))?;
            fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
