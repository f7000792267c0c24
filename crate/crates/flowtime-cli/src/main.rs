use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flowtime::bounds::horizon_bounds;
use flowtime::construction::{solve, SolverConfig, Step2Strategy};
use flowtime::expand::TimeExpandedNetwork;
use flowtime::gen::{emit_generated, generate, GenParams};
use flowtime::io::{flow_from_entries, parse_instance, Certificates, Instance, ResultFile};
use flowtime::oracle::{oracle_mcmf_ten, verify, DEFAULT_ORACLE_ARC_CAP};

/// Minimum-cost maximum flows over time.
#[derive(Parser)]
#[command(name = "flowtime", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write the result file (stdout by default).
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "exact")]
        step2: Step2Strategy,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest normalized node count for the exact boundary-phase search.
        #[arg(long)]
        max_exact_nodes: Option<usize>,
    },
    /// Minimum-cost maximum flow computed directly on the time-expanded network.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_ARC_CAP)]
        arc_cap: usize,
    },
    /// Re-check a result file against its instance.
    Verify {
        file: PathBuf,
        result: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_ARC_CAP)]
        arc_cap: usize,
    },
    /// Print the horizon bounds of an instance.
    Threshold { file: PathBuf },
    /// Print the size of the time-expanded network.
    Expand { file: PathBuf },
    /// Emit a random instance.
    Gen {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        arcs: usize,
        #[arg(long, default_value_t = 3)]
        max_u: i64,
        #[arg(long, default_value_t = 5)]
        max_c: i64,
        #[arg(long, default_value_t = 2)]
        max_tau: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        theta: usize,
        /// Do not force an s-t path.
        #[arg(long)]
        no_backbone: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// Bad input or usage; exit status 2.
    Usage(String),
    /// A certificate did not hold; exit status 1.
    Certificate(String),
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            file,
            step2,
            out,
            max_exact_nodes,
        } => {
            let inst = read_instance(&file)?;
            let mut config = SolverConfig {
                step2,
                ..SolverConfig::default()
            };
            if let Some(n) = max_exact_nodes {
                config.max_exact_nodes = n;
            }
            let solved = solve(&inst.normalized(), inst.theta, &config).map_err(|e| Failure::Certificate(e.to_string()))?;
            let report =
                verify(&solved.ten, &solved.flow, DEFAULT_ORACLE_ARC_CAP).map_err(|e| Failure::Certificate(e.to_string()))?;
            let result = ResultFile::from_solution(&inst, &solved, &report);
            write_output(out.as_deref(), &(result.to_json() + "\n"))?;
            eprintln!("value {} cost {}", result.value, result.cost);
            if !report.all_ok() {
                return Err(Failure::Certificate(format!("{:?}", result.certificates)));
            }
        }
        Command::Oracle { file, arc_cap } => {
            let inst = read_instance(&file)?;
            let sol = oracle_mcmf_ten(&inst.normalized(), inst.theta, arc_cap).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("value {}", sol.value);
            println!("cost {}", sol.cost);
        }
        Command::Verify { file, result, arc_cap } => {
            let inst = read_instance(&file)?;
            let text = fs::read_to_string(&result).map_err(|e| Failure::Usage(format!("{}: {e}", result.display())))?;
            let res = ResultFile::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", result.display())))?;
            if res.instance_digest != inst.digest() || res.theta != inst.theta {
                return Err(Failure::Certificate("result file belongs to a different instance".into()));
            }
            let ten = TimeExpandedNetwork::build(&inst.normalized(), inst.theta).map_err(|e| Failure::Usage(e.to_string()))?;
            let f = flow_from_entries(&ten, &res.flows).map_err(|e| Failure::Usage(e.to_string()))?;
            let report = verify(&ten, &f, arc_cap).map_err(|e| Failure::Certificate(e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            if report.value != res.value || report.cost != res.cost {
                return Err(Failure::Certificate("value or cost differs from the result file".into()));
            }
            if Certificates::from_report(&report) != res.certificates {
                return Err(Failure::Certificate("certificate flags differ from the result file".into()));
            }
            if !report.all_ok() {
                return Err(Failure::Certificate("verification failed".into()));
            }
        }
        Command::Threshold { file } => {
            let inst = read_instance(&file)?;
            let b = horizon_bounds(&inst.normalized().network).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("nodes = {}", b.node_count);
            println!("sum_tau = {}", b.sum_transit);
            println!("sum_cu = {}", b.sum_cost_capacity);
            println!("h = {}", b.h);
            println!("theta1_j2 = {}", b.theta1_j2);
            println!("J(theta1_j2) = {}", b.j_theta1);
            println!("J(theta1_j2 + J(theta1_j2)) = {}", b.j_shifted);
            println!("theta_threshold = {}", b.theta_threshold);
            match b.guaranteed_length(inst.theta) {
                Ok(len) => println!("guaranteed_length(theta={}) = {len}", inst.theta),
                Err(e) => return Err(Failure::Usage(e.to_string())),
            }
        }
        Command::Expand { file } => {
            let inst = read_instance(&file)?;
            let norm = inst.normalized();
            let ten = TimeExpandedNetwork::build(&norm, inst.theta).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("theta = {}", inst.theta);
            println!("base nodes = {} (original {})", norm.network.node_count(), norm.original_node_count);
            println!("base arcs = {} (original {})", norm.network.arc_count(), norm.original_arc_count);
            println!("ten nodes = {}", ten.network().node_count());
            println!("ten arcs = {}", ten.network().arc_count());
        }
        Command::Gen {
            nodes,
            arcs,
            max_u,
            max_c,
            max_tau,
            seed,
            theta,
            no_backbone,
            out,
        } => {
            let params = GenParams {
                nodes,
                arcs,
                max_u,
                max_c,
                max_tau,
                seed,
                theta,
                backbone: !no_backbone,
            };
            let inst = generate(&params).map_err(|e| Failure::Usage(e.to_string()))?;
            write_output(out.as_deref(), &emit_generated(&params, &inst))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Certificate(msg)) => {
            eprintln!("certificate failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
