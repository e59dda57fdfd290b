use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use schelling::dynamics::Simulation;
use schelling::geometry::TorusGrid;
use schelling::harness::{
    preset, run_experiment, Execution, ExperimentSpec, OutcomeRecord, SweepResult,
};
use schelling::io::config::{OutputFormat, OutputSection, RunConfigFile};
use schelling::io::{csv, svg, write_atomic};
use schelling::population::FriendshipGraph;
use schelling::utility::UtilityParams;
use schelling::{Error, Result};

const OUT_DIR_ENV: &str = "SCHELLING_OUT_DIR";

/// Schelling segregation on a torus with friendship networks and moving costs.
#[derive(Debug, Parser)]
#[command(name = "schelling", version)]
struct Cli {
    /// Log progress and defaulted config keys.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output directory (falls back to the config, then $SCHELLING_OUT_DIR, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Run replicates on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and write its outcome and snapshots.
    Run {
        config: PathBuf,
        /// Also write the per-step move trace.
        #[arg(long)]
        trace: bool,
        /// Replicate index whose seeds are used.
        #[arg(long, default_value_t = 1)]
        replicate: usize,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the sweep described by a config file.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a named preset.
    Replicate {
        preset: String,
        /// Override the number of replicates H.
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long)]
        base_seed: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Turn a sweep CSV, or an agents/edges snapshot, into SVG.
    Render {
        /// Sweep summary CSV.
        #[arg(required_unless_present = "snapshot", conflicts_with = "snapshot")]
        csv: Option<PathBuf>,
        /// Agents file (agent_id,color,row,col) to draw as a grid.
        #[arg(long, requires = "n")]
        snapshot: Option<PathBuf>,
        /// Edge list (a,b) drawn over the snapshot.
        #[arg(long, requires = "snapshot")]
        edges: Option<PathBuf>,
        /// Grid side of the snapshot.
        #[arg(long)]
        n: Option<usize>,
        /// Chart title; defaults to the input file stem.
        #[arg(long)]
        title: Option<String>,
        /// Output file; defaults to the input path with an .svg extension.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            trace,
            replicate,
            out,
        } => {
            let (file, spec) = load_config(&config)?;
            let dir = output_dir(out, &file.output)?.join(&spec.name);
            run_single(&spec, replicate, trace, &dir)
        }
        Command::Sweep { config, out } => {
            let (file, spec) = load_config(&config)?;
            if spec.sweep.is_none() {
                return Err(Error::Config(format!(
                    "{}: no [sweep] section; use `run` for a single simulation",
                    config.display()
                )));
            }
            let dir = output_dir(out.out, &file.output)?.join(&spec.name);
            run_sweep(&spec, execution(out.serial), &dir, &file.output)
        }
        Command::Replicate {
            preset: name,
            replicates,
            base_seed,
            out,
        } => {
            let mut spec = preset(&name)?;
            if let Some(h) = replicates {
                spec.replicates = h;
            }
            if let Some(seed) = base_seed {
                spec.base_seed = seed;
            }
            let dir = output_dir(out.out, &OutputSection::default())?.join(&spec.name);
            run_sweep(
                &spec,
                execution(out.serial),
                &dir,
                &OutputSection::default(),
            )
        }
        Command::Render {
            csv,
            snapshot,
            edges,
            n,
            title,
            output,
        } => match (csv, snapshot) {
            (Some(path), _) => render_chart(&path, title, output),
            (None, Some(agents)) => {
                render_snapshot(&agents, edges.as_deref(), n.unwrap_or(0), output)
            }
            (None, None) => Err(Error::Config(
                "render needs a CSV file or --snapshot".into(),
            )),
        },
    }
}

fn execution(serial: bool) -> Execution {
    if serial {
        Execution::Serial
    } else {
        Execution::Parallel
    }
}

fn load_config(path: &Path) -> Result<(RunConfigFile, ExperimentSpec)> {
    let file = RunConfigFile::load(path)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("run")
        .to_string();
    let spec = file
        .to_spec(&stem)
        .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip_prefix(&e))))?;
    Ok((file, spec))
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(msg) => msg.clone(),
        other => other.to_string(),
    }
}

/// CLI flag, then config file, then environment, then `./out`.
fn output_dir(flag: Option<PathBuf>, section: &OutputSection) -> Result<PathBuf> {
    let dir = flag
        .or_else(|| section.directory.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    Ok(dir)
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    write_atomic(path, bytes)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn run_sweep(
    spec: &ExperimentSpec,
    execution: Execution,
    dir: &Path,
    output: &OutputSection,
) -> Result<()> {
    info!(
        "{}: {} points x {} replicates",
        spec.name,
        spec.effective_sweep().values.len(),
        spec.replicates
    );
    let result = run_experiment(spec, execution)?;
    let sweep_csv = csv::write_sweep(&result)?;
    if output.wants(OutputFormat::Csv) {
        write(&dir.join("sweep.csv"), &sweep_csv)?;
        write(&dir.join("runs.csv"), &csv::write_runs(&result)?)?;
    }
    if output.wants(OutputFormat::Svg) {
        let chart = svg::render_sweep_chart(
            &csv::sweep_rows(&result),
            &chart_title(&result),
            result.axis.as_str(),
        )?;
        write(&dir.join("sweep.svg"), chart.as_bytes())?;
    }
    print_summary(&result);
    Ok(())
}

fn chart_title(result: &SweepResult) -> String {
    format!("{}: outcomes against {}", result.name, result.axis)
}

fn print_summary(result: &SweepResult) {
    println!(
        "{:>10} {:>10} {:>8} {:>7} {:>7} {:>7} {:>9}",
        result.axis.as_str(),
        "iterations",
        "movers",
        "fsi",
        "moran",
        "geary",
        "avg_welf"
    );
    for p in &result.points {
        let m = &p.mean;
        println!(
            "{:>10.4} {:>10.2} {:>8.2} {:>7.3} {:>7.3} {:>7.3} {:>9.4}",
            p.value,
            m.iterations(),
            m.movers(),
            m.fsi(),
            m.moran(),
            m.geary(),
            m.avg_welfare()
        );
    }
}

fn run_single(spec: &ExperimentSpec, replicate: usize, trace: bool, dir: &Path) -> Result<()> {
    if replicate == 0 {
        return Err(Error::Config("--replicate counts from 1".into()));
    }
    let point = spec.points()?.remove(0);
    let (initial, graph) = spec.replicate_inputs(&point, replicate)?;
    let mut sim = Simulation::new(
        initial.clone(),
        &graph,
        point.params,
        spec.run_seed(replicate),
    )?;
    if trace {
        sim = sim.with_trace();
    }
    let outcome = sim.run_to_end(spec.max_iter)?;
    let record = OutcomeRecord::from_run(replicate, &outcome, &graph, &point.params)?;

    let result = SweepResult {
        name: spec.name.clone(),
        axis: spec.effective_sweep().axis,
        points: vec![schelling::harness::SweepPoint {
            value: point.value,
            k: point.k,
            params: point.params,
            records: vec![record],
            mean: schelling::harness::OutcomeSummary(record.values()),
            sd: schelling::harness::OutcomeSummary([0.0; schelling::harness::NUM_OUTCOMES]),
        }],
    };
    write(&dir.join("run.csv"), &csv::write_runs(&result)?)?;
    if trace {
        write(&dir.join("trace.csv"), &csv::write_trace(&outcome.trace)?)?;
    }
    write(&dir.join("edges.csv"), &csv::write_edges(&graph)?)?;
    for (tag, config) in [("initial", &initial), ("final", &outcome.state.config)] {
        write(
            &dir.join(format!("agents_{tag}.csv")),
            &csv::write_agents(config)?,
        )?;
        let picture = svg::render_grid_snapshot(config, &graph, Some(&point.params));
        write(&dir.join(format!("grid_{tag}.svg")), picture.as_bytes())?;
    }
    println!(
        "stop={} iterations={} movers={} fsi={} moran={} geary={} total_welfare={}",
        record.stop_reason,
        record.iterations,
        record.movers,
        record.fsi,
        record.moran,
        record.geary,
        record.total_welfare
    );
    Ok(())
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn in_file(path: &Path, e: Error) -> Error {
    Error::Config(format!("{}: {}", path.display(), strip_prefix(&e)))
}

fn render_chart(path: &Path, title: Option<String>, output: Option<PathBuf>) -> Result<()> {
    let rows = csv::read_sweep(&read_file(path)?).map_err(|e| in_file(path, e))?;
    let title = title.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let chart =
        svg::render_sweep_chart(&rows, &title, "sweep value").map_err(|e| in_file(path, e))?;
    write(
        &output.unwrap_or_else(|| path.with_extension("svg")),
        chart.as_bytes(),
    )
}

fn render_snapshot(
    agents: &Path,
    edges: Option<&Path>,
    n: usize,
    output: Option<PathBuf>,
) -> Result<()> {
    let grid =
        TorusGrid::new(n).map_err(|e| Error::Config(format!("--n: {}", strip_prefix(&e))))?;
    let config = csv::read_agents(&read_file(agents)?, grid).map_err(|e| in_file(agents, e))?;
    let graph = match edges {
        Some(path) => {
            csv::read_edges(&read_file(path)?, config.num_agents()).map_err(|e| in_file(path, e))?
        }
        None => FriendshipGraph::empty(config.num_agents()),
    };
    let picture = svg::render_grid_snapshot(&config, &graph, None::<&UtilityParams>);
    write(
        &output.unwrap_or_else(|| agents.with_extension("svg")),
        picture.as_bytes(),
    )
}
