mod output;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use perp_core::gtds::Metric;
use perp_core::io::{load_instance, read_json, Instance, RequestRecord, StreamFile};
use perp_core::ledger::BeyondWindow;
use perp_core::oracle::{check_case, random_case, Verdict};
use perp_core::planner::{
    OraclePredictor, PerturbedPredictor, PlanContext, PlannerOptions, PlannerRegistry, Predictor,
};
use perp_core::search::{ocp, Lcb, RoutingRequest, SearchConfig};
use perp_core::sim::{
    generate_stream, grid_instance, run_simulation, run_sweep, write_sweep_csv, GridSpec, SimParams, StreamConfig,
    SweepConfig, TripModel, TripSampler, VehicleModel,
};
use perp_core::{Minutes, Trt};
use serde_json::json;

#[derive(Parser)]
#[command(name = "perp", version, about = "Reservation-aware EV charging path planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one request and print the chosen path as JSON.
    Plan(PlanArgs),
    /// Plan a request stream online, committing reservations as it goes.
    Simulate(SimulateArgs),
    /// Write a request stream.
    Generate(GenerateArgs),
    /// Write a synthetic grid instance.
    Instance(InstanceArgs),
    /// Compare the search with the brute force on random small cases.
    Verify(VerifyArgs),
    /// Vary one parameter at a time and tabulate averages.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Optimistic,
    Pessimistic,
}

impl From<Policy> for BeyondWindow {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Optimistic => BeyondWindow::Optimistic,
            Policy::Pessimistic => BeyondWindow::Pessimistic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Sds,
    Poisson,
}

/// Table and search settings shared by `plan` and `simulate`.
#[derive(Args)]
struct TableArgs {
    /// Slot length in minutes.
    #[arg(long, default_value_t = 5)]
    slot_min: Minutes,
    /// Window length in slots (default: two days).
    #[arg(long)]
    window: Option<i64>,
    /// Charge levels in percent of the battery; must include 100.
    #[arg(long, default_value = "50,75,100")]
    lcb: Lcb,
    /// Minutes added to every charging stop.
    #[arg(long, default_value_t = 5)]
    overhead: Minutes,
    /// How slots past the window end are treated.
    #[arg(long, value_enum, default_value_t = Policy::Optimistic)]
    beyond_window: Policy,
    /// Planning mode.
    #[arg(long, default_value = "ocp")]
    mode: String,
    /// Number of future requests scored by the proactive mode.
    #[arg(long, default_value_t = 25)]
    lookahead: usize,
    /// Slack in minutes when enumerating future paths.
    #[arg(long, default_value_t = 10)]
    epsilon: Minutes,
    /// `oracle` or `perturbed:<accuracy percent>`.
    #[arg(long, default_value = "oracle")]
    predictor: String,
    /// Seed for perturbed prediction.
    #[arg(long, default_value_t = 0)]
    predictor_seed: u64,
}

impl TableArgs {
    fn params(&self, timing: bool) -> SimParams {
        SimParams {
            slot_minutes: self.slot_min,
            window_slots: self.window,
            lcb: self.lcb.clone(),
            search: SearchConfig { overhead: self.overhead, ..SearchConfig::default() },
            beyond_window: self.beyond_window.into(),
            timing,
        }
    }

    fn options(&self) -> PlannerOptions {
        PlannerOptions { lookahead: self.lookahead, epsilon: self.epsilon }
    }

    /// The instance's reservations, or those of a table CSV instead.
    fn trt(&self, inst: &Instance, table: Option<&Path>) -> Result<Trt> {
        let params = self.params(false);
        let Some(path) = table else {
            return Ok(inst.trt(params.slot_minutes, params.window_len())?.with_policy(params.beyond_window));
        };
        let mut trt = params.fresh_trt(&inst.gtds)?;
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        trt.read_csv(&inst.gtds, file).with_context(|| format!("loading {}", path.display()))?;
        Ok(trt)
    }

    fn predictor(&self, inst: &Instance, stream: Vec<RoutingRequest>) -> Result<Box<dyn Predictor>> {
        if self.predictor == "oracle" {
            return Ok(Box::new(OraclePredictor::new(stream)));
        }
        let Some(acc) = self.predictor.strip_prefix("perturbed:") else {
            bail!("unknown predictor `{}` (expected `oracle` or `perturbed:<accuracy>`)", self.predictor);
        };
        let acc: u32 = acc.parse().with_context(|| format!("bad accuracy `{acc}`"))?;
        let sampler = TripSampler::new(&inst.gtds, metric(inst), TripModel::Uniform, VehicleModel::default())?;
        Ok(Box::new(PerturbedPredictor::new(stream, acc, self.predictor_seed, sampler.resampler())?))
    }
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Request JSON.
    #[arg(long)]
    request: PathBuf,
    /// Reservation table CSV, replacing the instance's reservations.
    #[arg(long)]
    trt: Option<PathBuf>,
    /// Shorthand for `--mode ocp-po`.
    #[arg(long)]
    proactive: bool,
    /// Stream JSON of the requests expected after this one.
    #[arg(long)]
    future: Option<PathBuf>,
    /// Include the forward routing table in the output.
    #[arg(long)]
    emit_table: bool,
    /// Write the forward routing table as CSV.
    #[arg(long)]
    table_csv: Option<PathBuf>,
    /// Include every candidate path and the influence report.
    #[arg(long)]
    explain: bool,
    /// Write the table with the chosen path reserved.
    #[arg(long)]
    commit_out: Option<PathBuf>,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Args)]
struct StreamSource {
    /// Stream JSON.
    #[arg(long, conflicts_with = "preset")]
    stream: Option<PathBuf>,
    /// Built-in stream instead of a file.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Stream configuration JSON.
    #[arg(long, conflicts_with_all = ["stream", "preset"])]
    stream_config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep at most this many requests.
    #[arg(long)]
    count: Option<usize>,
}

impl StreamSource {
    fn load(&self, inst: &Instance) -> Result<Vec<RoutingRequest>> {
        let mut reqs = if let Some(path) = &self.stream {
            read_json::<StreamFile>(path)?.to_requests(&inst.gtds)?
        } else {
            let cfg = match (&self.stream_config, self.preset) {
                (Some(path), _) => StreamConfig { seed: self.seed, ..read_json::<StreamConfig>(path)? },
                (None, Some(Preset::Sds)) => StreamConfig::sds(self.seed),
                (None, Some(Preset::Poisson)) => StreamConfig::poisson(self.seed),
                (None, None) => bail!("give --stream, --preset or --stream-config"),
            };
            generate_stream(&inst.gtds, metric(inst), &cfg)?
        };
        if let Some(n) = self.count {
            reqs.truncate(n);
        }
        Ok(reqs)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    source: StreamSource,
    #[command(flatten)]
    table: TableArgs,
    /// Per-request metrics CSV.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Final reservation table CSV.
    #[arg(long)]
    trt_out: Option<PathBuf>,
    /// Wall-clock timing of each planning call.
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    timing: OnOff,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    source: StreamSource,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArgs {
    /// Grid specification JSON; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    width_km: Option<f64>,
    #[arg(long)]
    height_km: Option<f64>,
    #[arg(long)]
    station_spacing_km: Option<f64>,
    #[arg(long)]
    landmark_spacing_km: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Half-open seed range `A..B`.
    #[arg(long, default_value = "0..200")]
    seed_range: String,
    /// Directory for counterexample JSON files.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Sweep configuration JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated modes, overriding the configuration.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<String>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn metric(inst: &Instance) -> Metric {
    inst.metric
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn plan(args: &PlanArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let req = read_json::<RequestRecord>(&args.request)?.to_request(&inst.gtds)?;
    let t = &args.table;
    let mut trt = t.trt(&inst, args.trt.as_deref())?;
    let slot = trt.slot_of(req.depart);
    if slot > trt.window_start() {
        trt.advance_window(slot)?;
    }
    let mode = if args.proactive { "ocp-po" } else { t.mode.as_str() };
    let planner = PlannerRegistry::standard().create(mode, &t.options())?;
    let params = t.params(false);

    let mut stream = vec![req.clone()];
    if let Some(path) = &args.future {
        stream.extend(read_json::<StreamFile>(path)?.to_requests(&inst.gtds)?);
    }
    let mut predictor = match &args.future {
        Some(_) => Some(t.predictor(&inst, stream)?),
        None => None,
    };
    let ctx = PlanContext { gtds: &inst.gtds, trt: &trt, lcb: &params.lcb, search: &params.search };
    let result = planner.plan(&ctx, &req, predictor.as_mut().map(|p| &mut **p as &mut dyn Predictor))?;
    let mut out = output::plan(&inst.gtds, planner.name(), &result, args.explain);

    if args.emit_table || args.table_csv.is_some() {
        let res = ocp(&inst.gtds, &trt, &req, &params.lcb, &params.search)?;
        if args.emit_table {
            out["table"] = output::table(&inst.gtds, &res.table);
        }
        if let Some(path) = &args.table_csv {
            res.table.write_csv(&inst.gtds, writer(Some(path))?)?;
        }
    }
    if let Some(path) = &args.commit_out {
        trt.reserve_all(req.id, &result.path.charging)?;
        trt.write_csv(&inst.gtds, writer(Some(path))?, None)?;
    }
    print_json(&out)
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let stream = args.source.load(&inst)?;
    let t = &args.table;
    let params = t.params(matches!(args.timing, OnOff::On));
    let planner = PlannerRegistry::standard().create(&t.mode, &t.options())?;
    let mut predictor = t.predictor(&inst, stream.clone())?;
    let trt = t.trt(&inst, None)?;
    let outcome = run_simulation(&inst.gtds, trt, &stream, planner.as_ref(), Some(predictor.as_mut()), &params)?;
    outcome.trt.audit().context("reservation table failed its audit")?;
    if let Some(path) = &args.metrics {
        outcome.metrics.write_csv(writer(Some(path))?)?;
    }
    if let Some(path) = &args.trt_out {
        outcome.trt.write_csv(&inst.gtds, writer(Some(path))?, None)?;
    }
    let m = &outcome.metrics;
    print_json(&output::summary(&m.mode, &m.summary(), m.refined_away, m.fallbacks))
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let stream = args.source.load(&inst)?;
    let mut w = writer(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &StreamFile::from_requests(&stream, &inst.gtds))?;
    writeln!(w)?;
    Ok(())
}

fn instance(args: &InstanceArgs) -> Result<()> {
    let mut grid = match &args.config {
        Some(p) => read_json::<GridSpec>(p)?,
        None => GridSpec::default(),
    };
    grid.seed = args.seed.unwrap_or(grid.seed);
    grid.width_km = args.width_km.unwrap_or(grid.width_km);
    grid.height_km = args.height_km.unwrap_or(grid.height_km);
    grid.station_spacing_km = args.station_spacing_km.unwrap_or(grid.station_spacing_km);
    grid.landmark_spacing_km = args.landmark_spacing_km.unwrap_or(grid.landmark_spacing_km);
    let file = grid_instance(&grid)?;
    file.build().context("generated instance does not build")?;
    let mut w = writer(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &file)?;
    writeln!(w)?;
    Ok(())
}

fn parse_range(s: &str) -> Result<std::ops::Range<u64>> {
    let (a, b) = s.split_once("..").with_context(|| format!("expected A..B, got `{s}`"))?;
    let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
    if a > b {
        bail!("empty seed range `{s}`");
    }
    Ok(a..b)
}

fn verify(args: &VerifyArgs) -> Result<bool> {
    let seeds = parse_range(&args.seed_range)?;
    if let Some(dir) = &args.dump {
        fs::create_dir_all(dir)?;
    }
    let (mut feasible, mut failed) = (0usize, 0usize);
    let n = seeds.end - seeds.start;
    for seed in seeds {
        let case = random_case(seed);
        match check_case(&case) {
            Verdict::Agree { t_min, .. } => feasible += t_min.is_some() as usize,
            Verdict::Disagree(why) => {
                failed += 1;
                println!("seed {seed}: {why}");
                if let Some(dir) = &args.dump {
                    let path = dir.join(format!("case_{seed}.json"));
                    let mut w = writer(Some(&path))?;
                    serde_json::to_writer_pretty(&mut w, &case)?;
                    writeln!(w)?;
                }
            }
        }
    }
    print_json(&json!({ "cases": n, "feasible": feasible, "disagreements": failed }))?;
    Ok(failed == 0)
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let mut cfg = match &args.config {
        Some(p) => read_json::<SweepConfig>(p)?,
        None => SweepConfig::default(),
    };
    if let Some(modes) = &args.modes {
        cfg.modes = modes.clone();
    }
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    let rows = run_sweep(&inst.gtds, metric(&inst), &cfg, &PlannerRegistry::standard())?;
    write_sweep_csv(&rows, writer(args.out.as_deref())?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan(a) => plan(a).map(|_| true),
        Command::Simulate(a) => simulate(a).map(|_| true),
        Command::Generate(a) => generate(a).map(|_| true),
        Command::Instance(a) => instance(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => sweep(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
