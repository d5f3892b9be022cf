use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use thermal_comfort::aggregate::{Aggregate, StepFunction};
use thermal_comfort::format::sig6;
use thermal_comfort::policy::{self, write_sweep_csv};
use thermal_comfort::scenario::{load_config, OutputFormat, ScenarioConfig};
use thermal_comfort::thermal::{run_scheduled, ToleranceSchedule};
use thermal_comfort::{solve_band, worst_case_discomfort, Occupant};

#[derive(Parser, Debug)]
#[command(
    name = "thermal-comfort",
    version,
    about = "Occupant-feedback thermal comfort control"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file. Defaults to stdout, or `<output.dir>/<command>.<ext>`
    /// when the config sets an output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the simulation seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Common tolerance applied to every occupant.
    #[arg(long, global = true)]
    delta: Option<f64>,

    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Solve the comfort band and print `t_min t_max`.
    Band,
    /// Signed and absolute discomfort per occupant over a temperature grid.
    Curves,
    /// Staircases of the summed signal h and the unhappy count g.
    Signals,
    /// Band and discomfort for a common tolerance swept over a grid.
    Sweep,
    /// Closed-loop simulation over the configured outdoor profile.
    Simulate,
    /// Energy-optimal setpoint versus outdoor temperature.
    Setpoint,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Band => "band",
            Command::Curves => "curves",
            Command::Signals => "signals",
            Command::Sweep => "sweep",
            Command::Simulate => "simulate",
            Command::Setpoint => "setpoint",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    config: ScenarioConfig,
    format: OutputFormat,
    seed: u64,
}

impl Ctx<'_> {
    fn occupants(&self) -> Result<Vec<Occupant>> {
        Ok(match self.cli.delta {
            Some(d) => self.config.occupants_with_tolerance(d)?,
            None => self.config.occupants()?,
        })
    }

    /// Audit line recorded at the top of every CSV artifact.
    fn comment(&self, extra: &[(&str, String)]) -> String {
        let occ = self.config.occupants().unwrap_or_default();
        let list =
            |f: fn(&Occupant) -> f64| occ.iter().map(|o| sig6(f(o))).collect::<Vec<_>>().join(";");
        let mut parts = vec![
            format!("command={}", self.cli.command.name()),
            format!("seed={}", self.seed),
            format!("ideal_temp={}", list(Occupant::ideal_temp)),
            format!("sensitivity={}", list(Occupant::sensitivity)),
            format!("tolerance={}", list(Occupant::tolerance)),
            format!("mu={}", sig6(self.config.power.mu)),
        ];
        if let Some(d) = self.cli.delta {
            parts.push(format!("delta={}", sig6(d)));
        }
        parts.extend(extra.iter().map(|(k, v)| format!("{k}={v}")));
        format!("# {}\n", parts.join(" "))
    }

    fn destination(&self) -> Option<PathBuf> {
        if let Some(out) = &self.cli.out {
            return Some(out.clone());
        }
        self.config.output.dir.as_ref().map(|dir| {
            let ext = match self.format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            };
            dir.join(format!("{}.{ext}", self.cli.command.name()))
        })
    }

    fn emit(&self, bytes: &[u8]) -> Result<()> {
        match self.destination() {
            Some(path) => write_file(&path, bytes),
            None => {
                std::io::stdout()
                    .write_all(bytes)
                    .context("writing to stdout")?;
                Ok(())
            }
        }
    }

    fn emit_json<T: Serialize>(&self, extra: &[(&str, String)], rows: T) -> Result<()> {
        let meta: serde_json::Map<_, _> = self
            .comment(extra)
            .trim_start_matches("# ")
            .split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        let mut text = serde_json::to_string_pretty(&json!({ "meta": meta, "data": rows }))?;
        text.push('\n');
        self.emit(text.as_bytes())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating directory {}", parent.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: &Cli) -> Result<()> {
    let path = cli.config.as_ref().context("--config PATH is required")?;
    let config = load_config(path)?;
    let format = cli.format.unwrap_or(config.output.format);
    let seed = cli
        .seed
        .or(config.simulation.as_ref().map(|s| s.seed))
        .unwrap_or_default();
    let ctx = Ctx {
        cli,
        config,
        format,
        seed,
    };
    match cli.command {
        Command::Band => band(&ctx),
        Command::Curves => curves(&ctx),
        Command::Signals => signals(&ctx),
        Command::Sweep => sweep(&ctx),
        Command::Simulate => simulate(&ctx),
        Command::Setpoint => setpoint(&ctx),
    }
}

fn band(ctx: &Ctx) -> Result<()> {
    let occ = ctx.occupants()?;
    let band = solve_band(&occ)?;
    let worst = worst_case_discomfort(&occ, &band)?;
    println!("{} {}", sig6(band.t_min), sig6(band.t_max));
    if ctx.destination().is_none() {
        return Ok(());
    }
    match ctx.format {
        OutputFormat::Csv => {
            let mut out = ctx.comment(&[]);
            out.push_str("t_min,t_max,exact_zero,residual,worst_case\n");
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                sig6(band.t_min),
                sig6(band.t_max),
                band.exact_zero,
                band.residual,
                sig6(worst)
            ));
            ctx.emit(out.as_bytes())
        }
        OutputFormat::Json => ctx.emit_json(&[], json!({ "band": band, "worst_case": worst })),
    }
}

/// `lo + i·step` up to and including `hi`.
fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

fn curves(ctx: &Ctx) -> Result<()> {
    let occ = ctx.occupants()?;
    let lo = occ
        .iter()
        .map(Occupant::ideal_temp)
        .fold(f64::MAX, f64::min);
    let hi = occ
        .iter()
        .map(Occupant::ideal_temp)
        .fold(f64::MIN, f64::max);
    let temps = grid((lo - 8.0).floor(), (hi + 8.0).ceil(), 0.05);

    #[derive(Serialize)]
    struct Row {
        t_room: f64,
        signed: Vec<f64>,
        absolute: Vec<f64>,
    }
    let rows = temps
        .iter()
        .map(|&t| {
            Ok(Row {
                t_room: t,
                signed: occ
                    .iter()
                    .map(|o| o.signed_discomfort(t))
                    .collect::<thermal_comfort::Result<_>>()?,
                absolute: occ
                    .iter()
                    .map(|o| o.abs_discomfort(t))
                    .collect::<thermal_comfort::Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    match ctx.format {
        OutputFormat::Json => ctx.emit_json(&[], rows),
        OutputFormat::Csv => {
            let mut out = ctx.comment(&[]);
            out.push_str("t_room");
            for i in 1..=occ.len() {
                out.push_str(&format!(",sd_{i}"));
            }
            for i in 1..=occ.len() {
                out.push_str(&format!(",f_{i}"));
            }
            out.push('\n');
            for r in &rows {
                out.push_str(&sig6(r.t_room));
                for v in r.signed.iter().chain(&r.absolute) {
                    out.push(',');
                    out.push_str(&sig6(*v));
                }
                out.push('\n');
            }
            ctx.emit(out.as_bytes())
        }
    }
}

fn signals(ctx: &Ctx) -> Result<()> {
    let occ = ctx.occupants()?;
    let h = StepFunction::build(&occ, Aggregate::Signed)?;
    let g = StepFunction::build(&occ, Aggregate::Absolute)?;

    #[derive(Serialize)]
    struct Row {
        segment_start: f64,
        segment_end: f64,
        h: i32,
        g: i32,
    }
    // h and g share breakpoints, so their segments line up one to one.
    let rows: Vec<Row> = h
        .segments()
        .iter()
        .zip(g.segments())
        .map(|(a, b)| Row {
            segment_start: a.start,
            segment_end: a.end,
            h: a.value,
            g: b.value,
        })
        .collect();

    match ctx.format {
        OutputFormat::Json => {
            // JSON has no infinities; tails become null.
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    let finite = |x: f64| x.is_finite().then_some(x);
                    json!({
                        "segment_start": finite(r.segment_start),
                        "segment_end": finite(r.segment_end),
                        "h": r.h,
                        "g": r.g,
                    })
                })
                .collect();
            ctx.emit_json(&[], rows)
        }
        OutputFormat::Csv => {
            let mut out = ctx.comment(&[]);
            out.push_str("segment_start,segment_end,h,g\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    sig6(r.segment_start),
                    sig6(r.segment_end),
                    r.h,
                    r.g
                ));
            }
            ctx.emit(out.as_bytes())
        }
    }
}

fn sweep(ctx: &Ctx) -> Result<()> {
    let occ = ctx.config.occupants()?;
    let s = ctx.config.sweep.context("config has no [sweep] section")?;
    let rows = policy::tolerance_sweep(&occ, s.delta_min, s.delta_max, s.step)?;
    let extra = [
        ("delta_min", sig6(s.delta_min)),
        ("delta_max", sig6(s.delta_max)),
        ("step", sig6(s.step)),
    ];
    match ctx.format {
        OutputFormat::Json => ctx.emit_json(&extra, &rows),
        OutputFormat::Csv => {
            let mut out = ctx.comment(&extra).into_bytes();
            write_sweep_csv(&rows, &mut out)?;
            ctx.emit(&out)
        }
    }
}

fn simulate(ctx: &Ctx) -> Result<()> {
    let sim = ctx
        .config
        .simulation
        .clone()
        .context("config has no [simulation] section")?;
    let occ = ctx.occupants()?;
    let schedule = if ctx.cli.delta.is_some() {
        ToleranceSchedule::default()
    } else {
        sim.schedule()?
    };
    let profile = thermal_comfort::OutdoorProfile {
        seed: ctx.seed,
        ..sim.profile()
    };
    let trace = run_scheduled(
        &occ,
        &schedule,
        &profile,
        &sim.thermal,
        sim.initial_room_temp,
    )?;

    let p = &sim.thermal;
    let segments = schedule
        .segments()
        .iter()
        .map(|s| {
            format!(
                "{}-{}:{}",
                sig6(s.start_day),
                sig6(s.end_day),
                sig6(s.delta)
            )
        })
        .collect::<Vec<_>>()
        .join(";");
    let mut extra = vec![
        ("days", profile.days.to_string()),
        (
            "daily_min_range",
            format!(
                "{};{}",
                sig6(profile.daily_min_range[0]),
                sig6(profile.daily_min_range[1])
            ),
        ),
        (
            "daily_max_range",
            format!(
                "{};{}",
                sig6(profile.daily_max_range[0]),
                sig6(profile.daily_max_range[1])
            ),
        ),
        ("c", sig6(p.heat_exchange)),
        ("k", sig6(p.control_gain)),
        ("dt", sig6(p.dt)),
        (
            "control_sign",
            format!("{:?}", p.control_sign).to_lowercase(),
        ),
        ("hysteresis", sig6(p.hysteresis)),
    ];
    if !segments.is_empty() {
        extra.push(("segments", segments));
    }

    match ctx.format {
        OutputFormat::Json => ctx.emit_json(&extra, &trace),
        OutputFormat::Csv => {
            let mut out = ctx.comment(&extra).into_bytes();
            trace.write_csv(&mut out)?;
            ctx.emit(&out)
        }
    }
}

fn setpoint(ctx: &Ctx) -> Result<()> {
    let occ = ctx.occupants()?;
    let band = solve_band(&occ)?;
    let mu = ctx.config.power.mu;
    let outdoor = grid(band.t_min.floor() - 10.0, band.t_max.ceil() + 10.0, 0.1);

    #[derive(Serialize)]
    struct Row {
        t_ext: f64,
        t_set: f64,
        power: f64,
        expected_discomfort: Vec<f64>,
    }
    let rows = outdoor
        .iter()
        .map(|&t| {
            let t_set = policy::setpoint(t, &band)?;
            Ok(Row {
                t_ext: t,
                t_set,
                power: policy::power(t, t_set, mu)?,
                expected_discomfort: occ
                    .iter()
                    .map(|o| policy::expected_abs_discomfort(o, t, &band))
                    .collect::<thermal_comfort::Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let extra = [("t_min", sig6(band.t_min)), ("t_max", sig6(band.t_max))];
    match ctx.format {
        OutputFormat::Json => ctx.emit_json(&extra, rows),
        OutputFormat::Csv => {
            let mut out = ctx.comment(&extra);
            out.push_str("t_ext,t_set,power");
            for i in 1..=occ.len() {
                out.push_str(&format!(",fhat_{i}"));
            }
            out.push('\n');
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{}",
                    sig6(r.t_ext),
                    sig6(r.t_set),
                    sig6(r.power)
                ));
                for v in &r.expected_discomfort {
                    out.push(',');
                    out.push_str(&sig6(*v));
                }
                out.push('\n');
            }
            ctx.emit(out.as_bytes())
        }
    }
}
