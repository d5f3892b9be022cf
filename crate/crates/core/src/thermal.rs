//! Closed-loop room temperature simulation.
//!
//! The room relaxes toward the outdoor temperature at rate `c` and the HVAC
//! adds `w = ±k·h`, where `h` is the aggregate occupant signal. Integration
//! is explicit Euler with a fixed step so traces are bit-reproducible. One
//! time unit is one hour.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aggregate::{ensure_occupants, solve_band, ComfortBand};
use crate::comfort::Occupant;
use crate::error::{ensure_finite, Error, Result};
use crate::format::sig6;

pub const HOURS_PER_DAY: f64 = 24.0;

/// Room temperatures beyond this magnitude mean the integration blew up.
pub const DIVERGENCE_LIMIT: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlSign {
    /// `w = +k·h`: heat when occupants report cold.
    #[default]
    Stabilizing,
    /// `w = −k·h`, the literal form of the control law.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalParams {
    pub heat_exchange: f64,
    pub control_gain: f64,
    pub dt: f64,
    pub control_sign: ControlSign,
    /// Extra temperature an active heating/cooling phase keeps going past
    /// the band edge before it releases. 0 disables hysteresis.
    pub hysteresis: f64,
}

impl Default for ThermalParams {
    fn default() -> Self {
        ThermalParams {
            heat_exchange: 0.1,
            control_gain: 1.0,
            dt: 0.1,
            control_sign: ControlSign::Stabilizing,
            hysteresis: 0.0,
        }
    }
}

impl ThermalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.heat_exchange.is_finite() && self.heat_exchange > 0.0) {
            return Err(Error::invalid("heat_exchange", "must be finite and > 0"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", "must be finite and > 0"));
        }
        if !(self.control_gain.is_finite() && self.control_gain >= 0.0) {
            return Err(Error::invalid("control_gain", "must be finite and >= 0"));
        }
        if !(self.hysteresis.is_finite() && self.hysteresis >= 0.0) {
            return Err(Error::invalid("hysteresis", "must be finite and >= 0"));
        }
        if self.heat_exchange * self.dt >= 1.0 {
            return Err(Error::invalid(
                "dt",
                format!(
                    "heat_exchange * dt = {} must be < 1 for a stable explicit step",
                    self.heat_exchange * self.dt
                ),
            ));
        }
        Ok(())
    }

    fn actuation(&self, signal: i32) -> f64 {
        let w = self.control_gain * f64::from(signal);
        match self.control_sign {
            ControlSign::Stabilizing => w,
            ControlSign::AsPrinted => -w,
        }
    }
}

/// HVAC rate (°C per hour) for the current room temperature.
pub fn control_input(
    occupants: &[Occupant],
    room_temp: f64,
    params: &ThermalParams,
) -> Result<f64> {
    params.validate()?;
    let h = crate::aggregate::total_signal(occupants, room_temp)?;
    Ok(params.actuation(h))
}

/// One explicit Euler step of `dT/dt = −c·(T − T_ext) + w`.
pub fn step(room_temp: f64, outdoor_temp: f64, w: f64, params: &ThermalParams) -> f64 {
    room_temp + params.dt * (-params.heat_exchange * (room_temp - outdoor_temp) + w)
}

/// Seeded multi-day outdoor weather.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutdoorProfile {
    pub seed: u64,
    pub days: u32,
    pub daily_min_range: [f64; 2],
    pub daily_max_range: [f64; 2],
    pub samples_per_day: u32,
}

impl Default for OutdoorProfile {
    fn default() -> Self {
        OutdoorProfile {
            seed: 0,
            days: 7,
            daily_min_range: [9.0, 13.0],
            daily_max_range: [20.0, 25.0],
            samples_per_day: 240,
        }
    }
}

const TROUGH_HOUR: f64 = 5.0;
const PEAK_HOUR: f64 = 15.0;

impl OutdoorProfile {
    pub fn validate(&self) -> Result<()> {
        if self.days == 0 {
            return Err(Error::invalid("days", "must be >= 1"));
        }
        if self.samples_per_day == 0 {
            return Err(Error::invalid("samples_per_day", "must be >= 1"));
        }
        for (name, [lo, hi]) in [
            ("daily_min_range", self.daily_min_range),
            ("daily_max_range", self.daily_max_range),
        ] {
            ensure_finite(name, lo)?;
            ensure_finite(name, hi)?;
            if lo > hi {
                return Err(Error::invalid(
                    name,
                    format!("lower bound {lo} exceeds upper {hi}"),
                ));
            }
        }
        if self.daily_min_range[1] >= self.daily_max_range[0] {
            return Err(Error::invalid(
                "daily_max_range",
                "must lie strictly above daily_min_range",
            ));
        }
        Ok(())
    }

    /// Draws the daily extremes and returns a continuous weather curve.
    pub fn realize(&self) -> Result<OutdoorSeries> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut draw = |[lo, hi]: [f64; 2]| lo + (hi - lo) * rng.gen::<f64>();
        let extremes: Vec<(f64, f64)> = (0..self.days)
            .map(|_| {
                let low = draw(self.daily_min_range);
                let high = draw(self.daily_max_range);
                (low, high)
            })
            .collect();

        // Knots alternate trough/peak; virtual knots at both ends keep the
        // first night and the last evening on the same cosine shape.
        let mut knots = Vec::with_capacity(2 * extremes.len() + 2);
        knots.push((PEAK_HOUR - HOURS_PER_DAY, extremes[0].1));
        for (d, &(low, high)) in extremes.iter().enumerate() {
            let base = d as f64 * HOURS_PER_DAY;
            knots.push((base + TROUGH_HOUR, low));
            knots.push((base + PEAK_HOUR, high));
        }
        let last = extremes.len() as f64 * HOURS_PER_DAY;
        knots.push((last + TROUGH_HOUR, extremes[extremes.len() - 1].0));

        Ok(OutdoorSeries { extremes, knots })
    }

    pub fn duration(&self) -> f64 {
        f64::from(self.days) * HOURS_PER_DAY
    }
}

#[derive(Debug, Clone)]
pub struct OutdoorSeries {
    extremes: Vec<(f64, f64)>,
    knots: Vec<(f64, f64)>,
}

impl OutdoorSeries {
    /// `(min, max)` drawn for each day.
    pub fn daily_extremes(&self) -> &[(f64, f64)] {
        &self.extremes
    }

    /// Outdoor temperature at `t` hours, cosine-interpolated between the
    /// daily trough (05:00) and peak (15:00).
    pub fn temperature_at(&self, t: f64) -> f64 {
        let k = self.knots.partition_point(|&(time, _)| time <= t);
        if k == 0 {
            return self.knots[0].1;
        }
        if k == self.knots.len() {
            return self.knots[k - 1].1;
        }
        let (t0, v0) = self.knots[k - 1];
        let (t1, v1) = self.knots[k];
        let s = (t - t0) / (t1 - t0);
        v0 + (v1 - v0) * 0.5 * (1.0 - (PI * s).cos())
    }
}

/// Samples the profile at `samples_per_day` points per day.
pub fn generate_outdoor(profile: &OutdoorProfile) -> Result<(Vec<f64>, Vec<f64>)> {
    let series = profile.realize()?;
    let total = profile.days as usize * profile.samples_per_day as usize;
    let spacing = HOURS_PER_DAY / f64::from(profile.samples_per_day);
    let times: Vec<f64> = (0..total).map(|i| i as f64 * spacing).collect();
    let temps = times.iter().map(|&t| series.temperature_at(t)).collect();
    Ok((times, temps))
}

/// Common tolerance applied to every occupant over `[start_day, end_day)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSegment {
    pub start_day: f64,
    pub end_day: f64,
    pub delta: f64,
}

/// Which occupant tolerances are active when. Outside every segment the
/// occupants keep their own tolerances.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ToleranceSchedule {
    segments: Vec<ToleranceSegment>,
}

impl ToleranceSchedule {
    pub fn new(segments: Vec<ToleranceSegment>) -> Result<Self> {
        for (i, s) in segments.iter().enumerate() {
            ensure_finite("segments.start_day", s.start_day)?;
            ensure_finite("segments.end_day", s.end_day)?;
            if !(s.start_day >= 0.0 && s.start_day < s.end_day) {
                return Err(Error::invalid(
                    format!("segments[{i}]"),
                    "start_day must be >= 0 and < end_day",
                ));
            }
            if !(s.delta.is_finite() && s.delta >= 0.0) {
                return Err(Error::invalid(
                    format!("segments[{i}].delta"),
                    "must be >= 0",
                ));
            }
            if i > 0 && segments[i - 1].end_day > s.start_day {
                return Err(Error::invalid(
                    format!("segments[{i}]"),
                    "segments must be ordered and non-overlapping",
                ));
            }
        }
        Ok(ToleranceSchedule { segments })
    }

    pub fn segments(&self) -> &[ToleranceSegment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Index of the segment active at `t` hours. A shared boundary belongs
    /// to the later segment; the end of the final segment is inclusive.
    pub fn segment_at(&self, t: f64) -> Option<usize> {
        let day = t / HOURS_PER_DAY;
        let k = self.segments.iter().rposition(|s| s.start_day <= day)?;
        (day <= self.segments[k].end_day).then_some(k)
    }
}

/// Everything recorded at each integration step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    pub outdoor: Vec<f64>,
    pub room: Vec<f64>,
    pub control: Vec<f64>,
    pub h_series: Vec<i32>,
    pub g_series: Vec<i32>,
    /// One series per occupant.
    pub per_user_abs_discomfort: Vec<Vec<f64>>,
    /// Band solved from the tolerances active at each sample.
    pub active_band: Vec<ComfortBand>,
    /// Schedule segment active at each sample, if any.
    pub active_segment: Vec<Option<usize>>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV rows `time,t_ext,t_room,w,h,g,f_1..f_N`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = String::from("time,t_ext,t_room,w,h,g");
        for i in 1..=self.per_user_abs_discomfort.len() {
            header.push_str(&format!(",f_{i}"));
        }
        writeln!(w, "{header}")?;
        for k in 0..self.len() {
            let mut line = format!(
                "{},{},{},{},{},{}",
                sig6(self.times[k]),
                sig6(self.outdoor[k]),
                sig6(self.room[k]),
                sig6(self.control[k]),
                self.h_series[k],
                self.g_series[k]
            );
            for f in &self.per_user_abs_discomfort {
                line.push(',');
                line.push_str(&sig6(f[k]));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

struct Phase {
    occupants: Vec<Occupant>,
    band: ComfortBand,
}

impl Phase {
    fn new(occupants: Vec<Occupant>) -> Result<Self> {
        let band = solve_band(&occupants)?;
        Ok(Phase { occupants, band })
    }

    fn signals(&self, t: f64) -> (i32, i32) {
        self.occupants.iter().fold((0, 0), |(h, g), o| {
            let s = o.comfort_signal_unchecked(t).value();
            (h + s, g + s.abs())
        })
    }
}

/// Runs the loop over `duration` hours with an arbitrary outdoor curve.
///
/// Samples are taken at `t = n·dt` for `n = 0..=round(duration/dt)`; each
/// records the state, then the control computed from it, before stepping.
pub fn simulate<F>(
    occupants: &[Occupant],
    schedule: &ToleranceSchedule,
    params: &ThermalParams,
    outdoor: F,
    duration: f64,
    initial_room_temp: f64,
) -> Result<SimulationTrace>
where
    F: Fn(f64) -> f64,
{
    ensure_occupants(occupants)?;
    params.validate()?;
    ensure_finite("initial_room_temp", initial_room_temp)?;
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::invalid("duration", "must be finite and >= 0"));
    }

    let base = Phase::new(occupants.to_vec())?;
    let phases = schedule
        .segments()
        .iter()
        .map(|s| {
            let adjusted = occupants
                .iter()
                .map(|o| o.with_tolerance(s.delta))
                .collect::<Result<Vec<_>>>()?;
            Phase::new(adjusted)
        })
        .collect::<Result<Vec<_>>>()?;

    let steps = (duration / params.dt).round() as usize;
    let n = occupants.len();
    let mut trace = SimulationTrace {
        times: Vec::with_capacity(steps + 1),
        outdoor: Vec::with_capacity(steps + 1),
        room: Vec::with_capacity(steps + 1),
        control: Vec::with_capacity(steps + 1),
        h_series: Vec::with_capacity(steps + 1),
        g_series: Vec::with_capacity(steps + 1),
        per_user_abs_discomfort: vec![Vec::with_capacity(steps + 1); n],
        active_band: Vec::with_capacity(steps + 1),
        active_segment: Vec::with_capacity(steps + 1),
    };

    let mut room = initial_room_temp;
    // Sign of the last actuation, for hysteresis.
    let mut engaged = 0i32;
    for k in 0..=steps {
        let t = k as f64 * params.dt;
        let t_ext = outdoor(t);
        ensure_finite("outdoor temperature", t_ext)?;
        if !room.is_finite() || room.abs() > DIVERGENCE_LIMIT {
            return Err(Error::Diverged {
                step: k,
                time: t,
                value: room,
            });
        }

        let segment = schedule.segment_at(t);
        let phase = segment.map_or(&base, |i| &phases[i]);
        let (h, g) = phase.signals(room);
        let drive = if params.hysteresis > 0.0 && engaged != 0 {
            // Keep pushing until the room is `hysteresis` past the edge.
            let probe = room - f64::from(engaged) * params.hysteresis;
            let (held, _) = phase.signals(probe);
            if held.signum() == engaged {
                held
            } else {
                h
            }
        } else {
            h
        };
        engaged = drive.signum();
        let w = params.actuation(drive);

        trace.times.push(t);
        trace.outdoor.push(t_ext);
        trace.room.push(room);
        trace.control.push(w);
        trace.h_series.push(h);
        trace.g_series.push(g);
        for (series, o) in trace
            .per_user_abs_discomfort
            .iter_mut()
            .zip(&phase.occupants)
        {
            series.push(o.abs_discomfort_unchecked(room));
        }
        trace.active_band.push(phase.band);
        trace.active_segment.push(segment);

        room = step(room, t_ext, w, params);
    }
    Ok(trace)
}

/// Runs the loop over a generated outdoor profile.
///
/// `initial_room_temp` defaults to the first outdoor sample.
pub fn run_simulation(
    occupants: &[Occupant],
    profile: &OutdoorProfile,
    params: &ThermalParams,
    initial_room_temp: Option<f64>,
) -> Result<SimulationTrace> {
    run_scheduled(
        occupants,
        &ToleranceSchedule::default(),
        profile,
        params,
        initial_room_temp,
    )
}

pub fn run_scheduled(
    occupants: &[Occupant],
    schedule: &ToleranceSchedule,
    profile: &OutdoorProfile,
    params: &ThermalParams,
    initial_room_temp: Option<f64>,
) -> Result<SimulationTrace> {
    let series = profile.realize()?;
    let initial = initial_room_temp.unwrap_or_else(|| series.temperature_at(0.0));
    simulate(
        occupants,
        schedule,
        params,
        |t| series.temperature_at(t),
        profile.duration(),
        initial,
    )
}
