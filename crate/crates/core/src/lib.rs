//! Occupant-feedback thermal comfort control.
//!
//! Occupants report cold / comfortable / hot. Summing those reports gives a
//! monotone step function of room temperature whose zero set is the comfort
//! band; the cheapest setpoint is the outdoor temperature projected onto
//! that band, and a feedback law driven by the summed signal keeps a
//! simulated room there.

pub mod aggregate;
pub mod comfort;
mod error;
pub mod format;
pub mod policy;
pub mod scenario;
pub mod thermal;

pub use aggregate::{
    solve_band, total_abs_signal, total_signal, Aggregate, ComfortBand, StepFunction,
};
pub use comfort::{ComfortSignal, Occupant};
pub use error::{Error, Result};
pub use policy::{
    expected_abs_discomfort, power, setpoint, tolerance_sweep, utility, worst_case_discomfort,
    SweepResult,
};
pub use scenario::{parse_config, ScenarioConfig};
pub use thermal::{
    control_input, generate_outdoor, run_scheduled, run_simulation, simulate, step, ControlSign,
    OutdoorProfile, SimulationTrace, ThermalParams, ToleranceSchedule, ToleranceSegment,
};
