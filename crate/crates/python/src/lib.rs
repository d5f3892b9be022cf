//! Python bindings for `thermal-comfort`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use thermal_comfort as tc;
use thermal_comfort::aggregate::Aggregate;
use thermal_comfort::thermal::{ControlSign, ToleranceSegment};

fn to_py(err: tc::Error) -> PyErr {
    match err {
        tc::Error::Diverged { .. } => PyRuntimeError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

#[pyclass(name = "Occupant", frozen)]
struct PyOccupant {
    inner: tc::Occupant,
}

#[pymethods]
impl PyOccupant {
    #[new]
    #[pyo3(signature = (ideal_temp, sensitivity, tolerance = 0.0, id = 0))]
    fn new(ideal_temp: f64, sensitivity: f64, tolerance: f64, id: u32) -> PyResult<Self> {
        let inner = tc::Occupant::new(id, ideal_temp, sensitivity, tolerance).map_err(to_py)?;
        Ok(PyOccupant { inner })
    }

    #[getter]
    fn id(&self) -> u32 {
        self.inner.id()
    }

    #[getter]
    fn ideal_temp(&self) -> f64 {
        self.inner.ideal_temp()
    }

    #[getter]
    fn sensitivity(&self) -> f64 {
        self.inner.sensitivity()
    }

    #[getter]
    fn tolerance(&self) -> f64 {
        self.inner.tolerance()
    }

    fn with_tolerance(&self, tolerance: f64) -> PyResult<Self> {
        let inner = self.inner.with_tolerance(tolerance).map_err(to_py)?;
        Ok(PyOccupant { inner })
    }

    fn signed_discomfort(&self, room_temp: f64) -> PyResult<f64> {
        self.inner.signed_discomfort(room_temp).map_err(to_py)
    }

    fn abs_discomfort(&self, room_temp: f64) -> PyResult<f64> {
        self.inner.abs_discomfort(room_temp).map_err(to_py)
    }

    /// +1 cold, 0 comfortable, -1 hot.
    fn comfort_signal(&self, room_temp: f64) -> PyResult<i32> {
        self.inner
            .comfort_signal(room_temp)
            .map(|s| s.value())
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Occupant(ideal_temp={}, sensitivity={}, tolerance={}, id={})",
            self.inner.ideal_temp(),
            self.inner.sensitivity(),
            self.inner.tolerance(),
            self.inner.id()
        )
    }
}

fn unwrap_occupants(occupants: &[PyRef<'_, PyOccupant>]) -> Vec<tc::Occupant> {
    occupants.iter().map(|o| o.inner).collect()
}

#[pyclass(name = "ComfortBand", frozen)]
struct PyComfortBand {
    inner: tc::ComfortBand,
}

#[pymethods]
impl PyComfortBand {
    #[new]
    fn new(t_min: f64, t_max: f64) -> PyResult<Self> {
        let inner = tc::ComfortBand::new(t_min, t_max).map_err(to_py)?;
        Ok(PyComfortBand { inner })
    }

    #[getter]
    fn t_min(&self) -> f64 {
        self.inner.t_min
    }

    #[getter]
    fn t_max(&self) -> f64 {
        self.inner.t_max
    }

    #[getter]
    fn exact_zero(&self) -> bool {
        self.inner.exact_zero
    }

    #[getter]
    fn residual(&self) -> i32 {
        self.inner.residual
    }

    fn contains(&self, t: f64) -> bool {
        self.inner.contains(t)
    }

    fn __repr__(&self) -> String {
        format!(
            "ComfortBand(t_min={}, t_max={}, exact_zero={}, residual={})",
            self.inner.t_min, self.inner.t_max, self.inner.exact_zero, self.inner.residual
        )
    }
}

#[pyclass(name = "StepFunction", frozen)]
struct PyStepFunction {
    inner: tc::StepFunction,
}

#[pymethods]
impl PyStepFunction {
    /// Builds `h` (signed sum), or `g` (count of unhappy occupants) when
    /// `absolute` is true.
    #[staticmethod]
    #[pyo3(signature = (occupants, absolute = false))]
    fn build(occupants: Vec<PyRef<'_, PyOccupant>>, absolute: bool) -> PyResult<Self> {
        let kind = if absolute {
            Aggregate::Absolute
        } else {
            Aggregate::Signed
        };
        let inner = tc::StepFunction::build(&unwrap_occupants(&occupants), kind).map_err(to_py)?;
        Ok(PyStepFunction { inner })
    }

    #[getter]
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().to_vec()
    }

    #[getter]
    fn plateau_values(&self) -> Vec<i32> {
        self.inner.plateau_values().to_vec()
    }

    #[getter]
    fn point_values(&self) -> Vec<i32> {
        self.inner.point_values().to_vec()
    }

    fn value_at(&self, t: f64) -> i32 {
        self.inner.value_at(t)
    }

    /// `(start, end, value)` triples; breakpoints appear as `start == end`.
    fn segments(&self) -> Vec<(f64, f64, i32)> {
        self.inner
            .segments()
            .into_iter()
            .map(|s| (s.start, s.end, s.value))
            .collect()
    }
}

#[pyclass(name = "SweepResult", frozen)]
struct PySweepResult {
    inner: tc::SweepResult,
}

#[pymethods]
impl PySweepResult {
    #[getter]
    fn tolerance(&self) -> f64 {
        self.inner.tolerance
    }

    #[getter]
    fn band(&self) -> PyComfortBand {
        PyComfortBand {
            inner: self.inner.band,
        }
    }

    #[getter]
    fn per_user_utility(&self) -> Vec<f64> {
        self.inner.per_user_utility.clone()
    }

    #[getter]
    fn worst_case(&self) -> f64 {
        self.inner.worst_case
    }
}

#[pyclass(name = "ThermalParams", frozen)]
struct PyThermalParams {
    inner: tc::ThermalParams,
}

#[pymethods]
impl PyThermalParams {
    #[new]
    #[pyo3(signature = (heat_exchange = 0.1, control_gain = 1.0, dt = 0.1, control_sign = "stabilizing", hysteresis = 0.0))]
    fn new(
        heat_exchange: f64,
        control_gain: f64,
        dt: f64,
        control_sign: &str,
        hysteresis: f64,
    ) -> PyResult<Self> {
        let control_sign = match control_sign {
            "stabilizing" => ControlSign::Stabilizing,
            "as_printed" => ControlSign::AsPrinted,
            other => {
                return Err(PyValueError::new_err(format!(
                    "control_sign must be 'stabilizing' or 'as_printed', got {other:?}"
                )))
            }
        };
        let inner = tc::ThermalParams {
            heat_exchange,
            control_gain,
            dt,
            control_sign,
            hysteresis,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyThermalParams { inner })
    }

    #[getter]
    fn heat_exchange(&self) -> f64 {
        self.inner.heat_exchange
    }

    #[getter]
    fn control_gain(&self) -> f64 {
        self.inner.control_gain
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt
    }
}

#[pyclass(name = "OutdoorProfile", frozen)]
struct PyOutdoorProfile {
    inner: tc::OutdoorProfile,
}

#[pymethods]
impl PyOutdoorProfile {
    #[new]
    #[pyo3(signature = (seed = 0, days = 7, daily_min_range = (9.0, 13.0), daily_max_range = (20.0, 25.0), samples_per_day = 240))]
    fn new(
        seed: u64,
        days: u32,
        daily_min_range: (f64, f64),
        daily_max_range: (f64, f64),
        samples_per_day: u32,
    ) -> PyResult<Self> {
        let inner = tc::OutdoorProfile {
            seed,
            days,
            daily_min_range: [daily_min_range.0, daily_min_range.1],
            daily_max_range: [daily_max_range.0, daily_max_range.1],
            samples_per_day,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyOutdoorProfile { inner })
    }
}

#[pyclass(name = "SimulationTrace", frozen)]
struct PySimulationTrace {
    inner: tc::SimulationTrace,
}

#[pymethods]
impl PySimulationTrace {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times.clone()
    }

    #[getter]
    fn outdoor(&self) -> Vec<f64> {
        self.inner.outdoor.clone()
    }

    #[getter]
    fn room(&self) -> Vec<f64> {
        self.inner.room.clone()
    }

    #[getter]
    fn control(&self) -> Vec<f64> {
        self.inner.control.clone()
    }

    #[getter]
    fn h_series(&self) -> Vec<i32> {
        self.inner.h_series.clone()
    }

    #[getter]
    fn g_series(&self) -> Vec<i32> {
        self.inner.g_series.clone()
    }

    #[getter]
    fn per_user_abs_discomfort(&self) -> Vec<Vec<f64>> {
        self.inner.per_user_abs_discomfort.clone()
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner
            .write_csv(&mut buf)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
    }
}

#[pyclass(name = "ScenarioConfig", frozen)]
struct PyScenarioConfig {
    inner: tc::ScenarioConfig,
}

#[pymethods]
impl PyScenarioConfig {
    fn occupants(&self) -> PyResult<Vec<PyOccupant>> {
        Ok(self
            .inner
            .occupants()
            .map_err(to_py)?
            .into_iter()
            .map(|inner| PyOccupant { inner })
            .collect())
    }

    /// `(delta_min, delta_max, step)` or `None`.
    #[getter]
    fn sweep(&self) -> Option<(f64, f64, f64)> {
        self.inner.sweep.map(|s| (s.delta_min, s.delta_max, s.step))
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.power.mu
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }
}

#[pyfunction]
fn total_signal(occupants: Vec<PyRef<'_, PyOccupant>>, room_temp: f64) -> PyResult<i32> {
    tc::total_signal(&unwrap_occupants(&occupants), room_temp).map_err(to_py)
}

#[pyfunction]
fn total_abs_signal(occupants: Vec<PyRef<'_, PyOccupant>>, room_temp: f64) -> PyResult<i32> {
    tc::total_abs_signal(&unwrap_occupants(&occupants), room_temp).map_err(to_py)
}

#[pyfunction]
fn solve_band(occupants: Vec<PyRef<'_, PyOccupant>>) -> PyResult<PyComfortBand> {
    let inner = tc::solve_band(&unwrap_occupants(&occupants)).map_err(to_py)?;
    Ok(PyComfortBand { inner })
}

#[pyfunction]
#[pyo3(signature = (outdoor_temp, room_temp, mu = 1.0))]
fn power(outdoor_temp: f64, room_temp: f64, mu: f64) -> PyResult<f64> {
    tc::power(outdoor_temp, room_temp, mu).map_err(to_py)
}

#[pyfunction]
fn setpoint(outdoor_temp: f64, band: PyRef<'_, PyComfortBand>) -> PyResult<f64> {
    tc::setpoint(outdoor_temp, &band.inner).map_err(to_py)
}

#[pyfunction]
fn expected_abs_discomfort(
    occupant: PyRef<'_, PyOccupant>,
    outdoor_temp: f64,
    band: PyRef<'_, PyComfortBand>,
) -> PyResult<f64> {
    tc::expected_abs_discomfort(&occupant.inner, outdoor_temp, &band.inner).map_err(to_py)
}

#[pyfunction]
fn utility(occupant: PyRef<'_, PyOccupant>, band: PyRef<'_, PyComfortBand>) -> PyResult<f64> {
    tc::utility(&occupant.inner, &band.inner).map_err(to_py)
}

#[pyfunction]
fn worst_case_discomfort(
    occupants: Vec<PyRef<'_, PyOccupant>>,
    band: PyRef<'_, PyComfortBand>,
) -> PyResult<f64> {
    tc::worst_case_discomfort(&unwrap_occupants(&occupants), &band.inner).map_err(to_py)
}

#[pyfunction]
fn tolerance_sweep(
    occupants: Vec<PyRef<'_, PyOccupant>>,
    delta_min: f64,
    delta_max: f64,
    step: f64,
) -> PyResult<Vec<PySweepResult>> {
    let rows = tc::tolerance_sweep(&unwrap_occupants(&occupants), delta_min, delta_max, step)
        .map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|inner| PySweepResult { inner })
        .collect())
}

#[pyfunction]
fn control_input(
    occupants: Vec<PyRef<'_, PyOccupant>>,
    room_temp: f64,
    params: PyRef<'_, PyThermalParams>,
) -> PyResult<f64> {
    tc::control_input(&unwrap_occupants(&occupants), room_temp, &params.inner).map_err(to_py)
}

#[pyfunction]
fn step(room_temp: f64, outdoor_temp: f64, w: f64, params: PyRef<'_, PyThermalParams>) -> f64 {
    tc::step(room_temp, outdoor_temp, w, &params.inner)
}

#[pyfunction]
fn generate_outdoor(profile: PyRef<'_, PyOutdoorProfile>) -> PyResult<(Vec<f64>, Vec<f64>)> {
    tc::generate_outdoor(&profile.inner).map_err(to_py)
}

/// `schedule` is a list of `(start_day, end_day, delta)` triples.
#[pyfunction]
#[pyo3(signature = (occupants, profile, params, initial_room_temp = None, schedule = None))]
fn run_simulation(
    py: Python<'_>,
    occupants: Vec<PyRef<'_, PyOccupant>>,
    profile: PyRef<'_, PyOutdoorProfile>,
    params: PyRef<'_, PyThermalParams>,
    initial_room_temp: Option<f64>,
    schedule: Option<Vec<(f64, f64, f64)>>,
) -> PyResult<PySimulationTrace> {
    let occupants = unwrap_occupants(&occupants);
    let segments = schedule
        .unwrap_or_default()
        .into_iter()
        .map(|(start_day, end_day, delta)| ToleranceSegment {
            start_day,
            end_day,
            delta,
        })
        .collect();
    let schedule = tc::ToleranceSchedule::new(segments).map_err(to_py)?;
    let (profile, params) = (profile.inner, params.inner);
    let inner = py
        .detach(|| tc::run_scheduled(&occupants, &schedule, &profile, &params, initial_room_temp))
        .map_err(to_py)?;
    Ok(PySimulationTrace { inner })
}

#[pyfunction]
fn parse_config(text: &str) -> PyResult<PyScenarioConfig> {
    let inner = tc::parse_config(text).map_err(to_py)?;
    Ok(PyScenarioConfig { inner })
}

#[pymodule]
#[pyo3(name = "thermal_comfort")]
fn thermal_comfort_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOccupant>()?;
    m.add_class::<PyComfortBand>()?;
    m.add_class::<PyStepFunction>()?;
    m.add_class::<PySweepResult>()?;
    m.add_class::<PyThermalParams>()?;
    m.add_class::<PyOutdoorProfile>()?;
    m.add_class::<PySimulationTrace>()?;
    m.add_class::<PyScenarioConfig>()?;
    m.add_function(wrap_pyfunction!(total_signal, m)?)?;
    m.add_function(wrap_pyfunction!(total_abs_signal, m)?)?;
    m.add_function(wrap_pyfunction!(solve_band, m)?)?;
    m.add_function(wrap_pyfunction!(power, m)?)?;
    m.add_function(wrap_pyfunction!(setpoint, m)?)?;
    m.add_function(wrap_pyfunction!(expected_abs_discomfort, m)?)?;
    m.add_function(wrap_pyfunction!(utility, m)?)?;
    m.add_function(wrap_pyfunction!(worst_case_discomfort, m)?)?;
    m.add_function(wrap_pyfunction!(tolerance_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(control_input, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(generate_outdoor, m)?)?;
    m.add_function(wrap_pyfunction!(run_simulation, m)?)?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    Ok(())
}
