//! Energy-minimizing setpoint and discomfort analysis.
//!
//! The controller keeps the room inside the comfort band while spending as
//! little power as possible, so the setpoint is the projection of the
//! outdoor temperature onto the band. The remaining functions measure what
//! that choice costs each occupant.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::aggregate::{ensure_occupants, solve_band, ComfortBand};
use crate::comfort::Occupant;
use crate::error::{ensure_finite, Error, Result};
use crate::format::sig6;

/// HVAC power needed to hold `room_temp` against `outdoor_temp`.
pub fn power(outdoor_temp: f64, room_temp: f64, mu: f64) -> Result<f64> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::invalid(
            "mu",
            format!("must be finite and >= 0, got {mu}"),
        ));
    }
    ensure_finite("outdoor_temp", outdoor_temp)?;
    ensure_finite("room_temp", room_temp)?;
    Ok(mu * (outdoor_temp - room_temp).abs())
}

/// Projection of the outdoor temperature onto the band.
pub fn setpoint(outdoor_temp: f64, band: &ComfortBand) -> Result<f64> {
    band.validate()?;
    ensure_finite("outdoor_temp", outdoor_temp)?;
    Ok(if outdoor_temp < band.t_min {
        band.t_min
    } else if outdoor_temp > band.t_max {
        band.t_max
    } else {
        outdoor_temp
    })
}

/// Absolute discomfort the occupant sees once the room sits at the setpoint.
pub fn expected_abs_discomfort(
    occupant: &Occupant,
    outdoor_temp: f64,
    band: &ComfortBand,
) -> Result<f64> {
    occupant.abs_discomfort(setpoint(outdoor_temp, band)?)
}

/// Worst discomfort over all outdoor temperatures. Absolute discomfort is
/// V-shaped around the ideal, so the maximum over the band sits at an end.
pub fn utility(occupant: &Occupant, band: &ComfortBand) -> Result<f64> {
    band.validate()?;
    Ok(occupant
        .abs_discomfort_unchecked(band.t_min)
        .max(occupant.abs_discomfort_unchecked(band.t_max)))
}

pub fn worst_case_discomfort(occupants: &[Occupant], band: &ComfortBand) -> Result<f64> {
    ensure_occupants(occupants)?;
    occupants
        .iter()
        .map(|o| utility(o, band))
        .try_fold(0.0f64, |acc, u| u.map(|u| acc.max(u)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub tolerance: f64,
    pub band: ComfortBand,
    pub per_user_utility: Vec<f64>,
    pub worst_case: f64,
}

/// Inclusive grid `delta_min + n·step`, ending exactly on `delta_max`.
pub fn tolerance_grid(delta_min: f64, delta_max: f64, step: f64) -> Result<Vec<f64>> {
    ensure_finite("delta_min", delta_min)?;
    ensure_finite("delta_max", delta_max)?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(
            "step",
            format!("must be finite and > 0, got {step}"),
        ));
    }
    if delta_min < 0.0 {
        return Err(Error::invalid("delta_min", "must be >= 0"));
    }
    if delta_min > delta_max {
        return Err(Error::invalid("delta_max", "must be >= delta_min"));
    }
    let span = delta_max - delta_min;
    // Relative slack absorbs representation error in span/step (3/0.03 is
    // 100.00000000000001).
    let ratio = span / step;
    let whole = (ratio + 1e-9 * ratio.max(1.0)).floor() as usize;
    let mut grid: Vec<f64> = (0..=whole).map(|n| delta_min + n as f64 * step).collect();
    let last = grid.last_mut().expect("grid has at least one point");
    if (delta_max - *last).abs() <= 1e-9 * step.max(delta_max.abs()) {
        *last = delta_max;
    } else {
        grid.push(delta_max);
    }
    Ok(grid)
}

/// Evaluates a common tolerance `Δ` for every occupant over the grid.
/// Rows come back in grid order.
pub fn tolerance_sweep(
    occupants: &[Occupant],
    delta_min: f64,
    delta_max: f64,
    step: f64,
) -> Result<Vec<SweepResult>> {
    ensure_occupants(occupants)?;
    let grid = tolerance_grid(delta_min, delta_max, step)?;
    grid.into_par_iter()
        .map(|delta| sweep_row(occupants, delta))
        .collect()
}

pub fn sweep_row(occupants: &[Occupant], delta: f64) -> Result<SweepResult> {
    let adjusted = occupants
        .iter()
        .map(|o| o.with_tolerance(delta))
        .collect::<Result<Vec<_>>>()?;
    let band = solve_band(&adjusted)?;
    let per_user_utility = adjusted
        .iter()
        .map(|o| utility(o, &band))
        .collect::<Result<Vec<_>>>()?;
    let worst_case = per_user_utility.iter().copied().fold(0.0, f64::max);
    Ok(SweepResult {
        tolerance: delta,
        band,
        per_user_utility,
        worst_case,
    })
}

/// CSV rows `delta,t_min,t_max,exact_zero,residual,u_1..u_N,worst_case`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepResult], mut w: W) -> std::io::Result<()> {
    let n = rows.first().map_or(0, |r| r.per_user_utility.len());
    let mut header = String::from("delta,t_min,t_max,exact_zero,residual");
    for i in 1..=n {
        header.push_str(&format!(",u_{i}"));
    }
    header.push_str(",worst_case");
    writeln!(w, "{header}")?;
    for r in rows {
        let mut line = format!(
            "{},{},{},{},{}",
            sig6(r.tolerance),
            sig6(r.band.t_min),
            sig6(r.band.t_max),
            r.band.exact_zero,
            r.band.residual
        );
        for u in &r.per_user_utility {
            line.push(',');
            line.push_str(&sig6(*u));
        }
        line.push(',');
        line.push_str(&sig6(r.worst_case));
        writeln!(w, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with mpmath at 30 digits.
    const F4_AT_17: f64 = 0.682_716_373_298_435_4;
    const F2_AT_18_5: f64 = 0.060_586_937_186_524_21;
    const ONE_MINUS_INV_E: f64 = 0.632_120_558_828_557_7;
    const WORST_AT_1_5: f64 = 0.249_480_612_840_911_7;

    fn paper_occupants(delta: f64) -> Vec<Occupant> {
        [(17.0, 3.0), (18.0, 2.0), (19.5, 2.5), (20.0, 2.8)]
            .iter()
            .enumerate()
            .map(|(i, &(t, s))| Occupant::new(i as u32 + 1, t, s, delta).unwrap())
            .collect()
    }

    fn band(lo: f64, hi: f64) -> ComfortBand {
        ComfortBand::new(lo, hi).unwrap()
    }

    #[test]
    fn power_examples() {
        assert_eq!(power(25.0, 20.0, 1.0).unwrap(), 5.0);
        assert_eq!(power(12.3, 12.3, 4.0).unwrap(), 0.0);
        assert_eq!(power(10.0, 17.0, 2.0).unwrap(), 14.0);
        assert!(power(10.0, 17.0, -1.0).is_err());
    }

    #[test]
    fn setpoint_examples() {
        let b = band(17.0, 20.0);
        assert_eq!(setpoint(10.0, &b).unwrap(), 17.0);
        assert_eq!(setpoint(18.3, &b).unwrap(), 18.3);
        assert_eq!(setpoint(25.0, &b).unwrap(), 20.0);
        let bad = ComfortBand {
            t_min: 20.0,
            t_max: 17.0,
            exact_zero: true,
            residual: 0,
        };
        assert!(setpoint(18.0, &bad).is_err());
    }

    #[test]
    fn expected_discomfort_examples() {
        let b = band(17.0, 20.0);
        let o1 = Occupant::new(1, 17.0, 3.0, 0.0).unwrap();
        assert_eq!(expected_abs_discomfort(&o1, 12.0, &b).unwrap(), 0.0);
        let o4 = Occupant::new(4, 20.0, 2.8, 0.0).unwrap();
        assert!((expected_abs_discomfort(&o4, 10.0, &b).unwrap() - F4_AT_17).abs() < 1e-12);

        let point = band(18.5, 18.5);
        let o2 = Occupant::new(2, 18.0, 2.0, 0.0).unwrap();
        for t_ext in [-5.0, 18.5, 40.0] {
            let v = expected_abs_discomfort(&o2, t_ext, &point).unwrap();
            assert!((v - F2_AT_18_5).abs() < 1e-12);
        }
    }

    #[test]
    fn utility_examples() {
        let b = band(17.0, 20.0);
        let o4 = Occupant::new(4, 20.0, 2.8, 0.0).unwrap();
        assert!((utility(&o4, &b).unwrap() - F4_AT_17).abs() < 1e-12);
        let o2 = Occupant::new(2, 18.0, 2.0, 0.0).unwrap();
        assert!((utility(&o2, &b).unwrap() - ONE_MINUS_INV_E).abs() < 1e-12);
        let p = band(19.0, 19.0);
        assert_eq!(utility(&o2, &p).unwrap(), o2.abs_discomfort(19.0).unwrap());
    }

    #[test]
    fn worst_case_examples() {
        let occ = paper_occupants(3.0);
        let y = worst_case_discomfort(&occ, &solve_band(&occ).unwrap()).unwrap();
        assert!((y - F4_AT_17).abs() < 1e-12);

        let occ = paper_occupants(1.5);
        let y = worst_case_discomfort(&occ, &solve_band(&occ).unwrap()).unwrap();
        assert!((y - WORST_AT_1_5).abs() < 1e-12);

        let single = [Occupant::new(1, 18.0, 2.0, 1.0).unwrap()];
        let own = band(17.0, 19.0);
        assert_eq!(
            worst_case_discomfort(&single, &own).unwrap(),
            single[0].abs_discomfort(17.0).unwrap()
        );
        assert!(worst_case_discomfort(&[], &own).is_err());
    }

    #[test]
    fn grid_is_inclusive() {
        let g = tolerance_grid(0.0, 3.0, 0.03).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[50], 1.5);
        assert_eq!(g[100], 3.0);

        assert_eq!(tolerance_grid(1.0, 1.0, 0.5).unwrap(), vec![1.0]);
        // Uneven span: last point appended.
        assert_eq!(
            tolerance_grid(0.0, 1.0, 0.4).unwrap(),
            vec![0.0, 0.4, 0.8, 1.0]
        );

        assert!(tolerance_grid(0.0, 1.0, 0.0).is_err());
        assert!(tolerance_grid(0.0, 1.0, -0.1).is_err());
        assert!(tolerance_grid(2.0, 1.0, 0.1).is_err());
        assert!(tolerance_grid(-1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn sweep_over_paper_grid() {
        let rows = tolerance_sweep(&paper_occupants(0.0), 0.0, 3.0, 0.03).unwrap();
        assert_eq!(rows.len(), 101);
        let last = rows.last().unwrap();
        assert_eq!((last.band.t_min, last.band.t_max), (17.0, 20.0));
        let mid = &rows[50];
        assert_eq!(mid.tolerance, 1.5);
        assert_eq!((mid.band.t_min, mid.band.t_max), (18.5, 18.5));
        assert!((mid.worst_case - WORST_AT_1_5).abs() < 1e-12);
        for r in &rows {
            let max = r.per_user_utility.iter().copied().fold(0.0, f64::max);
            assert_eq!(r.worst_case, max);
            assert!(r.per_user_utility.iter().all(|u| (0.0..1.0).contains(u)));
        }
        assert_eq!(
            tolerance_sweep(&paper_occupants(0.0), 1.0, 1.0, 0.1)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn sweep_rows_keep_grid_order() {
        let rows = tolerance_sweep(&paper_occupants(0.0), 0.0, 3.0, 0.03).unwrap();
        assert!(rows.windows(2).all(|w| w[0].tolerance < w[1].tolerance));
    }

    #[test]
    fn sweep_csv_layout() {
        let rows = tolerance_sweep(&paper_occupants(0.0), 3.0, 3.0, 0.03).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "delta,t_min,t_max,exact_zero,residual,u_1,u_2,u_3,u_4,worst_case"
        );
        assert_eq!(
            lines.next().unwrap(),
            "3,17,20,true,0,0.632121,0.632121,0.632121,0.682716,0.682716"
        );
    }
}
