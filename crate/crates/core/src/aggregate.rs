//! Aggregation of occupant signals.
//!
//! `h(T)` is the sum of all occupant signals and `g(T)` the number of
//! occupants who are not comfortable. Both are piecewise constant with
//! breakpoints at the occupants' band edges `T* ± Δ`, so they are held
//! exactly as a [`StepFunction`]: one value per open plateau plus one value
//! at each breakpoint (inclusive band edges make those differ in general).
//!
//! The comfort band is the closure of the zero set of `h`.

use std::io::Write;

use serde::Serialize;

use crate::comfort::Occupant;
use crate::error::{ensure_finite, Error, Result};

/// Sum of occupant signals at `room_temp`, in `[-N, N]`.
pub fn total_signal(occupants: &[Occupant], room_temp: f64) -> Result<i32> {
    ensure_occupants(occupants)?;
    ensure_finite("room_temp", room_temp)?;
    Ok(occupants
        .iter()
        .map(|o| o.comfort_signal_unchecked(room_temp).value())
        .sum())
}

/// Number of occupants not comfortable at `room_temp`, in `[0, N]`.
pub fn total_abs_signal(occupants: &[Occupant], room_temp: f64) -> Result<i32> {
    ensure_occupants(occupants)?;
    ensure_finite("room_temp", room_temp)?;
    Ok(occupants
        .iter()
        .map(|o| o.comfort_signal_unchecked(room_temp).value().abs())
        .sum())
}

pub(crate) fn ensure_occupants(occupants: &[Occupant]) -> Result<()> {
    if occupants.is_empty() {
        Err(Error::NoOccupants)
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Aggregate {
    /// `h`: signed sum.
    Signed,
    /// `g`: absolute sum.
    Absolute,
}

/// Exact piecewise-constant function of room temperature.
///
/// With breakpoints `b_0 < b_1 < … < b_{m-1}`, `plateau_values[k]` is the
/// value on the open interval `(b_{k-1}, b_k)` (with `b_{-1} = −∞` and
/// `b_m = +∞`) and `point_values[k]` the value at `b_k` itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    plateau_values: Vec<i32>,
    point_values: Vec<i32>,
}

/// One maximal piece of a [`StepFunction`]: either an open plateau or a
/// single breakpoint (`start == end`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub value: i32,
}

impl StepFunction {
    /// Builds `h` or `g` for the given occupants.
    ///
    /// Walks the sorted band edges once: crossing into a lower edge takes
    /// that occupant from cold to comfortable (the edge itself is already
    /// comfortable), leaving an upper edge takes it from comfortable to hot.
    pub fn build(occupants: &[Occupant], kind: Aggregate) -> Result<Self> {
        ensure_occupants(occupants)?;
        let n = occupants.len() as i32;

        let mut edges: Vec<(f64, bool)> = occupants
            .iter()
            .flat_map(|o| [(o.lower_bound(), true), (o.upper_bound(), false)])
            .collect();
        for &(t, _) in &edges {
            ensure_finite("band edge", t)?;
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut breakpoints = Vec::new();
        let mut plateau_values = vec![n];
        let mut point_values = Vec::new();
        let mut current = n;

        let mut i = 0;
        while i < edges.len() {
            let t = edges[i].0;
            let (mut lowers, mut uppers) = (0, 0);
            while i < edges.len() && edges[i].0 == t {
                if edges[i].1 {
                    lowers += 1;
                } else {
                    uppers += 1;
                }
                i += 1;
            }
            // h: cold (+1) -> comfortable (0) -> hot (−1).
            // g: 1 -> 0 -> 1.
            let at_point = current - lowers;
            let after = match kind {
                Aggregate::Signed => at_point - uppers,
                Aggregate::Absolute => at_point + uppers,
            };
            breakpoints.push(t);
            point_values.push(at_point);
            plateau_values.push(after);
            current = after;
        }

        Ok(StepFunction {
            breakpoints,
            plateau_values,
            point_values,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn plateau_values(&self) -> &[i32] {
        &self.plateau_values
    }

    pub fn point_values(&self) -> &[i32] {
        &self.point_values
    }

    pub fn value_at(&self, t: f64) -> i32 {
        // Number of breakpoints strictly below t.
        let below = self.breakpoints.partition_point(|&b| b < t);
        match self.breakpoints.get(below) {
            Some(&b) if b == t => self.point_values[below],
            _ => self.plateau_values[below],
        }
    }

    /// All pieces in increasing temperature order, alternating plateau and
    /// breakpoint, starting and ending with the unbounded tails.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(2 * self.breakpoints.len() + 1);
        let mut start = f64::NEG_INFINITY;
        for (k, &b) in self.breakpoints.iter().enumerate() {
            out.push(Segment {
                start,
                end: b,
                value: self.plateau_values[k],
            });
            out.push(Segment {
                start: b,
                end: b,
                value: self.point_values[k],
            });
            start = b;
        }
        out.push(Segment {
            start,
            end: f64::INFINITY,
            value: *self.plateau_values.last().expect("at least one plateau"),
        });
        out
    }

    /// Writes `segment_start,segment_end,value` rows (tails as `-inf`/`inf`).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "segment_start,segment_end,value")?;
        for s in self.segments() {
            writeln!(
                w,
                "{},{},{}",
                crate::format::sig6(s.start),
                crate::format::sig6(s.end),
                s.value
            )?;
        }
        Ok(())
    }
}

/// Closed temperature interval the controller aims for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComfortBand {
    pub t_min: f64,
    pub t_max: f64,
    /// Whether `h = 0` is attained on the band.
    pub exact_zero: bool,
    /// Smallest `|h|` over all temperatures (0 when `exact_zero`).
    pub residual: i32,
}

impl ComfortBand {
    /// A band given directly, with `h = 0` assumed on it.
    pub fn new(t_min: f64, t_max: f64) -> Result<Self> {
        ensure_finite("t_min", t_min)?;
        ensure_finite("t_max", t_max)?;
        if t_min > t_max {
            return Err(Error::invalid(
                "band",
                format!("t_min {t_min} exceeds t_max {t_max}"),
            ));
        }
        Ok(ComfortBand {
            t_min,
            t_max,
            exact_zero: true,
            residual: 0,
        })
    }

    pub fn contains(&self, t: f64) -> bool {
        self.t_min <= t && t <= self.t_max
    }

    pub fn width(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub(crate) fn validate(&self) -> Result<()> {
        ensure_finite("t_min", self.t_min)?;
        ensure_finite("t_max", self.t_max)?;
        if self.t_min > self.t_max {
            return Err(Error::invalid("band", "t_min exceeds t_max"));
        }
        Ok(())
    }
}

/// Solves the comfort band as the closure of `{T : h(T) = 0}`.
///
/// When `h` jumps over zero the band falls back to the closed hull of the
/// pieces where `|h|` is smallest, with `exact_zero = false`.
pub fn solve_band(occupants: &[Occupant]) -> Result<ComfortBand> {
    let h = StepFunction::build(occupants, Aggregate::Signed)?;
    let segments = h.segments();
    let residual = segments
        .iter()
        .map(|s| s.value.abs())
        .min()
        .expect("non-empty segments");

    // |h| < N somewhere (first breakpoint is a lower edge), so the minimal
    // pieces never include an unbounded tail.
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    for s in segments.iter().filter(|s| s.value.abs() == residual) {
        t_min = t_min.min(s.start);
        t_max = t_max.max(s.end);
    }
    debug_assert!(t_min.is_finite() && t_max.is_finite());

    Ok(ComfortBand {
        t_min,
        t_max,
        exact_zero: residual == 0,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occupants(ideals: &[f64], deltas: &[f64]) -> Vec<Occupant> {
        ideals
            .iter()
            .zip(deltas)
            .enumerate()
            .map(|(i, (&t, &d))| Occupant::new(i as u32 + 1, t, 2.0, d).unwrap())
            .collect()
    }

    const IDEALS: [f64; 4] = [17.0, 18.0, 19.5, 20.0];

    #[test]
    fn total_signal_examples() {
        let occ = occupants(&IDEALS, &[2.0, 2.0, 3.0, 1.5]);
        assert_eq!(total_signal(&occ, 14.0).unwrap(), 4);
        assert_eq!(total_signal(&occ, 18.5).unwrap(), 0);
        assert_eq!(total_signal(&occ, -100.0).unwrap(), 4);
        assert_eq!(total_signal(&occ, 100.0).unwrap(), -4);
    }

    #[test]
    fn fairness_without_satisfaction() {
        let occ = occupants(&IDEALS, &[0.0; 4]);
        assert_eq!(total_signal(&occ, 18.75).unwrap(), 0);
        assert_eq!(total_abs_signal(&occ, 18.75).unwrap(), 4);
    }

    #[test]
    fn abs_signal_extremes() {
        let occ = occupants(&IDEALS, &[3.0; 4]);
        assert_eq!(total_abs_signal(&occ, 18.5).unwrap(), 0);
        assert_eq!(total_abs_signal(&occ, 0.0).unwrap(), 4);
    }

    #[test]
    fn empty_occupants_rejected() {
        assert!(matches!(total_signal(&[], 18.0), Err(Error::NoOccupants)));
        assert!(matches!(
            total_abs_signal(&[], 18.0),
            Err(Error::NoOccupants)
        ));
        assert!(matches!(
            StepFunction::build(&[], Aggregate::Signed),
            Err(Error::NoOccupants)
        ));
        assert!(matches!(solve_band(&[]), Err(Error::NoOccupants)));
    }

    #[test]
    fn single_occupant_step_function() {
        let occ = occupants(&[18.0], &[2.0]);
        let h = StepFunction::build(&occ, Aggregate::Signed).unwrap();
        assert_eq!(h.breakpoints(), &[16.0, 20.0]);
        assert_eq!(h.plateau_values(), &[1, 0, -1]);
        assert_eq!(h.point_values(), &[0, 0]);

        let g = StepFunction::build(&occ, Aggregate::Absolute).unwrap();
        assert_eq!(g.plateau_values(), &[1, 0, 1]);
        assert_eq!(g.point_values(), &[0, 0]);
    }

    #[test]
    fn staircase_descends_from_n_to_minus_n() {
        let occ = occupants(&IDEALS, &[2.0, 2.0, 3.0, 1.5]);
        let h = StepFunction::build(&occ, Aggregate::Signed).unwrap();
        let p = h.plateau_values();
        assert_eq!(p[0], 4);
        assert_eq!(*p.last().unwrap(), -4);
        assert!(p.windows(2).all(|w| w[0] >= w[1]));
        // edges: 15,16,16.5,18.5 | 19,20,21.5,22.5 ; 18.5 appears once.
        assert_eq!(
            h.breakpoints(),
            &[15.0, 16.0, 16.5, 18.5, 19.0, 20.0, 21.5, 22.5]
        );
    }

    #[test]
    fn coincident_edges_merge() {
        // Both occupants have T* − Δ = 16.
        let occ = occupants(&[17.0, 18.0], &[1.0, 2.0]);
        let h = StepFunction::build(&occ, Aggregate::Signed).unwrap();
        assert_eq!(h.breakpoints(), &[16.0, 18.0, 20.0]);
        assert_eq!(h.plateau_values(), &[2, 0, -1, -2]);
        assert_eq!(h.point_values()[0], 0);
    }

    #[test]
    fn value_at_distinguishes_points_and_plateaus() {
        let occ = occupants(&[18.0], &[0.0]);
        let h = StepFunction::build(&occ, Aggregate::Signed).unwrap();
        assert_eq!(h.value_at(17.9), 1);
        assert_eq!(h.value_at(18.0), 0);
        assert_eq!(h.value_at(18.1), -1);
    }

    #[test]
    fn segments_cover_the_line() {
        let occ = occupants(&IDEALS, &[1.0; 4]);
        let h = StepFunction::build(&occ, Aggregate::Signed).unwrap();
        let segs = h.segments();
        assert_eq!(segs.len(), 2 * h.breakpoints().len() + 1);
        assert_eq!(segs[0].start, f64::NEG_INFINITY);
        assert_eq!(segs.last().unwrap().end, f64::INFINITY);
        for w in segs.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
    }

    #[test]
    fn csv_has_header_and_tails() {
        let occ = occupants(&[18.0], &[2.0]);
        let h = StepFunction::build(&occ, Aggregate::Signed).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "segment_start,segment_end,value\n-inf,16,1\n16,16,0\n16,20,0\n20,20,0\n20,inf,-1\n"
        );
    }

    #[test]
    fn band_examples() {
        let band = solve_band(&occupants(&IDEALS, &[3.0; 4])).unwrap();
        assert_eq!(
            (band.t_min, band.t_max, band.exact_zero),
            (17.0, 20.0, true)
        );

        let band = solve_band(&occupants(&IDEALS, &[1.5; 4])).unwrap();
        assert_eq!(
            (band.t_min, band.t_max, band.exact_zero),
            (18.5, 18.5, true)
        );

        let band = solve_band(&occupants(&IDEALS, &[0.0; 4])).unwrap();
        assert_eq!(
            (band.t_min, band.t_max, band.exact_zero),
            (18.0, 19.5, true)
        );

        let band = solve_band(&occupants(&[18.0], &[2.0])).unwrap();
        assert_eq!((band.t_min, band.t_max), (16.0, 20.0));
    }

    #[test]
    fn band_falls_back_when_h_skips_zero() {
        // Zero tolerance, two occupants at 18 and one at 20:
        // h = 3, 1 @18, -1 on (18,20), -2 @20, -3.
        let occ = occupants(&[18.0, 18.0, 20.0], &[0.0; 3]);
        let h = StepFunction::build(&occ, Aggregate::Signed).unwrap();
        assert_eq!(h.plateau_values(), &[3, -1, -3]);
        assert_eq!(h.point_values(), &[1, -2]);
        let band = solve_band(&occ).unwrap();
        assert!(!band.exact_zero);
        assert_eq!(band.residual, 1);
        // |h| = 1 at the point 18 and on (18, 20): hull [18, 20].
        assert_eq!((band.t_min, band.t_max), (18.0, 20.0));
    }

    #[test]
    fn band_constructor_validates() {
        assert!(ComfortBand::new(20.0, 17.0).is_err());
        assert!(ComfortBand::new(f64::NAN, 17.0).is_err());
        let b = ComfortBand::new(17.0, 20.0).unwrap();
        assert!(b.contains(17.0) && b.contains(20.0) && !b.contains(20.5));
        assert_eq!(b.width(), 3.0);
    }
}
