use proptest::prelude::*;

use thermal_comfort::aggregate::{Aggregate, StepFunction};
use thermal_comfort::policy::{sweep_row, tolerance_sweep};
use thermal_comfort::{
    power, setpoint, simulate, solve_band, total_signal, utility, worst_case_discomfort,
    ComfortBand, Occupant, ThermalParams, ToleranceSchedule,
};

fn occupant() -> impl Strategy<Value = Occupant> {
    // Quarter-degree lattice so band edges collide regularly.
    (60u32..100, 2u32..16, 0u32..12).prop_map(|(t, s, d)| {
        Occupant::new(0, t as f64 / 4.0, s as f64 / 4.0, d as f64 / 4.0).unwrap()
    })
}

fn occupants() -> impl Strategy<Value = Vec<Occupant>> {
    prop::collection::vec(occupant(), 1..12)
}

fn band() -> impl Strategy<Value = ComfortBand> {
    (14.0..22.0f64, 0.0..5.0f64).prop_map(|(lo, w)| ComfortBand::new(lo, lo + w).unwrap())
}

proptest! {
    #[test]
    fn solve_band_permutation_invariant(occ in occupants(), seed in any::<u64>()) {
        let mut shuffled = occ.clone();
        // Deterministic rotation + reversal as the permutation.
        let r = (seed as usize) % shuffled.len();
        shuffled.rotate_left(r);
        if seed % 2 == 0 {
            shuffled.reverse();
        }
        prop_assert_eq!(solve_band(&occ).unwrap(), solve_band(&shuffled).unwrap());
        let b = solve_band(&occ).unwrap();
        prop_assert_eq!(
            worst_case_discomfort(&occ, &b).unwrap(),
            worst_case_discomfort(&shuffled, &b).unwrap()
        );
    }

    #[test]
    fn band_is_the_zero_set(occ in occupants()) {
        let b = solve_band(&occ).unwrap();
        prop_assert!(b.t_min <= b.t_max);
        if b.exact_zero {
            prop_assert_eq!(b.residual, 0);
            let h = StepFunction::build(&occ, Aggregate::Signed).unwrap();
            // Every zero of h lies in the band.
            for s in h.segments().iter().filter(|s| s.value == 0) {
                prop_assert!(s.start >= b.t_min && s.end <= b.t_max);
            }
            // Midpoint of the band has h = 0 unless the band is a
            // degenerate closure of an open set.
            let mid = 0.5 * (b.t_min + b.t_max);
            if b.t_min < b.t_max {
                prop_assert_eq!(total_signal(&occ, mid).unwrap(), 0);
            }
        } else {
            prop_assert!(b.residual > 0);
        }
    }

    #[test]
    fn step_function_invariants(occ in occupants()) {
        let n = occ.len() as i32;
        let h = StepFunction::build(&occ, Aggregate::Signed).unwrap();
        prop_assert!(h.breakpoints().windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(h.plateau_values().len(), h.breakpoints().len() + 1);
        prop_assert_eq!(h.point_values().len(), h.breakpoints().len());
        prop_assert!(h.plateau_values().windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(h.plateau_values()[0], n);
        prop_assert_eq!(*h.plateau_values().last().unwrap(), -n);
        for (k, &b) in h.breakpoints().iter().enumerate() {
            prop_assert_eq!(h.point_values()[k], total_signal(&occ, b).unwrap());
        }
    }

    #[test]
    fn setpoint_in_band_and_optimal(b in band(), t_ext in -10.0..40.0f64, mu in 0.0..5.0f64) {
        let sp = setpoint(t_ext, &b).unwrap();
        prop_assert!(b.contains(sp));
        let p = power(t_ext, sp, mu).unwrap();
        for k in 0..=20 {
            let t = b.t_min + b.width() * k as f64 / 20.0;
            prop_assert!(p <= power(t_ext, t, mu).unwrap());
        }
    }

    #[test]
    fn setpoint_monotone_and_lipschitz(b in band(), x in -10.0..40.0f64, y in -10.0..40.0f64) {
        let (sx, sy) = (setpoint(x, &b).unwrap(), setpoint(y, &b).unwrap());
        if x <= y {
            prop_assert!(sx <= sy);
        }
        prop_assert!((sx - sy).abs() <= (x - y).abs());
    }

    #[test]
    fn utility_matches_dense_grid(o in occupant(), b in band()) {
        // Brute-force maximum of absolute discomfort over the band.
        let steps = (b.width() / 0.001).ceil() as usize;
        let grid_max = (0..=steps)
            .map(|i| (b.t_min + i as f64 * 0.001).min(b.t_max))
            .map(|t| o.abs_discomfort(t).unwrap())
            .fold(0.0, f64::max);
        prop_assert!((utility(&o, &b).unwrap() - grid_max).abs() <= 1e-6);
    }

    #[test]
    fn dead_band_means_no_control(occ in occupants(), t_ext in 0.0..30.0f64) {
        let trace = simulate(&occ, &ToleranceSchedule::default(), &ThermalParams::default(),
            |_| t_ext, 24.0, t_ext).unwrap();
        let b = solve_band(&occ).unwrap();
        let n = occ.len() as f64;
        for k in 0..trace.len() {
            let t = trace.room[k];
            if b.exact_zero && b.t_min < t && t < b.t_max {
                prop_assert_eq!(trace.control[k], 0.0);
            }
            prop_assert!(trace.control[k].abs() <= n);
            prop_assert_eq!(trace.h_series[k], total_signal(&occ, t).unwrap());
        }
    }
}

#[test]
fn sweep_band_edges_move_outward_once_intersecting() {
    let occ: Vec<Occupant> = [(17.0, 3.0), (18.0, 2.0), (19.5, 2.5), (20.0, 2.8)]
        .iter()
        .enumerate()
        .map(|(i, &(t, s))| Occupant::new(i as u32 + 1, t, s, 0.0).unwrap())
        .collect();
    let rows = tolerance_sweep(&occ, 0.0, 3.0, 0.03).unwrap();
    // The tolerance intervals intersect from Δ = 1.5 on.
    let intersecting: Vec<_> = rows.iter().filter(|r| r.tolerance >= 1.5).collect();
    for r in &intersecting {
        assert!((r.band.t_min - (20.0 - r.tolerance)).abs() < 1e-12);
        assert!((r.band.t_max - (17.0 + r.tolerance)).abs() < 1e-12);
    }
    for w in intersecting.windows(2) {
        assert!(w[1].band.t_min <= w[0].band.t_min);
        assert!(w[1].band.t_max >= w[0].band.t_max);
    }
    // Every row in this symmetric sweep attains h = 0.
    assert!(rows.iter().all(|r| r.band.exact_zero));
}

#[test]
fn sweep_is_order_stable_under_parallelism() {
    let occ: Vec<Occupant> = (0..8)
        .map(|i| Occupant::new(i, 16.0 + i as f64 * 0.7, 2.0, 0.0).unwrap())
        .collect();
    let parallel = tolerance_sweep(&occ, 0.0, 4.0, 0.01).unwrap();
    let grid = thermal_comfort::policy::tolerance_grid(0.0, 4.0, 0.01).unwrap();
    let sequential: Vec<_> = grid.iter().map(|&d| sweep_row(&occ, d).unwrap()).collect();
    assert_eq!(parallel, sequential);
}

#[test]
fn simulation_is_bit_reproducible() {
    let occ: Vec<Occupant> = (0..4)
        .map(|i| Occupant::new(i, 17.0 + i as f64, 2.0, 1.0).unwrap())
        .collect();
    let profile = thermal_comfort::OutdoorProfile {
        seed: 11,
        ..Default::default()
    };
    let a =
        thermal_comfort::run_simulation(&occ, &profile, &ThermalParams::default(), None).unwrap();
    let b =
        thermal_comfort::run_simulation(&occ, &profile, &ThermalParams::default(), None).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.room[0], a.outdoor[0]);
}

#[test]
fn stabilizing_sign_pushes_toward_band() {
    // Room just below T_min with cold outdoor: dT/dt > 0 when k > c·(T_min − T_ext).
    let occ = [Occupant::new(1, 18.5, 2.0, 1.5).unwrap()];
    let params = ThermalParams::default();
    for t_ext in [8.0, 10.0, 15.0] {
        let room = 17.0 - 1e-3;
        let w = thermal_comfort::control_input(&occ, room, &params).unwrap();
        let next = thermal_comfort::step(room, t_ext, w, &params);
        assert!(next > room, "T_ext = {t_ext}");
    }
}
