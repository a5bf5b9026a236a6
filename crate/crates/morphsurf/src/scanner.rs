//! Temporal simulation of addressing: per-pixel capacitor voltages under
//! DPA or progressive-scan schedules.
//!
//! Each pixel relaxes exponentially toward a per-step asymptote decided by
//! its contact condition:
//!
//! * both contacts driven at different potentials — charges toward its DC
//!   voltage from [`crossbar::solve_dc`] with `tau_charge`;
//! * both contacts driven at the same potential — discharges toward
//!   `residual_fraction · v_peak` with `tau_ground`;
//! * at least one contact floating while the network is driven somewhere —
//!   drifts toward its DC sneak-path voltage with `tau_float` (the slow
//!   retention constant);
//! * no driven contact anywhere — open circuit, self-discharges toward
//!   zero with `tau_float`.
//!
//! Updates are exact exponentials, so the step size only affects the trace
//! sampling, never the endpoint of a constant-drive interval.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::crossbar::{
    attenuation_map, compensate, dpa_drive, pixel_voltages, solve_dc, voltage_error,
    ContactState, CrossbarError, CrossbarNetwork, DriveAssignment, ErrorStats,
};
use crate::grid::VoltageGrid;

/// Settled-change threshold that ends a DPA hold early.
const DPA_SETTLE_TOL: f64 = 1e-6;
/// DPA hold length as a multiple of `tau_float`.
const DPA_SETTLE_TAUS: f64 = 12.0;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("target magnitude {0} V exceeds supply {1} V")]
    TargetExceedsSupply(f64, f64),
    #[error("dwell must be positive")]
    InvalidDwell,
    #[error("dt must be positive and divide every dwell")]
    InvalidTimeStep,
    #[error("fraction {0} outside (0, 1)")]
    InvalidFraction(f64),
    #[error("time constant must be positive")]
    InvalidTimeConstant,
    #[error("cycles must be at least 1")]
    InvalidCycles,
    #[error(transparent)]
    Crossbar(#[from] CrossbarError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Time constants of the pixel charge dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelDynamicsConfig {
    /// Charging constant when directly addressed (s).
    pub tau_charge: f64,
    /// Retention / sneak-drift constant while floating (s).
    pub tau_float: f64,
    /// Discharge constant when both contacts sit at one potential (s).
    pub tau_ground: f64,
    /// Fraction of the peak voltage retained after a full grounded
    /// discharge.
    pub residual_fraction: f64,
}

impl PixelDynamicsConfig {
    pub fn validate(&self) -> Result<(), ScanError> {
        for tau in [self.tau_charge, self.tau_float, self.tau_ground] {
            if !(tau > 0.0) {
                return Err(ScanError::InvalidTimeConstant);
            }
        }
        if !(0.0..1.0).contains(&self.residual_fraction) {
            return Err(ScanError::InvalidFraction(self.residual_fraction));
        }
        Ok(())
    }
}

impl Default for PixelDynamicsConfig {
    /// Constants measured on a single actuator strip: 4 % retention loss
    /// over 180 s floating and 85.3 % current decay over the 3 s row dwell.
    fn default() -> Self {
        calibrate_dynamics(0.04, 180.0, 0.853, 3.0).expect("default dynamics")
    }
}

/// Derives time constants from retention and current-decay measurements.
pub fn calibrate_dynamics(
    retention_frac: f64,
    retention_time: f64,
    current_decay_frac: f64,
    decay_time: f64,
) -> Result<PixelDynamicsConfig, ScanError> {
    for f in [retention_frac, current_decay_frac] {
        if !(f > 0.0 && f < 1.0) {
            return Err(ScanError::InvalidFraction(f));
        }
    }
    if !(retention_time > 0.0) || !(decay_time > 0.0) {
        return Err(ScanError::InvalidTimeConstant);
    }
    Ok(PixelDynamicsConfig {
        tau_charge: -decay_time / (1.0 - current_decay_frac).ln(),
        tau_float: -retention_time / (1.0 - retention_frac).ln(),
        tau_ground: 10.0,
        residual_fraction: 0.0,
    })
}

/// Per-pixel capacitor voltages at a simulation instant.
#[derive(Debug, Clone)]
pub struct PixelChargeState {
    v_cap: VoltageGrid,
    /// Signed voltage at the largest magnitude reached so far, the anchor
    /// for the grounded-discharge residual.
    v_peak: VoltageGrid,
    t: f64,
}

impl PixelChargeState {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            v_cap: VoltageGrid::zeros(n_rows, n_cols),
            v_peak: VoltageGrid::zeros(n_rows, n_cols),
            t: 0.0,
        }
    }

    pub fn from_grid(v_cap: VoltageGrid) -> Self {
        Self {
            v_peak: v_cap.clone(),
            v_cap,
            t: 0.0,
        }
    }

    pub fn voltages(&self) -> &VoltageGrid {
        &self.v_cap
    }

    pub fn time(&self) -> f64 {
        self.t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    /// Direct passive addressing: one simultaneous drive step.
    Dpa,
    /// Progressive scan: rows grounded one at a time, two polarity rounds.
    Ps,
}

/// One constant-drive interval.
#[derive(Debug, Clone)]
pub struct ScanStep {
    pub drive: DriveAssignment,
    pub dwell: f64,
}

/// Ordered drive steps plus the protocol tag they implement.
#[derive(Debug, Clone)]
pub struct ScanSchedule {
    pub steps: Vec<ScanStep>,
    pub protocol: Protocol,
}

impl ScanSchedule {
    pub fn total_dwell(&self) -> f64 {
        self.steps.iter().map(|s| s.dwell).sum()
    }
}

/// Builds the two-round progressive scan for a target grid.
///
/// Round one grounds each row in turn while the columns of that row's
/// positive pixels carry the negated target (the pixel, defined as row
/// minus column potential, then charges to +target); columns of
/// non-positive pixels float. Round two repeats for negative pixels.
pub fn ps_schedule(
    target: &VoltageGrid,
    dwell: f64,
    v_supply: f64,
) -> Result<ScanSchedule, ScanError> {
    if !(dwell > 0.0) {
        return Err(ScanError::InvalidDwell);
    }
    let max_abs = target.max_abs();
    if max_abs > v_supply + 1e-12 {
        return Err(ScanError::TargetExceedsSupply(max_abs, v_supply));
    }
    let (nr, nc) = (target.n_rows(), target.n_cols());
    let mut steps = Vec::with_capacity(2 * nr);
    for positive_round in [true, false] {
        for i in 0..nr {
            let mut drive = DriveAssignment::all_floating(nr, nc);
            drive.rows[i] = ContactState::Driven(0.0);
            for j in 0..nc {
                let t = target[(i, j)];
                let wanted = if positive_round { t > 0.0 } else { t < 0.0 };
                if wanted {
                    drive.cols[j] = ContactState::Driven(-t);
                }
            }
            steps.push(ScanStep { drive, dwell });
        }
    }
    Ok(ScanSchedule {
        steps,
        protocol: Protocol::Ps,
    })
}

/// Wraps a simultaneous drive in a single-step schedule.
pub fn dpa_schedule(drive: DriveAssignment, dwell: f64) -> Result<ScanSchedule, ScanError> {
    if !(dwell > 0.0) {
        return Err(ScanError::InvalidDwell);
    }
    Ok(ScanSchedule {
        steps: vec![ScanStep { drive, dwell }],
        protocol: Protocol::Dpa,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PixelCondition {
    /// Both contacts driven at distinct potentials.
    Addressed,
    /// Both contacts driven at one potential.
    Grounded,
    /// At least one contact floating, network driven somewhere.
    Drift,
    /// No driven contact in the whole network.
    Isolated,
}

/// Relaxation targets and circuit conditions for one schedule step.
struct StepSolution {
    condition: Vec<PixelCondition>,
    dc_voltage: VoltageGrid,
}

fn classify_step(
    net: &CrossbarNetwork,
    drive: &DriveAssignment,
) -> Result<StepSolution, ScanError> {
    let (nr, nc) = (net.n_rows(), net.n_cols());
    let any = drive.any_driven();
    let dc_voltage = if any {
        pixel_voltages(net, &solve_dc(net, drive)?)
    } else {
        VoltageGrid::zeros(nr, nc)
    };
    let mut condition = Vec::with_capacity(nr * nc);
    for i in 0..nr {
        for j in 0..nc {
            let rv = drive.rows[i].driven_value();
            let cv = drive.cols[j].driven_value();
            condition.push(match (rv, cv) {
                (Some(r), Some(c)) if (r - c).abs() < 1e-12 => PixelCondition::Grounded,
                (Some(_), Some(_)) => PixelCondition::Addressed,
                _ if any => PixelCondition::Drift,
                _ => PixelCondition::Isolated,
            });
        }
    }
    Ok(StepSolution {
        condition,
        dc_voltage,
    })
}

fn advance(
    state: &mut PixelChargeState,
    sol: &StepSolution,
    dyn_cfg: &PixelDynamicsConfig,
    dt: f64,
) {
    let nc = state.v_cap.n_cols();
    for i in 0..state.v_cap.n_rows() {
        for j in 0..nc {
            let (target, tau) = match sol.condition[i * nc + j] {
                PixelCondition::Addressed => (sol.dc_voltage[(i, j)], dyn_cfg.tau_charge),
                PixelCondition::Grounded => (
                    dyn_cfg.residual_fraction * state.v_peak[(i, j)],
                    dyn_cfg.tau_ground,
                ),
                PixelCondition::Drift => (sol.dc_voltage[(i, j)], dyn_cfg.tau_float),
                PixelCondition::Isolated => (0.0, dyn_cfg.tau_float),
            };
            let v = target + (state.v_cap[(i, j)] - target) * (-dt / tau).exp();
            state.v_cap[(i, j)] = v;
            if v.abs() > state.v_peak[(i, j)].abs() {
                state.v_peak[(i, j)] = v;
            }
        }
    }
    state.t += dt;
}

/// Advances the state by `dt` under a constant drive.
pub fn step(
    state: &PixelChargeState,
    net: &CrossbarNetwork,
    drive: &DriveAssignment,
    dyn_cfg: &PixelDynamicsConfig,
    dt: f64,
) -> Result<PixelChargeState, ScanError> {
    dyn_cfg.validate()?;
    if dt < 0.0 {
        return Err(ScanError::InvalidTimeStep);
    }
    let mut next = state.clone();
    if dt == 0.0 {
        return Ok(next);
    }
    let sol = classify_step(net, drive)?;
    advance(&mut next, &sol, dyn_cfg, dt);
    Ok(next)
}

/// One trace sample: simulation time and the pixel voltages.
pub type TraceSample = (f64, VoltageGrid);

/// Executes a schedule `cycles` times, sampling every `dt`.
///
/// Returns the sampled trace and the settled grid after the final step.
/// DPA holds stop early once the grid changes by less than 1e-6 V between
/// samples.
pub fn run(
    net: &CrossbarNetwork,
    schedule: &ScanSchedule,
    dyn_cfg: &PixelDynamicsConfig,
    cycles: usize,
    dt: f64,
) -> Result<(Vec<TraceSample>, VoltageGrid), ScanError> {
    dyn_cfg.validate()?;
    if cycles < 1 {
        return Err(ScanError::InvalidCycles);
    }
    if !(dt > 0.0) {
        return Err(ScanError::InvalidTimeStep);
    }
    let substeps: Vec<usize> = schedule
        .steps
        .iter()
        .map(|s| {
            let n = s.dwell / dt;
            let rounded = n.round();
            if (n - rounded).abs() > 1e-6 * n.max(1.0) || rounded < 1.0 {
                Err(ScanError::InvalidTimeStep)
            } else {
                Ok(rounded as usize)
            }
        })
        .collect::<Result<_, _>>()?;

    let solutions: Vec<StepSolution> = schedule
        .steps
        .iter()
        .map(|s| classify_step(net, &s.drive))
        .collect::<Result<_, _>>()?;

    let mut state = PixelChargeState::new(net.n_rows(), net.n_cols());
    let mut trace: Vec<TraceSample> = vec![(0.0, state.v_cap.clone())];
    let settle_early = schedule.protocol == Protocol::Dpa;
    'outer: for _ in 0..cycles {
        for (sol, &n_sub) in solutions.iter().zip(&substeps) {
            for _ in 0..n_sub {
                let prev = state.v_cap.clone();
                advance(&mut state, sol, dyn_cfg, dt);
                trace.push((state.t, state.v_cap.clone()));
                if settle_early {
                    let change = state
                        .v_cap
                        .flatten()
                        .iter()
                        .zip(prev.flatten())
                        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
                    if change < DPA_SETTLE_TOL {
                        break 'outer;
                    }
                }
            }
        }
    }
    let settled = state.v_cap.clone();
    Ok((trace, settled))
}

/// Writes a trace as CSV: `t, pixel_0_0, …, pixel_{n-1}_{n-1}` row-major.
pub fn write_trace_csv(trace: &[TraceSample], path: &Path) -> Result<(), ScanError> {
    let mut s = String::new();
    if let Some((_, first)) = trace.first() {
        s.push('t');
        for i in 0..first.n_rows() {
            for j in 0..first.n_cols() {
                let _ = write!(s, ",pixel_{i}_{j}");
            }
        }
        s.push('\n');
    }
    for (t, grid) in trace {
        let _ = write!(s, "{t:.6}");
        for (_, v) in grid.iter() {
            let _ = write!(s, ",{v:.9e}");
        }
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Knobs for the end-to-end scan of a target grid.
#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub dwell: f64,
    pub dt: f64,
    pub cycles: usize,
    pub v_supply: f64,
    /// Divide the command grid by the attenuation map before scheduling.
    pub compensate: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            dwell: 3.0,
            dt: 0.1,
            cycles: 3,
            v_supply: 1.0,
            compensate: false,
        }
    }
}

/// Everything produced by scanning a target.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub settled: VoltageGrid,
    pub trace: Vec<TraceSample>,
    pub stats: ErrorStats,
}

/// Schedules, runs, and scores one target under the chosen protocol.
///
/// Error statistics compare the settled grid against the *uncompensated*
/// target, normalized by its largest magnitude (1 V for the demo grids).
/// DPA is held at its drive until the grid settles.
pub fn scan_target(
    net: &CrossbarNetwork,
    target: &VoltageGrid,
    protocol: Protocol,
    dyn_cfg: &PixelDynamicsConfig,
    opts: &ScanOptions,
) -> Result<ScanOutcome, ScanError> {
    let command = if opts.compensate {
        compensate(target, &attenuation_map(net, 1.0)?)?
    } else {
        target.clone()
    };
    let (trace, settled) = match protocol {
        Protocol::Ps => {
            let supply = opts.v_supply.max(command.max_abs());
            let schedule = ps_schedule(&command, opts.dwell, supply)?;
            run(net, &schedule, dyn_cfg, opts.cycles, opts.dt)?
        }
        Protocol::Dpa => {
            let drive = dpa_drive(&command)?;
            let dwell = DPA_SETTLE_TAUS * dyn_cfg.tau_float;
            let schedule = dpa_schedule(drive, dwell)?;
            run(net, &schedule, dyn_cfg, 1, dwell / 256.0)?
        }
    };
    let v_ref = if target.max_abs() > 0.0 { target.max_abs() } else { 1.0 };
    let stats = voltage_error(&settled, target, v_ref)?;
    Ok(ScanOutcome {
        settled,
        trace,
        stats,
    })
}

/// The four demonstration voltage distributions, 1 V scale, n×n.
///
/// I: one positive pixel. II: two opposite pixels on the leading diagonal.
/// III: an alternating pattern with every row and column active, exactly
/// producible by simultaneous drives. IV: the identity diagonal, which no
/// row/column decomposition can produce.
pub fn demo_target(which: usize, n: usize) -> VoltageGrid {
    match which {
        1 => VoltageGrid::from_fn(n, n, |i, j| if i == 1 && j == 1 { 1.0 } else { 0.0 }),
        2 => VoltageGrid::from_fn(n, n, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (1, 1) => -1.0,
            _ => 0.0,
        }),
        3 => VoltageGrid::from_fn(n, n, |i, j| {
            let si = if i % 2 == 0 { 0.5 } else { -0.5 };
            let sj = if j % 2 == 0 { 0.5 } else { -0.5 };
            si + sj
        }),
        4 => VoltageGrid::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 }),
        _ => panic!("demo index must be 1..=4"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossbar::{build_network, CrossbarConfig};

    fn ideal_net(n: usize) -> CrossbarNetwork {
        build_network(&CrossbarConfig {
            n_rows: n,
            n_cols: n,
            r_segment: 1e-9,
            g_pixel: 1.0,
            g_leak: 0.0,
            blocker_factor: 1.0,
        })
        .unwrap()
    }

    fn default_net() -> CrossbarNetwork {
        build_network(&CrossbarConfig {
            blocker_factor: crate::crossbar::calibrated::BLOCKER_FACTOR,
            ..CrossbarConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn calibrate_matches_quoted_measurements() {
        let dyn_cfg = calibrate_dynamics(0.04, 180.0, 0.853, 3.0).unwrap();
        let tau_float_ref = -180.0 / 0.96f64.ln();
        let tau_charge_ref = -3.0 / (1.0 - 0.853f64).ln();
        assert!((dyn_cfg.tau_float - tau_float_ref).abs() / tau_float_ref < 1e-6);
        assert!((dyn_cfg.tau_charge - tau_charge_ref).abs() / tau_charge_ref < 1e-6);
        // half-life identity
        let half = calibrate_dynamics(0.5, 7.0, 0.5, 7.0).unwrap();
        assert!((half.tau_float - 7.0 / 2.0f64.ln()).abs() < 1e-12);
        // boundary fractions rejected
        assert!(calibrate_dynamics(1.0, 180.0, 0.853, 3.0).is_err());
        assert!(calibrate_dynamics(0.04, 180.0, 0.0, 3.0).is_err());
    }

    #[test]
    fn step_dt_zero_is_identity() {
        let net = ideal_net(2);
        let dyn_cfg = PixelDynamicsConfig::default();
        let state = PixelChargeState::from_grid(VoltageGrid::from_fn(2, 2, |i, j| {
            0.1 * (i as f64 + 1.0) - 0.05 * j as f64
        }));
        let drive = DriveAssignment::all_driven(&[1.0, 0.0], &[0.0, 0.0]);
        let next = step(&state, &net, &drive, &dyn_cfg, 0.0).unwrap();
        assert_eq!(next.voltages(), state.voltages());
        assert_eq!(next.time(), state.time());
    }

    #[test]
    fn step_addressed_charges_one_time_constant() {
        let net = ideal_net(1);
        let dyn_cfg = PixelDynamicsConfig::default();
        let state = PixelChargeState::new(1, 1);
        let drive = DriveAssignment::all_driven(&[1.0], &[0.0]);
        let next = step(&state, &net, &drive, &dyn_cfg, dyn_cfg.tau_charge).unwrap();
        let expected = 1.0 - (-1.0f64).exp();
        assert!((next.voltages()[(0, 0)] - expected).abs() < 1e-9);
    }

    #[test]
    fn step_floating_retains_96_percent_after_180s() {
        let net = ideal_net(2);
        let dyn_cfg = PixelDynamicsConfig::default();
        let v0 = VoltageGrid::from_fn(2, 2, |_, _| 0.8);
        let state = PixelChargeState::from_grid(v0);
        let drive = DriveAssignment::all_floating(2, 2);
        let next = step(&state, &net, &drive, &dyn_cfg, 180.0).unwrap();
        for (_, v) in next.voltages().iter() {
            assert!((v / 0.8 - 0.96).abs() < 1e-3, "retained {}", v / 0.8);
        }
    }

    #[test]
    fn step_grounded_discharges_toward_residual() {
        let net = ideal_net(1);
        let mut dyn_cfg = PixelDynamicsConfig::default();
        dyn_cfg.residual_fraction = 0.1;
        let state = PixelChargeState::from_grid(VoltageGrid::from_fn(1, 1, |_, _| 0.8));
        let drive = DriveAssignment::all_driven(&[0.0], &[0.0]);
        let next = step(&state, &net, &drive, &dyn_cfg, 1000.0 * dyn_cfg.tau_ground).unwrap();
        assert!((next.voltages()[(0, 0)] - 0.08).abs() < 1e-9);
    }

    #[test]
    fn ps_schedule_shapes() {
        let zero = VoltageGrid::zeros(6, 6);
        let sched = ps_schedule(&zero, 3.0, 1.0).unwrap();
        assert_eq!(sched.steps.len(), 12);
        for s in &sched.steps {
            assert!(s.drive.cols.iter().all(|c| matches!(c, ContactState::Floating)));
            assert_eq!(
                s.drive.rows.iter().filter(|r| r.driven_value().is_some()).count(),
                1
            );
        }

        let mut single = VoltageGrid::zeros(6, 6);
        single[(0, 0)] = 0.8;
        let sched = ps_schedule(&single, 3.0, 1.0).unwrap();
        // row 0, positive round drives column 0 at the negated target
        assert_eq!(sched.steps[0].drive.cols[0].driven_value(), Some(-0.8));
        for (k, s) in sched.steps.iter().enumerate() {
            if k != 0 {
                assert!(s.drive.cols.iter().all(|c| matches!(c, ContactState::Floating)));
            }
        }

        let mixed = VoltageGrid::from_vec(2, 2, vec![0.5, -0.25, 0.0, 1.0]).unwrap();
        let sched = ps_schedule(&mixed, 2.0, 1.0).unwrap();
        assert_eq!(sched.steps.len(), 4);
        // round 1 row 0: only the positive pixel's column driven
        assert_eq!(sched.steps[0].drive.cols[0].driven_value(), Some(-0.5));
        assert!(matches!(sched.steps[0].drive.cols[1], ContactState::Floating));
        // round 1 row 1: pixel (1,1) positive
        assert_eq!(sched.steps[1].drive.cols[1].driven_value(), Some(-1.0));
        // round 2 row 0: pixel (0,1) negative, column driven to +0.25
        assert_eq!(sched.steps[2].drive.cols[1].driven_value(), Some(0.25));
        assert!(matches!(sched.steps[2].drive.cols[0], ContactState::Floating));
        // round 2 row 1: nothing negative
        assert!(sched.steps[3].drive.cols.iter().all(|c| matches!(c, ContactState::Floating)));

        let too_big = VoltageGrid::from_vec(1, 1, vec![1.5]).unwrap();
        assert!(matches!(
            ps_schedule(&too_big, 3.0, 1.0),
            Err(ScanError::TargetExceedsSupply(_, _))
        ));
    }

    #[test]
    fn ps_duty_cycle_one_over_n_rows() {
        let target = VoltageGrid::from_fn(6, 6, |i, j| {
            0.05 * ((i * 6 + j) as f64 - 17.5) // all pixels non-zero, both signs
        });
        let sched = ps_schedule(&target, 3.0, 1.0).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let addressed: f64 = sched
                    .steps
                    .iter()
                    .filter(|s| {
                        s.drive.rows[i].driven_value().is_some()
                            && s.drive.cols[j].driven_value().is_some()
                    })
                    .map(|s| s.dwell)
                    .sum();
                assert!((addressed - 3.0).abs() < 1e-12, "pixel ({i},{j})");
            }
        }
        // per round of n_rows steps that is a 1/n_rows duty cycle
        assert!((3.0 / (6.0 * 3.0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn run_zero_target_settles_to_zero() {
        let net = default_net();
        let dyn_cfg = PixelDynamicsConfig::default();
        let sched = ps_schedule(&VoltageGrid::zeros(6, 6), 3.0, 1.0).unwrap();
        let (_, settled) = run(&net, &sched, &dyn_cfg, 2, 0.1).unwrap();
        assert!(settled.max_abs() < 1e-9);
    }

    #[test]
    fn run_rejects_non_dividing_dt() {
        let net = default_net();
        let sched = ps_schedule(&VoltageGrid::zeros(6, 6), 3.0, 1.0).unwrap();
        assert!(matches!(
            run(&net, &sched, &PixelDynamicsConfig::default(), 1, 0.7),
            Err(ScanError::InvalidTimeStep)
        ));
    }

    #[test]
    fn perfect_retention_one_cycle_reaches_charging_asymptote() {
        let net = ideal_net(4);
        let mut dyn_cfg = PixelDynamicsConfig::default();
        dyn_cfg.tau_float = f64::INFINITY;
        let target = VoltageGrid::from_fn(4, 4, |i, j| {
            0.1 * (i as f64 + 1.0) * if (i + j) % 2 == 0 { 1.0 } else { -1.0 }
        });
        let sched = ps_schedule(&target, 3.0, 1.0).unwrap();
        let (_, settled) = run(&net, &sched, &dyn_cfg, 1, 0.1).unwrap();
        let bound = (-3.0 / dyn_cfg.tau_charge).exp();
        for i in 0..4 {
            for j in 0..4 {
                let err = (settled[(i, j)] - target[(i, j)]).abs();
                assert!(
                    err <= bound * target[(i, j)].abs() + 1e-12,
                    "pixel ({i},{j}): err {err}"
                );
            }
        }
    }

    #[test]
    fn settled_independent_of_row_order_with_perfect_retention() {
        let net = ideal_net(3);
        let mut dyn_cfg = PixelDynamicsConfig::default();
        dyn_cfg.tau_float = f64::INFINITY;
        let target = VoltageGrid::from_vec(
            3,
            3,
            vec![0.2, -0.4, 0.0, 0.9, 0.1, -0.7, 0.0, 0.55, -0.15],
        )
        .unwrap();
        let sched = ps_schedule(&target, 3.0, 1.0).unwrap();
        let mut permuted = sched.clone();
        permuted.steps.swap(0, 2);
        permuted.steps.swap(3, 4);
        let (_, a) = run(&net, &sched, &dyn_cfg, 2, 0.5).unwrap();
        let (_, b) = run(&net, &permuted, &dyn_cfg, 2, 0.5).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[(i, j)] - b[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_row_array_ps_equals_dpa() {
        let net = build_network(&CrossbarConfig {
            n_rows: 1,
            n_cols: 4,
            ..CrossbarConfig::default()
        })
        .unwrap();
        let dyn_cfg = PixelDynamicsConfig::default();
        let target = VoltageGrid::from_vec(1, 4, vec![0.6, -0.3, 0.0, 0.9]).unwrap();
        let opts = ScanOptions {
            cycles: 8,
            ..ScanOptions::default()
        };
        let ps = scan_target(&net, &target, Protocol::Ps, &dyn_cfg, &opts).unwrap();
        let dpa = scan_target(&net, &target, Protocol::Dpa, &dyn_cfg, &opts).unwrap();
        for j in 0..4 {
            assert!(
                (ps.settled[(0, j)] - dpa.settled[(0, j)]).abs() < 5e-3,
                "col {j}: ps {} dpa {}",
                ps.settled[(0, j)],
                dpa.settled[(0, j)]
            );
        }
    }

    #[test]
    fn dpa_demo3_settles_to_dc_solution() {
        let net = default_net();
        let dyn_cfg = PixelDynamicsConfig::default();
        let target = demo_target(3, 6);
        let drive = dpa_drive(&target).unwrap();
        let expected = pixel_voltages(&net, &solve_dc(&net, &drive).unwrap());
        let out = scan_target(&net, &target, Protocol::Dpa, &dyn_cfg, &ScanOptions::default())
            .unwrap();
        for i in 0..6 {
            for j in 0..6 {
                // grounded pixels are pulled to exactly zero instead of the
                // small DC ripple, so compare only actively driven pixels
                if target[(i, j)] != 0.0 {
                    assert!(
                        (out.settled[(i, j)] - expected[(i, j)]).abs() < 1e-4,
                        "pixel ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn monotone_convergence_over_cycles() {
        let net = default_net();
        let dyn_cfg = PixelDynamicsConfig::default();
        let target = demo_target(1, 6);
        let mut prev = f64::INFINITY;
        for cycles in 1..=3 {
            let opts = ScanOptions {
                cycles,
                ..ScanOptions::default()
            };
            let out = scan_target(&net, &target, Protocol::Ps, &dyn_cfg, &opts).unwrap();
            assert!(
                out.stats.mean_abs_error_pct <= prev + 1e-9,
                "cycle {cycles}: {} vs {}",
                out.stats.mean_abs_error_pct,
                prev
            );
            prev = out.stats.mean_abs_error_pct;
        }
    }

    #[test]
    fn voltages_stay_within_supply() {
        let net = default_net();
        let dyn_cfg = PixelDynamicsConfig::default();
        let target = VoltageGrid::from_fn(6, 6, |i, j| {
            (((i * 7 + j * 13) % 41) as f64 - 20.0) * 0.05
        });
        let sched = ps_schedule(&target, 3.0, 1.0).unwrap();
        let (trace, _) = run(&net, &sched, &dyn_cfg, 2, 0.1).unwrap();
        for (_, grid) in &trace {
            assert!(grid.max_abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn ps_beats_dpa_on_demo1() {
        let net = default_net();
        let dyn_cfg = PixelDynamicsConfig::default();
        let target = demo_target(1, 6);
        let opts = ScanOptions::default();
        let ps = scan_target(&net, &target, Protocol::Ps, &dyn_cfg, &opts).unwrap();
        let dpa = scan_target(&net, &target, Protocol::Dpa, &dyn_cfg, &opts).unwrap();
        assert!(
            ps.stats.mean_abs_error_pct < dpa.stats.mean_abs_error_pct,
            "ps {} vs dpa {}",
            ps.stats.mean_abs_error_pct,
            dpa.stats.mean_abs_error_pct
        );
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let net = ideal_net(2);
        let sched = ps_schedule(&VoltageGrid::zeros(2, 2), 1.0, 1.0).unwrap();
        let (trace, _) = run(&net, &sched, &PixelDynamicsConfig::default(), 1, 0.5).unwrap();
        let dir = std::env::temp_dir().join("morphsurf_trace_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("trace.csv");
        write_trace_csv(&trace, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,pixel_0_0,pixel_0_1,pixel_1_0,pixel_1_1");
        assert_eq!(lines.count(), trace.len());
    }
}
