//! Static (DC) electrical model of the crossbar array.
//!
//! Every pixel is a two-conductance ladder `r_ij —2g— m_ij —2g— c_ij`
//! (series total `g_pixel`) whose membrane midpoint `m_ij` carries lateral
//! leakage edges to its 4-neighbors. Row and column electrodes are chains
//! of `1/r_segment` links from a contact node to the far end of the array.
//! Node potentials follow from Kirchhoff's current law with driven contacts
//! pinned and floating contacts left as ordinary nodes.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::grid::VoltageGrid;

/// Largest per-side pixel count solved by dense factorization; bigger
/// networks go through preconditioned conjugate gradients.
const DENSE_SIDE_LIMIT: usize = 16;

/// Relative tolerance of the linear solve (KCL residual is checked against
/// a looser 1e-9 in tests).
const SOLVE_TOL: f64 = 1e-12;

/// Tolerance used by the rank-decomposition checks.
pub const DPA_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CrossbarError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("drive has {0} row / {1} col states, network expects {2} / {3}")]
    DriveShape(usize, usize, usize, usize),
    #[error("no driven contact: node potentials are undetermined")]
    SingularSystem,
    #[error("linear solve failed, relative residual {residual:.3e}")]
    SolverFailure { residual: f64 },
    #[error("grid dimensions mismatch")]
    DimensionMismatch,
    #[error("attenuation entry is zero at ({0}, {1})")]
    DivisionByZero(usize, usize),
    #[error("target is not representable as row minus column drives")]
    NotRepresentable,
    #[error("drive value is not finite")]
    NonFiniteDrive,
}

/// Geometry and element values of the array.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossbarConfig {
    pub n_rows: usize,
    pub n_cols: usize,
    /// Electrode resistance (Ω) per segment between adjacent crossings and
    /// from a contact to the first crossing.
    pub r_segment: f64,
    /// Through-thickness pixel conductance (S).
    pub g_pixel: f64,
    /// Lateral inter-pixel leakage conductance (S) between membrane
    /// midpoints of 4-neighbors.
    pub g_leak: f64,
    /// Multiplier in (0, 1] applied to `g_leak` when blockers are present.
    pub blocker_factor: f64,
}

impl CrossbarConfig {
    pub fn validate(&self) -> Result<(), CrossbarError> {
        let err = |m: &str| Err(CrossbarError::InvalidConfig(m.into()));
        if self.n_rows < 1 || self.n_cols < 1 {
            return err("n_rows and n_cols must be at least 1");
        }
        if !(self.r_segment > 0.0) || !self.r_segment.is_finite() {
            return err("r_segment must be positive");
        }
        if !(self.g_pixel > 0.0) || !self.g_pixel.is_finite() {
            return err("g_pixel must be positive");
        }
        if self.g_leak < 0.0 || !self.g_leak.is_finite() {
            return err("g_leak must be non-negative");
        }
        if !(self.blocker_factor > 0.0 && self.blocker_factor <= 1.0) {
            return err("blocker_factor must lie in (0, 1]");
        }
        Ok(())
    }
}

impl Default for CrossbarConfig {
    /// Desk-scale defaults: 6×6 array, unit pixel conductance, electrode
    /// resistance calibrated so the far-corner attenuation is 0.796 (see
    /// `calibrate_r_segment`), and leakage strong enough to reproduce the
    /// measured crosstalk orderings. `blocker_factor` is 1 (no blockers).
    fn default() -> Self {
        Self {
            n_rows: 6,
            n_cols: 6,
            r_segment: calibrated::R_SEGMENT,
            g_pixel: 1.0,
            g_leak: calibrated::G_LEAK,
            blocker_factor: 1.0,
        }
    }
}

/// Frozen outputs of the calibration routines, used as defaults.
pub mod calibrated {
    /// Far-corner attenuation the electrode calibration targets.
    pub const FAR_ATTENUATION: f64 = 0.796;
    /// `r_segment` (Ω) for the default 6×6 array with `g_pixel` = 1 S,
    /// bisected so the far-corner entry of the attenuation map equals
    /// [`FAR_ATTENUATION`]. Recompute with `calibrate_r_segment`.
    pub const R_SEGMENT: f64 = 9.5691635675479204e-3;
    /// Default lateral leakage (S); the blocker factor scales this down.
    pub const G_LEAK: f64 = 0.35;
    /// Leakage multiplier with polymer blockers printed in the gaps.
    pub const BLOCKER_FACTOR: f64 = 0.2;
}

/// One conductance between two node indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub conductance: f64,
}

/// Immutable node/conductance graph of an array.
#[derive(Debug, Clone)]
pub struct CrossbarNetwork {
    cfg: CrossbarConfig,
    edges: Vec<Edge>,
    node_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContactState {
    Driven(f64),
    Floating,
}

impl ContactState {
    pub fn driven_value(&self) -> Option<f64> {
        match self {
            ContactState::Driven(v) => Some(*v),
            ContactState::Floating => None,
        }
    }
}

/// Per-contact drive pattern for one addressing step.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveAssignment {
    pub rows: Vec<ContactState>,
    pub cols: Vec<ContactState>,
}

impl DriveAssignment {
    pub fn all_floating(n_rows: usize, n_cols: usize) -> Self {
        Self {
            rows: vec![ContactState::Floating; n_rows],
            cols: vec![ContactState::Floating; n_cols],
        }
    }

    pub fn all_driven(row_volts: &[f64], col_volts: &[f64]) -> Self {
        Self {
            rows: row_volts.iter().map(|&v| ContactState::Driven(v)).collect(),
            cols: col_volts.iter().map(|&v| ContactState::Driven(v)).collect(),
        }
    }

    pub fn any_driven(&self) -> bool {
        self.rows
            .iter()
            .chain(self.cols.iter())
            .any(|s| matches!(s, ContactState::Driven(_)))
    }

    /// Scales every driven voltage by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let f = |s: &ContactState| match s {
            ContactState::Driven(v) => ContactState::Driven(v * k),
            ContactState::Floating => ContactState::Floating,
        };
        Self {
            rows: self.rows.iter().map(f).collect(),
            cols: self.cols.iter().map(f).collect(),
        }
    }
}

/// Potentials for every network node, driven contacts pinned exactly.
#[derive(Debug, Clone)]
pub struct NodePotentials {
    potentials: Vec<f64>,
}

impl NodePotentials {
    pub fn get(&self, node: u32) -> f64 {
        self.potentials[node as usize]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.potentials
    }
}

/// Voltage error statistics relative to a reference voltage.
#[derive(Debug, Clone)]
pub struct ErrorStats {
    pub mean_abs_error_pct: f64,
    pub max_abs_error_pct: f64,
    pub per_pixel_error: VoltageGrid,
}

impl CrossbarNetwork {
    pub fn config(&self) -> &CrossbarConfig {
        &self.cfg
    }

    pub fn n_rows(&self) -> usize {
        self.cfg.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cfg.n_cols
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn row_contact(&self, i: usize) -> u32 {
        debug_assert!(i < self.cfg.n_rows);
        i as u32
    }

    pub fn col_contact(&self, j: usize) -> u32 {
        debug_assert!(j < self.cfg.n_cols);
        (self.cfg.n_rows + j) as u32
    }

    /// Row-side crossing node of pixel (i, j).
    pub fn r_node(&self, i: usize, j: usize) -> u32 {
        let (nr, nc) = (self.cfg.n_rows, self.cfg.n_cols);
        (nr + nc + i * nc + j) as u32
    }

    /// Membrane midpoint node of pixel (i, j).
    pub fn m_node(&self, i: usize, j: usize) -> u32 {
        let (nr, nc) = (self.cfg.n_rows, self.cfg.n_cols);
        (nr + nc + nr * nc + i * nc + j) as u32
    }

    /// Column-side crossing node of pixel (i, j).
    pub fn c_node(&self, i: usize, j: usize) -> u32 {
        let (nr, nc) = (self.cfg.n_rows, self.cfg.n_cols);
        (nr + nc + 2 * nr * nc + i * nc + j) as u32
    }

    /// Number of lateral leakage edges (4-neighbor pairs of membrane nodes).
    pub fn leak_edge_count(&self) -> usize {
        let (nr, nc) = (self.cfg.n_rows, self.cfg.n_cols);
        nr * (nc - 1) + nc * (nr - 1)
    }
}

/// Builds the conductance network for a config.
pub fn build_network(cfg: &CrossbarConfig) -> Result<CrossbarNetwork, CrossbarError> {
    cfg.validate()?;
    let (nr, nc) = (cfg.n_rows, cfg.n_cols);
    let node_count = 3 * nr * nc + nr + nc;
    let g_seg = 1.0 / cfg.r_segment;
    let g_half = 2.0 * cfg.g_pixel;
    let g_leak = cfg.g_leak * cfg.blocker_factor;

    let mut net = CrossbarNetwork {
        cfg: cfg.clone(),
        edges: Vec::with_capacity(5 * nr * nc),
        node_count,
    };

    for i in 0..nr {
        for j in 0..nc {
            // pixel ladder: r —2g— m —2g— c
            net.edges.push(Edge {
                a: net.r_node(i, j),
                b: net.m_node(i, j),
                conductance: g_half,
            });
            net.edges.push(Edge {
                a: net.m_node(i, j),
                b: net.c_node(i, j),
                conductance: g_half,
            });
            // lateral leakage, right and down neighbors
            if j + 1 < nc {
                net.edges.push(Edge {
                    a: net.m_node(i, j),
                    b: net.m_node(i, j + 1),
                    conductance: g_leak,
                });
            }
            if i + 1 < nr {
                net.edges.push(Edge {
                    a: net.m_node(i, j),
                    b: net.m_node(i + 1, j),
                    conductance: g_leak,
                });
            }
        }
    }
    // electrode chains: contact → first crossing → … → last crossing
    for i in 0..nr {
        net.edges.push(Edge {
            a: net.row_contact(i),
            b: net.r_node(i, 0),
            conductance: g_seg,
        });
        for j in 0..nc - 1 {
            net.edges.push(Edge {
                a: net.r_node(i, j),
                b: net.r_node(i, j + 1),
                conductance: g_seg,
            });
        }
    }
    for j in 0..nc {
        net.edges.push(Edge {
            a: net.col_contact(j),
            b: net.c_node(0, j),
            conductance: g_seg,
        });
        for i in 0..nr - 1 {
            net.edges.push(Edge {
                a: net.c_node(i, j),
                b: net.c_node(i + 1, j),
                conductance: g_seg,
            });
        }
    }
    Ok(net)
}

fn pinned_potentials(
    net: &CrossbarNetwork,
    drive: &DriveAssignment,
) -> Result<Vec<Option<f64>>, CrossbarError> {
    if drive.rows.len() != net.cfg.n_rows || drive.cols.len() != net.cfg.n_cols {
        return Err(CrossbarError::DriveShape(
            drive.rows.len(),
            drive.cols.len(),
            net.cfg.n_rows,
            net.cfg.n_cols,
        ));
    }
    let mut pinned = vec![None; net.node_count];
    for (i, s) in drive.rows.iter().enumerate() {
        if let Some(v) = s.driven_value() {
            if !v.is_finite() {
                return Err(CrossbarError::NonFiniteDrive);
            }
            pinned[net.row_contact(i) as usize] = Some(v);
        }
    }
    for (j, s) in drive.cols.iter().enumerate() {
        if let Some(v) = s.driven_value() {
            if !v.is_finite() {
                return Err(CrossbarError::NonFiniteDrive);
            }
            pinned[net.col_contact(j) as usize] = Some(v);
        }
    }
    Ok(pinned)
}

/// Solves node potentials under a drive. Driven contacts are pinned;
/// floating contacts are ordinary nodes with no external current.
pub fn solve_dc(
    net: &CrossbarNetwork,
    drive: &DriveAssignment,
) -> Result<NodePotentials, CrossbarError> {
    let pinned = pinned_potentials(net, drive)?;
    if pinned.iter().all(|p| p.is_none()) {
        return Err(CrossbarError::SingularSystem);
    }

    // map free nodes to contiguous indices
    let mut free_index = vec![usize::MAX; net.node_count];
    let mut free_nodes = Vec::new();
    for n in 0..net.node_count {
        if pinned[n].is_none() {
            free_index[n] = free_nodes.len();
            free_nodes.push(n);
        }
    }
    let nf = free_nodes.len();

    let mut diag = vec![0.0; nf];
    let mut rhs = vec![0.0; nf];
    // off-diagonal couplings between free nodes
    let mut off: Vec<(usize, usize, f64)> = Vec::with_capacity(net.edges.len());
    for e in &net.edges {
        if e.conductance == 0.0 {
            continue;
        }
        let (a, b) = (e.a as usize, e.b as usize);
        match (pinned[a], pinned[b]) {
            (None, None) => {
                let (fa, fb) = (free_index[a], free_index[b]);
                diag[fa] += e.conductance;
                diag[fb] += e.conductance;
                off.push((fa, fb, e.conductance));
            }
            (None, Some(vb)) => {
                let fa = free_index[a];
                diag[fa] += e.conductance;
                rhs[fa] += e.conductance * vb;
            }
            (Some(va), None) => {
                let fb = free_index[b];
                diag[fb] += e.conductance;
                rhs[fb] += e.conductance * va;
            }
            (Some(_), Some(_)) => {}
        }
    }

    let x = if net.cfg.n_rows.max(net.cfg.n_cols) <= DENSE_SIDE_LIMIT {
        solve_dense(&diag, &off, &rhs)?
    } else {
        solve_cg(&diag, &off, &rhs)?
    };

    let mut potentials = vec![0.0; net.node_count];
    for n in 0..net.node_count {
        potentials[n] = match pinned[n] {
            Some(v) => v,
            None => x[free_index[n]],
        };
    }
    Ok(NodePotentials { potentials })
}

fn solve_dense(
    diag: &[f64],
    off: &[(usize, usize, f64)],
    rhs: &[f64],
) -> Result<Vec<f64>, CrossbarError> {
    let nf = diag.len();
    let mut a = DMatrix::<f64>::zeros(nf, nf);
    for i in 0..nf {
        a[(i, i)] = diag[i];
    }
    for &(i, j, g) in off {
        a[(i, j)] -= g;
        a[(j, i)] -= g;
    }
    let b = DVector::from_column_slice(rhs);
    let x = match a.clone().cholesky() {
        Some(ch) => ch.solve(&b),
        None => a
            .clone()
            .lu()
            .solve(&b)
            .ok_or(CrossbarError::SolverFailure { residual: f64::NAN })?,
    };
    let r = (&a * &x - &b).norm();
    let scale = b.norm().max(1e-300);
    if r / scale > 1e-8 {
        return Err(CrossbarError::SolverFailure { residual: r / scale });
    }
    Ok(x.data.into())
}

fn solve_cg(
    diag: &[f64],
    off: &[(usize, usize, f64)],
    rhs: &[f64],
) -> Result<Vec<f64>, CrossbarError> {
    let nf = diag.len();
    let matvec = |x: &[f64], y: &mut [f64]| {
        for i in 0..nf {
            y[i] = diag[i] * x[i];
        }
        for &(i, j, g) in off {
            y[i] -= g * x[j];
            y[j] -= g * x[i];
        }
    };
    let bnorm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut x = vec![0.0; nf];
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, d)| ri / d.max(1e-300)).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; nf];
    for _ in 0..40 * nf.max(1) {
        let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rn / bnorm <= SOLVE_TOL {
            return Ok(x);
        }
        matvec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..nf {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..nf {
            z[i] = r[i] / diag[i].max(1e-300);
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..nf {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rn / bnorm <= 1e-9 {
        Ok(x)
    } else {
        Err(CrossbarError::SolverFailure { residual: rn / bnorm })
    }
}

/// Largest KCL residual over non-driven nodes, normalized by the largest
/// branch current. Diagnostic companion to `solve_dc`.
pub fn kcl_residual(
    net: &CrossbarNetwork,
    drive: &DriveAssignment,
    pots: &NodePotentials,
) -> Result<f64, CrossbarError> {
    let pinned = pinned_potentials(net, drive)?;
    let mut inflow = vec![0.0; net.node_count];
    let mut max_current: f64 = 0.0;
    for e in &net.edges {
        let (a, b) = (e.a as usize, e.b as usize);
        let i_ab = e.conductance * (pots.potentials[a] - pots.potentials[b]);
        inflow[a] -= i_ab;
        inflow[b] += i_ab;
        max_current = max_current.max(i_ab.abs());
    }
    let mut worst: f64 = 0.0;
    for n in 0..net.node_count {
        if pinned[n].is_none() {
            worst = worst.max(inflow[n].abs());
        }
    }
    Ok(worst / max_current.max(1e-300))
}

/// Per-pixel voltage: potential(r_ij) − potential(c_ij).
pub fn pixel_voltages(net: &CrossbarNetwork, pots: &NodePotentials) -> VoltageGrid {
    VoltageGrid::from_fn(net.cfg.n_rows, net.cfg.n_cols, |i, j| {
        pots.get(net.r_node(i, j)) - pots.get(net.c_node(i, j))
    })
}

/// True iff the whole grid decomposes as `target(i,j) = r_i − c_j`.
pub fn dpa_representable(target: &VoltageGrid) -> bool {
    for i in 0..target.n_rows() {
        for j in 0..target.n_cols() {
            let resid = target[(i, j)] - target[(i, 0)] - target[(0, j)] + target[(0, 0)];
            if resid.abs() > DPA_TOL {
                return false;
            }
        }
    }
    true
}

/// Builds the one-shot drive for direct passive addressing of `target`.
///
/// Rows and columns containing a non-zero pixel are driven; the rest float.
/// The driven submatrix must decompose exactly as `r_i − c_j`, otherwise the
/// target cannot be produced in a single simultaneous step. Drives are gauge
/// centered so the largest positive and negative contact voltages match.
pub fn dpa_drive(target: &VoltageGrid) -> Result<DriveAssignment, CrossbarError> {
    let (nr, nc) = (target.n_rows(), target.n_cols());
    let active_row: Vec<bool> = (0..nr)
        .map(|i| (0..nc).any(|j| target[(i, j)].abs() > DPA_TOL))
        .collect();
    let active_col: Vec<bool> = (0..nc)
        .map(|j| (0..nr).any(|i| target[(i, j)].abs() > DPA_TOL))
        .collect();

    // all-zero target: hold every contact at 0 V
    if !active_row.iter().any(|&a| a) {
        return Ok(DriveAssignment::all_driven(&vec![0.0; nr], &vec![0.0; nc]));
    }

    let i0 = active_row.iter().position(|&a| a).unwrap();
    let j0 = active_col.iter().position(|&a| a).unwrap();
    let mut r_vals = vec![0.0; nr];
    let mut c_vals = vec![0.0; nc];
    for i in 0..nr {
        if active_row[i] {
            r_vals[i] = target[(i, j0)]; // gauge: c[j0] = 0
        }
    }
    for j in 0..nc {
        if active_col[j] {
            c_vals[j] = r_vals[i0] - target[(i0, j)];
        }
    }
    for i in 0..nr {
        for j in 0..nc {
            if active_row[i] && active_col[j] {
                let err = r_vals[i] - c_vals[j] - target[(i, j)];
                if err.abs() > DPA_TOL {
                    return Err(CrossbarError::NotRepresentable);
                }
            }
        }
    }

    let driven: Vec<f64> = (0..nr)
        .filter(|&i| active_row[i])
        .map(|i| r_vals[i])
        .chain((0..nc).filter(|&j| active_col[j]).map(|j| c_vals[j]))
        .collect();
    let lo = driven.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = driven.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shift = 0.5 * (lo + hi);

    Ok(DriveAssignment {
        rows: (0..nr)
            .map(|i| {
                if active_row[i] {
                    ContactState::Driven(r_vals[i] - shift)
                } else {
                    ContactState::Floating
                }
            })
            .collect(),
        cols: (0..nc)
            .map(|j| {
                if active_col[j] {
                    ContactState::Driven(c_vals[j] - shift)
                } else {
                    ContactState::Floating
                }
            })
            .collect(),
    })
}

/// Fraction of a probe voltage that actually appears across each pixel when
/// that pixel alone is addressed (row at +probe/2, column at −probe/2, all
/// other contacts floating).
pub fn attenuation_map(net: &CrossbarNetwork, probe_volts: f64) -> Result<VoltageGrid, CrossbarError> {
    if probe_volts == 0.0 || !probe_volts.is_finite() {
        return Err(CrossbarError::InvalidConfig("probe voltage must be non-zero".into()));
    }
    let (nr, nc) = (net.cfg.n_rows, net.cfg.n_cols);
    let mut out = VoltageGrid::zeros(nr, nc);
    for i in 0..nr {
        for j in 0..nc {
            let mut drive = DriveAssignment::all_floating(nr, nc);
            drive.rows[i] = ContactState::Driven(0.5 * probe_volts);
            drive.cols[j] = ContactState::Driven(-0.5 * probe_volts);
            let pots = solve_dc(net, &drive)?;
            out[(i, j)] = (pots.get(net.r_node(i, j)) - pots.get(net.c_node(i, j))) / probe_volts;
        }
    }
    Ok(out)
}

/// Divides the target by the attenuation map entry-wise.
pub fn compensate(target: &VoltageGrid, att: &VoltageGrid) -> Result<VoltageGrid, CrossbarError> {
    if !target.same_shape(att) {
        return Err(CrossbarError::DimensionMismatch);
    }
    let mut out = VoltageGrid::zeros(target.n_rows(), target.n_cols());
    for i in 0..target.n_rows() {
        for j in 0..target.n_cols() {
            if att[(i, j)] == 0.0 {
                return Err(CrossbarError::DivisionByZero(i, j));
            }
            out[(i, j)] = target[(i, j)] / att[(i, j)];
        }
    }
    Ok(out)
}

/// Mean/max absolute voltage error as a percentage of `v_ref`.
pub fn voltage_error(
    measured: &VoltageGrid,
    target: &VoltageGrid,
    v_ref: f64,
) -> Result<ErrorStats, CrossbarError> {
    if !measured.same_shape(target) {
        return Err(CrossbarError::DimensionMismatch);
    }
    if !(v_ref > 0.0) {
        return Err(CrossbarError::InvalidConfig("v_ref must be positive".into()));
    }
    let per_pixel_error = VoltageGrid::from_fn(measured.n_rows(), measured.n_cols(), |i, j| {
        measured[(i, j)] - target[(i, j)]
    });
    let n = (measured.n_rows() * measured.n_cols()) as f64;
    let sum_abs: f64 = per_pixel_error.flatten().iter().map(|e| e.abs()).sum();
    let max_abs = per_pixel_error.max_abs();
    Ok(ErrorStats {
        mean_abs_error_pct: 100.0 * sum_abs / n / v_ref,
        max_abs_error_pct: 100.0 * max_abs / v_ref,
        per_pixel_error,
    })
}

/// Control-input counts for direct vs passive matrix addressing of n×n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddressingComplexity {
    pub direct: u64,
    pub passive: u64,
}

pub fn addressing_complexity(n: u64) -> AddressingComplexity {
    AddressingComplexity {
        direct: n * n,
        passive: 2 * n,
    }
}

/// Bisects `r_segment` so the far-corner attenuation equals `target_att`.
/// Attenuation decreases monotonically with electrode resistance.
pub fn calibrate_r_segment(
    template: &CrossbarConfig,
    target_att: f64,
) -> Result<f64, CrossbarError> {
    if !(target_att > 0.0 && target_att < 1.0) {
        return Err(CrossbarError::InvalidConfig(
            "target attenuation must lie in (0, 1)".into(),
        ));
    }
    let far = |r_segment: f64| -> Result<f64, CrossbarError> {
        let cfg = CrossbarConfig { r_segment, ..template.clone() };
        let net = build_network(&cfg)?;
        let (i, j) = (cfg.n_rows - 1, cfg.n_cols - 1);
        let mut drive = DriveAssignment::all_floating(cfg.n_rows, cfg.n_cols);
        drive.rows[i] = ContactState::Driven(0.5);
        drive.cols[j] = ContactState::Driven(-0.5);
        let pots = solve_dc(&net, &drive)?;
        Ok(pots.get(net.r_node(i, j)) - pots.get(net.c_node(i, j)))
    };

    let mut lo = 1e-12;
    let mut hi = 1.0 / template.g_pixel;
    while far(hi)? > target_att {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(CrossbarError::SolverFailure { residual: f64::NAN });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if far(mid)? > target_att {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) / hi < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
