//! Simulator for a passively addressed ionic-actuator morphing surface.
//!
//! The crate models the full control chain of an N×N bending-pixel sheet
//! driven through a 2N-contact crossbar:
//!
//! * [`crossbar`] — DC nodal model of the electrode/pixel network
//!   (sneak paths, leakage, electrode attenuation).
//! * [`scanner`] — scan-time charge dynamics under direct passive
//!   addressing (DPA) or progressive scan (PS).
//! * [`mechanics`] — voltage-to-shape surrogate: bilayer strip curvature
//!   and a finite-difference Kirchhoff plate with per-pixel eigencurvature.
//! * [`dataset`] — deterministic generation of (voltage, surface) training
//!   corpora on the 41-level voltage lattice.
//! * [`mlp`] — fully connected network with training loop, used as the
//!   forward (36 → 400) and inverse (400 → 36) model.
//! * [`pointcloud`] — plane fitting, alignment, and x-y matched surface
//!   error statistics.
//! * [`config`] / [`cli`] — experiment configuration and the command-line
//!   entry points (`scan`, `gen`, `train`, `predict`, `invert`, `report`,
//!   `calibrate`).
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod config;
pub mod crossbar;
pub mod dataset;
pub mod grid;
pub mod mechanics;
pub mod mlp;
pub mod pointcloud;
pub mod scanner;
pub mod viz;

pub use grid::VoltageGrid;
