//! Exact diagonalization toolkit for quantum many-body scars in the
//! mixed-field Ising chain obtained from a Z2 gauged Kitaev chain.
//!
//! Spin convention: bit `i` of a configuration is site `i`, and bit value 1
//! is spin up (`Z = +1`). Chains are periodic.

pub mod basis;
pub mod dynamics;
pub mod error;
pub mod gauge;
pub mod hamiltonian;
pub mod scalar;
pub mod scan;
pub mod scars;
pub mod spectral;
pub mod tracker;

pub use basis::{Parity, SectorBasis, SymmetrySector};
pub use dynamics::{evolve_fidelity, prepare_initial, quench_experiment, FidelityTrace};
pub use error::{Error, Result};
pub use hamiltonian::{Model, ModelParams, SectorMatrix};
pub use scan::{classify_point, scan_grid, Confinement, Region, ScanConfig, ScanPoint};
pub use scars::{ScarLabel, Tower};
pub use spectral::{diagonalize, entanglement_entropy, gap_ratio, s_rmt, EigenSolution};
pub use tracker::{preset_path, track, track_many, ParameterPath, TrackRecord, TrackingPolicy};
