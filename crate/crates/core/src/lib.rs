//! Numerical model of a magnon–Andreev-spin–transmon hybrid.
//!
//! Tensor ordering is (magnon, ASQ, SCQ) throughout; see [`hilbert`].

pub mod analytic;
pub mod circuit;
pub mod constants;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod flux;
pub mod hilbert;
pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod sparse;

pub use analytic::{analytic_entanglement, analytic_populations, series_x, series_y, CollapseRevivalParams, Truncation};
pub use circuit::{coupling_strengths, mode_frequencies, AsqFrequency, CircuitParams, CouplingSet, Enhancement, EnhancementParams, ModeFrequencies};
pub use dynamics::{
    evolve, evolve_with, populations, BasisLabel, DephasingConvention, DissipationRates, EvolveOptions, LindbladModel, PopulationRecord, State,
    TimeGrid, Trajectory,
};
pub use entanglement::{
    concurrence, entanglement_report, entanglement_reports, log_negativity, partial_trace, partial_transpose, residual_entanglement,
    von_neumann_entropy, Bipartition, EntanglementReport, Residuals,
};
pub use error::{Error, Result};
pub use flux::{phi_yig, DeviceGeometry, FluxResult};
pub use hilbert::{build_hamiltonian, build_operators, CMatrix, CVector, DensityMatrix, Frame, HamiltonianKind, SpaceSpec, SqueezeDrive, Subsystem};
pub use ode::IntegratorOptions;
