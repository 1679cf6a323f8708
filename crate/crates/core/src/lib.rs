//! Simulation of a single Bessel–Gaussian vortex photon inducing emission from
//! an excited two-level atom: plane-wave and packet amplitudes, channel
//! weights for total-angular-momentum transfer, trap-averaged TAM statistics
//! and the OAM coincidence matrix of the emitted pair.

pub mod specfun;
pub mod quad;
pub mod units;
pub mod atom;
pub mod photon;
pub mod dynamics;
pub mod observables;
pub mod harness;

pub use num_complex::Complex64;

pub use atom::{AtomSpec, CgConvention, CouplingTable, Helicity};
pub use dynamics::{ChannelTolerance, ChannelWeights, TimeGrid};
pub use harness::config::RunConfig;
pub use harness::sweep::{SweepRecord, SweepResult};
pub use harness::HarnessError;
pub use observables::{GridSpec, OamWindow, PairProbabilityMatrix, Scenario, TamStats};
pub use photon::{PhotonPacket, TrapSpec};
