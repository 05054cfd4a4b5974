//! Exact simulation and verification of integer-valued Hamiltonian cellular
//! automata.
//!
//! The discrete side works entirely in the ring of Gaussian integers: a CA
//! state is a vector of complex integers, the update rule is the two-step
//! recursion `psi_{n+1} = psi_{n-1} - i H psi_n` with a self-adjoint integer
//! matrix `H`, and every claimed identity (action nullity, stationarity,
//! conserved two-point correlators, many-time factorization, entanglement
//! witnesses) is checked with exact equality, never a tolerance.
//!
//! The floating-point side ([`sampling`]) reconstructs bandlimited
//! continuous-time waves from CA samples with a discreteness scale `l` and
//! checks that the continuum quantities agree with their exact lattice
//! counterparts.
//!
//! Core math is generic over the scalar: the integer component type of a
//! Gaussian integer (any [`scalar::IntScalar`]) and the float width (any
//! [`scalar::FloatScalar`]). The aliases below fix the shipped choices:
//! arbitrary-precision integers, because the dynamics conserves no norm and
//! amplitudes grow with the clock, and `f64` for the continuum bridge.

pub mod error;
pub mod gauss;
pub mod linalg;
pub mod multi;
pub mod sampling;
pub mod scalar;
pub mod single;
#[cfg(test)]
pub(crate) mod testutil;
pub mod verify;

pub use error::{CaError, Result};

/// Integer component type used by the concrete aliases.
pub type Int = num_bigint::BigInt;
/// Float width used by the concrete aliases.
pub type Real = f64;

pub type GaussInt = gauss::Gauss<Int>;
pub type GaussVector = linalg::Vector<Int>;
pub type GaussMatrix = linalg::Matrix<Int>;
pub type HermitianMatrix = linalg::Hermitian<Int>;
pub type GaussTensor = linalg::Tensor<Int>;

pub type SingleCa = single::SingleCa<Int>;
pub type Trajectory = single::Trajectory<Int>;
pub type RealPhaseState = single::RealPhaseState<Int>;
pub type ConservationReport = single::ConservationReport<Int>;

pub type MultiCa = multi::MultiCa<Int>;
pub type MultiWave = multi::MultiWave<Int>;
pub type ProductTerm = multi::ProductTerm<Int>;
pub type DefectReport = multi::DefectReport<Int>;

pub type ContinuumWave = sampling::ContinuumWave<Real>;
pub type ModeWave = sampling::ModeWave<Real>;
pub type ProductWave = sampling::ProductWave<Real>;
pub type FloatTensor = sampling::FloatTensor<Real>;
