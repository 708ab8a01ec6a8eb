//! Hilbert class polynomials over prime fields.
//!
//! Computes `H_D(x)` from CM values of `j`, factors it modulo primes, and
//! predicts the factorization pattern from class group and genus data alone,
//! so that the two can be compared.

pub mod error;
pub mod fppoly;
pub mod genus;
pub mod harness;
pub mod hcp;
pub mod ntcore;
pub mod predictor;
pub mod quadforms;

pub use error::{Error, Result};
pub use ntcore::{Discriminant, Factorization};
pub use quadforms::{ClassGroupStructure, QuadForm};
pub use hcp::{IntPoly, PrecisionBudget};
pub use fppoly::{FactorSignature, Fp2Element, FpPoly};
pub use genus::{GenusData, RamificationData, Splitting};
pub use predictor::{CaseLabel, Prediction, PrimeShape, RootTag};
pub use harness::{OsidhReport, SweepReport, Verdict, VerifyReport};
