//! Non-existence and non-compatibility criteria: the `dβ` sign argument on
//! closed manifolds, the local compatibility equations on `ℝ⁶`, invariant
//! taming forms, `∂̄`-classes of invariant forms, and the linear case.

mod dbar;
mod linear;
mod mt;
mod nop;
mod taming;

pub use dbar::{invariant_dbar_class, DbarReport};
pub use linear::{
    linear_power_preservation, random_conjugate, random_symplectic, standard_structure, standard_symplectic, LinearReport,
};
pub use mt::{constant_multiple, mt_calibrate, mt_obstruction, CalibrationRow, MtExpectation, MtReport, Ordering6};
pub use nop::{diagonal_decomposition, nop_test, NopCertificate, NopReport};
pub use taming::{invariant_taming_solver, TamingReport, TamingSearch, TamingVerdict};
