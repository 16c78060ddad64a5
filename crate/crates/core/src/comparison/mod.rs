//! Comparison solvers and post-processing audits.

pub mod audit;
pub mod fd;
pub mod fv;

pub use audit::{detect_plateaus, rankine_hugoniot_audit, AuditSettings, Discontinuity, Plateau};
pub use fd::{DissipationMode, FdOperator, FdSolver};
pub use fv::FvSolver;
