//! Mixed discriminants, positive maps and operator scaling, the double mixed
//! discriminant `Phi`, and a pointwise Chern/Schur form engine.

pub mod discriminants;
pub mod error;
pub mod forms;
pub mod hermitian;
pub mod perm;
pub mod phi;
pub mod posmap;
pub mod sphere;
pub mod verify;

pub use discriminants::{MatrixTuple, MonteCarloEstimate};
pub use error::{Error, Result};
pub use forms::{ChernForms, CurvatureTensor, Form, MultiIndex, Partition};
pub use hermitian::{ComplexMatrix, C64};
pub use phi::{PhiMethod, PhiReport};
pub use posmap::{BlockMap, Certificate, ScalingResult};
pub use verify::{CriterionReport, VerifyConfig, VerifySummary};
