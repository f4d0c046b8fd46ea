//! Charts, tensor fields, bundle charts and morphisms.

pub mod bidiff;
pub mod bundle;
pub mod chart;
pub mod skew;
pub mod tensor;

pub use bidiff::{apply_vector, differential, BracketSource, FirstOrderBiDiffOp, PolyDiffOp};
pub use bundle::{BundleChart, BundleMorphism};
pub use chart::{Chart, ChartRef, Prolongation, Role, Variable};
pub use skew::{Co, Contra, CovariantField, MultiVector, SkewField, Variance};
pub use tensor::{contract_first, contract_second, pair, pair_vector, TensorField};
