pub mod abeloid;
pub mod arith;
pub mod entry;
pub mod error;
pub mod linalg;
pub mod mult;
pub mod padic;
pub mod phin;
pub mod quad;
pub mod scenarios;
pub mod surface;
pub mod sym;

pub use entry::{parse_entry, parse_units, Units};
pub use error::{Error, Result};
pub use mult::{CompletionElement, MultElement, QpContext};
pub use padic::{field_arithmetic, make_padic, FieldOp, PadicNumber, PrecisionReport};
pub use quad::QuadNum;
