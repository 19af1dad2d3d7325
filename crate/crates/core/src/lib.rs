//! Reed-Muller covering-radius machinery: Boolean-function algebra, higher-order
//! nonlinearity, affine groups and orbit enumeration, coset classification and the
//! verification pipeline showing that the covering radius of RM(3,7) is 20.

pub mod bitset;
pub mod classify;
pub mod boolfn;
pub mod error;
pub mod field;
pub mod io;
pub mod nonlin;
pub mod orbit;
pub mod verify;

pub use boolfn::{BooleanFunction, MonomialSet};
pub use error::{Error, Result};
pub use field::{AffineMap, BitAffine, FieldSpec};
pub use nonlin::{NlTable, LevelSet};
