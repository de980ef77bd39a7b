//! Colored dense orders, shuffling families of monotone relations, and
//! classification of their countable models.

pub mod backforth;
pub mod counting;
pub mod ordertype;
pub mod rational;
pub mod realize;
pub mod shuffle;
pub mod structure;
pub mod workbench;

pub use ordertype::{CanonicalOrderType, OrderTypeExpr};
pub use rational::Rational;
pub use realize::{Block, ColoredOrderSpec, RealizedOrder};
pub use structure::{Color, OrderedStructure, Query, Region, RelSym, WitnessError};
