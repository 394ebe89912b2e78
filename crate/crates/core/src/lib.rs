//! A workbench for the meet-implication fragment of intuitionistic
//! propositional logic.
//!
//! The crate builds finite pieces of the universal model `U(n)` with
//! hash-consed points, the finite model `U(n)∧,→` whose up-set algebra is the
//! free implicative meet-semilattice on `n` generators, de Jongh formulas,
//! and decides which up-sets of a finite Kripke model are definable by
//! formulas built from `∧` and `→` alone.

pub mod algebra;
pub mod definability;
pub mod dejongh;
pub mod formula;
pub mod kripke;
pub mod sample;
pub mod selftest;
pub mod subframe;
pub mod universal;

pub use formula::{classify_fragment, parse, Formula, FragmentClass, Kind};
pub use kripke::{Colour, ColouredModel, KripkeError, ModelMap, Poset, UpSet};
pub use universal::{PointId, UniverseStore};
