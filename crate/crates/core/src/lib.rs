//! Symbolic computation for contracting self-similar groups presented by
//! Moore-diagram automata: the nucleus, the (generally non-Hausdorff) groupoid
//! of germs over the boundary of the tree, dangerous points and
//! Hausdorff-cover fibers, singular elements of Steinberg algebras over the
//! rationals or `Z/tZ`, and simplicity reports.

pub mod automaton;
pub mod element;
pub mod error;
pub mod groupoid;
pub mod nucleus;
pub mod regset;
pub mod samples;
pub mod scond;
pub mod steinberg;
pub mod word;

pub use automaton::{Alphabet, Automaton, StateId};
pub use element::{ElemId, ElementInterner, GroupElement};
pub use error::{AlgebraError, BudgetExceeded, ParseError};
pub use word::{EvPeriodicWord, FiniteWord, Letter};
