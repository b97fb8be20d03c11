//! Automata with boundary.
//!
//! A toolkit for modelling distributed systems as automata whose motions
//! carry one synchronization action per boundary, composing them with the
//! operations bind, feedback and product, checking the composites for
//! deadlock (exhaustively or with the minimal-introspective-subsystem
//! reduction), and abstracting them through verified simulations.
//!
//! Modules:
//! - [`action`], [`automaton`]: action sets, automata, behaviours,
//!   reachability, linearity.
//! - [`algebra`]: bind / feedback / product / structural constants and
//!   isomorphism checking.
//! - [`design`]: expression trees over automaton variables, wiring
//!   diagrams, systems and on-the-fly successor generation.
//! - [`checker`]: deadlock search (BFS, product analysis, MISA).
//! - [`simulation`]: comparisons, simulations, their compositions, and
//!   simulation-assisted deadlock checking.
//! - [`models`]: generators for the bundled example systems.
//! - [`format`], [`report`]: the model file format and JSON reports.

pub mod action;
pub mod algebra;
pub mod automaton;
pub mod checker;
pub mod design;
pub mod error;
pub mod format;
pub mod models;
pub mod report;
pub mod simulation;

pub use action::{ActionId, ActionSet, BoundarySignature};
pub use automaton::{Automaton, AutomatonBuilder, Behaviour, MotionId, StateId, StateSpace};
pub use error::InputError;
