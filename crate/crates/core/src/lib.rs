//! Three-valued LTL model checking of partial Kripke structures.

pub mod automata;
pub mod cli;
pub mod engine;
pub mod fixtures;
pub mod ltl;
pub mod oracle;
pub mod pks;
pub mod product;
pub mod proof;
