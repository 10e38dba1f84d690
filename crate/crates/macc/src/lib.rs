//! Compiler and simulator for component & connector architecture models.
//!
//! An architecture is a set of component types with typed, directed ports.
//! Composed types wire subcomponent instances together with connectors;
//! atomic types either embed an I/O automaton (fully modeled) or stay
//! abstract and are later bound to handwritten implementations from code
//! libraries. One component type is instantiated as the root of an
//! application, closing the hierarchy into an instance tree.
//!
//! The pipeline stages mirror the module layout:
//!
//! ```text
//! parse      .arc / .cd / .app / .lib readers, printers, workspace loader
//! model      syntax tree, classification, instantiation, flattening
//! check      well-formedness rules CC1 to CC12 over models and bindings
//! binding    resolves abstract instances to library implementations
//! codegen    renders platform sources through registered generators
//! sim        lockstep execution of the flattened architecture
//! cli        the `macc` command line
//! ```

pub mod binding;
pub mod check;
pub mod cli;
pub mod codegen;
pub mod diag;
pub mod model;
pub mod parse;
pub mod sim;
