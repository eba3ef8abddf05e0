//! GHZ protocol representation, compilation, time-tracked execution, and
//! the dynamic-program protocol search.

pub mod builtin;
pub mod compile;
pub mod exec;
pub mod ops;
pub mod recipe;
pub mod search;
pub mod schedule;
pub mod stabilizer;
pub mod tree;

pub use builtin::{builtin_recipe, builtin_tree, BUILTIN_NAMES};
pub use compile::{compile_recipe, compile_tree, CompileConfig};
pub use exec::{execute_recipe, ExecutionResult, Executor, RunStatus};
pub use ops::{distill, distill_branches, fuse, fuse_branches};
pub use recipe::{Basis, DistillCheck, Instruction, ProtocolRecipe};
pub use schedule::{schedule_tree, TimedTree};
pub use search::{dynamic_search, Candidate, CellKey, SearchBuffer, SearchConfig};
pub use stabilizer::{ghz_stabilizers, Stabilizer};
pub use tree::ProtocolTree;
