//! Termination checking for general logic programs with concrete queries.
//!
//! The checker builds generalized SLDNF-trees depth-first and stops as soon
//! as a derivation shows a repeating chain of ancestor subgoals that are
//! expanded variants of each other, used with the same clauses each time.
//! If every query's tree is built to the end without such a chain, the
//! program terminates for those queries.
//!
//! ```
//! use termcheck_core::{parse_program, parse_query, test, TestConfig, Verdict};
//!
//! let program = parse_program("p(X) :- \\+ p(f(X)).").unwrap();
//! let query = parse_query("p(a)").unwrap();
//! match test(&program, &[query], &TestConfig::default()) {
//!     Verdict::MostLikelyNonTerminating { detection, .. } => {
//!         assert_eq!(detection.derivation.len(), 5);
//!     }
//!     other => panic!("unexpected verdict {other:?}"),
//! }
//! ```

pub mod detector;
pub mod engine;
pub mod evariant;
pub mod parser;
pub mod term;
pub mod unify;

#[cfg(feature = "parallel")]
pub use detector::test_parallel;
pub use detector::{
    check_node, run_query, segment_clause_set, test, test_sequential, ChainLink, ChainReport, Detection,
    DetectorConfig, LoopDetector, QueryFault, QueryResult, QueryRun, Regime, TestConfig, Verdict,
};
pub use engine::{
    build_tree, Ancestors, EdgeLabel, EngineConfig, Fault, GoalEntry, Node, NodeHook, NodeId, NodeStatus, Outcome,
    Path, RunFault, Stats, Tree, TreeContext, TreeId, TreeMode,
};
pub use evariant::{expanded_variant, is_expanded_variant, EvWitness, GrowthRule, Position};
pub use parser::{parse_goal, parse_program, parse_query, Clause, ClauseId, Literal, ParseError, Program};
pub use term::{is_variant, rename_apart, Substitution, Term, Var};
pub use unify::mgu;
