//! Extractors as languages of marker strings.
//!
//! An extractor over letters Σ and attributes Γ is a set of strings of
//! markers `{x,y}:a`. On a document `w` it yields the table of Γ-tuples
//! whose marker encoding spells `w`. Regular extractors are automata and
//! expressions, context-free ones are grammars. The crate evaluates both,
//! composes them with table operators, decides membership, emptiness,
//! disjointness, containment and equivalence of tables, and builds the
//! hardness reductions from 3-SAT and bounded PCP.

pub mod automaton;
pub mod error;
mod extractor;
pub mod grammar;
pub mod marker;
pub mod oracle;
mod parse;
pub mod problems;
pub mod reductions;
pub mod slice;
pub mod table;

pub use automaton::{AutomatonBuilder, Expression, ExtractorAutomaton, ExtractorExpr};
pub use error::{Error, Limits, Result};
pub use extractor::{Extractor, Operator};
pub use grammar::{CnfGrammar, ExtractorGrammar, GrammarBuilder, Sym, Symbol};
pub use marker::{
    attrs, encode_tuple, Alphabets, Attr, AttrSet, GammaTable, GammaTuple, Marker, MarkerString,
};
pub use problems::{
    table_contains, table_disjoint, table_empty, table_equiv, tuple_member, Cost, Problem,
    ProblemAnswer,
};
pub use slice::SliceDag;
pub use table::{
    apply_unary, concat_tables, concat_tuples, join_tables, join_tuples, set_op_tables, JoinKind,
    SetOp, UnaryOp,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/formats.md")]
    pub struct Formats;
    #[doc = include_str!("../../../book/src/library.md")]
    pub struct Library;
    #[doc = include_str!("../../../book/src/problems.md")]
    pub struct Problems;
    #[doc = include_str!("../../../book/src/reductions.md")]
    pub struct Reductions;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
