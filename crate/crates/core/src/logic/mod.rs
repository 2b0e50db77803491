//! First-order and monadic second-order logic with counting, distance and
//! disjoint-path atoms: syntax, parsing and exact evaluation.

mod ast;
mod eval;
mod local;
mod parse;

pub use ast::{fresh_name, is_set_variable, Formula, Term};
pub use eval::{evaluate, evaluate_with, holds, Assignment, EvalOptions, Prepared, SET_QUANTIFIER_CAP};
pub use local::{evaluate_basic_local, is_scattered, BasicLocalSentence};
pub use parse::{parse_formula, parse_formula_with};
