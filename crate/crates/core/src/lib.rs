//! Compound modification logic, structure operations, graph measures and wall
//! combinatorics, evaluated exactly on small instances.

pub mod error;
pub mod grammar;
pub mod graph;
pub mod logic;
pub mod minors;
pub mod structure;
pub mod theta;
pub mod transforms;
pub mod walls;
pub mod width;

pub use error::{Error, Result};
pub use grammar::{edge_gadget, eval_mod, h_modification_check, parse_mod_string, ModString, ModWitness};
pub use graph::{connected_components, Graph, VertexSet};
pub use logic::{holds, parse_formula, Formula};
pub use minors::{excl_membership, hadwiger_number, is_minor, named_graph, ObstructionSet};
pub use structure::{
    disjoint_union, gaifman_graph, induced_substructure, is_isomorphic, AnnotatedStructure, Elem, ElemSet, Structure,
    Tuple, Vocabulary, EMPTY,
};
pub use theta::{clique_bound_check, model_check_theta, parse_theta, Body, ThetaMetadata, ThetaSentence, ThetaWitness};
pub use walls::{elementary_wall, Wall};
pub use width::{max_bramble_order, treedepth_exact, treewidth, treewidth_exact, TreeDecomposition};
