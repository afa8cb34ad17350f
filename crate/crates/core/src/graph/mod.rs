//! The variational parameter of the bound: DAGs, decomposable graphs and
//! their coefficient vectors.

pub mod dag;
pub mod decomposable;
pub mod nu;
pub mod spanning;
pub mod structure;

pub use dag::{dag_bound, reroot_tree, Dag};
pub use decomposable::{
    decomposable_bound, elimination_bound, junction_tree, peo_and_check, DecomposableGraph,
    Elimination, UndirectedGraph,
};
pub use nu::{nu_from_decomposable, NuVector};
pub use structure::{best_tree_edges, best_tree_structure, random_junction_tree};
