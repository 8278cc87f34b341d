pub mod builder;
pub mod cnf;
pub mod covering;
pub mod dual_rail;
pub mod equivalence;
pub mod experiment;
pub mod subsets;
pub mod symmetric;
pub mod ucp;
