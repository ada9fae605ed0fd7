pub mod invariants;
pub mod series;
pub mod classifier;
pub mod abelian;
pub mod search;
pub mod literal;
pub mod record;
