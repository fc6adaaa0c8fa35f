pub mod datum;
pub mod qarith;
pub mod wordcomb;
pub mod linalg;
pub mod polyrep;
pub mod relations;
pub mod braid;
pub mod algebra;
pub mod reptheory;
pub mod qgroup;
pub mod fixtures;
pub mod suites;
