pub mod classify;
pub mod cli;
pub mod cnl;
pub mod edtl;
pub mod ltl;
pub mod promptgen;
pub mod propexpr;
pub mod sup;
