pub mod acceptance;
pub mod casimir;
pub mod epstein;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod par;
pub mod quad;
pub mod specfun;
pub mod sweep;
