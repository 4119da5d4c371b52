//! Random inputs and brute-force oracles for testing `dnl-core`.
//!
//! The oracles here deliberately avoid the library's own code paths: they
//! re-derive results by direct enumeration so that tests compare two
//! independent computations.

pub mod csv_gen;
pub mod golden;
pub mod label_gen;
pub mod oracle;

pub use csv_gen::{random_table, RandomTable};
pub use golden::{check_golden, fixture, fixtures_dir, read_fixture, BLESS_VAR};
pub use label_gen::{perturb_one_invariant, random_label, LabelShape};
pub use oracle::{brute_force_compare, brute_force_resolve, oracle_profile, OracleColumn, OracleProfile, OracleView};
