//! Acceptance checks for `sigma-hensel`; the suite lives in
//! `tests/acceptance.rs` and runs with `cargo test -p sigma-hensel-validation`.
