//! Fixtures shared by the criterion benches.

use dwpf_core::harness::{generate_params, generate_restricted, SeparationRule};
use dwpf_core::izergin::RestrictedParams;
use dwpf_core::ModelParams;

/// Deterministic well-separated parameters of size `n`.
pub fn fixture(n: usize) -> ModelParams {
    generate_params(0xD0D0 + n as u64, n, &SeparationRule::default()).expect("fixture generation")
}

/// As [`fixture`] with every rapidity zero.
pub fn restricted_fixture(n: usize) -> RestrictedParams {
    generate_restricted(0xD0D0 + n as u64, n, &SeparationRule::default()).expect("fixture generation")
}
