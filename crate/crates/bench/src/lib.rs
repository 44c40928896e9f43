//! Fixtures shared by the criterion benches.

use anycast_core::generate::{gen_random, Distribution, RandomSpec};
use anycast_core::Instance;

/// The benchmark protocol's instance shape: `q = 10` groups of 10 terminals.
pub fn protocol_instance(distribution: Distribution, s_size: usize, trial: usize) -> Instance {
    let spec = RandomSpec {
        distribution,
        s_size,
        q: 10,
        group_size: 10,
        kappa: 2.0,
        seed: 0xBE9C,
    };
    gen_random(&spec, trial).expect("protocol parameters are valid")
}

/// An instance within the oracle's caps.
pub fn tiny_instance(trial: usize) -> Instance {
    let spec = RandomSpec {
        distribution: Distribution::Uniform,
        s_size: 2,
        q: 3,
        group_size: 2,
        kappa: 2.0,
        seed: 0xBE9C,
    };
    gen_random(&spec, trial).expect("tiny parameters are valid")
}
