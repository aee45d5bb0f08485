//! Named test networks.

use crate::network::Network;

/// Path `s — v — t` with capacities `d1`, `d2`.
pub fn b(d1: u64, d2: u64) -> Network {
    Network::new(&["s", "v", "t"], "s", "t", &[("s", "v", d1), ("v", "t", d2)]).expect("valid fixture")
}

/// Two parallel `s — v` edges (2 and 3) followed by `v — t` (5).
pub fn parallel5() -> Network {
    Network::new(&["s", "v", "t"], "s", "t", &[("s", "v", 2), ("s", "v", 3), ("v", "t", 5)]).expect("valid fixture")
}

/// Diamond `s — a — t`, `s — b — t`, all capacities 2.
pub fn diamond2() -> Network {
    Network::new(
        &["s", "a", "b", "t"],
        "s",
        "t",
        &[("s", "a", 2), ("s", "b", 2), ("a", "t", 2), ("b", "t", 2)],
    )
    .expect("valid fixture")
}

/// Source and sink in different components.
pub fn disconnected() -> Network {
    Network::new(&["s", "a", "b", "t"], "s", "t", &[("s", "a", 3), ("b", "t", 2)]).expect("valid fixture")
}
