//! Shared fixtures for the benchmarks.

use risfda::{PolarLocation, Scenario};

/// The reference scenario with the range-cut sizes (`M_s = 14`, all elements).
pub fn range_cut_scenario() -> Scenario {
    Scenario::baseline().with_sizes(14, 441).expect("valid sizes")
}

/// An eavesdropper 50 m from the RIS on Bob's bearing.
pub fn aligned_eve(scn: &Scenario) -> PolarLocation {
    PolarLocation::new(50.0, scn.bob().aoa_rad).expect("valid location")
}

/// `count` ranges evenly spread over `[1, 200]` m on Bob's bearing.
pub fn bearing_ranges(scn: &Scenario, count: usize) -> Vec<PolarLocation> {
    let step = 199.0 / (count.max(2) - 1) as f64;
    (0..count)
        .map(|i| PolarLocation::new(1.0 + step * i as f64, scn.bob().aoa_rad).expect("valid location"))
        .collect()
}
