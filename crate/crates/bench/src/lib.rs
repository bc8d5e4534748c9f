//! Shared fixtures for the criterion benches.

use respole_core::{make_tdot, DeviceSpec};

/// Named models covering both pole regimes and a general device.
pub fn fixtures() -> Vec<(&'static str, DeviceSpec)> {
    vec![
        ("tdot_resonant", make_tdot(1.0, 1.0, 0.0).unwrap()),
        ("tdot_antibound", make_tdot(1.0, 0.5, -3.0).unwrap()),
        (
            "chain3",
            DeviceSpec::new(
                3,
                vec![0.0, 0.2, -0.1],
                vec![(0, 1, -0.7), (1, 2, -0.4)],
                0,
                1.0,
            )
            .unwrap(),
        ),
    ]
}
