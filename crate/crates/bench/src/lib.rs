//! Fixtures shared by the criterion benches.

use chansim_core::antenna::AntennaArraySpec;
use chansim_core::gscm::LinkConfig;
use chansim_core::spatial::Trajectory;
use chansim_core::{CarrierSpec, LinkState, Position3D, ScenarioKind};

/// UMi NLOS link at 28 GHz with the given arrays at both ends.
pub fn umi_link(tx: AntennaArraySpec, rx: AntennaArraySpec) -> LinkConfig {
    let mut c = LinkConfig::new(
        ScenarioKind::UmiStreetCanyon,
        LinkState::Nlos,
        CarrierSpec::from_ghz(28.0).expect("valid carrier"),
        Position3D::new(0.0, 0.0, 10.0),
        Position3D::new(60.0, 20.0, 1.5),
    );
    c.tx = tx;
    c.rx = rx;
    c
}

/// 20 m L-shaped walk at pedestrian speed.
pub fn walk() -> Trajectory {
    Trajectory::new(
        vec![
            Position3D::new(60.0, 20.0, 1.5),
            Position3D::new(70.0, 20.0, 1.5),
            Position3D::new(70.0, 30.0, 1.5),
        ],
        0.83,
    )
}
