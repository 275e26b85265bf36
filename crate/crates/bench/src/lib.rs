//! Shared inputs for the benchmarks in `benches/`.

use secsat_core::{
    ChannelSpec, LinkSetup, RelayLinkModel, ResidualModel, SecrecyParams, TraversalConfig,
};

/// Rician satellite link (K = 10) and Rayleigh relays, four antennas each.
pub fn reference_setup() -> LinkSetup {
    let relay = ChannelSpec::rayleigh(4, 1.0).expect("valid spec");
    LinkSetup {
        satellite: ChannelSpec::rician(4, 10.0, 1.0).expect("valid spec"),
        relay_bob: relay,
        relay_eve: relay,
        residual: ResidualModel::Physical,
    }
}

/// Traversal at 10 dB with `R_s = 1` over Rician relay links.
pub fn reference_traversal(step: f64) -> TraversalConfig {
    TraversalConfig {
        step,
        relay_link_model: RelayLinkModel::Rician,
        mean_power_sd: 1.0,
        mean_power_re: 1.0,
        rician_k_re: 1.0,
        big_p: 10.0,
        params: SecrecyParams::unit_noise(1.0).expect("valid params"),
        n_r: 4,
    }
}
