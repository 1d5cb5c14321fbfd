mod complex;
mod identity;
mod real;

pub use complex::{
    find_resonances, generalized_mode_sum, generalized_mode_sum_with, quasistatic_channel_energy,
    reference_resonances, GeneralizedSum, ResonanceRecord, ResonanceSet,
};
pub use identity::{identity_check, IdentityCase, IdentityRecord, TestFunction};
pub use real::{
    audit_spectrum, count_modes_in, cutoff, mode_route_energy, real_mode_spectrum, sum_over_modes_energy, vacuum_density, zero_point_sum,
    KIntegrationOptions, ModeRouteEnergy, ModeSpectrum, ModeSumOptions, ModeSumResult, RealModeOptions,
};
