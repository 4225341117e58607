//! Online covering problems: bin packing and facility location.

mod bins;
mod facility;

pub use bins::{
    bp_opt, gen_halves, imbalance_report, Bin, BinOracle, BinPackingInstance, BinPackingProblem,
    BinState, Fit, FitRule, ImbalanceReport, Place, BP_EXACT_LIMIT, FIT_TOL,
};
pub use facility::{
    facility_location_opt, FacilityOracle, FacilityProblem, FacilitySetting, FacilityState,
    RandomizedFacility, Serve, FACILITY_EXACT_LIMIT,
};
