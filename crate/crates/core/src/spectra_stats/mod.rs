//! Linear spectral statistics and the estimators built on them.

mod estimators;
mod girko;
mod poly;
mod swap;
mod testfn;

pub use estimators::{
    anticoncentration_check, chebyshev_half_width, empirical_cumulants, ks_distance, median,
    smoothed_correlation, BulkRegion, BumpWindow, CorrelationEstimate, Estimate, SmallBallEstimate,
    StatisticSample, CHEBYSHEV_DELTA, MIN_CUMULANT_REPLICAS,
};
pub use girko::{girko_residual, product_vs_root_statistic, GirkoCheck, MIN_GIRKO_GRID};
pub use poly::LaurentPolynomial;
pub use swap::{
    fit_taylor_coefficients, stieltjes_swap_residual, SwapEntry, SwapExpansion, MAX_EXPANSION_RATIO,
    TAYLOR_ORDER,
};
pub use testfn::{
    gradient_energy, h_half_norm_sq, linear_statistic, predicted_variance_ginibre,
    predicted_variance_trunc, tau_in_theorem_range, trunc_edge_radius, RadialBump, TestFunction,
    ROUTE_TOL,
};
