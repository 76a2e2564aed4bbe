//! Closed-form transforms of Gaussian chirps and their exact erosions.

mod eroded;
mod form;
mod lagrange;

pub use eroded::{collapse_anisotropy, t_final, ChirpOracle};
pub use form::{ChirpGaborForm, ChirpParams, ChirpSignal};
pub use lagrange::{
    circle_minimum, eval_poly, lagrange_approximation, lagrange_multiplier, quartic_coefficients, scaled_residual,
    t_max, t_max_closed_form, Branch, EigenFrame, LagrangeRoot,
};
