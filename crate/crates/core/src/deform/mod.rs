//! Two-dimensional transforms of tagged images, local frequency fields,
//! deformation gradients and deformation nets.

mod frequency;
mod gabor2d;
mod gradient;
mod net;
mod phantom;
mod track;

pub use frequency::{canonical, frequency_field, FrequencyField, Refinement, DEFAULT_DC_MASK};
pub use gabor2d::{gabor2d_analysis, reassign2d, Gabor2d};
pub use gradient::{deformation_gradient, solve_least_squares, DeformationGradientField, DEFAULT_MAX_CONDITION};
pub use net::{deformation_net, DeformationNet, NetPoint, PolarGrid};
pub use phantom::{make_phantom, Phantom, PhantomSpec, TagStack};
pub use track::{frequency_stack, track_stack, Tracking, TrackingParams};
