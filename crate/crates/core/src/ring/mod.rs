//! Scalar Laurent polynomials and rational functions on the unit circle.

mod factor;
mod laurent;
mod rational;
mod roots;

pub use factor::{
    inner_outer, spectral_factor, winding, winding_of, BOUNDARY_ROOT_TOL, POSITIVITY_FLOOR,
    WINDING_FLOOR,
};
pub use laurent::{LaurentScalar, DROP_TOL};
pub use rational::{RationalScalar, POLE_CIRCLE_TOL};
pub(crate) use rational::{pole_lcm, product_of_factors};
pub use roots::roots;
