pub mod contour;
pub mod quad;
pub mod roots;
pub mod series;
pub mod special;

pub use contour::{count_zeros, find_complex_roots, Rectangle};
pub use quad::{
    gauss_legendre_panels,
    integrate, integrate_principal_value, integrate_semi_infinite, integrate_to_infinity,
    integrate_oscillatory_tail, integrate_with_breaks, wynn_epsilon, QuadOptions, QuadratureResult,
};
pub use roots::{brent, find_real_roots, roots_on_grid};
pub use series::{matsubara_sum, CompensatedSum, MatsubaraSum};
pub use special::{dawson, erf_real_line, erf_scaled_imag, erfcx, faddeeva, faddeeva_real, one_minus_sqrt_pi_x_erfcx};
