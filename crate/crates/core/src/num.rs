//! Scalar abstraction shared by counts, probabilities, rewards and values.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Gamma};

/// Floating point type the whole crate is generic over (`f32` or `f64`).
///
/// Besides the usual arithmetic, a scalar knows how to draw unit-scale Gamma
/// variates and how to evaluate the log-gamma function, which is everything
/// Dirichlet sampling and the Dirichlet normalizer need.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Draws from `Gamma(shape, 1)`. A zero shape yields zero.
    fn sample_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self;

    /// Draws uniformly from `[0, 1)`.
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Natural log of the gamma function.
    fn lgamma(self) -> Self;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits in scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_scalar {
    ($t:ty, $lgamma:path) => {
        impl Scalar for $t {
            #[inline]
            fn sample_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self {
                if shape <= 0.0 {
                    return 0.0;
                }
                match Gamma::new(shape, 1.0) {
                    Ok(g) => g.sample(rng),
                    Err(_) => 0.0,
                }
            }

            #[inline]
            fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.random::<$t>()
            }

            #[inline]
            fn lgamma(self) -> Self {
                $lgamma(self)
            }
        }
    };
}

impl_scalar!(f32, libm::lgammaf);
impl_scalar!(f64, libm::lgamma);

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn ln_gamma_matches_factorials() {
        // Γ(n) = (n-1)!
        assert!((5.0f64.lgamma() - 24.0f64.ln()).abs() < 1e-12);
        assert!((1.0f64.lgamma()).abs() < 1e-12);
        assert!((5.0f32.lgamma() - 24.0f32.ln()).abs() < 1e-5);
    }

    #[test]
    fn gamma_of_zero_shape_is_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert_eq!(f64::sample_gamma(0.0, &mut rng), 0.0);
        assert!(f32::sample_gamma(2.0, &mut rng) > 0.0);
    }
}
