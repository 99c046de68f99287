// Float functions for no_std builds.
pub(crate) use num_traits::Float;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    Float::ln(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    Float::powf(x, y)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    Float::abs(x)
}

#[inline]
pub(crate) fn exp_m1(x: f64) -> f64 {
    Float::exp_m1(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    Float::ln_1p(x)
}
