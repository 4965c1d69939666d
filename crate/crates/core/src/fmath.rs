//! Thin wrappers over `libm` so the crate never touches `std` float intrinsics.
//! Using one software implementation everywhere also keeps results
//! bit-identical across platforms.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn tgamma(x: f64) -> f64 {
    libm::tgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrappers_match_known_values() {
        assert_eq!(sqrt(9.0), 3.0);
        assert!((ln(core::f64::consts::E) - 1.0).abs() < 1e-15);
        assert_eq!(pow(2.0, 10.0), 1024.0);
        assert_eq!(floor(2.9), 2.0);
        assert!((tgamma(5.0) - 24.0).abs() < 1e-10);
    }
}
