//! f64 math routed through std intrinsics or libm, so the crate builds
//! without std.

#[cfg(feature = "std")]
macro_rules! shim {
    ($name:ident, $libm:ident, 1) => {
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            f64::$name(x)
        }
    };
    ($name:ident, $libm:ident, 2) => {
        #[inline(always)]
        pub(crate) fn $name(x: f64, y: f64) -> f64 {
            f64::$name(x, y)
        }
    };
}

#[cfg(not(feature = "std"))]
macro_rules! shim {
    ($name:ident, $libm:ident, 1) => {
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            libm::$libm(x)
        }
    };
    ($name:ident, $libm:ident, 2) => {
        #[inline(always)]
        pub(crate) fn $name(x: f64, y: f64) -> f64 {
            libm::$libm(x, y)
        }
    };
}

shim!(sqrt, sqrt, 1);
shim!(abs, fabs, 1);
shim!(floor, floor, 1);
shim!(ceil, ceil, 1);
shim!(ln, log, 1);
shim!(sin, sin, 1);
shim!(powf, pow, 2);

/// Euclidean norm of a small vector.
pub(crate) fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|c| c * c).sum())
}

/// Squared Euclidean distance between two points of equal dimension.
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    sqrt(dist2(a, b))
}
