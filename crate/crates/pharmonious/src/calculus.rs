//! Asymptotic mean-value expansion checks on quadratic test functions.
//!
//! For smooth φ the ε-ball mean-value defect
//!
//! ```text
//! defect(ε) = (α/2)·sup_{B̄_ε(x)} φ + (α/2)·inf_{B̄_ε(x)} φ + β·avg_{B_ε(x)} φ − φ(x)
//! ```
//!
//! satisfies `defect(ε)/ε² → β/(2(N+2))·(Δφ + (p−2)·Δ_∞φ)` as ε → 0,
//! which ties the dynamic programming operator to the p-Laplacian. On
//! quadratics every ingredient is available in closed form: the ball
//! average is `φ(x) + ε²·Δφ/(2(N+2))` exactly, and sup/inf over the
//! closed ball reduce to a trust-region problem solved here by the
//! eigenvalue characterization (documented tolerance 1e-10).
//!
//! These checks use closed balls so the extrema are attained; for
//! continuous φ the open- and closed-ball values coincide.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

#[derive(Clone, Debug, PartialEq)]
pub enum CalculusError {
    /// The p-Laplacian decomposition needs `∇φ(x) ≠ 0`.
    VanishingGradient,
}

impl fmt::Display for CalculusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalculusError::VanishingGradient => {
                write!(f, "the gradient of the test function vanishes at x")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CalculusError {}

/// φ(x) = ½⟨Ax, x⟩ + ⟨b, x⟩ + c with A symmetrized on input.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticTest {
    /// Row-major symmetric N×N matrix.
    a: Vec<f64>,
    b: Vec<f64>,
    c: f64,
    dim: usize,
}

impl QuadraticTest {
    pub fn new(a: &[f64], b: &[f64], c: f64) -> Self {
        let dim = b.len();
        assert_eq!(a.len(), dim * dim, "A must be N x N");
        let mut sym = alloc::vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                sym[i * dim + j] = 0.5 * (a[i * dim + j] + a[j * dim + i]);
            }
        }
        QuadraticTest {
            a: sym,
            b: b.to_vec(),
            c,
            dim,
        }
    }

    /// Affine φ(x) = ⟨b, x⟩ + c.
    pub fn affine(b: &[f64], c: f64) -> Self {
        Self::new(&alloc::vec![0.0; b.len() * b.len()], b, c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let mut quad = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                quad += self.a[i * self.dim + j] * x[i] * x[j];
            }
        }
        0.5 * quad + self.b.iter().zip(x).map(|(bi, xi)| bi * xi).sum::<f64>() + self.c
    }

    /// ∇φ(x) = Ax + b.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.b[i]
                    + (0..self.dim)
                        .map(|j| self.a[i * self.dim + j] * x[j])
                        .sum::<f64>()
            })
            .collect()
    }

    /// Δφ = trace A.
    pub fn laplacian(&self) -> f64 {
        (0..self.dim).map(|i| self.a[i * self.dim + i]).sum()
    }

    /// Δ_∞φ(x) = ⟨A ν, ν⟩ with ν = ∇φ/|∇φ|.
    pub fn infinity_laplacian(&self, x: &[f64]) -> Result<f64, CalculusError> {
        let g = self.gradient(x);
        let norm = math::norm(&g);
        if norm == 0.0 {
            return Err(CalculusError::VanishingGradient);
        }
        let mut out = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out += g[i] * self.a[i * self.dim + j] * g[j];
            }
        }
        Ok(out / (norm * norm))
    }

    #[cfg(test)]
    fn scaled(&self, lambda: f64) -> Self {
        QuadraticTest {
            a: self.a.iter().map(|v| lambda * v).collect(),
            b: self.b.iter().map(|v| lambda * v).collect(),
            c: lambda * self.c,
            dim: self.dim,
        }
    }
}

/// Δ_pφ(x) = |∇φ|^{p−2}·(Δφ + (p−2)·Δ_∞φ).
pub fn p_laplacian_quadratic(phi: &QuadraticTest, x: &[f64], p: f64) -> Result<f64, CalculusError> {
    assert!(p >= 2.0);
    let g = phi.gradient(x);
    let norm = math::norm(&g);
    if norm == 0.0 {
        return Err(CalculusError::VanishingGradient);
    }
    let inf = phi.infinity_laplacian(x)?;
    Ok(math::powf(norm, p - 2.0) * (phi.laplacian() + (p - 2.0) * inf))
}

/// Offsets attaining the extrema of φ over the closed ball `B̄_ε(x)`:
/// `(argmin offset, argmax offset)` relative to `x`.
pub fn ball_extremizers(phi: &QuadraticTest, x: &[f64], eps: f64) -> (Vec<f64>, Vec<f64>) {
    let g = phi.gradient(x);
    let (ymin, _) = trust_region_min(&phi.a, &g, eps, phi.dim);
    let neg_a: Vec<f64> = phi.a.iter().map(|v| -v).collect();
    let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
    let (ymax, _) = trust_region_min(&neg_a, &neg_g, eps, phi.dim);
    (ymin, ymax)
}

/// `(inf, sup)` of φ over the closed ball `B̄_ε(x)`.
pub fn ball_extrema(phi: &QuadraticTest, x: &[f64], eps: f64) -> (f64, f64) {
    let (dmin, dmax) = ball_extrema_relative(phi, x, eps);
    let at = phi.eval(x);
    (at + dmin, at + dmax)
}

/// Extrema minus φ(x), computed without the cancellation of the constant
/// part (affine functions give an exactly antisymmetric pair).
fn ball_extrema_relative(phi: &QuadraticTest, x: &[f64], eps: f64) -> (f64, f64) {
    let g = phi.gradient(x);
    if phi.a.iter().all(|v| *v == 0.0) {
        let reach = eps * math::norm(&g);
        return (-reach, reach);
    }
    let (_, qmin) = trust_region_min(&phi.a, &g, eps, phi.dim);
    let neg_a: Vec<f64> = phi.a.iter().map(|v| -v).collect();
    let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
    let (_, neg_qmax) = trust_region_min(&neg_a, &neg_g, eps, phi.dim);
    (qmin, -neg_qmax)
}

/// Mean-value defect of φ at x for ball radius ε and weights (α, β).
///
/// The ε-ball average of a quadratic is `φ(x) + ε²·Δφ/(2(N+2))` exactly,
/// so only the sup/inf terms need optimization; φ(x) cancels exactly.
pub fn mean_value_defect(phi: &QuadraticTest, x: &[f64], eps: f64, alpha: f64, beta: f64) -> f64 {
    assert!(eps > 0.0);
    let (dmin, dmax) = ball_extrema_relative(phi, x, eps);
    let n = phi.dim() as f64;
    0.5 * alpha * (dmax + dmin) + beta * eps * eps * phi.laplacian() / (2.0 * (n + 2.0))
}

/// Result of fitting `defect(ε)/ε²` against the p-Laplacian reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionCheck {
    /// Intercept of the linear-in-ε least squares fit of defect/ε².
    pub estimated_limit: f64,
    /// β/(2(N+2))·(Δφ + (p−2)·Δ_∞φ).
    pub reference: f64,
    /// Relative error against the reference (absolute when the reference
    /// vanishes; zero when both sides vanish).
    pub rel_error: f64,
}

/// Fits `defect/ε²` over a decreasing ε ladder and compares the ε → 0
/// limit to the p-Laplacian combination it must converge to.
pub fn expansion_limit_check(
    phi: &QuadraticTest,
    x: &[f64],
    p: f64,
    n: usize,
    eps_list: &[f64],
) -> Result<ExpansionCheck, CalculusError> {
    assert_eq!(n, phi.dim(), "dimension must match the test function");
    assert!(eps_list.len() >= 3, "need at least 3 ladder entries");
    assert!(
        eps_list.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0),
        "eps ladder must be strictly decreasing and positive"
    );
    let (alpha, beta) = crate::dpp::alpha_beta(p, n).expect("p >= 2 required");
    let g = phi.gradient(x);
    if math::norm(&g) == 0.0 {
        return Err(CalculusError::VanishingGradient);
    }
    let inf = phi.infinity_laplacian(x)?;
    let reference = beta / (2.0 * (n as f64 + 2.0)) * (phi.laplacian() + (p - 2.0) * inf);

    // Least squares fit v = L + c·ε over the ladder; L estimates the limit.
    let m = eps_list.len() as f64;
    let (mut se, mut se2, mut sv, mut sev) = (0.0, 0.0, 0.0, 0.0);
    for &eps in eps_list {
        let v = mean_value_defect(phi, x, eps, alpha, beta) / (eps * eps);
        se += eps;
        se2 += eps * eps;
        sv += v;
        sev += eps * v;
    }
    let denom = m * se2 - se * se;
    let estimated_limit = (sv * se2 - se * sev) / denom;

    let diff = math::abs(estimated_limit - reference);
    let rel_error = if math::abs(reference) > 1e-14 {
        diff / math::abs(reference)
    } else {
        diff
    };
    Ok(ExpansionCheck {
        estimated_limit,
        reference,
        rel_error,
    })
}

/// Global minimum of `q(y) = ½⟨Ay, y⟩ + ⟨g, y⟩` over `‖y‖ ≤ eps`:
/// `(argmin, value)`. Trust-region characterization: the sphere
/// stationarity system `(A + μI)y = −g` with `μ ≥ max(0, −λ_min)` has a
/// unique admissible multiplier found on the secular equation
/// `‖y(μ)‖ = eps`; the interior critical point competes when A ⪰ 0.
fn trust_region_min(a: &[f64], g: &[f64], eps: f64, dim: usize) -> (Vec<f64>, f64) {
    let (eigs, q) = jacobi_eigen(a, dim);
    // Coordinates of g in the eigenbasis.
    let gt: Vec<f64> = (0..dim)
        .map(|j| (0..dim).map(|i| q[i * dim + j] * g[i]).sum())
        .collect();
    let lam_min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = eigs
        .iter()
        .map(|l| math::abs(*l))
        .fold(math::norm(g) / eps.max(1e-300), f64::max)
        .max(1e-300);

    let norm_y = |mu: f64| -> f64 {
        let s: f64 = (0..dim)
            .map(|i| {
                let d = eigs[i] + mu;
                let yi = -gt[i] / d;
                yi * yi
            })
            .sum();
        math::sqrt(s)
    };

    let mut best_val = f64::INFINITY;
    let mut best_y: Vec<f64> = alloc::vec![0.0; dim];

    let value_of = |yt: &[f64]| -> f64 {
        (0..dim)
            .map(|i| 0.5 * eigs[i] * yt[i] * yt[i] + gt[i] * yt[i])
            .sum()
    };
    let consider = |yt: Vec<f64>, best_val: &mut f64, best_y: &mut Vec<f64>| {
        let v = value_of(&yt);
        if v < *best_val {
            *best_val = v;
            *best_y = yt;
        }
    };

    // Interior candidate: A positive semidefinite and the (pseudo)solve
    // of Ay = -g falls inside the ball.
    let tiny = 1e-14 * scale;
    if lam_min > -tiny {
        let mut yt = alloc::vec![0.0; dim];
        let mut ok = true;
        for i in 0..dim {
            if eigs[i] > tiny {
                yt[i] = -gt[i] / eigs[i];
            } else if math::abs(gt[i]) > tiny * eps {
                ok = false;
                break;
            }
        }
        if ok && math::norm(&yt) <= eps {
            consider(yt, &mut best_val, &mut best_y);
        }
    }

    // Sphere candidate via the secular equation on (max(0,-lam_min), inf).
    let mu_floor = (-lam_min).max(0.0);
    // Hard case: no g-component on the bottom eigenspace.
    let bottom_flat =
        (0..dim).all(|i| eigs[i] > lam_min + tiny || math::abs(gt[i]) <= 1e-13 * scale * eps);
    let hard_applicable = mu_floor == -lam_min && bottom_flat && lam_min < -tiny;
    if hard_applicable {
        let mut yt = alloc::vec![0.0; dim];
        for i in 0..dim {
            if eigs[i] > lam_min + tiny {
                yt[i] = -gt[i] / (eigs[i] - lam_min);
            }
        }
        let s = math::norm(&yt);
        if s <= eps {
            // Fill the remaining norm along one bottom eigendirection.
            let t = math::sqrt((eps * eps - s * s).max(0.0));
            for i in 0..dim {
                if eigs[i] <= lam_min + tiny {
                    yt[i] += t;
                    break;
                }
            }
            consider(yt, &mut best_val, &mut best_y);
        }
    }
    // Standard case: ‖y(μ)‖ is strictly decreasing; bisect.
    let mut lo = mu_floor;
    let mut hi = mu_floor.max(1e-12 * scale) + math::norm(&gt) / eps + scale;
    let mut expand = 0;
    while norm_y(hi) > eps && expand < 200 {
        hi *= 2.0;
        expand += 1;
    }
    // Guard lo: at mu -> mu_floor+, the norm tends to +inf (or the hard
    // case above applies); nudge off the pole.
    let nudge = 1e-300f64.max(1e-16 * scale);
    lo += nudge;
    if norm_y(lo) >= eps {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm_y(mid) > eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mu = 0.5 * (lo + hi);
        let yt: Vec<f64> = (0..dim).map(|i| -gt[i] / (eigs[i] + mu)).collect();
        // Project exactly onto the sphere to kill bisection slack.
        let norm = math::norm(&yt);
        if norm > 0.0 {
            let yt: Vec<f64> = yt.iter().map(|v| v * eps / norm).collect();
            consider(yt, &mut best_val, &mut best_y);
        }
    }

    // Rotate back to the original coordinates.
    let y: Vec<f64> = (0..dim)
        .map(|i| (0..dim).map(|j| q[i * dim + j] * best_y[j]).sum())
        .collect();
    (y, best_val)
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix:
/// `(eigenvalues, Q)` with eigenvector `j` in column `j` of `Q`.
fn jacobi_eigen(a: &[f64], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut q = alloc::vec![0.0; dim * dim];
    for i in 0..dim {
        q[i * dim + i] = 1.0;
    }
    if dim == 1 {
        return (alloc::vec![m[0]], q);
    }
    for _ in 0..64 {
        let mut off = 0.0;
        for i in 0..dim {
            for j in i + 1..dim {
                off += m[i * dim + j] * m[i * dim + j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..dim {
            for r in p + 1..dim {
                let apq = m[p * dim + r];
                if math::abs(apq) < 1e-300 {
                    continue;
                }
                let app = m[p * dim + p];
                let aqq = m[r * dim + r];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + math::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..dim {
                    let mkp = m[k * dim + p];
                    let mkq = m[k * dim + r];
                    m[k * dim + p] = c * mkp - s * mkq;
                    m[k * dim + r] = s * mkp + c * mkq;
                }
                for k in 0..dim {
                    let mpk = m[p * dim + k];
                    let mqk = m[r * dim + k];
                    m[p * dim + k] = c * mpk - s * mqk;
                    m[r * dim + k] = s * mpk + c * mqk;
                }
                for k in 0..dim {
                    let qkp = q[k * dim + p];
                    let qkq = q[k * dim + r];
                    q[k * dim + p] = c * qkp - s * qkq;
                    q[k * dim + r] = s * qkp + c * qkq;
                }
            }
        }
    }
    let eigs = (0..dim).map(|i| m[i * dim + i]).collect();
    (eigs, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radial(dim: usize) -> QuadraticTest {
        let mut a = alloc::vec![0.0; dim * dim];
        for i in 0..dim {
            a[i * dim + i] = 1.0;
        }
        QuadraticTest::new(&a, &alloc::vec![0.0; dim], 0.0)
    }

    #[test]
    fn p_laplacian_of_affine_vanishes() {
        let phi = QuadraticTest::affine(&[3.0, -2.0], 1.0);
        for p in [2.0, 3.0, 7.5] {
            assert_eq!(p_laplacian_quadratic(&phi, &[0.2, 0.4], p).unwrap(), 0.0);
        }
    }

    #[test]
    fn p_laplacian_of_the_radial_quadratic() {
        let phi = radial(2);
        let x = [1.0, 0.0];
        assert!((p_laplacian_quadratic(&phi, &x, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((p_laplacian_quadratic(&phi, &x, 4.0).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn vanishing_gradient_is_reported() {
        let phi = radial(2);
        assert!(matches!(
            p_laplacian_quadratic(&phi, &[0.0, 0.0], 3.0),
            Err(CalculusError::VanishingGradient)
        ));
    }

    #[test]
    fn affine_defect_is_exactly_zero() {
        let phi = QuadraticTest::affine(&[2.0, -0.5], 0.7);
        for eps in [0.3, 0.1, 0.025] {
            assert_eq!(mean_value_defect(&phi, &[0.1, 0.9], eps, 0.25, 0.75), 0.0);
        }
    }

    #[test]
    fn radial_defect_matches_the_closed_form() {
        // phi = |x|^2/2, N = 2, p = 4: defect/eps^2 = 1/3 for every eps.
        let phi = radial(2);
        let x = [1.0, 0.0];
        for eps in [0.1, 0.05, 0.025] {
            let d = mean_value_defect(&phi, &x, eps, 1.0 / 3.0, 2.0 / 3.0);
            assert!((d / (eps * eps) - 1.0 / 3.0).abs() < 1e-9, "eps = {eps}");
        }
    }

    #[test]
    fn p2_defect_is_the_exact_ball_average_identity() {
        // alpha = 0: defect = beta * eps^2 * tr A / (2(N+2)) exactly.
        let phi = QuadraticTest::new(&[1.5, 0.3, 0.3, -0.8], &[0.2, -1.0], 0.4);
        let x = [0.3, -0.2];
        for eps in [0.2, 0.07] {
            let d = mean_value_defect(&phi, &x, eps, 0.0, 1.0);
            let expect = eps * eps * phi.laplacian() / 8.0;
            assert!((d - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn ball_extrema_match_a_dense_circle_scan() {
        let cases = [
            QuadraticTest::new(&[2.0, 0.0, 0.0, 1.0], &[1.0, 0.0], 0.0),
            QuadraticTest::new(&[-1.0, 0.4, 0.4, 0.5], &[0.3, -0.7], 0.2),
            QuadraticTest::new(&[0.0, 1.0, 1.0, 0.0], &[0.05, 0.0], -1.0),
        ];
        let x = [0.4, -0.1];
        let eps = 0.35;
        for phi in &cases {
            let (lo, hi) = ball_extrema(phi, &x, eps);
            // Scan the disc: boundary angles plus interior radii.
            let mut smin = f64::INFINITY;
            let mut smax = f64::NEG_INFINITY;
            let steps = 4001;
            for r_i in 0..=40 {
                let r = eps * r_i as f64 / 40.0;
                for k in 0..steps {
                    let th = 2.0 * core::f64::consts::PI * k as f64 / steps as f64;
                    let y = [x[0] + r * th.cos(), x[1] + r * th.sin()];
                    let v = phi.eval(&y);
                    smin = smin.min(v);
                    smax = smax.max(v);
                }
            }
            assert!(lo <= smin + 1e-10, "min {lo} vs scan {smin}");
            assert!(hi >= smax - 1e-10, "max {hi} vs scan {smax}");
            // The scan is a lower bound on the true range; the analytic
            // extrema must also not overshoot it by more than O(grid^2).
            assert!((lo - smin).abs() < 5e-6);
            assert!((hi - smax).abs() < 5e-6);
        }
    }

    #[test]
    fn one_dimensional_extrema_in_closed_form() {
        // q(y) = a y^2/2 + g y on [-eps, eps].
        let phi = QuadraticTest::new(&[2.0], &[0.5], 0.0);
        let x = [0.0];
        let eps = 0.5;
        let (lo, hi) = ball_extrema(&phi, &x, eps);
        // Interior minimum at y = -g/a = -0.25: value -0.0625.
        assert!((lo - (-0.0625)).abs() < 1e-12);
        // Max at y = +eps: 0.25 + 0.25 = 0.5.
        assert!((hi - 0.5).abs() < 1e-12);
    }

    #[test]
    fn indefinite_extrema_hit_the_hard_case() {
        // q(y) = (-y1^2 + y2^2)/2 + y2 on the unit disc: the gradient has
        // no component along the bottom eigenvector e1, so the sphere
        // multiplier sits at -lambda_min. Stationary angles give
        // min = -3/4 (at sin t = -1/2) and max = 3/2 (at t = pi/2).
        let phi = QuadraticTest::new(&[-1.0, 0.0, 0.0, 1.0], &[0.0, 1.0], 0.0);
        let (lo, hi) = ball_extrema(&phi, &[0.0, 0.0], 1.0);
        assert!((lo - (-0.75)).abs() < 1e-10, "min {lo}");
        assert!((hi - 1.5).abs() < 1e-10, "max {hi}");
    }

    #[test]
    fn anisotropic_reference_value() {
        // A = diag(2,1), b = (1,0), p = 3, N = 2: limit = 0.5 exactly.
        let phi = QuadraticTest::new(&[2.0, 0.0, 0.0, 1.0], &[1.0, 0.0], 0.0);
        let check = expansion_limit_check(&phi, &[0.0, 0.0], 3.0, 2, &[0.1, 0.05, 0.025]).unwrap();
        assert!((check.reference - 0.5).abs() < 1e-14);
        assert!(check.rel_error <= 1e-2, "rel error {}", check.rel_error);
    }

    #[test]
    fn affine_limit_check_reports_zero_error() {
        let phi = QuadraticTest::affine(&[1.0, 1.0], 0.0);
        let check = expansion_limit_check(&phi, &[0.0, 0.0], 4.0, 2, &[0.1, 0.05, 0.025]).unwrap();
        assert_eq!(check.reference, 0.0);
        assert_eq!(check.estimated_limit, 0.0);
        assert_eq!(check.rel_error, 0.0);
    }

    #[test]
    fn radial_limit_check_with_richardson_quality() {
        let phi = radial(2);
        let check = expansion_limit_check(&phi, &[1.0, 0.0], 4.0, 2, &[0.1, 0.05, 0.025]).unwrap();
        assert!((check.reference - 1.0 / 3.0).abs() < 1e-14);
        assert!(check.rel_error <= 1e-3);
    }

    #[test]
    fn minimizer_direction_approaches_minus_gradient() {
        // Blow-up limit: for |b| >> ||A||*eps the ball minimizer
        // direction converges to -grad/|grad| at rate O(eps).
        let phi = QuadraticTest::new(&[0.5, 0.1, 0.1, -0.3], &[2.0, 1.0], 0.0);
        let x = [0.0, 0.0];
        let g = phi.gradient(&x);
        let gn = math::norm(&g);
        let mut prev_err = f64::INFINITY;
        for eps in [0.2, 0.1, 0.05, 0.025] {
            let (ymin, _) = ball_extremizers(&phi, &x, eps);
            let err: f64 = ymin
                .iter()
                .zip(&g)
                .map(|(yi, gi)| {
                    let d = yi / eps + gi / gn;
                    d * d
                })
                .sum::<f64>()
                .sqrt();
            assert!(err <= 3.0 * eps * 0.6 / gn, "eps {eps}: err {err}");
            assert!(err < prev_err + 1e-12);
            prev_err = err;
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn quad2() -> impl Strategy<Value = QuadraticTest> {
            (
                -1.5f64..1.5,
                -1.0f64..1.0,
                -1.5f64..1.5,
                -2.0f64..2.0,
                -2.0f64..2.0,
                -1.0f64..1.0,
            )
                .prop_map(|(a11, a12, a22, b1, b2, c)| {
                    QuadraticTest::new(&[a11, a12, a12, a22], &[b1, b2], c)
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn defect_shift_invariant_and_positively_homogeneous(
                phi in quad2(),
                shift in -3.0f64..3.0,
                lambda in 0.1f64..4.0,
            ) {
                let x = [0.2, -0.4];
                let eps = 0.3;
                let (alpha, beta) = (0.25, 0.75);
                let base = mean_value_defect(&phi, &x, eps, alpha, beta);
                let shifted = QuadraticTest::new(
                    &phi.a, &phi.b, phi.c + shift,
                );
                prop_assert_eq!(mean_value_defect(&shifted, &x, eps, alpha, beta), base);
                let scaled = phi.scaled(lambda);
                let got = mean_value_defect(&scaled, &x, eps, alpha, beta);
                prop_assert!((got - lambda * base).abs() <= 1e-10 * (1.0 + base.abs() * lambda));
            }

            #[test]
            fn extrema_bracket_samples(phi in quad2()) {
                let x = [0.0, 0.0];
                let eps = 0.4;
                let (lo, hi) = ball_extrema(&phi, &x, eps);
                for k in 0..64 {
                    let th = 2.0 * core::f64::consts::PI * k as f64 / 64.0;
                    let r = eps * (k % 5) as f64 / 4.0;
                    let y = [x[0] + r * th.cos(), x[1] + r * th.sin()];
                    let v = phi.eval(&y);
                    prop_assert!(v >= lo - 1e-9);
                    prop_assert!(v <= hi + 1e-9);
                }
            }
        }
    }
}
