//! The curve-bounded corner with a logarithmic leading term.
//!
//! With `γ = 2/α` and `Y = θ − π/2`, the harmonic function
//! `u = r^γ [log r · sin(γY) + Y cos(γY)]` vanishes on the zero-set curve
//! `r = ρ₁(θ) = exp(−Y cot(γY))`. Near the origin these curves bound a corner of
//! opening `απ` whose boundary function has the one-sided slopes of a straight
//! cone, yet the corner defect `φ − x₁φ′` decays only like `x₁ / log² x₁`.

use crate::error::{domain, Error, Result};
use crate::numerics::fit::least_squares;
use crate::numerics::roots::newton_bracketed;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Which holomorphic branch generates the zero set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    AlphaLt1,
    AlphaGe1,
}

/// `log ρ₁(θ) = −Y cot(γY)`, with the removable value `−α/2` at `Y = 0`.
pub fn log_rho1(theta: f64, alpha: f64) -> Result<f64> {
    let gamma = 2.0 / alpha;
    let y = theta - FRAC_PI_2;
    if y.abs() < 1e-7 {
        // Y cot(γY) = 1/γ − γY²/3 + O(Y⁴)
        return Ok(-(1.0 / gamma - gamma * y * y / 3.0));
    }
    let s = (gamma * y).sin();
    if s.abs() < 1e-15 {
        return domain(format!("theta = {theta} sits on a cotangent pole"));
    }
    Ok(-y * (gamma * y).cos() / s)
}

/// Zero-set radius `ρ₁(θ)`.
pub fn rho1(theta: f64, alpha: f64) -> Result<f64> {
    Ok(log_rho1(theta, alpha)?.exp())
}

/// `d log ρ₁ / dθ = −cot(γY) + γY / sin²(γY)`.
fn dlog_rho1(theta: f64, alpha: f64) -> f64 {
    let gamma = 2.0 / alpha;
    let y = theta - FRAC_PI_2;
    if y.abs() < 1e-7 {
        return 2.0 * gamma * y / 3.0;
    }
    let s = (gamma * y).sin();
    -(gamma * y).cos() / s + gamma * y / (s * s)
}

/// The harmonic function with a logarithmic leading term.
pub fn u_log(r: f64, theta: f64, alpha: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let gamma = 2.0 / alpha;
    let y = theta - FRAC_PI_2;
    let x = gamma * y;
    r.powf(gamma) * (r.ln() * x.sin() + y * x.cos())
}

/// `(∂_r u, ∂_θ u)` of [`u_log`].
pub fn u_log_gradient(r: f64, theta: f64, alpha: f64) -> (f64, f64) {
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let gamma = 2.0 / alpha;
    let y = theta - FRAC_PI_2;
    let x = gamma * y;
    let (s, c) = x.sin_cos();
    let l = r.ln();
    let rg = r.powf(gamma);
    let dr = rg / r * (gamma * (l * s + y * c) + s);
    let dt = rg * (l * gamma * c + c - gamma * y * s);
    (dr, dt)
}

/// `Im(z^m log z) = r^m (log r · sin mθ + θ cos mθ)` with its polar gradient.
pub fn im_zm_log_z(m: f64, r: f64, theta: f64) -> (f64, f64, f64) {
    if r == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let (s, c) = (m * theta).sin_cos();
    let l = r.ln();
    let rm = r.powf(m);
    let v = rm * (l * s + theta * c);
    let dr = rm / r * (m * (l * s + theta * c) + s);
    let dt = rm * (m * l * c + c - m * theta * s);
    (v, dr, dt)
}

/// Left-hand side of the implicit relation satisfied by boundary points `(x₁, φ)`.
pub fn tangent_relation(x1: f64, phi: f64, alpha: f64) -> f64 {
    let gamma = 2.0 / alpha;
    let a = (phi / x1).atan();
    0.5 * (x1 * x1 + phi * phi).ln() * (gamma * (a - FRAC_PI_2)).tan() + a - FRAC_PI_2
}

/// A point of the right curve with `u_log` evaluated on it and on its
/// mirror image.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurveSample {
    pub theta: f64,
    pub x1: f64,
    pub x2: f64,
    pub r: f64,
    pub u_right: f64,
    pub u_left: f64,
    /// `max(|u_right|, |u_left|) / (r^γ(|log r| + 1))`.
    pub scaled: f64,
}

/// The corner bounded by the two zero-set curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogCorner {
    pub alpha: f64,
    pub sigma: f64,
    pub branch: Branch,
}

impl LogCorner {
    /// Validates the window and the graph property of both curves.
    pub fn new(alpha: f64, sigma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Geometry(format!("alpha = {alpha} outside (0, 2)")));
        }
        let branch = if alpha < 1.0 {
            Branch::AlphaLt1
        } else {
            Branch::AlphaGe1
        };
        let theta_minus = FRAC_PI_2 * (1.0 - alpha);
        let bound = match branch {
            Branch::AlphaLt1 => theta_minus,
            Branch::AlphaGe1 => PI - alpha * FRAC_PI_2,
        }
        .min(alpha * FRAC_PI_2);
        if !(sigma > 0.0 && sigma < bound) {
            return Err(Error::Geometry(format!(
                "sigma = {sigma} outside (0, {bound:.6}) for alpha = {alpha}"
            )));
        }
        let corner = LogCorner {
            alpha,
            sigma,
            branch,
        };
        corner.check_graph()?;
        Ok(corner)
    }

    /// Angle of the right tangent ray, `π/2 − απ/2`.
    pub fn theta_minus(&self) -> f64 {
        FRAC_PI_2 * (1.0 - self.alpha)
    }

    /// Angular window `(θ₋ − σ, θ₋)` carrying the right curve.
    pub fn window(&self) -> (f64, f64) {
        let t = self.theta_minus();
        (t - self.sigma, t)
    }

    /// Exponent `2/α` of the leading term.
    pub fn gamma(&self) -> f64 {
        2.0 / self.alpha
    }

    fn log_x1(&self, theta: f64) -> Result<(f64, f64)> {
        let lr = log_rho1(theta, self.alpha)?;
        Ok((
            lr + theta.cos().ln(),
            dlog_rho1(theta, self.alpha) - theta.tan(),
        ))
    }

    /// Point of the right curve at angle `θ`.
    pub fn curve_point(&self, theta: f64) -> Result<(f64, f64)> {
        let r = rho1(theta, self.alpha)?;
        Ok((r * theta.cos(), r * theta.sin()))
    }

    fn curve_tangent(&self, theta: f64) -> Result<(f64, f64)> {
        let r = rho1(theta, self.alpha)?;
        let rp = r * dlog_rho1(theta, self.alpha);
        let (s, c) = theta.sin_cos();
        Ok((rp * c - r * s, rp * s + r * c))
    }

    fn check_graph(&self) -> Result<()> {
        let (a, b) = self.window();
        let n = 2000;
        let mut prev_x = f64::INFINITY;
        let mut prev_r = f64::INFINITY;
        for i in 0..n {
            let th = a + (b - a) * (i as f64 + 0.5) / n as f64;
            let (lx, _) = self.log_x1(th)?;
            let lr = log_rho1(th, self.alpha)?;
            if !(lx < prev_x && lr < prev_r) {
                return Err(Error::Geometry(format!(
                    "curve is not a graph over x1 near theta = {th:.6}; reduce sigma"
                )));
            }
            prev_x = lx;
            prev_r = lr;
        }
        Ok(())
    }

    /// Largest `x₁` covered by the right curve.
    pub fn x1_max(&self) -> f64 {
        let (a, _) = self.window();
        self.curve_point(a + 1e-12).map(|p| p.0).unwrap_or(0.0)
    }

    /// Largest radius covered by the curves.
    pub fn r_max(&self) -> f64 {
        let (a, _) = self.window();
        rho1(a + 1e-12, self.alpha).unwrap_or(0.0)
    }

    /// Angle on the right curve whose abscissa is `x₁`.
    pub fn theta_at_x1(&self, x1: f64) -> Result<f64> {
        if !(x1 > 0.0 && x1 < self.x1_max()) {
            return domain(format!("x1 = {x1:e} outside the curve's range"));
        }
        let (a, b) = self.window();
        let target = x1.ln();
        newton_bracketed(
            |th| match self.log_x1(th) {
                Ok((v, d)) => (v - target, d),
                Err(_) => (f64::NEG_INFINITY, 0.0),
            },
            a + 1e-13,
            b - 1e-13,
            1e-16,
        )
    }

    /// Angle on the right curve at radius `r`.
    pub fn theta_at_radius(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < self.r_max()) {
            return domain(format!("r = {r:e} outside the curve's range"));
        }
        let (a, b) = self.window();
        let target = r.ln();
        newton_bracketed(
            |th| match log_rho1(th, self.alpha) {
                Ok(v) => (v - target, dlog_rho1(th, self.alpha)),
                Err(_) => (f64::NEG_INFINITY, 0.0),
            },
            a + 1e-13,
            b - 1e-13,
            1e-16,
        )
    }

    /// Angular interval of the domain on the circle of radius `r`.
    pub fn arc(&self, r: f64) -> Result<(f64, f64)> {
        let t = self.theta_at_radius(r)?;
        Ok((t, PI - t))
    }

    /// Boundary function (even in `x₁`).
    pub fn phi(&self, x1: f64) -> Result<f64> {
        if x1 == 0.0 {
            return Ok(0.0);
        }
        let th = self.theta_at_x1(x1.abs())?;
        Ok(self.curve_point(th)?.1)
    }

    /// Derivative of the boundary function (odd in `x₁`).
    pub fn dphi(&self, x1: f64) -> Result<f64> {
        if x1 == 0.0 {
            return domain("boundary function has a corner at 0");
        }
        let th = self.theta_at_x1(x1.abs())?;
        let (dx, dy) = self.curve_tangent(th)?;
        Ok(x1.signum() * dy / dx)
    }

    /// Implicit-relation residual at the constructed boundary point over `x₁`.
    pub fn tangent_relation_residual(&self, x1: f64) -> Result<f64> {
        Ok(tangent_relation(x1, self.phi(x1)?, self.alpha))
    }

    /// `tan[(2/α)(arctan(φ/x₁) − π/2)] · log x₁`, which tends to `απ/2`.
    pub fn tangent_expansion(&self, x1: f64) -> Result<f64> {
        let phi = self.phi(x1)?;
        let a = (phi / x1).atan();
        Ok((self.gamma() * (a - FRAC_PI_2)).tan() * x1.ln())
    }

    /// Limit of `(φ − x₁φ′) log²x₁ / x₁`: `α²π[1 + tan²(π/2 − απ/2)]/4`.
    pub fn defect_limit(&self) -> f64 {
        let t = self.theta_minus().tan();
        self.alpha * self.alpha * PI * (1.0 + t * t) / 4.0
    }

    /// `(φ − x₁φ′) log²x₁ / x₁` at `x₁`.
    pub fn normalized_defect(&self, x1: f64) -> Result<f64> {
        let d = self.phi(x1)? - x1 * self.dphi(x1)?;
        Ok(d * x1.ln().powi(2) / x1)
    }

    /// `n` points on each curve, evenly spaced in angle across the window.
    pub fn curve_samples(&self, n: usize) -> Result<Vec<CurveSample>> {
        let (a, b) = self.window();
        (0..n)
            .map(|i| {
                let th = a + (b - a) * (i as f64 + 0.5) / n as f64;
                let r = rho1(th, self.alpha)?;
                let (x1, x2) = self.curve_point(th)?;
                let scale = r.powf(self.gamma()) * (r.ln().abs() + 1.0);
                let right = u_log(r, th, self.alpha);
                let left = u_log(r, PI - th, self.alpha);
                Ok(CurveSample {
                    theta: th,
                    x1,
                    x2,
                    r,
                    u_right: right,
                    u_left: left,
                    scaled: right.abs().max(left.abs()) / scale,
                })
            })
            .collect()
    }

    /// Extrapolates the normalized defect to `x₁ → 0` with the model
    /// `c₀ + c₁/log x₁ + c₂/log² x₁`.
    pub fn extrapolated_defect(&self, x1s: &[f64]) -> Result<f64> {
        if x1s.len() < 4 {
            return domain("need at least four abscissae for the log² extrapolation");
        }
        let vals: Vec<f64> = x1s
            .iter()
            .map(|&x| self.normalized_defect(x))
            .collect::<Result<_>>()?;
        let l: Vec<f64> = x1s.iter().map(|x| x.ln()).collect();
        let cols = vec![
            vec![1.0; l.len()],
            l.iter().map(|v| 1.0 / v).collect(),
            l.iter().map(|v| 1.0 / (v * v)).collect(),
        ];
        Ok(least_squares(&cols, &vals).0[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho1_removable_limit() {
        let a = 0.5;
        assert!((rho1(FRAC_PI_2, a).unwrap() - (-a / 2.0f64).exp()).abs() < 1e-15);
        let near = rho1(FRAC_PI_2 + 1e-6, a).unwrap();
        assert!((near - (-a / 2.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn rho1_at_quarter_angle_is_one() {
        let v = rho1(FRAC_PI_2 - PI / 8.0, 0.5).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rho1_is_even_about_vertical() {
        for s in [0.1, 0.3, 0.7] {
            let a = rho1(FRAC_PI_2 + s, 0.5).unwrap();
            let b = rho1(FRAC_PI_2 - s, 0.5).unwrap();
            assert!((a - b).abs() < 1e-14 * a.max(1.0));
        }
    }

    #[test]
    fn pole_is_a_domain_error() {
        // γY = −π at θ = π/2 − απ/2.
        assert!(rho1(FRAC_PI_2 - 0.25 * PI, 0.5).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (r, th, a) = (0.3, 1.2, 0.5);
        let (dr, dt) = u_log_gradient(r, th, a);
        let h = 1e-6;
        let fr = (u_log(r + h, th, a) - u_log(r - h, th, a)) / (2.0 * h);
        let ft = (u_log(r, th + h, a) - u_log(r, th - h, a)) / (2.0 * h);
        assert!((dr - fr).abs() < 1e-8 && (dt - ft).abs() < 1e-8);
    }

    #[test]
    fn im_zm_log_z_trace() {
        let m = 2.0;
        assert_eq!(im_zm_log_z(m, 0.4, 0.0).0, 0.0);
        let (v, _, _) = im_zm_log_z(m, 0.4, PI / m);
        assert!((v + PI / m * 0.16).abs() < 1e-14);
    }

    #[test]
    fn sigma_validation() {
        assert!(LogCorner::new(0.5, 0.2).is_ok());
        assert!(LogCorner::new(0.5, 0.9).is_err());
        assert!(LogCorner::new(2.5, 0.1).is_err());
    }

    #[test]
    fn slopes_and_evenness() {
        let c = LogCorner::new(0.5, 0.2).unwrap();
        let t = 1e-6;
        let p = c.phi(t).unwrap();
        assert!((p / t - 1.0).abs() < 0.2);
        assert_eq!(c.phi(-t).unwrap(), p);
    }

    #[test]
    fn u_log_vanishes_on_both_curves() {
        let c = LogCorner::new(0.5, 0.3).unwrap();
        let worst = c
            .curve_samples(400)
            .unwrap()
            .iter()
            .fold(0.0f64, |m, s| m.max(s.scaled));
        assert!(worst < 1e-12, "{worst}");
    }
}
