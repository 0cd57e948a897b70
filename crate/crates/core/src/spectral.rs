//! Dirichlet eigenproblems of `L_V = −Δ_S − V` on caps, the Hardy constant
//! `Λ(V)`, characteristic exponents, and numerical Hardy certificates.
//!
//! Arcs are discretized by second differences. Rotationally symmetric caps in
//! space separate in the azimuth; each Fourier index `m` gives a finite-volume
//! Sturm–Liouville problem in the colatitude with the exact surface measure of
//! each control volume, so the discrete forms are symmetric by construction.

use crate::coefficients::PotentialSpec;
use crate::error::{Error, Result};
use crate::geometry::{ConeSection, Straightening};
use crate::numerics::quad::GaussRule;
use crate::numerics::tridiag::SymTridiag;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// One eigenpair with its error estimate.
#[derive(Clone, Debug, Serialize)]
pub struct EigenPair {
    /// Richardson-extrapolated eigenvalue.
    pub mu: f64,
    /// Eigenvalue of the base grid.
    pub mu_raw: f64,
    /// `|extrapolated − fine-grid|`.
    pub error: f64,
    /// Samples on [`CapEigensystem::grid`], normalized in `L²(C)`.
    pub psi: Vec<f64>,
}

/// Ordered eigenpairs on a cap.
#[derive(Clone, Debug, Serialize)]
pub struct CapEigensystem {
    pub cap: ConeSection,
    pub v: PotentialSpec,
    pub m: usize,
    /// Angular nodes, endpoints included.
    pub grid: Vec<f64>,
    /// Quadrature weights of `dσ` on the grid.
    pub weights: Vec<f64>,
    pub pairs: Vec<EigenPair>,
}

impl CapEigensystem {
    /// `∫_C f g dσ` on the grid.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(f)
            .zip(g)
            .map(|((w, a), b)| w * a * b)
            .sum()
    }

    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn mus(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.mu).collect()
    }
}

/// Roots of `σ² + (N−2)σ − μ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentPair {
    pub sigma_plus: f64,
    pub sigma_minus: f64,
}

/// `σ± = −(N−2)/2 ± √(((N−2)/2)² + μ)`.
pub fn exponents(mu: f64, dim: usize) -> Result<ExponentPair> {
    let a = (dim as f64 - 2.0) / 2.0;
    let disc = a * a + mu;
    if disc < -1e-14 * (1.0 + mu.abs()) {
        return Err(Error::Admissibility(format!(
            "mu = {mu} is below the critical threshold {}",
            -a * a
        )));
    }
    let s = disc.max(0.0).sqrt();
    Ok(ExponentPair {
        sigma_plus: -a + s,
        sigma_minus: -a - s,
    })
}

/// Discrete forms on a cap for a fixed azimuthal index.
///
/// All arrays run over the unknowns (interior nodes); `first` is the grid
/// index of the first unknown.
#[derive(Clone, Debug)]
pub struct CapOperator {
    pub dim: usize,
    pub cap: ConeSection,
    pub n: usize,
    pub first: usize,
    /// Mass (surface measure, divided by `2π` in space).
    pub mass: Vec<f64>,
    /// Stiffness of `|∇_S ψ|²`, including the `m²` term.
    pub stiff_diag: Vec<f64>,
    pub stiff_off: Vec<f64>,
    /// Diagonal of the potential form.
    pub pot: Vec<f64>,
    /// Measure scale: `2π` in space, `1` in the plane.
    pub scale: f64,
}

impl CapOperator {
    pub fn new(cap: ConeSection, v: PotentialSpec, m: usize, n: usize) -> Result<Self> {
        cap.validate()?;
        if n < 8 {
            return Err(Error::Resolution(format!(
                "grid of {n} intervals is too coarse"
            )));
        }
        let h = cap.width() / n as f64;
        if cap.dim == 2 {
            if !v.is_zero() {
                return Err(Error::Unsupported("arcs carry no angular potential".into()));
            }
            let k = n - 1;
            return Ok(CapOperator {
                dim: 2,
                cap,
                n,
                first: 1,
                mass: vec![h; k],
                stiff_diag: vec![2.0 / h; k],
                stiff_off: vec![-1.0 / h; k - 1],
                pot: vec![0.0; k],
                scale: 1.0,
            });
        }
        let first = if m == 0 { 0 } else { 1 };
        let mut mass = Vec::new();
        let mut sd = Vec::new();
        let mut so = Vec::new();
        let mut pot = Vec::new();
        let m2 = (m * m) as f64;
        for j in first..n {
            let phi = j as f64 * h;
            let (a, b) = ((phi - 0.5 * h).max(0.0), phi + 0.5 * h);
            mass.push(a.cos() - b.cos());
            let flux_in = if j == 0 { 0.0 } else { a.sin() / h };
            let flux_out = b.sin() / h;
            let q = if m == 0 {
                0.0
            } else {
                ((0.5 * b).tan() / (0.5 * a).tan()).ln()
            };
            sd.push(flux_in + flux_out + m2 * q);
            if j + 1 < n {
                so.push(-flux_out);
            }
            pot.push(match v {
                PotentialSpec::Zero => 0.0,
                PotentialSpec::Constant { c } => c * (a.cos() - b.cos()),
                PotentialSpec::Cosine { c } => 0.5 * c * (b.sin().powi(2) - a.sin().powi(2)),
            });
        }
        Ok(CapOperator {
            dim: 3,
            cap,
            n,
            first,
            mass,
            stiff_diag: sd,
            stiff_off: so,
            pot,
            scale: 2.0 * PI,
        })
    }

    /// `M^{-1/2}(K − t·P + s·M)M^{-1/2}` with `P` the potential form.
    pub fn symmetric(&self, t: f64, s: f64) -> SymTridiag {
        let d = self
            .stiff_diag
            .iter()
            .zip(&self.pot)
            .zip(&self.mass)
            .map(|((k, p), m)| (k - t * p) / m + s)
            .collect();
        let o = self
            .stiff_off
            .iter()
            .enumerate()
            .map(|(i, k)| k / (self.mass[i] * self.mass[i + 1]).sqrt())
            .collect();
        SymTridiag::new(d, o)
    }

    /// Quadratic forms `(‖ψ‖², ∫|∇_Sψ|², ∫Vψ²)` of a vector over the unknowns.
    pub fn forms(&self, x: &[f64]) -> (f64, f64, f64) {
        let mut mm = 0.0;
        let mut kk = 0.0;
        let mut pp = 0.0;
        for i in 0..x.len() {
            mm += self.mass[i] * x[i] * x[i];
            kk += self.stiff_diag[i] * x[i] * x[i];
            pp += self.pot[i] * x[i] * x[i];
            if i + 1 < x.len() {
                kk += 2.0 * self.stiff_off[i] * x[i] * x[i + 1];
            }
        }
        (mm * self.scale, kk * self.scale, pp * self.scale)
    }

    fn grid(&self) -> (Vec<f64>, Vec<f64>) {
        let h = self.cap.width() / self.n as f64;
        let nodes: Vec<f64> = (0..=self.n).map(|j| self.cap.lo + j as f64 * h).collect();
        let weights = if self.dim == 2 {
            (0..=self.n)
                .map(|j| if j == 0 || j == self.n { 0.5 * h } else { h })
                .collect()
        } else {
            (0..=self.n)
                .map(|j| {
                    let phi = nodes[j];
                    let a = (phi - 0.5 * h).max(0.0);
                    let b = (phi + 0.5 * h).min(self.cap.hi);
                    2.0 * PI * (a.cos() - b.cos())
                })
                .collect()
        };
        (nodes, weights)
    }

    /// Lowest `k` eigenvalues and unknown-space eigenvectors (M-orthonormal).
    fn lowest(&self, k: usize) -> Result<Vec<(f64, Vec<f64>)>> {
        let s = self.symmetric(1.0, 0.0);
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let mu = s.eigenvalue(i);
            let z = s.eigenvector(mu)?;
            let mut psi: Vec<f64> = z
                .iter()
                .zip(&self.mass)
                .map(|(z, m)| z / (m * self.scale).sqrt())
                .collect();
            let pivot = psi.iter().copied().find(|v| v.abs() > 1e-8).unwrap_or(1.0);
            if pivot < 0.0 {
                psi.iter_mut().for_each(|v| *v = -*v);
            }
            out.push((mu, psi));
        }
        Ok(out)
    }

    /// Embeds an unknown-space vector into the full grid (zeros at Dirichlet nodes).
    pub fn embed(&self, x: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n + 1];
        full[self.first..self.first + x.len()].copy_from_slice(x);
        full
    }

    /// Restricts a full-grid vector to the unknowns.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        full[self.first..self.first + self.mass.len()].to_vec()
    }
}

/// First `k_max` Dirichlet eigenpairs of `L_V` on `cap` (azimuthal index `m`).
pub fn solve_cap_eigen_m(
    cap: ConeSection,
    v: PotentialSpec,
    m: usize,
    k_max: usize,
    n_grid: usize,
) -> Result<CapEigensystem> {
    if n_grid < 64 {
        return Err(Error::Resolution(format!("n_grid = {n_grid} below 64")));
    }
    if k_max == 0 || 4 * k_max > n_grid {
        return Err(Error::Resolution(format!(
            "k_max = {k_max} not resolvable with {n_grid} intervals"
        )));
    }
    let coarse = CapOperator::new(cap, v, m, n_grid)?;
    let fine = CapOperator::new(cap, v, m, 2 * n_grid)?;
    let base = coarse.lowest(k_max)?;
    let sf = fine.symmetric(1.0, 0.0);
    let (grid, weights) = coarse.grid();
    let pairs = base
        .into_iter()
        .enumerate()
        .map(|(i, (mu_raw, psi))| {
            let mu_fine = sf.eigenvalue(i);
            let mu = (4.0 * mu_fine - mu_raw) / 3.0;
            EigenPair {
                mu,
                mu_raw,
                error: (mu - mu_fine).abs(),
                psi: coarse.embed(&psi),
            }
        })
        .collect();
    Ok(CapEigensystem {
        cap,
        v,
        m,
        grid,
        weights,
        pairs,
    })
}

/// First `k_max` eigenpairs (zonal modes in space).
pub fn solve_cap_eigen(
    cap: ConeSection,
    v: PotentialSpec,
    k_max: usize,
    n_grid: usize,
) -> Result<CapEigensystem> {
    solve_cap_eigen_m(cap, v, 0, k_max, n_grid)
}

/// `μ₁(V, r)` on the rescaled section `C_r` of the pushed domain.
pub fn mu1_on_shrinking_cap(
    s: &Straightening,
    v: PotentialSpec,
    r: f64,
    n_grid: usize,
) -> Result<f64> {
    let (lo, hi) = s.arc(r)?;
    if !(hi > lo) {
        return Err(Error::Geometry(format!("empty cap at r = {r:e}")));
    }
    let cap = ConeSection {
        dim: s.dim(),
        lo,
        hi,
    };
    Ok(solve_cap_eigen(cap, v, 1, n_grid)?.pairs[0].mu)
}

/// `Λ(V)` with the admissibility flag.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LambdaReport {
    pub lambda: f64,
    pub lambda_raw: f64,
    pub maximizing_m: usize,
    pub admissible: bool,
}

fn lambda_discrete(cap: ConeSection, v: PotentialSpec, m: usize, n: usize) -> Result<f64> {
    let op = CapOperator::new(cap, v, m, n)?;
    let a = (cap.dim as f64 - 2.0) / 2.0;
    // Largest t with a positive eigenvalue of P − t(K + a²M).
    let count_pos = |t: f64| {
        let d: Vec<f64> = (0..op.mass.len())
            .map(|i| (t * (op.stiff_diag[i] + a * a * op.mass[i]) - op.pot[i]) / op.mass[i])
            .collect();
        let o: Vec<f64> = op
            .stiff_off
            .iter()
            .enumerate()
            .map(|(i, k)| t * k / (op.mass[i] * op.mass[i + 1]).sqrt())
            .collect();
        SymTridiag::new(d, o).count_below(0.0)
    };
    let vmax = op
        .pot
        .iter()
        .zip(&op.mass)
        .map(|(p, m)| (p / m).abs())
        .fold(0.0, f64::max);
    let mut hi = 4.0 * vmax / (a * a).max(1e-300) + 1.0;
    let mut lo = -hi;
    if count_pos(lo) == 0 {
        return Err(Error::Numerical(
            "indefinite discretization in the Hardy quotient".into(),
        ));
    }
    if count_pos(hi) > 0 {
        return Err(Error::Numerical("Hardy quotient bound failed".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_pos(mid) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `Λ(V) = max ∫Vψ² / ∫(|∇_Sψ|² + ((N−2)/2)²ψ²)`, maximized over azimuthal
/// indices `0..=4` and Richardson-extrapolated from grids `n` and `2n`.
pub fn lambda_v(cap: ConeSection, v: PotentialSpec, n_grid: usize) -> Result<LambdaReport> {
    if cap.dim == 2 || v.is_zero() {
        return Ok(LambdaReport {
            lambda: 0.0,
            lambda_raw: 0.0,
            maximizing_m: 0,
            admissible: true,
        });
    }
    let mut best = (f64::NEG_INFINITY, 0.0, 0);
    for m in 0..=4 {
        let raw = lambda_discrete(cap, v, m, n_grid)?;
        let fine = lambda_discrete(cap, v, m, 2 * n_grid)?;
        let ext = (4.0 * fine - raw) / 3.0;
        if ext > best.0 {
            best = (ext, raw, m);
        }
    }
    Ok(LambdaReport {
        lambda: best.0,
        lambda_raw: best.1,
        maximizing_m: best.2,
        admissible: best.0 < 1.0,
    })
}

/// Smallest slacks of the three Hardy-type inequalities over all trials,
/// normalized by `|LHS| + |RHS|`.
#[derive(Clone, Debug, Serialize)]
pub struct HardyReport {
    pub trials: usize,
    pub r: f64,
    pub mu1: f64,
    pub lambda: f64,
    /// Inequality with the sharp weight `(N−2)²/4 + μ₁`.
    pub min_slack_sharp: f64,
    /// Inequality with half the sharp weight.
    pub min_slack_half: f64,
    /// Gradient-coercivity inequality with constant `(1−Λ)/2`.
    pub min_slack_gradient: f64,
    pub worst_trial: usize,
}

/// A radial factor and its derivative.
#[derive(Clone, Copy, Debug)]
pub enum RadialFactor {
    Power(f64),
    /// `(s − a)²(b − s)²` on `[a, b]`, zero elsewhere.
    Bump(f64, f64),
}

impl RadialFactor {
    pub fn eval(&self, s: f64) -> (f64, f64) {
        match *self {
            RadialFactor::Power(p) => (s.powf(p), p * s.powf(p - 1.0)),
            RadialFactor::Bump(a, b) => {
                if s <= a || s >= b {
                    (0.0, 0.0)
                } else {
                    let (u, w) = (s - a, b - s);
                    (u * u * w * w, 2.0 * u * w * w - 2.0 * u * u * w)
                }
            }
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match *self {
            RadialFactor::Power(_) => vec![],
            RadialFactor::Bump(a, b) => vec![a, b],
        }
    }
}

/// Test function `Σ c_k R_k(s) ψ_k` over zonal eigenvectors.
#[derive(Clone, Debug)]
pub struct HardyTrial {
    pub terms: Vec<(f64, RadialFactor, usize)>,
}

struct HardySums {
    grad: f64,
    pot: f64,
    weighted: f64,
    surface: f64,
}

fn hardy_sums(
    op: &CapOperator,
    modes: &[(f64, Vec<f64>)],
    trial: &HardyTrial,
    r: f64,
) -> HardySums {
    let rule = GaussRule::new(48);
    let mut breaks = vec![0.0, r / 64.0, r / 8.0, r];
    for (_, rf, _) in &trial.terms {
        breaks.extend(rf.breaks().into_iter().filter(|b| *b > 0.0 && *b < r));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let len = op.mass.len();
    let mut acc = HardySums {
        grad: 0.0,
        pot: 0.0,
        weighted: 0.0,
        surface: 0.0,
    };
    let mut add = |s: f64, w: f64| {
        let mut v = vec![0.0; len];
        let mut dv = vec![0.0; len];
        for (c, rf, k) in &trial.terms {
            let (val, der) = rf.eval(s);
            for i in 0..len {
                v[i] += c * val * modes[*k].1[i];
                dv[i] += c * der * modes[*k].1[i];
            }
        }
        let (mv, kv, pv) = op.forms(&v);
        let (md, _, _) = op.forms(&dv);
        // Volume element s^{N−1} ds dσ; |∇v|² = v_s² + s⁻²|∇_S v|².
        acc.grad += w * (md * s * s + kv);
        acc.pot += w * pv;
        acc.weighted += w * mv;
    };
    for win in breaks.windows(2) {
        let (a, b) = (win[0], win[1]);
        if a == 0.0 {
            // s = b u⁴ removes the algebraic endpoint behaviour.
            for (u, w) in rule.points(0.0, 1.0) {
                add(b * u.powi(4), w * 4.0 * b * u.powi(3));
            }
        } else {
            for (s, w) in rule.points(a, b) {
                add(s, w);
            }
        }
    }
    let mut vr = vec![0.0; len];
    for (c, rf, k) in &trial.terms {
        let (val, _) = rf.eval(r);
        for i in 0..len {
            vr[i] += c * val * modes[*k].1[i];
        }
    }
    acc.surface = op.forms(&vr).0 * r * r;
    acc
}

fn random_trial(rng: &mut ChaCha8Rng, modes: usize, r: f64) -> HardyTrial {
    let count = rng.random_range(1..=3usize);
    let terms = (0..count)
        .map(|_| {
            let c = rng.random_range(-1.0..1.0);
            let k = rng.random_range(0..modes);
            let rf = if rng.random_range(0.0..1.0) < 0.5 {
                RadialFactor::Power(rng.random_range(-0.3..3.0))
            } else {
                let a = rng.random_range(0.0..0.8) * r;
                let b = a + rng.random_range(0.05..1.0) * (r - a);
                RadialFactor::Bump(a, b)
            };
            (c, rf, k)
        })
        .collect();
    HardyTrial { terms }
}

/// Checks the Hardy-type inequalities with boundary term on the straight cone
/// over `C` truncated at radius `r`, for `trials` random test functions plus
/// the truncated leading mode `r^{σ₁⁺}ψ₁`.
pub fn hardy_certificate(
    cap: ConeSection,
    v: PotentialSpec,
    r: f64,
    trials: usize,
    n_grid: usize,
    seed: u64,
) -> Result<HardyReport> {
    if cap.dim != 3 {
        return Err(Error::Unsupported(
            "the boundary Hardy inequality is checked in space".into(),
        ));
    }
    let op = CapOperator::new(cap, v, 0, n_grid)?;
    let modes = op.lowest(4)?;
    let mu1 = modes[0].0;
    let mut lam = f64::NEG_INFINITY;
    for m in 0..=4 {
        lam = lam.max(lambda_discrete(cap, v, m, n_grid)?);
    }
    let n = cap.dim as f64;
    let a2 = (n - 2.0).powi(2) / 4.0;
    let sig = exponents(mu1, 3)?.sigma_plus;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = vec![HardyTrial {
        terms: vec![(1.0, RadialFactor::Power(sig), 0)],
    }];
    all.extend((0..trials).map(|_| random_trial(&mut rng, modes.len(), r)));
    let results: Vec<(f64, f64, f64)> = {
        use rayon::prelude::*;
        all.par_iter()
            .map(|t| {
                let s = hardy_sums(&op, &modes, t, r);
                let bdry = (n - 2.0) / (2.0 * r) * s.surface;
                let lhs = s.grad - s.pot + bdry;
                let rhs_sharp = (a2 + mu1) * s.weighted;
                let rhs_half = 0.5 * (a2 + mu1) * s.weighted;
                let lhs_g = s.grad - s.pot + 0.5 * (1.0 + lam) * bdry;
                let rhs_g = 0.5 * (1.0 - lam) * s.grad;
                let norm = |l: f64, r: f64| {
                    let d = l.abs() + r.abs();
                    if d > 0.0 {
                        (l - r) / d
                    } else {
                        0.0
                    }
                };
                (
                    norm(lhs, rhs_sharp),
                    norm(lhs, rhs_half),
                    norm(lhs_g, rhs_g),
                )
            })
            .collect()
    };
    let mut rep = HardyReport {
        trials: all.len(),
        r,
        mu1,
        lambda: lam,
        min_slack_sharp: f64::INFINITY,
        min_slack_half: f64::INFINITY,
        min_slack_gradient: f64::INFINITY,
        worst_trial: 0,
    };
    for (i, (a, b, c)) in results.into_iter().enumerate() {
        if a < rep.min_slack_sharp {
            rep.min_slack_sharp = a;
            rep.worst_trial = i;
        }
        rep.min_slack_half = rep.min_slack_half.min(b);
        rep.min_slack_gradient = rep.min_slack_gradient.min(c);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn half_circle_spectrum() {
        let e = solve_cap_eigen(ConeSection::sector(1.0), PotentialSpec::Zero, 3, 1024).unwrap();
        for (k, p) in e.pairs.iter().enumerate() {
            let want = ((k + 1) * (k + 1)) as f64;
            assert!((p.mu - want).abs() < 1e-8, "{} vs {want}", p.mu);
        }
        // ψ₁ = √(2/π) sin θ′.
        let j = 512;
        let th = e.grid[j] - e.cap.lo;
        assert!((e.pairs[0].psi[j] - (2.0 / PI).sqrt() * th.sin()).abs() < 1e-4);
    }

    #[test]
    fn sector_two_thirds() {
        let e =
            solve_cap_eigen(ConeSection::sector(2.0 / 3.0), PotentialSpec::Zero, 1, 512).unwrap();
        assert!((e.pairs[0].mu - 2.25).abs() < 1e-8);
    }

    #[test]
    fn hemisphere_first_zonal() {
        let e = solve_cap_eigen(ConeSection::cap(FRAC_PI_2), PotentialSpec::Zero, 2, 512).unwrap();
        assert!((e.pairs[0].mu - 2.0).abs() < 1e-6, "{}", e.pairs[0].mu);
        assert!((e.pairs[1].mu - 12.0).abs() < 1e-5, "{}", e.pairs[1].mu);
    }

    #[test]
    fn hemisphere_azimuthal_one() {
        // P_2^1 vanishes on the equator: ℓ = 2, μ = 6.
        let e =
            solve_cap_eigen_m(ConeSection::cap(FRAC_PI_2), PotentialSpec::Zero, 1, 1, 512).unwrap();
        assert!((e.pairs[0].mu - 6.0).abs() < 1e-5, "{}", e.pairs[0].mu);
    }

    #[test]
    fn orthonormal_and_positive() {
        let e = solve_cap_eigen(
            ConeSection::cap(1.1),
            PotentialSpec::Cosine { c: 0.4 },
            3,
            256,
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let ip = e.inner(&e.pairs[i].psi, &e.pairs[j].psi);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-8, "{i}{j}: {ip}");
            }
        }
        assert!(e.pairs[0].psi.iter().all(|v| *v >= -1e-14));
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(
            exponents(9.0, 2).unwrap(),
            ExponentPair {
                sigma_plus: 3.0,
                sigma_minus: -3.0
            }
        );
        assert_eq!(
            exponents(0.0, 3).unwrap(),
            ExponentPair {
                sigma_plus: 0.0,
                sigma_minus: -1.0
            }
        );
        let p = exponents(2.0, 3).unwrap();
        assert!((p.sigma_plus - 1.0).abs() < 1e-15 && (p.sigma_minus + 2.0).abs() < 1e-15);
        assert!(exponents(-1.0, 3).is_err());
    }

    #[test]
    fn lambda_for_constant_potential() {
        let cap = ConeSection::cap(FRAC_PI_2);
        assert_eq!(lambda_v(cap, PotentialSpec::Zero, 128).unwrap().lambda, 0.0);
        let l = lambda_v(cap, PotentialSpec::Constant { c: 0.9 }, 256).unwrap();
        assert!((l.lambda - 0.9 / 2.25).abs() < 1e-6, "{}", l.lambda);
        assert_eq!(l.maximizing_m, 0);
    }

    #[test]
    fn hardy_sharp_mode() {
        let rep = hardy_certificate(
            ConeSection::cap(FRAC_PI_2),
            PotentialSpec::Zero,
            1.0,
            20,
            128,
            7,
        )
        .unwrap();
        assert!(rep.min_slack_sharp >= -1e-10, "{rep:?}");
        assert!(rep.min_slack_gradient >= -1e-10, "{rep:?}");
    }
}
