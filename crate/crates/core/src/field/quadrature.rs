use super::domain::Domain;
use crate::error::{domain, Error, Result};
use crate::geometry::sphere_weight;
use crate::numerics::quad::GaussRule;
use crate::numerics::radii_per_decade;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn default_order() -> usize {
    8
}

/// Graded polar grid: geometric rings with Gauss panels between them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub rings_per_decade: usize,
    pub angular_nodes: usize,
    /// Gauss nodes per radial panel.
    #[serde(default = "default_order")]
    pub radial_order: usize,
}

impl GridSpec {
    pub fn new(r_min: f64, r_max: f64, rings_per_decade: usize, angular_nodes: usize) -> Self {
        GridSpec {
            r_min,
            r_max,
            rings_per_decade,
            angular_nodes,
            radial_order: default_order(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max > self.r_min && self.r_max.is_finite()) {
            return Err(Error::Config(format!(
                "grid radii ({}, {}) are not increasing and positive",
                self.r_min, self.r_max
            )));
        }
        if self.rings_per_decade == 0 || self.angular_nodes < 4 || self.radial_order == 0 {
            return Err(Error::Config(
                "grid needs rings_per_decade >= 1, angular_nodes >= 4, radial_order >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Ring radii `r_min·q^j` up to `r_max`.
    pub fn rings(&self) -> Vec<f64> {
        radii_per_decade(self.r_min, self.r_max, self.rings_per_decade)
    }

    /// Number of decades covered.
    pub fn decades(&self) -> f64 {
        (self.r_max / self.r_min).log10()
    }
}

/// Cumulative bulk integrals with the vertex closure.
#[derive(Clone, Debug)]
pub struct BulkResult<const K: usize> {
    /// `∫_{Ω_ρ}` for each requested radius, tail included.
    pub values: Vec<[f64; K]>,
    /// Contribution of `Ω_{r_min}` from the power-law closure.
    pub tail: [f64; K],
    /// Fitted homogeneity of `ρ^N ∫ integrand dω` at `r_min`.
    pub kappa: [f64; K],
}

/// Quadrature over `Ω_r` and `S_r` of a sector-like domain.
pub struct Quadrature<'a> {
    pub domain: &'a dyn Domain,
    pub spec: GridSpec,
    radial: GaussRule,
    angular: GaussRule,
}

impl<'a> Quadrature<'a> {
    pub fn new(domain: &'a dyn Domain, spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Quadrature {
            domain,
            spec,
            radial: GaussRule::new(spec.radial_order),
            angular: GaussRule::new(spec.angular_nodes),
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Gauss nodes and `dω` weights on `Ω ∩ ∂B_r`, as meridian angles.
    pub fn sphere_nodes(&self, r: f64) -> Result<Vec<(f64, f64)>> {
        let (lo, hi) = self.domain.arc(r)?;
        if !(hi > lo) {
            return Err(Error::Geometry(format!("empty arc at r = {r:e}")));
        }
        let n = self.dim();
        Ok(self
            .angular
            .points(lo, hi)
            .map(|(a, w)| (a, w * sphere_weight(n, a)))
            .collect())
    }

    /// `∫_{Ω∩∂B_r} f dω` over the unit-sphere measure (multiply by `r^{N−1}` for `dσ`).
    pub fn sphere<const K: usize, F>(&self, r: f64, f: F) -> Result<[f64; K]>
    where
        F: Fn(f64) -> Result<[f64; K]>,
    {
        let mut acc = [0.0; K];
        for (a, w) in self.sphere_nodes(r)? {
            let v = f(a)?;
            for k in 0..K {
                acc[k] += w * v[k];
            }
        }
        Ok(acc)
    }

    fn radial_integrand<const K: usize, F>(&self, rho: f64, f: &F) -> Result<[f64; K]>
    where
        F: Fn(f64, f64) -> Result<[f64; K]> + Sync,
    {
        let s = self.sphere(rho, |a| f(rho, a))?;
        let rn = rho.powi(self.dim() as i32);
        Ok(s.map(|v| v * rn))
    }

    /// `∫_{Ω_b ∖ Ω_a} f dy` by Gauss panels in `log ρ` between the rings.
    pub fn annulus<const K: usize, F>(&self, a: f64, b: f64, f: F) -> Result<[f64; K]>
    where
        F: Fn(f64, f64) -> Result<[f64; K]> + Sync,
    {
        if !(a > 0.0 && b > a) {
            return domain(format!("annulus ({a:e}, {b:e}) is empty"));
        }
        let mut breaks: Vec<f64> = radii_per_decade(a, b, self.spec.rings_per_decade);
        breaks.dedup_by(|x, y| (*x / *y - 1.0).abs() < 1e-14);
        self.panels(&breaks, &f).map(|p| {
            let mut acc = [0.0; K];
            for v in p {
                for k in 0..K {
                    acc[k] += v[k];
                }
            }
            acc
        })
    }

    fn panels<const K: usize, F>(&self, breaks: &[f64], f: &F) -> Result<Vec<[f64; K]>>
    where
        F: Fn(f64, f64) -> Result<[f64; K]> + Sync,
    {
        breaks
            .par_windows(2)
            .map(|w| {
                let (t0, t1) = (w[0].ln(), w[1].ln());
                let mut acc = [0.0; K];
                for (t, wt) in self.radial.points(t0, t1) {
                    let v = self.radial_integrand(t.exp(), f)?;
                    for k in 0..K {
                        acc[k] += wt * v[k];
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    /// Cumulative `∫_{Ω_ρ} f dy` for each radius in `radii` (ascending,
    /// within `[r_min, r_max]`). Below `r_min` the radial integrand
    /// `ρ^N ∫ f dω` is closed by the power law fitted on the first ring.
    pub fn bulk_cumulative<const K: usize, F>(&self, radii: &[f64], f: F) -> Result<BulkResult<K>>
    where
        F: Fn(f64, f64) -> Result<[f64; K]> + Sync,
    {
        let (r_min, r_max) = (self.spec.r_min, self.spec.r_max);
        if radii.windows(2).any(|w| w[1] < w[0]) {
            return domain("bulk radii must be ascending");
        }
        if let Some(&r) = radii
            .iter()
            .find(|&&r| r < r_min * (1.0 - 1e-12) || r > r_max * (1.0 + 1e-12))
        {
            return domain(format!(
                "radius {r:e} outside the grid range [{r_min:e}, {r_max:e}]"
            ));
        }
        let top = radii.last().copied().unwrap_or(r_min).max(r_min);
        let mut breaks: Vec<f64> = self.spec.rings().into_iter().filter(|&r| r < top).collect();
        breaks.extend(radii.iter().copied());
        breaks.push(top);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|x, y| (*x / *y - 1.0).abs() < 1e-13);

        let q = 10f64.powf(1.0 / self.spec.rings_per_decade as f64);
        let j0 = self.radial_integrand(r_min, &f)?;
        let j1 = self.radial_integrand(r_min * q, &f)?;
        let mut tail = [0.0; K];
        let mut kappa = [f64::NAN; K];
        for k in 0..K {
            if j0[k] == 0.0 {
                continue;
            }
            if j1[k] / j0[k] <= 0.0 {
                // No consistent power law; the component is left unclosed.
                continue;
            }
            let p = (j1[k] / j0[k]).ln() / q.ln();
            if p < 0.05 {
                return Err(Error::Numerical(format!(
                    "bulk integrand component {k} has homogeneity {p:.3} at the vertex; not integrable"
                )));
            }
            kappa[k] = p - self.dim() as f64;
            tail[k] = j0[k] / p;
        }

        let pieces = self.panels(&breaks, &f)?;
        let mut values = Vec::with_capacity(radii.len());
        let mut acc = tail;
        let mut it = radii.iter().peekable();
        while let Some(&&r) = it.peek() {
            if (r / r_min - 1.0).abs() < 1e-12 {
                values.push(acc);
                it.next();
            } else {
                break;
            }
        }
        for (w, p) in breaks.windows(2).zip(&pieces) {
            for k in 0..K {
                acc[k] += p[k];
            }
            while let Some(&&r) = it.peek() {
                if (r / w[1] - 1.0).abs() < 1e-12 {
                    values.push(acc);
                    it.next();
                } else {
                    break;
                }
            }
        }
        debug_assert_eq!(values.len(), radii.len());
        Ok(BulkResult {
            values,
            tail,
            kappa,
        })
    }

    /// `∫_{Ω_r} f dy` for a single radius.
    pub fn bulk<const K: usize, F>(&self, r: f64, f: F) -> Result<[f64; K]>
    where
        F: Fn(f64, f64) -> Result<[f64; K]> + Sync,
    {
        Ok(self.bulk_cumulative(&[r], f)?.values[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConeSection;
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::new(1e-4, 1.0, 4, 24)
    }

    #[test]
    fn half_disk_area() {
        let cone = ConeSection::sector(1.0);
        let q = Quadrature::new(&cone, grid()).unwrap();
        let [a] = q.bulk(1.0, |_, _| Ok([1.0])).unwrap();
        assert!((a - PI / 2.0).abs() < 1e-12);
        let [l] = q.sphere(0.3, |_| Ok([1.0])).unwrap();
        assert!((l - PI).abs() < 1e-14);
    }

    #[test]
    fn hemisphere_volume() {
        let cap = ConeSection::cap(PI / 2.0);
        let q = Quadrature::new(&cap, grid()).unwrap();
        let [v] = q.bulk(0.5, |_, _| Ok([1.0])).unwrap();
        assert!((v - 2.0 * PI / 3.0 * 0.125).abs() < 1e-12);
    }

    #[test]
    fn cumulative_matches_single() {
        let cone = ConeSection::sector(0.5);
        let q = Quadrature::new(&cone, grid()).unwrap();
        let radii = [1e-4, 3e-3, 0.2, 0.5];
        let c = q
            .bulk_cumulative(&radii, |r, a| Ok([r.powf(1.5) * a.sin()]))
            .unwrap();
        for (r, v) in radii.iter().zip(&c.values) {
            let [s] = q.bulk(*r, |r, a| Ok([r.powf(1.5) * a.sin()])).unwrap();
            assert!((s - v[0]).abs() < 1e-14 * s.abs().max(1e-300) + 1e-300);
        }
        assert!((c.kappa[0] - 1.5).abs() < 1e-10);
    }

    #[test]
    fn radius_outside_grid_is_domain_error() {
        let cone = ConeSection::sector(1.0);
        let q = Quadrature::new(&cone, grid()).unwrap();
        assert!(q.bulk(1e-6, |_, _| Ok([1.0])).is_err());
    }
}
