use super::{Field, Sample};
use crate::error::{domain, Error, Result};
use crate::geometry::ConeSection;
use crate::numerics::interp::{derivative_uniform, lagrange4};
use std::io::Write;

/// Nodal values on a uniform `(t, θ)` grid over a straight sector, `t = log r`.
///
/// Rows are indexed by `t`, columns by angle; both endpoints are nodes.
#[derive(Clone, Debug)]
pub struct GridField {
    pub cone: ConeSection,
    pub t0: f64,
    pub ht: f64,
    pub nt: usize,
    pub ntheta: usize,
    pub values: Vec<f64>,
    dt: Vec<f64>,
    dtheta: Vec<f64>,
}

impl GridField {
    /// Builds the field and its fourth-order derivative caches.
    pub fn new(
        cone: ConeSection,
        t0: f64,
        ht: f64,
        nt: usize,
        ntheta: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if nt < 5 || ntheta < 5 || values.len() != nt * ntheta || !(ht > 0.0) {
            return Err(Error::Resolution(format!(
                "grid {nt}x{ntheta} with {} values",
                values.len()
            )));
        }
        let hth = cone.width() / (ntheta - 1) as f64;
        let mut dt = vec![0.0; values.len()];
        let mut col = vec![0.0; nt];
        for j in 0..ntheta {
            for i in 0..nt {
                col[i] = values[i * ntheta + j];
            }
            for (i, d) in derivative_uniform(&col, ht).into_iter().enumerate() {
                dt[i * ntheta + j] = d;
            }
        }
        let mut dtheta = Vec::with_capacity(values.len());
        for i in 0..nt {
            dtheta.extend(derivative_uniform(
                &values[i * ntheta..(i + 1) * ntheta],
                hth,
            ));
        }
        Ok(GridField {
            cone,
            t0,
            ht,
            nt,
            ntheta,
            values,
            dt,
            dtheta,
        })
    }

    /// Samples `f` at the nodes.
    pub fn from_field(
        f: &dyn Field,
        cone: ConeSection,
        t0: f64,
        ht: f64,
        nt: usize,
        ntheta: usize,
    ) -> Result<Self> {
        let hth = cone.width() / (ntheta - 1).max(1) as f64;
        let mut values = Vec::with_capacity(nt * ntheta);
        for i in 0..nt {
            let r = (t0 + i as f64 * ht).exp();
            for j in 0..ntheta {
                values.push(f.sample(r, cone.lo + j as f64 * hth)?.value);
            }
        }
        Self::new(cone, t0, ht, nt, ntheta, values)
    }

    pub fn h_theta(&self) -> f64 {
        self.cone.width() / (self.ntheta - 1) as f64
    }

    pub fn t_max(&self) -> f64 {
        self.t0 + (self.nt - 1) as f64 * self.ht
    }

    pub fn radius(&self, i: usize) -> f64 {
        (self.t0 + i as f64 * self.ht).exp()
    }

    pub fn angle(&self, j: usize) -> f64 {
        self.cone.lo + j as f64 * self.h_theta()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ntheta + j]
    }

    /// Writes `t, θ, value` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,theta,value")?;
        for i in 0..self.nt {
            for j in 0..self.ntheta {
                writeln!(
                    out,
                    "{:.17e},{:.17e},{:.17e}",
                    self.t0 + i as f64 * self.ht,
                    self.angle(j),
                    self.at(i, j)
                )?;
            }
        }
        Ok(())
    }
}

impl Field for GridField {
    fn dim(&self) -> usize {
        self.cone.dim
    }

    fn sample(&self, r: f64, angle: f64) -> Result<Sample> {
        let t = r.ln();
        let tol = 1e-9;
        if !(t >= self.t0 - tol && t <= self.t_max() + tol) {
            return domain(format!("radius {r:e} outside the grid"));
        }
        let (lo, hi) = (self.cone.lo, self.cone.hi);
        if !(angle >= lo - tol && angle <= hi + tol) {
            return domain(format!("angle {angle} outside ({lo}, {hi})"));
        }
        let (i0, lt, _) = lagrange4(self.nt, self.t0, self.ht, t);
        let (j0, la, _) = lagrange4(self.ntheta, lo, self.h_theta(), angle);
        let mut s = Sample {
            value: 0.0,
            dr: 0.0,
            dtheta: 0.0,
        };
        for (a, wa) in lt.iter().enumerate() {
            for (b, wb) in la.iter().enumerate() {
                let k = (i0 + a) * self.ntheta + j0 + b;
                let w = wa * wb;
                s.value += w * self.values[k];
                s.dr += w * self.dt[k];
                s.dtheta += w * self.dtheta[k];
            }
        }
        s.dr /= r;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ClosedForm;

    #[test]
    fn interpolates_mode_to_fourth_order() {
        let f = ClosedForm::mode(2.0 / 3.0, 1);
        let cone = f.cone;
        let mut errs = Vec::new();
        for n in [40usize, 80] {
            let ht = 6.0 / (n - 1) as f64;
            let g = GridField::from_field(&f, cone, -6.0, ht, n, n).unwrap();
            let mut e: f64 = 0.0;
            for &(r, a) in &[(0.013, 1.0), (0.3, 0.7), (0.71, 2.0)] {
                let s = g.sample(r, a).unwrap();
                let x = f.sample(r, a).unwrap();
                e = e
                    .max((s.value - x.value).abs())
                    .max((s.dr - x.dr).abs() * r);
            }
            errs.push(e);
        }
        assert!(errs[0] / errs[1] > 10.0, "{errs:?}");
    }
}
