use crate::error::{domain, Result};
use crate::geometry::{ConeSection, Straightening};
use crate::logexample::LogCorner;
use std::sync::Arc;

/// A sector-like domain described by its angular interval on each sphere.
pub trait Domain: Send + Sync {
    fn dim(&self) -> usize;
    /// Meridian-angle interval of `Ω ∩ ∂B_r`.
    fn arc(&self, r: f64) -> Result<(f64, f64)>;
}

impl Domain for ConeSection {
    fn dim(&self) -> usize {
        self.dim
    }

    fn arc(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return domain("arc radius must be positive");
        }
        Ok((self.lo, self.hi))
    }
}

impl Domain for Straightening {
    fn dim(&self) -> usize {
        Straightening::dim(self)
    }

    fn arc(&self, r: f64) -> Result<(f64, f64)> {
        Straightening::arc(self, r)
    }
}

impl Domain for LogCorner {
    fn dim(&self) -> usize {
        2
    }

    fn arc(&self, r: f64) -> Result<(f64, f64)> {
        LogCorner::arc(self, r)
    }
}

impl<T: Domain + ?Sized> Domain for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn arc(&self, r: f64) -> Result<(f64, f64)> {
        (**self).arc(r)
    }
}

impl<T: Domain + ?Sized> Domain for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn arc(&self, r: f64) -> Result<(f64, f64)> {
        (**self).arc(r)
    }
}

/// `Ω/λ`: the domain seen by a blow-up at scale `λ`.
#[derive(Clone)]
pub struct ScaledDomain<D> {
    pub inner: D,
    pub lambda: f64,
}

impl<D: Domain> Domain for ScaledDomain<D> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn arc(&self, r: f64) -> Result<(f64, f64)> {
        self.inner.arc(self.lambda * r)
    }
}
