use crate::error::{Error, Result};

/// Safeguarded Newton iteration on a sign-changing bracket `[a, b]`.
///
/// `f` returns the value and the derivative. Falls back to bisection whenever
/// the Newton step leaves the bracket or stalls.
pub fn newton_bracketed<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!(
            "root not bracketed on [{a:e}, {b:e}] (f = {fa:e}, {fb:e})"
        )));
    }
    let (mut lo, mut hi) = if fa < 0.0 { (a, b) } else { (b, a) };
    let mut x = 0.5 * (a + b);
    let mut dx_old = (b - a).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..400 {
        let out = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        if out || (2.0 * fx).abs() > (dx_old * dfx).abs() || dfx == 0.0 {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx_old = dx;
            dx = fx / dfx;
            x -= dx;
        }
        let tol = xtol.max(4.0 * f64::EPSILON * x.abs());
        if dx.abs() <= tol || (hi - lo).abs() <= tol {
            return Ok(x);
        }
        let e = f(x);
        fx = e.0;
        dfx = e.1;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
    }
    Err(Error::Numerical("root finder did not converge".into()))
}

/// Plain bisection for a sign change of `f` on `[a, b]`.
pub fn bisect<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::Numerical(format!(
            "no sign change on [{a:e}, {b:e}]"
        )));
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_finds_cube_root() {
        let x = newton_bracketed(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1e-15).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn unbracketed_is_an_error() {
        assert!(newton_bracketed(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12).is_err());
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn bisect_cosine() {
        let x = bisect(f64::cos, 1.0, 2.0, 1e-15).unwrap();
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }
}
