//! Scalar root finding and one-dimensional minimization.

use crate::error::{QiError, Result};

const MAX_ITER: usize = 200;

/// Newton iteration safeguarded by a bisection bracket.
///
/// `f` returns `(value, derivative)`. The bracket `[lo, hi]` must enclose a
/// sign change. Newton steps that leave the bracket are replaced by a
/// bisection step. Stops once `|Δx| < x_tol`.
pub fn bracketed_newton<F>(mut f: F, lo: f64, hi: f64, start: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(QiError::NoSignChange { lo, hi });
    }
    let rising = f_hi > 0.0;
    let mut x = if start > lo && start < hi {
        start
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..MAX_ITER {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == rising {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step < x_tol || hi - lo < x_tol {
            return Ok(x);
        }
    }
    Ok(x)
}

/// Plain bisection to bracket width `x_tol`.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(QiError::NoSignChange { lo, hi });
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo < x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Result of a bounded scalar minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search on `[lo, hi]` down to bracket width `x_tol`.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evaluations = 2;
    while (b - a).abs() > x_tol && evaluations < 4 * MAX_ITER {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }
    let (x, value) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok(Minimum {
        x,
        value,
        evaluations,
    })
}

/// Coarse equispaced scan over `[lo, hi]` followed by golden-section
/// refinement around the best scan point.
pub fn scan_then_golden<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    scan_points: usize,
    x_tol: f64,
) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    assert!(scan_points >= 3, "need at least three scan points");
    let step = (hi - lo) / (scan_points - 1) as f64;
    let mut best = (0usize, f64::INFINITY);
    let mut values = Vec::with_capacity(scan_points);
    for i in 0..scan_points {
        let x = if i + 1 == scan_points {
            hi
        } else {
            lo + step * i as f64
        };
        let v = f(x)?;
        values.push((x, v));
        if v < best.1 {
            best = (i, v);
        }
    }
    let i = best.0;
    let a = values[i.saturating_sub(1)].0;
    let b = values[(i + 1).min(scan_points - 1)].0;
    let refined = golden_section(&mut f, a, b, x_tol)?;
    let (x, value) = if refined.value <= best.1 {
        (refined.x, refined.value)
    } else {
        values[i]
    };
    Ok(Minimum {
        x,
        value,
        evaluations: scan_points + refined.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_finds_sqrt2() {
        let r = bracketed_newton(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn newton_falls_back_to_bisection() {
        // derivative zero at the start point forces a bisection step
        let r = bracketed_newton(
            |x| (x.powi(3) - x - 1.0, 3.0 * x * x - 1.0),
            0.0,
            3.0,
            3f64.sqrt().recip(),
            1e-14,
        )
        .unwrap();
        assert!((r.powi(3) - r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        assert!(matches!(
            bracketed_newton(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 0.0, 1e-12),
            Err(QiError::NoSignChange { .. })
        ));
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn bisection_root() {
        let r = bisect(|x| x.cos() - x, 0.0, 1.0, 1e-14).unwrap();
        assert!((r.cos() - r).abs() < 1e-13);
    }

    #[test]
    fn golden_section_parabola() {
        let m = golden_section(|x| Ok((x - 0.3).powi(2)), 0.0, 1.0, 1e-10).unwrap();
        assert!((m.x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn scan_escapes_local_minimum() {
        // global minimum near 0.8, local one near 0.2
        let f = |x: f64| {
            Ok(-(-(x - 0.2).powi(2) / 0.002).exp() - 2.0 * (-(x - 0.8).powi(2) / 0.002).exp())
        };
        let m = scan_then_golden(f, 0.0, 1.0, 33, 1e-10).unwrap();
        assert!((m.x - 0.8).abs() < 1e-4, "{m:?}");
    }
}
