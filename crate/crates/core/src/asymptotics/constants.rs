use crate::error::{Error, Result};

/// `α = (2−q)/(q−1)`.
pub fn alpha(q: f64) -> f64 {
    (2.0 - q) / (q - 1.0)
}

/// `q′ = q/(q−1)`.
pub fn q_prime(q: f64) -> f64 {
    q / (q - 1.0)
}

fn check_q(q: f64) -> Result<()> {
    if q > 1.0 && q <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("q must lie in (1, 2], got {q}")))
    }
}

/// Leading blow-up constant: the unique positive root of
/// `α^q C^q − α/(q−1)·C − C₁ = 0` for `q < 2`, and of `C² − C − C₁ = 0` for
/// `q = 2`.
pub fn solve_c0(q: f64, c1: f64) -> Result<f64> {
    check_q(q)?;
    if !(c1 >= 0.0 && c1.is_finite()) {
        return Err(Error::InvalidArgument(format!("C1 must be finite and nonnegative, got {c1}")));
    }
    if q == 2.0 {
        return Ok(0.5 * (1.0 + (1.0 + 4.0 * c1).sqrt()));
    }
    let a = alpha(q);
    let closed = (a + 1.0).powf(1.0 / (q - 1.0)) / a;
    if c1 == 0.0 {
        return Ok(closed);
    }
    let g = |c: f64| a.powf(q) * c.powf(q) - a / (q - 1.0) * c - c1;
    let dg = |c: f64| q * a.powf(q) * c.powf(q - 1.0) - a / (q - 1.0);
    // g is convex with g(closed) = −C₁ < 0, so the root lies above `closed`.
    let mut lo = closed;
    let mut hi = 2.0 * closed;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut c = 0.5 * (lo + hi);
    for _ in 0..200 {
        let v = g(c);
        if v == 0.0 {
            return Ok(c);
        }
        if v < 0.0 {
            lo = c;
        } else {
            hi = c;
        }
        let newton = c - v / dg(c);
        c = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(c)
}

/// Fast-divergence constants for `f ∼ C₁ d^{−β}` with `β > q′`:
/// returns `(C₀, exponent)` with exponent `β/q − 1` and `C₀ = C₁^{1/q}/exponent`.
pub fn solve_c0_fast(q: f64, c1: f64, beta: f64) -> Result<(f64, f64)> {
    check_q(q)?;
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::InvalidArgument(format!("C1 must be positive, got {c1}")));
    }
    if !(beta > q_prime(q)) {
        return Err(Error::InvalidArgument(format!(
            "fast regime needs beta > q' = {}, got {beta}",
            q_prime(q)
        )));
    }
    let e = beta / q - 1.0;
    Ok((c1.powf(1.0 / q) / e, e))
}
