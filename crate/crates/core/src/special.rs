//! Special functions: log-Gamma (from `statrs`) and the modified Bessel
//! function `K_0`.

use crate::quad::integrate;
use crate::{Error, Result};

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `log(t!)`.
pub fn ln_factorial(t: u64) -> f64 {
    ln_gamma(t as f64 + 1.0)
}

/// `K_0(x)` for `x > 0` from `K_0(x) = int_0^inf exp(-x cosh t) dt`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("K_0 needs finite x > 0, got {x}")));
    }
    // Scale out exp(-x) and stop where the remaining integrand is below
    // exp(-40) relative to its value at t = 0.
    let g = |t: f64| (-x * (t.cosh() - 1.0)).exp();
    let upper = (1.0 + 40.0 / x).acosh();
    let q = integrate(g, 0.0, upper, 1e-13, 0.0)?;
    Ok(q.value * (-x).exp())
}
