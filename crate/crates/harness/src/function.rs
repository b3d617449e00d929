//! The `test_function` mini-language: a `+`-separated sum of terms
//! `re:p`, `im:p`, `abs2:l`, `sym:a:b` (`z^a conj(z)^b + conj`), `const:c`,
//! each optionally scaled as `coef*term`.

use rmtlab_core::spectra_stats::LaurentPolynomial;
use rmtlab_core::Complex64;

use crate::error::{HarnessError, Result};

pub fn parse_test_function(spec: &str) -> Result<LaurentPolynomial> {
    let err = |msg: String| HarnessError::Config(format!("test_function '{spec}': {msg}"));
    let mut total = LaurentPolynomial::zero();
    for raw in spec.split('+') {
        let term = raw.trim();
        let (coef, body) = match term.split_once('*') {
            Some((c, b)) => (
                c.trim().parse::<f64>().map_err(|_| err(format!("bad coefficient in '{term}'")))?,
                b.trim(),
            ),
            None => (1.0, term),
        };
        let parts: Vec<&str> = body.split(':').map(str::trim).collect();
        let int = |s: &str| s.parse::<u32>().map_err(|_| err(format!("bad exponent in '{term}'")));
        let p = match parts.as_slice() {
            ["re", p] => LaurentPolynomial::re_power(int(p)?),
            ["im", p] => LaurentPolynomial::im_power(int(p)?),
            ["abs2", l] => LaurentPolynomial::abs_sq_power(int(l)?),
            ["sym", a, b] => LaurentPolynomial::symmetric_monomial(int(a)?, int(b)?, Complex64::new(1.0, 0.0)),
            ["const", c] => LaurentPolynomial::constant(
                c.parse::<f64>().map_err(|_| err(format!("bad constant in '{term}'")))?,
            ),
            _ => return Err(err(format!("unknown term '{term}'"))),
        };
        if !coef.is_finite() {
            return Err(err(format!("non-finite coefficient in '{term}'")));
        }
        total = total.add(&p.scale(coef));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sums() {
        let f = parse_test_function("re:2").unwrap();
        assert_eq!(f, LaurentPolynomial::re_power(2));
        let g = parse_test_function("re:1 + 0.5*abs2:1 + const:2").unwrap();
        let z = Complex64::new(0.3, -0.7);
        let expect = 0.3 + 0.5 * z.norm_sqr() + 2.0;
        assert!((g.eval(z) - expect).abs() < 1e-14);
        let s = parse_test_function("sym:2:0").unwrap();
        assert!((s.eval(z) - 2.0 * (z * z).re).abs() < 1e-14);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "re", "re:x", "cos:1", "x*re:1", "sym:1"] {
            assert!(parse_test_function(bad).is_err(), "{bad}");
        }
    }
}
