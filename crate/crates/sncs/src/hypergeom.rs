//! Generalized hypergeometric series pFq for complex arguments.
//!
//! Every closed-form moment in this crate reduces to ratios of 0F2 values,
//! so the series is summed by term recursion rather than through Gamma
//! functions: term(n+1) = term(n) * prod(a_i + n) / prod(b_j + n) * x / (n + 1).

use crate::{C64, Error, Result};

/// Relative tolerance used when none is supplied.
pub const DEFAULT_TOLERANCE: f64 = 1e-14;

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 10_000;

/// Parameters of pFq(a_1..a_p; b_1..b_q; x).
///
/// Only p = 0, q = 2 is exercised by this crate, but the type admits any
/// p <= q + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergeomParams {
    pub upper: Vec<C64>,
    pub lower: Vec<C64>,
    pub argument: C64,
}

impl HypergeomParams {
    pub fn new(upper: Vec<C64>, lower: Vec<C64>, argument: C64) -> Self {
        Self {
            upper,
            lower,
            argument,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.upper.len() > self.lower.len() + 1 {
            return Err(Error::Domain(format!(
                "pFq with p = {} > q + 1 = {} diverges for x != 0",
                self.upper.len(),
                self.lower.len() + 1
            )));
        }
        for b in &self.lower {
            // The series terms divide by (b + n); b = 0, -1, -2, ... hits a pole.
            if b.im == 0.0 && b.re <= 0.0 && b.re.fract() == 0.0 {
                return Err(Error::Domain(format!(
                    "lower parameter {b} is zero or a negative integer"
                )));
            }
        }
        if !self.argument.is_finite() {
            return Err(Error::Domain("argument is not finite".into()));
        }
        for a in &self.upper {
            if !a.is_finite() {
                return Err(Error::Domain("upper parameter is not finite".into()));
            }
        }
        Ok(())
    }
}

/// Sum the pFq series.
///
/// Terminates once two consecutive terms fall below `tolerance` times the
/// magnitude of the partial sum. For p <= q the series is entire, so this
/// always converges for finite arguments.
pub fn pfq(params: &HypergeomParams, tolerance: f64) -> Result<C64> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    params.validate()?;

    let x = params.argument;
    let mut sum = C64::new(1.0, 0.0);
    let mut term = C64::new(1.0, 0.0);
    let mut small_streak = 0usize;

    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let mut ratio = x / (nf + 1.0);
        for a in &params.upper {
            ratio *= a + nf;
        }
        for b in &params.lower {
            ratio /= b + nf;
        }
        term *= ratio;
        sum += term;

        if term.norm() <= tolerance * sum.norm() {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }

    Err(Error::Convergence {
        terms: MAX_TERMS,
        magnitude: x.norm(),
    })
}

/// 0F2(b1, b2; x) at the default tolerance.
///
/// The lower parameters of every series in this crate are small positive
/// integers, so they are taken as reals here.
pub fn f02(b1: f64, b2: f64, x: C64) -> Result<C64> {
    pfq(
        &HypergeomParams::new(vec![], vec![C64::new(b1, 0.0), C64::new(b2, 0.0)], x),
        DEFAULT_TOLERANCE,
    )
}

/// 0F2 for a real argument; the series is then real term by term.
pub fn f02_real(b1: f64, b2: f64, x: f64) -> Result<f64> {
    f02(b1, b2, C64::new(x, 0.0)).map(|v| v.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct fixed-length summation of the defining series, each term built
    /// from scratch. Kept free of the recursion used by `pfq`.
    fn direct_sum_0f2(b1: f64, b2: f64, x: C64, terms: usize) -> C64 {
        let mut sum = C64::new(0.0, 0.0);
        for n in 0..terms {
            let mut term = C64::new(1.0, 0.0);
            for k in 0..n {
                let kf = k as f64;
                term *= x / ((b1 + kf) * (b2 + kf) * (kf + 1.0));
            }
            sum += term;
        }
        sum
    }

    #[test]
    fn unit_at_zero_argument() {
        let zero = C64::new(0.0, 0.0);
        assert_eq!(f02(1.0, 1.0, zero).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(f02(1.0, 2.0, zero).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn f02_11_at_one_matches_frozen_oracle() {
        // Direct partial summation of the series with 200 terms, frozen at
        // extended precision (mpmath, 30 digits):
        //   0F2(1,1;1) = 2.12970254898330641813452361060
        let frozen = 2.129_702_548_983_306_4;
        let v = f02_real(1.0, 1.0, 1.0).unwrap();
        assert!((v - frozen).abs() < 1e-14, "got {v}");
        let direct = direct_sum_0f2(1.0, 1.0, C64::new(1.0, 0.0), 200);
        assert!((v - direct.re).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_lower_parameters() {
        for b in [0.0, -1.0, -3.0] {
            assert!(f02(b, 2.0, C64::new(1.0, 0.0)).is_err());
        }
        // Non-integer negative lower parameters are fine.
        assert!(f02(-0.5, 2.0, C64::new(1.0, 0.0)).is_ok());
    }

    #[test]
    fn rejects_nonfinite_argument() {
        assert!(f02(1.0, 1.0, C64::new(f64::NAN, 0.0)).is_err());
        assert!(f02(1.0, 1.0, C64::new(f64::INFINITY, 0.0)).is_err());
    }

    #[test]
    fn rejects_divergent_parameter_count() {
        // p = q + 2 never converges for x != 0.
        let params = HypergeomParams::new(
            vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0)],
            C64::new(0.5, 0.0),
        );
        assert!(pfq(&params, 1e-12).is_err());
    }

    proptest! {
        #[test]
        fn real_nonneg_argument_gives_real_increasing_values(
            x in 0.0f64..100.0,
            dx in 0.01f64..10.0,
        ) {
            let lo = f02_real(1.0, 2.0, x).unwrap();
            let hi = f02_real(1.0, 2.0, x + dx).unwrap();
            prop_assert!(lo >= 1.0);
            prop_assert!(hi > lo);
        }

        #[test]
        fn conjugate_symmetry(re in -50.0f64..50.0, im in -50.0f64..50.0) {
            let x = C64::new(re, im);
            let v = f02(1.0, 1.0, x).unwrap();
            let vc = f02(1.0, 1.0, x.conj()).unwrap();
            prop_assert!((v.conj() - vc).norm() <= 1e-13 * v.norm().max(1.0));
        }

        #[test]
        fn matches_direct_summation(re in -100.0f64..100.0, im in -100.0f64..100.0) {
            let x = C64::new(re, im);
            prop_assume!(x.norm() <= 100.0);
            for (b1, b2) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (1.0, 3.0), (2.0, 3.0)] {
                let v = f02(b1, b2, x).unwrap();
                let direct = direct_sum_0f2(b1, b2, x, 200);
                prop_assert!(
                    (v - direct).norm() <= 10.0 * DEFAULT_TOLERANCE * direct.norm().max(1.0),
                    "0F2({b1},{b2};{x}): {v} vs {direct}"
                );
            }
        }
    }
}
