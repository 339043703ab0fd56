use super::StatsError;

const MAX_ITERATIONS: usize = 5000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Lanczos coefficients for g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + 7.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITERATIONS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(StatsError::NonConvergence { a, b, x })
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_beta(x: f64, a: f64, b: f64) -> Result<f64, StatsError> {
    if !(a > 0.0 && b > 0.0) || !(0.0..=1.0).contains(&x) {
        return Err(StatsError::InvalidArgument(format!("I_{x}({a}, {b})")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((front * beta_continued_fraction(a, b, x)? / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - front * beta_continued_fraction(b, a, 1.0 - x)? / b).clamp(0.0, 1.0))
    }
}

fn check_f_args(f: f64, df1: u64, df2: u64) -> Result<(), StatsError> {
    if f.is_nan() || f < 0.0 || df1 == 0 || df2 == 0 {
        return Err(StatsError::InvalidArgument(format!("F = {f} with df ({df1}, {df2})")));
    }
    Ok(())
}

/// Cumulative distribution of the F distribution with `(df1, df2)` degrees of freedom.
pub fn f_cdf(f: f64, df1: u64, df2: u64) -> Result<f64, StatsError> {
    check_f_args(f, df1, df2)?;
    if f == f64::INFINITY {
        return Ok(1.0);
    }
    let (d1, d2) = (df1 as f64, df2 as f64);
    let x = d1 * f / (d1 * f + d2);
    regularized_beta(x, d1 / 2.0, d2 / 2.0)
}

/// Upper tail `1 - f_cdf`, computed directly to keep small p-values accurate.
pub fn f_sf(f: f64, df1: u64, df2: u64) -> Result<f64, StatsError> {
    check_f_args(f, df1, df2)?;
    if f == f64::INFINITY {
        return Ok(0.0);
    }
    let (d1, d2) = (df1 as f64, df2 as f64);
    let x = d2 / (d2 + d1 * f);
    regularized_beta(x, d2 / 2.0, d1 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-14);
        assert!((ln_gamma(2.0)).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        // ln(9!) = ln 362880
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.1) - 2.252_712_651_734_206).abs() < 1e-12);
    }

    #[test]
    fn beta_closed_forms() {
        // I_x(1, 1) = x; I_x(a, 1) = x^a; I_x(1, b) = 1 - (1-x)^b
        for &x in &[0.1, 0.37, 0.5, 0.92] {
            assert!((regularized_beta(x, 1.0, 1.0).unwrap() - x).abs() < 1e-14);
            assert!((regularized_beta(x, 3.5, 1.0).unwrap() - x.powf(3.5)).abs() < 1e-13);
            assert!((regularized_beta(x, 1.0, 2.5).unwrap() - (1.0 - (1.0 - x).powf(2.5))).abs() < 1e-13);
        }
    }

    #[test]
    fn f_distribution_edges() {
        assert_eq!(f_cdf(0.0, 3, 7).unwrap(), 0.0);
        assert_eq!(f_sf(0.0, 3, 7).unwrap(), 1.0);
        assert_eq!(f_cdf(f64::INFINITY, 3, 7).unwrap(), 1.0);
        assert!(f_cdf(-1.0, 1, 1).is_err());
        assert!(f_cdf(1.0, 0, 1).is_err());
        assert!(f_sf(f64::NAN, 1, 1).is_err());
    }

    #[test]
    fn large_degrees_of_freedom_converge() {
        for &(d1, d2) in &[(1, 10_000), (10_000, 10_000), (5_000, 3), (2, 9_999)] {
            for &f in &[0.01, 0.5, 1.0, 1.3, 4.0, 50.0] {
                let c = f_cdf(f, d1, d2).unwrap();
                let s = f_sf(f, d1, d2).unwrap();
                assert!((c + s - 1.0).abs() < 1e-10, "F={f} df=({d1},{d2}): {c} + {s}");
            }
        }
    }

    proptest! {
        #[test]
        fn cdf_is_monotone_and_bounded(
            f in 0.0f64..50.0,
            step in 0.0f64..5.0,
            d1 in 1u64..200,
            d2 in 1u64..500,
        ) {
            let lo = f_cdf(f, d1, d2).unwrap();
            let hi = f_cdf(f + step, d1, d2).unwrap();
            prop_assert!((0.0..=1.0).contains(&lo));
            prop_assert!((0.0..=1.0).contains(&hi));
            prop_assert!(hi >= lo - 1e-15);
        }

        #[test]
        fn cdf_and_sf_are_complementary(f in 0.0f64..30.0, d1 in 1u64..100, d2 in 1u64..1000) {
            let total = f_cdf(f, d1, d2).unwrap() + f_sf(f, d1, d2).unwrap();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
