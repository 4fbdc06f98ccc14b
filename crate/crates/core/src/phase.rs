//! Accurate evaluation of `e^{iθ}` for large phases.
//!
//! Symbol phases such as `β r^α` routinely reach 10⁵ rad inside a test band.
//! A plain `(c * x).sin_cos()` loses the low bits of the product before the
//! trigonometric range reduction ever sees them, so two algebraically equal
//! phases can disagree by ~1e-11. Here the product is formed exactly (an fma
//! recovers the rounding error) and reduced modulo 2π against a two-word
//! representation of 2π.

use num_complex::Complex64;

const TWO_PI_HI: f64 = std::f64::consts::TAU;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `e^{i(hi + lo)}` for a phase given as an unevaluated sum.
pub fn cis_sum(hi: f64, lo: f64) -> Complex64 {
    if !hi.is_finite() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    let turns = (hi / TWO_PI_HI).round();
    let reduced = (-turns).mul_add(TWO_PI_HI, hi) - turns * TWO_PI_LO + lo;
    let (s, c) = reduced.sin_cos();
    Complex64::new(c, s)
}

/// `e^{i·coef·x}` with the product carried in extended precision.
pub fn cis_product(coef: f64, x: f64) -> Complex64 {
    let hi = coef * x;
    let lo = coef.mul_add(x, -hi);
    cis_sum(hi, lo)
}

/// Principal argument in (−π, π].
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -std::f64::consts::PI {
        a + TWO_PI_HI
    } else {
        a
    }
}

/// Wraps a real phase into (−π, π].
pub fn wrap(theta: f64) -> f64 {
    let mut t = theta - TWO_PI_HI * (theta / TWO_PI_HI).round();
    if t <= -std::f64::consts::PI {
        t += TWO_PI_HI;
    } else if t > std::f64::consts::PI {
        t -= TWO_PI_HI;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn small_phases_match_sin_cos() {
        for &t in &[0.0, 0.3, -1.2, PI, -PI + 1e-9, 3.0] {
            let z = cis_product(1.0, t);
            assert!((z.re - t.cos()).abs() < 4e-16);
            assert!((z.im - t.sin()).abs() < 4e-16);
        }
    }

    #[test]
    fn doubled_phase_agrees_with_square() {
        // 2·(7·e^9) ≈ 1.1e5 rad: the doubled coefficient must reproduce z².
        let r = 9.0f64.exp();
        let z = cis_product(7.0, r);
        let z2 = cis_product(14.0, r);
        assert!((z * z - z2).norm() < 1e-15);
        let z3 = cis_product(21.0, r);
        assert!((z * z * z - z3).norm() < 1e-15);
    }

    #[test]
    fn wrap_is_principal() {
        assert_eq!(wrap(PI), PI);
        assert!((wrap(-PI) - PI).abs() < 1e-15);
        assert!((wrap(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-15);
        assert!((principal_arg(Complex64::new(-1.0, -0.0)) - PI).abs() < 1e-15);
    }
}
