use super::{integrate_adaptive, NumericsError, Result, Tolerance};
use std::f64::consts::{FRAC_PI_2, PI};

fn quad_tol() -> Tolerance {
    Tolerance::uniform(1e-13)
}

/// Integrand of `E(k, .)`, clamped at zero to absorb rounding at the edge of
/// the real range when `k > 1`.
fn integrand(k: f64) -> impl Fn(f64) -> f64 {
    move |u: f64| (1.0 - (k * u.sin()).powi(2)).max(0.0).sqrt()
}

/// `E(k, phi) = int_0^phi sqrt(1 - k^2 sin^2 u) du`.
///
/// For `k <= 1` the argument is reduced modulo `pi` using the complete
/// integral; for `k > 1` it must satisfy `|sin phi| <= 1/k`.
pub fn elliptic_e_inc(k: f64, phi: f64) -> Result<f64> {
    if !(k >= 0.0) || !phi.is_finite() {
        return Err(NumericsError::DomainError(format!(
            "elliptic_e_inc needs k >= 0 and finite phi, got k = {k}, phi = {phi}"
        )));
    }
    if phi < 0.0 {
        return elliptic_e_inc(k, -phi).map(|v| -v);
    }
    if phi == 0.0 {
        return Ok(0.0);
    }
    if k == 0.0 {
        return Ok(phi);
    }
    if k > 1.0 {
        let limit = (1.0 / k).asin();
        if phi > limit * (1.0 + 1e-14) {
            return Err(NumericsError::DomainError(format!(
                "integrand is imaginary: k = {k}, phi = {phi} beyond asin(1/k) = {limit}"
            )));
        }
        return integrate_adaptive(integrand(k), 0.0, phi.min(limit), &quad_tol());
    }
    // k <= 1: integrand has period pi; split at multiples of pi/2, where the
    // k = 1 integrand |cos u| has its kinks
    let periods = (phi / PI).floor();
    let rest = phi - periods * PI;
    let half = integrate_adaptive(integrand(k), 0.0, FRAC_PI_2, &quad_tol())?;
    let tail = if rest <= FRAC_PI_2 {
        integrate_adaptive(integrand(k), 0.0, rest, &quad_tol())?
    } else {
        half + integrate_adaptive(integrand(k), FRAC_PI_2, rest, &quad_tol())?
    };
    Ok(2.0 * periods * half + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_modulus() {
        assert!((elliptic_e_inc(0.0, 0.7).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn unit_modulus_quarter_period() {
        assert!((elliptic_e_inc(1.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_modulus_is_sine_on_first_quarter() {
        for &t in &[0.1, 0.5, 1.0, 1.5] {
            assert!((elliptic_e_inc(1.0, t).unwrap() - t.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_half() {
        let v = elliptic_e_inc(0.5, FRAC_PI_2).unwrap();
        assert!((v - 1.467_462_209_339_427_2).abs() < 1e-12, "{v}");
    }

    #[test]
    fn quasi_periodicity() {
        let e = elliptic_e_inc(0.8, FRAC_PI_2).unwrap();
        let v = elliptic_e_inc(0.8, 2.0 * PI + 0.3).unwrap();
        let w = elliptic_e_inc(0.8, 0.3).unwrap();
        assert!((v - (4.0 * e + w)).abs() < 1e-12);
    }

    #[test]
    fn imaginary_integrand_rejected() {
        assert!(matches!(
            elliptic_e_inc(2.0, 1.0),
            Err(NumericsError::DomainError(_))
        ));
        assert!(elliptic_e_inc(2.0, (0.5f64).asin()).is_ok());
        assert!(elliptic_e_inc(-1.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn odd_in_phi(k in 0.0f64..1.0, phi in 0.0f64..7.0) {
            let p = elliptic_e_inc(k, phi).unwrap();
            let m = elliptic_e_inc(k, -phi).unwrap();
            prop_assert_eq!(m, -p);
        }
    }
}
