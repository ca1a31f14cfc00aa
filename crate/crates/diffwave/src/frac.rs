//! Riemann-Liouville fractional integro-differentiation `D_{ay}^nu`.
//!
//! For `nu < 0` the operator is the weakly singular convolution
//! `(1/Gamma(-nu)) int_a^y f(s) (y-s)^{-nu-1} ds`, evaluated by Gauss-Jacobi
//! product quadrature that absorbs both the kernel weight at `s = y` and any
//! declared power singularity of `f` at `s = a`. For `nu >= 0` it peels
//! `ceil(nu)` ordinary derivatives off the fractional integral of order
//! `ceil(nu) - nu`, by Richardson-extrapolated central differences, unless
//! the function carries a closed-form rule.

use crate::error::{Error, Result};
use crate::func::Func1D;
use crate::quad;
use crate::special::gamma_recip;

/// `D_{ay}^nu f (y)` for `nu < 0` (fractional integral), by product
/// quadrature; `a` is the left end of `f`'s domain.
pub fn rl_integral(f: &Func1D, nu: f64, y: f64, tol: f64) -> Result<f64> {
    if !(nu < 0.0) {
        return Err(Error::DomainError(format!(
            "rl_integral needs nu < 0, got {nu}"
        )));
    }
    let (a, b) = f.domain();
    if !(y >= a && y <= b) {
        return Err(Error::DomainError(format!(
            "y = {y} outside domain [{a}, {b}]"
        )));
    }
    if y == a {
        return Ok(0.0);
    }
    let recip = gamma_recip(-nu);
    let alpha = -nu - 1.0; // kernel weight exponent at s = y
    let inner_tol = (tol / recip.abs().max(1e-30)).max(1e-15);
    let gamma_left = f.singular_exponent().unwrap_or(0.0);
    let integral = if gamma_left != 0.0 {
        // divide out the declared singularity and hand it to the weight
        if gamma_left <= -1.0 {
            return Err(Error::DomainError(format!(
                "singular exponent {gamma_left} not integrable"
            )));
        }
        let g = |s: f64| f.eval(s) * (s - a).max(f64::MIN_POSITIVE).powf(-gamma_left);
        quad::jacobi_weighted(g, a, y, alpha, gamma_left, inner_tol)?
    } else {
        quad::jacobi_weighted(|s| f.eval(s), a, y, alpha, 0.0, inner_tol)?
    };
    Ok(recip * integral)
}

/// Richardson-extrapolated m-th central derivative of `g` at `y`, step `h0`,
/// three levels.
fn central_derivative<G: Fn(f64) -> Result<f64>>(
    g: G,
    y: f64,
    m: usize,
    h0: f64,
) -> Result<f64> {
    let mut est = [0.0f64; 3];
    for (lvl, e) in est.iter_mut().enumerate() {
        let h = h0 / 2f64.powi(lvl as i32);
        *e = match m {
            1 => (g(y + h)? - g(y - h)?) / (2.0 * h),
            2 => (g(y + h)? - 2.0 * g(y)? + g(y - h)?) / (h * h),
            _ => unreachable!("only m = 1, 2 arise for nu < 2"),
        };
    }
    // Neville in h^2
    let d1 = est[1] + (est[1] - est[0]) / 3.0;
    let d2 = est[2] + (est[2] - est[1]) / 3.0;
    let result = d2 + (d2 - d1) / 15.0;
    let drift = (d2 - d1).abs();
    if !result.is_finite() || drift > (est[2] - est[1]).abs().max(1e-30) * 8.0 + 1.0 {
        return Err(Error::DifferentiationUnstable(format!(
            "Richardson drift {drift:e} at y = {y}"
        )));
    }
    Ok(result)
}

/// `D_{ay}^nu f (y)` for `nu >= 0`.
pub fn rl_derivative(f: &Func1D, nu: f64, y: f64, tol: f64) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(Error::DomainError(format!(
            "rl_derivative needs nu >= 0, got {nu}"
        )));
    }
    if let Some(v) = f.frac_rule(nu, y) {
        return Ok(v);
    }
    if nu == 0.0 {
        return Ok(f.eval(y));
    }
    let m = nu.ceil() as usize; // ceil(1) = 1: integer orders peel m = nu
    let frac_part = nu - m as f64; // in [-1, 0)
    let (a, b) = f.domain();
    if !(y > a && y <= b) {
        return Err(Error::DomainError(format!(
            "y = {y} outside ({a}, {b}]"
        )));
    }
    let h0 = 1e-3 * (y - a).min(b - y).max(1e-6 * (b - a));
    let inner_tol = (tol * h0.powi(m as i32) / 64.0).max(1e-14);
    let g = |t: f64| -> Result<f64> {
        if frac_part == 0.0 {
            Ok(f.eval(t))
        } else {
            rl_integral(f, frac_part, t, inner_tol)
        }
    };
    central_derivative(g, y, m, h0)
}

/// `D_{ay}^{nu}` dispatch on the sign of nu (identity at 0).
pub fn rl_apply(f: &Func1D, nu: f64, y: f64, tol: f64) -> Result<f64> {
    if nu < 0.0 {
        rl_integral(f, nu, y, tol)
    } else {
        rl_derivative(f, nu, y, tol)
    }
}

/// Neville polynomial extrapolation of `(x_i, v_i)` to `x = x0`.
pub fn neville(xs: &[f64], vs: &[f64], x0: f64) -> f64 {
    let n = xs.len();
    let mut p = vs.to_vec();
    for level in 1..n {
        for i in 0..n - level {
            p[i] = ((x0 - xs[i + level]) * p[i] + (xs[i] - x0) * p[i + 1])
                / (xs[i] - xs[i + level]);
        }
    }
    p[0]
}

/// `lim_{y->0+} D_{0y}^{alpha-k} f(y)` by Richardson extrapolation along a
/// decreasing sequence of evaluation points.
pub fn rl_limit_at_base(
    f: &Func1D,
    alpha: f64,
    k: i32,
    y_sequence: &[f64],
    tol: f64,
) -> Result<f64> {
    if y_sequence.len() < 2 {
        return Err(Error::DomainError(
            "need at least two extrapolation points".into(),
        ));
    }
    for w in y_sequence.windows(2) {
        if !(w[1] < w[0] && w[1] > 0.0) {
            return Err(Error::DomainError(
                "y_sequence must decrease toward 0".into(),
            ));
        }
    }
    let nu = alpha - k as f64;
    let mut vs = Vec::with_capacity(y_sequence.len());
    for &y in y_sequence {
        vs.push(rl_apply(f, nu, y, tol)?);
    }
    let lim = neville(y_sequence, &vs, 0.0);
    if !lim.is_finite() {
        return Err(Error::ExtrapolationDiverged(format!(
            "nonfinite limit for nu = {nu}"
        )));
    }
    // the extrapolated value should not sit far outside the sampled range
    let vmax = vs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = vs.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = (vmax - vmin).abs().max(1e-12);
    if (lim - vs[vs.len() - 1]).abs() > 50.0 * spread + 1.0 {
        return Err(Error::ExtrapolationDiverged(format!(
            "limit {lim} far outside sampled values"
        )));
    }
    Ok(lim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;

    fn bare_power(c: f64, p: f64, b: f64) -> Func1D {
        // power function *without* the closed rule, to exercise quadrature
        let f = Func1D::from_fn(0.0, b, move |y: f64| c * y.powf(p));
        if p != 0.0 {
            f.with_singular_exponent(p)
        } else {
            f
        }
    }

    #[test]
    fn rl_integral_of_constant() {
        // D^{-1} 1 = y
        let f = bare_power(1.0, 0.0, 1.0);
        let v = rl_integral(&f, -1.0, 0.8, 1e-12).unwrap();
        assert_relative_eq!(v, 0.8, max_relative = 1e-11);
        // zero function
        let z = Func1D::zero(0.0, 1.0);
        assert_eq!(rl_integral(&z, -0.7, 0.5, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn rl_integral_power_rule_oracle() {
        // D^{-0.5} y^{0.5} at y=1: Gamma(1.5)/Gamma(2) = 0.8862269254527580
        let f = bare_power(1.0, 0.5, 1.0);
        let v = rl_integral(&f, -0.5, 1.0, 1e-12).unwrap();
        assert_relative_eq!(v, 0.8862269254527580, max_relative = 1e-11);
    }

    #[test]
    fn rl_derivative_identity_and_annihilation() {
        let f = bare_power(1.0, 1.0, 2.0);
        // nu = 0 is the identity
        assert_relative_eq!(rl_derivative(&f, 0.0, 1.3, 1e-10).unwrap(), 1.3);
        // D^alpha y^{alpha-1} = 0 by the power rule (numerically small)
        for &alpha in &[0.5f64, 1.5] {
            let g = bare_power(1.0, alpha - 1.0, 2.0);
            let v = rl_derivative(&g, alpha, 1.0, 1e-9).unwrap();
            assert!(v.abs() < 5e-6, "alpha={alpha}: {v}");
        }
    }

    #[test]
    fn rl_derivative_power_rule_random_triples() {
        // D^nu y^{mu-1} = Gamma(mu)/Gamma(mu-nu) y^{mu-1-nu}, 20 draws
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let mu: f64 = rng.random_range(0.4..3.0);
            let nu: f64 = rng.random_range(-1.5..1.9);
            let y: f64 = rng.random_range(0.3..1.5);
            let f = bare_power(1.0, mu - 1.0, 2.0);
            let got = rl_apply(&f, nu, y, 1e-10).unwrap();
            let want = crate::special::gamma(mu)
                * crate::special::gamma_recip(mu - nu)
                * y.powf(mu - 1.0 - nu);
            assert!(
                (got - want).abs() <= 1e-7 * (1.0 + want.abs()),
                "mu={mu} nu={nu} y={y}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn semigroup_of_fractional_integrals() {
        // D^{-a} D^{-b} f = D^{-(a+b)} f on f = y^{0.3}
        let f = bare_power(1.0, 0.3, 1.5);
        let (aa, bb) = (0.4, 0.7);
        let inner = {
            let f = f.clone();
            Func1D::from_fn(0.0, 1.5, move |t: f64| {
                if t == 0.0 {
                    0.0
                } else {
                    rl_integral(&f, -bb, t, 1e-12).unwrap()
                }
            })
            .with_singular_exponent(0.3 + bb)
        };
        let lhs = rl_integral(&inner, -aa, 1.2, 1e-10).unwrap();
        let rhs = rl_integral(&f, -(aa + bb), 1.2, 1e-11).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-7);
    }

    #[test]
    fn fractional_newton_leibniz() {
        // D^{-alpha} D^{alpha} mu = mu - sum_k y^{alpha-k}/Gamma(alpha-k+1) lim D^{alpha-k} mu
        // on mu = y^{alpha-1} + y^2 with alpha = 1.3 (n = 2)
        let alpha = 1.3f64;
        let mu = Func1D::power(0.0, 1.0, 1.0, alpha - 1.0).add(&Func1D::power(0.0, 1.0, 1.0, 2.0));
        // D^alpha mu via the attached closed rule, as a handle
        let dmu = {
            let mu = mu.clone();
            Func1D::from_fn(0.0, 1.0, move |t: f64| mu.frac_rule(alpha, t).unwrap())
                .with_singular_exponent(2.0 - alpha)
        };
        let y = 0.85;
        let lhs = rl_integral(&dmu, -alpha, y, 1e-11).unwrap();
        // limits: lim D^{alpha-1} mu = Gamma(alpha), lim D^{alpha-2} mu = 0;
        // the numerical extrapolation recovers them to extrapolation quality
        let lim1 = rl_limit_at_base(&mu, alpha, 1, &[0.1, 0.05, 0.025, 0.0125], 1e-10).unwrap();
        let lim2 = rl_limit_at_base(&mu, alpha, 2, &[0.1, 0.05, 0.025, 0.0125], 1e-10).unwrap();
        assert_relative_eq!(lim1, crate::special::gamma(alpha), max_relative = 2e-3);
        assert!(lim2.abs() < 1e-4);
        // the identity itself, with the exact limit values
        let rhs = mu.eval(y)
            - y.powf(alpha - 1.0) * crate::special::gamma_recip(alpha) * crate::special::gamma(alpha);
        assert!((lhs - rhs).abs() < 1e-6, "lhs={lhs} rhs={rhs}");
    }

    #[test]
    fn rl_limit_examples() {
        // f = y^{alpha-1}, alpha = 1.5: k=1 -> Gamma(1.5), k=2 -> 0
        let alpha = 1.5f64;
        let f = bare_power(1.0, alpha - 1.0, 1.0);
        let ys = [0.2, 0.1, 0.05, 0.025];
        let l1 = rl_limit_at_base(&f, alpha, 1, &ys, 1e-10).unwrap();
        assert_relative_eq!(l1, 0.8862269254527580, max_relative = 1e-7);
        let l2 = rl_limit_at_base(&f, alpha, 2, &ys, 1e-10).unwrap();
        assert!(l2.abs() < 1e-9);
        let z = Func1D::zero(0.0, 1.0);
        assert_eq!(rl_limit_at_base(&z, alpha, 1, &ys, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        let f = Func1D::constant(0.0, 1.0, 1.0);
        assert!(rl_integral(&f, -0.5, 2.0, 1e-10).is_err());
        assert!(rl_integral(&f, 0.5, 0.5, 1e-10).is_err());
        assert!(rl_derivative(&f, -0.5, 0.5, 1e-10).is_err());
    }
}
