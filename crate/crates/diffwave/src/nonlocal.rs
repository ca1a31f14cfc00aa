//! Necessary non-local boundary conditions for the diffusion-wave equation
//! and their wave-equation limits.
//!
//! Every regular solution with initial traces `tau_k` and integrable lateral
//! derivatives satisfies a pair of identities binding `u(0,y)`, `u(l,y)`,
//! `u_x(0,y)`, `u_x(l,y)` and the `tau_k` through the `N`/`R` operators.
//! This module evaluates those identities as pointwise residual functionals:
//! a candidate solution is certified by small residuals, and data that do
//! not come from a regular solution are flagged by large ones.
//!
//! As `alpha -> 2` (`beta -> 1`) the Wright kernels degenerate to a point
//! mass and a window; the limit conditions couple the traces through plain
//! integrals with a causal delay, split at `y = l`.

use crate::error::{Error, Result};
use crate::frac;
use crate::func::Func1D;
use crate::ops::{self, KernelMode, NOperator, ROperator};
use crate::quad;
use crate::special::{wright_asymptotic, WrightParams};

/// Boundary and initial traces of a candidate solution on the strip
/// `[0, l] x (0, T]`.
#[derive(Clone, Debug)]
pub struct BoundaryTraces {
    /// u(0, y)
    pub u0: Func1D,
    /// u(l, y)
    pub ul: Func1D,
    /// u_x(0, y)
    pub ux0: Func1D,
    /// u_x(l, y)
    pub uxl: Func1D,
    /// tau_k, k = 1..=n with n - 1 < alpha <= n
    pub tau: Vec<Func1D>,
}

impl BoundaryTraces {
    fn check_order(&self, alpha: f64) -> Result<usize> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::DomainError(format!(
                "alpha must lie in (0,2), got {alpha}"
            )));
        }
        let n = if alpha <= 1.0 { 1 } else { 2 };
        if self.tau.len() != n {
            return Err(Error::DomainError(format!(
                "need {n} initial trace(s) for alpha = {alpha}, got {}",
                self.tau.len()
            )));
        }
        Ok(n)
    }
}

/// Residual of the non-local condition at the x = 0 edge:
/// `u(0,y) - [2 sum_k N^{beta-k+1,0,y} tau_k + 2 R^{beta,l} u_x(l,.)
///  - D^{-beta} u_x(0,.) + 2 R^{0,l} u(l,.)]`.
pub fn residual_x0(
    traces: &BoundaryTraces,
    alpha: f64,
    l: f64,
    y: f64,
    tol: f64,
) -> Result<f64> {
    residual_x0_with_mode(traces, alpha, l, y, tol, KernelMode::Wright)
}

pub fn residual_x0_with_mode(
    traces: &BoundaryTraces,
    alpha: f64,
    l: f64,
    y: f64,
    tol: f64,
    mode: KernelMode,
) -> Result<f64> {
    let n = traces.check_order(alpha)?;
    let beta = alpha / 2.0;
    let mut rhs = 0.0;
    for k in 1..=n {
        let op = NOperator {
            theta: beta - k as f64 + 1.0,
            x1: 0.0,
            x2: l,
            x: 0.0,
            y,
        };
        rhs += 2.0 * ops::apply_n_with_mode(&op, beta, &traces.tau[k - 1], tol / 8.0, mode)?;
    }
    let op_r = ROperator { delta: beta, x: l };
    rhs += 2.0 * ops::apply_r_with_mode(&op_r, beta, &traces.uxl, y, tol / 8.0, mode)?;
    rhs -= frac::rl_integral(&traces.ux0, -beta, y, tol / 8.0)?;
    let op_r0 = ROperator { delta: 0.0, x: l };
    rhs += 2.0 * ops::apply_r_with_mode(&op_r0, beta, &traces.ul, y, tol / 8.0, mode)?;
    Ok(traces.u0.eval(y) - rhs)
}

/// Residual of the mirror condition at the x = l edge.
pub fn residual_xl(
    traces: &BoundaryTraces,
    alpha: f64,
    l: f64,
    y: f64,
    tol: f64,
) -> Result<f64> {
    residual_xl_with_mode(traces, alpha, l, y, tol, KernelMode::Wright)
}

pub fn residual_xl_with_mode(
    traces: &BoundaryTraces,
    alpha: f64,
    l: f64,
    y: f64,
    tol: f64,
    mode: KernelMode,
) -> Result<f64> {
    let n = traces.check_order(alpha)?;
    let beta = alpha / 2.0;
    let mut rhs = 0.0;
    for k in 1..=n {
        let op = NOperator {
            theta: beta - k as f64 + 1.0,
            x1: 0.0,
            x2: l,
            x: l,
            y,
        };
        rhs += 2.0 * ops::apply_n_with_mode(&op, beta, &traces.tau[k - 1], tol / 8.0, mode)?;
    }
    let op_r = ROperator { delta: beta, x: l };
    rhs -= 2.0 * ops::apply_r_with_mode(&op_r, beta, &traces.ux0, y, tol / 8.0, mode)?;
    rhs += frac::rl_integral(&traces.uxl, -beta, y, tol / 8.0)?;
    let op_r0 = ROperator { delta: 0.0, x: l };
    rhs += 2.0 * ops::apply_r_with_mode(&op_r0, beta, &traces.u0, y, tol / 8.0, mode)?;
    Ok(traces.ul.eval(y) - rhs)
}

/// Residuals of the wave-limit conditions (`alpha = 2` semantics:
/// `tau[0]` is the velocity-type datum, `tau[1]` the displacement-type one).
/// Returns the pair for `y <= l`, or the delayed pair for `y >= l`.
pub fn wave_residuals(
    traces: &BoundaryTraces,
    l: f64,
    t_max: f64,
    y: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(y > 0.0 && y <= t_max) {
        return Err(Error::DomainError(format!(
            "y = {y} outside (0, {t_max}]"
        )));
    }
    if traces.tau.len() != 2 {
        return Err(Error::DomainError(
            "wave residuals need tau = [tau1 (velocity), tau2 (displacement)]".into(),
        ));
    }
    let tau1 = &traces.tau[0];
    let tau2 = &traces.tau[1];
    let q = tol / 8.0;
    let int = |f: &Func1D, a: f64, b: f64| -> Result<f64> {
        if b <= a {
            Ok(0.0)
        } else {
            quad::adaptive(|s| f.eval(s), a, b, q)
        }
    };
    if y <= l {
        // u(0,y) = int_0^y tau1 + tau2(y) - int_0^y u_x(0,s) ds
        let r0 = traces.u0.eval(y) - int(tau1, 0.0, y)? - tau2.eval(y) + int(&traces.ux0, 0.0, y)?;
        // u(l,y) = int_{l-y}^l tau1 + tau2(l-y) + int_0^y u_x(l,s) ds
        let rl = traces.ul.eval(y)
            - int(tau1, l - y, l)?
            - tau2.eval(l - y)
            - int(&traces.uxl, 0.0, y)?;
        Ok((r0, rl))
    } else {
        // u(0,y) = int_0^l tau1 + int_0^{y-l} u_x(l,s) ds - int_0^y u_x(0,s) ds + u(l, y-l)
        let r0 = traces.u0.eval(y)
            - int(tau1, 0.0, l)?
            - int(&traces.uxl, 0.0, y - l)?
            + int(&traces.ux0, 0.0, y)?
            - traces.ul.eval(y - l);
        let rl = traces.ul.eval(y)
            - int(tau1, 0.0, l)?
            + int(&traces.ux0, 0.0, y - l)?
            - int(&traces.uxl, 0.0, y)?
            - traces.u0.eval(y - l);
        Ok((r0, rl))
    }
}

/// Which degenerate kernel a Lemma-1 limit check integrates against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitKernel {
    /// `phi(-beta, 0; -t)`: concentrates to a point mass at t = 1.
    Delta,
    /// `phi(-beta, beta; -t)`: tends to the indicator of [0, 1].
    Window,
}

/// `int_0^infty g(t) K_beta(t) dt` for each beta in the (increasing)
/// sequence, Richardson-extrapolated to beta -> 1. The limit is `g(1)` for
/// the delta kernel and `int_0^1 g` for the window kernel.
pub fn lemma1_limit_check(
    g: &Func1D,
    kind: LimitKernel,
    beta_sequence: &[f64],
    tol: f64,
) -> Result<f64> {
    if beta_sequence.len() < 2 {
        return Err(Error::DomainError("need at least two beta values".into()));
    }
    let mut hs = Vec::new();
    let mut vs = Vec::new();
    for &beta in beta_sequence {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::DomainError(format!("beta = {beta} outside (0,1)")));
        }
        let mu = match kind {
            LimitKernel::Delta => 0.0,
            LimitKernel::Window => beta,
        };
        // truncate where the kernel's saddle bound is negligible
        let mut t_max = 1.5f64;
        while t_max < 1e6 {
            match wright_asymptotic(beta, mu, t_max) {
                Some((ln_val, _, _)) if ln_val < (tol / 100.0).ln() => break,
                _ => t_max *= 1.25,
            }
        }
        let q = tol / 10.0;
        let f = |t: f64| {
            let p = WrightParams::new(beta, mu, -t).unwrap();
            let phi = crate::special::wright_phi(&p, q / (t_max * 4.0))
                .map(|r| r.value)
                .unwrap_or(f64::NAN);
            g.eval(t) * phi
        };
        // the kernels concentrate near t = 1 as beta -> 1
        let v = quad::adaptive_split(f, 0.0, t_max, &[0.5, 0.9, 1.0, 1.1], q)?;
        hs.push(1.0 - beta);
        vs.push(v);
    }
    let lim = frac::neville(&hs, &vs, 0.0);
    if !lim.is_finite() {
        return Err(Error::ExtrapolationDiverged(
            "lemma-1 kernel integral extrapolation is not finite".into(),
        ));
    }
    Ok(lim)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Traces of u = y^{alpha-1}: u0 = ul = y^{alpha-1}, u_x = 0,
    /// tau_1 = Gamma(alpha), tau_2 = 0.
    pub(crate) fn traces_power(alpha: f64, l: f64, t_max: f64) -> BoundaryTraces {
        let n = if alpha <= 1.0 { 1 } else { 2 };
        let g = crate::special::gamma(alpha);
        let mut tau = vec![Func1D::constant(0.0, l, g)];
        if n == 2 {
            tau.push(Func1D::zero(0.0, l));
        }
        BoundaryTraces {
            u0: Func1D::power(0.0, t_max, 1.0, alpha - 1.0),
            ul: Func1D::power(0.0, t_max, 1.0, alpha - 1.0),
            ux0: Func1D::zero(0.0, t_max),
            uxl: Func1D::zero(0.0, t_max),
            tau,
        }
    }

    #[test]
    fn zero_solution_has_zero_residuals() {
        let l = 1.0;
        let traces = BoundaryTraces {
            u0: Func1D::zero(0.0, 1.0),
            ul: Func1D::zero(0.0, 1.0),
            ux0: Func1D::zero(0.0, 1.0),
            uxl: Func1D::zero(0.0, 1.0),
            tau: vec![Func1D::zero(0.0, l)],
        };
        let r0 = residual_x0(&traces, 0.7, l, 0.5, 1e-9).unwrap();
        let rl = residual_xl(&traces, 0.7, l, 0.5, 1e-9).unwrap();
        assert_eq!(r0, 0.0);
        assert_eq!(rl, 0.0);
    }

    #[test]
    fn manufactured_power_solution_certifies() {
        // u = y^{alpha-1} solves the equation; residuals vanish
        for &alpha in &[0.6f64, 1.5] {
            let traces = traces_power(alpha, 1.0, 1.0);
            for &y in &[0.3, 0.8] {
                let r0 = residual_x0(&traces, alpha, 1.0, y, 1e-7).unwrap();
                let rl = residual_xl(&traces, alpha, 1.0, y, 1e-7).unwrap();
                assert!(r0.abs() < 1e-5, "alpha={alpha} y={y}: r0 = {r0:e}");
                assert!(rl.abs() < 1e-5, "alpha={alpha} y={y}: rl = {rl:e}");
            }
        }
    }

    #[test]
    fn wave_residuals_linear_solution() {
        // u = x + y: tau1 = u_y(x,0) = 1, tau2 = u(x,0) = x, u_x = 1
        let (l, t) = (1.0, 1.0);
        let traces = BoundaryTraces {
            u0: Func1D::power(0.0, t, 1.0, 1.0),
            ul: Func1D::poly(0.0, t, &[l, 1.0]),
            ux0: Func1D::constant(0.0, t, 1.0),
            uxl: Func1D::constant(0.0, t, 1.0),
            tau: vec![
                Func1D::constant(0.0, l, 1.0),
                Func1D::power(0.0, l, 1.0, 1.0),
            ],
        };
        let (r0, rl) = wave_residuals(&traces, l, t, 0.6, 1e-10).unwrap();
        assert!(r0.abs() < 1e-10, "r0 = {r0:e}");
        assert!(rl.abs() < 1e-10, "rl = {rl:e}");
    }

    #[test]
    fn wave_residuals_standing_mode() {
        // u = sin(pi x / l) cos(pi y / l) at y = l/2
        let l = 1.0f64;
        let t = 1.0f64;
        let pi = std::f64::consts::PI;
        let traces = BoundaryTraces {
            u0: Func1D::zero(0.0, t),
            ul: Func1D::zero(0.0, t),
            ux0: Func1D::from_fn(0.0, t, move |y| pi / l * (pi * y / l).cos()),
            uxl: Func1D::from_fn(0.0, t, move |y| -pi / l * (pi * y / l).cos()),
            tau: vec![
                Func1D::zero(0.0, l),
                Func1D::sine(0.0, l, 1.0),
            ],
        };
        let (r0, rl) = wave_residuals(&traces, l, t, l / 2.0, 1e-12).unwrap();
        assert!(r0.abs() < 1e-10, "r0 = {r0:e}");
        assert!(rl.abs() < 1e-10, "rl = {rl:e}");
    }

    #[test]
    fn lemma1_window_of_one() {
        // g = 1, window kernel: integral -> int_0^1 1 = 1
        let g = Func1D::constant(0.0, 1e7, 1.0);
        let lim =
            lemma1_limit_check(&g, LimitKernel::Window, &[0.90, 0.95, 0.975], 1e-6).unwrap();
        assert!((lim - 1.0).abs() < 1e-3, "lim = {lim}");
    }
}
