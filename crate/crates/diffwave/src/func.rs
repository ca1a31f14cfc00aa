//! Real function handles on an interval.
//!
//! `Func1D` is what the operators consume: an evaluator on `[a, b]`, an
//! optional declared power behaviour `f(y) ~ c (y-a)^gamma` at the left
//! endpoint (so product quadrature can absorb the singularity), and an
//! optional closed-form Riemann-Liouville derivative rule `(nu, y) ->
//! D_{ay}^nu f(y)` which the fractional layer prefers over numerics whenever
//! it is attached. Power and polynomial presets carry the exact power-rule
//! closed form.

use crate::special::{gamma, gamma_recip};
use std::sync::Arc;

type EvalFn = dyn Fn(f64) -> f64 + Send + Sync;
type FracRule = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A real-valued function on a closed interval.
#[derive(Clone)]
pub struct Func1D {
    a: f64,
    b: f64,
    eval: Arc<EvalFn>,
    singular_exponent: Option<f64>,
    frac_rule: Option<Arc<FracRule>>,
}

impl std::fmt::Debug for Func1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Func1D")
            .field("domain", &(self.a, self.b))
            .field("singular_exponent", &self.singular_exponent)
            .field("has_frac_rule", &self.frac_rule.is_some())
            .finish()
    }
}

impl Func1D {
    pub fn from_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(a: f64, b: f64, f: F) -> Self {
        Func1D {
            a,
            b,
            eval: Arc::new(f),
            singular_exponent: None,
            frac_rule: None,
        }
    }

    /// Declare `f(y) (y-a)^{-gamma}` continuous at `a` (gamma < 0 means a
    /// singular left endpoint).
    pub fn with_singular_exponent(mut self, gamma: f64) -> Self {
        self.singular_exponent = Some(gamma);
        self
    }

    /// Attach a closed-form fractional-derivative rule `(nu, y) -> D^nu f`.
    pub fn with_frac_rule<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(
        mut self,
        rule: F,
    ) -> Self {
        self.frac_rule = Some(Arc::new(rule));
        self
    }

    pub fn zero(a: f64, b: f64) -> Self {
        Func1D::constant(a, b, 0.0)
    }

    pub fn constant(a: f64, b: f64, c: f64) -> Self {
        Func1D::power(a, b, c, 0.0)
    }

    /// `c (y - a)^p` with the exact power rule attached:
    /// `D^nu (y-a)^p = Gamma(p+1)/Gamma(p+1-nu) (y-a)^{p-nu}`.
    pub fn power(a: f64, b: f64, c: f64, p: f64) -> Self {
        let base = a;
        let f = Func1D {
            a,
            b,
            eval: Arc::new(move |y: f64| {
                if p == 0.0 {
                    c
                } else {
                    c * (y - base).powf(p)
                }
            }),
            singular_exponent: if p != 0.0 { Some(p) } else { None },
            frac_rule: None,
        };
        f.with_frac_rule(move |nu: f64, y: f64| {
            let coef = c * gamma(p + 1.0) * gamma_recip(p + 1.0 - nu);
            if coef == 0.0 {
                0.0
            } else {
                coef * (y - base).powf(p - nu)
            }
        })
    }

    /// `sum_i c_i (y - a)^i` with the exact power rule attached.
    pub fn poly(a: f64, b: f64, coeffs: &[f64]) -> Self {
        let cs: Vec<f64> = coeffs.to_vec();
        let cs2 = cs.clone();
        let base = a;
        Func1D::from_fn(a, b, move |y: f64| {
            let mut acc = 0.0;
            for &c in cs.iter().rev() {
                acc = acc * (y - base) + c;
            }
            acc
        })
        .with_frac_rule(move |nu: f64, y: f64| {
            let mut acc = 0.0;
            for (i, &c) in cs2.iter().enumerate() {
                let coef = c * gamma(i as f64 + 1.0) * gamma_recip(i as f64 + 1.0 - nu);
                if coef != 0.0 {
                    acc += coef * (y - base).powf(i as f64 - nu);
                }
            }
            acc
        })
    }

    /// `sin(k pi (y - a) / (b - a))`.
    pub fn sine(a: f64, b: f64, k: f64) -> Self {
        let len = b - a;
        Func1D::from_fn(a, b, move |y: f64| (k * std::f64::consts::PI * (y - a) / len).sin())
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.eval)(y)
    }

    pub fn singular_exponent(&self) -> Option<f64> {
        self.singular_exponent
    }

    pub fn frac_rule(&self, nu: f64, y: f64) -> Option<f64> {
        self.frac_rule.as_ref().map(|r| r(nu, y))
    }

    pub fn has_frac_rule(&self) -> bool {
        self.frac_rule.is_some()
    }

    /// Pointwise sum; closed rules combine when both sides carry one.
    pub fn add(&self, other: &Func1D) -> Func1D {
        let (f, g) = (self.clone(), other.clone());
        let rule = match (self.frac_rule.clone(), other.frac_rule.clone()) {
            (Some(rf), Some(rg)) => {
                Some(Arc::new(move |nu: f64, y: f64| rf(nu, y) + rg(nu, y)) as Arc<FracRule>)
            }
            _ => None,
        };
        let sing = match (self.singular_exponent, other.singular_exponent) {
            (Some(p), Some(q)) => Some(p.min(q)),
            (Some(p), None) => Some(p.min(0.0)),
            (None, Some(q)) => Some(q.min(0.0)),
            (None, None) => None,
        };
        Func1D {
            a: self.a,
            b: self.b,
            eval: Arc::new(move |y: f64| f.eval(y) + g.eval(y)),
            singular_exponent: sing,
            frac_rule: rule,
        }
    }

    /// Pointwise scaling.
    pub fn scale(&self, c: f64) -> Func1D {
        let f = self.clone();
        let rule = self.frac_rule.clone().map(|r| {
            Arc::new(move |nu: f64, y: f64| c * r(nu, y)) as Arc<FracRule>
        });
        Func1D {
            a: self.a,
            b: self.b,
            eval: Arc::new(move |y: f64| c * f.eval(y)),
            singular_exponent: self.singular_exponent,
            frac_rule: rule,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_preset_evaluates_and_differentiates() {
        let f = Func1D::power(0.0, 2.0, 3.0, 0.5);
        assert_relative_eq!(f.eval(1.0), 3.0);
        assert_relative_eq!(f.eval(0.25), 1.5);
        // D^{0.5} 3 y^{0.5} = 3 Gamma(1.5) / Gamma(1) y^0
        let d = f.frac_rule(0.5, 0.7).unwrap();
        assert_relative_eq!(d, 3.0 * crate::special::gamma(1.5), max_relative = 1e-13);
        // annihilation: D^{3/2} y^{1/2} = 0 (pole of Gamma)
        let d = f.frac_rule(1.5, 0.7).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn poly_matches_power_sum() {
        let p = Func1D::poly(0.0, 1.0, &[1.0, -2.0, 0.5]);
        let q = Func1D::power(0.0, 1.0, 1.0, 0.0)
            .add(&Func1D::power(0.0, 1.0, -2.0, 1.0))
            .add(&Func1D::power(0.0, 1.0, 0.5, 2.0));
        for &y in &[0.1, 0.5, 0.9] {
            assert_relative_eq!(p.eval(y), q.eval(y), max_relative = 1e-14);
            assert_relative_eq!(
                p.frac_rule(0.3, y).unwrap(),
                q.frac_rule(0.3, y).unwrap(),
                max_relative = 1e-12
            );
        }
    }
}
