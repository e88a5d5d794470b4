//! Explicit supersolution of `f'' + f' + f^p = 0` and its derivatives.
//!
//! ```text
//! g(t, eps) = eps (1 + (p-1)^2 eps^{p-1} t / (p(p+1)))^{-1/(p-1)}
//! w(t)      = (1/2 + (2^{1/alpha} + t)^{-alpha})^{-1/(p-1)}
//! H(t, eps) = w(t) g(t, eps)
//! ```
//!
//! `g` solves `g' = -(p-1)/(p(p+1)) g^p` with `g(0) = eps`, and `w` increases
//! from `1` to `2^{1/(p-1)}`. For `eps` with `(p-1)/(p(p+1)) eps^{p-1} <= 1/2`,
//! `H` satisfies
//!
//! ```text
//! H'' + H' + H^p >= C1 w g^p + C2 (2^{(alpha+1)/alpha} + t)^{-(alpha+1)} H,   H' + H/2 >= 0,
//! C1 = 2/(p+1) - 2 alpha / (p(p+1) 2^{1/alpha}),   C2 = alpha/(p-1).
//! ```
//!
//! `H` is concave in `eps`, which is what lets `H(t, u_L(t,x))` serve as a
//! supersolution of the PDE.

use crate::math::powf;
use crate::{Error, Result};

/// The supersolution family for fixed `(p, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSupersolution {
    p: f64,
    alpha: f64,
}

/// `H`'s first and second partial derivatives at one `(t, eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupersolutionDerivatives {
    pub dt: f64,
    pub deps: f64,
    pub dt_deps: f64,
    pub deps2: f64,
    pub dt2: f64,
}

/// Signed residuals of the two differential inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupersolutionResiduals {
    /// `H'' + H' + H^p - C1 w g^p - C2 (2^{(alpha+1)/alpha} + t)^{-(alpha+1)} H`.
    pub main: f64,
    /// `H' + H/2`.
    pub halfdamp: f64,
}

impl OdeSupersolution {
    /// `p` may range over `(1, 4)`; the inequalities are only claimed for
    /// `1 < p < 3` and anything else is exploratory.
    pub fn new(p: f64, alpha: f64) -> Result<Self> {
        if !(p > 1.0 && p < 4.0) {
            return Err(Error::InvalidParam {
                name: "p",
                value: p,
                expected: "1 < p < 4",
            });
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParam {
                name: "alpha",
                value: alpha,
                expected: "0 < alpha <= 1",
            });
        }
        Ok(OdeSupersolution { p, alpha })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_exploratory(&self) -> bool {
        self.p >= 3.0
    }

    /// `(p-1)/(p(p+1))`, the rate constant in `g' = -(p-1)/(p(p+1)) g^p`.
    pub fn decay_rate(&self) -> f64 {
        let p = self.p;
        (p - 1.0) / (p * (p + 1.0))
    }

    /// Largest `eps` with `(p-1)/(p(p+1)) eps^{p-1} <= 1/2`.
    pub fn max_eps(&self) -> f64 {
        powf(0.5 / self.decay_rate(), 1.0 / (self.p - 1.0))
    }

    /// `(C1, C2)`.
    pub fn constants(&self) -> (f64, f64) {
        let (p, a) = (self.p, self.alpha);
        let c1 = 2.0 / (p + 1.0) - 2.0 * a / (p * (p + 1.0) * powf(2.0, 1.0 / a));
        let c2 = a / (p - 1.0);
        (c1, c2)
    }

    fn shift(&self, t: f64) -> f64 {
        powf(2.0, 1.0 / self.alpha) + t
    }

    /// `g(t, eps)`; zero for `eps = 0`.
    pub fn decay(&self, t: f64, eps: f64) -> f64 {
        let p = self.p;
        let s = (p - 1.0) * self.decay_rate() * powf(eps, p - 1.0) * t;
        eps * powf(1.0 + s, -1.0 / (p - 1.0))
    }

    /// `w(t)`.
    pub fn weight(&self, t: f64) -> f64 {
        powf(0.5 + powf(self.shift(t), -self.alpha), -1.0 / (self.p - 1.0))
    }

    /// `(w', w'')`.
    pub fn weight_derivatives(&self, t: f64) -> (f64, f64) {
        let (p, a) = (self.p, self.alpha);
        let big_a = self.shift(t);
        let w = self.weight(t);
        let wp1 = powf(w, p - 1.0);
        let dw = a / (p - 1.0) * powf(big_a, -a - 1.0) * wp1 * w;
        let ddw = (p * a / (p - 1.0) * wp1 / powf(big_a, a + 1.0) - (a + 1.0) / big_a) * dw;
        (dw, ddw)
    }

    /// `(g', g'')` in `t`.
    pub fn decay_derivatives(&self, t: f64, eps: f64) -> (f64, f64) {
        let p = self.p;
        let b = self.decay_rate();
        let g = self.decay(t, eps);
        let gp = powf(g, p);
        (-b * gp, p * b * b * gp * powf(g, p - 1.0))
    }

    /// `H(t, eps) = w(t) g(t, eps)`.
    pub fn value(&self, t: f64, eps: f64) -> f64 {
        self.weight(t) * self.decay(t, eps)
    }

    /// All first and second partials of `H` used by the analysis.
    ///
    /// The mixed and `eps` derivatives use the closed forms in terms of
    /// `g^{p-1} eps^{-p}`; `H''` is the product rule `w''g + 2w'g' + wg''`.
    pub fn derivatives(&self, t: f64, eps: f64) -> SupersolutionDerivatives {
        let (p, a) = (self.p, self.alpha);
        let b = self.decay_rate();
        let big_a = self.shift(t);
        let w = self.weight(t);
        let g = self.decay(t, eps);
        let h = w * g;
        let wp1 = powf(w, p - 1.0);
        let gp1 = powf(g, p - 1.0);
        // g^{p-1} eps^{-p}, written to stay finite for tiny eps.
        let r = powf(g / eps, p - 1.0) / eps;
        let growth = a * wp1 / ((p - 1.0) * powf(big_a, a + 1.0));

        let dt = (growth - b * gp1) * h;
        let deps = h * r;
        let dt_deps = (growth * r - (p - 1.0) / (p + 1.0) * gp1 * r) * h;
        let deps2 = p * (r * r - r / eps) * h;

        let (dw, ddw) = self.weight_derivatives(t);
        let (dg, ddg) = self.decay_derivatives(t, eps);
        let dt2 = ddw * g + 2.0 * dw * dg + w * ddg;

        SupersolutionDerivatives {
            dt,
            deps,
            dt_deps,
            deps2,
            dt2,
        }
    }

    /// Residuals of both inequalities at `(t, eps)`.
    pub fn residuals(&self, t: f64, eps: f64) -> SupersolutionResiduals {
        let (p, a) = (self.p, self.alpha);
        let (c1, c2) = self.constants();
        let w = self.weight(t);
        let g = self.decay(t, eps);
        let h = w * g;
        let d = self.derivatives(t, eps);
        let forcing = powf(powf(2.0, (a + 1.0) / a) + t, -(a + 1.0));
        SupersolutionResiduals {
            main: d.dt2 + d.dt + powf(h, p) - c1 * w * powf(g, p) - c2 * forcing * h,
            halfdamp: d.dt + 0.5 * h,
        }
    }
}

/// Validated `(p, alpha, eps)` with the smallness condition
/// `(p-1)/(p(p+1)) eps^{p-1} <= 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSupersolutionParams {
    pub p: f64,
    pub alpha: f64,
    pub eps: f64,
}

impl OdeSupersolutionParams {
    pub fn new(p: f64, alpha: f64, eps: f64) -> Result<Self> {
        let family = OdeSupersolution::new(p, alpha)?;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParam {
                name: "eps",
                value: eps,
                expected: "eps > 0",
            });
        }
        if eps > family.max_eps() {
            return Err(Error::InvalidParam {
                name: "eps",
                value: eps,
                expected: "(p-1)/(p(p+1)) eps^(p-1) <= 1/2",
            });
        }
        Ok(OdeSupersolutionParams { p, alpha, eps })
    }

    pub fn family(&self) -> OdeSupersolution {
        OdeSupersolution {
            p: self.p,
            alpha: self.alpha,
        }
    }
}

/// Solution `((p-1) t + f^{1-p})^{-1/(p-1)}` of `G' + G^p = 0`, `G(0) = f`.
///
/// Extended by `G = 0` at `f = 0`. Written as `f (1 + (p-1) t f^{p-1})^{-1/(p-1)}`,
/// which has no overflow for small `f`.
pub fn absorption_flow(t: f64, f: f64, p: f64) -> f64 {
    if f <= 0.0 {
        return 0.0;
    }
    f * powf(1.0 + (p - 1.0) * t * powf(f, p - 1.0), -1.0 / (p - 1.0))
}
