//! The weight functions phi: (0, inf) -> (0, inf) and their classification.
//!
//! Whether a surface-area functional is an infimum or a supremum is decided
//! not by phi itself but by the transform `F(t) = phi(t^{-1/n})`: strictly
//! convex F puts phi in class Phi (inf), increasing strictly concave F puts
//! it in class Psi (sup). Classification is a numerical audit on a log-spaced
//! sample so that custom evaluators are admissible without symbolic analysis.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Audit sample range for `F(t)`, in F-space. The upper end stays below the
/// underflow threshold of `exp(-t)` so class Phi built-ins stay positive.
pub const AUDIT_LO: f64 = 1e-4;
pub const AUDIT_HI: f64 = 5e2;
/// Default number of audit samples.
pub const AUDIT_SAMPLES: usize = 512;
/// Strictness threshold for second differences, relative to local scale.
pub const STRICTNESS_TOL: f64 = 1e-12;
/// Relative variation of F(t)/t below which phi counts as proportional to
/// t^{-n}, the excluded degenerate case.
pub const DEGENERATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Class {
    Phi,
    Psi,
    Neither,
    ConstantBoth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotone {
    Increasing,
    StrictlyIncreasing,
    Decreasing,
    StrictlyDecreasing,
    None,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Classification {
    pub class: Class,
    pub monotone: Monotone,
    pub invertible: bool,
}

/// Serializable description of a built-in phi.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiSpec {
    Power { p: f64 },
    Constant { a: f64 },
    ArctanInvN,
    Log1pInvN,
    ExpNegInvN,
}

impl PhiSpec {
    pub fn into_function(self, dim: usize) -> Result<OrliczFunction> {
        match self {
            PhiSpec::Power { p } => OrliczFunction::power(p, dim),
            PhiSpec::Constant { a } => OrliczFunction::constant(a, dim),
            PhiSpec::ArctanInvN => OrliczFunction::arctan_inv_n(dim),
            PhiSpec::Log1pInvN => OrliczFunction::log1p_inv_n(dim),
            PhiSpec::ExpNegInvN => OrliczFunction::exp_neg_inv_n(dim),
        }
    }

    /// Parse a short CLI spec such as `power:2`, `constant:3`, `arctan_inv_n`.
    pub fn parse(s: &str) -> Result<PhiSpec> {
        let mut parts = s.splitn(2, ':');
        let head = parts.next().unwrap_or("");
        let arg = parts.next();
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| Error::ParseError(format!("missing parameter in phi spec '{s}'")))?
                .parse::<f64>()
                .map_err(|_| Error::ParseError(format!("bad number in phi spec '{s}'")))
        };
        match head {
            "power" => Ok(PhiSpec::Power { p: num(arg)? }),
            "constant" => Ok(PhiSpec::Constant { a: num(arg)? }),
            "arctan_inv_n" => Ok(PhiSpec::ArctanInvN),
            "log1p_inv_n" => Ok(PhiSpec::Log1pInvN),
            "exp_neg_inv_n" => Ok(PhiSpec::ExpNegInvN),
            _ => Err(Error::ParseError(format!("unknown phi spec '{s}'"))),
        }
    }
}

#[derive(Clone)]
enum Evaluator {
    Power(f64),
    Constant(f64),
    ArctanInvN,
    Log1pInvN,
    ExpNegInvN,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Evaluator::Power(p) => write!(f, "Power({p})"),
            Evaluator::Constant(a) => write!(f, "Constant({a})"),
            Evaluator::ArctanInvN => write!(f, "ArctanInvN"),
            Evaluator::Log1pInvN => write!(f, "Log1pInvN"),
            Evaluator::ExpNegInvN => write!(f, "ExpNegInvN"),
            Evaluator::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrliczFunction {
    eval: Evaluator,
    pub dim_hint: usize,
    pub classification: Classification,
    /// The spec this function was built from, if a built-in.
    pub spec: Option<PhiSpec>,
}

impl OrliczFunction {
    pub fn power(p: f64, dim: usize) -> Result<Self> {
        let n = dim as f64;
        if p == -n {
            return Err(Error::NearDegenerate);
        }
        if p == 0.0 {
            return Self::constant(1.0, dim);
        }
        Self::finish(Evaluator::Power(p), dim, Some(PhiSpec::Power { p }))
    }

    pub fn constant(a: f64, dim: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::RangeError(a));
        }
        Self::finish(Evaluator::Constant(a), dim, Some(PhiSpec::Constant { a }))
    }

    pub fn arctan_inv_n(dim: usize) -> Result<Self> {
        Self::finish(Evaluator::ArctanInvN, dim, Some(PhiSpec::ArctanInvN))
    }

    pub fn log1p_inv_n(dim: usize) -> Result<Self> {
        Self::finish(Evaluator::Log1pInvN, dim, Some(PhiSpec::Log1pInvN))
    }

    pub fn exp_neg_inv_n(dim: usize) -> Result<Self> {
        Self::finish(Evaluator::ExpNegInvN, dim, Some(PhiSpec::ExpNegInvN))
    }

    pub fn custom<F>(f: F, dim: usize) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::finish(Evaluator::Custom(Arc::new(f)), dim, None)
    }

    fn finish(eval: Evaluator, dim: usize, spec: Option<PhiSpec>) -> Result<Self> {
        let mut phi = OrliczFunction {
            eval,
            dim_hint: dim,
            classification: Classification {
                class: Class::Neither,
                monotone: Monotone::None,
                invertible: false,
            },
            spec,
        };
        let audited = classify(&phi, dim, AUDIT_SAMPLES)?;
        if let Some(analytic) = phi.analytic_class() {
            if analytic != audited.class {
                return Err(Error::ClassificationConflict {
                    analytic: format!("{analytic:?}"),
                    audit: format!("{:?}", audited.class),
                });
            }
        }
        phi.classification = audited;
        Ok(phi)
    }

    fn analytic_class(&self) -> Option<Class> {
        let n = self.dim_hint as f64;
        match &self.eval {
            Evaluator::Power(p) => Some(if *p > 0.0 || *p < -n {
                Class::Phi
            } else {
                Class::Psi
            }),
            Evaluator::Constant(_) => Some(Class::ConstantBoth),
            Evaluator::ArctanInvN | Evaluator::Log1pInvN => Some(Class::Psi),
            Evaluator::ExpNegInvN => Some(Class::Phi),
            Evaluator::Custom(_) => None,
        }
    }

    /// phi(t).
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::DomainError(t));
        }
        let n = self.dim_hint as f64;
        let v = match &self.eval {
            Evaluator::Power(p) => t.powf(*p),
            Evaluator::Constant(a) => *a,
            Evaluator::ArctanInvN => t.powf(-n).atan(),
            Evaluator::Log1pInvN => t.powf(-n).ln_1p(),
            Evaluator::ExpNegInvN => (-t.powf(-n)).exp(),
            Evaluator::Custom(f) => f(t),
        };
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::RangeError(t));
        }
        Ok(v)
    }

    /// d phi / dt, analytic for built-ins, central difference otherwise.
    pub fn deriv(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::DomainError(t));
        }
        let n = self.dim_hint as f64;
        Ok(match &self.eval {
            Evaluator::Power(p) => p * t.powf(p - 1.0),
            Evaluator::Constant(_) => 0.0,
            Evaluator::ArctanInvN => {
                let s = t.powf(-n);
                -n * t.powf(-n - 1.0) / (1.0 + s * s)
            }
            Evaluator::Log1pInvN => {
                let s = t.powf(-n);
                -n * t.powf(-n - 1.0) / (1.0 + s)
            }
            Evaluator::ExpNegInvN => {
                let s = t.powf(-n);
                n * t.powf(-n - 1.0) * (-s).exp()
            }
            Evaluator::Custom(_) => {
                let h = (t * 1e-6).max(1e-12);
                (self.eval(t + h)? - self.eval(t - h)?) / (2.0 * h)
            }
        })
    }

    /// F_phi(t) = phi(t^{-1/n}).
    pub fn f_transform(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::DomainError(t));
        }
        self.eval(t.powf(-1.0 / self.dim_hint as f64))
    }

    pub fn class(&self) -> Class {
        self.classification.class
    }

    pub fn is_increasing(&self) -> bool {
        matches!(
            self.classification.monotone,
            Monotone::Increasing | Monotone::StrictlyIncreasing
        )
    }

    pub fn is_decreasing(&self) -> bool {
        matches!(
            self.classification.monotone,
            Monotone::Decreasing | Monotone::StrictlyDecreasing
        )
    }

    /// inf of phi over (0, inf); used for the degenerate polytope limit.
    pub fn infimum(&self) -> Result<f64> {
        match &self.eval {
            // Power with p != 0 tends to 0 at one end; the Psi built-ins
            // decrease to 0 at infinity; exp(-t^-n) vanishes at 0.
            Evaluator::Power(_)
            | Evaluator::ArctanInvN
            | Evaluator::Log1pInvN
            | Evaluator::ExpNegInvN => Ok(0.0),
            Evaluator::Constant(a) => Ok(*a),
            Evaluator::Custom(_) => {
                let mut best = f64::INFINITY;
                for i in 0..AUDIT_SAMPLES {
                    let t = log_space(1e-9, 1e9, AUDIT_SAMPLES, i);
                    best = best.min(self.eval(t)?);
                }
                Ok(best)
            }
        }
    }

    /// Numerical inverse by bisection; requires strict monotonicity.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !self.classification.invertible {
            return Err(Error::UnclassifiedPhi);
        }
        let mut lo = 1e-12;
        let mut hi = 1e12;
        let increasing = self.is_increasing();
        let f = |t: f64| self.eval(t);
        let flo = f(lo)?;
        let fhi = f(hi)?;
        if increasing {
            if y < flo || y > fhi {
                return Err(Error::DomainError(y));
            }
        } else if y > flo || y < fhi {
            return Err(Error::DomainError(y));
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            let fm = f(mid)?;
            let go_right = if increasing { fm < y } else { fm > y };
            if go_right {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo * hi).sqrt())
    }
}

fn log_space(lo: f64, hi: f64, count: usize, i: usize) -> f64 {
    let f = i as f64 / (count - 1) as f64;
    lo * (hi / lo).powf(f)
}

/// Shape summary from a sampled audit of a positive function.
#[derive(Debug, Clone, Copy)]
pub struct FunctionAudit {
    pub monotone: Monotone,
    pub strictly_convex: bool,
    pub strictly_concave: bool,
    pub constant: bool,
}

/// Audit shape of `f` on a log-spaced sample of `[lo, hi]`.
pub fn audit_shape<F>(f: F, lo: f64, hi: f64, samples: usize) -> Result<FunctionAudit>
where
    F: Fn(f64) -> Result<f64>,
{
    assert!(samples >= 64, "audit needs at least 64 samples");
    let ts: Vec<f64> = (0..samples).map(|i| log_space(lo, hi, samples, i)).collect();
    let vs: Vec<f64> = ts.iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let vmax = vs.iter().cloned().fold(f64::MIN, f64::max);
    let vmin = vs.iter().cloned().fold(f64::MAX, f64::min);
    let constant = (vmax - vmin).abs() <= STRICTNESS_TOL * vmax.abs().max(1e-300);

    let mut inc = true;
    let mut strict_inc = true;
    let mut dec = true;
    let mut strict_dec = true;
    for w in vs.windows(2) {
        let scale = w[0].abs().max(w[1].abs()).max(1e-300);
        let d = w[1] - w[0];
        if d < -STRICTNESS_TOL * scale {
            inc = false;
        }
        if d <= STRICTNESS_TOL * scale {
            strict_inc = false;
        }
        if d > STRICTNESS_TOL * scale {
            dec = false;
        }
        if d >= -STRICTNESS_TOL * scale {
            strict_dec = false;
        }
    }
    let monotone = if constant {
        Monotone::Increasing
    } else if strict_inc {
        Monotone::StrictlyIncreasing
    } else if strict_dec {
        Monotone::StrictlyDecreasing
    } else if inc {
        Monotone::Increasing
    } else if dec {
        Monotone::Decreasing
    } else {
        Monotone::None
    };

    let mut strictly_convex = !constant;
    let mut strictly_concave = !constant;
    for i in 0..samples.saturating_sub(2) {
        let (t0, t1, t2) = (ts[i], ts[i + 1], ts[i + 2]);
        let lam = (t2 - t1) / (t2 - t0);
        let lin = lam * vs[i] + (1.0 - lam) * vs[i + 2];
        let scale = vs[i].abs().max(vs[i + 1].abs()).max(vs[i + 2].abs());
        let gap = lin - vs[i + 1];
        if gap <= STRICTNESS_TOL * scale {
            strictly_convex = false;
        }
        if gap >= -STRICTNESS_TOL * scale {
            strictly_concave = false;
        }
    }
    Ok(FunctionAudit {
        monotone,
        strictly_convex,
        strictly_concave,
        constant,
    })
}

/// Numerical classification of phi via the shape of F_phi.
pub fn classify(phi: &OrliczFunction, dim: usize, samples: usize) -> Result<Classification> {
    let n = dim as f64;
    let f_audit = audit_shape(|t| phi.f_transform(t), AUDIT_LO, AUDIT_HI, samples)?;
    // The excluded phi ~ t^{-n} shows up as F proportional to t.
    if !f_audit.constant {
        let ratios: Vec<f64> = (0..samples)
            .map(|i| {
                let t = log_space(AUDIT_LO, AUDIT_HI, samples, i);
                phi.f_transform(t).map(|v| v / t)
            })
            .collect::<Result<_>>()?;
        let rmax = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let rmin = ratios.iter().cloned().fold(f64::MAX, f64::min);
        if (rmax - rmin) <= DEGENERATE_TOL * rmax.abs() {
            return Err(Error::NearDegenerate);
        }
    }
    let class = if f_audit.constant {
        Class::ConstantBoth
    } else if f_audit.strictly_convex {
        Class::Phi
    } else if f_audit.strictly_concave
        && matches!(
            f_audit.monotone,
            Monotone::Increasing | Monotone::StrictlyIncreasing
        )
    {
        Class::Psi
    } else {
        Class::Neither
    };
    // phi's own monotonicity: audit on the matching phi-space window.
    let phi_lo = AUDIT_HI.powf(-1.0 / n);
    let phi_hi = AUDIT_LO.powf(-1.0 / n);
    let phi_audit = audit_shape(|t| phi.eval(t), phi_lo, phi_hi, samples)?;
    Ok(Classification {
        class,
        monotone: phi_audit.monotone,
        invertible: matches!(
            phi_audit.monotone,
            Monotone::StrictlyIncreasing | Monotone::StrictlyDecreasing
        ),
    })
}

/// The composition H = phi o psi^{-1} used by the cyclic monotonicity
/// theorem; evaluated pointwise through the numerical inverse.
pub fn compose_h<'a>(
    phi: &'a OrliczFunction,
    psi: &'a OrliczFunction,
) -> impl Fn(f64) -> Result<f64> + 'a {
    move |t: f64| phi.eval(psi.inverse(t)?)
}

/// Audit H on the image of psi over the standard phi-space window.
pub fn audit_h(phi: &OrliczFunction, psi: &OrliczFunction, samples: usize) -> Result<FunctionAudit> {
    let n = psi.dim_hint as f64;
    let lo_t = AUDIT_HI.powf(-1.0 / n);
    let hi_t = AUDIT_LO.powf(-1.0 / n);
    let a = psi.eval(lo_t)?;
    let b = psi.eval(hi_t)?;
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    // Shrink slightly so the bisection stays inside the bracket.
    let lo = lo * 1.000001;
    let hi = hi * 0.999999;
    let h = compose_h(phi, psi);
    audit_shape(h, lo, hi, samples)
}
