//! The modulation layer: symmetric distribution functions G0, the rational
//! h / w0 coefficient family, the odd-map catalog, and the composed density
//!
//! ```text
//! f(x, y) = 2 f0(x, y) G0{ w(x, y) },    w(x, y) = w0(residual) * h(x)
//! ```
//!
//! where `residual` is y minus the conditional mean of Y given X = x,
//! optionally whitened by the conditional scale. The defining feature of the
//! family is that w is NOT odd in (x, y) for generic h, yet W = w(V) is
//! symmetric about zero when V follows the elliptical baseline, which is
//! exactly what makes f a density.

use nalgebra::DVector;

use crate::elliptical::{ConditionalMoments, EllipticalBaseline};
use crate::error::{Error, Result};

/// Symmetric univariate distribution functions usable as the modulation cdf.
/// All satisfy G0(-t) = 1 - G0(t) and G0(0) = 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetricCdf {
    StandardNormal,
    StandardCauchy,
    Logistic,
}

impl SymmetricCdf {
    /// Distribution function value in [0, 1].
    pub fn cdf(self, t: f64) -> f64 {
        match self {
            SymmetricCdf::StandardNormal => crate::special::norm_cdf(t),
            SymmetricCdf::StandardCauchy => 0.5 + t.atan() / std::f64::consts::PI,
            SymmetricCdf::Logistic => 1.0 / (1.0 + (-t).exp()),
        }
    }

    /// Quantile function (inverse cdf) for u in (0, 1).
    pub fn quantile(self, u: f64) -> f64 {
        match self {
            SymmetricCdf::StandardNormal => crate::special::norm_quantile(u),
            SymmetricCdf::StandardCauchy => (std::f64::consts::PI * (u - 0.5)).tan(),
            SymmetricCdf::Logistic => (u / (1.0 - u)).ln(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SymmetricCdf::StandardNormal => "normal",
            SymmetricCdf::StandardCauchy => "cauchy",
            SymmetricCdf::Logistic => "logistic",
        }
    }
}

/// Coefficients of the rational pair
///
/// ```text
/// h(x) = (1 + a1 x + a2 x^2) / (1 + b1 x + b2 x^2)
/// w0(u) = (c1 u + c3 u^3) / (1 + c2 u^2)
/// ```
///
/// Construction enforces strictly positive denominators on the whole line:
/// either b = 0 or b2 > 0 with b1^2 < 4 b2, and c2 >= 0. The family as
/// published permits real denominator roots, which would leave h undefined on
/// a null set; rejecting those coefficients keeps every density total and
/// loses no generality (the symmetry result holds for arbitrary h).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalModulation {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl RationalModulation {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64, c1: f64, c2: f64, c3: f64) -> Result<Self> {
        validate_h_denominator(b1, b2)?;
        if c2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "w0 denominator requires c2 >= 0, got c2 = {c2}"
            )));
        }
        Ok(RationalModulation {
            a1,
            a2,
            b1,
            b2,
            c1,
            c2,
            c3,
        })
    }

    pub fn h(&self, x: f64) -> f64 {
        (1.0 + self.a1 * x + self.a2 * x * x) / (1.0 + self.b1 * x + self.b2 * x * x)
    }

    pub fn w0(&self, u: f64) -> f64 {
        (self.c1 * u + self.c3 * (u * u * u)) / (1.0 + self.c2 * (u * u))
    }
}

fn validate_h_denominator(b1: f64, b2: f64) -> Result<()> {
    let ok = (b2 > 0.0 && b1 * b1 < 4.0 * b2) || (b1 == 0.0 && b2 == 0.0);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "h denominator must be positive on all of R: need b1^2 < 4 b2 (or b = 0), got b1 = {b1}, b2 = {b2}"
        )))
    }
}

/// Named h functions from R^(d-m) to R. A vector-valued X is reduced through
/// the sum of its components before the scalar form applies, so every member
/// remains usable in the multivariate-X extension.
#[derive(Debug, Clone, PartialEq)]
pub enum HFunction {
    /// h = k
    Constant(f64),
    /// h(u) = alpha u (odd; makes w even and E\[Y\] vanish in the normal case)
    Linear(f64),
    /// h(u) = alpha |u|
    AlphaAbs(f64),
    /// h(u) = cos u / sqrt(1 - (1 - rho^2) cos^2 u), the inversion of
    /// s = cos; at rho = 0 the denominator vanishes at u = k pi and the
    /// evaluation clamps it to a tiny positive value (isolated points,
    /// bounded integrands downstream)
    CosineInverted { rho: f64 },
    /// the rational form of `RationalModulation`
    Rational { a1: f64, a2: f64, b1: f64, b2: f64 },
}

impl HFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            HFunction::Rational { b1, b2, .. } => validate_h_denominator(b1, b2),
            HFunction::CosineInverted { rho } => {
                if rho.abs() < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(
                        "CosineInverted requires |rho| < 1".into(),
                    ))
                }
            }
            HFunction::AlphaAbs(alpha) | HFunction::Linear(alpha) => {
                if alpha.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("alpha must be finite".into()))
                }
            }
            HFunction::Constant(k) => {
                if k.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("constant h must be finite".into()))
                }
            }
        }
    }

    /// Scalar evaluation.
    pub fn eval_scalar(&self, u: f64) -> f64 {
        match *self {
            HFunction::Constant(k) => k,
            HFunction::Linear(alpha) => alpha * u,
            HFunction::AlphaAbs(alpha) => alpha * u.abs(),
            HFunction::CosineInverted { rho } => {
                let c = u.cos();
                let den = 1.0 - (1.0 - rho * rho) * c * c;
                c / den.max(1e-280).sqrt()
            }
            HFunction::Rational { a1, a2, b1, b2 } => {
                (1.0 + a1 * u + a2 * u * u) / (1.0 + b1 * u + b2 * u * u)
            }
        }
    }

    /// Evaluation on the X block; vectors reduce via the component sum.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let u = if x.len() == 1 { x[0] } else { x.iter().sum() };
        self.eval_scalar(u)
    }

    /// True when the map has a derivative kink (currently only at u = 0 for
    /// `AlphaAbs`); quadrature layers split the integral there.
    pub fn kink_at_zero(&self) -> bool {
        matches!(self, HFunction::AlphaAbs(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            HFunction::Constant(_) => "constant",
            HFunction::Linear(_) => "linear",
            HFunction::AlphaAbs(_) => "alpha-abs",
            HFunction::CosineInverted { .. } => "cosine-inverted",
            HFunction::Rational { .. } => "rational",
        }
    }
}

/// Odd maps w0: R^m -> R with w0(-u) = -w0(u), applied to the (possibly
/// whitened) residual. Oddness is exact in floating point: every variant is
/// sign-antisymmetric term by term.
#[derive(Debug, Clone, PartialEq)]
pub enum OddMap {
    /// (c1 u + c3 u^3) / (1 + c2 u^2); scalar residual only (m = 1)
    RationalOdd { c1: f64, c2: f64, c3: f64 },
    /// coeffs . u
    LinearForm(Vec<f64>),
    /// sum_i coeffs_i u_i^3
    SumOddCubic(Vec<f64>),
}

impl OddMap {
    /// Identity map on a scalar residual.
    pub fn identity() -> Self {
        OddMap::RationalOdd {
            c1: 1.0,
            c2: 0.0,
            c3: 0.0,
        }
    }

    pub fn validate(&self, y_dim: usize) -> Result<()> {
        match self {
            OddMap::RationalOdd { c2, .. } => {
                if y_dim != 1 {
                    return Err(Error::InvalidParameter(
                        "RationalOdd applies to a scalar residual (m = 1)".into(),
                    ));
                }
                if *c2 < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "w0 denominator requires c2 >= 0, got c2 = {c2}"
                    )));
                }
                Ok(())
            }
            OddMap::LinearForm(c) | OddMap::SumOddCubic(c) => {
                if c.len() != y_dim {
                    Err(Error::Dimension {
                        expected: y_dim,
                        got: c.len(),
                    })
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        match self {
            OddMap::RationalOdd { c1, c2, c3 } => {
                let u = u[0];
                (c1 * u + c3 * (u * u * u)) / (1.0 + c2 * (u * u))
            }
            OddMap::LinearForm(c) => c.iter().zip(u).map(|(a, v)| a * v).sum(),
            OddMap::SumOddCubic(c) => c.iter().zip(u).map(|(a, v)| a * v * v * v).sum(),
        }
    }

    /// True when this is the identity on a scalar residual.
    pub fn is_identity(&self) -> bool {
        match self {
            OddMap::RationalOdd { c1, c2, c3 } => *c1 == 1.0 && *c2 == 0.0 && *c3 == 0.0,
            OddMap::LinearForm(c) => c.len() == 1 && c[0] == 1.0,
            OddMap::SumOddCubic(_) => false,
        }
    }
}

/// The composed modulated density, evaluable pointwise:
/// 2 f0(x, y) G0{ w0(residual) h(x) }.
///
/// # Example
///
/// ```
/// use secdist::{EllipticalBaseline, GeneratorKind, HFunction, OddMap, SecDensity, SymmetricCdf};
///
/// let baseline = EllipticalBaseline::standard_bivariate(0.5, GeneratorKind::Normal)?;
/// let density = SecDensity::new(
///     baseline,
///     SymmetricCdf::StandardCauchy,
///     HFunction::Rational { a1: 1.0, a2: 0.5, b1: 0.0, b2: 1.0 },
///     OddMap::RationalOdd { c1: 1.0, c2: 0.5, c3: 0.3 },
///     true,
/// )?;
/// let f = density.density(&[1.0], &[0.5])?;
/// assert!(f > 0.0 && f.is_finite());
/// # Ok::<(), secdist::Error>(())
/// ```
#[derive(Debug, Clone)]
pub struct SecDensity {
    baseline: EllipticalBaseline,
    g0: SymmetricCdf,
    h: HFunction,
    odd: OddMap,
    /// selects the whitened-residual form of w (divide by the Cholesky
    /// factor of the conditional scale before applying w0)
    standardized: bool,
    label: String,
}

impl SecDensity {
    pub fn new(
        baseline: EllipticalBaseline,
        g0: SymmetricCdf,
        h: HFunction,
        odd: OddMap,
        standardized: bool,
    ) -> Result<Self> {
        h.validate()?;
        odd.validate(baseline.y_dim())?;
        Ok(SecDensity {
            baseline,
            g0,
            h,
            odd,
            standardized,
            label: String::from("unnamed"),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn baseline(&self) -> &EllipticalBaseline {
        &self.baseline
    }

    pub fn g0(&self) -> SymmetricCdf {
        self.g0
    }

    pub fn h(&self) -> &HFunction {
        &self.h
    }

    pub fn odd(&self) -> &OddMap {
        &self.odd
    }

    pub fn standardized(&self) -> bool {
        self.standardized
    }

    fn cond(&self) -> &ConditionalMoments {
        self.baseline.conditional_moments()
    }

    /// The modulation argument w(x, y). Not odd in (x, y) for generic h;
    /// its distribution under the baseline is nevertheless symmetric about 0.
    pub fn w(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.baseline.x_dim() {
            return Err(Error::Dimension {
                expected: self.baseline.x_dim(),
                got: x.len(),
            });
        }
        if y.len() != self.baseline.y_dim() {
            return Err(Error::Dimension {
                expected: self.baseline.y_dim(),
                got: y.len(),
            });
        }
        Ok(self.w_unchecked(x, y))
    }

    pub(crate) fn w_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let mean = self.cond().mean_given_x(x);
        let residual =
            DVector::from_iterator(y.len(), y.iter().zip(mean.iter()).map(|(yi, mi)| yi - mi));
        let arg = if self.standardized {
            self.cond().whiten(&residual)
        } else {
            residual
        };
        self.odd.eval(arg.as_slice()) * self.h.eval(x)
    }

    /// w evaluated on a full d-vector (X block first).
    pub(crate) fn w_point(&self, v: &[f64]) -> f64 {
        let split = self.baseline.x_dim();
        self.w_unchecked(&v[..split], &v[split..])
    }

    /// Density at (x, y): 2 f0 G0(w). Nonnegative by construction.
    pub fn density(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let w = self.w(x, y)?;
        let mut point = Vec::with_capacity(x.len() + y.len());
        point.extend_from_slice(x);
        point.extend_from_slice(y);
        let f0 = self.baseline.density(&point)?;
        Ok(2.0 * f0 * self.g0.cdf(w))
    }

    /// Density on a full d-vector.
    pub fn density_point(&self, v: &[f64]) -> Result<f64> {
        let split = self.baseline.x_dim();
        self.density(&v[..split], &v[split..])
    }
}
