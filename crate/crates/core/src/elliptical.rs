//! Elliptically contoured baseline densities with a partition into a
//! conditioning block X (the first d-m coordinates) and a modulated block Y
//! (the last m), plus the conditional location/scale quantities the
//! modulation layer is built on.
//!
//! Supported generators are the normal and the Student-t families; both have
//! full support, closed-form densities and closed-form X-marginals, which is
//! all the rest of the crate needs.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Density generator of the elliptical family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    Normal,
    StudentT { dof: f64 },
}

impl GeneratorKind {
    fn validate(&self) -> Result<()> {
        if let GeneratorKind::StudentT { dof } = *self {
            if !dof.is_finite() || dof <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "Student-t degrees of freedom must be a positive real, got {dof}"
                )));
            }
        }
        Ok(())
    }
}

/// Conditional location and scale of the Y block given X = x:
/// `m_Y(x) = beta0 + beta * x`, with conditional scale matrix `sigma22_1`
/// (the Schur complement of the X block in sigma).
#[derive(Debug, Clone)]
pub struct ConditionalMoments {
    pub beta0: DVector<f64>,
    pub beta: DMatrix<f64>,
    pub sigma22_1: DMatrix<f64>,
    /// Lower Cholesky factor of `sigma22_1`, used to whiten residuals.
    chol22_1: DMatrix<f64>,
}

impl ConditionalMoments {
    /// Conditional mean of Y given the X block `x`.
    pub fn mean_given_x(&self, x: &[f64]) -> DVector<f64> {
        let xv = DVector::from_column_slice(x);
        &self.beta0 + &self.beta * xv
    }

    /// Whitened residual: the forward solve L r' = r with
    /// `sigma22_1 = L L^T`. For m = 1 this is r / sqrt(sigma22_1).
    pub fn whiten(&self, residual: &DVector<f64>) -> DVector<f64> {
        forward_solve(&self.chol22_1, residual)
    }
}

/// An elliptically contoured baseline EC_d(mu, sigma, psi) with the last
/// `y_dim` coordinates forming the modulated block.
#[derive(Debug, Clone)]
pub struct EllipticalBaseline {
    mu: DVector<f64>,
    sigma: DMatrix<f64>,
    generator: GeneratorKind,
    y_dim: usize,
    chol: DMatrix<f64>,
    chol11: DMatrix<f64>,
    cond: ConditionalMoments,
}

impl EllipticalBaseline {
    /// Builds and validates the baseline. `sigma` must be symmetric positive
    /// definite (checked by attempting the Cholesky factorization) and the
    /// partition must satisfy 1 <= y_dim <= d - 1.
    pub fn new(
        mu: Vec<f64>,
        sigma: DMatrix<f64>,
        generator: GeneratorKind,
        y_dim: usize,
    ) -> Result<Self> {
        generator.validate()?;
        let d = mu.len();
        if d < 2 {
            return Err(Error::InvalidParameter(
                "baseline dimension must be at least 2".into(),
            ));
        }
        if sigma.nrows() != d || sigma.ncols() != d {
            return Err(Error::Dimension {
                expected: d,
                got: sigma.nrows(),
            });
        }
        if y_dim == 0 || y_dim >= d {
            return Err(Error::InvalidParameter(format!(
                "partition must satisfy 1 <= m <= d - 1, got m = {y_dim}, d = {d}"
            )));
        }
        if mu.iter().any(|v| !v.is_finite()) || sigma.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "mu and sigma must be finite".into(),
            ));
        }
        let scale = sigma.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..d {
            for j in 0..i {
                if (sigma[(i, j)] - sigma[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::InvalidParameter("sigma is not symmetric".into()));
                }
            }
        }

        let chol = Cholesky::<f64, Dyn>::new(sigma.clone())
            .ok_or(Error::NotPositiveDefinite)?
            .l();
        let x_dim = d - y_dim;
        let sigma11 = sigma.view((0, 0), (x_dim, x_dim)).clone_owned();
        let chol11_full =
            Cholesky::<f64, Dyn>::new(sigma11.clone()).ok_or(Error::NotPositiveDefinite)?;
        let chol11 = chol11_full.l();

        // beta = Sigma21 Sigma11^{-1}  (m x (d-m));
        // sigma22_1 = Sigma22 - Sigma21 Sigma11^{-1} Sigma12
        let sigma12 = sigma.view((0, x_dim), (x_dim, y_dim)).clone_owned();
        let sigma21 = sigma.view((x_dim, 0), (y_dim, x_dim)).clone_owned();
        let sigma22 = sigma.view((x_dim, x_dim), (y_dim, y_dim)).clone_owned();
        let inv11_12 = chol11_full.solve(&sigma12); // Sigma11^{-1} Sigma12
        let beta = inv11_12.transpose();
        let sigma22_1 = &sigma22 - &sigma21 * &inv11_12;

        let mu_x = DVector::from_column_slice(&mu[..x_dim]);
        let mu_y = DVector::from_column_slice(&mu[x_dim..]);
        let beta0 = &mu_y - &beta * &mu_x;
        let chol22_1 = Cholesky::<f64, Dyn>::new(sigma22_1.clone())
            .ok_or(Error::NotPositiveDefinite)?
            .l();

        Ok(EllipticalBaseline {
            mu: DVector::from_vec(mu),
            sigma,
            generator,
            y_dim,
            chol,
            chol11,
            cond: ConditionalMoments {
                beta0,
                beta,
                sigma22_1,
                chol22_1,
            },
        })
    }

    /// Standardized bivariate baseline of the two-dimensional family:
    /// mu = 0, unit-variance marginals with correlation `rho`.
    pub fn standard_bivariate(rho: f64, generator: GeneratorKind) -> Result<Self> {
        if !rho.is_finite() || rho.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "correlation must satisfy |rho| < 1, got {rho}"
            )));
        }
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]);
        Self::new(vec![0.0, 0.0], sigma, generator, 1)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn x_dim(&self) -> usize {
        self.mu.len() - self.y_dim
    }

    pub fn y_dim(&self) -> usize {
        self.y_dim
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn generator(&self) -> GeneratorKind {
        self.generator
    }

    /// Lower Cholesky factor of sigma (for sampling).
    pub(crate) fn chol_l(&self) -> &DMatrix<f64> {
        &self.chol
    }

    /// Conditional moments of the Y block given X.
    pub fn conditional_moments(&self) -> &ConditionalMoments {
        &self.cond
    }

    fn ln_det_chol(chol: &DMatrix<f64>) -> f64 {
        (0..chol.nrows()).map(|i| chol[(i, i)].ln()).sum()
    }

    /// Density at `point` (length d).
    pub fn density(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: point.len(),
            });
        }
        let diff = DVector::from_iterator(
            self.dim(),
            point.iter().zip(self.mu.iter()).map(|(p, m)| p - m),
        );
        let q = forward_solve(&self.chol, &diff).norm_squared();
        let d = self.dim() as f64;
        let ln_det_half = Self::ln_det_chol(&self.chol);
        Ok(Self::generator_density(self.generator, q, d, ln_det_half))
    }

    fn generator_density(generator: GeneratorKind, q: f64, d: f64, ln_det_half: f64) -> f64 {
        match generator {
            GeneratorKind::Normal => (-0.5 * q - 0.5 * d * LN_2PI - ln_det_half).exp(),
            GeneratorKind::StudentT { dof } => {
                let ln_c = ln_gamma((dof + d) / 2.0)
                    - ln_gamma(dof / 2.0)
                    - 0.5 * d * (dof * std::f64::consts::PI).ln()
                    - ln_det_half;
                (ln_c - 0.5 * (dof + d) * (1.0 + q / dof).ln()).exp()
            }
        }
    }

    /// Marginal density of the X block at `x` (length d - m).
    ///
    /// For both supported generators the marginal stays in the same family
    /// with location mu_x, scale Sigma11 (and the same dof for Student-t).
    pub fn x_marginal_density(&self, x: &[f64]) -> Result<f64> {
        let x_dim = self.x_dim();
        if x.len() != x_dim {
            return Err(Error::Dimension {
                expected: x_dim,
                got: x.len(),
            });
        }
        let diff = DVector::from_iterator(x_dim, x.iter().zip(self.mu.iter()).map(|(p, m)| p - m));
        let q = forward_solve(&self.chol11, &diff).norm_squared();
        let ln_det_half = Self::ln_det_chol(&self.chol11);
        Ok(Self::generator_density(
            self.generator,
            q,
            x_dim as f64,
            ln_det_half,
        ))
    }

    /// Univariate marginal density of coordinate `i`.
    pub fn coordinate_marginal_density(&self, i: usize, v: f64) -> f64 {
        let s = self.sigma[(i, i)].sqrt();
        let z = (v - self.mu[i]) / s;
        Self::generator_density(self.generator, z * z, 1.0, s.ln())
    }

    /// Univariate marginal cdf of coordinate `i` (used by goodness-of-fit
    /// checks on sampler output).
    pub fn coordinate_marginal_cdf(&self, i: usize, v: f64) -> f64 {
        let z = (v - self.mu[i]) / self.sigma[(i, i)].sqrt();
        match self.generator {
            GeneratorKind::Normal => crate::special::norm_cdf(z),
            GeneratorKind::StudentT { dof } => crate::special::student_t_cdf(z, dof),
        }
    }

    /// Radius r such that the baseline puts mass below `tail` outside the
    /// centered ellipsoid of that radius, in units of the largest marginal
    /// scale. Drives integration-box sizing: normal tails close like
    /// exp(-r^2/2), Student-t tails like (1 + r^2/dof)^(-dof/2).
    pub fn tail_radius(&self, tail: f64) -> f64 {
        match self.generator {
            GeneratorKind::Normal => (-2.0 * tail.ln()).sqrt().max(10.0),
            GeneratorKind::StudentT { dof } => {
                (dof * (tail.powf(-2.0 / dof) - 1.0)).sqrt().max(10.0)
            }
        }
    }

    /// Half-width of a coordinate box that contains all but ~`tail` of the
    /// mass, including the location offset.
    pub fn box_half_width(&self, tail: f64) -> f64 {
        let spread = self
            .sigma
            .diagonal()
            .iter()
            .fold(0.0f64, |m, &v| m.max(v))
            .sqrt();
        let center = self.mu.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let d_adjust = (self.dim() as f64).sqrt();
        center + self.tail_radius(tail) * spread * d_adjust
    }
}

/// Forward substitution L y = b for lower-triangular L. Hand-rolled so the
/// flop order is fixed: negating b negates y exactly, which the central
/// symmetry of the density relies on in tests.
fn forward_solve(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = b.len();
    let mut y = DVector::zeros(n);
    for i in 0..n {
        let mut acc = b[i];
        for j in 0..i {
            acc -= l[(i, j)] * y[j];
        }
        y[i] = acc / l[(i, i)];
    }
    y
}
