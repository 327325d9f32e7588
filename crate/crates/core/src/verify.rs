//! The property-check battery: normalization, marginal invariance of the
//! conditioning block, distributional symmetry of W, and sampler/density
//! agreement -- each packaged as a `CheckReport` with an explicit statistic
//! and threshold. Also houses the fuzz corpora and the planted negative
//! controls that demonstrate the battery has power, not just passes.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::elliptical::{EllipticalBaseline, GeneratorKind};
use crate::error::{Error, Result};
use crate::exec;
use crate::modulation::{HFunction, OddMap, SecDensity, SymmetricCdf};
use crate::params::{demo_sets, ParamSet};
use crate::quadrature::adaptive_gk;
use crate::sampler::{baseline_sample, sec_sample};
use crate::special::{
    chi2_quantile, ks_critical, ks_critical_two_sample, ks_statistic, ks_statistic_two_sample,
};

/// Outcome of one check: `passed` holds exactly when
/// `statistic <= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check_name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
    pub runtime_ms: u128,
}

impl CheckReport {
    fn timed(name: String, threshold: f64, run: impl FnOnce() -> Result<f64>) -> Result<Self> {
        let start = Instant::now();
        let statistic = run()?;
        Ok(CheckReport {
            check_name: name,
            statistic,
            threshold,
            passed: statistic <= threshold,
            runtime_ms: start.elapsed().as_millis(),
        })
    }

    /// CSV row without the runtime column (wall-clock is not reproducible
    /// and every emitted file must be byte-stable under fixed inputs).
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.check_name, self.statistic, self.threshold, self.passed
        )
    }
}

/// CSV payload for a battery run.
pub fn battery_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check_name,statistic,threshold,passed\n");
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// How to check that the density integrates to one.
#[derive(Debug, Clone, Copy)]
pub enum NormalizationMethod {
    /// Nested adaptive quadrature over a tail-bounded box (d = 2 only).
    Quad2D,
    /// E_{f0}[2 G0(w(V))] estimated from baseline draws; works in any
    /// dimension. Statistic |estimate - 1|, threshold 4 standard errors.
    MonteCarloRatio { n: usize, seed: u64 },
}

/// Geometric ladder of breakpoints around `center` so adaptive panels never
/// step over a unit-scale feature inside a very wide box.
fn ladder(center: f64, scale: f64, half_width: f64) -> Vec<f64> {
    let mut cuts = vec![center];
    let mut v = scale;
    while v < half_width * 2.0 {
        cuts.push(center - v);
        cuts.push(center + v);
        v *= 2.0;
    }
    cuts
}

/// Nested adaptive integral of `f(x, y)` over the box that carries all but
/// ~1e-8 of the baseline mass (bivariate baselines).
pub(crate) fn integrate_2d(
    f: &(impl Fn(f64, f64) -> f64 + Sync),
    b: &EllipticalBaseline,
) -> Result<f64> {
    let half = b.box_half_width(5e-9);
    let sx = b.sigma()[(0, 0)].sqrt();
    let sy = b.conditional_moments().sigma22_1[(0, 0)].sqrt();
    let beta = b.conditional_moments().beta[(0, 0)];
    let beta0 = b.conditional_moments().beta0[0];
    let outer_cuts = ladder(b.mu()[0], sx, half);
    let inner = |x: f64| -> f64 {
        let m = beta0 + beta * x;
        let cuts = ladder(m, sy, half);
        adaptive_gk(|y| f(x, y), -half, half, &cuts, 1e-11, 1e-10, 60)
            .expect("inner quadrature over a smooth conditional slice")
    };
    adaptive_gk(inner, -half, half, &outer_cuts, 1e-9, 1e-9, 60)
}

/// Checks that the modulated density integrates to one.
pub fn check_normalization(s: &SecDensity, method: NormalizationMethod) -> Result<CheckReport> {
    let b = s.baseline();
    match method {
        NormalizationMethod::Quad2D => {
            if b.dim() != 2 {
                return Err(Error::UnsupportedCase(
                    "Quad2D normalization requires d = 2".into(),
                ));
            }
            CheckReport::timed(format!("{}/normalization_quad2d", s.label()), 1e-6, || {
                let integral = integrate_2d(&|x, y| s.density(&[x], &[y]).expect("dims fixed"), b)?;
                Ok((integral - 1.0).abs())
            })
        }
        NormalizationMethod::MonteCarloRatio { n, seed } => {
            let start = Instant::now();
            let draws = baseline_sample(b, n, seed)?;
            let values: Vec<f64> = draws
                .rows()
                .map(|v| 2.0 * s.g0().cdf(s.w_point(v)))
                .collect();
            let (mean, se) = crate::sampler::mean_se(&values);
            let statistic = (mean - 1.0).abs();
            let threshold = 4.0 * se;
            Ok(CheckReport {
                check_name: format!("{}/normalization_mc_ratio", s.label()),
                statistic,
                threshold,
                passed: statistic <= threshold,
                runtime_ms: start.elapsed().as_millis(),
            })
        }
    }
}

/// Default x grid for the marginal-invariance quadrature.
pub fn default_x_grid(x_dim: usize) -> Vec<Vec<f64>> {
    [-3.0, -1.0, 0.0, 1.0, 3.0]
        .iter()
        .map(|&g| vec![g; x_dim])
        .collect()
}

/// Integrates the joint over y at fixed grid points x and compares against
/// the baseline X-marginal; the perturbation must leave it untouched.
/// Quadrature version, scalar Y block.
pub fn check_marginal_invariance(s: &SecDensity, x_grid: &[Vec<f64>]) -> Result<CheckReport> {
    let b = s.baseline();
    if b.y_dim() != 1 {
        return Err(Error::UnsupportedCase(
            "quadrature marginal invariance requires a scalar Y block".into(),
        ));
    }
    let threshold = match b.generator() {
        GeneratorKind::Normal => 1e-8,
        GeneratorKind::StudentT { .. } => 1e-6,
    };
    let half = b.box_half_width(1e-12);
    let sy = b.conditional_moments().sigma22_1[(0, 0)].sqrt();
    CheckReport::timed(
        format!("{}/marginal_invariance", s.label()),
        threshold,
        || {
            let mut worst: f64 = 0.0;
            for x in x_grid {
                if x.len() != b.x_dim() {
                    return Err(Error::Dimension {
                        expected: b.x_dim(),
                        got: x.len(),
                    });
                }
                let m = b.conditional_moments().mean_given_x(x)[0];
                let cuts = ladder(m, sy, half);
                let integrated = adaptive_gk(
                    |y| s.density(x, &[y]).expect("dims fixed"),
                    -half,
                    half,
                    &cuts,
                    1e-12,
                    1e-12,
                    60,
                )?;
                let marginal = b.x_marginal_density(x)?;
                worst = worst.max((integrated - marginal).abs());
            }
            Ok(worst)
        },
    )
}

/// Sampled marginal-invariance check usable for any m: each X coordinate of
/// the modulated sample is tested (KS, 0.1% level) against the corresponding
/// baseline coordinate marginal.
pub fn check_marginal_invariance_sampled(
    s: &SecDensity,
    n: usize,
    seed: u64,
) -> Result<CheckReport> {
    let b = s.baseline();
    let threshold = ks_critical(0.001, n);
    CheckReport::timed(
        format!("{}/marginal_invariance_ks", s.label()),
        threshold,
        || {
            let batch = sec_sample(s, n, seed)?;
            let mut worst: f64 = 0.0;
            for j in 0..b.x_dim() {
                let col = batch.column(j);
                let d = ks_statistic(&col, |v| b.coordinate_marginal_cdf(j, v));
                worst = worst.max(d);
            }
            Ok(worst)
        },
    )
}

const SIGN_THRESHOLDS: [f64; 5] = [0.1, 0.25, 0.5, 1.0, 2.0];

fn sign_symmetry_statistic(w: &[f64]) -> f64 {
    let n = w.len() as f64;
    let mut worst: f64 = 0.0;
    for t in SIGN_THRESHOLDS {
        let above = w.iter().filter(|&&v| v > t).count() as f64 / n;
        let below = w.iter().filter(|&&v| v < -t).count() as f64 / n;
        worst = worst.max((above - below).abs());
    }
    worst
}

/// Distributional symmetry of W = w(V) under the baseline: a sign-balance
/// statistic over fixed thresholds plus a two-sample KS between one half of
/// the sample and the negated other half.
pub fn check_w_symmetry(s: &SecDensity, n: usize, seed: u64) -> Result<Vec<CheckReport>> {
    if n < 100_000 {
        return Err(Error::InvalidParameter(
            "w-symmetry check needs n >= 100000".into(),
        ));
    }
    let start = Instant::now();
    let draws = baseline_sample(s.baseline(), n, seed)?;
    let w: Vec<f64> = draws.rows().map(|v| s.w_point(v)).collect();

    let sign_stat = sign_symmetry_statistic(&w);
    let sign_thr = 5.0 * (0.25 / n as f64).sqrt();
    let sign = CheckReport {
        check_name: format!("{}/w_symmetry_sign", s.label()),
        statistic: sign_stat,
        threshold: sign_thr,
        passed: sign_stat <= sign_thr,
        runtime_ms: start.elapsed().as_millis(),
    };

    let start_ks = Instant::now();
    let half = n / 2;
    let a = &w[..half];
    let neg_b: Vec<f64> = w[half..].iter().map(|v| -v).collect();
    let ks_stat = ks_statistic_two_sample(a, &neg_b);
    let ks_thr = ks_critical_two_sample(0.001, a.len(), neg_b.len());
    let ks = CheckReport {
        check_name: format!("{}/w_symmetry_ks", s.label()),
        statistic: ks_stat,
        threshold: ks_thr,
        passed: ks_stat <= ks_thr,
        runtime_ms: start_ks.elapsed().as_millis(),
    };
    Ok(vec![sign, ks])
}

const AGREEMENT_CELLS: usize = 40;
const AGREEMENT_LO: f64 = -4.0;
const AGREEMENT_HI: f64 = 4.0;

/// Chi-square agreement between a large modulated sample and quadrature cell
/// masses on a 40 x 40 grid over [-4, 4]^2, with an extra bucket for the
/// outside mass; cells whose expected count falls below 5 are merged into it.
pub fn check_sampler_density_agreement(s: &SecDensity, n: usize, seed: u64) -> Result<CheckReport> {
    if s.baseline().dim() != 2 {
        return Err(Error::UnsupportedCase(
            "sampler agreement requires d = 2".into(),
        ));
    }
    if n < 200_000 {
        return Err(Error::InvalidParameter(
            "sampler agreement needs n >= 200000".into(),
        ));
    }
    let start = Instant::now();
    let cells = AGREEMENT_CELLS;
    let cw = (AGREEMENT_HI - AGREEMENT_LO) / cells as f64;

    let batch = sec_sample(s, n, seed)?;
    let mut counts = vec![0u64; cells * cells];
    let mut outside: u64 = 0;
    for r in batch.rows() {
        let (x, y) = (r[0], r[1]);
        let span = AGREEMENT_LO..AGREEMENT_HI;
        if !span.contains(&x) || !span.contains(&y) {
            outside += 1;
            continue;
        }
        let ix = (((x - AGREEMENT_LO) / cw) as usize).min(cells - 1);
        let iy = (((y - AGREEMENT_LO) / cw) as usize).min(cells - 1);
        counts[ix * cells + iy] += 1;
    }

    let masses = exec::map_indexed(cells * cells, |idx| {
        let ix = idx / cells;
        let iy = idx % cells;
        let x0 = AGREEMENT_LO + ix as f64 * cw;
        let y0 = AGREEMENT_LO + iy as f64 * cw;
        let inner = |x: f64| {
            adaptive_gk(
                |y| s.density(&[x], &[y]).expect("dims fixed"),
                y0,
                y0 + cw,
                &[],
                1e-13,
                1e-9,
                30,
            )
            .expect("cell quadrature is smooth")
        };
        adaptive_gk(inner, x0, x0 + cw, &[], 1e-12, 1e-9, 30).expect("cell quadrature is smooth")
    });

    let total_inside: f64 = masses.iter().sum();
    let nf = n as f64;
    let mut chi2 = 0.0;
    let mut kept = 0usize;
    let mut merged_count = outside as f64;
    let mut merged_mass = (1.0 - total_inside).max(0.0);
    for (idx, &mass) in masses.iter().enumerate() {
        let expected = nf * mass;
        if expected < 5.0 {
            merged_count += counts[idx] as f64;
            merged_mass += mass;
        } else {
            let diff = counts[idx] as f64 - expected;
            chi2 += diff * diff / expected;
            kept += 1;
        }
    }
    let merged_expected = nf * merged_mass;
    if merged_expected > 0.0 {
        let diff = merged_count - merged_expected;
        chi2 += diff * diff / merged_expected;
    }
    let df = kept as f64; // kept cells + merged bucket - 1
    let threshold = chi2_quantile(0.999, df);
    Ok(CheckReport {
        check_name: format!("{}/sampler_density_chi2", s.label()),
        statistic: chi2,
        threshold,
        passed: chi2 <= threshold,
        runtime_ms: start.elapsed().as_millis(),
    })
}

// ---------------------------------------------------------------------------
// negative controls

/// The parameter set the planted controls run on (generic coefficients,
/// correlation strong enough to give the broken statistic real power).
fn control_set() -> SecDensity {
    demo_sets()[0]
        .build()
        .expect("demo_a is valid")
        .with_label("control")
}

/// w with h deliberately applied to y instead of x. For correlated baselines
/// this destroys the symmetry of W; the sign check must fail on it.
fn w_broken(s: &SecDensity, x: &[f64], y: &[f64]) -> f64 {
    let cond = s.baseline().conditional_moments();
    let mean = cond.mean_given_x(x);
    let residual =
        nalgebra::DVector::from_iterator(y.len(), y.iter().zip(mean.iter()).map(|(a, b)| a - b));
    let arg = if s.standardized() {
        cond.whiten(&residual)
    } else {
        residual
    };
    s.odd().eval(arg.as_slice()) * s.h().eval(y)
}

/// Planted control: the sign-symmetry check run on the broken w. The
/// returned report is expected to FAIL (passed = false); a battery that
/// accepts it has no power.
pub fn control_broken_w(n: usize, seed: u64) -> Result<CheckReport> {
    let s = control_set();
    let start = Instant::now();
    let draws = baseline_sample(s.baseline(), n, seed)?;
    let w: Vec<f64> = draws
        .rows()
        .map(|v| w_broken(&s, &v[..1], &v[1..]))
        .collect();
    let stat = sign_symmetry_statistic(&w);
    let thr = 5.0 * (0.25 / n as f64).sqrt();
    Ok(CheckReport {
        check_name: "control/broken_w_sign".into(),
        statistic: stat,
        threshold: thr,
        passed: stat <= thr,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// Planted control: normalization with the symmetric G0 replaced by a
/// shifted (asymmetric) distribution function. Expected to FAIL.
pub fn control_asymmetric_g0() -> Result<CheckReport> {
    let s = control_set();
    let b = s.baseline().clone();
    CheckReport::timed(
        "control/asymmetric_g0_normalization".into(),
        1e-6,
        move || {
            let integral = integrate_2d(
                &|x, y| {
                    let w = s.w(&[x], &[y]).expect("dims fixed");
                    let point = [x, y];
                    2.0 * b.density(&point).expect("dims fixed") * crate::special::norm_cdf(w - 0.5)
                },
                &b,
            )?;
            Ok((integral - 1.0).abs())
        },
    )
}

// ---------------------------------------------------------------------------
// fuzz corpora

fn fuzz_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from_le_bytes(*b"fuzzcorp"));
    rng
}

fn pick_g0(rng: &mut ChaCha8Rng) -> SymmetricCdf {
    match rng.random_range(0..3u8) {
        0 => SymmetricCdf::StandardNormal,
        1 => SymmetricCdf::StandardCauchy,
        _ => SymmetricCdf::Logistic,
    }
}

fn pick_generator(rng: &mut ChaCha8Rng) -> GeneratorKind {
    if rng.random_range(0.0..1.0) < 0.6 {
        GeneratorKind::Normal
    } else {
        // dof below 3 would blow the quadrature boxes past +-10^3 for no
        // extra coverage
        GeneratorKind::StudentT {
            dof: rng.random_range(3.0..10.0),
        }
    }
}

fn pick_rational_h(rng: &mut ChaCha8Rng) -> HFunction {
    let (b1, b2) = if rng.random_range(0.0..1.0) < 0.3 {
        (0.0, 0.0)
    } else {
        let b2: f64 = rng.random_range(0.1..2.0);
        // |b1| < 2 sqrt(b2) keeps the denominator root-free
        let b1 = rng.random_range(-0.9..0.9) * 2.0 * b2.sqrt();
        (b1, b2)
    };
    HFunction::Rational {
        a1: rng.random_range(-2.0..2.0),
        a2: rng.random_range(-2.0..2.0),
        b1,
        b2,
    }
}

/// Random valid bivariate parameter sets: correlation in (-0.95, 0.95), both
/// generators, all three G0 choices, rational coefficients inside the
/// positivity region plus the named h members.
pub fn fuzz_param_sets(count: usize, seed: u64) -> Vec<ParamSet> {
    let mut rng = fuzz_rng(seed);
    (0..count)
        .map(|i| {
            let rho = rng.random_range(-0.95..0.95);
            let h = match rng.random_range(0..10u8) {
                0 => HFunction::Constant(rng.random_range(0.5..2.0)),
                1 => HFunction::Linear(rng.random_range(0.5..2.0)),
                2 => HFunction::AlphaAbs(rng.random_range(0.25..1.5)),
                3 => HFunction::CosineInverted { rho },
                _ => pick_rational_h(&mut rng),
            };
            ParamSet {
                id: format!("fuzz_{i:02}"),
                rho,
                generator: pick_generator(&mut rng),
                g0: pick_g0(&mut rng),
                h,
                c1: rng.random_range(-2.0..2.0),
                c2: rng.random_range(0.0..2.0),
                c3: rng.random_range(-1.0..1.0),
                standardized: rng.random_range(0.0..1.0) < 0.5,
            }
        })
        .collect()
}

/// Random multivariate-Y configurations (d in {3, 4}, m = 2) with random
/// positive definite scale matrices and nonzero locations, exercising the
/// vector-residual odd maps.
pub fn fuzz_multivariate_sets(count: usize, seed: u64) -> Result<Vec<SecDensity>> {
    let mut rng = fuzz_rng(seed ^ 0x6d76);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let d = 3 + (i % 2);
        let m = 2;
        let mut a = nalgebra::DMatrix::<f64>::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                a[(r, c)] = crate::special::norm_quantile(rng.random_range(0.0..1.0f64));
            }
        }
        let sigma = &a * a.transpose() + nalgebra::DMatrix::identity(d, d) * 0.75;
        let mu: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let baseline = EllipticalBaseline::new(mu, sigma, pick_generator(&mut rng), m)?;
        let odd = if i % 2 == 0 {
            OddMap::LinearForm(vec![
                rng.random_range(0.3..1.5),
                rng.random_range(-1.5..-0.3),
            ])
        } else {
            OddMap::SumOddCubic(vec![rng.random_range(0.3..1.5), rng.random_range(0.3..1.5)])
        };
        let set = SecDensity::new(
            baseline,
            pick_g0(&mut rng),
            pick_rational_h(&mut rng),
            odd,
            rng.random_range(0.0..1.0) < 0.5,
        )?
        .with_label(format!("mv_{i:02}"));
        out.push(set);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// battery driver

#[derive(Debug, Clone)]
pub struct BatteryOptions {
    pub seed: u64,
    pub w_symmetry_n: usize,
    pub mc_ratio_n: usize,
    /// Run the (expensive) chi-square sampler agreement per set.
    pub sampler_check: bool,
    pub sampler_n: usize,
    /// Append the planted failing controls.
    pub negative_controls: bool,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        BatteryOptions {
            seed: 7_654_321,
            w_symmetry_n: 200_000,
            mc_ratio_n: 1_000_000,
            sampler_check: false,
            sampler_n: 500_000,
            negative_controls: false,
        }
    }
}

/// Runs the applicable checks on every set. Bivariate sets get the
/// quadrature normalization and marginal invariance; higher-dimensional ones
/// the Monte Carlo ratio and the sampled KS marginal check; all get the
/// W-symmetry pair.
pub fn run_battery(sets: &[SecDensity], opts: &BatteryOptions) -> Result<Vec<CheckReport>> {
    let per_set = exec::map_indexed(sets.len(), |i| -> Result<Vec<CheckReport>> {
        let s = &sets[i];
        let seed = opts.seed.wrapping_add(1000 * i as u64);
        let mut reports = Vec::new();
        if s.baseline().dim() == 2 {
            reports.push(check_normalization(s, NormalizationMethod::Quad2D)?);
            reports.push(check_marginal_invariance(s, &default_x_grid(1))?);
        } else {
            reports.push(check_normalization(
                s,
                NormalizationMethod::MonteCarloRatio {
                    n: opts.mc_ratio_n,
                    seed,
                },
            )?);
            reports.push(check_marginal_invariance_sampled(
                s,
                opts.w_symmetry_n,
                seed.wrapping_add(1),
            )?);
        }
        reports.extend(check_w_symmetry(
            s,
            opts.w_symmetry_n,
            seed.wrapping_add(2),
        )?);
        if opts.sampler_check && s.baseline().dim() == 2 {
            reports.push(check_sampler_density_agreement(
                s,
                opts.sampler_n,
                seed.wrapping_add(3),
            )?);
        }
        Ok(reports)
    });

    let mut all = Vec::new();
    for r in per_set {
        all.extend(r?);
    }
    if opts.negative_controls {
        all.push(control_broken_w(
            opts.w_symmetry_n,
            opts.seed.wrapping_add(999),
        )?);
        all.push(control_asymmetric_g0()?);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo(idx: usize) -> SecDensity {
        demo_sets()[idx].build().unwrap()
    }

    #[test]
    fn report_invariant_passed_iff_within_threshold() {
        let r = CheckReport::timed("x".into(), 1.0, || Ok(0.5)).unwrap();
        assert!(r.passed);
        let r = CheckReport::timed("x".into(), 1.0, || Ok(1.5)).unwrap();
        assert!(!r.passed);
        // the tie counts as a pass
        let r = CheckReport::timed("x".into(), 1.0, || Ok(1.0)).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn normalization_null_modulation() {
        // w == 0 reduces to the baseline normalization
        let mut set = demo_sets()[0].clone();
        set.c1 = 0.0;
        set.c2 = 0.0;
        set.c3 = 0.0;
        let s = set.build().unwrap();
        let r = check_normalization(&s, NormalizationMethod::Quad2D).unwrap();
        assert!(r.statistic <= 1e-8, "statistic {}", r.statistic);
    }

    #[test]
    fn normalization_demo_sets_quad() {
        for idx in [0, 3] {
            let s = demo(idx);
            let r = check_normalization(&s, NormalizationMethod::Quad2D).unwrap();
            assert!(r.passed, "{}: {}", r.check_name, r.statistic);
        }
    }

    #[test]
    fn normalization_routes_cross_check() {
        // the quadrature and Monte Carlo ratio routes agree on the same set
        let s = demo(0);
        let quad = check_normalization(&s, NormalizationMethod::Quad2D).unwrap();
        let mc = check_normalization(
            &s,
            NormalizationMethod::MonteCarloRatio {
                n: 500_000,
                seed: 8,
            },
        )
        .unwrap();
        assert!(quad.passed, "quad: {}", quad.statistic);
        assert!(mc.passed, "mc: {} vs {}", mc.statistic, mc.threshold);
    }

    #[test]
    fn normalization_multivariate_mc() {
        let sets = fuzz_multivariate_sets(2, 99).unwrap();
        for s in &sets {
            let r = check_normalization(
                s,
                NormalizationMethod::MonteCarloRatio {
                    n: 1_000_000,
                    seed: 5,
                },
            )
            .unwrap();
            assert!(
                r.passed,
                "{}: {} > {}",
                r.check_name, r.statistic, r.threshold
            );
        }
    }

    #[test]
    fn marginal_invariance_demo_sets() {
        let r = check_marginal_invariance(&demo(0), &default_x_grid(1)).unwrap();
        assert!(r.passed, "normal: {} > {}", r.statistic, r.threshold);
        assert!(r.threshold == 1e-8);
        let r = check_marginal_invariance(&demo(3), &default_x_grid(1)).unwrap();
        assert!(r.passed, "student-t: {} > {}", r.statistic, r.threshold);
        assert!(r.threshold == 1e-6);
    }

    #[test]
    fn marginal_invariance_null_modulation_is_pure_marginalization() {
        // with w == 0 the integral over y is the bare baseline
        // marginalization, converged to the last digit
        for idx in [0, 3] {
            let mut set = demo_sets()[idx].clone();
            set.c1 = 0.0;
            set.c2 = 0.0;
            set.c3 = 0.0;
            let s = set.build().unwrap();
            let r = check_marginal_invariance(&s, &default_x_grid(1)).unwrap();
            assert!(r.statistic <= 1e-15, "{}: {}", r.check_name, r.statistic);
        }
    }

    #[test]
    fn w_symmetry_passes_and_control_fails() {
        let reports = check_w_symmetry(&demo(0), 200_000, 11).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert!(
                r.passed,
                "{}: {} > {}",
                r.check_name, r.statistic, r.threshold
            );
        }
        // the planted break has ~50x the threshold on the same sample size
        let control = control_broken_w(200_000, 11).unwrap();
        assert!(
            !control.passed,
            "broken w slipped through: {}",
            control.statistic
        );
        assert!(control.statistic > 5.0 * control.threshold);
    }

    #[test]
    fn asymmetric_g0_control_fails() {
        let r = control_asymmetric_g0().unwrap();
        assert!(!r.passed);
        assert!(r.statistic > 0.05, "shifted G0 statistic {}", r.statistic);
    }

    #[test]
    fn w_symmetry_multivariate() {
        for s in fuzz_multivariate_sets(2, 3).unwrap() {
            for r in check_w_symmetry(&s, 150_000, 17).unwrap() {
                assert!(
                    r.passed,
                    "{}: {} > {}",
                    r.check_name, r.statistic, r.threshold
                );
            }
        }
    }

    #[test]
    fn fuzz_sets_are_valid_and_deterministic() {
        let a = fuzz_param_sets(20, 42);
        let b = fuzz_param_sets(20, 42);
        assert_eq!(a, b);
        for set in &a {
            set.build()
                .unwrap_or_else(|e| panic!("{} invalid: {e}", set.id));
        }
        let c = fuzz_param_sets(20, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn small_battery_runs_clean() {
        let sets: Vec<SecDensity> = fuzz_param_sets(4, 7)
            .iter()
            .map(|p| p.build().unwrap())
            .collect();
        let opts = BatteryOptions {
            w_symmetry_n: 120_000,
            ..Default::default()
        };
        let reports = run_battery(&sets, &opts).unwrap();
        assert_eq!(reports.len(), 4 * 4);
        for r in &reports {
            assert!(
                r.passed,
                "{}: {} > {}",
                r.check_name, r.statistic, r.threshold
            );
        }
        let csv = battery_csv(&reports);
        assert!(csv.starts_with("check_name,"));
        assert_eq!(csv.lines().count(), reports.len() + 1);
    }

    #[test]
    fn battery_with_controls_reports_failures() {
        let sets = vec![demo(5)];
        let opts = BatteryOptions {
            w_symmetry_n: 120_000,
            negative_controls: true,
            ..Default::default()
        };
        let reports = run_battery(&sets, &opts).unwrap();
        let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.passed).collect();
        assert_eq!(failed.len(), 2);
        assert!(failed.iter().all(|r| r.check_name.starts_with("control/")));
    }
}
