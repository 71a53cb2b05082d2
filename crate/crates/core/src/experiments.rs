//! Average-vs-limit experiments.
//!
//! One side walks the orbit: `p_j(n) = a^{jn} x` maintained by repeated
//! multiplication with per-step fundamental-domain reduction (entries stay
//! in `[0,1)`, so float error does not accumulate over millions of steps),
//! accumulating `(1/N) sum_n prod_j f_j(p_j(n))`. The other side estimates
//! the limit integral over Haar-distributed tuples `(y_1, ..., y_k)` with
//! `y_i` uniform on `N^i/Gamma^i`, evaluating
//! `prod_{j=1}^{k+1} f_j(x prod_i y_i^{C(j,i)})`.
//!
//! Monte Carlo sampling is split into fixed-size chunks; chunk `c` owns the
//! ChaCha stream `(seed, c)` and partial sums are combined in chunk order,
//! so results are bit-identical for any worker count, with or without the
//! `parallel` feature.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ergodicity::{
    skew_translation_is_ergodic_with, translation_is_ergodic, StructureConstants,
};
use crate::group::UniMatrix;
use crate::nilmanifold::{haar_sample, reduce, TestFunction};
use crate::scalar::{Exact, Scalar};
use crate::star_group::{star_coord_len, StarElement};
use crate::Error;

pub const SCHEMA_VERSION: u32 = 1;
const CHUNK_SIZE: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    MonteCarlo,
    LatticeRule,
    TensorGrid,
}

/// Arithmetic mode for the orbit loop. Exact mode carries the radical
/// entries through every step and converts to floats only at function
/// evaluation; it is slow and meant for cross-validation at small `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Float,
    Exact,
}

/// Full description of one average-vs-limit experiment.
#[derive(Clone)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub a: UniMatrix<Exact>,
    pub x: UniMatrix<Exact>,
    pub functions: Vec<TestFunction>,
    pub n_steps: u64,
    pub checkpoints: Vec<u64>,
    pub m_samples: u64,
    pub estimator: Estimator,
    /// Points per axis for the tensor-grid estimator and for cube
    /// integrals; 0 picks a default from `m_samples`.
    pub grid: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn class(&self) -> usize {
        self.dimension - 1
    }

    pub fn validate(&self) -> Result<(), Error> {
        let k = self.class();
        if self.dimension < 2 || self.dimension > 6 {
            return Err(Error::BadConfig(format!(
                "dimension {} outside supported range 2..=6",
                self.dimension
            )));
        }
        if self.functions.len() != k + 1 {
            return Err(Error::BadConfig(format!(
                "need {} test functions for dimension {}, got {}",
                k + 1,
                self.dimension,
                self.functions.len()
            )));
        }
        for f in &self.functions {
            if f.dim() != self.dimension {
                return Err(Error::BadConfig(
                    "test function dimension mismatch".into(),
                ));
            }
        }
        if self.n_steps == 0 || self.m_samples == 0 {
            return Err(Error::BadConfig(
                "n_steps and m_samples must be >= 1".into(),
            ));
        }
        if self.a.dim() != self.dimension || self.x.dim() != self.dimension {
            return Err(Error::BadConfig("matrix dimension mismatch".into()));
        }
        if self.estimator == Estimator::TensorGrid && k > 2 {
            return Err(Error::TensorGridUnsupported(k));
        }
        Ok(())
    }

    /// Geometrically spaced checkpoints `1, 2, 4, ..., n_steps`.
    pub fn default_checkpoints(n_steps: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut c = 1u64;
        while c < n_steps {
            out.push(c);
            c *= 2;
        }
        out.push(n_steps);
        out
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(v: ComplexValue) -> Self {
        Complex64::new(v.re, v.im)
    }
}

/// Deterministic work counters; wall-clock time is deliberately not part
/// of the report so equal seeds yield byte-identical artifacts.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Work {
    pub orbit_steps: u64,
    pub samples: u64,
    pub function_evals: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeAverageTrace {
    pub value: ComplexValue,
    /// Partial averages at the requested checkpoints.
    pub checkpoints: Vec<(u64, ComplexValue)>,
    pub work: Work,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: ComplexValue,
    /// Monte-Carlo standard error of the mean; 0 for the deterministic
    /// estimators, which set the flag instead.
    pub stderr: f64,
    pub deterministic: bool,
    pub work: Work,
}

/// The non-conventional time average along the orbit of `x`.
///
/// Maintains `p_j = a^{jn} x` via `p_j <- b_j p_j` with `b_j = a^j`
/// precomputed, reducing every step; evaluation happens on the reduced
/// coordinates, so the result only depends on the cosets.
pub fn time_average<S: Scalar>(
    a: &UniMatrix<S>,
    x: &UniMatrix<S>,
    functions: &[TestFunction],
    n_steps: u64,
    checkpoints: &[u64],
) -> TimeAverageTrace {
    let k1 = functions.len();
    let steps: Vec<UniMatrix<S>> = (1..=k1 as i64).map(|j| a.int_pow(j)).collect();
    let mut points: Vec<(UniMatrix<S>, Vec<S>)> = (0..k1)
        .map(|_| {
            let r = reduce(x);
            (r.point, r.coords)
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut marks = Vec::with_capacity(checkpoints.len());
    let mut float_coords = vec![0.0f64; crate::group::coord_len(a.dim())];
    let mut evals = 0u64;
    for n in 0..n_steps {
        let mut term = Complex64::new(1.0, 0.0);
        for (f, (_, coords)) in functions.iter().zip(&points) {
            for (dst, src) in float_coords.iter_mut().zip(coords) {
                *dst = src.to_f64();
            }
            term *= f.eval_coords(&float_coords);
            evals += 1;
        }
        acc += term;
        let done = n + 1;
        if checkpoints.contains(&done) {
            marks.push((done, ComplexValue::from(acc / done as f64)));
        }
        if done < n_steps {
            for (b, p) in steps.iter().zip(points.iter_mut()) {
                let r = reduce(&b.mul(&p.0));
                *p = (r.point, r.coords);
            }
        }
    }
    TimeAverageTrace {
        value: ComplexValue::from(acc / n_steps as f64),
        checkpoints: marks,
        work: Work {
            orbit_steps: n_steps,
            samples: 0,
            function_evals: evals,
        },
    }
}

/// One integrand evaluation of the limit formula at the tuple `y`.
fn limit_point(
    x: &UniMatrix<f64>,
    functions: &[TestFunction],
    y: &StarElement<f64>,
) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    for (idx, f) in functions.iter().enumerate() {
        let j = (idx + 1) as i64;
        let point = x.mul(&y.poly_eval(j));
        term *= f.eval_coords(&reduce(&point).coords);
    }
    term
}

#[derive(Clone, Copy, Default)]
struct ChunkSums {
    sum: Complex64,
    sum_re2: f64,
    sum_im2: f64,
    count: u64,
}

impl ChunkSums {
    fn absorb(&mut self, z: Complex64) {
        self.sum += z;
        self.sum_re2 += z.re * z.re;
        self.sum_im2 += z.im * z.im;
        self.count += 1;
    }

    fn merge(mut self, other: &ChunkSums) -> ChunkSums {
        self.sum += other.sum;
        self.sum_re2 += other.sum_re2;
        self.sum_im2 += other.sum_im2;
        self.count += other.count;
        self
    }
}

fn run_chunk(
    cfg: &ExperimentConfig,
    x: &UniMatrix<f64>,
    chunk: u64,
    total: u64,
) -> ChunkSums {
    let n = cfg.dimension;
    let k = cfg.class();
    let lo = chunk * CHUNK_SIZE;
    let hi = (lo + CHUNK_SIZE).min(total);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chunk + 1);
    let mut sums = ChunkSums::default();
    for _ in lo..hi {
        let components: Vec<UniMatrix<f64>> = (1..=k)
            .map(|level| haar_sample(n, level, &mut rng).expect("level in range"))
            .collect();
        let y = StarElement::new(components).expect("haar samples respect levels");
        sums.absorb(limit_point(x, &cfg.functions, &y));
    }
    sums
}

fn finish_estimate(sums: ChunkSums, deterministic: bool, evals_per_sample: u64) -> LimitEstimate {
    let m = sums.count.max(1) as f64;
    let mean = sums.sum / m;
    let stderr = if deterministic || sums.count < 2 {
        0.0
    } else {
        let var_re = ((sums.sum_re2 - sums.sum.re * sums.sum.re / m) / (m - 1.0)).max(0.0);
        let var_im = ((sums.sum_im2 - sums.sum.im * sums.sum.im / m) / (m - 1.0)).max(0.0);
        ((var_re + var_im) / m).sqrt()
    };
    LimitEstimate {
        value: ComplexValue::from(mean),
        stderr,
        deterministic,
        work: Work {
            orbit_steps: 0,
            samples: sums.count,
            function_evals: sums.count * evals_per_sample,
        },
    }
}

/// Monte-Carlo estimator with the sequential chunk schedule.
pub fn monte_carlo_serial(cfg: &ExperimentConfig) -> LimitEstimate {
    let x = cfg.x.to_float();
    let chunks = cfg.m_samples.div_ceil(CHUNK_SIZE);
    let sums = (0..chunks)
        .map(|c| run_chunk(cfg, &x, c, cfg.m_samples))
        .fold(ChunkSums::default(), |acc, s| acc.merge(&s));
    finish_estimate(sums, false, cfg.functions.len() as u64)
}

/// Monte-Carlo estimator with rayon over chunks; partial sums are merged
/// in chunk order, so the value is identical to the serial schedule.
#[cfg(feature = "parallel")]
pub fn monte_carlo_parallel(cfg: &ExperimentConfig) -> LimitEstimate {
    use rayon::prelude::*;
    let x = cfg.x.to_float();
    let chunks = cfg.m_samples.div_ceil(CHUNK_SIZE);
    let partials: Vec<ChunkSums> = (0..chunks)
        .into_par_iter()
        .map(|c| run_chunk(cfg, &x, c, cfg.m_samples))
        .collect();
    let sums = partials
        .iter()
        .fold(ChunkSums::default(), |acc, s| acc.merge(s));
    finish_estimate(sums, false, cfg.functions.len() as u64)
}

fn monte_carlo(cfg: &ExperimentConfig) -> LimitEstimate {
    #[cfg(feature = "parallel")]
    {
        monte_carlo_parallel(cfg)
    }
    #[cfg(not(feature = "parallel"))]
    {
        monte_carlo_serial(cfg)
    }
}

/// Korobov generating vector `(1, a, a^2, ...) mod m` with `a` adjusted to
/// be coprime to `m`.
fn korobov_vector(m: u64, dim: usize) -> Vec<u64> {
    let mut a = 1571u64 % m.max(1);
    if a < 2 {
        a = 1;
    }
    while m > 1 && num_integer::gcd(a, m) != 1 {
        a += 1;
    }
    let mut z = Vec::with_capacity(dim);
    let mut cur = 1u64;
    for _ in 0..dim {
        z.push(cur);
        cur = (cur as u128 * a as u128 % m.max(1) as u128) as u64;
    }
    z
}

/// Rank-1 lattice rule: deterministic equal-weight cubature at the points
/// `{ m z / M }`; no statistical error estimate.
pub fn lattice_rule(cfg: &ExperimentConfig) -> LimitEstimate {
    let n = cfg.dimension;
    let x = cfg.x.to_float();
    let dims = star_coord_len(n);
    let m = cfg.m_samples;
    let z = korobov_vector(m, dims);
    let mut sums = ChunkSums::default();
    let mut coords = vec![0.0f64; dims];
    for i in 0..m {
        for (slot, zj) in coords.iter_mut().zip(&z) {
            let prod = (i as u128 * *zj as u128) % m as u128;
            *slot = prod as f64 / m as f64;
        }
        let y = star_from_coords_f64(n, &coords);
        sums.absorb(limit_point(&x, &cfg.functions, &y));
    }
    finish_estimate(sums, true, cfg.functions.len() as u64)
}

fn star_from_coords_f64(n: usize, v: &[f64]) -> StarElement<f64> {
    crate::star_group::star_from_coords(n, v)
}

/// Full tensor-product midpoint grid over the tuple coordinates; only
/// feasible for nilpotency class <= 2 (at most four axes).
pub fn tensor_grid(cfg: &ExperimentConfig) -> Result<LimitEstimate, Error> {
    let k = cfg.class();
    if k > 2 {
        return Err(Error::TensorGridUnsupported(k));
    }
    let n = cfg.dimension;
    let x = cfg.x.to_float();
    let dims = star_coord_len(n);
    let per_axis = if cfg.grid >= 2 {
        cfg.grid
    } else {
        ((cfg.m_samples as f64).powf(1.0 / dims as f64).floor() as usize).max(2)
    };
    let mut index = vec![0usize; dims];
    let mut coords = vec![0.0f64; dims];
    let mut sums = ChunkSums::default();
    loop {
        for (c, &i) in coords.iter_mut().zip(&index) {
            *c = (i as f64 + 0.5) / per_axis as f64;
        }
        let y = star_from_coords_f64(n, &coords);
        sums.absorb(limit_point(&x, &cfg.functions, &y));
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == dims {
                return Ok(finish_estimate(sums, true, cfg.functions.len() as u64));
            }
            index[axis] += 1;
            if index[axis] < per_axis {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
}

/// Estimate the limit integral with the configured estimator.
pub fn limit_integral(cfg: &ExperimentConfig) -> Result<LimitEstimate, Error> {
    cfg.validate()?;
    match cfg.estimator {
        Estimator::MonteCarlo => Ok(monte_carlo(cfg)),
        Estimator::LatticeRule => Ok(lattice_rule(cfg)),
        Estimator::TensorGrid => tensor_grid(cfg),
    }
}

/// Run the orbit side of the experiment in the requested arithmetic mode.
pub fn run_time_average(cfg: &ExperimentConfig, mode: Mode) -> Result<TimeAverageTrace, Error> {
    cfg.validate()?;
    let checkpoints = if cfg.checkpoints.is_empty() {
        ExperimentConfig::default_checkpoints(cfg.n_steps)
    } else {
        cfg.checkpoints.clone()
    };
    Ok(match mode {
        Mode::Float => time_average(
            &cfg.a.to_float(),
            &cfg.x.to_float(),
            &cfg.functions,
            cfg.n_steps,
            &checkpoints,
        ),
        Mode::Exact => time_average(&cfg.a, &cfg.x, &cfg.functions, cfg.n_steps, &checkpoints),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Hypothesis {
    pub translation_ergodic: bool,
    pub translation_witness: Option<Vec<i64>>,
    pub skew_ergodic: bool,
    pub skew_witness: Option<Vec<i64>>,
    pub torus_dim_base: usize,
    pub torus_dim_star: usize,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub re: f64,
    pub im: f64,
    /// Distance of the partial average from the limit estimate (from the
    /// final average when no limit is available).
    pub abs_diff_running: f64,
}

/// Machine-readable result of a compare run. Pass iff
/// `abs_difference <= tolerance + 3 * stderr`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub mode: Mode,
    pub hypothesis: Hypothesis,
    pub time_average: ComplexValue,
    pub checkpoints: Vec<Checkpoint>,
    pub limit_estimate: ComplexValue,
    pub stderr: f64,
    pub deterministic_estimator: bool,
    pub abs_difference: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub work: Work,
}

/// Ergodicity hypothesis checks for the experiment's `a` and `x`.
pub fn check_hypothesis(cfg: &ExperimentConfig) -> Result<Hypothesis, Error> {
    let base = translation_is_ergodic(&cfg.a)?;
    let star_sc = StructureConstants::star_group(cfg.dimension)?;
    let skew = skew_translation_is_ergodic_with(&star_sc, &cfg.a, &cfg.x)?;
    let mut warnings = Vec::new();
    if !base.ergodic {
        warnings.push(
            "translation by a is not ergodic; the limit formula need not hold".to_string(),
        );
    }
    if !skew.ergodic {
        warnings.push(
            "skew translation at this x is not ergodic; x may be exceptional".to_string(),
        );
    }
    Ok(Hypothesis {
        translation_ergodic: base.ergodic,
        translation_witness: base.witness.map(|c| c.0),
        skew_ergodic: skew.ergodic,
        skew_witness: skew.witness.map(|c| c.0),
        torus_dim_base: base.torus_dim,
        torus_dim_star: skew.torus_dim,
        warnings,
    })
}

/// Run both sides and fill the report.
pub fn compare(cfg: &ExperimentConfig, tolerance: f64, mode: Mode) -> Result<Report, Error> {
    cfg.validate()?;
    let hypothesis = check_hypothesis(cfg)?;
    let trace = run_time_average(cfg, mode)?;
    let limit = limit_integral(cfg)?;
    let avg: Complex64 = trace.value.into();
    let lim: Complex64 = limit.value.into();
    let abs_difference = (avg - lim).norm();
    let verdict = if abs_difference <= tolerance + 3.0 * limit.stderr {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let checkpoints = trace
        .checkpoints
        .iter()
        .map(|(n, v)| Checkpoint {
            n: *n,
            re: v.re,
            im: v.im,
            abs_diff_running: (Complex64::from(*v) - lim).norm(),
        })
        .collect();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command: "compare".to_string(),
        seed: cfg.seed,
        mode,
        hypothesis,
        time_average: trace.value,
        checkpoints,
        limit_estimate: limit.value,
        stderr: limit.stderr,
        deterministic_estimator: limit.deterministic,
        abs_difference,
        tolerance,
        verdict,
        work: Work {
            orbit_steps: trace.work.orbit_steps,
            samples: limit.work.samples,
            function_evals: trace.work.function_evals + limit.work.function_evals,
        },
    })
}

/// Checkpoint trace as CSV (columns: n, re, im, abs_diff_running).
pub fn trace_csv(checkpoints: &[Checkpoint]) -> String {
    let mut out = String::from("n,re,im,abs_diff_running\n");
    for c in checkpoints {
        out.push_str(&format!("{},{},{},{}\n", c.n, c.re, c.im, c.abs_diff_running));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::positions;
    use crate::nilmanifold::coset_eq;

    fn heis_exact(p: Exact, q: Exact, r: Exact) -> UniMatrix<Exact> {
        let mut m = UniMatrix::identity(3);
        m.set_entry(0, 1, p);
        m.set_entry(1, 2, q);
        m.set_entry(0, 2, r);
        m
    }

    fn lesigne_config(functions: Vec<TestFunction>, n_steps: u64, m_samples: u64) -> ExperimentConfig {
        ExperimentConfig {
            dimension: 3,
            a: heis_exact(Exact::sqrt(2), Exact::sqrt(3), Exact::default()),
            x: UniMatrix::identity(3),
            functions,
            n_steps,
            checkpoints: vec![],
            m_samples,
            estimator: Estimator::MonteCarlo,
            grid: 0,
            seed: 7,
        }
    }

    fn horizontal(dim: usize, m1: i64) -> TestFunction {
        let d = crate::group::coord_len(dim);
        let mut m = vec![0i64; d];
        m[0] = m1;
        TestFunction::character(dim, m).unwrap()
    }

    #[test]
    fn constant_functions_average_to_one() {
        let cfg = lesigne_config(
            (0..3)
                .map(|_| TestFunction::constant(3, Complex64::new(1.0, 0.0)))
                .collect(),
            100,
            64,
        );
        let trace = run_time_average(&cfg, Mode::Float).unwrap();
        assert!((Complex64::from(trace.value) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for (_, v) in &trace.checkpoints {
            assert!((Complex64::from(*v) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        let limit = limit_integral(&cfg).unwrap();
        assert!((Complex64::from(limit.value) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(limit.stderr < 1e-12);
    }

    #[test]
    fn circle_rotation_character_average_is_small() {
        // k = 1: rotation by sqrt2 on the circle; geometric-series bound
        // |sum exp(2 pi i n sqrt2)| / N <= 2 / (N |1 - e^{2 pi i sqrt2}|).
        let mut a = UniMatrix::<Exact>::identity(2);
        a.set_entry(0, 1, Exact::sqrt(2));
        let cfg = ExperimentConfig {
            dimension: 2,
            a,
            x: UniMatrix::identity(2),
            functions: vec![
                TestFunction::character(2, vec![1]).unwrap(),
                TestFunction::constant(2, Complex64::new(1.0, 0.0)),
            ],
            n_steps: 20_000,
            checkpoints: vec![],
            m_samples: 16,
            estimator: Estimator::MonteCarlo,
            grid: 0,
            seed: 1,
        };
        let trace = run_time_average(&cfg, Mode::Float).unwrap();
        let bound = 2.0
            / (cfg.n_steps as f64
                * (1.0
                    - Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 2f64.sqrt()))
                .norm());
        let got = Complex64::from(trace.value).norm();
        assert!(got <= bound * 1.001, "average {got} above bound {bound}");
    }

    #[test]
    fn orbit_points_match_exact_powers() {
        // After n steps the float trajectory coset-equals a^{jn} x computed
        // exactly; drift below 1e-9.
        let a = heis_exact(Exact::sqrt(2), Exact::sqrt(3), Exact::default());
        let x = heis_exact(
            Exact::from_ratio(1, 2),
            Exact::from_ratio(1, 3),
            Exact::from_ratio(1, 5),
        );
        let af = a.to_float();
        let steps: Vec<UniMatrix<f64>> = (1..=3i64).map(|j| af.int_pow(j)).collect();
        let mut points: Vec<UniMatrix<f64>> = vec![reduce(&x.to_float()).point; 3];
        let n_steps = 100i64;
        for _ in 0..n_steps {
            for (b, p) in steps.iter().zip(points.iter_mut()) {
                *p = reduce(&b.mul(p)).point;
            }
        }
        for (idx, p) in points.iter().enumerate() {
            let j = (idx + 1) as i64;
            let exact = reduce(&a.int_pow(j * n_steps).mul(&x));
            for (c_float, c_exact) in reduce(p).coords.iter().zip(&exact.coords) {
                assert!(
                    (c_float - c_exact.to_f64()).abs() < 1e-9,
                    "trajectory drift too large"
                );
            }
        }
    }

    #[test]
    fn resonant_heisenberg_matches_limit() {
        // frequencies (1, 1, -1) on the first superdiagonal coordinate:
        // sum j m_j = 0, so both sides equal exp(2 pi i x1) = 1 at x = e.
        let fs = vec![horizontal(3, 1), horizontal(3, 1), horizontal(3, -1)];
        let cfg = lesigne_config(fs, 3000, 3000);
        let report = compare(&cfg, 5e-3, Mode::Float).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!((report.time_average.re - 1.0).abs() < 1e-9);
        assert!((report.limit_estimate.re - 1.0).abs() < 1e-9);
        assert!(report.hypothesis.translation_ergodic);
        assert!(report.hypothesis.skew_ergodic);
    }

    #[test]
    fn nonresonant_heisenberg_both_sides_vanish() {
        let fs = vec![horizontal(3, 1), horizontal(3, 1), horizontal(3, 1)];
        let cfg = lesigne_config(fs, 20_000, 20_000);
        let report = compare(&cfg, 5e-3, Mode::Float).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        let avg = Complex64::new(report.time_average.re, report.time_average.im).norm();
        let lim = Complex64::new(report.limit_estimate.re, report.limit_estimate.im).norm();
        assert!(avg < 5e-3, "time average {avg}");
        assert!(lim < 3.0 * report.stderr + 1e-3, "limit {lim}");
    }

    #[test]
    fn estimators_agree_on_smooth_function() {
        let f = TestFunction::new(
            3,
            vec![
                (vec![0, 0, 0], Complex64::new(0.5, 0.0)),
                (vec![1, -2, 0], Complex64::new(1.0, 0.0)),
            ],
            0,
        )
        .unwrap();
        let ones = TestFunction::constant(3, Complex64::new(1.0, 0.0));
        let mut cfg = lesigne_config(vec![f, ones.clone(), ones], 10, 20_000);
        let mc = limit_integral(&cfg).unwrap();
        cfg.estimator = Estimator::TensorGrid;
        cfg.grid = 12;
        let grid = limit_integral(&cfg).unwrap();
        assert!(grid.deterministic);
        let d = (Complex64::from(mc.value) - Complex64::from(grid.value)).norm();
        assert!(d < 4.0 * mc.stderr + 1e-2, "estimators disagree by {d}");
        cfg.estimator = Estimator::LatticeRule;
        let lat = limit_integral(&cfg).unwrap();
        assert!(lat.deterministic);
        let d = (Complex64::from(mc.value) - Complex64::from(lat.value)).norm();
        assert!(d < 4.0 * mc.stderr + 1e-2, "lattice rule off by {d}");
    }

    #[test]
    fn tensor_grid_rejects_deep_groups() {
        let ones: Vec<TestFunction> = (0..5)
            .map(|_| TestFunction::constant(5, Complex64::new(1.0, 0.0)))
            .collect();
        let cfg = ExperimentConfig {
            dimension: 5,
            a: UniMatrix::identity(5),
            x: UniMatrix::identity(5),
            functions: ones,
            n_steps: 1,
            checkpoints: vec![],
            m_samples: 16,
            estimator: Estimator::TensorGrid,
            grid: 0,
            seed: 0,
        };
        assert!(matches!(
            limit_integral(&cfg),
            Err(Error::TensorGridUnsupported(4))
        ));
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let fs = vec![horizontal(3, 1), horizontal(3, 1), horizontal(3, -1)];
        let cfg = lesigne_config(fs, 500, 5000);
        let r1 = compare(&cfg, 5e-3, Mode::Float).unwrap();
        let r2 = compare(&cfg, 5e-3, Mode::Float).unwrap();
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_serial_estimates_are_identical() {
        let fs = vec![horizontal(3, 2), horizontal(3, -1), horizontal(3, 0)];
        let cfg = lesigne_config(fs, 10, 30_000);
        let serial = monte_carlo_serial(&cfg);
        let parallel = monte_carlo_parallel(&cfg);
        assert_eq!(serial.value, parallel.value);
        assert_eq!(serial.stderr, parallel.stderr);
    }

    #[test]
    fn stderr_scales_like_inverse_sqrt() {
        let f = TestFunction::character(3, vec![0, 0, 1]).unwrap();
        let ones = TestFunction::constant(3, Complex64::new(1.0, 0.0));
        let mut cfg = lesigne_config(vec![f, ones.clone(), ones], 10, 4000);
        let small = limit_integral(&cfg).unwrap();
        cfg.m_samples = 16_000;
        let large = limit_integral(&cfg).unwrap();
        let ratio = small.stderr / large.stderr;
        assert!(
            (ratio - 2.0).abs() < 0.4,
            "quadrupling samples should halve stderr, ratio {ratio}"
        );
    }

    #[test]
    fn shift_by_lattice_preserves_both_sides() {
        let fs = vec![horizontal(3, 1), horizontal(3, 1), horizontal(3, -1)];
        let mut cfg = lesigne_config(fs, 400, 4000);
        cfg.x = heis_exact(
            Exact::from_ratio(1, 2),
            Exact::from_ratio(1, 3),
            Exact::default(),
        );
        let base = compare(&cfg, 5e-3, Mode::Float).unwrap();
        let mut shifted = cfg.clone();
        let mut gamma = UniMatrix::<Exact>::identity(3);
        gamma.set_entry(0, 1, Exact::from_int(2));
        gamma.set_entry(0, 2, Exact::from_int(-1));
        shifted.x = cfg.x.mul(&gamma);
        assert!(coset_eq(&cfg.x, &shifted.x));
        let moved = compare(&shifted, 5e-3, Mode::Float).unwrap();
        let da = (Complex64::from(base.time_average) - Complex64::from(moved.time_average)).norm();
        let dl =
            (Complex64::from(base.limit_estimate) - Complex64::from(moved.limit_estimate)).norm();
        assert!(da < 1e-9, "time average moved by {da}");
        assert!(dl < 1e-9, "limit moved by {dl}");
    }

    #[test]
    fn exact_mode_matches_float_mode() {
        let fs = vec![horizontal(3, 1), horizontal(3, 1), horizontal(3, -1)];
        let mut cfg = lesigne_config(fs, 200, 16);
        cfg.x = heis_exact(
            Exact::from_ratio(1, 5),
            Exact::from_ratio(2, 7),
            Exact::default(),
        );
        let float = run_time_average(&cfg, Mode::Float).unwrap();
        let exact = run_time_average(&cfg, Mode::Exact).unwrap();
        let d = (Complex64::from(float.value) - Complex64::from(exact.value)).norm();
        assert!(d < 1e-9, "modes disagree by {d}");
    }

    #[test]
    fn checkpoints_default_geometric() {
        let cs = ExperimentConfig::default_checkpoints(100);
        assert_eq!(cs, vec![1, 2, 4, 8, 16, 32, 64, 100]);
        let cs = ExperimentConfig::default_checkpoints(64);
        assert_eq!(cs, vec![1, 2, 4, 8, 16, 32, 64]);
    }

    #[test]
    fn csv_trace_shape() {
        let rows = vec![Checkpoint {
            n: 10,
            re: 0.5,
            im: -0.25,
            abs_diff_running: 0.1,
        }];
        let csv = trace_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,re,im,abs_diff_running"));
        assert_eq!(lines.next(), Some("10,0.5,-0.25,0.1"));
    }
}
