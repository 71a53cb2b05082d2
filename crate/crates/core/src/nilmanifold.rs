//! The compact quotient `N/Gamma` for `N = U_n` and `Gamma` the integer
//! unitriangular lattice: Mal'cev coordinates of the second kind,
//! reduction to the fundamental domain `[0,1)^d`, Haar sampling of each
//! `N^i/Gamma^i`, and trigonometric test functions.
//!
//! Haar measure equals Lebesgue measure in second-kind coordinates for
//! unipotent groups; the sampler/quadrature consistency tests exercise
//! that identification.

use num_complex::Complex64;
use rand::Rng;

use crate::group::{coord_len, positions, UniMatrix};
use crate::scalar::Scalar;
use crate::Error;

/// Second-kind Mal'cev coordinates: the unique `t` with
/// `g = prod_e E_e(t_e)` over [`positions`] in order.
///
/// Peeling works because positions are ordered by superdiagonal distance:
/// the leading entry of the residual tail product at position `e` is
/// exactly `t_e`.
pub fn to_malcev<S: Scalar>(g: &UniMatrix<S>) -> Vec<S> {
    let n = g.dim();
    let mut residual = g.clone();
    let mut out = Vec::with_capacity(coord_len(n));
    for (i, j) in positions(n) {
        let t = residual.entry(i, j).clone();
        let peel = UniMatrix::elementary(n, i, j, -t.clone());
        residual = peel.mul(&residual);
        out.push(t);
    }
    debug_assert!(residual.is_identity());
    out
}

pub fn from_malcev<S: Scalar>(n: usize, t: &[S]) -> UniMatrix<S> {
    assert_eq!(t.len(), coord_len(n), "coordinate length mismatch");
    let mut g = UniMatrix::identity(n);
    for ((i, j), v) in positions(n).into_iter().zip(t) {
        g = g.mul(&UniMatrix::elementary(n, i, j, v.clone()));
    }
    g
}

/// Result of reducing a group element into the fundamental domain.
pub struct Reduced<S> {
    /// Representative with all second-kind coordinates in `[0,1)`.
    pub point: UniMatrix<S>,
    /// Lattice element with `g * lattice_part = point`.
    pub lattice_part: UniMatrix<S>,
    /// Coordinates of `point`.
    pub coords: Vec<S>,
}

/// Reduce `g` modulo the integer lattice: sweep the superdiagonal distance
/// classes in ascending order, right-multiplying by integer generator
/// powers to bring each coordinate into `[0,1)`. Right multiplication by an
/// element of `N^i` shifts distance-`i` coordinates additively and leaves
/// shallower ones untouched, so one pass per distance class suffices. The
/// output depends only on the coset `g Gamma`.
pub fn reduce<S: Scalar>(g: &UniMatrix<S>) -> Reduced<S> {
    let n = g.dim();
    let mut point = g.clone();
    let mut lattice_part = UniMatrix::identity(n);
    let mut coords = to_malcev(&point);
    let pos = positions(n);
    for dist in 1..n {
        let mut moved = false;
        for (idx, &(i, j)) in pos.iter().enumerate() {
            if j - i != dist {
                continue;
            }
            let m = coords[idx].floor_int();
            if m != 0 {
                let gamma = UniMatrix::elementary(n, i, j, S::from_int(-m));
                point = point.mul(&gamma);
                lattice_part = lattice_part.mul(&gamma);
                moved = true;
            }
        }
        if moved || dist == 1 {
            coords = to_malcev(&point);
        }
    }
    Reduced {
        point,
        lattice_part,
        coords,
    }
}

/// Membership in `Gamma^i = Gamma ∩ N^i`: integer entries and the first
/// `i-1` superdiagonals zero.
pub fn lattice_level_contains<S: Scalar>(g: &UniMatrix<S>, level: usize) -> bool {
    g.is_integer_matrix() && g.lcs_degree().at_least(level)
}

/// Same coset of the integer lattice: `g^-1 h` has integer entries.
pub fn coset_eq<S: Scalar>(g: &UniMatrix<S>, h: &UniMatrix<S>) -> bool {
    g.inverse().mul(h).is_integer_matrix()
}

/// Haar sample of `N^level/Gamma^level`: coordinates at superdiagonal
/// distance `>= level` drawn i.i.d. uniform on `[0,1)`, the rest zero.
pub fn haar_sample<R: Rng + ?Sized>(
    n: usize,
    level: usize,
    rng: &mut R,
) -> Result<UniMatrix<f64>, Error> {
    if level < 1 || level > n - 1 {
        return Err(Error::LevelOutOfRange { level, class: n - 1 });
    }
    let t: Vec<f64> = positions(n)
        .into_iter()
        .map(|(i, j)| if j - i >= level { rng.gen::<f64>() } else { 0.0 })
        .collect();
    Ok(from_malcev(n, &t))
}

/// Trigonometric polynomial in fundamental-domain coordinates, with an
/// optional polynomial boundary window of smoothness order `s` on the
/// coordinates at superdiagonal distance >= 2.
#[derive(Clone, Debug)]
pub struct TestFunction {
    dim: usize,
    terms: Vec<(Vec<i64>, Complex64)>,
    window_order: u32,
}

impl TestFunction {
    pub fn new(
        dim: usize,
        terms: Vec<(Vec<i64>, Complex64)>,
        window_order: u32,
    ) -> Result<Self, Error> {
        let d = coord_len(dim);
        for (m, _) in &terms {
            if m.len() != d {
                return Err(Error::BadConfig(format!(
                    "frequency vector length {} does not match coordinate count {d}",
                    m.len()
                )));
            }
        }
        Ok(TestFunction {
            dim,
            terms,
            window_order,
        })
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let d = coord_len(dim);
        TestFunction {
            dim,
            terms: vec![(vec![0; d], c)],
            window_order: 0,
        }
    }

    /// Single character `exp(2 pi i m . t)`.
    pub fn character(dim: usize, m: Vec<i64>) -> Result<Self, Error> {
        TestFunction::new(dim, vec![(m, Complex64::new(1.0, 0.0))], 0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `sum |c_m|`, a sup-norm bound (the window never exceeds 1).
    pub fn coeff_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    fn window(&self, t: &[f64]) -> f64 {
        if self.window_order == 0 {
            return 1.0;
        }
        let mut w = 1.0;
        for ((i, j), &v) in positions(self.dim).into_iter().zip(t) {
            if j - i >= 2 {
                w *= (4.0 * v * (1.0 - v)).powi(self.window_order as i32);
            }
        }
        w
    }

    /// Evaluate at fundamental-domain coordinates (assumed in `[0,1)^d`).
    pub fn eval_coords(&self, t: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let phase: f64 = m
                .iter()
                .zip(t)
                .map(|(&mi, &ti)| mi as f64 * ti)
                .sum();
            acc += c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase);
        }
        acc * self.window(t)
    }

    /// Evaluate at a group element; factors through the coset `g Gamma`.
    pub fn eval(&self, g: &UniMatrix<f64>) -> Complex64 {
        self.eval_coords(&reduce(g).coords)
    }

    /// Deterministic tensor-product midpoint quadrature over `[0,1)^d` with
    /// `grid` points per axis. The integrand is a sum of per-axis separable
    /// terms, so the tensor sum factors exactly into per-axis sums. Pure
    /// character axes are integrated analytically (0 or 1); only windowed
    /// axes are quadratured. With no window the result is `c_0` exactly.
    pub fn cube_integral(&self, grid: usize) -> Complex64 {
        assert!(grid >= 2, "grid must have at least 2 points");
        let pos = positions(self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut factor = Complex64::new(1.0, 0.0);
            for (axis, &(i, j)) in pos.iter().enumerate() {
                let windowed = self.window_order >= 1 && j - i >= 2;
                if !windowed {
                    if m[axis] != 0 {
                        factor = Complex64::new(0.0, 0.0);
                        break;
                    }
                    continue;
                }
                let mut axis_sum = Complex64::new(0.0, 0.0);
                for l in 0..grid {
                    let t = (l as f64 + 0.5) / grid as f64;
                    let w = (4.0 * t * (1.0 - t)).powi(self.window_order as i32);
                    axis_sum += Complex64::from_polar(
                        w,
                        2.0 * std::f64::consts::PI * m[axis] as f64 * t,
                    );
                }
                factor *= axis_sum / grid as f64;
                if factor.norm() == 0.0 {
                    break;
                }
            }
            acc += c * factor;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn heis_f(p: f64, q: f64, r: f64) -> UniMatrix<f64> {
        let mut m = UniMatrix::identity(3);
        m.set_entry(0, 1, p);
        m.set_entry(1, 2, q);
        m.set_entry(0, 2, r);
        m
    }

    fn random_rational(n: usize, rng: &mut StdRng) -> UniMatrix<Exact> {
        let mut m = UniMatrix::identity(n);
        for (i, j) in positions(n) {
            m.set_entry(
                i,
                j,
                Exact::from_ratio(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=4)),
            );
        }
        m
    }

    fn random_lattice(n: usize, rng: &mut StdRng) -> UniMatrix<Exact> {
        let mut m = UniMatrix::identity(n);
        for (i, j) in positions(n) {
            m.set_entry(i, j, Exact::from_int(rng.gen_range(-3i64..=3)));
        }
        m
    }

    #[test]
    fn malcev_solves_heisenberg() {
        // Oracle: exp(t1 X12) exp(t2 X23) exp(t3 X13) multiplied out gives
        // entries (t1, t2, t3 + t1 t2), so (p,q,r) has t = (p, q, r - pq).
        let g = heis_f(2.0, 3.0, 11.0);
        let t = to_malcev(&g);
        assert_eq!(t, vec![2.0, 3.0, 11.0 - 6.0]);
        assert!(to_malcev(&UniMatrix::<f64>::identity(4))
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn malcev_round_trip() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let g = random_rational(5, &mut rng);
            let t = to_malcev(&g);
            assert_eq!(from_malcev(5, &t), g);
        }
    }

    #[test]
    fn coords_detect_lcs_level() {
        // g in N^i iff all coordinates at distance < i vanish
        let mut rng = StdRng::seed_from_u64(19);
        for _ in 0..100 {
            let g = random_rational(5, &mut rng);
            let t = to_malcev(&g);
            let deg = g.lcs_degree();
            for ((i, j), v) in positions(5).into_iter().zip(&t) {
                if !deg.at_least(j - i + 1) {
                    break;
                }
                if deg.at_least(j - i + 1) {
                    assert!(v.is_zero_entry(), "coordinate below lcs level nonzero");
                }
            }
        }
    }

    #[test]
    fn reduce_heisenberg_example() {
        // Entries (1.5, 0.25, 0.75) reduce to (0.5, 0.25, 0.75) via E12(-1).
        // Oracle: exhaustive search over small integer lattice elements for
        // a representative with coordinates in [0,1).
        let g = heis_f(1.5, 0.25, 0.75);
        let r = reduce(&g);
        let expect = heis_f(0.5, 0.25, 0.75);
        for (i, j) in positions(3) {
            assert!((r.point.entry(i, j) - expect.entry(i, j)).abs() < 1e-12);
        }
        assert!((r.lattice_part.entry(0, 1) + 1.0).abs() < 1e-12);

        let mut found = None;
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -2i64..=2 {
                    let mut gamma = UniMatrix::<f64>::identity(3);
                    gamma.set_entry(0, 1, a as f64);
                    gamma.set_entry(1, 2, b as f64);
                    gamma.set_entry(0, 2, c as f64);
                    let cand = g.mul(&gamma);
                    let t = to_malcev(&cand);
                    if t.iter().all(|&v| (0.0..1.0).contains(&v)) {
                        found = Some(cand);
                    }
                }
            }
        }
        let oracle = found.expect("exhaustive search found no representative");
        for (i, j) in positions(3) {
            assert!((r.point.entry(i, j) - oracle.entry(i, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn reduce_is_coset_invariant_and_idempotent() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let g = random_rational(4, &mut rng);
            let gamma = random_lattice(4, &mut rng);
            let r1 = reduce(&g);
            let r2 = reduce(&g.mul(&gamma));
            assert_eq!(r1.point, r2.point, "coset invariance failed");
            // in-domain points are fixed, with trivial lattice part
            let again = reduce(&r1.point);
            assert_eq!(again.point, r1.point);
            assert!(again.lattice_part.is_identity());
            // g * lattice_part = point, lattice_part integer
            assert_eq!(g.mul(&r1.lattice_part), r1.point);
            assert!(r1.lattice_part.is_integer_matrix());
            for v in &r1.coords {
                let f = v.to_f64();
                assert!((0.0..1.0).contains(&f));
            }
        }
    }

    #[test]
    fn lattice_membership_pattern() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..1000 {
            let gamma = random_lattice(5, &mut rng);
            for level in 1..=4usize {
                let member = lattice_level_contains(&gamma, level);
                let expect = gamma.lcs_degree().at_least(level);
                assert_eq!(member, expect);
            }
            let g = random_rational(5, &mut rng);
            if !g.is_integer_matrix() {
                assert!(!lattice_level_contains(&g, 1));
            }
        }
    }

    #[test]
    fn haar_sample_levels() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let level = rng.gen_range(1..=3usize);
            let s = haar_sample(4, level, &mut rng).unwrap();
            assert!(s.lcs_degree().at_least(level));
            for ((i, j), v) in positions(4).into_iter().zip(to_malcev(&s)) {
                if j - i < level {
                    assert_eq!(v, 0.0);
                } else {
                    assert!((0.0..1.0).contains(&v));
                }
            }
        }
        // top level: single coordinate
        let s = haar_sample(3, 2, &mut rng).unwrap();
        let t = to_malcev(&s);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[1], 0.0);
        assert!(haar_sample(3, 3, &mut rng).is_err());
        assert!(haar_sample(3, 0, &mut rng).is_err());
    }

    #[test]
    fn haar_sample_mean_zero_character() {
        // Monte Carlo oracle: the empirical mean of exp(2 pi i t_e) over
        // uniform t_e is 0 within ~3 sigma = 3/sqrt(2M) per component.
        let mut rng = StdRng::seed_from_u64(97);
        let m = 200_000usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in 0..m {
            let s = haar_sample(3, 1, &mut rng).unwrap();
            let t = to_malcev(&s);
            acc += Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t[0]);
        }
        let mean = acc / m as f64;
        assert!(mean.norm() < 3.0 / (m as f64).sqrt() * 1.5, "mean {mean}");
    }

    #[test]
    fn eval_constant_and_coset() {
        let f = TestFunction::constant(3, Complex64::new(1.0, 0.0));
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..100 {
            let g = random_rational(3, &mut rng).to_float();
            assert!((f.eval(&g) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        let f = TestFunction::character(3, vec![2, -1, 1]).unwrap();
        for _ in 0..100 {
            let g = random_rational(3, &mut rng).to_float();
            let gamma = random_lattice(3, &mut rng).to_float();
            let a = f.eval(&g);
            let b = f.eval(&g.mul(&gamma));
            assert!((a - b).norm() < 1e-9, "eval not coset invariant");
        }
    }

    #[test]
    fn horizontal_characters_continuous_at_boundary() {
        // Characters supported on distance-1 coordinates descend to the
        // maximal torus, hence agree across the gluing within 1e-9.
        let f = TestFunction::character(3, vec![1, -2, 0]).unwrap();
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let q: f64 = rng.gen();
            let r: f64 = rng.gen();
            let eps = 1e-12;
            let before = f.eval(&heis_f(1.0 - eps, q, r));
            let after = f.eval(&heis_f(1.0 + eps, q, r));
            assert!((before - after).norm() < 1e-9);
            let before = f.eval(&heis_f(q, 1.0 - eps, r));
            let after = f.eval(&heis_f(q, 1.0 + eps, r));
            assert!((before - after).norm() < 1e-9);
        }
    }

    #[test]
    fn cube_integral_cases() {
        // pure nonzero character integrates to 0; constant to 1
        let f = TestFunction::character(3, vec![1, 0, 3]).unwrap();
        assert_eq!(f.cube_integral(16), Complex64::new(0.0, 0.0));
        let f = TestFunction::constant(3, Complex64::new(1.0, 0.0));
        assert_eq!(f.cube_integral(16), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cube_integral_windowed_matches_axis_oracle() {
        // windowed constant, s = 2: the only non-analytic axis is the
        // central one; oracle = scalar midpoint quadrature on that axis.
        let f = TestFunction::new(
            3,
            vec![(vec![0, 0, 0], Complex64::new(1.0, 0.0))],
            2,
        )
        .unwrap();
        let grid = 64;
        let mut oracle = 0.0;
        for l in 0..grid {
            let t = (l as f64 + 0.5) / grid as f64;
            oracle += (4.0 * t * (1.0 - t)).powi(2);
        }
        oracle /= grid as f64;
        let got = f.cube_integral(grid);
        assert!((got.re - oracle).abs() < 1e-14);
        assert!(got.im.abs() < 1e-14);
        // exact integral of (4t(1-t))^2 is 8/15; midpoint at 64 points is close
        assert!((got.re - 8.0 / 15.0).abs() < 1e-3);
    }

    #[test]
    fn sampler_matches_cube_integral() {
        // sampler/measure consistency at reduced scale: Monte Carlo mean
        // over haar_sample(1) within 4/sqrt(M) * sum|c_m| of the quadrature.
        let mut rng = StdRng::seed_from_u64(41);
        let f = TestFunction::new(
            3,
            vec![
                (vec![0, 0, 0], Complex64::new(0.5, 0.0)),
                (vec![1, 0, 0], Complex64::new(0.0, 1.0)),
                (vec![0, 0, 1], Complex64::new(1.0, 0.0)),
            ],
            1,
        )
        .unwrap();
        let m = 20_000usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in 0..m {
            let s = haar_sample(3, 1, &mut rng).unwrap();
            acc += f.eval(&s);
        }
        let mean = acc / m as f64;
        let quad = f.cube_integral(128);
        let tol = 4.0 / (m as f64).sqrt() * f.coeff_norm();
        assert!((mean - quad).norm() < tol, "mean {mean} vs quad {quad}");
    }
}
