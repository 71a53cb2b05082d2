//! Ergodicity of translations, decided exactly.
//!
//! A nil-translation is ergodic iff the rotation it induces on the maximal
//! torus (the quotient by the derived group and the lattice) is ergodic,
//! and a torus rotation is ergodic iff no nonzero integer character kills
//! it. The module computes the torus data — bracket table, derived
//! subalgebra, abelianization projection, torus lattice — in exact
//! rational arithmetic for either the unitriangular group or the star
//! group over it, then reduces the ergodicity question to an integer
//! kernel computation over the radical coefficients.
//!
//! Two interpolation tricks keep everything exact. The bracket of two
//! chart basis vectors is the `t^2` coefficient of the chart coordinates
//! of the group commutator curve `c(t)`, a polynomial of bounded degree,
//! so finitely many rational samples determine it. Log coordinates of an
//! element `g` are the `m`-linear coefficient of the chart coordinates of
//! `g^m`: in any polynomial chart with identity differential the higher
//! chart corrections contribute only `m^2` and beyond.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::group::UniMatrix;
use crate::linalg::{self, RatMatrix};
use crate::scalar::{Exact, Scalar};
use crate::star_group::{
    skew_generator, star_coord_len, star_coords, star_from_coords, StarElement,
};
use crate::Error;

const MAX_FIT_DEGREE: usize = 64;

/// Which group the structure constants describe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    /// The unitriangular group `U_n` itself.
    Unitriangular,
    /// The star group over `U_n`.
    Star,
}

/// Integer character of the maximal torus, as a frequency vector against
/// the torus lattice basis. Zero iff trivial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character(pub Vec<i64>);

impl Character {
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }
}

/// Exact torus data of a group: bracket table on the chart basis, derived
/// subalgebra, abelianization projection, and the torus lattice written in
/// the projected coordinates.
pub struct StructureConstants {
    kind: GroupKind,
    n: usize,
    dim: usize,
    brackets: Vec<Vec<Vec<BigRational>>>,
    derived: RatMatrix,
    projection: RatMatrix,
    lattice_basis: RatMatrix,
    lattice_inv_t: RatMatrix,
}

impl StructureConstants {
    pub fn unitriangular(n: usize) -> Result<Self, Error> {
        Self::build(GroupKind::Unitriangular, n)
    }

    pub fn star_group(n: usize) -> Result<Self, Error> {
        Self::build(GroupKind::Star, n)
    }

    fn build(kind: GroupKind, n: usize) -> Result<Self, Error> {
        let dim = match kind {
            GroupKind::Unitriangular => crate::group::coord_len(n),
            GroupKind::Star => star_coord_len(n),
        };
        let mut brackets = vec![vec![Vec::new(); dim]; dim];
        for u in 0..dim {
            for v in 0..dim {
                if u == v {
                    brackets[u][v] = vec![BigRational::zero(); dim];
                } else if v < u {
                    let r: Vec<BigRational> =
                        brackets[v][u].iter().map(|x| -x.clone()).collect();
                    brackets[u][v] = r;
                } else {
                    brackets[u][v] = bracket_from_curve(kind, n, dim, u, v)?;
                }
            }
        }

        // derived subalgebra: rational row space of all brackets
        let mut rows: RatMatrix = Vec::new();
        for u in 0..dim {
            for v in (u + 1)..dim {
                if brackets[u][v].iter().any(|x| !x.is_zero()) {
                    rows.push(brackets[u][v].clone());
                }
            }
        }
        let pivots = linalg::rref(&mut rows);
        let derived = rows;

        // projection onto the free (non-pivot) coordinates: each RREF row
        // removes its pivot coordinate's contribution
        let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
        let torus_dim = free.len();
        let mut projection: RatMatrix = vec![vec![BigRational::zero(); dim]; torus_dim];
        for (row, &f) in free.iter().enumerate() {
            projection[row][f] = BigRational::one();
            for (w, &p) in derived.iter().zip(&pivots) {
                projection[row][p] = -w[f].clone();
            }
        }

        // torus lattice: log coordinates of the elementary lattice
        // generators are exactly the unit chart vectors (their power curves
        // are linear), so the generator images are the projection columns
        let gen_rows: RatMatrix = (0..dim)
            .map(|j| (0..torus_dim).map(|r| projection[r][j].clone()).collect())
            .collect();
        let denom = gen_rows
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let int_rows: Vec<Vec<BigInt>> = gen_rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| (x * BigRational::from(denom.clone())).to_integer())
                    .collect()
            })
            .collect();
        let hnf = linalg::hermite_basis(&int_rows);
        if hnf.len() != torus_dim {
            return Err(Error::BadConfig(format!(
                "torus lattice rank {} below torus dimension {torus_dim}",
                hnf.len()
            )));
        }
        let lattice_basis: RatMatrix = hnf
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| BigRational::new(x.clone(), denom.clone()))
                    .collect()
            })
            .collect();
        // coordinates against the basis solve B^T c = pi(X)
        let bt: RatMatrix = (0..torus_dim)
            .map(|i| (0..torus_dim).map(|j| lattice_basis[j][i].clone()).collect())
            .collect();
        let lattice_inv_t = linalg::invert(&bt)
            .ok_or_else(|| Error::BadConfig("torus lattice basis is singular".into()))?;

        let sc = StructureConstants {
            kind,
            n,
            dim,
            brackets,
            derived,
            projection,
            lattice_basis,
            lattice_inv_t,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn group_dim(&self) -> usize {
        self.n
    }

    pub fn coord_dim(&self) -> usize {
        self.dim
    }

    pub fn torus_dim(&self) -> usize {
        self.projection.len()
    }

    pub fn bracket(&self, u: usize, v: usize) -> &[BigRational] {
        &self.brackets[u][v]
    }

    pub fn derived_dim(&self) -> usize {
        self.derived.len()
    }

    pub fn lattice_basis(&self) -> &RatMatrix {
        &self.lattice_basis
    }

    /// Bracket antisymmetry, the Jacobi identity, and annihilation of the
    /// derived subalgebra by the projection, all exact.
    pub fn validate(&self) -> Result<(), Error> {
        let dim = self.dim;
        let bad = |msg: String| Err(Error::BadConfig(msg));
        for u in 0..dim {
            for v in 0..dim {
                for (a, b) in self.brackets[u][v].iter().zip(&self.brackets[v][u]) {
                    if !(a + b).is_zero() {
                        return bad(format!("bracket antisymmetry fails at ({u},{v})"));
                    }
                }
            }
        }
        for u in 0..dim {
            for v in (u + 1)..dim {
                for w in (v + 1)..dim {
                    let mut acc = vec![BigRational::zero(); dim];
                    for (x, y, z) in [(u, v, w), (v, w, u), (w, u, v)] {
                        let inner = self.brackets[x][y].clone();
                        let term = self.bracket_vec(&inner, z);
                        for (a, t) in acc.iter_mut().zip(term) {
                            *a += t;
                        }
                    }
                    if acc.iter().any(|x| !x.is_zero()) {
                        return bad(format!("Jacobi fails at ({u},{v},{w})"));
                    }
                }
            }
        }
        for w in &self.derived {
            let img = linalg::mat_vec(&self.projection, w);
            if img.iter().any(|x| !x.is_zero()) {
                return bad("projection does not annihilate derived subalgebra".into());
            }
        }
        Ok(())
    }

    /// `[vec, e_z]` by bilinear extension of the table.
    fn bracket_vec(&self, vec: &[BigRational], z: usize) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dim];
        for (u, c) in vec.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(&self.brackets[u][z]) {
                *o += c * b;
            }
        }
        out
    }

    /// Torus coordinates of a unitriangular element: projected log
    /// coordinates expressed in the torus lattice basis, so lattice
    /// elements map to integer vectors.
    pub fn torus_coords(&self, g: &UniMatrix<Exact>) -> Vec<Exact> {
        assert_eq!(self.kind, GroupKind::Unitriangular, "wrong group kind");
        assert_eq!(g.dim(), self.n, "dimension mismatch");
        let log_coords = g.log().coords();
        self.project_to_lattice(&log_coords)
    }

    /// Torus coordinates of a star-group element; log coordinates obtained
    /// by exact polynomial fitting of the power curve.
    pub fn torus_coords_star(&self, g: &StarElement<Exact>) -> Result<Vec<Exact>, Error> {
        assert_eq!(self.kind, GroupKind::Star, "wrong group kind");
        assert_eq!(g.dim(), self.n, "dimension mismatch");
        let log_coords = star_log_coords(g)?;
        Ok(self.project_to_lattice(&log_coords))
    }

    fn project_to_lattice(&self, coords: &[Exact]) -> Vec<Exact> {
        let projected = linalg::mat_vec_exact(&self.projection, coords);
        linalg::mat_vec_exact(&self.lattice_inv_t, &projected)
    }
}

/// Coordinates of the commutator curve `c(t)` of chart basis directions
/// `u, v` at rational `t`.
fn commutator_curve(
    kind: GroupKind,
    n: usize,
    dim: usize,
    u: usize,
    v: usize,
    t: &BigRational,
) -> Vec<Exact> {
    let mut eu = vec![Exact::default(); dim];
    eu[u] = Exact::from_rational(t.clone());
    let mut ev = vec![Exact::default(); dim];
    ev[v] = Exact::from_rational(t.clone());
    match kind {
        GroupKind::Unitriangular => {
            let a = crate::nilmanifold::from_malcev(n, &eu);
            let b = crate::nilmanifold::from_malcev(n, &ev);
            crate::nilmanifold::to_malcev(&a.commutator(&b))
        }
        GroupKind::Star => {
            let a = star_from_coords(n, &eu);
            let b = star_from_coords(n, &ev);
            let c = a.star_inverse().star(&b.star_inverse()).star(&a).star(&b);
            star_coords(&c)
        }
    }
}

/// Extract one monomial coefficient of a vector-valued polynomial from
/// exact samples at the integer nodes `0..=deg`, escalating the degree
/// bound until three fresh validation nodes agree with the fit.
fn fit_coefficient<F>(
    eval: F,
    want_power: usize,
    initial_degree: usize,
) -> Result<Vec<Exact>, Error>
where
    F: Fn(i64) -> Vec<Exact>,
{
    let mut deg = initial_degree.max(want_power + 1);
    loop {
        let nodes: Vec<BigRational> = (0..=deg as i64)
            .map(|m| BigRational::from(BigInt::from(m)))
            .collect();
        let samples: Vec<Vec<Exact>> = (0..=deg as i64).map(&eval).collect();
        let lagrange = lagrange_coefficients(&nodes);
        let width = samples[0].len();
        let mut poly: Vec<Vec<Exact>> = vec![vec![Exact::default(); width]; deg + 1];
        for (sample, lag) in samples.iter().zip(&lagrange) {
            for (power, lc) in lag.iter().enumerate() {
                if lc.is_zero() {
                    continue;
                }
                for (slot, value) in sample.iter().enumerate() {
                    poly[power][slot] = poly[power][slot].clone() + value.scale(lc);
                }
            }
        }
        let ok = (1..=3).all(|extra| {
            let node = (deg + extra) as i64;
            let t = BigRational::from(BigInt::from(node));
            let actual = eval(node);
            let mut horner = vec![Exact::default(); width];
            for power in (0..=deg).rev() {
                for slot in 0..width {
                    horner[slot] = horner[slot].clone().scale(&t) + poly[power][slot].clone();
                }
            }
            horner == actual
        });
        if ok {
            return Ok(poly[want_power].clone());
        }
        deg *= 2;
        if deg > MAX_FIT_DEGREE {
            return Err(Error::DegenerateInterpolation(MAX_FIT_DEGREE));
        }
    }
}

/// Coefficient vectors of the Lagrange basis polynomials for the given
/// nodes: `out[i][p]` is the `t^p` coefficient of `l_i`.
fn lagrange_coefficients(nodes: &[BigRational]) -> Vec<Vec<BigRational>> {
    let n = nodes.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut poly = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, node) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut next = vec![BigRational::zero(); poly.len() + 1];
            for (p, c) in poly.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= c * node;
            }
            poly = next;
            denom *= &nodes[i] - node;
        }
        let inv = denom.recip();
        for c in poly.iter_mut() {
            *c *= &inv;
        }
        out.push(poly);
    }
    out
}

fn bracket_from_curve(
    kind: GroupKind,
    n: usize,
    dim: usize,
    u: usize,
    v: usize,
) -> Result<Vec<BigRational>, Error> {
    let coeff = fit_coefficient(
        |m| commutator_curve(kind, n, dim, u, v, &BigRational::from(BigInt::from(m))),
        2,
        2 * n,
    )?;
    coeff
        .into_iter()
        .map(|e| {
            if e.is_rational() {
                Ok(e.rational_part())
            } else {
                Err(Error::BadConfig("bracket coefficient is irrational".into()))
            }
        })
        .collect()
}

/// Exact log coordinates of a star-group element: the `m`-linear
/// coefficient of the chart coordinates of its `m`-th power.
pub fn star_log_coords(g: &StarElement<Exact>) -> Result<Vec<Exact>, Error> {
    let n = g.dim();
    let powers = std::cell::RefCell::new(vec![StarElement::identity(n)]);
    fit_coefficient(
        |m| {
            let mut p = powers.borrow_mut();
            while p.len() <= m as usize {
                let next = p.last().unwrap().star(g);
                p.push(next);
            }
            star_coords(&p[m as usize])
        },
        1,
        2 * n,
    )
}

/// Outcome of an ergodicity query, with a certificate when negative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErgodicVerdict {
    pub ergodic: bool,
    /// Nonzero integer character with `chi . alpha` an integer, when not
    /// ergodic.
    pub witness: Option<Character>,
    pub torus_dim: usize,
    /// Exact confirmation that the witness kills the rotation.
    pub witness_sound: Option<bool>,
}

/// A torus rotation `alpha` is ergodic iff no nonzero integer vector `m`
/// has `m . alpha` integer. The irrational coefficient rows decide the
/// kernel lattice; any kernel vector scaled by the denominator of its
/// rational pairing yields a sound witness.
pub fn rotation_is_ergodic(alpha: &[Exact]) -> (bool, Option<Character>) {
    let cols = alpha.len();
    if cols == 0 {
        return (true, None);
    }
    let mut support: Vec<u64> = Vec::new();
    for a in alpha {
        for d in a.radical_support() {
            if !support.contains(&d) {
                support.push(d);
            }
        }
    }
    support.sort_unstable();
    let rows: RatMatrix = support
        .iter()
        .map(|&d| alpha.iter().map(|a| a.coefficient(d)).collect())
        .collect();
    let kernel = if rows.is_empty() {
        (0..cols)
            .map(|i| {
                (0..cols)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect::<Vec<BigInt>>()
            })
            .collect::<Vec<_>>()
    } else {
        linalg::rational_integer_kernel(&rows, cols)
    };
    let Some(v) = kernel.first() else {
        return (true, None);
    };
    let pairing: BigRational = v
        .iter()
        .zip(alpha)
        .map(|(m, a)| BigRational::from(m.clone()) * a.rational_part())
        .fold(BigRational::zero(), |acc, x| acc + x);
    let scale = pairing.denom().clone();
    let witness: Vec<i64> = v
        .iter()
        .map(|m| (m * &scale).to_i64().expect("witness exceeds i64 range"))
        .collect();
    (false, Some(Character(witness)))
}

/// Exact soundness check: `chi . alpha` is an integer.
pub fn witness_kills_rotation(alpha: &[Exact], chi: &Character) -> bool {
    let mut acc = Exact::default();
    for (a, &m) in alpha.iter().zip(&chi.0) {
        acc = acc + a.scale(&BigRational::from(BigInt::from(m)));
    }
    acc.is_integer()
}

fn verdict_from_rotation(alpha: &[Exact], torus_dim: usize) -> ErgodicVerdict {
    let (ergodic, witness) = rotation_is_ergodic(alpha);
    let witness_sound = witness
        .as_ref()
        .map(|chi| !chi.is_trivial() && witness_kills_rotation(alpha, chi));
    ErgodicVerdict {
        ergodic,
        witness,
        torus_dim,
        witness_sound,
    }
}

/// Ergodicity of the translation by `a` on `U_n / Gamma`, via the induced
/// maximal-torus rotation.
pub fn translation_is_ergodic(a: &UniMatrix<Exact>) -> Result<ErgodicVerdict, Error> {
    let sc = StructureConstants::unitriangular(a.dim())?;
    let alpha = sc.torus_coords(a);
    Ok(verdict_from_rotation(&alpha, sc.torus_dim()))
}

/// Per-`x` ergodicity of the skew translation on the star-group quotient:
/// the generator `(a[a,x], e, ..., e)` must induce an ergodic rotation on
/// the star group's maximal torus.
pub fn skew_translation_is_ergodic(
    a: &UniMatrix<Exact>,
    x: &UniMatrix<Exact>,
) -> Result<ErgodicVerdict, Error> {
    let sc = StructureConstants::star_group(a.dim())?;
    skew_translation_is_ergodic_with(&sc, a, x)
}

/// As [`skew_translation_is_ergodic`], reusing precomputed structure
/// constants (they depend only on the dimension).
pub fn skew_translation_is_ergodic_with(
    sc: &StructureConstants,
    a: &UniMatrix<Exact>,
    x: &UniMatrix<Exact>,
) -> Result<ErgodicVerdict, Error> {
    let generator = skew_generator(a, x);
    let alpha = sc.torus_coords_star(&generator)?;
    Ok(verdict_from_rotation(&alpha, sc.torus_dim()))
}

/// Value of a character on the skew generator's torus rotation:
/// `exp(2 pi i chi . tau)`, a unit complex number.
pub fn character_at_generator(
    chi: &Character,
    sc: &StructureConstants,
    a: &UniMatrix<Exact>,
    x: &UniMatrix<Exact>,
) -> Result<Complex64, Error> {
    let generator = skew_generator(a, x);
    let tau = sc.torus_coords_star(&generator)?;
    let mut phase = Exact::default();
    for (t, &m) in tau.iter().zip(&chi.0) {
        phase = phase + t.scale(&BigRational::from(BigInt::from(m)));
    }
    Ok(Complex64::from_polar(
        1.0,
        2.0 * std::f64::consts::PI * phase.to_f64(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::positions;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn heis_exact(p: Exact, q: Exact, r: Exact) -> UniMatrix<Exact> {
        let mut m = UniMatrix::identity(3);
        m.set_entry(0, 1, p);
        m.set_entry(1, 2, q);
        m.set_entry(0, 2, r);
        m
    }

    fn random_star(n: usize, rng: &mut StdRng) -> StarElement<Exact> {
        let components = (1..n)
            .map(|lvl| {
                let mut m = UniMatrix::identity(n);
                for (i, j) in positions(n) {
                    if j - i >= lvl {
                        m.set_entry(
                            i,
                            j,
                            Exact::from_ratio(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=2)),
                        );
                    }
                }
                m
            })
            .collect();
        StarElement::new(components).unwrap()
    }

    fn pos_index(n: usize, i: usize, j: usize) -> usize {
        positions(n).iter().position(|&p| p == (i, j)).unwrap()
    }

    #[test]
    fn u3_bracket_table_matches_matrix_oracle() {
        // [X12, X23] = X13; derived algebra = span{X13}; torus dim 2.
        let sc = StructureConstants::unitriangular(3).unwrap();
        let u = pos_index(3, 0, 1);
        let v = pos_index(3, 1, 2);
        let w = pos_index(3, 0, 2);
        for (idx, c) in sc.bracket(u, v).iter().enumerate() {
            if idx == w {
                assert!(c.is_one());
            } else {
                assert!(c.is_zero());
            }
        }
        assert_eq!(sc.derived_dim(), 1);
        assert_eq!(sc.torus_dim(), 2);

        // oracle: direct matrix bracket of elementary basis matrices
        for uu in 0..3 {
            for vv in 0..3 {
                let (i1, j1) = positions(3)[uu];
                let (i2, j2) = positions(3)[vv];
                let mut a = crate::group::Nilpotent::<Exact>::zero(3);
                a.set_entry(i1, j1, Exact::from_int(1));
                let mut b = crate::group::Nilpotent::<Exact>::zero(3);
                b.set_entry(i2, j2, Exact::from_int(1));
                let ab = a.mul(&b);
                let ba = b.mul(&a);
                let direct: Vec<BigRational> = positions(3)
                    .iter()
                    .map(|&(i, j)| {
                        (ab.entry(i, j).clone() - ba.entry(i, j).clone()).rational_part()
                    })
                    .collect();
                for (got, want) in sc.bracket(uu, vv).iter().zip(&direct) {
                    assert_eq!(got, want, "bracket mismatch at ({uu},{vv})");
                }
            }
        }
    }

    #[test]
    fn u2_is_abelian() {
        let sc = StructureConstants::unitriangular(2).unwrap();
        assert_eq!(sc.derived_dim(), 0);
        assert_eq!(sc.torus_dim(), 1);
    }

    #[test]
    fn star_group_torus_is_full_rank() {
        // Heisenberg star group: 4 coordinates, derived dimension 1,
        // torus dimension 3, lattice of full rank.
        let sc = StructureConstants::star_group(3).unwrap();
        assert_eq!(sc.coord_dim(), 4);
        assert_eq!(sc.derived_dim(), 1);
        assert_eq!(sc.torus_dim(), 3);
        assert_eq!(sc.lattice_basis().len(), 3);
        sc.validate().unwrap();
    }

    #[test]
    fn torus_coords_examples() {
        let sc = StructureConstants::unitriangular(3).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let mut gamma = UniMatrix::identity(3);
            for (i, j) in positions(3) {
                gamma.set_entry(i, j, Exact::from_int(rng.gen_range(-3i64..=3)));
            }
            let c = sc.torus_coords(&gamma);
            assert!(c.iter().all(|v| v.is_integer()), "lattice not integral");
        }
        let c = sc.torus_coords(&UniMatrix::identity(3));
        assert!(c.iter().all(|v| v.is_zero()));
        // superdiagonal (sqrt2, sqrt3) projects to exactly that pair
        let a = heis_exact(Exact::sqrt(2), Exact::sqrt(3), Exact::default());
        let c = sc.torus_coords(&a);
        assert_eq!(c[0], Exact::sqrt(2));
        assert_eq!(c[1], Exact::sqrt(3));
    }

    #[test]
    fn torus_coords_is_homomorphism_mod_integers() {
        let mut rng = StdRng::seed_from_u64(5);
        let sc = StructureConstants::unitriangular(4).unwrap();
        for _ in 0..50 {
            let mut g = UniMatrix::identity(4);
            let mut h = UniMatrix::identity(4);
            for (i, j) in positions(4) {
                g.set_entry(
                    i,
                    j,
                    Exact::from_ratio(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=3)),
                );
                h.set_entry(
                    i,
                    j,
                    Exact::from_ratio(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=3)),
                );
            }
            let sum: Vec<Exact> = sc
                .torus_coords(&g)
                .into_iter()
                .zip(sc.torus_coords(&h))
                .map(|(a, b)| a + b)
                .collect();
            let prod = sc.torus_coords(&g.mul(&h));
            for (p, s) in prod.iter().zip(&sum) {
                assert!((p.clone() - s.clone()).is_integer(), "not a hom mod Z");
            }
        }
    }

    #[test]
    fn star_torus_coords_is_homomorphism_mod_integers() {
        let mut rng = StdRng::seed_from_u64(7);
        let sc = StructureConstants::star_group(3).unwrap();
        for _ in 0..30 {
            let g = random_star(3, &mut rng);
            let h = random_star(3, &mut rng);
            let sum: Vec<Exact> = sc
                .torus_coords_star(&g)
                .unwrap()
                .into_iter()
                .zip(sc.torus_coords_star(&h).unwrap())
                .map(|(a, b)| a + b)
                .collect();
            let prod = sc.torus_coords_star(&g.star(&h)).unwrap();
            for (p, s) in prod.iter().zip(&sum) {
                assert!(
                    (p.clone() - s.clone()).is_integer(),
                    "star torus coords not a hom mod Z"
                );
            }
        }
    }

    #[test]
    fn rotation_ergodicity_examples() {
        let (erg, w) = rotation_is_ergodic(&[Exact::sqrt(2), Exact::sqrt(3)]);
        assert!(erg && w.is_none());

        let alpha = [Exact::from_ratio(1, 2), Exact::from_ratio(1, 3)];
        let (erg, w) = rotation_is_ergodic(&alpha);
        assert!(!erg);
        let w = w.unwrap();
        assert!(!w.is_trivial());
        assert!(witness_kills_rotation(&alpha, &w));

        // alpha1 + alpha2 = 1: witness proportional to (1,1)
        let alpha = [Exact::sqrt(2), Exact::from_int(1) - Exact::sqrt(2)];
        let (erg, w) = rotation_is_ergodic(&alpha);
        assert!(!erg);
        let w = w.unwrap();
        assert!(witness_kills_rotation(&alpha, &w));
        assert_eq!(w.0[0], w.0[1]);
    }

    #[test]
    fn translation_ergodicity() {
        let a = heis_exact(Exact::sqrt(2), Exact::sqrt(3), Exact::default());
        let v = translation_is_ergodic(&a).unwrap();
        assert!(v.ergodic);
        assert_eq!(v.torus_dim, 2);

        let id = UniMatrix::identity(3);
        let v = translation_is_ergodic(&id).unwrap();
        assert!(!v.ergodic);
        assert_eq!(v.witness_sound, Some(true));

        let rational = heis_exact(
            Exact::from_ratio(1, 2),
            Exact::from_ratio(1, 3),
            Exact::default(),
        );
        let v = translation_is_ergodic(&rational).unwrap();
        assert!(!v.ergodic);
        assert_eq!(v.witness_sound, Some(true));
    }

    #[test]
    fn skew_translation_heisenberg() {
        let a = heis_exact(Exact::sqrt(2), Exact::sqrt(3), Exact::default());
        let sc = StructureConstants::star_group(3).unwrap();

        let v = skew_translation_is_ergodic_with(&sc, &a, &UniMatrix::identity(3)).unwrap();
        assert!(v.ergodic, "skew translation at x = e should be ergodic");

        let x = heis_exact(
            Exact::from_ratio(1, 2),
            Exact::from_ratio(1, 3),
            Exact::default(),
        );
        let v = skew_translation_is_ergodic_with(&sc, &a, &x).unwrap();
        assert!(v.ergodic);

        // rational a is never ergodic
        let ra = heis_exact(
            Exact::from_ratio(1, 2),
            Exact::from_ratio(1, 3),
            Exact::default(),
        );
        let v = skew_translation_is_ergodic_with(&sc, &ra, &x).unwrap();
        assert!(!v.ergodic);
        assert_eq!(v.witness_sound, Some(true));
    }

    #[test]
    fn star_log_coords_of_generator() {
        // hand value: for first component with entries (P, Q, R) the log
        // s-coordinate is R - PQ/2; the skew generator at x = e is (a, e).
        let a = heis_exact(Exact::sqrt(2), Exact::sqrt(3), Exact::default());
        let g = StarElement::from_first(a);
        let lc = star_log_coords(&g).unwrap();
        assert_eq!(lc[0], Exact::sqrt(2));
        assert_eq!(lc[1], Exact::sqrt(3));
        // R - PQ/2 = -sqrt(6)/2
        let expect = (-Exact::sqrt(6)).div_int(2);
        assert_eq!(lc[2], expect);
        assert!(lc[3].is_zero());
    }

    #[test]
    fn character_values() {
        let a = heis_exact(
            Exact::from_ratio(1, 2),
            Exact::from_ratio(1, 3),
            Exact::default(),
        );
        let x = UniMatrix::identity(3);
        let sc = StructureConstants::star_group(3).unwrap();
        let chi = Character(vec![0; sc.torus_dim()]);
        let z = character_at_generator(&chi, &sc, &a, &x).unwrap();
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // a witness character evaluates to 1 at x = e (the generator's
        // rotation pairs to an integer with it)
        let v = skew_translation_is_ergodic_with(&sc, &a, &x).unwrap();
        let chi = v.witness.unwrap();
        let z = character_at_generator(&chi, &sc, &a, &x).unwrap();
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        // characters always land on the unit circle
        let chi = Character((0..sc.torus_dim()).map(|i| i as i64 + 1).collect());
        let z = character_at_generator(&chi, &sc, &a, &x).unwrap();
        assert!((z.norm() - 1.0).abs() < 1e-12);
    }
}
