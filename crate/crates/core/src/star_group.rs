//! The star group on `N^1 x ... x N^k` whose multiplication matches the
//! coordinatewise products of the sequences `prod_j y_j^{C(i,j)}`,
//! together with the skew translation it induces and the embedding of the
//! diagonal orbit into `(N/Gamma)^{k+1}`.
//!
//! All iterated products run in ascending index order; that order is what
//! the exact intertwining test validates.

use crate::group::{positions, UniMatrix};
use crate::nilmanifold::{coset_eq, reduce};
use crate::scalar::Scalar;
use crate::Error;

/// Generalized binomial coefficient `C(n, j) = n(n-1)...(n-j+1)/j!`,
/// defined for negative `n` as well.
pub fn binomial(n: i64, j: u32) -> i64 {
    let mut num: i128 = 1;
    for l in 0..j as i128 {
        num *= n as i128 - l;
    }
    let mut den: i128 = 1;
    for l in 1..=j as i128 {
        den *= l;
    }
    i64::try_from(num / den).expect("binomial overflow")
}

/// Element of the star group: a tuple `(y_1, ..., y_k)` with
/// `y_i` in `N^i` (first `i-1` superdiagonals zero).
#[derive(Clone, PartialEq)]
pub struct StarElement<S> {
    components: Vec<UniMatrix<S>>,
}

impl<S: Scalar> std::fmt::Debug for StarElement<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.components).finish()
    }
}

impl<S: Scalar> StarElement<S> {
    pub fn new(components: Vec<UniMatrix<S>>) -> Result<Self, Error> {
        let k = components.len();
        assert!(k >= 1, "star element needs at least one component");
        let n = components[0].dim();
        if k != n - 1 {
            return Err(Error::BadConfig(format!(
                "star element over U_{n} needs {} components, got {k}",
                n - 1
            )));
        }
        for (idx, c) in components.iter().enumerate() {
            if c.dim() != n {
                return Err(Error::BadConfig("mixed dimensions in star element".into()));
            }
            if !c.lcs_degree().at_least(idx + 1) {
                return Err(Error::StarClosure {
                    component: idx + 1,
                    degree: format!("{}", c.lcs_degree()),
                });
            }
        }
        Ok(StarElement { components })
    }

    pub fn identity(n: usize) -> Self {
        StarElement {
            components: vec![UniMatrix::identity(n); n - 1],
        }
    }

    /// `(g, e, ..., e)`.
    pub fn from_first(g: UniMatrix<S>) -> Self {
        let n = g.dim();
        let mut components = vec![UniMatrix::identity(n); n - 1];
        components[0] = g;
        StarElement { components }
    }

    /// Tuple with `y` in the given slot (1-based) and identity elsewhere;
    /// requires `y` in `N^slot`.
    pub fn from_slot(n: usize, slot: usize, y: UniMatrix<S>) -> Result<Self, Error> {
        let mut components = vec![UniMatrix::identity(n); n - 1];
        components[slot - 1] = y;
        StarElement::new(components)
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn class(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &UniMatrix<S> {
        &self.components[i - 1]
    }

    pub fn components(&self) -> &[UniMatrix<S>] {
        &self.components
    }

    pub fn is_identity(&self) -> bool {
        self.components.iter().all(|c| c.is_identity())
    }

    /// Every component has integer entries: membership in the lattice
    /// `Gamma^1 x ... x Gamma^k`.
    pub fn is_lattice(&self) -> bool {
        self.components.iter().all(|c| c.is_integer_matrix())
    }

    /// `prod_{j<=i} y_j^{C(i,j)}` in ascending j, using components up to
    /// `min(i, k)`; this is the representing-vector coordinate of the tuple.
    fn partial_product(&self, i: i64) -> UniMatrix<S> {
        let mut acc = UniMatrix::identity(self.dim());
        for (j, y) in self.components.iter().enumerate() {
            let e = binomial(i, (j + 1) as u32);
            if e != 0 {
                acc = acc.mul(&y.int_pow(e));
            }
        }
        acc
    }

    /// Evaluate the polynomial sequence `m -> prod_j y_j^{C(m,j)}` at any
    /// integer (negative allowed).
    pub fn poly_eval(&self, m: i64) -> UniMatrix<S> {
        self.partial_product(m)
    }

    /// The star product: `z_1 = x_1 y_1` and for each `i`,
    /// `prod_{j<=i} z_j^{C(i,j)} = prod_{j<=i} x_j^{C(i,j)} prod_{j<=i} y_j^{C(i,j)}`,
    /// solved for `z_i` level by level. Closure (`z_i` in `N^i`) is a
    /// structural fact of the construction; a violation is a bug and panics.
    pub fn star(&self, other: &Self) -> Self {
        let n = self.dim();
        assert_eq!(n, other.dim(), "dimension mismatch");
        let k = self.class();
        let mut z: Vec<UniMatrix<S>> = Vec::with_capacity(k);
        for i in 1..=k {
            let rhs = self
                .partial_product(i as i64)
                .mul(&other.partial_product(i as i64));
            let mut lower = UniMatrix::identity(n);
            for (j, zj) in z.iter().enumerate() {
                let e = binomial(i as i64, (j + 1) as u32);
                if e != 0 {
                    lower = lower.mul(&zj.int_pow(e));
                }
            }
            let zi = lower.inverse().mul(&rhs);
            assert!(
                zi.lcs_degree().at_least(i),
                "star closure violated at level {i}: degree {}",
                zi.lcs_degree()
            );
            z.push(zi);
        }
        StarElement { components: z }
    }

    /// Inverse under the star product, by the same recursion with target
    /// identity at every level.
    pub fn star_inverse(&self) -> Self {
        let n = self.dim();
        let k = self.class();
        let mut w: Vec<UniMatrix<S>> = Vec::with_capacity(k);
        for i in 1..=k {
            let mut lower = UniMatrix::identity(n);
            for (j, wj) in w.iter().enumerate() {
                let e = binomial(i as i64, (j + 1) as u32);
                if e != 0 {
                    lower = lower.mul(&wj.int_pow(e));
                }
            }
            let wi = lower
                .inverse()
                .mul(&self.partial_product(i as i64).inverse());
            assert!(
                wi.lcs_degree().at_least(i),
                "star inverse closure violated at level {i}"
            );
            w.push(wi);
        }
        StarElement { components: w }
    }

    pub fn star_pow(&self, m: u32) -> Self {
        let mut acc = StarElement::identity(self.dim());
        for _ in 0..m {
            acc = acc.star(self);
        }
        acc
    }
}

/// Generator of the skew translation: `(a[a,x], e, ..., e)`. With the
/// commutator convention in force, the first component equals `x^-1 a x`.
pub fn skew_generator<S: Scalar>(a: &UniMatrix<S>, x: &UniMatrix<S>) -> StarElement<S> {
    StarElement::from_first(a.mul(&a.commutator(x)))
}

/// One step of the skew translation on the star group.
pub fn skew_step<S: Scalar>(
    a: &UniMatrix<S>,
    x: &UniMatrix<S>,
    y: &StarElement<S>,
) -> StarElement<S> {
    skew_generator(a, x).star(y)
}

/// Embedding of the tuple orbit into `(N/Gamma)^{k+1}`: the `j`-th
/// coordinate is the reduced representative of `x * prod_i y_i^{C(j,i)}`,
/// for `j = 1..k+1`. Constant on cosets of the tuple lattice.
pub fn orbit_embedding<S: Scalar>(
    x: &UniMatrix<S>,
    y: &StarElement<S>,
) -> Vec<UniMatrix<S>> {
    let k = y.class();
    (1..=(k as i64) + 1)
        .map(|j| reduce(&x.mul(&y.poly_eval(j))).point)
        .collect()
}

/// Exact coordinate-level intertwining check: embedding the skew-stepped
/// tuple equals translating the embedded tuple by `(a, a^2, ..., a^{k+1})`,
/// componentwise modulo the lattice.
pub fn intertwining_holds<S: Scalar>(
    a: &UniMatrix<S>,
    x: &UniMatrix<S>,
    y: &StarElement<S>,
) -> bool {
    let stepped = orbit_embedding(x, &skew_step(a, x, y));
    let base = orbit_embedding(x, y);
    stepped.iter().enumerate().all(|(idx, lhs)| {
        let j = (idx + 1) as i64;
        let rhs = a.int_pow(j).mul(&base[idx]);
        coset_eq(lhs, &rhs)
    })
}

/// The star commutator
/// `(x^-1,e,..) * (e,..,y^-1 at slot,..) * (x,e,..) * (e,..,y at slot,..)`
/// whose coordinates realize the commutator lemma pattern. Requires `y` at
/// lower-central-series level `>= slot`.
pub fn slot_commutator<S: Scalar>(
    x: &UniMatrix<S>,
    y: &UniMatrix<S>,
    slot: usize,
) -> Result<StarElement<S>, Error> {
    let n = x.dim();
    if !y.lcs_degree().at_least(slot) {
        return Err(Error::BadConfig(format!(
            "slot commutator needs y at level >= {slot}, got {}",
            y.lcs_degree()
        )));
    }
    let xe = StarElement::from_first(x.clone());
    let xe_inv = StarElement::from_first(x.inverse());
    let ye = StarElement::from_slot(n, slot, y.clone())?;
    let ye_inv = StarElement::from_slot(n, slot, y.inverse())?;
    Ok(xe_inv.star(&ye_inv).star(&xe).star(&ye))
}

/// Global coordinate chart of the star group: the second-kind coordinates
/// of each component, restricted to positions at superdiagonal distance
/// `>= i` for component `i`, concatenated in component order.
pub fn star_coord_len(n: usize) -> usize {
    (1..n).map(|i| level_positions(n, i).len()).sum()
}

fn level_positions(n: usize, level: usize) -> Vec<(usize, usize)> {
    positions(n)
        .into_iter()
        .filter(|&(i, j)| j - i >= level)
        .collect()
}

pub fn star_coords<S: Scalar>(e: &StarElement<S>) -> Vec<S> {
    let n = e.dim();
    let mut out = Vec::with_capacity(star_coord_len(n));
    for (idx, c) in e.components().iter().enumerate() {
        let coords = crate::nilmanifold::to_malcev(c);
        for ((i, j), v) in positions(n).into_iter().zip(coords) {
            if j - i >= idx + 1 {
                out.push(v);
            } else {
                debug_assert!(v.is_zero_entry());
            }
        }
    }
    out
}

pub fn star_from_coords<S: Scalar>(n: usize, v: &[S]) -> StarElement<S> {
    assert_eq!(v.len(), star_coord_len(n), "coordinate length mismatch");
    let mut components = Vec::with_capacity(n - 1);
    let mut cursor = 0usize;
    for level in 1..n {
        let mut full = vec![S::zero(); crate::group::coord_len(n)];
        for (slot, (i, j)) in positions(n).into_iter().enumerate() {
            if j - i >= level {
                full[slot] = v[cursor].clone();
                cursor += 1;
            }
        }
        components.push(crate::nilmanifold::from_malcev(n, &full));
    }
    StarElement { components }
}
