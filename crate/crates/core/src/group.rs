//! Arithmetic in the full upper unitriangular group `U_n`, the concrete
//! (n-1)-step nilpotent group used throughout.
//!
//! The lower central series is the zero-pattern filtration: `g` lies in
//! `N^i` exactly when its first `i-1` superdiagonals vanish. Commutators
//! use the convention `[g,h] = g^-1 h^-1 g h`, so `a[a,x] = x^-1 a x`.

use std::fmt;

use crate::scalar::Scalar;

/// Membership level in the lower central series. The identity belongs to
/// every `N^i`, which the sentinel `Identity` encodes (compares above every
/// finite step).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    Step(usize),
    Identity,
}

impl Degree {
    pub fn at_least(self, i: usize) -> bool {
        match self {
            Degree::Identity => true,
            Degree::Step(s) => s >= i,
        }
    }

    /// Sum of degrees, saturating at `Identity`.
    pub fn plus(self, other: Degree) -> Degree {
        match (self, other) {
            (Degree::Identity, _) | (_, Degree::Identity) => Degree::Identity,
            (Degree::Step(a), Degree::Step(b)) => Degree::Step(a + b),
        }
    }
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Degree::Identity, Degree::Identity) => std::cmp::Ordering::Equal,
            (Degree::Identity, _) => std::cmp::Ordering::Greater,
            (_, Degree::Identity) => std::cmp::Ordering::Less,
            (Degree::Step(a), Degree::Step(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Step(s) => write!(f, "{s}"),
            Degree::Identity => write!(f, "inf"),
        }
    }
}

/// Strictly upper triangular coordinate positions `(i, j)`, `i < j`,
/// ordered by superdiagonal distance `j - i` ascending, then row index.
/// This order is the Mal'cev coordinate order of the second kind used
/// everywhere in the crate.
pub fn positions(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for dist in 1..n {
        for i in 0..n - dist {
            out.push((i, i + dist));
        }
    }
    out
}

/// Number of Mal'cev coordinates of `U_n`.
pub fn coord_len(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Upper unitriangular `n x n` matrix over a scalar type.
#[derive(Clone, PartialEq)]
pub struct UniMatrix<S> {
    n: usize,
    entries: Vec<S>, // row-major, diagonal 1, below-diagonal 0
}

impl<S: Scalar> UniMatrix<S> {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 2, "dimension must be >= 2");
        let mut entries = vec![S::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = S::one();
        }
        UniMatrix { n, entries }
    }

    /// `E_{ij}(v)`: identity plus `v` at position `(i, j)`.
    pub fn elementary(n: usize, i: usize, j: usize, v: S) -> Self {
        assert!(i < j && j < n, "position must be strictly upper");
        let mut m = Self::identity(n);
        m.entries[i * n + j] = v;
        m
    }

    /// Build from a full row-major entry list; validates unitriangularity.
    pub fn from_entries(n: usize, entries: Vec<S>) -> Result<Self, crate::Error> {
        if entries.len() != n * n {
            return Err(crate::Error::BadMatrix(format!(
                "expected {} entries for dimension {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            for j in 0..=i {
                let want = if i == j { S::one() } else { S::zero() };
                if entries[i * n + j] != want {
                    return Err(crate::Error::BadMatrix(format!(
                        "entry ({i},{j}) must be {} for a unitriangular matrix",
                        if i == j { "1" } else { "0" }
                    )));
                }
            }
        }
        Ok(UniMatrix { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nilpotency class of the ambient group.
    pub fn class(&self) -> usize {
        self.n - 1
    }

    pub fn entry(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.n + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: S) {
        assert!(i < j, "only strictly upper entries are assignable");
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        assert_eq!(n, other.n, "dimension mismatch");
        let mut out = Self::identity(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut acc = S::zero();
                for l in i..=j {
                    acc = acc + self.entry(i, l).clone() * other.entry(l, j).clone();
                }
                out.entries[i * n + j] = acc;
            }
        }
        out
    }

    /// Inverse via the terminating Neumann series `(I+X)^-1 = sum (-X)^m`.
    pub fn inverse(&self) -> Self {
        let n = self.n;
        let neg_x = self.nilpotent_part().scale_neg();
        let mut acc = Self::identity(n);
        let mut cur = neg_x.clone();
        for _ in 1..n {
            acc = acc.add_nilpotent(&cur);
            cur = cur.mul(&neg_x);
        }
        acc
    }

    /// `[g,h] = g^-1 h^-1 g h`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.inverse()
            .mul(&other.inverse())
            .mul(self)
            .mul(other)
    }

    /// `g^m` by binary powering; negative exponents via the inverse.
    pub fn int_pow(&self, m: i64) -> Self {
        if m == 0 {
            return Self::identity(self.n);
        }
        let (mut base, mut e) = if m < 0 {
            (self.inverse(), m.unsigned_abs())
        } else {
            (self.clone(), m as u64)
        };
        let mut acc = Self::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Largest `i` with `g` in `N^i`; the identity maps to the sentinel.
    pub fn lcs_degree(&self) -> Degree {
        let n = self.n;
        for dist in 1..n {
            for i in 0..n - dist {
                if !self.entry(i, i + dist).is_zero_entry() {
                    return Degree::Step(dist);
                }
            }
        }
        Degree::Identity
    }

    pub fn is_identity(&self) -> bool {
        self.lcs_degree() == Degree::Identity
    }

    /// All strictly upper entries are integers (exact in `Exact` mode,
    /// within 1e-9 for floats): membership in the integer lattice.
    pub fn is_integer_matrix(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| ((i + 1)..n).all(|j| self.entry(i, j).is_integer()))
    }

    /// Strictly upper (nilpotent) part `g - I`.
    pub fn nilpotent_part(&self) -> Nilpotent<S> {
        let n = self.n;
        let mut entries = vec![S::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                entries[i * n + j] = self.entry(i, j).clone();
            }
        }
        Nilpotent { n, entries }
    }

    fn add_nilpotent(&self, x: &Nilpotent<S>) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                out.entries[i * n + j] =
                    out.entries[i * n + j].clone() + x.entries[i * n + j].clone();
            }
        }
        out
    }

    /// Terminating matrix logarithm `log(I+Y) = sum (-1)^{m+1} Y^m / m`.
    pub fn log(&self) -> Nilpotent<S> {
        let n = self.n;
        let y = self.nilpotent_part();
        let mut acc = Nilpotent::zero(n);
        let mut cur = y.clone();
        for m in 1..n {
            let sign = if m % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&cur.scale_div(sign * m as i64));
            if m + 1 < n {
                cur = cur.mul(&y);
            }
        }
        acc
    }

    pub fn to_float(&self) -> UniMatrix<f64> {
        UniMatrix {
            n: self.n,
            entries: self.entries.iter().map(|x| x.to_f64()).collect(),
        }
    }
}

impl UniMatrix<f64> {
    /// `g^t = exp(t log g)`; agrees with `int_pow` at integer `t`.
    pub fn real_pow(&self, t: f64) -> Self {
        self.log().scale_f64(t).exp()
    }
}

impl<S: Scalar> fmt::Debug for UniMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "UniMatrix{}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                write!(f, "{} ", self.entries[i * self.n + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Strictly upper triangular matrix (Lie-algebra side of `U_n`).
#[derive(Clone, PartialEq, Debug)]
pub struct Nilpotent<S> {
    n: usize,
    entries: Vec<S>,
}

impl<S: Scalar> Nilpotent<S> {
    pub fn zero(n: usize) -> Self {
        Nilpotent {
            n,
            entries: vec![S::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.n + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: S) {
        assert!(i < j);
        self.entries[i * self.n + j] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Nilpotent { n: self.n, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        assert_eq!(n, other.n);
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in (i + 2)..n {
                let mut acc = S::zero();
                for l in (i + 1)..j {
                    acc = acc + self.entry(i, l).clone() * other.entry(l, j).clone();
                }
                out.entries[i * n + j] = acc;
            }
        }
        out
    }

    fn scale_neg(&self) -> Self {
        let entries = self.entries.iter().map(|x| -x.clone()).collect();
        Nilpotent { n: self.n, entries }
    }

    /// Divide every entry by a nonzero integer (sign included).
    fn scale_div(&self, d: i64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|x| x.clone().div_int(d))
            .collect();
        Nilpotent { n: self.n, entries }
    }

    /// Terminating exponential `exp(X) = sum X^m / m!`.
    pub fn exp(&self) -> UniMatrix<S> {
        let n = self.n;
        let mut acc = UniMatrix::identity(n);
        let mut cur = self.clone();
        let mut fact = 1i64;
        for m in 1..n {
            fact *= m as i64;
            acc = acc.add_nilpotent(&cur.scale_div(fact));
            if m + 1 < n {
                cur = cur.mul(self);
            }
        }
        acc
    }

    /// Coordinates in the elementary basis, in [`positions`] order.
    pub fn coords(&self) -> Vec<S> {
        positions(self.n)
            .into_iter()
            .map(|(i, j)| self.entry(i, j).clone())
            .collect()
    }
}

impl Nilpotent<f64> {
    pub fn scale_f64(&self, t: f64) -> Self {
        let entries = self.entries.iter().map(|x| x * t).collect();
        Nilpotent { n: self.n, entries }
    }
}
