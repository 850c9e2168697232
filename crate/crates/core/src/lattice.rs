//! Time-frequency lattices in lower-triangular normal form.
//!
//! A lattice `(a, b, s)` on `Z_N x Z_N` contains the points
//! `(n a, (m b + n s) mod N)` for `0 <= n < N/a`, `0 <= m < N/b`.
//! The point set only depends on `s mod b`, so the shear is stored reduced
//! modulo `b`, which makes the triple a unique key for the point set.

use serde::{Deserialize, Serialize};

use crate::dsp::{TfLocation, MIN_LEN};
use crate::error::{GaborError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LatticeRecord", into = "LatticeRecord")]
pub struct Lattice {
    a: usize,
    b: usize,
    s: usize,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct LatticeRecord {
    a: usize,
    b: usize,
    s: i64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "R", default, skip_deserializing)]
    r: f64,
}

impl TryFrom<LatticeRecord> for Lattice {
    type Error = GaborError;

    fn try_from(r: LatticeRecord) -> Result<Self> {
        Lattice::from_shear(r.a, r.b, r.s, r.n)
    }
}

impl From<Lattice> for LatticeRecord {
    fn from(l: Lattice) -> Self {
        LatticeRecord {
            a: l.a,
            b: l.b,
            s: l.s as i64,
            n: l.n,
            r: l.redundancy(),
        }
    }
}

pub(crate) fn gcd(mut x: usize, mut y: usize) -> usize {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

impl Lattice {
    fn check_steps(a: usize, b: usize, n: usize) -> Result<()> {
        if n < MIN_LEN {
            return Err(GaborError::TooShort(n));
        }
        if a == 0 || !n.is_multiple_of(a) {
            return Err(GaborError::InvalidLattice(format!("time step {a} does not divide N = {n}")));
        }
        if b == 0 || !n.is_multiple_of(b) {
            return Err(GaborError::InvalidLattice(format!(
                "frequency step {b} does not divide N = {n}"
            )));
        }
        Ok(())
    }

    /// Smallest positive shear; every admissible shear is a multiple of it.
    pub fn shear_unit(a: usize, b: usize, n: usize) -> usize {
        b / gcd(n / a, b)
    }

    /// Lattice with shear `k * b / gcd(N/a, b)`.
    pub fn new(a: usize, b: usize, k: i64, n: usize) -> Result<Self> {
        Self::check_steps(a, b, n)?;
        let unit = Self::shear_unit(a, b, n) as i64;
        Self::from_shear(a, b, k * unit, n)
    }

    /// Lattice with an explicit shear, which must be a multiple of
    /// [`Lattice::shear_unit`].
    pub fn from_shear(a: usize, b: usize, s: i64, n: usize) -> Result<Self> {
        Self::check_steps(a, b, n)?;
        let unit = Self::shear_unit(a, b, n) as i64;
        if s.rem_euclid(unit) != 0 {
            return Err(GaborError::InvalidLattice(format!(
                "shear {s} is not a multiple of b/gcd(N/a, b) = {unit}"
            )));
        }
        Ok(Lattice {
            a,
            b,
            s: s.rem_euclid(b as i64) as usize,
            n,
        })
    }

    /// Rectangular lattice `(a, b, 0)`.
    pub fn rectangular(a: usize, b: usize, n: usize) -> Result<Self> {
        Self::from_shear(a, b, 0, n)
    }

    /// The full lattice `Z_N x Z_N`.
    pub fn full(n: usize) -> Result<Self> {
        Self::from_shear(1, 1, 0, n)
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn shear(&self) -> usize {
        self.s
    }

    /// Signal length `N`; a lattice is never empty.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n
    }

    /// Number of time columns `N/a`.
    pub fn cols(&self) -> usize {
        self.n / self.a
    }

    /// Number of frequency rows `N/b`.
    pub fn rows(&self) -> usize {
        self.n / self.b
    }

    pub fn num_points(&self) -> usize {
        self.cols() * self.rows()
    }

    /// `N/(ab)`; a Gabor system on the lattice can only be a frame when it is at least 1.
    pub fn redundancy(&self) -> f64 {
        self.n as f64 / (self.a * self.b) as f64
    }

    pub fn is_rectangular(&self) -> bool {
        self.s == 0
    }

    /// Frequency offset of column `col`, `col * s mod N`.
    pub fn column_offset(&self, col: usize) -> usize {
        (col * self.s) % self.n
    }

    /// Point `(col * a, row * b + col * s)` modulo `N`.
    pub fn point(&self, col: usize, row: usize) -> TfLocation {
        TfLocation {
            x: (col * self.a) % self.n,
            xi: (row * self.b + col * self.s) % self.n,
        }
    }

    /// All points, column by column.
    pub fn points(&self) -> Vec<TfLocation> {
        (0..self.cols())
            .flat_map(|c| (0..self.rows()).map(move |r| (c, r)))
            .map(|(c, r)| self.point(c, r))
            .collect()
    }

    /// Lattice `{(x, xi + c x)}` obtained by shearing this rectangular
    /// lattice with integer chirp rate `c`. In normal form its shear is `a c mod b`.
    pub fn sheared_by_chirp(&self, c: i64) -> Result<Self> {
        if !self.is_rectangular() {
            return Err(GaborError::InvalidLattice(
                "chirp shearing is defined for rectangular lattices".into(),
            ));
        }
        Self::from_shear(self.a, self.b, self.a as i64 * c, self.n)
    }
}

impl std::fmt::Display for Lattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}) N={}", self.a, self.b, self.s, self.n)
    }
}
