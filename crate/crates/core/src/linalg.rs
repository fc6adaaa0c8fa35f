//! Dense exact linear algebra over `Q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero_vec(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

pub fn unit_vec(n: usize, k: usize) -> Vec<Rat> {
    let mut v = zero_vec(n);
    v[k] = Rat::one();
    v
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// A row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rat>>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![zero_vec(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for k in 0..n {
            m.data[k][k] = Rat::one();
        }
        m
    }

    pub fn from_rows(cols: usize, data: Vec<Vec<Rat>>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols));
        Self {
            rows: data.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(rows: usize, columns: &[Vec<Rat>]) -> Self {
        let mut m = Self::zero(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, x) in col.iter().enumerate() {
                m.data[r][c] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Rat) {
        self.data[r][c] = x;
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> Vec<Rat> {
        self.data.iter().map(|row| row[c].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| is_zero_vec(r))
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[r][k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other.data[k][c];
                    if !b.is_zero() {
                        out.data[r][c] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Matrix { data, ..*self }
    }

    pub fn scale(&self, c: &Rat) -> Matrix {
        let data = self.data.iter().map(|r| r.iter().map(|x| x * c).collect()).collect();
        Matrix { data, ..*self }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c][r] = self.data[r][c].clone();
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        rank(&self.data, self.cols)
    }

    /// Basis of `{v : self · v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        nullspace(&self.data, self.cols)
    }
}

/// A subspace kept in reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(ambient: usize) -> Self {
        Self {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let mut s = Self::new(ambient);
        for k in 0..ambient {
            s.insert(&unit_vec(ambient, k));
        }
        s
    }

    pub fn spanned_by<'a>(ambient: usize, vs: impl IntoIterator<Item = &'a Vec<Rat>>) -> Self {
        let mut s = Self::new(ambient);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `v` minus its projection along the pivot columns.
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let c = v[p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &c * y;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                if !y.is_zero() {
                    *x -= &c * y;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for v in &other.rows {
            s.insert(v);
        }
        s
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        // solve a·self = b·other via the kernel of the stacked rows
        let k1 = self.dim();
        let mut cols: Vec<Vec<Rat>> = self.rows.clone();
        cols.extend(other.rows.iter().map(|r| r.iter().map(|x| -x.clone()).collect()));
        let m = Matrix::from_columns(self.ambient, &cols);
        let mut out = Subspace::new(self.ambient);
        for coeffs in m.kernel() {
            let mut v = zero_vec(self.ambient);
            for (c, row) in coeffs[..k1].iter().zip(&self.rows) {
                for (x, y) in v.iter_mut().zip(row) {
                    *x += c * y;
                }
            }
            out.insert(&v);
        }
        out
    }
}

pub fn rank(rows: &[Vec<Rat>], cols: usize) -> usize {
    let mut s = Subspace::new(cols);
    for r in rows {
        s.insert(r);
    }
    s.dim()
}

/// Basis of the kernel of the `m × cols` matrix given by `rows`.
pub fn nullspace(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let echelon = Subspace::spanned_by(cols, rows);
    let pivots = echelon.pivots().to_vec();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = zero_vec(cols);
        v[free] = Rat::one();
        for (row, &p) in echelon.rows.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Smallest subspace containing `start` and stable under every matrix in
/// `gens`.
pub fn invariant_closure<'a>(
    ambient: usize,
    gens: &[&Matrix],
    start: impl IntoIterator<Item = &'a Vec<Rat>>,
) -> Subspace {
    let mut space = Subspace::new(ambient);
    let mut queue: Vec<Vec<Rat>> = Vec::new();
    for v in start {
        if space.insert(v) {
            queue.push(v.clone());
        }
    }
    while let Some(v) = queue.pop() {
        for g in gens {
            let w = g.apply(&v);
            if space.insert(&w) {
                queue.push(w);
            }
        }
    }
    space
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: Vec<Vec<i64>>) -> Matrix {
        let cols = rows[0].len();
        Matrix::from_rows(cols, rows.into_iter().map(|r| r.into_iter().map(rat).collect()).collect())
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(is_zero_vec(&a.apply(&k[0])));
        assert_eq!(Matrix::identity(4).rank(), 4);
        assert_eq!(Matrix::zero(3, 3).kernel().len(), 3);
    }

    #[test]
    fn closure_of_shift() {
        // nilpotent shift e_k -> e_{k+1}
        let mut s = Matrix::zero(4, 4);
        for k in 0..3 {
            s.set(k + 1, k, rat(1));
        }
        let start = vec![unit_vec(4, 1)];
        let c = invariant_closure(4, &[&s], &start);
        assert_eq!(c.dim(), 3);
        assert!(!c.contains(&unit_vec(4, 0)));
    }

    #[test]
    fn intersections() {
        let a = Subspace::spanned_by(3, &[unit_vec(3, 0), unit_vec(3, 1)]);
        let b = Subspace::spanned_by(3, &[unit_vec(3, 1), unit_vec(3, 2)]);
        let c = a.intersect(&b);
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&unit_vec(3, 1)));
        assert_eq!(a.sum(&b).dim(), 3);
    }

    proptest! {
        #[test]
        fn rank_nullity(entries in proptest::collection::vec(-3i64..=3, 12)) {
            let rows: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let a = m(rows);
            let k = a.kernel();
            prop_assert_eq!(a.rank() + k.len(), 4);
            for v in &k {
                prop_assert!(is_zero_vec(&a.apply(v)));
            }
            prop_assert_eq!(a.transpose().rank(), a.rank());
        }
    }
}
