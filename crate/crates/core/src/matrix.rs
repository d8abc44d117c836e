//! Small dense matrices of [`PuiseuxNumber`]s.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};
use crate::puiseux::{Ctx, PuiseuxNumber};

#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<PuiseuxNumber>,
}

impl Mat {
    /// All entries exact zero.
    pub fn zero(ctx: &Ctx, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![ctx.zero(); rows * cols],
        }
    }

    pub fn identity(ctx: &Ctx, n: usize) -> Self {
        let mut m = Self::zero(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = ctx.one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<PuiseuxNumber>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// A column vector.
    pub fn column(entries: Vec<PuiseuxNumber>) -> Self {
        Mat {
            rows: entries.len(),
            cols: 1,
            data: entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn entries(&self) -> &[PuiseuxNumber] {
        &self.data
    }
    pub fn row(&self, i: usize) -> Vec<PuiseuxNumber> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }
    pub fn to_rows(&self) -> Vec<Vec<PuiseuxNumber>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn map(&self, f: impl Fn(&PuiseuxNumber) -> PuiseuxNumber) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entry-wise `x ↦ x^{q^j}`.
    pub fn frob_twist(&self, j: u32) -> Self {
        self.map(|x| x.frob_twist(j))
    }

    pub fn scale(&self, s: &PuiseuxNumber) -> Self {
        self.map(|x| x * s)
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_exact_zero())
    }

    /// Every entry zero at its precision.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Minimum valuation (units of `1/e`) over entries nonzero at precision.
    pub fn min_val_units(&self) -> Option<i64> {
        self.data.iter().filter_map(|x| x.val_units()).min()
    }

    /// Smallest absolute precision among entries (`None` if all exact).
    pub fn min_prec_units(&self) -> Option<i64> {
        self.data.iter().filter_map(|x| x.prec_units()).min()
    }

    fn check_same_shape(&self, other: &Self) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "matrix shapes differ: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }

    pub fn determinant(&self) -> Result<PuiseuxNumber> {
        if self.rows != self.cols {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        match self.rows {
            0 => Err(Error::Shape("empty matrix".into())),
            1 => Ok(self[(0, 0)].clone()),
            2 => Ok(&self[(0, 0)] * &self[(1, 1)] - &self[(0, 1)] * &self[(1, 0)]),
            n => {
                // cofactor expansion along the first row; n is tiny here
                let mut acc = self[(0, 0)].ctx().zero();
                for j in 0..n {
                    if self[(0, j)].is_exact_zero() {
                        continue;
                    }
                    let minor = self.minor(0, j);
                    let term = &self[(0, j)] * &minor.determinant()?;
                    acc = if j % 2 == 0 { acc + term } else { acc - term };
                }
                Ok(acc)
            }
        }
    }

    fn minor(&self, r: usize, c: usize) -> Self {
        let mut data = vec![];
        for i in (0..self.rows).filter(|i| *i != r) {
            for j in (0..self.cols).filter(|j| *j != c) {
                data.push(self[(i, j)].clone());
            }
        }
        Mat {
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }

    /// Inverse by the adjugate. Fails if the determinant is zero at precision.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant()?;
        let dinv = det.inv()?;
        let n = self.rows;
        let mut out = Mat::zero(self[(0, 0)].ctx(), n, n);
        if n == 1 {
            out[(0, 0)] = dinv;
            return Ok(out);
        }
        for i in 0..n {
            for j in 0..n {
                let cof = self.minor(j, i).determinant()?;
                let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                out[(i, j)] = &cof * &dinv;
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = PuiseuxNumber;
    fn index(&self, (i, j): (usize, usize)) -> &PuiseuxNumber {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut PuiseuxNumber {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        self.check_same_shape(rhs);
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        self.check_same_shape(rhs);
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let ctx = self.data.first().or(rhs.data.first()).expect("nonempty").ctx();
        let mut out = Mat::zero(ctx, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = ctx.zero();
                for k in 0..self.cols {
                    let (a, b) = (&self[(i, k)], &rhs[(k, j)]);
                    if a.is_exact_zero() || b.is_exact_zero() {
                        continue;
                    }
                    acc = acc + a * b;
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}
