//! Twisted polynomials `Σ X_i τ^i` with `τ a = a^q τ`, and the isomorphism
//! equations between the motives `M(a)`.

use crate::error::{Error, Result};
use crate::field::Fe;
use crate::matrix::Mat;
use crate::puiseux::{Ctx, PuiseuxNumber, ZeroState};

/// `X = Σ X_i τ^i` with `n × n` matrix coefficients (`n = 1` for scalars).
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedPoly {
    n: usize,
    coeffs: Vec<Mat>,
}

impl TwistedPoly {
    pub fn new(coeffs: Vec<Mat>) -> Result<Self> {
        let n = coeffs
            .first()
            .ok_or_else(|| Error::Shape("twisted polynomial without coefficients".into()))?
            .rows();
        if coeffs.iter().any(|c| c.rows() != n || c.cols() != n) {
            return Err(Error::Shape("coefficients must be square of equal size".into()));
        }
        Ok(TwistedPoly { n, coeffs })
    }

    pub fn scalar(coeffs: Vec<PuiseuxNumber>) -> Self {
        assert!(!coeffs.is_empty());
        TwistedPoly {
            n: 1,
            coeffs: coeffs.into_iter().map(|c| Mat::column(vec![c])).collect(),
        }
    }

    pub fn identity(ctx: &Ctx, n: usize) -> Self {
        TwistedPoly {
            n,
            coeffs: vec![Mat::identity(ctx, n)],
        }
    }

    /// `τ^j · I_n`.
    pub fn tau_power(ctx: &Ctx, n: usize, j: usize) -> Self {
        let mut coeffs = vec![Mat::zero(ctx, n, n); j + 1];
        coeffs[j] = Mat::identity(ctx, n);
        TwistedPoly { n, coeffs }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.coeffs
    }

    /// Coefficient of `τ^i` (exact zero beyond the stored range).
    pub fn coeff(&self, i: usize) -> Mat {
        self.coeffs.get(i).cloned().unwrap_or_else(|| {
            Mat::zero(self.ctx(), self.n, self.n)
        })
    }

    /// Scalar coefficient of `τ^i` for `n = 1`.
    pub fn scalar_coeff(&self, i: usize) -> PuiseuxNumber {
        self.coeff(i)[(0, 0)].clone()
    }

    pub fn ctx(&self) -> &Ctx {
        self.coeffs[0].entries()[0].ctx()
    }

    /// Largest `i` with `X_i` nonzero at precision; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        (0..self.coeffs.len()).rev().find(|&i| !self.coeffs[i].is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Mat, &Mat) -> Mat) -> Self {
        assert_eq!(self.n, other.n, "twisted polynomial sizes differ");
        let len = self.coeffs.len().max(other.coeffs.len());
        TwistedPoly {
            n: self.n,
            coeffs: (0..len).map(|i| f(&self.coeff(i), &other.coeff(i))).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }
}

/// Product in the twisted ring: `(X_i τ^i)(Y_j τ^j) = X_i Y_j^{(i)} τ^{i+j}`.
pub fn ore_mul(x: &TwistedPoly, y: &TwistedPoly) -> TwistedPoly {
    assert_eq!(x.n, y.n, "twisted polynomial sizes differ");
    let ctx = x.ctx();
    let mut out = vec![Mat::zero(ctx, x.n, x.n); x.coeffs.len() + y.coeffs.len() - 1];
    for (i, xi) in x.coeffs.iter().enumerate() {
        if xi.is_exact_zero() {
            continue;
        }
        for (j, yj) in y.coeffs.iter().enumerate() {
            if yj.is_exact_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(xi * &yj.frob_twist(i as u32));
        }
    }
    TwistedPoly { n: x.n, coeffs: out }
}

/// Invertibility in `M_n(C_∞{τ})`, decided by `det X_0`.
pub fn is_unit(x: &TwistedPoly) -> Result<bool> {
    let det = x.coeff(0).determinant()?;
    match det.zero_state() {
        ZeroState::Nonzero => Ok(true),
        ZeroState::ExactZero => Ok(false),
        ZeroState::ZeroAtPrecision => Err(Error::InsufficientPrecision(format!(
            "det X_0 vanishes only to precision {det}"
        ))),
    }
}

/// Two-sided inverse of a unit of degree 0.
pub fn inverse_degree0(x: &TwistedPoly) -> Result<TwistedPoly> {
    if x.degree().unwrap_or(0) > 0 {
        return Err(Error::Unsupported(
            "inverse is implemented for constant units only".into(),
        ));
    }
    Ok(TwistedPoly {
        n: x.n,
        coeffs: vec![x.coeff(0).inverse()?],
    })
}

/// `θ I + A τ + E_11 τ^2`: the `T`-action of `M(A)` as a twisted polynomial.
pub fn t_operator(a: &Mat) -> TwistedPoly {
    let ctx = a[(0, 0)].ctx().clone();
    let mut theta = Mat::zero(&ctx, 2, 2);
    theta[(0, 0)] = ctx.theta();
    theta[(1, 1)] = ctx.theta();
    let mut e11 = Mat::zero(&ctx, 2, 2);
    e11[(0, 0)] = ctx.one();
    TwistedPoly {
        n: 2,
        coeffs: vec![theta, a.clone(), e11],
    }
}

/// One solution of `T_A X = X T_{A'}` found by the bounded solver.
#[derive(Clone, Debug)]
pub struct SemilinearSolution {
    pub x: TwistedPoly,
    pub x11: Fe,
    pub x22: Fe,
    pub unit: bool,
}

#[derive(Clone, Debug)]
pub struct SemilinearSolutions {
    pub kmax: usize,
    /// All verified solutions, units and non-units.
    pub solutions: Vec<SemilinearSolution>,
}

impl SemilinearSolutions {
    pub fn units(&self) -> impl Iterator<Item = &SemilinearSolution> {
        self.solutions.iter().filter(|s| s.unit)
    }

    pub fn has_unit(&self) -> bool {
        self.units().next().is_some()
    }
}

fn check_upper_shape(a: &Mat) -> Result<()> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::Shape("expected a 2x2 matrix".into()));
    }
    let ctx = a[(0, 0)].ctx();
    if !a[(1, 0)].is_exact_zero() || a[(1, 1)] != ctx.one() {
        return Err(Error::Unsupported(
            "solver handles A = [[a11, a12], [0, 1]] only".into(),
        ));
    }
    Ok(())
}

/// Solves the coefficient equations of `T_A X = X T_{A'}` for `X` of degree
/// at most `kmax` and `A, A'` upper triangular with lower-right entry 1.
///
/// The `(2,1)` entries are eliminated from `τ^{kmax+2}` downward. For a unit
/// the diagonal is then constant, and the `(1,2)` chain vanishes in turn, so
/// only `X_0 = diag(x11, x22)` remains. These constants are constrained to
/// `F_{q^2} × F_q` by the equations at `τ^1` and `τ^2`. Every candidate is
/// checked against the full product `T_A X − X T_{A'}`.
pub fn solve_semilinear_bounded(a: &Mat, a2: &Mat, kmax: usize) -> Result<SemilinearSolutions> {
    check_upper_shape(a)?;
    check_upper_shape(a2)?;
    let ctx = a[(0, 0)].ctx().clone();
    let top = kmax + 2;

    // (2,1): x_{m-2} = (θ − θ^{q^m}) x_m + x_{m-1}^q − x_{m-1} a'_{11}^{q^{m-1}}
    let mut x21 = vec![ctx.zero(); top + 1];
    for m in (2..=top).rev() {
        let am = a2[(0, 0)].frob_twist(m as u32 - 1);
        x21[m - 2] = &(&ctx.theta_diff(0, m as u32) * &x21[m]) + &x21[m - 1].frob_twist(1)
            - &x21[m - 1] * &am;
        if m - 2 > kmax && !x21[m - 2].is_exact_zero() {
            return Err(Error::ContractionFailure("(2,1) descent".into()));
        }
    }
    debug_assert!(x21.iter().all(|x| x.is_exact_zero()));

    // (1,2), with constant diagonal:
    // x_{m-2}^{q^2} = (θ^{q^m} − θ) x_m − a11 x_{m-1}^q + x_{m-1}, for m − 1 ≥ 1
    let mut x12 = vec![ctx.zero(); top + 1];
    for m in (2..=top).rev() {
        let rhs = &(&ctx.theta_diff(m as u32, 0) * &x12[m]) - &(&a[(0, 0)] * &x12[m - 1].frob_twist(1))
            + &x12[m - 1];
        x12[m - 2] = rhs.frob_root(2)?;
    }
    debug_assert!(x12.iter().all(|x| x.is_exact_zero()));

    let tower = ctx.tower().clone();
    let lhs_op = t_operator(a);
    let rhs_op = t_operator(a2);
    let mut solutions = vec![];
    for x11 in tower.field().elements().filter(|x| tower.in_subfield(*x, 2)) {
        for x22 in tower.field().elements().filter(|x| tower.in_subfield(*x, 1)) {
            let mut x0 = Mat::zero(&ctx, 2, 2);
            x0[(0, 0)] = ctx.constant(x11);
            x0[(1, 1)] = ctx.constant(x22);
            x0[(0, 1)] = x12[0].clone();
            x0[(1, 0)] = x21[0].clone();
            let x = TwistedPoly::new(vec![x0])?;
            let residual = ore_mul(&lhs_op, &x).sub(&ore_mul(&x, &rhs_op));
            if residual.is_zero() {
                let unit = is_unit(&x)?;
                solutions.push(SemilinearSolution { x, x11, x22, unit });
            }
        }
    }
    Ok(SemilinearSolutions { kmax, solutions })
}

/// Closed form of the isomorphism criterion for `M(a)` and `M(a')`:
/// `a'/a` is a constant of `F_{q^2}`.
pub fn ma_isomorphic_closed_form(a: &PuiseuxNumber, a2: &PuiseuxNumber) -> Result<bool> {
    match (a.is_zero(), a2.is_zero()) {
        (true, true) => return Ok(true),
        (true, false) | (false, true) => return Ok(false),
        _ => {}
    }
    let r = a2.div(a)?;
    Ok(r.terms().all(|(n, _)| n == 0) && r.in_laurent_subfield(2))
}

/// The `M(a)` matrix `[[0, a], [0, 1]]`.
pub fn ma_matrix(a: &PuiseuxNumber) -> Mat {
    let ctx = a.ctx();
    let mut m = Mat::zero(ctx, 2, 2);
    m[(0, 1)] = a.clone();
    m[(1, 1)] = ctx.one();
    m
}
