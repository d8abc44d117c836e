//! t-motives `T e = θ e + A_1 τ e + ... + A_k τ^k e`, their `T`-action on
//! `C_∞^n` and the exponential `exp(Z) = Σ C_m Z^{(m)}`.

use num_rational::Ratio;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::puiseux::{Ctx, PuiseuxNumber};

#[derive(Clone, Debug)]
pub struct MotiveSpec {
    pub name: String,
    pub n: usize,
    pub r: usize,
    /// `A_1, ..., A_k`; `A_0 = θ I_n` is implicit.
    pub a: Vec<Mat>,
}

fn mat2(ctx: &Ctx, rows: [[PuiseuxNumber; 2]; 2]) -> Mat {
    let [r0, r1] = rows;
    let _ = ctx;
    Mat::from_rows(vec![r0.to_vec(), r1.to_vec()]).expect("2x2")
}

impl MotiveSpec {
    /// `T e = θ e + τ e`.
    pub fn carlitz(ctx: &Ctx) -> Self {
        MotiveSpec {
            name: "carlitz".into(),
            n: 1,
            r: 1,
            a: vec![Mat::identity(ctx, 1)],
        }
    }

    /// `T e = θ e + τ^2 e`.
    pub fn carlitz2(ctx: &Ctx) -> Self {
        MotiveSpec {
            name: "carlitz2".into(),
            n: 1,
            r: 2,
            a: vec![Mat::zero(ctx, 1, 1), Mat::identity(ctx, 1)],
        }
    }

    /// `M_p(a1, a2)`: `A_1 = [[0, −a1], [1, −a2]]`, `A_2 = [[0, 1], [0, 0]]`.
    pub fn pure(a1: &PuiseuxNumber, a2: &PuiseuxNumber) -> Self {
        let c = a1.ctx();
        MotiveSpec {
            name: "pure".into(),
            n: 2,
            r: 3,
            a: vec![
                mat2(c, [[c.zero(), -a1.clone()], [c.one(), -a2.clone()]]),
                mat2(c, [[c.zero(), c.one()], [c.zero(), c.zero()]]),
            ],
        }
    }

    /// `M_np(A)`: `A_1 = A = [[a11, a12], [a21, 1]]`, `A_2 = [[1, 0], [0, 0]]`.
    pub fn nonpure(a: &Mat) -> Result<Self> {
        if a.rows() != 2 || a.cols() != 2 {
            return Err(Error::Shape("A must be 2x2".into()));
        }
        let c = a[(0, 0)].ctx().clone();
        if a[(1, 1)] != c.one() {
            return Err(Error::Shape(format!(
                "lower-right entry of A must be 1, got {}",
                a[(1, 1)]
            )));
        }
        Ok(MotiveSpec {
            name: "nonpure".into(),
            n: 2,
            r: 3,
            a: vec![
                a.clone(),
                mat2(&c, [[c.one(), c.zero()], [c.zero(), c.zero()]]),
            ],
        })
    }

    /// `M(a)` with `A = [[0, a], [0, 1]]`.
    pub fn ma(a: &PuiseuxNumber) -> Self {
        let c = a.ctx();
        let mut m = Self::nonpure(&mat2(c, [[c.zero(), a.clone()], [c.zero(), c.one()]]))
            .expect("shape");
        m.name = "M(a)".into();
        m
    }

    /// `M_t(a)` with `A = [[0, 0], [a, 1]]`.
    pub fn mt(a: &PuiseuxNumber) -> Self {
        let c = a.ctx();
        let mut m = Self::nonpure(&mat2(c, [[c.zero(), c.zero()], [a.clone(), c.one()]]))
            .expect("shape");
        m.name = "M_t(a)".into();
        m
    }

    pub fn ctx(&self) -> &Ctx {
        self.a[0].entries()[0].ctx()
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    /// `T(Z) = θ Z + Σ A_i Z^{(i)}`.
    pub fn t_action(&self, z: &[PuiseuxNumber]) -> Vec<PuiseuxNumber> {
        assert_eq!(z.len(), self.n);
        let theta = self.ctx().theta();
        let mut out: Vec<_> = z.iter().map(|x| &theta * x).collect();
        for (i, ai) in self.a.iter().enumerate() {
            let zi = Mat::column(twist(z, i as u32 + 1));
            let prod = ai * &zi;
            for (o, p) in out.iter_mut().zip(prod.entries()) {
                *o = &*o + p;
            }
        }
        out
    }

    pub fn exp_series(&self, order: usize) -> ExpSeries {
        let mut e = ExpSeries {
            motive: self.clone(),
            c: vec![Mat::identity(self.ctx(), self.n)],
        };
        e.extend_to(order);
        e
    }

    /// Smallest valuation among the entries of the `A_i`, in units.
    fn min_a_units(&self) -> Option<i64> {
        self.a.iter().filter_map(|m| m.min_val_units()).min()
    }
}

impl Serialize for MotiveSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let matrices: Vec<Vec<Vec<String>>> = self
            .a
            .iter()
            .map(|m| {
                m.to_rows()
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_string()).collect())
                    .collect()
            })
            .collect();
        let mut st = s.serialize_struct("MotiveSpec", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("matrices", &matrices)?;
        st.end()
    }
}

pub fn twist(z: &[PuiseuxNumber], j: u32) -> Vec<PuiseuxNumber> {
    z.iter().map(|x| x.frob_twist(j)).collect()
}

/// Largest order the tail certificate is allowed to reach.
pub fn max_order(q: u64) -> usize {
    // keep q^{M+1} · e comfortably inside i64
    (40.0 / (q as f64).log2()).floor() as usize
}

/// Coefficients `C_0 = I, C_1, ..., C_M` of `exp`.
#[derive(Clone, Debug)]
pub struct ExpSeries {
    pub motive: MotiveSpec,
    c: Vec<Mat>,
}

/// Lower bound for the valuations of all tail terms `C_m Z^{(m)}`, `m > M`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailCertificate {
    /// `min v(C_j)/q^j` over the last `k` coefficients, in units (`None`: all zero).
    pub gamma: Option<Ratio<i128>>,
    /// Bound for the first tail term in units (`None`: the tail vanishes).
    pub bound_units: Option<i64>,
}

/// A certified value of `exp(Z)`.
#[derive(Clone, Debug)]
pub struct ExpValue {
    pub value: Vec<PuiseuxNumber>,
    pub order: usize,
    /// Smallest valuation among the summed terms, in units.
    pub scale_units: Option<i64>,
    pub tail: TailCertificate,
}

impl ExpSeries {
    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.c
    }

    pub fn coeff(&self, m: usize) -> &Mat {
        &self.c[m]
    }

    /// `C_m = Σ_i A_i C_{m−i}^{(i)} / θ_{m0}`.
    pub fn extend_to(&mut self, order: usize) {
        let ctx = self.motive.ctx().clone();
        let n = self.motive.n;
        while self.c.len() <= order {
            let m = self.c.len();
            let mut acc = Mat::zero(&ctx, n, n);
            for (i, ai) in self.motive.a.iter().enumerate() {
                let i = i + 1;
                if i > m || ai.is_exact_zero() || self.c[m - i].is_exact_zero() {
                    continue;
                }
                acc = &acc + &(ai * &self.c[m - i].frob_twist(i as u32));
            }
            let inv = ctx.theta_diff(m as u32, 0).inv().expect("θ_{m0} ≠ 0");
            self.c.push(acc.scale(&inv));
        }
    }

    /// Tail bound for points whose entries have valuation at least `vz_units`.
    ///
    /// If `v(C_j) ≥ γ q^j` on the last `k` coefficients and
    /// `q^{M+1} + min v(A_i) ≥ 0`, the recurrence keeps `v(C_m) ≥ γ q^m` for
    /// all `m > M`, so the tail terms have valuation `≥ q^m (γ + v(Z))`.
    pub fn tail_certificate(&self, vz_units: i64) -> Result<TailCertificate> {
        let ctx = self.motive.ctx();
        let q = ctx.q() as i128;
        let e = ctx.ram() as i128;
        let big_m = self.order();
        let k = self.motive.k();
        let fail = |reason: String| Error::TailNotConvergent { order: big_m, reason };
        if big_m + 1 < k {
            return Err(fail("order below the recurrence length".into()));
        }
        let qm1 = q.pow(big_m as u32 + 1);
        if let Some(va) = self.motive.min_a_units() {
            if qm1 * e + (va as i128) < 0 {
                return Err(fail(format!(
                    "q^(M+1) does not dominate min v(A_i) = {}",
                    crate::report::ratio_str(&ctx.units_to_val(va))
                )));
            }
        }
        let mut gamma: Option<Ratio<i128>> = None;
        for j in big_m + 1 - k..=big_m {
            let lv = self.c[j].entries().iter().map(|x| x.lower_val()).min().unwrap_or(i64::MAX);
            if lv == i64::MAX {
                continue;
            }
            let g = Ratio::new(lv as i128, q.pow(j as u32));
            gamma = Some(gamma.map_or(g, |h: Ratio<i128>| h.min(g)));
        }
        let Some(g) = gamma else {
            return Ok(TailCertificate { gamma: None, bound_units: None });
        };
        let s = g + Ratio::from_integer(vz_units as i128);
        if s <= Ratio::from_integer(0) {
            return Err(fail(format!(
                "tail terms do not decrease: gamma + v(Z) = {}/{} units",
                s.numer(),
                s.denom()
            )));
        }
        let bound = (s * Ratio::from_integer(qm1)).floor().to_integer();
        Ok(TailCertificate {
            gamma,
            bound_units: Some(bound.min(i64::MAX as i128 / 4) as i64),
        })
    }

    /// `Σ_{m ≤ M} C_m Z^{(m)}`, truncated at the certified tail bound.
    ///
    /// Fails unless the tail bound reaches the precision of the partial sum.
    pub fn eval(&self, z: &[PuiseuxNumber]) -> Result<ExpValue> {
        let (sum, scale) = self.partial_sum(z);
        let vz = match z.iter().map(|x| x.lower_val()).min() {
            Some(v) if v != i64::MAX => v,
            _ => {
                return Ok(ExpValue {
                    value: sum,
                    order: self.order(),
                    scale_units: None,
                    tail: TailCertificate { gamma: None, bound_units: None },
                })
            }
        };
        let tail = self.tail_certificate(vz)?;
        let target = target_units(&sum, scale, self.motive.ctx());
        if let (Some(b), Some(t)) = (tail.bound_units, target) {
            if b < t {
                return Err(Error::TailNotConvergent {
                    order: self.order(),
                    reason: format!("tail bound {b} below target {t} (units)"),
                });
            }
        }
        let value = match tail.bound_units {
            Some(b) => sum.iter().map(|x| x.truncate(b)).collect(),
            None => sum,
        };
        Ok(ExpValue {
            value,
            order: self.order(),
            scale_units: scale,
            tail,
        })
    }

    /// Extends the series until [`eval`](Self::eval) certifies, up to [`max_order`].
    pub fn eval_adaptive(&mut self, z: &[PuiseuxNumber]) -> Result<ExpValue> {
        let limit = max_order(self.motive.ctx().q());
        loop {
            match self.eval(z) {
                Ok(v) => return Ok(v),
                Err(Error::TailNotConvergent { .. }) if self.order() < limit => {
                    let next = self.order() + 1;
                    self.extend_to(next);
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn partial_sum(&self, z: &[PuiseuxNumber]) -> (Vec<PuiseuxNumber>, Option<i64>) {
        let ctx = self.motive.ctx();
        let mut sum = vec![ctx.zero(); z.len()];
        let mut scale: Option<i64> = None;
        for (m, cm) in self.c.iter().enumerate() {
            if cm.is_exact_zero() {
                continue;
            }
            let zm = Mat::column(twist(z, m as u32));
            let term = cm * &zm;
            for (s, t) in sum.iter_mut().zip(term.entries()) {
                if let Some(v) = t.val_units() {
                    scale = Some(scale.map_or(v, |w| w.min(v)));
                }
                *s = &*s + t;
            }
        }
        (sum, scale)
    }
}

/// Precision the partial sum can support: its own precision, or scale + work.
fn target_units(sum: &[PuiseuxNumber], scale: Option<i64>, ctx: &Ctx) -> Option<i64> {
    let own = sum.iter().filter_map(|x| x.prec_units()).min();
    let nominal = scale.map(|s| s + ctx.work());
    match (own, nominal) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Outcome of comparing `exp(θZ)` with `T(exp(Z))`.
#[derive(Clone, Debug)]
pub struct FunctionalCheck {
    pub residual: Vec<PuiseuxNumber>,
    /// Smallest precision of the residual entries (`None`: exact).
    pub precision_units: Option<i64>,
    /// Scale of the compared quantities.
    pub reference_units: Option<i64>,
    pub passed: bool,
}

impl FunctionalCheck {
    pub fn certified_digits(&self) -> Option<i64> {
        match (self.precision_units, self.reference_units) {
            (Some(p), Some(r)) => Some(p - r),
            _ => None,
        }
    }
}

/// Residual `exp(θ Z) − T(exp(Z))`; passes when it vanishes with at least
/// `digits` units of precision beyond the scale of the compared values.
pub fn check_functional_equation(e: &mut ExpSeries, z: &[PuiseuxNumber]) -> Result<FunctionalCheck> {
    let ctx = e.motive.ctx().clone();
    let theta = ctx.theta();
    let tz: Vec<_> = z.iter().map(|x| &theta * x).collect();
    let lhs = e.eval_adaptive(&tz)?;
    let ez = e.eval_adaptive(z)?;
    let rhs = e.motive.t_action(&ez.value);
    let residual: Vec<_> = lhs.value.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let precision_units = residual.iter().filter_map(|x| x.prec_units()).min();
    let reference_units = [lhs.scale_units, rhs.iter().filter_map(|x| x.val_units()).min()]
        .into_iter()
        .flatten()
        .min();
    let zero = residual.iter().all(|x| x.is_zero());
    let passed = zero
        && match (precision_units, reference_units) {
            (Some(p), Some(r)) => p - r >= ctx.digits(),
            (None, _) => true,
            (Some(_), None) => false,
        };
    Ok(FunctionalCheck {
        residual,
        precision_units,
        reference_units,
        passed,
    })
}

/// `c_j = 1 / (θ_{j,j−1} ··· θ_{j0})`.
pub fn carlitz_coeff(ctx: &Ctx, j: u32) -> PuiseuxNumber {
    let mut d = ctx.one();
    for i in 0..j {
        d = &d * &ctx.theta_diff(j, i);
    }
    d.inv().expect("nonzero")
}

/// `c_{2,j}`: `1 / (θ_{j,j−2} ··· θ_{j0})` for even `j`, zero for odd `j`.
pub fn carlitz2_coeff(ctx: &Ctx, j: u32) -> PuiseuxNumber {
    if j % 2 == 1 {
        return ctx.zero();
    }
    let mut d = ctx.one();
    for i in (0..j).step_by(2) {
        d = &d * &ctx.theta_diff(j, i);
    }
    d.inv().expect("nonzero")
}
