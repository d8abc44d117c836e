//! The system `Q X = X^{(1)}` for `M_np(A)` and its reduction to a single
//! equation in `X_2`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::motive::MotiveSpec;
use crate::puiseux::{Ctx, PuiseuxNumber};
use crate::report::ser_number;

/// Polynomial `Σ x_j T^j` with [`PuiseuxNumber`] coefficients. The twist acts
/// on coefficients only.
#[derive(Clone, Debug, PartialEq)]
pub struct TSeries {
    coeffs: Vec<PuiseuxNumber>,
}

impl TSeries {
    pub fn new(coeffs: Vec<PuiseuxNumber>) -> Self {
        assert!(!coeffs.is_empty());
        TSeries { coeffs }
    }

    pub fn constant(c: PuiseuxNumber) -> Self {
        TSeries { coeffs: vec![c] }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        Self::constant(ctx.zero())
    }

    /// `T − c`.
    pub fn t_minus(c: &PuiseuxNumber) -> Self {
        TSeries {
            coeffs: vec![-c.clone(), c.ctx().one()],
        }
    }

    pub fn ctx(&self) -> &Ctx {
        self.coeffs[0].ctx()
    }

    pub fn coeffs(&self) -> &[PuiseuxNumber] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> PuiseuxNumber {
        self.coeffs.get(j).cloned().unwrap_or_else(|| self.ctx().zero())
    }

    pub fn twist(&self, j: u32) -> Self {
        TSeries {
            coeffs: self.coeffs.iter().map(|c| c.frob_twist(j)).collect(),
        }
    }

    /// Inverse twist; every coefficient must be a `q^j`-th power in the context.
    pub fn root(&self, j: u32) -> Result<Self> {
        Ok(TSeries {
            coeffs: self.coeffs.iter().map(|c| c.frob_root(j)).collect::<Result<_>>()?,
        })
    }

    pub fn scale(&self, s: &PuiseuxNumber) -> Self {
        TSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Every coefficient is zero at precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact_zero())
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Smallest absolute precision among the coefficients, in units.
    pub fn min_prec_units(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.prec_units()).min()
    }
}

impl Add for &TSeries {
    type Output = TSeries;
    fn add(self, rhs: &TSeries) -> TSeries {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        TSeries {
            coeffs: (0..n).map(|j| &self.coeff(j) + &rhs.coeff(j)).collect(),
        }
    }
}

impl Sub for &TSeries {
    type Output = TSeries;
    fn sub(self, rhs: &TSeries) -> TSeries {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        TSeries {
            coeffs: (0..n).map(|j| &self.coeff(j) - &rhs.coeff(j)).collect(),
        }
    }
}

impl Neg for &TSeries {
    type Output = TSeries;
    fn neg(self) -> TSeries {
        TSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl Mul for &TSeries {
    type Output = TSeries;
    fn mul(self, rhs: &TSeries) -> TSeries {
        let ctx = self.ctx();
        let mut out = vec![ctx.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_exact_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        TSeries { coeffs: out }
    }
}

/// Parameters `A = [[a11, a12], [a21, 1]]` of `M_np(A)`.
#[derive(Clone, Debug, Serialize)]
pub struct ElimParams {
    #[serde(serialize_with = "ser_number")]
    pub a11: PuiseuxNumber,
    #[serde(serialize_with = "ser_number")]
    pub a12: PuiseuxNumber,
    #[serde(serialize_with = "ser_number")]
    pub a21: PuiseuxNumber,
}

impl ElimParams {
    /// `d = a11 − a12 a21`.
    pub fn d(&self) -> PuiseuxNumber {
        &self.a11 - &(&self.a12 * &self.a21)
    }

    pub fn ctx(&self) -> &Ctx {
        self.a11.ctx()
    }
}

/// Matrix of `τ` on `f = (e_1, e_2, τ e_1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub entries: [[TSeries; 3]; 3],
}

impl QMatrix {
    pub fn eq_at_precision(&self, other: &QMatrix) -> bool {
        (0..3).all(|i| (0..3).all(|j| (&self.entries[i][j] - &other.entries[i][j]).is_zero()))
    }
}

/// `Q = [[0, 0, 1], [0, T−θ, −a21], [T−θ, −a12 (T−θ), −d]]`.
pub fn build_q(p: &ElimParams) -> QMatrix {
    let ctx = p.ctx();
    let z = || TSeries::zero(ctx);
    let tt = TSeries::t_minus(&ctx.theta());
    QMatrix {
        entries: [
            [z(), z(), TSeries::constant(ctx.one())],
            [z(), tt.clone(), TSeries::constant(-p.a21.clone())],
            [tt.clone(), tt.scale(&-p.a12.clone()), TSeries::constant(-p.d())],
        ],
    }
}

/// Derives `Q` from the defining relation `T e = θ e + A_1 τ e + E_11 τ^2 e`:
/// `τ e_2 = ((T−θ) e_2 − A_{21} τe_1)/A_{22}` and
/// `τ^2 e_1 = (T−θ) e_1 − A_{11} τe_1 − A_{12} τe_2`.
pub fn q_from_motive(m: &MotiveSpec) -> Result<QMatrix> {
    if m.n != 2 || m.k() != 2 {
        return Err(Error::Shape("expected T e = θe + A_1 τe + A_2 τ²e with n = 2".into()));
    }
    let ctx = m.ctx().clone();
    let (a1, a2) = (&m.a[0], &m.a[1]);
    let e11 = a2[(0, 0)] == ctx.one()
        && a2[(0, 1)].is_exact_zero()
        && a2[(1, 0)].is_exact_zero()
        && a2[(1, 1)].is_exact_zero();
    if !e11 {
        return Err(Error::Shape("A_2 must be [[1, 0], [0, 0]]".into()));
    }
    let z = || TSeries::zero(&ctx);
    let tt = TSeries::t_minus(&ctx.theta());
    let inv22 = a1[(1, 1)].inv()?;
    // rows are coordinates in (f_1, f_2, f_3)
    let tau_e2 = [z(), tt.scale(&inv22), TSeries::constant(-(&a1[(1, 0)] * &inv22))];
    let tau_f3 = [
        &tt - &tau_e2[0].scale(&a1[(0, 1)]),
        (-&tau_e2[1]).scale(&a1[(0, 1)]),
        &TSeries::constant(-a1[(0, 0)].clone()) - &tau_e2[2].scale(&a1[(0, 1)]),
    ];
    Ok(QMatrix {
        entries: [[z(), z(), TSeries::constant(ctx.one())], tau_e2, tau_f3],
    })
}

/// Residuals of `X_3 = X_1^{(1)}`, `(T−θ)X_2 − a21 X_3 = X_2^{(1)}` and
/// `(T−θ)X_1 − a12(T−θ)X_2 − d X_3 = X_3^{(1)}`, i.e. `Q X − X^{(1)}`.
pub fn residual_system(q: &QMatrix, x: &[TSeries; 3]) -> [TSeries; 3] {
    std::array::from_fn(|i| {
        let qx = (0..3).fold(TSeries::zero(x[0].ctx()), |acc, j| &acc + &(&q.entries[i][j] * &x[j]));
        &qx - &x[i].twist(1)
    })
}

/// Builds `X_1, X_3` from `X_2` so that the first two equations hold:
/// `X_3 = X_1^{(1)} = ((T−θ) X_2 − X_2^{(1)}) / a21`.
pub fn complete_from_x2(p: &ElimParams, x2: &TSeries) -> Result<[TSeries; 3]> {
    let ctx = p.ctx();
    if p.a21.is_zero() {
        return Err(Error::ZeroParameter("a21"));
    }
    let inv = p.a21.inv()?;
    let y = (&(&TSeries::t_minus(&ctx.theta()) * x2) - &x2.twist(1)).scale(&inv);
    let x1 = y.root(1)?;
    Ok([x1, x2.clone(), y])
}

/// The left side of the single equation in `X_2`:
/// `X_2^{(3)}/a21^{q²} + (−T/a21^{q²} + v) X_2^{(2)} − (T−θ^q) u X_2^{(1)}
///  + (T−θ^q)(T−θ)/a21 · X_2`.
pub fn eliminated_residual(p: &ElimParams, x2: &TSeries) -> Result<TSeries> {
    let uv = uv_reparam(p)?;
    Ok(eliminated_residual_uv(&p.a21, &uv.u, &uv.v, x2))
}

pub fn eliminated_residual_uv(
    a21: &PuiseuxNumber,
    u: &PuiseuxNumber,
    v: &PuiseuxNumber,
    x2: &TSeries,
) -> TSeries {
    let ctx = a21.ctx();
    let inv_q2 = a21.frob_twist(2).inv().expect("a21 ≠ 0");
    let t = TSeries::new(vec![ctx.zero(), ctx.one()]);
    let tq = TSeries::t_minus(&ctx.theta_qpow(1));
    let t0 = TSeries::t_minus(&ctx.theta());
    let c3 = TSeries::constant(inv_q2.clone());
    let c2 = &TSeries::constant(v.clone()) - &t.scale(&inv_q2);
    let c1 = tq.scale(&-u.clone());
    let c0 = (&tq * &t0).scale(&a21.inv().expect("a21 ≠ 0"));
    let terms = [
        &c3 * &x2.twist(3),
        &c2 * &x2.twist(2),
        &c1 * &x2.twist(1),
        &c0 * x2,
    ];
    terms.iter().fold(TSeries::zero(ctx), |acc, t| &acc + t)
}

/// The same equation in the original parameters, with
/// `X_1^{(1)}, X_1^{(2)}, X_1^{(3)}` substituted step by step into
/// `(T−θ^q)X_1^{(1)} − a12^q(T−θ^q)X_2^{(1)} − d^q X_1^{(2)} − X_1^{(3)}`.
pub fn chain_residual(p: &ElimParams, x2: &TSeries) -> Result<TSeries> {
    let ctx = p.ctx();
    if p.a21.is_zero() {
        return Err(Error::ZeroParameter("a21"));
    }
    let x1 = |j: u32| -> Result<TSeries> {
        // X_1^{(j)} = ((T − θ^{q^{j−1}}) X_2^{(j−1)} − X_2^{(j)}) / a21^{q^{j−1}}
        let inv = p.a21.frob_twist(j - 1).inv()?;
        let tj = TSeries::t_minus(&ctx.theta_qpow(j - 1));
        Ok((&(&tj * &x2.twist(j - 1)) - &x2.twist(j)).scale(&inv))
    };
    let tq = TSeries::t_minus(&ctx.theta_qpow(1));
    let lhs = &(&(&tq * &x1(1)?) - &(&tq * &x2.twist(1)).scale(&p.a12.frob_twist(1)))
        - &(&x1(2)?.scale(&p.d().frob_twist(1)) + &x1(3)?);
    Ok(lhs)
}

#[derive(Clone, Debug, Serialize)]
pub struct UV {
    #[serde(serialize_with = "ser_number")]
    pub a21: PuiseuxNumber,
    #[serde(serialize_with = "ser_number")]
    pub u: PuiseuxNumber,
    #[serde(serialize_with = "ser_number")]
    pub v: PuiseuxNumber,
    /// Both printed expressions for `u` agree at precision.
    pub u_forms_agree: bool,
}

/// `u = 1/a21 + a12^q + d^q/a21^q`, `v = d^q/a21^q + θ^{q²}/a21^{q²}`.
pub fn uv_reparam(p: &ElimParams) -> Result<UV> {
    let ctx = p.ctx();
    if p.a21.is_zero() {
        return Err(Error::ZeroParameter("a21"));
    }
    let inv = p.a21.inv()?;
    let inv_q = inv.frob_twist(1);
    let dq = p.d().frob_twist(1);
    let u = &(&inv + &p.a12.frob_twist(1)) + &(&dq * &inv_q);
    let u_alt = &inv + &(&p.a11.frob_twist(1) * &inv_q);
    let v = &(&dq * &inv_q) + &(&ctx.theta_qpow(2) * &inv.frob_twist(2));
    Ok(UV {
        a21: p.a21.clone(),
        u_forms_agree: (&u - &u_alt).is_zero(),
        u,
        v,
    })
}

/// Inverse of [`uv_reparam`]: `a11 = ((u − 1/a21) a21^q)^{1/q}`,
/// `d = ((v − θ^{q²}/a21^{q²}) a21^q)^{1/q}`, `a12 = (a11 − d)/a21`.
pub fn uv_inverse(a21: &PuiseuxNumber, u: &PuiseuxNumber, v: &PuiseuxNumber) -> Result<ElimParams> {
    let ctx = a21.ctx();
    if a21.is_zero() {
        return Err(Error::ZeroParameter("a21"));
    }
    let inv = a21.inv()?;
    let a21q = a21.frob_twist(1);
    let a11 = (&(u - &inv) * &a21q).frob_root(1)?;
    let d = (&(v - &(&ctx.theta_qpow(2) * &inv.frob_twist(2))) * &a21q).frob_root(1)?;
    let a12 = &(&a11 - &d) * &inv;
    Ok(ElimParams {
        a11,
        a12,
        a21: a21.clone(),
    })
}

/// Outcome of the elimination identities for one instance.
#[derive(Clone, Debug, Serialize)]
pub struct ElimCheck {
    /// The first two residuals vanish for the constructed `X`.
    pub first_two_vanish: bool,
    /// `R_3^{(1)}` equals the eliminated residual.
    pub third_matches: bool,
    /// The step-by-step substitution equals the closed `(u, v)` form.
    pub chain_matches: bool,
    pub precision_units: Option<i64>,
}

impl ElimCheck {
    pub fn passed(&self) -> bool {
        self.first_two_vanish && self.third_matches && self.chain_matches
    }
}

pub fn check_elimination(p: &ElimParams, x2: &TSeries) -> Result<ElimCheck> {
    let q = build_q(p);
    let x = complete_from_x2(p, x2)?;
    let r = residual_system(&q, &x);
    let elim = eliminated_residual(p, x2)?;
    let chain = chain_residual(p, x2)?;
    let diff3 = &r[2].twist(1) - &elim;
    let diffc = &chain - &elim;
    let precision_units = [&r[0], &r[1], &diff3, &diffc]
        .iter()
        .filter_map(|s| s.min_prec_units())
        .min();
    Ok(ElimCheck {
        first_two_vanish: r[0].is_zero() && r[1].is_zero(),
        third_matches: diff3.is_zero(),
        chain_matches: diffc.is_zero(),
        precision_units,
    })
}

/// Context whose value group admits the `q`-th roots used above.
pub fn elim_context(q: u64) -> Result<Ctx> {
    Ctx::new(q)?.with_ram(q as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Mat;
    use crate::sample;
    use rand::Rng;

    fn params(c: &Ctx, rng: &mut impl Rng) -> ElimParams {
        let r = |rng: &mut _| sample::random_number(c, rng, -c.ram(), 3);
        ElimParams {
            a11: r(rng),
            a12: r(rng),
            a21: r(rng),
        }
    }

    fn x2(c: &Ctx, rng: &mut impl Rng, order: usize) -> TSeries {
        TSeries::new((0..order).map(|_| sample::random_number(c, rng, -c.ram(), 3)).collect())
    }

    #[test]
    fn q_shape() {
        let c = elim_context(2).unwrap();
        let z = c.zero();
        let q = build_q(&ElimParams { a11: z.clone(), a12: z.clone(), a21: z.clone() });
        assert!(q.entries[2][2].is_exact_zero());
        let mut rng = sample::rng(1);
        let p = params(&c, &mut rng);
        let q = build_q(&p);
        assert_eq!(q.entries[2][2].coeff(0), -(&p.a11 - &(&p.a12 * &p.a21)));
        assert_eq!(q.entries[1][1], TSeries::t_minus(&c.theta()));
        assert_eq!(q.entries[1][2].coeff(0), -p.a21.clone());
        assert!(q.entries[1][0].is_exact_zero());
    }

    #[test]
    fn q_matches_motive() {
        for q in [2, 3] {
            let c = elim_context(q).unwrap();
            let mut rng = sample::rng(4);
            let p = params(&c, &mut rng);
            let a = Mat::from_rows(vec![
                vec![p.a11.clone(), p.a12.clone()],
                vec![p.a21.clone(), c.one()],
            ])
            .unwrap();
            let m = MotiveSpec::nonpure(&a).unwrap();
            assert!(q_from_motive(&m).unwrap().eq_at_precision(&build_q(&p)));
        }
    }

    #[test]
    fn zero_x_has_zero_residuals() {
        let c = elim_context(2).unwrap();
        let mut rng = sample::rng(2);
        let p = params(&c, &mut rng);
        let z = TSeries::zero(&c);
        let r = residual_system(&build_q(&p), &[z.clone(), z.clone(), z.clone()]);
        assert!(r.iter().all(|s| s.is_exact_zero()));
        assert!(eliminated_residual(&p, &z).unwrap().is_exact_zero());
    }

    #[test]
    fn first_residual_is_definition() {
        let c = elim_context(3).unwrap();
        let mut rng = sample::rng(3);
        let p = params(&c, &mut rng);
        let x = [x2(&c, &mut rng, 4), x2(&c, &mut rng, 4), x2(&c, &mut rng, 4)];
        let r = residual_system(&build_q(&p), &x);
        assert_eq!(r[0], &x[2] - &x[0].twist(1));
    }

    #[test]
    fn elimination_identities() {
        for q in [2, 3] {
            let c = elim_context(q).unwrap();
            let mut rng = sample::rng(10 + q);
            for _ in 0..10 {
                let p = params(&c, &mut rng);
                let order = rng.gen_range(1..=6);
                let chk = check_elimination(&p, &x2(&c, &mut rng, order)).unwrap();
                assert!(chk.passed(), "q={q}: {chk:?}");
            }
        }
    }

    #[test]
    fn x2_coefficient_matches_v() {
        let c = elim_context(2).unwrap();
        let mut rng = sample::rng(6);
        let p = params(&c, &mut rng);
        let uv = uv_reparam(&p).unwrap();
        let d = p.d();
        let v = &(&d.frob_twist(1) * &p.a21.frob_twist(1).inv().unwrap())
            + &(&c.theta_qpow(2) * &p.a21.frob_twist(2).inv().unwrap());
        assert!((&uv.v - &v).is_zero());
    }

    #[test]
    fn uv_round_trip_and_forms() {
        for q in [2, 3] {
            let c = elim_context(q).unwrap();
            let mut rng = sample::rng(7);
            for _ in 0..5 {
                let p = params(&c, &mut rng);
                let uv = uv_reparam(&p).unwrap();
                assert!(uv.u_forms_agree);
                let back = uv_inverse(&uv.a21, &uv.u, &uv.v).unwrap();
                assert!((&back.a11 - &p.a11).is_zero());
                assert!((&back.a12 - &p.a12).is_zero());
            }
            let a21 = c.theta();
            let p = ElimParams { a11: c.zero(), a12: c.zero(), a21: a21.clone() };
            let uv = uv_reparam(&p).unwrap();
            assert_eq!(uv.u, a21.inv().unwrap());
            assert!((&uv.v - &(&c.theta_qpow(2) * &a21.frob_twist(2).inv().unwrap())).is_zero());
        }
    }

    #[test]
    fn zero_a21_is_rejected() {
        let c = elim_context(2).unwrap();
        let p = ElimParams { a11: c.one(), a12: c.one(), a21: c.zero() };
        assert!(matches!(eliminated_residual(&p, &TSeries::zero(&c)), Err(Error::ZeroParameter(_))));
        assert!(matches!(uv_reparam(&p), Err(Error::ZeroParameter(_))));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn twist_is_additive_and_multiplicative(seed in 0u64..1000, j in 1u32..3) {
            let c = elim_context(3).unwrap();
            let mut rng = sample::rng(seed);
            let (x, y) = (x2(&c, &mut rng, 3), x2(&c, &mut rng, 4));
            proptest::prop_assert!((&(&x + &y).twist(j) - &(&x.twist(j) + &y.twist(j))).is_zero());
            proptest::prop_assert!((&(&x * &y).twist(j) - &(&x.twist(j) * &y.twist(j))).is_zero());
            proptest::prop_assert!((&x.twist(1).root(1).unwrap() - &x).is_zero());
        }
    }
}
