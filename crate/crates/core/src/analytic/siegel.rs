//! `D(a)`, `D_ω(a)`, the coefficients `𝔡_i`, and `𝔰(a)` with its local inverse.

use num_rational::Ratio;
use serde::Serialize;

use super::Analytic;
use crate::error::{Error, Result};
use crate::motive::{max_order, MotiveSpec};
use crate::puiseux::PuiseuxNumber;
use crate::report::{ser_number, ser_numbers, ser_ratio};

#[derive(Clone, Debug, Serialize)]
pub struct DSeries {
    #[serde(serialize_with = "ser_number")]
    pub d: PuiseuxNumber,
    #[serde(serialize_with = "ser_number")]
    pub d_omega: PuiseuxNumber,
    /// `𝔡_0, 𝔡_1, ...`
    #[serde(serialize_with = "ser_numbers")]
    pub frak_d: Vec<PuiseuxNumber>,
    /// `D(a) = Σ 𝔡_i a^{q^i}` and the `ω`-twisted analogue hold at precision.
    pub agreement: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SiegelS {
    #[serde(serialize_with = "ser_number")]
    pub s: PuiseuxNumber,
    #[serde(serialize_with = "ser_number")]
    pub z22: PuiseuxNumber,
    #[serde(serialize_with = "ser_number")]
    pub z32: PuiseuxNumber,
    #[serde(serialize_with = "ser_number")]
    pub d: PuiseuxNumber,
    #[serde(serialize_with = "ser_number")]
    pub d_omega: PuiseuxNumber,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalInverse {
    #[serde(serialize_with = "ser_number")]
    pub a: PuiseuxNumber,
    /// `𝔰` is inverted on `v(s11) > bound`.
    #[serde(serialize_with = "ser_ratio")]
    pub bound: Ratio<i64>,
    pub iterations: usize,
}

impl Analytic {
    /// `𝔡_0, ..., 𝔡_{count−1}` with `𝔡_i = Σ_m coef_{m,i} π_2^{q^m}`, where
    /// `d_m(a) = Σ_i coef_{m,i} a^{q^i}`.
    ///
    /// For `m > M` every `coef_{m,i}` and `c_{2,m}` has valuation at least
    /// `Γ q^m`, `Γ` taken over the last two orders, so the tail terms have
    /// valuation at least `q^m (Γ + v(π_2))`.
    pub fn frak_d(&self, count: usize) -> Result<Vec<PuiseuxNumber>> {
        let ctx = self.ctx.clone();
        let pi2 = self.pi2()?;
        let vpi2 = pi2.val_units().expect("nonzero period");
        let limit = max_order(ctx.q());
        let mut order = count.max(2);
        loop {
            let c2 = self.exp_c2_series(order);
            // coef[m][i], i < m
            let mut coef: Vec<Vec<PuiseuxNumber>> = vec![vec![]];
            for m in 1..=order {
                let inv = ctx.theta_diff(m as u32, 0).inv()?;
                let mut row = vec![&c2.coeffs()[m - 1].frob_twist(1) * &inv];
                for i in 1..m {
                    row.push(&coef[m - 1][i - 1].frob_twist(1) * &inv);
                }
                coef.push(row);
            }
            let q = ctx.q() as i128;
            let mut gamma: Option<Ratio<i128>> = None;
            for j in order - 1..=order {
                let lv = coef[j]
                    .iter()
                    .chain(std::iter::once(&c2.coeffs()[j]))
                    .map(|x| x.lower_val())
                    .min()
                    .unwrap_or(i64::MAX);
                if lv != i64::MAX {
                    let g = Ratio::new(lv as i128, q.pow(j as u32));
                    gamma = Some(gamma.map_or(g, |h| h.min(g)));
                }
            }
            let gamma = gamma.expect("nonzero coefficients");
            let s = gamma + Ratio::from_integer(vpi2 as i128);
            let mut out = vec![];
            for i in 0..count {
                let mut acc = ctx.zero();
                for m in (i + 1..=order).step_by(2) {
                    acc = acc + &coef[m][i] * &pi2.frob_twist(m as u32);
                }
                out.push(acc);
            }
            if s > Ratio::from_integer(0) {
                let bound = (s * Ratio::from_integer(q.pow(order as u32 + 1))).floor().to_integer();
                let bound = bound.min(i64::MAX as i128 / 4) as i64;
                let target = out
                    .iter()
                    .map(|x| x.prec_units().unwrap_or(x.lower_val().saturating_add(ctx.work())))
                    .min()
                    .unwrap_or(i64::MAX);
                if bound >= target.min(out[0].lower_val() + ctx.work()) {
                    return Ok(out.into_iter().map(|x| x.truncate(bound)).collect());
                }
            }
            if order >= limit {
                return Err(Error::TailNotConvergent {
                    order,
                    reason: "𝔡 series tail not certified".into(),
                });
            }
            order += 1;
        }
    }

    /// `(D(a), D_ω(a))`: the second coordinates of `exp_{M_t(a)}` at
    /// `(π_2, 0)` and `(ω π_2, 0)`.
    pub fn d_pair(&self, a: &PuiseuxNumber) -> Result<(PuiseuxNumber, PuiseuxNumber)> {
        let ctx = &self.ctx;
        let pi2 = self.pi2()?;
        let mut e = MotiveSpec::mt(a).exp_series(2);
        let d = e.eval_adaptive(&[pi2.clone(), ctx.zero()])?.value[1].clone();
        let dw = e.eval_adaptive(&[&ctx.omega() * &pi2, ctx.zero()])?.value[1].clone();
        Ok((d, dw))
    }

    pub fn d_series(&self, a: &PuiseuxNumber, count: usize) -> Result<DSeries> {
        let ctx = &self.ctx;
        let (d, d_omega) = self.d_pair(a)?;
        let frak_d = self.frak_d(count)?;
        let omega = ctx.omega();
        let omega_bar = omega.frob_twist(1);
        let mut sum = ctx.zero();
        let mut sum_w = ctx.zero();
        for (i, di) in frak_d.iter().enumerate() {
            let t = di * &a.frob_twist(i as u32);
            let w = if i % 2 == 0 { &omega_bar } else { &omega };
            sum_w = sum_w + w * &t;
            sum = sum + t;
        }
        let agreement = (&d - &sum).is_zero() && (&d_omega - &sum_w).is_zero();
        Ok(DSeries {
            d,
            d_omega,
            frak_d,
            agreement,
        })
    }

    /// `𝔰(a) = (log_𝔠(−D_ω(a)) − ω log_𝔠(−D(a))) / π_1`.
    pub fn siegel_s(&self, a: &PuiseuxNumber) -> Result<SiegelS> {
        let (d, d_omega) = self.d_pair(a)?;
        let z22 = self.log_c(&-d.clone())?.value;
        let z32 = self.log_c(&-d_omega.clone())?.value;
        let s = (&z32 - &(&self.ctx.omega() * &z22)).div(&self.pi1()?)?;
        Ok(SiegelS {
            s,
            z22,
            z32,
            d,
            d_omega,
        })
    }

    /// Coefficients `σ_j` of the additive series `𝔰(a) = Σ σ_j a^{q^j}`.
    pub fn s_coefficients(&self, count: usize) -> Result<Vec<PuiseuxNumber>> {
        let ctx = &self.ctx;
        let fd = self.frak_d(count)?;
        let log = self.log_c_series(count.saturating_sub(1).max(1))?;
        let omega = ctx.omega();
        let omega_bar = omega.frob_twist(1);
        let pi1_inv = self.pi1()?.inv()?;
        let mut out = vec![];
        for j in 0..count {
            let mut acc = ctx.zero();
            for i in 0..=j {
                let n = (j - i) as u32;
                let w = if i % 2 == 0 { &omega_bar } else { &omega };
                let di = fd[i].frob_twist(n);
                let dwi = (w * &fd[i]).frob_twist(n);
                acc = acc + &log.coeffs()[n as usize] * &(&dwi - &(&omega * &di));
            }
            out.push(-(&acc * &pi1_inv));
        }
        Ok(out)
    }

    /// Lower bound on `v(s11)` for which [`local_inverse_s`](Self::local_inverse_s)
    /// is certified: the fixed-point map contracts and `D(a)` stays in the
    /// log domain.
    pub fn s_neighborhood(&self) -> Result<(Ratio<i64>, Vec<PuiseuxNumber>)> {
        let sigma = self.s_coefficients(4)?;
        let q = self.ctx.q() as i64;
        let v0 = sigma[0]
            .valuation()
            .ok_or_else(|| Error::InsufficientPrecision("σ_0 vanishes at precision".into()))?;
        let fd0 = self.frak_d(1)?[0].valuation().expect("𝔡_0 ≠ 0");
        let mut radius = self.v_pi1() - fd0;
        for (j, s) in sigma.iter().enumerate().skip(1) {
            if let Some(vj) = s.valuation() {
                let r = (v0 - vj) / Ratio::from_integer(q.pow(j as u32) - 1);
                radius = radius.max(r);
            }
        }
        Ok((v0 + radius, sigma))
    }

    /// Solves `𝔰(a) = s11` by `a ← a − (𝔰(a) − s11)/σ_0`.
    pub fn local_inverse_s(&self, s11: &PuiseuxNumber) -> Result<LocalInverse> {
        let (bound, sigma) = self.s_neighborhood()?;
        if s11.is_zero() {
            return Ok(LocalInverse {
                a: self.ctx.zero(),
                bound,
                iterations: 0,
            });
        }
        let vs = s11.valuation().expect("nonzero");
        if vs <= bound {
            return Err(Error::OutsideNeighborhood { valuation: vs, bound });
        }
        let s0_inv = sigma[0].inv()?;
        let mut a = s11 * &s0_inv;
        let mut last = i64::MIN;
        for it in 1..=64 {
            let r = &self.siegel_s(&a)?.s - s11;
            if r.is_zero() {
                return Ok(LocalInverse {
                    a,
                    bound,
                    iterations: it,
                });
            }
            let v = r.val_units().expect("nonzero");
            if v <= last {
                return Err(Error::ContractionFailure(format!(
                    "𝔰 residual valuation stalled at {v} units"
                )));
            }
            last = v;
            a = &a - &(&r * &s0_inv);
        }
        Err(Error::ContractionFailure("no convergence in 64 steps".into()))
    }
}

#[cfg(test)]
mod tests {
    use crate::analytic::Analytic;
    use crate::error::Error;
    use crate::puiseux::Ctx;
    use crate::sample;
    use num_rational::Ratio;

    #[test]
    fn frak_d0_valuation_and_agreement() {
        for q in [2, 3] {
            let an = Analytic::new(&Ctx::new(q).unwrap());
            let c = an.ctx().clone();
            let fd = an.frak_d(3).unwrap();
            let qi = q as i64;
            assert_eq!(fd[0].valuation(), Some(Ratio::new(-qi, qi * qi - 1)));
            let mut rng = sample::rng(2);
            let a = sample::random_number(&c, &mut rng, 0, 3);
            let ds = an.d_series(&a, 6).unwrap();
            assert!(ds.agreement, "q={q}");
            let zero = an.d_series(&c.zero(), 2).unwrap();
            assert!(zero.d.is_zero() && zero.d_omega.is_zero());
        }
    }

    #[test]
    fn s_vanishes_at_zero_and_solves_kernel_equation() {
        let an = Analytic::new(&Ctx::new(2).unwrap());
        let c = an.ctx().clone();
        assert!(an.siegel_s(&c.zero()).unwrap().s.is_zero());
        let a = c.t();
        let s = an.siegel_s(&a).unwrap();
        let e = an.exp_c(&s.z22).unwrap();
        assert!((&e.value[0] + &s.d).is_zero());
    }

    #[test]
    fn s_leading_term() {
        let an = Analytic::new(&Ctx::new(2).unwrap());
        let c = an.ctx().clone();
        let omega = c.omega();
        let lead = (&an.frak_d(1).unwrap()[0] * &(&omega - &omega.frob_twist(1)))
            .div(&an.pi1().unwrap())
            .unwrap();
        let sigma = an.s_coefficients(2).unwrap();
        assert!((&sigma[0] - &lead).is_zero());
        for a in [c.t(), &c.t() * &c.t()] {
            let s = an.siegel_s(&a).unwrap().s;
            let approx = &lead * &a;
            assert!((&s - &approx).lower_val() > approx.lower_val());
        }
    }

    #[test]
    fn local_inverse_round_trip() {
        let an = Analytic::new(&Ctx::new(2).unwrap());
        let c = an.ctx().clone();
        assert!(an.local_inverse_s(&c.zero()).unwrap().a.is_zero());
        let a0 = &c.t() * &c.omega();
        let s = an.siegel_s(&a0).unwrap().s;
        let inv = an.local_inverse_s(&s).unwrap();
        assert!((&an.siegel_s(&inv.a).unwrap().s - &s).is_zero());
        let big = &c.theta() * &c.theta();
        assert!(matches!(
            an.local_inverse_s(&big),
            Err(Error::OutsideNeighborhood { .. })
        ));
    }
}
