//! Carlitz exponential and logarithm, the periods `π_1`, `π_2`, and the
//! series `D(a)`, `D_ω(a)`, `𝔰(a)` attached to `M_t(a)`.

mod siegel;

use std::sync::{Mutex, OnceLock};

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Fe;
use crate::motive::{max_order, ExpSeries, ExpValue, MotiveSpec};
use crate::puiseux::{Ctx, PuiseuxNumber};
use crate::report::ser_opt_ratio;

pub use siegel::{DSeries, LocalInverse, SiegelS};

/// `Σ_m g_m z^{q^m}` truncated at order `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveSeries {
    coeffs: Vec<PuiseuxNumber>,
}

impl AdditiveSeries {
    pub fn new(coeffs: Vec<PuiseuxNumber>) -> Result<Self> {
        match coeffs.first() {
            Some(g0) if *g0 == g0.ctx().one() => Ok(AdditiveSeries { coeffs }),
            _ => Err(Error::InvalidParameter("additive series must start with 1".into())),
        }
    }

    pub fn identity(ctx: &Ctx) -> Self {
        AdditiveSeries { coeffs: vec![ctx.one()] }
    }

    /// Coefficients of a one-dimensional exponential.
    pub fn from_exp(e: &ExpSeries) -> Self {
        assert_eq!(e.motive.n, 1, "additive series need dimension 1");
        AdditiveSeries {
            coeffs: e.coeffs().iter().map(|c| c[(0, 0)].clone()).collect(),
        }
    }

    pub fn ctx(&self) -> &Ctx {
        self.coeffs[0].ctx()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[PuiseuxNumber] {
        &self.coeffs
    }

    /// The truncated sum, with no tail estimate.
    pub fn eval_truncated(&self, z: &PuiseuxNumber) -> PuiseuxNumber {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.is_exact_zero())
            .fold(self.ctx().zero(), |acc, (m, g)| acc + g * &z.frob_twist(m as u32))
    }

    /// `(self ∘ other)` truncated at the smaller order.
    pub fn compose(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let ctx = self.ctx();
        let coeffs = (0..=order)
            .map(|n| {
                (0..=n).fold(ctx.zero(), |acc, m| {
                    acc + &self.coeffs[m] * &other.coeffs[n - m].frob_twist(m as u32)
                })
            })
            .collect();
        AdditiveSeries { coeffs }
    }
}

/// Compositional inverse: `g_n = −Σ_{m=1..n} f_m g_{n−m}^{q^m}`.
pub fn series_inverse(f: &AdditiveSeries, order: usize) -> Result<AdditiveSeries> {
    if order > f.order() {
        return Err(Error::InvalidParameter(format!(
            "series known to order {} only",
            f.order()
        )));
    }
    let ctx = f.ctx();
    let mut g = vec![ctx.one()];
    for n in 1..=order {
        let s = (1..=n).fold(ctx.zero(), |acc, m| {
            acc + &f.coeffs[m] * &g[n - m].frob_twist(m as u32)
        });
        g.push(-s);
    }
    Ok(AdditiveSeries { coeffs: g })
}

/// A segment of the Newton polygon of `Σ g_m z^{q^m}` with points `(q^m, v(g_m))`.
#[derive(Clone, Debug)]
pub struct NewtonSegment {
    /// Valuation of the roots belonging to this segment.
    pub root_valuation: Ratio<i64>,
    /// Indices `m` of the points on the segment.
    pub points: Vec<usize>,
}

pub fn newton_segments(f: &AdditiveSeries) -> Vec<NewtonSegment> {
    let ctx = f.ctx();
    let pts: Vec<(usize, i128, i128)> = f
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(m, g)| g.val_units().map(|v| (m, (ctx.q() as i128).pow(m as u32), v as i128)))
        .collect();
    let mut hull: Vec<(usize, i128, i128)> = vec![];
    for p in pts.iter().copied() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above the chord a–p
            if (b.2 - a.2) * (p.1 - a.1) >= (p.2 - a.2) * (b.1 - a.1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let rho_units = Ratio::new(-(b.2 - a.2), b.1 - a.1);
            let points = pts
                .iter()
                .filter(|p| p.1 >= a.1 && p.1 <= b.1 && (p.2 - a.2) * (b.1 - a.1) == (b.2 - a.2) * (p.1 - a.1))
                .map(|p| p.0)
                .collect();
            NewtonSegment {
                root_valuation: Ratio::new(*rho_units.numer() as i64, (*rho_units.denom() as i64) * ctx.ram()),
                points,
            }
        })
        .collect()
}

/// A certified nonzero kernel element.
#[derive(Clone, Debug)]
pub struct KernelRoot {
    pub z: PuiseuxNumber,
    pub leading: Fe,
    pub iterations: usize,
    /// Precision of the vanishing residual beyond its scale, in units.
    pub residual_digits: Option<i64>,
}

/// Finds a nonzero root of valuation `slope_target`, starting from the
/// Newton-polygon leading term and refining with `z ← z − f(z)`.
///
/// `evaluate` must return `f(z)` with a certified precision.
pub fn kernel_generator(
    f: &AdditiveSeries,
    slope_target: Ratio<i64>,
    mut evaluate: impl FnMut(&PuiseuxNumber) -> Result<ExpValue>,
) -> Result<KernelRoot> {
    let ctx = f.ctx().clone();
    let seg = newton_segments(f)
        .into_iter()
        .find(|s| s.root_valuation == slope_target)
        .ok_or(Error::NoSuchSlope(slope_target))?;
    let rho = slope_target * Ratio::from_integer(ctx.ram());
    if !rho.is_integer() {
        return Err(Error::InvalidParameter(format!(
            "root valuation {} needs more ramification",
            crate::report::ratio_str(&slope_target)
        )));
    }
    let rho = rho.to_integer();
    let tower = ctx.tower();
    let field = tower.field();
    let lcs: Vec<(usize, Fe)> = seg
        .points
        .iter()
        .map(|&m| (m, f.coeffs[m].leading_coeff().expect("nonzero")))
        .collect();
    let leading = field
        .elements()
        .filter(|c| *c != 0)
        .find(|&c| {
            lcs.iter()
                .fold(0, |acc, &(m, g)| field.add(acc, field.mul(g, tower.frobenius(c, m as u32))))
                == 0
        })
        .ok_or_else(|| {
            Error::InsufficientPrecision("segment equation has no root in the constant field".into())
        })?;

    let mut z = ctx.monomial(leading, rho);
    let mut last_err = i64::MIN;
    for it in 1..=64 {
        let fz = evaluate(&z)?;
        let r = &fz.value[0];
        if r.is_zero() {
            let p = r.prec_units();
            let digits = match (p, fz.scale_units) {
                (Some(p), Some(s)) => Some(p - s),
                _ => None,
            };
            if digits.is_some_and(|d| d < ctx.digits()) {
                return Err(Error::InsufficientPrecision(format!(
                    "residual certified to {} units only",
                    digits.unwrap_or(0)
                )));
            }
            let z = match p {
                Some(p) => z.truncate(p),
                None => z,
            };
            return Ok(KernelRoot {
                z,
                leading,
                iterations: it,
                residual_digits: digits,
            });
        }
        let v = r.val_units().expect("nonzero");
        if v <= last_err || v <= rho {
            return Err(Error::ContractionFailure(format!(
                "residual valuation {} did not increase (previous {}) at step {it}",
                v, last_err
            )));
        }
        last_err = v;
        z = &z - r;
    }
    Err(Error::ContractionFailure("no convergence in 64 steps".into()))
}

/// `π_1`, `π_2` and their residual certificates.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodData {
    #[serde(serialize_with = "crate::report::ser_number")]
    pub pi1: PuiseuxNumber,
    #[serde(serialize_with = "crate::report::ser_number")]
    pub pi2: PuiseuxNumber,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub v_pi1: Option<Ratio<i64>>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub v_pi2: Option<Ratio<i64>>,
    pub residual_digits_pi1: Option<i64>,
    pub residual_digits_pi2: Option<i64>,
}

/// A certified value of `log_𝔠(w)`.
#[derive(Clone, Debug)]
pub struct LogValue {
    pub value: PuiseuxNumber,
    pub order: usize,
}

/// Cached Carlitz data for one arithmetic context.
pub struct Analytic {
    ctx: Ctx,
    carlitz: Mutex<ExpSeries>,
    carlitz2: Mutex<ExpSeries>,
    log: Mutex<AdditiveSeries>,
    periods: OnceLock<std::result::Result<PeriodData, Error>>,
}

impl Analytic {
    pub fn new(ctx: &Ctx) -> Self {
        Analytic {
            ctx: ctx.clone(),
            carlitz: Mutex::new(MotiveSpec::carlitz(ctx).exp_series(2)),
            carlitz2: Mutex::new(MotiveSpec::carlitz2(ctx).exp_series(2)),
            log: Mutex::new(AdditiveSeries::identity(ctx)),
            periods: OnceLock::new(),
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn exp_c(&self, z: &PuiseuxNumber) -> Result<ExpValue> {
        self.carlitz.lock().expect("lock").eval_adaptive(std::slice::from_ref(z))
    }

    pub fn exp_c2(&self, z: &PuiseuxNumber) -> Result<ExpValue> {
        self.carlitz2.lock().expect("lock").eval_adaptive(std::slice::from_ref(z))
    }

    /// `exp_𝔠` as an additive series of order at least `order`.
    pub fn exp_c_series(&self, order: usize) -> AdditiveSeries {
        let mut e = self.carlitz.lock().expect("lock");
        e.extend_to(order);
        AdditiveSeries::from_exp(&e)
    }

    pub fn exp_c2_series(&self, order: usize) -> AdditiveSeries {
        let mut e = self.carlitz2.lock().expect("lock");
        e.extend_to(order);
        AdditiveSeries::from_exp(&e)
    }

    /// `log_𝔠` coefficients to order `order`.
    pub fn log_c_series(&self, order: usize) -> Result<AdditiveSeries> {
        let mut l = self.log.lock().expect("lock");
        if l.order() < order {
            *l = series_inverse(&self.exp_c_series(order), order)?;
        }
        Ok(AdditiveSeries {
            coeffs: l.coeffs[..=order].to_vec(),
        })
    }

    /// `v(π_1) = −q/(q−1)`.
    pub fn v_pi1(&self) -> Ratio<i64> {
        let q = self.ctx.q() as i64;
        Ratio::new(-q, q - 1)
    }

    /// `v(π_2) = −q²/(q²−1)`.
    pub fn v_pi2(&self) -> Ratio<i64> {
        let q = self.ctx.q() as i64;
        Ratio::new(-q * q, q * q - 1)
    }

    pub fn periods(&self) -> Result<&PeriodData> {
        self.periods
            .get_or_init(|| self.compute_periods())
            .as_ref()
            .map_err(|e| e.clone())
    }

    pub fn pi1(&self) -> Result<PuiseuxNumber> {
        Ok(self.periods()?.pi1.clone())
    }

    pub fn pi2(&self) -> Result<PuiseuxNumber> {
        Ok(self.periods()?.pi2.clone())
    }

    fn compute_periods(&self) -> Result<PeriodData> {
        let r1 = kernel_generator(&self.exp_c_series(2), self.v_pi1(), |z| self.exp_c(z))?;
        let r2 = kernel_generator(&self.exp_c2_series(3), self.v_pi2(), |z| self.exp_c2(z))?;
        Ok(PeriodData {
            v_pi1: r1.z.valuation(),
            v_pi2: r2.z.valuation(),
            residual_digits_pi1: r1.residual_digits,
            residual_digits_pi2: r2.residual_digits,
            pi1: r1.z,
            pi2: r2.z,
        })
    }

    /// Whether `exp_𝔠(z)` vanishes with at least `digits` units of certified precision.
    pub fn is_carlitz_zero(&self, z: &PuiseuxNumber) -> Result<bool> {
        Ok(certified_zero(&self.exp_c(z)?, &self.ctx))
    }

    /// `exp_𝔠(α z) = 0` for `α ∈ {1, θ, θ+1}`.
    pub fn carlitz_lattice_check(&self, z: &PuiseuxNumber) -> Result<bool> {
        let theta = self.ctx.theta();
        for alpha in [self.ctx.one(), theta.clone(), &theta + &self.ctx.one()] {
            if !self.is_carlitz_zero(&(&alpha * z))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `log_𝔠(w)` for `v(w) > −q/(q−1)`, checked by `exp_𝔠(log w) = w`.
    pub fn log_c(&self, w: &PuiseuxNumber) -> Result<LogValue> {
        let ctx = &self.ctx;
        if w.is_zero() {
            return Ok(LogValue { value: w.clone(), order: 0 });
        }
        let bound = self.v_pi1();
        let vw = w.valuation().expect("nonzero");
        if vw <= bound {
            return Err(Error::OutsideLogDomain { valuation: vw, bound });
        }
        // v(ℓ_n w^{q^n}) = q^n (v(w) + q/(q−1)) − q/(q−1)
        let target = w.prec_units().unwrap_or(i64::MAX).min(w.lower_val() + ctx.work());
        let delta = (vw - bound) * Ratio::from_integer(ctx.ram());
        let mut order = 0usize;
        let limit = max_order(ctx.q());
        loop {
            let qn = Ratio::from_integer(ctx.qpow(order as u32 + 1));
            let next = qn * delta + bound * Ratio::from_integer(ctx.ram());
            if next.floor().to_integer() >= target {
                break;
            }
            order += 1;
            if order >= limit {
                return Err(Error::TailNotConvergent {
                    order,
                    reason: "log series too slow near the domain boundary".into(),
                });
            }
        }
        let series = self.log_c_series(order.max(1))?;
        let value = series.eval_truncated(w);
        let value = if target == i64::MAX { value } else { value.truncate(target) };
        let back = self.exp_c(&value)?;
        let diff = &back.value[0] - w;
        if !diff.is_zero() {
            return Err(Error::InsufficientPrecision(format!(
                "exp(log w) − w = {diff}"
            )));
        }
        Ok(LogValue { value, order })
    }
}

/// Zero at precision with `digits` units beyond the scale of the summed terms.
pub fn certified_zero(v: &ExpValue, ctx: &Ctx) -> bool {
    v.value.iter().all(|x| x.is_zero())
        && match (v.value.iter().filter_map(|x| x.prec_units()).min(), v.scale_units) {
            (Some(p), Some(s)) => p - s >= ctx.digits(),
            (None, _) => true,
            (Some(_), None) => true,
        }
}
