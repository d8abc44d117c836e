//! Truncated Puiseux series in `t = θ^{-1}` over the top field of a [`FieldTower`].
//!
//! A value is `Σ c_n t^{n/e}` for `n ≥ start`, where `e` is the ramification
//! index fixed by the [`Ctx`]. Every value carries an absolute precision bound
//! in units of `1/e`: digits at exponents `≥ prec` are unknown. Values with no
//! bound are exact (finite Laurent polynomials in `t^{1/e}`).
//!
//! Arithmetic propagates precision pessimistically and additionally caps every
//! result at `work` digits past its leading term, so sizes stay bounded.

mod literal;
mod rank;

use std::cmp::{max, min};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower};

pub use rank::{r_infinity_rank, r_infinity_rank_vectors, RankCertificate};

/// Shared arithmetic context: field tower, ramification and working precision.
#[derive(Clone)]
pub struct Ctx(Arc<CtxInner>);

struct CtxInner {
    tower: FieldTower,
    ram: i64,
    work: i64,
    digits: i64,
}

/// Default working precision in units of `1/e`.
pub const DEFAULT_WORK: i64 = 200;
/// Default number of digits past the leading term a check must certify.
pub const DEFAULT_DIGITS: i64 = 40;

impl Ctx {
    /// Context over `F_q` with the default tower, ramification `(q−1)(q²−1)` and precision.
    pub fn new(q: u64) -> Result<Self> {
        let tower = FieldTower::default_for(q)?;
        let ram = ((q - 1) * (q * q - 1)) as i64;
        Self::from_tower(tower, ram, DEFAULT_WORK, DEFAULT_DIGITS)
    }

    pub fn from_tower(tower: FieldTower, ram: i64, work: i64, digits: i64) -> Result<Self> {
        if ram < 1 {
            return Err(Error::InvalidParameter(format!("ramification {ram} < 1")));
        }
        if work < 1 || digits < 1 || digits > work {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= digits ({digits}) <= work ({work})"
            )));
        }
        Ok(Ctx(Arc::new(CtxInner {
            tower,
            ram,
            work,
            digits,
        })))
    }

    /// Same tower and ramification with a different working precision.
    pub fn with_precision(&self, work: i64, digits: i64) -> Result<Self> {
        Self::from_tower(self.0.tower.clone(), self.0.ram, work, digits)
    }

    pub fn with_ram(&self, ram: i64) -> Result<Self> {
        Self::from_tower(self.0.tower.clone(), ram, self.0.work, self.0.digits)
    }

    pub fn tower(&self) -> &FieldTower {
        &self.0.tower
    }
    pub fn q(&self) -> u64 {
        self.0.tower.q()
    }
    pub fn ram(&self) -> i64 {
        self.0.ram
    }
    pub fn work(&self) -> i64 {
        self.0.work
    }
    pub fn digits(&self) -> i64 {
        self.0.digits
    }
    pub fn same(&self, other: &Ctx) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// `q^j` as an `i64`.
    pub fn qpow(&self, j: u32) -> i64 {
        (self.q() as i64).saturating_pow(j)
    }

    pub fn zero(&self) -> PuiseuxNumber {
        PuiseuxNumber::exact(self, 0, vec![])
    }
    pub fn one(&self) -> PuiseuxNumber {
        self.constant(1)
    }
    pub fn constant(&self, c: Fe) -> PuiseuxNumber {
        self.monomial(c, 0)
    }
    pub fn int(&self, k: i64) -> PuiseuxNumber {
        self.constant(self.tower().field().from_int(k))
    }
    /// `c · t^{n/e}`.
    pub fn monomial(&self, c: Fe, n: i64) -> PuiseuxNumber {
        PuiseuxNumber::exact(self, n, vec![c])
    }
    pub fn omega(&self) -> PuiseuxNumber {
        self.constant(self.tower().omega())
    }
    /// `θ = t^{-1}`.
    pub fn theta(&self) -> PuiseuxNumber {
        self.monomial(1, -self.ram())
    }
    /// `t = θ^{-1}`.
    pub fn t(&self) -> PuiseuxNumber {
        self.monomial(1, self.ram())
    }
    /// `θ^{q^j}`.
    pub fn theta_qpow(&self, j: u32) -> PuiseuxNumber {
        self.monomial(1, -self.ram() * self.qpow(j))
    }

    /// `θ_{ij} = θ^{q^i} − θ^{q^j}`.
    pub fn theta_diff(&self, i: u32, j: u32) -> PuiseuxNumber {
        &self.theta_qpow(i) - &self.theta_qpow(j)
    }

    /// A value in units of `1/e` as a rational valuation.
    pub fn units_to_val(&self, n: i64) -> Ratio<i64> {
        Ratio::new(n, self.ram())
    }

    /// Smallest unit count strictly greater than the rational `v` (in units of `1/e`).
    pub fn val_to_units_ceil(&self, v: Ratio<i64>) -> i64 {
        (v * self.ram()).ceil().to_integer()
    }
}

impl fmt::Debug for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Ctx(q={}, top={}, e={}, work={})",
            self.q(),
            self.tower().name(),
            self.ram(),
            self.work()
        )
    }
}

/// Whether a value is structurally zero, indistinguishable from zero, or nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ZeroState {
    Nonzero,
    ZeroAtPrecision,
    ExactZero,
}

/// An element of `F_{q^k}((t^{1/e}))` known to a finite absolute precision.
#[derive(Clone)]
pub struct PuiseuxNumber {
    ctx: Ctx,
    start: i64,
    coeffs: Vec<Fe>,
    prec: Option<i64>,
}

impl PartialEq for PuiseuxNumber {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx)
            && self.prec == other.prec
            && self.coeffs == other.coeffs
            && (self.coeffs.is_empty() || self.start == other.start)
    }
}

impl PuiseuxNumber {
    fn exact(ctx: &Ctx, start: i64, coeffs: Vec<Fe>) -> Self {
        Self::finish(ctx, start, coeffs, None)
    }

    /// Build from a dense coefficient run starting at exponent `start`.
    pub fn from_coeffs(ctx: &Ctx, start: i64, coeffs: Vec<Fe>, prec: Option<i64>) -> Self {
        Self::finish(ctx, start, coeffs, prec)
    }

    /// The inexact zero `O(t^{prec/e})`.
    pub fn zero_at(ctx: &Ctx, prec: i64) -> Self {
        PuiseuxNumber {
            ctx: ctx.clone(),
            start: prec,
            coeffs: vec![],
            prec: Some(prec),
        }
    }

    /// Normalize: strip leading zeros, drop unknown digits, apply the working cap.
    fn finish(ctx: &Ctx, mut start: i64, mut coeffs: Vec<Fe>, mut prec: Option<i64>) -> Self {
        if let Some(p) = prec {
            let keep = (p - start).clamp(0, coeffs.len() as i64) as usize;
            coeffs.truncate(keep);
        }
        let lead = coeffs.iter().position(|c| *c != 0);
        match lead {
            None => {
                coeffs.clear();
                start = prec.unwrap_or(0);
            }
            Some(i) => {
                coeffs.drain(..i);
                start += i as i64;
            }
        }
        if !coeffs.is_empty() {
            if prec.is_none() {
                while coeffs.last() == Some(&0) {
                    coeffs.pop();
                }
            }
            let cap = start + ctx.work();
            if prec.is_none() && start + coeffs.len() as i64 > cap + 1 {
                prec = Some(cap);
            }
            if let Some(p) = prec {
                let p = min(p, cap);
                prec = Some(p);
                coeffs.truncate((p - start).max(0) as usize);
                while coeffs.last() == Some(&0) {
                    coeffs.pop();
                }
            }
        }
        PuiseuxNumber {
            ctx: ctx.clone(),
            start,
            coeffs,
            prec,
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn zero_state(&self) -> ZeroState {
        match (self.coeffs.is_empty(), self.prec) {
            (false, _) => ZeroState::Nonzero,
            (true, None) => ZeroState::ExactZero,
            (true, Some(_)) => ZeroState::ZeroAtPrecision,
        }
    }

    /// Zero at the current precision (including exact zero).
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// Valuation in units of `1/e`, if nonzero at precision.
    pub fn val_units(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    /// `v_∞` as an exact rational, if nonzero at precision.
    pub fn valuation(&self) -> Option<Ratio<i64>> {
        self.val_units().map(|n| self.ctx.units_to_val(n))
    }

    /// Absolute precision in units of `1/e` (`None` when exact).
    pub fn prec_units(&self) -> Option<i64> {
        self.prec
    }

    pub fn precision(&self) -> Option<Ratio<i64>> {
        self.prec.map(|p| self.ctx.units_to_val(p))
    }

    /// Digits known past the leading term, in units of `1/e` (`None` when exact).
    pub fn relative_precision(&self) -> Option<i64> {
        self.prec.map(|p| p - self.lower_val())
    }

    /// A lower bound for the valuation, in units (`i64::MAX` for exact zero).
    pub fn lower_val(&self) -> i64 {
        if !self.coeffs.is_empty() {
            self.start
        } else {
            self.prec.unwrap_or(i64::MAX)
        }
    }

    pub fn leading_coeff(&self) -> Option<Fe> {
        self.coeffs.first().copied()
    }

    /// Coefficient of `t^{n/e}`, or `None` when it lies beyond the precision.
    pub fn coeff(&self, n: i64) -> Option<Fe> {
        if self.prec.is_some_and(|p| n >= p) {
            return None;
        }
        if n < self.start || n >= self.start + self.coeffs.len() as i64 {
            Some(0)
        } else {
            Some(self.coeffs[(n - self.start) as usize])
        }
    }

    /// `(exponent, coefficient)` pairs of the known nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Fe)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(move |(i, c)| (self.start + i as i64, *c))
    }

    fn field(&self) -> &crate::field::GaloisField {
        self.ctx.tower().field()
    }

    fn check_ctx(&self, other: &Self) {
        assert!(
            self.ctx.same(&other.ctx),
            "operands from different arithmetic contexts"
        );
    }

    /// Forget digits at or beyond absolute exponent `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        let p = self.prec.map_or(prec, |q| min(q, prec));
        Self::finish(&self.ctx, self.start, self.coeffs.clone(), Some(p))
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.check_ctx(other);
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        let f = self.field();
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (a, b) => Some(min(a.unwrap_or(i64::MAX), b.unwrap_or(i64::MAX))),
        };
        let lo = min(self.lower_val(), other.lower_val());
        let end_x = self.start + self.coeffs.len() as i64;
        let end_y = other.start + other.coeffs.len() as i64;
        let mut end = max(end_x, end_y);
        if let Some(p) = prec {
            end = min(end, min(p, lo.saturating_add(self.ctx.work())));
        }
        let mut out = vec![0; (end - lo).max(0) as usize];
        for (src_start, src) in [(self.start, &self.coeffs), (other.start, &other.coeffs)] {
            for (i, c) in src.iter().enumerate() {
                let n = src_start + i as i64;
                if n >= end {
                    break;
                }
                let slot = &mut out[(n - lo) as usize];
                *slot = f.add(*slot, *c);
            }
        }
        let prec = prec.map(|p| min(p, lo.saturating_add(self.ctx.work())));
        Self::finish(&self.ctx, lo, out, prec)
    }

    pub fn neg_ref(&self) -> Self {
        let f = self.field();
        PuiseuxNumber {
            ctx: self.ctx.clone(),
            start: self.start,
            coeffs: self.coeffs.iter().map(|c| f.neg(*c)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.check_ctx(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return self.ctx.zero();
        }
        let work = self.ctx.work();
        let (vx, vy) = (self.lower_val(), other.lower_val());
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (Some(px), None) => Some(px + vy),
            (None, Some(py)) => Some(py + vx),
            (Some(px), Some(py)) => Some(min(px + vy, py + vx)),
        };
        let cap = vx + vy + work;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero_at(&self.ctx, min(prec.unwrap(), cap));
        }
        let start = self.start + other.start;
        let full_end = start + (self.coeffs.len() + other.coeffs.len() - 1) as i64;
        let (end, prec) = match prec {
            None if full_end - start <= work => (full_end, None),
            None => (cap, Some(cap)),
            Some(p) => {
                let p = min(p, cap);
                (min(full_end, p), Some(p))
            }
        };
        let len = (end - start).max(0) as usize;
        let mut out = vec![0; len];
        let f = self.field();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if *a == 0 {
                continue;
            }
            let la = f.log(*a) as u64;
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                if *b != 0 {
                    let v = f.exp(la + f.log(*b) as u64);
                    out[i + j] = f.add(out[i + j], v);
                }
            }
        }
        Self::finish(&self.ctx, start, out, prec)
    }

    /// Multiply by a field constant.
    pub fn scale(&self, c: Fe) -> Self {
        if c == 0 {
            return self.ctx.zero();
        }
        let f = self.field();
        PuiseuxNumber {
            ctx: self.ctx.clone(),
            start: self.start,
            coeffs: self.coeffs.iter().map(|x| f.mul(*x, c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiplicative inverse. Fails when the value is zero at its precision.
    pub fn inv(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::DivisionByZeroAtPrecision(
                self.precision().unwrap_or_else(|| Ratio::from_integer(i64::MAX)),
            ));
        }
        let f = self.field();
        let v = self.start;
        let a0_inv = f.inv(self.coeffs[0]).unwrap();
        if self.prec.is_none() && self.coeffs.len() == 1 {
            return Ok(Self::exact(&self.ctx, -v, vec![a0_inv]));
        }
        let rel = min(
            self.prec.map_or(self.ctx.work(), |p| p - v),
            self.ctx.work(),
        );
        let n = rel as usize;
        let a: Vec<Fe> = (0..n)
            .map(|i| self.coeffs.get(i).copied().unwrap_or(0))
            .collect();
        let mut b = vec![0; n];
        b[0] = a0_inv;
        let nz: Vec<(usize, Fe)> = a
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| (i, *c))
            .collect();
        for k in 1..n {
            let mut s = 0;
            for (i, ai) in &nz {
                if *i > k {
                    break;
                }
                s = f.add(s, f.mul(*ai, b[k - i]));
            }
            b[k] = f.neg(f.mul(s, a0_inv));
        }
        Ok(Self::finish(&self.ctx, -v, b, Some(-v + rel)))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_ref(&other.inv()?))
    }

    /// `x^{q^j}`: Frobenius on coefficients, exponents scaled by `q^j`.
    pub fn frob_twist(&self, j: u32) -> Self {
        if j == 0 || self.is_exact_zero() {
            return self.clone();
        }
        let qj = self.ctx.qpow(j);
        let work = self.ctx.work();
        if self.coeffs.is_empty() {
            return Self::zero_at(&self.ctx, self.prec.unwrap().saturating_mul(qj));
        }
        let start = self.start * qj;
        let full_end = (self.start + self.coeffs.len() as i64 - 1) * qj + 1;
        let (end, prec) = match self.prec {
            None if full_end - start <= work + 1 => (full_end, None),
            None => (start + work, Some(start + work)),
            Some(p) => {
                let p = min(p.saturating_mul(qj), start + work);
                (min(full_end, p), Some(p))
            }
        };
        let tower = self.ctx.tower();
        let mut out = vec![0; (end - start).max(0) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = i as i64 * qj;
            if n >= end - start {
                break;
            }
            out[n as usize] = tower.frobenius(*c, j);
        }
        Self::finish(&self.ctx, start, out, prec)
    }

    /// `x^{q^{-j}}`. Fails unless every known term sits at an exponent divisible by `q^j`.
    pub fn frob_root(&self, j: u32) -> Result<Self> {
        if j == 0 || self.is_exact_zero() {
            return Ok(self.clone());
        }
        let qj = self.ctx.qpow(j);
        let prec = self.prec.map(|p| p.div_euclid(qj) + i64::from(p.rem_euclid(qj) != 0));
        if self.coeffs.is_empty() {
            return Ok(Self::zero_at(&self.ctx, prec.unwrap()));
        }
        if let Some((n, _)) = self.terms().find(|(n, _)| n.rem_euclid(qj) != 0) {
            return Err(Error::NotAPower(format!(
                "term at exponent {n}/{} is not divisible by q^{j}",
                self.ctx.ram()
            )));
        }
        let tower = self.ctx.tower();
        let start = self.start.div_euclid(qj);
        let out: Vec<Fe> = self
            .coeffs
            .iter()
            .step_by(qj as usize)
            .map(|c| tower.frobenius_inv(*c, j))
            .collect();
        Ok(Self::finish(&self.ctx, start, out, prec))
    }

    /// Equal at the joint precision of both operands.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        self.sub_ref(other).is_zero()
    }

    /// Whether every known coefficient lies in `F_{q^level}` and every exponent is integral in `t`.
    pub fn in_laurent_subfield(&self, level: u32) -> bool {
        let tower = self.ctx.tower();
        let e = self.ctx.ram();
        self.terms()
            .all(|(n, c)| n.rem_euclid(e) == 0 && tower.in_subfield(c, level))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&PuiseuxNumber> for &PuiseuxNumber {
            type Output = PuiseuxNumber;
            fn $m(self, rhs: &PuiseuxNumber) -> PuiseuxNumber {
                self.$imp(rhs)
            }
        }
        impl $tr<PuiseuxNumber> for PuiseuxNumber {
            type Output = PuiseuxNumber;
            fn $m(self, rhs: PuiseuxNumber) -> PuiseuxNumber {
                (&self).$imp(&rhs)
            }
        }
        impl $tr<&PuiseuxNumber> for PuiseuxNumber {
            type Output = PuiseuxNumber;
            fn $m(self, rhs: &PuiseuxNumber) -> PuiseuxNumber {
                (&self).$imp(rhs)
            }
        }
        impl $tr<PuiseuxNumber> for &PuiseuxNumber {
            type Output = PuiseuxNumber;
            fn $m(self, rhs: PuiseuxNumber) -> PuiseuxNumber {
                self.$imp(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for &PuiseuxNumber {
    type Output = PuiseuxNumber;
    fn neg(self) -> PuiseuxNumber {
        self.neg_ref()
    }
}

impl Neg for PuiseuxNumber {
    type Output = PuiseuxNumber;
    fn neg(self) -> PuiseuxNumber {
        self.neg_ref()
    }
}

impl fmt::Debug for PuiseuxNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
