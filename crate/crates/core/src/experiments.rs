//! Named experiments behind the `tmotive` binary. Each returns a [`Report`]
//! with a config echo, the certified precision and one entry per assertion.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analytic::Analytic;
use crate::elim::{self, ElimParams, TSeries};
use crate::error::{Error, Result};
use crate::lattice::{
    dual_exists, lattices_isomorphic_1x2, siegel, triangular_kernel_solve, verify_kernel, IsoVerdict,
    Orientation, SiegelMatrix,
};
use crate::motive::{carlitz2_coeff, carlitz_coeff, MotiveSpec};
use crate::ore::{ma_isomorphic_closed_form, ma_matrix, solve_semilinear_bounded};
use crate::puiseux::{Ctx, PuiseuxNumber};
use crate::report::ratio_str;
use crate::sample;

pub const SCHEMA: &str = "tmotive-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Periods,
    Siegel,
    DualCheck,
    IsoCheck,
    Dseries,
    Eliminate,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MotiveKind {
    Ma,
    Mt,
}

/// Everything that determines a run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub q: u64,
    /// Working precision in units of `1/e`; the context default when absent.
    pub precision: Option<i64>,
    pub ram: Option<i64>,
    /// T-order for `eliminate`, number of `𝔡_i` for `dseries`.
    pub order: usize,
    pub motive: MotiveKind,
    pub a: Option<String>,
    pub a2: Option<String>,
    pub s11: Option<String>,
    pub kmax: usize,
    pub seed: u64,
    /// Random instances per sweep.
    pub instances: usize,
}

impl RunConfig {
    pub fn new(command: Command, q: u64) -> Self {
        RunConfig {
            command,
            q,
            precision: None,
            ram: None,
            order: 8,
            motive: MotiveKind::Mt,
            a: None,
            a2: None,
            s11: None,
            kmax: 4,
            seed: 0,
            instances: 5,
        }
    }

    pub fn context(&self) -> Result<Ctx> {
        self.adjust(Ctx::new(self.q)?)
    }

    fn adjust(&self, mut ctx: Ctx) -> Result<Ctx> {
        if let Some(p) = self.precision {
            ctx = ctx.with_precision(p, ctx.digits())?;
        }
        if let Some(e) = self.ram {
            ctx = ctx.with_ram(e)?;
        }
        Ok(ctx)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: Command,
    pub config: RunConfig,
    /// Smallest absolute precision (a valuation) among the certified values.
    pub certified_precision: Option<String>,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<Report>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One `PASS`/`FAIL` line per assertion.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        self.write_summary(&mut out);
        out.push_str(&format!(
            "{}: {} (certified precision {})\n",
            serde_json::to_value(self.command).unwrap().as_str().unwrap(),
            if self.passed { "PASS" } else { "FAIL" },
            self.certified_precision.as_deref().unwrap_or("exact")
        ));
        out
    }

    fn write_summary(&self, out: &mut String) {
        for s in &self.sections {
            s.write_summary(out);
        }
        let cmd = serde_json::to_value(self.command).unwrap();
        for a in &self.assertions {
            let mark = if a.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{mark}] {} / {}: {}\n", cmd.as_str().unwrap(), a.name, a.detail));
        }
    }
}

#[derive(Default)]
struct Checks {
    items: Vec<Assertion>,
    prec: Option<Ratio<i64>>,
}

impl Checks {
    fn check(&mut self, name: impl Into<String>, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.items.push(Assertion {
            name: name.into(),
            passed,
            detail,
        });
    }

    fn note(&mut self, x: &PuiseuxNumber) {
        if let Some(p) = x.precision() {
            self.prec = Some(self.prec.map_or(p, |q| q.min(p)));
        }
    }

    fn note_units(&mut self, ctx: &Ctx, units: Option<i64>) {
        if let Some(u) = units {
            let p = ctx.units_to_val(u);
            self.prec = Some(self.prec.map_or(p, |q| q.min(p)));
        }
    }

    fn finish(self, cfg: &RunConfig, command: Command, data: Value) -> Report {
        Report {
            schema: SCHEMA,
            command,
            config: RunConfig { command, ..cfg.clone() },
            certified_precision: self.prec.as_ref().map(ratio_str),
            passed: self.items.iter().all(|a| a.passed),
            assertions: self.items,
            data,
            sections: vec![],
        }
    }
}

fn failed(cfg: &RunConfig, command: Command, e: Error) -> Report {
    let mut c = Checks::default();
    c.check("setup", Err(e));
    c.finish(cfg, command, Value::Null)
}

fn vstr(x: &PuiseuxNumber) -> String {
    x.valuation().map_or("inf".into(), |v| ratio_str(&v))
}

fn parse_param(ctx: &Ctx, an: Option<&Analytic>, s: &str) -> Result<PuiseuxNumber> {
    match (s.trim(), an) {
        ("pi1", Some(an)) => an.pi1(),
        ("pi2", Some(an)) => an.pi2(),
        (s, _) => ctx.parse(s),
    }
}

/// The parameter given on the command line, or seeded random values of
/// valuation at least 1.
fn small_parameters(cfg: &RunConfig, ctx: &Ctx) -> Result<Vec<PuiseuxNumber>> {
    if let Some(a) = &cfg.a {
        return Ok(vec![ctx.parse(a)?]);
    }
    let mut rng = sample::rng(cfg.seed);
    Ok((0..cfg.instances)
        .map(|_| sample::random_number(ctx, &mut rng, ctx.ram(), 3))
        .collect())
}

pub fn run(cfg: &RunConfig) -> Report {
    let ctx = match cfg.context() {
        Ok(c) => c,
        Err(e) => return failed(cfg, cfg.command, e),
    };
    let an = Analytic::new(&ctx);
    match cfg.command {
        Command::Periods => periods(cfg, &an),
        Command::Siegel => siegel_cmd(cfg, &an, cfg.motive),
        Command::DualCheck => dual_check(cfg, &an),
        Command::IsoCheck => iso_check(cfg, &ctx),
        Command::Dseries => dseries(cfg, &an),
        Command::Eliminate => eliminate(cfg),
        Command::All => all(cfg, &an),
    }
}

fn all(cfg: &RunConfig, an: &Analytic) -> Report {
    let sections = vec![
        periods(cfg, an),
        siegel_cmd(cfg, an, MotiveKind::Ma),
        siegel_cmd(cfg, an, MotiveKind::Mt),
        dual_check(cfg, an),
        iso_check(cfg, an.ctx()),
        dseries(cfg, an),
        eliminate(cfg),
    ];
    let prec = sections
        .iter()
        .filter_map(|s| s.certified_precision.as_ref())
        .filter_map(|p| parse_ratio(p))
        .min();
    Report {
        schema: SCHEMA,
        command: Command::All,
        config: cfg.clone(),
        certified_precision: prec.as_ref().map(ratio_str),
        passed: sections.iter().all(|s| s.passed),
        assertions: vec![],
        data: Value::Null,
        sections,
    }
}

fn parse_ratio(s: &str) -> Option<Ratio<i64>> {
    match s.split_once('/') {
        Some((n, d)) => Some(Ratio::new(n.parse().ok()?, d.parse().ok()?)),
        None => Some(Ratio::from_integer(s.parse().ok()?)),
    }
}

/// Carlitz coefficients and the two periods.
pub fn periods(cfg: &RunConfig, an: &Analytic) -> Report {
    let ctx = an.ctx().clone();
    let q = ctx.q() as i64;
    let mut c = Checks::default();

    let e1 = MotiveSpec::carlitz(&ctx).exp_series(8);
    let e2 = MotiveSpec::carlitz2(&ctx).exp_series(8);
    c.check(
        "carlitz coefficients j <= 8",
        Ok(((0..=8).all(|j| e1.coeff(j)[(0, 0)] == carlitz_coeff(&ctx, j as u32)), "exact".into())),
    );
    c.check(
        "rank-2 carlitz coefficients j <= 8",
        Ok(((0..=8).all(|j| e2.coeff(j)[(0, 0)] == carlitz2_coeff(&ctx, j as u32)), "exact".into())),
    );

    let p = match an.periods() {
        Ok(p) => p.clone(),
        Err(e) => {
            c.check("periods", Err(e));
            return c.finish(cfg, Command::Periods, Value::Null);
        }
    };
    c.note(&p.pi1);
    c.note(&p.pi2);
    let want1 = Ratio::new(-q, q - 1);
    let want2 = Ratio::new(-q * q, q * q - 1);
    c.check(
        "v(pi1) = -q/(q-1)",
        Ok((p.v_pi1 == Some(want1), format!("{} vs {}", vstr(&p.pi1), ratio_str(&want1)))),
    );
    c.check(
        "v(pi2) = -q^2/(q^2-1)",
        Ok((p.v_pi2 == Some(want2), format!("{} vs {}", vstr(&p.pi2), ratio_str(&want2)))),
    );
    for (name, r) in [("pi1", p.residual_digits_pi1), ("pi2", p.residual_digits_pi2)] {
        c.check(
            format!("exp residual at {name} below precision"),
            Ok((r.is_some_and(|r| r >= ctx.digits()), format!("{r:?} units, need {}", ctx.digits()))),
        );
    }
    c.check(
        "F_q[theta]-multiples of pi1 are Carlitz zeros",
        an.carlitz_lattice_check(&p.pi1).map(|b| (b, "alpha in {1, theta, theta+1}".into())),
    );
    c.finish(cfg, Command::Periods, serde_json::to_value(&p).unwrap())
}

/// Kernel basis and Siegel matrix of `M(a)` or `M_t(a)`.
pub fn siegel_cmd(cfg: &RunConfig, an: &Analytic, kind: MotiveKind) -> Report {
    let ctx = an.ctx().clone();
    let mut c = Checks::default();
    let params = match small_parameters(cfg, &ctx) {
        Ok(p) => p,
        Err(e) => return failed(cfg, Command::Siegel, e),
    };
    let mut data = vec![];
    for (i, a) in params.iter().enumerate() {
        let tag = format!("{kind:?} a#{i}").to_lowercase();
        let (motive, orientation) = match kind {
            MotiveKind::Ma => (MotiveSpec::ma(a), Orientation::Upper),
            MotiveKind::Mt => (MotiveSpec::mt(a), Orientation::Lower),
        };
        let basis = match triangular_kernel_solve(an, &motive, orientation) {
            Ok(b) => b,
            Err(e) => {
                c.check(format!("{tag} kernel basis"), Err(e));
                continue;
            }
        };
        basis.vectors.iter().flatten().for_each(|x| c.note(x));
        c.check(
            format!("{tag} basis vectors are kernel elements"),
            verify_kernel(&motive, &basis).map(|b| (b, "exp(l) = exp(theta l) = 0".into())),
        );
        c.check(
            format!("{tag} basis spans a lattice"),
            basis
                .lattice_certificate()
                .map(|r| (r.rank == basis.r(), format!("R_inf rank {} of {}", r.rank, basis.r()))),
        );
        let s = match siegel(&basis) {
            Ok(s) => s,
            Err(e) => {
                c.check(format!("{tag} siegel matrix"), Err(e));
                continue;
            }
        };
        let expected = match kind {
            MotiveKind::Ma => Ok(SiegelMatrix::row_1x2(ctx.zero(), ctx.omega())),
            MotiveKind::Mt => an.siegel_s(a).map(|x| SiegelMatrix::row_1x2(x.s, ctx.omega())),
        };
        match kind {
            MotiveKind::Ma => c.check(
                format!("{tag} S = (0, omega) after normalization"),
                expected.and_then(|e| {
                    let iso = lattices_isomorphic_1x2(&e, &s)?;
                    Ok((
                        s.eq_at_precision(&e) && iso.verdict == IsoVerdict::EqualAfterNormalization,
                        iso.detail,
                    ))
                }),
            ),
            MotiveKind::Mt => c.check(
                format!("{tag} S = (s(a), omega) with s from the log formula"),
                expected.map(|e| (s.eq_at_precision(&e), "equal at precision".into())),
            ),
        }
        data.push(json!({ "a": a.to_string(), "basis": basis, "siegel": s }));
    }
    let mut r = c.finish(cfg, Command::Siegel, json!({ "motive": kind, "instances": data }));
    r.config.motive = kind;
    r
}

/// `dual_exists` on a given `s11`, or on the reference cases.
pub fn dual_check(cfg: &RunConfig, an: &Analytic) -> Report {
    let ctx = an.ctx().clone();
    let mut c = Checks::default();
    let mut data = vec![];
    let cases: Vec<(String, Option<bool>)> = match &cfg.s11 {
        Some(s) => vec![(s.clone(), None)],
        None => {
            // π_1 lies in F_2((1/θ)) for q = 2, so no certificate exists there
            let pi1 = if ctx.q() == 2 { None } else { Some(true) };
            vec![
                ("0".into(), Some(false)),
                ("w*t^(1)".into(), Some(false)),
                ("pi1".into(), pi1),
            ]
        }
    };
    for (lit, expect) in cases {
        let verdict = parse_param(&ctx, Some(an), &lit).and_then(|s11| {
            c.note(&s11);
            dual_exists(&SiegelMatrix::row_1x2(s11, ctx.omega()))
        });
        let name = format!("dual lattice for s11 = {lit}");
        match (verdict, expect) {
            (Ok(v), Some(want)) => {
                c.check(
                    name,
                    Ok((v.is_lattice == want, format!("rank {} of {}", v.certificate.rank, v.required_rank))),
                );
                data.push(json!({ "s11": lit, "verdict": v }));
            }
            (Ok(v), None) if cfg.s11.is_some() => {
                c.check(name, Ok((true, format!("dual exists: {}", v.is_lattice))));
                data.push(json!({ "s11": lit, "verdict": v }));
            }
            (Ok(v), None) => c.check(
                name,
                Ok((false, format!("expected an undecidable rank, got {}", v.certificate.rank))),
            ),
            (Err(Error::InsufficientPrecision(m)), None) if cfg.s11.is_none() => {
                c.check(name, Ok((true, format!("undecidable at precision as expected: {m}"))))
            }
            (Err(e), _) => c.check(name, Err(e)),
        }
    }
    c.finish(cfg, Command::DualCheck, Value::Array(data))
}

/// Bounded isomorphism search for `M(a)`, `M(a′)` against the closed criterion.
pub fn iso_check(cfg: &RunConfig, ctx: &Ctx) -> Report {
    let mut c = Checks::default();
    let pairs: Vec<(PuiseuxNumber, PuiseuxNumber)> = match (&cfg.a, &cfg.a2) {
        (Some(a), Some(a2)) => match (ctx.parse(a), ctx.parse(a2)) {
            (Ok(a), Ok(a2)) => vec![(a, a2)],
            (Err(e), _) | (_, Err(e)) => return failed(cfg, Command::IsoCheck, e),
        },
        _ => reference_pairs(ctx),
    };
    let results: Vec<_> = pairs
        .par_iter()
        .map(|(a, a2)| {
            let sol = solve_semilinear_bounded(&ma_matrix(a), &ma_matrix(a2), cfg.kmax)?;
            let closed = ma_isomorphic_closed_form(a, a2)?;
            Ok::<_, Error>((sol, closed))
        })
        .collect();
    let mut data = vec![];
    for ((a, a2), r) in pairs.iter().zip(results) {
        let name = format!("M({a}) ~ M({a2})");
        match r {
            Ok((sol, closed)) => {
                let found = sol.has_unit();
                let witness = sol.units().next().map(|s| {
                    let t = ctx.tower();
                    (t.format_element(s.x11), t.format_element(s.x22))
                });
                c.check(
                    name,
                    Ok((found == closed, format!("solver {found}, closed form {closed}, kmax {}", cfg.kmax))),
                );
                data.push(json!({
                    "a": a.to_string(),
                    "a2": a2.to_string(),
                    "isomorphic": found,
                    "closed_form": closed,
                    "witness": witness,
                }));
            }
            Err(e) => c.check(name, Err(e)),
        }
    }
    c.finish(cfg, Command::IsoCheck, Value::Array(data))
}

/// All pairs from `F_{q²}^*` (capped at 9) and five pairs with `a′/a ∉ F_{q²}`.
pub fn reference_pairs(ctx: &Ctx) -> Vec<(PuiseuxNumber, PuiseuxNumber)> {
    let t = ctx.tower();
    let units: Vec<_> = t
        .field()
        .elements()
        .filter(|x| t.in_subfield(*x, 2) && *x != t.field().from_int(0))
        .map(|x| ctx.constant(x))
        .collect();
    let mut pairs = vec![];
    for a in units.iter().take(3) {
        for b in units.iter().take(3) {
            pairs.push((a.clone(), b.clone()));
        }
    }
    let theta = ctx.theta();
    let one = ctx.one();
    let w = ctx.omega();
    let factors = [
        theta.clone(),
        &theta + &one,
        &w * &theta,
        ctx.t(),
        &theta * &theta,
    ];
    for (i, f) in factors.iter().enumerate() {
        let a = &units[i % units.len()];
        pairs.push((a.clone(), a * f));
    }
    pairs
}

/// `𝔡_i`, `D(a)`, and the local behaviour of `𝔰`.
pub fn dseries(cfg: &RunConfig, an: &Analytic) -> Report {
    let ctx = an.ctx().clone();
    let q = ctx.q() as i64;
    let mut c = Checks::default();
    let fd = match an.frak_d(cfg.order.max(1)) {
        Ok(f) => f,
        Err(e) => return failed(cfg, Command::Dseries, e),
    };
    fd.iter().for_each(|x| c.note(x));
    let want = Ratio::new(-q, q * q - 1);
    c.check(
        "v(d_0) = -q/(q^2-1)",
        Ok((fd[0].valuation() == Some(want), format!("{} vs {}", vstr(&fd[0]), ratio_str(&want)))),
    );
    let omega = ctx.omega();
    let lead = an
        .pi1()
        .and_then(|p| (&fd[0] * &(&omega - &omega.frob_twist(1))).div(&p));
    let sigma = an.s_coefficients(2);
    c.check(
        "s'(0) = d_0 (omega - omega^q) / pi1",
        lead.as_ref()
            .map_err(Clone::clone)
            .and_then(|l| Ok(((&sigma?[0] - l).is_zero(), format!("v = {}", vstr(l))))),
    );
    let params = match small_parameters(cfg, &ctx) {
        Ok(p) => p,
        Err(e) => return failed(cfg, Command::Dseries, e),
    };
    let mut data = vec![];
    for (i, a) in params.iter().enumerate() {
        let ds = an.d_series(a, cfg.order.max(1));
        c.check(
            format!("a#{i} D(a), D_omega(a) from the d_i series"),
            ds.as_ref().map(|d| (d.agreement, "series vs exponential".into())).map_err(Clone::clone),
        );
        let s = an.siegel_s(a);
        if let Ok(s) = &s {
            c.note(&s.s);
        }
        c.check(
            format!("a#{i} finite difference s(a)/a -> leading coefficient"),
            match (&s, &lead) {
                (Ok(s), Ok(l)) => {
                    let approx = l * a;
                    let err = &s.s - &approx;
                    Ok((
                        err.lower_val() > approx.lower_val(),
                        format!("v(s - lead a) = {}, v(lead a) = {}", vstr(&err), vstr(&approx)),
                    ))
                }
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            },
        );
        c.check(
            format!("a#{i} local inverse of s round-trips"),
            s.as_ref().map_err(Clone::clone).and_then(|s| {
                let inv = an.local_inverse_s(&s.s)?;
                let back = an.siegel_s(&inv.a)?.s;
                Ok((
                    (&back - &s.s).is_zero(),
                    format!("neighborhood v > {}, {} steps", ratio_str(&inv.bound), inv.iterations),
                ))
            }),
        );
        data.push(json!({
            "a": a.to_string(),
            "s": s.ok().map(|s| s.s.to_string()),
            "d": ds.ok(),
        }));
    }
    let frak: Vec<String> = fd.iter().map(|x| x.to_string()).collect();
    c.finish(cfg, Command::Dseries, json!({ "frak_d": frak, "instances": data }))
}

/// Elimination identities on seeded random instances.
pub fn eliminate(cfg: &RunConfig) -> Report {
    let ctx = match elim::elim_context(cfg.q).and_then(|c| cfg.adjust(c)) {
        Ok(c) => c,
        Err(e) => return failed(cfg, Command::Eliminate, e),
    };
    let mut c = Checks::default();
    let mut rng = sample::rng(cfg.seed);
    let r = |rng: &mut _| sample::random_number(&ctx, rng, -ctx.ram(), 3);
    let instances: Vec<(ElimParams, TSeries)> = (0..cfg.instances.max(20))
        .map(|_| {
            let p = ElimParams {
                a11: r(&mut rng),
                a12: r(&mut rng),
                a21: r(&mut rng),
            };
            let x2 = TSeries::new((0..cfg.order.max(1)).map(|_| r(&mut rng)).collect());
            (p, x2)
        })
        .collect();
    let results: Vec<_> = instances
        .par_iter()
        .map(|(p, x2)| {
            let chk = elim::check_elimination(p, x2)?;
            let uv = elim::uv_reparam(p)?;
            let back = elim::uv_inverse(&uv.a21, &uv.u, &uv.v)?;
            let round = (&back.a11 - &p.a11).is_zero() && (&back.a12 - &p.a12).is_zero();
            Ok::<_, Error>((chk, uv.u_forms_agree, round))
        })
        .collect();
    let mut data = vec![];
    for (i, res) in results.into_iter().enumerate() {
        match res {
            Ok((chk, forms, round)) => {
                c.note_units(&ctx, chk.precision_units);
                c.check(
                    format!("instance {i} elimination chain"),
                    Ok((chk.passed(), format!("{chk:?}"))),
                );
                c.check(format!("instance {i} printed forms of u agree"), Ok((forms, String::new())));
                c.check(format!("instance {i} (u, v) round trip"), Ok((round, String::new())));
                data.push(json!({ "params": instances[i].0, "check": chk }));
            }
            Err(e) => c.check(format!("instance {i}"), Err(e)),
        }
    }
    let zero = ctx.zero();
    let p0 = ElimParams {
        a11: ctx.one(),
        a12: ctx.one(),
        a21: zero.clone(),
    };
    c.check(
        "a21 = 0 is rejected",
        Ok((
            matches!(elim::eliminated_residual(&p0, &TSeries::zero(&ctx)), Err(Error::ZeroParameter(_))),
            String::new(),
        )),
    );
    c.check(
        "X2 = 0 gives 0",
        elim::eliminated_residual(&instances[0].0, &TSeries::zero(&ctx)).map(|r| (r.is_exact_zero(), String::new())),
    );
    c.finish(
        cfg,
        Command::Eliminate,
        json!({ "t_order": cfg.order, "instances": data }),
    )
}
