//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::{Command as Proc, ExitCode};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use tmotive::analytic::Analytic;
use tmotive::elim::{self, ElimParams, TSeries};
use tmotive::experiments::{self, Command, MotiveKind, RunConfig};
use tmotive::lattice::{dual_exists, SiegelMatrix};
use tmotive::motive::{check_functional_equation, MotiveSpec};
use tmotive::report::ratio_str;
use tmotive::ore::{ma_isomorphic_closed_form, ma_matrix, solve_semilinear_bounded};
use tmotive::{sample, Ctx, Mat, PuiseuxNumber};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<String, String> {
    let el = t.elapsed();
    ensure(el < limit, format!("took {el:?}, limit {limit:?}"))?;
    Ok(format!("{:.2}s", el.as_secs_f64()))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `1 / Π_{i ∈ js} (θ^{q^m} − θ^{q^i})`.
fn tdiffs(c: &Ctx, m: u32, js: &[u32]) -> PuiseuxNumber {
    js.iter()
        .fold(c.one(), |acc, j| &acc * &(&c.theta_qpow(m) - &c.theta_qpow(*j)))
        .inv()
        .unwrap()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let c = Ctx::new(2).map_err(err)?;
    let e = MotiveSpec::carlitz(&c).exp_series(8);
    let e2 = MotiveSpec::carlitz2(&c).exp_series(8);
    for j in 0..=8u32 {
        let cj = tdiffs(&c, j, &(0..j).collect::<Vec<_>>());
        ensure(e.coeff(j as usize)[(0, 0)] == cj, format!("c_{j}"))?;
        let c2j = if j % 2 == 1 {
            c.zero()
        } else {
            tdiffs(&c, j, &(0..j).step_by(2).collect::<Vec<_>>())
        };
        ensure(e2.coeff(j as usize)[(0, 0)] == c2j, format!("c_(2,{j})"))?;
    }
    within(t, Duration::from_secs(1)).map(|d| format!("exact for j <= 8 at work 200, {d}"))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let mut notes = vec![];
    for q in [2i64, 3] {
        let an = Analytic::new(&Ctx::new(q as u64).map_err(err)?);
        let p = an.periods().map_err(err)?;
        ensure(p.v_pi1 == Some(Ratio::new(-q, q - 1)), format!("q={q} v(pi1) = {:?}", p.v_pi1))?;
        ensure(p.v_pi2 == Some(Ratio::new(-q * q, q * q - 1)), format!("q={q} v(pi2) = {:?}", p.v_pi2))?;
        let digits = an.ctx().digits();
        for r in [p.residual_digits_pi1, p.residual_digits_pi2] {
            ensure(r.is_some_and(|r| r >= digits), format!("q={q} residual {r:?} < {digits}"))?;
        }
        notes.push(format!("q={q}: {}, {}", ratio_str(&p.v_pi1.unwrap()), ratio_str(&p.v_pi2.unwrap())));
    }
    let d = within(t, Duration::from_secs(5))?;
    Ok(format!("{}; {d}", notes.join("; ")))
}

fn criterion_3() -> Outcome {
    for q in [2, 3] {
        let c = Ctx::new(q).map_err(err)?;
        let mut rng = sample::rng(3);
        for k in 0..3 {
            let a = sample::random_number(&c, &mut rng, -c.ram(), 3);
            let e = MotiveSpec::mt(&a).exp_series(5);
            let aq = |j: u32| a.frob_twist(j);
            let forms = [
                c.zero(),
                &a * &tdiffs(&c, 1, &[0]),
                &aq(1) * &tdiffs(&c, 2, &[1, 0]),
                &(&a * &tdiffs(&c, 3, &[1, 0])) + &(&aq(2) * &tdiffs(&c, 3, &[2, 1, 0])),
                &(&aq(1) * &tdiffs(&c, 4, &[2, 1, 0])) + &(&aq(3) * &tdiffs(&c, 4, &[3, 2, 1, 0])),
                &(&(&a * &tdiffs(&c, 5, &[3, 1, 0])) + &(&aq(2) * &tdiffs(&c, 5, &[3, 2, 1, 0])))
                    + &(&aq(4) * &tdiffs(&c, 5, &[4, 3, 2, 1, 0])),
            ];
            for (m, f) in forms.iter().enumerate() {
                ensure((&e.coeff(m)[(1, 0)] - f).is_zero(), format!("q={q} a#{k} d_{m}"))?;
            }
        }
    }
    Ok("d_0..d_5 at 3 random a, q in {2, 3}".into())
}

fn criterion_4() -> Outcome {
    for q in [2, 3] {
        let c = Ctx::new(q).map_err(err)?;
        let mut rng = sample::rng(4);
        let a = sample::random_number(&c, &mut rng, -c.ram(), 3);
        let em = MotiveSpec::ma(&a).exp_series(8);
        let et = MotiveSpec::mt(&a).exp_series(8);
        for m in 0..=8 {
            let (cm, ct) = (em.coeff(m), et.coeff(m));
            ensure(cm[(1, 0)].is_exact_zero(), format!("q={q} C_{m} lower-left"))?;
            ensure(ct[(0, 1)].is_exact_zero(), format!("q={q} C_t,{m} upper-right"))?;
            let odd = m % 2 == 1;
            for x in [&cm[(0, 0)], &ct[(0, 0)]] {
                ensure(x.is_exact_zero() == odd, format!("q={q} m={m} rank-2 diagonal"))?;
            }
            for x in [&cm[(1, 1)], &ct[(1, 1)]] {
                ensure(!x.is_zero(), format!("q={q} m={m} Carlitz diagonal"))?;
            }
            let off_zero = m == 0;
            ensure(cm[(0, 1)].is_exact_zero() == off_zero, format!("q={q} m={m} M(a) corner"))?;
            ensure(ct[(1, 0)].is_exact_zero() == off_zero, format!("q={q} m={m} M_t(a) corner"))?;
        }
    }
    Ok("m <= 8, structural zeros exact".into())
}

fn criterion_5() -> Outcome {
    let mut count = 0;
    for q in [2, 3] {
        let c = Ctx::new(q).map_err(err)?;
        let mut rng = sample::rng(5);
        let small = sample::random_number(&c, &mut rng, 1, 2);
        let np = Mat::from_rows(vec![
            vec![sample::random_number(&c, &mut rng, 0, 2), sample::random_number(&c, &mut rng, 0, 2)],
            vec![sample::random_number(&c, &mut rng, 0, 2), c.one()],
        ])
        .map_err(err)?;
        let motives = vec![
            MotiveSpec::carlitz(&c),
            MotiveSpec::carlitz2(&c),
            MotiveSpec::pure(&c.theta(), &c.omega()),
            MotiveSpec::nonpure(&np).map_err(err)?,
            MotiveSpec::ma(&small),
            MotiveSpec::mt(&small),
        ];
        for m in motives {
            let mut e = m.exp_series(2);
            for i in 0..10 {
                let z: Vec<_> = (0..m.n)
                    .map(|_| sample::random_number(&c, &mut rng, -c.ram(), 3))
                    .collect();
                let chk = check_functional_equation(&mut e, &z).map_err(err)?;
                ensure(chk.passed, format!("{} q={q} Z#{i}: {:?}", m.name, chk.certified_digits()))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} residuals below precision"))
}

fn section(q: u64, command: Command, motive: MotiveKind, seed: u64) -> Result<experiments::Report, String> {
    let mut cfg = RunConfig::new(command, q);
    cfg.motive = motive;
    cfg.seed = seed;
    let r = experiments::run(&cfg);
    if r.passed {
        Ok(r)
    } else {
        let bad: Vec<_> = r.assertions.iter().filter(|a| !a.passed).map(|a| a.name.clone()).collect();
        Err(format!("q={q}: {}", bad.join(", ")))
    }
}

fn criterion_6() -> Outcome {
    let mut n = 0;
    for q in [2, 3] {
        n += section(q, Command::Siegel, MotiveKind::Ma, 6)?.assertions.len();
    }
    Ok(format!("5 values of a per q in {{2, 3}}, {n} checks"))
}

fn criterion_7() -> Outcome {
    let mut n = 0;
    for q in [2, 3] {
        n += section(q, Command::Siegel, MotiveKind::Mt, 7)?.assertions.len();
        n += section(q, Command::Dseries, MotiveKind::Mt, 7)?.assertions.len();
    }
    Ok(format!("S = (s(a), omega), s'(0), v(d_0), local inverse; {n} checks"))
}

fn criterion_8() -> Outcome {
    let c = Ctx::new(2).map_err(err)?;
    let pairs = experiments::reference_pairs(&c);
    let mut disagreements = 0;
    let mut units = 0;
    for (a, a2) in &pairs {
        let found = solve_semilinear_bounded(&ma_matrix(a), &ma_matrix(a2), 4).map_err(err)?.has_unit();
        let closed = ma_isomorphic_closed_form(a, a2).map_err(err)?;
        disagreements += usize::from(found != closed);
        units += usize::from(found);
    }
    ensure(pairs.len() == 14, format!("{} pairs", pairs.len()))?;
    ensure(disagreements == 0, format!("{disagreements} disagreements"))?;
    ensure(units == 9, format!("{units} isomorphic pairs, expected 9"))?;
    Ok("9 pairs in F_4^* and 5 outside, 0 disagreements".into())
}

fn criterion_9() -> Outcome {
    // q = 3: for q = 2 the period π_1 lies in R_∞ and (1, π_1) has no rank certificate
    let an = Analytic::new(&Ctx::new(3).map_err(err)?);
    let c = an.ctx().clone();
    let omega = c.omega();
    let mut notes = vec![];
    for (name, s11, want) in [
        ("0", c.zero(), false),
        ("omega/theta", &omega * &c.t(), false),
        ("pi1", an.pi1().map_err(err)?, true),
    ] {
        let v = dual_exists(&SiegelMatrix::row_1x2(s11, omega.clone())).map_err(err)?;
        ensure(v.is_lattice == want, format!("{name}: got {}", v.is_lattice))?;
        notes.push(format!("{name}: rank {}/{}", v.certificate.rank, v.required_rank));
    }
    Ok(notes.join(", "))
}

fn criterion_10() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for q in [2, 3] {
        let c = elim::elim_context(q).map_err(err)?;
        let mut rng = sample::rng(10);
        let r = |rng: &mut _| sample::random_number(&c, rng, -c.ram(), 3);
        for i in 0..20 {
            let p = ElimParams {
                a11: r(&mut rng),
                a12: r(&mut rng),
                a21: r(&mut rng),
            };
            let x2 = TSeries::new((0..6).map(|_| r(&mut rng)).collect());
            let chk = elim::check_elimination(&p, &x2).map_err(err)?;
            ensure(chk.passed(), format!("q={q} #{i}: {chk:?}"))?;
            let uv = elim::uv_reparam(&p).map_err(err)?;
            ensure(uv.u_forms_agree, format!("q={q} #{i}: u forms"))?;
            let back = elim::uv_inverse(&uv.a21, &uv.u, &uv.v).map_err(err)?;
            ensure(
                (&back.a11 - &p.a11).is_zero() && (&back.a12 - &p.a12).is_zero(),
                format!("q={q} #{i}: round trip"),
            )?;
            checked += 1;
        }
    }
    let d = within(t, Duration::from_secs(5))?;
    Ok(format!("{checked} instances at T-order 6; {d}"))
}

fn criterion_11() -> Outcome {
    let run = || {
        Proc::new(env!("CARGO_BIN_EXE_tmotive"))
            .args(["all", "--seed", "7", "--json"])
            .output()
            .map_err(err)
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), format!("exit status {}", a.status))?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, "reports differ")?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Carlitz coefficients", criterion_1),
        ("period valuations", criterion_2),
        ("d_m closed forms", criterion_3),
        ("coefficient shapes", criterion_4),
        ("functional equation", criterion_5),
        ("M(a) lattice is L_0", criterion_6),
        ("M_t(a) Siegel matrix and s(a)", criterion_7),
        ("isomorphism criterion", criterion_8),
        ("duality", criterion_9),
        ("elimination", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
