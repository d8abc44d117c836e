//! Cross-module checks: motive → kernel → Siegel matrix → lattice verdicts.

use tmotive::analytic::Analytic;
use tmotive::elim::{build_q, elim_context, q_from_motive, ElimParams};
use tmotive::lattice::{
    dual_exists, lattices_isomorphic_1x2, siegel, siegel_is_lattice, triangular_kernel_solve, IsoVerdict,
    Orientation, SiegelMatrix,
};
use tmotive::motive::MotiveSpec;
use tmotive::{sample, Ctx, Mat};

#[test]
fn mt_kernel_matches_log_formula() {
    let an = Analytic::new(&Ctx::new(2).unwrap());
    let c = an.ctx().clone();
    let a = &c.t() * &c.t();
    let b = triangular_kernel_solve(&an, &MotiveSpec::mt(&a), Orientation::Lower).unwrap();
    let s = siegel(&b).unwrap();
    assert!(siegel_is_lattice(&s).unwrap().is_lattice);
    let via_log = an.siegel_s(&a).unwrap().s;
    assert!(s.eq_at_precision(&SiegelMatrix::row_1x2(via_log.clone(), c.omega())));
    // s(a) has fractional valuation here, so the transpose is still a lattice
    let v = via_log.valuation().unwrap();
    let dual = dual_exists(&s).unwrap();
    assert_eq!(dual.is_lattice, !v.is_integer());
}

#[test]
fn ma_lattices_are_all_isomorphic_to_l0() {
    for q in [2, 3] {
        let an = Analytic::new(&Ctx::new(q).unwrap());
        let c = an.ctx().clone();
        let l0 = SiegelMatrix::row_1x2(c.zero(), c.omega());
        let mut rng = sample::rng(21);
        for _ in 0..3 {
            let a = sample::random_number(&c, &mut rng, c.ram(), 2);
            let b = triangular_kernel_solve(&an, &MotiveSpec::ma(&a), Orientation::Upper).unwrap();
            let rep = lattices_isomorphic_1x2(&l0, &siegel(&b).unwrap()).unwrap();
            assert_eq!(rep.verdict, IsoVerdict::EqualAfterNormalization, "q={q}");
        }
    }
}

#[test]
fn q_matrix_from_nonpure_motive() {
    let c = elim_context(3).unwrap();
    let mut rng = sample::rng(22);
    let p = ElimParams {
        a11: sample::random_number(&c, &mut rng, 0, 3),
        a12: sample::random_number(&c, &mut rng, 0, 3),
        a21: sample::random_number(&c, &mut rng, 0, 3),
    };
    let a = Mat::from_rows(vec![vec![p.a11.clone(), p.a12.clone()], vec![p.a21.clone(), c.one()]]).unwrap();
    let m = MotiveSpec::nonpure(&a).unwrap();
    assert!(q_from_motive(&m).unwrap().eq_at_precision(&build_q(&p)));
    assert!(q_from_motive(&MotiveSpec::carlitz(&c)).is_err());
}
