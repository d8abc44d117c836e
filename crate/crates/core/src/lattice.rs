//! Lattice bases, Siegel matrices, duality, and kernel bases of `M(a)`, `M_t(a)`.

use num_rational::Ratio;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::analytic::{certified_zero, Analytic};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::motive::{ExpValue, MotiveSpec};
use crate::puiseux::{r_infinity_rank_vectors, PuiseuxNumber, RankCertificate};

/// Vectors `l_1, ..., l_r` in `C_∞^n`; the first `n` form the head.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    pub n: usize,
    pub vectors: Vec<Vec<PuiseuxNumber>>,
    pub provenance: String,
}

impl LatticeBasis {
    pub fn new(vectors: Vec<Vec<PuiseuxNumber>>, provenance: impl Into<String>) -> Result<Self> {
        let n = vectors.first().map_or(0, |v| v.len());
        if n == 0 || vectors.len() < n || vectors.iter().any(|v| v.len() != n) {
            return Err(Error::Shape("need at least n vectors of length n".into()));
        }
        Ok(LatticeBasis {
            n,
            vectors,
            provenance: provenance.into(),
        })
    }

    pub fn r(&self) -> usize {
        self.vectors.len()
    }

    fn head(&self) -> Mat {
        Mat::from_rows(self.vectors[..self.n].to_vec()).expect("square")
    }

    /// Definition of a lattice: the head spans `C_∞^n` and all `r` vectors
    /// are independent over `R_∞`.
    pub fn lattice_certificate(&self) -> Result<RankCertificate> {
        let det = self.head().determinant()?;
        if det.is_zero() {
            return Err(Error::SingularHead);
        }
        r_infinity_rank_vectors(&self.vectors)
    }

    pub fn is_lattice(&self) -> Result<bool> {
        Ok(self.lattice_certificate()?.rank == self.r())
    }
}

impl Serialize for LatticeBasis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let vectors: Vec<Vec<String>> = self
            .vectors
            .iter()
            .map(|v| v.iter().map(|x| x.to_string()).collect())
            .collect();
        let mut st = s.serialize_struct("LatticeBasis", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("r", &self.r())?;
        st.serialize_field("provenance", &self.provenance)?;
        st.serialize_field("vectors", &vectors)?;
        st.end()
    }
}

/// `(l_{n+1}, ..., l_r)ᵗ = S (l_1, ..., l_n)ᵗ`.
#[derive(Clone, Debug)]
pub struct SiegelMatrix {
    pub entries: Mat,
}

impl SiegelMatrix {
    pub fn new(rows: Vec<Vec<PuiseuxNumber>>) -> Result<Self> {
        Ok(SiegelMatrix {
            entries: Mat::from_rows(rows)?,
        })
    }

    pub fn row_1x2(s1: PuiseuxNumber, s2: PuiseuxNumber) -> Self {
        SiegelMatrix {
            entries: Mat::from_rows(vec![vec![s1, s2]]).expect("1x2"),
        }
    }

    pub fn transpose(&self) -> Self {
        SiegelMatrix {
            entries: self.entries.transpose(),
        }
    }

    /// Smallest absolute precision among the entries, if any is inexact.
    pub fn precision(&self) -> Option<Ratio<i64>> {
        self.entries
            .entries()
            .iter()
            .filter_map(|x| x.precision())
            .min()
    }

    pub fn eq_at_precision(&self, other: &SiegelMatrix) -> bool {
        self.entries.rows() == other.entries.rows()
            && self.entries.cols() == other.entries.cols()
            && (&self.entries - &other.entries).is_zero()
    }
}

impl Serialize for SiegelMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .entries
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        let mut st = s.serialize_struct("SiegelMatrix", 2)?;
        st.serialize_field("rows", &rows)?;
        st.serialize_field(
            "precision",
            &self.precision().map(|p| crate::report::ratio_str(&p)),
        )?;
        st.end()
    }
}

/// `S = Tail · Head^{-1}` with the vectors as rows.
pub fn siegel(basis: &LatticeBasis) -> Result<SiegelMatrix> {
    let head = basis.head();
    if head.determinant()?.is_zero() {
        return Err(Error::SingularHead);
    }
    let inv = head.inverse()?;
    let tail = Mat::from_rows(basis.vectors[basis.n..].to_vec())?;
    Ok(SiegelMatrix {
        entries: &tail * &inv,
    })
}

/// Rank over `R_∞` of `e_1, ..., e_n` and the rows of `S`, compared with `r`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct LatticeVerdict {
    pub is_lattice: bool,
    pub certificate: RankCertificate,
    pub required_rank: usize,
}

pub fn siegel_is_lattice(s: &SiegelMatrix) -> Result<LatticeVerdict> {
    let n = s.entries.cols();
    let ctx = s.entries.entries()[0].ctx();
    let mut vectors: Vec<Vec<PuiseuxNumber>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { ctx.one() } else { ctx.zero() }).collect())
        .collect();
    vectors.extend(s.entries.to_rows());
    let required_rank = vectors.len();
    let certificate = r_infinity_rank_vectors(&vectors)?;
    Ok(LatticeVerdict {
        is_lattice: certificate.rank == required_rank,
        certificate,
        required_rank,
    })
}

/// The dual lattice exists iff `Sᵗ` is the Siegel matrix of a lattice.
pub fn dual_exists(s: &SiegelMatrix) -> Result<LatticeVerdict> {
    siegel_is_lattice(&s.transpose())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `M(a)`: exact-zero lower-left block.
    Upper,
    /// `M_t(a)`: exact-zero upper-right block.
    Lower,
}

/// Solves `exp(w) = y` for a one-dimensional exponential by
/// `w ← w − (exp(w) − y)`, starting at `w = y`. Requires `v(y)` above the
/// largest nonzero kernel valuation `bound`, where `exp` is an isometry.
fn additive_solve(
    y: &PuiseuxNumber,
    bound: Ratio<i64>,
    mut exp: impl FnMut(&PuiseuxNumber) -> Result<ExpValue>,
) -> Result<PuiseuxNumber> {
    if y.is_zero() {
        return Ok(y.clone());
    }
    let vy = y.valuation().expect("nonzero");
    if vy <= bound {
        return Err(Error::OutsideLogDomain { valuation: vy, bound });
    }
    let mut w = y.clone();
    let mut last = i64::MIN;
    for _ in 0..64 {
        let r = &exp(&w)?.value[0] - y;
        if r.is_zero() {
            return Ok(match r.prec_units() {
                Some(p) => w.truncate(p),
                None => w,
            });
        }
        let v = r.val_units().expect("nonzero");
        if v <= last {
            return Err(Error::ContractionFailure(format!("residual stalled at {v} units")));
        }
        last = v;
        w = &w - &r;
    }
    Err(Error::ContractionFailure("no convergence in 64 steps".into()))
}

/// Kernel basis of `M(a)` (upper) or `M_t(a)` (lower) from the periods and
/// one additive equation in the Carlitz-type coordinate.
pub fn triangular_kernel_solve(
    an: &Analytic,
    motive: &MotiveSpec,
    orientation: Orientation,
) -> Result<LatticeBasis> {
    let ctx = an.ctx().clone();
    if motive.n != 2 || motive.k() != 2 {
        return Err(Error::Shape("expected a rank-3 dimension-2 block motive".into()));
    }
    let a1 = &motive.a[0];
    let block_zero = match orientation {
        Orientation::Upper => a1[(1, 0)].is_exact_zero(),
        Orientation::Lower => a1[(0, 1)].is_exact_zero(),
    };
    if !block_zero {
        return Err(Error::Shape("off-diagonal block is not zero".into()));
    }
    let (pi1, pi2) = (an.pi1()?, an.pi2()?);
    let omega = ctx.omega();
    let zero = ctx.zero();
    let mut e = motive.exp_series(2);
    let vectors = match orientation {
        Orientation::Upper => {
            // exp((w, π_1)) = (exp_{𝔠_2}(w) + E, 0)
            let big_e = e.eval_adaptive(&[zero.clone(), pi1.clone()])?.value[0].clone();
            let w = additive_solve(&-big_e, an.v_pi2(), |z| an.exp_c2(z))?;
            vec![
                vec![w, pi1],
                vec![pi2.clone(), zero.clone()],
                vec![&omega * &pi2, zero],
            ]
        }
        Orientation::Lower => {
            // exp((π_2, z)) = (0, D + exp_𝔠(z))
            let d = e.eval_adaptive(&[pi2.clone(), zero.clone()])?.value[1].clone();
            let wpi2 = &omega * &pi2;
            let dw = e.eval_adaptive(&[wpi2.clone(), zero.clone()])?.value[1].clone();
            let z22 = additive_solve(&-d, an.v_pi1(), |z| an.exp_c(z))?;
            let z32 = additive_solve(&-dw, an.v_pi1(), |z| an.exp_c(z))?;
            vec![vec![zero, pi1], vec![pi2, z22], vec![wpi2, z32]]
        }
    };
    LatticeBasis::new(vectors, format!("{} kernel", motive.name))
}

/// `exp(l) = 0` and `exp(θ l) = 0` at precision for every basis vector.
pub fn verify_kernel(motive: &MotiveSpec, basis: &LatticeBasis) -> Result<bool> {
    let ctx = motive.ctx().clone();
    let theta = ctx.theta();
    let mut e = motive.exp_series(2);
    for v in &basis.vectors {
        let tv: Vec<_> = v.iter().map(|x| &theta * x).collect();
        if !certified_zero(&e.eval_adaptive(v)?, &ctx) || !certified_zero(&e.eval_adaptive(&tv)?, &ctx) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoVerdict {
    EqualAfterNormalization,
    DistinctAtPrecision,
    Inconclusive,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct IsoReport {
    pub verdict: IsoVerdict,
    pub detail: String,
}

/// Drops the `F_q[θ]` part (the `F_q`-coordinate along `1` of the terms at
/// integer exponents `≤ 0`), then scales by `F_q^*` so the leading
/// coefficient is the first admissible one in index order.
pub fn normalize_entry(x: &PuiseuxNumber) -> PuiseuxNumber {
    let ctx = x.ctx();
    let tower = ctx.tower();
    let field = tower.field();
    let e = ctx.ram();
    let mut y = x.clone();
    for (n, c) in x.terms() {
        if n <= 0 && n % e == 0 {
            let c0 = tower.fq_coords(c)[0];
            if c0 != 0 {
                y = &y - &ctx.monomial(c0, n);
            }
        }
    }
    let Some(lc) = y.leading_coeff() else {
        return y;
    };
    let best = field
        .elements()
        .filter(|l| *l != 0 && tower.in_subfield(*l, 1))
        .min_by_key(|l| field.mul(*l, lc))
        .expect("F_q^* nonempty");
    y.scale(best)
}

fn normal_form(s: &SiegelMatrix) -> Vec<PuiseuxNumber> {
    s.entries.entries().iter().map(normalize_entry).collect()
}

fn same(a: &[PuiseuxNumber], b: &[PuiseuxNumber]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).is_zero())
}

/// Sufficient isomorphism test for `1 × 2` Siegel matrices.
pub fn lattices_isomorphic_1x2(s1: &SiegelMatrix, s2: &SiegelMatrix) -> Result<IsoReport> {
    for s in [s1, s2] {
        if s.entries.rows() != 1 || s.entries.cols() != 2 {
            return Err(Error::Shape("expected 1x2 Siegel matrices".into()));
        }
    }
    let n1 = normal_form(s1);
    let n2 = normal_form(s2);
    let swapped = [n2[1].clone(), n2[0].clone()];
    if same(&n1, &n2) || same(&n1, &swapped) {
        return Ok(IsoReport {
            verdict: IsoVerdict::EqualAfterNormalization,
            detail: "normal forms agree at precision".into(),
        });
    }
    let r1 = dual_exists(s1);
    let r2 = dual_exists(s2);
    if let (Ok(r1), Ok(r2)) = (&r1, &r2) {
        if r1.certificate.rank != r2.certificate.rank {
            return Ok(IsoReport {
                verdict: IsoVerdict::DistinctAtPrecision,
                detail: format!(
                    "R_inf-rank of (1, s1, s2) differs: {} vs {}",
                    r1.certificate.rank, r2.certificate.rank
                ),
            });
        }
    }
    Ok(IsoReport {
        verdict: IsoVerdict::Inconclusive,
        detail: "normal forms differ but no invariant separates them".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::Ctx;

    #[test]
    fn siegel_examples() {
        let an = Analytic::new(&Ctx::new(2).unwrap());
        let c = an.ctx().clone();
        let (pi1, pi2) = (an.pi1().unwrap(), an.pi2().unwrap());
        let b = LatticeBasis::new(
            vec![
                vec![c.zero(), pi1.clone()],
                vec![pi2.clone(), c.zero()],
                vec![&c.omega() * &pi2, c.zero()],
            ],
            "L0",
        )
        .unwrap();
        let s = siegel(&b).unwrap();
        assert!(s.eq_at_precision(&SiegelMatrix::row_1x2(c.zero(), c.omega())));
        assert!(b.is_lattice().unwrap());
        let b = LatticeBasis::new(
            vec![
                vec![c.zero(), pi1.clone()],
                vec![pi2.clone(), c.one()],
                vec![c.zero(), pi1.clone()],
            ],
            "repeat",
        )
        .unwrap();
        assert!(siegel(&b).unwrap().eq_at_precision(&SiegelMatrix::row_1x2(c.one(), c.zero())));
        let sing = LatticeBasis::new(vec![vec![c.one(), c.one()], vec![c.one(), c.one()]], "x").unwrap();
        assert!(matches!(siegel(&sing), Err(Error::SingularHead)));
    }

    #[test]
    fn duality_examples() {
        let an = Analytic::new(&Ctx::new(2).unwrap());
        let c = an.ctx().clone();
        let w = c.omega();
        let real2 = SiegelMatrix::row_1x2(&w * &c.t(), w.clone());
        assert!(!dual_exists(&real2).unwrap().is_lattice);
        assert!(!dual_exists(&SiegelMatrix::row_1x2(c.zero(), w.clone())).unwrap().is_lattice);
        assert!(siegel_is_lattice(&real2).unwrap().is_lattice);
        // for q = 2 the Carlitz period lies in R_∞, so (1, π_1) is dependent
        // but only at finite precision
        let s = SiegelMatrix::row_1x2(an.pi1().unwrap(), w.clone());
        assert!(matches!(dual_exists(&s), Err(Error::InsufficientPrecision(_))));
        let an3 = Analytic::new(&Ctx::new(3).unwrap());
        let s = SiegelMatrix::row_1x2(an3.pi1().unwrap(), an3.ctx().omega());
        assert!(dual_exists(&s).unwrap().is_lattice);
    }

    #[test]
    fn two_by_two_transpose_pathology() {
        // lattice of rank 4 in C_∞^2 whose transposed Siegel matrix is not one
        let c = Ctx::new(2).unwrap();
        let t13 = c.parse("t^(1/3)").unwrap();
        let t23 = c.parse("t^(2/3)").unwrap();
        let s = SiegelMatrix::new(vec![
            vec![t13.clone(), &c.one() + &t13],
            vec![t23.clone(), t23],
        ])
        .unwrap();
        let direct = siegel_is_lattice(&s).unwrap();
        assert!(direct.is_lattice && direct.certificate.rank == 4);
        let dual = dual_exists(&s).unwrap();
        assert!(!dual.is_lattice);
        assert_eq!(dual.certificate.rank, 3);
    }

    #[test]
    fn kernel_bases() {
        for q in [2, 3] {
            let an = Analytic::new(&Ctx::new(q).unwrap());
            let c = an.ctx().clone();
            let a = &c.t() + &(&c.t() * &c.omega());
            let mt = MotiveSpec::mt(&a);
            let b = triangular_kernel_solve(&an, &mt, Orientation::Lower).unwrap();
            assert!(verify_kernel(&mt, &b).unwrap());
            assert!(b.is_lattice().unwrap());
            let s = siegel(&b).unwrap();
            let via_log = an.siegel_s(&a).unwrap();
            let expect = SiegelMatrix::row_1x2(via_log.s, c.omega());
            assert!(s.eq_at_precision(&expect), "q={q}");

            let ma = MotiveSpec::ma(&a);
            let b = triangular_kernel_solve(&an, &ma, Orientation::Upper).unwrap();
            assert!(verify_kernel(&ma, &b).unwrap());
            assert!(!b.vectors[0][0].is_zero());
            let s = siegel(&b).unwrap();
            let l0 = SiegelMatrix::row_1x2(c.zero(), c.omega());
            assert!(s.eq_at_precision(&l0));
            assert_eq!(
                lattices_isomorphic_1x2(&l0, &s).unwrap().verdict,
                IsoVerdict::EqualAfterNormalization
            );
        }
    }

    #[test]
    fn zero_parameter_gives_direct_sum_basis() {
        let an = Analytic::new(&Ctx::new(2).unwrap());
        let c = an.ctx().clone();
        let b = triangular_kernel_solve(&an, &MotiveSpec::ma(&c.zero()), Orientation::Upper).unwrap();
        assert!(b.vectors[0][0].is_zero());
        assert_eq!(b.vectors[0][1], an.pi1().unwrap());
    }

    #[test]
    fn isomorphism_verdicts() {
        let an = Analytic::new(&Ctx::new(2).unwrap());
        let c = an.ctx().clone();
        let l0 = SiegelMatrix::row_1x2(c.zero(), c.omega());
        assert_eq!(
            lattices_isomorphic_1x2(&l0, &l0).unwrap().verdict,
            IsoVerdict::EqualAfterNormalization
        );
        let shifted = SiegelMatrix::row_1x2(&c.theta() + &c.one(), c.omega());
        assert_eq!(
            lattices_isomorphic_1x2(&l0, &shifted).unwrap().verdict,
            IsoVerdict::EqualAfterNormalization
        );
        let an3 = Analytic::new(&Ctx::new(3).unwrap());
        let c3 = an3.ctx();
        let p = SiegelMatrix::row_1x2(an3.pi1().unwrap(), c3.omega());
        let l03 = SiegelMatrix::row_1x2(c3.zero(), c3.omega());
        assert_eq!(
            lattices_isomorphic_1x2(&l03, &p).unwrap().verdict,
            IsoVerdict::DistinctAtPrecision
        );
        let other = SiegelMatrix::row_1x2(c.t(), c.omega());
        assert_eq!(
            lattices_isomorphic_1x2(&l0, &other).unwrap().verdict,
            IsoVerdict::Inconclusive
        );
    }
}
