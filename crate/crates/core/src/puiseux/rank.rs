//! Rank over `R_∞ = F_q((θ^{-1}))`.
//!
//! Each coordinate `x ∈ F_{q^k}((t^{1/e}))` is expanded along the
//! `R_∞`-basis `{β_i · t^{j/e}}` (β an `F_q`-basis of `F_{q^k}`, `0 ≤ j < e`),
//! and the resulting matrix over `F_q((t))` is reduced with valuation pivoting.

use num_rational::Ratio;
use serde::Serialize;

use super::{Ctx, PuiseuxNumber};
use crate::error::{Error, Result};

/// A rank decision together with the input precision it was decided at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCertificate {
    pub rank: usize,
    /// Smallest absolute precision among the inputs (`None`: all inputs exact).
    #[serde(serialize_with = "crate::report::ser_opt_ratio")]
    pub precision: Option<Ratio<i64>>,
}

/// `R_∞`-rank of a list of scalars.
pub fn r_infinity_rank(xs: &[PuiseuxNumber]) -> Result<RankCertificate> {
    let vectors: Vec<Vec<PuiseuxNumber>> = xs.iter().map(|x| vec![x.clone()]).collect();
    r_infinity_rank_vectors(&vectors)
}

/// `R_∞`-rank of vectors in `C_∞^n` (each vector given by its `n` coordinates).
pub fn r_infinity_rank_vectors(vectors: &[Vec<PuiseuxNumber>]) -> Result<RankCertificate> {
    let Some(first) = vectors.iter().flatten().next() else {
        return Ok(RankCertificate {
            rank: 0,
            precision: None,
        });
    };
    let ctx = first.ctx().clone();
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::Incompatible("vectors of different lengths".into()));
    }
    let precision = vectors
        .iter()
        .flatten()
        .filter_map(|x| x.prec_units())
        .min()
        .map(|p| ctx.units_to_val(p));
    // columns = vectors, rows = R_∞-coordinates
    let cols: Vec<Vec<PuiseuxNumber>> = vectors
        .iter()
        .map(|v| v.iter().flat_map(|x| expand(&ctx, x)).collect())
        .collect();
    let nrows = cols.first().map_or(0, |c| c.len());
    let ncols = cols.len();
    let mut m: Vec<Vec<PuiseuxNumber>> = (0..nrows)
        .map(|r| (0..ncols).map(|c| cols[c][r].clone()).collect())
        .collect();
    let mut row_used = vec![false; nrows];
    let mut col_used = vec![false; ncols];
    let mut rank = 0;
    loop {
        let mut best: Option<(usize, usize, i64)> = None;
        for (r, row) in m.iter().enumerate() {
            if row_used[r] {
                continue;
            }
            for (c, x) in row.iter().enumerate() {
                if col_used[c] {
                    continue;
                }
                if let Some(v) = x.val_units() {
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((r, c, v));
                    }
                }
            }
        }
        let Some((pr, pc, _)) = best else { break };
        rank += 1;
        row_used[pr] = true;
        col_used[pc] = true;
        let pivot_inv = m[pr][pc].inv()?;
        let pivot_row = m[pr].clone();
        for r in 0..nrows {
            if r == pr || row_used[r] || m[r][pc].is_exact_zero() {
                continue;
            }
            let factor = &m[r][pc] * &pivot_inv;
            for c in 0..ncols {
                if col_used[c] && c != pc {
                    continue;
                }
                let upd = &m[r][c] - &(&factor * &pivot_row[c]);
                m[r][c] = upd;
            }
            m[r][pc] = ctx.zero();
        }
    }
    let undecided = (0..nrows)
        .filter(|r| !row_used[*r])
        .any(|r| (0..ncols).any(|c| !col_used[c] && !m[r][c].is_exact_zero()));
    if undecided {
        return Err(Error::InsufficientPrecision(format!(
            "rank is at least {rank}; remaining entries vanish only to precision {}",
            precision.map_or("∞".to_string(), |p| p.to_string())
        )));
    }
    Ok(RankCertificate { rank, precision })
}

/// Coordinates of `x` over `R_∞`, ordered by `(j, i)` for the basis element `β_i t^{j/e}`.
fn expand(ctx: &Ctx, x: &PuiseuxNumber) -> Vec<PuiseuxNumber> {
    let e = ctx.ram();
    let k = ctx.tower().k() as usize;
    let mut out = Vec::with_capacity(e as usize * k);
    for j in 0..e {
        let mut parts: Vec<Vec<(i64, u32)>> = vec![vec![]; k];
        for (n, c) in x.terms() {
            if n.rem_euclid(e) == j {
                for (i, ci) in ctx.tower().fq_coords(c).into_iter().enumerate() {
                    if ci != 0 {
                        parts[i].push((n - j, ci));
                    }
                }
            }
        }
        for terms in parts {
            let prec = x.prec_units().map(|p| p - j);
            let acc = terms
                .into_iter()
                .fold(ctx.zero(), |acc, (n, c)| acc + ctx.monomial(c, n));
            out.push(match prec {
                Some(p) => acc.truncate(p),
                None => acc,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        for q in [2u64, 3] {
            let c = Ctx::new(q).unwrap();
            let w = c.omega();
            assert_eq!(r_infinity_rank(&[c.one(), w.clone()]).unwrap().rank, 2);
            assert_eq!(
                r_infinity_rank(&[c.one(), c.zero(), w.clone()]).unwrap().rank,
                2
            );
            assert_eq!(
                r_infinity_rank(&[c.one(), w.clone(), c.one() + w.clone()])
                    .unwrap()
                    .rank,
                2
            );
            // θ-multiples are R_∞-dependent on 1
            assert_eq!(r_infinity_rank(&[c.one(), c.theta()]).unwrap().rank, 1);
            // a fractional power of t is independent of R_{∞,2}
            let frac = c.monomial(1, 1);
            assert_eq!(r_infinity_rank(&[c.one(), w, frac]).unwrap().rank, 3);
        }
    }

    #[test]
    fn inexact_dependence_is_undecidable() {
        let c = Ctx::new(2).unwrap();
        let x = (c.theta() - c.one()).inv().unwrap();
        assert!(matches!(
            r_infinity_rank(&[c.one(), x]),
            Err(Error::InsufficientPrecision(_))
        ));
        let frac = c.monomial(1, 1).truncate(40);
        let cert = r_infinity_rank(&[c.one(), c.omega(), frac]).unwrap();
        assert_eq!(cert.rank, 3);
        assert_eq!(cert.precision, Some(Ratio::new(40, 3)));
    }

    #[test]
    fn vectors_in_two_dimensions() {
        let c = Ctx::new(2).unwrap();
        let z = c.zero();
        let v1 = vec![c.one(), z.clone()];
        let v2 = vec![z.clone(), c.one()];
        let v3 = vec![c.monomial(1, 1), c.monomial(1, 2)];
        let v4 = vec![c.theta(), c.one()];
        let cert = r_infinity_rank_vectors(&[v1, v2, v3, v4]).unwrap();
        assert_eq!(cert.rank, 3);
    }
}
