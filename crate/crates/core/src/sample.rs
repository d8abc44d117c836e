//! Seeded random elements for tests and experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::puiseux::{Ctx, PuiseuxNumber};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact element with valuation at least `min_units` (units of `1/e`) and
/// `terms` random coefficients at integer exponents of `t`.
pub fn random_number(ctx: &Ctx, rng: &mut impl Rng, min_units: i64, terms: usize) -> PuiseuxNumber {
    let size = ctx.tower().field().size();
    let e = ctx.ram();
    let start = min_units.div_euclid(e) * e + if min_units.rem_euclid(e) == 0 { 0 } else { e };
    let mut coeffs = vec![0; (terms.max(1) - 1) * e as usize + 1];
    for i in 0..terms.max(1) {
        coeffs[i * e as usize] = rng.gen_range(0..size);
    }
    if coeffs[0] == 0 {
        coeffs[0] = 1;
    }
    PuiseuxNumber::from_coeffs(ctx, start, coeffs, None)
}

/// Random element of the constant field with nonzero value.
pub fn random_unit(ctx: &Ctx, rng: &mut impl Rng) -> PuiseuxNumber {
    let size = ctx.tower().field().size();
    ctx.constant(rng.gen_range(1..size))
}
