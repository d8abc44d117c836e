//! Text form `c * t^(n/e) + ... + O(t^(P/e))` with `t = θ^{-1}`.
//!
//! Canonical output writes every coefficient as its full coordinate vector
//! over `F_p` and every exponent over the context's ramification index, so
//! printing and parsing round-trip exactly. The parser also accepts the
//! shorthands `1`, `w` (for ω), `t`, `t^n` and reduced fractions.

use std::fmt;

use num_rational::Ratio;

use super::{Ctx, PuiseuxNumber};
use crate::error::{Error, Result};
use crate::field::{format_coords, parse_coords, Fe};

impl fmt::Display for PuiseuxNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.ctx.ram();
        let field = self.ctx.tower().field();
        let mut parts: Vec<String> = self
            .terms()
            .map(|(n, c)| format!("{}*t^({}/{})", format_coords(&field.coords(c)), n, e))
            .collect();
        if let Some(p) = self.prec {
            parts.push(format!("O(t^({}/{}))", p, e));
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + "))
    }
}

impl Ctx {
    /// Parse a series literal in this context.
    pub fn parse(&self, s: &str) -> Result<PuiseuxNumber> {
        let mut acc = self.zero();
        let mut prec: Option<i64> = None;
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty series literal".into()));
        }
        for raw in split_terms(s) {
            let term = raw.trim();
            if let Some(inner) = term.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
                let n = self.parse_t_power(inner.trim())?;
                prec = Some(prec.map_or(n, |p| p.min(n)));
                continue;
            }
            let (coef, exp) = match term.split_once('*') {
                Some((c, t)) => (self.parse_coef(c.trim())?, self.parse_t_power(t.trim())?),
                None if term.starts_with('t') => (1, self.parse_t_power(term)?),
                None => (self.parse_coef(term)?, 0),
            };
            acc = acc + self.monomial(coef, exp);
        }
        Ok(match prec {
            Some(p) => {
                let out = acc.truncate(p);
                if out.prec_units() != Some(p) {
                    return Err(Error::Parse(format!(
                        "precision O(t^({p}/{})) exceeds the working cap",
                        self.ram()
                    )));
                }
                out
            }
            None => acc,
        })
    }

    fn parse_coef(&self, s: &str) -> Result<Fe> {
        let field = self.tower().field();
        if s == "w" || s == "ω" {
            return Ok(self.tower().omega());
        }
        if s.starts_with('[') {
            return field.from_coords(&parse_coords(s)?);
        }
        if s.starts_with('F') {
            return self.tower().parse_element(s);
        }
        let k: i64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient `{s}`")))?;
        Ok(field.from_int(k))
    }

    /// `t`, `t^n`, `t^(n)` or `t^(n/d)`, returned in units of `1/e`.
    fn parse_t_power(&self, s: &str) -> Result<i64> {
        let rest = s
            .strip_prefix('t')
            .ok_or_else(|| Error::Parse(format!("expected a power of t, got `{s}`")))?;
        if rest.is_empty() {
            return Ok(self.ram());
        }
        let body = rest
            .strip_prefix('^')
            .ok_or_else(|| Error::Parse(format!("expected `t^..`, got `{s}`")))?;
        let body = body
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .unwrap_or(body);
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (body.trim(), "1"),
        };
        let num: i64 = num
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent `{body}`")))?;
        let den: i64 = den
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent `{body}`")))?;
        if den <= 0 {
            return Err(Error::Parse(format!("bad exponent denominator in `{body}`")));
        }
        let units = Ratio::new(num, den) * self.ram();
        if !units.is_integer() {
            return Err(Error::Parse(format!(
                "exponent {num}/{den} needs ramification beyond e = {}",
                self.ram()
            )));
        }
        Ok(units.to_integer())
    }
}

/// Split on top-level `+`, keeping a leading sign with its term and
/// ignoring `+`/`-` inside parentheses or brackets.
fn split_terms(s: &str) -> Vec<String> {
    let mut out = vec![];
    let mut depth = 0;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch == '+' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_forms() {
        let c = Ctx::new(2).unwrap();
        assert_eq!(c.zero().to_string(), "0");
        assert_eq!(c.theta().to_string(), "[1,0]*t^(-3/3)");
        assert_eq!(c.omega().to_string(), "[0,1]*t^(0/3)");
        let z = PuiseuxNumber::zero_at(&c, 7);
        assert_eq!(z.to_string(), "O(t^(7/3))");
        assert_eq!(c.parse("O(t^(7/3))").unwrap(), z);
    }

    #[test]
    fn shorthand_parsing() {
        let c = Ctx::new(2).unwrap();
        assert_eq!(c.parse("t").unwrap(), c.t());
        assert_eq!(c.parse("1*t^-1").unwrap(), c.theta());
        assert_eq!(c.parse("w*t^(1/3) + 1").unwrap(), c.monomial(2, 1) + c.one());
        assert_eq!(c.parse("F4:[1,1]").unwrap(), c.constant(3));
        assert!(c.parse("t^(1/2)").is_err());
        assert!(c.parse("").is_err());
        assert!(c.parse("x").is_err());
    }

    proptest! {
        #[test]
        fn literal_round_trip(
            start in -20i64..20,
            coeffs in proptest::collection::vec(0u32..4, 0..12),
            rel in proptest::option::of(0i64..30),
        ) {
            let c = Ctx::new(2).unwrap();
            let prec = rel.map(|r| start + r);
            let x = PuiseuxNumber::from_coeffs(&c, start, coeffs, prec);
            let back = c.parse(&x.to_string()).unwrap();
            prop_assert_eq!(back.to_string(), x.to_string());
            prop_assert_eq!(back, x);
        }
    }
}
