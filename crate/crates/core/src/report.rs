//! Serialization helpers shared by the JSON reports.

use num_rational::Ratio;
use serde::Serializer;

use crate::puiseux::PuiseuxNumber;

pub fn ratio_str(r: &Ratio<i64>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ser_ratio<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_str(r))
}

pub fn ser_opt_ratio<S: Serializer>(r: &Option<Ratio<i64>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&ratio_str(r)),
        None => s.serialize_none(),
    }
}

pub fn ser_number<S: Serializer>(x: &PuiseuxNumber, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn ser_numbers<S: Serializer>(xs: &[PuiseuxNumber], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}
