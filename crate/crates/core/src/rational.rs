//! Text form of exact weights: integers print bare, everything else as `p/q`.
//! Parsing also accepts finite decimals such as `0.9`.

use crate::graph::Weight;

pub fn format_weight(w: Weight) -> String {
    if w.is_integer() {
        w.numer().to_string()
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

/// Parses `p`, `p/q` or a finite decimal.
pub fn parse_weight(s: &str) -> Option<Weight> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        return (q != 0).then(|| Weight::new(p, q));
    }
    if let Ok(p) = s.parse::<i64>() {
        return Some(Weight::from_integer(p));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.')?;
    if (int.is_empty() && frac.is_empty())
        || !int.chars().all(|c| c.is_ascii_digit())
        || !frac.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut den: i64 = 1;
    for _ in 0..frac.len() {
        den = den.checked_mul(10)?;
    }
    let int_part: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let frac_part: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let num = int_part.checked_mul(den)?.checked_add(frac_part)?;
    let w = Weight::new(num, den);
    Some(if neg { -w } else { w })
}

/// Exact value of a finite float through its shortest round-trip decimal.
pub fn weight_from_f64(x: f64) -> Option<Weight> {
    if !x.is_finite() {
        return None;
    }
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        return Some(Weight::from_integer(x as i64));
    }
    let s = format!("{x}");
    if s.contains('e') {
        return None;
    }
    parse_weight(&s)
}

/// Serde adapter writing a [`Weight`] as its text form.
pub mod as_text {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use super::{format_weight, parse_weight};
    use crate::graph::Weight;

    pub fn serialize<S: Serializer>(w: &Weight, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_weight(*w))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Weight, D::Error> {
        let s = String::deserialize(d)?;
        parse_weight(&s).ok_or_else(|| D::Error::custom(format!("invalid rational `{s}`")))
    }
}

/// Same as [`as_text`] for optional weights.
pub mod opt_text {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use super::{format_weight, parse_weight};
    use crate::graph::Weight;

    pub fn serialize<S: Serializer>(w: &Option<Weight>, s: S) -> Result<S::Ok, S::Error> {
        match w {
            Some(w) => s.serialize_some(&format_weight(*w)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Weight>, D::Error> {
        match Option::<String>::deserialize(d)? {
            Some(s) => parse_weight(&s)
                .map(Some)
                .ok_or_else(|| D::Error::custom(format!("invalid rational `{s}`"))),
            None => Ok(None),
        }
    }
}
