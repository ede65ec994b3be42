//! Exact rationals used for every cylinder probability.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// `1 / base^exp`
pub fn inverse_power(base: usize, exp: usize) -> Q {
    Q::new(BigInt::one(), BigInt::from(base).pow(exp as u32))
}

/// Renders as `num/den`, or just `num` for integers.
pub fn to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `num/den`, `num` or a plain decimal-free integer string.
pub fn parse(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// Natural log of a positive rational, evaluated through its numerator and
/// denominator separately so tiny values do not underflow.
pub fn ln(x: &Q) -> f64 {
    debug_assert!(x.is_positive());
    big_ln(x.numer()) - big_ln(x.denom())
}

fn big_ln(n: &BigInt) -> f64 {
    match n.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => {
            let bits = n.bits();
            let shift = bits.saturating_sub(64);
            let top = (n >> shift).to_f64().unwrap_or(f64::MAX);
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `-x ln x`, with the convention `0 ln 0 = 0`.
pub fn plogp(x: &Q) -> f64 {
    if x.is_zero() || x.is_one() {
        0.0
    } else {
        -to_f64(x) * ln(x)
    }
}

/// Serde adapter storing rationals as `"num/den"` strings.
pub mod serde_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::Q;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = String::deserialize(d)?;
        super::parse(&raw).ok_or_else(|| de::Error::custom(format!("bad rational `{raw}`")))
    }
}

/// Serde adapter for `Vec<Q>` as a list of strings.
pub mod serde_str_vec {
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::Q;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&super::to_string(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|raw| super::parse(&raw).ok_or_else(|| de::Error::custom(format!("bad rational `{raw}`"))))
            .collect()
    }
}

/// Serde adapter for `Option<Q>`.
pub mod serde_str_opt {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::Q;

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&super::to_string(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|raw| super::parse(&raw).ok_or_else(|| de::Error::custom(format!("bad rational `{raw}`"))))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_strings() {
        assert_eq!(to_string(&q(5, 8)), "5/8");
        assert_eq!(to_string(&q(4, 2)), "2");
        assert_eq!(parse("10/16"), Some(q(5, 8)));
        assert_eq!(parse(" 3 "), Some(q(3, 1)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn ln_of_tiny_rational() {
        let x = inverse_power(6, 400);
        let want = -400.0 * 6f64.ln();
        assert!((ln(&x) - want).abs() < 1e-9 * want.abs());
        assert!((ln(&q(1, 2)) + std::f64::consts::LN_2).abs() < 1e-15);
    }
}
