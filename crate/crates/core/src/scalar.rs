//! Scalar abstraction shared by payoff arithmetic and the feasibility solver.
//!
//! Floating-point types give fast approximate answers; [`BigRational`] gives
//! exact ones. Everything numeric in the crate is generic over [`Scalar`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Ordered field used for payoffs and linear programming.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
    fn is_finite(&self) -> bool;

    /// Magnitudes at or below this are treated as zero by the simplex pivot rules.
    fn pivot_epsilon() -> Self;

    /// Smallest common slack that counts as a strict ordering.
    fn realizable_threshold() -> Self;

    /// Parses a plain decimal literal such as `-1.25`, `0.1` or `3e-2`.
    fn from_decimal(text: &str) -> Option<Self>;

    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits every scalar")
    }
}

macro_rules! float_scalar {
    ($t:ty, $eps:expr) => {
        impl Scalar for $t {
            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
            fn pivot_epsilon() -> Self {
                $eps
            }
            fn realizable_threshold() -> Self {
                1e-9
            }
            fn from_decimal(text: &str) -> Option<Self> {
                let v: $t = text.trim().parse().ok()?;
                v.is_finite().then_some(v)
            }
        }
    };
}

float_scalar!(f32, 1e-6);
float_scalar!(f64, 1e-12);

impl Scalar for BigRational {
    fn is_finite(&self) -> bool {
        true
    }
    fn pivot_epsilon() -> Self {
        BigRational::zero()
    }
    // Exact arithmetic: any strictly positive slack is a proof of strictness.
    fn realizable_threshold() -> Self {
        BigRational::zero()
    }
    fn from_decimal(text: &str) -> Option<Self> {
        parse_decimal(text)
    }
}

/// Exact rational value of a decimal literal (`[+-]digits[.digits][e[+-]digits]`).
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_decimal("0.1"), Some(ratio(1, 10)));
        assert_eq!(parse_decimal("-1.9"), Some(ratio(-19, 10)));
        assert_eq!(parse_decimal("3"), Some(ratio(3, 1)));
        assert_eq!(parse_decimal("2.5e2"), Some(ratio(250, 1)));
        assert_eq!(parse_decimal("+.5"), Some(ratio(1, 2)));
        assert_eq!(parse_decimal("1E-3"), Some(ratio(1, 1000)));
    }

    #[test]
    fn malformed_decimals_are_rejected() {
        for bad in ["", "-", ".", "1.2.3", "abc", "1e", "0x10", "1,5"] {
            assert_eq!(parse_decimal(bad), None, "{bad:?}");
        }
    }

    #[test]
    fn float_parsing_rejects_non_finite() {
        assert_eq!(<f64 as Scalar>::from_decimal("inf"), None);
        assert_eq!(<f64 as Scalar>::from_decimal("NaN"), None);
        assert_eq!(<f64 as Scalar>::from_decimal("0.25"), Some(0.25));
    }
}
