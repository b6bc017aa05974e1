use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PlError;

/// Exact rational number. `BigRational` keeps the denominator positive and the
/// fraction reduced after every operation.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `num/den` in lowest terms, always with an explicit denominator.
pub fn fmt_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `num/den`, a bare integer, or a finite decimal like `0.375`.
pub fn parse_rational(s: &str) -> Result<Rational, PlError> {
    let s = s.trim();
    let bad = || PlError::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let digits: BigInt =
            format!("{}{}", if whole_abs.is_empty() { "0" } else { whole_abs }, frac).parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(digits, den);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale both down by the same power of two.
        let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
        let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn is_power_of_two(n: &BigInt) -> bool {
    n.is_positive() && (n & (n - BigInt::one())).is_zero()
}

/// True when the denominator is a power of two.
pub fn is_dyadic(x: &Rational) -> bool {
    is_power_of_two(x.denom())
}

/// True for 2^n, n ∈ ℤ.
pub fn is_power_of_two_ratio(x: &Rational) -> bool {
    if !x.is_positive() {
        return false;
    }
    let (n, d) = (x.numer(), x.denom());
    (n.is_one() && is_power_of_two(d)) || (d.is_one() && is_power_of_two(n))
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// Smallest-denominator-ish rational strictly between `a < b`, used to pick
/// readable sample points.
pub fn simple_between(a: &Rational, b: &Rational) -> Rational {
    debug_assert!(a < b);
    let mut den = BigInt::one();
    loop {
        // ceil(a * den + tiny) .. check the next integer numerator above a*den
        let scaled = a * Rational::from_integer(den.clone());
        let n = scaled.floor().to_integer() + BigInt::one();
        let cand = Rational::new(n, den.clone());
        if &cand < b {
            return cand;
        }
        den *= 2;
        if den.bits() > 4096 {
            return midpoint(a, b);
        }
    }
}

pub fn gcd_check(x: &Rational) -> bool {
    x.denom().is_positive() && x.numer().gcd(x.denom()).is_one()
}
