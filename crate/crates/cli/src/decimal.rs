//! Human-readable decimals for exact values. Display only.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use toral_core::{Rational, TowerExt};

pub const DIGITS: usize = 40;

/// `x` truncated to `DIGITS` significant digits, from a 128-bit-plus enclosure.
pub fn decimal(x: &TowerExt) -> String {
    let q = match x.as_rational() {
        Some(q) => q,
        None => {
            // enough bits for 40 digits below the leading one, whatever the magnitude
            let mag = x.to_f64().abs().log2().abs().ceil() as u32;
            x.enclose(256 + mag).lo_rational()
        }
    };
    decimal_rational(&q)
}

pub fn decimal_rational(q: &Rational) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let sign = if q.is_negative() { "-" } else { "" };
    let v = q.abs();
    let (n, d) = (v.numer().clone(), v.denom().clone());
    // smallest e with n·10^e ≥ d·10^(DIGITS−1)
    let lo = BigInt::from(10u32).pow(DIGITS as u32 - 1);
    let mut e: i64 = DIGITS as i64 - 1 - (n.to_string().len() as i64 - d.to_string().len() as i64);
    let scaled = |e: i64| -> BigInt {
        if e >= 0 {
            &n * BigInt::from(10u32).pow(e as u32) / &d
        } else {
            &n / (&d * BigInt::from(10u32).pow((-e) as u32))
        }
    };
    while scaled(e) < lo {
        e += 1;
    }
    while scaled(e - 1) >= lo {
        e -= 1;
    }
    let digits = scaled(e).to_string();
    let int_len = DIGITS as i64 - e;
    let body = if int_len <= 0 {
        format!("0.{}{}", "0".repeat((-int_len) as usize), digits)
    } else if int_len >= DIGITS as i64 {
        format!("{}{}", digits, "0".repeat((int_len - DIGITS as i64) as usize))
    } else {
        let (a, b) = digits.split_at(int_len as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}
