//! Independent reference values shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Float, ToPrimitive, Zero};

/// Fixed-point fraction bits; the series below cancel terms as large as `e^x`.
const BITS: i64 = 512;

fn fixed(x: f64) -> BigInt {
    let (mant, exp, sign) = Float::integer_decode(x);
    let m = BigInt::from(mant) * BigInt::from(sign);
    let shift = exp as i64 + BITS;
    if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    }
}

fn to_f64(v: &BigInt) -> f64 {
    // keep 128 significant bits before the final conversion
    let excess = (v.bits() as i64 - 128).max(0);
    let top = v >> excess as usize;
    top.to_f64().unwrap() * 2f64.powi((excess - BITS) as i32)
}

/// `Σ (-1)^k (x²/4)^k / (k!(k+ν)!)` for `ν` in `{0, 1}`, in fixed point.
fn bessel_series(x: f64, nu: u32) -> BigInt {
    let quarter_x2 = (fixed(x) * fixed(x)) >> (BITS as usize + 2);
    let mut term = BigInt::from(1) << BITS as usize;
    for k in 1..=nu {
        term /= k;
    }
    let mut sum = term.clone();
    let mut k: u64 = 1;
    loop {
        term = (term * &quarter_x2) >> BITS as usize;
        term /= k * (k + nu as u64);
        term = -term;
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    sum
}

/// `J₀(x)` from its power series in 512-bit fixed point.
pub fn j0(x: f64) -> f64 {
    to_f64(&bessel_series(x, 0))
}

/// `J₁(x) = (x/2) Σ (-1)^k (x²/4)^k / (k!(k+1)!)`.
pub fn j1(x: f64) -> f64 {
    let s = bessel_series(x, 1);
    to_f64(&((s * fixed(x)) >> (BITS as usize + 1)))
}
