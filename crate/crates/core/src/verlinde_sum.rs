//! The finite trigonometric sum over `(k + r)`-torsion points, evaluated in
//! arbitrary-precision binary floating point with an a-priori error bound.

use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::residue_engine::{n_factor, VerlindeInput};
use crate::weight_space::{in_closed_simplex, lam_over_k, rho};

pub const DEFAULT_PRECISION: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SumError {
    #[error("insufficient precision: error bound {bound:e} at {bits} bits, try {suggested} bits")]
    InsufficientPrecision { bits: usize, bound: f64, suggested: usize },
    #[error("λ/k = {0} is outside the closed simplex")]
    OutsideSimplex(String),
    #[error("precision must be at least 64 bits, got {0}")]
    Precision(usize),
    #[error("sum is not within {bound:e} of an integer: {value}")]
    NotIntegral { value: String, bound: f64 },
    #[error("floating point failure: {0}")]
    Float(String),
}

/// Precision from `VERLINDE_PRECISION`, else [`DEFAULT_PRECISION`].
pub fn default_precision() -> usize {
    std::env::var("VERLINDE_PRECISION")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&p| p >= 64)
        .unwrap_or(DEFAULT_PRECISION)
}

/// `x = n / (k + r)` with `n_r = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub n: Vec<i64>,
}

/// Points with `0 < n_i - n_{i+1} < k + r` and `x_i - x_j ∉ Z` for all
/// `i < j`, ordered lexicographically in the consecutive gaps.
pub fn enumerate_lattice(k: u64, r: usize) -> Vec<LatticePoint> {
    assert!(r >= 2, "rank must be at least 2");
    let khat = (k + r as u64) as i64;
    let mut out = Vec::new();
    for gaps in (0..r - 1).map(|_| 1..khat).multi_cartesian_product() {
        let mut n = vec![0i64; r];
        for i in (0..r - 1).rev() {
            n[i] = n[i + 1] + gaps[i];
        }
        let integral = (0..r).tuple_combinations().any(|(i, j)| (n[i] - n[j]) % khat == 0);
        if !integral {
            out.push(LatticePoint { n });
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct BigComplexFloat {
    pub re: BigFloat,
    pub im: BigFloat,
    pub precision: usize,
}

impl BigComplexFloat {
    pub fn zero(precision: usize) -> Self {
        Self { re: BigFloat::from_i32(0, precision), im: BigFloat::from_i32(0, precision), precision }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.precision;
        Self { re: self.re.add(&o.re, p, RM), im: self.im.add(&o.im, p, RM), precision: p }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.precision;
        let re = self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM);
        Self { re, im, precision: p }
    }

    pub fn scale(&self, s: &BigFloat) -> Self {
        let p = self.precision;
        Self { re: self.re.mul(s, p, RM), im: self.im.mul(s, p, RM), precision: p }
    }

    /// Multiplication by `(-i)^m`.
    pub fn rotate_minus_i(&self, m: u64) -> Self {
        let (re, im) = (self.re.clone(), self.im.clone());
        let (re, im) = match m % 4 {
            0 => (re, im),
            1 => (im, re.neg()),
            2 => (re.neg(), im.neg()),
            _ => (im.neg(), re),
        };
        Self { re, im, precision: self.precision }
    }

    fn decimal(x: &BigFloat) -> String {
        let mut cc = Consts::new().expect("constants cache");
        x.format(Radix::Dec, RM, &mut cc).unwrap_or_else(|_| "NaN".into())
    }
}

impl fmt::Display for BigComplexFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", Self::decimal(&self.re), Self::decimal(&self.im))
    }
}

/// Exact integer value of a float that is already an integer.
pub fn integer_of(x: &BigFloat) -> Option<BigInt> {
    if x.is_zero() {
        return Some(BigInt::zero());
    }
    if !x.is_int() {
        return None;
    }
    let (words, _, sign, e, _) = x.as_raw_parts()?;
    let mut mag = BigUint::zero();
    for w in words.iter().rev() {
        mag = (mag << 64u32) | BigUint::from(*w);
    }
    let shift = e as i64 - 64 * words.len() as i64;
    let mag = if shift >= 0 { mag << shift as u64 } else { mag >> (-shift) as u64 };
    let v = BigInt::from(mag);
    Some(if sign == Sign::Neg { -v } else { v })
}

/// Nearest integer, ties to even.
pub fn nearest_integer(x: &BigFloat) -> Option<BigInt> {
    integer_of(&x.round(0, RM))
}

#[derive(Debug, Clone)]
pub struct SumResult {
    pub value: BigComplexFloat,
    pub nearest_int: BigInt,
    pub err_bound: f64,
}

struct Tables {
    cos: Vec<BigFloat>,
    sin: Vec<BigFloat>,
}

/// `cos(π j / k̂)`, `sin(π j / k̂)` for `0 <= j < 2k̂`.
fn tables(khat: i64, p: usize) -> Result<Tables, SumError> {
    let mut cc = Consts::new().map_err(|e| SumError::Float(format!("{e:?}")))?;
    let pi = cc.pi(p, RM);
    let mut cos = Vec::with_capacity(2 * khat as usize);
    let mut sin = Vec::with_capacity(2 * khat as usize);
    for j in 0..2 * khat {
        let t = pi.mul(&BigFloat::from_i64(j, p), p, RM).div(&BigFloat::from_i64(khat, p), p, RM);
        cos.push(t.cos(p, RM, &mut cc));
        sin.push(t.sin(p, RM, &mut cc));
    }
    Ok(Tables { cos, sin })
}

/// Per-point data: phase index `J` with `2π λ̂·x = π J / k̂`, and the indices
/// `d = n_i - n_j` of the sines in the denominator.
fn point_data(n: &[i64], two_rho_lam: &[i64], khat: i64) -> (i64, Vec<i64>) {
    let j: i64 = n.iter().zip(two_rho_lam).map(|(a, b)| a * b).sum::<i64>().rem_euclid(2 * khat);
    let d = (0..n.len()).tuple_combinations().map(|(i, k)| (n[i] - n[k]).rem_euclid(2 * khat)).collect();
    (j, d)
}

/// `N Σ (-i)^{C(r,2)} e^{2πi λ̂·x} / ∏_{i<j} (2 sin π(x_i - x_j))^{2g-1}`.
pub fn ver_sum(inp: &VerlindeInput, precision: usize) -> Result<SumResult, SumError> {
    if precision < 64 {
        return Err(SumError::Precision(precision));
    }
    let a = lam_over_k(inp.k, &inp.lam);
    if !in_closed_simplex(&a) {
        return Err(SumError::OutsideSimplex(a.to_string()));
    }
    let (r, g, p) = (inp.r, inp.g, precision);
    let khat = inp.khat() as i64;
    let m = (r * (r - 1) / 2) as u64;
    let power = (2 * g - 1) as usize;
    // 2λ̂ is integral
    let lam_hat = inp.lam.to_weight().add(&rho(r));
    let two_lam_hat: Vec<i64> =
        lam_hat.entries().iter().map(|x| (x * BigInt::from(2)).to_integer().to_i64().expect("small weight")).collect();
    let points = enumerate_lattice(inp.k, r);
    let tab = tables(khat, p)?;
    let two = BigFloat::from_i32(2, p);

    let terms: Vec<(BigComplexFloat, f64, f64)> = points
        .par_iter()
        .map(|pt| {
            let (j, ds) = point_data(&pt.n, &two_lam_hat, khat);
            let mut den = BigFloat::from_i32(1, p);
            let mut den64 = 1f64;
            let mut min_sin = f64::INFINITY;
            for &d in &ds {
                den = den.mul(&two.mul(&tab.sin[d as usize], p, RM), p, RM);
                let s = (std::f64::consts::PI * d as f64 / khat as f64).sin();
                den64 *= 2.0 * s;
                min_sin = min_sin.min(s.abs());
            }
            let inv = BigFloat::from_i32(1, p).div(&den.powi(power, p, RM), p, RM);
            let phase = BigComplexFloat { re: tab.cos[j as usize].clone(), im: tab.sin[j as usize].clone(), precision: p };
            let t = phase.rotate_minus_i(m).scale(&inv);
            (t, 1.0 / den64.abs().powi(power as i32), min_sin)
        })
        .collect();

    let mut sum = BigComplexFloat::zero(p);
    for (t, _, _) in &terms {
        sum = sum.add(t);
    }
    let nf = n_factor(r, g, inp.k);
    let nbig = big_from_int(&nf, p);
    let value = sum.scale(&nbig);

    let err_bound = error_bound(&terms, m as usize * power, p, nf.to_f64().unwrap_or(f64::INFINITY));
    if err_bound.is_nan() || err_bound > 0.25 {
        let suggested = suggest_bits(&terms, m as usize * power, nf.to_f64().unwrap_or(f64::INFINITY), p);
        return Err(SumError::InsufficientPrecision { bits: p, bound: err_bound, suggested });
    }
    let nearest_int = nearest_integer(&value.re).ok_or_else(|| SumError::Float(value.to_string()))?;
    let b = BigFloat::from_f64(err_bound, p);
    let off = value.re.sub(&big_from_int(&nearest_int, p), p, RM);
    let within = |x: &BigFloat| x.abs_cmp(&b).is_some_and(|c| c <= 0);
    if !within(&off) || !within(&value.im) {
        return Err(SumError::NotIntegral { value: value.to_string(), bound: err_bound });
    }
    Ok(SumResult { value, nearest_int, err_bound })
}

fn big_from_int(n: &BigInt, p: usize) -> BigFloat {
    let p = p.max(n.bits() as usize + 64);
    let (sign, digits) = n.to_u64_digits();
    if digits.is_empty() {
        return BigFloat::from_i32(0, p);
    }
    let s = if sign == num_bigint::Sign::Minus { Sign::Neg } else { Sign::Pos };
    let e = (64 * digits.len()) as i32;
    let x = BigFloat::from_words(&digits, s, e);
    // from_words wants a normalized mantissa; renormalize by adding zero
    x.add(&BigFloat::from_i32(0, p), p, RM)
}

fn unit(p: usize) -> f64 {
    2f64.powi(-(p.min(1000) as i32))
}

/// Forward error of the whole computation: every sine carries a relative
/// error `δ`, each term is a product of `mtot` of them, and the naive sum
/// adds up to `T` roundings.
fn error_bound(terms: &[(BigComplexFloat, f64, f64)], mtot: usize, p: usize, n: f64) -> f64 {
    let u = unit(p);
    let t = terms.len() as f64;
    let mut acc = 0.0;
    let mut mag = 0.0;
    for (_, abs_t, min_sin) in terms {
        let delta = 16.0 * u / min_sin + 2.0 * u;
        let eps = 2.0 * mtot as f64 * (delta + 2.0 * u) + 20.0 * u;
        acc += abs_t * (eps + 2.0 * t * u);
        mag += abs_t;
    }
    n * (acc + mag * u) * 1.1
}

fn suggest_bits(terms: &[(BigComplexFloat, f64, f64)], mtot: usize, n: f64, p: usize) -> usize {
    let mut bits = p;
    while bits < 1000 && error_bound(terms, mtot, bits, n) > 0.25 {
        bits += 64;
    }
    bits.max(p + 64)
}
