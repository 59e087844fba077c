//! Test-only oracles, written without the engine's series code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational as Q;
use num_traits::{One, Zero};

use verlinde::weight_space::IntegralWeight;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn iw(v: &[i64]) -> IntegralWeight {
    IntegralWeight::new(v.to_vec()).unwrap()
}

fn binom_q(top: i64, n: u32) -> Q {
    // generalized binomial, `top` may be negative
    let mut acc = Q::one();
    for i in 0..n as i64 {
        acc = acc * q(top - i) / q(i + 1);
    }
    acc
}

fn factorial_q(n: u32) -> Q {
    (1..=n as i64).fold(Q::one(), |a, i| a * q(i))
}

/// Power series `1 / f` from the coefficients of `f`, `f[0] != 0`.
fn invert(f: &[Q], n: usize) -> Vec<Q> {
    let mut g = vec![Q::zero(); n];
    g[0] = Q::one() / &f[0];
    for m in 1..n {
        let mut s = Q::zero();
        for j in 1..=m.min(f.len() - 1) {
            s += &f[j] * &g[m - j];
        }
        g[m] = -s / &f[0];
    }
    g
}

fn power(f: &[Q], e: u32, n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n];
    out[0] = Q::one();
    for _ in 0..e {
        let mut next = vec![Q::zero(); n];
        for (i, a) in out.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in f.iter().enumerate().take(n - i) {
                next[i + j] += a * b;
            }
        }
        out = next;
    }
    out
}

/// `z / (e^z - 1)`.
fn todd(n: usize) -> Vec<Q> {
    let f: Vec<Q> = (0..n as u32).map(|i| Q::one() / factorial_q(i + 1)).collect();
    invert(&f, n)
}

/// `(z/2) / sinh(z/2)`.
fn sinh_ratio(n: usize) -> Vec<Q> {
    let f: Vec<Q> = (0..n as u32)
        .map(|i| if i % 2 == 0 { Q::one() / (factorial_q(i + 1) * q(1 << i)) } else { Q::zero() })
        .collect();
    invert(&f, n)
}

/// Truncated Laurent series in `x, y`, expanded with `|x| << |y|`.
#[derive(Clone, Debug)]
pub struct Bi {
    terms: BTreeMap<(i64, i64), Q>,
    xmax: i64,
    ymax: i64,
}

impl Bi {
    fn new(xmax: i64, ymax: i64) -> Self {
        Bi { terms: BTreeMap::new(), xmax, ymax }
    }

    fn push(&mut self, i: i64, j: i64, c: Q) {
        if i <= self.xmax && j <= self.ymax && !c.is_zero() {
            *self.terms.entry((i, j)).or_insert_with(Q::zero) += c;
        }
    }

    pub fn mul(&self, o: &Bi) -> Bi {
        let mut out = Bi::new(self.xmax, self.ymax);
        for ((i, j), a) in &self.terms {
            for ((u, v), b) in &o.terms {
                out.push(i + u, j + v, a * b);
            }
        }
        out
    }

    pub fn sub(&self, o: &Bi) -> Bi {
        let mut out = self.clone();
        for ((i, j), b) in &o.terms {
            out.push(*i, *j, -b.clone());
        }
        out
    }

    pub fn residue(&self) -> Q {
        self.terms.get(&(-1, -1)).cloned().unwrap_or_else(Q::zero)
    }
}

/// Series factors at a fixed truncation.
pub struct Factors {
    xmax: i64,
    ymax: i64,
}

impl Factors {
    /// Enough terms for a residue with total pole order `px` in `x`, `py` in `y`.
    pub fn new(px: i64, py: i64) -> Self {
        Factors { xmax: px + 1, ymax: py + px + 2 }
    }

    fn len(&self) -> usize {
        (self.xmax + self.ymax + 4).max(4) as usize
    }

    pub fn exp(&self, a: i64, b: i64) -> Bi {
        let mut out = Bi::new(self.xmax, self.ymax);
        for i in 0..=self.xmax.max(0) {
            for j in 0..=self.ymax.max(0) {
                let c = q(a).pow(i as i32) * q(b).pow(j as i32) / (factorial_q(i as u32) * factorial_q(j as u32));
                out.push(i, j, c);
            }
        }
        out
    }

    /// `1 / (1 - e^{K x})` (or in `y`).
    pub fn inv_one_minus_exp(&self, kk: i64, in_y: bool) -> Bi {
        let t = todd(self.len());
        let mut out = Bi::new(self.xmax, self.ymax);
        for (n, c) in t.iter().enumerate() {
            let e = n as i64 - 1;
            let v = -c * q(kk).pow(e as i32);
            if in_y {
                out.push(0, e, v);
            } else {
                out.push(e, 0, v);
            }
        }
        out
    }

    /// `(2 sinh(x/2))^{-m}` (or in `y`).
    pub fn inv_sinh(&self, m: u32, in_y: bool) -> Bi {
        let s = power(&sinh_ratio(self.len()), m, self.len());
        let mut out = Bi::new(self.xmax, self.ymax);
        for (n, c) in s.iter().enumerate() {
            let e = n as i64 - m as i64;
            if in_y {
                out.push(0, e, c.clone());
            } else {
                out.push(e, 0, c.clone());
            }
        }
        out
    }

    /// `(2 sinh((x+y)/2))^{-m}` with `|x| << |y|`.
    pub fn inv_sinh_sum(&self, m: u32) -> Bi {
        let mut pole = Bi::new(self.xmax, self.ymax);
        for n in 0..=self.xmax.max(0) {
            pole.push(n, -(m as i64) - n, binom_q(-(m as i64), n as u32));
        }
        let len = self.len() + self.xmax.max(0) as usize;
        let s = power(&sinh_ratio(len), m, len);
        let mut reg = Bi::new(self.xmax, self.ymax);
        for (n, c) in s.iter().enumerate() {
            for i in 0..=n {
                reg.push(i as i64, (n - i) as i64, c * binom_q(n as i64, i as u32));
            }
        }
        pole.mul(&reg)
    }
}

/// Rank-three chamber polynomials from the explicit double residue with the
/// `H_1` prefactor `(-1)^{g-1} (3 k̂²)^g`. `greater` picks the side `c_2 > 0`.
pub fn rank_three_closed_form(g: u32, k: u64, lam: &[i64], greater: bool) -> Q {
    let kh = k as i64 + 3;
    let m = 2 * g - 1;
    let f = Factors::new(1 + m as i64, 1 + 3 * m as i64);
    let (l1, l2, l3) = (lam[0], lam[1], lam[2]);
    let first = f.exp(l1 + 1, l1 + l2 + 1);
    let second = f.exp(l1 + 1, l1 + l3 + if greater { kh } else { 0 });
    let den = f
        .inv_one_minus_exp(kh, false)
        .mul(&f.inv_one_minus_exp(kh, true))
        .mul(&f.inv_sinh(m, false))
        .mul(&f.inv_sinh(m, true))
        .mul(&f.inv_sinh_sum(m));
    let res = first.sub(&second).mul(&den).residue();
    let sign = if (g - 1) % 2 == 0 { 1 } else { -1 };
    q(sign) * q(3 * kh * kh).pow(g as i32) * res
}

/// `p_- - p_+` across `c_2 = 0` at rank three.
pub fn rank_three_wall_term(g: u32, k: u64, lam: &[i64]) -> Q {
    let kh = k as i64 + 3;
    let m = 2 * g - 1;
    let f = Factors::new(1 + m as i64, 3 * m as i64);
    let num = f.exp(lam[0] + 1, lam[0] + lam[2]);
    let den = f
        .inv_one_minus_exp(kh, false)
        .mul(&f.inv_sinh(m, false))
        .mul(&f.inv_sinh(m, true))
        .mul(&f.inv_sinh_sum(m));
    q(-3 * kh * kh).pow(g as i32) * num.mul(&den).residue()
}

/// Rank-two Verlinde number at weight `(a, -a)` from the classical sine sum in
/// `f64`, rounded. Only for small `g, k`.
pub fn rank_two_float(g: u32, k: u64, a: i64) -> i64 {
    let kh = (k + 2) as f64;
    let mut s = 0.0;
    for j in 1..(k + 2) {
        let t = std::f64::consts::PI * j as f64 / kh;
        let sin = t.sin();
        s += ((2 * a + 1) as f64 * t).sin() / sin.powi(2 * g as i32 - 1);
    }
    let n = (kh / 2.0).powi(g as i32 - 1);
    (s * n).round() as i64
}
