//! Exact truncated Laurent series in `y_1, ..., y_n` and iterated residues.
//!
//! Variables are ordered `y_1 >> y_2 >> ... >> y_n`: a linear form is expanded
//! around its lowest-index variable, and the residue in `y_n` is taken first.
//!
//! Truncation is tracked on suffix sums `S_i = e_i + ... + e_n` of exponent
//! vectors. A series stores every coefficient with `S_i <= cap[i]` for all
//! `i`, and every stored term has `S_i >= floor[i]`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Cap value for a direction in which a series is known exactly.
pub const UNBOUNDED: i64 = i64::MAX / 4;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("pole on all of V")]
    PoleEverywhere,
    #[error("linear form has {got} coefficients, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("expansion in variable {0} needs a finite truncation")]
    Unbounded(usize),
}

/// A linear form `c_1 y_1 + ... + c_n y_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearForm {
    pub coeffs: Vec<Rational>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        Self { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| int(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![Rational::zero(); n])
    }

    /// The coordinate form `y_j` (0-based `j`).
    pub fn var(n: usize, j: usize) -> Self {
        let mut l = Self::zero(n);
        l.coeffs[j] = Rational::one();
        l
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    /// Index of the first nonzero coefficient.
    pub fn lead(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.lead().is_none()
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexSign {
    Positive,
    Negative,
    Zero,
}

/// Sign of the first nonzero coefficient.
pub fn lex_sign(l: &LinearForm) -> LexSign {
    match l.lead() {
        None => LexSign::Zero,
        Some(j) if l.coeffs[j].is_positive() => LexSign::Positive,
        Some(_) => LexSign::Negative,
    }
}

// ---------------------------------------------------------------------------
// univariate expansions

fn bernoulli_table() -> &'static Mutex<Vec<Rational>> {
    static TABLE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Rational::one()]))
}

/// Bernoulli number `B_n` with `B_1 = -1/2`, i.e. `t/(e^t - 1) = sum B_n t^n/n!`.
pub fn bernoulli(n: usize) -> Rational {
    let mut table = bernoulli_table().lock().expect("bernoulli table poisoned");
    while table.len() <= n {
        let m = table.len();
        // sum_{j<=m} C(m+1, j) B_j = 0
        let mut binom = BigInt::one();
        let mut acc = Rational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += b * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        table.push(-acc / int(m as i64 + 1));
    }
    table[n].clone()
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn poly_mul(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_inv(a: &[Rational], len: usize) -> Vec<Rational> {
    let a0 = a[0].recip();
    let mut out = vec![Rational::zero(); len];
    if len == 0 {
        return out;
    }
    out[0] = a0.clone();
    for n in 1..len {
        let mut acc = Rational::zero();
        for k in 1..=n.min(a.len() - 1) {
            acc += &a[k] * &out[n - k];
        }
        out[n] = -acc * &a0;
    }
    out
}

fn poly_pow(a: &[Rational], e: i32, len: usize) -> Vec<Rational> {
    let base = if e < 0 { poly_inv(a, len) } else { a[..len.min(a.len())].to_vec() };
    let mut out = vec![Rational::zero(); len];
    if len > 0 {
        out[0] = Rational::one();
    }
    for _ in 0..e.unsigned_abs() {
        out = poly_mul(&out, &base, len);
    }
    out
}

/// A function of one variable `t` with a Laurent expansion at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Univariate {
    /// `e^t`
    Exp,
    /// `1/(1 - e^t)`
    InvOneMinusExp,
    /// `1 - e^t`
    OneMinusExp,
    /// `(2 sinh(t/2))^m`, any integer `m`
    TwoSinhHalfPow(i32),
}

impl Univariate {
    pub fn valuation(self) -> i64 {
        match self {
            Univariate::Exp => 0,
            Univariate::InvOneMinusExp => -1,
            Univariate::OneMinusExp => 1,
            Univariate::TwoSinhHalfPow(m) => m as i64,
        }
    }

    /// Coefficients of `t^v, t^(v+1), ..., t^upto` where `v` is the valuation.
    pub fn coefficients(self, upto: i64) -> Vec<Rational> {
        let v = self.valuation();
        if upto < v {
            return Vec::new();
        }
        let len = (upto - v + 1) as usize;
        match self {
            Univariate::Exp => (0..len as u64)
                .map(|p| Rational::new(BigInt::one(), factorial(p)))
                .collect(),
            Univariate::OneMinusExp => (1..=len as u64)
                .map(|p| Rational::new(-BigInt::one(), factorial(p)))
                .collect(),
            // 1/(1-e^t) = -(1/t) * t/(e^t-1)
            Univariate::InvOneMinusExp => (0..len)
                .map(|n| -bernoulli(n) / Rational::from_integer(factorial(n as u64)))
                .collect(),
            Univariate::TwoSinhHalfPow(m) => {
                // 2 sinh(t/2) = t * u(t), u(t) = sum t^(2j) / (4^j (2j+1)!)
                let u: Vec<Rational> = (0..len)
                    .map(|d| {
                        if d % 2 == 1 {
                            Rational::zero()
                        } else {
                            let j = (d / 2) as u32;
                            Rational::new(
                                BigInt::one(),
                                BigInt::from(4u32).pow(j) * factorial(d as u64 + 1),
                            )
                        }
                    })
                    .collect();
                poly_pow(&u, m, len)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// multivariate series

pub type Exponent = Vec<i32>;

fn suffix_sums(e: &[i32]) -> Vec<i64> {
    let mut out = vec![0i64; e.len()];
    let mut acc = 0i64;
    for i in (0..e.len()).rev() {
        acc += e[i] as i64;
        out[i] = acc;
    }
    out
}

fn within(suffix: &[i64], cap: &[i64]) -> bool {
    suffix.iter().zip(cap).all(|(s, c)| s <= c)
}

/// Truncated iterated Laurent series with rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct IteratedLaurentSeries {
    nvars: usize,
    terms: HashMap<Exponent, Rational>,
    floor: Vec<i64>,
    cap: Vec<i64>,
}

impl IteratedLaurentSeries {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: HashMap::new(), floor: vec![0; nvars], cap: vec![UNBOUNDED; nvars] }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut s = Self::zero(nvars);
        if !c.is_zero() {
            s.terms.insert(vec![0; nvars], c);
        }
        s
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// An exact single-term series.
    pub fn monomial(exponent: Exponent, c: Rational) -> Self {
        let nvars = exponent.len();
        let floor = suffix_sums(&exponent);
        let mut terms = HashMap::new();
        if !c.is_zero() {
            terms.insert(exponent, c);
        }
        Self { nvars, terms, floor, cap: vec![UNBOUNDED; nvars] }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn floor(&self) -> &[i64] {
        &self.floor
    }

    pub fn cap(&self) -> &[i64] {
        &self.cap
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[i32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> Vec<(Exponent, Rational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        v.sort();
        v
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = self.clone();
        if s.is_zero() {
            out.terms.clear();
        } else {
            for c in out.terms.values_mut() {
                *c *= s;
            }
        }
        out
    }

    /// Drop everything above `cap`.
    pub fn truncated(&self, cap: &[i64]) -> Self {
        let cap: Vec<i64> = self.cap.iter().zip(cap).map(|(a, b)| *a.min(b)).collect();
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| within(&suffix_sums(e), &cap))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Self { nvars: self.nvars, terms, floor: self.floor.clone(), cap }
    }

    pub fn add(&self, other: &Self) -> Self {
        let cap: Vec<i64> = self.cap.iter().zip(&other.cap).map(|(a, b)| *a.min(b)).collect();
        let floor = self.floor.iter().zip(&other.floor).map(|(a, b)| *a.min(b)).collect();
        let mut terms: HashMap<Exponent, Rational> = HashMap::new();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            if !within(&suffix_sums(e), &cap) {
                continue;
            }
            *terms.entry(e.clone()).or_insert_with(Rational::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Self { nvars: self.nvars, terms, floor, cap }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    /// Product; the result is exact up to `min(cap_a + floor_b, cap_b + floor_a)`.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.nvars;
        let cap: Vec<i64> = (0..n)
            .map(|i| {
                let a = self.cap[i].saturating_add(other.floor[i]);
                let b = other.cap[i].saturating_add(self.floor[i]);
                a.min(b).min(UNBOUNDED)
            })
            .collect();
        let floor: Vec<i64> = (0..n).map(|i| self.floor[i] + other.floor[i]).collect();
        let left: Vec<_> = self.terms.iter().map(|(e, c)| (e, c, suffix_sums(e))).collect();
        let right: Vec<_> = other.terms.iter().map(|(e, c)| (e, c, suffix_sums(e))).collect();
        let mut terms: HashMap<Exponent, Rational> = HashMap::new();
        let mut buf = vec![0i32; n];
        for (ea, ca, sa) in &left {
            for (eb, cb, sb) in &right {
                if (0..n).any(|i| sa[i] + sb[i] > cap[i]) {
                    continue;
                }
                for i in 0..n {
                    buf[i] = ea[i] + eb[i];
                }
                let prod = *ca * *cb;
                match terms.get_mut(&buf) {
                    Some(c) => *c += prod,
                    None => {
                        terms.insert(buf.clone(), prod);
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Self { nvars: n, terms, floor, cap }
    }

    /// True when both series agree on every coefficient both of them know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let cap: Vec<i64> = self.cap.iter().zip(&other.cap).map(|(a, b)| *a.min(b)).collect();
        self.truncated(&cap).terms == other.truncated(&cap).terms
    }
}

/// Lower bounds on suffix sums for the expansion of `phi(l)`.
pub fn expansion_floor(phi: Univariate, l: &LinearForm) -> Vec<i64> {
    let n = l.nvars();
    match l.lead() {
        None => vec![0; n],
        Some(j0) => (0..n).map(|i| if i <= j0 { phi.valuation() } else { 0 }).collect(),
    }
}

/// Expand `phi(l)` keeping every coefficient with suffix sums below `cap`.
///
/// With `l = c y_j + R`, `l^p = (c y_j)^p sum_t C(p, t) (R / (c y_j))^t`; this
/// is valid for either sign of `c`, so no sign normalization is needed.
pub fn expand_univariate(
    phi: Univariate,
    l: &LinearForm,
    cap: &[i64],
) -> Result<IteratedLaurentSeries, SeriesError> {
    let n = l.nvars();
    if cap.len() != n {
        return Err(SeriesError::Arity { expected: n, got: cap.len() });
    }
    let Some(j0) = l.lead() else {
        if phi.valuation() < 0 {
            return Err(SeriesError::PoleEverywhere);
        }
        let c0 = phi.coefficients(0).first().cloned().unwrap_or_else(Rational::zero);
        let c0 = if phi.valuation() == 0 { c0 } else { Rational::zero() };
        let mut s = IteratedLaurentSeries::constant(n, c0);
        s.cap = cap.to_vec();
        return Ok(s);
    };
    let pmax = cap[..=j0].iter().copied().min().unwrap_or(UNBOUNDED);
    if pmax >= UNBOUNDED / 2 {
        return Err(SeriesError::Unbounded(j0));
    }
    let pmin = phi.valuation();
    let floor = expansion_floor(phi, l);
    let mut out = IteratedLaurentSeries { nvars: n, terms: HashMap::new(), floor, cap: cap.to_vec() };
    if pmax < pmin {
        return Ok(out);
    }
    let phis = phi.coefficients(pmax);

    // tails: exponents tau on indices > j0 with weights prod c_i^tau_i / tau_i!
    let tail_idx: Vec<usize> = ((j0 + 1)..n).filter(|&i| !l.coeffs[i].is_zero()).collect();
    // suffix positions covered by each tail variable
    let ranges: Vec<(usize, usize)> = tail_idx
        .iter()
        .enumerate()
        .map(|(k, &i)| (if k == 0 { j0 + 1 } else { tail_idx[k - 1] + 1 }, i))
        .collect();
    for &(lo, hi) in &ranges {
        if cap[lo..=hi].iter().all(|&c| c >= UNBOUNDED / 2) {
            return Err(SeriesError::Unbounded(hi));
        }
    }
    let rest_from = tail_idx.last().map_or(j0 + 1, |&i| i + 1);
    if cap[rest_from..].iter().any(|&c| c < 0) {
        return Ok(out);
    }
    let mut tails: Vec<(Vec<i32>, Rational)> = Vec::new();
    let mut tau = vec![0i32; n];
    enumerate_tails(l, cap, &tail_idx, &ranges, tail_idx.len(), 0, &mut tau, Rational::one(), &mut tails);

    let c = &l.coeffs[j0];
    let cinv = c.recip();
    for (k, phi_p) in phis.iter().enumerate() {
        if phi_p.is_zero() {
            continue;
        }
        let p = pmin + k as i64;
        for (tau, w) in &tails {
            let t: i64 = tau.iter().map(|&x| x as i64).sum();
            // p (p-1) ... (p-t+1)
            let mut falling = BigInt::one();
            for s in 0..t {
                falling *= BigInt::from(p - s);
            }
            if falling.is_zero() {
                continue;
            }
            let e = p - t;
            let cpow = if e >= 0 { c.pow(e as i32) } else { cinv.pow((-e) as i32) };
            let coeff = phi_p * w * cpow * Rational::from_integer(falling);
            let mut exp = tau.clone();
            exp[j0] = e as i32;
            *out.terms.entry(exp).or_insert_with(Rational::zero) += coeff;
        }
    }
    out.terms.retain(|_, c| !c.is_zero());
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_tails(
    l: &LinearForm,
    cap: &[i64],
    idx: &[usize],
    ranges: &[(usize, usize)],
    pos: usize,
    suffix: i64,
    tau: &mut Vec<i32>,
    weight: Rational,
    out: &mut Vec<(Vec<i32>, Rational)>,
) {
    // filled from the back so that suffix sums are known when checking caps
    if pos == 0 {
        out.push((tau.clone(), weight));
        return;
    }
    let i = idx[pos - 1];
    let (lo, hi) = ranges[pos - 1];
    let mut d: i64 = 0;
    let mut w = weight;
    while (lo..=hi).all(|q| suffix + d <= cap[q]) {
        tau[i] = d as i32;
        enumerate_tails(l, cap, idx, ranges, pos - 1, suffix + d, tau, w.clone(), out);
        d += 1;
        w = w * &l.coeffs[i] / int(d);
    }
    tau[i] = 0;
}

/// A symbolic product
/// `scalar * prod e^(l) * prod 1/(1 - e^(l)) * prod (2 sinh(l/2))^(-m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorExpr {
    pub scalar: Rational,
    pub exp_factors: Vec<LinearForm>,
    pub inv_one_minus_exp: Vec<LinearForm>,
    pub inv_two_sinh_half: Vec<(LinearForm, u32)>,
}

impl FactorExpr {
    pub fn new(scalar: Rational) -> Self {
        Self {
            scalar,
            exp_factors: Vec::new(),
            inv_one_minus_exp: Vec::new(),
            inv_two_sinh_half: Vec::new(),
        }
    }

    pub fn with_exp(mut self, l: LinearForm) -> Self {
        self.exp_factors.push(l);
        self
    }

    pub fn with_inv_one_minus_exp(mut self, l: LinearForm) -> Self {
        self.inv_one_minus_exp.push(l);
        self
    }

    pub fn with_inv_two_sinh_half(mut self, l: LinearForm, m: u32) -> Self {
        self.inv_two_sinh_half.push((l, m));
        self
    }

    fn pieces(&self, with_exp: bool) -> Vec<(Univariate, &LinearForm)> {
        let mut v = Vec::new();
        if with_exp {
            v.extend(self.exp_factors.iter().map(|l| (Univariate::Exp, l)));
        }
        v.extend(self.inv_one_minus_exp.iter().map(|l| (Univariate::InvOneMinusExp, l)));
        v.extend(
            self.inv_two_sinh_half
                .iter()
                .map(|(l, m)| (Univariate::TwoSinhHalfPow(-(*m as i32)), l)),
        );
        v
    }

    fn nvars(&self) -> Option<usize> {
        self.exp_factors
            .iter()
            .chain(&self.inv_one_minus_exp)
            .chain(self.inv_two_sinh_half.iter().map(|(l, _)| l))
            .map(|l| l.nvars())
            .next()
    }

    /// Total pole order.
    pub fn pole_order(&self) -> u32 {
        self.inv_one_minus_exp.len() as u32 + self.inv_two_sinh_half.iter().map(|(_, m)| m).sum::<u32>()
    }

    /// Sum of all exponential arguments.
    pub fn exp_argument(&self, n: usize) -> LinearForm {
        self.exp_factors.iter().fold(LinearForm::zero(n), |acc, l| acc.add(l))
    }
}

fn product_of(
    n: usize,
    scalar: &Rational,
    pieces: &[(Univariate, &LinearForm)],
    trunc: u32,
) -> Result<IteratedLaurentSeries, SeriesError> {
    for (phi, l) in pieces {
        if l.nvars() != n {
            return Err(SeriesError::Arity { expected: n, got: l.nvars() });
        }
        if l.is_zero() && phi.valuation() < 0 {
            return Err(SeriesError::PoleEverywhere);
        }
    }
    let floors: Vec<Vec<i64>> = pieces.iter().map(|(phi, l)| expansion_floor(*phi, l)).collect();
    let total: Vec<i64> = (0..n).map(|i| floors.iter().map(|f| f[i]).sum()).collect();
    // residue target: S_i = -(n - i)
    let target: Vec<i64> = (0..n).map(|i| -((n - i) as i64) + trunc as i64).collect();
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by_key(|&k| std::cmp::Reverse(pieces[k].1.lead().unwrap_or(n)));
    let mut acc = IteratedLaurentSeries::constant(n, scalar.clone());
    for k in order {
        let (phi, l) = pieces[k];
        let cap: Vec<i64> = (0..n).map(|i| target[i] - (total[i] - floors[k][i])).collect();
        let s = expand_univariate(phi, l, &cap)?;
        acc = acc.mul(&s);
    }
    Ok(acc)
}

/// Expand a factor product so that it is exact up to suffix sums
/// `-(n - i) + trunc`; `trunc = 0` already determines the iterated residue.
pub fn expand_factor(f: &FactorExpr, nvars: usize, trunc: u32) -> Result<IteratedLaurentSeries, SeriesError> {
    if let Some(m) = f.nvars() {
        if m != nvars {
            return Err(SeriesError::Arity { expected: nvars, got: m });
        }
    }
    product_of(nvars, &f.scalar, &f.pieces(true), trunc)
}

/// Coefficient of `y_1^-1 ... y_n^-1`.
pub fn iterated_residue(s: &IteratedLaurentSeries) -> Rational {
    s.coeff(&vec![-1; s.nvars()])
}

/// The part of an iterated residue of `g(y) e^<a, y>` that does not depend on
/// `a`: `Res g e^<a,y> = sum_d kernel_d a^d` over `d >= 0`.
#[derive(Debug, Clone)]
pub struct ResidueKernel {
    nvars: usize,
    terms: Vec<(Vec<u32>, Rational)>,
}

impl ResidueKernel {
    /// Built from the scalar and pole factors of `f`; exponentials are ignored.
    pub fn new(f: &FactorExpr, nvars: usize, trunc: u32) -> Result<Self, SeriesError> {
        let h = product_of(nvars, &f.scalar, &f.pieces(false), trunc)?;
        let mut terms = Vec::new();
        for (e, c) in h.terms() {
            if e.iter().all(|&x| x <= -1) {
                let d: Vec<u32> = e.iter().map(|&x| (-1 - x) as u32).collect();
                let denom: BigInt = d.iter().map(|&x| factorial(x as u64)).product();
                terms.push((d, c / Rational::from_integer(denom)));
            }
        }
        Ok(Self { nvars, terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of the resulting polynomial in `a`.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(d, _)| d.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn evaluate(&self, a: &[Rational]) -> Rational {
        assert_eq!(a.len(), self.nvars, "argument length");
        let maxd = self.terms.iter().flat_map(|(d, _)| d.iter().copied()).max().unwrap_or(0) as usize;
        let powers: Vec<Vec<Rational>> = a
            .iter()
            .map(|x| {
                let mut v = Vec::with_capacity(maxd + 1);
                v.push(Rational::one());
                for k in 1..=maxd {
                    let next = &v[k - 1] * x;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = Rational::zero();
        for (d, c) in &self.terms {
            let mut t = c.clone();
            for (j, &dj) in d.iter().enumerate() {
                if dj > 0 {
                    t *= &powers[j][dj as usize];
                }
            }
            acc += t;
        }
        acc
    }
}

/// Iterated residue of the full product, exponentials included.
pub fn residue_of(f: &FactorExpr, nvars: usize, trunc: u32) -> Result<Rational, SeriesError> {
    let kernel = ResidueKernel::new(f, nvars, trunc)?;
    Ok(kernel.evaluate(&f.exp_argument(nvars).coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_sign_examples() {
        assert_eq!(lex_sign(&LinearForm::from_ints(&[1, -3])), LexSign::Positive);
        assert_eq!(lex_sign(&LinearForm::from_ints(&[0, -1, 100])), LexSign::Negative);
        assert_eq!(lex_sign(&LinearForm::zero(3)), LexSign::Zero);
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), int(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn inverse_one_minus_exp_in_one_variable() {
        let f = FactorExpr::new(int(1)).with_inv_one_minus_exp(LinearForm::var(1, 0));
        let s = expand_factor(&f, 1, 2).unwrap();
        assert_eq!(s.terms(), vec![(vec![-1], int(-1)), (vec![0], rat(1, 2)), (vec![1], rat(-1, 12))]);
    }

    #[test]
    fn one_minus_exp_reflection() {
        // 1/(1-e^l) + 1/(1-e^-l) = 1
        let l = LinearForm::from_ints(&[2, -1]);
        let cap = [3, 3];
        let a = expand_univariate(Univariate::InvOneMinusExp, &l, &cap).unwrap();
        let b = expand_univariate(Univariate::InvOneMinusExp, &l.neg(), &cap).unwrap();
        assert!(a.add(&b).agrees_with(&IteratedLaurentSeries::one(2)), "{:?}", a.add(&b).terms());
    }

    #[test]
    fn sinh_power_times_inverse() {
        let l = LinearForm::from_ints(&[1, 3]);
        let cap = [4, 4];
        let s = expand_univariate(Univariate::TwoSinhHalfPow(-3), &l, &cap).unwrap();
        let t = expand_univariate(Univariate::TwoSinhHalfPow(3), &l, &cap).unwrap();
        assert!(s.mul(&t).agrees_with(&IteratedLaurentSeries::one(2)));
    }

    #[test]
    fn exp_of_zero_is_one() {
        let f = FactorExpr::new(int(1)).with_exp(LinearForm::zero(2));
        let s = expand_factor(&f, 2, 3).unwrap();
        assert_eq!(s.terms(), vec![(vec![0, 0], int(1))]);
    }

    #[test]
    fn geometric_expansion_multiplies_back() {
        // 1/(y1 - y2) = y1^-1 (1 + y2/y1 + ...)
        let l = LinearForm::from_ints(&[1, -1]);
        let s = expand_univariate(Univariate::TwoSinhHalfPow(-1), &l, &[3, 3]).unwrap();
        assert_eq!(s.coeff(&[-1, 0]), int(1));
        assert_eq!(s.coeff(&[-2, 1]), int(1));
        assert_eq!(s.coeff(&[-3, 2]), int(1));
        let back = s.mul(&expand_univariate(Univariate::TwoSinhHalfPow(1), &l, &[3, 3]).unwrap());
        let one = IteratedLaurentSeries::one(2);
        assert!(back.agrees_with(&one), "{:?}", back.terms());
    }

    #[test]
    fn residue_examples() {
        let s = IteratedLaurentSeries::monomial(vec![-1, -1], int(5));
        assert_eq!(iterated_residue(&s), int(5));
        let t = IteratedLaurentSeries::monomial(vec![-1, 0], int(5));
        assert_eq!(iterated_residue(&t), int(0));
        for a in [rat(3, 7), int(-4), int(0)] {
            let f = FactorExpr::new(int(1))
                .with_exp(LinearForm::new(vec![a]))
                .with_inv_one_minus_exp(LinearForm::var(1, 0));
            assert_eq!(residue_of(&f, 1, 1).unwrap(), int(-1));
            assert_eq!(iterated_residue(&expand_factor(&f, 1, 0).unwrap()), int(-1));
        }
    }

    #[test]
    fn zero_pole_rejected() {
        let f = FactorExpr::new(int(1)).with_inv_one_minus_exp(LinearForm::zero(2));
        assert_eq!(expand_factor(&f, 2, 1), Err(SeriesError::PoleEverywhere));
    }

    #[test]
    fn kernel_matches_direct_expansion() {
        let l = LinearForm::new(vec![rat(1, 3), rat(-2, 3)]);
        let a = LinearForm::new(vec![rat(5, 2), rat(-1, 4)]);
        let f = FactorExpr::new(rat(7, 5))
            .with_exp(a)
            .with_inv_one_minus_exp(LinearForm::var(2, 0))
            .with_inv_one_minus_exp(LinearForm::var(2, 1))
            .with_inv_two_sinh_half(l, 3);
        let direct = iterated_residue(&expand_factor(&f, 2, 0).unwrap());
        assert_eq!(residue_of(&f, 2, 0).unwrap(), direct);
        assert_eq!(residue_of(&f, 2, 3).unwrap(), direct);
    }
}
