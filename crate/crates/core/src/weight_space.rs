//! The weight space `V*` of SU(r): weights, roots, ordered bases, integer and
//! fractional parts, regularity, the simplex `Δ`, walls and chambers.
//!
//! Indices are 1-based throughout, matching the usual `α^{ij} = x_i - x_j`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact_series::{int, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("weight entries sum to {0}, expected 0")]
    NonZeroSum(String),
    #[error("expected {expected} entries, got {got}")]
    Length { expected: usize, got: usize },
    #[error("rank must be at least 2, got {0}")]
    Rank(usize),
    #[error("invalid root ({i},{j}) for vertex set {vertices:?}")]
    BadRoot { i: usize, j: usize, vertices: Vec<usize> },
    #[error("roots do not form a basis: {0}")]
    NotABasis(String),
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("invalid permutation {0:?}")]
    BadPermutation(Vec<usize>),
    #[error("point on a wall")]
    OnWall,
    #[error("point {0} outside the closure of the simplex")]
    OutsideSimplex(String),
    #[error("no regular chamber point found near {0}")]
    NoChamber(String),
}

pub type Result<T> = std::result::Result<T, WeightError>;

fn floor_i64(q: &Rational) -> i64 {
    q.floor().to_integer().to_i64().expect("floor fits in i64")
}

fn fmt_rationals(v: &[Rational], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

/// A point of `V*`: `r` rationals summing to zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector(Vec<Rational>);

impl WeightVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(WeightError::Rank(entries.len()));
        }
        let s: Rational = entries.iter().sum();
        if !s.is_zero() {
            return Err(WeightError::NonZeroSum(s.to_string()));
        }
        Ok(Self(entries))
    }

    pub fn zero(r: usize) -> Self {
        Self(vec![Rational::zero(); r])
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    /// `c_{Π'} = sum of c_i over i in Π'`.
    pub fn subset_sum(&self, subset: &[usize]) -> Rational {
        subset.iter().map(|&i| &self.0[i - 1]).sum()
    }

    fn mask_sum(&self, mask: u32) -> Rational {
        (0..self.r()).filter(|i| mask >> i & 1 == 1).map(|i| &self.0[i]).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self(self.0.iter().map(|a| a * s).collect())
    }

    /// `<self, other>` with the standard pairing.
    pub fn dot(&self, other: &Self) -> Rational {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn to_integral(&self) -> Option<IntegralWeight> {
        self.0
            .iter()
            .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
            .collect::<Option<Vec<_>>>()
            .map(IntegralWeight)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rationals(&self.0, f)
    }
}

/// A point of the lattice `Λ`: `r` integers summing to zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegralWeight(Vec<i64>);

impl IntegralWeight {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(WeightError::Rank(entries.len()));
        }
        let s: i64 = entries.iter().sum();
        if s != 0 {
            return Err(WeightError::NonZeroSum(s.to_string()));
        }
        Ok(Self(entries))
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn to_weight(&self) -> WeightVector {
        WeightVector(self.0.iter().map(|&x| int(x)).collect())
    }
}

impl fmt::Display for IntegralWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The signed root `α^{ij} = x_i - x_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    pub fn vector(&self, r: usize) -> WeightVector {
        let mut v = vec![Rational::zero(); r];
        v[self.i - 1] = int(1);
        v[self.j - 1] = int(-1);
        WeightVector(v)
    }

    /// The underlying edge `{i, j}` with `i < j`.
    pub fn edge(&self) -> (usize, usize) {
        (self.i.min(self.j), self.i.max(self.j))
    }

    pub fn crosses(&self, subset: &[usize]) -> bool {
        subset.contains(&self.i) != subset.contains(&self.j)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{},{}", self.i, self.j)
    }
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut x = x;
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller label as representative
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
        true
    }
}

/// True when the edges form a forest.
pub fn is_forest(roots: &[Root], r: usize) -> bool {
    let mut uf = UnionFind::new(r + 1);
    roots.iter().all(|b| uf.union(b.i, b.j))
}

/// An ordered basis of signed roots spanning the weights supported on
/// `vertices`; the full bases of `V*` use `vertices = 1..=r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedBasis {
    vertices: Vec<usize>,
    roots: Vec<Root>,
}

impl OrderedBasis {
    pub fn new(r: usize, roots: Vec<Root>) -> Result<Self> {
        Self::on_vertices((1..=r).collect(), roots)
    }

    pub fn on_vertices(mut vertices: Vec<usize>, roots: Vec<Root>) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() || vertices[0] == 0 {
            return Err(WeightError::NotABasis(format!("bad vertex set {vertices:?}")));
        }
        for b in &roots {
            if b.i == b.j || !vertices.contains(&b.i) || !vertices.contains(&b.j) {
                return Err(WeightError::BadRoot { i: b.i, j: b.j, vertices });
            }
        }
        if roots.len() + 1 != vertices.len() {
            return Err(WeightError::NotABasis(format!(
                "{} roots for {} vertices",
                roots.len(),
                vertices.len()
            )));
        }
        let top = *vertices.last().expect("nonempty");
        if !is_forest(&roots, top) {
            return Err(WeightError::NotABasis("roots are linearly dependent".into()));
        }
        Ok(Self { vertices, roots })
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of vertices, i.e. the rank of the root system it lives in.
    pub fn rank(&self) -> usize {
        self.vertices.len()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

impl fmt::Display for OrderedBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.roots.iter().map(|b| b.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// A permutation of `{1..r}`, stored as the images `σ(1), ..., σ(r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len() + 1];
        for &x in &images {
            if x == 0 || x > images.len() || seen[x] {
                return Err(WeightError::BadPermutation(images));
            }
            seen[x] = true;
        }
        Ok(Self(images))
    }

    pub fn identity(r: usize) -> Self {
        Self((1..=r).collect())
    }

    pub fn transposition(r: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (1..=r).collect();
        v.swap(a - 1, b - 1);
        Self(v)
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut v = vec![0; self.r()];
        for (i, &x) in self.0.iter().enumerate() {
            v[x - 1] = i + 1;
        }
        Self(v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(other.0.iter().map(|&x| self.apply(x)).collect())
    }

    pub fn sign(&self) -> i64 {
        let mut seen = vec![false; self.r()];
        let mut sign = 1;
        for start in 0..self.r() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] - 1;
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    /// `(σv)_{σ(i)} = v_i`.
    pub fn permute<T: Clone>(&self, v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        for (i, x) in v.iter().enumerate() {
            out[self.0[i] - 1] = x.clone();
        }
        out
    }

    pub fn act(&self, w: &WeightVector) -> WeightVector {
        WeightVector(self.permute(&w.0))
    }

    pub fn act_root(&self, b: Root) -> Root {
        Root::new(self.apply(b.i), self.apply(b.j))
    }

    pub fn all(r: usize) -> Vec<Self> {
        use itertools::Itertools;
        (1..=r).permutations(r).map(Self).collect()
    }
}

/// `ρ = ((r-1)/2, (r-3)/2, ..., (1-r)/2)`.
pub fn rho(r: usize) -> WeightVector {
    WeightVector((0..r).map(|i| rat(r as i64 - 1 - 2 * i as i64, 2)).collect())
}

/// Coordinates `m` with `a = sum m_j β_j`, by peeling leaves of the tree.
pub fn coords_in_basis(a: &WeightVector, basis: &OrderedBasis) -> Vec<Rational> {
    let n = basis.roots.len();
    let mut rem: Vec<Rational> = a.0.clone();
    let mut alive = vec![true; n];
    let mut coords = vec![Rational::zero(); n];
    for _ in 0..n {
        let leaf = basis.vertices.iter().find_map(|&v| {
            let mut it = (0..n).filter(|&j| alive[j] && (basis.roots[j].i == v || basis.roots[j].j == v));
            match (it.next(), it.next()) {
                (Some(j), None) => Some((v, j)),
                _ => None,
            }
        });
        let (v, j) = leaf.expect("a tree always has a leaf");
        let b = basis.roots[j];
        let m = if b.i == v { rem[v - 1].clone() } else { -rem[v - 1].clone() };
        rem[b.i - 1] -= &m;
        rem[b.j - 1] += &m;
        coords[j] = m;
        alive[j] = false;
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()), "weight not supported on the basis vertices");
    coords
}

fn combine(basis: &OrderedBasis, r: usize, coeffs: &[Rational]) -> WeightVector {
    let mut v = vec![Rational::zero(); r];
    for (b, m) in basis.roots.iter().zip(coeffs) {
        v[b.i - 1] += m;
        v[b.j - 1] -= m;
    }
    WeightVector(v)
}

/// `{a}_B = sum frac(m_j) β_j`.
pub fn fractional_part(a: &WeightVector, basis: &OrderedBasis) -> WeightVector {
    let m = coords_in_basis(a, basis);
    let frac: Vec<Rational> = m.iter().map(|x| x - x.floor()).collect();
    combine(basis, a.r(), &frac)
}

/// `[a]_B = a - {a}_B`, a lattice point.
pub fn integer_part(a: &WeightVector, basis: &OrderedBasis) -> WeightVector {
    let m = coords_in_basis(a, basis);
    let fl: Vec<Rational> = m.iter().map(|x| x.floor()).collect();
    combine(basis, a.r(), &fl)
}

fn prime_masks(r: usize) -> impl Iterator<Item = u32> {
    1..(1u32 << (r - 1))
}

/// No nonempty proper subset of the entries sums to an integer.
pub fn is_regular(c: &WeightVector) -> bool {
    // subsets containing r are complements of subsets avoiding it
    prime_masks(c.r()).all(|m| !c.mask_sum(m).is_integer())
}

/// `c_1 > c_2 > ... > c_r` and `c_1 - c_r < 1`.
pub fn in_simplex(c: &WeightVector) -> bool {
    let e = &c.0;
    e.windows(2).all(|w| w[0] > w[1]) && &e[0] - &e[e.len() - 1] < Rational::one()
}

/// Closure of the simplex.
pub fn in_closed_simplex(c: &WeightVector) -> bool {
    let e = &c.0;
    e.windows(2).all(|w| w[0] >= w[1]) && &e[0] - &e[e.len() - 1] <= Rational::one()
}

/// Floors of `c_{Π'}` over all nonempty `Π' ⊂ {1..r-1}`, in bitmask order.
pub fn chamber_signature(c: &WeightVector) -> Vec<i64> {
    prime_masks(c.r()).map(|m| floor_i64(&c.mask_sum(m))).collect()
}

pub fn same_chamber(a: &WeightVector, b: &WeightVector) -> Result<bool> {
    if !is_regular(a) || !is_regular(b) {
        return Err(WeightError::OnWall);
    }
    Ok(chamber_signature(a) == chamber_signature(b))
}

/// A partition `{1..r} = Π' ⊔ Π''` with `r ∈ Π''`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    prime: Vec<usize>,
    double_prime: Vec<usize>,
}

impl Partition {
    pub fn new(r: usize, mut prime: Vec<usize>) -> Result<Self> {
        prime.sort_unstable();
        prime.dedup();
        if prime.is_empty() || prime.iter().any(|&i| i == 0 || i >= r) {
            return Err(WeightError::BadPartition(format!(
                "Π' = {prime:?} must be a nonempty subset of 1..{}",
                r - 1
            )));
        }
        let double_prime = (1..=r).filter(|i| !prime.contains(i)).collect();
        Ok(Self { prime, double_prime })
    }

    pub fn from_mask(r: usize, mask: u32) -> Self {
        let prime = (1..r).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        Self::new(r, prime).expect("nonzero mask below 2^(r-1)")
    }

    /// All partitions for rank `r`.
    pub fn all(r: usize) -> Vec<Self> {
        prime_masks(r).map(|m| Self::from_mask(r, m)).collect()
    }

    pub fn r(&self) -> usize {
        self.prime.len() + self.double_prime.len()
    }

    pub fn prime(&self) -> &[usize] {
        &self.prime
    }

    pub fn double_prime(&self) -> &[usize] {
        &self.double_prime
    }

    pub fn mask(&self) -> u32 {
        self.prime.iter().map(|i| 1u32 << (i - 1)).sum()
    }

    /// `1_{Π'} - (|Π'|/r) 1`, the normal direction of its walls inside `V*`.
    pub fn normal(&self) -> WeightVector {
        let r = self.r();
        let s = rat(self.prime.len() as i64, r as i64);
        WeightVector(
            (1..=r)
                .map(|i| if self.prime.contains(&i) { Rational::one() - &s } else { -s.clone() })
                .collect(),
        )
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?},{:?})", self.prime, self.double_prime)
    }
}

/// The wall `S_{Π,l} = {c : c_{Π'} = l}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wall {
    pub partition: Partition,
    pub level: i64,
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}{}", self.partition, self.level)
    }
}

pub fn lam_over_k(k: u64, lam: &IntegralWeight) -> WeightVector {
    lam.to_weight().scale(&rat(1, k as i64))
}

/// `λ̂/k̂ = (λ + ρ)/(k + r)`.
pub fn hat_point(k: u64, lam: &IntegralWeight) -> WeightVector {
    let r = lam.r();
    lam.to_weight().add(&rho(r)).scale(&rat(1, (k + r as u64) as i64))
}

/// Walls `S_{Π,l}` with `l` between `(λ/k)_{Π'}` and `(λ̂/k̂)_{Π'}` inclusive.
pub fn wall_set(k: u64, lam: &IntegralWeight) -> Result<Vec<Wall>> {
    let a = lam_over_k(k, lam);
    if !in_closed_simplex(&a) {
        return Err(WeightError::OutsideSimplex(a.to_string()));
    }
    let b = hat_point(k, lam);
    let r = lam.r();
    let mut walls = Vec::new();
    for m in prime_masks(r) {
        let (x, y) = (a.mask_sum(m), b.mask_sum(m));
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let first = lo.ceil().to_integer().to_i64().expect("small");
        let last = floor_i64(&hi);
        for level in first..=last {
            walls.push(Wall { partition: Partition::from_mask(r, m), level });
        }
    }
    walls.sort();
    Ok(walls)
}

/// Which point a chamber has to contain in its closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChamberTarget {
    LamOverK,
    Hat,
}

fn target_point(k: u64, lam: &IntegralWeight, target: ChamberTarget) -> WeightVector {
    match target {
        ChamberTarget::LamOverK => lam_over_k(k, lam),
        ChamberTarget::Hat => hat_point(k, lam),
    }
}

/// `c` lies in a chamber whose closure contains `t`.
pub fn closure_contains(c: &WeightVector, t: &WeightVector) -> bool {
    prime_masks(c.r()).all(|m| {
        let (x, y) = (c.mask_sum(m), t.mask_sum(m));
        let fx = x.floor();
        if y.is_integer() {
            fx == y || fx == &y - Rational::one()
        } else {
            fx == y.floor()
        }
    })
}

/// `w_i = mean - b^i`, decreasing in `i`.
fn base_direction(r: usize, b: i64) -> Vec<Rational> {
    let pw: Vec<Rational> = (1..=r as u32).map(|i| int(b.pow(i))).collect();
    let mean: Rational = pw.iter().sum::<Rational>() / int(r as i64);
    pw.iter().map(|p| &mean - p).collect()
}

fn random_direction(r: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let raw: Vec<Rational> = (0..r).map(|_| rat(rng.gen_range(-97..=97), rng.gen_range(1..=13))).collect();
    let mean: Rational = raw.iter().sum::<Rational>() / int(r as i64);
    raw.iter().map(|x| x - &mean).collect()
}

fn resolve_along(t: &WeightVector, w: &[Rational]) -> Option<WeightVector> {
    let r = t.r();
    let wmax = w.iter().map(|x| x.abs()).max()?;
    if wmax.is_zero() {
        return None;
    }
    // keep the interior point inside Δ: every gap of ρ/r is 1/r
    let eta = Rational::one() / (int(4 * r as i64) * wmax);
    let z = rho(r)
        .scale(&rat(1, r as i64))
        .add(&WeightVector(w.iter().map(|x| x * &eta).collect()));
    let dir = z.sub(t);
    let mut eps = rat(1, 2);
    for _ in 0..80 {
        let c = t.add(&dir.scale(&eps));
        if is_regular(&c) && in_simplex(&c) && closure_contains(&c, t) {
            return Some(c);
        }
        eps /= int(2);
    }
    None
}

/// A regular point of `Δ` whose chamber closure contains `t`.
pub fn resolve_point(t: &WeightVector) -> Result<WeightVector> {
    if !in_closed_simplex(t) {
        return Err(WeightError::OutsideSimplex(t.to_string()));
    }
    if is_regular(t) && in_simplex(t) {
        return Ok(t.clone());
    }
    for b in [3, 5, 7, 11, 13] {
        if let Some(c) = resolve_along(t, &base_direction(t.r(), b)) {
            return Ok(c);
        }
    }
    Err(WeightError::NoChamber(t.to_string()))
}

/// Representatives of all chambers around `t` reached from a fixed family of
/// directions, first the canonical one.
pub fn resolve_point_sides(t: &WeightVector) -> Result<Vec<WeightVector>> {
    let first = resolve_point(t)?;
    let r = t.r();
    let mut found = vec![first];
    let mut dirs: Vec<Vec<Rational>> = Vec::new();
    for b in [3, 5, 7, 11, 13] {
        let w = base_direction(r, b);
        dirs.push(w.iter().map(|x| -x).collect());
        dirs.push(w);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..24 {
        dirs.push(random_direction(r, &mut rng));
    }
    for w in dirs {
        if let Some(c) = resolve_along(t, &w) {
            let sig = chamber_signature(&c);
            if found.iter().all(|f| chamber_signature(f) != sig) {
                found.push(c);
            }
        }
    }
    Ok(found)
}

pub fn resolve_chamber(k: u64, lam: &IntegralWeight, target: ChamberTarget) -> Result<WeightVector> {
    resolve_point(&target_point(k, lam, target))
}

pub fn resolve_chamber_sides(k: u64, lam: &IntegralWeight, target: ChamberTarget) -> Result<Vec<WeightVector>> {
    resolve_point_sides(&target_point(k, lam, target))
}

/// Regular points `c⁺, c⁻` in neighbouring chambers across `wall`, with
/// `[c⁺_{Π'}] = l` and `[c⁻_{Π'}] = l - 1`; every other partition sum has
/// the same floor on both sides.
///
/// The pair is placed near `anchor` projected onto the wall. With
/// `inside_simplex` both points lie in `Δ`; `None` if no such pair was found.
pub fn straddle_wall(
    wall: &Wall,
    anchor: Option<&WeightVector>,
    inside_simplex: bool,
    seed: u64,
) -> Option<(WeightVector, WeightVector)> {
    let p = &wall.partition;
    let r = p.r();
    let mask = p.mask();
    let u = p.normal();
    let un = u.mask_sum(mask);
    let l = int(wall.level);
    let base = anchor.cloned().unwrap_or_else(|| rho(r).scale(&rat(1, r as i64)));
    let q = base.add(&u.scale(&((&l - base.mask_sum(mask)) / &un)));
    let interior = rho(r).scale(&rat(1, r as i64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..40 {
        let mut d = WeightVector(random_direction(r, &mut rng));
        if inside_simplex {
            let weight = rat(1, 1 + attempt as i64);
            d = interior.sub(&q).add(&d.scale(&weight));
        }
        let d = d.sub(&u.scale(&(d.mask_sum(mask) / &un)));
        let mut eta = if inside_simplex { rat(1, 2) } else { rat(1, 7) };
        for _ in 0..40 {
            let on_wall = q.add(&d.scale(&eta));
            eta /= int(2);
            let ok_elsewhere = prime_masks(r).all(|m| m == mask || !on_wall.mask_sum(m).is_integer());
            if !ok_elsewhere || (inside_simplex && !in_simplex(&on_wall)) {
                continue;
            }
            let mut eps = rat(1, 4);
            for _ in 0..40 {
                let plus = on_wall.add(&u.scale(&eps));
                let minus = on_wall.sub(&u.scale(&eps));
                eps /= int(2);
                if !is_regular(&plus) || !is_regular(&minus) {
                    continue;
                }
                if inside_simplex && !(in_simplex(&plus) && in_simplex(&minus)) {
                    continue;
                }
                if adjacent_across(&plus, &minus) == Some(wall.clone()) {
                    return Some((plus, minus));
                }
            }
        }
    }
    None
}

/// If the chamber signatures differ in exactly one partition sum, by one
/// unit, the wall between them with `c⁺` on the upper side.
pub fn adjacent_across(plus: &WeightVector, minus: &WeightVector) -> Option<Wall> {
    let r = plus.r();
    let (sp, sm) = (chamber_signature(plus), chamber_signature(minus));
    let diffs: Vec<usize> = (0..sp.len()).filter(|&i| sp[i] != sm[i]).collect();
    match diffs.as_slice() {
        [i] if sp[*i] == sm[*i] + 1 => Some(Wall {
            partition: Partition::from_mask(r, (*i + 1) as u32),
            level: sp[*i],
        }),
        _ => None,
    }
}

/// All `λ` with `λ/k` in the closed simplex, lexicographically.
pub fn admissible_weights(r: usize, k: u64) -> Vec<IntegralWeight> {
    let k = k as i64;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    // λ_1 - λ_r <= k and the sum vanishes, so |λ_i| <= k
    fn rec(r: usize, k: i64, cur: &mut Vec<i64>, out: &mut Vec<IntegralWeight>) {
        if cur.len() == r {
            let s: i64 = cur.iter().sum();
            if s == 0 && cur[0] - cur[r - 1] <= k {
                out.push(IntegralWeight(cur.clone()));
            }
            return;
        }
        let hi = cur.last().copied().unwrap_or(k);
        let lo = cur.first().map_or(-k, |&f| f - k);
        for x in lo..=hi {
            cur.push(x);
            rec(r, k, cur, out);
            cur.pop();
        }
    }
    rec(r, k, &mut cur, &mut out);
    out.sort();
    out
}

/// Integer-valued floor of a big rational, used for signatures elsewhere.
pub fn floor_bigint(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

/// Lowest common multiple of the denominators of `v`.
pub fn common_denominator(v: &WeightVector) -> BigInt {
    v.0.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
