//! Hecke index shifts, the level-`k` affine Weyl action, the points
//! `θ_{±1}[k]` with their stabilizers, and the rank-2 two-point polynomials.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::diagonal_bases::DiagonalBasisSet;
use crate::exact_series::{int, rat, residue_of, FactorExpr, LinearForm, Rational, SeriesError};
use crate::residue_engine::{p_c, ChamberSpec, EngineError, VerlindeInput};
use crate::weight_space::{rho, IntegralWeight, Permutation, Root, WeightError, WeightVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("degree {d} at level {k} needs weights summing to {expected}, got {got}")]
    Degree { d: i64, k: i64, expected: i64, got: i64 },
    #[error("rank mismatch: {0} vs {1}")]
    Rank(usize, usize),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// `(d, k, λ)` with `Σ λ_i = k d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LineBundleLabel {
    d: i64,
    k: i64,
    lam: Vec<i64>,
}

impl LineBundleLabel {
    pub fn new(d: i64, k: i64, lam: Vec<i64>) -> Result<Self, SymmetryError> {
        let got: i64 = lam.iter().sum();
        if got != k * d {
            return Err(SymmetryError::Degree { d, k, expected: k * d, got });
        }
        Ok(Self { d, k, lam })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn lam(&self) -> &[i64] {
        &self.lam
    }
}

/// `H^m`: for `m >= 0`, `d -> d - m` and
/// `λ -> (λ_{m+1}, ..., λ_r, λ_1 - k, ..., λ_m - k)`, applied one step at a
/// time; negative `m` uses the inverse step.
pub fn hecke_shift(m: i64, l: &LineBundleLabel) -> LineBundleLabel {
    let r = l.lam.len() as i64;
    let k = l.k;
    // H^{qr + s} = H^s followed by the global shift q times
    let (q, s) = (m.div_euclid(r), m.rem_euclid(r) as usize);
    let mut lam: Vec<i64> = l.lam[s..].iter().copied().chain(l.lam[..s].iter().map(|x| x - k)).collect();
    for x in &mut lam {
        *x -= q * k;
    }
    LineBundleLabel { d: l.d - m, k, lam }
}

/// `(σ, γ)` acting by `λ -> σ(λ + ρ) - ρ + (k + r) γ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineWeylElement {
    pub sigma: Permutation,
    pub gamma: IntegralWeight,
}

impl AffineWeylElement {
    pub fn identity(r: usize) -> Self {
        Self { sigma: Permutation::identity(r), gamma: IntegralWeight::new(vec![0; r]).expect("zero") }
    }

    pub fn permutation(sigma: Permutation) -> Self {
        let r = sigma.r();
        Self { sigma, gamma: IntegralWeight::new(vec![0; r]).expect("zero") }
    }

    pub fn translation(gamma: IntegralWeight) -> Self {
        Self { sigma: Permutation::identity(gamma.r()), gamma }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let moved = self.sigma.act(&other.gamma.to_weight());
        let gamma = self.gamma.to_weight().add(&moved).to_integral().expect("integral");
        Self { sigma: self.sigma.compose(&other.sigma), gamma }
    }

    pub fn sign(&self) -> i64 {
        self.sigma.sign()
    }

    /// The action on all of `V*` at level `k`.
    pub fn act_weight(&self, k: u64, lam: &WeightVector) -> WeightVector {
        let r = lam.r();
        let khat = int((k + r as u64) as i64);
        let rh = rho(r);
        self.sigma.act(&lam.add(&rh)).sub(&rh).add(&self.gamma.to_weight().scale(&khat))
    }
}

pub fn affine_act(w: &AffineWeylElement, k: u64, lam: &IntegralWeight) -> IntegralWeight {
    w.act_weight(k, &lam.to_weight()).to_integral().expect("the action preserves the lattice")
}

/// `θ_1[k] = (k̂/r)(1,...,1) - k̂ e_r - ρ` and `θ_{-1}[k] = -(k̂/r)(1,...,1) + k̂ e_1 - ρ`.
pub fn theta_points(r: usize, k: u64) -> (WeightVector, WeightVector) {
    let khat = (k + r as u64) as i64;
    let mut plus: Vec<Rational> = vec![rat(khat, r as i64); r];
    plus[r - 1] -= int(khat);
    let mut minus: Vec<Rational> = vec![rat(-khat, r as i64); r];
    minus[0] += int(khat);
    let rh = rho(r);
    let plus = WeightVector::new(plus).expect("sums to zero").sub(&rh);
    let minus = WeightVector::new(minus).expect("sums to zero").sub(&rh);
    (plus, minus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

/// Generators of the stabilizer of `θ_{±1}[k]`; each is checked to fix it.
pub fn stabilizer_generators(r: usize, k: u64, side: Side) -> Vec<AffineWeylElement> {
    let s = |i: usize| Permutation::transposition(r, i, i + 1);
    let root = |i: usize, j: usize| Root::new(i, j).vector(r).to_integral().expect("root");
    let gens: Vec<AffineWeylElement> = match side {
        Side::Plus => (1..=r.saturating_sub(2))
            .map(|i| AffineWeylElement::permutation(s(i)))
            .chain(std::iter::once(AffineWeylElement { sigma: s(r - 1), gamma: root(r - 1, r) }))
            .collect(),
        Side::Minus => (2..r)
            .map(|i| AffineWeylElement::permutation(s(i)))
            .chain(std::iter::once(AffineWeylElement { sigma: s(1), gamma: root(1, 2) }))
            .collect(),
    };
    let (tp, tm) = theta_points(r, k);
    let theta = if side == Side::Plus { tp } else { tm };
    for g in &gens {
        assert_eq!(g.act_weight(k, &theta), theta, "generator does not fix θ");
    }
    gens
}

/// A regular point in the chamber of `θ_{±1}[k] / k̂`:
/// `(1/r)(1,...,1) - e_r` or `-(1/r)(1,...,1) + e_1`.
pub fn theta_chamber(r: usize, side: Side) -> WeightVector {
    let mut v: Vec<Rational> = vec![rat(if side == Side::Plus { 1 } else { -1 }, r as i64); r];
    match side {
        Side::Plus => v[r - 1] -= int(1),
        Side::Minus => v[0] += int(1),
    }
    WeightVector::new(v).expect("sums to zero")
}

/// `p_{±1}(k; λ)`: the chamber polynomial of the `θ_{±1}` chamber.
pub fn p_pm1(inp: &VerlindeInput, side: Side, d: &DiagonalBasisSet) -> Result<Rational, EngineError> {
    p_c(inp, &ChamberSpec::anywhere(theta_chamber(inp.r, side))?, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoPointSide {
    Gt,
    Lt,
}

fn two_point_term(k: u64, g: u32, exponent: i64, trunc: u32) -> Result<Rational, SeriesError> {
    let u = LinearForm::from_ints(&[1]);
    let f = FactorExpr::new(Rational::one())
        .with_exp(u.scaled(&int(exponent)))
        .with_inv_two_sinh_half(u.clone(), 2 * g)
        .with_inv_one_minus_exp(u.scaled(&int(k as i64 + 2)));
    residue_of(&f, 1, trunc)
}

fn two_point_prefactor(k: u64, g: u32, sign_exp: u32) -> Rational {
    let p = num_traits::pow(BigInt::from(2 * k + 4), g as usize);
    let v = Rational::from_integer(p);
    if sign_exp % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `h̃_>` and `h̃_<` as univariate residues in `u`.
pub fn h_tilde(k: u64, lam: i64, mu: i64, g: u32, side: TwoPointSide) -> Result<Rational, SeriesError> {
    let second = match side {
        TwoPointSide::Gt => lam - mu,
        TwoPointSide::Lt => lam - mu + k as i64 + 2,
    };
    let trunc = 1;
    let res = two_point_term(k, g, lam + mu + 1, trunc)? - two_point_term(k, g, second, trunc)?;
    Ok(two_point_prefactor(k, g, g - 1) * res)
}

/// `(-1)^g (2k+4)^g Res e^{u(λ-μ)} / (2 sinh(u/2))^{2g}`.
pub fn two_point_difference(k: u64, lam: i64, mu: i64, g: u32) -> Result<Rational, SeriesError> {
    let u = LinearForm::from_ints(&[1]);
    let f = FactorExpr::new(Rational::one()).with_exp(u.scaled(&int(lam - mu))).with_inv_two_sinh_half(u, 2 * g);
    Ok(two_point_prefactor(k, g, g) * residue_of(&f, 1, 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal_bases::hamiltonian_basis;

    fn iw(v: &[i64]) -> IntegralWeight {
        IntegralWeight::new(v.to_vec()).unwrap()
    }

    #[test]
    fn hecke_examples() {
        let l = LineBundleLabel::new(0, 3, vec![1, 2, -3]).unwrap();
        assert_eq!(hecke_shift(0, &l), l);
        let h3 = hecke_shift(3, &l);
        assert_eq!((h3.d(), h3.lam()), (-3, &[-2, -1, -6][..]));
        let h1 = hecke_shift(1, &l);
        assert_eq!((h1.d(), h1.lam()), (-1, &[2, -3, -2][..]));
        let back = hecke_shift(-1, &l);
        assert_eq!((back.d(), back.lam()), (1, &[0, 1, 2][..]));
        for a in -7..7 {
            for b in -7..7 {
                assert_eq!(hecke_shift(a, &hecke_shift(b, &l)), hecke_shift(a + b, &l));
            }
            let h = hecke_shift(a, &l);
            assert!(LineBundleLabel::new(h.d(), h.k(), h.lam().to_vec()).is_ok());
        }
        assert!(LineBundleLabel::new(1, 2, vec![0, 0]).is_err());
    }

    #[test]
    fn affine_examples() {
        let s12 = AffineWeylElement::permutation(Permutation::transposition(3, 1, 2));
        assert_eq!(affine_act(&s12, 4, &iw(&[2, 1, -3])), iw(&[0, 3, -3]));
        let t = AffineWeylElement::translation(iw(&[1, -1, 0]));
        assert_eq!(affine_act(&t, 2, &iw(&[1, 0, -1])), iw(&[6, -5, -1]));
        assert_eq!(affine_act(&AffineWeylElement::identity(3), 2, &iw(&[1, 0, -1])), iw(&[1, 0, -1]));
        let w = s12.compose(&t);
        for lam in [iw(&[0, 0, 0]), iw(&[3, -1, -2])] {
            assert_eq!(affine_act(&w, 5, &lam), affine_act(&s12, 5, &affine_act(&t, 5, &lam)));
        }
    }

    #[test]
    fn theta_examples() {
        let (t, _) = theta_points(3, 6);
        assert_eq!(t, iw(&[2, 3, -5]).to_weight());
        for k in 1..5 {
            let (t, _) = theta_points(3, k);
            let kk = rat(k as i64, 3);
            let expected = WeightVector::new(vec![kk.clone(), &kk + int(1), -(&kk * int(2)) - int(1)]).unwrap();
            assert_eq!(t, expected);
            let (a, b) = theta_points(2, k);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn stabilizers() {
        let g = stabilizer_generators(3, 2, Side::Plus);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0], AffineWeylElement::permutation(Permutation::transposition(3, 1, 2)));
        assert_eq!(g[1].gamma, iw(&[0, 1, -1]));
        for r in 2..=5 {
            for k in 1..4 {
                assert_eq!(stabilizer_generators(r, k, Side::Plus).len(), r - 1);
                assert_eq!(stabilizer_generators(r, k, Side::Minus).len(), r - 1);
            }
        }
    }

    #[test]
    fn two_point_small() {
        for k in 1..=3u64 {
            for g in 1..=2u32 {
                for lam in -3..=3 {
                    for mu in -3..=3 {
                        let gt = h_tilde(k, lam, mu, g, TwoPointSide::Gt).unwrap();
                        let lt = h_tilde(k, lam, mu, g, TwoPointSide::Lt).unwrap();
                        assert_eq!(&gt - &lt, two_point_difference(k, lam, mu, g).unwrap());
                        assert_eq!(gt, -h_tilde(k, lam, -mu - 1, g, TwoPointSide::Gt).unwrap());
                        assert_eq!(lt, -h_tilde(k, -lam - 1, mu, g, TwoPointSide::Lt).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn anti_invariance_small() {
        let d = hamiltonian_basis(1, 3).unwrap();
        for side in [Side::Plus, Side::Minus] {
            for gen in stabilizer_generators(3, 2, side) {
                for lam in [iw(&[0, 0, 0]), iw(&[2, -1, -1]), iw(&[-3, 5, -2])] {
                    let a = p_pm1(&VerlindeInput::new(1, 2, lam.clone()).unwrap(), side, &d).unwrap();
                    let moved = affine_act(&gen, 2, &lam);
                    let b = p_pm1(&VerlindeInput::new(1, 2, moved).unwrap(), side, &d).unwrap();
                    assert_eq!(a, -b, "{side:?} {lam}");
                }
            }
        }
    }
}
