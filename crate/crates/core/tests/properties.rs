mod common;

use proptest::prelude::*;

use common::{q, Factors};
use verlinde::diagonal_bases::{hamiltonian_basis, nbc_basis, permute_basis_set, RootOrdering};
use verlinde::exact_series::{
    bernoulli, expand_factor, int, iterated_residue, rat, residue_of, FactorExpr, LinearForm, Rational,
};
use verlinde::residue_engine::{iber, p_c, ChamberSpec, VerlindeInput, XFactorExpr};
use verlinde::symmetry_toolkit::{affine_act, hecke_shift, AffineWeylElement, LineBundleLabel};
use verlinde::weight_space::{is_regular, IntegralWeight, Permutation, WeightVector};

fn weight(r: usize) -> impl Strategy<Value = IntegralWeight> {
    prop::collection::vec(-4i64..=4, r - 1).prop_map(move |mut v| {
        let s: i64 = v.iter().sum();
        v.push(-s);
        IntegralWeight::new(v).unwrap()
    })
}

fn perm(r: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=r).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

/// A regular point of `V*` with small denominators.
fn regular_point(r: usize) -> impl Strategy<Value = WeightVector> {
    prop::collection::vec(-60i64..=60, r - 1).prop_filter_map("irregular", move |v| {
        let mut e: Vec<Rational> = v.iter().map(|&x| rat(x, 97)).collect();
        let s: Rational = e.iter().sum();
        e.push(-s);
        let w = WeightVector::new(e).ok()?;
        is_regular(&w).then_some(w)
    })
}

fn affine(r: usize) -> impl Strategy<Value = AffineWeylElement> {
    (perm(r), weight(r)).prop_map(|(s, g)| AffineWeylElement::permutation(s).compose(&AffineWeylElement::translation(g)))
}

#[test]
fn bernoulli_matches_generating_function() {
    // z/(e^z - 1) = sum B_n z^n / n!
    let n = 24;
    let mut coeffs = vec![q(1)];
    for m in 1..n {
        let mut s = q(0);
        for j in 1..=m {
            let fact: Rational = (1..=(j + 1) as i64).map(q).product();
            s += coeffs[m - j].clone() / fact;
        }
        coeffs.push(-s);
    }
    for (m, c) in coeffs.iter().enumerate() {
        let fact: Rational = (1..=m as i64).map(q).product();
        assert_eq!(bernoulli(m), c * fact, "B_{m}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn iterated_residue_matches_double_series(a in -6i64..=6, b in -6i64..=6, kk in 1i64..=6, g in 1u32..=2) {
        let m = 2 * g - 1;
        let f = Factors::new(1 + m as i64, 1 + 3 * m as i64);
        let oracle = f
            .exp(a, b)
            .mul(&f.inv_one_minus_exp(kk, false))
            .mul(&f.inv_one_minus_exp(kk, true))
            .mul(&f.inv_sinh(m, false))
            .mul(&f.inv_sinh(m, true))
            .mul(&f.inv_sinh_sum(m))
            .residue();
        // engine variables are (y, x): the first one dominates
        let e = FactorExpr::new(int(1))
            .with_exp(LinearForm::from_ints(&[b, a]))
            .with_inv_one_minus_exp(LinearForm::from_ints(&[0, kk]))
            .with_inv_one_minus_exp(LinearForm::from_ints(&[kk, 0]))
            .with_inv_two_sinh_half(LinearForm::from_ints(&[0, 1]), m)
            .with_inv_two_sinh_half(LinearForm::from_ints(&[1, 0]), m)
            .with_inv_two_sinh_half(LinearForm::from_ints(&[1, 1]), m);
        prop_assert_eq!(residue_of(&e, 2, 1).unwrap(), oracle);
    }

    #[test]
    fn residue_is_linear(a in -5i64..=5, b in -5i64..=5, s in -4i64..=4, t in -4i64..=4) {
        let f = |e: i64| FactorExpr::new(int(1))
            .with_exp(LinearForm::from_ints(&[e, 1]))
            .with_inv_one_minus_exp(LinearForm::from_ints(&[1, 0]))
            .with_inv_two_sinh_half(LinearForm::from_ints(&[1, -1]), 2);
        let (fa, fb) = (expand_factor(&f(a), 2, 1).unwrap(), expand_factor(&f(b), 2, 1).unwrap());
        let combo = fa.scale(&int(s)).add(&fb.scale(&int(t)));
        prop_assert_eq!(
            iterated_residue(&combo),
            iterated_residue(&fa) * int(s) + iterated_residue(&fb) * int(t)
        );
    }

    #[test]
    fn linear_forms_form_a_group(a in prop::collection::vec(-9i64..=9, 3), b in prop::collection::vec(-9i64..=9, 3), s in -5i64..=5) {
        let (la, lb) = (LinearForm::from_ints(&a), LinearForm::from_ints(&b));
        prop_assert!(la.add(&la.neg()).is_zero());
        prop_assert_eq!(la.add(&lb), lb.add(&la));
        prop_assert_eq!(la.add(&lb).scaled(&int(s)), la.scaled(&int(s)).add(&lb.scaled(&int(s))));
    }

    #[test]
    fn iber_is_linear_in_the_scalar(lam in weight(3), s in -7i64..=7, g in 1u32..=2) {
        let d = hamiltonian_basis(1, 3).unwrap();
        let b = &d.bases()[0];
        let f = XFactorExpr::weyl_power(3, g, 5);
        let mut f2 = f.clone();
        f2.scalar *= int(s);
        let a = lam.to_weight().scale(&rat(1, 5));
        prop_assert_eq!(iber(b, &f2, &a).unwrap(), iber(b, &f, &a).unwrap() * int(s));
    }

    #[test]
    fn p_c_is_independent_of_the_diagonal_basis(lam in weight(3), k in 1u64..=4, c in regular_point(3), seed in 0u64..50) {
        let inp = VerlindeInput::new(1, k, lam).unwrap();
        let c = ChamberSpec::anywhere(c).unwrap();
        let base = p_c(&inp, &c, &hamiltonian_basis(1, 3).unwrap()).unwrap();
        prop_assert_eq!(&p_c(&inp, &c, &hamiltonian_basis(3, 3).unwrap()).unwrap(), &base);
        let ord = verlinde::cli::config::seeded_ordering(3, seed);
        prop_assert_eq!(&p_c(&inp, &c, &nbc_basis(&ord, 3).unwrap()).unwrap(), &base);
        prop_assert_eq!(&p_c(&inp, &c, &nbc_basis(&RootOrdering::lexicographic(3), 3).unwrap()).unwrap(), &base);
    }

    #[test]
    fn iber_is_permutation_equivariant(a in regular_point(3), sigma in perm(3), m in 1usize..=3, g in 1u32..=2) {
        // iBer_{σB}[σf](σa) = iBer_B[f](a)
        let d = hamiltonian_basis(m, 3).unwrap();
        let f = XFactorExpr::weyl_power(3, g, 4).with_exp(WeightVector::new(vec![int(1), int(0), int(-1)]).unwrap());
        let sd = permute_basis_set(&sigma, &d).unwrap();
        for (b, sb) in d.bases().iter().zip(sd.bases()) {
            prop_assert_eq!(iber(sb, &f.permuted(&sigma), &sigma.act(&a)).unwrap(), iber(b, &f, &a).unwrap());
        }
    }

    #[test]
    fn affine_action_is_a_group_action(a in affine(4), b in affine(4), lam in weight(4), k in 1u64..=5) {
        let lhs = affine_act(&a.compose(&b), k, &lam);
        let rhs = affine_act(&a, k, &affine_act(&b, k, &lam));
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(affine_act(&AffineWeylElement::identity(4), k, &lam), lam);
        prop_assert_eq!(a.compose(&b).sign(), a.sign() * b.sign());
    }

    #[test]
    fn hecke_shifts_compose(m1 in -7i64..=7, m2 in -7i64..=7, lam in weight(3), k in 1i64..=5, d in -3i64..=3) {
        let entries: Vec<i64> = lam.entries().iter().enumerate().map(|(i, x)| x + if i == 0 { k * d } else { 0 }).collect();
        let l = LineBundleLabel::new(d, k, entries).unwrap();
        let two = hecke_shift(m1, &hecke_shift(m2, &l));
        prop_assert_eq!(&two, &hecke_shift(m1 + m2, &l));
        prop_assert_eq!(two.d(), d - m1 - m2);
        prop_assert_eq!(hecke_shift(-m1, &hecke_shift(m1, &l)), l);
    }
}
