mod common;

use common::{iw, rank_three_closed_form, rank_three_wall_term, rank_two_float};
use verlinde::diagonal_bases::{hamiltonian_basis, wall_nbc_data};
use verlinde::exact_series::rat;
use verlinde::residue_engine::{p_c, ver_residue, wallcross_full, wallcross_reduced, ChamberSpec, VerlindeInput};
use verlinde::weight_space::{admissible_weights, Partition, Wall, WeightVector};

fn chamber(greater: bool) -> ChamberSpec {
    let c = if greater { [rat(2, 5), rat(1, 10), rat(-1, 2)] } else { [rat(1, 2), rat(-1, 10), rat(-2, 5)] };
    ChamberSpec::new(WeightVector::new(c.to_vec()).unwrap()).unwrap()
}

#[test]
fn oracle_reproduces_small_values() {
    // genus one, trivial weight: the number of level-one SU(3) weights
    assert_eq!(rank_three_closed_form(1, 1, &[0, 0, 0], true), common::q(3));
    assert_eq!(rank_two_float(2, 1, 0), 4);
    assert_eq!(rank_two_float(2, 2, 0), 10);
}

#[test]
fn rank_three_chamber_polynomials() {
    let d = hamiltonian_basis(1, 3).unwrap();
    for g in 1..=2 {
        for k in 1..=3u64 {
            for lam in [[0, 0, 0], [1, 0, -1], [2, -1, -1], [-1, 3, -2]] {
                let inp = VerlindeInput::new(g, k, iw(&lam)).unwrap();
                for greater in [true, false] {
                    let engine = p_c(&inp, &chamber(greater), &d).unwrap();
                    assert_eq!(engine, rank_three_closed_form(g, k, &lam, greater), "g={g} k={k} {lam:?} >{greater}");
                }
            }
        }
    }
}

#[test]
fn rank_three_wall_term_matches() {
    let p = Partition::new(3, vec![2]).unwrap();
    let wall = Wall { partition: p.clone(), level: 0 };
    let (_, dp, dpp) = wall_nbc_data(&p).unwrap();
    let d = hamiltonian_basis(1, 3).unwrap();
    for g in 1..=2 {
        for k in 1..=3u64 {
            for lam in [[0, 0, 0], [1, 0, -1], [3, -1, -2]] {
                let inp = VerlindeInput::new(g, k, iw(&lam)).unwrap();
                let full = wallcross_full(&inp, &chamber(true), &chamber(false), &d).unwrap();
                let reduced = wallcross_reduced(&inp, &wall, &chamber(true), &dp, &dpp).unwrap();
                assert_eq!(full, reduced);
                assert_eq!(-full, rank_three_wall_term(g, k, &lam), "g={g} k={k} {lam:?}");
            }
        }
    }
}

#[test]
fn rank_two_against_sine_sum() {
    for g in 1..=3 {
        for k in 1..=5 {
            for lam in admissible_weights(2, k) {
                let inp = VerlindeInput::new(g, k, lam.clone()).unwrap();
                let v = ver_residue(&inp).unwrap();
                assert_eq!(v, common::q(rank_two_float(g, k, lam.entries()[0])), "g={g} k={k} {lam:?}");
            }
        }
    }
}
