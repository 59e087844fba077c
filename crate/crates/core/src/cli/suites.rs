//! Invariant suites behind `verlinde crosscheck`.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagonal_bases::{
    compose_wall_basis, hamiltonian_basis, nbc_basis, restrict_to_wall, wall_nbc_data, RootOrdering,
};
use crate::exact_series::Rational;
use crate::residue_engine::{
    p_c, p_c_trunc, ver_residue, wallcross_full, wallcross_reduced, ChamberSpec, VerlindeInput, DEFAULT_TRUNC,
};
use crate::symmetry_toolkit::{affine_act, h_tilde, p_pm1, stabilizer_generators, two_point_difference, Side, TwoPointSide};
use crate::verlinde_sum::{default_precision, ver_sum};
use crate::weight_space::{
    admissible_weights, hat_point, lam_over_k, resolve_chamber, straddle_wall, wall_set, ChamberTarget, IntegralWeight,
    Partition, Wall, WeightVector,
};

use super::config::BasisChoice;
use super::rat_str;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Sum,
    Basis,
    Chamber,
    Wallcross,
    Symmetry,
    Twopoint,
    Counts,
    Trunc,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Sum,
        Suite::Basis,
        Suite::Chamber,
        Suite::Wallcross,
        Suite::Symmetry,
        Suite::Twopoint,
        Suite::Counts,
        Suite::Trunc,
    ];
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub cases: usize,
    pub skipped: usize,
    /// First failing case in enumeration order.
    pub counterexample: Option<Value>,
}

/// Parameters shared by all suites.
#[derive(Debug, Clone)]
pub struct SuiteParams {
    pub ranks: Vec<usize>,
    pub genera: Vec<u32>,
    pub levels: Vec<u64>,
}

type Case = anyhow::Result<Option<Value>>;

fn report(suite: Suite, outcomes: Vec<Case>, skipped: usize) -> SuiteReport {
    let cases = outcomes.len();
    let counterexample = outcomes.into_iter().find_map(|o| match o {
        Ok(None) => None,
        Ok(Some(v)) => Some(v),
        Err(e) => Some(json!({ "error": e.to_string() })),
    });
    SuiteReport { suite, passed: counterexample.is_none(), cases, skipped, counterexample }
}

fn grid(p: &SuiteParams, r: usize) -> Vec<(u32, u64, IntegralWeight)> {
    let mut v = Vec::new();
    for &g in &p.genera {
        for &k in &p.levels {
            for lam in admissible_weights(r, k) {
                v.push((g, k, lam));
            }
        }
    }
    v
}

fn echo(r: usize, g: u32, k: u64, lam: &IntegralWeight) -> Value {
    json!({ "r": r, "g": g, "k": k, "lambda": lam.entries() })
}

pub fn run(suite: Suite, p: &SuiteParams) -> SuiteReport {
    match suite {
        Suite::Sum => sum_suite(p),
        Suite::Basis => basis_suite(p),
        Suite::Chamber => chamber_suite(p),
        Suite::Wallcross => wallcross_suite(p),
        Suite::Symmetry => symmetry_suite(p),
        Suite::Twopoint => twopoint_suite(p),
        Suite::Counts => counts_suite(p),
        Suite::Trunc => trunc_suite(p),
    }
}

fn sum_suite(p: &SuiteParams) -> SuiteReport {
    let bits = default_precision();
    let mut out = Vec::new();
    for &r in &p.ranks {
        let cases: Vec<Case> = grid(p, r)
            .par_iter()
            .map(|(g, k, lam)| {
                let inp = VerlindeInput::new(*g, *k, lam.clone())?;
                let res = ver_residue(&inp)?;
                let sum = ver_sum(&inp, bits)?;
                let ok = res.is_integer() && res.to_integer() == sum.nearest_int;
                Ok((!ok).then(|| {
                    let mut e = echo(r, *g, *k, lam);
                    e["residue"] = json!(rat_str(&res));
                    e["sum"] = json!(sum.nearest_int.to_string());
                    e
                }))
            })
            .collect();
        out.extend(cases);
    }
    report(Suite::Sum, out, 0)
}

fn basis_suite(p: &SuiteParams) -> SuiteReport {
    let mut out = Vec::new();
    for &r in &p.ranks {
        let sets = match BasisChoice::All.build(r) {
            Ok(s) => s,
            Err(e) => return report(Suite::Basis, vec![Err(e)], 0),
        };
        let cases: Vec<Case> = grid(p, r)
            .par_iter()
            .map(|(g, k, lam)| {
                let inp = VerlindeInput::new(*g, *k, lam.clone())?;
                let c = ChamberSpec::new(resolve_chamber(*k, lam, ChamberTarget::Hat)?)?;
                let vals: Vec<Rational> = sets.iter().map(|(_, d)| p_c(&inp, &c, d)).collect::<Result<_, _>>()?;
                Ok((!vals.iter().all_equal()).then(|| {
                    let mut e = echo(r, *g, *k, lam);
                    e["values"] = json!(sets
                        .iter()
                        .zip(&vals)
                        .map(|((name, _), v)| json!({ "basis": name, "value": rat_str(v) }))
                        .collect::<Vec<_>>());
                    e
                }))
            })
            .collect();
        out.extend(cases);
    }
    report(Suite::Basis, out, 0)
}

/// Where the segment from `λ/k` to `λ̂/k̂` meets the wall.
pub fn segment_anchor(k: u64, lam: &IntegralWeight, wall: &Wall) -> WeightVector {
    let (a, b) = (lam_over_k(k, lam), hat_point(k, lam));
    let prime = wall.partition.prime();
    let (sa, sb) = (a.subset_sum(prime), b.subset_sum(prime));
    if sa == sb {
        return a;
    }
    let t = (Rational::from_integer(wall.level.into()) - &sa) / (&sb - &sa);
    a.add(&b.sub(&a).scale(&t))
}

fn chamber_suite(p: &SuiteParams) -> SuiteReport {
    let mut out = Vec::new();
    let mut skipped = 0;
    for &r in &p.ranks {
        let d = hamiltonian_basis(1, r).expect("r >= 2");
        let mut tasks = Vec::new();
        for (g, k, lam) in grid(p, r) {
            for wall in wall_set(k, &lam).unwrap_or_default() {
                match straddle_wall(&wall, Some(&segment_anchor(k, &lam, &wall)), true, 0) {
                    Some(pair) => tasks.push((g, k, lam.clone(), wall, pair)),
                    None => skipped += 1,
                }
            }
        }
        let cases: Vec<Case> = tasks
            .par_iter()
            .map(|(g, k, lam, wall, (cp, cm))| {
                let inp = VerlindeInput::new(*g, *k, lam.clone())?;
                let a = p_c(&inp, &ChamberSpec::new(cp.clone())?, &d)?;
                let b = p_c(&inp, &ChamberSpec::new(cm.clone())?, &d)?;
                Ok((a != b).then(|| {
                    let mut e = echo(r, *g, *k, lam);
                    e["wall"] = json!(wall.to_string());
                    e["plus"] = json!(rat_str(&a));
                    e["minus"] = json!(rat_str(&b));
                    e
                }))
            })
            .collect();
        out.extend(cases);
    }
    report(Suite::Chamber, out, skipped)
}

/// Points on both sides of `wall`, inside `Δ` when possible.
pub fn wall_pair(wall: &Wall) -> Option<(ChamberSpec, ChamberSpec)> {
    let (cp, cm) = straddle_wall(wall, None, true, 0).or_else(|| straddle_wall(wall, None, false, 0))?;
    Some((ChamberSpec::anywhere(cp).ok()?, ChamberSpec::anywhere(cm).ok()?))
}

fn wallcross_suite(p: &SuiteParams) -> SuiteReport {
    let mut out = Vec::new();
    let mut skipped = 0;
    for &r in &p.ranks {
        let d = hamiltonian_basis(1, r).expect("r >= 2");
        let mut walls = Vec::new();
        for part in Partition::all(r) {
            for level in -1..=1 {
                let wall = Wall { partition: part.clone(), level };
                match wall_pair(&wall) {
                    Some(pair) => walls.push((wall, pair)),
                    None => skipped += 1,
                }
            }
        }
        let tasks: Vec<_> = grid(p, r).into_iter().cartesian_product(walls.iter()).collect();
        let cases: Vec<Case> = tasks
            .par_iter()
            .map(|((g, k, lam), (wall, (cp, cm)))| {
                let inp = VerlindeInput::new(*g, *k, lam.clone())?;
                let (_, dp, dpp) = wall_nbc_data(&wall.partition)?;
                let full = wallcross_full(&inp, cp, cm, &d)?;
                let reduced = wallcross_reduced(&inp, wall, cp, &dp, &dpp)?;
                Ok((full != reduced).then(|| {
                    let mut e = echo(r, *g, *k, lam);
                    e["wall"] = json!(wall.to_string());
                    e["full"] = json!(rat_str(&full));
                    e["reduced"] = json!(rat_str(&reduced));
                    e
                }))
            })
            .collect();
        out.extend(cases);
    }
    report(Suite::Wallcross, out, skipped)
}

/// Integral weights `(a_1, ..., a_{r-1}, -Σa)` with `|a_i| <= half`.
pub fn weight_box(r: usize, half: i64) -> Vec<IntegralWeight> {
    (0..r - 1)
        .map(|_| -half..=half)
        .multi_cartesian_product()
        .map(|mut a| {
            let s: i64 = a.iter().sum();
            a.push(-s);
            IntegralWeight::new(a).expect("sums to zero")
        })
        .collect()
}

/// Degree bound `(r² - 1)(g - 1) + r(r - 1)/2` of the chamber polynomials.
pub fn degree_bound(r: usize, g: u32) -> i64 {
    ((r * r - 1) * (g as usize - 1) + r * (r - 1) / 2) as i64
}

fn symmetry_suite(p: &SuiteParams) -> SuiteReport {
    let mut out = Vec::new();
    for &r in &p.ranks {
        let d = hamiltonian_basis(1, r).expect("r >= 2");
        for &g in &p.genera {
            // side bound + 2 per coordinate
            let half = (degree_bound(r, g) + 2) / 2;
            let lams = weight_box(r, half);
            for &k in &p.levels {
                for side in [Side::Plus, Side::Minus] {
                    let gens = stabilizer_generators(r, k, side);
                    let pairs: Vec<_> = lams.iter().cartesian_product(gens.iter()).collect();
                    let cases: Vec<Case> = pairs
                        .into_par_iter()
                        .map(|(lam, gen)| {
                            let a = p_pm1(&VerlindeInput::new(g, k, lam.clone())?, side, &d)?;
                            let moved = affine_act(gen, k, lam);
                            let b = p_pm1(&VerlindeInput::new(g, k, moved.clone())?, side, &d)?;
                            Ok((a != -b.clone()).then(|| {
                                let mut e = echo(r, g, k, lam);
                                e["side"] = json!(format!("{side:?}"));
                                e["moved"] = json!(moved.entries());
                                e["p"] = json!(rat_str(&a));
                                e["p_moved"] = json!(rat_str(&b));
                                e
                            }))
                        })
                        .collect();
                    out.extend(cases);
                }
            }
        }
    }
    report(Suite::Symmetry, out, 0)
}

fn twopoint_suite(p: &SuiteParams) -> SuiteReport {
    let mut tasks = Vec::new();
    for &g in &p.genera {
        for &k in &p.levels {
            let b = k as i64 + 2;
            for lam in -b..=b {
                for mu in -b..=b {
                    tasks.push((g, k, lam, mu));
                }
            }
        }
    }
    let mut cases: Vec<Case> = tasks
        .par_iter()
        .map(|&(g, k, lam, mu)| {
            let kk = k as i64;
            let gt = |l, m| h_tilde(k, l, m, g, TwoPointSide::Gt);
            let lt = |l, m| h_tilde(k, l, m, g, TwoPointSide::Lt);
            let (a, b) = (gt(lam, mu)?, lt(lam, mu)?);
            let checks = [
                ("gt_mu", a == -gt(lam, -mu - 1)?),
                ("gt_lambda", a == -gt(-lam + kk + 1, mu)?),
                ("lt_lambda", b == -lt(-lam - 1, mu)?),
                ("lt_mu", b == -lt(lam, -mu + kk + 1)?),
                ("difference", &a - &b == two_point_difference(k, lam, mu, g)?),
            ];
            let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
            Ok((!failed.is_empty()).then(|| json!({ "g": g, "k": k, "lambda": lam, "mu": mu, "failed": failed })))
        })
        .collect();
    // μ = 0 against the rank-2 Verlinde numbers
    for &g in &p.genera {
        for &k in &p.levels {
            for lam in admissible_weights(2, k) {
                let l = lam.entries()[0];
                let case = (|| -> Case {
                    let h = h_tilde(k, l, 0, g, TwoPointSide::Gt)?;
                    let v = ver_residue(&VerlindeInput::new(g, k, lam.clone())?)?;
                    Ok((h != v).then(|| json!({ "g": g, "k": k, "lambda": l, "h_gt": rat_str(&h), "ver": rat_str(&v) })))
                })();
                cases.push(case);
            }
        }
    }
    report(Suite::Twopoint, cases, 0)
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn counts_suite(p: &SuiteParams) -> SuiteReport {
    let mut cases = Vec::new();
    for &r in p.ranks.iter().filter(|&&r| r <= 5) {
        let mut sets = Vec::new();
        for m in 1..=r {
            sets.push((format!("hamiltonian:{m}"), hamiltonian_basis(m, r).map_err(anyhow::Error::from)));
        }
        sets.push(("nbc:lex".into(), nbc_basis(&RootOrdering::lexicographic(r), r).map_err(Into::into)));
        for (name, set) in sets {
            cases.push(set.map(|d| {
                let ok = d.len() == factorial(r - 1) && d.is_diagonal();
                (!ok).then(|| json!({ "r": r, "set": name, "size": d.len() }))
            }));
        }
        for part in Partition::all(r) {
            let case = (|| -> Case {
                let ord = RootOrdering::link_first(&part);
                let d = nbc_basis(&ord, r)?;
                let restricted = restrict_to_wall(&d, &part);
                let (link, dp, dpp) = wall_nbc_data(&part)?;
                let mut composed = compose_wall_basis(link, &dp, &dpp)?;
                let mut got: Vec<_> = restricted.into_iter().map(|(b, _)| b).collect();
                composed.sort();
                got.sort();
                let (a, b) = (part.prime().len(), part.double_prime().len());
                let expected = factorial(a - 1) * factorial(b - 1);
                let ok = got.len() == expected && got == composed;
                Ok((!ok).then(|| json!({ "r": r, "partition": part.to_string(), "size": got.len(), "expected": expected })))
            })();
            cases.push(case);
        }
    }
    report(Suite::Counts, cases, 0)
}

fn trunc_suite(p: &SuiteParams) -> SuiteReport {
    let mut out = Vec::new();
    for &r in &p.ranks {
        let d = hamiltonian_basis(1, r).expect("r >= 2");
        let cases: Vec<Case> = grid(p, r)
            .par_iter()
            .map(|(g, k, lam)| {
                let inp = VerlindeInput::new(*g, *k, lam.clone())?;
                let c = ChamberSpec::new(resolve_chamber(*k, lam, ChamberTarget::Hat)?)?;
                let a = p_c_trunc(&inp, &c, &d, DEFAULT_TRUNC)?;
                let b = p_c_trunc(&inp, &c, &d, DEFAULT_TRUNC + 2)?;
                Ok((a != b).then(|| {
                    let mut e = echo(r, *g, *k, lam);
                    e["trunc"] = json!(rat_str(&a));
                    e["trunc_plus_2"] = json!(rat_str(&b));
                    e
                }))
            })
            .collect();
        out.extend(cases);
    }
    report(Suite::Trunc, out, 0)
}
