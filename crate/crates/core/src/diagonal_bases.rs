//! Ordered spanning trees of the complete graph as bases of `V*`: flags as
//! nested partition sequences, the `⊣` relation, Hamiltonian and
//! no-broken-circuit diagonal bases, and their behaviour along a wall.

use itertools::Itertools;
use thiserror::Error;

use crate::weight_space::{is_forest, OrderedBasis, Partition, Permutation, Root, UnionFind, WeightError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BasisError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("bad root ordering: {0}")]
    Ordering(String),
    #[error("link {0} does not connect the two vertex sets")]
    Link(Root),
    #[error("index {m} out of range for rank {r}")]
    Index { m: usize, r: usize },
}

/// The flag of an ordered basis as a sequence of set partitions of its
/// vertices; level `j` is spanned by the last `j` edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionSequence {
    /// For each level, the smallest vertex in the block of each vertex.
    pub levels: Vec<Vec<usize>>,
}

impl PartitionSequence {
    /// Blocks of level `j`, each sorted, in order of their smallest element.
    pub fn blocks(&self, vertices: &[usize], j: usize) -> Vec<Vec<usize>> {
        let labels = &self.levels[j];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for rep in labels.iter().copied().unique() {
            out.push(vertices.iter().zip(labels).filter(|(_, &l)| l == rep).map(|(&v, _)| v).collect());
        }
        out
    }
}

/// Orientation of the roots is ignored.
pub fn partition_sequence(b: &OrderedBasis) -> PartitionSequence {
    sequence_of(b.vertices(), b.roots())
}

fn sequence_of(vertices: &[usize], roots: &[Root]) -> PartitionSequence {
    let top = vertices.iter().copied().max().unwrap_or(0);
    let mut uf = UnionFind::new(top + 1);
    let mut levels = Vec::with_capacity(roots.len() + 1);
    let snapshot = |uf: &mut UnionFind| vertices.iter().map(|&v| uf.find(v)).collect::<Vec<_>>();
    levels.push(snapshot(&mut uf));
    for b in roots.iter().rev() {
        uf.union(b.i, b.j);
        levels.push(snapshot(&mut uf));
    }
    PartitionSequence { levels }
}

/// `B ⊣ C`: no reordering of `B` has the flag of `C`.
pub fn dashv(b: &OrderedBasis, c: &OrderedBasis) -> bool {
    if b.vertices() != c.vertices() || b.len() != c.len() {
        return true;
    }
    let target = partition_sequence(c);
    let roots = b.roots();
    !(0..roots.len()).permutations(roots.len()).any(|tau| {
        let reordered: Vec<Root> = tau.iter().map(|&t| roots[t]).collect();
        sequence_of(b.vertices(), &reordered) == target
    })
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// `(r-1)!` elements, pairwise related by `⊣`.
pub fn is_diagonal(d: &[OrderedBasis]) -> bool {
    let Some(first) = d.first() else { return false };
    if d.len() != factorial(first.rank() - 1) {
        return false;
    }
    d.iter().tuple_combinations().all(|(b, c)| dashv(b, c))
}

/// A set of ordered bases meant to be diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagonalBasisSet {
    bases: Vec<OrderedBasis>,
}

impl DiagonalBasisSet {
    pub fn new(bases: Vec<OrderedBasis>) -> Self {
        Self { bases }
    }

    pub fn bases(&self) -> &[OrderedBasis] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        is_diagonal(&self.bases)
    }

    /// Sorted copy, for comparing sets.
    pub fn sorted(&self) -> Vec<OrderedBasis> {
        let mut v = self.bases.clone();
        v.sort();
        v
    }
}

/// `H_m = {σ(B) : σ(1) = m}`, `σ(B) = (α^{σ(r-1)σ(r)}, ..., α^{σ(1)σ(2)})`.
pub fn hamiltonian_basis(m: usize, r: usize) -> Result<DiagonalBasisSet, BasisError> {
    if m == 0 || m > r || r < 2 {
        return Err(BasisError::Index { m, r });
    }
    let rest: Vec<usize> = (1..=r).filter(|&i| i != m).collect();
    let mut bases = Vec::new();
    for tail in rest.iter().copied().permutations(r - 1) {
        let path: Vec<usize> = std::iter::once(m).chain(tail).collect();
        let roots = (0..r - 1).rev().map(|i| Root::new(path[i], path[i + 1])).collect();
        bases.push(OrderedBasis::new(r, roots)?);
    }
    Ok(DiagonalBasisSet::new(bases))
}

/// A total order on the edges `{i, j}`, `i < j`, of the complete graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootOrdering {
    order: Vec<(usize, usize)>,
}

impl RootOrdering {
    pub fn new(r: usize, order: Vec<(usize, usize)>) -> Result<Self, BasisError> {
        let mut seen: Vec<(usize, usize)> = order.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
        let normalized = seen.clone();
        seen.sort_unstable();
        let all: Vec<(usize, usize)> = (1..=r).tuple_combinations().collect();
        if seen != all {
            return Err(BasisError::Ordering(format!("{order:?} is not an ordering of the edges of K_{r}")));
        }
        Ok(Self { order: normalized })
    }

    /// Parses `"13,14,23"` (single digit indices) or `"1-3,1-4,2-3"`.
    pub fn parse(r: usize, s: &str) -> Result<Self, BasisError> {
        let bad = || BasisError::Ordering(format!("cannot parse {s:?}"));
        let mut order = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (a, b) = match tok.split_once('-') {
                Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
                None if tok.len() == 2 => {
                    let d: Vec<usize> =
                        tok.chars().map(|c| c.to_digit(10).map(|x| x as usize)).collect::<Option<_>>().ok_or_else(bad)?;
                    (d[0], d[1])
                }
                None => return Err(bad()),
            };
            order.push((a, b));
        }
        Self::new(r, order)
    }

    pub fn lexicographic(r: usize) -> Self {
        Self { order: (1..=r).tuple_combinations().collect() }
    }

    /// Link `{max Π', r}` first, then the other crossing edges, the edges
    /// inside `Π'`, and the edges inside `Π''`, each group lexicographic.
    pub fn link_first(p: &Partition) -> Self {
        let r = p.r();
        let m = *p.prime().iter().max().expect("nonempty");
        let link = (m, r);
        let all: Vec<(usize, usize)> = (1..=r).tuple_combinations().collect();
        let crossing = |&(i, j): &(usize, usize)| p.prime().contains(&i) != p.prime().contains(&j);
        let mut order = vec![link];
        order.extend(all.iter().copied().filter(|e| crossing(e) && *e != link));
        order.extend(all.iter().copied().filter(|&(i, j)| p.prime().contains(&i) && p.prime().contains(&j)));
        order.extend(all.iter().copied().filter(|&(i, j)| !p.prime().contains(&i) && !p.prime().contains(&j)));
        Self { order }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.order
    }

    /// The induced order on edges inside `vertices`.
    pub fn restricted(&self, vertices: &[usize]) -> Vec<(usize, usize)> {
        self.order.iter().copied().filter(|(i, j)| vertices.contains(i) && vertices.contains(j)).collect()
    }
}

/// Ascending bases `β_1 <υ ... <υ β_n` such that every edge `α <υ β_m`
/// together with `β_m, ..., β_n` is a forest.
pub fn nbc_on(ord: &RootOrdering, vertices: &[usize]) -> Result<Vec<OrderedBasis>, BasisError> {
    let edges = ord.restricted(vertices);
    let n = vertices.len() - 1;
    let top = vertices.iter().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    for combo in (0..edges.len()).combinations(n) {
        let roots: Vec<Root> = combo.iter().map(|&e| Root::new(edges[e].0, edges[e].1)).collect();
        if !is_forest(&roots, top) {
            continue;
        }
        let ok = (0..n).all(|m| {
            let suffix = &roots[m..];
            (0..combo[m]).all(|a| {
                let mut trial = suffix.to_vec();
                trial.push(Root::new(edges[a].0, edges[a].1));
                is_forest(&trial, top)
            })
        });
        if ok {
            out.push(OrderedBasis::on_vertices(vertices.to_vec(), roots)?);
        }
    }
    Ok(out)
}

pub fn nbc_basis(ord: &RootOrdering, r: usize) -> Result<DiagonalBasisSet, BasisError> {
    Ok(DiagonalBasisSet::new(nbc_on(ord, &(1..=r).collect::<Vec<_>>())?))
}

/// Members whose tree is a tree on `Π'`, a tree on `Π''` and one link edge.
pub fn restrict_to_wall(d: &DiagonalBasisSet, p: &Partition) -> Vec<(OrderedBasis, Root)> {
    d.bases()
        .iter()
        .filter_map(|b| {
            let crossing: Vec<Root> = b.roots().iter().copied().filter(|x| x.crosses(p.prime())).collect();
            match crossing.as_slice() {
                [link] => Some((b.clone(), *link)),
                _ => None,
            }
        })
        .collect()
}

/// `(link, B', B'')` for all pairs.
pub fn compose_wall_basis(
    link: Root,
    dp: &[OrderedBasis],
    dpp: &[OrderedBasis],
) -> Result<Vec<OrderedBasis>, BasisError> {
    let mut out = Vec::new();
    for bp in dp {
        for bpp in dpp {
            let a = bp.vertices();
            if !(a.contains(&link.i) ^ a.contains(&link.j)) || bpp.vertices().iter().any(|v| a.contains(v)) {
                return Err(BasisError::Link(link));
            }
            let mut vertices: Vec<usize> = a.iter().chain(bpp.vertices()).copied().collect();
            vertices.sort_unstable();
            let roots = std::iter::once(link).chain(bp.roots().iter().copied()).chain(bpp.roots().iter().copied()).collect();
            out.push(OrderedBasis::on_vertices(vertices, roots)?);
        }
    }
    Ok(out)
}

/// The link-first nbc data of a wall: `β_link = α^{max Π', r}`, `D'[υ]`, `D''[υ]`.
pub fn wall_nbc_data(p: &Partition) -> Result<(Root, Vec<OrderedBasis>, Vec<OrderedBasis>), BasisError> {
    let ord = RootOrdering::link_first(p);
    let m = *p.prime().iter().max().expect("nonempty");
    Ok((Root::new(m, p.r()), nbc_on(&ord, p.prime())?, nbc_on(&ord, p.double_prime())?))
}

pub fn permute_basis_set(sigma: &Permutation, d: &DiagonalBasisSet) -> Result<DiagonalBasisSet, BasisError> {
    let mut out = Vec::with_capacity(d.len());
    for b in d.bases() {
        let roots = b.roots().iter().map(|&x| sigma.act_root(x)).collect();
        let vertices = b.vertices().iter().map(|&v| sigma.apply(v)).collect();
        out.push(OrderedBasis::on_vertices(vertices, roots)?);
    }
    Ok(DiagonalBasisSet::new(out))
}
