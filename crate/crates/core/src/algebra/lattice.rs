//! Finite lattices, finite Birkhoff duality and exact up-set counting.
//!
//! A finite distributive lattice `D` is recovered from its join-irreducible
//! elements `J(D)`: each join-irreducible `j` corresponds to the prime filter
//! `↑j`, and ordering the prime filters by inclusion orders `J(D)` by the
//! reverse of the lattice order. With that order, `η(d) = {j ∈ J(D) | j ≤ d}`
//! is an up-set and `η : D → U(J(D))` is an isomorphism.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use thiserror::Error;

use crate::kripke::{Poset, UpSet};

fn one() -> BigUint {
    BigUint::from(1u32)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("elements {0} and {1} have no {2}")]
    NotALattice(usize, usize, &'static str),
    #[error("the lattice is empty")]
    Empty,
    #[error("lattice is not distributive at ({0}, {1}, {2})")]
    NotDistributive(usize, usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    order: Poset,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
}

impl FiniteLattice {
    pub fn from_order<F>(len: usize, leq: F) -> Result<FiniteLattice, LatticeError>
    where
        F: Fn(usize, usize) -> bool,
    {
        if len == 0 {
            return Err(LatticeError::Empty);
        }
        let order = Poset::from_relation(len, leq).map_err(|e| LatticeError::NotAPartialOrder(e.to_string()))?;
        let bound = |a: usize, b: usize, upper: bool| -> Option<usize> {
            let bounds: Vec<usize> = (0..len)
                .filter(
                    |&c| if upper { order.leq(a, c) && order.leq(b, c) } else { order.leq(c, a) && order.leq(c, b) },
                )
                .collect();
            bounds
                .iter()
                .copied()
                .find(|&c| bounds.iter().all(|&d| if upper { order.leq(c, d) } else { order.leq(d, c) }))
        };
        let mut meet = vec![vec![0; len]; len];
        let mut join = vec![vec![0; len]; len];
        for a in 0..len {
            for b in a..len {
                let m = bound(a, b, false).ok_or(LatticeError::NotALattice(a, b, "meet"))?;
                let j = bound(a, b, true).ok_or(LatticeError::NotALattice(a, b, "join"))?;
                meet[a][b] = m;
                meet[b][a] = m;
                join[a][b] = j;
                join[b][a] = j;
            }
        }
        let bottom = (1..len).fold(0, |acc, x| meet[acc][x]);
        let top = (1..len).fold(0, |acc, x| join[acc][x]);
        Ok(FiniteLattice { order, meet, join, bottom, top })
    }

    /// The lattice of up-sets of a poset under inclusion, with the up-sets
    /// in element order.
    pub fn of_upsets(p: &Poset) -> (FiniteLattice, Vec<UpSet>) {
        let upsets = p.all_upsets();
        let lattice = FiniteLattice::from_order(upsets.len(), |a, b| upsets[a].is_subset(&upsets[b]))
            .expect("up-sets form a lattice");
        (lattice, upsets)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.order.leq(a, b)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn order(&self) -> &Poset {
        &self.order
    }

    pub fn check_distributive(&self) -> Result<(), LatticeError> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c)) {
                        return Err(LatticeError::NotDistributive(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_distributive(&self) -> bool {
        self.check_distributive().is_ok()
    }

    /// Elements other than the bottom with exactly one lower cover.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| x != self.bottom && self.order.lower_covers(x).len() == 1).collect()
    }
}

/// The dual poset of a finite distributive lattice.
#[derive(Clone, Debug)]
pub struct LatticeDual {
    /// Join-irreducibles ordered by `i ≤ j` iff `elements[j] ≤ elements[i]`
    /// in the lattice.
    pub poset: Poset,
    /// Lattice index of each point.
    pub elements: Vec<usize>,
}

pub fn dual_poset_of_lattice(l: &FiniteLattice) -> Result<LatticeDual, LatticeError> {
    l.check_distributive()?;
    let elements = l.join_irreducibles();
    let poset = Poset::from_relation(elements.len(), |i, j| l.leq(elements[j], elements[i]))
        .expect("reverse of a partial order");
    Ok(LatticeDual { poset, elements })
}

/// `η(d)`, the join-irreducibles below `d`, as an up-set of the dual.
pub fn eta(l: &FiniteLattice, dual: &LatticeDual, d: usize) -> UpSet {
    dual.poset
        .upset_from_points((0..dual.elements.len()).filter(|&i| l.leq(dual.elements[i], d)))
        .expect("η(d) is an up-set of the dual")
}

/// Checks that `η` is an order isomorphism from `l` onto the up-sets of its
/// dual poset.
pub fn eta_check(l: &FiniteLattice) -> Result<bool, LatticeError> {
    let dual = dual_poset_of_lattice(l)?;
    let images: Vec<UpSet> = (0..l.len()).map(|d| eta(l, &dual, d)).collect();
    if count_upsets(&dual.poset) != BigUint::from(l.len()) {
        return Ok(false);
    }
    for a in 0..l.len() {
        for b in 0..l.len() {
            if l.leq(a, b) != images[a].is_subset(&images[b]) {
                return Ok(false);
            }
        }
    }
    // order-embedding plus matching cardinality gives a bijection
    Ok(true)
}

/// Exact number of up-sets of `p`. Counts split over connected components;
/// within a component, for a maximal point `m`, up-sets avoiding `m` are the
/// up-sets of `P ∖ ↓m` and those containing it correspond to up-sets of
/// `P ∖ {m}`.
pub fn count_upsets(p: &Poset) -> BigUint {
    let mut all = FixedBitSet::with_capacity(p.len());
    all.insert_range(..);
    let mut memo = HashMap::new();
    count_in(p, &all, &mut memo)
}

fn count_in(p: &Poset, set: &FixedBitSet, memo: &mut HashMap<FixedBitSet, BigUint>) -> BigUint {
    if set.is_clear() {
        return one();
    }
    if let Some(c) = memo.get(set) {
        return c.clone();
    }
    let components = components(p, set);
    let result = if components.len() > 1 {
        components.iter().fold(one(), |acc, c| acc * count_in(p, c, memo))
    } else {
        let m = set
            .ones()
            .filter(|&x| p.up_row(x).intersection(set).count() == 1)
            .max_by_key(|&x| p.down_row(x).intersection(set).count())
            .expect("a finite nonempty set has a maximal point");
        let mut without_down = set.clone();
        without_down.difference_with(p.down_row(m));
        let mut without_m = set.clone();
        without_m.set(m, false);
        count_in(p, &without_down, memo) + count_in(p, &without_m, memo)
    };
    memo.insert(set.clone(), result.clone());
    result
}

fn components(p: &Poset, set: &FixedBitSet) -> Vec<FixedBitSet> {
    let mut remaining = set.clone();
    let mut out = Vec::new();
    while let Some(start) = remaining.ones().next() {
        let mut comp = FixedBitSet::with_capacity(p.len());
        let mut stack = vec![start];
        comp.insert(start);
        while let Some(x) = stack.pop() {
            let mut neighbours = p.up_row(x).clone();
            neighbours.union_with(p.down_row(x));
            neighbours.intersect_with(set);
            for y in neighbours.ones() {
                if !comp.contains(y) {
                    comp.insert(y);
                    stack.push(y);
                }
            }
        }
        remaining.difference_with(&comp);
        out.push(comp);
    }
    out
}
