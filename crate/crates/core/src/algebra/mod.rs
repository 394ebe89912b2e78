//! The free implicative meet-semilattice `F∧,→(n)` as the up-set algebra of
//! `U(n)∧,→`, the s-translation, formula extraction, the restriction
//! adjoints of a model, and finite Birkhoff duality.

mod adjoints;
mod extract;
mod lattice;

pub use adjoints::{restriction_adjoints, AdjointBundle};
pub use extract::{
    closure_search, formula_for_element, formula_for_upset, ExtractionError, FormulaClosure, SearchBudget,
};
pub use lattice::{count_upsets, dual_poset_of_lattice, eta, eta_check, FiniteLattice, LatticeDual, LatticeError};

use std::collections::HashSet;

use num_bigint::BigUint;

use crate::formula::Formula;
use crate::kripke::{ColouredModel, KripkeError, UpSet};
use crate::universal::{build_meet_impl_universal, TruncatedUniversalModel, UniversalError, UniverseStore};

/// `F∧,→(n)`: elements are the up-sets of the carrier `U(n)∧,→`.
#[derive(Clone, Debug)]
pub struct FreeMeetImpAlgebra {
    store: UniverseStore,
    carrier: TruncatedUniversalModel,
    generators: Vec<UpSet>,
}

pub fn free_meet_impl_algebra(n: usize, budget: usize) -> Result<FreeMeetImpAlgebra, UniversalError> {
    let mut store = UniverseStore::new(n)?;
    let carrier = build_meet_impl_universal(&mut store, budget)?;
    let generators = (1..=n).map(|i| carrier.model().var_upset(i)).collect();
    Ok(FreeMeetImpAlgebra { store, carrier, generators })
}

impl FreeMeetImpAlgebra {
    pub fn num_vars(&self) -> usize {
        self.store.num_vars()
    }

    pub fn carrier(&self) -> &ColouredModel {
        self.carrier.model()
    }

    pub fn universal(&self) -> &TruncatedUniversalModel {
        &self.carrier
    }

    pub fn store(&self) -> &UniverseStore {
        &self.store
    }

    /// `g_i`, the up-set where `p_i` holds; `i` is 1-based.
    pub fn generator(&self, i: usize) -> &UpSet {
        &self.generators[i - 1]
    }

    pub fn generators(&self) -> &[UpSet] {
        &self.generators
    }

    pub fn top(&self) -> UpSet {
        self.carrier().poset().full_upset()
    }

    /// The least element, the value of `p1 ∧ ⋯ ∧ pn`.
    pub fn bottom(&self) -> UpSet {
        self.carrier().poset().empty_upset()
    }

    pub fn meet(&self, a: &UpSet, b: &UpSet) -> UpSet {
        a.intersection(b)
    }

    pub fn imp(&self, a: &UpSet, b: &UpSet) -> UpSet {
        self.carrier().poset().implication(a, b)
    }

    /// The join `⊻`, the least upper bound in the semilattice order.
    pub fn join(&self, a: &UpSet, b: &UpSet) -> UpSet {
        a.union(b)
    }

    pub fn element_count(&self) -> BigUint {
        count_upsets(self.carrier().poset())
    }

    /// All elements, for carriers small enough to enumerate.
    pub fn elements(&self) -> Vec<UpSet> {
        self.carrier().poset().all_upsets()
    }
}

/// The elements reachable from `⊤, g_1, …, g_n` under meet and implication,
/// computed as a semantic fixpoint without building formulas.
pub fn generated_elements(alg: &FreeMeetImpAlgebra) -> Vec<UpSet> {
    let mut seen: HashSet<UpSet> = HashSet::new();
    let mut all = Vec::new();
    for u in std::iter::once(alg.top()).chain(alg.generators().iter().cloned()) {
        if seen.insert(u.clone()) {
            all.push(u);
        }
    }
    let mut done = 0;
    while done < all.len() {
        let frontier = all.len();
        for i in 0..frontier {
            let start = if i < done { done } else { 0 };
            for j in start..frontier {
                let (a, b) = (all[i].clone(), all[j].clone());
                for v in [alg.meet(&a, &b), alg.imp(&a, &b), alg.imp(&b, &a)] {
                    if seen.insert(v.clone()) {
                        all.push(v);
                    }
                }
            }
        }
        done = frontier;
    }
    all
}

/// The s-translation: the Heyting homomorphism sending `p_i` to `g_i`,
/// `∨` to `⊻` and `⊥` to the bottom element.
pub fn s_translate(f: &Formula, alg: &FreeMeetImpAlgebra) -> Result<UpSet, KripkeError> {
    alg.carrier().evaluate(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::kripke::Colour;
    use crate::universal::DEFAULT_POINT_BUDGET;

    fn alg(n: usize) -> FreeMeetImpAlgebra {
        free_meet_impl_algebra(n, DEFAULT_POINT_BUDGET).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(alg(1).element_count(), BigUint::from(2u32));
        let a2 = alg(2);
        assert_eq!(a2.carrier().len(), 5);
        assert_eq!(a2.element_count(), BigUint::from(18u32));
        assert_eq!(a2.elements().len(), 18);
        assert_eq!(generated_elements(&a2).len(), 18);
    }

    #[test]
    fn bottom_is_conjunction_of_generators() {
        let a2 = alg(2);
        assert_eq!(a2.bottom(), a2.carrier().evaluate(&parse("p1 & p2").unwrap()).unwrap());
        assert_eq!(s_translate(&parse("F").unwrap(), &a2).unwrap(), a2.bottom());
    }

    #[test]
    fn translations() {
        let a2 = alg(2);
        let join = s_translate(&parse("p1 | p2").unwrap(), &a2).unwrap();
        let colours: Vec<Colour> = join.points().map(|x| a2.carrier().colour(x)).collect();
        assert_eq!(colours.len(), 2);
        assert!(join.points().all(|x| a2.carrier().poset().is_maximal(x)));
        assert!(colours.contains(&Colour(0b01)) && colours.contains(&Colour(0b10)));

        let a1 = alg(1);
        let nnp = s_translate(&parse("~~p1").unwrap(), &a1).unwrap();
        assert_eq!(nnp, *a1.generator(1));
        assert!(nnp.is_empty());
    }
}
