//! De Jongh formulas of universal points.
//!
//! For a point `w` with true variables `T_w`, border variables `B_w` and
//! immediate successors `I_w`:
//!
//! ```text
//! θ_w = ⋁_{w' ∈ I_w} φ_{w'}
//! φ_w = ⋀_{p ∈ T_w} p ∧ ⋀_{q ∈ B_w} (q → θ_w) ∧ ⋀_{w' ∈ I_w} (ψ_{w'} → θ_w)
//! ψ_w = φ_w → θ_w
//! ```
//!
//! In any generated submodel of `U(n)` containing `w`, `φ_w` defines `↑w`,
//! `θ_w` defines `↑w ∖ {w}` and `ψ_w` defines the complement of `↓w`.

use std::collections::HashMap;

use crate::formula::Formula;
use crate::kripke::UpSet;
use crate::universal::{PointId, UniversalSubmodel, UniverseStore};

#[derive(Clone, Debug, PartialEq)]
pub struct DeJonghTriple {
    pub point: PointId,
    pub theta: Formula,
    pub phi: Formula,
    pub psi: Formula,
    /// `T_w`, 1-based variable indices.
    pub true_vars: Vec<usize>,
    /// `B_w`, 1-based variable indices.
    pub border_vars: Vec<usize>,
    /// `I_w`, ascending store ids.
    pub successors: Vec<PointId>,
}

/// Memoizing builder; formulas of shared successors are shared subterms.
pub struct DeJonghBuilder<'s> {
    store: &'s UniverseStore,
    memo: HashMap<PointId, DeJonghTriple>,
}

impl<'s> DeJonghBuilder<'s> {
    pub fn new(store: &'s UniverseStore) -> DeJonghBuilder<'s> {
        DeJonghBuilder { store, memo: HashMap::new() }
    }

    pub fn triple(&mut self, w: PointId) -> &DeJonghTriple {
        if !self.memo.contains_key(&w) {
            let mut pending: Vec<PointId> =
                self.store.up_set(w).iter().copied().filter(|id| !self.memo.contains_key(id)).collect();
            pending.sort_by_key(|&id| self.store.depth(id));
            for id in pending {
                let triple = self.build(id);
                self.memo.insert(id, triple);
            }
        }
        &self.memo[&w]
    }

    fn build(&self, w: PointId) -> DeJonghTriple {
        let store = self.store;
        let colour = store.colour(w);
        let true_vars: Vec<usize> = (1..=store.num_vars()).filter(|&v| colour.holds(v)).collect();
        let border_vars = store.border_vars(w);
        let successors = store.successors(w).to_vec();
        let theta = Formula::disj(successors.iter().map(|s| self.memo[s].phi.clone()));
        let var = |v: usize| Formula::var(u32::try_from(v).expect("variable index fits in u32"));
        let conjuncts = true_vars
            .iter()
            .map(|&p| var(p))
            .chain(border_vars.iter().map(|&q| Formula::imp(var(q), theta.clone())))
            .chain(successors.iter().map(|s| Formula::imp(self.memo[s].psi.clone(), theta.clone())));
        let phi = Formula::conj(conjuncts);
        let psi = Formula::imp(phi.clone(), theta.clone());
        DeJonghTriple { point: w, theta, phi, psi, true_vars, border_vars, successors }
    }
}

pub fn dejongh_formulas(store: &UniverseStore, w: PointId) -> DeJonghTriple {
    DeJonghBuilder::new(store).triple(w).clone()
}

/// `⋁ φ_u` over the minimal points `u` of an up-set of a store submodel.
pub fn upset_defining_disjunction(store: &UniverseStore, sub: &UniversalSubmodel, u: &UpSet) -> Formula {
    let mut minimal: Vec<PointId> = sub.model.poset().minimal_in(u.bits()).into_iter().map(|x| sub.ids[x]).collect();
    minimal.sort_unstable();
    let mut builder = DeJonghBuilder::new(store);
    Formula::disj(minimal.into_iter().map(|w| builder.triple(w).phi.clone()))
}
