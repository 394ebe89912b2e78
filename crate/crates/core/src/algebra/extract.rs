//! Finding `(∧,→)`-formulas for up-sets by breadth-first closure.
//!
//! Formulas are generated by size from `T, p1, …, pn` with `∧` and `→`,
//! keeping one representative per semantic value: the smallest formula,
//! ties broken by the lexicographically least rendering. A value first
//! reached at size `s` is an operation applied to two representatives of
//! smaller size, so only representatives need to be combined. Once the
//! sizes `L+1 ..= 2L+1` past the largest productive size `L` yield nothing
//! new, no larger size can, and the closure is complete.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::Formula;
use crate::kripke::{ColouredModel, KripkeError, UpSet};

use super::FreeMeetImpAlgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest formula size (node count) explored.
    pub max_formula_size: u64,
    /// Largest number of distinct values kept.
    pub max_elements: usize,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget { max_formula_size: 41, max_elements: 1 << 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractionError {
    #[error("search budget exhausted: explored formulas up to size {explored_size}, found {elements} values")]
    BudgetExhausted { explored_size: u64, elements: usize },
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

#[derive(Clone, Debug)]
pub struct FormulaClosure {
    reps: HashMap<UpSet, Formula>,
    elements: Vec<UpSet>,
    complete: bool,
    explored_size: u64,
}

impl FormulaClosure {
    pub fn get(&self, u: &UpSet) -> Option<&Formula> {
        self.reps.get(u)
    }

    /// Values in the order they were found.
    pub fn elements(&self) -> &[UpSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Whether every `(∧,→)`-definable value has been found.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn explored_size(&self) -> u64 {
        self.explored_size
    }
}

/// Runs the closure on `model`, stopping early once `target` has been found
/// and its size level finished.
pub fn closure_search(model: &ColouredModel, target: Option<&UpSet>, budget: SearchBudget) -> FormulaClosure {
    let mut closure = FormulaClosure { reps: HashMap::new(), elements: Vec::new(), complete: false, explored_size: 0 };
    // levels[s] = indices into `elements` of values whose representative has size s
    let mut levels: Vec<Vec<usize>> = vec![Vec::new()];
    let mut formulas: Vec<Formula> = Vec::new();

    let atoms = std::iter::once(Formula::top())
        .chain((1..=model.num_vars()).map(|i| Formula::var(u32::try_from(i).expect("variable index fits in u32"))));
    let mut fresh = Fresh::default();
    for f in atoms {
        let v = model.evaluate(&f).expect("atoms are in range");
        fresh.offer(&closure.reps, v, f);
    }
    let mut last_productive = 1;
    let mut s = 1;
    loop {
        let added = fresh.drain_into(&mut closure, &mut formulas);
        while levels.len() <= s as usize {
            levels.push(Vec::new());
        }
        levels[s as usize] = added;
        closure.explored_size = s;
        if !levels[s as usize].is_empty() {
            last_productive = s;
        }
        if s > 2 * last_productive {
            closure.complete = true;
            break;
        }
        if target.is_some_and(|t| closure.reps.contains_key(t)) {
            break;
        }
        if closure.elements.len() > budget.max_elements || s + 2 > budget.max_formula_size {
            break;
        }
        s += 2;
        let mut i = 1;
        while i < s - 1 {
            let j = s - 1 - i;
            for &a in &levels[i as usize] {
                for &b in &levels[j as usize] {
                    let (va, vb) = (&closure.elements[a], &closure.elements[b]);
                    let meet = va.intersection(vb);
                    if !closure.reps.contains_key(&meet) {
                        fresh.offer(&closure.reps, meet, Formula::and(formulas[a].clone(), formulas[b].clone()));
                    }
                    let imp = model.poset().implication(va, vb);
                    if !closure.reps.contains_key(&imp) {
                        fresh.offer(&closure.reps, imp, Formula::imp(formulas[a].clone(), formulas[b].clone()));
                    }
                }
            }
            i += 2;
        }
    }
    closure
}

#[derive(Default)]
struct Fresh {
    best: HashMap<UpSet, (Formula, String)>,
}

impl Fresh {
    fn offer(&mut self, known: &HashMap<UpSet, Formula>, value: UpSet, f: Formula) {
        if known.contains_key(&value) {
            return;
        }
        let text = f.render();
        match self.best.get(&value) {
            Some((_, current)) if *current <= text => {}
            _ => {
                self.best.insert(value, (f, text));
            }
        }
    }

    fn drain_into(&mut self, closure: &mut FormulaClosure, formulas: &mut Vec<Formula>) -> Vec<usize> {
        let mut batch: Vec<(UpSet, (Formula, String))> = self.best.drain().collect();
        batch.sort_by(|a, b| a.1 .1.cmp(&b.1 .1));
        let mut added = Vec::with_capacity(batch.len());
        for (value, (f, _)) in batch {
            added.push(closure.elements.len());
            closure.elements.push(value.clone());
            formulas.push(f.clone());
            closure.reps.insert(value, f);
        }
        added
    }
}

/// A smallest `(∧,→)`-formula whose value on `model` is `u`.
pub fn formula_for_upset(model: &ColouredModel, u: &UpSet, budget: SearchBudget) -> Result<Formula, ExtractionError> {
    if u.carrier_len() != model.len() {
        return Err(KripkeError::CarrierMismatch { expected: model.len(), found: u.carrier_len() }.into());
    }
    let closure = closure_search(model, Some(u), budget);
    closure
        .get(u)
        .cloned()
        .ok_or(ExtractionError::BudgetExhausted { explored_size: closure.explored_size(), elements: closure.len() })
}

pub fn formula_for_element(
    alg: &FreeMeetImpAlgebra,
    e: &UpSet,
    budget: SearchBudget,
) -> Result<Formula, ExtractionError> {
    formula_for_upset(alg.carrier(), e, budget)
}
