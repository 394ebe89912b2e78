//! Which up-sets of a finite model are defined by `(∧,→)`-formulas.
//!
//! An up-set `U` of `M` is `(∧,→)`-definable iff
//!
//! * (a) every `x` whose separated successors all lie in `U` is in `U`, and
//! * (b) every separated `x` bisimilar in `M^s` to a point of `U ∩ M^s` is
//!   in `U`.
//!
//! Equivalently `U` lies in the image of `rh`, and `r h h♭ q (U)` is the
//! least definable up-set containing `U`.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::algebra::{closure_search, restriction_adjoints, AdjointBundle, ExtractionError, SearchBudget};
use crate::formula::{parse, Formula};
use crate::kripke::{to_dot, Colour, ColouredModel, NodePosition, UpSet};
use crate::universal::{build_truncated_universal, PointId, TruncatedUniversalModel, UniversalError, UniverseStore};

/// Largest `M∧,→` whose up-sets `definable_family` enumerates.
pub const FAMILY_CARRIER_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `point ∉ U` although every separated point above it is in `U`.
    SeparatedAbove { point: usize },
    /// `outside ∉ U` and `inside ∈ U` are separated and bisimilar in `M^s`.
    Bisimilar { outside: usize, inside: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SeparatedAbove { point } => {
                write!(
                    f,
                    "separation condition fails: point {point} is outside but all separated points above it are inside"
                )
            }
            Violation::Bisimilar { outside, inside } => {
                write!(f, "bisimulation condition fails: separated points {outside} (outside) and {inside} (inside) are bisimilar in M^s")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefinabilityVerdict {
    /// `witness` is the up-set `h♭ q (U)` of `M∧,→`, with `rh(witness) = U`.
    Definable {
        witness: UpSet,
    },
    NotDefinable(Violation),
}

impl DefinabilityVerdict {
    pub fn is_definable(&self) -> bool {
        matches!(self, DefinabilityVerdict::Definable { .. })
    }

    pub fn witness(&self) -> Option<&UpSet> {
        match self {
            DefinabilityVerdict::Definable { witness } => Some(witness),
            DefinabilityVerdict::NotDefinable(_) => None,
        }
    }

    pub fn violation(&self) -> Option<Violation> {
        match self {
            DefinabilityVerdict::Definable { .. } => None,
            DefinabilityVerdict::NotDefinable(v) => Some(*v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefinabilityError {
    #[error("M∧,→ has {points} points; enumeration is capped at {cap}")]
    CarrierTooLarge { points: usize, cap: usize },
    #[error("the up-set is not (∧,→)-definable: {0}")]
    NotDefinable(Violation),
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
    #[error("extracted formula {formula} does not evaluate to the requested up-set")]
    VerificationFailed { formula: String },
    #[error(transparent)]
    Universal(#[from] UniversalError),
}

fn bundle_for(m: &ColouredModel) -> AdjointBundle {
    let mut store = UniverseStore::new(m.num_vars()).expect("model variable count is supported");
    restriction_adjoints(m, &mut store).expect("store matches the model")
}

/// Checks conditions (a) and (b) against an existing bundle.
pub fn verdict_in(bundle: &AdjointBundle, u: &UpSet) -> DefinabilityVerdict {
    let m = bundle.model();
    assert_eq!(u.carrier_len(), m.len(), "up-set of a different model");
    let sep = bundle.separated();
    let sep_bits = sep.parent_bits();
    for x in (0..m.len()).filter(|&x| !u.contains(x)) {
        if m.poset().up_row(x).intersection(&sep_bits).all(|y| u.contains(y)) {
            return DefinabilityVerdict::NotDefinable(Violation::SeparatedAbove { point: x });
        }
    }
    let ids = &bundle.image().ids;
    for (i, &outside) in sep.embedding.iter().enumerate() {
        if u.contains(outside) {
            continue;
        }
        let partner = sep.embedding.iter().enumerate().find(|&(j, &y)| u.contains(y) && ids[j] == ids[i]);
        if let Some((_, &inside)) = partner {
            return DefinabilityVerdict::NotDefinable(Violation::Bisimilar { outside, inside });
        }
    }
    DefinabilityVerdict::Definable { witness: bundle.h_flat(&bundle.q(u)) }
}

pub fn is_meet_impl_definable(m: &ColouredModel, u: &UpSet) -> DefinabilityVerdict {
    verdict_in(&bundle_for(m), u)
}

/// The single-clause form: every `x` such that each separated `z ≥ x` is
/// bisimilar in `M^s` to a point of `U ∩ M^s` lies in `U`.
pub fn condition_two(m: &ColouredModel, u: &UpSet) -> bool {
    let bundle = bundle_for(m);
    let sep = bundle.separated();
    let ids = &bundle.image().ids;
    let inside: HashSet<PointId> =
        sep.embedding.iter().zip(ids).filter(|&(&x, _)| u.contains(x)).map(|(_, &id)| id).collect();
    (0..m.len()).all(|x| {
        u.contains(x)
            || !sep.embedding.iter().zip(ids).filter(|&(&z, _)| m.poset().leq(x, z)).all(|(_, id)| inside.contains(id))
    })
}

/// The least `(∧,→)`-definable up-set containing `u`.
pub fn definable_closure(m: &ColouredModel, u: &UpSet) -> UpSet {
    bundle_for(m).closure(u)
}

/// All `(∧,→)`-definable up-sets of `m`, i.e. `{rh(W) | W ∈ U(M∧,→)}`,
/// sorted by size and then by points.
pub fn definable_family(m: &ColouredModel) -> Result<Vec<UpSet>, DefinabilityError> {
    family_in(&bundle_for(m))
}

pub fn family_in(bundle: &AdjointBundle) -> Result<Vec<UpSet>, DefinabilityError> {
    let carrier = bundle.meet_impl_model();
    if carrier.len() > FAMILY_CARRIER_CAP {
        return Err(DefinabilityError::CarrierTooLarge { points: carrier.len(), cap: FAMILY_CARRIER_CAP });
    }
    let mut seen = HashSet::new();
    carrier.poset().for_each_upset(|w| {
        seen.insert(bundle.rh(w));
    });
    let mut family: Vec<UpSet> = seen.into_iter().collect();
    family.sort_by_key(|u| (u.len(), u.to_vec()));
    Ok(family)
}

/// A `(∧,→)`-formula defining `u` in `m`, found by searching over `M∧,→`
/// for a formula with value `h♭ q (u)` there and checked by evaluation on
/// `m`.
pub fn witness_formula(m: &ColouredModel, u: &UpSet, budget: SearchBudget) -> Result<Formula, DefinabilityError> {
    let bundle = bundle_for(m);
    let witness = match verdict_in(&bundle, u) {
        DefinabilityVerdict::Definable { witness } => witness,
        DefinabilityVerdict::NotDefinable(v) => return Err(DefinabilityError::NotDefinable(v)),
    };
    let closure = closure_search(bundle.meet_impl_model(), Some(&witness), budget);
    let formula = closure
        .get(&witness)
        .cloned()
        .ok_or(ExtractionError::BudgetExhausted { explored_size: closure.explored_size(), elements: closure.len() })?;
    if m.evaluate(&formula).ok().as_ref() != Some(u) {
        return Err(DefinabilityError::VerificationFailed { formula: formula.render() });
    }
    Ok(formula)
}

/// Position of a point in the ladder drawing of `U(1)`: `row` 0 is the top,
/// `column` 0 the left rail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LadderCell {
    pub row: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportCheck {
    pub claim: String,
    pub passed: bool,
}

/// The `¬¬p1` example on a depth-`d` truncation of `U(1)`.
#[derive(Clone, Debug)]
pub struct RiegerNishimuraReport {
    pub depth: usize,
    pub store: UniverseStore,
    pub truncation: TruncatedUniversalModel,
    /// Ladder cell of each truncation point.
    pub cells: Vec<LadderCell>,
    pub formula: Formula,
    pub upset: UpSet,
    pub verdict: DefinabilityVerdict,
    pub closure: UpSet,
    pub family: Vec<UpSet>,
    pub checks: Vec<ReportCheck>,
}

impl RiegerNishimuraReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn model(&self) -> &ColouredModel {
        self.truncation.model()
    }

    /// Conventional names: `m1` and `x1` on the top row, `x2` below `m1`,
    /// and `l<k>` / `r<k>` further down the left and right rails.
    pub fn name(&self, x: usize) -> String {
        match self.cells[x] {
            LadderCell { row: 0, column: 0 } => "m1".into(),
            LadderCell { row: 0, column: _ } => "x1".into(),
            LadderCell { row: 1, column: 0 } => "x2".into(),
            LadderCell { row, column: 0 } => format!("l{row}"),
            LadderCell { row, column: _ } => format!("r{row}"),
        }
    }

    pub fn names_of(&self, u: &UpSet) -> Vec<String> {
        u.points().map(|x| self.name(x)).collect()
    }

    pub fn dot(&self) -> String {
        let positions: Vec<NodePosition> =
            self.cells.iter().map(|c| NodePosition { x: 2.0 * c.column as f64, y: -(c.row as f64) }).collect();
        to_dot(self.model(), &self.truncation.submodel.labels(), Some(&positions))
    }

    pub fn render(&self) -> String {
        let set = |u: &UpSet| format!("{{{}}}", self.names_of(u).join(", "));
        let mut out = format!("depth: {}\npoints: {}\n", self.depth, self.model().len());
        out += &format!("U = v({}) = {}\n", self.formula, set(&self.upset));
        match &self.verdict {
            DefinabilityVerdict::Definable { .. } => out += "verdict: definable\n",
            DefinabilityVerdict::NotDefinable(Violation::Bisimilar { outside, inside }) => {
                out += &format!(
                    "verdict: not definable, bisimulation condition fails at ({}, {})\n",
                    self.name(*outside),
                    self.name(*inside)
                )
            }
            DefinabilityVerdict::NotDefinable(Violation::SeparatedAbove { point }) => {
                out += &format!("verdict: not definable, separation condition fails at {}\n", self.name(*point))
            }
        }
        out += &format!("closure: {} points\n", self.closure.len());
        let family: Vec<String> = self.family.iter().map(set).collect();
        out += &format!("family: {}\n", family.join(" "));
        for c in &self.checks {
            out += &format!("[{}] {}\n", if c.passed { "ok" } else { "FAIL" }, c.claim);
        }
        out
    }
}

pub fn rieger_nishimura_report(depth: usize) -> Result<RiegerNishimuraReport, DefinabilityError> {
    if depth < 2 {
        return Err(UniversalError::InvalidArgument("the ladder report needs depth at least 2".into()).into());
    }
    let mut store = UniverseStore::new(1)?;
    let truncation = build_truncated_universal(&mut store, depth, 2 * depth)?;
    let m = truncation.model().clone();

    // Rebuild the figure row by row: left_k covers left_{k-1} and right_{k-2},
    // right_k covers left_{k-1} and right_{k-1}.
    let (one, zero) = (Colour(1), Colour(0));
    let mut left = vec![store.lookup(one, &[])];
    let mut right = vec![store.lookup(zero, &[])];
    let mut figure_covers: Vec<(Option<PointId>, Option<PointId>)> = Vec::new();
    for k in 1..depth {
        let l_succ: Vec<Option<PointId>> = if k == 1 { vec![left[0]] } else { vec![left[k - 1], right[k - 2]] };
        let r_succ = vec![left[k - 1], right[k - 1]];
        let find = |store: &UniverseStore, succ: &[Option<PointId>]| -> Option<PointId> {
            let ids: Option<Vec<PointId>> = succ.iter().copied().collect();
            store.lookup(zero, &ids?)
        };
        let l = find(&store, &l_succ);
        let r = find(&store, &r_succ);
        figure_covers.extend(l_succ.iter().map(|&s| (l, s)));
        figure_covers.extend(r_succ.iter().map(|&s| (r, s)));
        left.push(l);
        right.push(r);
    }
    let mut cells = vec![LadderCell { row: usize::MAX, column: 0 }; m.len()];
    let mut figure_complete = true;
    for (column, rail) in [&left, &right].into_iter().enumerate() {
        for (row, id) in rail.iter().enumerate() {
            match id.and_then(|id| truncation.submodel.index_of(id)) {
                Some(x) => cells[x] = LadderCell { row, column },
                None => figure_complete = false,
            }
        }
    }
    let mut expected: Vec<(usize, usize)> = Vec::new();
    for &(lower, upper) in &figure_covers {
        match (lower.and_then(|i| truncation.submodel.index_of(i)), upper.and_then(|i| truncation.submodel.index_of(i)))
        {
            (Some(a), Some(b)) => expected.push((a, b)),
            _ => figure_complete = false,
        }
    }
    expected.sort_unstable();
    let covers_match = figure_complete && expected == m.poset().cover_pairs();

    let index = |id: Option<PointId>| id.and_then(|i| truncation.submodel.index_of(i)).expect("figure point exists");
    let (m1, x1, x2) = (index(left[0]), index(right[0]), index(left[1]));

    let formula = parse("~~p1").expect("literal formula parses");
    let upset = m.evaluate(&formula).expect("one variable");
    let bundle = bundle_for(&m);
    let verdict = verdict_in(&bundle, &upset);
    let closure = bundle.closure(&upset);
    let family = family_in(&bundle)?;

    let sep_points: Vec<usize> = bundle.separated().embedding.clone();
    let sep_ids = &bundle.image().ids;
    let check = |claim: &str, passed: bool| ReportCheck { claim: claim.to_string(), passed };
    let checks = vec![
        check(&format!("truncation has {} points", 2 * depth), m.len() == 2 * depth),
        check("cover relation matches the ladder", covers_match && cells.iter().all(|c| c.row != usize::MAX)),
        check("v(~~p1) = {m1, x2}", upset.to_vec() == sorted(vec![m1, x2])),
        check("M^s = {x1, x2}", sep_points == sorted(vec![x1, x2])),
        check("x1 and x2 are bisimilar in M^s", sep_ids.len() == 2 && sep_ids[0] == sep_ids[1]),
        check(
            "v(~~p1) is not definable, witnessed by bisimilar x1 (outside) and x2 (inside)",
            verdict == DefinabilityVerdict::NotDefinable(Violation::Bisimilar { outside: x1, inside: x2 }),
        ),
        check("definable closure of v(~~p1) is the whole carrier", closure.is_full()),
        check(
            "definable family is {{m1}, carrier}",
            family == vec![m.poset().up_closure([m1]), m.poset().full_upset()],
        ),
    ];
    Ok(RiegerNishimuraReport { depth, store, truncation, cells, formula, upset, verdict, closure, family, checks })
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}
