use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use super::{KripkeError, Poset, UpSet};
use crate::formula::{Formula, Kind};

/// Maximum number of propositional variables a colour can carry.
pub const MAX_VARS: usize = 64;

/// A truth assignment to `p1..pn`; bit `j` is the value of `p_{j+1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Colour(pub u64);

impl Colour {
    pub fn all_ones(n: usize) -> Colour {
        Colour(mask(n))
    }

    /// Truth of variable `p_var` (1-based).
    pub fn holds(self, var: usize) -> bool {
        self.bit(var - 1)
    }

    /// Bit `j` (0-based).
    pub fn bit(self, j: usize) -> bool {
        self.0 >> j & 1 == 1
    }

    pub fn with_bit(self, j: usize, value: bool) -> Colour {
        if value {
            Colour(self.0 | 1 << j)
        } else {
            Colour(self.0 & !(1 << j))
        }
    }

    /// Pointwise order.
    pub fn leq(self, other: Colour) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn lt(self, other: Colour) -> bool {
        self != other && self.leq(other)
    }

    pub fn meet(self, other: Colour) -> Colour {
        Colour(self.0 & other.0)
    }

    pub fn count_true(self) -> u32 {
        self.0.count_ones()
    }

    /// `n` characters, `p1` leftmost.
    pub fn to_bitstring(self, n: usize) -> String {
        (0..n).map(|j| if self.bit(j) { '1' } else { '0' }).collect()
    }

    pub fn parse_bitstring(s: &str) -> Result<Colour, KripkeError> {
        if s.len() > MAX_VARS {
            return Err(KripkeError::TooManyVariables(s.len()));
        }
        let mut c = Colour(0);
        for (j, ch) in s.chars().enumerate() {
            match ch {
                '1' => c = c.with_bit(j, true),
                '0' => {}
                _ => return Err(KripkeError::BadColour(s.to_string())),
            }
        }
        Ok(c)
    }
}

pub(crate) fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A finite poset with an order-preserving colouring into `2^n`.
#[derive(Clone, PartialEq, Eq)]
pub struct ColouredModel {
    poset: Poset,
    n: usize,
    colours: Vec<Colour>,
}

impl ColouredModel {
    pub fn new(poset: Poset, n: usize, colours: Vec<Colour>) -> Result<ColouredModel, KripkeError> {
        if n > MAX_VARS {
            return Err(KripkeError::TooManyVariables(n));
        }
        if colours.len() != poset.len() {
            return Err(KripkeError::CarrierMismatch { expected: poset.len(), found: colours.len() });
        }
        for (x, c) in colours.iter().enumerate() {
            if c.0 & !mask(n) != 0 {
                return Err(KripkeError::ColourOutOfRange { point: x, n });
            }
            for &y in poset.upper_covers(x) {
                if !c.leq(colours[y]) {
                    return Err(KripkeError::ColouringNotMonotone { lower: x, upper: y });
                }
            }
        }
        Ok(ColouredModel { poset, n, colours })
    }

    /// The model with no points.
    pub fn empty(n: usize) -> ColouredModel {
        ColouredModel { poset: Poset::antichain(0), n, colours: Vec::new() }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn colour(&self, x: usize) -> Colour {
        self.colours[x]
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colours
    }

    /// `v(p_var)`.
    pub fn var_upset(&self, var: usize) -> UpSet {
        let mut bits = FixedBitSet::with_capacity(self.len());
        for (x, c) in self.colours.iter().enumerate() {
            if c.holds(var) {
                bits.insert(x);
            }
        }
        self.poset.upset_from_bits_unchecked(bits)
    }

    /// The set of points forcing `f`.
    pub fn evaluate(&self, f: &Formula) -> Result<UpSet, KripkeError> {
        if f.max_var() as usize > self.n {
            return Err(KripkeError::VariableOutOfRange { var: f.max_var() as usize, n: self.n });
        }
        let mut memo = HashMap::new();
        Ok(self.eval_memo(f, &mut memo))
    }

    fn eval_memo(&self, f: &Formula, memo: &mut HashMap<usize, UpSet>) -> UpSet {
        if let Some(u) = memo.get(&f.node_key()) {
            return u.clone();
        }
        let value = match f.kind() {
            Kind::Var(i) => self.var_upset(*i as usize),
            Kind::Top => self.poset.full_upset(),
            Kind::Bot => self.poset.empty_upset(),
            Kind::And(a, b) => self.eval_memo(a, memo).intersection(&self.eval_memo(b, memo)),
            Kind::Or(a, b) => self.eval_memo(a, memo).union(&self.eval_memo(b, memo)),
            Kind::Imp(a, b) => {
                let u = self.eval_memo(a, memo);
                let v = self.eval_memo(b, memo);
                self.poset.implication(&u, &v)
            }
        };
        memo.insert(f.node_key(), value.clone());
        value
    }

    pub fn border_points(&self, a: &UpSet) -> Vec<usize> {
        self.poset.border_points(a)
    }

    /// Is `x` a border point of `v(p_var)`?
    pub fn is_border_for(&self, x: usize, var: usize) -> bool {
        !self.colours[x].holds(var) && self.poset.upper_covers(x).iter().all(|&y| self.colours[y].holds(var))
    }

    /// A point is separated when it is a border point of some `v(q)`.
    pub fn is_separated(&self, x: usize) -> bool {
        (1..=self.n).any(|var| self.is_border_for(x, var))
    }

    /// Variables `q` for which `x` is a `q`-border point, ascending.
    pub fn border_vars(&self, x: usize) -> Vec<usize> {
        (1..=self.n).filter(|&var| self.is_border_for(x, var)).collect()
    }

    /// Induced order and colouring on the listed points.
    pub fn induced(&self, points: &[usize]) -> ColouredModel {
        ColouredModel {
            poset: self.poset.induced(points),
            n: self.n,
            colours: points.iter().map(|&x| self.colours[x]).collect(),
        }
    }

    /// The generated submodel on an up-set, with its points in ascending
    /// order.
    pub fn generated(&self, u: &UpSet) -> (ColouredModel, Vec<usize>) {
        let points = u.to_vec();
        (self.induced(&points), points)
    }

    /// `M^s`, the submodel of separated points.
    pub fn separated_submodel(&self) -> SeparatedSubmodel {
        let embedding: Vec<usize> = (0..self.len()).filter(|&x| self.is_separated(x)).collect();
        let mut position = vec![None; self.len()];
        for (i, &x) in embedding.iter().enumerate() {
            position[x] = Some(i);
        }
        SeparatedSubmodel { model: self.induced(&embedding), embedding, position }
    }
}

impl fmt::Debug for ColouredModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let colours: Vec<String> = self.colours.iter().map(|c| c.to_bitstring(self.n)).collect();
        f.debug_struct("ColouredModel")
            .field("n", &self.n)
            .field("colours", &colours)
            .field("covers", &self.poset.cover_pairs())
            .finish()
    }
}

/// `M^s` together with its embedding into the parent model.
#[derive(Clone, Debug)]
pub struct SeparatedSubmodel {
    pub model: ColouredModel,
    /// Parent index of each point of `M^s`.
    pub embedding: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl SeparatedSubmodel {
    /// Index in `M^s` of a parent point, if it is separated.
    pub fn position(&self, parent: usize) -> Option<usize> {
        self.position[parent]
    }

    pub fn contains_parent(&self, parent: usize) -> bool {
        self.position[parent].is_some()
    }

    /// The separated points as a raw set of parent indices.
    pub fn parent_bits(&self) -> FixedBitSet {
        let mut bits = FixedBitSet::with_capacity(self.position.len());
        for &x in &self.embedding {
            bits.insert(x);
        }
        bits
    }
}

/// A total point function between two models. Whether it is a p-morphism
/// is checked, not assumed.
#[derive(Clone, Debug)]
pub struct ModelMap<'a> {
    pub source: &'a ColouredModel,
    pub target: &'a ColouredModel,
    pub map: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PMorphismViolation {
    /// `source_lower <= source_upper` but their images are not ordered.
    Order {
        source_lower: usize,
        source_upper: usize,
    },
    /// `target` lies above the image of `source` but is not hit from `↑source`.
    Back {
        source: usize,
        target: usize,
    },
    Colour {
        source: usize,
        target: usize,
    },
    /// Map length or a target index does not fit the models.
    Shape,
}

impl ModelMap<'_> {
    pub fn check_pmorphism(&self) -> Result<(), PMorphismViolation> {
        let (src, tgt) = (self.source, self.target);
        if self.map.len() != src.len() || self.map.iter().any(|&y| y >= tgt.len()) {
            return Err(PMorphismViolation::Shape);
        }
        for x in 0..src.len() {
            let fx = self.map[x];
            if src.colour(x) != tgt.colour(fx) {
                return Err(PMorphismViolation::Colour { source: x, target: fx });
            }
            let mut hit = FixedBitSet::with_capacity(tgt.len());
            for y in src.poset().up_row(x).ones() {
                let fy = self.map[y];
                if !tgt.poset().leq(fx, fy) {
                    return Err(PMorphismViolation::Order { source_lower: x, source_upper: y });
                }
                hit.insert(fy);
            }
            if let Some(missed) = tgt.poset().up_row(fx).difference(&hit).next() {
                return Err(PMorphismViolation::Back { source: x, target: missed });
            }
        }
        Ok(())
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        for &y in &self.map {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn two_chain(bottom: &str, top: &str) -> ColouredModel {
        ColouredModel::new(
            Poset::chain(2),
            bottom.len(),
            vec![Colour::parse_bitstring(bottom).unwrap(), Colour::parse_bitstring(top).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn colour_bitstrings() {
        let c = Colour::parse_bitstring("10").unwrap();
        assert!(c.holds(1) && !c.holds(2));
        assert_eq!(c.to_bitstring(2), "10");
        assert!(Colour(0b01).lt(Colour(0b11)));
        assert!(!Colour(0b01).leq(Colour(0b10)));
        assert!(Colour::parse_bitstring("1x").is_err());
    }

    #[test]
    fn colouring_must_be_monotone() {
        let bad = ColouredModel::new(Poset::chain(2), 1, vec![Colour(1), Colour(0)]);
        assert!(matches!(bad, Err(KripkeError::ColouringNotMonotone { lower: 0, upper: 1 })));
        assert!(ColouredModel::new(Poset::chain(1), 1, vec![Colour(2)]).is_err());
    }

    #[test]
    fn evaluate_variable_on_two_chain() {
        let m = two_chain("0", "1");
        let u = m.evaluate(&parse("p1").unwrap()).unwrap();
        assert_eq!(u.to_vec(), vec![1]);
        assert!(matches!(m.evaluate(&parse("p2").unwrap()), Err(KripkeError::VariableOutOfRange { var: 2, n: 1 })));
    }

    #[test]
    fn separated_points() {
        // 2-chain 0 < 1: bottom is a p1-border point, top forces p1.
        let m = two_chain("0", "1");
        let s = m.separated_submodel();
        assert_eq!(s.embedding, vec![0]);
        let all_true = ColouredModel::new(Poset::chain(1), 2, vec![Colour(0b11)]).unwrap();
        assert!(all_true.separated_submodel().model.is_empty());
    }

    #[test]
    fn pmorphism_examples() {
        let m = two_chain("0", "1");
        let id = ModelMap { source: &m, target: &m, map: vec![0, 1] };
        assert_eq!(id.check_pmorphism(), Ok(()));

        let anti = ColouredModel::new(Poset::antichain(2), 1, vec![Colour(0), Colour(0)]).unwrap();
        let point0 = ColouredModel::new(Poset::antichain(1), 1, vec![Colour(0)]).unwrap();
        let collapse = ModelMap { source: &anti, target: &point0, map: vec![0, 0] };
        assert_eq!(collapse.check_pmorphism(), Ok(()));
        assert!(collapse.is_surjective());

        let broken = ModelMap { source: &m, target: &point0, map: vec![0, 0] };
        assert_eq!(broken.check_pmorphism(), Err(PMorphismViolation::Colour { source: 1, target: 0 }));

        // Inclusion of the top point into the chain is fine, the reverse
        // direction (bottom point into the chain's bottom) misses the top.
        let bottom_only = ColouredModel::new(Poset::antichain(1), 1, vec![Colour(0)]).unwrap();
        let into_bottom = ModelMap { source: &bottom_only, target: &m, map: vec![0] };
        assert_eq!(into_bottom.check_pmorphism(), Err(PMorphismViolation::Back { source: 0, target: 1 }));
    }
}
