use serde::Serialize;

use super::index::{GradedIndex, MAX_DEGREE};
use super::poset::{ElementSet, Poset};
use super::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseSet {
    pub label: String,
    pub description: String,
    pub index: GradedIndex,
}

/// One basis vector of `⊕_p CH_*(M(p))`: copy `copy` of `Z2` in degree
/// `degree` of the Morse set at poset position `element`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Generator {
    pub element: usize,
    pub degree: usize,
    pub copy: usize,
}

/// Morse sets with an admissible order and their graded Conley indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseDecomposition {
    poset: Poset,
    sets: Vec<MorseSet>,
    /// Optional indices of larger intervals `M(I)`, checked by connection
    /// matrix validation.
    prescribed: Vec<(ElementSet, GradedIndex)>,
}

impl MorseDecomposition {
    /// `sets` must be listed in the poset's element order.
    pub fn new(poset: Poset, sets: Vec<MorseSet>) -> Result<Self, AlgebraError> {
        if sets.len() != poset.len() {
            return Err(AlgebraError::Malformed(format!(
                "{} Morse sets for {} poset elements",
                sets.len(),
                poset.len()
            )));
        }
        for (i, set) in sets.iter().enumerate() {
            if set.label != poset.label(i) {
                return Err(AlgebraError::Malformed(format!(
                    "Morse set {:?} listed where poset element {:?} is expected",
                    set.label,
                    poset.label(i)
                )));
            }
        }
        Ok(Self { poset, sets, prescribed: Vec::new() })
    }

    /// Convenience constructor from `(label, description, index)` triples.
    pub fn from_parts<S: AsRef<str>>(
        sets: &[(S, S, GradedIndex)],
        order: &[(S, S)],
    ) -> Result<Self, AlgebraError> {
        let labels: Vec<&str> = sets.iter().map(|(l, _, _)| l.as_ref()).collect();
        let order: Vec<(&str, &str)> = order.iter().map(|(a, b)| (a.as_ref(), b.as_ref())).collect();
        let poset = Poset::generated_by(&labels, &order)?;
        let sets = sets
            .iter()
            .map(|(l, d, idx)| MorseSet {
                label: l.as_ref().to_string(),
                description: d.as_ref().to_string(),
                index: *idx,
            })
            .collect();
        Self::new(poset, sets)
    }

    pub fn prescribe(&mut self, interval: ElementSet, index: GradedIndex) -> Result<(), AlgebraError> {
        if !self.poset.is_interval(interval) {
            return Err(AlgebraError::NotInterval(self.poset.format_set(interval)));
        }
        self.prescribed.retain(|(s, _)| *s != interval);
        self.prescribed.push((interval, index));
        Ok(())
    }

    pub fn prescribed(&self) -> &[(ElementSet, GradedIndex)] {
        &self.prescribed
    }

    /// Index required of `M(I)`: the set's own index for a singleton, a
    /// prescription if one was supplied, otherwise unknown.
    pub fn expected_index(&self, interval: ElementSet) -> Option<GradedIndex> {
        if interval.len() == 1 {
            let i = interval.iter().next()?;
            return Some(self.sets[i].index);
        }
        if interval.is_empty() {
            return Some(GradedIndex::zero());
        }
        self.prescribed.iter().find(|(s, _)| *s == interval).map(|(_, idx)| *idx)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn sets(&self) -> &[MorseSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn label(&self, element: usize) -> &str {
        &self.sets[element].label
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.poset.position(label)
    }

    /// Generators ordered by ascending degree, then element order, then copy.
    pub fn basis(&self) -> Vec<Generator> {
        let mut basis = Vec::new();
        for degree in 0..=MAX_DEGREE {
            for (element, set) in self.sets.iter().enumerate() {
                for copy in 0..set.index.rank(degree) {
                    basis.push(Generator { element, degree, copy });
                }
            }
        }
        basis
    }

    pub fn total_dimension(&self) -> usize {
        self.sets.iter().map(|s| s.index.total_rank()).sum()
    }

    /// Display name of a generator, e.g. `H1(pi)`; copies beyond the first get
    /// a `#k` suffix.
    pub fn generator_name(&self, g: Generator) -> String {
        if g.copy == 0 {
            format!("H{}({})", g.degree, self.label(g.element))
        } else {
            format!("H{}({})#{}", g.degree, self.label(g.element), g.copy)
        }
    }
}
