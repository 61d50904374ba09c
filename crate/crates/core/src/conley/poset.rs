//! Finite strict partial orders on labelled Morse sets.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Largest poset accepted; subsets are stored as 64-bit masks.
pub const MAX_ELEMENTS: usize = 64;

/// A subset of poset elements, by element position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct ElementSet(u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ElementSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        ElementSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_ELEMENTS && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_ELEMENTS).filter(move |&i| self.contains(i))
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = ElementSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Poset {
    labels: Vec<String>,
    /// `less[a][b]` iff `a < b`.
    less: Vec<Vec<bool>>,
}

impl Poset {
    /// Builds the poset from an explicit relation; the relation must already
    /// be irreflexive and transitive.
    pub fn new<S: AsRef<str>>(labels: &[S], relations: &[(S, S)]) -> Result<Self, AlgebraError> {
        let poset = Self::raw(labels, relations)?;
        poset.check_axioms()?;
        Ok(poset)
    }

    /// Builds the smallest partial order containing the given relations.
    pub fn generated_by<S: AsRef<str>>(
        labels: &[S],
        relations: &[(S, S)],
    ) -> Result<Self, AlgebraError> {
        let mut poset = Self::raw(labels, relations)?;
        let n = poset.len();
        for k in 0..n {
            for i in 0..n {
                if poset.less[i][k] {
                    for j in 0..n {
                        if poset.less[k][j] {
                            poset.less[i][j] = true;
                        }
                    }
                }
            }
        }
        poset.check_axioms()?;
        Ok(poset)
    }

    /// Poset on `n` elements labelled `"0".."n-1"` from a `less` matrix.
    pub fn from_matrix(less: Vec<Vec<bool>>) -> Result<Self, AlgebraError> {
        let n = less.len();
        if n > MAX_ELEMENTS || less.iter().any(|row| row.len() != n) {
            return Err(AlgebraError::Malformed(format!("relation matrix must be square, n <= {MAX_ELEMENTS}")));
        }
        let poset = Poset { labels: (0..n).map(|i| i.to_string()).collect(), less };
        poset.check_axioms()?;
        Ok(poset)
    }

    fn raw<S: AsRef<str>>(labels: &[S], relations: &[(S, S)]) -> Result<Self, AlgebraError> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        if labels.len() > MAX_ELEMENTS {
            return Err(AlgebraError::Malformed(format!(
                "{} elements exceeds the limit of {MAX_ELEMENTS}",
                labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(AlgebraError::Malformed(format!("duplicate element label {l:?}")));
            }
        }
        let n = labels.len();
        let mut poset = Poset { labels, less: vec![vec![false; n]; n] };
        for (a, b) in relations {
            let i = poset.require(a.as_ref())?;
            let j = poset.require(b.as_ref())?;
            poset.less[i][j] = true;
        }
        Ok(poset)
    }

    fn require(&self, label: &str) -> Result<usize, AlgebraError> {
        self.position(label).ok_or_else(|| AlgebraError::UnknownElement(label.to_string()))
    }

    fn check_axioms(&self) -> Result<(), AlgebraError> {
        let n = self.len();
        for i in 0..n {
            if self.less[i][i] {
                return Err(AlgebraError::NotPartialOrder(format!(
                    "{0} < {0} violates irreflexivity",
                    self.labels[i]
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !self.less[i][j] {
                    continue;
                }
                for k in 0..n {
                    if self.less[j][k] && !self.less[i][k] {
                        return Err(AlgebraError::NotPartialOrder(format!(
                            "{} < {} < {} but not {} < {}",
                            self.labels[i], self.labels[j], self.labels[k], self.labels[i], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.less[a][b]
    }

    pub fn all(&self) -> ElementSet {
        (0..self.len()).collect()
    }

    pub fn set_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<ElementSet, AlgebraError> {
        labels.iter().map(|l| self.require(l.as_ref())).collect()
    }

    /// Order-convex: `a < c < b` with `a, b` in the set forces `c` in the set.
    pub fn is_interval(&self, set: ElementSet) -> bool {
        let n = self.len();
        set.iter().all(|a| {
            set.iter().all(|b| (0..n).all(|c| !(self.less[a][c] && self.less[c][b]) || set.contains(c)))
        })
    }

    /// An interval that is closed downwards.
    pub fn is_attracting_interval(&self, set: ElementSet) -> bool {
        self.is_interval(set)
            && set.iter().all(|a| (0..self.len()).all(|b| !self.less[b][a] || set.contains(b)))
    }

    /// Every interval, including the empty set, in increasing mask order.
    /// Exhaustive over subsets, so limited to `max_elements`.
    pub fn intervals(&self, max_elements: usize) -> Result<Vec<ElementSet>, AlgebraError> {
        if self.len() > max_elements {
            return Err(AlgebraError::TooLarge(format!(
                "interval enumeration over {} elements (limit {max_elements})",
                self.len()
            )));
        }
        Ok((0u64..1 << self.len()).map(ElementSet).filter(|&s| self.is_interval(s)).collect())
    }

    pub fn format_set(&self, set: ElementSet) -> String {
        let names: Vec<&str> = set.iter().map(|i| self.label(i)).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rels = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if self.less[i][j] {
                    rels.push(format!("{} < {}", self.labels[i], self.labels[j]));
                }
            }
        }
        write!(f, "{{{}}} with {}", self.labels.join(", "), if rels.is_empty() { "no relations".into() } else { rels.join(", ") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Poset {
        Poset::generated_by(&["1", "2", "3"], &[("1", "2"), ("2", "3")]).unwrap()
    }

    fn example_one_before() -> Poset {
        Poset::new(&["1", "pi", "2", "3"], &[("1", "2"), ("pi", "2"), ("pi", "3")]).unwrap()
    }

    #[test]
    fn chain_intervals() {
        let p = chain();
        assert!(p.less(0, 2));
        assert!(!p.is_interval(p.set_of(&["1", "3"]).unwrap()));
        assert!(p.is_interval(ElementSet::EMPTY));
        for i in 0..3 {
            assert!(p.is_interval(ElementSet::singleton(i)));
        }
        assert!(p.is_attracting_interval(p.set_of(&["1"]).unwrap()));
        assert!(!p.is_attracting_interval(p.set_of(&["2", "3"]).unwrap()));
        assert_eq!(p.intervals(12).unwrap().len(), 7);
    }

    #[test]
    fn example_one_order() {
        let p = example_one_before();
        assert!(p.is_interval(p.set_of(&["pi", "2"]).unwrap()));
        assert!(p.is_attracting_interval(p.set_of(&["1", "pi"]).unwrap()));
        assert!(!p.is_attracting_interval(p.set_of(&["2"]).unwrap()));
    }

    #[test]
    fn rejects_non_orders() {
        let err = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap_err();
        assert!(matches!(err, AlgebraError::NotPartialOrder(_)));
        let err = Poset::generated_by(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, AlgebraError::NotPartialOrder(_)));
        let err = Poset::new(&["a", "a"], &[]).unwrap_err();
        assert!(matches!(err, AlgebraError::Malformed(_)));
        let err = Poset::new(&["a"], &[("a", "z")]).unwrap_err();
        assert!(matches!(err, AlgebraError::UnknownElement(_)));
    }

    #[test]
    fn interval_enumeration_is_bounded() {
        let labels: Vec<String> = (0..13).map(|i| i.to_string()).collect();
        let p = Poset::new(&labels, &[]).unwrap();
        assert!(matches!(p.intervals(12), Err(AlgebraError::TooLarge(_))));
    }
}
