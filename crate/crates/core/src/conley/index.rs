use std::fmt;

use serde::{Deserialize, Serialize};

/// Highest homology degree that occurs for planar Morse sets.
pub const MAX_DEGREE: usize = 2;

/// Z2 ranks of a graded Conley index in degrees `0..=2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedIndex {
    ranks: [usize; MAX_DEGREE + 1],
}

impl GradedIndex {
    pub const fn from_ranks(ranks: [usize; MAX_DEGREE + 1]) -> Self {
        Self { ranks }
    }

    pub const fn zero() -> Self {
        Self { ranks: [0; MAX_DEGREE + 1] }
    }

    pub fn ranks(&self) -> [usize; MAX_DEGREE + 1] {
        self.ranks
    }

    pub fn rank(&self, q: usize) -> usize {
        self.ranks.get(q).copied().unwrap_or(0)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.total_rank() == 0
    }
}

impl fmt::Display for GradedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .ranks
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > 0)
            .map(|(q, &r)| if r == 1 { format!("H{q}=Z2") } else { format!("H{q}=Z2^{r}") })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(", "))
        }
    }
}
