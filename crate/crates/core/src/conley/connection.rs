//! Connection matrix axioms, interval homology and exhaustive search.

use std::fmt;

use serde::Serialize;

use super::decomposition::MorseDecomposition;
use super::graded_map::GradedMap;
use super::index::{GradedIndex, MAX_DEGREE};
use super::poset::ElementSet;
use super::z2::{Z2Matrix, Z2};
use super::AlgebraError;

/// Posets up to this size have every interval checked.
pub const EXHAUSTIVE_INTERVAL_LIMIT: usize = 12;
/// Largest total index dimension accepted by the enumerator.
pub const ENUMERATION_DIMENSION_LIMIT: usize = 16;
/// Largest number of free entries the enumerator will sweep (2^n candidates).
pub const ENUMERATION_ENTRY_LIMIT: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    /// An entry joins generators whose degrees differ by something other than one.
    WrongDegree { row: String, col: String },
    /// `Δ(p, q) != 0` without `p < q`.
    NotUpperTriangular { row: String, col: String },
    /// `Δ^2 != 0`; the witness is a nonzero entry of the square.
    NotBoundary { row: String, col: String },
    /// `ker Δ(I) / im Δ(I)` disagrees with the index of `M(I)`.
    IntervalIndex { interval: String, expected: GradedIndex, actual: GradedIndex },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongDegree { row, col } => {
                write!(f, "degree: entry {row} <- {col} is not of degree -1")
            }
            Violation::NotUpperTriangular { row, col } => write!(
                f,
                "strictly upper triangular: entry {row} <- {col} is nonzero but the sets are not ordered"
            ),
            Violation::NotBoundary { row, col } => {
                write!(f, "boundary map: Δ^2 has a nonzero entry at {row} <- {col}")
            }
            Violation::IntervalIndex { interval, expected, actual } => write!(
                f,
                "interval homology: M({interval}) has index [{expected}] but ker/im gives [{actual}]"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalHomology {
    pub interval: String,
    #[serde(skip)]
    pub set: ElementSet,
    pub homology: GradedIndex,
    pub expected: Option<GradedIndex>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionReport {
    pub violations: Vec<Violation>,
    pub intervals: Vec<IntervalHomology>,
    /// False when the poset was too large for exhaustive interval checks.
    pub exhaustive: bool,
}

impl ConnectionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_shape(d: &GradedMap, m: &MorseDecomposition) -> Result<(), AlgebraError> {
    if d.degree() != -1 {
        return Err(AlgebraError::Malformed(format!(
            "connection matrices have degree -1, got {}",
            d.degree()
        )));
    }
    let basis = m.basis();
    if d.rows() != basis.as_slice() || d.cols() != basis.as_slice() {
        return Err(AlgebraError::Malformed(
            "connection matrix basis does not match the Morse decomposition".into(),
        ));
    }
    Ok(())
}

/// Checks the three connection matrix axioms and reports the homology of
/// every interval (or of singletons and prescribed intervals for large posets).
pub fn validate_connection_matrix(
    d: &GradedMap,
    m: &MorseDecomposition,
) -> Result<ConnectionReport, AlgebraError> {
    check_shape(d, m)?;
    let name = |i: usize| m.generator_name(d.rows()[i]);
    let mut violations = Vec::new();

    for (r, c) in d.nonzero_entries() {
        if !d.is_structural(r, c) {
            violations.push(Violation::WrongDegree { row: name(r), col: name(c) });
        }
        let (p, q) = (d.rows()[r].element, d.cols()[c].element);
        if !m.poset().less(p, q) {
            violations.push(Violation::NotUpperTriangular { row: name(r), col: name(c) });
        }
    }

    let square = d.matrix().mul(d.matrix());
    if let Some((r, c)) = square.nonzero_entries().next() {
        violations.push(Violation::NotBoundary { row: name(r), col: name(c) });
    }

    let exhaustive = m.len() <= EXHAUSTIVE_INTERVAL_LIMIT;
    let sets: Vec<ElementSet> = if exhaustive {
        m.poset().intervals(EXHAUSTIVE_INTERVAL_LIMIT)?.into_iter().filter(|s| !s.is_empty()).collect()
    } else {
        let mut v: Vec<ElementSet> = (0..m.len()).map(ElementSet::singleton).collect();
        v.extend(m.prescribed().iter().map(|(s, _)| *s));
        v
    };
    let mut intervals = Vec::with_capacity(sets.len());
    for set in sets {
        let homology = interval_homology_unchecked(d, set);
        let expected = m.expected_index(set);
        if let Some(exp) = expected {
            if exp != homology {
                violations.push(Violation::IntervalIndex {
                    interval: m.poset().format_set(set),
                    expected: exp,
                    actual: homology,
                });
            }
        }
        intervals.push(IntervalHomology {
            interval: m.poset().format_set(set),
            set,
            homology,
            expected,
        });
    }

    Ok(ConnectionReport { violations, intervals, exhaustive })
}

/// Graded Z2 homology `ker Δ(I) / im Δ(I)` of the restriction to an interval.
pub fn homology_of_interval(
    d: &GradedMap,
    m: &MorseDecomposition,
    interval: ElementSet,
) -> Result<GradedIndex, AlgebraError> {
    check_shape(d, m)?;
    if !m.poset().is_interval(interval) {
        return Err(AlgebraError::NotInterval(m.poset().format_set(interval)));
    }
    Ok(interval_homology_unchecked(d, interval))
}

fn interval_homology_unchecked(d: &GradedMap, interval: ElementSet) -> GradedIndex {
    let chain: Vec<Vec<usize>> = (0..=MAX_DEGREE)
        .map(|q| {
            (0..d.rows().len())
                .filter(|&i| d.rows()[i].degree == q && interval.contains(d.rows()[i].element))
                .collect()
        })
        .collect();
    // rank of the boundary C_q -> C_{q-1}
    let boundary_rank = |q: usize| -> usize {
        if q == 0 || q > MAX_DEGREE {
            return 0;
        }
        d.matrix().select(&chain[q - 1], &chain[q]).rank()
    };
    let mut ranks = [0; MAX_DEGREE + 1];
    for (q, rank) in ranks.iter_mut().enumerate() {
        *rank = chain[q].len().saturating_sub(boundary_rank(q) + boundary_rank(q + 1));
    }
    GradedIndex::from_ranks(ranks)
}

/// Parity of the number of transverse connecting orbits.
pub fn mod2_connection_count(k: u64) -> Z2 {
    Z2::from_bool(k % 2 == 1)
}

/// Every degree -1 map satisfying the axioms, in increasing order of the
/// bit pattern over admissible entries.
pub fn enumerate_connection_matrices(m: &MorseDecomposition) -> Result<Vec<GradedMap>, AlgebraError> {
    let dim = m.total_dimension();
    if dim > ENUMERATION_DIMENSION_LIMIT {
        return Err(AlgebraError::TooLarge(format!(
            "total index dimension {dim} exceeds {ENUMERATION_DIMENSION_LIMIT}"
        )));
    }
    let template = GradedMap::zero_connection(m);
    let slots: Vec<(usize, usize)> = template
        .structural_positions()
        .into_iter()
        .filter(|&(r, c)| m.poset().less(template.rows()[r].element, template.cols()[c].element))
        .collect();
    if slots.len() > ENUMERATION_ENTRY_LIMIT {
        return Err(AlgebraError::TooLarge(format!(
            "{} admissible entries exceeds {ENUMERATION_ENTRY_LIMIT}",
            slots.len()
        )));
    }

    let checked: Vec<ElementSet> = if m.len() <= EXHAUSTIVE_INTERVAL_LIMIT {
        m.poset()
            .intervals(EXHAUSTIVE_INTERVAL_LIMIT)?
            .into_iter()
            .filter(|&s| s.len() > 1 && m.expected_index(s).is_some())
            .collect()
    } else {
        m.prescribed().iter().map(|(s, _)| *s).collect()
    };

    let n = template.rows().len();
    let mut out = Vec::new();
    for mask in 0u64..1 << slots.len() {
        let mut matrix = Z2Matrix::zeros(n, n);
        for (bit, &(r, c)) in slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                matrix.set(r, c, true);
            }
        }
        if !matrix.mul(&matrix).is_zero() {
            continue;
        }
        let candidate = template.with_matrix(matrix)?;
        let ok = checked.iter().all(|&s| {
            m.expected_index(s) == Some(interval_homology_unchecked(&candidate, s))
        });
        if ok {
            out.push(candidate);
        }
    }
    Ok(out)
}
