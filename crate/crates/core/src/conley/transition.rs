//! Transition matrices `T` with `Δ(θ) T + T Δ(θ') = 0` over Z2, and the
//! bifurcation certificates read off their forced entries.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::connection::validate_connection_matrix;
use super::decomposition::MorseDecomposition;
use super::graded_map::GradedMap;
use super::z2::{Z2Matrix, Z2};
use super::AlgebraError;

/// Solution spaces larger than 2^this are not enumerated.
pub const SOLUTION_NULLITY_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockConstraint {
    Zero,
    Iso,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintEntry {
    /// Morse set label at `theta` (row side).
    pub row: String,
    /// Morse set label at `theta'` (column side).
    pub col: String,
    pub degree: Option<usize>,
    pub value: BlockConstraint,
}

/// Caller-supplied knowledge about `T`, typically that continued hyperbolic
/// sets carry an isomorphism on their diagonal block.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TransitionConstraint {
    pub entries: Vec<ConstraintEntry>,
}

impl TransitionConstraint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, row: &str, col: &str, value: BlockConstraint) -> Self {
        self.entries.push(ConstraintEntry { row: row.into(), col: col.into(), degree: None, value });
        self
    }

    /// `T(p, p) = iso` for each listed label.
    pub fn diagonal_iso(labels: &[&str]) -> Self {
        labels.iter().fold(Self::new(), |c, l| c.with(l, l, BlockConstraint::Iso))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum EntryStatus {
    /// Set by a constraint.
    Fixed(Z2),
    /// Same value in every solution, though no constraint set it.
    Forced(Z2),
    /// Takes both values across the solution set.
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionEntry {
    pub row: usize,
    pub col: usize,
    pub row_set: String,
    pub col_set: String,
    pub degree: usize,
    pub status: EntryStatus,
}

impl TransitionEntry {
    pub fn is_diagonal(&self) -> bool {
        self.row_set == self.col_set
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionSolution {
    #[serde(skip)]
    pub template: GradedMap,
    /// Every admissible `T`, in increasing order of the free-parameter bits.
    #[serde(skip)]
    pub solutions: Vec<GradedMap>,
    pub solution_count: usize,
    /// One record per structurally allowed entry.
    pub entries: Vec<TransitionEntry>,
    /// Labels present in both decompositions.
    pub continued: Vec<String>,
}

impl TransitionSolution {
    pub fn forced(&self) -> impl Iterator<Item = &TransitionEntry> {
        self.entries.iter().filter(|e| matches!(e.status, EntryStatus::Forced(_)))
    }

    /// Status of the block `T(row_set, col_set)` in the given degree.
    pub fn status(&self, row_set: &str, col_set: &str, degree: Option<usize>) -> Option<EntryStatus> {
        self.entries
            .iter()
            .find(|e| e.row_set == row_set && e.col_set == col_set && degree.is_none_or(|q| q == e.degree))
            .map(|e| e.status)
    }
}

fn require_valid(d: &GradedMap, m: &MorseDecomposition, which: &str) -> Result<(), AlgebraError> {
    let report = validate_connection_matrix(d, m)?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(AlgebraError::InvalidConnection {
            which: which.into(),
            violations: report.violations.iter().map(|v| v.to_string()).collect(),
        })
    }
}

/// All degree 0 maps `T: ⊕CH(M1) -> ⊕CH(M0)` with `D0 T + T D1 = 0` that
/// satisfy `constraint`, with per-entry forced/free classification.
pub fn solve_transition_matrices(
    d0: &GradedMap,
    d1: &GradedMap,
    m0: &MorseDecomposition,
    m1: &MorseDecomposition,
    constraint: &TransitionConstraint,
) -> Result<TransitionSolution, AlgebraError> {
    require_valid(d0, m0, "before")?;
    require_valid(d1, m1, "after")?;

    let template = GradedMap::zero_transition(m0, m1);
    let positions = template.structural_positions();
    let row_label = |r: usize| m0.label(template.rows()[r].element).to_string();
    let col_label = |c: usize| m1.label(template.cols()[c].element).to_string();

    // constraint values per structural position
    let mut fixed: Vec<Option<Z2>> = vec![None; positions.len()];
    let mut explicit_unknown = vec![false; positions.len()];
    for entry in &constraint.entries {
        if m0.position(&entry.row).is_none() {
            return Err(AlgebraError::UnknownElement(entry.row.clone()));
        }
        if m1.position(&entry.col).is_none() {
            return Err(AlgebraError::UnknownElement(entry.col.clone()));
        }
        let hits: Vec<usize> = positions
            .iter()
            .enumerate()
            .filter(|(_, &(r, c))| {
                row_label(r) == entry.row
                    && col_label(c) == entry.col
                    && entry.degree.is_none_or(|q| template.cols()[c].degree == q)
            })
            .map(|(k, _)| k)
            .collect();
        if hits.is_empty() {
            return Err(AlgebraError::Malformed(format!(
                "constraint T({}, {}) refers to no degree 0 entry",
                entry.row, entry.col
            )));
        }
        for k in hits {
            let (r, c) = positions[k];
            let value = match entry.value {
                BlockConstraint::Unknown => {
                    explicit_unknown[k] = true;
                    continue;
                }
                BlockConstraint::Zero => Z2::Zero,
                BlockConstraint::Iso => {
                    let rank_row = m0.sets()[template.rows()[r].element].index.rank(template.rows()[r].degree);
                    let rank_col = m1.sets()[template.cols()[c].element].index.rank(template.cols()[c].degree);
                    if rank_row != 1 || rank_col != 1 {
                        return Err(AlgebraError::Malformed(format!(
                            "iso constraint on T({}, {}) needs rank one blocks",
                            entry.row, entry.col
                        )));
                    }
                    Z2::One
                }
            };
            match fixed[k] {
                Some(prev) if prev != value => {
                    return Err(AlgebraError::Malformed(format!(
                        "conflicting constraints on T({}, {})",
                        entry.row, entry.col
                    )))
                }
                _ => fixed[k] = Some(value),
            }
        }
    }
    if let Some(k) = (0..positions.len()).find(|&k| explicit_unknown[k] && fixed[k].is_some()) {
        let (r, c) = positions[k];
        return Err(AlgebraError::Malformed(format!(
            "T({}, {}) is both constrained and declared unknown",
            row_label(r),
            col_label(c)
        )));
    }

    let unknowns: Vec<usize> = (0..positions.len()).filter(|&k| fixed[k].is_none()).collect();
    let (nrows, ncols) = (template.rows().len(), template.cols().len());
    let eq = |i: usize, j: usize| i * ncols + j;

    // contribution of T(r, c) to the equation matrix D0 T + T D1
    let touch = |r: usize, c: usize, out: &mut Vec<usize>| {
        for i in 0..nrows {
            if d0.matrix().get(i, r) {
                out.push(eq(i, c));
            }
        }
        for j in 0..ncols {
            if d1.matrix().get(c, j) {
                out.push(eq(r, j));
            }
        }
    };

    let mut system = Z2Matrix::zeros(nrows * ncols, unknowns.len());
    for (u, &k) in unknowns.iter().enumerate() {
        let (r, c) = positions[k];
        let mut hits = Vec::new();
        touch(r, c, &mut hits);
        for h in hits {
            system.set(h, u, !system.get(h, u));
        }
    }
    let mut rhs = vec![false; nrows * ncols];
    for (k, v) in fixed.iter().enumerate() {
        if *v == Some(Z2::One) {
            let (r, c) = positions[k];
            let mut hits = Vec::new();
            touch(r, c, &mut hits);
            for h in hits {
                rhs[h] ^= true;
            }
        }
    }

    let particular = system.solve(&rhs).ok_or(AlgebraError::NoTransitionMatrix)?;
    let kernel = system.kernel_basis();
    if kernel.len() > SOLUTION_NULLITY_LIMIT {
        return Err(AlgebraError::TooLarge(format!(
            "solution space of dimension {} exceeds {SOLUTION_NULLITY_LIMIT}",
            kernel.len()
        )));
    }

    let build = |values: &[bool]| -> Result<GradedMap, AlgebraError> {
        let mut t = template.clone();
        for (k, v) in fixed.iter().enumerate() {
            if let Some(v) = v {
                let (r, c) = positions[k];
                t.set(r, c, *v)?;
            }
        }
        for (u, &k) in unknowns.iter().enumerate() {
            let (r, c) = positions[k];
            t.set(r, c, Z2::from_bool(values[u]))?;
        }
        Ok(t)
    };

    let mut solutions = Vec::with_capacity(1 << kernel.len());
    for mask in 0u64..1 << kernel.len() {
        let mut values = particular.clone();
        for (b, basis) in kernel.iter().enumerate() {
            if mask >> b & 1 == 1 {
                for (v, &k) in values.iter_mut().zip(basis) {
                    *v ^= k;
                }
            }
        }
        solutions.push(build(&values)?);
    }

    let mut entries = Vec::with_capacity(positions.len());
    for (k, &(r, c)) in positions.iter().enumerate() {
        let status = match fixed[k] {
            Some(v) => EntryStatus::Fixed(v),
            None => {
                let u = unknowns.iter().position(|&x| x == k).expect("unknown index");
                if kernel.iter().any(|b| b[u]) {
                    EntryStatus::Free
                } else {
                    EntryStatus::Forced(Z2::from_bool(particular[u]))
                }
            }
        };
        entries.push(TransitionEntry {
            row: r,
            col: c,
            row_set: row_label(r),
            col_set: col_label(c),
            degree: template.rows()[r].degree,
            status,
        });
    }

    let continued = m0
        .sets()
        .iter()
        .filter(|s| m1.position(&s.label).is_some())
        .map(|s| s.label.clone())
        .collect();

    Ok(TransitionSolution { solution_count: solutions.len(), template, solutions, entries, continued })
}

/// Parameter window `(theta, theta')` between the two decompositions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaWindow {
    pub before: f64,
    pub after: f64,
}

impl fmt::Display for ThetaWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = if self.before <= self.after {
            (self.before, self.after)
        } else {
            (self.after, self.before)
        };
        write!(f, "θ*∈({lo},{hi})")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A forced isomorphism `T(to, from)` between distinct continued sets:
    /// some orbit runs from `M(from)` to `M(to)` inside the window.
    Heteroclinic { from: String, to: String, degree: usize, window: Option<ThetaWindow> },
    /// A forced non-isomorphism on the diagonal block of a continued set:
    /// `M(set)` stops being a Morse set and a homoclinic orbit appears.
    GeneralizedHomoclinic { set: String, degree: usize, window: Option<ThetaWindow> },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (text, window) = match self {
            Certificate::Heteroclinic { from, to, window, .. } => {
                (format!("C(M({from}),M({to})) ≠ ∅"), window)
            }
            Certificate::GeneralizedHomoclinic { set, window, .. } => {
                (format!("homoclinic orbit to M({set})"), window)
            }
        };
        match window {
            Some(w) => write!(f, "{text}, {w}"),
            None => f.write_str(&text),
        }
    }
}

/// Reads bifurcation certificates off the forced (not constraint-fixed)
/// entries. Sets are identified across the window by label.
pub fn infer_bifurcation(solution: &TransitionSolution, window: Option<ThetaWindow>) -> Vec<Certificate> {
    let continued = |l: &str| solution.continued.iter().any(|c| c == l);
    solution
        .forced()
        .filter_map(|e| {
            let EntryStatus::Forced(value) = e.status else { return None };
            if !continued(&e.row_set) || !continued(&e.col_set) {
                return None;
            }
            match (e.is_diagonal(), value) {
                (false, Z2::One) => Some(Certificate::Heteroclinic {
                    from: e.col_set.clone(),
                    to: e.row_set.clone(),
                    degree: e.degree,
                    window,
                }),
                (true, Z2::Zero) => Some(Certificate::GeneralizedHomoclinic {
                    set: e.row_set.clone(),
                    degree: e.degree,
                    window,
                }),
                _ => None,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{conley_index_of, MorseSetKind::*};

    fn pair() -> (MorseDecomposition, GradedMap) {
        let m = MorseDecomposition::from_parts(
            &[("1", "sink", conley_index_of(Sink)), ("2", "saddle", conley_index_of(Saddle))],
            &[("1", "2")],
        )
        .unwrap();
        let d = GradedMap::zero_connection(&m);
        (m, d)
    }

    #[test]
    fn identity_is_the_only_solution_for_equal_zero_maps() {
        let (m, d) = pair();
        let sol =
            solve_transition_matrices(&d, &d, &m, &m, &TransitionConstraint::diagonal_iso(&["1", "2"])).unwrap();
        assert_eq!(sol.solution_count, 1);
        assert!(infer_bifurcation(&sol, None).is_empty());
    }

    #[test]
    fn unconstrained_zero_maps_leave_everything_free() {
        let (m, d) = pair();
        let sol = solve_transition_matrices(&d, &d, &m, &m, &TransitionConstraint::new()).unwrap();
        assert_eq!(sol.solution_count, 4);
        assert!(sol.entries.iter().all(|e| e.status == EntryStatus::Free));
    }

    #[test]
    fn inconsistent_constraints_have_no_solution() {
        // Δ0 has the connection, Δ1 does not; iso on both diagonals is impossible.
        let (m, d1) = pair();
        let mut d0 = d1.clone();
        d0.connect(&m, "1", "2", None).unwrap();
        let err = solve_transition_matrices(&d0, &d1, &m, &m, &TransitionConstraint::diagonal_iso(&["1", "2"]))
            .unwrap_err();
        assert_eq!(err, AlgebraError::NoTransitionMatrix);
    }

    #[test]
    fn constraints_must_hit_structural_entries() {
        let (m, d) = pair();
        let c = TransitionConstraint::new().with("1", "2", BlockConstraint::Iso);
        assert!(matches!(
            solve_transition_matrices(&d, &d, &m, &m, &c),
            Err(AlgebraError::Malformed(_))
        ));
        let c = TransitionConstraint::new().with("1", "9", BlockConstraint::Iso);
        assert!(matches!(
            solve_transition_matrices(&d, &d, &m, &m, &c),
            Err(AlgebraError::UnknownElement(_))
        ));
    }

    #[test]
    fn certificate_text() {
        let w = Some(ThetaWindow { before: 0.02, after: 0.04 });
        let c = Certificate::GeneralizedHomoclinic { set: "2".into(), degree: 1, window: w };
        assert_eq!(c.to_string(), "homoclinic orbit to M(2), θ*∈(0.02,0.04)");
        let c = Certificate::Heteroclinic { from: "2".into(), to: "1".into(), degree: 1, window: None };
        assert_eq!(c.to_string(), "C(M(2),M(1)) ≠ ∅");
    }
}
