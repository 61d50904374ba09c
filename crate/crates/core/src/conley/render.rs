//! Plain-text matrix displays labelled by generators, e.g.
//!
//! ```text
//!         H0(1)  H1(2)  H2(3)
//! H0(1)   0      0      0
//! H1(2)   0      0      iso
//! H2(3)   0      0      0
//! ```

use serde::Serialize;

use super::decomposition::MorseDecomposition;
use super::graded_map::GradedMap;
use super::transition::{EntryStatus, TransitionSolution};
use super::z2::Z2;

/// Row/column labelled matrix of display strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixView {
    pub name: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

impl MatrixView {
    pub fn of_map(name: &str, map: &GradedMap, rows: &MorseDecomposition, cols: &MorseDecomposition) -> Self {
        let row_names: Vec<String> = map.rows().iter().map(|&g| rows.generator_name(g)).collect();
        let col_names: Vec<String> = map.cols().iter().map(|&g| cols.generator_name(g)).collect();
        let entries = (0..row_names.len())
            .map(|r| (0..col_names.len()).map(|c| map.get(r, c).to_string()).collect())
            .collect();
        Self { name: name.into(), rows: row_names, cols: col_names, entries }
    }

    /// Transition matrix with `*` for entries left undetermined.
    pub fn of_transition(
        name: &str,
        solution: &TransitionSolution,
        before: &MorseDecomposition,
        after: &MorseDecomposition,
    ) -> Self {
        let mut view = Self::of_map(name, &solution.template, before, after);
        for e in &solution.entries {
            view.entries[e.row][e.col] = match e.status {
                EntryStatus::Fixed(v) | EntryStatus::Forced(v) => v.to_string(),
                EntryStatus::Free => "*".into(),
            };
        }
        view
    }

    pub fn entry(&self, row: &str, col: &str) -> Option<&str> {
        let r = self.rows.iter().position(|n| n == row)?;
        let c = self.cols.iter().position(|n| n == col)?;
        Some(&self.entries[r][c])
    }

    pub fn render(&self) -> String {
        let width = self
            .rows
            .iter()
            .chain(&self.cols)
            .map(|s| s.chars().count())
            .chain(std::iter::once(Z2::One.to_string().len()))
            .max()
            .unwrap_or(1)
            + 2;
        let pad = |s: &str| format!("{s:<width$}");
        let mut out = format!("{} =\n", self.name);
        out.push_str(&pad(""));
        for c in &self.cols {
            out.push_str(&pad(c));
        }
        out.push('\n');
        for (r, row) in self.rows.iter().enumerate() {
            out.push_str(&pad(row));
            for v in &self.entries[r] {
                out.push_str(&pad(v));
            }
            out.push('\n');
        }
        out.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
    }
}
