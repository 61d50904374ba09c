use serde::Serialize;

use super::decomposition::{Generator, MorseDecomposition};
use super::z2::{Z2Matrix, Z2};
use super::AlgebraError;

/// A degree-tagged Z2 linear map between sums of Conley indices.
///
/// Rows index the target basis, columns the source basis; an entry may be
/// nonzero only when `row.degree == col.degree + degree`. Connection
/// matrices have degree -1 and act on a single decomposition; transition
/// matrices have degree 0 and map the decomposition at `theta'` (columns)
/// to the one at `theta` (rows).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedMap {
    degree: i32,
    rows: Vec<Generator>,
    cols: Vec<Generator>,
    matrix: Z2Matrix,
}

impl GradedMap {
    pub fn zero(degree: i32, rows: Vec<Generator>, cols: Vec<Generator>) -> Self {
        let matrix = Z2Matrix::zeros(rows.len(), cols.len());
        Self { degree, rows, cols, matrix }
    }

    /// Zero degree -1 map on `⊕_p CH_*(M(p))`.
    pub fn zero_connection(m: &MorseDecomposition) -> Self {
        let basis = m.basis();
        Self::zero(-1, basis.clone(), basis)
    }

    /// Zero degree 0 map from the basis of `after` to the basis of `before`.
    pub fn zero_transition(before: &MorseDecomposition, after: &MorseDecomposition) -> Self {
        Self::zero(0, before.basis(), after.basis())
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn rows(&self) -> &[Generator] {
        &self.rows
    }

    pub fn cols(&self) -> &[Generator] {
        &self.cols
    }

    pub fn matrix(&self) -> &Z2Matrix {
        &self.matrix
    }

    pub fn get(&self, r: usize, c: usize) -> Z2 {
        Z2::from_bool(self.matrix.get(r, c))
    }

    pub fn is_structural(&self, r: usize, c: usize) -> bool {
        self.rows[r].degree as i32 == self.cols[c].degree as i32 + self.degree
    }

    /// Positions where the degree allows a nonzero entry.
    pub fn structural_positions(&self) -> Vec<(usize, usize)> {
        (0..self.rows.len())
            .flat_map(|r| (0..self.cols.len()).map(move |c| (r, c)))
            .filter(|&(r, c)| self.is_structural(r, c))
            .collect()
    }

    pub fn set(&mut self, r: usize, c: usize, v: Z2) -> Result<(), AlgebraError> {
        if v.is_one() && !self.is_structural(r, c) {
            return Err(AlgebraError::Malformed(format!(
                "entry ({r}, {c}) joins degrees {} and {} in a degree {} map",
                self.rows[r].degree, self.cols[c].degree, self.degree
            )));
        }
        self.matrix.set(r, c, v.is_one());
        Ok(())
    }

    /// Sets the block `(row element, col element)`; `source_degree` picks the
    /// degree when several blocks are possible.
    pub fn set_block(
        &mut self,
        row_element: usize,
        col_element: usize,
        source_degree: Option<usize>,
        v: Z2,
    ) -> Result<(), AlgebraError> {
        let positions: Vec<(usize, usize)> = self
            .structural_positions()
            .into_iter()
            .filter(|&(r, c)| {
                self.rows[r].element == row_element
                    && self.cols[c].element == col_element
                    && source_degree.is_none_or(|q| self.cols[c].degree == q)
            })
            .collect();
        let degrees: std::collections::BTreeSet<usize> =
            positions.iter().map(|&(_, c)| self.cols[c].degree).collect();
        match degrees.len() {
            0 => Err(AlgebraError::Malformed(format!(
                "no degree {} block from element #{col_element} to element #{row_element}{}",
                self.degree,
                source_degree.map(|q| format!(" in source degree {q}")).unwrap_or_default()
            ))),
            1 => {
                for (r, c) in positions {
                    // blocks of rank > 1 are set to the identity pattern
                    let diag = self.rows[r].copy == self.cols[c].copy;
                    self.matrix.set(r, c, v.is_one() && diag);
                }
                Ok(())
            }
            _ => Err(AlgebraError::Malformed(format!(
                "block from element #{col_element} to element #{row_element} is ambiguous; give the source degree"
            ))),
        }
    }

    /// `Δ(p, q) = iso` addressed by labels.
    pub fn connect(
        &mut self,
        m: &MorseDecomposition,
        target: &str,
        source: &str,
        source_degree: Option<usize>,
    ) -> Result<(), AlgebraError> {
        let p = m.position(target).ok_or_else(|| AlgebraError::UnknownElement(target.into()))?;
        let q = m.position(source).ok_or_else(|| AlgebraError::UnknownElement(source.into()))?;
        self.set_block(p, q, source_degree, Z2::One)
    }

    pub fn with_matrix(&self, matrix: Z2Matrix) -> Result<Self, AlgebraError> {
        if (matrix.rows(), matrix.cols()) != (self.rows.len(), self.cols.len()) {
            return Err(AlgebraError::Malformed("matrix shape does not match the basis".into()));
        }
        Ok(Self { matrix, ..self.clone() })
    }

    pub fn nonzero_entries(&self) -> Vec<(usize, usize)> {
        self.matrix.nonzero_entries().collect()
    }

    pub fn compose(&self, rhs: &GradedMap) -> Result<GradedMap, AlgebraError> {
        if self.cols != rhs.rows {
            return Err(AlgebraError::Malformed("composition of maps with mismatched bases".into()));
        }
        Ok(GradedMap {
            degree: self.degree + rhs.degree,
            rows: self.rows.clone(),
            cols: rhs.cols.clone(),
            matrix: self.matrix.mul(&rhs.matrix),
        })
    }

    pub fn sum(&self, rhs: &GradedMap) -> Result<GradedMap, AlgebraError> {
        if self.rows != rhs.rows || self.cols != rhs.cols || self.degree != rhs.degree {
            return Err(AlgebraError::Malformed("sum of maps with mismatched shapes".into()));
        }
        Ok(GradedMap { matrix: self.matrix.add(&rhs.matrix), ..self.clone() })
    }
}
