#![allow(dead_code)]

use std::collections::HashSet;

use vdp_conley::conley::{ElementSet, GradedIndex, GradedMap, MatrixView, MorseDecomposition, Scenario};

/// A published connection matrix: generator names and a 0/1 grid
/// (1 for an isomorphism).
pub struct ReferenceMatrix {
    pub name: &'static str,
    pub preset: &'static str,
    pub after: bool,
    pub basis: &'static [&'static str],
    pub grid: &'static [&'static [u8]],
}

pub const REFERENCE_MATRICES: [ReferenceMatrix; 8] = [
    ReferenceMatrix {
        name: "Δ⁰₀",
        preset: "example4.1",
        after: false,
        basis: &["H0(1)", "H0(pi)", "H1(pi)", "H1(2)", "H2(3)"],
        grid: &[&[0, 0, 0, 1, 0], &[0, 0, 0, 1, 0], &[0, 0, 0, 0, 1], &[0, 0, 0, 0, 0], &[0, 0, 0, 0, 0]],
    },
    ReferenceMatrix {
        name: "Δ¹₁",
        preset: "example4.1",
        after: true,
        basis: &["H0(1)", "H1(2)", "H2(3)"],
        grid: &[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]],
    },
    ReferenceMatrix {
        name: "Δ⁰₂",
        preset: "example4.2-het1",
        after: false,
        basis: &["H0(1)", "H1(2)", "H1(3)"],
        grid: &[&[0, 1, 1], &[0, 0, 0], &[0, 0, 0]],
    },
    ReferenceMatrix {
        name: "Δ¹₃",
        preset: "example4.2-het1",
        after: true,
        basis: &["H0(1)", "H1(2)", "H1(3)"],
        grid: &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]],
    },
    ReferenceMatrix {
        name: "Δ⁰₄",
        preset: "example4.2-hom",
        after: false,
        basis: &["H0(pi)", "H1(pi)", "H1(1)", "H1(2)", "H2(3)"],
        grid: &[&[0, 0, 1, 0, 0], &[0, 0, 0, 0, 1], &[0, 0, 0, 0, 0], &[0, 0, 0, 0, 0], &[0, 0, 0, 0, 0]],
    },
    ReferenceMatrix {
        name: "Δ¹₅",
        preset: "example4.2-hom",
        after: true,
        basis: &["H1(1)", "H1(2)", "H2(3)"],
        grid: &[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]],
    },
    ReferenceMatrix {
        name: "Δ⁰₆",
        preset: "example4.2-het2",
        after: false,
        basis: &["H1(1)", "H1(2)", "H2(3)"],
        grid: &[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]],
    },
    ReferenceMatrix {
        name: "Δ¹₇",
        preset: "example4.2-het2",
        after: true,
        basis: &["H1(1)", "H1(2)", "H2(3)"],
        grid: &[&[0, 0, 1], &[0, 0, 1], &[0, 0, 0]],
    },
];

impl ReferenceMatrix {
    pub fn side(&self) -> (MorseDecomposition, GradedMap) {
        let s = Scenario::preset(self.preset).expect("preset");
        if self.after {
            (s.after, s.after_connection)
        } else {
            (s.before, s.before_connection)
        }
    }

    /// Whether the preset reproduces this display entry for entry.
    pub fn matches_preset(&self) -> bool {
        let (m, d) = self.side();
        let view = MatrixView::of_map(self.name, &d, &m, &m);
        view.rows == self.basis
            && view.cols == self.basis
            && view.entries.iter().zip(self.grid).all(|(row, want)| {
                row.iter().zip(*want).all(|(got, &w)| got == if w == 1 { "iso" } else { "0" })
            })
    }
}

/// Graded homology of `Δ` restricted to `interval`, by enumerating every
/// chain: `|ker ∂_q| = 2^k`, `|im ∂_{q+1}| = 2^i`, rank `k - i`.
pub fn brute_force_homology(d: &GradedMap, interval: ElementSet) -> GradedIndex {
    let gens: Vec<Vec<usize>> = (0..3)
        .map(|q| {
            (0..d.rows().len())
                .filter(|&i| d.rows()[i].degree == q && interval.contains(d.rows()[i].element))
                .collect()
        })
        .collect();
    let image = |src: &[usize], tgt: &[usize], v: u64| -> u64 {
        let mut out = 0u64;
        for (bi, &r) in tgt.iter().enumerate() {
            let mut bit = false;
            for (bj, &c) in src.iter().enumerate() {
                if v >> bj & 1 == 1 && d.matrix().get(r, c) {
                    bit = !bit;
                }
            }
            if bit {
                out |= 1 << bi;
            }
        }
        out
    };
    let log2 = |n: usize| n.trailing_zeros() as usize;
    let mut ranks = [0usize; 3];
    for q in 0..3 {
        let cq = &gens[q];
        let kernel = if q == 0 {
            1usize << cq.len()
        } else {
            (0..1u64 << cq.len()).filter(|&v| image(cq, &gens[q - 1], v) == 0).count()
        };
        let im = if q == 2 {
            1
        } else {
            let up = &gens[q + 1];
            (0..1u64 << up.len()).map(|v| image(up, cq, v)).collect::<HashSet<_>>().len()
        };
        ranks[q] = log2(kernel) - log2(im);
    }
    GradedIndex::from_ranks(ranks)
}
