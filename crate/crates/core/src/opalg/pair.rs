//! Structural operators on the two-copy space `H_d ⊗ H_d`.
//!
//! Basis states `|a, b⟩` are addressed by index positions `a, b ∈ 0..d`
//! and flattened as `a * d + b`. Ladder offsets are residues modulo `d`;
//! because every index set used in this crate is a complete residue system,
//! adding an offset to a position modulo `d` is the same as adding it to the
//! label and reducing back into the index set.

use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

#[inline]
pub fn pair_index(a: usize, b: usize, d: usize) -> usize {
    a * d + b
}

#[inline]
pub(crate) fn shift(a: usize, u: usize, d: usize) -> usize {
    (a + u) % d
}

/// Reduces a signed offset to its residue in `0..d`.
pub fn offset_residue(u: i64, d: usize) -> usize {
    u.rem_euclid(d as i64) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// `I = Σ_ab |ab⟩⟨ab|`
    Identity,
    /// `F = Σ_ab |ab⟩⟨ba|`
    Swap,
    /// `E = Σ_a |aa⟩⟨aa|`
    DiagProjector,
    /// `L_u = Σ_a |a,a+u⟩⟨a,a+u|`
    LadderDiag(i64),
    /// `M_u = Σ_a |a,a+u⟩⟨a+u,a|`
    LadderSwap(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairBasisOperator {
    kind: PairKind,
    d: usize,
}

impl PairBasisOperator {
    pub fn new(kind: PairKind, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("single-copy dimension must be positive".into()));
        }
        if let PairKind::LadderDiag(u) | PairKind::LadderSwap(u) = kind {
            if offset_residue(u, d) == 0 {
                return Err(Error::Parameter(format!("ladder offset {u} is 0 modulo {d}")));
            }
        }
        Ok(Self { kind, d })
    }

    pub fn identity(d: usize) -> Self {
        Self { kind: PairKind::Identity, d }
    }

    pub fn swap(d: usize) -> Self {
        Self { kind: PairKind::Swap, d }
    }

    pub fn diag_projector(d: usize) -> Self {
        Self { kind: PairKind::DiagProjector, d }
    }

    pub fn kind(&self) -> PairKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Nonzero entries as `(row, col, value)`; every value is 1.
    pub fn entries(&self) -> Vec<(usize, usize, C64)> {
        let d = self.d;
        let one = C64::new(1.0, 0.0);
        match self.kind {
            PairKind::Identity => (0..d * d).map(|k| (k, k, one)).collect(),
            PairKind::Swap => (0..d)
                .flat_map(|a| (0..d).map(move |b| (pair_index(a, b, d), pair_index(b, a, d), one)))
                .collect(),
            PairKind::DiagProjector => (0..d).map(|a| (pair_index(a, a, d), pair_index(a, a, d), one)).collect(),
            PairKind::LadderDiag(u) => {
                let u = offset_residue(u, d);
                (0..d)
                    .map(|a| {
                        let k = pair_index(a, shift(a, u, d), d);
                        (k, k, one)
                    })
                    .collect()
            }
            PairKind::LadderSwap(u) => {
                let u = offset_residue(u, d);
                (0..d)
                    .map(|a| {
                        let b = shift(a, u, d);
                        (pair_index(a, b, d), pair_index(b, a, d), one)
                    })
                    .collect()
            }
        }
    }

    /// Dense `d² × d²` matrix.
    pub fn materialize(&self) -> ComplexMatrix {
        let n = self.d * self.d;
        let mut m = ComplexMatrix::zeros(n, n);
        for (r, c, v) in self.entries() {
            m.set(r, c, v);
        }
        m
    }
}

/// `Tr(F X)` for an operator on the two-copy space.
pub fn swap_trace(x: &ComplexMatrix, d: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..d {
        for b in 0..d {
            acc += x.get(pair_index(b, a, d), pair_index(a, b, d));
        }
    }
    acc
}
