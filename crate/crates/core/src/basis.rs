//! Basis ordering and Pauli operators.
//!
//! States are written in the ordered basis {A↑, B↑, A↓, B↓}: the sublattice
//! (pseudospin) index runs fastest and spin is the slow index, so
//! `index = 2 * spin + sublattice` with A = 0, B = 1 and ↑ = 0, ↓ = 1.
//! Every operator of the form σ ⊗ s is assembled by [`pseudo_spin`], which is
//! the only place that knows this layout.

use crate::linalg::{Mat2, Mat4, C64, I, ONE, ZERO};

pub const SIGMA_0: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const SIGMA_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const SIGMA_Y: Mat2 = [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]];
pub const SIGMA_Z: Mat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];

pub const PAULI_XYZ: [Mat2; 3] = [SIGMA_X, SIGMA_Y, SIGMA_Z];

/// Flat index of the basis state |sublattice, spin⟩.
#[inline]
pub const fn index(sublattice: usize, spin: usize) -> usize {
    2 * spin + sublattice
}

/// Matrix of σ ⊗ s, pseudospin operator `sigma` acting on the sublattice and
/// `s` acting on spin.
pub fn pseudo_spin(sigma: &Mat2, s: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for p_row in 0..2 {
        for s_row in 0..2 {
            for p_col in 0..2 {
                for s_col in 0..2 {
                    out[index(p_row, s_row)][index(p_col, s_col)] =
                        sigma[p_row][p_col] * s[s_row][s_col];
                }
            }
        }
    }
    out
}
