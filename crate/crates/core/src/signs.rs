//! Sign assignments on subset posets.
//!
//! A sign assignment labels every covering `x ⋖ y` with a bit ε_{x,y} so
//! that around every square `x ⋖ y, y′ ⋖ z` the four labels sum to 1 mod 2.
//! This module provides the two concrete assignments the engine uses (the
//! component-index sign σ_e on path posets and the lexicographic sign on
//! arbitrary subset posets), the square-parity verifier, the GF(2) solver
//! that produces isomorphisms between assignments, and the small CW complex
//! whose ℤ₂ cohomology controls existence and uniqueness of assignments.

use crate::error::{Error, Result};
use crate::pathposet::{PathPoset, SubsetPoset};

/// One bit per covering, indexed by the poset's canonical covering order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    pub values: Vec<bool>,
}

/// σ_e expressed through the component indices `s` and `t` of the added
/// edge's endpoints alone.
pub fn sigma_of_indices(s: usize, t: usize) -> bool {
    if t > s {
        (t + 1) % 2 == 1
    } else {
        s % 2 == 1
    }
}

/// The sign σ_e on a path poset: for a covering `H ⋖ H ∪ e`, the parity of
/// `t(e,H) + 1` when the target component index exceeds the source one, and
/// of `s(e,H)` otherwise. Adding an edge inside `P(G)` always merges two
/// distinct components, so the two indices never coincide; hitting that
/// case anyway is an internal invariant breach.
pub fn sigma_e(p: &PathPoset) -> Result<SignAssignment> {
    let mut values = Vec::with_capacity(p.poset.coverings.len());
    for c in &p.poset.coverings {
        let (s, t) = p.st_index(c.lower, c.edge);
        if s == t {
            return Err(Error::internal(format!(
                "covering {} ⋖ {} does not merge two components",
                p.poset.elements[c.lower], p.poset.elements[c.upper]
            )));
        }
        values.push(sigma_of_indices(s, t));
    }
    Ok(SignAssignment { values })
}

/// σ_e on a single covering pair, identified by element indices.
pub fn sigma_e_value(p: &PathPoset, lower: usize, upper: usize) -> Result<bool> {
    let ci = p
        .poset
        .covering_index(lower, upper)
        .ok_or_else(|| Error::validation("not a covering pair"))?;
    let c = p.poset.coverings[ci];
    let (s, t) = p.st_index(c.lower, c.edge);
    if s == t {
        return Err(Error::internal("covering does not merge two components".to_string()));
    }
    Ok(sigma_of_indices(s, t))
}

/// The lexicographic sign on any subset poset: for `H ⋖ H ∪ e`, the parity
/// of the number of edges of `H` preceding `e` in the edge order.
pub fn lex_sign(poset: &SubsetPoset) -> SignAssignment {
    let values = poset
        .coverings
        .iter()
        .map(|c| {
            let earlier = poset.elements[c.lower].bits() & ((1u64 << c.edge) - 1);
            earlier.count_ones() % 2 == 1
        })
        .collect();
    SignAssignment { values }
}

/// Lexicographic sign of a single covering pair.
pub fn lex_sign_value(poset: &SubsetPoset, lower: usize, upper: usize) -> Result<bool> {
    let ci = poset
        .covering_index(lower, upper)
        .ok_or_else(|| Error::validation("not a covering pair"))?;
    let c = poset.coverings[ci];
    let earlier = poset.elements[c.lower].bits() & ((1u64 << c.edge) - 1);
    Ok(earlier.count_ones() % 2 == 1)
}

/// Checks the square condition on every square; returns the indices of the
/// violated squares (empty means `eps` is a sign assignment).
pub fn verify_sign(poset: &SubsetPoset, eps: &SignAssignment) -> Result<Vec<usize>> {
    if eps.values.len() != poset.coverings.len() {
        return Err(Error::validation(
            "sign assignment does not cover every covering relation",
        ));
    }
    let value = |lo: usize, up: usize| -> Result<bool> {
        poset
            .covering_index(lo, up)
            .map(|i| eps.values[i])
            .ok_or_else(|| Error::validation("square boundary covering missing"))
    };
    let mut violations = Vec::new();
    for (i, sq) in poset.squares.iter().enumerate() {
        let total = value(sq.bottom, sq.mid1)?
            ^ value(sq.mid1, sq.top)?
            ^ value(sq.bottom, sq.mid2)?
            ^ value(sq.mid2, sq.top)?;
        if !total {
            violations.push(i);
        }
    }
    Ok(violations)
}

/// Solves for η: elements → ℤ₂ with η(x) + ε′_{x,y} = ε_{x,y} + η(y) on
/// every covering; such an η turns the complex signed by ε′ into the one
/// signed by ε via (−1)^η on each summand. Solutions are canonicalized by
/// setting free variables to 0. `None` means the two assignments are not
/// isomorphic over this poset.
pub fn find_sign_isomorphism(
    poset: &SubsetPoset,
    eps: &SignAssignment,
    eps_prime: &SignAssignment,
) -> Result<Option<Vec<bool>>> {
    if eps.values.len() != poset.coverings.len() || eps_prime.values.len() != poset.coverings.len()
    {
        return Err(Error::validation(
            "sign assignment does not cover every covering relation",
        ));
    }
    let n = poset.len();
    let equations = poset
        .coverings
        .iter()
        .enumerate()
        .map(|(i, c)| {
            (
                bit_row(n, [c.lower, c.upper]),
                eps.values[i] ^ eps_prime.values[i],
            )
        })
        .collect();
    Ok(gf2_solve(n, equations))
}

/// Checks the defining equation of a sign-assignment isomorphism on every
/// covering.
pub fn is_sign_isomorphism(
    poset: &SubsetPoset,
    eps: &SignAssignment,
    eps_prime: &SignAssignment,
    eta: &[bool],
) -> bool {
    eta.len() == poset.len()
        && poset.coverings.iter().enumerate().all(|(i, c)| {
            eta[c.lower] ^ eps_prime.values[i] == eps.values[i] ^ eta[c.upper]
        })
}

/// The CW complex of a poset: one 0-cell per element, one 1-cell per
/// covering, one 2-cell per square (glued along its four boundary
/// coverings), and nothing above. Cells are explicit so tests can build
/// fragments by hand.
#[derive(Clone, Debug)]
pub struct PosetCW {
    pub num_vertices: usize,
    pub one_cells: Vec<(usize, usize)>,
    /// Indices into `one_cells` of each square's boundary.
    pub two_cells: Vec<[usize; 4]>,
}

impl PosetCW {
    pub fn from_poset(poset: &SubsetPoset) -> PosetCW {
        let one_cells = poset.coverings.iter().map(|c| (c.lower, c.upper)).collect();
        let two_cells = poset
            .squares
            .iter()
            .map(|sq| {
                let ci = |lo, up| {
                    poset
                        .covering_index(lo, up)
                        .expect("squares are bounded by four coverings")
                };
                [
                    ci(sq.bottom, sq.mid1),
                    ci(sq.mid1, sq.top),
                    ci(sq.bottom, sq.mid2),
                    ci(sq.mid2, sq.top),
                ]
            })
            .collect();
        PosetCW { num_vertices: poset.len(), one_cells, two_cells }
    }

    /// Dimensions of H⁰, H¹, H² with ℤ₂ coefficients, via the ranks of the
    /// two incidence matrices. With no 3-cells, H² is simply the cokernel
    /// dimension of the top map.
    pub fn z2_cohomology_dims(&self) -> (usize, usize, usize) {
        let r0 = gf2_rank(
            self.num_vertices,
            self.one_cells
                .iter()
                .map(|&(a, b)| bit_row(self.num_vertices, [a, b]))
                .collect(),
        );
        let r1 = gf2_rank(
            self.one_cells.len(),
            self.two_cells
                .iter()
                .map(|cell| bit_row(self.one_cells.len(), cell.iter().copied()))
                .collect(),
        );
        (
            self.num_vertices - r0,
            self.one_cells.len() - r0 - r1,
            self.two_cells.len() - r1,
        )
    }
}

/// ℤ₂ cohomology dimensions (H⁰, H¹, H²) of the poset's CW complex. A
/// vanishing H¹ together with the odd-parity cochain being a cocycle is
/// what guarantees sign assignments exist and are unique up to isomorphism.
pub fn cw_z2_cohomology_dims(poset: &SubsetPoset) -> (usize, usize, usize) {
    PosetCW::from_poset(poset).z2_cohomology_dims()
}

fn bit_row(ncols: usize, cols: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut row = vec![0u64; ncols.div_ceil(64)];
    for c in cols {
        row[c / 64] |= 1 << (c % 64);
    }
    row
}

fn first_set_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Rank over GF(2) of a list of bit-packed rows.
fn gf2_rank(ncols: usize, rows: Vec<Vec<u64>>) -> usize {
    let mut pivots: Vec<Option<Vec<u64>>> = vec![None; ncols];
    let mut rank = 0;
    for mut row in rows {
        while let Some(col) = first_set_bit(&row) {
            if pivots[col].is_none() {
                pivots[col] = Some(row);
                rank += 1;
                break;
            }
            let prow = pivots[col].as_ref().unwrap();
            for (w, pw) in row.iter_mut().zip(prow.iter()) {
                *w ^= *pw;
            }
        }
    }
    rank
}

/// Solves a GF(2) linear system; free variables are set to 0 so the answer
/// is deterministic. `None` on inconsistency.
fn gf2_solve(ncols: usize, equations: Vec<(Vec<u64>, bool)>) -> Option<Vec<bool>> {
    let mut pivots: Vec<Option<(Vec<u64>, bool)>> = vec![None; ncols];
    for (mut row, mut rhs) in equations {
        let mut placed = false;
        while let Some(col) = first_set_bit(&row) {
            if pivots[col].is_none() {
                pivots[col] = Some((row, rhs));
                placed = true;
                break;
            }
            let (prow, prhs) = pivots[col].as_ref().unwrap();
            for (w, pw) in row.iter_mut().zip(prow.iter()) {
                *w ^= *pw;
            }
            rhs ^= *prhs;
        }
        if !placed && rhs {
            return None;
        }
    }
    let mut x = vec![false; ncols];
    for col in (0..ncols).rev() {
        if let Some((row, rhs)) = &pivots[col] {
            let mut v = *rhs;
            for c in col + 1..ncols {
                if row[c / 64] >> (c % 64) & 1 == 1 && x[c] {
                    v = !v;
                }
            }
            x[col] = v;
        }
    }
    Some(x)
}
