//! Assembly of cochain complexes graded by edge count.
//!
//! A complex is built from a subset poset, a summand dimension per element
//! and a matrix per covering; degree `n` collects the summands of the
//! elements with `n` edges and the differential out of degree `n` stacks
//! the covering matrices, each twisted by the chosen sign assignment.
//! Posets that start above the empty set (their elements all have at least
//! `bottom` edges) produce complexes whose low degrees are zero.

use rayon::prelude::*;

use crate::algebra::{Bimodule, Field, FiniteAlgebra};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::functor::{covering_map, space_for, SparseMatrix};
use crate::pathposet::{PathPoset, SubsetPoset};
use crate::signs::{lex_sign, sigma_e, SignAssignment};

/// One direct summand of a cochain degree: the poset element it belongs
/// to, its offset within the degree and its dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub element: usize,
    pub offset: usize,
    pub dim: usize,
}

/// A cochain complex of finite dimensional spaces over an exact field.
/// `dims[i]` is the dimension in absolute degree `bottom + i` and
/// `diffs[i]` maps that degree one step up.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    pub field: Field,
    pub bottom: usize,
    pub dims: Vec<usize>,
    pub diffs: Vec<SparseMatrix>,
    pub blocks: Vec<Vec<Block>>,
}

impl CochainComplex {
    /// One past the largest degree that can be non-zero.
    pub fn num_degrees(&self) -> usize {
        self.bottom + self.dims.len()
    }

    pub fn dim_at(&self, degree: usize) -> usize {
        degree
            .checked_sub(self.bottom)
            .and_then(|i| self.dims.get(i))
            .copied()
            .unwrap_or(0)
    }

    /// The differential out of `degree`, materialized as a zero matrix of
    /// the right shape when the degree holds no coverings.
    pub fn diff_at(&self, degree: usize) -> SparseMatrix {
        degree
            .checked_sub(self.bottom)
            .and_then(|i| self.diffs.get(i))
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(self.dim_at(degree + 1), self.dim_at(degree)))
    }

    pub fn blocks_at(&self, degree: usize) -> &[Block] {
        degree
            .checked_sub(self.bottom)
            .and_then(|i| self.blocks.get(i))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Signed count of dimensions, which homology must preserve.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let sign = if (self.bottom + i).is_multiple_of(2) { 1 } else { -1 };
                sign * d as i64
            })
            .sum()
    }

    /// Confirms that consecutive differentials compose to zero. A failure
    /// means the complex was assembled from inconsistent data and is
    /// reported as an internal error.
    pub fn verify_d_squared(&self) -> Result<()> {
        for i in 1..self.diffs.len() {
            if !self.diffs[i].mul(&self.diffs[i - 1], &self.field).is_zero() {
                return Err(Error::internal(format!(
                    "differential does not square to zero between degrees {} and {}",
                    self.bottom + i - 1,
                    self.bottom + i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Which sign assignment to build a complex with. Both choices satisfy the
/// square parity condition, so they yield isomorphic complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignChoice {
    /// The component-index sign, defined on path posets.
    SigmaE,
    /// Parity of the number of earlier edges, defined on any subset poset.
    Lex,
}

impl SignChoice {
    pub fn parse(text: &str) -> Result<SignChoice> {
        match text {
            "sigma" => Ok(SignChoice::SigmaE),
            "lex" => Ok(SignChoice::Lex),
            other => Err(Error::validation(format!(
                "unknown sign choice '{other}' (expected 'sigma' or 'lex')"
            ))),
        }
    }
}

/// Generic assembly: `summand_dim` gives the dimension attached to each
/// poset element, `matrix_for` the map attached to each covering (indexed
/// as in `poset.coverings`). Degree matrices are built in parallel.
pub fn build_graded_complex<D, F>(
    poset: &SubsetPoset,
    field: Field,
    sign: &SignAssignment,
    summand_dim: D,
    matrix_for: F,
) -> Result<CochainComplex>
where
    D: Fn(usize) -> usize,
    F: Fn(usize) -> Result<SparseMatrix> + Sync,
{
    if sign.values.len() != poset.coverings.len() {
        return Err(Error::validation("sign assignment does not match the poset"));
    }
    let num_levels = poset.num_levels();
    let mut blocks: Vec<Vec<Block>> = Vec::with_capacity(num_levels);
    let mut dims = Vec::with_capacity(num_levels);
    for level in 0..num_levels {
        let mut offset = 0;
        let level_blocks: Vec<Block> = poset
            .elements_at_level(level)
            .map(|e| {
                let dim = summand_dim(e);
                let b = Block { element: e, offset, dim };
                offset += dim;
                b
            })
            .collect();
        dims.push(offset);
        blocks.push(level_blocks);
    }
    // offset of each element's block within its degree
    let mut elem_offset = vec![0usize; poset.len()];
    for level_blocks in &blocks {
        for b in level_blocks {
            elem_offset[b.element] = b.offset;
        }
    }

    let diffs: Vec<SparseMatrix> = (0..num_levels.saturating_sub(1))
        .into_par_iter()
        .map(|level| {
            let mut triplets = Vec::new();
            for (ci, c) in poset.coverings.iter().enumerate() {
                if poset.level(c.lower) != level {
                    continue;
                }
                let mut mat = matrix_for(ci)?;
                if sign.values[ci] {
                    mat.negate(&field);
                }
                let (ro, co) = (elem_offset[c.upper], elem_offset[c.lower]);
                for (r, cc, v) in mat.entries {
                    triplets.push((ro + r, co + cc, v));
                }
            }
            Ok(SparseMatrix::from_triplets(
                dims[level + 1],
                dims[level],
                triplets,
                &field,
            ))
        })
        .collect::<Result<_>>()?;

    Ok(CochainComplex { field, bottom: poset.min_edges, dims, diffs, blocks })
}

/// The cochain complex of a path poset with coefficients in `(A, M)`.
pub fn build_complex_over_path_poset(
    p: &PathPoset,
    a: &FiniteAlgebra,
    m: &Bimodule,
    sign: &SignAssignment,
) -> Result<CochainComplex> {
    build_graded_complex(
        &p.poset,
        a.field,
        sign,
        |e| space_for(p.multipath(e), a, m).dim,
        |ci| {
            let c = &p.poset.coverings[ci];
            covering_map(p, c.lower, c.upper, a, m)
        },
    )
}

/// Builds the multipath cochain complex of a digraph. The base vertex is
/// moved to label 0 by an internal relabeling, so any vertex may serve as
/// the base; the complex then has `M` on the base component and `A` on the
/// others.
pub fn build_multipath_complex(
    g: &Digraph,
    a: &FiniteAlgebra,
    m: &Bimodule,
    base: usize,
    sign_choice: SignChoice,
) -> Result<CochainComplex> {
    if base >= g.vertex_count() {
        return Err(Error::validation(format!(
            "base vertex {base} out of range for {} vertices",
            g.vertex_count()
        )));
    }
    if m.adim != a.dim || m.field != a.field {
        return Err(Error::validation("bimodule does not match the algebra"));
    }
    let rebased = if base == 0 {
        g.clone()
    } else {
        let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
        perm.swap(0, base);
        g.relabel(&perm)?
    };
    let p = PathPoset::enumerate(&rebased);
    let sign = match sign_choice {
        SignChoice::SigmaE => sigma_e(&p)?,
        SignChoice::Lex => lex_sign(&p.poset),
    };
    let complex = build_complex_over_path_poset(&p, a, m, &sign)?;
    complex.verify_d_squared()?;
    Ok(complex)
}
