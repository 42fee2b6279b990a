//! Evaluation of the coefficient functor on multipaths and coverings, plus
//! the projection chain maps between the complexes of a digraph and of its
//! spanning sub-graphs.
//!
//! A multipath with components `c_0, …, c_k` (component 0 contains the base
//! vertex) is sent to the tensor product `M ⊗ A ⊗ … ⊗ A`, one factor per
//! component. A covering `H ⋖ H ∪ e` merges the source and target
//! components of `e`; the induced map multiplies the two corresponding
//! tensor factors, source factor on the left, and places the product at the
//! merged component's position.

use std::collections::HashMap;

use crate::algebra::{Bimodule, Field, FiniteAlgebra, Scalar};
use crate::complex::{build_complex_over_path_poset, CochainComplex};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::pathposet::{Multipath, PathPoset, Square};
use crate::signs::{find_sign_isomorphism, sigma_e, SignAssignment};

/// Exact sparse matrix in triplet form. Entries are `(row, col, value)`
/// with no explicit zeros and no duplicate coordinates, sorted by
/// `(col, row)`; equality of canonical forms is structural equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, Scalar)>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize, field: &Field) -> SparseMatrix {
        SparseMatrix {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, field.one())).collect(),
        }
    }

    /// Accumulates duplicate coordinates, drops zeros, sorts canonically.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: Vec<(usize, usize, Scalar)>,
        field: &Field,
    ) -> SparseMatrix {
        let mut acc: HashMap<(usize, usize), Scalar> = HashMap::new();
        for (r, c, v) in triplets {
            debug_assert!(r < rows && c < cols);
            match acc.entry((r, c)) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    let sum = field.add(e.get(), &v);
                    *e.get_mut() = sum;
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(v);
                }
            }
        }
        let mut entries: Vec<(usize, usize, Scalar)> = acc
            .into_iter()
            .filter(|(_, v)| !field.is_zero(v))
            .map(|((r, c), v)| (r, c, v))
            .collect();
        entries.sort_by_key(|&(r, c, _)| (c, r));
        SparseMatrix { rows, cols, entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize, field: &Field) -> Scalar {
        self.entries
            .iter()
            .find(|&&(r, c, _)| r == row && c == col)
            .map(|(_, _, v)| v.clone())
            .unwrap_or_else(|| field.zero())
    }

    /// Offsets of each column's entry range (valid because entries are
    /// sorted by column first).
    fn col_ranges(&self) -> Vec<usize> {
        let mut start = vec![0usize; self.cols + 1];
        for &(_, c, _) in &self.entries {
            start[c + 1] += 1;
        }
        for c in 1..=self.cols {
            start[c] += start[c - 1];
        }
        start
    }

    /// Exact matrix product `self · rhs`.
    pub fn mul(&self, rhs: &SparseMatrix, field: &Field) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shapes do not compose");
        let start = self.col_ranges();
        let mut triplets = Vec::new();
        for &(l, j, ref b) in &rhs.entries {
            for &(i, _, ref a) in &self.entries[start[l]..start[l + 1]] {
                triplets.push((i, j, field.mul(a, b)));
            }
        }
        SparseMatrix::from_triplets(self.rows, rhs.cols, triplets, field)
    }

    /// Negates every entry in place.
    pub fn negate(&mut self, field: &Field) {
        for (_, _, v) in &mut self.entries {
            *v = field.neg(v);
        }
    }
}

/// An ordered tensor product of based vector spaces. Basis indices are
/// mixed-radix numbers with the factor for component 0 most significant, so
/// the flat index of digits `(f_0, …, f_k)` is
/// `((f_0·d_1 + f_1)·d_2 + …)·d_k + f_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSpace {
    pub factor_dims: Vec<usize>,
    pub dim: usize,
}

impl TensorSpace {
    pub fn new(factor_dims: Vec<usize>) -> TensorSpace {
        let dim = factor_dims.iter().product();
        TensorSpace { factor_dims, dim }
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.factor_dims.len());
        digits
            .iter()
            .zip(&self.factor_dims)
            .fold(0, |acc, (&f, &d)| {
                debug_assert!(f < d);
                acc * d + f
            })
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factor_dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.factor_dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }
}

/// The coefficient space of a multipath: `M` for the component containing
/// the base vertex (always component 0), one copy of `A` for every other
/// component.
pub fn space_for(h: &Multipath, a: &FiniteAlgebra, m: &Bimodule) -> TensorSpace {
    let mut dims = Vec::with_capacity(h.component_count());
    dims.push(m.dim);
    dims.extend(std::iter::repeat_n(a.dim, h.component_count() - 1));
    TensorSpace::new(dims)
}

/// Matrix of the map that merges the factors at positions `s` and `t` of a
/// tensor space with `count` factors (position 0 holding `M`, the others
/// `A`), multiplying with the factor at `s` on the left. The product lands
/// at the smaller of the two positions; when position 0 is involved the
/// product is the bimodule action (`m·a` if `s = 0`, `a·m` if `t = 0`).
/// All other factors pass through unchanged.
pub fn merge_factors_matrix(
    count: usize,
    s: usize,
    t: usize,
    a: &FiniteAlgebra,
    m: &Bimodule,
) -> SparseMatrix {
    assert!(s != t && s < count && t < count);
    let field = a.field;
    let mut src_dims = vec![m.dim];
    src_dims.extend(std::iter::repeat_n(a.dim, count - 1));
    let src = TensorSpace::new(src_dims);
    let mut dst_dims = vec![m.dim];
    dst_dims.extend(std::iter::repeat_n(a.dim, count - 2));
    let dst = TensorSpace::new(dst_dims);
    let (i, j) = (s.min(t), s.max(t));
    let mut triplets = Vec::new();
    for col in 0..src.dim {
        let f = src.digits(col);
        let product: &[Scalar] = if i == 0 {
            if s == 0 {
                m.right_row(f[0], f[j])
            } else {
                m.left_row(f[j], f[0])
            }
        } else {
            a.mult_row(f[s], f[t])
        };
        // target digits: drop the factor at j, leave a hole at i for the
        // product term (positions below j keep their rank, later ones
        // shift down by one)
        let mut g: Vec<usize> = Vec::with_capacity(f.len() - 1);
        for (h, &d) in f.iter().enumerate() {
            if h != j {
                g.push(d);
            }
        }
        for (k, w) in product.iter().enumerate() {
            if field.is_zero(w) {
                continue;
            }
            g[i] = k;
            triplets.push((dst.index(&g), col, w.clone()));
        }
    }
    SparseMatrix::from_triplets(dst.dim, src.dim, triplets, &field)
}

/// Matrix of the merge map attached to a covering `lower ⋖ upper` of the
/// path poset: the new edge merges the components holding its source and
/// target, and the corresponding tensor factors are multiplied with the
/// source factor on the left. Components keep their minimum vertex, so the
/// merged factor sits at the smaller of the two component positions.
pub fn covering_map(
    p: &PathPoset,
    lower: usize,
    upper: usize,
    a: &FiniteAlgebra,
    m: &Bimodule,
) -> Result<SparseMatrix> {
    let ci = p
        .poset
        .covering_index(lower, upper)
        .ok_or_else(|| Error::validation("not a covering pair"))?;
    let edge = p.poset.coverings[ci].edge;
    let (s, t) = p.st_index(lower, edge);
    if s == t {
        return Err(Error::internal("covering does not merge two components".to_string()));
    }
    let count = p.multipath(lower).component_count();
    Ok(merge_factors_matrix(count, s, t, a, m))
}

/// Functoriality on a single square: the two ways around must give equal
/// matrices.
pub fn verify_square_commutes(
    p: &PathPoset,
    sq: &Square,
    a: &FiniteAlgebra,
    m: &Bimodule,
) -> Result<bool> {
    let field = a.field;
    let via_mid1 = covering_map(p, sq.mid1, sq.top, a, m)?
        .mul(&covering_map(p, sq.bottom, sq.mid1, a, m)?, &field);
    let via_mid2 = covering_map(p, sq.mid2, sq.top, a, m)?
        .mul(&covering_map(p, sq.bottom, sq.mid2, a, m)?, &field);
    Ok(via_mid1 == via_mid2)
}

/// A degreewise linear map between two cochain complexes; `mats[n]` maps
/// degree `n` of the source into degree `n` of the target. Degrees beyond a
/// complex's top level are zero-dimensional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub mats: Vec<SparseMatrix>,
}

impl ChainMap {
    /// `outer ∘ inner`, degreewise.
    pub fn compose(outer: &ChainMap, inner: &ChainMap, field: &Field) -> ChainMap {
        let mats = inner
            .mats
            .iter()
            .enumerate()
            .map(|(n, m)| {
                let o = outer
                    .mats
                    .get(n)
                    .cloned()
                    .unwrap_or_else(|| SparseMatrix::zero(0, m.rows));
                o.mul(m, field)
            })
            .collect();
        ChainMap { mats }
    }

    /// Checks `d_target ∘ f = f ∘ d_source` in every degree.
    pub fn is_chain_map(&self, source: &CochainComplex, target: &CochainComplex) -> bool {
        let field = source.field;
        for n in 0..source.num_degrees() {
            let f_n = match self.mats.get(n) {
                Some(m) => m.clone(),
                None => SparseMatrix::zero(target.dim_at(n), source.dim_at(n)),
            };
            let f_next = match self.mats.get(n + 1) {
                Some(m) => m.clone(),
                None => SparseMatrix::zero(target.dim_at(n + 1), source.dim_at(n + 1)),
            };
            if f_n.cols != source.dim_at(n) || f_n.rows != target.dim_at(n) {
                return false;
            }
            let lhs = target.diff_at(n).mul(&f_n, &field);
            let rhs = f_next.mul(&source.diff_at(n), &field);
            if lhs != rhs {
                return false;
            }
        }
        true
    }
}

/// The projection from the complex of `g` onto the complex of a spanning
/// sub-graph `g_sub`, together with the two complexes it connects.
#[derive(Clone, Debug)]
pub struct Projection {
    pub source: CochainComplex,
    pub target: CochainComplex,
    pub map: ChainMap,
    /// The sign corrector folded into the map, one bit per element of the
    /// sub-graph's path poset.
    pub eta: Vec<bool>,
}

/// Builds π: C*(G) → C*(G′) for a spanning sub-graph G′ ⊆ G: identity on
/// the summands of multipaths that survive in `P(G′)` (twisted by a sign
/// corrector η between the restricted and the native sign assignments),
/// zero on all others. The corrector exists because both assignments are
/// valid on `P(G′)`; in fact the component-index sign of a covering does
/// not depend on the ambient graph, so η comes out identically zero, but it
/// is solved for rather than assumed.
pub fn projection_map(
    g: &Digraph,
    g_sub: &Digraph,
    a: &FiniteAlgebra,
    m: &Bimodule,
) -> Result<Projection> {
    if g_sub.vertex_count() != g.vertex_count() {
        return Err(Error::validation("sub-graph must span the same vertex set"));
    }
    // map each edge of g_sub to its index in g
    let edge_in_g: Vec<usize> = g_sub
        .edges()
        .iter()
        .map(|e| {
            g.edges()
                .binary_search(e)
                .map_err(|_| Error::validation(format!("edge {e:?} is not an edge of the ambient graph")))
        })
        .collect::<Result<_>>()?;

    let big = PathPoset::enumerate(g);
    let small = PathPoset::enumerate(g_sub);
    let eps_big = sigma_e(&big)?;
    let eps_small = sigma_e(&small)?;

    // element of the big poset corresponding to each small element
    let lift = |s: crate::digraph::EdgeSet| {
        let mut bits = crate::digraph::EdgeSet::EMPTY;
        for e in s.iter() {
            bits = bits.with(edge_in_g[e]);
        }
        bits
    };
    let lifted: Vec<usize> = small
        .poset
        .elements
        .iter()
        .map(|&s| {
            big.poset
                .index_of(lift(s))
                .ok_or_else(|| Error::internal("sub-graph multipath missing upstairs".to_string()))
        })
        .collect::<Result<_>>()?;

    // the ambient sign restricted to the sub-poset
    let restricted = SignAssignment {
        values: small
            .poset
            .coverings
            .iter()
            .map(|c| {
                let ci = big
                    .poset
                    .covering_index(lifted[c.lower], lifted[c.upper])
                    .expect("lifted covering exists by downward closure");
                eps_big.values[ci]
            })
            .collect(),
    };
    let eta = find_sign_isomorphism(&small.poset, &restricted, &eps_small)?
        .ok_or_else(|| Error::internal("restricted and native signs are not isomorphic".to_string()))?;

    let source = build_complex_over_path_poset(&big, a, m, &eps_big)?;
    let target = build_complex_over_path_poset(&small, a, m, &eps_small)?;

    // index of the big block holding each big element, per degree
    let mut mats = Vec::new();
    for n in 0..source.num_degrees() {
        let mut triplets = Vec::new();
        for tb in target.blocks_at(n) {
            let upstairs = lifted[tb.element];
            let sb = source
                .blocks_at(n)
                .iter()
                .find(|b| b.element == upstairs)
                .expect("surviving multipath sits in the same degree");
            debug_assert_eq!(sb.dim, tb.dim);
            let one = if eta[tb.element] {
                a.field.neg(&a.field.one())
            } else {
                a.field.one()
            };
            for k in 0..tb.dim {
                triplets.push((tb.offset + k, sb.offset + k, one.clone()));
            }
        }
        mats.push(SparseMatrix::from_triplets(
            target.dim_at(n),
            source.dim_at(n),
            triplets,
            &a.field,
        ));
    }
    Ok(Projection { source, target, map: ChainMap { mats }, eta })
}
