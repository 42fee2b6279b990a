//! Directed graphs with the canonical orderings everything downstream
//! relies on: vertices are 0-based indices ordered as integers, and the
//! edge list is kept sorted lexicographically by (source, target), so edge
//! indices are stable across runs.

use std::fmt;
use std::ops::{BitAnd, BitOr};

use crate::error::{Error, Result};

/// Edge subsets are packed into a single machine word, which caps the
/// supported graph size. Path posets grow exponentially anyway, so the cap
/// is never the binding constraint in practice.
pub const MAX_VERTICES: usize = 64;
pub const MAX_EDGES: usize = 64;

/// A set of edge indices of some fixed digraph, packed into one `u64`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct EdgeSet(u64);

impl EdgeSet {
    pub const EMPTY: EdgeSet = EdgeSet(0);

    pub fn from_bits(bits: u64) -> EdgeSet {
        EdgeSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> EdgeSet {
        EdgeSet(1 << i)
    }

    /// The full subset `{0, …, n-1}`.
    pub fn full(n: usize) -> EdgeSet {
        if n >= 64 {
            EdgeSet(u64::MAX)
        } else {
            EdgeSet((1u64 << n) - 1)
        }
    }

    pub fn from_indices(indices: &[usize]) -> EdgeSet {
        indices.iter().fold(EdgeSet::EMPTY, |s, &i| s.with(i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> EdgeSet {
        EdgeSet(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> EdgeSet {
        EdgeSet(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: EdgeSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Edge indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Parses a hex literal with optional `0x` prefix, as used in matching
    /// files.
    pub fn parse_hex(text: &str) -> Result<EdgeSet> {
        let t = text.trim();
        let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
        u64::from_str_radix(t, 16)
            .map(EdgeSet)
            .map_err(|_| Error::validation(format!("bad hex edge set `{text}`")))
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:x}", self.0)
    }
}

impl BitOr for EdgeSet {
    type Output = EdgeSet;
    fn bitor(self, rhs: EdgeSet) -> EdgeSet {
        EdgeSet(self.0 | rhs.0)
    }
}

impl BitAnd for EdgeSet {
    type Output = EdgeSet;
    fn bitand(self, rhs: EdgeSet) -> EdgeSet {
        EdgeSet(self.0 & rhs.0)
    }
}

/// A finite directed graph without self-loops. Digons (both orientations
/// between the same pair of vertices) are allowed. Construction sorts the
/// edges, so the lexicographic edge order is an invariant of the value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(vertex_count: usize, mut edges: Vec<(usize, usize)>) -> Result<Digraph> {
        if vertex_count == 0 {
            return Err(Error::validation("a digraph needs at least one vertex"));
        }
        if vertex_count > MAX_VERTICES {
            return Err(Error::validation(format!(
                "at most {MAX_VERTICES} vertices are supported, got {vertex_count}"
            )));
        }
        if edges.len() > MAX_EDGES {
            return Err(Error::validation(format!(
                "at most {MAX_EDGES} edges are supported, got {}",
                edges.len()
            )));
        }
        edges.sort_unstable();
        for &(u, v) in &edges {
            if u == v {
                return Err(Error::validation(format!("self-loop at vertex {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::validation(format!(
                    "edge ({u},{v}) mentions a vertex outside 0..{vertex_count}"
                )));
            }
        }
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::validation("duplicate directed edge"));
        }
        Ok(Digraph { vertex_count, edges })
    }

    /// The coherently oriented line `I_n`: vertices `0..=n`, edges `i → i+1`.
    pub fn coherent_line(n: usize) -> Digraph {
        let edges = (0..n).map(|i| (i, i + 1)).collect();
        Digraph::new(n + 1, edges).expect("lines are always valid")
    }

    /// The coherently oriented polygon `P_n`: the line `I_n` closed up by
    /// the extra edge `n → 0`. `P_1` is the digon.
    pub fn coherent_polygon(n: usize) -> Digraph {
        let mut edges: Vec<_> = (0..n).map(|i| (i, i + 1)).collect();
        edges.push((n, 0));
        Digraph::new(n + 1, edges).expect("polygons are always valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> (usize, usize) {
        self.edges[i]
    }

    /// Applies a vertex relabelling; `perm[v]` is the new name of `v`. The
    /// result re-sorts its edge list, which is how a non-default base vertex
    /// is threaded through the engine.
    pub fn relabel(&self, perm: &[usize]) -> Result<Digraph> {
        if perm.len() != self.vertex_count {
            return Err(Error::validation("relabelling has wrong length"));
        }
        let mut seen = vec![false; self.vertex_count];
        for &p in perm {
            if p >= self.vertex_count || seen[p] {
                return Err(Error::validation("relabelling is not a permutation"));
            }
            seen[p] = true;
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Digraph::new(self.vertex_count, edges)
    }

    /// Forgets orientations. Digons stay two distinct parallel edges; the
    /// chromatic complex needs multigraph semantics so that dimensions keep
    /// matching the directed side. Edge order (and hence edge indices) is
    /// inherited from the digraph.
    pub fn underlying_unoriented(&self) -> UnorientedGraph {
        UnorientedGraph {
            vertex_count: self.vertex_count,
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| (u.min(v), u.max(v)))
                .collect(),
        }
    }

    /// Weak connectivity (ignoring orientation).
    pub fn is_connected(&self) -> bool {
        self.underlying_unoriented()
            .component_partition(EdgeSet::full(self.edges.len()))
            .len()
            == 1
    }

    /// Serializes back to the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("vertices {}\n", self.vertex_count);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Parses the edge-list format: first content line `vertices N`, then one
/// `u v` line per directed edge u→v. `#` starts a comment; blank lines are
/// ignored.
pub fn parse_edge_list(text: &str) -> Result<Digraph> {
    let mut vertex_count: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut fields = content.split_whitespace();
        match vertex_count {
            None => {
                if fields.next() != Some("vertices") {
                    return Err(Error::Parse {
                        line,
                        msg: "expected `vertices N` header".into(),
                    });
                }
                let n = fields
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or(Error::Parse {
                        line,
                        msg: "expected `vertices N` header".into(),
                    })?;
                if fields.next().is_some() {
                    return Err(Error::Parse {
                        line,
                        msg: "trailing tokens after header".into(),
                    });
                }
                vertex_count = Some(n);
            }
            Some(_) => {
                let parse = |t: Option<&str>| t.and_then(|t| t.parse::<usize>().ok());
                let (u, v) = match (parse(fields.next()), parse(fields.next()), fields.next()) {
                    (Some(u), Some(v), None) => (u, v),
                    _ => {
                        return Err(Error::Parse {
                            line,
                            msg: "expected `u v` edge line".into(),
                        })
                    }
                };
                edges.push((u, v));
            }
        }
    }
    let vertex_count = vertex_count.ok_or(Error::Parse {
        line: text.lines().count() + 1,
        msg: "missing `vertices N` header".into(),
    })?;
    Digraph::new(vertex_count, edges)
}

/// True iff `phi` (indexed by vertices of `g1`) is injective and maps every
/// edge of `g1` onto an edge of `g2`. Collapsing an edge is therefore never
/// allowed.
pub fn is_regular_embedding(phi: &[usize], g1: &Digraph, g2: &Digraph) -> bool {
    if phi.len() != g1.vertex_count() {
        return false;
    }
    let mut hit = vec![false; g2.vertex_count()];
    for &p in phi {
        if p >= g2.vertex_count() || hit[p] {
            return false;
        }
        hit[p] = true;
    }
    g1.edges
        .iter()
        .all(|&(u, v)| g2.edges.binary_search(&(phi[u], phi[v])).is_ok())
}

/// An unoriented multigraph, produced from a digraph by forgetting the
/// orientations. Edge indices match the parent digraph's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnorientedGraph {
    pub vertex_count: usize,
    /// Endpoint pairs with the smaller vertex first; parallel edges allowed.
    pub edges: Vec<(usize, usize)>,
}

impl UnorientedGraph {
    /// Connected components of the spanning sub-graph with the given edge
    /// subset. Every vertex appears; components are listed by their minimum
    /// vertex and sorted internally.
    pub fn component_partition(&self, subset: EdgeSet) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(parent: &mut [usize], v: usize) -> usize {
            let mut r = v;
            while parent[r] != r {
                r = parent[r];
            }
            let mut w = v;
            while parent[w] != r {
                let next = parent[w];
                parent[w] = r;
                w = next;
            }
            r
        }
        for i in subset.iter() {
            let (u, v) = self.edges[i];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut group_of = vec![usize::MAX; self.vertex_count];
        for v in 0..self.vertex_count {
            let r = find(&mut parent, v);
            if group_of[r] == usize::MAX {
                group_of[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[group_of[r]].push(v);
        }
        // Vertices were visited in increasing order, so each group is sorted
        // and groups are already ordered by their minimum vertex.
        groups
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_coherent_line() {
        let g = parse_edge_list("vertices 3\n0 1\n1 2").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g, Digraph::coherent_line(2));
    }

    #[test]
    fn parses_noncoherent_line_and_comments() {
        let g = parse_edge_list("# a line whose edges point at the middle\nvertices 3\n\n0 1\n2 1\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 1)]);
    }

    #[test]
    fn rejects_self_loop() {
        let err = parse_edge_list("vertices 2\n0 0").unwrap_err();
        assert!(err.to_string().contains("self-loop"));
    }

    #[test]
    fn rejects_duplicate_edge() {
        assert!(parse_edge_list("vertices 2\n0 1\n0 1").is_err());
    }

    #[test]
    fn rejects_out_of_range_vertex() {
        assert!(parse_edge_list("vertices 2\n0 3").is_err());
    }

    #[test]
    fn reports_line_numbers_for_malformed_input() {
        match parse_edge_list("vertices 2\nnonsense") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_edge_list("verts 2") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_edge_list("# nothing here\n").is_err());
    }

    #[test]
    fn edges_are_sorted_regardless_of_input_order() {
        let g = parse_edge_list("vertices 4\n2 3\n0 1\n1 2").unwrap();
        assert!(g.edges().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.edge(0), (0, 1));
    }

    #[test]
    fn digon_is_allowed_and_keeps_two_unoriented_edges() {
        let g = Digraph::coherent_polygon(1);
        assert_eq!(g.edges(), &[(0, 1), (1, 0)]);
        let u = g.underlying_unoriented();
        assert_eq!(u.edges, vec![(0, 1), (0, 1)]);
    }

    #[test]
    fn unoriented_single_vertex_has_no_edges() {
        let g = Digraph::new(1, vec![]).unwrap();
        assert!(g.underlying_unoriented().edges.is_empty());
        assert!(g.is_connected());
    }

    #[test]
    fn component_partition_of_line() {
        let g = parse_edge_list("vertices 3\n0 1\n2 1").unwrap();
        let u = g.underlying_unoriented();
        assert_eq!(
            u.component_partition(EdgeSet::EMPTY),
            vec![vec![0], vec![1], vec![2]]
        );
        assert_eq!(
            u.component_partition(EdgeSet::singleton(1)),
            vec![vec![0], vec![1, 2]]
        );
        assert_eq!(
            u.component_partition(EdgeSet::full(2)),
            vec![vec![0, 1, 2]]
        );
    }

    #[test]
    fn regular_embeddings() {
        let i1 = Digraph::coherent_line(1);
        let i2 = Digraph::coherent_line(2);
        assert!(is_regular_embedding(&[0, 1, 2], &i2, &i2));
        assert!(is_regular_embedding(&[0, 1], &i1, &i2));
        assert!(is_regular_embedding(&[1, 2], &i1, &i2));
        // collapsing the edge's endpoints is not injective
        assert!(!is_regular_embedding(&[0, 0], &i1, &i2));
        // reversing the edge lands outside E(I_2)
        assert!(!is_regular_embedding(&[1, 0], &i1, &i2));
    }

    #[test]
    fn relabel_resorts_edges() {
        let g = Digraph::coherent_line(2);
        let h = g.relabel(&[2, 1, 0]).unwrap();
        assert_eq!(h.edges(), &[(1, 0), (2, 1)]);
        assert!(g.relabel(&[0, 0, 1]).is_err());
    }

    #[test]
    fn edge_set_basics() {
        let s = EdgeSet::from_indices(&[0, 2, 5]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(2) && !s.contains(1));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2, 5]);
        assert_eq!(s.without(2).len(), 2);
        assert!(EdgeSet::singleton(3).is_subset_of(EdgeSet::full(4)));
        assert!(!EdgeSet::singleton(4).is_subset_of(EdgeSet::full(4)));
        assert_eq!(EdgeSet::parse_hex("0x25").unwrap(), s);
        assert_eq!(EdgeSet::parse_hex("25").unwrap(), s);
        assert_eq!(s.to_string(), "0x25");
        assert!(EdgeSet::parse_hex("zz").is_err());
    }

    #[test]
    fn size_caps_are_enforced() {
        assert!(Digraph::new(65, vec![]).is_err());
        assert!(Digraph::new(0, vec![]).is_err());
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(
            n in 1usize..6,
            mask in prop::bits::u32::ANY,
        ) {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in 0..n {
                    if u != v {
                        if mask >> k & 1 == 1 {
                            edges.push((u, v));
                        }
                        k += 1;
                    }
                }
            }
            let g = Digraph::new(n, edges).unwrap();
            let back = parse_edge_list(&g.to_edge_list()).unwrap();
            prop_assert_eq!(g, back);
        }
    }
}
