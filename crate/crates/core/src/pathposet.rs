//! Multipaths and subset posets.
//!
//! The central object is [`SubsetPoset`], a poset of edge subsets of a fixed
//! digraph ordered by inclusion, with covering relations and squares made
//! explicit. The path poset `P(G)` of all multipaths, the Boolean poset of
//! all spanning sub-graphs, and the upward-closed complement used by the
//! chromatic comparison are all instances.

use std::collections::{HashMap, HashSet, VecDeque};
use std::ops::Range;

use crate::digraph::{Digraph, EdgeSet};
use crate::error::{Error, Result};

/// Covering relation `lower ⋖ upper` with `upper = lower ∪ {edge}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Covering {
    pub lower: usize,
    pub upper: usize,
    pub edge: usize,
}

/// A square `bottom ⋖ mid1, mid2 ⋖ top`; `mid1` adds the smaller of the two
/// edges, so `mid1 < mid2` as element indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Square {
    pub bottom: usize,
    pub mid1: usize,
    pub mid2: usize,
    pub top: usize,
}

/// A finite poset of edge subsets under inclusion. Elements are sorted by
/// (cardinality, numeric value), so indices are deterministic; levels are
/// normalized so the sparsest elements sit at level 0, with the offset kept
/// in `min_edges` for posets embedded higher up in the Boolean poset.
#[derive(Clone, Debug)]
pub struct SubsetPoset {
    pub n_edges: usize,
    pub elements: Vec<EdgeSet>,
    pub coverings: Vec<Covering>,
    pub squares: Vec<Square>,
    pub min_edges: usize,
    index: HashMap<u64, usize>,
    covering_lookup: HashMap<(usize, usize), usize>,
    level_start: Vec<usize>,
}

impl SubsetPoset {
    pub fn new(n_edges: usize, mut sets: Vec<EdgeSet>) -> SubsetPoset {
        sets.sort_by_key(|s| (s.len(), s.bits()));
        sets.dedup();
        let index: HashMap<u64, usize> =
            sets.iter().enumerate().map(|(i, s)| (s.bits(), i)).collect();
        let min_edges = sets.first().map_or(0, |s| s.len());
        let max_edges = sets.last().map_or(0, |s| s.len());

        let mut level_start = Vec::new();
        if !sets.is_empty() {
            level_start = vec![0; max_edges - min_edges + 2];
            for s in &sets {
                level_start[s.len() - min_edges + 1] += 1;
            }
            for l in 1..level_start.len() {
                level_start[l] += level_start[l - 1];
            }
        }

        let mut coverings = Vec::new();
        let mut covering_lookup = HashMap::new();
        let mut squares = Vec::new();
        for (lower, s) in sets.iter().enumerate() {
            for e in 0..n_edges {
                if s.contains(e) {
                    continue;
                }
                let Some(&upper) = index.get(&s.with(e).bits()) else {
                    continue;
                };
                covering_lookup.insert((lower, upper), coverings.len());
                coverings.push(Covering { lower, upper, edge: e });
                // squares with this element at the bottom: pair e with a
                // larger edge f such that all four corners exist
                for f in e + 1..n_edges {
                    if s.contains(f) {
                        continue;
                    }
                    let (mid2, top) = (s.with(f), s.with(e).with(f));
                    if let (Some(&m2), Some(&t)) =
                        (index.get(&mid2.bits()), index.get(&top.bits()))
                    {
                        squares.push(Square { bottom: lower, mid1: upper, mid2: m2, top: t });
                    }
                }
            }
        }

        SubsetPoset {
            n_edges,
            elements: sets,
            coverings,
            squares,
            min_edges,
            index,
            covering_lookup,
            level_start,
        }
    }

    /// The full Boolean poset on `n_edges` edges. Rejected above 20 edges;
    /// the element count is 2^n and this is only ever wanted at desk scale.
    pub fn boolean(n_edges: usize) -> Result<SubsetPoset> {
        if n_edges > 20 {
            return Err(Error::validation(format!(
                "refusing to enumerate 2^{n_edges} spanning sub-graphs (limit 20 edges)"
            )));
        }
        let sets = (0..1u64 << n_edges).map(EdgeSet::from_bits).collect();
        Ok(SubsetPoset::new(n_edges, sets))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, s: EdgeSet) -> Option<usize> {
        self.index.get(&s.bits()).copied()
    }

    /// Normalized level of an element: its cardinality minus `min_edges`.
    pub fn level(&self, elem: usize) -> usize {
        self.elements[elem].len() - self.min_edges
    }

    /// Number of occupied levels (0 for the empty poset).
    pub fn num_levels(&self) -> usize {
        self.level_start.len().saturating_sub(1)
    }

    /// Element index range of a level; empty range above the top level.
    pub fn elements_at_level(&self, level: usize) -> Range<usize> {
        if level + 1 >= self.level_start.len() {
            return self.elements.len()..self.elements.len();
        }
        self.level_start[level]..self.level_start[level + 1]
    }

    pub fn covering_index(&self, lower: usize, upper: usize) -> Option<usize> {
        self.covering_lookup.get(&(lower, upper)).copied()
    }

    /// DOT rendering of the Hasse graph, for eyeballing small posets.
    pub fn hasse_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for (i, s) in self.elements.iter().enumerate() {
            out.push_str(&format!("  n{i} [label=\"{s} L{}\"];\n", self.level(i)));
        }
        for c in &self.coverings {
            out.push_str(&format!("  n{} -> n{} [label=\"e{}\"];\n", c.lower, c.upper, c.edge));
        }
        out.push_str("}\n");
        out
    }
}

/// A multipath of a digraph: an edge subset in which every vertex has
/// in-degree and out-degree at most 1 and no directed cycle occurs, carried
/// together with its connected components. Components are ordered by their
/// minimum vertex and every vertex of the graph appears (multipaths are
/// spanning).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multipath {
    pub edges: EdgeSet,
    pub components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
}

impl Multipath {
    fn build(g: &Digraph, edges: EdgeSet) -> Multipath {
        let components = g.underlying_unoriented().component_partition(edges);
        let mut component_of = vec![0; g.vertex_count()];
        for (idx, comp) in components.iter().enumerate() {
            for &v in comp {
                component_of[v] = idx;
            }
        }
        Multipath { edges, components, component_of }
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Index of the component containing a vertex.
    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }
}

/// Index pair (source component, target component) of an edge relative to a
/// multipath that does not contain it. For coverings inside the path poset
/// the two indices always differ, since adding the edge merges two distinct
/// components.
pub fn source_target_index(h: &Multipath, e: (usize, usize)) -> (usize, usize) {
    (h.component_of(e.0), h.component_of(e.1))
}

/// Degree/acyclicity characterization of multipaths: every in/out-degree at
/// most 1 and no directed cycle. Equivalent to "every component is a vertex
/// or a simple path"; the equivalence is property-tested, not assumed.
pub fn is_multipath(g: &Digraph, subset: EdgeSet) -> bool {
    let n = g.vertex_count();
    let mut out_edge = vec![usize::MAX; n];
    let mut in_deg = vec![0u8; n];
    for i in subset.iter() {
        let (u, v) = g.edge(i);
        if out_edge[u] != usize::MAX {
            return false;
        }
        out_edge[u] = v;
        in_deg[v] += 1;
        if in_deg[v] > 1 {
            return false;
        }
    }
    // With all degrees ≤ 1 the sub-graph is a disjoint union of directed
    // paths and directed cycles. Walking forward from every in-degree-0
    // vertex consumes exactly the path edges, so a shortfall means a cycle.
    let mut consumed = 0;
    for (v, &deg) in in_deg.iter().enumerate() {
        if deg == 0 {
            let mut w = v;
            while out_edge[w] != usize::MAX {
                consumed += 1;
                w = out_edge[w];
            }
        }
    }
    consumed == subset.len()
}

/// Literal reading of the definition: each connected component is a single
/// vertex or a simple directed path visiting all of the component's
/// vertices. Deliberately naive; serves as the oracle for [`is_multipath`].
pub fn is_disjoint_union_of_paths(g: &Digraph, subset: EdgeSet) -> bool {
    let comps = g.underlying_unoriented().component_partition(subset);
    for comp in comps {
        let edges: Vec<(usize, usize)> = subset
            .iter()
            .map(|i| g.edge(i))
            .filter(|&(u, _)| comp.binary_search(&u).is_ok())
            .collect();
        if comp.len() == 1 {
            if !edges.is_empty() {
                return false;
            }
            continue;
        }
        if edges.len() != comp.len() - 1 {
            return false;
        }
        let starts: Vec<usize> = comp
            .iter()
            .copied()
            .filter(|&v| edges.iter().all(|&(_, t)| t != v))
            .collect();
        if starts.len() != 1 {
            return false;
        }
        let mut seen = vec![starts[0]];
        let mut cur = starts[0];
        loop {
            let next: Vec<usize> =
                edges.iter().filter(|&&(u, _)| u == cur).map(|&(_, v)| v).collect();
            match next[..] {
                [] => break,
                [v] if !seen.contains(&v) => {
                    seen.push(v);
                    cur = v;
                }
                _ => return false,
            }
        }
        if seen.len() != comp.len() {
            return false;
        }
    }
    true
}

/// The path poset `P(G)`: all multipaths of `G` ordered by inclusion of edge
/// sets, with their component data precomputed.
#[derive(Clone, Debug)]
pub struct PathPoset {
    pub digraph: Digraph,
    pub poset: SubsetPoset,
    pub multipaths: Vec<Multipath>,
}

impl PathPoset {
    /// Breadth-first closure from the empty multipath, adding one edge at a
    /// time. Downward closure of `P(G)` in the Boolean poset guarantees that
    /// this reaches every multipath.
    pub fn enumerate(g: &Digraph) -> PathPoset {
        let mut found: HashSet<EdgeSet> = HashSet::new();
        let mut queue = VecDeque::new();
        found.insert(EdgeSet::EMPTY);
        queue.push_back(EdgeSet::EMPTY);
        while let Some(h) = queue.pop_front() {
            for e in 0..g.edge_count() {
                if h.contains(e) {
                    continue;
                }
                let bigger = h.with(e);
                if !found.contains(&bigger) && is_multipath(g, bigger) {
                    found.insert(bigger);
                    queue.push_back(bigger);
                }
            }
        }
        let poset = SubsetPoset::new(g.edge_count(), found.into_iter().collect());
        let multipaths = poset
            .elements
            .iter()
            .map(|&s| Multipath::build(g, s))
            .collect();
        PathPoset { digraph: g.clone(), poset, multipaths }
    }

    pub fn multipath(&self, elem: usize) -> &Multipath {
        &self.multipaths[elem]
    }

    /// Source/target component indices of an edge relative to an element.
    pub fn st_index(&self, elem: usize, edge: usize) -> (usize, usize) {
        source_target_index(&self.multipaths[elem], self.digraph.edge(edge))
    }
}

/// Whether a connected digraph has Boolean path poset, i.e. `P(G)` contains
/// all 2^|E| spanning sub-graphs (forcing a maximum, the full edge set).
pub fn is_boolean_path_poset(g: &Digraph) -> Result<bool> {
    if !g.is_connected() {
        return Err(Error::validation("Boolean path poset test needs a connected digraph"));
    }
    let p = PathPoset::enumerate(g);
    let full = (p.poset.len() as u128) == 1u128 << g.edge_count();
    let has_maximum = p
        .poset
        .elements
        .last()
        .is_some_and(|&top| top == EdgeSet::full(g.edge_count()));
    Ok(full && has_maximum)
}
