//! Acyclic matchings on Hasse graphs and the two matching shortcuts for
//! cohomology with ground-field coefficients.
//!
//! With `A = M = 𝕂` every summand of the cochain complex is one
//! dimensional and every covering map is an isomorphism, so the Hasse
//! graph of the path poset doubles as the Morse graph. A matching that
//! touches every element forces the cohomology to vanish; a matching whose
//! unmatched elements all sit in one degree `i` forces the cohomology to
//! be concentrated there, with one generator per unmatched element.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::homology::BettiTable;
use crate::pathposet::SubsetPoset;

/// A set of Hasse edges, each written as a pair of poset element indices
/// `(lower, upper)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

/// Outcome of checking a matching against the two conditions of an acyclic
/// matching: pairwise disjointness and acyclicity of the reoriented Hasse
/// graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchingVerdict {
    Acyclic,
    /// Some element is touched by two matched edges.
    SharedElement { element: usize },
    /// Reversing the matched edges creates this directed cycle (listed in
    /// traversal order, without repeating the starting element).
    Cycle { elements: Vec<usize> },
}

impl MatchingVerdict {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, MatchingVerdict::Acyclic)
    }
}

/// Orientation of the Hasse graph induced by a matching: unmatched
/// coverings point up, matched coverings point down.
fn reoriented_adjacency(poset: &SubsetPoset, matched: &HashSet<(usize, usize)>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); poset.len()];
    for c in &poset.coverings {
        if matched.contains(&(c.lower, c.upper)) {
            adj[c.upper].push(c.lower);
        } else {
            adj[c.lower].push(c.upper);
        }
    }
    adj
}

fn find_cycle(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    // iterative three-color depth first search with an explicit stack so
    // the cycle witness can be read off the gray path
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color = vec![WHITE; adj.len()];
    for start in 0..adj.len() {
        if color[start] != WHITE {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        color[start] = GRAY;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                match color[w] {
                    WHITE => {
                        color[w] = GRAY;
                        stack.push((w, 0));
                    }
                    GRAY => {
                        let from = stack.iter().position(|&(u, _)| u == w).unwrap();
                        return Some(stack[from..].iter().map(|&(u, _)| u).collect());
                    }
                    _ => {}
                }
            } else {
                color[v] = BLACK;
                stack.pop();
            }
        }
    }
    None
}

fn well_formed(poset: &SubsetPoset, m: &Matching) -> Result<Option<usize>> {
    let mut seen: HashMap<usize, ()> = HashMap::new();
    for &(lower, upper) in &m.pairs {
        if poset.covering_index(lower, upper).is_none() {
            return Err(Error::validation(format!(
                "matched pair ({lower}, {upper}) is not a covering of the poset"
            )));
        }
        for e in [lower, upper] {
            if seen.insert(e, ()).is_some() {
                return Ok(Some(e));
            }
        }
    }
    Ok(None)
}

/// Checks a matching: every pair must be a covering (anything else is an
/// error), and the result reports whether the pairs are disjoint and the
/// reoriented Hasse graph is acyclic.
pub fn verify_matching(poset: &SubsetPoset, m: &Matching) -> Result<MatchingVerdict> {
    if let Some(element) = well_formed(poset, m)? {
        return Ok(MatchingVerdict::SharedElement { element });
    }
    let matched: HashSet<(usize, usize)> = m.pairs.iter().copied().collect();
    match find_cycle(&reoriented_adjacency(poset, &matched)) {
        Some(elements) => Ok(MatchingVerdict::Cycle { elements }),
        None => Ok(MatchingVerdict::Acyclic),
    }
}

/// Counts the elements not touched by the matching, keyed by degree (edge
/// count). Degrees without critical cells are absent. Requires the pairs
/// to be disjoint coverings; acyclicity is not needed for the counts.
pub fn critical_cells(poset: &SubsetPoset, m: &Matching) -> Result<BTreeMap<usize, usize>> {
    if let Some(element) = well_formed(poset, m)? {
        return Err(Error::validation(format!(
            "element {element} is touched by two matched edges"
        )));
    }
    let mut touched = vec![false; poset.len()];
    for &(lower, upper) in &m.pairs {
        touched[lower] = true;
        touched[upper] = true;
    }
    let mut counts = BTreeMap::new();
    for (e, &t) in touched.iter().enumerate() {
        if !t {
            *counts.entry(poset.level(e) + poset.min_edges).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// What an acyclic matching says about cohomology with `A = M = 𝕂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShortcutResult {
    /// Every element is matched: the cohomology vanishes entirely.
    TrivialHomology,
    /// All unmatched elements share one degree: the cohomology is
    /// concentrated there with this many generators.
    Concentrated { degree: usize, count: usize },
    /// Unmatched elements spread over several degrees; the shortcut says
    /// nothing and the caller must compute directly.
    Inconclusive,
}

impl ShortcutResult {
    /// The Betti table this verdict pins down, if conclusive.
    pub fn to_betti(&self) -> Option<BettiTable> {
        match self {
            ShortcutResult::TrivialHomology => Some(BettiTable::new()),
            ShortcutResult::Concentrated { degree, count } => {
                Some(BettiTable::from([(*degree, *count)]))
            }
            ShortcutResult::Inconclusive => None,
        }
    }
}

/// Applies the two matching shortcuts. The matching must be a valid
/// acyclic matching; an invalid one is rejected.
pub fn shortcut_homology(poset: &SubsetPoset, m: &Matching) -> Result<ShortcutResult> {
    match verify_matching(poset, m)? {
        MatchingVerdict::Acyclic => {}
        MatchingVerdict::SharedElement { element } => {
            return Err(Error::validation(format!(
                "element {element} is touched by two matched edges"
            )));
        }
        MatchingVerdict::Cycle { .. } => {
            return Err(Error::validation("matching is not acyclic"));
        }
    }
    let counts = critical_cells(poset, m)?;
    Ok(match counts.len() {
        0 => ShortcutResult::TrivialHomology,
        1 => {
            let (&degree, &count) = counts.iter().next().unwrap();
            ShortcutResult::Concentrated { degree, count }
        }
        _ => ShortcutResult::Inconclusive,
    })
}

/// Greedily pairs elements along the coverings in canonical order, keeping
/// a pair only when both ends are still free and the matching stays
/// acyclic. On Boolean posets this recovers the perfect matching along the
/// first edge.
pub fn greedy_matching(poset: &SubsetPoset) -> Matching {
    let mut matched: HashSet<(usize, usize)> = HashSet::new();
    let mut used = vec![false; poset.len()];
    let mut pairs = Vec::new();
    for c in &poset.coverings {
        if used[c.lower] || used[c.upper] {
            continue;
        }
        matched.insert((c.lower, c.upper));
        if find_cycle(&reoriented_adjacency(poset, &matched)).is_none() {
            used[c.lower] = true;
            used[c.upper] = true;
            pairs.push((c.lower, c.upper));
        } else {
            matched.remove(&(c.lower, c.upper));
        }
    }
    Matching { pairs }
}

/// Parses a matching file: one pair per line, `lower upper`, both written
/// as hexadecimal edge bit sets; `#` starts a comment. Each element must
/// belong to the poset.
pub fn parse_matching(text: &str, poset: &SubsetPoset) -> Result<Matching> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(lo), Some(hi), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected exactly two hexadecimal edge sets".to_string(),
            });
        };
        let resolve = |txt: &str| -> Result<usize> {
            let set = crate::digraph::EdgeSet::parse_hex(txt).map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
            poset.index_of(set).ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("{set} is not an element of the poset"),
            })
        };
        pairs.push((resolve(lo)?, resolve(hi)?));
    }
    Ok(Matching { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ground_field, Field};
    use crate::complex::{build_multipath_complex, SignChoice};
    use crate::digraph::{parse_edge_list, Digraph, EdgeSet};
    use crate::homology::betti;
    use crate::pathposet::PathPoset;
    use proptest::prelude::*;

    fn pairs_by_sets(poset: &SubsetPoset, pairs: &[(u64, u64)]) -> Matching {
        Matching {
            pairs: pairs
                .iter()
                .map(|&(lo, hi)| {
                    (
                        poset.index_of(EdgeSet::from_bits(lo)).unwrap(),
                        poset.index_of(EdgeSet::from_bits(hi)).unwrap(),
                    )
                })
                .collect(),
        }
    }

    /// Independent acyclicity oracle: transitive closure of the reoriented
    /// Hasse graph by iterated squaring of the reachability relation.
    fn has_cycle_by_closure(poset: &SubsetPoset, m: &Matching) -> bool {
        let matched: HashSet<(usize, usize)> = m.pairs.iter().copied().collect();
        let n = poset.len();
        let mut reach = vec![vec![false; n]; n];
        for c in &poset.coverings {
            if matched.contains(&(c.lower, c.upper)) {
                reach[c.upper][c.lower] = true;
            } else {
                reach[c.lower][c.upper] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    let via: Vec<usize> = (0..n).filter(|&j| reach[k][j]).collect();
                    for j in via {
                        reach[i][j] = true;
                    }
                }
            }
        }
        (0..n).any(|v| reach[v][v])
    }

    fn first_edge_matching(poset: &SubsetPoset) -> Matching {
        // pair every element not containing the first edge with its union
        let pairs = poset
            .elements
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.contains(0))
            .filter_map(|(i, s)| poset.index_of(s.with(0)).map(|j| (i, j)))
            .collect();
        Matching { pairs }
    }

    #[test]
    fn first_edge_matching_clears_coherent_lines() {
        for n in 1..=4 {
            let p = PathPoset::enumerate(&Digraph::coherent_line(n));
            let m = first_edge_matching(&p.poset);
            assert_eq!(verify_matching(&p.poset, &m).unwrap(), MatchingVerdict::Acyclic);
            assert!(critical_cells(&p.poset, &m).unwrap().is_empty());
            assert_eq!(
                shortcut_homology(&p.poset, &m).unwrap(),
                ShortcutResult::TrivialHomology
            );
        }
    }

    #[test]
    fn out_star_matching_touches_everything() {
        // Y with one edge in and two out admits a perfect acyclic matching
        let g = parse_edge_list("vertices 4\n0 1\n1 2\n1 3").unwrap();
        let p = PathPoset::enumerate(&g);
        let m = pairs_by_sets(&p.poset, &[(0x0, 0x2), (0x1, 0x3), (0x4, 0x5)]);
        assert_eq!(verify_matching(&p.poset, &m).unwrap(), MatchingVerdict::Acyclic);
        let shortcut = shortcut_homology(&p.poset, &m).unwrap();
        assert_eq!(shortcut, ShortcutResult::TrivialHomology);
        let (a, k) = ground_field(Field::Rationals);
        let direct = betti(&build_multipath_complex(&g, &a, &k, 0, SignChoice::SigmaE).unwrap());
        assert_eq!(shortcut.to_betti().unwrap(), direct.unwrap());
    }

    #[test]
    fn in_star_matching_leaves_two_generators_in_degree_one() {
        let g = parse_edge_list("vertices 4\n0 1\n2 1\n3 1").unwrap();
        let p = PathPoset::enumerate(&g);
        let m = pairs_by_sets(&p.poset, &[(0x0, 0x2)]);
        assert_eq!(
            critical_cells(&p.poset, &m).unwrap(),
            BTreeMap::from([(1, 2)])
        );
        let shortcut = shortcut_homology(&p.poset, &m).unwrap();
        assert_eq!(shortcut, ShortcutResult::Concentrated { degree: 1, count: 2 });
        let (a, k) = ground_field(Field::Rationals);
        let direct = betti(&build_multipath_complex(&g, &a, &k, 0, SignChoice::SigmaE).unwrap());
        assert_eq!(shortcut.to_betti().unwrap(), direct.unwrap());
    }

    #[test]
    fn h_graph_matching_concentrates_in_degree_two() {
        let g = parse_edge_list("vertices 6\n0 1\n3 4\n2 1\n5 4\n1 4").unwrap();
        let p = PathPoset::enumerate(&g);
        let m = pairs_by_sets(
            &p.poset,
            &[(0x00, 0x10), (0x01, 0x03), (0x02, 0x06), (0x04, 0x14), (0x08, 0x09)],
        );
        assert_eq!(verify_matching(&p.poset, &m).unwrap(), MatchingVerdict::Acyclic);
        let shortcut = shortcut_homology(&p.poset, &m).unwrap();
        assert_eq!(shortcut, ShortcutResult::Concentrated { degree: 2, count: 2 });
        // the two critical multipaths are the cross pairs
        let crit: Vec<u64> = (0..p.poset.len())
            .filter(|&e| {
                !m.pairs.iter().any(|&(lo, hi)| lo == e || hi == e)
            })
            .map(|e| p.poset.elements[e].bits())
            .collect();
        assert_eq!(crit, vec![0x0c, 0x11]);
        let (a, k) = ground_field(Field::Rationals);
        let direct = betti(&build_multipath_complex(&g, &a, &k, 0, SignChoice::SigmaE).unwrap());
        assert_eq!(shortcut.to_betti().unwrap(), direct.unwrap());
    }

    #[test]
    fn shared_elements_and_non_coverings_are_caught() {
        let p = PathPoset::enumerate(&Digraph::coherent_line(2));
        let shared = pairs_by_sets(&p.poset, &[(0x0, 0x1), (0x0, 0x2)]);
        assert!(matches!(
            verify_matching(&p.poset, &shared).unwrap(),
            MatchingVerdict::SharedElement { element: 0 }
        ));
        assert!(critical_cells(&p.poset, &shared).is_err());
        assert!(shortcut_homology(&p.poset, &shared).is_err());
        // the empty set is two steps below the top, not a covering
        let skip = pairs_by_sets(&p.poset, &[(0x0, 0x3)]);
        assert!(verify_matching(&p.poset, &skip).is_err());
    }

    #[test]
    fn hexagonal_matching_on_the_boolean_cube_is_cyclic() {
        // pairing {e0}-{e0,e1}, {e1}-{e1,e2}, {e2}-{e0,e2} sends the
        // middle levels of the cube around in a circle
        let p = PathPoset::enumerate(&Digraph::coherent_line(3));
        let m = pairs_by_sets(&p.poset, &[(0x1, 0x3), (0x2, 0x6), (0x4, 0x5)]);
        let verdict = verify_matching(&p.poset, &m).unwrap();
        let MatchingVerdict::Cycle { elements } = &verdict else {
            panic!("expected a cycle, got {verdict:?}");
        };
        assert_eq!(elements.len(), 6);
        assert!(has_cycle_by_closure(&p.poset, &m));
        // the witness really is a closed walk in the reoriented graph
        let matched: HashSet<(usize, usize)> = m.pairs.iter().copied().collect();
        let adj = reoriented_adjacency(&p.poset, &matched);
        for (i, &v) in elements.iter().enumerate() {
            let w = elements[(i + 1) % elements.len()];
            assert!(adj[v].contains(&w), "{v} -> {w} missing");
        }
        assert!(shortcut_homology(&p.poset, &m).is_err());
    }

    #[test]
    fn triangle_single_pairs_are_inconclusive() {
        let p = PathPoset::enumerate(&Digraph::coherent_polygon(2));
        for c in p.poset.coverings.clone() {
            let m = Matching { pairs: vec![(c.lower, c.upper)] };
            assert_eq!(
                shortcut_homology(&p.poset, &m).unwrap(),
                ShortcutResult::Inconclusive
            );
        }
    }

    #[test]
    fn greedy_matching_small_cases() {
        // coherent lines: greedy recovers the perfect first-edge matching
        for n in 2..=4 {
            let p = PathPoset::enumerate(&Digraph::coherent_line(n));
            let m = greedy_matching(&p.poset);
            assert_eq!(
                shortcut_homology(&p.poset, &m).unwrap(),
                ShortcutResult::TrivialHomology
            );
            let mut expected = first_edge_matching(&p.poset).pairs;
            expected.sort_unstable();
            let mut found = m.pairs.clone();
            found.sort_unstable();
            assert_eq!(found, expected);
        }
        // a single vertex leaves one critical cell in degree zero
        let p = PathPoset::enumerate(&Digraph::new(1, vec![]).unwrap());
        let m = greedy_matching(&p.poset);
        assert!(m.pairs.is_empty());
        assert_eq!(
            shortcut_homology(&p.poset, &m).unwrap(),
            ShortcutResult::Concentrated { degree: 0, count: 1 }
        );
        // the in-star gives two critical cells in degree one
        let g = parse_edge_list("vertices 4\n0 1\n2 1\n3 1").unwrap();
        let p = PathPoset::enumerate(&g);
        assert_eq!(
            shortcut_homology(&p.poset, &greedy_matching(&p.poset)).unwrap(),
            ShortcutResult::Concentrated { degree: 1, count: 2 }
        );
    }

    #[test]
    fn matching_files_round_trip_and_report_errors() {
        let p = PathPoset::enumerate(&parse_edge_list("vertices 4\n0 1\n1 2\n1 3").unwrap());
        let text = "# perfect matching\n0x0 0x2\n0x1 0x3\n\n0x4 0x5\n";
        let m = parse_matching(text, &p.poset).unwrap();
        assert_eq!(m, pairs_by_sets(&p.poset, &[(0x0, 0x2), (0x1, 0x3), (0x4, 0x5)]));
        let bad_hex = parse_matching("0xzz 0x1", &p.poset).unwrap_err();
        assert!(matches!(bad_hex, Error::Parse { line: 1, .. }));
        // {e1, e2} is not a multipath of the out-star
        let missing = parse_matching("0x1 0x3\n0x6 0x7", &p.poset).unwrap_err();
        assert!(matches!(missing, Error::Parse { line: 2, .. }));
        let arity = parse_matching("0x1", &p.poset).unwrap_err();
        assert!(matches!(arity, Error::Parse { line: 1, .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        // greedy matchings are always valid, the DFS cycle check agrees
        // with the closure oracle, and conclusive shortcuts match the
        // directly computed cohomology
        #[test]
        fn greedy_matchings_agree_with_direct_homology(n in 2usize..5, mask in prop::bits::u16::ANY) {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in 0..n {
                    if u != v && k < 16 {
                        if mask >> k & 1 == 1 {
                            edges.push((u, v));
                        }
                        k += 1;
                    }
                }
            }
            edges.truncate(6);
            let g = Digraph::new(n, edges).unwrap();
            let p = PathPoset::enumerate(&g);
            let m = greedy_matching(&p.poset);
            let verdict = verify_matching(&p.poset, &m).unwrap();
            prop_assert_eq!(&verdict, &MatchingVerdict::Acyclic);
            prop_assert!(!has_cycle_by_closure(&p.poset, &m));
            if let Some(shortcut) = shortcut_homology(&p.poset, &m).unwrap().to_betti() {
                let (a, km) = ground_field(Field::Prime(5));
                let direct = betti(&build_multipath_complex(&g, &a, &km, 0, SignChoice::SigmaE).unwrap()).unwrap();
                prop_assert_eq!(shortcut, direct);
            }
        }
    }
}
