//! Brute-force verification suites over every small digraph.
//!
//! Each suite enumerates one representative per isomorphism class of
//! digraphs on up to four vertices (no self-loops, digons allowed) and
//! checks a cross-module identity exhaustively: complexes square to zero,
//! the component-index sign satisfies the square parity everywhere, both
//! sign choices give the same cohomology, the poset-shape recognizers
//! agree with explicit graph isomorphism, greedy matchings agree with
//! direct homology wherever they are conclusive, and projections compose.
//!
//! Suites return a short summary with the counts they covered, so the
//! command-line runner can print one line per suite.

use itertools::Itertools;

use crate::algebra::{ground_field, truncated_poly, Field};
use crate::chromatic::{build_chromatic, build_tilde_mu, ChromaticVariant};
use crate::complex::{build_multipath_complex, SignChoice};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::functor::{projection_map, ChainMap};
use crate::homology::betti;
use crate::morse::{greedy_matching, shortcut_homology};
use crate::pathposet::{is_boolean_path_poset, PathPoset};
use crate::signs::{sigma_e, verify_sign};

/// One self-test suite: a name for the report and a runner that returns a
/// coverage summary, or a description of the first violation.
pub struct Suite {
    pub name: &'static str,
    pub run: fn() -> Result<String>,
}

pub const SUITES: &[Suite] = &[
    Suite { name: "d-squared", run: d_squared_everywhere },
    Suite { name: "sigma-squares", run: sigma_square_parity },
    Suite { name: "sign-independence", run: sign_choice_independence },
    Suite { name: "poset-recognition", run: poset_shape_recognition },
    Suite { name: "morse-shortcuts", run: morse_shortcut_agreement },
    Suite { name: "projection-composition", run: projection_composition },
];

fn permutations(n: usize) -> Vec<Vec<usize>> {
    (0..n).permutations(n).collect()
}

/// One representative per isomorphism class of digraphs on exactly
/// `vertices` labeled vertices. A graph is kept when its edge bitmask is
/// minimal among all vertex relabelings.
fn classes_on(vertices: usize) -> Vec<Digraph> {
    let pairs: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|u| (0..vertices).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let mut pair_index = vec![usize::MAX; vertices * vertices];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        pair_index[u * vertices + v] = i;
    }
    let perms = permutations(vertices);
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let relabeled_mask = |perm: &[usize]| {
            let mut rm = 0u32;
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    rm |= 1 << pair_index[perm[u] * vertices + perm[v]];
                }
            }
            rm
        };
        if perms.iter().map(|p| relabeled_mask(p)).min() == Some(mask) {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            out.push(Digraph::new(vertices, edges).expect("enumerated edges are valid"));
        }
    }
    out
}

/// Representatives of every digraph isomorphism class with at most
/// `max_vertices` vertices.
pub fn digraph_classes(max_vertices: usize) -> Vec<Digraph> {
    (1..=max_vertices).flat_map(classes_on).collect()
}

fn isomorphic(g: &Digraph, h: &Digraph) -> bool {
    g.vertex_count() == h.vertex_count()
        && g.edge_count() == h.edge_count()
        && permutations(g.vertex_count())
            .iter()
            .any(|p| g.relabel(p).expect("permutation is valid").edges() == h.edges())
}

/// Builds the multipath complex of every class with both sign choices and
/// the chromatic, hat-chromatic and complement complexes of the smaller
/// classes; every builder verifies d² = 0 before returning.
fn d_squared_everywhere() -> Result<String> {
    let dual = truncated_poly(2, Field::Prime(5))?;
    let dual_m = crate::algebra::regular_bimodule(&dual);
    let (k, km) = ground_field(Field::Prime(5));
    let mut multipath = 0usize;
    let mut subgraph = 0usize;
    for g in digraph_classes(4) {
        build_multipath_complex(&g, &dual, &dual_m, 0, SignChoice::SigmaE)?;
        build_multipath_complex(&g, &dual, &dual_m, 0, SignChoice::Lex)?;
        multipath += 2;
        if g.edge_count() <= 6 {
            build_chromatic(&g, &k, &km, ChromaticVariant::Plain)?;
            build_chromatic(&g, &k, &km, ChromaticVariant::Hat)?;
            build_tilde_mu(&g, &k)?;
            subgraph += 3;
        }
    }
    Ok(format!(
        "{multipath} multipath and {subgraph} spanning-sub-graph complexes square to zero"
    ))
}

/// The component-index sign satisfies the square parity condition on the
/// path poset of every class.
fn sigma_square_parity() -> Result<String> {
    let mut squares = 0usize;
    let mut graphs = 0usize;
    for g in digraph_classes(4) {
        let p = PathPoset::enumerate(&g);
        let eps = sigma_e(&p)?;
        let violations = verify_sign(&p.poset, &eps)?;
        if let Some(&sq) = violations.first() {
            return Err(Error::internal(format!(
                "square {sq} of the path poset of {:?} breaks the parity condition",
                g.edges()
            )));
        }
        squares += p.poset.squares.len();
        graphs += 1;
    }
    Ok(format!("{squares} squares across {graphs} digraph classes have odd parity"))
}

/// Both sign choices produce the same Betti table on every class.
fn sign_choice_independence() -> Result<String> {
    let dual = truncated_poly(2, Field::Prime(5))?;
    let dual_m = crate::algebra::regular_bimodule(&dual);
    let mut graphs = 0usize;
    for g in digraph_classes(4) {
        let with_sigma = betti(&build_multipath_complex(&g, &dual, &dual_m, 0, SignChoice::SigmaE)?)?;
        let with_lex = betti(&build_multipath_complex(&g, &dual, &dual_m, 0, SignChoice::Lex)?)?;
        if with_sigma != with_lex {
            return Err(Error::internal(format!(
                "sign choices disagree on {:?}: {with_sigma:?} vs {with_lex:?}",
                g.edges()
            )));
        }
        graphs += 1;
    }
    Ok(format!("{graphs} digraph classes share Betti tables across sign choices"))
}

/// The poset-shape recognizers match explicit graph isomorphism: a
/// connected digraph has a Boolean path poset exactly when it is a
/// coherently oriented line, and a connected digraph with n ∈ {3,4} edges
/// has the full-minus-maximum Boolean shape exactly when it is the
/// coherently oriented polygon on n vertices.
fn poset_shape_recognition() -> Result<String> {
    let mut connected = 0usize;
    let mut polygon_sized = 0usize;
    for g in digraph_classes(4) {
        if !g.is_connected() {
            continue;
        }
        connected += 1;
        let boolean = is_boolean_path_poset(&g)?;
        let is_line = g.vertex_count() == g.edge_count() + 1
            && isomorphic(&g, &Digraph::coherent_line(g.edge_count()));
        if boolean != is_line {
            return Err(Error::internal(format!(
                "Boolean-poset recognizer disagrees with line isomorphism on {:?}",
                g.edges()
            )));
        }
        let e = g.edge_count();
        if e == 3 || e == 4 {
            polygon_sized += 1;
            let p = PathPoset::enumerate(&g);
            let mut is_lower = vec![false; p.poset.len()];
            for c in &p.poset.coverings {
                is_lower[c.lower] = true;
            }
            let shape = p.poset.len() as u64 == (1u64 << e) - 1
                && (0..p.poset.len())
                    .filter(|&i| !is_lower[i])
                    .all(|i| p.poset.elements[i].len() == e - 1);
            let is_polygon = g.vertex_count() == e
                && isomorphic(&g, &Digraph::coherent_polygon(e - 1));
            if shape != is_polygon {
                return Err(Error::internal(format!(
                    "punctured-Boolean recognizer disagrees with polygon isomorphism on {:?}",
                    g.edges()
                )));
            }
        }
    }
    Ok(format!(
        "{connected} connected classes checked for lines, {polygon_sized} for polygons"
    ))
}

/// Wherever the greedy matching shortcut is conclusive, it agrees with the
/// directly computed homology over GF(5).
fn morse_shortcut_agreement() -> Result<String> {
    let (k, km) = ground_field(Field::Prime(5));
    let mut conclusive = 0usize;
    let mut graphs = 0usize;
    for g in digraph_classes(4) {
        graphs += 1;
        let p = PathPoset::enumerate(&g);
        let matching = greedy_matching(&p.poset);
        let Some(predicted) = shortcut_homology(&p.poset, &matching)?.to_betti() else {
            continue;
        };
        conclusive += 1;
        let direct = betti(&build_multipath_complex(&g, &k, &km, 0, SignChoice::SigmaE)?)?;
        if predicted != direct {
            return Err(Error::internal(format!(
                "matching shortcut predicts {predicted:?} but elimination gives {direct:?} on {:?}",
                g.edges()
            )));
        }
    }
    Ok(format!("{conclusive} of {graphs} greedy matchings conclusive, all agreeing"))
}

/// Projections onto nested spanning sub-graphs compose: going from the
/// three-edge line to a one-edge sub-graph directly equals going through
/// the two-edge intermediate.
fn projection_composition() -> Result<String> {
    let a = truncated_poly(2, Field::Rationals)?;
    let m = crate::algebra::regular_bimodule(&a);
    let big = Digraph::coherent_line(3);
    let mid = Digraph::new(4, vec![(0, 1), (1, 2)])?;
    let small = Digraph::new(4, vec![(0, 1)])?;
    let big_to_mid = projection_map(&big, &mid, &a, &m)?;
    let mid_to_small = projection_map(&mid, &small, &a, &m)?;
    let direct = projection_map(&big, &small, &a, &m)?;
    let composed = ChainMap::compose(&mid_to_small.map, &big_to_mid.map, &a.field);
    for (n, mat) in direct.map.mats.iter().enumerate() {
        let via = composed
            .mats
            .get(n)
            .ok_or_else(|| Error::internal("composed projection misses a degree".to_string()))?;
        if mat != via {
            return Err(Error::internal(format!(
                "projection composition differs from the direct projection in degree {n}"
            )));
        }
    }
    Ok("projections through a nested spanning sub-graph chain compose".to_string())
}

/// Runs every suite in order, stopping at the first failure.
pub fn run_all() -> Result<Vec<(&'static str, String)>> {
    SUITES
        .iter()
        .map(|s| (s.run)().map(|summary| (s.name, summary)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_match_the_known_sequence() {
        // digraphs on 1..4 unlabeled vertices: 1, 3, 16, 218
        assert_eq!(classes_on(1).len(), 1);
        assert_eq!(classes_on(2).len(), 3);
        assert_eq!(classes_on(3).len(), 16);
        assert_eq!(classes_on(4).len(), 218);
        assert_eq!(digraph_classes(4).len(), 238);
    }

    #[test]
    fn representatives_are_pairwise_non_isomorphic() {
        let classes = digraph_classes(3);
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                assert!(
                    !isomorphic(&classes[i], &classes[j]),
                    "{:?} and {:?} are isomorphic",
                    classes[i],
                    classes[j]
                );
            }
        }
    }

    #[test]
    fn known_shapes_are_recognized_as_isomorphic() {
        let y = Digraph::new(4, vec![(0, 1), (2, 1), (3, 1)]).unwrap();
        let y_relabeled = Digraph::new(4, vec![(1, 3), (2, 3), (0, 3)]).unwrap();
        assert!(isomorphic(&y, &y_relabeled));
        let out_star = Digraph::new(4, vec![(1, 0), (1, 2), (1, 3)]).unwrap();
        assert!(!isomorphic(&y, &out_star));
        assert!(isomorphic(
            &Digraph::coherent_polygon(2),
            &Digraph::new(3, vec![(1, 0), (2, 1), (0, 2)]).unwrap()
        ));
    }

    #[test]
    fn every_suite_passes() {
        for suite in SUITES {
            let outcome = (suite.run)();
            assert!(outcome.is_ok(), "suite {} failed: {:?}", suite.name, outcome.err());
        }
    }

    #[test]
    fn run_all_reports_every_suite_once() {
        let report = run_all().unwrap();
        assert_eq!(report.len(), SUITES.len());
        assert!(report.iter().all(|(_, summary)| !summary.is_empty()));
    }
}
