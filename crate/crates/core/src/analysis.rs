//! Boundedness, uniqueness and connectedness of a computed solution set.
//!
//! The empty set is reported as bounded and connected but not unique.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::solver::SolutionSet;

pub const EMPTY_SET_NOTE: &str = "empty solution set: bounded and connected hold vacuously, unique does not";

/// Pieces as nodes, an edge wherever two pieces intersect.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceGraph {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl PieceGraph {
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.nodes).collect();
        fn root(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.nodes];
        for v in 0..self.nodes {
            let r = root(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(v);
        }
        groups
    }
}

pub fn piece_graph<T: Scalar>(s: &SolutionSet<T>) -> PieceGraph {
    let m = s.pieces.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    let edges = pairs
        .into_par_iter()
        .filter(|&(a, b)| !s.pieces[a].polyhedron.intersect(&s.pieces[b].polyhedron).is_empty())
        .collect();
    PieceGraph { nodes: m, edges }
}

pub fn is_bounded<T: Scalar>(s: &SolutionSet<T>) -> bool {
    s.pieces.par_iter().all(|p| p.is_point || p.polyhedron.is_bounded())
}

/// Nonempty, and every piece is the same single point.
pub fn is_unique<T: Scalar>(s: &SolutionSet<T>) -> bool {
    !s.is_empty() && s.pieces.iter().all(|p| p.is_point && p.sample == s.pieces[0].sample)
}

pub fn is_connected<T: Scalar>(s: &SolutionSet<T>) -> bool {
    s.pieces.len() <= 1 || piece_graph(s).components().len() == 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub bounded: bool,
    pub unique: bool,
    pub connected: bool,
    pub pieces: usize,
    pub graph: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn analyze<T: Scalar>(s: &SolutionSet<T>) -> AnalysisReport {
    let graph = piece_graph(s);
    AnalysisReport {
        bounded: is_bounded(s),
        unique: is_unique(s),
        connected: graph.nodes <= 1 || graph.components().len() == 1,
        pieces: graph.nodes,
        graph: graph.edges,
        note: s.is_empty().then(|| EMPTY_SET_NOTE.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Instance;
    use crate::solver::solve_all;
    use crate::Rational;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn ray_is_unbounded_but_connected() {
        let inst = Instance::new(fixtures::degenerate_scalar_pair(), vec![], vec![r(0)]).unwrap();
        let s = solve_all(&inst);
        assert!(!is_bounded(&s));
        assert!(is_connected(&s));
        assert!(!is_unique(&s));
    }

    #[test]
    fn two_points() {
        let s = solve_all(&fixtures::two_point_instance());
        assert!(is_bounded(&s));
        assert!(!is_unique(&s));
        assert!(!is_connected(&s));
        assert_eq!(piece_graph(&s), PieceGraph { nodes: 2, edges: vec![] });
    }

    #[test]
    fn single_point_and_empty() {
        let inst = Instance::new(fixtures::identity_pair(2), vec![], vec![r(1), r(-1)]).unwrap();
        let s = solve_all(&inst);
        assert!(is_unique(&s) && is_connected(&s) && is_bounded(&s));
        let empty = solve_all(&Instance::new(fixtures::degenerate_scalar_pair(), vec![], vec![r(-1)]).unwrap());
        let rep = analyze(&empty);
        assert!(rep.bounded && rep.connected && !rep.unique);
        assert_eq!(rep.note.as_deref(), Some(EMPTY_SET_NOTE));
    }

    #[test]
    fn overlapping_pieces_form_one_component() {
        // (I, 0) with q = 0 in two coordinates: x0 = 0 and x1 >= 0 free, four
        // cells meeting at the origin.
        let t = crate::model::MatrixTuple::from_i64(&[&[&[1, 0], &[0, 1]], &[&[0, 0], &[0, 0]]]);
        let s = solve_all(&Instance::new(t, vec![], vec![r(0), r(0)]).unwrap());
        assert!(s.len() > 1);
        assert!(is_connected(&s));
        assert!(!is_bounded(&s));
    }
}
