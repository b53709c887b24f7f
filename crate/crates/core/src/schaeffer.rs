//! Schaeffer's bijection from well-labeled trees to rooted quadrangulations.
//!
//! Map vertex `0` is the extra vertex ∂; tree vertex `v` (preorder index)
//! becomes map vertex `v + 1`. Corner `i` of the tree is the `i`-th step of
//! the contour exploration, and arc `i` is drawn from corner `i` either to ∂
//! (label 0) or to corner `succ(i)`. Arc `i` owns darts `2i` (leaving the
//! tree vertex of corner `i`) and `2i + 1`.
//!
//! The rotation system places the contour corners on the boundary of a disk
//! that holds every arc. At a corner, arc endpoints are ordered by how far
//! forward along the contour their other end lies, which is the angular
//! order of non-crossing chords; ∂ sits just past the next zero-labeled
//! corner. Corners of one vertex are then concatenated in reverse contour
//! order to get a counterclockwise rotation, and the spokes at ∂ are taken
//! in increasing corner order.

use crate::error::{Error, Result};
use crate::map::{HalfEdgeMap, Quadrangulation};
use crate::tree::LabeledTree;

/// Map vertex id of ∂.
pub const ROOT_VERTEX: usize = 0;

/// Map vertex id of tree vertex `v`.
pub fn map_vertex(v: usize) -> usize {
    v + 1
}

fn check_well_labeled(lt: &LabeledTree) -> Result<()> {
    if lt.size() == 0 {
        return Err(Error::NotWellLabeled("the bijection needs n >= 1".into()));
    }
    let min = lt.min_label();
    if min < 0 {
        return Err(Error::NotWellLabeled(format!("minimum label {min} is negative")));
    }
    Ok(())
}

/// `succ(i)` for every corner `i < 2n`: the first corner `j >= i` (with the
/// contour extended periodically, reduced mod `2n`) whose label is one less;
/// `None` for zero-labeled corners.
pub fn successors(lt: &LabeledTree) -> Result<Vec<Option<usize>>> {
    check_well_labeled(lt)?;
    let coding = lt.encode();
    let labels = &coding.labels()[..2 * lt.size()];
    Ok(successors_of_labels(labels))
}

fn successors_of_labels(labels: &[i32]) -> Vec<Option<usize>> {
    let corners = labels.len();
    let max = *labels.iter().max().unwrap_or(&0) as usize;
    let mut next_at = vec![usize::MAX; max + 1];
    let mut succ = vec![None; corners];
    // Right-to-left sweep over two periods keeps, for every label value,
    // the nearest corner at or after the current position.
    for j in (0..2 * corners).rev() {
        let l = labels[j % corners] as usize;
        if j < corners && l > 0 {
            let s = next_at[l - 1];
            debug_assert!(s != usize::MAX, "labels reach zero within one period");
            succ[j] = Some(s % corners);
        }
        next_at[l] = j;
    }
    succ
}

/// Forward distance from corner `from` to corner `to` around the contour.
fn forward(from: usize, to: usize, corners: usize) -> usize {
    (to + corners - from) % corners
}

/// Applies Schaeffer's bijection to a tree of `W_n^+`, `n >= 1`.
pub fn phi(lt: &LabeledTree) -> Result<Quadrangulation> {
    check_well_labeled(lt)?;
    let tree = lt.tree();
    let n = tree.size();
    let corners = 2 * n;
    let seq = tree.contour_exploration();
    let labels: Vec<i32> = seq[..corners].iter().map(|&v| lt.label(v)).collect();
    let succ = successors_of_labels(&labels);

    // Next zero-labeled corner at or after each corner, for placing ∂.
    let mut next_zero = vec![0usize; corners];
    let mut upcoming = corners; // corner 0 seen one period later
    for i in (0..corners).rev() {
        if labels[i] == 0 {
            upcoming = i;
        }
        next_zero[i] = upcoming;
    }

    // Sort keys are doubled forward distances; ∂ gets an odd key.
    let mut at_corner: Vec<Vec<(usize, usize)>> = vec![Vec::new(); corners];
    let mut spokes = Vec::new();
    for i in 0..corners {
        let out = 2 * i;
        match succ[i] {
            None => {
                at_corner[i].push((2 * forward(i, next_zero[i], corners) + 1, out));
                spokes.push(out + 1);
            }
            Some(j) => {
                at_corner[i].push((2 * forward(i, j, corners), out));
                at_corner[j].push((2 * forward(j, i, corners), out + 1));
            }
        }
    }

    let mut corners_of = vec![Vec::new(); tree.vertex_count()];
    for (i, &v) in seq[..corners].iter().enumerate() {
        corners_of[v].push(i);
    }
    let mut rotation = Vec::with_capacity(n + 2);
    rotation.push(spokes);
    for cs in &corners_of {
        let mut around = Vec::new();
        for &c in cs.iter().rev() {
            let mut ends = std::mem::take(&mut at_corner[c]);
            ends.sort_unstable();
            around.extend(ends.into_iter().map(|(_, d)| d));
        }
        rotation.push(around);
    }

    // Root: arc from corner 0 to ∂, oriented away from ∂.
    let map = HalfEdgeMap::from_rotation(&rotation, 1)?;
    Quadrangulation::new(map)
}

/// True iff every tree vertex `v` is at distance `U(v) + 1` from ∂.
pub fn verify_distance_property(lt: &LabeledTree, q: &Quadrangulation) -> bool {
    if q.map().vertex_count() != lt.tree().vertex_count() + 1 {
        return false;
    }
    let dist = q.bfs_distances(ROOT_VERTEX);
    (0..lt.tree().vertex_count()).all(|v| dist[map_vertex(v)] as i64 == lt.label(v) as i64 + 1)
}

/// Non-root leaves whose label is at least their parent's label; each is a
/// pendant vertex of the quadrangulation.
pub fn tree_pendant_leaves(lt: &LabeledTree) -> usize {
    let t = lt.tree();
    (1..t.vertex_count())
        .filter(|&v| t.is_nonroot_leaf(v))
        .filter(|&v| lt.label(v) >= lt.label(t.parent(v).expect("non-root")))
        .count()
}

/// A pair of corners violating the contour distance bound
/// `d(u_i, u_j) <= V_i + V_j - 2 min_{[i∧j, i∨j]} V + 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundViolation {
    pub i: usize,
    pub j: usize,
    pub distance: usize,
    pub bound: i64,
}

/// Checks the contour distance bound for every pair of corners `0..2n`.
pub fn check_distance_bound(lt: &LabeledTree, q: &Quadrangulation) -> Option<BoundViolation> {
    let seq = lt.tree().contour_exploration();
    let labels: Vec<i64> = seq.iter().map(|&v| lt.label(v) as i64).collect();
    let corners = seq.len() - 1;
    let mut dist_from: Vec<Option<Vec<usize>>> = vec![None; lt.tree().vertex_count()];
    for i in 0..corners {
        let dist = dist_from[seq[i]].get_or_insert_with(|| q.bfs_distances(map_vertex(seq[i])));
        let mut running_min = labels[i];
        for j in i..corners {
            running_min = running_min.min(labels[j]);
            let bound = labels[i] + labels[j] - 2 * running_min + 2;
            let d = dist[map_vertex(seq[j])];
            if d as i64 > bound {
                return Some(BoundViolation {
                    i,
                    j,
                    distance: d,
                    bound,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::PlaneTree;

    fn lt(counts: Vec<usize>, labels: Vec<i32>) -> LabeledTree {
        LabeledTree::from_parts(counts, labels).unwrap()
    }

    /// succ straight from the definition, scanning the periodic extension.
    fn successors_brute(labels: &[i32]) -> Vec<Option<usize>> {
        let c = labels.len();
        (0..c)
            .map(|i| {
                (labels[i] > 0).then(|| {
                    (i..i + 2 * c)
                        .find(|&j| labels[j % c] == labels[i] - 1)
                        .unwrap()
                        % c
                })
            })
            .collect()
    }

    #[test]
    fn successor_examples() {
        assert_eq!(successors(&lt(vec![1, 0], vec![0, 1])).unwrap(), vec![None, Some(0)]);
        assert_eq!(successors(&lt(vec![1, 0], vec![0, 0])).unwrap(), vec![None, None]);
        let s = successors(&lt(vec![1, 1, 0], vec![0, 1, 0])).unwrap();
        assert_eq!(s, vec![None, Some(2), None, Some(0)]);
    }

    #[test]
    fn successor_sweep_matches_scan() {
        let t = lt(vec![3, 1, 0, 2, 0, 0, 0], vec![0, 1, 2, 1, 2, 1, 1]);
        let coding = t.encode();
        let labels = &coding.labels()[..12];
        assert_eq!(successors(&t).unwrap(), successors_brute(labels));
    }

    #[test]
    fn phi_single_edge_label_one() {
        let t = lt(vec![1, 0], vec![0, 1]);
        let q = phi(&t).unwrap();
        assert_eq!(q.map().vertex_count(), 3);
        let mut edges: Vec<(usize, usize)> = q
            .map()
            .edge_list()
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        // ∂ = 0, ∅ = 1, vertex "1" = 2.
        assert_eq!(edges, vec![(0, 1), (1, 2)]);
        assert_eq!(q.map().faces(), vec![4]);
        assert_eq!(q.bfs_distances(0), vec![0, 1, 2]);
        assert_eq!(q.root_vertex(), ROOT_VERTEX);
        assert_eq!(q.map().target(q.map().root_dart()), map_vertex(0));
        assert!(verify_distance_property(&t, &q));
    }

    #[test]
    fn phi_single_edge_label_zero_is_not_nice() {
        let t = lt(vec![1, 0], vec![0, 0]);
        let q = phi(&t).unwrap();
        let mut edges: Vec<(usize, usize)> = q
            .map()
            .edge_list()
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        assert_eq!(edges, vec![(0, 1), (0, 2)]);
        assert_eq!(q.map().degree(2), 1);
        assert_eq!(q.pendant_vertices(), vec![1, 2]);
        assert!(!q.is_nice());
    }

    #[test]
    fn phi_unique_nice_tree_at_n2_is_the_four_cycle() {
        let t = lt(vec![1, 1, 0], vec![0, 1, 0]);
        let q = phi(&t).unwrap();
        assert_eq!(q.map().faces(), vec![4, 4]);
        assert_eq!(q.min_degree(), 2);
        assert!(q.map().degrees().iter().all(|&d| d == 2));
        assert_eq!(q.map().canonical_code(), crate::map::tests::four_cycle().canonical_code());
    }

    #[test]
    fn phi_rejects_negative_labels_and_empty_tree() {
        assert!(matches!(phi(&lt(vec![1, 0], vec![0, -1])), Err(Error::NotWellLabeled(_))));
        let single = LabeledTree::new(PlaneTree::single_vertex(), vec![0]).unwrap();
        assert!(phi(&single).is_err());
    }

    #[test]
    fn distance_property_negative_control() {
        let t = lt(vec![1, 0], vec![0, 1]);
        let q = phi(&t).unwrap();
        let stale = lt(vec![1, 0], vec![0, 0]);
        assert!(!verify_distance_property(&stale, &q));
    }

    #[test]
    fn pendant_leaf_counts() {
        assert_eq!(tree_pendant_leaves(&lt(vec![1, 1, 0], vec![0, 1, 0])), 0);
        assert_eq!(tree_pendant_leaves(&lt(vec![2, 0, 0], vec![0, 0, 0])), 2);
    }

    #[test]
    fn distance_bound_holds_on_small_example() {
        let t = lt(vec![3, 1, 0, 2, 0, 0, 0], vec![0, 1, 2, 1, 2, 1, 1]);
        let q = phi(&t).unwrap();
        assert!(verify_distance_property(&t, &q));
        assert_eq!(check_distance_bound(&t, &q), None);
    }
}
