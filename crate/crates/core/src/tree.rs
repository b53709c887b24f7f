//! Plane trees, labeled trees and their contour coding.
//!
//! Vertices are indexed in preorder, which is also the order of first visit
//! along the contour exploration. Vertex `0` is the root. Ulam–Harris
//! addresses (`[]` for the root, `[1]` for its first child, `[1, 2]` for the
//! second child of the first child, ...) are available as derived views.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// A finite rooted ordered tree, stored as first-child / next-sibling arrays
/// indexed in preorder.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlaneTree {
    child_counts: Vec<usize>,
    parent: Vec<usize>,
    first_child: Vec<usize>,
    next_sibling: Vec<usize>,
    depth: Vec<usize>,
}

impl PlaneTree {
    /// The tree `{∅}` with no edges.
    pub fn single_vertex() -> Self {
        Self::from_child_counts(vec![0]).expect("single vertex is a valid tree")
    }

    /// Builds a tree from its preorder child counts (the Łukasiewicz word).
    pub fn from_child_counts(child_counts: Vec<usize>) -> Result<Self> {
        let len = child_counts.len();
        if len == 0 {
            return Err(Error::MalformedTree("empty child-count sequence".into()));
        }
        let mut parent = vec![NONE; len];
        let mut first_child = vec![NONE; len];
        let mut next_sibling = vec![NONE; len];
        let mut depth = vec![0; len];

        // Stack of (vertex, children still to attach, last attached child).
        let mut stack: Vec<(usize, usize, usize)> = vec![(0, child_counts[0], NONE)];
        for v in 1..len {
            while matches!(stack.last(), Some(&(_, 0, _))) {
                stack.pop();
            }
            let Some(top) = stack.last_mut() else {
                return Err(Error::MalformedTree(format!(
                    "child counts close the tree before vertex {v}"
                )));
            };
            let p = top.0;
            top.1 -= 1;
            if top.2 == NONE {
                first_child[p] = v;
            } else {
                next_sibling[top.2] = v;
            }
            top.2 = v;
            parent[v] = p;
            depth[v] = depth[p] + 1;
            stack.push((v, child_counts[v], NONE));
        }
        if stack.iter().any(|&(_, left, _)| left > 0) {
            return Err(Error::MalformedTree(
                "child counts request more vertices than given".into(),
            ));
        }
        Ok(Self {
            child_counts,
            parent,
            first_child,
            next_sibling,
            depth,
        })
    }

    /// Builds a tree from explicit child lists with vertex `0` as root.
    ///
    /// Input indices are arbitrary; the result is renumbered in preorder.
    /// The returned vector maps each input index to its preorder index.
    pub fn from_children(children: &[Vec<usize>]) -> Result<(Self, Vec<usize>)> {
        let len = children.len();
        if len == 0 {
            return Err(Error::MalformedTree("no vertices".into()));
        }
        let mut seen_parent = vec![false; len];
        for (p, kids) in children.iter().enumerate() {
            for &c in kids {
                if c >= len {
                    return Err(Error::MalformedTree(format!(
                        "vertex {p} has out-of-range child {c}"
                    )));
                }
                if c == 0 {
                    return Err(Error::MalformedTree("the root cannot be a child".into()));
                }
                if std::mem::replace(&mut seen_parent[c], true) {
                    return Err(Error::MalformedTree(format!("vertex {c} has two parents")));
                }
            }
        }
        let mut order = Vec::with_capacity(len);
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(children[v].iter().rev().copied());
        }
        if order.len() != len {
            return Err(Error::MalformedTree(format!(
                "{} of {len} vertices are reachable from the root",
                order.len()
            )));
        }
        let mut new_index = vec![0; len];
        for (i, &v) in order.iter().enumerate() {
            new_index[v] = i;
        }
        let counts = order.iter().map(|&v| children[v].len()).collect();
        Ok((Self::from_child_counts(counts)?, new_index))
    }

    /// Builds the tree whose contour function is `heights`.
    pub fn from_contour(heights: &[usize]) -> Result<Self> {
        if heights.is_empty() || heights.len().is_multiple_of(2) {
            return Err(Error::MalformedContour(format!(
                "contour length {} is not of the form 2n+1",
                heights.len()
            )));
        }
        if heights[0] != 0 || heights[heights.len() - 1] != 0 {
            return Err(Error::MalformedContour("contour must start and end at 0".into()));
        }
        let mut counts = vec![0usize];
        let mut path = vec![0usize];
        for (i, w) in heights.windows(2).enumerate() {
            if w[1] == w[0] + 1 {
                let v = counts.len();
                counts[*path.last().expect("path holds the root")] += 1;
                counts.push(0);
                path.push(v);
            } else if w[1] + 1 == w[0] {
                path.pop();
            } else {
                return Err(Error::MalformedContour(format!(
                    "step {i} -> {} is not ±1",
                    i + 1
                )));
            }
        }
        Self::from_child_counts(counts)
    }

    /// Builds a tree from a set of Ulam–Harris addresses.
    pub fn from_addresses(addresses: &[Vec<usize>]) -> Result<Self> {
        let set: BTreeSet<&[usize]> = addresses.iter().map(Vec::as_slice).collect();
        if !set.contains(&[][..]) {
            return Err(Error::MalformedTree("the root address is missing".into()));
        }
        for a in &set {
            if let Some((&last, prefix)) = a.split_last() {
                if last == 0 {
                    return Err(Error::MalformedTree(format!("address {a:?} uses index 0")));
                }
                if !set.contains(prefix) {
                    return Err(Error::MalformedTree(format!("parent of {a:?} is missing")));
                }
                if last > 1 {
                    let mut sibling = a.to_vec();
                    *sibling.last_mut().unwrap() = last - 1;
                    if !set.contains(sibling.as_slice()) {
                        return Err(Error::MalformedTree(format!(
                            "{a:?} is present but {sibling:?} is not"
                        )));
                    }
                }
            }
        }
        // Lexicographic order of addresses is preorder.
        let counts = set
            .iter()
            .map(|a| {
                let mut probe = a.to_vec();
                probe.push(1);
                let mut k = 0;
                while set.contains(probe.as_slice()) {
                    k += 1;
                    *probe.last_mut().unwrap() += 1;
                }
                k
            })
            .collect();
        Self::from_child_counts(counts)
    }

    /// Number of edges `n`.
    pub fn size(&self) -> usize {
        self.child_counts.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.child_counts.len()
    }

    pub fn child_count(&self, v: usize) -> usize {
        self.child_counts[v]
    }

    pub fn child_counts(&self) -> &[usize] {
        &self.child_counts
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NONE).then(|| self.parent[v])
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn children(&self, v: usize) -> Children<'_> {
        Children {
            tree: self,
            next: self.first_child[v],
        }
    }

    /// True for vertices other than the root that have no children.
    pub fn is_nonroot_leaf(&self, v: usize) -> bool {
        v != 0 && self.child_counts[v] == 0
    }

    /// Edge counts of the subtrees rooted at each vertex.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.vertex_count()];
        for v in (1..self.vertex_count()).rev() {
            sizes[self.parent[v]] += sizes[v] + 1;
        }
        sizes
    }

    /// The Ulam–Harris address of `v`.
    pub fn address(&self, v: usize) -> Vec<usize> {
        let mut addr = Vec::with_capacity(self.depth[v]);
        let mut u = v;
        while let Some(p) = self.parent(u) {
            let rank = self.children(p).position(|c| c == u).expect("child of its parent") + 1;
            addr.push(rank);
            u = p;
        }
        addr.reverse();
        addr
    }

    pub fn addresses(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count()).map(|v| self.address(v)).collect()
    }

    /// The contour exploration `v_0, ..., v_{2n}` as preorder indices.
    pub fn contour_exploration(&self) -> Vec<usize> {
        let n = self.size();
        let mut seq = Vec::with_capacity(2 * n + 1);
        seq.push(0);
        let mut path = vec![0usize];
        for u in 1..=n {
            let p = self.parent[u];
            while *path.last().unwrap() != p {
                path.pop();
                seq.push(*path.last().unwrap());
            }
            path.push(u);
            seq.push(u);
        }
        while path.len() > 1 {
            path.pop();
            seq.push(*path.last().unwrap());
        }
        seq
    }

    /// The contour function `C_i = |v_i|`.
    pub fn contour(&self) -> Vec<usize> {
        self.contour_exploration()
            .into_iter()
            .map(|v| self.depth[v])
            .collect()
    }

    /// Child lists indexed by preorder vertex.
    pub fn children_lists(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count())
            .map(|v| self.children(v).collect())
            .collect()
    }
}

pub struct Children<'a> {
    tree: &'a PlaneTree,
    next: usize,
}

impl Iterator for Children<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        (self.next != NONE).then(|| {
            let v = self.next;
            self.next = self.tree.next_sibling[v];
            v
        })
    }
}

/// A plane tree with integer labels, root label `0` and label increments in
/// `{-1, 0, 1}` along every edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledTree {
    tree: PlaneTree,
    labels: Vec<i32>,
}

impl LabeledTree {
    pub fn new(tree: PlaneTree, labels: Vec<i32>) -> Result<Self> {
        if labels.len() != tree.vertex_count() {
            return Err(Error::InvalidLabels(format!(
                "{} labels for {} vertices",
                labels.len(),
                tree.vertex_count()
            )));
        }
        if labels[0] != 0 {
            return Err(Error::InvalidLabels(format!("root label is {}", labels[0])));
        }
        for v in 1..tree.vertex_count() {
            let p = tree.parent[v];
            if (labels[v] - labels[p]).abs() > 1 {
                return Err(Error::InvalidLabels(format!(
                    "edge {p} -> {v} changes the label by {}",
                    labels[v] - labels[p]
                )));
            }
        }
        Ok(Self { tree, labels })
    }

    /// Labeled tree from preorder child counts and labels.
    pub fn from_parts(child_counts: Vec<usize>, labels: Vec<i32>) -> Result<Self> {
        Self::new(PlaneTree::from_child_counts(child_counts)?, labels)
    }

    pub fn tree(&self) -> &PlaneTree {
        &self.tree
    }

    pub fn labels(&self) -> &[i32] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> i32 {
        self.labels[v]
    }

    pub fn size(&self) -> usize {
        self.tree.size()
    }

    pub fn min_label(&self) -> i32 {
        *self.labels.iter().min().expect("a tree has a root")
    }

    pub fn encode(&self) -> ContourCoding {
        encode(self)
    }

    pub fn classify(&self) -> TreeClass {
        classify(self)
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            n: self.size(),
            children: self.tree.children_lists(),
            labels: self.labels.clone(),
        }
    }

    /// Parses the JSON tree format, renumbering vertices into preorder.
    pub fn from_json(json: &TreeJson) -> Result<Self> {
        let (tree, index) = PlaneTree::from_children(&json.children)?;
        if tree.size() != json.n {
            return Err(Error::MalformedTree(format!(
                "declared n = {} but the tree has {} edges",
                json.n,
                tree.size()
            )));
        }
        if json.labels.len() != tree.vertex_count() {
            return Err(Error::InvalidLabels(format!(
                "{} labels for {} vertices",
                json.labels.len(),
                tree.vertex_count()
            )));
        }
        let mut labels = vec![0; json.labels.len()];
        for (old, &new) in index.iter().enumerate() {
            labels[new] = json.labels[old];
        }
        Self::new(tree, labels)
    }
}

/// The JSON interchange format for labeled trees; vertex `0` is the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub n: usize,
    pub children: Vec<Vec<usize>>,
    pub labels: Vec<i32>,
}

/// The contour function and label function of a labeled tree, sampled at
/// integer times `0..=2n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContourCoding {
    contour: Vec<usize>,
    labels: Vec<i32>,
}

impl ContourCoding {
    /// Pairs the two sequences; full validation happens in [`decode`].
    pub fn new(contour: Vec<usize>, labels: Vec<i32>) -> Result<Self> {
        if contour.len() != labels.len() {
            return Err(Error::MalformedContour(format!(
                "contour has {} entries but labels have {}",
                contour.len(),
                labels.len()
            )));
        }
        if contour.len().is_multiple_of(2) {
            return Err(Error::MalformedContour(format!(
                "length {} is not of the form 2n+1",
                contour.len()
            )));
        }
        Ok(Self { contour, labels })
    }

    pub fn n(&self) -> usize {
        (self.contour.len() - 1) / 2
    }

    pub fn contour(&self) -> &[usize] {
        &self.contour
    }

    pub fn labels(&self) -> &[i32] {
        &self.labels
    }

    /// Writes rows `i,C_i,V_i` with a header line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "contour", "label"])?;
        for (i, (c, v)) in self.contour.iter().zip(&self.labels).enumerate() {
            w.serialize((i, c, v))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut contour = Vec::new();
        let mut labels = Vec::new();
        for (expected, row) in r.deserialize::<(usize, usize, i32)>().enumerate() {
            let (i, c, v) = row?;
            if i != expected {
                return Err(Error::MalformedContour(format!(
                    "row index {i} where {expected} was expected"
                )));
            }
            contour.push(c);
            labels.push(v);
        }
        Self::new(contour, labels)
    }
}

pub fn contour_exploration(tree: &PlaneTree) -> Vec<usize> {
    tree.contour_exploration()
}

pub fn encode(lt: &LabeledTree) -> ContourCoding {
    let seq = lt.tree.contour_exploration();
    ContourCoding {
        contour: seq.iter().map(|&v| lt.tree.depth[v]).collect(),
        labels: seq.iter().map(|&v| lt.labels[v]).collect(),
    }
}

pub fn decode(cc: &ContourCoding) -> Result<LabeledTree> {
    let tree = PlaneTree::from_contour(&cc.contour)?;
    let seq = tree.contour_exploration();
    let mut labels: Vec<Option<i32>> = vec![None; tree.vertex_count()];
    for (i, (&v, &value)) in seq.iter().zip(&cc.labels).enumerate() {
        match labels[v] {
            None => labels[v] = Some(value),
            Some(prev) if prev != value => {
                return Err(Error::InconsistentLabels(format!(
                    "vertex {v} carries label {prev} and, at index {i}, label {value}"
                )))
            }
            Some(_) => {}
        }
    }
    let labels: Vec<i32> = labels.into_iter().map(|l| l.expect("every vertex is visited")).collect();
    LabeledTree::new(tree, labels).map_err(|e| match e {
        Error::InvalidLabels(msg) => Error::InconsistentLabels(msg),
        other => other,
    })
}

/// Membership flags of a labeled tree in the classes used by the bijection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeClass {
    /// All labels are nonnegative.
    pub in_wplus: bool,
    /// Every edge into a non-root leaf decreases the label by one.
    pub in_wcirc: bool,
    /// Root has two or more children, or a single child labeled 1 and some
    /// other zero-labeled vertex.
    pub in_h: bool,
    /// Leaf rule on all leaves (root included) and a zero label at some
    /// interior contour time.
    pub nice_prop1: bool,
    /// `in_wplus && in_wcirc && in_h`.
    pub nice_eq: bool,
}

pub fn classify(lt: &LabeledTree) -> TreeClass {
    let t = &lt.tree;
    let u = &lt.labels;
    let n = t.size();

    let in_wplus = u.iter().all(|&l| l >= 0);
    let in_wcirc = (1..t.vertex_count())
        .filter(|&v| t.is_nonroot_leaf(v))
        .all(|v| u[v] == u[t.parent[v]] - 1);
    let k_root = t.child_counts[0];
    let in_h = k_root >= 2 || (k_root == 1 && u[1] == 1 && u[1..].contains(&0));

    // A leaf is a vertex of degree one, so the root counts when k_root = 1.
    let root_leaf_ok = k_root != 1 || u[0] == u[1] - 1;
    let zero_inside = {
        let coding = encode(lt);
        n >= 1 && coding.labels[1..2 * n].contains(&0)
    };
    let nice_prop1 = in_wcirc && root_leaf_ok && zero_inside;

    TreeClass {
        in_wplus,
        in_wcirc,
        in_h,
        nice_prop1,
        nice_eq: in_wplus && in_wcirc && in_h,
    }
}

/// A member of the first-passage set considered by a split selection rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitCandidate {
    pub vertex: usize,
    pub label: i32,
    /// Edge count of the subtree rooted at `vertex`.
    pub subtree_size: usize,
}

/// Result of cutting a labeled tree at a vertex `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    /// Preorder index of `w` in the original tree.
    pub w: usize,
    pub w_address: Vec<usize>,
    /// Vertices that are not strict descendants of `w`, labels unchanged.
    pub upper: LabeledTree,
    /// Descendants of `w` re-rooted at `w`, labels shifted by `-U(w)`.
    pub lower: LabeledTree,
    /// Original index of each vertex of `upper`.
    pub upper_vertices: Vec<usize>,
    /// Original index of each vertex of `lower`.
    pub lower_vertices: Vec<usize>,
}

/// Vertices `w` with `U(w) >= x` whose strict ancestors all have labels
/// below `x`, in preorder.
pub fn first_passage_set(lt: &LabeledTree, x: i32) -> Vec<usize> {
    let t = &lt.tree;
    let mut below = vec![false; t.vertex_count()];
    let mut out = Vec::new();
    for v in 0..t.vertex_count() {
        let ancestors_below = v == 0 || below[t.parent[v]];
        if !ancestors_below {
            continue;
        }
        if lt.labels[v] >= x {
            out.push(v);
        } else {
            below[v] = true;
        }
    }
    out
}

/// Splits `lt` at the first member of the level-`x` first-passage set (in
/// preorder) accepted by `select`.
pub fn first_passage_split<F>(lt: &LabeledTree, x: i32, mut select: F) -> Option<Split>
where
    F: FnMut(&SplitCandidate) -> bool,
{
    let sizes = lt.tree.subtree_sizes();
    let w = first_passage_set(lt, x).into_iter().find(|&w| {
        select(&SplitCandidate {
            vertex: w,
            label: lt.labels[w],
            subtree_size: sizes[w],
        })
    })?;
    Some(split_at(lt, w, sizes[w]))
}

/// The split used by the spatial Markov property: the first-passage vertex
/// whose subtree has at least `r * n` edges.
pub fn first_passage_split_large(lt: &LabeledTree, x: i32, r: f64) -> Option<Split> {
    let threshold = r * lt.size() as f64;
    first_passage_split(lt, x, |c| c.subtree_size as f64 >= threshold)
}

fn split_at(lt: &LabeledTree, w: usize, size: usize) -> Split {
    let t = &lt.tree;
    // In preorder the subtree of w is the contiguous range w..=w+size.
    let lower_vertices: Vec<usize> = (w..=w + size).collect();
    let lower_counts = lower_vertices.iter().map(|&v| t.child_counts[v]).collect();
    let base = lt.labels[w];
    let lower_labels = lower_vertices.iter().map(|&v| lt.labels[v] - base).collect();

    let upper_vertices: Vec<usize> = (0..=w).chain(w + size + 1..t.vertex_count()).collect();
    let upper_counts = upper_vertices
        .iter()
        .map(|&v| if v == w { 0 } else { t.child_counts[v] })
        .collect();
    let upper_labels = upper_vertices.iter().map(|&v| lt.labels[v]).collect();

    Split {
        w,
        w_address: t.address(w),
        upper: LabeledTree::from_parts(upper_counts, upper_labels)
            .expect("restriction of a labeled tree is a labeled tree"),
        lower: LabeledTree::from_parts(lower_counts, lower_labels)
            .expect("re-based subtree is a labeled tree"),
        upper_vertices,
        lower_vertices,
    }
}

/// Map from each labeled tree to its position in `trees`.
pub fn index_trees(trees: &[LabeledTree]) -> HashMap<&LabeledTree, usize> {
    trees.iter().enumerate().map(|(i, t)| (t, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(labels: &[i32]) -> LabeledTree {
        let n = labels.len() - 1;
        let mut counts = vec![1; n];
        counts.push(0);
        LabeledTree::from_parts(counts, labels.to_vec()).unwrap()
    }

    fn cherry(a: i32, b: i32) -> LabeledTree {
        LabeledTree::from_parts(vec![2, 0, 0], vec![0, a, b]).unwrap()
    }

    /// Contour exploration straight from the definition: step to the first
    /// unvisited child, else to the parent.
    fn contour_by_definition(tree: &PlaneTree) -> Vec<Vec<usize>> {
        let addrs: BTreeSet<Vec<usize>> = tree.addresses().into_iter().collect();
        let mut visited = BTreeSet::new();
        let mut cur: Vec<usize> = vec![];
        visited.insert(cur.clone());
        let mut seq = vec![cur.clone()];
        for _ in 0..2 * tree.size() {
            let mut j = 1;
            let next = loop {
                let mut child = cur.clone();
                child.push(j);
                if !addrs.contains(&child) {
                    let mut parent = cur.clone();
                    parent.pop();
                    break parent;
                }
                if !visited.contains(&child) {
                    break child;
                }
                j += 1;
            };
            visited.insert(next.clone());
            seq.push(next.clone());
            cur = next;
        }
        seq
    }

    #[test]
    fn contour_examples() {
        let single = PlaneTree::single_vertex();
        assert_eq!(single.contour_exploration(), vec![0]);

        let edge = PlaneTree::from_child_counts(vec![1, 0]).unwrap();
        assert_eq!(edge.contour_exploration(), vec![0, 1, 0]);

        let t = PlaneTree::from_addresses(&[vec![], vec![1], vec![1, 1], vec![2]]).unwrap();
        let addrs: Vec<Vec<usize>> = t
            .contour_exploration()
            .into_iter()
            .map(|v| t.address(v))
            .collect();
        assert_eq!(
            addrs,
            vec![vec![], vec![1], vec![1, 1], vec![1], vec![], vec![2], vec![]]
        );
        assert_eq!(addrs, contour_by_definition(&t));
        assert_eq!(t.contour(), vec![0, 1, 2, 1, 0, 1, 0]);
    }

    #[test]
    fn contour_matches_definition_on_assorted_trees() {
        for counts in [
            vec![3, 0, 2, 0, 0, 1, 0],
            vec![1, 1, 1, 1, 0],
            vec![2, 2, 0, 1, 0, 2, 0, 0],
        ] {
            let t = PlaneTree::from_child_counts(counts).unwrap();
            let seq = t.contour_exploration();
            assert_eq!(seq.len(), 2 * t.size() + 1);
            let by_def = contour_by_definition(&t);
            let ours: Vec<_> = seq.iter().map(|&v| t.address(v)).collect();
            assert_eq!(ours, by_def);
        }
    }

    #[test]
    fn addresses_round_trip() {
        let t = PlaneTree::from_child_counts(vec![2, 2, 0, 1, 0, 2, 0, 0]).unwrap();
        let back = PlaneTree::from_addresses(&t.addresses()).unwrap();
        assert_eq!(back, t);
        assert!(PlaneTree::from_addresses(&[vec![], vec![2]]).is_err());
        assert!(PlaneTree::from_addresses(&[vec![1]]).is_err());
        assert!(PlaneTree::from_addresses(&[vec![], vec![1, 1]]).is_err());
    }

    #[test]
    fn bad_child_counts_rejected() {
        assert!(PlaneTree::from_child_counts(vec![]).is_err());
        assert!(PlaneTree::from_child_counts(vec![2, 0]).is_err());
        assert!(PlaneTree::from_child_counts(vec![1, 0, 0]).is_err());
    }

    #[test]
    fn encode_examples() {
        let cc = path(&[0, 1]).encode();
        assert_eq!(cc.contour(), &[0, 1, 0]);
        assert_eq!(cc.labels(), &[0, 1, 0]);

        let cc = path(&[0, 1, 0]).encode();
        assert_eq!(cc.contour(), &[0, 1, 2, 1, 0]);
        assert_eq!(cc.labels(), &[0, 1, 0, 1, 0]);
        assert_eq!(decode(&cc).unwrap(), path(&[0, 1, 0]));

        let cc = cherry(0, 0).encode();
        assert_eq!(cc.contour(), &[0, 1, 0, 1, 0]);
        assert_eq!(cc.labels(), &[0, 0, 0, 0, 0]);
    }

    #[test]
    fn decode_examples() {
        let cc = ContourCoding::new(vec![0, 1, 0], vec![0, 1, 0]).unwrap();
        assert_eq!(decode(&cc).unwrap(), path(&[0, 1]));

        let cc = ContourCoding::new(vec![0, 1, 0], vec![0, 2, 0]).unwrap();
        assert!(matches!(decode(&cc), Err(Error::InconsistentLabels(_))));

        let cc = ContourCoding::new(vec![0, 1, 2, 1, 0], vec![0, 1, 0, 1, 0]).unwrap();
        assert_eq!(decode(&cc).unwrap(), path(&[0, 1, 0]));
    }

    #[test]
    fn decode_errors() {
        let cc = ContourCoding::new(vec![0, 1, 0], vec![0, 1, 1]).unwrap();
        assert!(matches!(decode(&cc), Err(Error::InconsistentLabels(_))));
        let cc = ContourCoding::new(vec![0, 2, 0], vec![0, 1, 0]).unwrap();
        assert!(matches!(decode(&cc), Err(Error::MalformedContour(_))));
        let cc = ContourCoding::new(vec![1, 0, 1], vec![0, 0, 0]).unwrap();
        assert!(matches!(decode(&cc), Err(Error::MalformedContour(_))));
        assert!(ContourCoding::new(vec![0, 1], vec![0, 1]).is_err());
    }

    #[test]
    fn labels_outside_w_rejected() {
        assert!(LabeledTree::from_parts(vec![1, 0], vec![1, 1]).is_err());
        assert!(LabeledTree::from_parts(vec![1, 0], vec![0, 2]).is_err());
        assert!(LabeledTree::from_parts(vec![1, 0], vec![0]).is_err());
    }

    #[test]
    fn classify_examples() {
        let c = classify(&path(&[0, 1, 0]));
        assert!(c.in_wplus && c.in_wcirc && c.in_h && c.nice_prop1 && c.nice_eq);

        let c = classify(&cherry(0, 0));
        assert!(c.in_wplus);
        assert!(!c.in_wcirc);

        let c = classify(&LabeledTree::new(PlaneTree::single_vertex(), vec![0]).unwrap());
        assert!(c.in_wplus);
        assert!(!c.in_h);
        assert!(!c.nice_eq);
        assert!(!c.nice_prop1);
    }

    #[test]
    fn h_requires_second_zero_when_root_is_a_leaf() {
        // ∅ - 1 - 11 - 111 with labels 0,1,2,1: leaf rule holds but no
        // other zero.
        let c = classify(&path(&[0, 1, 2, 1]));
        assert!(c.in_wcirc && c.in_wplus);
        assert!(!c.in_h);
        assert!(!c.nice_prop1);
    }

    #[test]
    fn split_examples() {
        let s = first_passage_split(&path(&[0, 1]), 1, |_| true).unwrap();
        assert_eq!(s.w, 1);
        assert_eq!(s.w_address, vec![1]);
        assert_eq!(s.upper, path(&[0, 1]));
        assert_eq!(s.lower.size(), 0);
        assert_eq!(s.lower.labels(), &[0]);

        assert!(first_passage_split(&cherry(0, 0), 1, |_| true).is_none());
        assert!(first_passage_split(&path(&[0, 0, 0]), 1, |_| true).is_none());

        let s = first_passage_split(&path(&[0, 1, 2]), 2, |_| true).unwrap();
        assert_eq!(s.w_address, vec![1, 1]);
    }

    #[test]
    fn split_partitions_vertices() {
        // Root with children a (label 1, with two children) and b (label 1).
        let lt = LabeledTree::from_parts(vec![2, 2, 0, 0, 0], vec![0, 1, 2, 0, 1]).unwrap();
        assert_eq!(first_passage_set(&lt, 1), vec![1, 4]);
        let s = first_passage_split(&lt, 1, |c| c.subtree_size >= 2).unwrap();
        assert_eq!(s.w, 1);
        assert_eq!(s.upper.size() + s.lower.size(), lt.size());
        assert_eq!(s.lower.labels(), &[0, 1, -1]);
        let mut all: Vec<usize> = s.upper_vertices.clone();
        all.extend(s.lower_vertices.iter().skip(1));
        all.sort_unstable();
        assert_eq!(all, (0..lt.tree().vertex_count()).collect::<Vec<_>>());
        assert!(first_passage_split_large(&lt, 1, 0.6).is_none());
        assert!(first_passage_split_large(&lt, 1, 0.5).is_some());
    }

    #[test]
    fn json_round_trip_and_renumbering() {
        let lt = LabeledTree::from_parts(vec![2, 1, 0, 0], vec![0, 1, 0, -1]).unwrap();
        let json = lt.to_json();
        assert_eq!(json.children, vec![vec![1, 3], vec![2], vec![], vec![]]);
        assert_eq!(LabeledTree::from_json(&json).unwrap(), lt);

        // Same tree, vertices listed in a different order.
        let shuffled = TreeJson {
            n: 3,
            children: vec![vec![3, 1], vec![], vec![], vec![2]],
            labels: vec![0, -1, 0, 1],
        };
        assert_eq!(LabeledTree::from_json(&shuffled).unwrap(), lt);

        let cyclic = TreeJson {
            n: 2,
            children: vec![vec![], vec![2], vec![1]],
            labels: vec![0, 0, 0],
        };
        assert!(LabeledTree::from_json(&cyclic).is_err());
    }

    #[test]
    fn coding_csv_round_trip() {
        let cc = path(&[0, 1, 0]).encode();
        let mut buf = Vec::new();
        cc.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("i,contour,label\n0,0,0\n1,1,1\n"));
        assert_eq!(ContourCoding::read_csv(&buf[..]).unwrap(), cc);
    }
}
