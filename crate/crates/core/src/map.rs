//! Rooted combinatorial maps on the sphere, encoded by half-edges ("darts").
//!
//! Every edge is a pair of darts exchanged by `twin`. `next` is the rotation
//! system: it cycles through the darts leaving a vertex in counterclockwise
//! order. Faces are the orbits of `d ↦ next(twin(d))`, i.e. follow a dart to
//! its head and turn to the next dart around that vertex; these are the same
//! orbits as those of `twin ∘ next⁻¹` traversed backwards.

use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfEdgeMap {
    twin: Vec<usize>,
    next: Vec<usize>,
    origin: Vec<usize>,
    /// One dart leaving each vertex.
    vertex_dart: Vec<usize>,
    root_dart: usize,
}

impl HalfEdgeMap {
    /// Validates and assembles a map from explicit permutations.
    pub fn new(twin: Vec<usize>, next: Vec<usize>, origin: Vec<usize>, root_dart: usize) -> Result<Self> {
        let darts = twin.len();
        if next.len() != darts || origin.len() != darts {
            return Err(Error::MalformedMap("permutation lengths differ".into()));
        }
        if darts == 0 || !darts.is_multiple_of(2) {
            return Err(Error::MalformedMap(format!("{darts} darts is not a positive even count")));
        }
        if root_dart >= darts {
            return Err(Error::MalformedMap(format!("root dart {root_dart} out of range")));
        }
        for (d, &t) in twin.iter().enumerate() {
            if t >= darts || t == d || twin[t] != d {
                return Err(Error::MalformedMap(format!(
                    "twin is not a fixed-point-free involution at dart {d}"
                )));
            }
        }
        let mut hit = vec![false; darts];
        for &s in &next {
            if s >= darts || std::mem::replace(&mut hit[s], true) {
                return Err(Error::MalformedMap("rotation is not a permutation".into()));
            }
        }
        let vertex_count = origin.iter().max().map_or(0, |&m| m + 1);
        let mut vertex_dart = vec![usize::MAX; vertex_count];
        let mut seen = vec![false; darts];
        for start in 0..darts {
            if seen[start] {
                continue;
            }
            let v = origin[start];
            if vertex_dart[v] != usize::MAX {
                return Err(Error::MalformedMap(format!(
                    "vertex {v} has more than one rotation cycle"
                )));
            }
            vertex_dart[v] = start;
            let mut d = start;
            loop {
                seen[d] = true;
                if origin[d] != v {
                    return Err(Error::MalformedMap(format!(
                        "rotation cycle of vertex {v} contains dart {d} of vertex {}",
                        origin[d]
                    )));
                }
                d = next[d];
                if d == start {
                    break;
                }
            }
        }
        if let Some(v) = vertex_dart.iter().position(|&d| d == usize::MAX) {
            return Err(Error::MalformedMap(format!("vertex {v} has no darts")));
        }
        let map = Self {
            twin,
            next,
            origin,
            vertex_dart,
            root_dart,
        };
        let reached = map.bfs_distances(0).iter().filter(|&&d| d != usize::MAX).count();
        if reached != vertex_count {
            return Err(Error::MalformedMap("map is not connected".into()));
        }
        Ok(map)
    }

    /// Builds a map from per-vertex counterclockwise dart lists, with the
    /// convention that darts `2e` and `2e + 1` form edge `e`.
    pub fn from_rotation(rotation: &[Vec<usize>], root_dart: usize) -> Result<Self> {
        let darts: usize = rotation.iter().map(Vec::len).sum();
        let mut next = vec![usize::MAX; darts];
        let mut origin = vec![usize::MAX; darts];
        for (v, cycle) in rotation.iter().enumerate() {
            for (k, &d) in cycle.iter().enumerate() {
                if d >= darts || origin[d] != usize::MAX {
                    return Err(Error::MalformedMap(format!(
                        "dart {d} is missing or listed twice"
                    )));
                }
                origin[d] = v;
                next[d] = cycle[(k + 1) % cycle.len()];
            }
        }
        let twin = (0..darts).map(|d| d ^ 1).collect();
        Self::new(twin, next, origin, root_dart)
    }

    pub fn dart_count(&self) -> usize {
        self.twin.len()
    }

    pub fn edge_count(&self) -> usize {
        self.twin.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_dart.len()
    }

    pub fn root_dart(&self) -> usize {
        self.root_dart
    }

    pub fn twin(&self, d: usize) -> usize {
        self.twin[d]
    }

    pub fn next_around_vertex(&self, d: usize) -> usize {
        self.next[d]
    }

    pub fn origin(&self, d: usize) -> usize {
        self.origin[d]
    }

    /// Head vertex of dart `d`.
    pub fn target(&self, d: usize) -> usize {
        self.origin[self.twin[d]]
    }

    /// Successor of `d` along the boundary of its face.
    pub fn next_in_face(&self, d: usize) -> usize {
        self.next[self.twin[d]]
    }

    /// Darts leaving `v`, counterclockwise, starting from an arbitrary one.
    pub fn darts_around(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.vertex_dart[v];
        let mut cur = Some(start);
        std::iter::from_fn(move || {
            let d = cur?;
            let n = self.next[d];
            cur = (n != start).then_some(n);
            Some(d)
        })
    }

    pub fn degree(&self, v: usize) -> usize {
        self.darts_around(v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for &v in &self.origin {
            deg[v] += 1;
        }
        deg
    }

    /// Face boundaries as dart cycles.
    pub fn face_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.dart_count()];
        let mut faces = Vec::new();
        for start in 0..self.dart_count() {
            if seen[start] {
                continue;
            }
            let mut face = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                face.push(d);
                d = self.next_in_face(d);
            }
            faces.push(face);
        }
        faces
    }

    /// Face degrees; an edge with the same face on both sides counts twice.
    pub fn faces(&self) -> Vec<usize> {
        self.face_orbits().iter().map(Vec::len).collect()
    }

    pub fn face_count(&self) -> usize {
        self.face_orbits().len()
    }

    /// Genus from the Euler relation `V - E + F = 2 - 2g`.
    pub fn genus(&self) -> Result<usize> {
        let chi = self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(Error::NonIntegerGenus { chi });
        }
        Ok(((2 - chi) / 2) as usize)
    }

    /// Hop distances from `source`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for d in self.darts_around(v) {
                let w = self.target(d);
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Edges as `(origin, target)` of their lower-numbered dart.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        (0..self.dart_count())
            .filter(|&d| d < self.twin[d])
            .map(|d| (self.origin[d], self.target(d)))
            .collect()
    }

    /// Per-vertex counterclockwise dart cycles, each starting at its
    /// smallest dart.
    pub fn rotation_lists(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count())
            .map(|v| {
                let start = self.darts_around(v).min().expect("vertices have darts");
                let mut cycle = vec![start];
                let mut d = self.next[start];
                while d != start {
                    cycle.push(d);
                    d = self.next[d];
                }
                cycle
            })
            .collect()
    }

    /// A labeling-independent code of the rooted map: darts are renumbered
    /// in the order a breadth-first search from the root dart discovers them
    /// through `next` and `twin`. Two rooted maps are isomorphic iff their
    /// codes are equal.
    pub fn canonical_code(&self) -> Vec<usize> {
        let darts = self.dart_count();
        let mut index = vec![usize::MAX; darts];
        let mut order = Vec::with_capacity(darts);
        index[self.root_dart] = 0;
        order.push(self.root_dart);
        let mut head = 0;
        while head < order.len() {
            let d = order[head];
            head += 1;
            for e in [self.next[d], self.twin[d]] {
                if index[e] == usize::MAX {
                    index[e] = order.len();
                    order.push(e);
                }
            }
        }
        order
            .iter()
            .flat_map(|&d| [index[self.next[d]], index[self.twin[d]]])
            .collect()
    }

    pub fn header(&self, n: usize) -> MapHeader {
        MapHeader {
            n,
            root_dart: self.root_dart,
            vertex_count: self.vertex_count(),
        }
    }

    /// Writes `vertex_a,vertex_b` rows, one per edge.
    pub fn write_edge_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["vertex_a", "vertex_b"])?;
        for (a, b) in self.edge_list() {
            w.serialize((a, b))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// JSON header accompanying an edge-list export.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapHeader {
    pub n: usize,
    pub root_dart: usize,
    pub vertex_count: usize,
}

/// A rooted planar quadrangulation. The root vertex is the origin of the
/// root dart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadrangulation {
    map: HalfEdgeMap,
    face_count: usize,
}

impl Quadrangulation {
    /// Checks that every face has degree 4, the genus is 0, and the vertex
    /// and edge counts match `n + 2` and `2n`.
    pub fn new(map: HalfEdgeMap) -> Result<Self> {
        let degrees = map.faces();
        if let Some(bad) = degrees.iter().find(|&&d| d != 4) {
            return Err(Error::NotQuadrangulation(format!("face of degree {bad}")));
        }
        let n = degrees.len();
        let genus = map.genus()?;
        if genus != 0 {
            return Err(Error::NotQuadrangulation(format!("genus {genus}")));
        }
        if map.edge_count() != 2 * n || map.vertex_count() != n + 2 {
            return Err(Error::NotQuadrangulation(format!(
                "V = {}, E = {} for {n} faces",
                map.vertex_count(),
                map.edge_count()
            )));
        }
        Ok(Self { map, face_count: n })
    }

    pub fn map(&self) -> &HalfEdgeMap {
        &self.map
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn root_vertex(&self) -> usize {
        self.map.origin(self.map.root_dart())
    }

    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        self.map.bfs_distances(source)
    }

    pub fn min_degree(&self) -> usize {
        self.map.degrees().into_iter().min().unwrap_or(0)
    }

    pub fn pendant_vertices(&self) -> Vec<usize> {
        self.map
            .degrees()
            .into_iter()
            .enumerate()
            .filter_map(|(v, d)| (d == 1).then_some(v))
            .collect()
    }

    /// No vertex of degree one.
    pub fn is_nice(&self) -> bool {
        self.min_degree() >= 2
    }

    pub fn header(&self) -> MapHeader {
        self.map.header(self.face_count)
    }
}

pub fn faces(m: &HalfEdgeMap) -> Vec<usize> {
    m.faces()
}

pub fn genus(m: &HalfEdgeMap) -> Result<usize> {
    m.genus()
}

pub fn bfs_distances(q: &Quadrangulation, source: usize) -> Vec<usize> {
    q.bfs_distances(source)
}
