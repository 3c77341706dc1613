//! Bipartite chord-intersection graph, maximum matching (Hopcroft–Karp)
//! and minimum vertex cover via König's construction. The independent
//! chords are everything outside the cover.

use std::collections::VecDeque;

use super::chords::{chords_intersect, Chord};
use crate::error::{Error, Result};

/// Bipartite graph between horizontal chords (left side) and vertical
/// chords (right side); an edge means the closed segments intersect.
#[derive(Debug, Clone)]
pub struct ChordGraph {
    pub left: usize,
    pub right: usize,
    /// Adjacency from left vertex to right vertices, ascending.
    pub adj: Vec<Vec<usize>>,
}

impl ChordGraph {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(l, rs)| rs.iter().map(move |&r| (l, r)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }
}

/// Matching as left-to-right assignments; `pair_left[l] = Some(r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub pair_left: Vec<Option<usize>>,
    pub pair_right: Vec<Option<usize>>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pair_left.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Vertex cover given as index sets per side, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCover {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl VertexCover {
    pub fn len(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

/// Build the intersection graph between perpendicular chord families.
pub fn chord_graph(horizontal: &[Chord], vertical: &[Chord]) -> ChordGraph {
    let adj = horizontal
        .iter()
        .map(|h| {
            vertical
                .iter()
                .enumerate()
                .filter(|(_, v)| chords_intersect(h, v))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    ChordGraph {
        left: horizontal.len(),
        right: vertical.len(),
        adj,
    }
}

/// Hopcroft–Karp maximum matching. Vertices are explored in index order
/// throughout, so the result is deterministic.
pub fn max_bipartite_matching(g: &ChordGraph) -> Matching {
    let mut pair_left: Vec<Option<usize>> = vec![None; g.left];
    let mut pair_right: Vec<Option<usize>> = vec![None; g.right];
    const INF: u32 = u32::MAX;
    let mut dist = vec![INF; g.left];

    loop {
        // BFS layers from unmatched left vertices
        let mut queue: VecDeque<usize> = VecDeque::new();
        for l in 0..g.left {
            if pair_left[l].is_none() {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = INF;
            }
        }
        let mut found_augmenting = false;
        while let Some(l) = queue.pop_front() {
            for &r in &g.adj[l] {
                match pair_right[r] {
                    None => found_augmenting = true,
                    Some(l2) if dist[l2] == INF => {
                        dist[l2] = dist[l] + 1;
                        queue.push_back(l2);
                    }
                    _ => {}
                }
            }
        }
        if !found_augmenting {
            break;
        }
        // DFS along layered structure
        fn augment(
            l: usize,
            g: &ChordGraph,
            dist: &mut [u32],
            pair_left: &mut [Option<usize>],
            pair_right: &mut [Option<usize>],
        ) -> bool {
            for &r in &g.adj[l] {
                let ok = match pair_right[r] {
                    None => true,
                    Some(l2) => {
                        dist[l2] == dist[l] + 1 && augment(l2, g, dist, pair_left, pair_right)
                    }
                };
                if ok {
                    pair_left[l] = Some(r);
                    pair_right[r] = Some(l);
                    return true;
                }
            }
            dist[l] = u32::MAX;
            false
        }
        for l in 0..g.left {
            if pair_left[l].is_none() && dist[l] == 0 {
                augment(l, g, &mut dist, &mut pair_left, &mut pair_right);
            }
        }
    }

    Matching {
        pair_left,
        pair_right,
    }
}

/// König construction: alternating reachability from unmatched left
/// vertices gives Z; the cover is (L without Z) plus (R intersect Z).
/// The cover size always equals the matching size.
pub fn min_vertex_cover(g: &ChordGraph, m: &Matching) -> VertexCover {
    let mut z_left = vec![false; g.left];
    let mut z_right = vec![false; g.right];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for l in 0..g.left {
        if m.pair_left[l].is_none() {
            z_left[l] = true;
            queue.push_back(l);
        }
    }
    while let Some(l) = queue.pop_front() {
        for &r in &g.adj[l] {
            // forward along non-matching edges
            if m.pair_left[l] == Some(r) || z_right[r] {
                continue;
            }
            z_right[r] = true;
            // back along the matching edge
            if let Some(l2) = m.pair_right[r] {
                if !z_left[l2] {
                    z_left[l2] = true;
                    queue.push_back(l2);
                }
            }
        }
    }
    VertexCover {
        left: (0..g.left).filter(|&l| !z_left[l]).collect(),
        right: (0..g.right).filter(|&r| z_right[r]).collect(),
    }
}

/// Chords outside the cover: a maximum set of pairwise non-intersecting
/// chords. Verified geometrically; a violation means the cover is wrong.
pub fn independent_chords(
    horizontal: &[Chord],
    vertical: &[Chord],
    cover: &VertexCover,
) -> Result<Vec<Chord>> {
    let mut in_cover_left = vec![false; horizontal.len()];
    for &l in &cover.left {
        in_cover_left[l] = true;
    }
    let mut in_cover_right = vec![false; vertical.len()];
    for &r in &cover.right {
        in_cover_right[r] = true;
    }
    let mut kept: Vec<Chord> = Vec::new();
    kept.extend(
        horizontal
            .iter()
            .enumerate()
            .filter(|(i, _)| !in_cover_left[*i])
            .map(|(_, c)| *c),
    );
    kept.extend(
        vertical
            .iter()
            .enumerate()
            .filter(|(i, _)| !in_cover_right[*i])
            .map(|(_, c)| *c),
    );
    for i in 0..kept.len() {
        for j in i + 1..kept.len() {
            if chords_intersect(&kept[i], &kept[j]) {
                return Err(Error::Internal(format!(
                    "independent chords intersect: {:?} and {:?}",
                    kept[i], kept[j]
                )));
            }
        }
    }
    Ok(kept)
}
