//! Union-Find decoding over the 3D space-time syndrome graph.
//!
//! Odd clusters grow by half edges, merge on contact, and even clusters are
//! peeled to a correction whose syndrome reproduces the input defects.
//! Edges carry unit weight in space (adjacent stabilizer sites of one type)
//! and in time (consecutive measurement layers of one site).

use super::lattice::{StabKind, ToricLattice};

/// A vertex of the decoding graph: `(site, layer)` flattened.
#[derive(Debug, Clone)]
pub struct DecodeGraph {
    pub sites: usize,
    pub layers: usize,
    /// Edge endpoints; the first `space_edges` entries carry a lattice
    /// data-qubit index in `edge_qubit`.
    edges: Vec<(u32, u32)>,
    space_edges: usize,
    edge_qubit: Vec<u32>,
    /// Incident edge lists per vertex.
    incident: Vec<Vec<u32>>,
}

impl DecodeGraph {
    /// Graph for one stabilizer family over `layers` measurement layers.
    pub fn new(lattice: &ToricLattice, kind: StabKind, layers: usize) -> DecodeGraph {
        let sites = lattice.num_sites();
        let vert = |site: usize, t: usize| (t * sites + site) as u32;
        let mut edges = Vec::new();
        let mut edge_qubit = Vec::new();
        // Space edges: one per (shared data qubit, layer); each unordered
        // site pair appears once.
        for t in 0..layers {
            for site in 0..sites {
                let neighbors = lattice.site_neighbors(kind, site);
                let ring = lattice.stabilizer_edges(kind, site);
                for (n, q) in neighbors.iter().zip(ring.iter()) {
                    if site < *n {
                        edges.push((vert(site, t), vert(*n, t)));
                        edge_qubit.push(*q as u32);
                    }
                }
            }
        }
        let space_edges = edges.len();
        for t in 0..layers.saturating_sub(1) {
            for site in 0..sites {
                edges.push((vert(site, t), vert(site, t + 1)));
            }
        }
        let mut incident = vec![Vec::new(); sites * layers];
        for (i, (u, v)) in edges.iter().enumerate() {
            incident[*u as usize].push(i as u32);
            incident[*v as usize].push(i as u32);
        }
        DecodeGraph {
            sites,
            layers,
            edges,
            space_edges,
            edge_qubit,
            incident,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.sites * self.layers
    }

    pub fn vertex(&self, site: usize, layer: usize) -> usize {
        layer * self.sites + site
    }
}

/// The decoded correction: lattice data qubits to flip, plus the matched
/// space-time edge set for validity checks.
#[derive(Debug, Clone)]
pub struct Correction {
    pub qubit_flips: Vec<u32>,
    pub edges: Vec<u32>,
}

struct UnionFind {
    parent: Vec<u32>,
    parity: Vec<bool>,
    boundary: Vec<Vec<u32>>,
}

impl UnionFind {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        // Larger boundary list wins to keep merges cheap.
        let (keep, drop) = if self.boundary[ra as usize].len() >= self.boundary[rb as usize].len()
        {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[drop as usize] = keep;
        let parity = self.parity[keep as usize] ^ self.parity[drop as usize];
        self.parity[keep as usize] = parity;
        let moved = std::mem::take(&mut self.boundary[drop as usize]);
        self.boundary[keep as usize].extend(moved);
        keep
    }
}

/// Decode one defect set on the given graph.
///
/// Defect parity must be even overall (guaranteed on a torus); the returned
/// correction's syndrome equals the input defects exactly.
pub fn decode_union_find(graph: &DecodeGraph, defects: &[bool]) -> Correction {
    assert_eq!(defects.len(), graph.num_vertices());
    let n = graph.num_vertices();
    debug_assert!(
        defects.iter().filter(|d| **d).count() % 2 == 0,
        "odd total defect parity signals a syndrome construction bug"
    );
    let mut uf = UnionFind {
        parent: (0..n as u32).collect(),
        parity: defects.to_vec(),
        boundary: vec![Vec::new(); n],
    };
    let mut allocated = vec![false; n];
    let mut growth = vec![0u8; graph.edges.len()];
    let mut grown_edges: Vec<u32> = Vec::new();
    let mut active: Vec<u32> = Vec::new();
    for (v, d) in defects.iter().enumerate() {
        if *d {
            allocated[v] = true;
            uf.boundary[v] = graph.incident[v].clone();
            active.push(v as u32);
        }
    }

    // Weighted growth: every odd cluster pushes half an edge per round.
    loop {
        active.retain(|r| {
            let root = uf.find(*r);
            root == *r && uf.parity[root as usize]
        });
        active.sort_unstable();
        active.dedup();
        if active.is_empty() {
            break;
        }
        let mut merges: Vec<(u32, u32)> = Vec::new();
        for root in active.clone() {
            let root = uf.find(root);
            if !uf.parity[root as usize] {
                continue;
            }
            let edges = std::mem::take(&mut uf.boundary[root as usize]);
            let mut keep = Vec::with_capacity(edges.len());
            for e in edges {
                if growth[e as usize] >= 2 {
                    continue;
                }
                let (u, v) = graph.edges[e as usize];
                if uf.find(u) == uf.find(v) {
                    continue; // interior edge
                }
                growth[e as usize] += 1;
                if growth[e as usize] >= 2 {
                    grown_edges.push(e);
                    merges.push((u, v));
                } else {
                    keep.push(e);
                }
            }
            let root = uf.find(root);
            uf.boundary[root as usize].extend(keep);
        }
        for (u, v) in merges {
            for w in [u, v] {
                if !allocated[w as usize] {
                    allocated[w as usize] = true;
                    let wi = w as usize;
                    let extra = graph.incident[wi].clone();
                    let rw = uf.find(w);
                    uf.boundary[rw as usize].extend(extra);
                }
            }
            let merged = uf.union(u, v);
            active.push(merged);
        }
    }

    // Peeling: spanning forest of the grown edges, leaves first.
    grown_edges.sort_unstable();
    grown_edges.dedup();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for e in &grown_edges {
        let (u, v) = graph.edges[*e as usize];
        adj[u as usize].push(*e);
        adj[v as usize].push(*e);
    }
    let mut visited = vec![false; n];
    let mut forest: Vec<(u32, u32, u32)> = Vec::new(); // (edge, child, parent)
    for e in &grown_edges {
        let (u, _) = graph.edges[*e as usize];
        if visited[u as usize] {
            continue;
        }
        // BFS tree rooted at u over grown edges.
        let mut queue = std::collections::VecDeque::new();
        visited[u as usize] = true;
        queue.push_back(u);
        while let Some(x) = queue.pop_front() {
            for e2 in &adj[x as usize] {
                let (a, b) = graph.edges[*e2 as usize];
                let other = if a == x { b } else { a };
                if !visited[other as usize] {
                    visited[other as usize] = true;
                    forest.push((*e2, other, x));
                    queue.push_back(other);
                }
            }
        }
    }
    let mut defect = defects.to_vec();
    let mut correction_edges = Vec::new();
    // Children were appended after their parents, so reverse order peels
    // leaves first.
    for (e, child, parent) in forest.into_iter().rev() {
        if defect[child as usize] {
            defect[child as usize] = false;
            defect[parent as usize] = !defect[parent as usize];
            correction_edges.push(e);
        }
    }
    debug_assert!(defect.iter().all(|d| !*d), "peeling left unmatched defects");

    let mut qubit_flips = Vec::new();
    for e in &correction_edges {
        if (*e as usize) < graph.space_edges {
            qubit_flips.push(graph.edge_qubit[*e as usize]);
        }
    }
    Correction {
        qubit_flips,
        edges: correction_edges,
    }
}

/// Syndrome of a space-time edge set: defect parity per vertex. Used to
/// assert decoder validity.
pub fn edge_set_syndrome(graph: &DecodeGraph, edges: &[u32]) -> Vec<bool> {
    let mut s = vec![false; graph.num_vertices()];
    for e in edges {
        let (u, v) = graph.edges[*e as usize];
        s[u as usize] = !s[u as usize];
        s[v as usize] = !s[v as usize];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn graph(l: usize, layers: usize) -> (ToricLattice, DecodeGraph) {
        let lat = ToricLattice::new(l);
        let g = DecodeGraph::new(&lat, StabKind::Plaquette, layers);
        (lat, g)
    }

    #[test]
    fn empty_syndrome_yields_empty_correction() {
        let (_, g) = graph(4, 3);
        let defects = vec![false; g.num_vertices()];
        let c = decode_union_find(&g, &defects);
        assert!(c.edges.is_empty());
        assert!(c.qubit_flips.is_empty());
    }

    #[test]
    fn adjacent_defect_pair_is_matched_by_one_edge() {
        let (lat, g) = graph(4, 1);
        // Plaquettes 0 and 1 are adjacent in space.
        let mut defects = vec![false; g.num_vertices()];
        defects[g.vertex(0, 0)] = true;
        defects[g.vertex(1, 0)] = true;
        let c = decode_union_find(&g, &defects);
        assert_eq!(c.edges.len(), 1);
        assert_eq!(c.qubit_flips.len(), 1);
        // The flipped qubit is the shared edge of the two plaquettes.
        let shared = lat.v(0, 1);
        assert_eq!(c.qubit_flips[0] as usize, shared);
    }

    #[test]
    fn time_like_pair_needs_no_qubit_flip() {
        let (_, g) = graph(4, 3);
        let mut defects = vec![false; g.num_vertices()];
        defects[g.vertex(5, 0)] = true;
        defects[g.vertex(5, 1)] = true;
        let c = decode_union_find(&g, &defects);
        assert_eq!(c.edges.len(), 1);
        assert!(c.qubit_flips.is_empty(), "measurement error only");
    }

    #[test]
    fn random_syndromes_are_always_reproduced() {
        // Decoder validity: syndrome(correction) == input, on many random
        // even-parity instances.
        let mut rng = crate::rng::shot_rng(13, 0);
        for l in [2usize, 4, 6, 8] {
            let (_, g) = graph(l, l + 1);
            for _ in 0..250 {
                let mut defects = vec![false; g.num_vertices()];
                let flips = rng.gen_range(0..g.num_vertices() / 2) * 2;
                // Random even-size defect set.
                let mut placed = 0;
                while placed < flips {
                    let v = rng.gen_range(0..g.num_vertices());
                    if !defects[v] {
                        defects[v] = true;
                        placed += 1;
                    }
                }
                let c = decode_union_find(&g, &defects);
                let syn = edge_set_syndrome(&g, &c.edges);
                assert_eq!(syn, defects, "L={l}");
            }
        }
    }
}
