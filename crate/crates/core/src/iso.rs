//! Backtracking search for a state bijection between two automata, shared by
//! the plain and compressed representations.

use std::collections::{BTreeMap, HashSet};

/// A transition with states as dense indices. Plain transitions use
/// singleton slots and a singleton target.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Edge {
    pub symbol: String,
    pub slots: Vec<Vec<u32>>,
    pub targets: Vec<u32>,
}

pub(crate) struct Shape {
    pub states: usize,
    pub finals: Vec<bool>,
    pub edges: Vec<Edge>,
}

impl Edge {
    fn mapped(&self, sigma: &[u32]) -> Edge {
        let map = |v: &Vec<u32>| {
            let mut out: Vec<u32> = v.iter().map(|&q| sigma[q as usize]).collect();
            out.sort_unstable();
            out
        };
        Edge {
            symbol: self.symbol.clone(),
            slots: self.slots.iter().map(map).collect(),
            targets: map(&self.targets),
        }
    }

    fn states(&self) -> impl Iterator<Item = u32> + '_ {
        self.slots.iter().flatten().chain(&self.targets).copied()
    }
}

/// Per-state multiset of (symbol, role) incidences plus finality.
fn signatures(shape: &Shape) -> Vec<(bool, Vec<(String, usize)>)> {
    let mut sig: Vec<Vec<(String, usize)>> = vec![Vec::new(); shape.states];
    for edge in &shape.edges {
        for (i, slot) in edge.slots.iter().enumerate() {
            for &q in slot {
                sig[q as usize].push((edge.symbol.clone(), i + 1));
            }
        }
        for &q in &edge.targets {
            sig[q as usize].push((edge.symbol.clone(), 0));
        }
    }
    sig.into_iter()
        .enumerate()
        .map(|(q, mut s)| {
            s.sort();
            (shape.finals[q], s)
        })
        .collect()
}

pub(crate) fn isomorphic(a: &Shape, b: &Shape) -> bool {
    if a.states != b.states || a.edges.len() != b.edges.len() {
        return false;
    }
    let target: HashSet<Edge> = b.edges.iter().cloned().collect();
    if target.len() != b.edges.len() {
        return false;
    }
    let sig_a = signatures(a);
    let sig_b = signatures(b);
    let mut census: BTreeMap<_, isize> = BTreeMap::new();
    for s in &sig_a {
        *census.entry(s).or_default() += 1;
    }
    for s in &sig_b {
        *census.entry(s).or_default() -= 1;
    }
    if census.values().any(|&n| n != 0) {
        return false;
    }
    // Each edge is checked as soon as its last state is assigned.
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); a.states];
    for (i, edge) in a.edges.iter().enumerate() {
        match edge.states().max() {
            Some(q) => due[q as usize].push(i),
            None => {
                if !target.contains(edge) {
                    return false;
                }
            }
        }
    }
    let candidates: Vec<Vec<u32>> = sig_a
        .iter()
        .map(|s| (0..b.states as u32).filter(|&q| &sig_b[q as usize] == s).collect())
        .collect();
    let mut search = Search {
        a,
        target: &target,
        candidates,
        due,
        sigma: vec![0; a.states],
        used: vec![false; b.states],
    };
    search.assign(0)
}

struct Search<'a> {
    a: &'a Shape,
    target: &'a HashSet<Edge>,
    candidates: Vec<Vec<u32>>,
    due: Vec<Vec<usize>>,
    sigma: Vec<u32>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn assign(&mut self, q: usize) -> bool {
        if q == self.a.states {
            return true;
        }
        for k in 0..self.candidates[q].len() {
            let image = self.candidates[q][k];
            if self.used[image as usize] {
                continue;
            }
            self.sigma[q] = image;
            let consistent = self.due[q]
                .iter()
                .all(|&e| self.target.contains(&self.a.edges[e].mapped(&self.sigma)));
            if consistent {
                self.used[image as usize] = true;
                if self.assign(q + 1) {
                    return true;
                }
                self.used[image as usize] = false;
            }
        }
        false
    }
}
