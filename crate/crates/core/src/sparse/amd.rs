//! Approximate minimum degree ordering on the quotient graph.
//!
//! Nodes are variables (uneliminated rows), elements (eliminated pivots that
//! stand for the clique they created), or retired. Each step picks the
//! variable of smallest approximate external degree, ties going to the
//! smallest index, turns it into an element, and then
//!
//! - absorbs the elements adjacent to the pivot into it,
//! - updates approximate degrees of the pivot's boundary `Lp`,
//! - absorbs elements whose boundary lies inside `Lp` (aggressive absorption),
//! - eliminates boundary variables with no neighbours outside `Lp` together
//!   with the pivot (mass elimination),
//! - merges indistinguishable boundary variables into supervariables.

use std::collections::{BTreeMap, BTreeSet};

use super::Permutation;
use crate::problem::SparseSym;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Node {
    Var,
    Elem,
    /// Absorbed element, eliminated variable, or variable merged into a
    /// supervariable.
    Retired,
}

struct Graph {
    state: Vec<Node>,
    /// Variable neighbours of each variable.
    adj: Vec<Vec<usize>>,
    /// Element neighbours of each variable.
    elems: Vec<Vec<usize>>,
    /// Variable boundary of each element.
    bound: Vec<Vec<usize>>,
    /// Supervariable weights; zero once merged away.
    nv: Vec<usize>,
    members: Vec<Vec<usize>>,
    deg: Vec<usize>,
    queue: BTreeSet<(usize, usize)>,
}

impl Graph {
    fn new(pattern: &SparseSym) -> Graph {
        let n = pattern.n;
        let mut adj = vec![Vec::new(); n];
        for j in 0..n {
            for k in pattern.colptr[j]..pattern.colptr[j + 1] {
                let i = pattern.rowidx[k];
                if i != j {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
        let queue = (0..n).map(|i| (deg[i], i)).collect();
        Graph {
            state: vec![Node::Var; n],
            adj,
            elems: vec![Vec::new(); n],
            bound: vec![Vec::new(); n],
            nv: vec![1; n],
            members: (0..n).map(|i| vec![i]).collect(),
            deg,
            queue,
        }
    }

    fn retire_var(&mut self, i: usize) {
        self.queue.remove(&(self.deg[i], i));
        self.state[i] = Node::Retired;
    }

    fn set_degree(&mut self, i: usize, d: usize) {
        self.queue.remove(&(self.deg[i], i));
        self.deg[i] = d;
        self.queue.insert((d, i));
    }
}

/// Fill-reducing ordering of a structurally symmetric matrix given by its
/// upper triangle. Deterministic; a diagonal matrix yields the identity.
pub fn amd_order(pattern: &SparseSym) -> Permutation {
    let n = pattern.n;
    let mut g = Graph::new(pattern);
    let mut order = Vec::with_capacity(n);
    let mut remaining = n;
    let mut in_lp = vec![false; n];
    let mut wext = vec![0usize; n];
    let mut wmark = vec![usize::MAX; n];
    let mut step = 0usize;

    while let Some((_, p)) = g.queue.pop_first() {
        step += 1;
        g.state[p] = Node::Elem;
        remaining -= g.nv[p];

        // Boundary of the new element: variable neighbours plus the
        // boundaries of absorbed adjacent elements.
        let mut lp = Vec::new();
        for &j in &g.adj[p] {
            if g.state[j] == Node::Var && !in_lp[j] {
                in_lp[j] = true;
                lp.push(j);
            }
        }
        let pelems = std::mem::take(&mut g.elems[p]);
        for e in pelems {
            if g.state[e] != Node::Elem {
                continue;
            }
            for &j in &g.bound[e] {
                if g.state[j] == Node::Var && j != p && !in_lp[j] {
                    in_lp[j] = true;
                    lp.push(j);
                }
            }
            g.state[e] = Node::Retired;
            g.bound[e] = Vec::new();
        }
        g.adj[p] = Vec::new();
        lp.sort_unstable();

        for &i in &lp {
            let (state, in_lp_ref) = (&g.state, &in_lp);
            g.adj[i].retain(|&j| state[j] == Node::Var && !in_lp_ref[j]);
            g.elems[i].retain(|&e| state[e] == Node::Elem && e != p);
        }

        // |Le \ Lp| for every element touching the boundary.
        for &i in &lp {
            for k in 0..g.elems[i].len() {
                let e = g.elems[i][k];
                if wmark[e] != step {
                    wmark[e] = step;
                    let (state, nv) = (&g.state, &g.nv);
                    g.bound[e].retain(|&j| state[j] == Node::Var && nv[j] > 0);
                    wext[e] = g.bound[e].iter().map(|&j| g.nv[j]).sum();
                }
                wext[e] -= g.nv[i];
            }
        }

        let lp_weight: usize = lp.iter().map(|&i| g.nv[i]).sum();
        let mut degs = Vec::with_capacity(lp.len());
        for &i in &lp {
            let mut ext = 0;
            let mut kept = Vec::with_capacity(g.elems[i].len());
            for &e in &g.elems[i] {
                if wext[e] == 0 {
                    g.state[e] = Node::Retired;
                } else {
                    ext += wext[e];
                    kept.push(e);
                }
            }
            kept.push(p);
            g.elems[i] = kept;
            let aw: usize = g.adj[i].iter().map(|&j| g.nv[j]).sum();
            let inner = lp_weight - g.nv[i];
            let d = (aw + inner + ext).min(g.deg[i] + inner).min(remaining - g.nv[i]);
            degs.push((i, aw + ext, d));
        }
        // Elements absorbed above may still be listed by earlier boundary
        // variables.
        for &i in &lp {
            let state = &g.state;
            g.elems[i].retain(|&e| state[e] == Node::Elem);
        }

        // Mass-eliminated variables go ahead of the pivot: their
        // neighbourhood lies inside Lp + p, so this never adds fill, and it
        // saves fill when the neighbourhood is a strict subset.
        let mut live = Vec::with_capacity(lp.len());
        for (i, external, d) in degs {
            if external == 0 {
                order.extend_from_slice(&g.members[i]);
                remaining -= g.nv[i];
                g.retire_var(i);
            } else {
                live.push((i, d));
            }
        }
        order.extend_from_slice(&g.members[p]);

        // Supervariable detection by hashing adjacency.
        let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(i, _) in &live {
            let h = g.adj[i].iter().chain(g.elems[i].iter()).fold(0usize, |a, &x| a.wrapping_add(x));
            buckets.entry(h).or_default().push(i);
        }
        let mut newdeg: BTreeMap<usize, usize> = live.iter().copied().collect();
        for bucket in buckets.values() {
            for a in 0..bucket.len() {
                let i = bucket[a];
                if g.state[i] != Node::Var {
                    continue;
                }
                let mut ai = g.adj[i].clone();
                let mut ei = g.elems[i].clone();
                ai.sort_unstable();
                ei.sort_unstable();
                for &j in &bucket[a + 1..] {
                    if g.state[j] != Node::Var {
                        continue;
                    }
                    let mut aj = g.adj[j].clone();
                    let mut ej = g.elems[j].clone();
                    aj.sort_unstable();
                    ej.sort_unstable();
                    if ai == aj && ei == ej {
                        let moved = std::mem::take(&mut g.members[j]);
                        g.members[i].extend(moved);
                        g.nv[i] += g.nv[j];
                        if let Some(d) = newdeg.get_mut(&i) {
                            *d = d.saturating_sub(g.nv[j]);
                        }
                        g.nv[j] = 0;
                        newdeg.remove(&j);
                        g.retire_var(j);
                    }
                }
            }
        }
        for (i, d) in newdeg {
            g.set_degree(i, d);
        }

        g.bound[p] = lp.iter().copied().filter(|&i| g.state[i] == Node::Var).collect();
        for &i in &lp {
            in_lp[i] = false;
        }
    }
    debug_assert_eq!(order.len(), n);
    Permutation::from_perm(order)
}
