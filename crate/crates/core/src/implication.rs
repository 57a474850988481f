//! Implication graph, strongly connected components and reachability: the
//! linear-time ground truth the LP is checked against.

use std::collections::VecDeque;

use crate::certificate::Certificate;
use crate::formula::Formula;

/// A directed graph with ordered adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    adj: Vec<Vec<u32>>,
}

impl Digraph {
    pub fn new(vertex_count: usize) -> Self {
        Digraph {
            adj: vec![Vec::new(); vertex_count],
        }
    }

    /// Self-loops are ignored; duplicates collapse on [`Digraph::finish`].
    pub fn add_edge(&mut self, u: u32, v: u32) {
        if u != v {
            self.adj[u as usize].push(v);
        }
    }

    fn finish(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
            list.dedup();
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn out_neighbors(&self, u: u32) -> &[u32] {
        &self.adj[u as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }
}

/// The implication graph on `2n` literal vertices (vertex = literal code - 1):
/// clause `{a, b}` contributes `not a -> b` and `not b -> a`.
pub fn build_implication_graph(f: &Formula) -> Digraph {
    let n = f.n();
    let mut g = Digraph::new(2 * n as usize);
    for c in f.clauses() {
        for (tail, head) in c.implications(n) {
            g.add_edge(tail.index() as u32, head.index() as u32);
        }
    }
    g.finish();
    g
}

/// SCC decomposition with component ids in reverse-topological order of the
/// condensation: a cross edge `u -> v` always has `comp[u] > comp[v]`.
#[derive(Debug, Clone)]
pub struct SccDecomposition {
    pub component_of: Vec<u32>,
    pub count: usize,
}

/// Iterative Tarjan; component ids are assigned in completion order, which is
/// reverse-topological. Deterministic for a fixed adjacency order.
pub fn scc(g: &Digraph) -> SccDecomposition {
    const UNSET: u32 = u32::MAX;
    let n = g.vertex_count();
    let mut index = vec![UNSET; n];
    let mut low = vec![UNSET; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut frames: Vec<(u32, usize)> = Vec::new();
    let mut timer = 0u32;
    let mut next_comp = 0u32;

    for root in 0..n as u32 {
        if index[root as usize] != UNSET {
            continue;
        }
        frames.push((root, 0));
        while let Some(&mut (v, ref mut child)) = frames.last_mut() {
            let vi = v as usize;
            if *child == 0 {
                index[vi] = timer;
                low[vi] = timer;
                timer += 1;
                stack.push(v);
                on_stack[vi] = true;
            }
            if let Some(&w) = g.out_neighbors(v).get(*child) {
                *child += 1;
                let wi = w as usize;
                if index[wi] == UNSET {
                    frames.push((w, 0));
                } else if on_stack[wi] {
                    low[vi] = low[vi].min(index[wi]);
                }
            } else {
                frames.pop();
                if low[vi] == index[vi] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        comp[w as usize] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                if let Some(&mut (p, _)) = frames.last_mut() {
                    let pi = p as usize;
                    low[pi] = low[pi].min(low[vi]);
                }
            }
        }
    }

    SccDecomposition {
        component_of: comp,
        count: next_comp as usize,
    }
}

/// Directed reachability; `u == v` counts as reachable via the empty path.
pub fn reachable(g: &Digraph, u: u32, v: u32) -> bool {
    bfs_path(g, u, v).is_some()
}

/// A shortest directed path from `u` to `v` as a vertex list, if one exists.
pub fn bfs_path(g: &Digraph, u: u32, v: u32) -> Option<Vec<u32>> {
    if u == v {
        return Some(vec![u]);
    }
    const UNSET: u32 = u32::MAX;
    let mut parent = vec![UNSET; g.vertex_count()];
    let mut queue = VecDeque::new();
    parent[u as usize] = u;
    queue.push_back(u);
    while let Some(w) = queue.pop_front() {
        for &x in g.out_neighbors(w) {
            if parent[x as usize] == UNSET {
                parent[x as usize] = w;
                if x == v {
                    let mut path = vec![v];
                    let mut cur = v;
                    while cur != u {
                        cur = parent[cur as usize];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(x);
            }
        }
    }
    None
}

/// If some variable and its negation are mutually reachable, the
/// unsatisfiability certificate: lowest such index plus the two witness
/// paths (as literal codes).
pub fn unsat_witness(f: &Formula) -> Option<Certificate> {
    let n = f.n();
    let g = build_implication_graph(f);
    let d = scc(&g);
    let witness = (1..=n)
        .find(|&i| d.component_of[(i - 1) as usize] == d.component_of[(i + n - 1) as usize])?;
    let pos = witness - 1;
    let neg = witness + n - 1;
    let to_codes = |p: Vec<u32>| p.into_iter().map(|v| v + 1).collect();
    let path_out = bfs_path(&g, pos, neg).expect("same SCC implies a path");
    let path_back = bfs_path(&g, neg, pos).expect("same SCC implies a path");
    Some(Certificate::Unsat {
        witness,
        path_out: to_codes(path_out),
        path_back: to_codes(path_back),
    })
}

/// The linear-time satisfiability decision: unsatisfiable iff some variable
/// shares an SCC with its negation; otherwise a literal is assigned true
/// exactly when its component comes after its negation's in topological
/// order.
pub fn apt_decide(f: &Formula) -> Certificate {
    if let Some(cert) = unsat_witness(f) {
        return cert;
    }
    let n = f.n();
    let g = build_implication_graph(f);
    let d = scc(&g);
    // Reverse-topological ids: smaller id = later in topological order.
    let assignment: Vec<bool> = (1..=n)
        .map(|i| d.component_of[(i - 1) as usize] < d.component_of[(i + n - 1) as usize])
        .collect();
    Certificate::Sat { assignment }
}

/// Counts commodities whose literal reaches its negation: the combinatorial
/// value the LP optimum must equal.
pub fn count_round_trip_literals(f: &Formula) -> usize {
    let n = f.n();
    let g = build_implication_graph(f);
    (0..2 * n)
        .filter(|&v| {
            let neg = (v + n) % (2 * n);
            reachable(&g, v, neg)
        })
        .count()
}

impl Digraph {
    /// Edge list dump, one `tail head` pair of literal codes per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for u in 0..self.vertex_count() as u32 {
            for &v in self.out_neighbors(u) {
                out.push_str(&format!("{} {}\n", u + 1, v + 1));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::Certificate;
    use proptest::prelude::*;

    fn full_n2() -> Formula {
        Formula::from_dimacs_pairs(2, &[(1, 2), (1, -2), (-1, 2), (-1, -2)]).unwrap()
    }

    #[test]
    fn one_clause_two_implications() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        let g = build_implication_graph(&f);
        assert_eq!(g.edge_count(), 2);
        // not-x1 (vertex 2) -> x2 (vertex 1), not-x2 (vertex 3) -> x1 (vertex 0)
        assert!(g.has_edge(2, 1));
        assert!(g.has_edge(3, 0));
    }

    #[test]
    fn empty_formula_graph() {
        let g = build_implication_graph(&Formula::empty(2));
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn full_formula_mutual_reachability() {
        let g = build_implication_graph(&full_n2());
        assert_eq!(g.edge_count(), 8);
        for u in 0..4 {
            for v in 0..4 {
                assert!(reachable(&g, u, v), "{u} should reach {v}");
            }
        }
    }

    #[test]
    fn scc_no_edges() {
        let g = Digraph::new(4);
        let d = scc(&g);
        assert_eq!(d.count, 4);
    }

    #[test]
    fn scc_two_cycle() {
        let mut g = Digraph::new(2);
        g.add_edge(0, 1);
        g.add_edge(1, 0);
        g.finish();
        let d = scc(&g);
        assert_eq!(d.count, 1);
    }

    #[test]
    fn scc_full_unsat_formula_single_component() {
        let g = build_implication_graph(&full_n2());
        let d = scc(&g);
        assert_eq!(d.count, 1);
    }

    #[test]
    fn scc_reverse_topological_numbering() {
        // Chain 0 -> 1 -> 2 with a cycle {1, 2}? Use a mixed graph.
        let mut g = Digraph::new(5);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(2, 1);
        g.add_edge(2, 3);
        g.add_edge(4, 0);
        g.finish();
        let d = scc(&g);
        for u in 0..5u32 {
            for &v in g.out_neighbors(u) {
                let (cu, cv) = (d.component_of[u as usize], d.component_of[v as usize]);
                assert!(cu >= cv, "cross edge must go to smaller id");
                if cu == cv {
                    assert!(reachable(&g, v, u));
                }
            }
        }
    }

    #[test]
    fn apt_examples() {
        match apt_decide(&full_n2()) {
            Certificate::Unsat { witness, .. } => assert_eq!(witness, 1),
            _ => panic!("full n=2 formula is unsatisfiable"),
        }
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        match apt_decide(&f) {
            Certificate::Sat { assignment } => assert!(f.is_satisfied_by(&assignment)),
            _ => panic!("single clause is satisfiable"),
        }
        match apt_decide(&Formula::empty(3)) {
            Certificate::Sat { assignment } => assert_eq!(assignment.len(), 3),
            _ => panic!("empty formula is satisfiable"),
        }
    }

    #[test]
    fn reachable_examples() {
        let g = Digraph::new(3);
        assert!(!reachable(&g, 0, 2));
        assert!(reachable(&g, 1, 1));
        let g = build_implication_graph(&full_n2());
        assert!(reachable(&g, 0, 2)); // x1 -> not-x1
    }

    #[test]
    fn unsat_witness_paths_are_implication_chains() {
        let f = full_n2();
        let g = build_implication_graph(&f);
        let cert = unsat_witness(&f).unwrap();
        if let Certificate::Unsat {
            witness,
            path_out,
            path_back,
        } = cert
        {
            assert_eq!(path_out.first(), Some(&witness));
            assert_eq!(path_out.last(), Some(&(witness + 2)));
            assert_eq!(path_back.first(), Some(&(witness + 2)));
            assert_eq!(path_back.last(), Some(&witness));
            for w in path_out.windows(2).chain(path_back.windows(2)) {
                assert!(g.has_edge(w[0] - 1, w[1] - 1));
            }
        } else {
            panic!("expected unsat certificate");
        }
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        (1u32..=5, any::<u64>()).prop_map(|(n, mask)| {
            let clauses: Vec<_> = crate::formula::clause_universe(n)
                .into_iter()
                .filter(|s| !s.is_tautology(n))
                .enumerate()
                .filter(|(i, _)| mask >> (i % 64) & 1 == 1)
                .map(|(_, s)| s.to_clause(n).unwrap())
                .collect();
            Formula::new(n, clauses).unwrap()
        })
    }

    proptest! {
        #[test]
        fn skew_symmetry(f in arb_formula()) {
            let n = f.n();
            let g = build_implication_graph(&f);
            for u in 0..2 * n {
                for &v in g.out_neighbors(u) {
                    let nu = (u + n) % (2 * n);
                    let nv = (v + n) % (2 * n);
                    prop_assert!(g.has_edge(nv, nu));
                }
            }
        }

        #[test]
        fn sat_assignment_is_implication_consistent(f in arb_formula()) {
            if let Certificate::Sat { assignment } = apt_decide(&f) {
                prop_assert!(f.is_satisfied_by(&assignment));
                let n = f.n();
                let g = build_implication_graph(&f);
                let lit_true = |v: u32| if v < n { assignment[v as usize] } else { !assignment[(v - n) as usize] };
                for u in 0..2 * n {
                    for &v in g.out_neighbors(u) {
                        prop_assert!(!(lit_true(u) && !lit_true(v)));
                    }
                }
            }
        }

        #[test]
        fn unsat_iff_mutual_reachability(f in arb_formula()) {
            let n = f.n();
            let g = build_implication_graph(&f);
            let mutual = (0..n).any(|i| reachable(&g, i, i + n) && reachable(&g, i + n, i));
            let is_unsat = matches!(apt_decide(&f), Certificate::Unsat { .. });
            prop_assert_eq!(mutual, is_unsat);
        }
    }
}
