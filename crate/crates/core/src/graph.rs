use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::{CoreError, Elem, Result, Structure, Vocabulary};

/// Simple undirected graph (symmetric, irreflexive `E`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Structure", into = "Structure")]
pub struct Graph {
    adj: BTreeMap<Elem, BTreeSet<Elem>>,
}

impl Graph {
    pub fn new(vertices: impl IntoIterator<Item = Elem>) -> Self {
        Graph {
            adj: vertices.into_iter().map(|v| (v, BTreeSet::new())).collect(),
        }
    }

    pub fn from_edges(
        vertices: impl IntoIterator<Item = Elem>,
        edges: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Self {
        let mut g = Graph::new(vertices);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// `K_n` on `0..n`.
    pub fn complete(n: u32) -> Self {
        let mut g = Graph::new(0..n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: u32) -> Self {
        Graph::from_edges(0..n, (1..n).map(|i| (i - 1, i)))
    }

    /// Cycle on `0..n`, `n >= 3`.
    pub fn cycle(n: u32) -> Self {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    pub fn add_vertex(&mut self, v: Elem) {
        self.adj.entry(v).or_default();
    }

    /// Adds the edge `uv`, creating missing endpoints. Self-loops are ignored.
    pub fn add_edge(&mut self, u: Elem, v: Elem) {
        if u == v {
            self.add_vertex(u);
            return;
        }
        self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
    }

    pub fn remove_edge(&mut self, u: Elem, v: Elem) {
        if let Some(n) = self.adj.get_mut(&u) {
            n.remove(&v);
        }
        if let Some(n) = self.adj.get_mut(&v) {
            n.remove(&u);
        }
    }

    pub fn has_vertex(&self, v: Elem) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: Elem, v: Elem) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Elem> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<Elem> {
        self.adj.keys().copied().collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|n| n.len()).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, n)| n.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn neighbors(&self, v: Elem) -> &BTreeSet<Elem> {
        static EMPTY: BTreeSet<Elem> = BTreeSet::new();
        self.adj.get(&v).unwrap_or(&EMPTY)
    }

    pub fn degree(&self, v: Elem) -> usize {
        self.neighbors(v).len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn induced(&self, vs: &BTreeSet<Elem>) -> Graph {
        Graph {
            adj: self
                .adj
                .iter()
                .filter(|(v, _)| vs.contains(v))
                .map(|(&v, n)| (v, n.intersection(vs).copied().collect()))
                .collect(),
        }
    }

    /// `G - S`.
    pub fn without(&self, s: &BTreeSet<Elem>) -> Graph {
        Graph {
            adj: self
                .adj
                .iter()
                .filter(|(v, _)| !s.contains(v))
                .map(|(&v, n)| (v, n.difference(s).copied().collect()))
                .collect(),
        }
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<BTreeSet<Elem>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if seen.contains(&v) {
                continue;
            }
            let comp = self.reach(v, |_| true);
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    /// Vertices reachable from `start` through vertices accepted by `allow`
    /// (`start` itself is always included).
    pub fn reach(&self, start: Elem, allow: impl Fn(Elem) -> bool) -> BTreeSet<Elem> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if allow(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Connected; the empty graph counts as not connected.
    pub fn is_connected(&self) -> bool {
        match self.adj.keys().next() {
            None => false,
            Some(&v) => self.reach(v, |_| true).len() == self.adj.len(),
        }
    }

    pub fn is_clique(&self, s: &BTreeSet<Elem>) -> bool {
        s.iter()
            .all(|&u| s.iter().all(|&v| u == v || self.has_edge(u, v)))
    }

    /// Adds all edges between members of `s`.
    pub fn make_clique(&mut self, s: &BTreeSet<Elem>) {
        for &u in s {
            for &v in s {
                if u < v {
                    self.add_edge(u, v);
                }
            }
        }
    }

    /// Edge-subset relation on equal vertex sets.
    pub fn is_spanning_subgraph_of(&self, other: &Graph) -> bool {
        self.vertex_set() == other.vertex_set() && self.edges().all(|(u, v)| other.has_edge(u, v))
    }

    pub fn to_structure(&self) -> Structure {
        let mut s = Structure::with_universe(Vocabulary::graph(), self.vertices());
        for (&u, n) in &self.adj {
            for &v in n {
                s.insert("E", vec![u, v]).expect("edge endpoints are vertices");
            }
        }
        s
    }

    /// Reads a graph from a structure over `{E/2}`; `E` must be symmetric
    /// and irreflexive.
    pub fn from_structure(s: &Structure) -> Result<Graph> {
        if s.vocabulary().len() != 1 || s.vocabulary().arity("E") != Some(2) {
            return Err(CoreError::NotAGraph("vocabulary must be {E/2}".into()));
        }
        let e = s.relation("E").expect("checked above");
        let mut g = Graph::new(s.universe().iter().copied());
        for t in e {
            let (u, v) = (t[0], t[1]);
            if u == v {
                return Err(CoreError::NotAGraph(format!("self-loop at {u}")));
            }
            if !e.contains(&vec![v, u]) {
                return Err(CoreError::NotAGraph(format!("edge ({u},{v}) not symmetric")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }
}

impl TryFrom<Structure> for Graph {
    type Error = CoreError;
    fn try_from(s: Structure) -> Result<Graph> {
        Graph::from_structure(&s)
    }
}

impl From<Graph> for Structure {
    fn from(g: Graph) -> Structure {
        g.to_structure()
    }
}
