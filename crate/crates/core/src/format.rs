use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{
    CoreError, Elem, Graph, NodeId, NodeKind, Result, SegmentedDecomposition, TreeDecomposition,
};

/// Serialized form of a (possibly segmented) tree decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub root: NodeId,
    pub children: BTreeMap<NodeId, Vec<NodeId>>,
    pub bags: BTreeMap<NodeId, Vec<Elem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<BTreeMap<NodeId, NodeKind>>,
    /// Free-form per-node labels (e.g. torso classes or node roles).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<NodeId, String>>,
}

impl From<&TreeDecomposition> for DecompositionJson {
    fn from(d: &TreeDecomposition) -> Self {
        DecompositionJson {
            root: d.root(),
            children: d.nodes().map(|t| (t, d.children(t).to_vec())).collect(),
            bags: d
                .bags()
                .iter()
                .map(|(&t, b)| (t, b.iter().copied().collect()))
                .collect(),
            kind: None,
            labels: None,
        }
    }
}

impl From<&SegmentedDecomposition> for DecompositionJson {
    fn from(d: &SegmentedDecomposition) -> Self {
        let mut j = DecompositionJson::from(&d.td);
        j.kind = Some(d.kind.clone());
        j
    }
}

impl DecompositionJson {
    pub fn to_tree(&self) -> Result<TreeDecomposition> {
        let bags = self
            .bags
            .iter()
            .map(|(&t, b)| (t, b.iter().copied().collect()))
            .collect();
        let edges = self
            .children
            .iter()
            .flat_map(|(&p, cs)| cs.iter().map(move |&c| (p, c)));
        TreeDecomposition::new(self.root, bags, edges)
    }

    pub fn to_segmented(&self) -> Result<SegmentedDecomposition> {
        let kind = self
            .kind
            .clone()
            .ok_or_else(|| CoreError::Format("missing node kinds".into()))?;
        SegmentedDecomposition::new(self.to_tree()?, kind)
    }

    pub fn with_labels(mut self, labels: BTreeMap<NodeId, String>) -> Self {
        self.labels = Some(labels);
        self
    }
}

/// Reads `n m` followed by `m` lines `u v`; vertices are `0..n`.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| CoreError::Format("empty input".into()))?;
    let nums = |l: &str| -> Result<Vec<u32>> {
        l.split_whitespace()
            .map(|x| {
                x.parse()
                    .map_err(|_| CoreError::Format(format!("bad integer `{x}`")))
            })
            .collect()
    };
    let h = nums(header)?;
    let [n, m] = h[..] else {
        return Err(CoreError::Format("header must be `n m`".into()));
    };
    let mut g = Graph::new(0..n);
    let mut count = 0;
    for line in lines {
        let e = nums(line)?;
        let [u, v] = e[..] else {
            return Err(CoreError::Format(format!("bad edge line `{line}`")));
        };
        if u >= n || v >= n {
            return Err(CoreError::Format(format!("edge ({u},{v}) out of range")));
        }
        if u == v {
            return Err(CoreError::Format(format!("self-loop at {u}")));
        }
        g.add_edge(u, v);
        count += 1;
    }
    if count != m {
        return Err(CoreError::Format(format!("expected {m} edges, found {count}")));
    }
    Ok(g)
}

/// DOT rendering; nodes are labelled with their bag contents, plus kind and
/// extra label when given.
pub fn decomposition_to_dot(
    d: &TreeDecomposition,
    kind: Option<&BTreeMap<NodeId, NodeKind>>,
    labels: Option<&BTreeMap<NodeId, String>>,
) -> String {
    let mut s = String::from("digraph decomposition {\n  node [shape=box];\n");
    for (&t, bag) in d.bags() {
        let items: Vec<String> = bag.iter().map(|e| e.to_string()).collect();
        let mut label = format!("{t}: {{{}}}", items.join(","));
        if let Some(k) = kind.and_then(|k| k.get(&t)) {
            label.push_str(match k {
                NodeKind::A => " [a]",
                NodeKind::B => " [b]",
            });
        }
        if let Some(l) = labels.and_then(|l| l.get(&t)) {
            let _ = write!(label, " {l}");
        }
        let _ = writeln!(s, "  n{t} [label=\"{label}\"];");
    }
    for (p, c) in d.edges() {
        let _ = writeln!(s, "  n{p} -> n{c};");
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list() {
        let g = parse_edge_list("3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(g, Graph::path(3));
        assert!(parse_edge_list("3 2\n0 1\n").is_err());
        assert!(parse_edge_list("2 1\n0 5\n").is_err());
    }

    #[test]
    fn decomposition_json_round_trip() {
        let d = TreeDecomposition::new(
            4,
            BTreeMap::from([(4, [0, 1].into()), (9, [1, 2].into())]),
            [(4, 9)],
        )
        .unwrap();
        let j = DecompositionJson::from(&d);
        let text = serde_json::to_string(&j).unwrap();
        let back: DecompositionJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_tree().unwrap(), d);
        let dot = decomposition_to_dot(&d, None, None);
        assert!(dot.contains("n4 [label=\"4: {0,1}\"]"));
        assert!(dot.contains("n4 -> n9"));
    }
}
