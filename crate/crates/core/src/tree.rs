//! Recurrence trees: every choice of root at every step, stored as an m-ary
//! tree (m = 2 here), with classified leaves and per-level statistics.
//!
//! Nodes live in an arena indexed by [`NodeId`]; node 0 is the root and holds
//! the first initial value at depth 1. For an order-k recurrence the k initial
//! values form a single chain (depths 1..=k) before branching starts, so a
//! node's depth is the index of the sequence term it stores.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::exact::{eval_quadratic, solve_quadratic, QuadraticRoots, Rational, RootKind};
use crate::recurrence::{step_polynomial, Recurrence, RecurrenceError};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error("max depth {max_depth} is smaller than the recurrence order {order}")]
    DepthTooSmall { max_depth: u32, order: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NonRational {
    Irrational,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LeafStatus {
    Expanded,
    NonRationalCutoff(NonRational),
    DegenerateCutoff,
    DepthLimit,
}

impl LeafStatus {
    pub fn label(self) -> &'static str {
        match self {
            LeafStatus::Expanded => "expanded",
            LeafStatus::NonRationalCutoff(NonRational::Irrational) => "irrational",
            LeafStatus::NonRationalCutoff(NonRational::Complex) => "complex",
            LeafStatus::DegenerateCutoff => "degenerate",
            LeafStatus::DepthLimit => "depth-limit",
        }
    }

    pub fn is_nonrational(self) -> bool {
        matches!(self, LeafStatus::NonRationalCutoff(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub value: Rational,
    /// 2 when the value is a double root of its parent's step polynomial.
    pub multiplicity: u8,
    pub depth: u32,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub status: LeafStatus,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Cache root computations per window so repeated states are solved once.
    /// The tree itself is unchanged.
    pub memoize: bool,
}

#[derive(Debug, Clone)]
pub struct RecurrenceTree {
    recurrence: Recurrence,
    initial_window: Vec<Rational>,
    nodes: Vec<TreeNode>,
    max_depth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub depth: u32,
    pub total_nodes: usize,
    pub distinct_values: usize,
    /// Values not present at any shallower depth, ascending.
    pub new_values: Vec<Rational>,
    /// No branch left ℚ above this depth.
    pub all_rational_so_far: bool,
    /// Distinct non-integer values at this depth, ascending.
    pub non_integer_values: Vec<Rational>,
}

pub fn build_tree(
    r: &Recurrence,
    initial_window: &[Rational],
    max_depth: u32,
) -> Result<RecurrenceTree, TreeError> {
    build_tree_with(r, initial_window, max_depth, BuildOptions::default())
}

pub fn build_tree_with(
    r: &Recurrence,
    initial_window: &[Rational],
    max_depth: u32,
    options: BuildOptions,
) -> Result<RecurrenceTree, TreeError> {
    let order = r.order();
    if initial_window.len() != order {
        return Err(RecurrenceError::BadWindow {
            expected: order,
            got: initial_window.len(),
        }
        .into());
    }
    if r.degree() == 0 || r.degree() > 2 {
        return Err(RecurrenceError::Unsupported(r.degree()).into());
    }
    if (max_depth as usize) < order || max_depth == 0 {
        return Err(TreeError::DepthTooSmall { max_depth, order });
    }

    let mut tree = RecurrenceTree {
        recurrence: r.clone(),
        initial_window: initial_window.to_vec(),
        nodes: Vec::new(),
        max_depth,
    };
    for (i, v) in initial_window.iter().enumerate() {
        let parent = i.checked_sub(1);
        tree.push(v.clone(), 1, i as u32 + 1, parent);
        if let Some(p) = parent {
            tree.nodes[p].status = LeafStatus::Expanded;
        }
    }

    let mut cache: HashMap<Vec<Rational>, QuadraticRoots> = HashMap::new();
    let mut frontier = vec![tree.nodes.len() - 1];
    while !frontier.is_empty() {
        let (leaves, open): (Vec<NodeId>, Vec<NodeId>) = frontier
            .into_iter()
            .partition(|&id| tree.nodes[id].depth >= max_depth);
        for id in leaves {
            tree.nodes[id].status = LeafStatus::DepthLimit;
        }

        let windows: Vec<Vec<Rational>> = open.iter().map(|&id| tree.window(id)).collect();
        let solutions: Vec<QuadraticRoots> = if options.memoize {
            let unseen: Vec<&Vec<Rational>> = windows
                .iter()
                .filter(|w| !cache.contains_key(*w))
                .collect::<HashSet<_>>()
                .into_iter()
                .collect();
            let solved = unseen
                .par_iter()
                .map(|w| solve_window(r, w).map(|s| ((*w).clone(), s)))
                .collect::<Result<Vec<_>, _>>()?;
            cache.extend(solved);
            windows.iter().map(|w| cache[w].clone()).collect()
        } else {
            windows
                .par_iter()
                .map(|w| solve_window(r, w))
                .collect::<Result<Vec<_>, _>>()?
        };

        let mut next = Vec::new();
        for (id, sol) in open.into_iter().zip(solutions) {
            let depth = tree.nodes[id].depth + 1;
            let status = match sol.kind {
                RootKind::TwoRational
                | RootKind::OneRationalDouble
                | RootKind::DegenerateLinear => {
                    for (value, mult) in sol.roots.into_iter().zip(sol.multiplicities) {
                        next.push(tree.push(value, mult, depth, Some(id)));
                    }
                    LeafStatus::Expanded
                }
                RootKind::Irrational => LeafStatus::NonRationalCutoff(NonRational::Irrational),
                RootKind::Complex => LeafStatus::NonRationalCutoff(NonRational::Complex),
                RootKind::Degenerate { .. } => LeafStatus::DegenerateCutoff,
            };
            tree.nodes[id].status = status;
        }
        frontier = next;
    }
    Ok(tree)
}

fn solve_window(r: &Recurrence, window: &[Rational]) -> Result<QuadraticRoots, RecurrenceError> {
    let (p2, p1, p0) = step_polynomial(r, window)?;
    Ok(solve_quadratic(&p2, &p1, &p0))
}

impl RecurrenceTree {
    fn push(
        &mut self,
        value: Rational,
        multiplicity: u8,
        depth: u32,
        parent: Option<NodeId>,
    ) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            value,
            multiplicity,
            depth,
            parent,
            children: Vec::new(),
            status: LeafStatus::DepthLimit,
        });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        id
    }

    pub fn recurrence(&self) -> &Recurrence {
        &self.recurrence
    }

    pub fn initial_window(&self) -> &[Rational] {
        &self.initial_window
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Root-to-node values.
    pub fn path_to(&self, id: NodeId) -> Vec<Rational> {
        let mut path = Vec::new();
        let mut cur = Some(id);
        while let Some(i) = cur {
            path.push(self.nodes[i].value.clone());
            cur = self.nodes[i].parent;
        }
        path.reverse();
        path
    }

    /// The last `order` values on the path ending at `id`: the window used to
    /// expand that node.
    pub fn window(&self, id: NodeId) -> Vec<Rational> {
        let k = self.recurrence.order();
        let mut window = Vec::with_capacity(k);
        let mut cur = Some(id);
        while let (Some(i), true) = (cur, window.len() < k) {
            window.push(self.nodes[i].value.clone());
            cur = self.nodes[i].parent;
        }
        window.reverse();
        window
    }

    /// Node ids grouped by depth; index 0 holds depth 1.
    pub fn levels(&self) -> Vec<Vec<NodeId>> {
        let deepest = self.nodes.iter().map(|n| n.depth).max().unwrap_or(0) as usize;
        let mut levels = vec![Vec::new(); deepest];
        for (id, n) in self.nodes.iter().enumerate() {
            levels[n.depth as usize - 1].push(id);
        }
        levels
    }

    pub fn has_nonrational_cutoff(&self) -> bool {
        self.nodes.iter().any(|n| n.status.is_nonrational())
    }

    /// Nodes whose value does not make their parent's step polynomial vanish.
    /// Always empty for a correctly built tree.
    pub fn unverified_children(&self) -> Vec<NodeId> {
        let order = self.recurrence.order() as u32;
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.depth > order)
            .filter(|(_, n)| {
                let parent = n.parent.expect("non-root node has a parent");
                let (p2, p1, p0) = step_polynomial(&self.recurrence, &self.window(parent))
                    .expect("window length matches order");
                !eval_quadratic(&p2, &p1, &p0, &n.value).is_zero()
            })
            .map(|(id, _)| id)
            .collect()
    }

    /// Expanded nodes past the initial chain whose children do not include
    /// their parent's value. With a symmetric first-order recurrence (A1 = B2)
    /// every grandparent reappears among its grandchildren's siblings, so this
    /// is empty.
    pub fn backtracking_violations(&self) -> Vec<NodeId> {
        let order = self.recurrence.order() as u32;
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.status == LeafStatus::Expanded && n.depth > order)
            .filter(|(_, n)| {
                let parent = &self.nodes[n.parent.expect("non-root")].value;
                !n.children.iter().any(|&c| &self.nodes[c].value == parent)
            })
            .map(|(id, _)| id)
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "recurrence": self.recurrence.to_json(),
            "initial_window": self.initial_window,
            "max_depth": self.max_depth,
            "root": self.node_json(0),
        })
    }

    fn node_json(&self, id: NodeId) -> serde_json::Value {
        let n = &self.nodes[id];
        let children: Vec<_> = n.children.iter().map(|&c| self.node_json(c)).collect();
        json!({
            "value": n.value,
            "depth": n.depth,
            "multiplicity": n.multiplicity,
            "status": n.status.label(),
            "children": children,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph recurrence_tree {\n  node [shape=ellipse];\n");
        for (id, n) in self.nodes.iter().enumerate() {
            let mut label = n.value.to_string();
            if n.multiplicity > 1 {
                let _ = write!(label, " (x{})", n.multiplicity);
            }
            let shape = match n.status {
                LeafStatus::NonRationalCutoff(_) | LeafStatus::DegenerateCutoff => {
                    let _ = write!(label, "\\n[{}]", n.status.label());
                    ", shape=box"
                }
                _ => "",
            };
            let _ = writeln!(out, "  n{id} [label=\"{label}\"{shape}];");
        }
        for (id, n) in self.nodes.iter().enumerate() {
            for c in &n.children {
                let _ = writeln!(out, "  n{id} -> n{c};");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Per-depth statistics. A value is new at depth d when it occurs at no depth
/// below d anywhere in the tree.
pub fn level_stats(t: &RecurrenceTree) -> Vec<LevelStats> {
    let mut seen: HashSet<&Rational> = HashSet::new();
    let mut rational_so_far = true;
    let mut stats = Vec::new();
    for (i, level) in t.levels().iter().enumerate() {
        let distinct: BTreeSet<&Rational> = level.iter().map(|&id| &t.nodes[id].value).collect();
        let new_values = distinct
            .iter()
            .filter(|v| !seen.contains(*v))
            .map(|v| (*v).clone())
            .collect();
        let non_integer_values = distinct
            .iter()
            .filter(|v| !v.is_integer())
            .map(|v| (*v).clone())
            .collect();
        stats.push(LevelStats {
            depth: i as u32 + 1,
            total_nodes: level.len(),
            distinct_values: distinct.len(),
            new_values,
            all_rational_so_far: rational_so_far,
            non_integer_values,
        });
        seen.extend(distinct);
        if level.iter().any(|&id| t.nodes[id].status.is_nonrational()) {
            rational_so_far = false;
        }
    }
    stats
}

pub fn level_stats_csv(stats: &[LevelStats]) -> String {
    let mut out = String::from(
        "depth,total_nodes,distinct_values,new_value_count,new_values,all_rational_so_far\n",
    );
    for s in stats {
        let values: Vec<String> = s.new_values.iter().map(ToString::to_string).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.depth,
            s.total_nodes,
            s.distinct_values,
            s.new_values.len(),
            values.join(";"),
            s.all_rational_so_far
        );
    }
    out
}

/// True iff no branch within `depth` levels leaves ℚ.
pub fn is_rational_to_depth(
    r: &Recurrence,
    initial_window: &[Rational],
    depth: u32,
) -> Result<bool, TreeError> {
    Ok(!build_tree(r, initial_window, depth)?.has_nonrational_cutoff())
}

/// Follows one root-to-leaf path. At each node with children the chooser is
/// given the depth being chosen and the ascending candidate values; the walk
/// stops when the chooser declines or names a value that is not a candidate.
pub fn extract_path<F>(t: &RecurrenceTree, mut chooser: F) -> Vec<Rational>
where
    F: FnMut(u32, &[Rational]) -> Option<Rational>,
{
    let mut cur = 0;
    let mut path = vec![t.nodes[0].value.clone()];
    loop {
        let node = &t.nodes[cur];
        if node.children.is_empty() {
            break;
        }
        let mut candidates: Vec<(Rational, NodeId)> = node
            .children
            .iter()
            .map(|&c| (t.nodes[c].value.clone(), c))
            .collect();
        candidates.sort();
        let values: Vec<Rational> = candidates.iter().map(|(v, _)| v.clone()).collect();
        let Some(choice) = chooser(node.depth + 1, &values) else {
            break;
        };
        let Some((_, next)) = candidates.into_iter().find(|(v, _)| *v == choice) else {
            break;
        };
        path.push(choice);
        cur = next;
    }
    path
}
