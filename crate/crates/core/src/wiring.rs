//! RAC compilation from `(2→1)` RAC boxes: concatenation, addition, the
//! binary-expansion compiler, and winning probabilities with noisy boxes.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::box_core::{make_rb, BipartiteBox, RbVariant, Variable};
use crate::exec::Execution;
use crate::rational::{ratio, Rational};
use crate::report::{ProbeReport, Quantity, Status};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WiringError {
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    /// Input slot: Alice's bit `a_slot`.
    Leaf { slot: usize },
    /// A `(2→1)` RAC box fed by two children (index 0 is Bob's input 0).
    Rb { children: [usize; 2] },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiringTree {
    nodes: Vec<Node>,
    root: usize,
    concatenation_uses: usize,
    addition_uses: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostReport {
    pub n: usize,
    pub rb_count: usize,
    pub message_bits: usize,
    pub concatenation_uses: usize,
    pub addition_uses: usize,
}

impl WiringTree {
    /// The trivial `(1→1)` wiring: Alice sends her only bit.
    pub fn leaf() -> Self {
        WiringTree {
            nodes: vec![Node::Leaf { slot: 0 }],
            root: 0,
            concatenation_uses: 0,
            addition_uses: 0,
        }
    }

    /// Arbitrary arena; nothing is checked until an operation validates it.
    pub fn from_raw(nodes: Vec<Node>, root: usize) -> Self {
        WiringTree {
            nodes,
            root,
            concatenation_uses: 0,
            addition_uses: 0,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn rb_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Rb { .. })).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.len() - self.rb_count()
    }

    pub fn cost(&self) -> CostReport {
        CostReport {
            n: self.leaf_count(),
            rb_count: self.rb_count(),
            message_bits: 1,
            concatenation_uses: self.concatenation_uses,
            addition_uses: self.addition_uses,
        }
    }

    fn join(left: &WiringTree, right: &WiringTree) -> WiringTree {
        let off = left.nodes.len();
        let slots = left.leaf_count();
        let mut nodes = left.nodes.clone();
        nodes.extend(right.nodes.iter().map(|n| match *n {
            Node::Leaf { slot } => Node::Leaf { slot: slot + slots },
            Node::Rb { children } => Node::Rb {
                children: [children[0] + off, children[1] + off],
            },
        }));
        nodes.push(Node::Rb {
            children: [left.root, right.root + off],
        });
        WiringTree {
            root: nodes.len() - 1,
            nodes,
            concatenation_uses: left.concatenation_uses + right.concatenation_uses,
            addition_uses: left.addition_uses + right.addition_uses,
        }
    }

    /// Root-to-leaf route for each slot: `(rb node, branch taken)` pairs.
    fn routes(&self) -> Result<Vec<Vec<(usize, usize)>>, WiringError> {
        let shape = self.validate()?;
        let mut routes = vec![Vec::new(); shape.leaves];
        let mut stack = vec![(self.root, Vec::new())];
        while let Some((id, path)) = stack.pop() {
            match self.nodes[id] {
                Node::Leaf { slot } => routes[slot] = path,
                Node::Rb { children } => {
                    for (branch, &c) in children.iter().enumerate() {
                        let mut p = path.clone();
                        p.push((id, branch));
                        stack.push((c, p));
                    }
                }
            }
        }
        Ok(routes)
    }

    /// Structural check: every node reachable exactly once from the root and
    /// leaf slots a permutation of `0..leaves`.
    pub fn validate(&self) -> Result<TreeShape, WiringError> {
        let len = self.nodes.len();
        if self.root >= len {
            return Err(WiringError::Malformed("root out of range".into()));
        }
        let mut seen = vec![false; len];
        let mut stack = vec![self.root];
        let mut edges = 0;
        while let Some(id) = stack.pop() {
            if seen[id] {
                return Err(WiringError::Malformed(format!("node {id} reached twice (cycle or shared subtree)")));
            }
            seen[id] = true;
            if let Node::Rb { children } = self.nodes[id] {
                for c in children {
                    if c >= len {
                        return Err(WiringError::Malformed(format!("child {c} out of range")));
                    }
                    edges += 1;
                    stack.push(c);
                }
            }
        }
        if let Some(id) = seen.iter().position(|s| !s) {
            return Err(WiringError::Malformed(format!("node {id} disconnected from root")));
        }
        let mut slots: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf { slot } => Some(*slot),
                Node::Rb { .. } => None,
            })
            .collect();
        slots.sort_unstable();
        if slots.iter().enumerate().any(|(i, s)| i != *s) {
            return Err(WiringError::Malformed("leaf slots are not 0..l".into()));
        }
        Ok(TreeShape {
            leaves: slots.len(),
            internal: len - slots.len(),
            edges,
        })
    }

    /// Graphviz rendering: boxes point towards the root, the root feeds `m`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph wiring {\n  rankdir=BT;\n");
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Leaf { slot } => {
                    let _ = writeln!(s, "  n{id} [shape=circle,label=\"a{slot}\"];");
                }
                Node::Rb { children } => {
                    let _ = writeln!(s, "  n{id} [shape=box,label=\"RB\"];");
                    for (b, c) in children.iter().enumerate() {
                        let _ = writeln!(s, "  n{c} -> n{id} [label=\"{b}\"];");
                    }
                }
            }
        }
        let _ = writeln!(s, "  m [shape=plaintext];\n  n{} -> m;\n}}", self.root);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeShape {
    pub leaves: usize,
    pub internal: usize,
    pub edges: usize,
}

/// Perfect tree of depth `k`: a `(2^k→1)` RAC from `2^k - 1` boxes.
pub fn concatenate(k: usize) -> WiringTree {
    let mut t = WiringTree::leaf();
    for _ in 0..k {
        t = WiringTree::join(&t, &t);
    }
    if k > 0 {
        t.concatenation_uses = 1;
        t.addition_uses = 0;
    }
    t
}

/// Puts a fresh box on top of two wirings; Bob's input 0 selects `left`.
pub fn add(left: &WiringTree, right: &WiringTree) -> WiringTree {
    let mut t = WiringTree::join(left, right);
    t.addition_uses += 1;
    t
}

/// `(n→1)` RAC from `n - 1` boxes: concatenations for each power of two in
/// the binary expansion of `n`, folded together smallest power first.
pub fn compile_rac(n: usize) -> Result<(WiringTree, CostReport), WiringError> {
    if n < 2 {
        return Err(WiringError::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    let mut acc: Option<WiringTree> = None;
    for j in (0..usize::BITS as usize).filter(|j| n >> j & 1 == 1) {
        let term = concatenate(j);
        acc = Some(match acc {
            None => term,
            Some(left) => add(&left, &term),
        });
    }
    let tree = acc.expect("n >= 2 has a set bit");
    let cost = tree.cost();
    Ok((tree, cost))
}

/// Per-slot and aggregate success of a wiring run with actual box lookups.
#[derive(Debug, Clone, PartialEq)]
pub struct WinStats {
    /// Success probability for each `b`, averaged over uniform `a`.
    pub per_b: Vec<Rational>,
    pub average: Rational,
    /// Minimum over all `(a, b)`.
    pub worst: Rational,
}

/// A `(2→1)` RAC box that answers correctly (`B = a_b ⊕ A ⊕ A'`) with
/// probability `p` and flips otherwise.
pub fn noisy_rb(p: Rational) -> Result<BipartiteBox, WiringError> {
    if p < Rational::zero() || p > Rational::one() {
        return Err(WiringError::InvalidParameter("p outside [0, 1]".into()));
    }
    let sig = make_rb(2, 2, RbVariant::NoSignaling)
        .expect("fixed parameters")
        .signature()
        .clone();
    Ok(BipartiteBox::from_fn(sig, |a, bin, ao, bo| {
        let ideal = a[bin[1]] ^ ao[0] ^ bin[0];
        ratio(1, 2) * if bo[0] == ideal { p } else { Rational::one() - p }
    }))
}

/// Exhaustive forward simulation of the wiring with `rb` at every node:
/// enumerates all `a` and all Alice box outputs, Bob sets `A' = 0` and
/// outputs `m ⊕ B_1 ⊕ … ⊕ B_depth` along the route of his input.
pub fn forward_win(tree: &WiringTree, rb: &BipartiteBox, exec: Execution) -> Result<WinStats, WiringError> {
    let sig = rb.signature();
    let ok_shape = sig.alice_inputs().iter().map(Variable::size).eq([2, 2])
        && sig.alice_outputs().iter().map(Variable::size).eq([2])
        && sig.bob_inputs().iter().map(Variable::size).eq([2, 2])
        && sig.bob_outputs().iter().map(Variable::size).eq([2]);
    if !ok_shape {
        return Err(WiringError::InvalidParameter("resource is not a (2→1) RAC box".into()));
    }
    let routes = tree.routes()?;
    let n = routes.len();
    if n > 20 {
        return Err(WiringError::InvalidParameter("too many inputs for exhaustive simulation".into()));
    }
    // pa[a0][a1][A], pb[a0][a1][A][b][B] with A' = 0.
    let mut pa = [[[Rational::zero(); 2]; 2]; 2];
    let mut pb = [[[[[Rational::zero(); 2]; 2]; 2]; 2]; 2];
    for a0 in 0..2 {
        for a1 in 0..2 {
            let m = rb.alice_marginal(&[a0, a1], &[0, 0]);
            for big_a in 0..2 {
                pa[a0][a1][big_a] = m[big_a];
                for (b, slot) in pb[a0][a1][big_a].iter_mut().enumerate() {
                    if let Some(c) = rb.bob_conditional(&[a0, a1], &[0, b], big_a) {
                        *slot = [c[0], c[1]];
                    }
                }
            }
        }
    }
    let rbs: Vec<usize> = (0..tree.nodes.len())
        .filter(|&i| matches!(tree.nodes[i], Node::Rb { .. }))
        .collect();
    let mut rb_pos = vec![usize::MAX; tree.nodes.len()];
    for (k, &id) in rbs.iter().enumerate() {
        rb_pos[id] = k;
    }
    let k = rbs.len();

    let per_a = |a: usize| -> (Vec<Rational>, Rational) {
        let value = |id: usize, alpha: usize| match tree.nodes[id] {
            Node::Leaf { slot } => a >> slot & 1,
            Node::Rb { .. } => alpha >> rb_pos[id] & 1,
        };
        let inputs = |id: usize, alpha: usize| match tree.nodes[id] {
            Node::Rb { children } => (value(children[0], alpha), value(children[1], alpha)),
            Node::Leaf { .. } => unreachable!(),
        };
        let mut success = vec![Rational::zero(); n];
        for alpha in 0..1usize << k {
            let mut w = Rational::one();
            for &id in &rbs {
                let (x0, x1) = inputs(id, alpha);
                w *= pa[x0][x1][value(id, alpha)];
                if w.is_zero() {
                    break;
                }
            }
            if w.is_zero() {
                continue;
            }
            let m = value(tree.root, alpha);
            for (b, route) in routes.iter().enumerate() {
                // Distribution of Bob's running parity.
                let mut parity = [Rational::zero(); 2];
                parity[m] = Rational::one();
                for &(id, branch) in route {
                    let (x0, x1) = inputs(id, alpha);
                    let c = pb[x0][x1][value(id, alpha)][branch];
                    parity = [
                        parity[0] * c[0] + parity[1] * c[1],
                        parity[0] * c[1] + parity[1] * c[0],
                    ];
                }
                success[b] += w * parity[a >> b & 1];
            }
        }
        let worst = success.iter().copied().fold(Rational::one(), Rational::min);
        (success, worst)
    };

    let rows = exec.map_collect(1usize << n, per_a);
    let scale = ratio(1, 1i64 << n);
    let mut per_b = vec![Rational::zero(); n];
    let mut worst = Rational::one();
    for (s, w) in rows {
        for (acc, v) in per_b.iter_mut().zip(s) {
            *acc += v * scale;
        }
        worst = worst.min(w);
    }
    let average = per_b.iter().sum::<Rational>() / Rational::from_integer(n as i64);
    Ok(WinStats { per_b, average, worst })
}

/// Success along a route of `depth` boxes, each correct with probability `p`.
fn route_success<T>(depth: usize, p: T, one: T) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<Output = T>,
{
    let mut r = one;
    for _ in 0..depth {
        r = r * p + (one - r) * (one - p);
    }
    r
}

/// Average over `b` of Bob's success when each box independently flips its
/// answer with probability `1 - p2`.
pub fn winning_probability(tree: &WiringTree, p2: f64) -> Result<f64, WiringError> {
    if !(0.0..=1.0).contains(&p2) {
        return Err(WiringError::InvalidParameter(format!("p2 = {p2} outside [0, 1]")));
    }
    let routes = tree.routes()?;
    Ok(routes.iter().map(|r| route_success(r.len(), p2, 1.0)).sum::<f64>() / routes.len() as f64)
}

/// Exact-rational version of [`winning_probability`].
pub fn winning_probability_exact(tree: &WiringTree, p2: Rational) -> Result<Rational, WiringError> {
    if p2 < Rational::zero() || p2 > Rational::one() {
        return Err(WiringError::InvalidParameter("p2 outside [0, 1]".into()));
    }
    let routes = tree.routes()?;
    let total: Rational = routes
        .iter()
        .map(|r| route_success(r.len(), p2, Rational::one()))
        .sum();
    Ok(total / Rational::from_integer(routes.len() as i64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub n: usize,
    pub c: f64,
    pub t: f64,
}

/// Protocol bounds `C_n` (classical `p2 = c2`) and `T_n` (`p2 = t2`) for the
/// compiled wirings, `n = 2..=n_max`.
pub fn bound_table(n_max: usize, c2: f64, t2: f64) -> Result<Vec<BoundRow>, WiringError> {
    if n_max < 2 {
        return Err(WiringError::InvalidParameter("n_max must be >= 2".into()));
    }
    (2..=n_max)
        .map(|n| {
            let (tree, _) = compile_rac(n)?;
            Ok(BoundRow {
                n,
                c: winning_probability(&tree, c2)?,
                t: winning_probability(&tree, t2)?,
            })
        })
        .collect()
}

pub fn render_bound_table(rows: &[BoundRow]) -> String {
    let mut s = format!("{:>4}  {:>10}  {:>10}\n", "n", "C_n", "T_n");
    for r in rows {
        let _ = writeln!(s, "{:>4}  {:>10.6}  {:>10.6}", r.n, r.c, r.t);
    }
    s
}

/// Recounts leaves `l` and boxes `k`; passes iff `l = k + 1` and the degree
/// sum equals twice the edge count.
pub fn check_tree_lemma(tree: &WiringTree) -> Result<ProbeReport, WiringError> {
    let shape = tree.validate()?;
    let mut degree = vec![0usize; tree.nodes.len()];
    for (id, node) in tree.nodes.iter().enumerate() {
        if let Node::Rb { children } = node {
            for &c in children {
                degree[id] += 1;
                degree[c] += 1;
            }
        }
    }
    let degree_sum: usize = degree.iter().sum();
    let ok = shape.leaves == shape.internal + 1 && degree_sum == 2 * shape.edges;
    Ok(ProbeReport::new("tree-lemma", if ok { Status::Pass } else { Status::Fail })
        .with_quantity(Quantity::Exact(Rational::from_integer(shape.leaves as i64)))
        .with_bound(Quantity::Exact(Rational::from_integer(shape.internal as i64 + 1)))
        .detail("k", shape.internal)
        .detail("l", shape.leaves)
        .detail("edges", shape.edges)
        .detail("degree_sum", degree_sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn depths(tree: &WiringTree) -> Vec<usize> {
        tree.routes().unwrap().iter().map(Vec::len).collect()
    }

    #[test]
    fn concatenation_sizes() {
        assert_eq!(concatenate(1).rb_count(), 1);
        assert_eq!(concatenate(2).rb_count(), 3);
        let t = concatenate(3);
        assert_eq!((t.rb_count(), t.leaf_count()), (7, 8));
        assert_eq!(depths(&t), vec![3; 8]);
    }

    #[test]
    fn addition_costs() {
        let t = add(&concatenate(1), &WiringTree::leaf());
        assert_eq!((t.leaf_count(), t.rb_count()), (3, 2));
        let t = add(&concatenate(2), &concatenate(1));
        assert_eq!((t.leaf_count(), t.rb_count()), (6, 5));
        let (seven, _) = compile_rac(7).unwrap();
        let t = add(&concatenate(2), &add(&concatenate(1), &WiringTree::leaf()));
        assert_eq!((t.leaf_count(), t.rb_count()), (7, 6));
        assert_eq!(seven.rb_count(), 6);
    }

    #[test]
    fn compiler_costs() {
        for n in 2..=16 {
            let (tree, cost) = compile_rac(n).unwrap();
            assert_eq!(cost.rb_count, n - 1);
            assert_eq!(cost.n, n);
            assert_eq!(cost.message_bits, 1);
            let terms = n.count_ones() as usize;
            assert_eq!(cost.addition_uses, terms - 1);
            assert_eq!(cost.concatenation_uses, terms - (n & 1));
            assert_eq!(check_tree_lemma(&tree).unwrap().status, Status::Pass);
        }
        assert!(compile_rac(1).is_err());
    }

    #[test]
    fn powers_of_two_are_concatenations() {
        for k in 1..=4 {
            assert_eq!(compile_rac(1 << k).unwrap().0, concatenate(k));
        }
    }

    #[test]
    fn seven_has_expected_route_depths() {
        let (t, _) = compile_rac(7).unwrap();
        let mut d = depths(&t);
        d.sort_unstable();
        assert_eq!(d, vec![2, 3, 3, 3, 3, 3, 3]);
    }

    #[test]
    fn perfect_boxes_always_win() {
        let rb = make_rb(2, 2, RbVariant::NoSignaling).unwrap();
        for n in 2..=10 {
            let (tree, _) = compile_rac(n).unwrap();
            let s = forward_win(&tree, &rb, Execution::default()).unwrap();
            assert_eq!((s.average, s.worst), (int(1), int(1)), "n={n}");
        }
        let s = forward_win(&concatenate(2), &rb, Execution::Sequential).unwrap();
        assert_eq!(s.per_b, vec![int(1); 4]);
    }

    /// Independent oracle: enumerate every flip pattern of the boxes and
    /// count the patterns with an even number of flips on each route.
    fn flip_oracle(tree: &WiringTree, p: Rational) -> Rational {
        let routes = tree.routes().unwrap();
        let rbs: Vec<usize> = (0..tree.nodes().len())
            .filter(|&i| matches!(tree.nodes()[i], Node::Rb { .. }))
            .collect();
        let mut total = Rational::zero();
        for pattern in 0..1usize << rbs.len() {
            let flipped = |id: usize| pattern >> rbs.iter().position(|&r| r == id).unwrap() & 1 == 1;
            let w: Rational = rbs
                .iter()
                .map(|&id| if flipped(id) { Rational::one() - p } else { p })
                .product();
            for route in &routes {
                if route.iter().filter(|(id, _)| flipped(*id)).count() % 2 == 0 {
                    total += w;
                }
            }
        }
        total / Rational::from_integer(routes.len() as i64)
    }

    #[test]
    fn recursion_matches_flip_enumeration() {
        for n in [2, 3, 5, 7, 8] {
            let (tree, _) = compile_rac(n).unwrap();
            for p in [ratio(3, 4), ratio(2, 3), ratio(9, 10)] {
                assert_eq!(winning_probability_exact(&tree, p).unwrap(), flip_oracle(&tree, p));
            }
        }
    }

    #[test]
    fn recursion_matches_noisy_box_simulation() {
        for n in [3, 6] {
            let (tree, _) = compile_rac(n).unwrap();
            let p = ratio(3, 4);
            let s = forward_win(&tree, &noisy_rb(p).unwrap(), Execution::default()).unwrap();
            assert_eq!(s.average, winning_probability_exact(&tree, p).unwrap());
        }
    }

    #[test]
    fn seven_with_tsirelson_boxes() {
        let t2 = (2.0 + 2f64.sqrt()) / 4.0;
        let (tree, _) = compile_rac(7).unwrap();
        let v = winning_probability(&tree, t2).unwrap();
        assert!((v - 0.68723).abs() < 1e-5, "{v}");
        let r2 = t2 * t2 + (1.0 - t2) * (1.0 - t2);
        let r3 = r2 * t2 + (1.0 - r2) * (1.0 - t2);
        assert!((v - (r2 + 6.0 * r3) / 7.0).abs() < 1e-12);
    }

    #[test]
    fn probability_edge_cases() {
        for n in 2..=12 {
            let (tree, _) = compile_rac(n).unwrap();
            assert_eq!(winning_probability(&tree, 1.0).unwrap(), 1.0);
            assert_eq!(winning_probability_exact(&tree, ratio(1, 2)).unwrap(), ratio(1, 2));
            let grid: Vec<f64> = (0..=50)
                .map(|i| winning_probability(&tree, 0.5 + i as f64 / 100.0).unwrap())
                .collect();
            assert!(grid.windows(2).all(|w| w[0] <= w[1] + 1e-15));
        }
        let (tree, _) = compile_rac(3).unwrap();
        assert!(winning_probability(&tree, 1.5).is_err());
        assert!(winning_probability(&tree, -0.1).is_err());
    }

    #[test]
    fn bound_table_rows() {
        let t2 = (2.0 + 2f64.sqrt()) / 4.0;
        let rows = bound_table(8, 0.75, t2).unwrap();
        assert_eq!(rows[0].n, 2);
        assert!((rows[0].c - 0.75).abs() < 1e-12);
        assert!((rows[0].t - 0.853553).abs() < 1e-6);
        assert!((rows[5].t - 0.68723).abs() < 1e-5);
        assert_eq!(bound_table(4, 1.0, 1.0).unwrap()[2].c, 1.0);
        assert!(render_bound_table(&rows).lines().count() == rows.len() + 1);
        assert!(bound_table(1, 0.75, t2).is_err());
    }

    #[test]
    fn tree_lemma_examples() {
        let single = concatenate(1);
        let r = check_tree_lemma(&single).unwrap();
        assert_eq!((r.get("k"), r.get("l")), (Some("1"), Some("2")));
        for (n, k) in [(7, "6"), (10, "9")] {
            let r = check_tree_lemma(&compile_rac(n).unwrap().0).unwrap();
            assert_eq!(r.get("k"), Some(k));
            assert!(r.passed());
        }
    }

    #[test]
    fn malformed_trees_are_rejected() {
        let cyclic = WiringTree::from_raw(
            vec![Node::Leaf { slot: 0 }, Node::Rb { children: [0, 1] }],
            1,
        );
        assert!(matches!(check_tree_lemma(&cyclic), Err(WiringError::Malformed(_))));
        let disconnected = WiringTree::from_raw(
            vec![
                Node::Leaf { slot: 0 },
                Node::Leaf { slot: 1 },
                Node::Rb { children: [0, 1] },
                Node::Leaf { slot: 2 },
            ],
            2,
        );
        assert!(matches!(check_tree_lemma(&disconnected), Err(WiringError::Malformed(_))));
    }

    #[test]
    fn dot_mentions_every_node() {
        let (tree, _) = compile_rac(5).unwrap();
        let dot = tree.to_dot();
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("shape=box").count(), 4);
        assert_eq!(dot.matches("shape=circle").count(), 5);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let (tree, _) = compile_rac(6).unwrap();
        let rb = noisy_rb(ratio(2, 3)).unwrap();
        assert_eq!(
            forward_win(&tree, &rb, Execution::Sequential).unwrap(),
            forward_win(&tree, &rb, Execution::Parallel).unwrap()
        );
    }
}
