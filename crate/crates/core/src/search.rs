//! Exhaustive search over deterministic RAC strategies built from `(2→1)`
//! RAC boxes and one message bit, plus the guessing-feasibility decider.
//!
//! A run of the game is a point `(ã, A_1..A_k)`: Alice's task bits and the
//! (uniform, independent) outputs of her boxes. Every deterministic function
//! of a point is a bitmask over the `2^(n+k)` points, so Alice's tables, the
//! message and every box answer are `u64` masks. Bob never needs to be
//! enumerated: given Alice's tables, his best adaptive play is an exact
//! expectimax over the mask of points consistent with what he has seen.
//! Since `B = a_b ⊕ A ⊕ A'`, his `A'` only relabels `B` and is fixed to 0.
//!
//! Shared randomness is not enumerated: the winning probability is linear in
//! the strategy mixture, so its maximum is attained by a deterministic
//! strategy.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::box_core::{make_rb, BoxError, RbVariant, Variable};
use crate::exec::Execution;
use crate::rational::{ratio, Rational};
use crate::report::{ProbeReport, Quantity, Status};
use crate::tables::{FunctionTable, StrategyFile, TableError};
use crate::wiring::{compile_rac, Node};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error("inconsistent constraints: {0}")]
    Inconsistent(String),
    #[error("strategy queries box {0} twice")]
    BoxReused(usize),
}

/// Which messages Alice may send.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageFamily {
    /// Any function of `(ã, A)`.
    Any,
    /// The last box's output, `m = A_k`.
    Relay,
    /// Any function of `ã` alone.
    Fixed,
}

impl MessageFamily {
    fn as_str(self) -> &'static str {
        match self {
            MessageFamily::Any => "any",
            MessageFamily::Relay => "relay",
            MessageFamily::Fixed => "fixed",
        }
    }
}

const MAX_POINT_BITS: usize = 6;

/// Point space for `n` task bits and `k` boxes.
#[derive(Debug, Clone)]
struct Space {
    n: usize,
    k: usize,
    points: usize,
    full: u64,
    /// `targets[j]`: points with `ã_j = 1`.
    targets: Vec<u64>,
    /// `a_bits[i]`: points with `A_{i+1} = 1`.
    a_bits: Vec<u64>,
}

impl Space {
    fn new(n: usize, k: usize) -> Self {
        let points = 1usize << (n + k);
        let full = if points == 64 { u64::MAX } else { (1u64 << points) - 1 };
        let bit = |j: usize| (0..points).filter(|p| p >> j & 1 == 1).fold(0u64, |m, p| m | 1 << p);
        Space {
            n,
            k,
            points,
            full,
            targets: (0..n).map(bit).collect(),
            a_bits: (0..k).map(|i| bit(n + i)).collect(),
        }
    }

    /// Lifts a truth table over the low `dom_bits` bits of a point.
    fn expand(&self, table: u64, dom_bits: usize) -> u64 {
        let dm = (1usize << dom_bits) - 1;
        (0..self.points)
            .filter(|&p| table >> (p & dm) & 1 == 1)
            .fold(0u64, |m, p| m | 1 << p)
    }

    fn max_count(&self) -> u64 {
        (self.n * self.points) as u64
    }

    fn queries(&self, tables: &[[u64; 2]]) -> Vec<[u64; 2]> {
        tables
            .iter()
            .enumerate()
            .map(|(i, t)| {
                [
                    self.expand(t[0], self.n + i) ^ self.a_bits[i],
                    self.expand(t[1], self.n + i) ^ self.a_bits[i],
                ]
            })
            .collect()
    }

    fn guess(s: u64, target: u64) -> (u32, usize) {
        let ones = (s & target).count_ones();
        let zeros = s.count_ones() - ones;
        if ones > zeros {
            (ones, 1)
        } else {
            (zeros, 0)
        }
    }

    /// Bob's best count of correct answers among the points `s`, with the
    /// boxes not in `used` still available. Querying a box never hurts, so
    /// he queries all of them.
    fn bob_value(&self, s: u64, target: u64, q: &[[u64; 2]], used: u32) -> u32 {
        if used.count_ones() as usize == self.k {
            return Self::guess(s, target).0;
        }
        let total = s.count_ones();
        let mut best = 0;
        for (i, qi) in q.iter().enumerate() {
            if used >> i & 1 == 1 {
                continue;
            }
            for qb in qi {
                let v = self.bob_value(s & qb, target, q, used | 1 << i)
                    + self.bob_value(s & !qb, target, q, used | 1 << i);
                if v > best {
                    best = v;
                    if best == total {
                        return best;
                    }
                }
            }
        }
        best
    }

    /// The first query (lowest box, then lowest `b`) attaining the value.
    fn bob_decision(&self, s: u64, target: u64, q: &[[u64; 2]], used: u32) -> (usize, usize) {
        let mut best = None;
        for (i, qi) in q.iter().enumerate() {
            if used >> i & 1 == 1 {
                continue;
            }
            for (b, qb) in qi.iter().enumerate() {
                let v = self.bob_value(s & qb, target, q, used | 1 << i)
                    + self.bob_value(s & !qb, target, q, used | 1 << i);
                if best.is_none_or(|(bv, _)| v > bv) {
                    best = Some((v, (i, b)));
                }
            }
        }
        best.expect("an unused box remains").1
    }

    fn win_count(&self, q: &[[u64; 2]], m: u64) -> u64 {
        let m = m & self.full;
        self.targets
            .iter()
            .map(|&t| (self.bob_value(m, t, q, 0) + self.bob_value(self.full & !m, t, q, 0)) as u64)
            .sum()
    }
}

/// Alice's side of a deterministic strategy. Box `i`'s input tables range
/// over `(ã, A_1..A_i)` (low bits first); the message is a point mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RacStrategy {
    pub n: usize,
    pub k: usize,
    pub rb_tables: Vec<[u64; 2]>,
    pub message: u64,
}

impl RacStrategy {
    fn space(&self) -> Space {
        Space::new(self.n, self.k)
    }

    /// Winning probability with Bob's best response (mask evaluation).
    pub fn win_probability(&self) -> Rational {
        let sp = self.space();
        let q = sp.queries(&self.rb_tables);
        ratio(sp.win_count(&q, self.message) as i64, sp.max_count() as i64)
    }

    /// Alice's tables from a compiled wiring tree: boxes in arena order, each
    /// fed its children's values, and the root's output sent.
    pub fn from_wiring(n: usize, k: usize) -> Result<Self, SearchError> {
        let (tree, cost) = compile_rac(n).map_err(|e| SearchError::InvalidParameter(e.to_string()))?;
        if cost.rb_count > k {
            return Err(SearchError::InvalidParameter(format!("the wiring needs {} boxes", cost.rb_count)));
        }
        let nodes = tree.nodes();
        let rb_ids: Vec<usize> = (0..nodes.len()).filter(|&i| matches!(nodes[i], Node::Rb { .. })).collect();
        let pos = |id: usize| rb_ids.iter().position(|&r| r == id).expect("box node");
        let sp = Space::new(n, k);
        let mut rb_tables = vec![[0u64; 2]; k];
        for (i, &id) in rb_ids.iter().enumerate() {
            let Node::Rb { children } = nodes[id] else { unreachable!() };
            for (b, &c) in children.iter().enumerate() {
                let bit = match nodes[c] {
                    Node::Leaf { slot } => slot,
                    Node::Rb { .. } => n + pos(c),
                };
                rb_tables[i][b] = (0..1u64 << (n + i)).filter(|e| e >> bit & 1 == 1).fold(0, |t, e| t | 1 << e);
            }
        }
        Ok(RacStrategy {
            n,
            k,
            rb_tables,
            message: sp.a_bits[pos(tree.root())],
        })
    }

    /// Serializes Alice's tables and Bob's best response as truth tables.
    pub fn to_file(&self) -> StrategyFile {
        let (n, k) = (self.n, self.k);
        let sp = self.space();
        let q = sp.queries(&self.rb_tables);
        let task: Vec<Variable> = (0..n).map(|i| Variable::new(format!("at{i}"), 2)).collect();
        let a_vars = |upto: usize| (1..=upto).map(|i| Variable::new(format!("A{i}"), 2));
        let mut f = StrategyFile::new("rac-search");
        f.params.push(("n".into(), n.to_string()));
        f.params.push(("k".into(), k.to_string()));
        for (i, t) in self.rb_tables.iter().enumerate() {
            let ins: Vec<Variable> = task.iter().cloned().chain(a_vars(i)).collect();
            f.tables.push(FunctionTable::from_fn(
                format!("rb{}", i + 1),
                ins,
                vec![Variable::new("a0", 2), Variable::new("a1", 2)],
                |v| {
                    let e = point_of(v);
                    vec![(t[0] >> e & 1) as usize, (t[1] >> e & 1) as usize]
                },
            ));
        }
        let ins: Vec<Variable> = task.iter().cloned().chain(a_vars(k)).collect();
        f.tables.push(FunctionTable::from_fn("message", ins, vec![Variable::new("m", 2)], |v| {
            vec![(self.message >> point_of(v) & 1) as usize]
        }));
        // Bob replays his own decisions to recover the consistent point set.
        let replay = |bt: usize, m: usize, history: &[usize]| -> (u64, u32) {
            let mut s = if m == 1 { self.message & sp.full } else { sp.full & !self.message };
            let mut used = 0u32;
            for &big_b in history {
                let (i, b) = sp.bob_decision(s, sp.targets[bt], &q, used);
                s &= if big_b == 1 { q[i][b] } else { !q[i][b] };
                used |= 1 << i;
            }
            (s, used)
        };
        let bob_ins = |steps: usize| -> Vec<Variable> {
            [Variable::new("bt", n), Variable::new("m", 2)]
                .into_iter()
                .chain((1..=steps).map(|j| Variable::new(format!("B{j}"), 2)))
                .collect()
        };
        for j in 1..=k {
            f.tables.push(FunctionTable::from_fn(
                format!("step{j}"),
                bob_ins(j - 1),
                vec![Variable::new("rb", k), Variable::new("b", 2), Variable::new("Ap", 2)],
                |v| {
                    let (s, used) = replay(v[0], v[1], &v[2..]);
                    let (i, b) = sp.bob_decision(s, sp.targets[v[0]], &q, used);
                    vec![i, b, 0]
                },
            ));
        }
        f.tables.push(FunctionTable::from_fn("guess", bob_ins(k), vec![Variable::new("Bt", 2)], |v| {
            let (s, _) = replay(v[0], v[1], &v[2..]);
            vec![Space::guess(s, sp.targets[v[0]]).1]
        }));
        f
    }

    /// Reads Alice's tables back (Bob's tables are ignored here).
    pub fn from_file(file: &StrategyFile) -> Result<Self, SearchError> {
        let (n, k) = search_params(file)?;
        let mut rb_tables = Vec::with_capacity(k);
        for i in 0..k {
            let t = file.table(&format!("rb{}", i + 1))?;
            let mut pair = [0u64; 2];
            for e in 0..1usize << (n + i) {
                let out = t.eval(&bits_of(e, n + i));
                pair[0] |= (out[0] as u64) << e;
                pair[1] |= (out[1] as u64) << e;
            }
            rb_tables.push(pair);
        }
        let t = file.table("message")?;
        let message = (0..1usize << (n + k)).fold(0u64, |m, e| m | (t.eval(&bits_of(e, n + k))[0] as u64) << e);
        Ok(RacStrategy { n, k, rb_tables, message })
    }
}

/// Point index of a table row `(ã_0.., A_1..)`: first variable is bit 0.
fn point_of(v: &[usize]) -> usize {
    v.iter().enumerate().fold(0, |e, (j, &x)| e | x << j)
}

fn bits_of(e: usize, len: usize) -> Vec<usize> {
    (0..len).map(|j| e >> j & 1).collect()
}

fn as_refs(v: &[(String, usize)]) -> Vec<(&str, usize)> {
    v.iter().map(|(s, z)| (s.as_str(), *z)).collect()
}

fn search_params(file: &StrategyFile) -> Result<(usize, usize), SearchError> {
    if file.kind != "rac-search" {
        return Err(TableError::Param("strategy kind must be `rac-search`".into()).into());
    }
    let n = file.param_usize("n")?;
    let k = file.param_usize("k")?;
    if n < 2 || k < 1 || n + k > MAX_POINT_BITS {
        return Err(SearchError::InvalidParameter(format!("unsupported (n, k) = ({n}, {k})")));
    }
    Ok((n, k))
}

/// Independent evaluation of a serialized strategy: every table is read
/// from the file and every box answer comes from the no-signaling `(2→1)`
/// RAC box's probability table.
pub fn evaluate_strategy_file(file: &StrategyFile) -> Result<Rational, SearchError> {
    let (n, k) = search_params(file)?;
    let rb = make_rb(2, 2, RbVariant::NoSignaling)?;
    let task: Vec<(String, usize)> = (0..n).map(|i| (format!("at{i}"), 2)).collect();
    let shape = |extra: Vec<(String, usize)>| -> Vec<(String, usize)> { task.iter().cloned().chain(extra).collect() };
    let a_names = |upto: usize| (1..=upto).map(|i| (format!("A{i}"), 2)).collect::<Vec<_>>();
    let mut rb_tables = Vec::new();
    for i in 0..k {
        let t = file.table(&format!("rb{}", i + 1))?;
        t.expect_shape(&as_refs(&shape(a_names(i))), &[("a0", 2), ("a1", 2)])?;
        rb_tables.push(t);
    }
    let message = file.table("message")?;
    message.expect_shape(&as_refs(&shape(a_names(k))), &[("m", 2)])?;
    let bob_shape = |steps: usize| {
        let mut v = vec![("bt".to_string(), n), ("m".to_string(), 2)];
        v.extend((1..=steps).map(|j| (format!("B{j}"), 2)));
        v
    };
    let mut steps = Vec::new();
    for j in 1..=k {
        let t = file.table(&format!("step{j}"))?;
        t.expect_shape(&as_refs(&bob_shape(j - 1)), &[("rb", k), ("b", 2), ("Ap", 2)])?;
        steps.push(t);
    }
    let guess = file.table("guess")?;
    guess.expect_shape(&as_refs(&bob_shape(k)), &[("Bt", 2)])?;

    struct Ctx<'a> {
        rb: &'a crate::box_core::BipartiteBox,
        steps: &'a [&'a FunctionTable],
        guess: &'a FunctionTable,
    }
    // Bob's turn: `inputs[i]` / `outs[i]` are box i's Alice-side values.
    #[allow(clippy::too_many_arguments)]
    fn bob(
        ctx: &Ctx,
        bt: usize,
        m: usize,
        inputs: &[[usize; 2]],
        outs: &[usize],
        history: &mut Vec<usize>,
        used: u32,
        truth: usize,
    ) -> Result<Rational, SearchError> {
        let j = history.len();
        if j == ctx.steps.len() {
            let mut row = vec![bt, m];
            row.extend(history.iter().copied());
            return Ok(if ctx.guess.eval(&row)[0] == truth { Rational::one() } else { Rational::zero() });
        }
        let mut row = vec![bt, m];
        row.extend(history.iter().copied());
        let d = ctx.steps[j].eval(&row);
        let (i, b, ap) = (d[0], d[1], d[2]);
        if used >> i & 1 == 1 {
            return Err(SearchError::BoxReused(i + 1));
        }
        let cond = ctx
            .rb
            .bob_conditional(&inputs[i], &[ap, b], outs[i])
            .expect("Alice output has positive probability");
        let mut total = Rational::zero();
        for (big_b, p) in cond.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
            history.push(big_b);
            total += *p * bob(ctx, bt, m, inputs, outs, history, used | 1 << i, truth)?;
            history.pop();
        }
        Ok(total)
    }

    let ctx = Ctx {
        rb: &rb,
        steps: &steps,
        guess,
    };
    let mut total = Rational::zero();
    for at in 0..1usize << n {
        let task_bits = bits_of(at, n);
        // Alice's boxes in order; enumerate their outputs with box weights.
        let mut stack: Vec<(Vec<[usize; 2]>, Vec<usize>, Rational)> = vec![(vec![], vec![], Rational::one())];
        while let Some((inputs, outs, w)) = stack.pop() {
            let i = outs.len();
            if i == k {
                let mut row = task_bits.clone();
                row.extend(outs.iter().copied());
                let m = message.eval(&row)[0];
                for (bt, &truth) in task_bits.iter().enumerate().take(n) {
                    let p = bob(&ctx, bt, m, &inputs, &outs, &mut Vec::new(), 0, truth)?;
                    total += w * p;
                }
                continue;
            }
            let mut row = task_bits.clone();
            row.extend(outs.iter().copied());
            let a = rb_tables[i].eval(&row);
            let a_in = [a[0], a[1]];
            let marginal = rb.alice_marginal(&a_in, &[0, 0]);
            for (big_a, p) in marginal.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
                let mut ni = inputs.clone();
                ni.push(a_in);
                let mut no = outs.clone();
                no.push(big_a);
                stack.push((ni, no, w * p));
            }
        }
    }
    Ok(total / Rational::from_integer((n << n) as i64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub n: usize,
    pub k: usize,
    pub family: MessageFamily,
    pub max_win_probability: Rational,
    pub witness: Option<RacStrategy>,
    pub strategies_examined: u64,
    /// Strategies skipped by symmetry (equivalent to an examined one).
    pub pruned: u64,
    pub complete: bool,
    /// The optimum was certified by the compiled wiring without enumeration.
    pub seeded: bool,
}

impl SearchResult {
    pub fn to_report(&self) -> ProbeReport {
        let status = if self.complete { Status::Pass } else { Status::Incomplete };
        ProbeReport::new("search", status)
            .with_quantity(Quantity::Exact(self.max_win_probability))
            .detail("n", self.n)
            .detail("rbs", self.k)
            .detail("message_family", self.family.as_str())
            .detail("strategies_examined", self.strategies_examined)
            .detail("pruned", self.pruned)
            .detail("complete", self.complete)
            .detail("seeded_by_wiring", self.seeded)
            .detail("shared_randomness", "not enumerated; a mixture never beats its best deterministic strategy")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub n: usize,
    pub k: usize,
    pub family: MessageFamily,
    pub budget: Option<Duration>,
    pub exec: Execution,
    /// Skip symmetry reduction of the first box (for soundness checks).
    pub no_symmetry: bool,
}

impl SearchConfig {
    pub fn new(n: usize, k: usize) -> Self {
        SearchConfig {
            n,
            k,
            family: MessageFamily::Any,
            budget: None,
            exec: Execution::default(),
            no_symmetry: false,
        }
    }
}

/// Maximum `(n→1)` RAC winning probability with `k` no-signaling `(2→1)`
/// RAC boxes and one message bit, over all deterministic strategies.
pub fn search_rac_with_rbs(
    n: usize,
    k: usize,
    budget: Option<Duration>,
    exec: Execution,
) -> Result<SearchResult, SearchError> {
    search(SearchConfig {
        budget,
        exec,
        ..SearchConfig::new(n, k)
    })
}

/// Symmetries of the first box's input pair that leave the optimum
/// unchanged: relabel and flip task bits (Bob relabels his index and his
/// guess), swap the two box inputs (Bob swaps `b`), complement either input
/// (Bob flips `B`). Returns the canonical representatives.
fn canonical_pairs(n: usize) -> Vec<(u64, u64)> {
    let size = 1usize << n;
    let tables = 1u64 << size;
    let table_mask = tables - 1;
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for j in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=j).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, j);
                    q
                })
            })
            .collect();
    }
    // transforms[g][f]: table f composed with the g-th point relabelling.
    let mut transforms: Vec<Vec<u64>> = Vec::new();
    for perm in &perms {
        for flip in 0..size {
            let idx: Vec<usize> = (0..size)
                .map(|x| (0..n).fold(0, |y, j| y | (x >> perm[j] & 1) << j) ^ flip)
                .collect();
            transforms.push(
                (0..tables)
                    .map(|f| (0..size).fold(0u64, |g, x| g | (f >> idx[x] & 1) << x))
                    .collect(),
            );
        }
    }
    let mut reps = Vec::new();
    for f0 in 0..tables {
        'pairs: for f1 in 0..tables {
            for t in &transforms {
                let (g0, g1) = (t[f0 as usize], t[f1 as usize]);
                for (h0, h1) in [(g0, g1), (g1, g0)] {
                    for c in 0..4u64 {
                        let x0 = if c & 1 == 1 { h0 ^ table_mask } else { h0 };
                        let x1 = if c & 2 == 2 { h1 ^ table_mask } else { h1 };
                        if (x0, x1) < (f0, f1) {
                            continue 'pairs;
                        }
                    }
                }
            }
            reps.push((f0, f1));
        }
    }
    reps
}

struct Worker<'a> {
    sp: &'a Space,
    cfg: &'a SearchConfig,
    deadline: Option<Instant>,
    stop: &'a AtomicBool,
    examined: u64,
    best: u64,
    best_tables: Vec<[u64; 2]>,
    best_message: u64,
    tables: Vec<[u64; 2]>,
    queries: Vec<[u64; 2]>,
}

impl Worker<'_> {
    fn out_of_time(&mut self) -> bool {
        if self.examined & 0x3ff == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.stop.store(true, Ordering::Relaxed);
                }
            }
        }
        self.stop.load(Ordering::Relaxed)
    }

    fn done(&self) -> bool {
        self.best == self.sp.max_count()
    }

    fn consider(&mut self, message: u64) {
        self.examined += 1;
        let c = self.sp.win_count(&self.queries, message);
        if c > self.best {
            self.best = c;
            self.best_tables = self.tables.clone();
            self.best_message = message & self.sp.full;
        }
    }

    /// Enumerates the message for fixed box tables. Complemented messages
    /// are equivalent (Bob relabels `m`), so point 0 always sends 0.
    fn messages(&mut self) -> bool {
        let sp = self.sp;
        match self.cfg.family {
            MessageFamily::Relay => {
                self.consider(sp.a_bits[sp.k - 1]);
                !self.out_of_time()
            }
            MessageFamily::Fixed => {
                for t in 0..1u64 << ((1usize << sp.n) - 1) {
                    self.consider(sp.expand(t << 1, sp.n));
                    if self.out_of_time() {
                        return false;
                    }
                    if self.done() {
                        break;
                    }
                }
                true
            }
            MessageFamily::Any => {
                let count = 1u128 << (sp.points - 1);
                let mut t = 0u128;
                while t < count {
                    self.consider((t as u64) << 1);
                    if self.out_of_time() {
                        return false;
                    }
                    if self.done() {
                        break;
                    }
                    t += 1;
                }
                true
            }
        }
    }

    /// Enumerates the input tables of box `i` onwards.
    fn boxes(&mut self, i: usize) -> bool {
        let sp = self.sp;
        if i == sp.k {
            return self.messages();
        }
        let count = 1u128 << (1usize << (sp.n + i));
        let mut t0 = 0u128;
        while t0 < count {
            let mut t1 = 0u128;
            while t1 < count {
                let pair = [t0 as u64, t1 as u64];
                self.push(i, pair);
                let ok = self.boxes(i + 1);
                self.tables.pop();
                self.queries.pop();
                if !ok {
                    return false;
                }
                if self.done() {
                    return true;
                }
                t1 += 1;
            }
            t0 += 1;
        }
        true
    }

    fn push(&mut self, i: usize, pair: [u64; 2]) {
        let sp = self.sp;
        self.tables.push(pair);
        self.queries.push([
            sp.expand(pair[0], sp.n + i) ^ sp.a_bits[i],
            sp.expand(pair[1], sp.n + i) ^ sp.a_bits[i],
        ]);
    }
}

struct BlockResult {
    best: u64,
    tables: Vec<[u64; 2]>,
    message: u64,
    examined: u64,
    complete: bool,
}

pub fn search(cfg: SearchConfig) -> Result<SearchResult, SearchError> {
    let (n, k) = (cfg.n, cfg.k);
    if n < 2 || k < 1 || n + k > MAX_POINT_BITS {
        return Err(SearchError::InvalidParameter(format!(
            "need n >= 2, k >= 1 and n + k <= {MAX_POINT_BITS}; got n = {n}, k = {k}"
        )));
    }
    let sp = Space::new(n, k);
    let denom = sp.max_count() as i64;

    if cfg.family == MessageFamily::Any && n <= k + 1 {
        let w = RacStrategy::from_wiring(n, k)?;
        let q = sp.queries(&w.rb_tables);
        if sp.win_count(&q, w.message) == sp.max_count() {
            return Ok(SearchResult {
                n,
                k,
                family: cfg.family,
                max_win_probability: Rational::one(),
                witness: Some(w),
                strategies_examined: 1,
                pruned: 0,
                complete: true,
                seeded: true,
            });
        }
    }

    // Outer blocks: pairs for the first box, or first-input tables only
    // when the pair space is too large to canonicalise.
    let first_tables = 1u128 << (1usize << n);
    let symmetric = !cfg.no_symmetry && n <= 3;
    let outer: Vec<(u64, Option<u64>)> = if symmetric {
        canonical_pairs(n).into_iter().map(|(a, b)| (a, Some(b))).collect()
    } else if n <= 3 {
        (0..first_tables as u64)
            .flat_map(|a| (0..first_tables as u64).map(move |b| (a, Some(b))))
            .collect()
    } else {
        (0..first_tables as u64).map(|a| (a, None)).collect()
    };
    let deadline = cfg.budget.map(|b| Instant::now() + b);
    let stop = AtomicBool::new(false);

    let block = |idx: usize| -> BlockResult {
        let mut w = Worker {
            sp: &sp,
            cfg: &cfg,
            deadline,
            stop: &stop,
            examined: 0,
            best: 0,
            best_tables: Vec::new(),
            best_message: 0,
            tables: Vec::new(),
            queries: Vec::new(),
        };
        let (t0, t1) = outer[idx];
        let seconds: Vec<u64> = match t1 {
            Some(t1) => vec![t1],
            None => (0..first_tables as u64).collect(),
        };
        let mut complete = !stop.load(Ordering::Relaxed);
        if complete {
            for t1 in seconds {
                w.push(0, [t0, t1]);
                let ok = w.boxes(1);
                w.tables.pop();
                w.queries.pop();
                if !ok {
                    complete = false;
                    break;
                }
                if w.done() {
                    break;
                }
            }
        }
        BlockResult {
            best: w.best,
            tables: w.best_tables,
            message: w.best_message,
            examined: w.examined,
            complete,
        }
    };

    let blocks = cfg.exec.map_collect(outer.len(), block);
    let mut best: Option<&BlockResult> = None;
    let mut examined = 0u64;
    let mut complete = true;
    for b in &blocks {
        examined += b.examined;
        complete &= b.complete;
        if !b.tables.is_empty() && best.is_none_or(|x| b.best > x.best) {
            best = Some(b);
        }
    }
    let pruned = if symmetric {
        let per_block = examined / blocks.len().max(1) as u64;
        ((first_tables * first_tables) as u64 - outer.len() as u64).saturating_mul(per_block.max(1))
    } else {
        0
    } + examined;
    let (value, witness) = match best {
        Some(b) => (
            ratio(b.best as i64, denom),
            Some(RacStrategy {
                n,
                k,
                rb_tables: b.tables.clone(),
                message: b.message,
            }),
        ),
        None => (Rational::zero(), None),
    };
    Ok(SearchResult {
        n,
        k,
        family: cfg.family,
        max_win_probability: value,
        witness,
        strategies_examined: examined,
        pruned,
        complete,
        seeded: false,
    })
}

/// Compares the best single-box `(n→1)` strategy that relays the box
/// output (`m = A`) against the best one whose message ignores the box.
pub fn verify_observation2(n: usize) -> Result<ProbeReport, SearchError> {
    let run = |family| {
        search(SearchConfig {
            family,
            ..SearchConfig::new(n, 1)
        })
    };
    let relay = run(MessageFamily::Relay)?;
    let fixed = run(MessageFamily::Fixed)?;
    let status = if relay.max_win_probability >= fixed.max_win_probability {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(ProbeReport::new("observation2", status)
        .with_quantity(Quantity::Exact(relay.max_win_probability))
        .with_bound(Quantity::Exact(fixed.max_win_probability))
        .detail("n", n)
        .detail("relay_max", crate::rational::format(&relay.max_win_probability))
        .detail("fixed_message_max", crate::rational::format(&fixed.max_win_probability))
        .detail("gap", crate::rational::format(&(relay.max_win_probability - fixed.max_win_probability))))
}

/// "Bob guesses `variable` perfectly whenever the message is `message`",
/// optionally with the guessed value pinned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessConstraint {
    pub message: usize,
    pub variable: String,
    pub guess: Option<usize>,
}

impl GuessConstraint {
    pub fn new(message: usize, variable: impl Into<String>, guess: Option<usize>) -> Self {
        GuessConstraint {
            message,
            variable: variable.into(),
            guess,
        }
    }
}

/// Decides whether a joint distribution of the declared uniform independent
/// variables and a message exists in which every constraint holds.
///
/// Every cell of the variables' product has positive probability, so it must
/// be sent with some message whose constraints it satisfies. Conversely any
/// such covering gives a distribution. The guesses themselves are searched
/// over (unless pinned); when no choice covers every cell, the first
/// uncovered cell under the first choice is the witness of a forced zero.
pub fn guessing_feasibility(
    message_alphabet: usize,
    constraints: &[GuessConstraint],
    independents: &[(String, usize)],
) -> Result<ProbeReport, SearchError> {
    if message_alphabet == 0 {
        return Err(SearchError::Inconsistent("empty message alphabet".into()));
    }
    for (i, (name, size)) in independents.iter().enumerate() {
        if *size == 0 || independents[..i].iter().any(|(o, _)| o == name) {
            return Err(SearchError::Inconsistent(format!("bad declaration of `{name}`")));
        }
    }
    // Distinct (message, variable) requirements with their allowed guesses.
    let mut reqs: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for c in constraints {
        let var = independents
            .iter()
            .position(|(n, _)| *n == c.variable)
            .ok_or_else(|| SearchError::Inconsistent(format!("undeclared variable `{}`", c.variable)))?;
        let size = independents[var].1;
        if c.message >= message_alphabet {
            return Err(SearchError::Inconsistent(format!("message {} out of range", c.message)));
        }
        let allowed: Vec<usize> = match c.guess {
            Some(g) if g >= size => {
                return Err(SearchError::Inconsistent(format!("guess {g} out of range for `{}`", c.variable)))
            }
            Some(g) => vec![g],
            None => (0..size).collect(),
        };
        match reqs.iter_mut().find(|(m, v, _)| *m == c.message && *v == var) {
            Some((_, _, prev)) => {
                prev.retain(|g| allowed.contains(g));
                if prev.is_empty() {
                    return Err(SearchError::Inconsistent(format!(
                        "conflicting guesses for `{}` at m = {}",
                        c.variable, c.message
                    )));
                }
            }
            None => reqs.push((c.message, var, allowed)),
        }
    }
    let mut vars: Vec<usize> = reqs.iter().map(|r| r.1).collect();
    vars.sort_unstable();
    vars.dedup();
    let sizes: Vec<usize> = vars.iter().map(|&v| independents[v].1).collect();
    let cells = crate::box_core::shape_len(sizes.iter().copied());

    let uncovered = |choice: &[usize]| -> Option<Vec<usize>> {
        (0..cells).map(|c| crate::box_core::decode_vec(&sizes, c)).find(|cell| {
            !(0..message_alphabet).any(|m| {
                reqs.iter()
                    .zip(choice)
                    .filter(|((rm, _, _), _)| *rm == m)
                    .all(|((_, v, _), g)| cell[vars.iter().position(|x| x == v).unwrap()] == *g)
            })
        })
    };
    let fmt_choice = |choice: &[usize]| {
        reqs.iter()
            .zip(choice)
            .map(|((m, v, _), g)| format!("m{m}:{}={g}", independents[*v].0))
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut choice: Vec<usize> = reqs.iter().map(|r| r.2[0]).collect();
    let mut pos = vec![0usize; reqs.len()];
    let mut first_gap: Option<(Vec<usize>, Vec<usize>)> = None;
    loop {
        match uncovered(&choice) {
            None => {
                return Ok(ProbeReport::new("guessing-feasibility", Status::Pass)
                    .detail("feasible", true)
                    .detail("guesses", fmt_choice(&choice)));
            }
            Some(cell) => {
                if first_gap.is_none() {
                    first_gap = Some((choice.clone(), cell));
                }
            }
        }
        // Odometer over the allowed guesses.
        let mut j = 0;
        loop {
            if j == reqs.len() {
                let (ch, cell) = first_gap.expect("at least one choice tried");
                let witness = vars
                    .iter()
                    .zip(&cell)
                    .map(|(&v, x)| format!("{}={x}", independents[v].0))
                    .collect::<Vec<_>>()
                    .join(",");
                return Ok(ProbeReport::new("guessing-feasibility", Status::Pass)
                    .with_witness(format!("P({witness})=0"))
                    .detail("feasible", false)
                    .detail("guesses", fmt_choice(&ch)));
            }
            pos[j] += 1;
            if pos[j] < reqs[j].2.len() {
                choice[j] = reqs[j].2[pos[j]];
                break;
            }
            pos[j] = 0;
            choice[j] = reqs[j].2[0];
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_inputs_one_box_wins() {
        let r = search_rac_with_rbs(2, 1, None, Execution::default()).unwrap();
        assert_eq!(r.max_win_probability, Rational::one());
        assert!(r.seeded && r.complete);
    }

    #[test]
    fn three_inputs_two_boxes_win() {
        let r = search_rac_with_rbs(3, 2, None, Execution::default()).unwrap();
        assert_eq!(r.max_win_probability, Rational::one());
        let w = r.witness.unwrap();
        assert_eq!(evaluate_strategy_file(&w.to_file()).unwrap(), Rational::one());
    }

    #[test]
    fn unseeded_two_input_search_still_finds_the_optimum() {
        let r = search(SearchConfig {
            family: MessageFamily::Relay,
            ..SearchConfig::new(2, 1)
        })
        .unwrap();
        assert_eq!(r.max_win_probability, Rational::one());
        assert!(!r.seeded);
    }

    #[test]
    fn mask_and_table_evaluations_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, k) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
            for _ in 0..20 {
                let rb_tables = (0..k)
                    .map(|i| {
                        let m = (1u64 << (1usize << (n + i))) - 1;
                        [rng.gen::<u64>() & m, rng.gen::<u64>() & m]
                    })
                    .collect();
                let points = 1usize << (n + k);
                let s = RacStrategy {
                    n,
                    k,
                    rb_tables,
                    message: rng.gen::<u64>() & ((1u64 << points) - 1),
                };
                let file = s.to_file();
                assert_eq!(evaluate_strategy_file(&file).unwrap(), s.win_probability());
                assert_eq!(RacStrategy::from_file(&file).unwrap(), s);
            }
        }
    }

    #[test]
    fn symmetry_reduction_is_sound_on_samples() {
        // For sampled first-box tables, the best message value equals the
        // value at the tables' canonical representative.
        let sp = Space::new(3, 1);
        let reps = canonical_pairs(3);
        let best_for = |pair: [u64; 2]| {
            let q = sp.queries(&[pair]);
            (0..1u64 << 15).map(|t| sp.win_count(&q, t << 1)).max().unwrap()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rep_best: Vec<u64> = reps.iter().map(|&(a, b)| best_for([a, b])).collect();
        let rep_max = *rep_best.iter().max().unwrap();
        for _ in 0..40 {
            let pair = [rng.gen_range(0..256u64), rng.gen_range(0..256u64)];
            let v = best_for(pair);
            assert!(v <= rep_max);
            assert!(rep_best.contains(&v), "value {v} of {pair:?} not realised by any representative");
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let cfg = |exec| SearchConfig {
            family: MessageFamily::Fixed,
            exec,
            ..SearchConfig::new(3, 1)
        };
        let a = search(cfg(Execution::Sequential)).unwrap();
        let b = search(cfg(Execution::Parallel)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budget_marks_incomplete() {
        let r = search_rac_with_rbs(4, 1, Some(Duration::from_millis(50)), Execution::default()).unwrap();
        assert!(!r.complete);
        assert_eq!(r.to_report().status, Status::Incomplete);
    }

    #[test]
    fn rejects_oversized_instances() {
        assert!(search_rac_with_rbs(5, 2, None, Execution::default()).is_err());
        assert!(search_rac_with_rbs(1, 1, None, Execution::default()).is_err());
    }

    #[test]
    fn observation2_small() {
        let r = verify_observation2(2).unwrap();
        assert!(r.passed());
        assert_eq!(r.get("relay_max"), Some("1/1"));
        assert_eq!(r.get("fixed_message_max"), Some("3/4"));
    }

    fn bit_vars() -> Vec<(String, usize)> {
        vec![("at0".into(), 2), ("at1".into(), 2)]
    }

    #[test]
    fn feasibility_bit_cases() {
        let c = [GuessConstraint::new(0, "at0", Some(0)), GuessConstraint::new(1, "at1", Some(0))];
        let r = guessing_feasibility(2, &c, &bit_vars()).unwrap();
        assert_eq!(r.get("feasible"), Some("false"));
        assert_eq!(r.witness.as_deref(), Some("P(at0=1,at1=1)=0"));
        let c = [GuessConstraint::new(0, "at0", None), GuessConstraint::new(1, "at0", None)];
        let r = guessing_feasibility(2, &c, &bit_vars()).unwrap();
        assert_eq!(r.get("feasible"), Some("true"));
    }

    #[test]
    fn feasibility_trit_cases() {
        let vars = vec![("A".to_string(), 3), ("x1".to_string(), 3)];
        let c = [
            GuessConstraint::new(0, "A", Some(0)),
            GuessConstraint::new(1, "A", Some(1)),
            GuessConstraint::new(2, "x1", Some(0)),
        ];
        let r = guessing_feasibility(3, &c, &vars).unwrap();
        assert_eq!(r.witness.as_deref(), Some("P(A=2,x1=1)=0"));
        let mut feasible = Vec::new();
        for case in 0..8u32 {
            let c: Vec<GuessConstraint> = (0..3)
                .map(|m| GuessConstraint::new(m, if case >> m & 1 == 1 { "x1" } else { "A" }, None))
                .collect();
            if guessing_feasibility(3, &c, &vars).unwrap().get("feasible") == Some("true") {
                feasible.push(case);
            }
        }
        assert_eq!(feasible, vec![0, 7]);
    }

    #[test]
    fn feasibility_rejects_bad_declarations() {
        let vars = bit_vars();
        assert!(guessing_feasibility(2, &[GuessConstraint::new(2, "at0", None)], &vars).is_err());
        assert!(guessing_feasibility(2, &[GuessConstraint::new(0, "zz", None)], &vars).is_err());
        assert!(guessing_feasibility(2, &[GuessConstraint::new(0, "at0", Some(2))], &vars).is_err());
        let clash = [GuessConstraint::new(0, "at0", Some(0)), GuessConstraint::new(0, "at0", Some(1))];
        assert!(guessing_feasibility(2, &clash, &vars).is_err());
    }

    proptest! {
        #[test]
        fn feasibility_is_monotone(
            base in proptest::collection::vec((0usize..3, 0usize..3, proptest::option::of(0usize..3)), 0..4),
            extra in (0usize..3, 0usize..3, proptest::option::of(0usize..3)),
        ) {
            let vars: Vec<(String, usize)> = ["u", "v", "w"].iter().map(|n| (n.to_string(), 3)).collect();
            let mk = |(m, v, g): (usize, usize, Option<usize>)| GuessConstraint::new(m, vars[v].0.clone(), g);
            let before: Vec<GuessConstraint> = base.iter().copied().map(mk).collect();
            let mut after = before.clone();
            after.push(mk(extra));
            let feasible = |c: &[GuessConstraint]| match guessing_feasibility(3, c, &vars) {
                Ok(r) => Some(r.get("feasible") == Some("true")),
                Err(_) => None,
            };
            if let (Some(false), Some(a)) = (feasible(&before), feasible(&after)) {
                prop_assert!(!a);
            }
        }
    }
}
