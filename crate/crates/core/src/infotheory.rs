//! Shannon quantities over exact joint distributions and the capacity-bound
//! checks for explicit strategies.
//!
//! Probabilities stay exact; logarithms are taken in `f64`. Inequalities are
//! accepted with a slack of [`SLACK`].

use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use crate::box_core::{
    decode_vec, make_bnd_box, make_rb, shape_len, BipartiteBox, BoxError, JointDistribution,
    RbVariant, Sign, Variable,
};
use crate::rational::{ratio, to_f64, Rational};
use crate::report::{ProbeReport, Quantity, Status};
use crate::tables::{FunctionTable, StrategyFile, TableError};

pub const SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InfoError {
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("empty variable group")]
    EmptyGroup,
    #[error("variable `{0}` appears in more than one group")]
    Overlap(String),
    #[error("log base must be >= 2, got {0}")]
    BadBase(u32),
    #[error("choice variable has {choices} values but {keys} key variables were given")]
    IndexMismatch { choices: usize, keys: usize },
    #[error("unknown builtin strategy `{0}`")]
    UnknownStrategy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Entropy,
    ConditionalEntropy,
    MutualInformation,
    ConditionalMutualInformation,
    MultiInformation,
}

/// A declarative information query. For `MultiInformation` the last target
/// group plays the role of `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoQuery {
    pub measure: Measure,
    pub targets: Vec<Vec<String>>,
    pub conditioning: Vec<String>,
    pub log_base: u32,
}

impl InfoQuery {
    pub fn evaluate(&self, dist: &JointDistribution) -> Result<f64, InfoError> {
        let groups: Vec<Vec<&str>> = self
            .targets
            .iter()
            .map(|g| g.iter().map(String::as_str).collect())
            .collect();
        let given: Vec<&str> = self.conditioning.iter().map(String::as_str).collect();
        let b = self.log_base;
        let arity = |k: usize| {
            if groups.len() == k {
                Ok(())
            } else {
                Err(InfoError::EmptyGroup)
            }
        };
        match self.measure {
            Measure::Entropy => {
                arity(1)?;
                entropy(dist, &groups[0], b)
            }
            Measure::ConditionalEntropy => {
                arity(1)?;
                conditional_entropy(dist, &groups[0], &given, b)
            }
            Measure::MutualInformation | Measure::ConditionalMutualInformation => {
                arity(2)?;
                mutual_information(dist, &groups[0], &groups[1], &given, b)
            }
            Measure::MultiInformation => {
                let (target, rest) = groups.split_last().ok_or(InfoError::EmptyGroup)?;
                let rest: Vec<&[&str]> = rest.iter().map(Vec::as_slice).collect();
                multi_information(dist, &rest, target, &given, b)
            }
        }
    }
}

fn check_base(base: u32) -> Result<f64, InfoError> {
    if base < 2 {
        return Err(InfoError::BadBase(base));
    }
    Ok((base as f64).ln())
}

/// Entropy (natural log) of the marginal on `idx`.
fn h_nats(dist: &JointDistribution, idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    dist.marginalize_indices(idx)
        .probabilities()
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| {
            let p = to_f64(p);
            -p * p.ln()
        })
        .sum()
}

fn resolve(dist: &JointDistribution, groups: &[&[&str]]) -> Result<Vec<Vec<usize>>, InfoError> {
    let mut seen = BTreeSet::new();
    groups
        .iter()
        .map(|g| {
            g.iter()
                .map(|name| {
                    let i = dist.index_of(name)?;
                    if !seen.insert(i) {
                        return Err(InfoError::Overlap(name.to_string()));
                    }
                    Ok(i)
                })
                .collect()
        })
        .collect()
}

fn union(parts: &[&[usize]]) -> Vec<usize> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

pub fn entropy(dist: &JointDistribution, vars: &[&str], base: u32) -> Result<f64, InfoError> {
    let ln_b = check_base(base)?;
    if vars.is_empty() {
        return Err(InfoError::EmptyGroup);
    }
    let idx = resolve(dist, &[vars])?;
    Ok(h_nats(dist, &idx[0]) / ln_b)
}

pub fn conditional_entropy(dist: &JointDistribution, vars: &[&str], given: &[&str], base: u32) -> Result<f64, InfoError> {
    let ln_b = check_base(base)?;
    if vars.is_empty() {
        return Err(InfoError::EmptyGroup);
    }
    let idx = resolve(dist, &[vars, given])?;
    Ok((h_nats(dist, &union(&[&idx[0], &idx[1]])) - h_nats(dist, &idx[1])) / ln_b)
}

/// `I(A : B | C) = H(AC) + H(BC) - H(ABC) - H(C)`.
pub fn mutual_information(
    dist: &JointDistribution,
    a: &[&str],
    b: &[&str],
    given: &[&str],
    base: u32,
) -> Result<f64, InfoError> {
    let ln_b = check_base(base)?;
    if a.is_empty() || b.is_empty() {
        return Err(InfoError::EmptyGroup);
    }
    let idx = resolve(dist, &[a, b, given])?;
    let (ia, ib, ic) = (&idx[0], &idx[1], &idx[2]);
    let v = h_nats(dist, &union(&[ia, ic])) + h_nats(dist, &union(&[ib, ic]))
        - h_nats(dist, &union(&[ia, ib, ic]))
        - h_nats(dist, ic);
    Ok(v / ln_b)
}

/// `I(S_1 : … : S_n : T | V) = Σ H(S_i|V) + H(T|V) - H(S_1 … S_n T | V)`.
pub fn multi_information(
    dist: &JointDistribution,
    groups: &[&[&str]],
    target: &[&str],
    given: &[&str],
    base: u32,
) -> Result<f64, InfoError> {
    let ln_b = check_base(base)?;
    if groups.is_empty() || target.is_empty() || groups.iter().any(|g| g.is_empty()) {
        return Err(InfoError::EmptyGroup);
    }
    let mut all: Vec<&[&str]> = groups.to_vec();
    all.push(target);
    all.push(given);
    let idx = resolve(dist, &all)?;
    let (v, parts) = idx.split_last().expect("given group present");
    let h_v = h_nats(dist, v);
    let cond = |g: &[usize]| h_nats(dist, &union(&[g, v])) - h_v;
    let singles: f64 = parts.iter().map(|g| cond(g)).sum();
    let refs: Vec<&[usize]> = parts.iter().map(Vec::as_slice).collect();
    let joint = cond(&union(&refs));
    Ok((singles - joint) / ln_b)
}

/// `Σ_i I(S_i : T | V) ≤ I(S_1 : … : S_n : T | V)`, both sides in bits.
pub fn check_lemma4(
    dist: &JointDistribution,
    groups: &[&[&str]],
    target: &[&str],
    given: &[&str],
) -> Result<ProbeReport, InfoError> {
    let lhs: f64 = groups
        .iter()
        .map(|g| mutual_information(dist, g, target, given, 2))
        .sum::<Result<f64, _>>()?;
    let rhs = multi_information(dist, groups, target, given, 2)?;
    let status = if lhs <= rhs + SLACK { Status::Pass } else { Status::Fail };
    Ok(ProbeReport::new("lemma4", status)
        .with_quantity(Quantity::Real(lhs))
        .with_bound(Quantity::Real(rhs)))
}

/// `Σ_i I(a_i : E | e = i)`; a measurement only.
pub fn information_causality_lhs(
    dist: &JointDistribution,
    key_vars: &[&str],
    eavesdrop: &str,
    choice: &str,
    base: u32,
) -> Result<f64, InfoError> {
    let choices = dist.variables()[dist.index_of(choice)?].size();
    if choices != key_vars.len() {
        return Err(InfoError::IndexMismatch {
            choices,
            keys: key_vars.len(),
        });
    }
    key_vars
        .iter()
        .enumerate()
        .map(|(i, key)| {
            let c = dist.condition(&[(choice, i)])?;
            mutual_information(&c, &[key], &[eavesdrop], &[], base)
        })
        .sum()
}

/// A deterministic strategy for turning one RAC box, one message symbol and
/// one shared random symbol `s` into a `B_n^d(+)` box plus a channel for
/// `z`. Bob's shared symbol is `-s`.
///
/// Tables: `alice_rb` (x…, z, s → a0…), `message` (x…, z, s, A → m),
/// `alice_out` (x…, z, s, A → X), `bob_rb` (y, s, m → Ap, b) and `bob_out`
/// (y, s, m, B → Y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityStrategy {
    n: usize,
    d: usize,
    alice_rb: FunctionTable,
    message: FunctionTable,
    alice_out: FunctionTable,
    bob_rb: FunctionTable,
    bob_out: FunctionTable,
}

pub const BUILTIN_STRATEGIES: [&str; 3] = ["protocol", "send-x1", "ignore-rb"];

fn names(prefix: &str, range: std::ops::Range<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

impl CapacityStrategy {
    fn alice_vars(n: usize, d: usize) -> Vec<Variable> {
        names("x", 1..n)
            .into_iter()
            .chain(["z".to_string(), "s".to_string()])
            .map(|v| Variable::new(v, d))
            .collect()
    }

    fn with_a(n: usize, d: usize) -> Vec<Variable> {
        let mut v = Self::alice_vars(n, d);
        v.push(Variable::new("A", d));
        v
    }

    fn bob_vars(n: usize, d: usize) -> Vec<Variable> {
        vec![Variable::new("y", n), Variable::new("s", d), Variable::new("m", d)]
    }

    /// Builds the tables from closures over `(x_1..x_{n-1}, z, s[, A])` and
    /// `(y, s_bob, m[, B])`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fns(
        n: usize,
        d: usize,
        alice_rb: impl Fn(&[usize], usize, usize) -> Vec<usize>,
        message: impl Fn(&[usize], usize, usize, usize) -> usize,
        alice_out: impl Fn(&[usize], usize, usize, usize) -> usize,
        bob_rb: impl Fn(usize, usize, usize) -> (usize, usize),
        bob_out: impl Fn(usize, usize, usize, usize) -> usize,
    ) -> Self {
        let k = n - 1;
        let neg = move |s: usize| (d - s) % d;
        CapacityStrategy {
            n,
            d,
            alice_rb: FunctionTable::from_fn(
                "alice_rb",
                Self::alice_vars(n, d),
                names("a", 0..n).into_iter().map(|v| Variable::new(v, d)).collect(),
                |v| alice_rb(&v[..k], v[k], v[k + 1]),
            ),
            message: FunctionTable::from_fn("message", Self::with_a(n, d), vec![Variable::new("m", d)], |v| {
                vec![message(&v[..k], v[k], v[k + 1], v[k + 2])]
            }),
            alice_out: FunctionTable::from_fn("alice_out", Self::with_a(n, d), vec![Variable::new("X", d)], |v| {
                vec![alice_out(&v[..k], v[k], v[k + 1], v[k + 2])]
            }),
            bob_rb: FunctionTable::from_fn(
                "bob_rb",
                Self::bob_vars(n, d),
                vec![Variable::new("Ap", d), Variable::new("b", n)],
                |v| {
                    let (ap, b) = bob_rb(v[0], neg(v[1]), v[2]);
                    vec![ap, b]
                },
            ),
            bob_out: FunctionTable::from_fn(
                "bob_out",
                {
                    let mut v = Self::bob_vars(n, d);
                    v.push(Variable::new("B", d));
                    v
                },
                vec![Variable::new("Y", d)],
                |v| vec![bob_out(v[0], neg(v[1]), v[2], v[3])],
            ),
        }
    }

    /// `protocol`: the relay protocol (`a_0 = z`, `m = A`, `A' = m`);
    /// `send-x1`: the message carries `x_1`, every RB input is `z`;
    /// `ignore-rb`: constant message, box unused.
    pub fn builtin(name: &str, n: usize, d: usize) -> Result<Self, InfoError> {
        if n < 2 || d < 2 {
            return Err(BoxError::InvalidParameter("need n >= 2 and d >= 2".into()).into());
        }
        Ok(match name {
            "protocol" => Self::from_fns(
                n,
                d,
                |x, z, _| std::iter::once(z).chain(x.iter().copied()).collect(),
                |_, _, _, a| a,
                |_, _, s, _| s,
                |y, _, m| (m, y),
                move |y, sb, _, b| if y == 0 { sb } else { (sb + b) % d },
            ),
            "send-x1" => Self::from_fns(
                n,
                d,
                move |_, z, _| vec![z; n],
                |x, _, _, _| x[0],
                |_, _, s, _| s,
                |_, _, _| (0, 0),
                move |y, sb, m, _| if y == 0 { sb } else { (sb + m) % d },
            ),
            "ignore-rb" => Self::from_fns(
                n,
                d,
                move |_, _, _| vec![0; n],
                |_, _, _, _| 0,
                |_, _, s, _| s,
                |_, _, _| (0, 0),
                |_, sb, _, _| sb,
            ),
            other => return Err(InfoError::UnknownStrategy(other.to_string())),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn to_file(&self) -> StrategyFile {
        let mut f = StrategyFile::new("capacity");
        f.params.push(("n".into(), self.n.to_string()));
        f.params.push(("d".into(), self.d.to_string()));
        f.tables = vec![
            self.alice_rb.clone(),
            self.message.clone(),
            self.alice_out.clone(),
            self.bob_rb.clone(),
            self.bob_out.clone(),
        ];
        f
    }

    pub fn from_file(file: &StrategyFile) -> Result<Self, InfoError> {
        if file.kind != "capacity" {
            return Err(TableError::Param("strategy kind must be `capacity`".into()).into());
        }
        let n = file.param_usize("n")?;
        let d = file.param_usize("d")?;
        if n < 2 || d < 2 {
            return Err(TableError::Param("n and d must be >= 2".into()).into());
        }
        let xs = names("x", 1..n);
        let mut alice: Vec<(&str, usize)> = xs.iter().map(|x| (x.as_str(), d)).collect();
        alice.extend([("z", d), ("s", d)]);
        let mut with_a = alice.clone();
        with_a.push(("A", d));
        let a_names = names("a", 0..n);
        let a_out: Vec<(&str, usize)> = a_names.iter().map(|a| (a.as_str(), d)).collect();
        let bob = [("y", n), ("s", d), ("m", d)];
        let bob_b = [("y", n), ("s", d), ("m", d), ("B", d)];

        let get = |name: &str, ins: &[(&str, usize)], outs: &[(&str, usize)]| -> Result<FunctionTable, InfoError> {
            let t = file.table(name)?;
            t.expect_shape(ins, outs)?;
            Ok(t.clone())
        };
        Ok(CapacityStrategy {
            n,
            d,
            alice_rb: get("alice_rb", &alice, &a_out)?,
            message: get("message", &with_a, &[("m", d)])?,
            alice_out: get("alice_out", &with_a, &[("X", d)])?,
            bob_rb: get("bob_rb", &bob, &[("Ap", d), ("b", n)])?,
            bob_out: get("bob_out", &bob_b, &[("Y", d)])?,
        })
    }

    /// Runs the strategy against `rb` under uniform independent
    /// `x_1..x_{n-1}, z, y, s`. Returns the joint distribution over
    /// `x…, z, y, s, m, b, A, B, X, Y` and whether the induced `(X, Y | x, y)`
    /// box equals `B_n^d(+)` for every `z`.
    pub fn run(&self, rb: &BipartiteBox) -> Result<(JointDistribution, bool), InfoError> {
        let (n, d) = (self.n, self.d);
        let k = n - 1;
        let mut vars: Vec<Variable> = names("x", 1..n).into_iter().map(|v| Variable::new(v, d)).collect();
        vars.extend([
            Variable::new("z", d),
            Variable::new("y", n),
            Variable::new("s", d),
            Variable::new("m", d),
            Variable::new("b", n),
            Variable::new("A", d),
            Variable::new("B", d),
            Variable::new("X", d),
            Variable::new("Y", d),
        ]);
        let target = make_bnd_box(n, d, Sign::Plus)?;
        let x_sizes = vec![d; k];
        let n_x = shape_len(x_sizes.iter().copied());
        let w_inputs = ratio(1, (n_x * d * n * d) as i64);
        let p_s = ratio(1, d as i64);
        let mut items = Vec::new();
        let mut premise = true;
        for xi in 0..n_x {
            let x = decode_vec(&x_sizes, xi);
            for z in 0..d {
                for y in 0..n {
                    let mut induced = vec![Rational::zero(); d * d];
                    for s in 0..d {
                        let mut alice_in = x.clone();
                        alice_in.extend([z, s]);
                        let a_in = self.alice_rb.eval(&alice_in).to_vec();
                        let alice_m = rb.alice_marginal(&a_in, &[0, 0]);
                        for big_a in (0..d).filter(|&a| !alice_m[a].is_zero()) {
                            let mut with_a = alice_in.clone();
                            with_a.push(big_a);
                            let m = self.message.eval(&with_a)[0];
                            let big_x = self.alice_out.eval(&with_a)[0];
                            let bob_rb = self.bob_rb.eval(&[y, s, m]);
                            let (ap, b) = (bob_rb[0], bob_rb[1]);
                            let cond = rb
                                .bob_conditional(&a_in, &[ap, b], big_a)
                                .expect("positive Alice marginal");
                            for (big_b, pb) in cond.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
                                let big_y = self.bob_out.eval(&[y, s, m, big_b])[0];
                                let p = alice_m[big_a] * pb;
                                induced[big_x * d + big_y] += p * p_s;
                                let mut row = x.clone();
                                row.extend([z, y, s, m, b, big_a, big_b, big_x, big_y]);
                                items.push((row, p * w_inputs));
                            }
                        }
                    }
                    if induced.as_slice() != target.row(&x, &[y]) {
                        premise = false;
                    }
                }
            }
        }
        Ok((JointDistribution::from_weighted(vars, items)?, premise))
    }
}

fn verify_capacity_bound(
    probe: &str,
    n: usize,
    d: usize,
    strategy: &CapacityStrategy,
    rb: &BipartiteBox,
) -> Result<ProbeReport, InfoError> {
    if strategy.n != n || strategy.d != d {
        return Err(TableError::Param(format!(
            "strategy is for (n, d) = ({}, {}), not ({n}, {d})",
            strategy.n, strategy.d
        ))
        .into());
    }
    let (joint, premise) = strategy.run(rb)?;
    let bound = ratio(1, n as i64);
    let base = d as u32;
    let mut report = ProbeReport::new(probe, Status::PremiseUnmet)
        .with_bound(Quantity::Exact(bound))
        .detail("n", n)
        .detail("d", d)
        .detail("premise", if premise { "met" } else { "unmet" });
    if !premise {
        return Ok(report);
    }
    let view = ["B", "b", "y", "s", "m"];
    let mi = mutual_information(&joint, &["z"], &view, &[], base)?;
    let mi_no_m = mutual_information(&joint, &["z"], &["B", "b", "y", "s"], &[], base)?;
    let chain = mutual_information(&joint, &["z"], &["y", "b", "s"], &[], base)?
        + mutual_information(&joint, &["z"], &["B"], &["b", "y", "s"], base)?;
    let y0 = joint.condition(&[("y", 0)])?;
    let lemma3_gap = conditional_entropy(&y0, &["X"], &["b", "s"], base)?
        - mutual_information(&y0, &["B"], &["X"], &["b", "s"], base)?;
    report.status = if mi <= to_f64(&bound) + SLACK {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(report
        .with_quantity(Quantity::Real(mi))
        .detail("mi_without_message", format!("{mi_no_m:.12}"))
        .detail("chain_rule_gap", format!("{:.3e}", (mi_no_m - chain).abs()))
        .detail("lemma3_gap", format!("{:.3e}", lemma3_gap)))
}

/// Bits: the strategy runs against the signaling RAC box; the channel is
/// `z → (B, b, y, s, m)` and the bound is `1/n` bit.
pub fn verify_capacity_bound_bits(n: usize, strategy: &CapacityStrategy) -> Result<ProbeReport, InfoError> {
    let rb = make_rb(n, 2, RbVariant::SignalingHalf)?;
    verify_capacity_bound("capacity-bits", n, 2, strategy, &rb)
}

/// Dits: as the bit case against the three-valued RAC box, bound `1/n` dit.
pub fn verify_capacity_bound_dits(n: usize, d: usize, strategy: &CapacityStrategy) -> Result<ProbeReport, InfoError> {
    let rb = make_rb(n, d, RbVariant::Three)?;
    verify_capacity_bound("capacity-dits", n, d, strategy, &rb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::resource_inequality_sim;
    use crate::rational::int;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::new(*n, 2)).collect()
    }

    fn random_dist(rng: &mut ChaCha8Rng, vars: Vec<Variable>) -> JointDistribution {
        let cells = shape_len(vars.iter().map(Variable::size));
        // Sparse-ish integer weights so that zero cells are exercised.
        let w: Vec<i64> = (0..cells)
            .map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..20) })
            .collect();
        let total: i64 = w.iter().sum::<i64>().max(1);
        let mut probs: Vec<Rational> = w.iter().map(|&x| ratio(x, total)).collect();
        if w.iter().all(|&x| x == 0) {
            probs[0] = int(1);
        }
        JointDistribution::new(vars, probs).unwrap()
    }

    #[test]
    fn basic_entropies() {
        let bit = JointDistribution::uniform(bits(&["u"])).unwrap();
        assert!((entropy(&bit, &["u"], 2).unwrap() - 1.0).abs() < 1e-12);
        let trit = JointDistribution::uniform(vec![Variable::new("t", 3)]).unwrap();
        assert!((entropy(&trit, &["t"], 3).unwrap() - 1.0).abs() < 1e-12);
        assert!(entropy(&bit, &["nope"], 2).is_err());
        assert!(entropy(&bit, &[], 2).is_err());
        assert!(entropy(&bit, &["u"], 1).is_err());
        assert!(mutual_information(&bit, &["u"], &["u"], &[], 2).is_err());
    }

    #[test]
    fn erasure_channel_mutual_information() {
        let (run, _) = resource_inequality_sim(2, 2, RbVariant::NoSignaling).unwrap();
        let joint = run.result.to_joint(&Default::default()).unwrap();
        let mi = mutual_information(&joint, &["z"], &["Z"], &[], 2).unwrap();
        assert!((mi - 0.5).abs() < 1e-12, "{mi}");
        let (run, _) = resource_inequality_sim(3, 3, RbVariant::Three).unwrap();
        let joint = run.result.to_joint(&Default::default()).unwrap();
        let mi = mutual_information(&joint, &["z"], &["Z"], &[], 3).unwrap();
        assert!((mi - 1.0 / 3.0).abs() < 1e-12, "{mi}");
    }

    #[test]
    fn lemma4_examples() {
        let indep = JointDistribution::uniform(bits(&["s1", "s2", "t"])).unwrap();
        let r = check_lemma4(&indep, &[&["s1"], &["s2"]], &["t"], &[]).unwrap();
        assert!(r.passed());
        assert!(r.quantity.as_ref().unwrap().to_f64().abs() < 1e-12);

        let copies = JointDistribution::from_weighted(
            bits(&["s1", "s2", "t"]),
            [(vec![0, 0, 0], ratio(1, 2)), (vec![1, 1, 1], ratio(1, 2))],
        )
        .unwrap();
        let r = check_lemma4(&copies, &[&["s1"], &["s2"]], &["t"], &[]).unwrap();
        assert!(r.passed());
        assert!((r.quantity.as_ref().unwrap().to_f64() - 2.0).abs() < 1e-12);
        assert!((r.bound.as_ref().unwrap().to_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lemma4_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let names = ["v0", "v1", "v2", "v3", "v4"];
        for case in 0..1000 {
            let k = rng.gen_range(3..=5);
            let dist = random_dist(&mut rng, bits(&names[..k]));
            let (given, rest): (&[&str], &[&str]) = if k == 5 && case % 2 == 0 {
                (&names[4..5], &names[..4])
            } else {
                (&[], &names[..k])
            };
            let (target, sources) = rest.split_last().unwrap();
            let groups: Vec<&[&str]> = sources.iter().map(std::slice::from_ref).collect();
            let r = check_lemma4(&dist, &groups, &[target], given).unwrap();
            assert!(r.passed(), "case {case}: {r}");
        }
    }

    #[test]
    fn shannon_inequalities_on_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let dist = random_dist(&mut rng, bits(&["a", "b", "c", "u"]));
            assert!(entropy(&dist, &["a", "b"], 2).unwrap() >= -SLACK);
            let h = entropy(&dist, &["a"], 2).unwrap();
            assert!(conditional_entropy(&dist, &["a"], &["b"], 2).unwrap() <= h + SLACK);
            // Strong subadditivity, H(S_i S_j T) + H(T) <= H(S_i T) + H(S_j T).
            let hh = |v: &[&str]| entropy(&dist, v, 2).unwrap();
            assert!(hh(&["a", "b", "c"]) + hh(&["c"]) <= hh(&["a", "c"]) + hh(&["b", "c"]) + SLACK);
            // Chain rule.
            let lhs = mutual_information(&dist, &["a"], &["b", "c"], &[], 2).unwrap();
            let rhs = mutual_information(&dist, &["a"], &["b"], &[], 2).unwrap()
                + mutual_information(&dist, &["a"], &["c"], &["b"], 2).unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn base_conversion(weights in proptest::collection::vec(0i64..50, 9)) {
            prop_assume!(weights.iter().any(|w| *w > 0));
            let total: i64 = weights.iter().sum();
            let dist = JointDistribution::new(
                vec![Variable::new("u", 3), Variable::new("v", 3)],
                weights.iter().map(|&w| ratio(w, total)).collect(),
            ).unwrap();
            for d in [3u32, 5, 7] {
                let hd = entropy(&dist, &["u", "v"], d).unwrap();
                let h2 = entropy(&dist, &["u", "v"], 2).unwrap();
                prop_assert!((hd - h2 / (d as f64).log2()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn information_causality_examples() {
        // a0 a1 uniform, e uniform; E chosen per case.
        let base = JointDistribution::uniform(bits(&["a0", "a1", "e"])).unwrap();
        let indep = base.with_derived(Variable::new("E", 2), |_| 0).unwrap();
        assert!(information_causality_lhs(&indep, &["a0", "a1"], "E", "e", 2).unwrap().abs() < 1e-12);
        let perfect = base.with_derived(Variable::new("E", 2), |v| v[v[2]]).unwrap();
        let v = information_causality_lhs(&perfect, &["a0", "a1"], "E", "e", 2).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let erased = JointDistribution::uniform(bits(&["a0", "a1", "e", "f"]))
            .unwrap()
            .with_derived(Variable::new("E", 3), |v| if v[3] == 1 { 2 } else { v[v[2]] })
            .unwrap();
        let v = information_causality_lhs(&erased, &["a0", "a1"], "E", "e", 2).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(matches!(
            information_causality_lhs(&perfect, &["a0"], "E", "e", 2),
            Err(InfoError::IndexMismatch { .. })
        ));
    }

    #[test]
    fn capacity_bits_protocol_saturates() {
        for (n, expected) in [(2, 0.5), (3, 1.0 / 3.0)] {
            let s = CapacityStrategy::builtin("protocol", n, 2).unwrap();
            let r = verify_capacity_bound_bits(n, &s).unwrap();
            assert_eq!(r.status, Status::Pass, "{r}");
            assert!((r.quantity.as_ref().unwrap().to_f64() - expected).abs() < 1e-9);
            assert_eq!(r.get("premise"), Some("met"));
            assert!(r.get("chain_rule_gap").unwrap().parse::<f64>().unwrap() < 1e-9);
            assert!(r.get("lemma3_gap").unwrap().parse::<f64>().unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn capacity_ignoring_the_box_misses_premise() {
        for n in [2, 3] {
            let s = CapacityStrategy::builtin("ignore-rb", n, 2).unwrap();
            assert_eq!(verify_capacity_bound_bits(n, &s).unwrap().status, Status::PremiseUnmet);
        }
    }

    #[test]
    fn capacity_dits() {
        let s = CapacityStrategy::builtin("protocol", 2, 3).unwrap();
        let r = verify_capacity_bound_dits(2, 3, &s).unwrap();
        assert_eq!(r.status, Status::Pass, "{r}");
        assert!((r.quantity.as_ref().unwrap().to_f64() - 0.5).abs() < 1e-9);

        // Sending x_1 instead of A: the box is reproduced, and the RB on its
        // own carries nothing about z.
        let s = CapacityStrategy::builtin("send-x1", 2, 3).unwrap();
        let r = verify_capacity_bound_dits(2, 3, &s).unwrap();
        assert_eq!(r.status, Status::Pass, "{r}");
        assert!(r.quantity.as_ref().unwrap().to_f64().abs() < 1e-12);

        let s = CapacityStrategy::builtin("protocol", 3, 3).unwrap();
        let r = verify_capacity_bound_dits(3, 3, &s).unwrap();
        assert_eq!(r.status, Status::Pass, "{r}");
        assert!((r.quantity.as_ref().unwrap().to_f64() - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn send_x1_with_signaling_bits_leaks_but_stays_bounded() {
        let s = CapacityStrategy::builtin("send-x1", 2, 2).unwrap();
        let r = verify_capacity_bound_bits(2, &s).unwrap();
        assert_eq!(r.status, Status::Pass);
        // B agrees with z with probability 3/4: 1 - h(3/4).
        let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((r.quantity.as_ref().unwrap().to_f64() - (1.0 - h)).abs() < 1e-12);
    }

    #[test]
    fn strategy_file_round_trip() {
        let s = CapacityStrategy::builtin("protocol", 2, 3).unwrap();
        let text = s.to_file().to_text();
        let back = CapacityStrategy::from_file(&StrategyFile::parse(&text).unwrap()).unwrap();
        assert_eq!(back, s);
        let mut broken = s.to_file();
        broken.tables.remove(1);
        assert!(CapacityStrategy::from_file(&broken).is_err());
        assert!(CapacityStrategy::builtin("nope", 2, 2).is_err());
        assert!(verify_capacity_bound_bits(3, &CapacityStrategy::builtin("protocol", 2, 2).unwrap()).is_err());
    }

    #[test]
    fn info_query_dispatch() {
        let dist = JointDistribution::uniform(bits(&["a", "b"])).unwrap();
        let q = InfoQuery {
            measure: Measure::Entropy,
            targets: vec![vec!["a".into(), "b".into()]],
            conditioning: vec![],
            log_base: 2,
        };
        assert!((q.evaluate(&dist).unwrap() - 2.0).abs() < 1e-12);
        let q = InfoQuery {
            measure: Measure::MultiInformation,
            targets: vec![vec!["a".into()], vec!["b".into()]],
            conditioning: vec![],
            log_base: 2,
        };
        assert!(q.evaluate(&dist).unwrap().abs() < 1e-12);
    }
}
