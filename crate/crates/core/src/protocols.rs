//! One-way protocols over a shared box, executed exactly.
//!
//! A protocol is a resource box plus local processing: Alice maps her task
//! inputs (and a shared random symbol) to box inputs, reads her box output,
//! may send one message, and produces her task outputs; Bob then maps his task
//! inputs and the message to box inputs and produces his task outputs. The
//! engine enumerates every task input, shared symbol and box outcome and
//! returns the induced box on the task interface.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::box_core::{
    decode, decode_vec, make_bn_box, make_bnd_box, make_rb, shape_len, Alphabet, BipartiteBox,
    BoxError, BoxSignature, RbVariant, Sign, SignalingDirection, Variable,
};
use crate::exec::Execution;
use crate::lp::{LinearProgram, LpOutcome, Q};
use crate::rational::{ratio, Rational};
use crate::report::{ProbeReport, Quantity, Status};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error("message wire used more than once in a round")]
    MessageBudgetExceeded,
    #[error("message {value} outside alphabet of size {size}")]
    MessageOutOfRange { value: usize, size: usize },
    #[error("resource box signals from Bob to Alice")]
    ResourceSignals,
    #[error("local map `{0}` produced a malformed assignment")]
    BadLocalMap(&'static str),
}

/// The single Alice→Bob classical wire of a round.
#[derive(Debug)]
pub struct Wire {
    alphabet: usize,
    sent: Option<usize>,
}

impl Wire {
    fn new(alphabet: usize) -> Self {
        Wire {
            alphabet,
            sent: None,
        }
    }

    pub fn send(&mut self, message: usize) -> Result<(), ProtocolError> {
        if self.sent.is_some() {
            return Err(ProtocolError::MessageBudgetExceeded);
        }
        if message >= self.alphabet {
            return Err(ProtocolError::MessageOutOfRange {
                value: message,
                size: self.alphabet,
            });
        }
        self.sent = Some(message);
        Ok(())
    }
}

/// Deterministic local processing for both parties. `shared` is the shared
/// random symbol (always 0 when no shared randomness is used).
pub trait LocalMaps: Sync {
    fn alice_box_inputs(&self, task_in: &[usize], shared: usize) -> Vec<usize>;
    fn alice_outputs(
        &self,
        task_in: &[usize],
        shared: usize,
        box_out: &[usize],
        wire: &mut Wire,
    ) -> Result<Vec<usize>, ProtocolError>;
    fn bob_box_inputs(&self, task_in: &[usize], shared: usize, message: Option<usize>) -> Vec<usize>;
    fn bob_outputs(
        &self,
        task_in: &[usize],
        shared: usize,
        message: Option<usize>,
        box_out: &[usize],
    ) -> Vec<usize>;
}

/// Result of running a protocol: the effective box on the task interface.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub name: String,
    pub resources: Vec<BipartiteBox>,
    pub message_alphabet: Alphabet,
    pub shared_randomness_alphabet: Alphabet,
    pub result: BipartiteBox,
}

impl ProtocolRun {
    /// Win statistics of a RAC-shaped result (Alice inputs `a_i`, Bob input
    /// `b`, Bob output `B`): `(average under uniform inputs, worst case)`.
    pub fn rac_win(&self) -> Option<(Rational, Rational)> {
        rac_win(&self.result)
    }
}

fn check_assignment(values: &[usize], vars: &[Variable], what: &'static str) -> Result<(), ProtocolError> {
    if values.len() != vars.len() || values.iter().zip(vars).any(|(v, var)| *v >= var.size()) {
        return Err(ProtocolError::BadLocalMap(what));
    }
    Ok(())
}

/// Runs a one-way protocol by exact enumeration.
pub fn execute<M: LocalMaps>(
    name: &str,
    task: BoxSignature,
    resource: &BipartiteBox,
    message_alphabet: usize,
    shared_alphabet: usize,
    maps: &M,
    exec: Execution,
) -> Result<ProtocolRun, ProtocolError> {
    if !resource.check_no_signaling(SignalingDirection::BobToAlice) {
        return Err(ProtocolError::ResourceSignals);
    }
    let message_alphabet_t = Alphabet::new(message_alphabet)?;
    let shared_alphabet_t = Alphabet::new(shared_alphabet)?;
    let rsig = resource.signature();
    let r_ao: Vec<usize> = rsig.alice_outputs().iter().map(Variable::size).collect();
    let r_bo: Vec<usize> = rsig.bob_outputs().iter().map(Variable::size).collect();

    let t_ai: Vec<usize> = task.alice_inputs().iter().map(Variable::size).collect();
    let t_bi: Vec<usize> = task.bob_inputs().iter().map(Variable::size).collect();
    let t_ao: Vec<usize> = task.alice_outputs().iter().map(Variable::size).collect();
    let t_bo: Vec<usize> = task.bob_outputs().iter().map(Variable::size).collect();
    let n_bi = shape_len(t_bi.iter().copied());
    let n_bo = shape_len(t_bo.iter().copied());
    let n_out = shape_len(t_ao.iter().copied()) * n_bo;
    let rows = task.input_count();
    let p_shared = ratio(1, shared_alphabet as i64);

    let row = |r: usize| -> Result<Vec<Rational>, ProtocolError> {
        let alice_in = decode_vec(&t_ai, r / n_bi);
        let bob_in = decode_vec(&t_bi, r % n_bi);
        let mut out = vec![Rational::zero(); n_out];
        let mut a_out = vec![0; r_ao.len()];
        let mut b_out = vec![0; r_bo.len()];
        for s in 0..shared_alphabet {
            let a_box_in = maps.alice_box_inputs(&alice_in, s);
            check_assignment(&a_box_in, rsig.alice_inputs(), "alice_box_inputs")?;
            // Bob's box inputs do not affect Alice's marginal (checked above).
            let probe_bob: Vec<usize> = vec![0; rsig.bob_inputs().len()];
            let alice_marginal = resource.alice_marginal(&a_box_in, &probe_bob);
            for (ai, pa) in alice_marginal.iter().enumerate() {
                if pa.is_zero() {
                    continue;
                }
                decode(&r_ao, ai, &mut a_out);
                let mut wire = Wire::new(message_alphabet);
                let alice_task_out = maps.alice_outputs(&alice_in, s, &a_out, &mut wire)?;
                check_assignment(&alice_task_out, task.alice_outputs(), "alice_outputs")?;
                let msg = wire.sent;
                let b_box_in = maps.bob_box_inputs(&bob_in, s, msg);
                check_assignment(&b_box_in, rsig.bob_inputs(), "bob_box_inputs")?;
                let cond = resource
                    .bob_conditional(&a_box_in, &b_box_in, ai)
                    .expect("positive Alice marginal");
                let base = crate::box_core::encode(&t_ao, &alice_task_out) * n_bo;
                for (bi, pb) in cond.iter().enumerate() {
                    if pb.is_zero() {
                        continue;
                    }
                    decode(&r_bo, bi, &mut b_out);
                    let bob_task_out = maps.bob_outputs(&bob_in, s, msg, &b_out);
                    check_assignment(&bob_task_out, task.bob_outputs(), "bob_outputs")?;
                    out[base + crate::box_core::encode(&t_bo, &bob_task_out)] +=
                        p_shared * pa * pb;
                }
            }
        }
        Ok(out)
    };

    let rows_out = exec.map_collect(rows, row);
    let mut table = Vec::with_capacity(rows * n_out);
    for r in rows_out {
        table.extend(r?);
    }
    let result = BipartiteBox::new(task, table)?;
    debug_assert!(result.check_normalization());
    Ok(ProtocolRun {
        name: name.to_string(),
        resources: vec![resource.clone()],
        message_alphabet: message_alphabet_t,
        shared_randomness_alphabet: shared_alphabet_t,
        result,
    })
}

fn rac_signature(n: usize, d: usize) -> BoxSignature {
    BoxSignature::new(
        (0..n).map(|i| Variable::new(format!("a{i}"), d)).collect(),
        vec![],
        vec![Variable::new("b", n)],
        vec![Variable::new("B", d)],
    )
    .expect("fixed names")
}

/// `(average, worst)` probability that `B = a_b` for a RAC-shaped box.
pub fn rac_win(result: &BipartiteBox) -> Option<(Rational, Rational)> {
    let sig = result.signature();
    let n = sig.alice_inputs().len();
    if sig.bob_inputs().len() != 1
        || sig.bob_outputs().len() != 1
        || !sig.alice_outputs().is_empty()
        || sig.bob_inputs()[0].size() != n
    {
        return None;
    }
    let sizes = sig.input_sizes();
    let rows = sig.input_count();
    let mut total = Rational::zero();
    let mut worst = Rational::one();
    for r in 0..rows {
        let inputs = decode_vec(&sizes, r);
        let (a, b) = inputs.split_at(n);
        let p = result.row(a, b)[a[b[0]]];
        total += p;
        if p < worst {
            worst = p;
        }
    }
    Some((total / Rational::from_integer(rows as i64), worst))
}

fn sub(x: usize, y: usize, d: usize) -> usize {
    (x + d - y % d) % d
}

struct RacViaB {
    d: usize,
    sign: Sign,
}

impl LocalMaps for RacViaB {
    fn alice_box_inputs(&self, a: &[usize], _: usize) -> Vec<usize> {
        let d = self.d;
        a[1..]
            .iter()
            .map(|&ai| match self.sign {
                Sign::Plus => sub(ai, a[0], d),
                Sign::Minus => sub(a[0], ai, d),
            })
            .collect()
    }

    fn alice_outputs(&self, a: &[usize], _: usize, x: &[usize], wire: &mut Wire) -> Result<Vec<usize>, ProtocolError> {
        let m = match self.sign {
            Sign::Plus => (x[0] + a[0]) % self.d,
            Sign::Minus => sub(x[0], a[0], self.d),
        };
        wire.send(m)?;
        Ok(vec![])
    }

    fn bob_box_inputs(&self, b: &[usize], _: usize, _: Option<usize>) -> Vec<usize> {
        vec![b[0]]
    }

    fn bob_outputs(&self, _: &[usize], _: usize, m: Option<usize>, y: &[usize]) -> Vec<usize> {
        let m = m.expect("message always sent");
        vec![match self.sign {
            Sign::Plus => (m + y[0]) % self.d,
            Sign::Minus => sub(y[0], m, self.d),
        }]
    }
}

/// Wins the `(n→1)` RAC with a `B_n` box and one bit.
pub fn rac_via_bn_box(n: usize) -> Result<ProtocolRun, ProtocolError> {
    rac_via_bn_box_with(n, &make_bn_box(n)?)
}

/// As [`rac_via_bn_box`] with any resource of the `B_n` shape.
pub fn rac_via_bn_box_with(n: usize, resource: &BipartiteBox) -> Result<ProtocolRun, ProtocolError> {
    execute(
        "rac-via-bn",
        rac_signature(n, 2),
        resource,
        2,
        1,
        &RacViaB { d: 2, sign: Sign::Plus },
        Execution::default(),
    )
}

/// Wins the `(n→1, d)` RAC with a `B_n^d(±)` box and one dit.
pub fn rac_via_bnd_box(n: usize, d: usize, sign: Sign) -> Result<ProtocolRun, ProtocolError> {
    execute(
        match sign {
            Sign::Plus => "rac-via-bnd-plus",
            Sign::Minus => "rac-via-bnd-minus",
        },
        rac_signature(n, d),
        &make_bnd_box(n, d, sign)?,
        d,
        1,
        &RacViaB { d, sign },
        Execution::default(),
    )
}

struct BViaRb {
    d: usize,
    sign: Sign,
}

impl LocalMaps for BViaRb {
    fn alice_box_inputs(&self, x: &[usize], _: usize) -> Vec<usize> {
        std::iter::once(0)
            .chain(x.iter().map(|&xi| match self.sign {
                Sign::Plus => xi,
                Sign::Minus => sub(0, xi, self.d),
            }))
            .collect()
    }

    fn alice_outputs(&self, _: &[usize], _: usize, a: &[usize], _: &mut Wire) -> Result<Vec<usize>, ProtocolError> {
        Ok(vec![a[0]])
    }

    fn bob_box_inputs(&self, y: &[usize], _: usize, _: Option<usize>) -> Vec<usize> {
        vec![0, y[0]]
    }

    fn bob_outputs(&self, _: &[usize], _: usize, _: Option<usize>, b: &[usize]) -> Vec<usize> {
        vec![b[0]]
    }
}

/// Simulates the `B_n` box with a no-signaling `(n→1)` RAC box and no
/// communication.
pub fn bn_box_via_rb(n: usize) -> Result<ProtocolRun, ProtocolError> {
    bn_box_via_rb_with(n, 2, Sign::Plus, &make_rb(n, 2, RbVariant::NoSignaling)?)
}

/// Simulates `B_n^d(±)` from the matching RAC box variant.
pub fn bnd_box_via_rb(n: usize, d: usize, sign: Sign) -> Result<ProtocolRun, ProtocolError> {
    let variant = match sign {
        Sign::Plus => RbVariant::Plus,
        Sign::Minus => RbVariant::Minus,
    };
    bn_box_via_rb_with(n, d, sign, &make_rb(n, d, variant)?)
}

/// The RAC-box-to-`B` protocol applied to an arbitrary `(n→1, d)` RAC box.
pub fn bn_box_via_rb_with(
    n: usize,
    d: usize,
    sign: Sign,
    rb: &BipartiteBox,
) -> Result<ProtocolRun, ProtocolError> {
    let task = make_bnd_box(n, d, sign)?.signature().clone();
    execute(
        match sign {
            Sign::Plus => "bnd-via-rb-plus",
            Sign::Minus => "bnd-via-rb-minus",
        },
        task,
        rb,
        1,
        1,
        &BViaRb { d, sign },
        Execution::default(),
    )
}

/// Parameters of the erasure channel extracted by the resource-inequality
/// protocol, under uniform `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErasureChannelReport {
    pub erasure_probability: Rational,
    /// `1 - erasure_probability`, in message-alphabet units.
    pub capacity: Rational,
    /// Every non-erased output equals the channel input, and the erasure
    /// probability does not depend on any input.
    pub faithful: bool,
}

struct ResourceInequality {
    d: usize,
}

impl LocalMaps for ResourceInequality {
    // Task inputs: x1..x{n-1}, z. RB inputs: a0 = z, a_i = x_i.
    fn alice_box_inputs(&self, t: &[usize], _: usize) -> Vec<usize> {
        let (x, z) = t.split_at(t.len() - 1);
        std::iter::once(z[0]).chain(x.iter().copied()).collect()
    }

    fn alice_outputs(&self, _: &[usize], s: usize, a: &[usize], wire: &mut Wire) -> Result<Vec<usize>, ProtocolError> {
        wire.send(a[0])?;
        Ok(vec![s])
    }

    fn bob_box_inputs(&self, y: &[usize], _: usize, m: Option<usize>) -> Vec<usize> {
        vec![m.expect("relay sent"), y[0]]
    }

    fn bob_outputs(&self, y: &[usize], s: usize, _: Option<usize>, b: &[usize]) -> Vec<usize> {
        let s_bob = sub(0, s, self.d);
        if y[0] == 0 {
            vec![s_bob, b[0]]
        } else {
            // Bob adds B onto his shared symbol; the channel output is erased.
            vec![(s_bob + b[0]) % self.d, self.d]
        }
    }
}

/// Task interface of the resource-inequality protocol: Alice `x1..x{n-1}, z →
/// X`, Bob `y → Y, Z` where `Z = d` is the erasure flag.
fn resource_inequality_signature(n: usize, d: usize) -> BoxSignature {
    BoxSignature::new(
        (1..n)
            .map(|i| Variable::new(format!("x{i}"), d))
            .chain(std::iter::once(Variable::new("z", d)))
            .collect(),
        vec![Variable::new("X", d)],
        vec![Variable::new("y", n)],
        vec![Variable::new("Y", d), Variable::new("Z", d + 1)],
    )
    .expect("fixed names")
}

/// RAC box + one dit + one shared dit → `B_n^d(+)` box plus an erasure
/// channel for `z`.
pub fn resource_inequality_sim(
    n: usize,
    d: usize,
    variant: RbVariant,
) -> Result<(ProtocolRun, ErasureChannelReport), ProtocolError> {
    let rb = make_rb(n, d, variant)?;
    let run = execute(
        "resource-inequality",
        resource_inequality_signature(n, d),
        &rb,
        d,
        d,
        &ResourceInequality { d },
        Execution::default(),
    )?;
    let report = erasure_report(&run.result, n, d);
    Ok((run, report))
}

/// The `(X, Y | x, y)` box obtained from the resource-inequality result for
/// a fixed channel input `z`.
pub fn induced_b_box(result: &BipartiteBox, z: usize) -> Result<BipartiteBox, BoxError> {
    let sig = result.signature();
    let k = sig.alice_inputs().len() - 1;
    let d = sig.alice_outputs()[0].size();
    let n = sig.bob_inputs()[0].size();
    let target = make_bnd_box(n, d, Sign::Plus)?;
    Ok(BipartiteBox::from_fn(target.signature().clone(), |x, y, xo, yo| {
        let mut alice_in = x.to_vec();
        alice_in.push(z);
        debug_assert_eq!(alice_in.len(), k + 1);
        (0..=d)
            .map(|zz| result.prob(&alice_in, y, xo, &[yo[0], zz]))
            .sum()
    }))
}

fn erasure_report(result: &BipartiteBox, n: usize, d: usize) -> ErasureChannelReport {
    let sig = result.signature();
    let sizes = sig.alice_inputs().iter().map(Variable::size).collect::<Vec<_>>();
    let rows = shape_len(sizes.iter().copied());
    let p_y = ratio(1, n as i64);
    let mut faithful = true;
    let mut eps: Option<Rational> = None;
    for r in 0..rows {
        let alice_in = decode_vec(&sizes, r);
        let z = *alice_in.last().expect("z input");
        let mut erased = Rational::zero();
        for y in 0..n {
            for xo in 0..d {
                for yo in 0..d {
                    for zo in 0..=d {
                        let p = result.prob(&alice_in, &[y], &[xo], &[yo, zo]);
                        if p.is_zero() {
                            continue;
                        }
                        if zo == d {
                            erased += p * p_y;
                        } else if zo != z {
                            faithful = false;
                        }
                    }
                }
            }
        }
        match &eps {
            None => eps = Some(erased),
            Some(e) if *e != erased => faithful = false,
            _ => {}
        }
    }
    let erasure_probability = eps.unwrap_or_else(Rational::zero);
    ErasureChannelReport {
        capacity: Rational::one() - erasure_probability,
        erasure_probability,
        faithful,
    }
}

/// Decides which off-branch behaviour the RAC-box constraints force.
///
/// Unknowns are the entries `P(A, B | a, A', b)` of an `(n→1, d)` RAC box.
/// Constraints: the relay condition (`B = a_b` whenever `A' = A`), Alice's
/// output uniform and independent of everything Bob does, and no-signaling
/// from Alice to Bob. For every `(a, A, A', b = i)` with `A != A'` the exact
/// range of `P(B = a_i + t | a, A, A', b = i)` is computed by linear
/// programming, for each offset `t`, and the ranges are merged per offset.
///
/// The report passes when every offset is pinned and `t = 1` (the anti-RAC
/// answer, for bits) is pinned to one; it is `under-determined` when some
/// offset is left free.
pub fn verify_lemma1(n: usize, d: usize) -> Result<ProbeReport, ProtocolError> {
    if n < 2 || d < 2 {
        return Err(BoxError::InvalidParameter("need n >= 2 and d >= 2".into()).into());
    }
    let inputs = d.pow(n as u32);
    let a_sizes = vec![d; n];
    let q = |num: i128, den: i128| Q::new(num, den);
    let mut ranges: Vec<(Q, Q)> = vec![(q(1, 1), q(0, 1)); d];
    for a_prime in 0..d {
        for i in 0..n {
            // Variables p[a][A][B], with the relay zeros kept as variables
            // pinned by equalities.
            let var = |a: usize, big_a: usize, big_b: usize| (a * d + big_a) * d + big_b;
            let mut lp = LinearProgram::new(inputs * d * d);
            for a in 0..inputs {
                let av = decode_vec(&a_sizes, a);
                for big_a in 0..d {
                    lp.add_equality((0..d).map(|bb| (var(a, big_a, bb), q(1, 1))).collect(), q(1, d as i128));
                }
                for big_b in 0..d {
                    if big_b != av[i] {
                        lp.add_equality(vec![(var(a, a_prime, big_b), q(1, 1))], q(0, 1));
                    }
                }
                if a > 0 {
                    for big_b in 0..d {
                        let mut terms: Vec<(usize, Q)> =
                            (0..d).map(|ba| (var(a, ba, big_b), q(1, 1))).collect();
                        terms.extend((0..d).map(|ba| (var(0, ba, big_b), q(-1, 1))));
                        lp.add_equality(terms, q(0, 1));
                    }
                }
            }
            // Every conditional entry P(B = a_i + t | a, A != A', b = i) is
            // d * p[a][A][B]; take its exact range.
            for a in 0..inputs {
                let ai = decode_vec(&a_sizes, a)[i];
                for big_a in (0..d).filter(|&ba| ba != a_prime) {
                    for (t, range) in ranges.iter_mut().enumerate() {
                        let objective = vec![(var(a, big_a, (ai + t) % d), q(d as i128, 1))];
                        let (LpOutcome::Optimal { value: lo, .. }, LpOutcome::Optimal { value: hi, .. }) =
                            (lp.minimize(&objective), lp.maximize(&objective))
                        else {
                            return Ok(ProbeReport::new("lemma1", Status::Fail).detail("reason", "infeasible"));
                        };
                        range.0 = range.0.min(lo);
                        range.1 = range.1.max(hi);
                    }
                }
            }
        }
    }
    let fmt = |x: Q| format!("{}/{}", x.numer(), x.denom());
    let pinned = ranges.iter().all(|(lo, hi)| lo == hi);
    let anti_rac = d == 2 && ranges[1] == (q(1, 1), q(1, 1));
    let status = if pinned && anti_rac {
        Status::Pass
    } else if pinned {
        Status::Fail
    } else {
        Status::UnderDetermined
    };
    let mut report = ProbeReport::new("lemma1", status)
        .detail("n", n)
        .detail("d", d);
    for (t, (lo, hi)) in ranges.iter().enumerate() {
        report = report.detail(format!("offset{t}"), format!("[{},{}]", fmt(*lo), fmt(*hi)));
    }
    let correct_forced_zero = ranges[0] == (q(0, 1), q(0, 1));
    report = report.detail("correct_answer_forced_zero", correct_forced_zero);
    if d == 2 {
        report = report.with_quantity(Quantity::Exact(ratio(
            *ranges[1].0.numer() as i64,
            *ranges[1].0.denom() as i64,
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::box_core::{InputPrior, JointDistribution};
    use crate::rational::int;

    fn win(run: &ProtocolRun) -> (Rational, Rational) {
        run.rac_win().expect("RAC-shaped result")
    }

    #[test]
    fn bn_box_wins_rac() {
        for n in 2..=5 {
            let run = rac_via_bn_box(n).unwrap();
            assert_eq!(win(&run), (int(1), int(1)), "n={n}");
            assert!(run.result.check_normalization());
        }
    }

    #[test]
    fn rac_specific_rows() {
        let run = rac_via_bn_box(2).unwrap();
        assert_eq!(run.result.prob(&[1, 0], &[1], &[], &[0]), int(1));
        let run = rac_via_bn_box(3).unwrap();
        assert_eq!(run.result.prob(&[1, 1, 1], &[0], &[], &[1]), int(1));
    }

    #[test]
    fn rb_simulates_bn_box() {
        for n in 2..=5 {
            let run = bn_box_via_rb(n).unwrap();
            assert_eq!(run.result, make_bn_box(n).unwrap(), "n={n}");
            assert_eq!(run.message_alphabet.size(), 1);
        }
        let run = bn_box_via_rb(3).unwrap();
        for y in 0..3 {
            for x in 0..2 {
                assert_eq!(run.result.prob(&[0, 0], &[y], &[x], &[x]), ratio(1, 2));
            }
        }
    }

    #[test]
    fn dit_protocols_both_directions() {
        for (n, d) in [(2, 2), (2, 3), (3, 3), (2, 5)] {
            for sign in [Sign::Plus, Sign::Minus] {
                let run = rac_via_bnd_box(n, d, sign).unwrap();
                assert_eq!(win(&run), (int(1), int(1)), "n={n} d={d} {sign:?}");
                let sim = bnd_box_via_rb(n, d, sign).unwrap();
                assert_eq!(sim.result, make_bnd_box(n, d, sign).unwrap(), "n={n} d={d} {sign:?}");
            }
        }
    }

    #[test]
    fn simulated_box_still_wins() {
        for n in 2..=5 {
            let simulated = bn_box_via_rb(n).unwrap().result;
            let run = rac_via_bn_box_with(n, &simulated).unwrap();
            assert_eq!(win(&run), (int(1), int(1)));
        }
    }

    #[test]
    fn bad_rb_cannot_simulate_plus_box() {
        let rb3 = make_rb(2, 3, RbVariant::Three).unwrap();
        let sim = bn_box_via_rb_with(2, 3, Sign::Plus, &rb3).unwrap();
        assert_ne!(sim.result, make_bnd_box(2, 3, Sign::Plus).unwrap());
    }

    #[test]
    fn resource_inequality_examples() {
        let (_, rep) = resource_inequality_sim(2, 2, RbVariant::NoSignaling).unwrap();
        assert_eq!(rep.erasure_probability, ratio(1, 2));
        assert_eq!(rep.capacity, ratio(1, 2));
        assert!(rep.faithful);
        let (_, rep) = resource_inequality_sim(4, 2, RbVariant::SignalingHalf).unwrap();
        assert_eq!(rep.erasure_probability, ratio(3, 4));
        let (run, rep) = resource_inequality_sim(2, 3, RbVariant::Three).unwrap();
        assert_eq!(rep.erasure_probability, ratio(1, 2));
        for z in 0..3 {
            assert_eq!(induced_b_box(&run.result, z).unwrap(), make_bnd_box(2, 3, Sign::Plus).unwrap());
        }
    }

    #[test]
    fn second_message_is_rejected() {
        struct Chatty;
        impl LocalMaps for Chatty {
            fn alice_box_inputs(&self, t: &[usize], _: usize) -> Vec<usize> {
                t.to_vec()
            }
            fn alice_outputs(&self, _: &[usize], _: usize, a: &[usize], w: &mut Wire) -> Result<Vec<usize>, ProtocolError> {
                w.send(a[0])?;
                w.send(a[0])?;
                Ok(vec![])
            }
            fn bob_box_inputs(&self, t: &[usize], _: usize, _: Option<usize>) -> Vec<usize> {
                t.to_vec()
            }
            fn bob_outputs(&self, _: &[usize], _: usize, _: Option<usize>, b: &[usize]) -> Vec<usize> {
                b.to_vec()
            }
        }
        let pr = make_bn_box(2).unwrap();
        let task = BoxSignature::new(
            vec![Variable::new("u", 2)],
            vec![],
            vec![Variable::new("v", 2)],
            vec![Variable::new("w", 2)],
        )
        .unwrap();
        let err = execute("chatty", task, &pr, 2, 1, &Chatty, Execution::Sequential);
        assert_eq!(err.unwrap_err(), ProtocolError::MessageBudgetExceeded);
    }

    #[test]
    fn out_of_range_message_is_rejected() {
        let mut w = Wire::new(2);
        assert_eq!(w.send(2), Err(ProtocolError::MessageOutOfRange { value: 2, size: 2 }));
    }

    #[test]
    fn no_message_guessing_is_blind() {
        // Uniform inputs, uniform A', no relay: P(B = a_b | b = i) = 1/d.
        for (n, d, variant) in [
            (2, 2, RbVariant::NoSignaling),
            (3, 2, RbVariant::NoSignaling),
            (2, 3, RbVariant::Plus),
            (2, 3, RbVariant::Minus),
            (2, 3, RbVariant::Three),
            (2, 4, RbVariant::Three),
        ] {
            let rb = make_rb(n, d, variant).unwrap();
            let joint: JointDistribution = rb.to_joint(&InputPrior::Uniform).unwrap();
            for i in 0..n {
                let c = joint.condition(&[("b", i)]).unwrap();
                assert_eq!(c.prob_of(|v| v[n + 3] == v[i]), ratio(1, d as i64));
            }
        }
    }

    #[test]
    fn lemma1_forced_for_bits() {
        for n in 2..=3 {
            let r = verify_lemma1(n, 2).unwrap();
            assert_eq!(r.status, Status::Pass, "{r}");
            assert_eq!(r.quantity, Some(Quantity::Exact(int(1))));
        }
    }

    #[test]
    fn lemma1_under_determined_for_trits() {
        let r = verify_lemma1(2, 3).unwrap();
        assert_eq!(r.status, Status::UnderDetermined, "{r}");
        assert_eq!(r.get("correct_answer_forced_zero"), Some("true"));
        assert_eq!(r.get("offset0"), Some("[0/1,0/1]"));
        assert_eq!(r.get("offset1"), Some("[0/1,1/1]"));
        assert_eq!(r.get("offset2"), Some("[0/1,1/1]"));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let rb = make_rb(3, 2, RbVariant::NoSignaling).unwrap();
        let task = make_bn_box(3).unwrap().signature().clone();
        let maps = BViaRb { d: 2, sign: Sign::Plus };
        let a = execute("x", task.clone(), &rb, 1, 1, &maps, Execution::Sequential).unwrap();
        let b = execute("x", task, &rb, 1, 1, &maps, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
