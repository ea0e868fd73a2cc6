//! Conditional probability tables for bipartite boxes.
//!
//! A [`BipartiteBox`] stores `P(outputs | inputs)` densely: rows are input
//! assignments (Alice's inputs, then Bob's, first variable most significant)
//! and each row is a distribution over output assignments (Alice's outputs,
//! then Bob's). All probabilities are exact rationals.

mod families;
mod format;
mod joint;

pub use families::{make_bn_box, make_bnd_box, make_rb, RbVariant, Sign};
pub use format::{parse_box, serialize_box};
pub use joint::{InputPrior, JointDistribution};

use std::collections::HashSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoxError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value {value} out of range for `{name}` (alphabet {size})")]
    ValueOutOfRange { name: String, value: usize, size: usize },
    #[error("table has {got} entries, signature needs {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("conditioning event has probability zero")]
    ZeroProbabilityEvent,
    #[error("distribution is not normalized")]
    NotNormalized,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Number of symbols of a discrete variable; symbols are `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self, BoxError> {
        if size == 0 {
            return Err(BoxError::InvalidParameter("alphabet size must be positive".into()));
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Input,
    Output,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub alphabet: Alphabet,
}

impl Variable {
    /// Panics on a zero alphabet; meant for the fixed names used by the
    /// constructors in this crate.
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Variable {
            name: name.into(),
            alphabet: Alphabet::new(size).expect("alphabet size must be positive"),
        }
    }

    pub fn size(&self) -> usize {
        self.alphabet.size()
    }
}

/// Row-major mixed-radix indexing over a list of alphabet sizes.
pub(crate) fn shape_len(sizes: impl IntoIterator<Item = usize>) -> usize {
    sizes.into_iter().product()
}

pub(crate) fn encode(sizes: &[usize], values: &[usize]) -> usize {
    debug_assert_eq!(sizes.len(), values.len());
    sizes
        .iter()
        .zip(values)
        .fold(0, |acc, (&s, &v)| acc * s + v)
}

pub(crate) fn decode(sizes: &[usize], mut index: usize, out: &mut [usize]) {
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = index % s;
        index /= s;
    }
}

pub(crate) fn decode_vec(sizes: &[usize], index: usize) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    decode(sizes, index, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalingDirection {
    AliceToBob,
    BobToAlice,
}

/// The four variable lists of a bipartite box. Names are unique across all
/// four lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxSignature {
    alice_inputs: Vec<Variable>,
    alice_outputs: Vec<Variable>,
    bob_inputs: Vec<Variable>,
    bob_outputs: Vec<Variable>,
}

impl BoxSignature {
    pub fn new(
        alice_inputs: Vec<Variable>,
        alice_outputs: Vec<Variable>,
        bob_inputs: Vec<Variable>,
        bob_outputs: Vec<Variable>,
    ) -> Result<Self, BoxError> {
        let mut seen = HashSet::new();
        for v in alice_inputs
            .iter()
            .chain(&alice_outputs)
            .chain(&bob_inputs)
            .chain(&bob_outputs)
        {
            if v.name.is_empty()
                || v.name.contains(|c: char| c.is_whitespace() || c == '=' || c == ':')
            {
                return Err(BoxError::InvalidParameter(format!(
                    "bad variable name `{}`",
                    v.name
                )));
            }
            if !seen.insert(v.name.clone()) {
                return Err(BoxError::DuplicateVariable(v.name.clone()));
            }
        }
        Ok(BoxSignature {
            alice_inputs,
            alice_outputs,
            bob_inputs,
            bob_outputs,
        })
    }

    pub fn alice_inputs(&self) -> &[Variable] {
        &self.alice_inputs
    }
    pub fn alice_outputs(&self) -> &[Variable] {
        &self.alice_outputs
    }
    pub fn bob_inputs(&self) -> &[Variable] {
        &self.bob_inputs
    }
    pub fn bob_outputs(&self) -> &[Variable] {
        &self.bob_outputs
    }

    pub fn variables(&self, party: Party, role: Role) -> &[Variable] {
        match (party, role) {
            (Party::Alice, Role::Input) => &self.alice_inputs,
            (Party::Alice, Role::Output) => &self.alice_outputs,
            (Party::Bob, Role::Input) => &self.bob_inputs,
            (Party::Bob, Role::Output) => &self.bob_outputs,
        }
    }

    /// All input variables, Alice's first.
    pub fn inputs(&self) -> impl Iterator<Item = &Variable> {
        self.alice_inputs.iter().chain(&self.bob_inputs)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Variable> {
        self.alice_outputs.iter().chain(&self.bob_outputs)
    }

    pub fn input_sizes(&self) -> Vec<usize> {
        self.inputs().map(Variable::size).collect()
    }

    pub fn output_sizes(&self) -> Vec<usize> {
        self.outputs().map(Variable::size).collect()
    }

    pub fn input_count(&self) -> usize {
        shape_len(self.inputs().map(Variable::size))
    }

    pub fn output_count(&self) -> usize {
        shape_len(self.outputs().map(Variable::size))
    }

    fn sizes(vars: &[Variable]) -> Vec<usize> {
        vars.iter().map(Variable::size).collect()
    }
}

/// `P(alice outputs, bob outputs | alice inputs, bob inputs)` as a dense
/// table of exact rationals. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteBox {
    signature: BoxSignature,
    table: Vec<Rational>,
}

impl BipartiteBox {
    /// Wraps a raw table. Only the size is validated; use
    /// [`check_normalization`](Self::check_normalization) for the rest.
    pub fn new(signature: BoxSignature, table: Vec<Rational>) -> Result<Self, BoxError> {
        let expected = signature.input_count() * signature.output_count();
        if table.len() != expected {
            return Err(BoxError::TableSize {
                expected,
                got: table.len(),
            });
        }
        Ok(BipartiteBox { signature, table })
    }

    /// Builds a box from `f(alice_in, bob_in, alice_out, bob_out)`.
    pub fn from_fn<F>(signature: BoxSignature, f: F) -> Self
    where
        F: Fn(&[usize], &[usize], &[usize], &[usize]) -> Rational,
    {
        let ai = BoxSignature::sizes(&signature.alice_inputs);
        let bi = BoxSignature::sizes(&signature.bob_inputs);
        let ao = BoxSignature::sizes(&signature.alice_outputs);
        let bo = BoxSignature::sizes(&signature.bob_outputs);
        let (n_ai, n_bi, n_ao, n_bo) = (
            shape_len(ai.iter().copied()),
            shape_len(bi.iter().copied()),
            shape_len(ao.iter().copied()),
            shape_len(bo.iter().copied()),
        );
        let mut table = Vec::with_capacity(n_ai * n_bi * n_ao * n_bo);
        let (mut a_in, mut b_in) = (vec![0; ai.len()], vec![0; bi.len()]);
        let (mut a_out, mut b_out) = (vec![0; ao.len()], vec![0; bo.len()]);
        for i in 0..n_ai {
            decode(&ai, i, &mut a_in);
            for j in 0..n_bi {
                decode(&bi, j, &mut b_in);
                for k in 0..n_ao {
                    decode(&ao, k, &mut a_out);
                    for l in 0..n_bo {
                        decode(&bo, l, &mut b_out);
                        table.push(f(&a_in, &b_in, &a_out, &b_out));
                    }
                }
            }
        }
        BipartiteBox { signature, table }
    }

    pub fn signature(&self) -> &BoxSignature {
        &self.signature
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    fn input_index(&self, alice_in: &[usize], bob_in: &[usize]) -> usize {
        let n_bi = shape_len(self.signature.bob_inputs.iter().map(Variable::size));
        let ai = encode(&BoxSignature::sizes(&self.signature.alice_inputs), alice_in);
        let bi = encode(&BoxSignature::sizes(&self.signature.bob_inputs), bob_in);
        ai * n_bi + bi
    }

    fn output_index(&self, alice_out: &[usize], bob_out: &[usize]) -> usize {
        let n_bo = shape_len(self.signature.bob_outputs.iter().map(Variable::size));
        let ao = encode(&BoxSignature::sizes(&self.signature.alice_outputs), alice_out);
        let bo = encode(&BoxSignature::sizes(&self.signature.bob_outputs), bob_out);
        ao * n_bo + bo
    }

    /// Distribution over joint outputs (Alice-major) for one input row.
    pub fn row(&self, alice_in: &[usize], bob_in: &[usize]) -> &[Rational] {
        let n_out = self.signature.output_count();
        let r = self.input_index(alice_in, bob_in);
        &self.table[r * n_out..(r + 1) * n_out]
    }

    pub fn prob(
        &self,
        alice_in: &[usize],
        bob_in: &[usize],
        alice_out: &[usize],
        bob_out: &[usize],
    ) -> Rational {
        self.row(alice_in, bob_in)[self.output_index(alice_out, bob_out)]
    }

    fn bob_out_count(&self) -> usize {
        shape_len(self.signature.bob_outputs.iter().map(Variable::size))
    }

    /// Alice's output marginal (indexed by encoded Alice output) for one input row.
    pub fn alice_marginal(&self, alice_in: &[usize], bob_in: &[usize]) -> Vec<Rational> {
        let n_bo = self.bob_out_count();
        self.row(alice_in, bob_in)
            .chunks(n_bo)
            .map(|c| c.iter().sum())
            .collect()
    }

    /// Bob's output marginal (indexed by encoded Bob output) for one input row.
    pub fn bob_marginal(&self, alice_in: &[usize], bob_in: &[usize]) -> Vec<Rational> {
        let n_bo = self.bob_out_count();
        let mut out = vec![Rational::zero(); n_bo];
        for chunk in self.row(alice_in, bob_in).chunks(n_bo) {
            for (o, p) in out.iter_mut().zip(chunk) {
                *o += p;
            }
        }
        out
    }

    /// `P(bob outputs | alice outputs = alice_out_index, inputs)`, or `None`
    /// when that Alice output has probability zero.
    pub fn bob_conditional(
        &self,
        alice_in: &[usize],
        bob_in: &[usize],
        alice_out_index: usize,
    ) -> Option<Vec<Rational>> {
        let n_bo = self.bob_out_count();
        let slice = &self.row(alice_in, bob_in)[alice_out_index * n_bo..(alice_out_index + 1) * n_bo];
        let total: Rational = slice.iter().sum();
        if total.is_zero() {
            return None;
        }
        Some(slice.iter().map(|p| p / total).collect())
    }

    /// True iff every row is non-negative and sums to exactly one.
    pub fn check_normalization(&self) -> bool {
        let n_out = self.signature.output_count();
        self.table.chunks(n_out).all(|row| {
            row.iter().all(|p| *p >= Rational::zero()) && row.iter().sum::<Rational>().is_one()
        })
    }

    /// True iff the receiving party's output marginal, for every fixed input
    /// of its own, is identical across all inputs of the sending party.
    pub fn check_no_signaling(&self, direction: SignalingDirection) -> bool {
        let ai = BoxSignature::sizes(&self.signature.alice_inputs);
        let bi = BoxSignature::sizes(&self.signature.bob_inputs);
        let n_ai = shape_len(ai.iter().copied());
        let n_bi = shape_len(bi.iter().copied());
        let marginal = |i: usize, j: usize| {
            let a = decode_vec(&ai, i);
            let b = decode_vec(&bi, j);
            match direction {
                SignalingDirection::AliceToBob => self.bob_marginal(&a, &b),
                SignalingDirection::BobToAlice => self.alice_marginal(&a, &b),
            }
        };
        match direction {
            SignalingDirection::AliceToBob => (0..n_bi).all(|j| {
                let reference = marginal(0, j);
                (1..n_ai).all(|i| marginal(i, j) == reference)
            }),
            SignalingDirection::BobToAlice => (0..n_ai).all(|i| {
                let reference = marginal(i, 0);
                (1..n_bi).all(|j| marginal(i, j) == reference)
            }),
        }
    }

    /// Joint distribution over inputs then outputs (Alice's inputs, Bob's
    /// inputs, Alice's outputs, Bob's outputs) under the given input prior.
    pub fn to_joint(&self, prior: &InputPrior) -> Result<JointDistribution, BoxError> {
        let input_vars: Vec<Variable> = self.signature.inputs().cloned().collect();
        let weights = prior.weights(&input_vars)?;
        let vars: Vec<Variable> = input_vars
            .iter()
            .cloned()
            .chain(self.signature.outputs().cloned())
            .collect();
        let n_out = self.signature.output_count();
        let probs = self
            .table
            .chunks(n_out)
            .zip(&weights)
            .flat_map(|(row, w)| row.iter().map(move |p| p * w))
            .collect();
        JointDistribution::new(vars, probs)
    }
}
