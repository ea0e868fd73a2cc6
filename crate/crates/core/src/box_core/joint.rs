use num_traits::{One, Zero};

use super::{decode, decode_vec, encode, shape_len, BoxError, Variable};
use crate::rational::{ratio, Rational};

/// Exact joint distribution over an ordered list of named discrete variables,
/// stored densely in row-major order (first variable most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    vars: Vec<Variable>,
    sizes: Vec<usize>,
    probs: Vec<Rational>,
}

/// Distribution of a box's inputs when it is turned into a joint
/// distribution.
#[derive(Debug, Clone, Default)]
pub enum InputPrior {
    #[default]
    Uniform,
    /// Explicit distribution over exactly the box's input variables, in the
    /// box's input order.
    Table(JointDistribution),
}

impl InputPrior {
    pub(crate) fn weights(&self, inputs: &[Variable]) -> Result<Vec<Rational>, BoxError> {
        match self {
            InputPrior::Uniform => {
                let n = shape_len(inputs.iter().map(Variable::size));
                Ok(vec![ratio(1, n as i64); n])
            }
            InputPrior::Table(dist) => {
                if dist.vars != inputs {
                    return Err(BoxError::InvalidParameter(
                        "prior variables must match the box inputs".into(),
                    ));
                }
                Ok(dist.probs.clone())
            }
        }
    }
}

impl JointDistribution {
    /// Validates shape, non-negativity, exact normalization and unique names.
    pub fn new(vars: Vec<Variable>, probs: Vec<Rational>) -> Result<Self, BoxError> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(BoxError::DuplicateVariable(v.name.clone()));
            }
        }
        let sizes: Vec<usize> = vars.iter().map(Variable::size).collect();
        let expected = shape_len(sizes.iter().copied());
        if probs.len() != expected {
            return Err(BoxError::TableSize {
                expected,
                got: probs.len(),
            });
        }
        if probs.iter().any(|p| *p < Rational::zero()) || !probs.iter().sum::<Rational>().is_one() {
            return Err(BoxError::NotNormalized);
        }
        Ok(JointDistribution { vars, sizes, probs })
    }

    pub fn uniform(vars: Vec<Variable>) -> Result<Self, BoxError> {
        let n = shape_len(vars.iter().map(Variable::size));
        Self::new(vars, vec![ratio(1, n as i64); n])
    }

    /// Builds a distribution by accumulating weighted assignments. Weights
    /// must add up to one.
    pub fn from_weighted<I>(vars: Vec<Variable>, items: I) -> Result<Self, BoxError>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        let sizes: Vec<usize> = vars.iter().map(Variable::size).collect();
        let mut probs = vec![Rational::zero(); shape_len(sizes.iter().copied())];
        for (assignment, w) in items {
            if assignment.len() != sizes.len() {
                return Err(BoxError::InvalidParameter("assignment arity mismatch".into()));
            }
            for (v, (&x, &s)) in vars.iter().zip(assignment.iter().zip(&sizes)) {
                if x >= s {
                    return Err(BoxError::ValueOutOfRange {
                        name: v.name.clone(),
                        value: x,
                        size: s,
                    });
                }
            }
            probs[encode(&sizes, &assignment)] += w;
        }
        Self::new(vars, probs)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.probs
    }

    pub fn index_of(&self, name: &str) -> Result<usize, BoxError> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| BoxError::UnknownVariable(name.to_string()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, BoxError> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    /// Iterates over `(assignment, probability)` for every cell, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, p)| (decode_vec(&self.sizes, i), p))
    }

    pub fn prob(&self, assignment: &[usize]) -> Rational {
        self.probs[encode(&self.sizes, assignment)]
    }

    /// Probability of an event given as a predicate over full assignments.
    pub fn prob_of<F: Fn(&[usize]) -> bool>(&self, event: F) -> Rational {
        let mut buf = vec![0; self.sizes.len()];
        let mut total = Rational::zero();
        for (i, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            decode(&self.sizes, i, &mut buf);
            if event(&buf) {
                total += p;
            }
        }
        total
    }

    /// Marginal over `keep`, in the order given.
    pub fn marginalize<S: AsRef<str>>(&self, keep: &[S]) -> Result<JointDistribution, BoxError> {
        let idx = self.indices_of(keep)?;
        Ok(self.marginalize_indices(&idx))
    }

    pub(crate) fn marginalize_indices(&self, idx: &[usize]) -> JointDistribution {
        let vars: Vec<Variable> = idx.iter().map(|&i| self.vars[i].clone()).collect();
        let sizes: Vec<usize> = vars.iter().map(Variable::size).collect();
        let mut probs = vec![Rational::zero(); shape_len(sizes.iter().copied())];
        let mut buf = vec![0; self.sizes.len()];
        for (i, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            decode(&self.sizes, i, &mut buf);
            let j = idx.iter().fold(0, |acc, &k| acc * self.sizes[k] + buf[k]);
            probs[j] += p;
        }
        JointDistribution { vars, sizes, probs }
    }

    /// Conditions on a partial assignment. All variables are kept; the fixed
    /// ones become deterministic.
    pub fn condition<S: AsRef<str>>(
        &self,
        assignment: &[(S, usize)],
    ) -> Result<JointDistribution, BoxError> {
        let mut fixed = Vec::with_capacity(assignment.len());
        for (name, value) in assignment {
            let i = self.index_of(name.as_ref())?;
            if *value >= self.sizes[i] {
                return Err(BoxError::ValueOutOfRange {
                    name: name.as_ref().to_string(),
                    value: *value,
                    size: self.sizes[i],
                });
            }
            fixed.push((i, *value));
        }
        self.condition_on(|a| fixed.iter().all(|&(i, v)| a[i] == v))
    }

    /// Conditions on an arbitrary event over full assignments.
    pub fn condition_on<F: Fn(&[usize]) -> bool>(
        &self,
        event: F,
    ) -> Result<JointDistribution, BoxError> {
        let mut buf = vec![0; self.sizes.len()];
        let mut probs = self.probs.clone();
        let mut total = Rational::zero();
        for (i, p) in probs.iter_mut().enumerate() {
            if p.is_zero() {
                continue;
            }
            decode(&self.sizes, i, &mut buf);
            if event(&buf) {
                total += *p;
            } else {
                *p = Rational::zero();
            }
        }
        if total.is_zero() {
            return Err(BoxError::ZeroProbabilityEvent);
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        Ok(JointDistribution {
            vars: self.vars.clone(),
            sizes: self.sizes.clone(),
            probs,
        })
    }

    /// Appends a variable that is a deterministic function of the others.
    pub fn with_derived<F>(&self, var: Variable, f: F) -> Result<JointDistribution, BoxError>
    where
        F: Fn(&[usize]) -> usize,
    {
        let mut vars = self.vars.clone();
        vars.push(var.clone());
        let items: Vec<(Vec<usize>, Rational)> = self
            .iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(mut a, p)| {
                let v = f(&a);
                a.push(v);
                (a, *p)
            })
            .collect();
        Self::from_weighted(vars, items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::new(*n, 2)).collect()
    }

    #[test]
    fn marginal_of_uniform_pair_is_uniform() {
        let d = JointDistribution::uniform(bits(&["u", "v"])).unwrap();
        let m = d.marginalize(&["u"]).unwrap();
        assert_eq!(m.probabilities(), &[ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn marginal_reorders() {
        let d = JointDistribution::new(
            bits(&["u", "v"]),
            vec![ratio(1, 2), ratio(1, 4), ratio(0, 1), ratio(1, 4)],
        )
        .unwrap();
        let m = d.marginalize(&["v", "u"]).unwrap();
        // (v,u): (0,0)=1/2 (0,1)=0 (1,0)=1/4 (1,1)=1/4
        assert_eq!(
            m.probabilities(),
            &[ratio(1, 2), ratio(0, 1), ratio(1, 4), ratio(1, 4)]
        );
    }

    #[test]
    fn condition_renormalizes() {
        let d = JointDistribution::new(
            bits(&["u", "v"]),
            vec![ratio(1, 2), ratio(1, 4), ratio(0, 1), ratio(1, 4)],
        )
        .unwrap();
        let c = d.condition(&[("u", 0)]).unwrap();
        assert_eq!(c.prob(&[0, 0]), ratio(2, 3));
        assert_eq!(c.prob(&[0, 1]), ratio(1, 3));
    }

    #[test]
    fn zero_probability_event_is_an_error() {
        let d = JointDistribution::new(
            bits(&["u", "v"]),
            vec![ratio(1, 2), ratio(1, 2), ratio(0, 1), ratio(0, 1)],
        )
        .unwrap();
        assert_eq!(d.condition(&[("u", 1)]), Err(BoxError::ZeroProbabilityEvent));
    }

    #[test]
    fn unknown_variable() {
        let d = JointDistribution::uniform(bits(&["u"])).unwrap();
        assert!(matches!(d.marginalize(&["w"]), Err(BoxError::UnknownVariable(_))));
        assert!(matches!(d.condition(&[("w", 0)]), Err(BoxError::UnknownVariable(_))));
    }

    #[test]
    fn rejects_unnormalized() {
        assert_eq!(
            JointDistribution::new(bits(&["u"]), vec![ratio(1, 2), ratio(1, 4)]),
            Err(BoxError::NotNormalized)
        );
    }
}
