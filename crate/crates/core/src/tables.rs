//! Deterministic function tables and the plain-text strategy format.
//!
//! ```text
//! strategy capacity
//! param n 2
//! table message
//! in x1:2 z:2 s:2 A:2
//! out m:2
//! 0 0 0 0 : 0
//! ...
//! end
//! ```
//!
//! Every row lists the input values followed by `:` and the output values;
//! each input assignment must appear exactly once.

use std::fmt::Write as _;

use thiserror::Error;

use crate::box_core::{decode_vec, encode, shape_len, Variable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("table `{table}`: {msg}")]
    Shape { table: String, msg: String },
    #[error("missing table `{0}`")]
    MissingTable(String),
    #[error("missing or invalid parameter `{0}`")]
    Param(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    name: String,
    inputs: Vec<Variable>,
    outputs: Vec<Variable>,
    /// Row-major over inputs, `outputs.len()` values per row.
    values: Vec<usize>,
}

impl FunctionTable {
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<Variable>,
        outputs: Vec<Variable>,
        values: Vec<usize>,
    ) -> Result<Self, TableError> {
        let name = name.into();
        let rows = shape_len(inputs.iter().map(Variable::size));
        let shape_err = |msg: String| TableError::Shape {
            table: name.clone(),
            msg,
        };
        if values.len() != rows * outputs.len() {
            return Err(shape_err(format!(
                "expected {} values, got {}",
                rows * outputs.len(),
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            let var = &outputs[i % outputs.len()];
            if *v >= var.size() {
                return Err(shape_err(format!("value {v} out of range for `{}`", var.name)));
            }
        }
        Ok(FunctionTable {
            name,
            inputs,
            outputs,
            values,
        })
    }

    pub fn from_fn<F>(name: impl Into<String>, inputs: Vec<Variable>, outputs: Vec<Variable>, f: F) -> Self
    where
        F: Fn(&[usize]) -> Vec<usize>,
    {
        let sizes: Vec<usize> = inputs.iter().map(Variable::size).collect();
        let rows = shape_len(sizes.iter().copied());
        let values = (0..rows).flat_map(|r| f(&decode_vec(&sizes, r))).collect();
        Self::new(name, inputs, outputs, values).expect("function respects output alphabets")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[Variable] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Variable] {
        &self.outputs
    }

    pub fn eval(&self, inputs: &[usize]) -> &[usize] {
        let sizes: Vec<usize> = self.inputs.iter().map(Variable::size).collect();
        let k = self.outputs.len();
        let r = encode(&sizes, inputs);
        &self.values[r * k..(r + 1) * k]
    }

    /// Checks the declared interface against an expected one.
    pub fn expect_shape(&self, inputs: &[(&str, usize)], outputs: &[(&str, usize)]) -> Result<(), TableError> {
        let same = |have: &[Variable], want: &[(&str, usize)]| {
            have.len() == want.len()
                && have.iter().zip(want).all(|(v, (n, s))| v.name == *n && v.size() == *s)
        };
        let show = |want: &[(&str, usize)]| {
            want.iter().map(|(n, s)| format!("{n}:{s}")).collect::<Vec<_>>().join(" ")
        };
        if !same(&self.inputs, inputs) {
            return Err(TableError::Shape {
                table: self.name.clone(),
                msg: format!("expected inputs `{}`", show(inputs)),
            });
        }
        if !same(&self.outputs, outputs) {
            return Err(TableError::Shape {
                table: self.name.clone(),
                msg: format!("expected outputs `{}`", show(outputs)),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StrategyFile {
    pub kind: String,
    pub params: Vec<(String, String)>,
    pub tables: Vec<FunctionTable>,
}

impl StrategyFile {
    pub fn new(kind: impl Into<String>) -> Self {
        StrategyFile {
            kind: kind.into(),
            ..Default::default()
        }
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn param_usize(&self, key: &str) -> Result<usize, TableError> {
        self.param(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| TableError::Param(key.to_string()))
    }

    pub fn table(&self, name: &str) -> Result<&FunctionTable, TableError> {
        self.tables
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| TableError::MissingTable(name.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("strategy {}\n", self.kind);
        for (k, v) in &self.params {
            let _ = writeln!(s, "param {k} {v}");
        }
        for t in &self.tables {
            let decl = |vars: &[Variable]| {
                vars.iter().map(|v| format!("{}:{}", v.name, v.size())).collect::<Vec<_>>().join(" ")
            };
            let _ = writeln!(s, "table {}\nin {}\nout {}", t.name, decl(&t.inputs), decl(&t.outputs));
            let sizes: Vec<usize> = t.inputs.iter().map(Variable::size).collect();
            let k = t.outputs.len();
            for r in 0..shape_len(sizes.iter().copied()) {
                let ins = decode_vec(&sizes, r);
                let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
                let _ = writeln!(s, "{} : {}", join(&ins), join(&t.values[r * k..(r + 1) * k]));
            }
            s.push_str("end\n");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, msg: &str| TableError::Parse {
            line,
            msg: msg.to_string(),
        };
        let (ln, first) = lines.next().ok_or_else(|| err(1, "empty strategy file"))?;
        let kind = first
            .strip_prefix("strategy ")
            .map(str::trim)
            .filter(|k| !k.is_empty())
            .ok_or_else(|| err(ln, "expected `strategy <kind>`"))?;
        let mut out = StrategyFile::new(kind);
        while let Some((ln, line)) = lines.next() {
            let mut words = line.split_whitespace();
            match words.next() {
                Some("param") => {
                    let (Some(k), Some(v), None) = (words.next(), words.next(), words.next()) else {
                        return Err(err(ln, "expected `param <key> <value>`"));
                    };
                    out.params.push((k.to_string(), v.to_string()));
                }
                Some("table") => {
                    let name = words.next().ok_or_else(|| err(ln, "table needs a name"))?;
                    let mut decl = |prefix: &str| -> Result<Vec<Variable>, TableError> {
                        let (ln, line) = lines.next().ok_or_else(|| err(ln, "unexpected end of file"))?;
                        let rest = line
                            .strip_prefix(prefix)
                            .ok_or_else(|| err(ln, &format!("expected `{}` line", prefix.trim())))?;
                        rest.split_whitespace()
                            .map(|tok| {
                                let (n, s) = tok.split_once(':').ok_or_else(|| err(ln, "expected name:size"))?;
                                let size: usize = s.parse().map_err(|_| err(ln, "bad alphabet size"))?;
                                if size == 0 {
                                    return Err(err(ln, "alphabet size must be positive"));
                                }
                                Ok(Variable::new(n, size))
                            })
                            .collect()
                    };
                    let inputs = decl("in")?;
                    let outputs = decl("out")?;
                    if outputs.is_empty() {
                        return Err(err(ln, "table needs at least one output"));
                    }
                    let sizes: Vec<usize> = inputs.iter().map(Variable::size).collect();
                    let rows = shape_len(sizes.iter().copied());
                    let mut values: Vec<Option<Vec<usize>>> = vec![None; rows];
                    loop {
                        let (ln, line) = lines.next().ok_or_else(|| err(ln, "table not closed by `end`"))?;
                        if line == "end" {
                            break;
                        }
                        let (lhs, rhs) = line.split_once(':').ok_or_else(|| err(ln, "row needs `:`"))?;
                        let parse_vals = |s: &str| -> Result<Vec<usize>, TableError> {
                            s.split_whitespace()
                                .map(|t| t.parse().map_err(|_| err(ln, "bad value")))
                                .collect()
                        };
                        let ins = parse_vals(lhs)?;
                        let outs = parse_vals(rhs)?;
                        if ins.len() != inputs.len() || outs.len() != outputs.len() {
                            return Err(err(ln, "row arity does not match declaration"));
                        }
                        if ins.iter().zip(&sizes).any(|(v, s)| v >= s) {
                            return Err(err(ln, "input value out of range"));
                        }
                        if outs.iter().zip(&outputs).any(|(v, var)| *v >= var.size()) {
                            return Err(err(ln, "output value out of range"));
                        }
                        let slot = &mut values[encode(&sizes, &ins)];
                        if slot.is_some() {
                            return Err(err(ln, "duplicate row"));
                        }
                        *slot = Some(outs);
                    }
                    if values.iter().any(Option::is_none) {
                        return Err(TableError::Shape {
                            table: name.to_string(),
                            msg: "not every input assignment has a row".into(),
                        });
                    }
                    let flat = values.into_iter().flatten().flatten().collect();
                    out.tables.push(FunctionTable::new(name, inputs, outputs, flat)?);
                }
                _ => return Err(err(ln, "expected `param` or `table`")),
            }
        }
        Ok(out)
    }
}
