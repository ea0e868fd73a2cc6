//! Textual box format.
//!
//! ```text
//! nlbox 1
//! var x1 alice input 2
//! var X alice output 2
//! var y bob input 2
//! var Y bob output 2
//! x1=0 y=0 : X=0 Y=0 = 1/2
//! ```
//!
//! Header lines declare each variable (party, role, alphabet size) in table
//! order. Body lines give one non-zero entry each; omitted entries are zero.
//! An empty assignment is written `-`. Lines starting with `#` are comments.

use num_traits::Zero;

use super::{
    decode_vec, encode, BipartiteBox, BoxError, BoxSignature, Party, Role, Variable,
};
use crate::rational;

const MAGIC: &str = "nlbox 1";

fn assignment_text(vars: &[Variable], values: &[usize]) -> String {
    if vars.is_empty() {
        return "-".into();
    }
    vars.iter()
        .zip(values)
        .map(|(v, x)| format!("{}={}", v.name, x))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn serialize_box(b: &BipartiteBox) -> String {
    let sig = b.signature();
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    for (party, role) in [
        (Party::Alice, Role::Input),
        (Party::Alice, Role::Output),
        (Party::Bob, Role::Input),
        (Party::Bob, Role::Output),
    ] {
        for v in sig.variables(party, role) {
            let p = if party == Party::Alice { "alice" } else { "bob" };
            let r = if role == Role::Input { "input" } else { "output" };
            out.push_str(&format!("var {} {} {} {}\n", v.name, p, r, v.size()));
        }
    }
    let in_vars: Vec<Variable> = sig.inputs().cloned().collect();
    let out_vars: Vec<Variable> = sig.outputs().cloned().collect();
    let in_sizes = sig.input_sizes();
    let out_sizes = sig.output_sizes();
    let n_out = sig.output_count();
    for (i, row) in b.table().chunks(n_out).enumerate() {
        let input = decode_vec(&in_sizes, i);
        for (j, p) in row.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let output = decode_vec(&out_sizes, j);
            out.push_str(&format!(
                "{} : {} = {}\n",
                assignment_text(&in_vars, &input),
                assignment_text(&out_vars, &output),
                rational::format(p)
            ));
        }
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> BoxError {
    BoxError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_assignment(
    text: &str,
    vars: &[Variable],
    line: usize,
) -> Result<Vec<usize>, BoxError> {
    let text = text.trim();
    if vars.is_empty() {
        return if text == "-" {
            Ok(Vec::new())
        } else {
            Err(parse_err(line, "expected `-` for an empty assignment"))
        };
    }
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != vars.len() {
        return Err(parse_err(
            line,
            format!("expected {} assignments, found {}", vars.len(), tokens.len()),
        ));
    }
    let mut values = Vec::with_capacity(vars.len());
    for (tok, var) in tokens.iter().zip(vars) {
        let (name, value) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("bad token `{tok}`")))?;
        if name != var.name {
            return Err(parse_err(
                line,
                format!("expected variable `{}`, found `{name}`", var.name),
            ));
        }
        let value: usize = value
            .parse()
            .map_err(|_| parse_err(line, format!("bad value `{value}`")))?;
        if value >= var.size() {
            return Err(parse_err(
                line,
                format!("value {value} out of range for `{name}`"),
            ));
        }
        values.push(value);
    }
    Ok(values)
}

pub fn parse_box(text: &str) -> Result<BipartiteBox, BoxError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        Some((n, _)) => return Err(parse_err(n, format!("expected `{MAGIC}` header"))),
        None => return Err(parse_err(0, "empty document")),
    }
    let mut lists: [Vec<Variable>; 4] = Default::default();
    let mut body = Vec::new();
    let mut last_slot = 0;
    for (n, l) in lines {
        if let Some(rest) = l.strip_prefix("var ") {
            if !body.is_empty() {
                return Err(parse_err(n, "variable declared after the body"));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(parse_err(n, "expected `var NAME PARTY ROLE SIZE`"));
            }
            let slot = match (parts[1], parts[2]) {
                ("alice", "input") => 0,
                ("alice", "output") => 1,
                ("bob", "input") => 2,
                ("bob", "output") => 3,
                _ => return Err(parse_err(n, "party must be alice|bob, role input|output")),
            };
            if slot < last_slot {
                return Err(parse_err(n, "variables must be declared in table order"));
            }
            last_slot = slot;
            let size: usize = parts[3]
                .parse()
                .map_err(|_| parse_err(n, "bad alphabet size"))?;
            let alphabet = super::Alphabet::new(size).map_err(|_| parse_err(n, "bad alphabet size"))?;
            lists[slot].push(Variable {
                name: parts[0].to_string(),
                alphabet,
            });
        } else {
            body.push((n, l));
        }
    }
    let [ai, ao, bi, bo] = lists;
    let sig = BoxSignature::new(ai, ao, bi, bo)?;
    let in_vars: Vec<Variable> = sig.inputs().cloned().collect();
    let out_vars: Vec<Variable> = sig.outputs().cloned().collect();
    let in_sizes = sig.input_sizes();
    let out_sizes = sig.output_sizes();
    let n_out = sig.output_count();
    let mut table = vec![rational::int(0); sig.input_count() * n_out];
    let mut seen = vec![false; table.len()];
    for (n, l) in body {
        let (input, rest) = l
            .split_once(':')
            .ok_or_else(|| parse_err(n, "expected `inputs : outputs = p`"))?;
        let (output, p) = rest
            .rsplit_once('=')
            .ok_or_else(|| parse_err(n, "missing probability"))?;
        let i = encode(&in_sizes, &parse_assignment(input, &in_vars, n)?);
        let j = encode(&out_sizes, &parse_assignment(output, &out_vars, n)?);
        let p = rational::parse(p).ok_or_else(|| parse_err(n, format!("bad probability `{}`", p.trim())))?;
        let k = i * n_out + j;
        if seen[k] {
            return Err(parse_err(n, "duplicate entry"));
        }
        seen[k] = true;
        table[k] = p;
    }
    BipartiteBox::new(sig, table)
}
