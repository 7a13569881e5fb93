//! Boolean circuits over {NOT, AND, XOR}.
//!
//! Text format, one gate per line:
//!
//! ```text
//! # comment
//! t0 = XOR i0 i1
//! o0 = NOT t0
//! ```
//!
//! Inputs are the wires `i0, i1, …`; the input arity is one more than the
//! highest input index used. Outputs are the wires `o0 … o(m−1)`, which must
//! all be driven. Every other wire must be driven exactly once before it is
//! read, which also rules out cycles. An identity wire is written as two
//! NOTs.

use std::collections::HashMap;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::error::{input_err, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Not,
    And,
    Xor,
}

impl Op {
    fn arity(self) -> usize {
        match self {
            Op::Not => 1,
            Op::And | Op::Xor => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Op::Not => "NOT",
            Op::And => "AND",
            Op::Xor => "XOR",
        }
    }
}

/// Wires `0..n_inputs` are inputs; gate `k` drives wire `n_inputs + k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub op: Op,
    pub a: usize,
    pub b: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCircuit {
    n_inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

impl ClassicalCircuit {
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn eval(&self, input: &BitString) -> Result<BitString> {
        if input.len() != self.n_inputs {
            return input_err(format!("circuit takes {} inputs, got {}", self.n_inputs, input.len()));
        }
        let mut wires: Vec<bool> = input.iter().collect();
        wires.reserve(self.gates.len());
        for g in &self.gates {
            let v = match g.op {
                Op::Not => !wires[g.a],
                Op::And => wires[g.a] & wires[g.b],
                Op::Xor => wires[g.a] ^ wires[g.b],
            };
            wires.push(v);
        }
        Ok(self.outputs.iter().map(|&w| wires[w]).collect())
    }

    /// The same circuit reading `n ≥ n_inputs` inputs; the extra ones are
    /// ignored.
    pub fn padded(&self, n: usize) -> Result<Self> {
        if n < self.n_inputs {
            return input_err(format!("circuit reads {} inputs but only {n} supplied", self.n_inputs));
        }
        let shift = |w: usize| if w < self.n_inputs { w } else { w + n - self.n_inputs };
        Ok(Self {
            n_inputs: n,
            gates: self.gates.iter().map(|g| Gate { op: g.op, a: shift(g.a), b: shift(g.b) }).collect(),
            outputs: self.outputs.iter().map(|&o| shift(o)).collect(),
        })
    }

    /// Digest identifying the circuit structurally.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update((self.n_inputs as u64).to_be_bytes());
        for g in &self.gates {
            h.update([g.op as u8]);
            h.update((g.a as u64).to_be_bytes());
            h.update((g.b as u64).to_be_bytes());
        }
        for &o in &self.outputs {
            h.update((o as u64).to_be_bytes());
        }
        h.finalize().into()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut names: HashMap<String, usize> = HashMap::new();
        let mut lines = Vec::new();
        let mut max_input: Option<usize> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Format(format!("line {}: {msg}", no + 1));
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| bad("expected 'OUT = OP IN1 [IN2]'"))?;
            let out = lhs.trim();
            let mut toks = rhs.split_whitespace();
            let op = match toks.next().map(str::to_ascii_uppercase).as_deref() {
                Some("NOT") => Op::Not,
                Some("AND") => Op::And,
                Some("XOR") => Op::Xor,
                _ => return Err(bad("unknown operation")),
            };
            let args: Vec<&str> = toks.collect();
            if args.len() != op.arity() {
                return Err(bad(&format!("{} takes {} operand(s)", op.name(), op.arity())));
            }
            if out.is_empty() || out.contains(char::is_whitespace) || input_index(out).is_some() {
                return Err(bad(&format!("cannot drive wire '{out}'")));
            }
            for a in &args {
                if let Some(k) = input_index(a) {
                    max_input = Some(max_input.map_or(k, |m| m.max(k)));
                }
            }
            lines.push((no + 1, out.to_string(), op, args.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
        }
        let n_inputs = max_input.map_or(0, |m| m + 1);
        let mut gates = Vec::with_capacity(lines.len());
        for (no, out, op, args) in lines {
            let mut ids = [0usize; 2];
            for (k, a) in args.iter().enumerate() {
                ids[k] = match input_index(a) {
                    Some(i) => i,
                    None => *names
                        .get(a)
                        .ok_or_else(|| Error::Format(format!("line {no}: wire '{a}' read before it is driven")))?,
                };
            }
            if op == Op::Not {
                ids[1] = ids[0];
            }
            if names.insert(out.clone(), n_inputs + gates.len()).is_some() {
                return Err(Error::Format(format!("line {no}: wire '{out}' driven twice")));
            }
            gates.push(Gate { op, a: ids[0], b: ids[1] });
        }
        let mut outputs = Vec::new();
        while let Some(&w) = names.get(&format!("o{}", outputs.len())) {
            outputs.push(w);
        }
        if outputs.is_empty() {
            return Err(Error::Format("circuit has no output o0".into()));
        }
        let stray = names.keys().filter_map(|n| output_index(n)).find(|&k| k >= outputs.len());
        if let Some(k) = stray {
            return Err(Error::Format(format!("output o{k} present but o{} missing", outputs.len())));
        }
        Ok(Self { n_inputs, gates, outputs })
    }
}

fn indexed(name: &str, prefix: char) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|c| c.is_ascii_digit()) || (rest.len() > 1 && rest.starts_with('0')) {
        return None;
    }
    rest.parse().ok()
}

fn input_index(name: &str) -> Option<usize> {
    indexed(name, 'i')
}

fn output_index(name: &str) -> Option<usize> {
    indexed(name, 'o')
}

impl fmt::Display for ClassicalCircuit {
    /// Writes the circuit back in the text format. A gate driving output `k`
    /// is named `o<k>`, other gates `w<gate index>`; an output that is an
    /// input or repeats an earlier output goes through a double NOT.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut gate_names: Vec<String> = (0..self.gates.len()).map(|k| format!("w{k}")).collect();
        let mut helped = Vec::new();
        for (k, &o) in self.outputs.iter().enumerate() {
            match o.checked_sub(self.n_inputs) {
                Some(g) if gate_names[g].starts_with('w') => gate_names[g] = format!("o{k}"),
                _ => helped.push(k),
            }
        }
        let name = |w: usize| {
            if w < self.n_inputs {
                format!("i{w}")
            } else {
                gate_names[w - self.n_inputs].clone()
            }
        };
        for (k, g) in self.gates.iter().enumerate() {
            write!(f, "{} = {} {}", gate_names[k], g.op.name(), name(g.a))?;
            if g.op != Op::Not {
                write!(f, " {}", name(g.b))?;
            }
            writeln!(f)?;
        }
        let mut next = self.gates.len();
        for k in helped {
            writeln!(f, "w{next} = NOT {}", name(self.outputs[k]))?;
            writeln!(f, "o{k} = NOT w{next}")?;
            next += 2;
        }
        Ok(())
    }
}

/// Incremental construction with wire handles.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    n_inputs: usize,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(n_inputs: usize) -> Self {
        Self { n_inputs, gates: Vec::new() }
    }

    pub fn input(&self, k: usize) -> usize {
        assert!(k < self.n_inputs, "input {k} out of range");
        k
    }

    fn push(&mut self, op: Op, a: usize, b: usize) -> usize {
        let next = self.n_inputs + self.gates.len();
        assert!(a < next && b < next, "wire read before it is driven");
        self.gates.push(Gate { op, a, b });
        next
    }

    pub fn not(&mut self, a: usize) -> usize {
        self.push(Op::Not, a, a)
    }

    pub fn and(&mut self, a: usize, b: usize) -> usize {
        self.push(Op::And, a, b)
    }

    pub fn xor(&mut self, a: usize, b: usize) -> usize {
        self.push(Op::Xor, a, b)
    }

    /// Copies `c` in with its inputs wired to `inputs`; returns its outputs.
    pub fn inline(&mut self, c: &ClassicalCircuit, inputs: &[usize]) -> Result<Vec<usize>> {
        if inputs.len() != c.n_inputs {
            return input_err(format!("circuit takes {} inputs, {} wired", c.n_inputs, inputs.len()));
        }
        let mut map: Vec<usize> = inputs.to_vec();
        for g in &c.gates {
            let w = self.push(g.op, map[g.a], map[g.b]);
            map.push(w);
        }
        Ok(c.outputs.iter().map(|&o| map[o]).collect())
    }

    pub fn finish(self, outputs: Vec<usize>) -> ClassicalCircuit {
        let next = self.n_inputs + self.gates.len();
        assert!(outputs.iter().all(|&o| o < next), "output wire out of range");
        ClassicalCircuit { n_inputs: self.n_inputs, gates: self.gates, outputs }
    }
}

/// The test corpus: every 2-input gate, identity, 3-input majority and
/// 4-bit parity.
pub fn corpus() -> Vec<(&'static str, ClassicalCircuit)> {
    const SOURCES: [(&str, &str); 8] = [
        ("id", "t = NOT i0\no0 = NOT t\n"),
        ("not", "o0 = NOT i0\n"),
        ("and", "o0 = AND i0 i1\n"),
        ("xor", "o0 = XOR i0 i1\n"),
        ("nand", "t = AND i0 i1\no0 = NOT t\n"),
        ("or", "a = NOT i0\nb = NOT i1\nc = AND a b\no0 = NOT c\n"),
        (
            "maj3",
            "ab = AND i0 i1\nac = AND i0 i2\nbc = AND i1 i2\nt = XOR ab ac\no0 = XOR t bc\n",
        ),
        ("parity4", "a = XOR i0 i1\nb = XOR i2 i3\no0 = XOR a b\n"),
    ];
    SOURCES
        .iter()
        .map(|(n, s)| (*n, ClassicalCircuit::parse(s).expect("corpus circuit parses")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_truth_tables() {
        let c: HashMap<_, _> = corpus().into_iter().collect();
        for x in BitString::all(2) {
            let (a, b) = (x.get(0), x.get(1));
            let ev = |n: &str| c[n].eval(&x).unwrap().get(0);
            assert_eq!(ev("and"), a & b);
            assert_eq!(ev("xor"), a ^ b);
            assert_eq!(ev("nand"), !(a & b));
            assert_eq!(ev("or"), a | b);
        }
        for x in BitString::all(3) {
            assert_eq!(c["maj3"].eval(&x).unwrap().get(0), x.weight() >= 2);
        }
        for x in BitString::all(4) {
            assert_eq!(c["parity4"].eval(&x).unwrap().get(0), x.parity());
        }
        assert!(c["id"].eval(&"1".parse().unwrap()).unwrap().get(0));
    }

    #[test]
    fn parse_errors() {
        assert!(ClassicalCircuit::parse("o0 = OR i0 i1").is_err());
        assert!(ClassicalCircuit::parse("o0 = AND i0").is_err());
        assert!(ClassicalCircuit::parse("o0 = NOT t\nt = NOT i0").is_err());
        assert!(ClassicalCircuit::parse("t = NOT i0\nt = NOT i0\no0 = NOT t").is_err());
        assert!(ClassicalCircuit::parse("i0 = NOT i1\no0 = NOT i0").is_err());
        assert!(ClassicalCircuit::parse("t = NOT i0").is_err());
        assert!(ClassicalCircuit::parse("o0 = NOT i0\no2 = NOT i0").is_err());
        assert!(ClassicalCircuit::parse("o0 NOT i0").is_err());
    }

    #[test]
    fn comments_and_case() {
        let c = ClassicalCircuit::parse("# and gate\n\no0 = and i0 i1  # trailing\n").unwrap();
        assert_eq!(c.n_inputs(), 2);
        assert_eq!(c.n_outputs(), 1);
    }

    #[test]
    fn display_round_trips() {
        for (_, c) in corpus() {
            let again = ClassicalCircuit::parse(&c.to_string()).unwrap();
            for x in BitString::all(c.n_inputs()) {
                assert_eq!(again.eval(&x).unwrap(), c.eval(&x).unwrap());
            }
        }
    }

    #[test]
    fn padding_ignores_extra_inputs() {
        let c = ClassicalCircuit::parse("t = NOT i0\no0 = XOR t i0").unwrap().padded(3).unwrap();
        for x in BitString::all(3) {
            assert!(c.eval(&x).unwrap().get(0));
        }
        assert!(c.padded(2).is_err());
    }

    #[test]
    fn builder_inlines() {
        let and = ClassicalCircuit::parse("o0 = AND i0 i1").unwrap();
        let mut b = CircuitBuilder::new(3);
        let t = b.xor(b.input(0), b.input(1));
        let out = b.inline(&and, &[t, b.input(2)]).unwrap();
        let c = b.finish(out);
        for x in BitString::all(3) {
            assert_eq!(c.eval(&x).unwrap().get(0), (x.get(0) ^ x.get(1)) & x.get(2));
        }
    }
}
