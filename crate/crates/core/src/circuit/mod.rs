//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered gate list over a fixed register, an optional
//! set of named, flat, non-overlapping gate ranges ("regions") that a later
//! pass may replace, and the ordered list of measured qubits.

mod basis;
mod text;

pub use basis::{decompose_to_basis, depth, BasisCircuit};
pub use text::{emit_circuit, parse_circuit};

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Ry,
    Rz,
    Cx,
    Cp,
    Swap,
}

impl GateKind {
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Cx => "cx",
            GateKind::Cp => "cp",
            GateKind::Swap => "swap",
        }
    }

    pub fn n_params(self) -> usize {
        match self {
            GateKind::Ry | GateKind::Rz | GateKind::Cp => 1,
            _ => 0,
        }
    }

    pub fn n_qubits(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Ry | GateKind::Rz => 1,
            GateKind::Cx | GateKind::Cp | GateKind::Swap => 2,
        }
    }
}

/// A single gate. Arity is fixed by the variant; angles are radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Ry(f64, usize),
    Rz(f64, usize),
    /// `Cx(control, target)`
    Cx(usize, usize),
    /// `Cp(angle, control, target)`: phase `e^{i angle}` on `|11>`.
    Cp(f64, usize, usize),
    Swap(usize, usize),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::X(_) => GateKind::X,
            Gate::Ry(..) => GateKind::Ry,
            Gate::Rz(..) => GateKind::Rz,
            Gate::Cx(..) => GateKind::Cx,
            Gate::Cp(..) => GateKind::Cp,
            Gate::Swap(..) => GateKind::Swap,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Ry(_, q) | Gate::Rz(_, q) => vec![q],
            Gate::Cx(a, b) | Gate::Cp(_, a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Gate::Ry(t, _) | Gate::Rz(t, _) | Gate::Cp(t, _, _) => vec![t],
            _ => Vec::new(),
        }
    }

    /// Same gate with every qubit index passed through `f`.
    pub fn map_qubits(&self, mut f: impl FnMut(usize) -> usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(f(q)),
            Gate::X(q) => Gate::X(f(q)),
            Gate::Ry(t, q) => Gate::Ry(t, f(q)),
            Gate::Rz(t, q) => Gate::Rz(t, f(q)),
            Gate::Cx(a, b) => Gate::Cx(f(a), f(b)),
            Gate::Cp(t, a, b) => Gate::Cp(t, f(a), f(b)),
            Gate::Swap(a, b) => Gate::Swap(f(a), f(b)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind().n_qubits() == 2
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidCircuit(format!(
                "{} acts twice on qubit {}",
                self.kind().mnemonic(),
                qs[0]
            )));
        }
        if self.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidCircuit(format!(
                "non-finite angle in {}",
                self.kind().mnemonic()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind().mnemonic())?;
        for p in self.params() {
            write!(f, " {p:?}")?;
        }
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

/// A named half-open gate range `start..end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub name: String,
    pub start: usize,
    pub end: usize,
}

impl Region {
    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    regions: Vec<Region>,
    measured: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            regions: Vec::new(),
            measured: Vec::new(),
        }
    }

    /// Assembles and validates a circuit from its parts.
    pub fn from_parts(
        n_qubits: usize,
        gates: Vec<Gate>,
        regions: Vec<Region>,
        measured: Vec<usize>,
    ) -> Result<Self> {
        let c = Circuit {
            n_qubits,
            gates,
            regions,
            measured,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, name: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.name == name)
    }

    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate, checking it against the register.
    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<&mut Self> {
        for g in gates {
            self.push(g)?;
        }
        Ok(self)
    }

    /// Runs `build` and records every gate it appends as region `name`.
    pub fn with_region<F>(&mut self, name: &str, build: F) -> Result<&mut Self>
    where
        F: FnOnce(&mut Circuit) -> Result<()>,
    {
        let start = self.gates.len();
        build(self)?;
        let region = Region {
            name: name.to_string(),
            start,
            end: self.gates.len(),
        };
        self.regions.push(region);
        if let Err(e) = self.validate_regions() {
            self.regions.pop();
            return Err(e);
        }
        Ok(self)
    }

    pub fn set_measured(&mut self, qubits: Vec<usize>) -> Result<&mut Self> {
        let old = std::mem::replace(&mut self.measured, qubits);
        if let Err(e) = self.validate_measured() {
            self.measured = old;
            return Err(e);
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::InvalidCircuit("qubit count must be positive".into()));
        }
        for g in &self.gates {
            g.validate(self.n_qubits)?;
        }
        self.validate_regions()?;
        self.validate_measured()
    }

    fn validate_regions(&self) -> Result<()> {
        let mut sorted: Vec<&Region> = self.regions.iter().collect();
        sorted.sort_by_key(|r| (r.start, r.end));
        let mut prev_end = 0;
        for r in sorted {
            if r.start > r.end || r.end > self.gates.len() {
                return Err(Error::InvalidCircuit(format!(
                    "region `{}` spans {}..{} outside {} gates",
                    r.name,
                    r.start,
                    r.end,
                    self.gates.len()
                )));
            }
            if r.start < prev_end {
                return Err(Error::InvalidCircuit(format!(
                    "region `{}` overlaps a previous region",
                    r.name
                )));
            }
            prev_end = r.end;
        }
        for (i, r) in self.regions.iter().enumerate() {
            if self.regions[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::InvalidCircuit(format!(
                    "duplicate region name `{}`",
                    r.name
                )));
            }
        }
        Ok(())
    }

    fn validate_measured(&self) -> Result<()> {
        for (i, &q) in self.measured.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
            if self.measured[..i].contains(&q) {
                return Err(Error::InvalidCircuit(format!("qubit {q} measured twice")));
            }
        }
        Ok(())
    }

    /// Qubits touched by any gate in `range`, ascending.
    pub fn touched_qubits(&self, range: Range<usize>) -> Vec<usize> {
        let mut seen = vec![false; self.n_qubits];
        for g in &self.gates[range] {
            for q in g.qubits() {
                seen[q] = true;
            }
        }
        (0..self.n_qubits).filter(|&q| seen[q]).collect()
    }

    /// Greedy layered depth over whatever gates the circuit holds.
    pub(crate) fn layered_depth(&self) -> usize {
        let mut frontier = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let qs = g.qubits();
            let layer = qs.iter().map(|&q| frontier[q]).max().unwrap_or(0) + 1;
            for q in qs {
                frontier[q] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }
}
