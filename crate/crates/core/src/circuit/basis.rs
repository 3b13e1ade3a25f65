//! Lowering to the {RY, RZ, CX} basis and layered depth.

use std::f64::consts::PI;
use std::ops::Deref;

use super::{Circuit, Gate, GateKind, Region};
use crate::error::{Error, Result};

/// A circuit containing only RY, RZ and CX gates.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisCircuit(Circuit);

impl BasisCircuit {
    pub fn new(c: Circuit) -> Result<Self> {
        if let Some(g) = c
            .gates()
            .iter()
            .find(|g| !matches!(g.kind(), GateKind::Ry | GateKind::Rz | GateKind::Cx))
        {
            return Err(Error::InvalidCircuit(format!(
                "`{}` is not a basis gate",
                g.kind().mnemonic()
            )));
        }
        Ok(BasisCircuit(c))
    }

    pub fn depth(&self) -> usize {
        self.0.layered_depth()
    }

    pub fn into_inner(self) -> Circuit {
        self.0
    }
}

impl Deref for BasisCircuit {
    type Target = Circuit;

    fn deref(&self) -> &Circuit {
        &self.0
    }
}

fn lower(g: &Gate, out: &mut Vec<Gate>) {
    match *g {
        Gate::Ry(..) | Gate::Rz(..) | Gate::Cx(..) => out.push(*g),
        // RY(pi/2) * RZ(pi) = H up to phase
        Gate::H(q) => out.extend([Gate::Rz(PI, q), Gate::Ry(PI / 2.0, q)]),
        // RY(pi) * RZ(pi) = X up to phase
        Gate::X(q) => out.extend([Gate::Rz(PI, q), Gate::Ry(PI, q)]),
        Gate::Cp(l, c, t) => out.extend([
            Gate::Rz(l / 2.0, c),
            Gate::Cx(c, t),
            Gate::Rz(-l / 2.0, t),
            Gate::Cx(c, t),
            Gate::Rz(l / 2.0, t),
        ]),
        Gate::Swap(a, b) => out.extend([Gate::Cx(a, b), Gate::Cx(b, a), Gate::Cx(a, b)]),
    }
}

/// Rewrites every gate locally into RY/RZ/CX. No cancellation or fusion is
/// attempted. Regions are remapped onto the lowered gate ranges.
pub fn decompose_to_basis(c: &Circuit) -> BasisCircuit {
    let mut gates = Vec::with_capacity(c.len() * 3);
    // offsets[i] = index of the first lowered gate of source gate i
    let mut offsets = Vec::with_capacity(c.len() + 1);
    for g in c.gates() {
        offsets.push(gates.len());
        lower(g, &mut gates);
    }
    offsets.push(gates.len());
    let regions = c
        .regions()
        .iter()
        .map(|r| Region {
            name: r.name.clone(),
            start: offsets[r.start],
            end: offsets[r.end],
        })
        .collect();
    let out = Circuit::from_parts(c.n_qubits(), gates, regions, c.measured_qubits().to_vec())
        .expect("lowering preserves validity");
    BasisCircuit(out)
}

/// Number of layers under greedy as-soon-as-possible scheduling.
pub fn depth(c: &BasisCircuit) -> usize {
    c.depth()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: usize, gates: Vec<Gate>) -> BasisCircuit {
        BasisCircuit::new(Circuit::from_parts(n, gates, vec![], vec![]).unwrap()).unwrap()
    }

    #[test]
    fn depth_examples() {
        assert_eq!(depth(&basis(2, vec![])), 0);
        assert_eq!(
            depth(&basis(2, vec![Gate::Ry(0.0, 0), Gate::Ry(0.0, 1)])),
            1
        );
        let chain = (0..5).map(|q| Gate::Cx(q, q + 1)).collect();
        assert_eq!(depth(&basis(6, chain)), 5);
    }

    #[test]
    fn basis_gates_pass_through() {
        let mut c = Circuit::new(2);
        c.extend([Gate::Cx(0, 1), Gate::Ry(0.3, 1), Gate::Rz(-0.2, 0)])
            .unwrap();
        assert_eq!(decompose_to_basis(&c).gates(), c.gates());
    }

    #[test]
    fn non_basis_circuit_is_rejected() {
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        assert!(BasisCircuit::new(c).is_err());
    }

    #[test]
    fn regions_follow_lowering() {
        let mut c = Circuit::new(2);
        c.push(Gate::X(1)).unwrap();
        c.with_region("r", |c| {
            c.push(Gate::Cp(0.4, 0, 1))?;
            c.push(Gate::Cx(0, 1))?;
            Ok(())
        })
        .unwrap();
        let b = decompose_to_basis(&c);
        assert_eq!(b.region("r").unwrap().range(), 2..8);
    }
}
