//! Line-oriented circuit text format (`.qc`).
//!
//! ```text
//! qubits 2            # must come first
//! @region bell
//! h 0
//! cx 0 1
//! @endregion
//! measure 0 1         # optional, last
//! ```

use super::{Circuit, Gate, GateKind, Region};
use crate::error::{Error, Result};

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut parser = Parser::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        parser.statement(line_no, line)?;
    }
    parser.finish()
}

#[derive(Default)]
struct Parser {
    n_qubits: Option<usize>,
    gates: Vec<Gate>,
    regions: Vec<Region>,
    open: Option<(String, usize)>,
    measured: Option<Vec<usize>>,
}

impl Parser {
    fn statement(&mut self, line: usize, stmt: &str) -> Result<()> {
        let mut tokens = stmt.split_whitespace();
        let head = tokens.next().expect("non-empty statement");
        let args: Vec<&str> = tokens.collect();

        if self.measured.is_some() {
            return Err(syntax(line, "`measure` must be the last statement"));
        }
        let Some(n_qubits) = self.n_qubits else {
            if head != "qubits" {
                return Err(syntax(line, "first statement must be `qubits <N>`"));
            }
            let [n] = args[..] else {
                return Err(syntax(line, "expected `qubits <N>`"));
            };
            let n: usize = n
                .parse()
                .map_err(|_| syntax(line, &format!("invalid qubit count `{n}`")))?;
            if n == 0 {
                return Err(syntax(line, "qubit count must be positive"));
            }
            self.n_qubits = Some(n);
            return Ok(());
        };

        match head {
            "qubits" => Err(syntax(line, "duplicate `qubits` statement")),
            "@region" => {
                let [name] = args[..] else {
                    return Err(syntax(line, "expected `@region <name>`"));
                };
                if self.open.is_some() {
                    return Err(syntax(line, "regions cannot nest"));
                }
                if self.regions.iter().any(|r| r.name == name) {
                    return Err(syntax(line, &format!("duplicate region `{name}`")));
                }
                self.open = Some((name.to_string(), self.gates.len()));
                Ok(())
            }
            "@endregion" => {
                if !args.is_empty() {
                    return Err(syntax(line, "`@endregion` takes no arguments"));
                }
                let Some((name, start)) = self.open.take() else {
                    return Err(syntax(line, "`@endregion` without `@region`"));
                };
                self.regions.push(Region {
                    name,
                    start,
                    end: self.gates.len(),
                });
                Ok(())
            }
            "measure" => {
                if args.is_empty() {
                    return Err(syntax(line, "`measure` needs at least one qubit"));
                }
                let qs = args
                    .iter()
                    .map(|a| qubit(line, a, n_qubits))
                    .collect::<Result<Vec<_>>>()?;
                for (i, q) in qs.iter().enumerate() {
                    if qs[..i].contains(q) {
                        return Err(syntax(line, &format!("qubit {q} measured twice")));
                    }
                }
                self.measured = Some(qs);
                Ok(())
            }
            _ => {
                let gate = gate(line, head, &args, n_qubits)?;
                self.gates.push(gate);
                Ok(())
            }
        }
    }

    fn finish(self) -> Result<Circuit> {
        if let Some((name, _)) = self.open {
            return Err(Error::UnclosedRegion(name));
        }
        let Some(n) = self.n_qubits else {
            return Err(syntax(1, "missing `qubits <N>` statement"));
        };
        Circuit::from_parts(
            n,
            self.gates,
            self.regions,
            self.measured.unwrap_or_default(),
        )
    }
}

fn syntax(line: usize, message: &str) -> Error {
    Error::Syntax {
        line,
        message: message.to_string(),
    }
}

fn qubit(line: usize, token: &str, n_qubits: usize) -> Result<usize> {
    let q: usize = token
        .parse()
        .map_err(|_| syntax(line, &format!("invalid qubit index `{token}`")))?;
    if q >= n_qubits {
        return Err(Error::QubitOutOfRange { index: q, n_qubits });
    }
    Ok(q)
}

fn angle(line: usize, token: &str) -> Result<f64> {
    let malformed = || Error::MalformedAngle {
        line,
        token: token.to_string(),
    };
    // f64::from_str also accepts "inf"/"nan"; only plain decimals are allowed.
    if !token
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'))
    {
        return Err(malformed());
    }
    let v: f64 = token.parse().map_err(|_| malformed())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(malformed())
    }
}

fn gate(line: usize, head: &str, args: &[&str], n_qubits: usize) -> Result<Gate> {
    let kind = match head {
        "h" => GateKind::H,
        "x" => GateKind::X,
        "ry" => GateKind::Ry,
        "rz" => GateKind::Rz,
        "cx" => GateKind::Cx,
        "cp" => GateKind::Cp,
        "swap" => GateKind::Swap,
        other => return Err(syntax(line, &format!("unknown statement `{other}`"))),
    };
    let expected = kind.n_params() + kind.n_qubits();
    if args.len() != expected {
        return Err(syntax(
            line,
            &format!("`{head}` expects {expected} arguments, got {}", args.len()),
        ));
    }
    let (params, qubit_args) = args.split_at(kind.n_params());
    let theta = params.first().map(|t| angle(line, t)).transpose()?;
    let qs = qubit_args
        .iter()
        .map(|a| qubit(line, a, n_qubits))
        .collect::<Result<Vec<_>>>()?;
    if qs.len() == 2 && qs[0] == qs[1] {
        return Err(syntax(line, &format!("`{head}` needs two distinct qubits")));
    }
    let t = theta.unwrap_or(0.0);
    Ok(match kind {
        GateKind::H => Gate::H(qs[0]),
        GateKind::X => Gate::X(qs[0]),
        GateKind::Ry => Gate::Ry(t, qs[0]),
        GateKind::Rz => Gate::Rz(t, qs[0]),
        GateKind::Cx => Gate::Cx(qs[0], qs[1]),
        GateKind::Cp => Gate::Cp(t, qs[0], qs[1]),
        GateKind::Swap => Gate::Swap(qs[0], qs[1]),
    })
}

/// Renders a circuit in the text format. Angles use the shortest decimal
/// form that parses back to the identical `f64`.
pub fn emit_circuit(c: &Circuit) -> String {
    let mut lines = vec![format!("qubits {}", c.n_qubits())];
    let mut starts: Vec<&Region> = c.regions().iter().collect();
    starts.sort_by_key(|r| (r.start, r.end));
    let mut next = starts.into_iter().peekable();
    let mut open_end: Option<usize> = None;

    for i in 0..=c.gates().len() {
        if open_end == Some(i) {
            lines.push("@endregion".to_string());
            open_end = None;
        }
        // Empty regions open and close at the same index.
        while let Some(r) = next.next_if(|r| r.start == i) {
            lines.push(format!("@region {}", r.name));
            if r.is_empty() {
                lines.push("@endregion".to_string());
            } else {
                open_end = Some(r.end);
            }
        }
        if let Some(g) = c.gates().get(i) {
            lines.push(g.to_string());
        }
    }
    if !c.measured_qubits().is_empty() {
        let qs: Vec<String> = c.measured_qubits().iter().map(|q| q.to_string()).collect();
        lines.push(format!("measure {}", qs.join(" ")));
    }
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_one_gate_program() {
        let c = parse_circuit("qubits 1\nh 0\nmeasure 0").unwrap();
        assert_eq!(c.n_qubits(), 1);
        assert_eq!(c.gates(), &[Gate::H(0)]);
        assert_eq!(c.measured_qubits(), &[0]);
    }

    #[test]
    fn parses_controlled_phase_angle() {
        let c = parse_circuit("qubits 2\ncp 2.0943951023931953 0 1").unwrap();
        assert_eq!(
            c.gates(),
            &[Gate::Cp(2.0 * std::f64::consts::PI / 3.0, 0, 1)]
        );
    }

    #[test]
    fn reports_errors() {
        assert_eq!(
            parse_circuit("qubits 2\ncx 0 2").unwrap_err(),
            Error::QubitOutOfRange {
                index: 2,
                n_qubits: 2
            }
        );
        assert!(matches!(
            parse_circuit("qubits 1\nry pi 0").unwrap_err(),
            Error::MalformedAngle { line: 2, .. }
        ));
        assert!(matches!(
            parse_circuit("qubits 1\nrz inf 0").unwrap_err(),
            Error::MalformedAngle { .. }
        ));
        assert_eq!(
            parse_circuit("qubits 1\n@region a\nh 0").unwrap_err(),
            Error::UnclosedRegion("a".into())
        );
        assert!(matches!(
            parse_circuit("h 0").unwrap_err(),
            Error::Syntax { line: 1, .. }
        ));
        assert!(matches!(
            parse_circuit("qubits 2\n\n# c\nfoo 1").unwrap_err(),
            Error::Syntax { line: 4, .. }
        ));
        assert!(matches!(
            parse_circuit("qubits 2\nmeasure 0\nh 0").unwrap_err(),
            Error::Syntax { line: 3, .. }
        ));
        assert!(matches!(
            parse_circuit("qubits 2\n@region a\n@region b\n@endregion\n@endregion").unwrap_err(),
            Error::Syntax { line: 3, .. }
        ));
        assert!(parse_circuit("qubits 2\ncx 1 1").is_err());
        assert!(parse_circuit("qubits 2\nh 0 1").is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let c = parse_circuit("# header\n\nqubits 2 # two\n  h 1  # hadamard\n\nmeasure 1 0\n")
            .unwrap();
        assert_eq!(c.gates(), &[Gate::H(1)]);
        assert_eq!(c.measured_qubits(), &[1, 0]);
    }

    #[test]
    fn emits_minimal_program() {
        let mut c = Circuit::new(1);
        c.push(Gate::H(0)).unwrap();
        assert_eq!(emit_circuit(&c), "qubits 1\nh 0");
    }

    #[test]
    fn regions_round_trip() {
        let text = "qubits 2\nx 1\n@region body\nh 0\ncx 0 1\n@endregion\n@region empty\n@endregion\nmeasure 0 1";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.region("body").unwrap().range(), 1..3);
        assert!(c.region("empty").unwrap().is_empty());
        assert_eq!(emit_circuit(&c), text);
        assert_eq!(parse_circuit(&emit_circuit(&c)).unwrap(), c);
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
        let q = 0..n;
        let pair = (0..n, 0..n).prop_filter("distinct", |(a, b)| a != b);
        let ang = prop_oneof![
            -1e3f64..1e3,
            any::<f64>().prop_filter("finite", |v| v.is_finite())
        ];
        prop_oneof![
            q.clone().prop_map(Gate::H),
            q.clone().prop_map(Gate::X),
            (ang.clone(), q.clone()).prop_map(|(t, q)| Gate::Ry(t, q)),
            (ang.clone(), q).prop_map(|(t, q)| Gate::Rz(t, q)),
            pair.clone().prop_map(|(a, b)| Gate::Cx(a, b)),
            (ang, pair.clone()).prop_map(|(t, (a, b))| Gate::Cp(t, a, b)),
            pair.prop_map(|(a, b)| Gate::Swap(a, b)),
        ]
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        (2usize..7)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    prop::collection::vec(arb_gate(n), 0..40),
                    prop::option::of((0usize..40, 0usize..40)),
                    Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                    0..=n,
                )
            })
            .prop_map(|(n, gates, region, order, n_meas)| {
                let len = gates.len();
                let regions = region
                    .map(|(a, b)| {
                        let (a, b) = (a.min(len), b.min(len));
                        vec![Region {
                            name: "r".into(),
                            start: a.min(b),
                            end: a.max(b),
                        }]
                    })
                    .unwrap_or_default();
                Circuit::from_parts(n, gates, regions, order[..n_meas].to_vec()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn emit_then_parse_is_identity(c in arb_circuit()) {
            prop_assert_eq!(parse_circuit(&emit_circuit(&c)).unwrap(), c);
        }
    }
}
