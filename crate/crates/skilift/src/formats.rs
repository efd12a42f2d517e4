//! File formats: Hamiltonian coefficients, circuits, schedules.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use skilift_core::circuit::{from_parts, QubitInfo};
use skilift_core::hamiltonian::{emit_hamiltonian, parse_hamiltonian};
use skilift_core::schedule::SwapLayer;
use skilift_core::{Circuit, Gate, GateKind, MolecularHamiltonian, Role, Schedule, Stage, StageKind};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] skilift_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| FormatError::Io { path: dir.display().to_string(), source })?;
    }
    std::fs::write(path, text).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

#[derive(Debug, Serialize, Deserialize)]
struct HamiltonianJson {
    m: usize,
    #[serde(default)]
    one_body: Vec<(usize, usize, f64)>,
    #[serde(default)]
    two_body: Vec<(usize, usize, usize, usize, f64)>,
}

/// Parses either coefficient format, sniffing JSON by its leading brace.
pub fn parse_hamiltonian_any(text: &str) -> Result<MolecularHamiltonian> {
    if !looks_like_json(text) {
        return parse_hamiltonian(text).map_err(|e| FormatError::Parse(e.to_string()));
    }
    let j: HamiltonianJson = serde_json::from_str(text)?;
    if j.m == 0 {
        return Err(FormatError::Parse("m must be positive".into()));
    }
    let mut h = MolecularHamiltonian::new(j.m);
    for (p, q, v) in j.one_body {
        h.add_one_body(p, q, v)?;
    }
    for (p, q, r, s, v) in j.two_body {
        h.add_two_body([p, q, r, s], v)?;
    }
    Ok(h)
}

pub fn load_hamiltonian(path: &Path) -> Result<MolecularHamiltonian> {
    parse_hamiltonian_any(&read_file(path)?).map_err(|e| match e {
        FormatError::Parse(msg) => FormatError::Parse(format!("{}: {msg}", path.display())),
        e => e,
    })
}

pub fn hamiltonian_json(h: &MolecularHamiltonian) -> String {
    let j = HamiltonianJson {
        m: h.orbitals(),
        one_body: h.one_body().iter().map(|(&(p, q), &v)| (p, q, v)).collect(),
        two_body: h.two_body().iter().map(|(&[p, q, r, s], &v)| (p, q, r, s, v)).collect(),
    };
    serde_json::to_string_pretty(&j).expect("serializable")
}

pub fn hamiltonian_text(h: &MolecularHamiltonian) -> String {
    emit_hamiltonian(h)
}

#[derive(Debug, Serialize, Deserialize)]
struct QubitJson {
    index: usize,
    role: String,
    label: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct GateJson {
    kind: String,
    operands: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    angle: Option<f64>,
    #[serde(skip_serializing_if = "is_zero", default)]
    negated: u32,
}

fn is_zero(x: &u32) -> bool {
    *x == 0
}

/// What a circuit file was synthesized as, so `verify` can rebuild the
/// oracle.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CircuitMeta {
    /// `s2`, `trotter`, `baseline` or `qpe`.
    pub kind: String,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub steps: usize,
    #[serde(default)]
    pub passes: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CircuitJson {
    qubits: Vec<QubitJson>,
    moments: Vec<Vec<GateJson>>,
    #[serde(default)]
    global_phase: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    meta: Option<CircuitMeta>,
}

fn role_from(s: &str) -> Result<Role> {
    match s {
        "precision" => Ok(Role::Precision),
        "orbital" => Ok(Role::Orbital),
        "ancilla" => Ok(Role::Ancilla),
        _ => Err(FormatError::Parse(format!("unknown qubit role `{s}`"))),
    }
}

pub fn circuit_json(c: &Circuit, meta: Option<&CircuitMeta>) -> String {
    let j = CircuitJson {
        qubits: c
            .qubits()
            .iter()
            .enumerate()
            .map(|(index, q)| QubitJson { index, role: q.role.name().into(), label: q.label })
            .collect(),
        moments: c
            .moments()
            .iter()
            .map(|m| {
                m.iter()
                    .map(|g| GateJson {
                        kind: g.kind.name().into(),
                        operands: g.qubits.to_vec(),
                        angle: g.kind.has_angle().then_some(g.angle),
                        negated: g.negated,
                    })
                    .collect()
            })
            .collect(),
        global_phase: c.global_phase,
        meta: meta.cloned(),
    };
    serde_json::to_string(&j).expect("serializable")
}

pub fn parse_circuit_json(text: &str) -> Result<(Circuit, Option<CircuitMeta>)> {
    let j: CircuitJson = serde_json::from_str(text)?;
    let mut qubits = Vec::with_capacity(j.qubits.len());
    for (i, q) in j.qubits.iter().enumerate() {
        if q.index != i {
            return Err(FormatError::Parse(format!("qubit {i} listed with index {}", q.index)));
        }
        qubits.push(QubitInfo { role: role_from(&q.role)?, label: q.label });
    }
    let mut moments = Vec::with_capacity(j.moments.len());
    for (mi, m) in j.moments.iter().enumerate() {
        let mut gates = Vec::with_capacity(m.len());
        for g in m {
            let kind = GateKind::from_name(&g.kind)
                .ok_or_else(|| FormatError::Parse(format!("moment {mi}: unknown gate kind `{}`", g.kind)))?;
            let mut gate = Gate::new(kind, &g.operands);
            if kind.has_angle() {
                gate.angle = g.angle.ok_or_else(|| FormatError::Parse(format!("moment {mi}: {} without angle", g.kind)))?;
            }
            gate.negated = g.negated;
            gate.validate(qubits.len()).map_err(|e| FormatError::Parse(format!("moment {mi}: {e}")))?;
            gates.push(gate);
        }
        moments.push(gates);
    }
    Ok((from_parts(qubits, moments, j.global_phase)?, j.meta))
}

/// Line-per-gate listing with a register header.
pub fn circuit_text(c: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "qubits {} precision {} orbitals {} ancillas {}",
        c.n_qubits(),
        c.n_precision(),
        c.n_orbitals(),
        c.n_ancillas()
    );
    for (i, m) in c.moments().iter().enumerate() {
        for g in m {
            let _ = write!(out, "{i} {}", g.kind.name());
            for q in &g.qubits {
                let _ = write!(out, " {q}");
            }
            if g.kind.has_angle() {
                let _ = write!(out, " {:e}", g.angle);
            }
            if g.negated != 0 {
                let _ = write!(out, " neg={}", g.negated);
            }
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct StageJson {
    kind: String,
    blocks: Vec<Vec<usize>>,
    layout: Vec<usize>,
    entry_permutation: Vec<usize>,
    routing: Vec<SwapLayer>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScheduleJson {
    m: usize,
    p: u32,
    stages: Vec<StageJson>,
    exit_routing: Vec<SwapLayer>,
}

pub fn schedule_json(s: &Schedule) -> String {
    let j = ScheduleJson {
        m: s.m,
        p: s.p,
        stages: s
            .stages
            .iter()
            .map(|st| StageJson {
                kind: st.kind.name().into(),
                blocks: st.blocks.clone(),
                layout: st.layout.clone(),
                entry_permutation: st.entry_permutation.clone(),
                routing: st.routing.clone(),
            })
            .collect(),
        exit_routing: s.exit_routing.clone(),
    };
    serde_json::to_string(&j).expect("serializable")
}

pub fn parse_schedule_json(text: &str) -> Result<Schedule> {
    let j: ScheduleJson = serde_json::from_str(text)?;
    let mut stages = Vec::with_capacity(j.stages.len());
    for (i, st) in j.stages.into_iter().enumerate() {
        let kind = StageKind::from_name(&st.kind)
            .ok_or_else(|| FormatError::Parse(format!("stage {i}: unknown kind `{}`", st.kind)))?;
        stages.push(Stage {
            kind,
            blocks: st.blocks,
            layout: st.layout,
            entry_permutation: st.entry_permutation,
            routing: st.routing,
        });
    }
    Ok(Schedule { m: j.m, p: j.p, stages, exit_routing: j.exit_routing })
}

/// Which kind of JSON document a file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Document {
    Schedule,
    Circuit,
    Hamiltonian,
}

pub fn sniff(text: &str) -> Option<Document> {
    if !looks_like_json(text) {
        return parse_hamiltonian(text).ok().map(|_| Document::Hamiltonian);
    }
    let v: serde_json::Value = serde_json::from_str(text).ok()?;
    let o = v.as_object()?;
    if o.contains_key("stages") {
        Some(Document::Schedule)
    } else if o.contains_key("moments") {
        Some(Document::Circuit)
    } else if o.contains_key("m") {
        Some(Document::Hamiltonian)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use skilift_core::schedule::build_schedule;

    fn toy() -> MolecularHamiltonian {
        let mut h = MolecularHamiltonian::new(4);
        h.add_one_body(0, 0, -1.25).unwrap();
        h.add_one_body(1, 3, 0.5).unwrap();
        h.add_two_body([0, 1, 1, 0], 0.75).unwrap();
        h.add_two_body([0, 1, 3, 2], -0.125).unwrap();
        h
    }

    #[test]
    fn hamiltonian_formats_round_trip() {
        let h = toy();
        assert_eq!(parse_hamiltonian_any(&hamiltonian_text(&h)).unwrap(), h);
        assert_eq!(parse_hamiltonian_any(&hamiltonian_json(&h)).unwrap(), h);
    }

    #[test]
    fn json_hamiltonian_rejects_bad_index() {
        let bad = r#"{"m": 2, "one_body": [[0, 2, 1.0]]}"#;
        assert!(matches!(parse_hamiltonian_any(bad), Err(FormatError::Core(_))));
    }

    #[test]
    fn text_errors_name_the_line() {
        let e = parse_hamiltonian_any("m 2\n# fine\n1b 0 x 1.0\n").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn circuit_json_round_trips() {
        let mut c = Circuit::new(3, 1);
        c.push(Gate::h(1));
        c.push(Gate::mcrz(&[(0, true), (1, false)], 2, 0.4));
        c.push(Gate::fswap(2, 3));
        c.global_phase = 0.3;
        let q = c.alloc_ancilla();
        c.push(Gate::toffoli(0, 1, q));
        c.push(Gate::toffoli(0, 1, q));
        let meta = CircuitMeta { kind: "s2".into(), t: 0.5, steps: 1, passes: vec![] };
        let (back, m) = parse_circuit_json(&circuit_json(&c, Some(&meta))).unwrap();
        assert_eq!(back.moments(), c.moments());
        assert_eq!(back.n_ancillas(), 1);
        assert_eq!(back.global_phase, 0.3);
        assert_eq!(m, Some(meta));
    }

    #[test]
    fn circuit_text_has_header_and_angles() {
        let mut c = Circuit::new(2, 1);
        c.push(Gate::crz(0, 2, 0.5));
        let t = circuit_text(&c);
        assert_eq!(t.lines().next().unwrap(), "qubits 3 precision 1 orbitals 2 ancillas 0");
        assert_eq!(t.lines().nth(1).unwrap(), "0 crz 0 2 5e-1");
    }

    #[test]
    fn unknown_gate_is_rejected() {
        let text = r#"{"qubits":[{"index":0,"role":"orbital","label":0}],"moments":[[{"kind":"t","operands":[0]}]]}"#;
        assert!(parse_circuit_json(text).unwrap_err().to_string().contains("unknown gate"));
    }

    #[test]
    fn schedule_json_round_trips() {
        let s = build_schedule(&skilift_core::hamiltonian::DenseSynthetic::unit(6));
        assert_eq!(parse_schedule_json(&schedule_json(&s)).unwrap(), s);
    }

    #[test]
    fn documents_are_sniffed() {
        let s = build_schedule(&toy());
        assert_eq!(sniff(&schedule_json(&s)), Some(Document::Schedule));
        assert_eq!(sniff(&circuit_json(&Circuit::new(1, 0), None)), Some(Document::Circuit));
        assert_eq!(sniff(&hamiltonian_json(&toy())), Some(Document::Hamiltonian));
        assert_eq!(sniff("m 3\n1b 0 1 0.5\n"), Some(Document::Hamiltonian));
        assert_eq!(sniff("[]"), None);
    }
}
