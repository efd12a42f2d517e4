//! Circuit intermediate representation: role-tagged qubits, gates packed
//! into moments, orbital layout tracking, and depth/width metrics.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use smallvec::SmallVec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Precision,
    Orbital,
    Ancilla,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Precision => "precision",
            Role::Orbital => "orbital",
            Role::Ancilla => "ancilla",
        }
    }
}

/// A qubit's role and its index within that role (precision bit, orbital
/// wire position, or ancilla serial number).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitInfo {
    pub role: Role,
    pub label: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    H,
    S,
    Sdg,
    X,
    Cx,
    Cz,
    Swap,
    FermionicSwap,
    Toffoli,
    /// Fanout: first operand is the control, the rest are targets.
    MultiCx,
    Rz,
    CRz,
    /// Controls first, target last; `negated` flags zero-controls.
    MultiCRz,
    /// Measurement marker; identity for unitary purposes.
    Measure,
}

impl GateKind {
    pub const ALL: [GateKind; 14] = [
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::X,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Swap,
        GateKind::FermionicSwap,
        GateKind::Toffoli,
        GateKind::MultiCx,
        GateKind::Rz,
        GateKind::CRz,
        GateKind::MultiCRz,
        GateKind::Measure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::X => "x",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::FermionicSwap => "fswap",
            GateKind::Toffoli => "ccx",
            GateKind::MultiCx => "fanout",
            GateKind::Rz => "rz",
            GateKind::CRz => "crz",
            GateKind::MultiCRz => "mcrz",
            GateKind::Measure => "measure",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        GateKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rz | GateKind::CRz | GateKind::MultiCRz)
    }

    /// Diagonal in the computational basis, so it commutes with every other
    /// diagonal gate and may share qubits inside a diagonal layer.
    pub fn is_diagonal(self) -> bool {
        matches!(self, GateKind::Rz | GateKind::CRz | GateKind::MultiCRz | GateKind::Cz | GateKind::S | GateKind::Sdg)
    }

    pub fn has_angle(self) -> bool {
        self.is_rotation()
    }

    fn arity_ok(self, n: usize) -> bool {
        match self {
            GateKind::H | GateKind::S | GateKind::Sdg | GateKind::X | GateKind::Rz | GateKind::Measure => n == 1,
            GateKind::Cx | GateKind::Cz | GateKind::Swap | GateKind::FermionicSwap | GateKind::CRz => n == 2,
            GateKind::Toffoli => n == 3,
            GateKind::MultiCx | GateKind::MultiCRz => n >= 2,
        }
    }
}

pub type Operands = SmallVec<[usize; 6]>;

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Operands,
    pub angle: f64,
    /// Bit `i` set means control `i` fires on `|0⟩` (MultiCRz only).
    pub negated: u32,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Self {
        Gate { kind, qubits: qubits.iter().copied().collect(), angle: 0.0, negated: 0 }
    }

    pub fn h(q: usize) -> Self {
        Gate::new(GateKind::H, &[q])
    }
    pub fn s(q: usize) -> Self {
        Gate::new(GateKind::S, &[q])
    }
    pub fn sdg(q: usize) -> Self {
        Gate::new(GateKind::Sdg, &[q])
    }
    pub fn x(q: usize) -> Self {
        Gate::new(GateKind::X, &[q])
    }
    pub fn cx(c: usize, t: usize) -> Self {
        Gate::new(GateKind::Cx, &[c, t])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Cz, &[a, b])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, &[a, b])
    }
    pub fn fswap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::FermionicSwap, &[a, b])
    }
    pub fn toffoli(c1: usize, c2: usize, t: usize) -> Self {
        Gate::new(GateKind::Toffoli, &[c1, c2, t])
    }
    pub fn measure(q: usize) -> Self {
        Gate::new(GateKind::Measure, &[q])
    }

    pub fn fanout(c: usize, targets: &[usize]) -> Self {
        let mut g = Gate::new(GateKind::MultiCx, &[c]);
        g.qubits.extend_from_slice(targets);
        g
    }

    /// `Rz(θ) = exp(-iθZ/2)`.
    pub fn rz(q: usize, angle: f64) -> Self {
        Gate { angle, ..Gate::new(GateKind::Rz, &[q]) }
    }

    pub fn crz(c: usize, t: usize, angle: f64) -> Self {
        Gate { angle, ..Gate::new(GateKind::CRz, &[c, t]) }
    }

    /// Multi-controlled Rz; controls are `(qubit, fires_on_one)`.
    pub fn mcrz(controls: &[(usize, bool)], t: usize, angle: f64) -> Self {
        let mut g = Gate { angle, ..Gate::new(GateKind::MultiCRz, &[]) };
        for (i, &(q, positive)) in controls.iter().enumerate() {
            g.qubits.push(q);
            if !positive {
                g.negated |= 1 << i;
            }
        }
        g.qubits.push(t);
        g
    }

    /// Controlled rotation with the smallest fitting kind.
    pub fn controlled_rz(controls: &[(usize, bool)], t: usize, angle: f64) -> Self {
        match controls {
            [] => Gate::rz(t, angle),
            [(c, true)] => Gate::crz(*c, t, angle),
            _ => Gate::mcrz(controls, t, angle),
        }
    }

    /// Rotation target (last operand) for rotation kinds.
    pub fn target(&self) -> usize {
        *self.qubits.last().expect("gate has operands")
    }

    /// Controls of a controlled rotation, `(qubit, fires_on_one)`.
    pub fn rotation_controls(&self) -> SmallVec<[(usize, bool); 6]> {
        match self.kind {
            GateKind::CRz => [(self.qubits[0], true)].into_iter().collect(),
            GateKind::MultiCRz => self.qubits[..self.qubits.len() - 1]
                .iter()
                .enumerate()
                .map(|(i, &q)| (q, self.negated & (1 << i) == 0))
                .collect(),
            _ => SmallVec::new(),
        }
    }

    pub fn is_rotation(&self) -> bool {
        self.kind.is_rotation()
    }

    pub fn is_diagonal(&self) -> bool {
        self.kind.is_diagonal()
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if !self.kind.arity_ok(self.qubits.len()) {
            return Err(Error::Structure(format!("{} with {} operands", self.kind.name(), self.qubits.len())));
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::Structure(format!("{} operand {q} out of range", self.kind.name())));
            }
            if self.qubits[..i].contains(&q) {
                return Err(Error::Structure(format!("{} repeats operand {q}", self.kind.name())));
            }
        }
        if !self.angle.is_finite() {
            return Err(Error::Structure(format!("{} with non-finite angle", self.kind.name())));
        }
        Ok(())
    }
}

/// Depth pricing of gate kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub name: &'static str,
    /// Fanout costs one step regardless of arity.
    pub fanout_constant_time: bool,
    pub toffoli_layer_weight: u64,
    pub rotation_weight: u64,
    pub clifford_weight: u64,
}

impl CostModel {
    /// Every gate is one step; a fanout with `k` targets costs `k`.
    pub const CIRCUIT: CostModel = CostModel {
        name: "circuit",
        fanout_constant_time: false,
        toffoli_layer_weight: 1,
        rotation_weight: 1,
        clifford_weight: 1,
    };

    /// Fanout is constant time.
    pub const LATTICE_SURGERY: CostModel = CostModel {
        name: "lattice-surgery",
        fanout_constant_time: true,
        toffoli_layer_weight: 1,
        rotation_weight: 1,
        clifford_weight: 1,
    };

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "circuit" => Some(CostModel::CIRCUIT),
            "lattice-surgery" => Some(CostModel::LATTICE_SURGERY),
            _ => None,
        }
    }

    pub fn weight(&self, g: &Gate) -> u64 {
        match g.kind {
            GateKind::Measure => 0,
            GateKind::MultiCx if !self.fanout_constant_time => (g.qubits.len() - 1) as u64 * self.clifford_weight,
            GateKind::Toffoli => self.toffoli_layer_weight,
            k if k.is_rotation() => self.rotation_weight,
            _ => self.clifford_weight,
        }
    }
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::LATTICE_SURGERY
    }
}

/// Depth, width and gate-count summary of a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Metrics {
    pub rotation_depth: u64,
    pub total_depth: u64,
    pub swap_depth: u64,
    pub width: u64,
    pub gate_counts: BTreeMap<&'static str, u64>,
}

impl Metrics {
    /// Serial composition: depths and counts add, width is the maximum.
    pub fn then(&mut self, other: &Metrics) {
        self.rotation_depth += other.rotation_depth;
        self.total_depth += other.total_depth;
        self.swap_depth += other.swap_depth;
        self.width = self.width.max(other.width);
        for (k, v) in &other.gate_counts {
            *self.gate_counts.entry(k).or_insert(0) += v;
        }
    }

    /// `other` repeated `times` in series.
    pub fn then_repeated(&mut self, other: &Metrics, times: u64) {
        self.rotation_depth += other.rotation_depth * times;
        self.total_depth += other.total_depth * times;
        self.swap_depth += other.swap_depth * times;
        self.width = self.width.max(other.width);
        for (k, v) in &other.gate_counts {
            *self.gate_counts.entry(k).or_insert(0) += v * times;
        }
    }

    pub fn rotation_count(&self) -> u64 {
        ["rz", "crz", "mcrz"].iter().map(|k| self.gate_counts.get(k).copied().unwrap_or(0)).sum()
    }
}

/// Layout snapshot: the orbital layout expected once every wire has seen
/// the recorded number of fermionic swaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub swaps_per_wire: Vec<usize>,
    pub layout: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubits: Vec<QubitInfo>,
    moments: Vec<Vec<Gate>>,
    frontier: Vec<usize>,
    free_ancillas: Vec<usize>,
    n_precision: usize,
    n_orbitals: usize,
    layout: Vec<usize>,
    swaps_per_wire: Vec<usize>,
    checkpoints: Vec<Checkpoint>,
    /// The circuit implements `exp(-i global_phase)` times its gates.
    pub global_phase: f64,
}

impl Circuit {
    /// `b` precision qubits (indices `0..b`) then `m` orbital wires.
    pub fn new(m: usize, b: usize) -> Self {
        let mut qubits = Vec::with_capacity(m + b);
        qubits.extend((0..b).map(|label| QubitInfo { role: Role::Precision, label }));
        qubits.extend((0..m).map(|label| QubitInfo { role: Role::Orbital, label }));
        Circuit {
            frontier: vec![0; m + b],
            qubits,
            moments: Vec::new(),
            free_ancillas: Vec::new(),
            n_precision: b,
            n_orbitals: m,
            layout: (0..m).collect(),
            swaps_per_wire: vec![0; m],
            checkpoints: Vec::new(),
            global_phase: 0.0,
        }
    }

    /// Empty circuit with the same registers, starting layout and
    /// checkpoints. Existing ancillas stay reserved; new allocations get
    /// fresh qubits or ones released on the new circuit.
    pub fn empty_like(&self) -> Self {
        let mut c = Circuit::new(self.n_orbitals, self.n_precision);
        c.qubits = self.qubits.clone();
        c.frontier = vec![0; self.qubits.len()];
        c.layout = self.initial_layout();
        c.checkpoints = self.checkpoints.clone();
        c.global_phase = self.global_phase;
        c
    }

    fn initial_layout(&self) -> Vec<usize> {
        let mut layout = self.layout.clone();
        let swaps: Vec<(usize, usize)> = self
            .moments
            .iter()
            .flatten()
            .filter(|g| g.kind == GateKind::FermionicSwap)
            .map(|g| (self.orbital_wire(g.qubits[0]).unwrap(), self.orbital_wire(g.qubits[1]).unwrap()))
            .collect();
        for &(a, b) in swaps.iter().rev() {
            layout.swap(a, b);
        }
        layout
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn n_precision(&self) -> usize {
        self.n_precision
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn n_ancillas(&self) -> usize {
        self.qubits.len() - self.n_precision - self.n_orbitals
    }

    pub fn qubits(&self) -> &[QubitInfo] {
        &self.qubits
    }

    pub fn moments(&self) -> &[Vec<Gate>] {
        &self.moments
    }

    pub fn depth(&self) -> usize {
        self.moments.len()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.moments.iter().flatten()
    }

    pub fn precision_qubit(&self, k: usize) -> usize {
        assert!(k < self.n_precision, "precision index out of range");
        k
    }

    /// Qubit index of orbital wire `w`.
    pub fn orbital_qubit(&self, w: usize) -> usize {
        assert!(w < self.n_orbitals, "orbital wire out of range");
        self.n_precision + w
    }

    pub fn orbital_wire(&self, q: usize) -> Option<usize> {
        (q >= self.n_precision && q < self.n_precision + self.n_orbitals).then(|| q - self.n_precision)
    }

    /// Mode currently sitting on each orbital wire.
    pub fn layout(&self) -> &[usize] {
        &self.layout
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    /// Records the current orbital layout as a checkpoint.
    pub fn checkpoint(&mut self) {
        self.checkpoints.push(Checkpoint { swaps_per_wire: self.swaps_per_wire.clone(), layout: self.layout.clone() });
    }

    /// Takes the lowest free pooled ancilla or allocates a new one. Callers
    /// must return ancillas in `|0⟩`.
    pub fn alloc_ancilla(&mut self) -> usize {
        if let Some(q) = self.free_ancillas.pop() {
            return q;
        }
        let q = self.qubits.len();
        let label = self.n_ancillas();
        self.qubits.push(QubitInfo { role: Role::Ancilla, label });
        self.frontier.push(0);
        q
    }

    pub fn release_ancilla(&mut self, q: usize) {
        debug_assert_eq!(self.qubits[q].role, Role::Ancilla);
        debug_assert!(!self.free_ancillas.contains(&q));
        let pos = self.free_ancillas.partition_point(|&x| x > q);
        self.free_ancillas.insert(pos, q);
    }

    fn check_gate(&self, g: &Gate) -> Result<()> {
        g.validate(self.qubits.len())?;
        if g.kind == GateKind::FermionicSwap {
            match (self.orbital_wire(g.qubits[0]), self.orbital_wire(g.qubits[1])) {
                (Some(a), Some(b)) if a.abs_diff(b) == 1 => {}
                _ => {
                    return Err(Error::Structure(format!(
                        "fermionic swap on non-adjacent orbital wires {} {}",
                        g.qubits[0], g.qubits[1]
                    )))
                }
            }
        }
        Ok(())
    }

    fn place(&mut self, idx: usize, g: Gate) {
        if idx == self.moments.len() {
            self.moments.push(Vec::new());
        }
        if g.kind == GateKind::FermionicSwap {
            let a = self.orbital_wire(g.qubits[0]).unwrap();
            let b = self.orbital_wire(g.qubits[1]).unwrap();
            self.layout.swap(a, b);
            self.swaps_per_wire[a] += 1;
            self.swaps_per_wire[b] += 1;
        }
        self.moments[idx].push(g);
    }

    /// Places `g` in the earliest moment after all gates on its qubits.
    pub fn append(&mut self, g: Gate) -> Result<usize> {
        self.check_gate(&g)?;
        let idx = g.qubits.iter().map(|&q| self.frontier[q]).max().unwrap_or(0);
        for &q in &g.qubits {
            self.frontier[q] = idx + 1;
        }
        self.place(idx, g);
        Ok(idx)
    }

    /// Appends a gate known to be valid; panics otherwise.
    pub fn push(&mut self, g: Gate) {
        self.append(g).expect("generator emitted an invalid gate");
    }

    /// Places all gates in one moment. Gates may share qubits only if every
    /// gate on a shared qubit is diagonal.
    pub fn push_layer(&mut self, gates: Vec<Gate>) -> Result<Option<usize>> {
        if gates.is_empty() {
            return Ok(None);
        }
        let mut users: BTreeMap<usize, (usize, bool)> = BTreeMap::new();
        for g in &gates {
            self.check_gate(g)?;
            for &q in &g.qubits {
                let e = users.entry(q).or_insert((0, true));
                e.0 += 1;
                e.1 &= g.is_diagonal();
            }
        }
        if let Some((q, _)) = users.iter().find(|(_, (n, diag))| *n > 1 && !*diag) {
            return Err(Error::Structure(format!("non-diagonal gates collide on qubit {q}")));
        }
        let idx = users.keys().map(|&q| self.frontier[q]).max().unwrap_or(0);
        for &q in users.keys() {
            self.frontier[q] = idx + 1;
        }
        for g in gates {
            self.place(idx, g);
        }
        Ok(Some(idx))
    }

    /// Appends another circuit over the same registers, gate by gate with
    /// moments kept together, adding its global phase.
    pub fn extend_from(&mut self, other: &Circuit) -> Result<()> {
        while self.qubits.len() < other.qubits.len() {
            self.alloc_ancilla();
        }
        for m in &other.moments {
            self.push_layer(m.clone())?;
        }
        self.global_phase += other.global_phase;
        Ok(())
    }

    /// Checks moment disjointness, operand validity, and that replaying the
    /// fermionic swaps reproduces every checkpoint.
    pub fn validate(&self) -> Result<()> {
        for (i, m) in self.moments.iter().enumerate() {
            let mut users: BTreeMap<usize, (usize, bool)> = BTreeMap::new();
            for g in m {
                self.check_gate(g)?;
                for &q in &g.qubits {
                    let e = users.entry(q).or_insert((0, true));
                    e.0 += 1;
                    e.1 &= g.is_diagonal();
                }
            }
            if let Some((q, _)) = users.iter().find(|(_, (n, diag))| *n > 1 && !*diag) {
                return Err(Error::Structure(format!("moment {i}: collision on qubit {q}")));
            }
        }
        self.verify_modeline()
    }

    fn verify_modeline(&self) -> Result<()> {
        let swaps: Vec<(usize, usize)> = self
            .gates()
            .filter(|g| g.kind == GateKind::FermionicSwap)
            .map(|g| (self.orbital_wire(g.qubits[0]).unwrap(), self.orbital_wire(g.qubits[1]).unwrap()))
            .collect();
        let start = self.initial_layout();
        for (k, cp) in self.checkpoints.iter().enumerate() {
            let mut seen = vec![0usize; self.n_orbitals];
            let mut layout = start.clone();
            for &(a, b) in &swaps {
                if seen[a] < cp.swaps_per_wire[a] && seen[b] < cp.swaps_per_wire[b] {
                    layout.swap(a, b);
                }
                seen[a] += 1;
                seen[b] += 1;
            }
            if layout != cp.layout {
                return Err(Error::Structure(format!("checkpoint {k}: swaps give {layout:?}, expected {:?}", cp.layout)));
            }
        }
        Ok(())
    }

    pub fn rotation_depth(&self) -> u64 {
        self.moments.iter().filter(|m| m.iter().any(Gate::is_rotation)).count() as u64
    }

    pub fn width(&self) -> u64 {
        self.qubits.len() as u64
    }

    pub fn metrics(&self, model: &CostModel) -> Metrics {
        let mut gate_counts = BTreeMap::new();
        let mut total_depth = 0;
        let mut swap_depth = 0;
        for m in &self.moments {
            total_depth += m.iter().map(|g| model.weight(g)).max().unwrap_or(0);
            if m.iter().any(|g| matches!(g.kind, GateKind::FermionicSwap | GateKind::Swap)) {
                swap_depth += 1;
            }
            for g in m {
                *gate_counts.entry(g.kind.name()).or_insert(0) += 1;
            }
        }
        Metrics {
            rotation_depth: self.rotation_depth(),
            total_depth,
            swap_depth,
            width: self.width(),
            gate_counts,
        }
    }

    /// Short human-readable listing, one moment per line.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for (i, m) in self.moments.iter().enumerate() {
            out.push_str(&format!("{i:4}:"));
            for g in m {
                out.push_str(&format!(" {}{:?}", g.kind.name(), g.qubits.as_slice()));
                if g.kind.has_angle() {
                    out.push_str(&format!("({:.4})", g.angle));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Rebuilds a circuit from explicit parts, as read back from a file.
pub fn from_parts(
    qubits: Vec<QubitInfo>,
    moments: Vec<Vec<Gate>>,
    global_phase: f64,
) -> Result<Circuit> {
    let b = qubits.iter().filter(|q| q.role == Role::Precision).count();
    let m = qubits.iter().filter(|q| q.role == Role::Orbital).count();
    for (i, q) in qubits.iter().enumerate() {
        let expect = if i < b {
            Role::Precision
        } else if i < b + m {
            Role::Orbital
        } else {
            Role::Ancilla
        };
        if q.role != expect {
            return Err(Error::Structure(format!("qubit {i} has role {}, expected {}", q.role.name(), expect.name())));
        }
    }
    let mut c = Circuit::new(m, b);
    while c.n_qubits() < qubits.len() {
        c.alloc_ancilla();
    }
    for moment in moments {
        c.push_layer(moment)?;
    }
    c.global_phase = global_phase;
    Ok(c)
}
