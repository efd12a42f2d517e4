//! Circuits for Hamiltonian terms.
//!
//! Every off-diagonal term restricted to its block of adjacent wires is
//! rank 2: `c (|x⟩⟨y| + |y⟩⟨x|)`. A CNOT ladder from a pivot wire maps
//! `x, y` to a pair differing only on the pivot, a Hadamard turns the
//! rotation into a Z rotation, and the remaining block wires become
//! controls. Quad pairings share the same ladder, so their three cores sit
//! in one diagonal layer. The baseline instead exponentiates each Pauli
//! string of the Jordan-Wigner expansion separately.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use smallvec::SmallVec;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::fermion::{act_on_basis, Ladder, LadderKind};
use crate::hamiltonian::{Term, TermIndices};
use crate::linalg::C64;

/// Basis change, diagonal core, and inverse basis change.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TermTemplate {
    pub basis_in: Vec<Gate>,
    pub core: Vec<Gate>,
    pub basis_out: Vec<Gate>,
    pub global_phase: f64,
}

impl TermTemplate {
    pub fn emit(&self, circ: &mut Circuit) {
        for g in &self.basis_in {
            circ.push(g.clone());
        }
        circ.push_layer(self.core.clone()).expect("template cores are diagonal");
        for g in &self.basis_out {
            circ.push(g.clone());
        }
        circ.global_phase += self.global_phase;
    }
}

/// Rank-2 piece `amp (|x⟩⟨y| + |y⟩⟨x|)` on a block (bit 0 of the block is
/// the most significant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank2 {
    pub x: u32,
    pub y: u32,
    pub amp: f64,
}

/// Local form of one term on its block.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalForm {
    /// `exp(-iτ c (L + L†))` with `L` diagonal: `2c n_p` or `2c n_p n_q`.
    Number { wire: usize, weight: f64 },
    Density { wires: [usize; 2], weight: f64 },
    Rank2(Rank2),
}

/// Restricts a term to a block holding `modes` in wire order. Jordan-Wigner
/// strings outside the block cancel because every term has an even number
/// of ladder operators and blocks are contiguous.
pub fn local_form(term: &Term, modes: &[usize]) -> Result<LocalForm> {
    let k = modes.len();
    let local = |mode: usize| {
        modes.iter().position(|&x| x == mode).ok_or_else(|| Error::Structure("term mode outside its block".into()))
    };
    let factors: SmallVec<[Ladder; 4]> = term
        .ladder()
        .factors
        .iter()
        .map(|l| local(l.mode).map(|m| Ladder { mode: m, kind: l.kind }))
        .collect::<Result<_>>()?;
    match term.indices {
        TermIndices::One(p, q) if p == q => return Ok(LocalForm::Number { wire: local(p)?, weight: 2.0 * term.coeff }),
        TermIndices::Two([p, q, r, s]) if p == s && q == r => {
            let (a, b) = (local(p)?, local(q)?);
            return Ok(LocalForm::Density { wires: [a.min(b), a.max(b)], weight: 2.0 * term.coeff });
        }
        _ => {}
    }
    let mut piece = None;
    for y in 0..(1u32 << k) {
        if let Some((sign, x)) = act_on_basis(&factors, y, k) {
            if piece.is_some() || x == y {
                return Err(Error::Structure("term is not rank 2 on its block".into()));
            }
            piece = Some(Rank2 { x, y, amp: sign * term.coeff });
        }
    }
    piece.map(LocalForm::Rank2).ok_or_else(|| Error::Structure("term vanishes on its block".into()))
}

fn bit(v: u32, i: usize, k: usize) -> bool {
    v >> (k - 1 - i) & 1 == 1
}

/// Basis change shared by rank-2 pieces with the same differing wires:
/// returns `(pivot, ladder targets)`.
fn ladder_for(x: u32, y: u32, k: usize) -> (usize, SmallVec<[usize; 4]>) {
    let diff: SmallVec<[usize; 4]> = (0..k).filter(|&i| bit(x ^ y, i, k)).collect();
    let pivot = *diff.last().expect("x and y differ");
    (pivot, diff[..diff.len() - 1].iter().copied().collect())
}

/// Controlled core for one piece after the shared basis change.
fn rank2_core(wires: &[usize], piece: &Rank2, tau: f64, pivot: usize) -> Gate {
    let k = wires.len();
    let z = if bit(piece.x, pivot, k) { piece.y } else { piece.x };
    let controls: SmallVec<[(usize, bool); 4]> =
        (0..k).filter(|&i| i != pivot).map(|i| (wires[i], bit(z, i, k))).collect();
    Gate::controlled_rz(&controls, wires[pivot], 2.0 * piece.amp * tau)
}

/// Template for rank-2 pieces that all differ on the same wires, so they
/// share one ladder and one diagonal core layer.
pub fn shared_rank2_template(wires: &[usize], pieces: &[Rank2], tau: f64) -> Result<TermTemplate> {
    let k = wires.len();
    let first = pieces.first().ok_or_else(|| Error::Argument("no pieces".into()))?;
    let (pivot, targets) = ladder_for(first.x, first.y, k);
    if pieces.iter().any(|p| ladder_for(p.x, p.y, k) != (pivot, targets.clone())) {
        return Err(Error::Structure("pieces do not share a basis change".into()));
    }
    let mut basis_in: Vec<Gate> = targets.iter().map(|&t| Gate::cx(wires[pivot], wires[t])).collect();
    basis_in.push(Gate::h(wires[pivot]));
    let basis_out = basis_in.iter().rev().cloned().collect();
    let core = pieces.iter().map(|p| rank2_core(wires, p, tau, pivot)).collect();
    Ok(TermTemplate { basis_in, core, basis_out, global_phase: 0.0 })
}

/// `exp(-iψ n)` as `e^{-iψ/2} Rz(-ψ)`.
fn number_template(q: usize, psi: f64) -> TermTemplate {
    TermTemplate { core: alloc::vec![Gate::rz(q, -psi)], global_phase: psi / 2.0, ..Default::default() }
}

/// `exp(-iφ n_a n_b)` as `e^{-iφ/4} Rz_a(-φ/2) CRz(a→b, -φ)`.
fn density_template(a: usize, b: usize, phi: f64) -> TermTemplate {
    TermTemplate {
        core: alloc::vec![Gate::rz(a, -phi / 2.0), Gate::crz(a, b, -phi)],
        global_phase: phi / 4.0,
        ..Default::default()
    }
}

/// Templates implementing `Π exp(-iτ H_t)` for the terms of one block, in
/// application order. `wires` are the qubits holding `modes` (wire order).
/// With `reversed` the non-commuting triple pieces run in reverse order.
pub fn block_templates(
    wires: &[usize],
    modes: &[usize],
    terms: &[Term],
    tau: f64,
    reversed: bool,
) -> Result<Vec<TermTemplate>> {
    if wires.len() != modes.len() {
        return Err(Error::Argument("wire and mode counts differ".into()));
    }
    let mut diagonal: Vec<TermTemplate> = Vec::new();
    let mut pieces: Vec<Rank2> = Vec::new();
    for t in terms {
        if t.coeff == 0.0 {
            continue;
        }
        match local_form(t, modes)? {
            LocalForm::Number { wire, weight } => diagonal.push(number_template(wires[wire], weight * tau)),
            LocalForm::Density { wires: [a, b], weight } => {
                diagonal.push(density_template(wires[a], wires[b], weight * tau))
            }
            LocalForm::Rank2(r) => pieces.push(r),
        }
    }
    let mut out = Vec::new();
    if !diagonal.is_empty() {
        let mut merged = TermTemplate::default();
        for d in diagonal {
            merged.core.extend(d.core);
            merged.global_phase += d.global_phase;
        }
        out.push(merged);
    }
    if pieces.is_empty() {
        return Ok(out);
    }
    let k = wires.len();
    let shared = pieces.iter().all(|p| ladder_for(p.x, p.y, k) == ladder_for(pieces[0].x, pieces[0].y, k));
    if shared {
        out.push(shared_rank2_template(wires, &pieces, tau)?);
    } else {
        if reversed {
            pieces.reverse();
        }
        for p in &pieces {
            out.push(shared_rank2_template(wires, core::slice::from_ref(p), tau)?);
        }
    }
    Ok(out)
}

/// Emits the block's terms into `circ`.
pub fn emit_block(circ: &mut Circuit, wires: &[usize], modes: &[usize], terms: &[Term], tau: f64, reversed: bool) -> Result<()> {
    for t in block_templates(wires, modes, terms, tau, reversed)? {
        t.emit(circ);
    }
    Ok(())
}

fn standalone(m: usize, terms: &[Term], tau: f64) -> Result<Circuit> {
    let mut c = Circuit::new(m, 0);
    let modes: Vec<usize> = (0..m).collect();
    let wires: Vec<usize> = (0..m).map(|w| c.orbital_qubit(w)).collect();
    emit_block(&mut c, &wires, &modes, terms, tau, false)?;
    Ok(c)
}

/// `exp(-iτ h (n_0 + n_0))` on one wire.
pub fn singleton_template(h: f64, tau: f64) -> Circuit {
    standalone(1, &[Term::one_body(0, 0, h)], tau).expect("singleton")
}

/// Hopping `h_01` and density `h_0110` on two wires.
pub fn pair_template(hopping: f64, density: f64, tau: f64) -> Circuit {
    let terms = [Term::one_body(0, 1, hopping), Term::two_body([0, 1, 1, 0], density).expect("density term")];
    standalone(2, &terms, tau).expect("pair")
}

/// The three number-controlled hoppings on wires 0,1,2, spectator 0 then
/// 1 then 2, with the given coefficients.
pub fn triple_template(coeffs: [f64; 3], tau: f64) -> Circuit {
    let terms = triple_terms([0, 1, 2], coeffs);
    standalone(3, &terms, tau).expect("triple")
}

/// Canonical triple terms on a sorted support, in application order.
pub fn triple_terms(s: [usize; 3], coeffs: [f64; 3]) -> Vec<Term> {
    crate::hamiltonian::support_keys(&s)
        .into_iter()
        .zip(coeffs)
        .map(|(k, c)| Term { indices: k, coeff: c })
        .collect()
}

/// Canonical quad terms (pairings `01|23`, `02|13`, `03|12`) on a sorted
/// support.
pub fn quad_terms(s: [usize; 4], coeffs: [f64; 3]) -> Vec<Term> {
    crate::hamiltonian::support_keys(&s)
        .into_iter()
        .zip(coeffs)
        .map(|(k, c)| Term { indices: k, coeff: c })
        .collect()
}

/// The three pairings of wires 0..4 with one shared basis change.
pub fn quad_template(coeffs: [f64; 3], tau: f64) -> Circuit {
    standalone(4, &quad_terms([0, 1, 2, 3], coeffs), tau).expect("quad")
}

/// Pauli expansion of `coeff (L + L†)`: Hermitian Pauli strings keyed by
/// `(x_mask, z_mask)` (bit `k` is mode `k`, `Y` where both bits are set)
/// with real coefficients. The identity component is included.
pub fn pauli_expansion(term: &Term) -> Result<BTreeMap<(u128, u128), f64>> {
    if term.max_index() >= 128 {
        return Err(Error::Argument("Pauli expansion supports at most 128 modes".into()));
    }
    // Products X^x Z^z with complex coefficients.
    let mut acc: BTreeMap<(u128, u128), C64> = BTreeMap::new();
    let mut l: BTreeMap<(u128, u128), C64> = BTreeMap::new();
    l.insert((0, 0), C64::new(1.0, 0.0));
    for f in term.ladder().factors {
        let k = f.mode;
        let below = (1u128 << k) - 1;
        let e = 1u128 << k;
        let s = if f.kind == LadderKind::Create { 0.5 } else { -0.5 };
        let factor = [((e, below), 0.5), ((e, below | e), s)];
        let mut next: BTreeMap<(u128, u128), C64> = BTreeMap::new();
        for (&(x1, z1), &c1) in &l {
            for &((x2, z2), c2) in &factor {
                let sign = if (z1 & x2).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                *next.entry((x1 ^ x2, z1 ^ z2)).or_insert(C64::new(0.0, 0.0)) += c1 * sign * c2;
            }
        }
        l = next;
    }
    for (&(x, z), &c) in &l {
        // (X^x Z^z)† = Z^z X^x = (-1)^{|x&z|} X^x Z^z
        let dag_sign = if (x & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        *acc.entry((x, z)).or_insert(C64::new(0.0, 0.0)) += (c + c.conj() * dag_sign) * term.coeff;
    }
    let mut out = BTreeMap::new();
    for ((x, z), c) in acc {
        // X^x Z^z = (-i)^{|x&z|} P with P using Y = iXZ.
        let phase = match (x & z).count_ones() % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        };
        let v = c * phase;
        if v.norm() > 1e-14 {
            if v.im.abs() > 1e-12 {
                return Err(Error::Structure("non-Hermitian Pauli coefficient".into()));
            }
            out.insert((x, z), v.re);
        }
    }
    Ok(out)
}

/// `exp(-iα P)` for a Hermitian Pauli string on the given wires.
pub fn pauli_rotation(circ: &mut Circuit, wire_of_mode: &dyn Fn(usize) -> usize, x: u128, z: u128, alpha: f64) {
    let support: Vec<usize> = (0..128).filter(|&k| (x | z) >> k & 1 == 1).collect();
    if support.is_empty() {
        circ.global_phase += alpha;
        return;
    }
    let wires: Vec<usize> = support.iter().map(|&k| wire_of_mode(k)).collect();
    let mut pre: Vec<Gate> = Vec::new();
    for (&k, &w) in support.iter().zip(&wires) {
        match (x >> k & 1 == 1, z >> k & 1 == 1) {
            (true, false) => pre.push(Gate::h(w)),
            (true, true) => {
                pre.push(Gate::sdg(w));
                pre.push(Gate::h(w));
            }
            _ => {}
        }
    }
    let ladder: Vec<Gate> = wires.windows(2).map(|p| Gate::cx(p[0], p[1])).collect();
    for g in pre.iter().chain(&ladder) {
        circ.push(g.clone());
    }
    circ.push(Gate::rz(*wires.last().unwrap(), 2.0 * alpha));
    for g in ladder.iter().rev() {
        circ.push(g.clone());
    }
    for g in pre.iter().rev() {
        let inv = match g.kind {
            crate::circuit::GateKind::Sdg => Gate::s(g.qubits[0]),
            _ => g.clone(),
        };
        circ.push(inv);
    }
}

/// Emits `exp(-iτ H_term)` as one rotation per Pauli string.
pub fn emit_baseline(circ: &mut Circuit, term: &Term, wire_of_mode: &dyn Fn(usize) -> usize, tau: f64) -> Result<()> {
    for ((x, z), c) in pauli_expansion(term)? {
        pauli_rotation(circ, wire_of_mode, x, z, c * tau);
    }
    Ok(())
}

/// Baseline circuit for a term on `m` orbitals (mode `k` on wire `k`).
pub fn baseline_pauli_template(term: &Term, m: usize, tau: f64) -> Result<Circuit> {
    let mut c = Circuit::new(m, 0);
    let b = c.n_precision();
    emit_baseline(&mut c, term, &|k| b + k, tau)?;
    Ok(c)
}
