//! Fourth-order product formulas over a schedule, and phase estimation.
//!
//! A second-order factor `S2(x)` runs every stage forward at half angle,
//! returns to the identity layout, then runs the stages backward (reversed
//! routing, reversed piece order) at half angle. The fourth-order step is
//! `S2(α dt) S2(β dt) S2(α dt)` repeated `N` times with `dt = t/N`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::hamiltonian::{MolecularHamiltonian, Term, TermIndices, TermSource};
use crate::linalg::{expm_hermitian, CMat, C64};
use crate::passes::{self, Pass};
use crate::schedule::{Schedule, Stage, SwapLayer};
use crate::templates::{block_templates, emit_baseline};

/// `α = 1/(2 - 2^(1/3))`, `β = 1 - 2α`.
pub fn trotter_coefficients() -> (f64, f64) {
    let alpha = 1.0 / (2.0 - libm::cbrt(2.0));
    (alpha, 1.0 - 2.0 * alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterPlan {
    pub steps: usize,
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
    /// Constant added to the Hamiltonian, carried as a global phase.
    pub shift: f64,
}

impl TrotterPlan {
    pub fn new(t: f64, steps: usize) -> Self {
        let (alpha, beta) = trotter_coefficients();
        TrotterPlan { steps: steps.max(1), alpha, beta, t, shift: 0.0 }
    }

    /// Same plan at evolution time `t`.
    pub fn at(self, t: f64) -> Self {
        TrotterPlan { t, ..self }
    }
}

/// Every nonzero term of `h` must sit on exactly one block.
pub fn check_coverage(h: &MolecularHamiltonian, schedule: &Schedule) -> Result<()> {
    if schedule.m != h.orbitals() {
        return Err(Error::Coverage(format!("schedule for {} orbitals, Hamiltonian has {}", schedule.m, h.orbitals())));
    }
    let mut seen = BTreeSet::new();
    for (i, st) in schedule.stages.iter().enumerate() {
        for b in &st.blocks {
            let mut s = b.clone();
            s.sort_unstable();
            if !seen.insert(s.clone()) {
                return Err(Error::Coverage(format!("stage {i}: support {s:?} already covered")));
            }
        }
    }
    for t in h.terms().iter().filter(|t| t.coeff != 0.0) {
        let s: Vec<usize> = t.support().into_iter().collect();
        if !seen.contains(&s) {
            return Err(Error::Coverage(format!("no block for support {s:?}")));
        }
    }
    Ok(())
}

/// Emits swap layers as fermionic swaps, in reverse order if asked.
pub fn emit_routing(circ: &mut Circuit, layers: &[SwapLayer], reverse: bool) -> Result<()> {
    let mut emit = |layer: &SwapLayer| {
        let gates = layer.iter().map(|&w| Gate::fswap(circ.orbital_qubit(w), circ.orbital_qubit(w + 1))).collect();
        circ.push_layer(gates).map(|_| ())
    };
    if reverse {
        layers.iter().rev().try_for_each(&mut emit)
    } else {
        layers.iter().try_for_each(&mut emit)
    }
}

/// Emits the blocks of a stage at angle scale `tau`, assuming the layout
/// already matches. `backward` reverses the piece order inside blocks.
pub fn emit_stage_blocks(circ: &mut Circuit, source: &impl TermSource, stage: &Stage, tau: f64, backward: bool) -> Result<()> {
    for (block, start) in stage.blocks.iter().zip(stage.block_wires()) {
        let mut support = block.clone();
        support.sort_unstable();
        let terms = source.terms_on(&support);
        let wires: Vec<usize> = (start..start + block.len()).map(|w| circ.orbital_qubit(w)).collect();
        let mut ts = block_templates(&wires, block, &terms, tau, false)?;
        if backward {
            ts.reverse();
        }
        for t in ts {
            t.emit(circ);
        }
    }
    Ok(())
}

/// Emits `S2` with total angle scale `h`: forward stages at `h/2`, back to
/// the identity layout, backward stages at `h/2`.
pub fn emit_second_order(circ: &mut Circuit, source: &impl TermSource, schedule: &Schedule, h: f64) -> Result<()> {
    let half = h / 2.0;
    for st in &schedule.stages {
        emit_routing(circ, &st.routing, false)?;
        circ.checkpoint();
        emit_stage_blocks(circ, source, st, half, false)?;
    }
    emit_routing(circ, &schedule.exit_routing, false)?;
    circ.checkpoint();
    let mut back = &schedule.exit_routing;
    for st in schedule.stages.iter().rev() {
        emit_routing(circ, back, true)?;
        circ.checkpoint();
        emit_stage_blocks(circ, source, st, half, true)?;
        back = &st.routing;
    }
    emit_routing(circ, back, true)?;
    circ.checkpoint();
    Ok(())
}

/// Largest deviation, per stage and then for the exit routing, between the
/// emitted fermionic-swap layers and the signed permutation oracle.
pub fn routing_sign_deviations(schedule: &Schedule) -> Result<Vec<f64>> {
    let m = schedule.m;
    let mut out = Vec::with_capacity(schedule.stages.len() + 1);
    let mut current: Vec<usize> = (0..m).collect();
    let identity = current.clone();
    let routes = schedule
        .stages
        .iter()
        .map(|st| (&st.routing, &st.layout))
        .chain(core::iter::once((&schedule.exit_routing, &identity)));
    for (routing, layout) in routes {
        let mut c = Circuit::new(m, 0);
        emit_routing(&mut c, routing, false)?;
        let u = crate::sim::full_unitary(&c)?;
        let perm = crate::schedule::relative_permutation(&current, layout);
        let want = crate::fermion::fermionic_permutation_matrix(&perm, m)?;
        out.push(crate::linalg::max_abs_diff(&u, &want));
        current.clone_from(layout);
    }
    Ok(out)
}

/// Terms in the order a forward sweep applies them: stage by stage, block
/// by block, diagonal terms before rank-2 terms.
pub fn sweep_term_order(source: &impl TermSource, schedule: &Schedule) -> Vec<Term> {
    let mut out = Vec::new();
    for st in &schedule.stages {
        for b in &st.blocks {
            let mut s = b.clone();
            s.sort_unstable();
            let terms = source.terms_on(&s);
            let (diag, rest): (Vec<Term>, Vec<Term>) = terms.into_iter().filter(|t| t.coeff != 0.0).partition(is_diagonal);
            out.extend(diag);
            out.extend(rest);
        }
    }
    out
}

fn is_diagonal(t: &Term) -> bool {
    match t.indices {
        TermIndices::One(p, q) => p == q,
        TermIndices::Two([p, q, r, s]) => p == s && q == r,
    }
}

/// Dense oracle for `S2(h)`: the exact term exponentials at `h/2` in sweep
/// order, then in reverse order.
pub fn second_order_oracle(h: &MolecularHamiltonian, schedule: &Schedule, step: f64) -> Result<CMat> {
    let m = h.orbitals();
    let order = sweep_term_order(h, schedule);
    let exps: Vec<CMat> = order
        .iter()
        .map(|t| Ok(expm_hermitian(&t.matrix(m)?, step / 2.0)))
        .collect::<Result<_>>()?;
    let mut u = crate::linalg::identity(1 << m);
    for e in exps.iter().chain(exps.iter().rev()) {
        u = e * u;
    }
    Ok(u)
}

/// One `S2(x)` factor on a fresh circuit: angles are coefficient times
/// `plan.t · x`.
pub fn trotter_step_circuit(h: &MolecularHamiltonian, schedule: &Schedule, plan: &TrotterPlan, x: f64) -> Result<Circuit> {
    check_coverage(h, schedule)?;
    let mut c = Circuit::new(h.orbitals(), 0);
    emit_second_order(&mut c, h, schedule, plan.t * x)?;
    c.global_phase += plan.shift * plan.t * x;
    Ok(c)
}

/// Full fourth-order product formula for time `plan.t` on a register with
/// `b` idle precision qubits.
pub fn trotter_circuit(h: &MolecularHamiltonian, schedule: &Schedule, plan: &TrotterPlan, b: usize) -> Result<Circuit> {
    check_coverage(h, schedule)?;
    let mut c = Circuit::new(h.orbitals(), b);
    let dt = plan.t / plan.steps as f64;
    for _ in 0..plan.steps {
        for x in [plan.alpha, plan.beta, plan.alpha] {
            emit_second_order(&mut c, h, schedule, x * dt)?;
        }
    }
    c.global_phase += plan.shift * plan.t;
    Ok(c)
}

/// Baseline product formula: every term as serial Pauli rotations in
/// term order (reversed on the way back), each precision bit repeated
/// serially, controlled rotations lowered to CNOTs and Rz.
pub fn baseline_trotter_circuit(h: &MolecularHamiltonian, plan: &TrotterPlan, b: usize) -> Result<Circuit> {
    let mut c = Circuit::new(h.orbitals(), b);
    let terms: Vec<_> = h.terms().into_iter().filter(|t| t.coeff != 0.0).collect();
    let wire = |k: usize| b + k;
    let dt = plan.t / plan.steps as f64;
    for _ in 0..plan.steps {
        for x in [plan.alpha, plan.beta, plan.alpha] {
            for t in terms.iter().chain(terms.iter().rev()) {
                emit_baseline(&mut c, t, &wire, x * dt / 2.0)?;
            }
        }
    }
    c.global_phase += plan.shift * plan.t;
    if b == 0 {
        return Ok(c);
    }
    let c = passes::expand_precision_controls_serial(&c)?;
    passes::lower_crz(&c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpeConfig {
    pub b: usize,
    pub t1: f64,
    pub steps: usize,
}

impl QpeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.b == 0 || self.b > 20 {
            return Err(Error::Argument(format!("precision qubits must be in 1..=20, got {}", self.b)));
        }
        if !(self.t1 > 0.0 && self.t1.is_finite()) {
            return Err(Error::Argument(format!("t1 must be positive, got {}", self.t1)));
        }
        Ok(())
    }
}

/// `exp(iφ n_c n_t)` as Rz, CRz and a global phase.
fn controlled_phase(circ: &mut Circuit, c: usize, t: usize, phi: f64) {
    circ.push_layer(alloc::vec![Gate::rz(c, phi / 2.0), Gate::crz(c, t, phi)]).expect("diagonal layer");
    circ.global_phase -= phi / 4.0;
}

/// Inverse QFT on precision qubits `0..b` (qubit 0 most significant),
/// including the final bit reversal.
pub fn emit_inverse_qft(circ: &mut Circuit, b: usize) {
    for j in 0..b / 2 {
        circ.push(Gate::swap(j, b - 1 - j));
    }
    for j in (0..b).rev() {
        for k in (j + 1..b).rev() {
            let phi = -core::f64::consts::PI / (1u64 << (k - j)) as f64;
            controlled_phase(circ, k, j, phi);
        }
        circ.push(Gate::h(j));
    }
}

/// Controlled evolution `Σ_t |t⟩⟨t| ⊗ U(t·t1)` before any other pass.
pub fn controlled_evolution(h: &MolecularHamiltonian, schedule: &Schedule, plan: &TrotterPlan, b: usize) -> Result<Circuit> {
    let u = trotter_circuit(h, schedule, plan, b)?;
    passes::expand_precision_controls(&u)
}

/// Hadamards, controlled evolution, inverse QFT and measurement markers.
/// `passes` other than expansion then run over the whole circuit.
pub fn qpe_circuit(
    h: &MolecularHamiltonian,
    schedule: &Schedule,
    plan: &TrotterPlan,
    cfg: &QpeConfig,
    pipeline: &[Pass],
) -> Result<Circuit> {
    cfg.validate()?;
    let ev = controlled_evolution(h, schedule, &plan.at(cfg.t1), cfg.b)?;
    let mut c = ev.empty_like();
    c.global_phase = 0.0;
    c.push_layer((0..cfg.b).map(Gate::h).collect())?;
    c.extend_from(&ev)?;
    emit_inverse_qft(&mut c, cfg.b);
    c.push_layer((0..cfg.b).map(Gate::measure).collect())?;
    let rest: Vec<Pass> = pipeline.iter().copied().filter(|&p| p != Pass::Expand).collect();
    passes::run_pipeline(&c, &rest)
}

/// Readout distribution over the precision register with the orbitals
/// prepared in `orbital_state` (dimension `2^m`).
pub fn qpe_distribution(circ: &Circuit, orbital_state: &[C64]) -> Result<Vec<f64>> {
    let b = circ.n_precision();
    let m = circ.n_orbitals();
    let anc = circ.n_ancillas();
    let n = circ.n_qubits();
    if orbital_state.len() != 1 << m {
        return Err(Error::Argument(format!("initial state has dimension {}, expected {}", orbital_state.len(), 1usize << m)));
    }
    if n > crate::sim::cap() + crate::sim::STATE_EXTRA {
        return Err(Error::Cap { needed: n, cap: crate::sim::cap() + crate::sim::STATE_EXTRA });
    }
    let mut state = alloc::vec![C64::new(0.0, 0.0); 1 << n];
    for (i, a) in orbital_state.iter().enumerate() {
        state[i << anc] = *a;
    }
    crate::sim::apply(circ, &mut state)?;
    Ok(crate::sim::marginal_leading(&state, n, b))
}

/// Occupation string (`1` occupied, one character per orbital, orbital 0
/// first) as a basis state.
pub fn occupation_state(occ: &str, m: usize) -> Result<Vec<C64>> {
    let bits: Vec<char> = occ.chars().collect();
    if bits.len() != m || bits.iter().any(|c| *c != '0' && *c != '1') {
        return Err(Error::Argument(format!("occupation string must be {m} characters of 0/1, got `{occ}`")));
    }
    let idx = bits.iter().fold(0usize, |acc, &c| (acc << 1) | (c == '1') as usize);
    let mut v = alloc::vec![C64::new(0.0, 0.0); 1 << m];
    v[idx] = C64::new(1.0, 0.0);
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReadout {
    pub bin: usize,
    pub probability: f64,
    /// Fraction of a turn, `s / 2^b`.
    pub phase: f64,
    pub energy: f64,
    pub resolution: f64,
}

/// Converts the most probable bin to an energy `E = -2π s / (2^b t1)`.
/// Without `e_min` the energy lies in `(-2π/t1, 0]`; otherwise it is
/// shifted by multiples of `2π/t1` into `[e_min, e_min + 2π/t1)`.
pub fn read_energy(dist: &[f64], t1: f64, e_min: Option<f64>) -> Result<EnergyReadout> {
    if dist.is_empty() || !dist.len().is_power_of_two() {
        return Err(Error::Argument("distribution must have 2^b entries".into()));
    }
    let (bin, &probability) = dist
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("nonempty");
    let phase = bin as f64 / dist.len() as f64;
    let period = 2.0 * core::f64::consts::PI / t1;
    let mut energy = -phase * period;
    if let Some(lo) = e_min {
        energy -= libm::floor((energy - lo) / period) * period;
    }
    Ok(EnergyReadout { bin, probability, phase, energy, resolution: period / dist.len() as f64 })
}

/// Bin nearest to the phase of energy `e`, `frac(-e t1 / 2π)`.
pub fn nearest_bin(e: f64, t1: f64, b: usize) -> usize {
    let turns = -e * t1 / (2.0 * core::f64::consts::PI);
    let frac = turns - libm::floor(turns);
    let n = 1usize << b;
    (libm::round(frac * n as f64) as usize) % n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::schedule::build_schedule;
    use crate::sim::{full_unitary, ground_state};

    fn toy(m: usize, seed: u64) -> MolecularHamiltonian {
        let mut h = MolecularHamiltonian::new(m);
        let mut x = seed;
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for s in crate::schedule::all_supports(m) {
            for k in crate::hamiltonian::support_keys(&s) {
                h.add_term(crate::hamiltonian::Term { indices: k, coeff: next() }).unwrap();
            }
        }
        h
    }

    fn error(h: &MolecularHamiltonian, t: f64, steps: usize) -> f64 {
        let s = build_schedule(h);
        let c = trotter_circuit(h, &s, &TrotterPlan::new(t, steps), 0).unwrap();
        let u = full_unitary(&c).unwrap();
        max_abs_diff(&u, &expm_hermitian(&h.matrix().unwrap(), t))
    }

    #[test]
    fn coefficients_solve_order_conditions() {
        let (a, b) = trotter_coefficients();
        assert!((2.0 * a + b - 1.0).abs() < 1e-12);
        assert!((2.0 * a * a * a + b * b * b).abs() < 1e-12);
        assert!((a - 1.3512071919596578).abs() < 1e-15);
    }

    #[test]
    fn single_term_is_exact() {
        for (k, c) in [
            (crate::hamiltonian::TermIndices::One(1, 1), 0.7),
            (crate::hamiltonian::TermIndices::One(0, 2), -0.4),
            (crate::hamiltonian::TermIndices::Two([0, 2, 3, 1]), 0.9),
            (crate::hamiltonian::TermIndices::Two([1, 3, 3, 1]), 0.3),
        ] {
            let mut h = MolecularHamiltonian::new(4);
            h.add_term(crate::hamiltonian::Term { indices: k, coeff: c }).unwrap();
            let s = build_schedule(&h);
            let plan = TrotterPlan::new(0.8, 1);
            let u = full_unitary(&trotter_step_circuit(&h, &s, &plan, 1.0).unwrap()).unwrap();
            assert!(max_abs_diff(&u, &expm_hermitian(&h.matrix().unwrap(), 0.8)) < 1e-10);
        }
    }

    #[test]
    fn second_order_matches_term_oracle() {
        for (m, seed) in [(4, 3), (5, 9)] {
            let h = toy(m, seed);
            let s = build_schedule(&h);
            let plan = TrotterPlan::new(0.7, 1);
            let u = full_unitary(&trotter_step_circuit(&h, &s, &plan, 1.0).unwrap()).unwrap();
            assert!(max_abs_diff(&u, &second_order_oracle(&h, &s, 0.7).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn routing_signs_match_oracle() {
        for m in 2..=6 {
            let s = build_schedule(&crate::hamiltonian::DenseSynthetic::hashed(m, 2));
            let d = routing_sign_deviations(&s).unwrap();
            assert_eq!(d.len(), s.stages.len() + 1);
            assert!(d.iter().all(|&x| x < 1e-12), "m={m}");
        }
    }

    #[test]
    fn commuting_terms_are_exact() {
        let mut h = MolecularHamiltonian::new(4);
        h.add_one_body(0, 1, 0.6).unwrap();
        h.add_one_body(2, 3, -0.3).unwrap();
        h.add_two_body([0, 1, 1, 0], 0.25).unwrap();
        assert!(error(&h, 1.3, 1) < 1e-10);
    }

    #[test]
    fn fourth_order_convergence() {
        let h = toy(4, 17);
        let ts = [0.2, 0.1, 0.05, 0.025];
        let errs: Vec<f64> = ts.iter().map(|&t| error(&h, t, 1)).collect();
        let xs: Vec<f64> = ts.iter().map(|t| libm::log(*t)).collect();
        let ys: Vec<f64> = errs.iter().map(|e| libm::log(*e)).collect();
        let slope = fit_slope(&xs, &ys);
        assert!(slope >= 4.7, "slope {slope}, errors {errs:?}");
    }

    pub(crate) fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        num / den
    }

    #[test]
    fn modeline_checkpoints_hold() {
        let h = toy(5, 3);
        let s = build_schedule(&h);
        let c = trotter_circuit(&h, &s, &TrotterPlan::new(0.3, 2), 1).unwrap();
        c.validate().unwrap();
        assert_eq!(c.layout(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn coverage_is_enforced() {
        let h = toy(4, 1);
        let mut s = build_schedule(&h);
        s.stages.pop();
        assert!(matches!(trotter_circuit(&h, &s, &TrotterPlan::new(0.1, 1), 0), Err(Error::Coverage(_))));
    }

    #[test]
    fn controlled_evolution_blocks() {
        let h = toy(3, 5);
        let s = build_schedule(&h);
        let b = 2;
        let plan = TrotterPlan::new(0.0, 1);
        let t1 = 0.37;
        let ev = controlled_evolution(&h, &s, &plan.at(t1), b).unwrap();
        let full = full_unitary(&ev).unwrap();
        let d = 1 << 3;
        for t in 0..1usize << b {
            let want = full_unitary(&trotter_circuit(&h, &s, &plan.at(t as f64 * t1), 0).unwrap()).unwrap();
            let block = full.view((t * d, t * d), (d, d)).into_owned();
            assert!(max_abs_diff(&block, &want) < 1e-9);
        }
    }

    #[test]
    fn baseline_matches_controlled_evolution() {
        let h = toy(3, 8);
        let plan = TrotterPlan::new(0.3, 1);
        let u = full_unitary(&baseline_trotter_circuit(&h, &plan, 0).unwrap()).unwrap();
        let exact = expm_hermitian(&h.matrix().unwrap(), 0.3);
        assert!(max_abs_diff(&u, &exact) < 1e-3);
        let t1 = 0.2;
        let b = 2;
        let full = full_unitary(&baseline_trotter_circuit(&h, &plan.at(t1), b).unwrap()).unwrap();
        let d = 1 << 3;
        for t in 0..1usize << b {
            let want = full_unitary(&baseline_trotter_circuit(&h, &plan.at(t as f64 * t1), 0).unwrap()).unwrap();
            let block = full.view((t * d, t * d), (d, d)).into_owned();
            assert!(max_abs_diff(&block, &want) < 1e-9);
        }
    }

    #[test]
    fn inverse_qft_matches_dft() {
        for b in 1..=5 {
            let mut c = Circuit::new(0, b);
            emit_inverse_qft(&mut c, b);
            let u = full_unitary(&c).unwrap();
            let n = 1 << b;
            let want = CMat::from_fn(n, n, |s, t| {
                crate::linalg::cis(-2.0 * core::f64::consts::PI * (s * t) as f64 / n as f64) / libm::sqrt(n as f64)
            });
            assert!(max_abs_diff(&u, &want) < 1e-12, "b={b}");
        }
    }

    #[test]
    fn trivial_hamiltonian_reads_zero() {
        let h = MolecularHamiltonian::new(2);
        let s = build_schedule(&h);
        let cfg = QpeConfig { b: 1, t1: 1.0, steps: 1 };
        let c = qpe_circuit(&h, &s, &TrotterPlan::new(0.0, 1), &cfg, &[Pass::Expand]).unwrap();
        let d = qpe_distribution(&c, &occupation_state("10", 2).unwrap()).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_eigenstate_reads_exact_bits() {
        // n_0 eigenvalue 2h on occupied orbital 0; pick E t1 / 2π = -5/8
        let b = 3;
        let t1 = 1.0;
        let e = -2.0 * core::f64::consts::PI * 5.0 / 8.0;
        let mut h = MolecularHamiltonian::new(2);
        h.add_one_body(0, 0, e / 2.0).unwrap();
        let s = build_schedule(&h);
        let cfg = QpeConfig { b, t1, steps: 1 };
        let c = qpe_circuit(&h, &s, &TrotterPlan::new(0.0, 1), &cfg, &[Pass::Expand]).unwrap();
        let d = qpe_distribution(&c, &occupation_state("10", 2).unwrap()).unwrap();
        assert!((d[5] - 1.0).abs() < 1e-10, "{d:?}");
        let r = read_energy(&d, t1, None).unwrap();
        assert_eq!(nearest_bin(e, t1, b), 5);
        assert!((r.energy - e).abs() < 1e-12);
    }

    #[test]
    fn shift_moves_phase() {
        let b = 3;
        let t1 = 1.0;
        let mut h = MolecularHamiltonian::new(1);
        h.add_one_body(0, 0, -0.5).unwrap();
        let s = build_schedule(&h);
        let cfg = QpeConfig { b, t1, steps: 1 };
        let read = |shift: f64| {
            let plan = TrotterPlan { shift, ..TrotterPlan::new(0.0, 1) };
            let c = qpe_circuit(&h, &s, &plan, &cfg, &[Pass::Expand]).unwrap();
            read_energy(&qpe_distribution(&c, &occupation_state("1", 1).unwrap()).unwrap(), t1, None).unwrap()
        };
        let quarter = core::f64::consts::PI / 4.0;
        let (a, z) = (read(0.0), read(-quarter));
        let turns = z.phase - a.phase;
        assert!((turns - libm::floor(turns) - 1.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn readout_examples() {
        assert_eq!(read_energy(&[1.0, 0.0], 2.0, None).unwrap().energy, 0.0);
        let r = read_energy(&[0.0, 0.0, 1.0, 0.0], 1.0, None).unwrap();
        assert!((r.energy + core::f64::consts::PI).abs() < 1e-15);
        let r = read_energy(&[0.0, 0.0, 0.0, 1.0], 1.0, Some(0.0)).unwrap();
        assert!((r.energy - core::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(read_energy(&[], 1.0, None).is_err());
    }

    #[test]
    fn toy_ground_energy_within_one_bin() {
        let h = toy(4, 29);
        let (e0, v) = ground_state(&h).unwrap();
        let s = build_schedule(&h);
        let b = 4;
        let t1 = 1.3 / e0.abs().max(1.0);
        let cfg = QpeConfig { b, t1, steps: 40 };
        let c = qpe_circuit(&h, &s, &TrotterPlan::new(0.0, cfg.steps), &cfg, &[Pass::Expand]).unwrap();
        let d = qpe_distribution(&c, &v).unwrap();
        let r = read_energy(&d, t1, None).unwrap();
        let want = nearest_bin(e0, t1, b);
        let n = 1 << b;
        assert!((r.bin + n - want) % n <= 1 || (want + n - r.bin) % n <= 1);
        assert!(r.probability >= 0.4, "e0 {e0} want {want} got {} {d:?}", r.bin);
    }
}
