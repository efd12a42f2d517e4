//! Depth and width accounting without building whole circuits.
//!
//! The optimized side streams the schedule once and keeps, per distinct
//! stage shape (kind, block count, which terms are present), a count. Each
//! shape is synthesized once on a compact register and run through the
//! passes. Stages are summed as if separated by barriers.
//!
//! The baseline side walks every support once. A Pauli rotation circuit
//! depends only on its letter sequence, and Jordan-Wigner strings only
//! stretch the CNOT chain, so Pauli strings are computed on a copy of the
//! support with gaps shortened to one wire and then stretched back.
//!
//! One sweep applies every term once. A fourth-order step is six sweeps
//! (three second-order factors, each forward and backward) plus one layer
//! of precision rotations carrying the accumulated global phase.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Circuit, CostModel, Gate, Metrics};
use crate::error::Result;
use crate::hamiltonian::{support_keys, Term, TermSource};
use crate::passes::Pass;
use crate::schedule::{build_schedule_with, StageKind};
use crate::templates::{block_templates, pauli_expansion};

/// Sweeps per fourth-order step.
pub const SWEEPS_PER_STEP: u64 = 6;

const KINDS: [StageKind; 4] = [StageKind::Singleton, StageKind::Pair, StageKind::Triple, StageKind::Quad];

/// Bit `j` set when the `j`-th key of [`support_keys`] has a term.
pub fn term_mask(source: &impl TermSource, support: &[usize]) -> u8 {
    let keys = support_keys(support);
    source
        .terms_on(support)
        .iter()
        .fold(0, |acc, t| acc | keys.iter().position(|k| *k == t.indices).map_or(0, |j| 1 << j))
}

/// One block of a stage: its term mask and a representative local wire
/// order. Orders giving the same templates share a representative.
pub type BlockShape = (u8, Vec<u8>);

/// Stage shape: kind, block count and the distinct block shapes present.
pub type StageShape = (StageKind, usize, Vec<BlockShape>);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KindTally {
    pub stages: u64,
    pub blocks: u64,
    pub terms: u64,
    pub swap_layers: u64,
    pub swap_count: u64,
}

/// Everything the optimized accounting needs from one schedule pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScheduleProfile {
    pub m: usize,
    pub shapes: BTreeMap<StageShape, u64>,
    pub kinds: BTreeMap<StageKind, KindTally>,
    pub exit_layers: u64,
    pub exit_swaps: u64,
}

fn mask_terms(modes: &[usize], mask: u8) -> Vec<Term> {
    support_keys(modes)
        .into_iter()
        .enumerate()
        .filter(|(j, _)| mask >> j & 1 == 1)
        .map(|(_, key)| Term { indices: key, coeff: 1.0 })
        .collect()
}

/// Structural fingerprint of a block's templates on wires `0..k`.
fn template_signature(mask: u8, order: &[u8]) -> Result<Vec<(u8, Vec<usize>, u32)>> {
    let k = order.len();
    let sorted: Vec<usize> = (0..k).collect();
    let modes: Vec<usize> = order.iter().map(|&x| x as usize).collect();
    let mut sig = Vec::new();
    for (i, t) in block_templates(&sorted, &modes, &mask_terms(&sorted, mask), 1.0, false)?.into_iter().enumerate() {
        for (part, gates) in [&t.basis_in, &t.core, &t.basis_out].into_iter().enumerate() {
            for g in gates {
                sig.push(((i * 3 + part) as u8, g.qubits.to_vec(), g.negated | (g.kind as u32) << 16));
            }
        }
    }
    Ok(sig)
}

#[derive(Default)]
struct ShapeMemo {
    reps: BTreeMap<(u8, Vec<u8>), Vec<u8>>,
    by_sig: BTreeMap<(u8, Vec<(u8, Vec<usize>, u32)>), Vec<u8>>,
}

impl ShapeMemo {
    fn block(&mut self, source: &impl TermSource, block: &[usize]) -> Result<BlockShape> {
        let mut sorted = block.to_vec();
        sorted.sort_unstable();
        let mask = term_mask(source, &sorted);
        let order: Vec<u8> = block.iter().map(|x| sorted.binary_search(x).unwrap_or(0) as u8).collect();
        if let Some(rep) = self.reps.get(&(mask, order.clone())) {
            return Ok((mask, rep.clone()));
        }
        let sig = template_signature(mask, &order)?;
        let rep = self.by_sig.entry((mask, sig)).or_insert_with(|| order.clone()).clone();
        self.reps.insert((mask, order), rep.clone());
        Ok((mask, rep))
    }
}

impl ScheduleProfile {
    pub fn collect(source: &impl TermSource) -> Result<Self> {
        let mut p = ScheduleProfile { m: source.orbitals(), ..Default::default() };
        let mut memo = ShapeMemo::default();
        let mut err = None;
        let exit = build_schedule_with(source, |st| {
            let mut blocks = Vec::with_capacity(st.blocks.len());
            for b in &st.blocks {
                match memo.block(source, b) {
                    Ok(s) => blocks.push(s),
                    Err(e) => {
                        err.get_or_insert(e);
                        return;
                    }
                }
            }
            let tally = p.kinds.entry(st.kind).or_default();
            tally.stages += 1;
            tally.blocks += blocks.len() as u64;
            tally.terms += blocks.iter().map(|b| b.0.count_ones() as u64).sum::<u64>();
            tally.swap_layers += st.routing.len() as u64;
            tally.swap_count += st.swap_count() as u64;
            let n = blocks.len();
            blocks.sort_unstable();
            blocks.dedup();
            *p.shapes.entry((st.kind, n, blocks)).or_insert(0) += 1;
        });
        if let Some(e) = err {
            return Err(e);
        }
        p.exit_layers = exit.len() as u64;
        p.exit_swaps = exit.iter().map(Vec::len).sum::<usize>() as u64;
        Ok(p)
    }

    pub fn terms(&self) -> u64 {
        self.kinds.values().map(|k| k.terms).sum()
    }
}

/// Synthesized stage body and the ancillas each pass added.
#[derive(Debug, Clone, PartialEq)]
pub struct StageBody {
    pub metrics: Metrics,
    pub copies: u64,
    pub flags: u64,
    pub has_phase: bool,
}

/// Builds one stage of the given shape on a compact register (unit
/// coefficients, blocks side by side, the first shape repeated to fill
/// `n` blocks) and runs the passes.
pub fn stage_body(kind: StageKind, n: usize, shapes: &[BlockShape], b: usize, model: &CostModel, passes: &[Pass]) -> Result<StageBody> {
    let k = kind.block_size();
    let mut c = Circuit::new(k * n, b);
    for i in 0..n {
        let (mask, order) = shapes.get(i).unwrap_or(&shapes[0]);
        let sorted: Vec<usize> = (i * k..(i + 1) * k).collect();
        let modes: Vec<usize> = order.iter().map(|&x| i * k + x as usize).collect();
        let wires: Vec<usize> = (i * k..(i + 1) * k).map(|w| c.orbital_qubit(w)).collect();
        for t in block_templates(&wires, &modes, &mask_terms(&sorted, *mask), 1.0, false)? {
            t.emit(&mut c);
        }
    }
    let has_phase = c.global_phase != 0.0;
    c.global_phase = 0.0;
    let (mut copies, mut flags) = (0, 0);
    for p in passes {
        if b == 0 && *p == Pass::Expand {
            continue;
        }
        let before = c.n_ancillas() as u64;
        c = p.run(&c)?;
        let added = c.n_ancillas() as u64 - before;
        match p {
            Pass::Parallelize => copies += added,
            _ => flags += added,
        }
    }
    Ok(StageBody { metrics: c.metrics(model), copies, flags, has_phase })
}

fn routing_metrics(layers: u64, swaps: u64, model: &CostModel) -> Metrics {
    let mut m = Metrics {
        swap_depth: layers,
        total_depth: layers * model.weight(&Gate::fswap(0, 1)),
        ..Metrics::default()
    };
    if swaps > 0 {
        m.gate_counts.insert("fswap", swaps);
    }
    m
}

fn phase_layer(b: usize, model: &CostModel) -> Metrics {
    let mut m = Metrics { rotation_depth: 1, total_depth: model.weight(&Gate::rz(0, 1.0)), ..Metrics::default() };
    m.gate_counts.insert("rz", b as u64);
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedAccount {
    pub sweep: Metrics,
    pub step: Metrics,
    /// Rotation depth of one sweep per stage kind.
    pub rotation_by_kind: BTreeMap<StageKind, u64>,
    /// Copies and flags of the stage needing the most ancillas.
    pub peak_copies: u64,
    pub peak_flags: u64,
    pub distinct_shapes: usize,
}

pub fn optimized_account(profile: &ScheduleProfile, b: usize, model: &CostModel, passes: &[Pass]) -> Result<OptimizedAccount> {
    let mut sweep = Metrics::default();
    let mut rotation_by_kind = BTreeMap::new();
    let (mut peak_copies, mut peak_flags, mut phase) = (0, 0, false);
    for ((kind, n, shapes), &count) in &profile.shapes {
        let body = stage_body(*kind, *n, shapes, b, model, passes)?;
        sweep.then_repeated(&body.metrics, count);
        *rotation_by_kind.entry(*kind).or_insert(0) += body.metrics.rotation_depth * count;
        if body.copies + body.flags > peak_copies + peak_flags {
            (peak_copies, peak_flags) = (body.copies, body.flags);
        }
        phase |= body.has_phase;
    }
    for t in profile.kinds.values() {
        sweep.then(&routing_metrics(t.swap_layers, t.swap_count, model));
    }
    sweep.then(&routing_metrics(profile.exit_layers, profile.exit_swaps, model));
    sweep.width = (profile.m + b) as u64 + peak_copies + peak_flags;
    let mut step = Metrics { width: sweep.width, ..Metrics::default() };
    step.then_repeated(&sweep, SWEEPS_PER_STEP);
    if phase && b > 0 && passes.contains(&Pass::Expand) {
        step.then(&phase_layer(b, model));
    }
    Ok(OptimizedAccount {
        sweep,
        step,
        rotation_by_kind,
        peak_copies,
        peak_flags,
        distinct_shapes: profile.shapes.len(),
    })
}

/// Pauli rotation shape on a shortened support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct StringShape {
    /// Support size on the shortened register.
    weight: u64,
    /// Chain start offset `max(d1, d2, d3-1, d4-2)` over basis-change depths.
    lead: u64,
    /// Basis depth of the first letter (single-letter strings).
    first: u64,
    xs: u64,
    ys: u64,
    /// Bit `i` set when gap `i` carries Jordan-Wigner `Z`.
    z_gaps: u8,
}

fn basis_depth(x: bool, z: bool) -> u64 {
    match (x, z) {
        (true, false) => 1,
        (true, true) => 2,
        _ => 0,
    }
}

fn string_shapes(support_size: usize, key: usize, long_gaps: u8) -> Result<(Vec<StringShape>, bool)> {
    let mut rep = vec![0usize; support_size];
    for i in 1..support_size {
        rep[i] = rep[i - 1] + 1 + usize::from(long_gaps >> (i - 1) & 1 == 1);
    }
    let indices = support_keys(&rep)[key];
    let term = Term { indices, coeff: 1.0 };
    let mut out = Vec::new();
    let mut identity = false;
    for &(x, z) in pauli_expansion(&term)?.keys() {
        let on = x | z;
        if on == 0 {
            identity = true;
            continue;
        }
        let letters: Vec<u64> = (0..=rep[support_size - 1])
            .filter(|&k| on >> k & 1 == 1)
            .map(|k| basis_depth(x >> k & 1 == 1, z >> k & 1 == 1))
            .collect();
        let d = |i: usize| letters.get(i).copied().unwrap_or(0);
        let lead = d(0).max(d(1)).max(d(2).saturating_sub(1)).max(d(3).saturating_sub(2));
        let mut z_gaps = 0;
        for i in 1..support_size {
            if long_gaps >> (i - 1) & 1 == 1 && z >> (rep[i] - 1) & 1 == 1 {
                z_gaps |= 1 << (i - 1);
            }
        }
        out.push(StringShape {
            weight: on.count_ones() as u64,
            lead,
            first: d(0),
            xs: (x & !z).count_ones() as u64,
            ys: (x & z).count_ones() as u64,
            z_gaps,
        });
    }
    Ok((out, identity))
}

/// Sums over every baseline Pauli rotation, independent of `b`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BaselineProfile {
    pub m: usize,
    pub terms_by_kind: BTreeMap<StageKind, u64>,
    pub strings_by_kind: BTreeMap<StageKind, u64>,
    pub strings: u64,
    /// Sum of chain lengths (moments on each side of the rotations).
    pub chain: u64,
    pub cx_chain: u64,
    pub xs: u64,
    pub ys: u64,
    pub has_phase: bool,
}

/// Calls `f` on every sorted support of size 1 to 4.
fn for_each_support(m: usize, mut f: impl FnMut(&[usize])) {
    let mut s = [0usize; 4];
    for k in 1..=4usize.min(m) {
        for i in 0..k {
            s[i] = i;
        }
        loop {
            f(&s[..k]);
            let mut i = k;
            while i > 0 && s[i - 1] == m - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            s[i - 1] += 1;
            for j in i..k {
                s[j] = s[j - 1] + 1;
            }
        }
    }
}

impl BaselineProfile {
    pub fn collect(source: &impl TermSource) -> Result<Self> {
        let m = source.orbitals();
        let mut p = BaselineProfile { m, ..Default::default() };
        // [support size - 1][key][gap pattern]
        let mut memo: Vec<Vec<Vec<Option<(Vec<StringShape>, bool)>>>> = vec![vec![vec![None; 8]; 3]; 4];
        let mut err = None;
        for_each_support(m, |s| {
            if err.is_some() {
                return;
            }
            let k = s.len();
            let kind = KINDS[k - 1];
            let mask = term_mask(source, s);
            let gaps: [u64; 3] = core::array::from_fn(|i| if i + 1 < k { (s[i + 1] - s[i] - 1) as u64 } else { 0 });
            let pattern = gaps.iter().enumerate().fold(0u8, |acc, (i, &g)| acc | (u8::from(g > 0) << i));
            for key in 0..3 {
                if mask >> key & 1 == 0 {
                    continue;
                }
                let slot = &mut memo[k - 1][key][pattern as usize];
                if slot.is_none() {
                    match string_shapes(k, key, pattern) {
                        Ok(v) => *slot = Some(v),
                        Err(e) => {
                            err = Some(e);
                            return;
                        }
                    }
                }
                let (shapes, identity) = slot.as_ref().expect("filled");
                *p.terms_by_kind.entry(kind).or_insert(0) += 1;
                *p.strings_by_kind.entry(kind).or_insert(0) += shapes.len() as u64;
                p.has_phase |= *identity;
                for sh in shapes {
                    let stretch: u64 =
                        (0..k.saturating_sub(1)).filter(|&i| sh.z_gaps >> i & 1 == 1).map(|i| gaps[i] - 1).sum();
                    let w = sh.weight + stretch;
                    p.strings += 1;
                    p.chain += if w == 1 { sh.first } else { sh.lead + w - 1 };
                    p.cx_chain += w - 1;
                    p.xs += sh.xs;
                    p.ys += sh.ys;
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(p),
        }
    }

    pub fn terms(&self) -> u64 {
        self.terms_by_kind.values().sum()
    }

    /// Metrics of one sweep: each rotation is a barrier block of basis
    /// change, CNOT chain, `b` serial lowered controlled rotations, and the
    /// mirror image.
    pub fn sweep(&self, b: usize, model: &CostModel) -> Metrics {
        let b64 = b as u64;
        let rot_moments = b64.max(1) * self.strings;
        let cliff_moments = 2 * self.chain + 2 * b64 * self.strings;
        let mut counts = BTreeMap::new();
        let mut put = |k: &'static str, v: u64| {
            if v > 0 {
                counts.insert(k, v);
            }
        };
        put("h", 2 * (self.xs + self.ys));
        put("s", self.ys);
        put("sdg", self.ys);
        put("cx", 2 * self.cx_chain + 2 * b64 * self.strings);
        put("rz", if b == 0 { self.strings } else { 2 * b64 * self.strings });
        Metrics {
            rotation_depth: rot_moments,
            total_depth: cliff_moments * model.clifford_weight + rot_moments * model.rotation_weight,
            swap_depth: 0,
            width: (self.m + b) as u64,
            gate_counts: counts,
        }
    }

    pub fn step(&self, b: usize, model: &CostModel) -> Metrics {
        let sweep = self.sweep(b, model);
        let mut step = Metrics { width: sweep.width, ..Metrics::default() };
        step.then_repeated(&sweep, SWEEPS_PER_STEP);
        if self.has_phase && b > 0 {
            step.then(&phase_layer(b, model));
        }
        step
    }
}

/// Baseline against optimized for one fourth-order step.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub m: usize,
    pub b: usize,
    pub cost_model: &'static str,
    pub optimized: OptimizedAccount,
    pub baseline: Metrics,
    pub baseline_sweep: Metrics,
    pub kinds: BTreeMap<StageKind, KindTally>,
    pub baseline_strings: BTreeMap<StageKind, u64>,
    pub terms: u64,
    pub factors: Factors,
}

/// Ratios and their decomposition. `template * parallel` equals the
/// per-sweep rotation depth ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factors {
    pub rotation_depth: f64,
    pub total_depth: f64,
    pub width: f64,
    pub sweep_rotation_depth: f64,
    /// Pauli rotations per term.
    pub template: f64,
    /// Serial rank-2 rotations per optimized rotation layer.
    pub parallel: f64,
    pub quad_template: f64,
    pub quad_parallel: f64,
    pub mean_quad_blocks: f64,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn bench_report(
    profile: &ScheduleProfile,
    baseline: &BaselineProfile,
    b: usize,
    model: &CostModel,
    passes: &[Pass],
) -> Result<BenchReport> {
    let optimized = optimized_account(profile, b, model, passes)?;
    let base_step = baseline.step(b, model);
    let base_sweep = baseline.sweep(b, model);
    let bb = b.max(1) as u64;
    let terms = profile.terms();
    let quad = StageKind::Quad;
    let quad_terms = profile.kinds.get(&quad).map_or(0, |t| t.terms);
    let quad_rot = optimized.rotation_by_kind.get(&quad).copied().unwrap_or(0);
    let factors = Factors {
        rotation_depth: ratio(base_step.rotation_depth, optimized.step.rotation_depth),
        total_depth: ratio(base_step.total_depth, optimized.step.total_depth),
        width: ratio(optimized.step.width, base_step.width),
        sweep_rotation_depth: ratio(base_sweep.rotation_depth, optimized.sweep.rotation_depth),
        template: ratio(baseline.strings, baseline.terms()),
        parallel: ratio(baseline.terms() * bb, optimized.sweep.rotation_depth),
        quad_template: ratio(baseline.strings_by_kind.get(&quad).copied().unwrap_or(0), baseline.terms_by_kind.get(&quad).copied().unwrap_or(0)),
        quad_parallel: ratio(quad_terms * bb, quad_rot),
        mean_quad_blocks: profile.kinds.get(&quad).map_or(0.0, |t| ratio(t.blocks, t.stages)),
    };
    Ok(BenchReport {
        m: profile.m,
        b,
        cost_model: model.name,
        optimized,
        baseline: base_step,
        baseline_sweep: base_sweep,
        kinds: profile.kinds.clone(),
        baseline_strings: baseline.strings_by_kind.clone(),
        terms,
        factors,
    })
}
