//! Rewrites of controlled rotation layers.
//!
//! Every pass walks the moments of a circuit and replaces the rotations of
//! one moment by a block `pre; layer; post` (possibly several in sequence),
//! where `pre` and `post` are Clifford or Toffoli networks and the layer
//! holds the new rotations. Non-rotation gates of the moment stay where
//! they were. Fresh ancillas always come back in `|0⟩`.
//!
//! Clifford gates are never controlled by [`expand_precision_controls`];
//! circuits fed to it must use them only as conjugations around rotations,
//! which is how every generator in this crate emits them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use smallvec::SmallVec;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pass {
    Expand,
    Parallelize,
    Consolidate,
    Merge,
    Lower,
}

impl Pass {
    pub const ALL: [Pass; 5] = [Pass::Expand, Pass::Parallelize, Pass::Consolidate, Pass::Merge, Pass::Lower];

    pub fn name(self) -> &'static str {
        match self {
            Pass::Expand => "expand",
            Pass::Parallelize => "parallelize",
            Pass::Consolidate => "consolidate",
            Pass::Merge => "merge",
            Pass::Lower => "lower",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Pass::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn run(self, circ: &Circuit) -> Result<Circuit> {
        match self {
            Pass::Expand => expand_precision_controls(circ),
            Pass::Parallelize => parallelize_shared_controls(circ),
            Pass::Consolidate => consolidate_controls(circ),
            Pass::Merge => merge_same_target(circ),
            Pass::Lower => lower_crz(circ),
        }
    }
}

/// Parses a comma separated pass list. `all` is the full pipeline and
/// `none` the empty one. Passes always run in pipeline order.
pub fn parse_passes(spec: &str) -> Result<Vec<Pass>> {
    let mut set = BTreeSet::new();
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match tok {
            "all" => set.extend(Pass::ALL),
            "none" => {}
            _ => {
                let p = Pass::from_name(tok).ok_or_else(|| {
                    Error::Argument(format!("unknown pass `{tok}` (expected expand, parallelize, consolidate, merge, lower, all, none)"))
                })?;
                set.insert(p);
            }
        }
    }
    Ok(set.into_iter().collect())
}

pub fn pass_names(passes: &[Pass]) -> String {
    let names: Vec<&str> = passes.iter().map(|p| p.name()).collect();
    if names.is_empty() {
        "none".into()
    } else {
        names.join(",")
    }
}

/// Runs the passes in order, validating after each.
pub fn run_pipeline(circ: &Circuit, passes: &[Pass]) -> Result<Circuit> {
    let mut c = circ.clone();
    for p in passes {
        c = p.run(&c)?;
        c.validate()?;
    }
    Ok(c)
}

#[derive(Default)]
struct Batch {
    pre: Vec<Gate>,
    layer: Vec<Gate>,
    post: Vec<Gate>,
    release: Vec<usize>,
}

fn rewrite<F>(circ: &Circuit, mut f: F) -> Result<Circuit>
where
    F: FnMut(&mut Circuit, &[Gate]) -> Option<Vec<Batch>>,
{
    let mut out = circ.empty_like();
    for moment in circ.moments() {
        let (rot, other): (Vec<Gate>, Vec<Gate>) = moment.iter().cloned().partition(Gate::is_rotation);
        let batches = if rot.is_empty() { None } else { f(&mut out, &rot) };
        let Some(batches) = batches else {
            out.push_layer(moment.clone())?;
            continue;
        };
        let touched: BTreeSet<usize> = rot.iter().flat_map(|g| g.qubits.iter().copied()).collect();
        let (clash, mut rest): (Vec<Gate>, Vec<Gate>) =
            other.into_iter().partition(|g| g.qubits.iter().any(|q| touched.contains(q)));
        // diagonal gates sharing wires with the rotations commute with them
        out.push_layer(clash)?;
        for b in batches {
            for g in b.pre {
                out.append(g)?;
            }
            let mut layer = b.layer;
            layer.append(&mut rest);
            out.push_layer(layer)?;
            for g in b.post {
                out.append(g)?;
            }
            for q in b.release {
                out.release_ancilla(q);
            }
        }
        out.push_layer(rest)?;
    }
    Ok(out)
}

fn with_controls(g: &Gate, controls: &[(usize, bool)], angle: f64) -> Gate {
    Gate::controlled_rz(controls, g.target(), angle)
}

/// Adds every precision qubit as a further control: precision qubit `i`
/// carries time bit `b-1-i` and scales the angle by `2^(b-1-i)`. The global
/// phase becomes a layer of precision rotations.
pub fn expand_precision_controls(circ: &Circuit) -> Result<Circuit> {
    let b = circ.n_precision();
    if b == 0 {
        return Err(Error::Argument("expand needs at least one precision qubit".into()));
    }
    let weight = |i: usize| (1u64 << (b - 1 - i)) as f64;
    let mut out = rewrite(circ, |c, rot| {
        let mut layer = Vec::with_capacity(rot.len() * b);
        for g in rot {
            let base = g.rotation_controls();
            for i in 0..b {
                let mut ctl: SmallVec<[(usize, bool); 6]> = base.clone();
                ctl.push((c.precision_qubit(i), true));
                layer.push(with_controls(g, &ctl, g.angle * weight(i)));
            }
        }
        Some(vec![Batch { layer, ..Batch::default() }])
    })?;
    let gp = circ.global_phase;
    if gp != 0.0 {
        let layer = (0..b).map(|i| Gate::rz(i, -gp * weight(i))).collect();
        out.push_layer(layer)?;
        out.global_phase = (0..b).map(|i| gp * weight(i) / 2.0).sum();
    }
    Ok(out)
}

/// Like [`expand_precision_controls`], but each precision bit gets its own
/// layer, as in a serial per-bit implementation.
pub fn expand_precision_controls_serial(circ: &Circuit) -> Result<Circuit> {
    let b = circ.n_precision();
    if b == 0 {
        return Err(Error::Argument("expand needs at least one precision qubit".into()));
    }
    let weight = |i: usize| (1u64 << (b - 1 - i)) as f64;
    let mut out = rewrite(circ, |c, rot| {
        let batches = (0..b)
            .map(|i| {
                let layer = rot
                    .iter()
                    .map(|g| {
                        let mut ctl = g.rotation_controls();
                        ctl.push((c.precision_qubit(i), true));
                        with_controls(g, &ctl, g.angle * weight(i))
                    })
                    .collect();
                Batch { layer, ..Batch::default() }
            })
            .collect();
        Some(batches)
    })?;
    let gp = circ.global_phase;
    if gp != 0.0 {
        out.push_layer((0..b).map(|i| Gate::rz(i, -gp * weight(i))).collect())?;
        out.global_phase = (0..b).map(|i| gp * weight(i) / 2.0).sum();
    }
    Ok(out)
}

fn groups_by_target(rot: &[Gate]) -> Vec<(usize, Vec<usize>)> {
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, g) in rot.iter().enumerate() {
        let t = g.target();
        match groups.iter_mut().find(|(x, _)| *x == t) {
            Some((_, v)) => v.push(i),
            None => groups.push((t, vec![i])),
        }
    }
    groups
}

/// Gives each target group of a layer private copies of controls shared
/// with other groups, made by one fanout before the layer and undone after.
pub fn parallelize_shared_controls(circ: &Circuit) -> Result<Circuit> {
    rewrite(circ, |c, rot| {
        let groups = groups_by_target(rot);
        let mut users: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (gi, (_, members)) in groups.iter().enumerate() {
            for &i in members {
                for (q, _) in rot[i].rotation_controls() {
                    let u = users.entry(q).or_default();
                    if u.last() != Some(&gi) {
                        u.push(gi);
                    }
                }
            }
        }
        if users.values().all(|u| u.len() < 2) {
            return None;
        }
        let mut layer: Vec<Gate> = rot.to_vec();
        let mut batch = Batch::default();
        for (&q, u) in &users {
            if u.len() < 2 {
                continue;
            }
            let copies: Vec<usize> = u[1..].iter().map(|_| c.alloc_ancilla()).collect();
            for (&gi, &a) in u[1..].iter().zip(&copies) {
                for &i in &groups[gi].1 {
                    let g = &mut layer[i];
                    let n = g.qubits.len();
                    for slot in &mut g.qubits[..n - 1] {
                        if *slot == q {
                            *slot = a;
                        }
                    }
                }
            }
            batch.pre.push(Gate::fanout(q, &copies));
            batch.post.push(Gate::fanout(q, &copies));
            batch.release.extend(copies);
        }
        batch.layer = layer;
        Some(vec![batch])
    })
}

/// Replaces each rotation with two or more controls by a Toffoli tree into
/// a fresh flag ancilla and a single CRz from the flag. Intermediate
/// ancillas are uncomputed as soon as the flag is set, and reused by the
/// next rotation on the same target.
pub fn consolidate_controls(circ: &Circuit) -> Result<Circuit> {
    rewrite(circ, |c, rot| {
        if rot.iter().all(|g| g.rotation_controls().len() < 2) {
            return None;
        }
        let mut batch = Batch::default();
        for (_, members) in groups_by_target(rot) {
            let mut scratch: Vec<usize> = Vec::new();
            let mut post_blocks: Vec<Vec<Gate>> = Vec::new();
            for i in members {
                let g = &rot[i];
                let ctl = g.rotation_controls();
                if ctl.len() < 2 {
                    batch.layer.push(g.clone());
                    continue;
                }
                while scratch.len() < ctl.len() - 2 {
                    scratch.push(c.alloc_ancilla());
                }
                let flag = c.alloc_ancilla();
                let flips: Vec<Gate> = ctl.iter().filter(|(_, pos)| !pos).map(|&(q, _)| Gate::x(q)).collect();
                let (tree, last) = and_tree(&ctl.iter().map(|&(q, _)| q).collect::<Vec<_>>(), &scratch);
                let mut compute = flips.clone();
                compute.extend(tree.iter().cloned());
                compute.push(Gate::toffoli(last[0], last[1], flag));
                compute.extend(tree.iter().rev().cloned());
                compute.extend(flips);
                batch.pre.extend(compute.iter().cloned());
                post_blocks.push(compute);
                batch.layer.push(Gate::crz(flag, g.target(), g.angle));
                batch.release.push(flag);
            }
            for block in post_blocks.into_iter().rev() {
                batch.post.extend(block);
            }
            batch.release.extend(scratch);
        }
        Some(vec![batch])
    })
}

/// Balanced tree of Toffolis reducing `controls` (at least two) to the
/// final pair; intermediate results land in `scratch`.
fn and_tree(controls: &[usize], scratch: &[usize]) -> (Vec<Gate>, [usize; 2]) {
    let mut level: Vec<usize> = controls.to_vec();
    let mut gates = Vec::new();
    let mut next_scratch = scratch.iter().copied();
    while level.len() > 2 {
        let mut up = Vec::with_capacity(level.len().div_ceil(2));
        for pair in level.chunks(2) {
            if pair.len() == 2 {
                let s = next_scratch.next().expect("enough scratch");
                gates.push(Gate::toffoli(pair[0], pair[1], s));
                up.push(s);
            } else {
                up.extend_from_slice(pair);
            }
        }
        level = up;
    }
    (gates, [level[0], level[1]])
}

/// Merges two or more CRz gates sharing a target into a fanout from the
/// target, one Rz per control, one Rz on the target, and the fanout again.
/// Uncontrolled Rz on the same target fold into the target rotation.
/// Groups whose controls are used elsewhere in the layer are left alone.
pub fn merge_same_target(circ: &Circuit) -> Result<Circuit> {
    rewrite(circ, |_, rot| {
        let mut uses: BTreeMap<usize, usize> = BTreeMap::new();
        for g in rot {
            for &q in &g.qubits {
                *uses.entry(q).or_default() += 1;
            }
        }
        let mut merged = vec![false; rot.len()];
        let mut batch = Batch::default();
        for (t, members) in groups_by_target(rot) {
            let crz: Vec<usize> = members.iter().copied().filter(|&i| rot[i].kind == GateKind::CRz).collect();
            if crz.len() < 2 || crz.iter().any(|&i| uses[&rot[i].qubits[0]] != 1) {
                continue;
            }
            let controls: Vec<usize> = crz.iter().map(|&i| rot[i].qubits[0]).collect();
            let mut total = 0.0;
            for &i in &crz {
                batch.layer.push(Gate::rz(rot[i].qubits[0], -rot[i].angle / 2.0));
                total += rot[i].angle / 2.0;
                merged[i] = true;
            }
            for &i in &members {
                if rot[i].kind == GateKind::Rz {
                    total += rot[i].angle;
                    merged[i] = true;
                }
            }
            batch.layer.push(Gate::rz(t, total));
            batch.pre.push(Gate::fanout(t, &controls));
            batch.post.push(Gate::fanout(t, &controls));
        }
        if !merged.iter().any(|&m| m) {
            return None;
        }
        batch.layer.extend(rot.iter().zip(&merged).filter(|(_, &m)| !m).map(|(g, _)| g.clone()));
        Some(vec![batch])
    })
}

/// Lowers each CRz(c→t, θ) to CX(t→c) Rz_c(-θ/2) Rz_t(θ/2) CX(t→c).
/// Conflicting gates of one layer go to further sub-layers.
pub fn lower_crz(circ: &Circuit) -> Result<Circuit> {
    rewrite(circ, |_, rot| {
        if rot.iter().all(|g| g.kind != GateKind::CRz) {
            return None;
        }
        struct Sub {
            batch: Batch,
            modified: BTreeSet<usize>,
            read: BTreeSet<usize>,
            rz: BTreeMap<usize, f64>,
        }
        let fresh = || Sub { batch: Batch::default(), modified: BTreeSet::new(), read: BTreeSet::new(), rz: BTreeMap::new() };
        let mut subs = vec![fresh()];
        for g in rot.iter().filter(|g| g.kind != GateKind::CRz) {
            if g.kind == GateKind::Rz {
                *subs[0].rz.entry(g.qubits[0]).or_default() += g.angle;
            } else {
                subs[0].batch.layer.push(g.clone());
            }
            subs[0].read.extend(g.qubits.iter().copied());
        }
        for g in rot.iter().filter(|g| g.kind == GateKind::CRz) {
            let (ctl, t) = (g.qubits[0], g.qubits[1]);
            let fits = |s: &Sub| !s.modified.contains(&ctl) && !s.read.contains(&ctl) && !s.modified.contains(&t);
            let k = match subs.iter().position(fits) {
                Some(k) => k,
                None => {
                    subs.push(fresh());
                    subs.len() - 1
                }
            };
            let s = &mut subs[k];
            s.modified.insert(ctl);
            s.read.insert(t);
            s.batch.pre.push(Gate::cx(t, ctl));
            s.batch.post.push(Gate::cx(t, ctl));
            *s.rz.entry(ctl).or_default() -= g.angle / 2.0;
            *s.rz.entry(t).or_default() += g.angle / 2.0;
        }
        Some(
            subs.into_iter()
                .map(|mut s| {
                    s.batch.layer.extend(s.rz.into_iter().filter(|(_, a)| *a != 0.0).map(|(q, a)| Gate::rz(q, a)));
                    s.batch
                })
                .collect(),
        )
    })
}
