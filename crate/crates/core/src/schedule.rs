//! Ski-lift scheduling: stages of adjacent blocks joined by fermionic swap
//! networks.
//!
//! Stage order is singletons, the circle-method pair rounds, one stage per
//! order-3 Möbius map for triples, then quad stages. Quad stages come from
//! quadratic-residue involutions `σ`: the `σ`-pairs are seated on a ring
//! ordered by a generator of the torus that commutes with `σ`, and the
//! reflections of that ring partition the line into 4-sets that are orbits
//! of a Klein four-group. An interleaved conveyor reaches the next
//! reflection every two swap layers. Klein groups met again from another
//! ring are skipped, so every 4-set is a block exactly once.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hamiltonian::{TermClass, TermSource};
use crate::mobius::{self, binom, rank4, MobiusMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StageKind {
    Singleton,
    Pair,
    Triple,
    Quad,
}

impl StageKind {
    pub fn block_size(self) -> usize {
        match self {
            StageKind::Singleton => 1,
            StageKind::Pair => 2,
            StageKind::Triple => 3,
            StageKind::Quad => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StageKind::Singleton => "singleton",
            StageKind::Pair => "pair",
            StageKind::Triple => "triple",
            StageKind::Quad => "quad",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [StageKind::Singleton, StageKind::Pair, StageKind::Triple, StageKind::Quad].into_iter().find(|k| k.name() == s)
    }

    pub fn term_class(self) -> TermClass {
        match self {
            StageKind::Singleton => TermClass::Singleton,
            StageKind::Pair => TermClass::Pair,
            StageKind::Triple => TermClass::Triple,
            StageKind::Quad => TermClass::Quad,
        }
    }
}

/// One layer of disjoint adjacent transpositions, given by the left wire
/// of each swapped pair.
pub type SwapLayer = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub kind: StageKind,
    /// Blocks of modes, each listed in wire order, ordered along the wires.
    pub blocks: Vec<Vec<usize>>,
    /// Mode sitting on each wire during the stage.
    pub layout: Vec<usize>,
    /// `layout[w] = previous[entry_permutation[w]]`.
    pub entry_permutation: Vec<usize>,
    /// Swap layers taking the previous layout to this one.
    pub routing: Vec<SwapLayer>,
}

impl Stage {
    /// First wire of each block.
    pub fn block_wires(&self) -> Vec<usize> {
        let mut pos = vec![0; self.layout.len()];
        for (w, &mode) in self.layout.iter().enumerate() {
            pos[mode] = w;
        }
        self.blocks.iter().map(|b| pos[b[0]]).collect()
    }

    pub fn swap_count(&self) -> usize {
        self.routing.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub m: usize,
    pub p: u32,
    pub stages: Vec<Stage>,
    /// Swap layers returning the last stage's layout to the identity.
    pub exit_routing: Vec<SwapLayer>,
}

pub fn apply_layer(layout: &mut [usize], layer: &[usize]) {
    for &w in layer {
        layout.swap(w, w + 1);
    }
}

pub fn apply_layers(layout: &mut [usize], layers: &[SwapLayer]) {
    for l in layers {
        apply_layer(layout, l);
    }
}

/// Relative permutation with `to[w] = from[perm[w]]`.
pub fn relative_permutation(from: &[usize], to: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; from.len()];
    for (w, &mode) in from.iter().enumerate() {
        pos[mode] = w;
    }
    to.iter().map(|&mode| pos[mode]).collect()
}

fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    v.iter().all(|&x| x < v.len() && !core::mem::replace(&mut seen[x], true))
}

/// Odd-even transposition sort from `from` to `to`, trying both starting
/// parities and keeping the shallower network. Layers with no swap are not
/// emitted, so depth never exceeds the wire count.
pub fn route_permutation(from: &[usize], to: &[usize]) -> Result<Vec<SwapLayer>> {
    if from.len() != to.len() || !is_permutation(from) || !is_permutation(to) {
        return Err(Error::Argument("layouts are not permutations of the same size".into()));
    }
    Ok(oets(from, to))
}

fn oets(from: &[usize], to: &[usize]) -> Vec<SwapLayer> {
    let mut target = vec![0; to.len()];
    for (w, &mode) in to.iter().enumerate() {
        target[mode] = w;
    }
    let keys: Vec<usize> = from.iter().map(|&mode| target[mode]).collect();
    let mut best: Option<Vec<SwapLayer>> = None;
    for start in 0..2 {
        let mut a = keys.clone();
        let mut layers = Vec::new();
        let mut parity = start;
        let mut idle = 0;
        while idle < 2 {
            let mut layer = Vec::new();
            let mut i = parity;
            while i + 1 < a.len() {
                if a[i] > a[i + 1] {
                    a.swap(i, i + 1);
                    layer.push(i);
                }
                i += 2;
            }
            if layer.is_empty() {
                idle += 1;
            } else {
                idle = 0;
                layers.push(layer);
            }
            parity ^= 1;
        }
        if best.as_ref().is_none_or(|b| layers.len() < b.len()) {
            best = Some(layers);
        }
    }
    best.unwrap_or_default()
}

/// Rounds of the circle method for `n` competitors. Competitors sit on a
/// line; after each round two layers of swaps rotate everyone but the last
/// seat. Odd `n` adds a stationary phantom whose partner sits out.
pub fn circle_method_rounds(n: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if n < 2 {
        return Err(Error::Argument("circle method needs at least 2 competitors".into()));
    }
    Ok(circle_layouts(n)
        .into_iter()
        .map(|(layout, _)| {
            layout.chunks(2).filter(|c| c.len() == 2 && c[0] < n && c[1] < n).map(|c| (c[0], c[1])).collect()
        })
        .collect())
}

/// Line layouts of each round (phantom included for odd `n`) with the
/// native swap layers leading into each round.
fn circle_layouts(n: usize) -> Vec<(Vec<usize>, Vec<SwapLayer>)> {
    let seats = n + n % 2;
    let mut line: Vec<usize> = (0..seats).collect();
    let mut out = Vec::with_capacity(seats - 1);
    let mut native = Vec::new();
    for _ in 0..seats - 1 {
        out.push((line.clone(), core::mem::take(&mut native)));
        let a: SwapLayer = (1..seats.saturating_sub(2)).step_by(2).collect();
        let b: SwapLayer = (0..seats.saturating_sub(2)).step_by(2).collect();
        for layer in [a, b] {
            apply_layer(&mut line, &layer);
            if !layer.is_empty() {
                native.push(layer);
            }
        }
    }
    out
}

/// Order-3 maps (one per inverse pair) with their 3-cycles on
/// `F_p ∪ {∞}`; fixed points are left implicit.
pub fn mobius_order3_schedule(m: usize) -> Vec<(MobiusMap, Vec<[usize; 3]>)> {
    let p = mobius::scheduling_prime(m);
    mobius::order3_representatives(p)
        .into_iter()
        .map(|g| {
            let triples = g
                .orbits()
                .into_iter()
                .filter(|o| o.len() == 3)
                .map(|o| [o[0] as usize, o[1] as usize, o[2] as usize])
                .collect();
            (g, triples)
        })
        .collect()
}

/// Quadratic-residue involutions with their pair partitions.
pub fn mobius_involution_pairings(m: usize) -> Vec<(MobiusMap, Vec<[usize; 2]>)> {
    let p = mobius::scheduling_prime(m);
    mobius::residue_involutions(p)
        .into_iter()
        .map(|s| {
            let pairs = s.orbits().into_iter().filter(|o| o.len() == 2).map(|o| [o[0] as usize, o[1] as usize]).collect();
            (s, pairs)
        })
        .collect()
}

/// Ring of `σ`-pairs ordered by a generator of the torus centralizing `σ`.
fn involution_ring(sigma: &MobiusMap) -> (Vec<[u32; 2]>, Vec<u32>) {
    let p = sigma.p;
    let torus = if p % 4 == 3 { p as usize + 1 } else { p as usize - 1 };
    let generator = (0..p)
        .filter_map(|t| MobiusMap::new((t + sigma.a) % p, sigma.b, sigma.c, (t + sigma.d) % p, p))
        .find(|g| g.order() == torus)
        .expect("torus is cyclic");
    let fixed: Vec<u32> = (0..=p).filter(|&z| sigma.apply(z) == z).collect();
    let x0 = (0..=p).find(|&z| sigma.apply(z) != z).expect("involution moves a point");
    let n = (p as usize + 1 - fixed.len()) / 2;
    let mut ring = Vec::with_capacity(n);
    let mut z = x0;
    for _ in 0..n {
        ring.push([z, sigma.apply(z)]);
        z = generator.apply(z);
    }
    (ring, fixed)
}

/// Candidate stage before term filtering: blocks, layout, and the native
/// swap layers from the previous candidate when they exist.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub kind: StageKind,
    pub blocks: Vec<Vec<usize>>,
    pub layout: Vec<usize>,
    pub native: Option<Vec<SwapLayer>>,
}

/// Filters a layer of swaps on a line holding out-of-range points down to
/// swaps between real points, re-indexed on the real sub-line.
fn real_swaps(line: &[u32], layer: &[usize], m: usize) -> SwapLayer {
    let mut out = Vec::new();
    let mut real_before = 0;
    let mut next = 0;
    for &w in layer {
        while next < w {
            if (line[next] as usize) < m {
                real_before += 1;
            }
            next += 1;
        }
        if (line[w] as usize) < m && (line[w + 1] as usize) < m {
            out.push(real_before);
        }
    }
    out
}

/// Enumerates every candidate stage of one phase.
pub fn for_each_candidate(m: usize, kind: StageKind, mut f: impl FnMut(Candidate)) {
    match kind {
        StageKind::Singleton => f(Candidate {
            kind,
            blocks: (0..m).map(|p| vec![p]).collect(),
            layout: (0..m).collect(),
            native: None,
        }),
        StageKind::Pair if m >= 2 => {
            for (line, native) in circle_layouts(m) {
                let layout: Vec<usize> = line.iter().copied().filter(|&x| x < m).collect();
                let blocks =
                    line.chunks(2).filter(|c| c[0] < m && c[1] < m).map(|c| c.to_vec()).collect();
                f(Candidate { kind, blocks, layout, native: Some(native) });
            }
        }
        StageKind::Triple if m >= 3 => {
            for (_, triples) in mobius_order3_schedule(m) {
                let blocks: Vec<Vec<usize>> =
                    triples.into_iter().filter(|t| t.iter().all(|&x| x < m)).map(|t| t.to_vec()).collect();
                if !blocks.is_empty() {
                    f(Candidate { kind, blocks, layout: Vec::new(), native: None });
                }
            }
        }
        StageKind::Quad if m >= 4 => quad_candidates(m, f),
        _ => {}
    }
}

fn quad_candidates(m: usize, mut f: impl FnMut(Candidate)) {
    let p = mobius::scheduling_prime(m);
    let points = p as usize + 1;
    let mut covered = vec![0u64; binom(points, 4).div_ceil(64)];
    let key_of = |q: &[u32]| {
        let mut s = [q[0], q[1], q[2], q[3]];
        s.sort_unstable();
        s
    };
    for sigma in mobius::residue_involutions(p) {
        let (ring, fixed) = involution_ring(&sigma);
        let n = ring.len();
        let mut line = Vec::with_capacity(2 * n);
        for j in 0..n / 2 {
            let (t, b) = (ring[j], ring[n - 1 - j]);
            line.extend_from_slice(&[t[0], b[0], t[1], b[1]]);
        }
        let mut parity = 0;
        let mut native: Option<Vec<SwapLayer>> = None;
        for step in 0..2 * n {
            if step % 2 == 0 {
                let offset = if (step / 2) % 2 == 0 { 0 } else { 2 };
                let all: Vec<&[u32]> = line[offset..].chunks_exact(4).collect();
                let fresh = all.iter().map(|q| rank4(key_of(q))).min().is_some_and(|r| covered[r / 64] & (1 << (r % 64)) == 0);
                if fresh {
                    for q in &all {
                        let r = rank4(key_of(q));
                        covered[r / 64] |= 1 << (r % 64);
                    }
                    let blocks: Vec<Vec<usize>> = all
                        .iter()
                        .filter(|q| q.iter().all(|&x| (x as usize) < m))
                        .map(|q| q.iter().map(|&x| x as usize).collect())
                        .collect();
                    let mut layout: Vec<usize> = line.iter().map(|&x| x as usize).filter(|&x| x < m).collect();
                    layout.extend(fixed.iter().map(|&x| x as usize).filter(|&x| x < m));
                    f(Candidate { kind: StageKind::Quad, blocks, layout, native: native.take() });
                    native = Some(Vec::new());
                }
            }
            let layer: SwapLayer = (parity..line.len().saturating_sub(1)).step_by(2).collect();
            let real = real_swaps(&line, &layer, m);
            if let Some(v) = native.as_mut() {
                if !real.is_empty() {
                    v.push(real);
                }
            }
            apply_layer_u32(&mut line, &layer);
            parity ^= 1;
        }
    }
}

fn apply_layer_u32(line: &mut [u32], layer: &[usize]) {
    for &w in layer {
        line.swap(w, w + 1);
    }
}

/// Lays blocks contiguously, ordered by the mean current position of their
/// members, each block internally in current order. Modes outside every
/// block keep their relative place as single items.
fn arrange(current: &[usize], blocks: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut pos = vec![0usize; current.len()];
    for (w, &mode) in current.iter().enumerate() {
        pos[mode] = w;
    }
    let mut in_block = vec![false; current.len()];
    let mut items: Vec<(usize, usize, Vec<usize>, bool)> = Vec::new();
    for b in blocks {
        let mut b = b.clone();
        b.sort_by_key(|&x| pos[x]);
        for &x in &b {
            in_block[x] = true;
        }
        let sum: usize = b.iter().map(|&x| pos[x]).sum();
        items.push((sum * 6 / b.len(), pos[b[0]], b, true));
    }
    for (mode, &used) in in_block.iter().enumerate() {
        if !used {
            items.push((pos[mode] * 6, pos[mode], vec![mode], false));
        }
    }
    items.sort_by_key(|it| (it.0, it.1));
    let layout = items.iter().flat_map(|it| it.2.iter().copied()).collect();
    let ordered = items.into_iter().filter(|it| it.3).map(|it| it.2).collect();
    (layout, ordered)
}

/// Blocks of a laid-out stage, in wire order.
fn blocks_in_wire_order(layout: &[usize], blocks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let mut pos = vec![0usize; layout.len()];
    for (w, &mode) in layout.iter().enumerate() {
        pos[mode] = w;
    }
    let mut blocks: Vec<Vec<usize>> = blocks
        .into_iter()
        .map(|mut b| {
            b.sort_by_key(|&x| pos[x]);
            b
        })
        .collect();
    blocks.sort_by_key(|b| pos[b[0]]);
    blocks
}

/// Moves each swap into the earliest layer its wires allow.
pub fn compact_layers(layers: Vec<SwapLayer>) -> Vec<SwapLayer> {
    let mut out: Vec<SwapLayer> = Vec::new();
    let width = layers.iter().flatten().max().map_or(0, |&i| i + 2);
    let mut ready = vec![0; width];
    for layer in layers {
        for i in layer {
            let lvl = ready[i].max(ready[i + 1]);
            if lvl == out.len() {
                out.push(Vec::new());
            }
            out[lvl].push(i);
            ready[i] = lvl + 1;
            ready[i + 1] = lvl + 1;
        }
    }
    for l in &mut out {
        l.sort_unstable();
    }
    out
}

/// Streaming schedule construction. Calls `f` for every emitted stage and
/// returns the exit routing back to the identity layout.
pub fn build_schedule_with(source: &impl TermSource, mut f: impl FnMut(&Stage)) -> Vec<SwapLayer> {
    let m = source.orbitals();
    let mut current: Vec<usize> = (0..m).collect();
    for kind in [StageKind::Singleton, StageKind::Pair, StageKind::Triple, StageKind::Quad] {
        let mut pending: Option<Vec<SwapLayer>> = Some(Vec::new());
        for_each_candidate(m, kind, |c| {
            let blocks: Vec<Vec<usize>> = c
                .blocks
                .into_iter()
                .filter(|b| {
                    let mut s = b.clone();
                    s.sort_unstable();
                    !source.terms_on(&s).is_empty()
                })
                .collect();
            let native = match (pending.take(), c.native) {
                (Some(mut acc), Some(n)) => {
                    acc.extend(n);
                    Some(acc)
                }
                _ => None,
            };
            if blocks.is_empty() {
                pending = native;
                return;
            }
            let (layout, blocks) = if c.layout.is_empty() {
                arrange(&current, &blocks)
            } else {
                let b = blocks_in_wire_order(&c.layout, blocks);
                (c.layout, b)
            };
            let routing = match native {
                Some(n) if n.len() <= 2 => n,
                Some(n) => {
                    let o = oets(&current, &layout);
                    if o.len() < n.len() {
                        o
                    } else {
                        n
                    }
                }
                None => oets(&current, &layout),
            };
            let stage = Stage {
                kind,
                entry_permutation: relative_permutation(&current, &layout),
                blocks,
                layout,
                routing: compact_layers(routing),
            };
            debug_assert!({
                let mut l = current.clone();
                apply_layers(&mut l, &stage.routing);
                l == stage.layout
            });
            f(&stage);
            current = stage.layout;
            pending = Some(Vec::new());
        });
    }
    let identity: Vec<usize> = (0..m).collect();
    compact_layers(oets(&current, &identity))
}

/// Collects the schedule for every nonzero term of `source`.
pub fn build_schedule(source: &impl TermSource) -> Schedule {
    let mut stages = Vec::new();
    let exit_routing = build_schedule_with(source, |s| stages.push(s.clone()));
    let m = source.orbitals();
    Schedule { m, p: mobius::scheduling_prime(m), stages, exit_routing }
}

/// Sorted supports of every possible term on `m` orbitals (sizes 1 to 4).
pub fn all_supports(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 1..=4usize.min(m) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.clone());
            let mut i = k;
            while i > 0 && idx[i - 1] == m - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Counts reported by [`verify_schedule`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverageReport {
    pub singletons: usize,
    pub pairs: usize,
    pub triples: usize,
    pub quads: usize,
    /// Three pairing terms per quad block.
    pub quad_pairings: usize,
    pub stages: usize,
    pub swap_layers: usize,
}

/// Structural checks: layouts are permutations, routing reaches each
/// layout, entry permutations match, blocks are adjacent and disjoint, and
/// no support appears twice. When `complete` is set every support of the
/// right size must appear.
pub fn verify_schedule(s: &Schedule, complete: bool) -> Result<CoverageReport> {
    let m = s.m;
    let mut current: Vec<usize> = (0..m).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut report = CoverageReport { stages: s.stages.len(), ..Default::default() };
    for (i, st) in s.stages.iter().enumerate() {
        let fail = |msg: alloc::string::String| Error::Coverage(format!("stage {i} ({}): {msg}", st.kind.name()));
        if st.layout.len() != m || !is_permutation(&st.layout) {
            return Err(fail("layout is not a permutation".into()));
        }
        for layer in &st.routing {
            let mut used = BTreeSet::new();
            for &w in layer {
                if w + 1 >= m || !used.insert(w) || !used.insert(w + 1) {
                    return Err(fail(format!("bad swap layer {layer:?}")));
                }
            }
        }
        let mut routed = current.clone();
        apply_layers(&mut routed, &st.routing);
        if routed != st.layout {
            return Err(fail("routing does not reach the layout".into()));
        }
        if st.entry_permutation != relative_permutation(&current, &st.layout) {
            return Err(fail("entry permutation mismatch".into()));
        }
        let mut pos = vec![0; m];
        for (w, &x) in st.layout.iter().enumerate() {
            pos[x] = w;
        }
        let mut used = vec![false; m];
        for b in &st.blocks {
            if b.len() != st.kind.block_size() {
                return Err(fail(format!("block {b:?} has wrong size")));
            }
            for (k, &x) in b.iter().enumerate() {
                if x >= m || core::mem::replace(&mut used[x], true) {
                    return Err(fail(format!("block {b:?} overlaps or is out of range")));
                }
                if pos[x] != pos[b[0]] + k {
                    return Err(fail(format!("block {b:?} is not adjacent in wire order")));
                }
            }
            let mut key = b.clone();
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(fail(format!("block {b:?} appears twice")));
            }
            match st.kind {
                StageKind::Singleton => report.singletons += 1,
                StageKind::Pair => report.pairs += 1,
                StageKind::Triple => report.triples += 1,
                StageKind::Quad => {
                    report.quads += 1;
                    report.quad_pairings += 3;
                }
            }
        }
        report.swap_layers += st.routing.len();
        current = st.layout.clone();
    }
    let mut back = current;
    apply_layers(&mut back, &s.exit_routing);
    if back != (0..m).collect::<Vec<_>>() {
        return Err(Error::Coverage("exit routing does not restore the identity layout".into()));
    }
    if complete {
        for (k, got) in [(1, report.singletons), (2, report.pairs), (3, report.triples), (4, report.quads)] {
            if got != binom(m, k) {
                return Err(Error::Coverage(format!("{got} blocks of size {k}, expected {}", binom(m, k))));
            }
        }
    }
    Ok(report)
}

/// Swap-depth statistics of the quad phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadRoutingStats {
    pub m: usize,
    pub p: u32,
    pub stages: usize,
    pub blocks: usize,
    pub swap_layers: usize,
    pub mean_layers: f64,
    pub deep_fraction: f64,
    pub max_layers: usize,
}

/// Streams the full quad phase (all 4-sets present) and summarizes the
/// routing depth into each quad stage.
pub fn quad_routing_stats(m: usize) -> QuadRoutingStats {
    let source = crate::hamiltonian::DenseSynthetic::unit(m);
    let (mut stages, mut blocks, mut layers, mut deep, mut max) = (0, 0, 0, 0, 0);
    build_schedule_with(&source, |st| {
        if st.kind == StageKind::Quad {
            stages += 1;
            blocks += st.blocks.len();
            layers += st.routing.len();
            deep += usize::from(st.routing.len() > 4);
            max = max.max(st.routing.len());
        }
    });
    QuadRoutingStats {
        m,
        p: mobius::scheduling_prime(m),
        stages,
        blocks,
        swap_layers: layers,
        mean_layers: layers as f64 / stages.max(1) as f64,
        deep_fraction: deep as f64 / stages.max(1) as f64,
        max_layers: max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{DenseSynthetic, MolecularHamiltonian};

    fn full(m: usize) -> Schedule {
        build_schedule(&DenseSynthetic::hashed(m, 1))
    }

    #[test]
    fn circle_rounds_for_eight() {
        let r = circle_method_rounds(8).unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r[0], vec![(0, 1), (2, 3), (4, 5), (6, 7)]);
        assert_eq!(r[1], vec![(2, 0), (4, 1), (6, 3), (5, 7)]);
        let mut all: Vec<(usize, usize)> = r.iter().flatten().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 28);
    }

    #[test]
    fn circle_rounds_for_odd_counts() {
        for n in [3usize, 5, 7, 9] {
            let r = circle_method_rounds(n).unwrap();
            assert_eq!(r.len(), n);
            assert!(r.iter().all(|round| round.len() == n / 2));
            let mut all: Vec<(usize, usize)> = r.iter().flatten().map(|&(a, b)| (a.min(b), a.max(b))).collect();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), n * (n - 1) / 2);
        }
        assert!(circle_method_rounds(1).is_err());
    }

    #[test]
    fn compaction_keeps_the_permutation() {
        let layers = vec![vec![0], vec![3], vec![1], vec![0, 2]];
        let out = compact_layers(layers.clone());
        assert_eq!(out, vec![vec![0, 3], vec![1], vec![0, 2]]);
        let (mut a, mut b): (Vec<usize>, Vec<usize>) = ((0..5).collect(), (0..5).collect());
        apply_layers(&mut a, &layers);
        apply_layers(&mut b, &out);
        assert_eq!(a, b);
    }

    #[test]
    fn routing_reversal_of_four() {
        let layers = route_permutation(&[0, 1, 2, 3], &[3, 2, 1, 0]).unwrap();
        assert_eq!(layers.len(), 4);
        assert!(route_permutation(&[0, 1, 2], &[0, 1, 2]).unwrap().is_empty());
        assert!(route_permutation(&[0, 1, 1], &[0, 1, 2]).is_err());
    }

    #[test]
    fn pair_round_step_is_two_layers() {
        let s = full(8);
        let pairs: Vec<&Stage> = s.stages.iter().filter(|s| s.kind == StageKind::Pair).collect();
        assert_eq!(pairs.len(), 7);
        assert_eq!(pairs[1].layout, vec![2, 0, 4, 1, 6, 3, 5, 7]);
        assert!(pairs[1..].iter().all(|s| s.routing.len() == 2));
    }

    #[test]
    fn dense_eight_counts() {
        let s = full(8);
        let count = |k| s.stages.iter().filter(|s| s.kind == k).count();
        assert_eq!(count(StageKind::Pair), 7);
        assert_eq!(count(StageKind::Triple), 28);
        assert!(s.stages.iter().filter(|s| s.kind == StageKind::Triple).all(|s| s.blocks.len() == 2));
        let r = verify_schedule(&s, true).unwrap();
        assert_eq!((r.pairs, r.triples, r.quads, r.quad_pairings), (28, 56, 70, 210));
    }

    #[test]
    fn exact_cover_small_orbital_counts() {
        for m in 2..=10 {
            verify_schedule(&full(m), true).unwrap_or_else(|e| panic!("m={m}: {e}"));
        }
    }

    #[test]
    fn single_hopping_gives_single_pair_stage() {
        let mut h = MolecularHamiltonian::new(4);
        h.add_one_body(0, 1, 0.3).unwrap();
        let s = build_schedule(&h);
        assert_eq!(s.stages.len(), 1);
        assert_eq!(s.stages[0].kind, StageKind::Pair);
        assert_eq!(s.stages[0].blocks, vec![vec![0, 1]]);
    }

    #[test]
    fn sparse_schedule_routes_through_skipped_stages() {
        let mut h = MolecularHamiltonian::new(6);
        h.add_one_body(2, 5, 0.3).unwrap();
        h.add_two_body([0, 3, 4, 1], 0.2).unwrap();
        h.add_two_body([1, 4, 4, 2], 0.1).unwrap();
        let s = build_schedule(&h);
        verify_schedule(&s, false).unwrap();
        assert_eq!(s.stages.len(), 3);
    }

    #[test]
    fn quad_routing_stays_shallow() {
        let st = quad_routing_stats(8);
        assert_eq!(st.blocks, 70);
        assert!(st.mean_layers <= 8.0);
    }
}
