//! One line per acceptance criterion. Exits nonzero when a criterion
//! outside `KNOWN_SHORTFALLS` fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skilift_core::accounting::{bench_report, BaselineProfile, ScheduleProfile};
use skilift_core::hamiltonian::{support_keys, DenseSynthetic, TermIndices};
use skilift_core::linalg::{compare_up_to_phase, expm_hermitian, max_abs_diff, CMat};
use skilift_core::passes::{self, Pass};
use skilift_core::schedule::{all_supports, build_schedule, quad_routing_stats, verify_schedule};
use skilift_core::sim::{full_unitary, ground_state, register_unitary};
use skilift_core::templates::{self, LocalForm};
use skilift_core::trotter::{
    nearest_bin, qpe_circuit, qpe_distribution, read_energy, routing_sign_deviations, trotter_circuit, QpeConfig,
    TrotterPlan,
};
use skilift_core::{Circuit, CostModel, Gate, GateKind, MolecularHamiltonian, Term};

/// Criteria expected to fail; see the README for the analysis.
const KNOWN_SHORTFALLS: &[usize] = &[8];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn choose(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Every allowed term with a coefficient in `[-1, 1)`.
fn random_hamiltonian(m: usize, seed: u64) -> MolecularHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = MolecularHamiltonian::new(m);
    for s in all_supports(m) {
        for indices in support_keys(&s) {
            h.add_term(Term { indices, coeff: rng.gen_range(-1.0..1.0) }).unwrap();
        }
    }
    h
}

fn relabel(t: &Term, wire_of: &[usize]) -> Term {
    let indices = match t.indices {
        TermIndices::One(p, q) => TermIndices::One(wire_of[p], wire_of[q]),
        TermIndices::Two(k) => TermIndices::Two(k.map(|x| wire_of[x])),
    };
    Term { indices, coeff: t.coeff }
}

/// Random block of each class on adjacent wires of an `m <= 6` register
/// under a random layout, against the product of term exponentials.
fn template_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    let mut trials = 0;
    for k in 1..=4usize {
        for _ in 0..20 {
            let m = rng.gen_range(k.max(2)..=6);
            let mut layout: Vec<usize> = (0..m).collect();
            layout.shuffle(&mut rng);
            let start = rng.gen_range(0..=m - k);
            let modes: Vec<usize> = layout[start..start + k].to_vec();
            let mut support = modes.clone();
            support.sort_unstable();
            let terms: Vec<Term> = support_keys(&support)
                .into_iter()
                .map(|indices| Term { indices, coeff: rng.gen_range(-1.5..1.5) })
                .collect();
            let tau = rng.gen_range(0.1..2.0);
            let mut c = Circuit::new(m, 0);
            let wires: Vec<usize> = (start..start + k).map(|w| c.orbital_qubit(w)).collect();
            templates::emit_block(&mut c, &wires, &modes, &terms, tau, false).unwrap();

            let mut wire_of = vec![0; m];
            for (w, &mode) in layout.iter().enumerate() {
                wire_of[mode] = w;
            }
            let diagonal = |t: &Term| !matches!(templates::local_form(t, &modes).unwrap(), LocalForm::Rank2(_));
            let ordered = terms.iter().filter(|t| diagonal(t)).chain(terms.iter().filter(|t| !diagonal(t)));
            let mut want = CMat::identity(1 << m, 1 << m);
            for t in ordered {
                want = expm_hermitian(&relabel(t, &wire_of).matrix(m).unwrap(), tau) * want;
            }
            let got = full_unitary(&c).unwrap();
            worst = worst.max(compare_up_to_phase(&got, &want).deviation);
            trials += 1;
        }
    }
    outcome(worst < 1e-10, format!("{trials} blocks over 4 classes, worst deviation {worst:.2e}"))
}

fn quad_rotation_depths() -> Outcome {
    let t = Term::two_body([0, 1, 3, 2], 0.8).unwrap();
    let base = templates::baseline_pauli_template(&t, 4, 0.55).unwrap().rotation_depth();
    let opt = templates::quad_template([0.8, 0.0, 0.0], 0.55).rotation_depth();
    outcome(base == 8 && opt == 1, format!("baseline {base}, optimized {opt}"))
}

fn random_layered(rng: &mut ChaCha8Rng, m: usize, b: usize, layers: usize, max_controls: usize) -> Circuit {
    let mut c = Circuit::new(m, b);
    let n = m + b;
    for _ in 0..layers {
        let q = rng.gen_range(b..n);
        let r = rng.gen_range(b..n);
        let mut basis = vec![Gate::h(q)];
        if r != q {
            basis.push(Gate::cx(q, r));
        }
        for g in &basis {
            c.push(g.clone());
        }
        let mut layer = Vec::new();
        for _ in 0..rng.gen_range(1..4) {
            let t = rng.gen_range(b..n);
            let k = rng.gen_range(0..=max_controls.min(m - 1));
            let mut pool: Vec<usize> = (b..n).filter(|&x| x != t).collect();
            let mut ctl = Vec::new();
            for _ in 0..k {
                let x = pool.swap_remove(rng.gen_range(0..pool.len()));
                ctl.push((x, rng.gen_bool(0.6)));
            }
            layer.push(Gate::controlled_rz(&ctl, t, rng.gen_range(-3.0..3.0)));
        }
        c.push_layer(layer).unwrap();
        for g in basis.into_iter().rev() {
            c.push(g);
        }
    }
    c.global_phase = rng.gen_range(-1.0..1.0);
    c
}

/// Copy of `c` on a register with `b` precision wires, angles scaled by `k`.
fn scaled(c: &Circuit, b: usize, k: f64) -> Circuit {
    let mut out = Circuit::new(c.n_orbitals(), b);
    for m in c.moments() {
        let layer = m
            .iter()
            .map(|g| {
                let mut g = g.clone();
                g.angle *= k;
                for q in &mut g.qubits {
                    *q += b;
                }
                g
            })
            .collect();
        out.push_layer(layer).unwrap();
    }
    out.global_phase = c.global_phase * k;
    out
}

fn pass_preservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for pass in [Pass::Parallelize, Pass::Consolidate, Pass::Merge, Pass::Lower] {
        for _ in 0..50 {
            let c = random_layered(&mut rng, 4, 0, 3, if pass == Pass::Consolidate { 3 } else { 2 });
            let out = passes::run_pipeline(&c, &[pass]).unwrap();
            let (ua, la) = register_unitary(&c).unwrap();
            let (ub, lb) = register_unitary(&out).unwrap();
            worst = worst.max(max_abs_diff(&ua, &ub)).max(la).max(lb);
            runs += 1;
        }
    }
    // Expansion: each precision value t must see the evolution scaled by t.
    let b = 2;
    let d = 1 << 3;
    for _ in 0..50 {
        let c = random_layered(&mut rng, 3, 0, 2, 1);
        let out = passes::expand_precision_controls(&scaled(&c, b, 1.0)).unwrap();
        let (full, leak) = register_unitary(&out).unwrap();
        worst = worst.max(leak);
        for t in 0..(1usize << b) {
            let want = full_unitary(&scaled(&c, 0, t as f64)).unwrap();
            let block = full.view((t * d, t * d), (d, d)).into_owned();
            worst = worst.max(max_abs_diff(&block, &want));
        }
        runs += 1;
    }
    let mut merge_ok = true;
    for n in 2..=5 {
        let mut c = Circuit::new(n + 1, 0);
        c.push_layer((0..n).map(|i| Gate::crz(i, n, 0.3 + i as f64)).collect()).unwrap();
        let out = passes::merge_same_target(&c).unwrap();
        merge_ok &= out.gates().filter(|g| g.kind == GateKind::Rz).count() == n + 1;
    }
    outcome(worst < 1e-12 && merge_ok, format!("{runs} circuits, worst deviation {worst:.2e}, merge n+1 Rz: {merge_ok}"))
}

fn exact_cover() -> Outcome {
    let mut bad = Vec::new();
    let mut at8 = (0, 0);
    for m in 2..=16 {
        let r = verify_schedule(&build_schedule(&DenseSynthetic::hashed(m, 1)), true);
        let Ok(r) = r else {
            bad.push(format!("m={m}: {}", r.unwrap_err()));
            continue;
        };
        let m64 = m as u64;
        if r.pairs as u64 != choose(m64, 2) {
            bad.push(format!("m={m} pairs {}", r.pairs));
        }
        if (3..=12).contains(&m) && r.triples as u64 != choose(m64, 3) {
            bad.push(format!("m={m} triples {}", r.triples));
        }
        if (4..=10).contains(&m) && r.quad_pairings as u64 != 3 * choose(m64, 4) {
            bad.push(format!("m={m} quad pairings {}", r.quad_pairings));
        }
        if m == 8 {
            at8 = (r.triples, r.quad_pairings);
        }
    }
    let ok = bad.is_empty() && at8 == (56, 210);
    outcome(ok, format!("m=8 triples {} quad pairings {}{}", at8.0, at8.1, if ok { String::new() } else { format!("; {}", bad.join(", ")) }))
}

fn routing_signs() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for m in 2..=8 {
        let s = build_schedule(&DenseSynthetic::hashed(m, 2));
        for d in routing_sign_deviations(&s).unwrap() {
            worst = worst.max(d);
            checked += 1;
        }
    }
    outcome(worst < 1e-12, format!("{checked} routing segments for m 2..8, worst deviation {worst:.2e}"))
}

fn convergence_slope() -> Outcome {
    let h = random_hamiltonian(4, 7);
    let s = build_schedule(&h);
    let hm = h.matrix().unwrap();
    let ts = [0.2, 0.1, 0.05, 0.025];
    let errs: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let c = trotter_circuit(&h, &s, &TrotterPlan::new(t, 1), 0).unwrap();
            max_abs_diff(&full_unitary(&c).unwrap(), &expm_hermitian(&hm, t))
        })
        .collect();
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = num / den;
    outcome(slope >= 4.7, format!("slope {slope:.3}, errors {:?}", errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()))
}

fn qpe_ground_state() -> Outcome {
    let start = Instant::now();
    let h = random_hamiltonian(4, 11);
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
    let dist = ((r.bin + n - want) % n).min((want + n - r.bin) % n);
    let took = start.elapsed();
    outcome(
        dist <= 1 && r.probability >= 0.4 && took < Duration::from_secs(120),
        format!("E0 {e0:.4}, bin {} vs {want}, mass {:.3}, {:.2?}", r.bin, r.probability, took),
    )
}

fn large_scale_accounting() -> Outcome {
    let start = Instant::now();
    let src = DenseSynthetic::unit(120);
    let profile = ScheduleProfile::collect(&src).unwrap();
    let base = BaselineProfile::collect(&src).unwrap();
    let model = CostModel::LATTICE_SURGERY;
    let reports: Vec<_> = [1, 2, 4].iter().map(|&b| bench_report(&profile, &base, b, &model, &Pass::ALL).unwrap()).collect();
    let took = start.elapsed();
    let f = reports[0].factors;
    for r in &reports {
        println!(
            "    b={}: rotation {} vs {} (ratio {:.1}), width {} vs {} (ratio {:.3})",
            r.b,
            r.baseline.rotation_depth,
            r.optimized.step.rotation_depth,
            r.factors.rotation_depth,
            r.baseline.width,
            r.optimized.step.width,
            r.factors.width
        );
    }
    println!(
        "    factors: template {:.4} x parallel {:.2}; quad template {} x quad parallel {:.2} ({:.2} blocks per stage)",
        f.template, f.parallel, f.quad_template, f.quad_parallel, f.mean_quad_blocks
    );
    let rot_const = reports.iter().all(|r| r.optimized.step.rotation_depth == reports[0].optimized.step.rotation_depth);
    let w: Vec<u64> = reports.iter().map(|r| r.optimized.step.width).collect();
    let slope = (w[1] - w[0]) as f64;
    let linear = (w[2] - w[1]) as f64 == 2.0 * slope;
    let checks = [
        ("rotation ratio in [600, 840]", (600.0..=840.0).contains(&f.rotation_depth)),
        ("width ratio in [1.5, 2.5]", (1.5..=2.5).contains(&f.width)),
        ("rotation depth constant in b", rot_const),
        ("width linear in b", linear),
        ("quad template factor 8", f.quad_template == 8.0),
        ("under 5 minutes", took < Duration::from_secs(300)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!(
            "rotation ratio {:.1}, width ratio {:.3}, widths {w:?}, {:.1?}{}",
            f.rotation_depth,
            f.width,
            took,
            if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
        ),
    )
}

fn quad_swap_depth() -> Outcome {
    let stats: Vec<_> = [8, 16, 24, 32, 40].iter().map(|&m| quad_routing_stats(m)).collect();
    let mean_ok = stats.iter().all(|s| s.mean_layers <= 8.0);
    let mono = stats.windows(2).all(|w| w[1].deep_fraction <= w[0].deep_fraction);
    let parts: Vec<String> = stats.iter().map(|s| format!("m={} mean {:.2} deep {:.3}", s.m, s.mean_layers, s.deep_fraction)).collect();
    outcome(mean_ok && mono, parts.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("template exactness", template_exactness),
        ("quad rotation depth 8 vs 1", quad_rotation_depths),
        ("passes preserve unitaries", pass_preservation),
        ("schedule exact cover", exact_cover),
        ("routing signs", routing_signs),
        ("fourth-order convergence", convergence_slope),
        ("phase estimation readout", qpe_ground_state),
        ("large-scale accounting", large_scale_accounting),
        ("quad swap depth", quad_swap_depth),
    ];
    let mut unexpected = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        let r = f();
        let known = KNOWN_SHORTFALLS.contains(&n);
        let status = match (r.ok, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known shortfall)",
            (false, false) => "FAIL",
        };
        println!("criterion {n} {name}: {status} ({})", r.detail);
        if !r.ok && !known {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
