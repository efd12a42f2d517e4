//! Dense state-vector and unitary simulation.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::circuit::{Circuit, Gate, GateKind, Role};
use crate::error::{Error, Result};
use crate::hamiltonian::MolecularHamiltonian;
use crate::linalg::{cis, hermitian_eigen, CMat, C64, I, ONE, ZERO};

static CAP: AtomicUsize = AtomicUsize::new(crate::DEFAULT_SIM_CAP);

/// Qubit cap for dense unitaries.
pub fn cap() -> usize {
    CAP.load(Ordering::Relaxed)
}

pub fn set_cap(n: usize) {
    CAP.store(n, Ordering::Relaxed);
}

/// State-vector paths allow this many qubits beyond the unitary cap.
pub const STATE_EXTRA: usize = 8;

fn check(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Cap { needed: n, cap: limit })
    } else {
        Ok(())
    }
}

#[inline]
fn mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Applies one gate in place. Qubit 0 is the most significant bit.
pub fn apply_gate(state: &mut [C64], n: usize, g: &Gate) {
    let q = &g.qubits;
    match g.kind {
        GateKind::Measure => {}
        GateKind::H => {
            let m = mask(n, q[0]);
            let r = core::f64::consts::FRAC_1_SQRT_2;
            for i in 0..state.len() {
                if i & m == 0 {
                    let (a, b) = (state[i], state[i | m]);
                    state[i] = (a + b) * r;
                    state[i | m] = (a - b) * r;
                }
            }
        }
        GateKind::S | GateKind::Sdg => {
            let m = mask(n, q[0]);
            let z = if g.kind == GateKind::S { I } else { -I };
            for (i, a) in state.iter_mut().enumerate() {
                if i & m != 0 {
                    *a *= z;
                }
            }
        }
        GateKind::X => flip_where(state, 0, 0, mask(n, q[0])),
        GateKind::Cx => flip_where(state, mask(n, q[0]), mask(n, q[0]), mask(n, q[1])),
        GateKind::Toffoli => {
            let c = mask(n, q[0]) | mask(n, q[1]);
            flip_where(state, c, c, mask(n, q[2]));
        }
        GateKind::MultiCx => {
            let t = q[1..].iter().fold(0, |acc, &x| acc | mask(n, x));
            flip_where(state, mask(n, q[0]), mask(n, q[0]), t);
        }
        GateKind::Cz => {
            let m = mask(n, q[0]) | mask(n, q[1]);
            for (i, a) in state.iter_mut().enumerate() {
                if i & m == m {
                    *a = -*a;
                }
            }
        }
        GateKind::Swap | GateKind::FermionicSwap => {
            let (ma, mb) = (mask(n, q[0]), mask(n, q[1]));
            for i in 0..state.len() {
                if i & ma != 0 && i & mb == 0 {
                    state.swap(i, i ^ ma ^ mb);
                }
            }
            if g.kind == GateKind::FermionicSwap {
                for (i, a) in state.iter_mut().enumerate() {
                    if i & ma != 0 && i & mb != 0 {
                        *a = -*a;
                    }
                }
            }
        }
        GateKind::Rz | GateKind::CRz | GateKind::MultiCRz => {
            let (mut on, mut want) = (0, 0);
            for (c, positive) in g.rotation_controls() {
                on |= mask(n, c);
                if positive {
                    want |= mask(n, c);
                }
            }
            let t = mask(n, g.target());
            let (z0, z1) = (cis(-g.angle / 2.0), cis(g.angle / 2.0));
            for (i, a) in state.iter_mut().enumerate() {
                if i & on == want {
                    *a *= if i & t == 0 { z0 } else { z1 };
                }
            }
        }
    }
}

fn flip_where(state: &mut [C64], on: usize, want: usize, flip: usize) {
    for i in 0..state.len() {
        let j = i ^ flip;
        if i < j && i & on == want {
            state.swap(i, j);
        }
    }
}

/// Applies the circuit (moments in order, then the global phase).
pub fn apply(circ: &Circuit, state: &mut [C64]) -> Result<()> {
    let n = circ.n_qubits();
    check(n, cap() + STATE_EXTRA)?;
    if state.len() != 1 << n {
        return Err(Error::Argument("state dimension does not match circuit".into()));
    }
    for g in circ.gates() {
        apply_gate(state, n, g);
    }
    let z = cis(-circ.global_phase);
    for a in state.iter_mut() {
        *a *= z;
    }
    Ok(())
}

pub fn basis_state(n: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; 1 << n];
    v[index] = ONE;
    v
}

/// Full dense unitary of the circuit.
pub fn full_unitary(circ: &Circuit) -> Result<CMat> {
    let n = circ.n_qubits();
    check(n, cap())?;
    let dim = 1 << n;
    let mut u = CMat::zeros(dim, dim);
    for col in 0..dim {
        let mut v = basis_state(n, col);
        apply(circ, &mut v)?;
        u.set_column(col, &nalgebra::DVector::from_vec(v));
    }
    Ok(u)
}

/// Unitary on the non-ancilla register with ancillas prepared in and
/// projected onto `|0⟩`. Also returns the largest amplitude norm that
/// leaked into nonzero ancilla states.
pub fn register_unitary(circ: &Circuit) -> Result<(CMat, f64)> {
    let n = circ.n_qubits();
    check(n, cap())?;
    let k = circ.qubits().iter().filter(|q| q.role != Role::Ancilla).count();
    let anc = n - k;
    let dim = 1 << k;
    let mut u = CMat::zeros(dim, dim);
    let mut leak: f64 = 0.0;
    for col in 0..dim {
        let mut v = basis_state(n, col << anc);
        apply(circ, &mut v)?;
        let mut off = 0.0;
        for (i, a) in v.iter().enumerate() {
            if i & ((1 << anc) - 1) == 0 {
                u[(i >> anc, col)] = *a;
            } else {
                off += a.norm_sqr();
            }
        }
        leak = leak.max(libm::sqrt(off));
    }
    Ok((u, leak))
}

/// Lowest eigenvalue of the dense Hamiltonian matrix.
pub fn exact_ground_energy(h: &MolecularHamiltonian) -> Result<f64> {
    Ok(ground_state(h)?.0)
}

/// Lowest eigenvalue and a matching eigenvector.
pub fn ground_state(h: &MolecularHamiltonian) -> Result<(f64, Vec<C64>)> {
    check(h.orbitals(), cap())?;
    let mtx = h.matrix()?;
    let (vals, vecs) = hermitian_eigen(&mtx);
    Ok((vals[0], vecs.column(0).iter().copied().collect()))
}

/// Marginal distribution over the first `k` qubits.
pub fn marginal_leading(state: &[C64], n: usize, k: usize) -> Vec<f64> {
    let mut out = vec![0.0; 1 << k];
    for (i, a) in state.iter().enumerate() {
        out[i >> (n - k)] += a.norm_sqr();
    }
    out
}

pub fn norm(state: &[C64]) -> f64 {
    libm::sqrt(state.iter().map(|a| a.norm_sqr()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_unitary, kron, max_abs_diff};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_circuit(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Circuit {
        let mut c = Circuit::new(n, 0);
        for _ in 0..len {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n);
            while b == a {
                b = rng.gen_range(0..n);
            }
            let th = rng.gen_range(-3.0..3.0);
            let g = match rng.gen_range(0..8) {
                0 => Gate::h(a),
                1 => Gate::s(a),
                2 => Gate::cx(a, b),
                3 => Gate::cz(a, b),
                4 => Gate::rz(a, th),
                5 => Gate::crz(a, b, th),
                6 => Gate::swap(a, b),
                _ => Gate::sdg(a),
            };
            c.push(g);
        }
        c
    }

    #[test]
    fn hadamard_on_zero() {
        let mut c = Circuit::new(1, 0);
        c.push(Gate::h(0));
        let mut s = basis_state(1, 0);
        apply(&c, &mut s).unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((s[0].re - r).abs() < 1e-15 && (s[1].re - r).abs() < 1e-15);
    }

    #[test]
    fn controlled_flips_follow_controls() {
        let mut c = Circuit::new(3, 0);
        c.push(Gate::cx(0, 2));
        let u = full_unitary(&c).unwrap();
        assert_eq!(u[(0b101, 0b100)], ONE);
        assert_eq!(u[(0b001, 0b001)], ONE);
        let mut t = Circuit::new(3, 0);
        t.push(Gate::toffoli(0, 1, 2));
        let u = full_unitary(&t).unwrap();
        assert_eq!(u[(0b111, 0b110)], ONE);
        assert_eq!(u[(0b100, 0b100)], ONE);
        let mut f = Circuit::new(3, 0);
        f.push(Gate::fanout(1, &[0, 2]));
        let u = full_unitary(&f).unwrap();
        assert_eq!(u[(0b111, 0b010)], ONE);
        assert_eq!(u[(0b100, 0b100)], ONE);
    }

    #[test]
    fn rz_convention() {
        let mut c = Circuit::new(1, 0);
        c.push(Gate::rz(0, 0.6));
        let u = full_unitary(&c).unwrap();
        assert!((u[(0, 0)] - cis(-0.3)).norm() < 1e-15);
        assert!((u[(1, 1)] - cis(0.3)).norm() < 1e-15);
    }

    #[test]
    fn fermionic_swap_matches_oracle() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::fswap(0, 1));
        let u = full_unitary(&c).unwrap();
        let o = crate::fermion::fermionic_permutation_matrix(&[1, 0], 2).unwrap();
        assert!(max_abs_diff(&u, &o) < 1e-15);
    }

    #[test]
    fn disjoint_moment_is_tensor_product() {
        let mut a = Circuit::new(1, 0);
        a.push(Gate::h(0));
        let mut b = Circuit::new(1, 0);
        b.push(Gate::rz(0, 0.4));
        let mut ab = Circuit::new(2, 0);
        ab.push(Gate::h(0));
        ab.push(Gate::rz(1, 0.4));
        assert_eq!(ab.depth(), 1);
        let k = kron(&full_unitary(&a).unwrap(), &full_unitary(&b).unwrap());
        assert!(max_abs_diff(&k, &full_unitary(&ab).unwrap()) < 1e-15);
    }

    #[test]
    fn random_circuits_are_unitary_and_norm_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let c = random_circuit(&mut rng, 8, 60);
            let u = full_unitary(&c).unwrap();
            assert!(is_unitary(&u, 1e-11));
            let mut s = basis_state(8, rng.gen_range(0..256));
            apply(&c, &mut s).unwrap();
            assert!((norm(&s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_circuit(&mut rng, 3, 15);
        let b = random_circuit(&mut rng, 3, 15);
        let mut ab = a.clone();
        ab.extend_from(&b).unwrap();
        let lhs = full_unitary(&ab).unwrap();
        let rhs = full_unitary(&b).unwrap() * full_unitary(&a).unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn order_within_moment_is_irrelevant() {
        let layer = vec![
            Gate::mcrz(&[(0, true), (1, false)], 2, 0.3),
            Gate::crz(2, 1, -0.7),
            Gate::rz(0, 1.1),
            Gate::cz(0, 2),
        ];
        let mut a = Circuit::new(3, 0);
        a.push_layer(layer.clone()).unwrap();
        let mut b = Circuit::new(3, 0);
        b.push_layer(layer.into_iter().rev().collect()).unwrap();
        assert!(max_abs_diff(&full_unitary(&a).unwrap(), &full_unitary(&b).unwrap()) < 1e-12);
    }

    #[test]
    fn ground_energy_of_single_number_term() {
        let mut h = MolecularHamiltonian::new(1);
        h.add_one_body(0, 0, -1.0).unwrap();
        assert!((exact_ground_energy(&h).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(exact_ground_energy(&MolecularHamiltonian::new(2)).unwrap(), 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        let c = Circuit::new(cap() + 1, 0);
        assert!(matches!(full_unitary(&c), Err(Error::Cap { .. })));
    }
}
