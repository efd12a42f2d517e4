use skilift_core::fermion::{fermionic_permutation_matrix, jw_annihilator, jw_creator, operator_matrix};
use skilift_core::hamiltonian::DenseSynthetic;
use skilift_core::linalg::{is_hermitian, max_abs_diff, CMat};
use skilift_core::schedule::apply_layers;
use skilift_core::sim::full_unitary;
use skilift_core::{Circuit, Gate};

#[test]
fn jordan_wigner_anticommutation() {
    let m = 4;
    for i in 0..m {
        for j in 0..m {
            let a = jw_annihilator(i, m).unwrap();
            let cj = jw_creator(j, m).unwrap();
            let anti = &a * &cj + &cj * &a;
            let want = if i == j { CMat::identity(16, 16) } else { CMat::zeros(16, 16) };
            assert!(max_abs_diff(&anti, &want) < 1e-14, "{i} {j}");
            let aj = jw_annihilator(j, m).unwrap();
            assert!(max_abs_diff(&(&a * &aj + &aj * &a), &CMat::zeros(16, 16)) < 1e-14);
        }
    }
}

#[test]
fn term_matrices_agree_with_normal_ordered_operators() {
    let h = DenseSynthetic::hashed(4, 3).to_hamiltonian();
    for t in h.terms() {
        let direct = t.matrix(4).unwrap();
        assert!(is_hermitian(&direct, 1e-12), "{t:?}");
        let via = operator_matrix(&t.operator(), 4).unwrap();
        assert!(max_abs_diff(&direct, &via) < 1e-12, "{t:?}");
    }
    let full = h.matrix().unwrap();
    assert!(max_abs_diff(&full, &operator_matrix(&h.operator(), 4).unwrap()) < 1e-11);
}

#[test]
fn fswap_network_matches_fermionic_permutation() {
    let mut c = Circuit::new(3, 0);
    c.push(Gate::fswap(0, 1));
    c.push(Gate::fswap(1, 2));
    let u = full_unitary(&c).unwrap();
    // Layout after the two swaps: wire w holds mode [1, 2, 0][w].
    let mut layout = vec![0, 1, 2];
    apply_layers(&mut layout, &[vec![0], vec![1]]);
    assert_eq!(layout, [1, 2, 0]);
    assert!(max_abs_diff(&u, &fermionic_permutation_matrix(&layout, 3).unwrap()) < 1e-14);
    assert!(max_abs_diff(&u, &fermionic_permutation_matrix(&[2, 0, 1], 3).unwrap()) > 0.5);
}
