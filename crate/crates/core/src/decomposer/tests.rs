use super::*;
use crate::gallery;
use crate::matrix::C64;
use crate::partition::plan_transversals;
use crate::spectral::spectra_agree;
use proptest::prelude::*;

fn real(rows: &[&[f64]]) -> MatrixC {
    MatrixC::from_fn(rows.len(), rows[0].len(), |i, j| C64::new(rows[i][j], 0.0))
}

fn close(a: &MatrixC, b: &MatrixC, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol
}

#[test]
fn transform_p2_is_hadamard() {
    let tf = transform_for(0, 1, 2, 1);
    assert!(close(&tf.t, &real(&[&[1.0, 1.0], &[1.0, -1.0]]), 1e-15));
    assert!(close(&tf.t_inv, &real(&[&[0.5, 0.5], &[0.5, -0.5]]), 1e-15));
}

#[test]
fn transform_p3_columns_are_powers() {
    let tf = transform_for(0, 1, 3, 1);
    let w = omega_pow(1, 3);
    let expected = MatrixC::from_rows(&[
        vec![C64::new(1.0, 0.0); 3],
        vec![C64::new(1.0, 0.0), w, w * w],
        vec![C64::new(1.0, 0.0), w * w, w],
    ]);
    assert!(close(&tf.t, &expected, 1e-15));
    assert_eq!(tf.gammas, vec![1, 2]);
}

#[test]
fn gammas_skip_multiples() {
    assert_eq!(gammas(3, 9), vec![1, 2, 4, 5, 7, 8]);
    assert_eq!(gammas(2, 8), vec![1, 3, 5, 7]);
    assert!(gammas(2, 1).is_empty());
}

#[test]
fn omega_reduces_exponent() {
    assert_eq!(omega_pow(0, 7), C64::new(1.0, 0.0));
    assert_eq!(omega_pow(14, 7), C64::new(1.0, 0.0));
    assert!((omega_pow(-1, 4) - C64::new(0.0, -1.0)).norm() < 1e-15);
}

#[test]
fn roots_of_unity_sums() {
    // Σ_m ω^{γm} over a full period vanishes for every γ not divisible by k,
    // and the γ-columns are orthogonal to each other and to the constant one
    for p in [2usize, 3, 5] {
        for n in 1..=3u32 {
            let k = p.pow(n);
            let gs = gammas(p, k);
            for &g in &gs {
                let s: C64 = (0..k).map(|m| omega_pow((g * m) as i64, k)).sum();
                assert!(s.norm() < 1e-12, "p={p} N={n} γ={g}");
                // sums over each residue class mod k/p: Σ_s ω^{γ(m + s·k/p)} = 0
                for m in 0..k / p {
                    let s: C64 = (0..p)
                        .map(|s| omega_pow((g * (m + s * k / p)) as i64, k))
                        .sum();
                    assert!(s.norm() < 1e-12);
                }
                for &h in &gs {
                    let dot: C64 = (0..k)
                        .map(|m| omega_pow((g * m) as i64, k) * omega_pow((h * m) as i64, k).conj())
                        .sum();
                    let want = if g == h { k as f64 } else { 0.0 };
                    assert!((dot - C64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn trivial_swap_round() {
    let (a, b) = (2.5, -0.75);
    let m = real(&[&[a, b], &[b, a]]);
    let phi = Permutation::parse_cycles("(1 2)", 2).unwrap();
    let res = general_decompose(&m, &phi, &DecomposeOptions::default()).unwrap();
    assert!(close(&res.divisor, &real(&[&[a + b]]), 1e-14));
    assert_eq!(res.blocks.len(), 1);
    assert!(close(&res.blocks[0].matrix, &real(&[&[a - b]]), 1e-14));
    assert_eq!(
        res.blocks[0].tag,
        BlockTag {
            stage: 0,
            round: 1,
            j: 1
        }
    );
}

#[test]
fn path_on_two_vertices() {
    let m = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let phi = Permutation::parse_cycles("(1 2)", 2).unwrap();
    let res = prime_power_decompose(&m, &phi, &[]).unwrap();
    assert!(close(&res.divisor, &real(&[&[1.0]]), 1e-15));
    assert!(close(&res.blocks[0].matrix, &real(&[&[-1.0]]), 1e-15));
}

#[test]
fn identity_automorphism_returns_matrix() {
    let m = gallery::order9_adjacency();
    let res =
        general_decompose(&m, &Permutation::identity(12), &DecomposeOptions::default()).unwrap();
    assert_eq!(res.divisor, m);
    assert!(res.blocks.is_empty());
    assert!(res.rounds.is_empty());
    assert_eq!(res.divisor_labels, (1..=12).collect::<Vec<_>>());
}

#[test]
fn order12_first_round_layout() {
    let m = gallery::order12_adjacency();
    let phi = gallery::order12_phi();
    let psi = phi.pow(3);
    let plan = plan_transversals(&psi.orbits(), &phi, 2, None, &[1], 1).unwrap();
    let labels: Vec<usize> = (1..=18).collect();
    let layout = reorder_for_prime_power(&m, &labels, &plan, 2, 2).unwrap();

    assert_eq!(
        layout.index_map,
        vec![13, 14, 15, 16, 17, 18, 1, 5, 9, 4, 8, 12, 7, 11, 3, 10, 2, 6]
    );
    let cycle6 = MatrixC::from_fn(6, 6, |i, j| {
        let d = (i + 6 - j) % 6;
        C64::new(if d == 1 || d == 5 { 1.0 } else { 0.0 }, 0.0)
    });
    assert_eq!(layout.f_block, cycle6);
    let zero3 = MatrixC::zeros(3, 3);
    assert_eq!(layout.c[0], zero3);
    assert_eq!(
        layout.c[1],
        real(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]])
    );
    assert_eq!(layout.c[2], zero3);
    assert_eq!(
        layout.c[3],
        real(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]])
    );
    // row u of H marks the T_0 ∪ T_1 neighbour of vertex 13 + u
    let mut h = MatrixC::zeros(6, 6);
    for (u, col) in [0, 4, 2, 3, 1, 5].into_iter().enumerate() {
        h[(u, col)] = C64::new(1.0, 0.0);
    }
    assert_eq!(layout.h, h);
    assert_eq!(layout.l, h.transpose());

    let out = prime_power_round(&layout).unwrap();
    assert!(out.residual < 1e-12);
    assert!(out.inverse_error < 1e-12);
    assert_eq!(out.blocks.len(), 2);
    let i = C64::new(0.0, 1.0);
    // B_j = ω^{γ}C_1 + ω^{3γ}C_3 with ω = i
    for (b, g) in out.blocks.iter().zip([1i64, 3]) {
        let want = &layout.c[1].scale(omega_pow(g, 4)) + &layout.c[3].scale(omega_pow(3 * g, 4));
        assert!(close(b, &want, 1e-15));
    }
    assert!((omega_pow(1, 4) - i).norm() < 1e-15);
}

#[test]
fn misaligned_matrix_is_not_block_circulant() {
    let mut m = gallery::order12_adjacency();
    m[(0, 1)] = C64::new(5.0, 0.0);
    let phi = gallery::order12_phi();
    let plan = plan_transversals(&phi.pow(3).orbits(), &phi, 2, None, &[], 1).unwrap();
    let labels: Vec<usize> = (1..=18).collect();
    assert!(matches!(
        reorder_for_prime_power(&m, &labels, &plan, 2, 2),
        Err(Error::NotBlockCirculant(_))
    ));
}

#[test]
fn non_automorphism_rejected() {
    let m = gallery::order9_adjacency();
    let phi = Permutation::parse_cycles("(1 4)", 12).unwrap();
    assert!(matches!(
        general_decompose(&m, &phi, &DecomposeOptions::default()),
        Err(Error::NotAnAutomorphism)
    ));
}

#[test]
fn composite_order_rejected_by_prime_power_entry() {
    let m = gallery::order12_adjacency();
    assert!(matches!(
        prime_power_decompose(&m, &gallery::order12_phi(), &[]),
        Err(Error::OrderNotPrimePower(12))
    ));
}

fn restricted(psi: &Permutation, labels: &[usize]) -> Permutation {
    let pos = |v: usize| labels.iter().position(|&x| x == v).expect("label survives") + 1;
    Permutation::from_images(labels.iter().map(|&v| pos(psi.apply(v))).collect()).unwrap()
}

#[test]
fn successor_on_order9() {
    let m = gallery::order9_adjacency();
    let phi = gallery::order9_phi();
    let plan = plan_transversals(&phi.orbits(), &phi, 3, None, &[], 1).unwrap();
    let next = successor_automorphism(&phi, &plan, 3, 1);
    assert_eq!(
        next,
        Permutation::parse_cycles("(1 2 3)(4 5 6)", 12).unwrap()
    );

    let layout = reorder_for_prime_power(&m, &(1..=12).collect::<Vec<_>>(), &plan, 3, 2).unwrap();
    let out = prime_power_round(&layout).unwrap();
    let kept = &layout.index_map[..out.m_tilde.rows()];
    assert!(restricted(&next, kept)
        .is_automorphism(&out.m_tilde)
        .unwrap());
}

#[test]
fn successor_on_order12() {
    let m = gallery::order12_adjacency();
    let phi = gallery::order12_phi();
    let psi = phi.pow(3);
    let plan = plan_transversals(&psi.orbits(), &phi, 2, None, &[1], 1).unwrap();
    let next = successor_automorphism(&psi, &plan, 2, 1);
    assert_eq!(
        next,
        Permutation::parse_cycles("(1 4)(5 8)(9 12)(13 16)(14 17)(15 18)", 18).unwrap()
    );
    let layout = reorder_for_prime_power(&m, &(1..=18).collect::<Vec<_>>(), &plan, 2, 2).unwrap();
    let out = prime_power_round(&layout).unwrap();
    let kept = &layout.index_map[..out.m_tilde.rows()];
    assert!(restricted(&next, kept)
        .is_automorphism(&out.m_tilde)
        .unwrap());
}

#[test]
fn order9_full_run() {
    let m = gallery::order9_adjacency();
    let res = general_decompose(&m, &gallery::order9_phi(), &DecomposeOptions::default()).unwrap();
    assert_eq!(res.divisor, real(&[&[2.0, 3.0], &[1.0, 4.0]]));
    assert_eq!(res.divisor_labels, vec![1, 4]);
    let round2 = res.blocks_with_tag(0, 2);
    assert_eq!(round2.len(), 2);
    for b in round2 {
        assert!(close(&b.matrix, &real(&[&[-1.0, 3.0], &[1.0, 1.0]]), 1e-12));
    }
    assert_eq!(res.blocks_with_tag(0, 1).len(), 6);
    assert_eq!(res.total_dim(), 12);
    assert!(
        spectra_agree(
            &m,
            std::iter::once(&res.divisor).chain(res.block_matrices()),
            1e-8
        )
        .unwrap()
        .equal
    );
}

#[test]
fn emitted_transform_block_diagonalizes() {
    let m = gallery::order12_adjacency();
    let opts = DecomposeOptions {
        emit_transform: true,
        ..Default::default()
    };
    let res = general_decompose(&m, &gallery::order12_phi(), &opts).unwrap();
    let tt = res.total_transform.as_ref().unwrap();
    let expected = MatrixC::direct_sum(std::iter::once(&res.divisor).chain(res.block_matrices()));
    let conj = &(&tt.t_inv * &m) * &tt.t;
    assert!(conj.max_abs_diff(&expected) < 1e-10);
    assert!((&tt.t * &tt.t_inv).max_abs_diff(&MatrixC::identity(18)) < 1e-12);
    assert!(tt.residual < 1e-10);
}

#[test]
fn unused_seed_is_reported() {
    let m = gallery::order9_adjacency();
    let opts = DecomposeOptions {
        seeds: vec![vec![vec![], vec![], vec![7]]],
        ..Default::default()
    };
    assert!(general_decompose(&m, &gallery::order9_phi(), &opts).is_err());
}

proptest! {
    #[test]
    fn transform_inverse_is_exact(f in 0usize..4, r in 1usize..4, pick in 0usize..5) {
        let (p, n_exp) = [(2usize, 1u32), (2, 2), (2, 3), (3, 1), (5, 1)][pick];
        let tf = transform_for(f, r, p, n_exp);
        let n = f + r * p.pow(n_exp);
        prop_assume!(n <= 64);
        prop_assert!((&tf.t * &tf.t_inv).max_abs_diff(&MatrixC::identity(n)) < 1e-12);
        prop_assert!((&tf.t_inv * &tf.t).max_abs_diff(&MatrixC::identity(n)) < 1e-12);
    }

    #[test]
    fn successor_order_divides_width(seed in 0usize..4) {
        // on the surviving labels the successor has order dividing p^{N-1}
        let (m, phi, psi, p, n_exp) = match seed {
            0 | 1 => (gallery::order9_adjacency(), gallery::order9_phi(), gallery::order9_phi(), 3usize, 2u32),
            _ => {
                let phi = gallery::order12_phi();
                (gallery::order12_adjacency(), phi.clone(), phi.pow(3), 2, 2)
            }
        };
        let plan = plan_transversals(&psi.orbits(), &phi, p as u64, None, &[], 1).unwrap();
        let next = successor_automorphism(&psi, &plan, p, n_exp - 1);
        let layout = reorder_for_prime_power(&m, &(1..=m.rows()).collect::<Vec<_>>(), &plan, p, n_exp).unwrap();
        let kept = layout.index_map[..layout.f + layout.w()].to_vec();
        let local = restricted(&next, &kept);
        prop_assert_eq!(p.pow(n_exp - 1) as u64 % local.order(), 0);
    }
}
