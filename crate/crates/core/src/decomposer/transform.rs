use std::f64::consts::TAU;

use crate::matrix::{MatrixC, C64, ONE};

use super::layout::BlockLayout;

/// Similarity `T` for one round together with its closed-form inverse.
#[derive(Clone, Debug)]
pub struct TransformFactor {
    pub t: MatrixC,
    pub t_inv: MatrixC,
    /// Exponents in `1..k` not divisible by `p`, ascending.
    pub gammas: Vec<usize>,
    pub omega: C64,
}

/// `1 ≤ γ < k` with `p ∤ γ`, ascending.
pub fn gammas(p: usize, k: usize) -> Vec<usize> {
    (1..k).filter(|g| g % p != 0).collect()
}

/// `ω^e` for `ω = e^{2πi/k}`, with `e` reduced mod `k` before evaluation.
pub fn omega_pow(e: i64, k: usize) -> C64 {
    let e = e.rem_euclid(k as i64);
    if e == 0 {
        return ONE;
    }
    C64::from_polar(1.0, TAU * e as f64 / k as f64)
}

pub fn build_transform(layout: &BlockLayout) -> TransformFactor {
    transform_for(layout.f, layout.r, layout.p, layout.n_exp)
}

/// `T = [[I_f, 0, 0], [0, Rᵀ, S]]` where `R` is `p` side-by-side copies of
/// `I_w` and `S` has `r×r` blocks `ω^{m·γ_j} I_r`; the inverse stacks
/// `I_f`, `R/p` and `S*/p^N`.
pub fn transform_for(f: usize, r: usize, p: usize, n_exp: u32) -> TransformFactor {
    let k = p.pow(n_exp);
    let w = r * k / p;
    let gs = gammas(p, k);
    let n = f + r * k;
    let mut t = MatrixC::zeros(n, n);
    let mut t_inv = MatrixC::zeros(n, n);
    let inv_p = C64::new(1.0 / p as f64, 0.0);
    let inv_k = 1.0 / k as f64;

    for i in 0..f {
        t[(i, i)] = ONE;
        t_inv[(i, i)] = ONE;
    }
    for s in 0..p {
        for i in 0..w {
            t[(f + s * w + i, f + i)] = ONE;
            t_inv[(f + i, f + s * w + i)] = inv_p;
        }
    }
    for (j, &g) in gs.iter().enumerate() {
        for m in 0..k {
            let z = omega_pow((m * g) as i64, k);
            for i in 0..r {
                t[(f + m * r + i, f + w + j * r + i)] = z;
                t_inv[(f + w + j * r + i, f + m * r + i)] = z.conj() * inv_k;
            }
        }
    }
    TransformFactor {
        t,
        t_inv,
        gammas: gs,
        omega: omega_pow(1, k),
    }
}
