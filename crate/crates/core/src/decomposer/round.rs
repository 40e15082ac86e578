use crate::error::{Error, Result};
use crate::matrix::{MatrixC, C64, ZERO};
use crate::partition::TransversalPlan;
use crate::permutation::Permutation;

use super::layout::BlockLayout;
use super::transform::{build_transform, omega_pow, TransformFactor};

/// Limit on the conjugation residual, relative to `max(1, max|M|)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct RoundOutput {
    /// `[[F, p·H], [L, B₀]]` with `B₀ = Σ D_s`.
    pub m_tilde: MatrixC,
    /// `B_j = Σ_m ω^{γ_j m} C_m`, one per `γ_j`.
    pub blocks: Vec<MatrixC>,
    pub transform: TransformFactor,
    /// `max |T⁻¹M′T − (M̃ ⊕ B₁ ⊕ …)|`.
    pub residual: f64,
    /// `max |T·T⁻¹ − I|`.
    pub inverse_error: f64,
}

pub fn prime_power_round(layout: &BlockLayout) -> Result<RoundOutput> {
    let (f, p, k, w) = (layout.f, layout.p, layout.k(), layout.w());

    let mut b0 = MatrixC::zeros(w, w);
    for d in &layout.d {
        b0 = &b0 + d;
    }
    let mut m_tilde = MatrixC::zeros(f + w, f + w);
    m_tilde.set_block(0, 0, &layout.f_block);
    m_tilde.set_block(0, f, &layout.h.scale(C64::new(p as f64, 0.0)));
    m_tilde.set_block(f, 0, &layout.l);
    m_tilde.set_block(f, f, &b0);

    let transform = build_transform(layout);
    let blocks: Vec<MatrixC> = transform
        .gammas
        .iter()
        .map(|&g| {
            let mut b = MatrixC::zeros(layout.r, layout.r);
            for (m, cm) in layout.c.iter().enumerate() {
                let z = omega_pow((g * m) as i64, k);
                if cm.as_slice().iter().any(|&x| x != ZERO) {
                    b = &b + &cm.scale(z);
                }
            }
            b
        })
        .collect();

    let conj = &(&transform.t_inv * &layout.reordered) * &transform.t;
    let expected = MatrixC::direct_sum(std::iter::once(&m_tilde).chain(blocks.iter()));
    let residual = conj.max_abs_diff(&expected);
    let limit = RESIDUAL_TOL * layout.reordered.max_abs().max(1.0);
    if residual.is_nan() || residual > limit {
        return Err(Error::ResidualTooLarge { residual, limit });
    }
    let n = layout.dim();
    let inverse_error = (&transform.t * &transform.t_inv).max_abs_diff(&MatrixC::identity(n));

    Ok(RoundOutput {
        m_tilde,
        blocks,
        transform,
        residual,
        inverse_error,
    })
}

/// Automorphism of the surviving matrix after a round.
///
/// With `width = p^{width_exp}` (the surviving number of transversals),
/// the result agrees with `psi` on `T_F ∪ T_0 ∪ … ∪ T_{width−2}`, equals
/// `psi^{1−width}` on `T_{width−1}`, and fixes every other point.
pub fn successor_automorphism(
    psi: &Permutation,
    plan: &TransversalPlan,
    p: usize,
    width_exp: u32,
) -> Permutation {
    let width = p.pow(width_exp);
    debug_assert!(width <= plan.k());
    let mut images: Vec<usize> = (1..=psi.n()).collect();
    for &v in &plan.t_f {
        images[v - 1] = psi.apply(v);
    }
    if width >= 2 {
        for t in &plan.transversals[..width - 1] {
            for &v in t {
                images[v - 1] = psi.apply(v);
            }
        }
    }
    let back = psi.pow(1 - width as i64);
    for &v in &plan.transversals[width - 1] {
        images[v - 1] = back.apply(v);
    }
    Permutation::from_images(images).expect("successor is a bijection")
}
