//! Equitable decomposition over an arbitrary automorphism.
//!
//! The order `ℓ` of `φ` is factored as `Π p_i^{N_i}`. Stage `i` takes the
//! prime-power automorphism `ψ = φ_i^{ℓ_{i+1}}` (with `ℓ_{i+1} = ℓ_i / p_i^{N_i}`)
//! and runs `N_i` rounds on every piece present at the start of the stage. Each
//! round splits a piece into a surviving matrix `M̃` and blocks `B_j`. The next
//! stage uses `φ_{i+1} = φ_i^{p_i^{N_i}·β}` where `1 = ℓ_{i+1}·α + p_i^{N_i}·β`.
//!
//! Every piece keeps the vertex labels of its rows, so automorphisms act on
//! pieces by relabelling. The piece that started as `M` ends up as the divisor
//! matrix.

mod layout;
mod round;
mod transform;

pub use layout::{reorder_for_prime_power, BlockLayout};
pub use round::{prime_power_round, successor_automorphism, RoundOutput, RESIDUAL_TOL};
pub use transform::{build_transform, gammas, omega_pow, transform_for, TransformFactor};

use crate::error::{Error, Result};
use crate::matrix::{MatrixC, ZERO};
use crate::partition::{plan_with, TransversalPlan};
use crate::permutation::{bezout_exponents, prime_factorization, Permutation};

/// Where a block came from: 0-based stage, 1-based round within the stage and
/// 1-based index `j` of `γ_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockTag {
    pub stage: usize,
    pub round: usize,
    pub j: usize,
}

#[derive(Clone, Debug)]
pub struct TaggedBlock {
    pub tag: BlockTag,
    /// Tags of the enclosing pieces, outermost first; empty when the block
    /// was split directly off the input matrix.
    pub lineage: Vec<BlockTag>,
    /// Vertex labels carried by the rows of `matrix`.
    pub labels: Vec<usize>,
    pub matrix: MatrixC,
}

/// Diagnostics for one round applied to one piece.
#[derive(Clone, Debug)]
pub struct RoundReport {
    pub stage: usize,
    pub round: usize,
    pub prime: u64,
    /// The round works with orbits of length `prime^exponent`.
    pub exponent: u32,
    /// Provenance of the piece being split; `None` for the divisor line.
    pub piece: Option<BlockTag>,
    pub dim: usize,
    pub f: usize,
    pub r: usize,
    pub t_0: Vec<usize>,
    pub residual: f64,
    pub inverse_error: f64,
}

/// Accumulated similarity with `t_inv · M · t = divisor ⊕ B₁ ⊕ B₂ ⊕ …`
/// in the order of [`DecompositionResult::blocks`].
#[derive(Clone, Debug)]
pub struct TotalTransform {
    pub t: MatrixC,
    pub t_inv: MatrixC,
    /// Labels of the block-diagonal rows, divisor first.
    pub order: Vec<usize>,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub divisor: MatrixC,
    /// Surviving label of each divisor row, ordered by the smallest vertex of its orbit.
    pub divisor_labels: Vec<usize>,
    pub blocks: Vec<TaggedBlock>,
    pub rounds: Vec<RoundReport>,
    pub total_transform: Option<TotalTransform>,
    /// Largest residual over all rounds (and the accumulated transform, if built).
    pub residual: f64,
}

impl DecompositionResult {
    pub fn block_matrices(&self) -> impl Iterator<Item = &MatrixC> {
        self.blocks.iter().map(|b| &b.matrix)
    }

    /// Total dimension of the divisor and all blocks.
    pub fn total_dim(&self) -> usize {
        self.divisor.rows() + self.blocks.iter().map(|b| b.matrix.rows()).sum::<usize>()
    }

    pub fn blocks_with_tag(&self, stage: usize, round: usize) -> Vec<&TaggedBlock> {
        self.blocks
            .iter()
            .filter(|b| b.tag.stage == stage && b.tag.round == round)
            .collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct DecomposeOptions {
    /// `seeds[stage][round - 1]` lists vertices that must enter `T_0`.
    pub seeds: Vec<Vec<Vec<usize>>>,
    pub emit_transform: bool,
}

struct Piece {
    labels: Vec<usize>,
    matrix: MatrixC,
    tag: Option<BlockTag>,
    lineage: Vec<BlockTag>,
}

struct Accumulator {
    /// Columns and rows are indexed by `label - 1`.
    t: MatrixC,
    t_inv: MatrixC,
}

impl Accumulator {
    #[allow(clippy::needless_range_loop)]
    fn apply(&mut self, order: &[usize], tf: &TransformFactor) {
        let n = self.t.rows();
        let d = order.len();
        let idx: Vec<usize> = order.iter().map(|v| v - 1).collect();
        let mut new_cols = MatrixC::zeros(n, d);
        for b in 0..d {
            for a in 0..d {
                let z = tf.t[(a, b)];
                if z == ZERO {
                    continue;
                }
                for row in 0..n {
                    new_cols[(row, b)] += self.t[(row, idx[a])] * z;
                }
            }
        }
        let mut new_rows = MatrixC::zeros(d, n);
        for a in 0..d {
            for c in 0..d {
                let z = tf.t_inv[(a, c)];
                if z == ZERO {
                    continue;
                }
                for col in 0..n {
                    new_rows[(a, col)] += z * self.t_inv[(idx[c], col)];
                }
            }
        }
        for b in 0..d {
            for row in 0..n {
                self.t[(row, idx[b])] = new_cols[(row, b)];
            }
        }
        for a in 0..d {
            for col in 0..n {
                self.t_inv[(idx[a], col)] = new_rows[(a, col)];
            }
        }
    }
}

/// Decomposes `m` over an automorphism `phi` of any order. Maximal orbits not
/// covered by pinning, seeds or orbit closure take their smallest vertex.
pub fn general_decompose(
    m: &MatrixC,
    phi: &Permutation,
    opts: &DecomposeOptions,
) -> Result<DecompositionResult> {
    general_decompose_with(m, phi, opts, |orbit| {
        *orbit.iter().min().expect("orbits are nonempty")
    })
}

/// [`general_decompose`] with a custom choice of transversal vertex for each
/// maximal orbit left uncovered by pinning, seeds and orbit closure.
pub fn general_decompose_with(
    m: &MatrixC,
    phi: &Permutation,
    opts: &DecomposeOptions,
    mut pick: impl FnMut(&[usize]) -> usize,
) -> Result<DecompositionResult> {
    if !phi.is_automorphism(m)? {
        return Err(Error::NotAnAutomorphism);
    }
    let n = m.rows();
    let mut pieces = vec![Piece {
        labels: (1..=n).collect(),
        matrix: m.clone(),
        tag: None,
        lineage: Vec::new(),
    }];
    let mut rounds = Vec::new();
    let mut acc = opts.emit_transform.then(|| Accumulator {
        t: MatrixC::identity(n),
        t_inv: MatrixC::identity(n),
    });

    let factors = prime_factorization(phi.order());
    if opts.seeds.len() > factors.len() {
        if let Some(&s) = opts.seeds[factors.len()..]
            .iter()
            .flatten()
            .flatten()
            .next()
        {
            return Err(Error::SeedNotInMaximalOrbit(s));
        }
    }
    let mut phi_i = phi.clone();
    let mut ell = phi.order();

    for (stage, &(p, n_exp)) in factors.iter().enumerate() {
        let pk = p.pow(n_exp);
        let ell_next = ell / pk;
        let psi = phi_i.pow(ell_next as i64);
        let stage_seeds = opts.seeds.get(stage);
        if let Some(ss) = stage_seeds {
            if ss.len() > n_exp as usize {
                if let Some(&s) = ss[n_exp as usize..].iter().flatten().next() {
                    return Err(Error::SeedNotInMaximalOrbit(s));
                }
            }
        }
        let mut seeds_used = vec![Vec::<bool>::new(); n_exp as usize];
        for (r, used) in seeds_used.iter_mut().enumerate() {
            let len = stage_seeds.and_then(|s| s.get(r)).map_or(0, Vec::len);
            *used = vec![false; len];
        }

        let start_count = pieces.len();
        for idx in 0..start_count {
            if !phi_i.preserves(&pieces[idx].labels) {
                return Err(Error::NotBlockCirculant(format!(
                    "stage automorphism does not preserve piece {:?}",
                    pieces[idx].tag
                )));
            }
            let mut cur = psi.clone();
            let mut prev: Option<TransversalPlan> = None;
            for round in 1..=n_exp {
                let exponent = n_exp - round + 1;
                let target = p.pow(exponent) as usize;
                let orbits = cur.orbits_on(&pieces[idx].labels);
                let round_seeds: Vec<usize> = stage_seeds
                    .and_then(|s| s.get(round as usize - 1))
                    .map(|rs| {
                        rs.iter()
                            .enumerate()
                            .filter(|(_, v)| pieces[idx].labels.contains(v))
                            .map(|(k, &v)| {
                                seeds_used[round as usize - 1][k] = true;
                                v
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                if orbits.max_len() < target {
                    if let Some(&s) = round_seeds.first() {
                        return Err(Error::SeedNotInMaximalOrbit(s));
                    }
                    continue;
                }
                let plan = plan_with(
                    &orbits,
                    &phi_i,
                    p,
                    prev.as_ref(),
                    &round_seeds,
                    round as usize,
                    &mut pick,
                )?;
                let piece = &pieces[idx];
                let layout = reorder_for_prime_power(
                    &piece.matrix,
                    &piece.labels,
                    &plan,
                    p as usize,
                    exponent,
                )?;
                let out = prime_power_round(&layout)?;
                if let Some(acc) = acc.as_mut() {
                    acc.apply(&layout.index_map, &out.transform);
                }
                rounds.push(RoundReport {
                    stage,
                    round: round as usize,
                    prime: p,
                    exponent,
                    piece: piece.tag,
                    dim: piece.labels.len(),
                    f: plan.f(),
                    r: plan.r(),
                    t_0: plan.t_0.clone(),
                    residual: out.residual,
                    inverse_error: out.inverse_error,
                });

                let width = target / p as usize;
                let mut survivors = plan.t_f.clone();
                survivors.extend(plan.t_tilde(p as usize));
                let lineage: Vec<BlockTag> =
                    piece.lineage.iter().copied().chain(piece.tag).collect();
                for (j, b) in out.blocks.into_iter().enumerate() {
                    pieces.push(Piece {
                        lineage: lineage.clone(),
                        labels: plan.transversals[width + j].clone(),
                        matrix: b,
                        tag: Some(BlockTag {
                            stage,
                            round: round as usize,
                            j: j + 1,
                        }),
                    });
                }
                pieces[idx].labels = survivors;
                pieces[idx].matrix = out.m_tilde;
                cur = successor_automorphism(&cur, &plan, p as usize, exponent - 1);
                prev = Some(plan);
            }
        }

        if let Some(ss) = stage_seeds {
            for (r, rs) in ss.iter().enumerate().take(n_exp as usize) {
                if let Some(k) = seeds_used[r].iter().position(|u| !u) {
                    return Err(Error::SeedNotInMaximalOrbit(rs[k]));
                }
            }
        }

        let (_, beta) = bezout_exponents(ell_next, pk)?;
        phi_i = phi_i.pow(pk as i64 * beta);
        ell = ell_next;
    }

    let main = &pieces[0];
    let mut order: Vec<usize> = (0..main.labels.len()).collect();
    let rep = |v: usize| *phi.orbit_of(v).iter().min().expect("nonempty orbit");
    order.sort_by_key(|&i| rep(main.labels[i]));
    let divisor = main.matrix.submatrix(&order, &order);
    let divisor_labels: Vec<usize> = order.iter().map(|&i| main.labels[i]).collect();

    let blocks: Vec<TaggedBlock> = pieces[1..]
        .iter()
        .map(|p| TaggedBlock {
            tag: p.tag.expect("blocks carry tags"),
            lineage: p.lineage.clone(),
            labels: p.labels.clone(),
            matrix: p.matrix.clone(),
        })
        .collect();

    let mut residual = rounds.iter().map(|r| r.residual).fold(0.0, f64::max);
    let total_transform = acc.map(|acc| {
        let mut layout = divisor_labels.clone();
        for b in &blocks {
            layout.extend_from_slice(&b.labels);
        }
        let idx: Vec<usize> = layout.iter().map(|v| v - 1).collect();
        let all: Vec<usize> = (0..n).collect();
        let t = acc.t.submatrix(&all, &idx);
        let t_inv = acc.t_inv.submatrix(&idx, &all);
        let expected =
            MatrixC::direct_sum(std::iter::once(&divisor).chain(blocks.iter().map(|b| &b.matrix)));
        let res = (&(&t_inv * m) * &t).max_abs_diff(&expected);
        TotalTransform {
            t,
            t_inv,
            order: layout,
            residual: res,
        }
    });
    if let Some(tt) = &total_transform {
        residual = residual.max(tt.residual);
    }

    Ok(DecompositionResult {
        divisor,
        divisor_labels,
        blocks,
        rounds,
        total_transform,
        residual,
    })
}

/// Decomposes over an automorphism whose order is a prime power (or 1).
/// `round_seeds[r]` seeds round `r + 1`.
pub fn prime_power_decompose(
    m: &MatrixC,
    phi: &Permutation,
    round_seeds: &[Vec<usize>],
) -> Result<DecompositionResult> {
    let order = phi.order();
    if prime_factorization(order).len() > 1 {
        return Err(Error::OrderNotPrimePower(order));
    }
    let opts = DecomposeOptions {
        seeds: if round_seeds.is_empty() {
            Vec::new()
        } else {
            vec![round_seeds.to_vec()]
        },
        ..Default::default()
    };
    general_decompose(m, phi, &opts)
}

#[cfg(test)]
mod tests;
