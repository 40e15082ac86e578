//! Equitable partitions, divisor matrices and transversal planning.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::{MatrixC, C64, ZERO};
use crate::permutation::{OrbitPartition, Permutation};

/// Absolute tolerance for the constant-row-sum test.
pub const EQUITABLE_TOL: f64 = 1e-10;

/// Ordered cells `V₁..V_k` partitioning `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    cells: Vec<Vec<usize>>,
}

impl VertexPartition {
    pub fn new(cells: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        for cell in &cells {
            if cell.is_empty() {
                return Err(Error::DimensionMismatch("empty partition cell".into()));
            }
            for &v in cell {
                if v == 0 || v > n || seen[v] {
                    return Err(Error::DimensionMismatch(format!(
                        "cells do not partition 1..={n} (vertex {v})"
                    )));
                }
                seen[v] = true;
            }
        }
        if seen[1..].iter().any(|s| !s) {
            return Err(Error::DimensionMismatch(format!(
                "cells do not cover 1..={n}"
            )));
        }
        Ok(VertexPartition { cells })
    }

    pub fn singletons(n: usize) -> Self {
        VertexPartition {
            cells: (1..=n).map(|v| vec![v]).collect(),
        }
    }

    pub fn from_orbits(orbits: &OrbitPartition) -> Self {
        VertexPartition {
            cells: orbits.orbits.clone(),
        }
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn n(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }
}

/// Returns the divisor matrix `D` if every row of cell `V_a` has the same sum
/// over cell `V_b`, for all `a, b`.
pub fn is_equitable(m: &MatrixC, pi: &VertexPartition) -> Result<Option<MatrixC>> {
    if !m.is_square() || m.rows() != pi.n() {
        return Err(Error::DimensionMismatch(format!(
            "partition of {} vertices against a {}x{} matrix",
            pi.n(),
            m.rows(),
            m.cols()
        )));
    }
    let cells = pi.cells();
    let k = cells.len();
    let mut d = MatrixC::zeros(k, k);
    for (a, va) in cells.iter().enumerate() {
        for (b, vb) in cells.iter().enumerate() {
            let row_sum = |s: usize| -> C64 { vb.iter().map(|&t| m[(s - 1, t - 1)]).sum() };
            let first = row_sum(va[0]);
            if va[1..]
                .iter()
                .any(|&s| (row_sum(s) - first).norm() > EQUITABLE_TOL)
            {
                return Ok(None);
            }
            d[(a, b)] = first;
        }
    }
    Ok(Some(d))
}

/// Divisor matrix of the orbit partition of `phi`, rows and columns ordered by
/// ascending orbit representative: `D(a, b) = Σ_{r ∈ O(b)} M(rep_a, r)`.
pub fn divisor_matrix(m: &MatrixC, phi: &Permutation) -> Result<MatrixC> {
    if !phi.is_automorphism(m)? {
        return Err(Error::NotAnAutomorphism);
    }
    let orbits = phi.orbits();
    let k = orbits.len();
    Ok(MatrixC::from_fn(k, k, |a, b| {
        let rep = orbits.orbits[a][0];
        orbits.orbits[b]
            .iter()
            .fold(ZERO, |acc, &r| acc + m[(rep - 1, r - 1)])
    }))
}

/// Vertex layout for one prime-power round.
///
/// `transversals[m][i]` is the vertex `m` steps along the round automorphism
/// from `t_0[i]`, so `transversals[0] == t_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalPlan {
    pub round_id: usize,
    /// Vertices in orbits shorter than the maximal length, ascending.
    pub t_f: Vec<usize>,
    /// One vertex per maximal orbit, ascending.
    pub t_0: Vec<usize>,
    pub transversals: Vec<Vec<usize>>,
    /// Vertices whose membership in `t_0` was forced by a previous round or by
    /// the orbit-closure rule.
    pub pinned: Vec<usize>,
}

impl TransversalPlan {
    /// Length of the maximal orbits (`p^N` for the round).
    pub fn k(&self) -> usize {
        self.transversals.len()
    }

    /// Number of maximal orbits.
    pub fn r(&self) -> usize {
        self.t_0.len()
    }

    pub fn f(&self) -> usize {
        self.t_f.len()
    }

    /// `T_0 ∪ T_1 ∪ … ∪ T_{k/p − 1}`, concatenated in that order.
    pub fn t_tilde(&self, p: usize) -> Vec<usize> {
        self.transversals[..self.k() / p].concat()
    }

    /// Full layout `T_F, T_0, …, T_{k−1}`.
    pub fn index_order(&self) -> Vec<usize> {
        let mut order = self.t_f.clone();
        for t in &self.transversals {
            order.extend_from_slice(t);
        }
        order
    }
}

/// Chooses transversals for one round.
///
/// `current` are the orbits of the round automorphism on the current index set,
/// listed cyclically. `stage_perm` is the automorphism of the current stage,
/// used for the orbit-closure rule: when `a` joins `T_0` and its
/// `stage_perm`-orbit has length `p^k·m` with `p ∤ m`, the points
/// `stage_perm^{t·p^k}(a)` for `t = 1..m` join as well. Members of the previous
/// round's `T_0` stay in `T_0`. Seeds are applied next, then every remaining
/// maximal orbit takes its smallest vertex.
pub fn plan_transversals(
    current: &OrbitPartition,
    stage_perm: &Permutation,
    prime: u64,
    previous: Option<&TransversalPlan>,
    seeds: &[usize],
    round_id: usize,
) -> Result<TransversalPlan> {
    plan_with(
        current,
        stage_perm,
        prime,
        previous,
        seeds,
        round_id,
        |orbit| *orbit.iter().min().expect("orbits are nonempty"),
    )
}

/// [`plan_transversals`] with a caller-supplied default choice per uncovered orbit.
pub(crate) fn plan_with(
    current: &OrbitPartition,
    stage_perm: &Permutation,
    prime: u64,
    previous: Option<&TransversalPlan>,
    seeds: &[usize],
    round_id: usize,
    mut pick: impl FnMut(&[usize]) -> usize,
) -> Result<TransversalPlan> {
    let max_len = current.max_len();
    let orbit_of: BTreeMap<usize, usize> = current
        .orbits
        .iter()
        .enumerate()
        .flat_map(|(idx, o)| o.iter().map(move |&v| (v, idx)))
        .collect();
    let is_maximal = |idx: usize| current.orbits[idx].len() == max_len;

    // orbit index -> chosen vertex
    let mut chosen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut pinned = Vec::new();

    if let Some(prev) = previous {
        for &v in &prev.t_0 {
            if let Some(&idx) = orbit_of.get(&v) {
                if is_maximal(idx) {
                    if chosen.insert(idx, v).is_some_and(|w| w != v) {
                        return Err(Error::SeedConflict(v));
                    }
                    pinned.push(v);
                }
            }
        }
    }

    let p = prime;
    let closure = |a: usize| -> Vec<usize> {
        let len = stage_perm.orbit_len(a) as u64;
        let mut pk = 1u64;
        let mut rest = len;
        while p > 1 && rest.is_multiple_of(p) {
            rest /= p;
            pk *= p;
        }
        let step = stage_perm.pow(pk as i64);
        let mut out = Vec::new();
        let mut x = a;
        for _ in 1..rest {
            x = step.apply(x);
            out.push(x);
        }
        out
    };

    let add_closed = |a: usize,
                      culprit: usize,
                      chosen: &mut BTreeMap<usize, usize>,
                      pinned: &mut Vec<usize>,
                      forced: bool|
     -> Result<()> {
        let idx = *orbit_of
            .get(&a)
            .ok_or(Error::SeedNotInMaximalOrbit(culprit))?;
        if !is_maximal(idx) {
            return Err(Error::SeedNotInMaximalOrbit(culprit));
        }
        match chosen.get(&idx) {
            Some(&w) if w != a => return Err(Error::SeedConflict(culprit)),
            Some(_) => {}
            None => {
                chosen.insert(idx, a);
                if forced {
                    pinned.push(a);
                }
            }
        }
        Ok(())
    };

    for &s in seeds {
        add_closed(s, s, &mut chosen, &mut pinned, false)?;
        for f in closure(s) {
            add_closed(f, s, &mut chosen, &mut pinned, true)?;
        }
    }

    for (idx, orbit) in current.orbits.iter().enumerate() {
        if !is_maximal(idx) || chosen.contains_key(&idx) {
            continue;
        }
        let a = pick(orbit);
        add_closed(a, a, &mut chosen, &mut pinned, false)?;
        for f in closure(a) {
            add_closed(f, a, &mut chosen, &mut pinned, true)?;
        }
    }

    let mut t_0: Vec<usize> = chosen.values().copied().collect();
    t_0.sort_unstable();
    let transversals: Vec<Vec<usize>> = (0..max_len)
        .map(|m| {
            t_0.iter()
                .map(|&v| {
                    let orbit = &current.orbits[orbit_of[&v]];
                    let pos = orbit
                        .iter()
                        .position(|&x| x == v)
                        .expect("vertex in its orbit");
                    orbit[(pos + m) % orbit.len()]
                })
                .collect()
        })
        .collect();
    let mut t_f: Vec<usize> = current
        .orbits
        .iter()
        .filter(|o| o.len() < max_len)
        .flatten()
        .copied()
        .collect();
    t_f.sort_unstable();
    pinned.sort_unstable();
    pinned.dedup();

    Ok(TransversalPlan {
        round_id,
        t_f,
        t_0,
        transversals,
        pinned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use proptest::prelude::*;

    fn real(m: &MatrixC) -> Vec<Vec<f64>> {
        m.to_rows()
            .iter()
            .map(|r| r.iter().map(|z| z.re).collect())
            .collect()
    }

    #[test]
    fn order9_partition_divisor() {
        let m = gallery::order9_adjacency();
        let pi = VertexPartition::new(vec![vec![1, 2, 3], (4..=12).collect()], 12).unwrap();
        let d = is_equitable(&m, &pi).unwrap().unwrap();
        assert_eq!(real(&d), vec![vec![2.0, 3.0], vec![1.0, 4.0]]);
        assert_eq!(divisor_matrix(&m, &gallery::order9_phi()).unwrap(), d);
    }

    #[test]
    fn singletons_give_matrix_back() {
        let m = gallery::order9_adjacency();
        let d = is_equitable(&m, &VertexPartition::singletons(12))
            .unwrap()
            .unwrap();
        assert_eq!(d, m);
        assert_eq!(divisor_matrix(&m, &Permutation::identity(12)).unwrap(), m);
    }

    #[test]
    fn non_equitable_split() {
        let m = gallery::order9_adjacency();
        // brute force: row 3 sends 2 edges into {1,2}, row 4 only 1
        let into = |s: usize| (m[(s - 1, 0)] + m[(s - 1, 1)]).re;
        assert_ne!(into(3), into(4));
        let pi = VertexPartition::new(vec![vec![1, 2], (3..=12).collect()], 12).unwrap();
        assert!(is_equitable(&m, &pi).unwrap().is_none());
    }

    #[test]
    fn order12_divisor() {
        let m = gallery::order12_adjacency();
        let d = divisor_matrix(&m, &gallery::order12_phi()).unwrap();
        assert_eq!(real(&d), vec![vec![2.0, 1.0], vec![2.0, 2.0]]);
    }

    #[test]
    fn divisor_requires_automorphism() {
        let m = gallery::order9_adjacency();
        let bad = Permutation::parse_cycles("(1 4)", 12).unwrap();
        assert!(matches!(
            divisor_matrix(&m, &bad),
            Err(Error::NotAnAutomorphism)
        ));
    }

    #[test]
    fn bad_partitions_rejected() {
        assert!(VertexPartition::new(vec![vec![1, 2], vec![2, 3]], 3).is_err());
        assert!(VertexPartition::new(vec![vec![1, 2]], 3).is_err());
        let pi = VertexPartition::singletons(3);
        assert!(matches!(
            is_equitable(&MatrixC::zeros(4, 4), &pi),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn order12_first_rounds() {
        let phi = gallery::order12_phi();
        let psi0 = phi.pow(3);
        let orbits = psi0.orbits();
        let plan = plan_transversals(&orbits, &phi, 2, None, &[1], 1).unwrap();
        assert_eq!(plan.t_0, vec![1, 5, 9]);
        assert_eq!(plan.t_f, (13..=18).collect::<Vec<_>>());
        assert_eq!(
            plan.transversals,
            vec![
                vec![1, 5, 9],
                vec![4, 8, 12],
                vec![7, 11, 3],
                vec![10, 2, 6]
            ]
        );

        let psi1 = Permutation::parse_cycles("(1 4)(5 8)(9 12)(13 16)(14 17)(15 18)", 18).unwrap();
        let surviving = [1, 5, 9, 4, 8, 12, 13, 14, 15, 16, 17, 18];
        let plan2 =
            plan_transversals(&psi1.orbits_on(&surviving), &phi, 2, Some(&plan), &[13], 2).unwrap();
        assert_eq!(plan2.t_0, vec![1, 5, 9, 13, 15, 17]);
        assert_eq!(plan2.transversals[1], vec![4, 8, 12, 16, 18, 14]);
        assert!(plan2.t_f.is_empty());
        assert!(plan2.pinned.contains(&1) && plan2.pinned.contains(&17));

        // the default choice reproduces the seeded one
        let plan2d =
            plan_transversals(&psi1.orbits_on(&surviving), &phi, 2, Some(&plan), &[], 2).unwrap();
        assert_eq!(plan2d.t_0, plan2.t_0);
    }

    #[test]
    fn seed_errors() {
        let phi = gallery::order12_phi();
        let orbits = phi.pow(3).orbits();
        assert!(matches!(
            plan_transversals(&orbits, &phi, 2, None, &[13], 1),
            Err(Error::SeedNotInMaximalOrbit(13))
        ));
        // 4 lies in the orbit of 1; choosing both conflicts
        assert!(matches!(
            plan_transversals(&orbits, &phi, 2, None, &[1, 4], 1),
            Err(Error::SeedConflict(4))
        ));
        // 1 forces 5, which already covers the orbit of 2
        assert!(matches!(
            plan_transversals(&orbits, &phi, 2, None, &[1, 2], 1),
            Err(Error::SeedConflict(2))
        ));
    }

    #[test]
    fn single_orbit_default() {
        let c = Permutation::parse_cycles("(1 2 3 4 5)", 5).unwrap();
        let plan = plan_transversals(&c.orbits(), &c, 5, None, &[], 1).unwrap();
        assert_eq!(plan.t_0, vec![1]);
        assert_eq!(
            plan.transversals,
            vec![vec![1], vec![2], vec![3], vec![4], vec![5]]
        );
    }

    fn arb_perm(max_n: usize) -> impl Strategy<Value = Permutation> {
        (2..=max_n)
            .prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    /// Matrix averaged over the cyclic group of `phi`, hence compatible with it.
    fn symmetrized(phi: &Permutation, raw: &[f64]) -> MatrixC {
        let n = phi.n();
        let mut m = MatrixC::zeros(n, n);
        let order = phi.order() as i64;
        for e in 0..order {
            let q = phi.pow(e);
            for i in 0..n {
                for j in 0..n {
                    let (qi, qj) = (q.apply(i + 1) - 1, q.apply(j + 1) - 1);
                    m[(qi, qj)] += C64::new(raw[i * n + j], 0.0);
                }
            }
        }
        m
    }

    proptest! {
        #[test]
        fn divisor_matches_equitable_oracle(
            phi in arb_perm(10),
            raw in prop::collection::vec(0.0f64..2.0, 100),
        ) {
            let m = symmetrized(&phi, &raw);
            let d = divisor_matrix(&m, &phi).unwrap();
            let e = is_equitable(&m, &VertexPartition::from_orbits(&phi.orbits())).unwrap().unwrap();
            prop_assert!(d.max_abs_diff(&e) < 1e-12);
            prop_assert!(d.as_slice().iter().all(|z| z.re >= 0.0 && z.im == 0.0));
        }

        #[test]
        fn plans_are_consistent(phi in arb_perm(16)) {
            let order = phi.order();
            let (p, _) = crate::permutation::prime_factorization(order).first().copied().unwrap_or((2, 0));
            let cofactor = {
                let mut c = order;
                while c % p == 0 { c /= p; }
                c
            };
            let psi = phi.pow(cofactor as i64);
            let orbits = psi.orbits();
            prop_assume!(orbits.max_len() > 1);
            let plan = plan_transversals(&orbits, &phi, p, None, &[], 1).unwrap();
            let again = plan_transversals(&orbits, &phi, p, None, &[], 1).unwrap();
            prop_assert_eq!(&plan, &again);
            for (m, t) in plan.transversals.iter().enumerate() {
                for (i, &v) in t.iter().enumerate() {
                    prop_assert_eq!(v, psi.pow(m as i64).apply(plan.t_0[i]));
                }
            }
            let mut all = plan.index_order();
            all.sort_unstable();
            prop_assert_eq!(all, (1..=phi.n()).collect::<Vec<_>>());
        }
    }
}
