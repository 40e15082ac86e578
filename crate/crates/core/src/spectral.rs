//! Eigenvalues of dense complex matrices and spectral-radius checks.
//!
//! The eigensolver reduces to upper Hessenberg form with Householder
//! reflections and then runs single-shift complex QR with Wilkinson shifts,
//! deflating from the bottom. It shares nothing with the decomposer except
//! [`MatrixC`], so it can serve as an independent check on it.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::matrix::{MatrixC, C64, ZERO};
use crate::partition::divisor_matrix;
use crate::permutation::Permutation;

/// Default absolute tolerance for comparing spectra.
pub const MATCH_TOL: f64 = 1e-8;

/// Eigenvalues with multiplicity, sorted by `(re, im)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumMultiset {
    pub values: Vec<C64>,
    pub source_dim: usize,
}

impl SpectrumMultiset {
    pub fn new(mut values: Vec<C64>) -> Self {
        values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let source_dim = values.len();
        SpectrumMultiset { values, source_dim }
    }

    /// Multiset union.
    pub fn union<'a>(parts: impl IntoIterator<Item = &'a SpectrumMultiset>) -> Self {
        SpectrumMultiset::new(
            parts
                .into_iter()
                .flat_map(|s| s.values.iter().copied())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn spectrum(m: &MatrixC) -> Result<SpectrumMultiset> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "spectrum of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let mut h = m.to_rows();
    hessenberg(&mut h);
    Ok(SpectrumMultiset::new(hessenberg_qr(h)?))
}

pub fn spectral_radius(m: &MatrixC) -> Result<f64> {
    Ok(spectrum(m)?.radius())
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(a: &mut [Vec<C64>]) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = a[k + 1..]
            .iter()
            .map(|row| row[k].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[k + 1][k];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = a[k + 1..].iter().map(|row| row[k]).collect();
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // A ← (I − 2vv*) A on rows k+1..
        for col in 0..n {
            let dot: C64 = v
                .iter()
                .zip(&a[k + 1..])
                .map(|(vi, row)| vi.conj() * row[col])
                .sum();
            for (vi, row) in v.iter().zip(a[k + 1..].iter_mut()) {
                row[col] -= *vi * dot * 2.0;
            }
        }
        // A ← A (I − 2vv*) on columns k+1..
        for row in a.iter_mut() {
            let dot: C64 = v.iter().zip(&row[k + 1..]).map(|(vi, x)| *x * vi).sum();
            for (vi, x) in v.iter().zip(row[k + 1..].iter_mut()) {
                *x -= dot * vi.conj() * 2.0;
            }
        }
        for row in a[k + 2..].iter_mut() {
            row[k] = ZERO;
        }
    }
}

/// Rotation `G = [[c̄, s̄], [−s, c]]` with `G·[x, y]ᵀ = [r, 0]ᵀ`.
fn givens(x: C64, y: C64) -> (C64, C64) {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        (C64::new(1.0, 0.0), ZERO)
    } else {
        (x / r, y / r)
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

#[allow(clippy::needless_range_loop)]
fn hessenberg_qr(mut h: Vec<Vec<C64>>) -> Result<Vec<C64>> {
    let n = h.len();
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = f64::EPSILON;
    let norm = h.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let max_iter = 100 * n.max(10);
    let mut total = 0;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    loop {
        if hi == 0 {
            eig[0] = h[0][0];
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let mut tst = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            if tst == 0.0 {
                tst = norm;
            }
            if h[lo][lo - 1].norm() <= eps * tst || h[lo][lo - 1].norm() <= f64::MIN_POSITIVE {
                h[lo][lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[hi][hi];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iter {
            return Err(Error::NoConvergence);
        }
        let mu = if since_deflation.is_multiple_of(10) {
            h[hi][hi] + C64::new(0.75 * h[hi][hi - 1].re.abs(), 0.0)
        } else {
            wilkinson(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };

        for k in lo..=hi {
            h[k][k] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            for col in k..=hi {
                let (a, b) = (h[k][col], h[k + 1][col]);
                h[k][col] = c.conj() * a + s.conj() * b;
                h[k + 1][col] = -s * a + c * b;
            }
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = lo + off;
            for row in h.iter_mut().take((k + 2).min(hi) + 1).skip(lo) {
                let (a, b) = (row[k], row[k + 1]);
                row[k] = a * c + b * s;
                row[k + 1] = -a * s.conj() + b * c.conj();
            }
        }
        for k in lo..=hi {
            h[k][k] += mu;
        }
    }
    Ok(eig)
}

/// Outcome of matching two spectra.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchReport {
    pub equal: bool,
    /// Largest distance among matched pairs.
    pub max_distance: f64,
    pub unmatched_left: Vec<C64>,
    pub unmatched_right: Vec<C64>,
}

/// Greedy matching: each value of `a`, in `(re, im)` order, pairs with the
/// nearest unused value of `b` within `tol`.
pub fn multiset_equal(a: &SpectrumMultiset, b: &SpectrumMultiset, tol: f64) -> MatchReport {
    let mut used = vec![false; b.values.len()];
    let mut max_distance: f64 = 0.0;
    let mut unmatched_left = Vec::new();
    for &x in &a.values {
        let best = b
            .values
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1));
        match best {
            Some((k, d)) if d <= tol => {
                used[k] = true;
                max_distance = max_distance.max(d);
            }
            _ => unmatched_left.push(x),
        }
    }
    let unmatched_right: Vec<C64> = b
        .values
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(y, _)| *y)
        .collect();
    MatchReport {
        equal: unmatched_left.is_empty() && unmatched_right.is_empty(),
        max_distance,
        unmatched_left,
        unmatched_right,
    }
}

/// Compares `σ(m)` with the union of the spectra of `parts`.
pub fn spectra_agree<'a>(
    m: &MatrixC,
    parts: impl IntoIterator<Item = &'a MatrixC>,
    tol: f64,
) -> Result<MatchReport> {
    let whole = spectrum(m)?;
    let pieces = parts
        .into_iter()
        .map(spectrum)
        .collect::<Result<Vec<_>>>()?;
    Ok(multiset_equal(
        &whole,
        &SpectrumMultiset::union(&pieces),
        tol,
    ))
}

/// Every entry real and `≥ 0`.
pub fn is_nonnegative(m: &MatrixC) -> bool {
    m.as_slice().iter().all(|z| z.im == 0.0 && z.re >= 0.0)
}

/// Strong connectivity of the digraph with an arc `i → j` wherever `M[i,j] > 0`.
pub fn is_irreducible(m: &MatrixC) -> bool {
    let n = m.rows();
    if n == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let z = if forward { m[(u, v)] } else { m[(v, u)] };
                if z.re > 0.0 && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

fn check_perron_hypotheses(m: &MatrixC) -> Result<()> {
    if !is_nonnegative(m) {
        return Err(Error::NotNonnegative);
    }
    if !is_irreducible(m) {
        return Err(Error::NotIrreducible);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusReport {
    pub rho_matrix: f64,
    pub rho_divisor: f64,
    pub divisor: MatrixC,
    pub equal: bool,
}

/// Compares `ρ(M)` with `ρ(M_φ)` for nonnegative irreducible `M`; the two are
/// called equal when they differ by less than `1e-8 · max(1, ρ(M))`.
pub fn check_radius_equality(m: &MatrixC, phi: &Permutation) -> Result<RadiusReport> {
    check_perron_hypotheses(m)?;
    let divisor = divisor_matrix(m, phi)?;
    let rho_matrix = spectral_radius(m)?;
    let rho_divisor = spectral_radius(&divisor)?;
    let equal = (rho_matrix - rho_divisor).abs() < 1e-8 * rho_matrix.max(1.0);
    Ok(RadiusReport {
        rho_matrix,
        rho_divisor,
        divisor,
        equal,
    })
}

/// Assembles the block-circulant `A` whose first block row is `blocks` (each
/// later row shifted right by one block) and returns `(ρ(A), ρ(Σ blocks))`.
pub fn block_circulant_radius(blocks: &[MatrixC]) -> Result<(f64, f64)> {
    let a = block_circulant(blocks)?;
    check_perron_hypotheses(&a)?;
    let mut b = MatrixC::zeros(blocks[0].rows(), blocks[0].cols());
    for blk in blocks {
        b = &b + blk;
    }
    Ok((spectral_radius(&a)?, spectral_radius(&b)?))
}

pub fn block_circulant(blocks: &[MatrixC]) -> Result<MatrixC> {
    let Some(first) = blocks.first() else {
        return Err(Error::DimensionMismatch("no blocks".into()));
    };
    let s = first.rows();
    if blocks.iter().any(|b| b.rows() != s || b.cols() != s) {
        return Err(Error::DimensionMismatch(
            "blocks must be square and equal-sized".into(),
        ));
    }
    let n = blocks.len();
    let mut a = MatrixC::zeros(n * s, n * s);
    for row in 0..n {
        for col in 0..n {
            a.set_block(row * s, col * s, &blocks[(col + n - row) % n]);
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn spec_of(rows: &[[f64; 2]]) -> Vec<C64> {
        spectrum(&MatrixC::from_real_rows(rows)).unwrap().values
    }

    #[test]
    fn two_by_two_examples() {
        // trace 6, determinant 5
        let v = spec_of(&[[2.0, 3.0], [1.0, 4.0]]);
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-12 && (v[1] - c(5.0, 0.0)).norm() < 1e-12);
        let v = spec_of(&[[2.0, 1.0], [2.0, 2.0]]);
        let r2 = 2f64.sqrt();
        assert!((v[0] - c(2.0 - r2, 0.0)).norm() < 1e-12);
        assert!((v[1] - c(2.0 + r2, 0.0)).norm() < 1e-12);
        let v = spectrum(&MatrixC::identity(3)).unwrap().values;
        assert!(v.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-14));
    }

    #[test]
    fn radii() {
        assert_eq!(spectral_radius(&MatrixC::zeros(4, 4)).unwrap(), 0.0);
        let swap = MatrixC::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!((spectral_radius(&swap).unwrap() - 1.0).abs() < 1e-14);
        let rho = spectral_radius(&gallery::order12_adjacency()).unwrap();
        assert!((rho - (2.0 + 2f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn cyclic_permutation_spectrum() {
        // the 12-cycle permutation matrix has the 12th roots of unity as eigenvalues
        let n = 12;
        let p = MatrixC::from_fn(
            n,
            n,
            |i, j| if j == (i + 1) % n { c(1.0, 0.0) } else { ZERO },
        );
        let got = spectrum(&p).unwrap();
        let want = SpectrumMultiset::new(
            (0..n)
                .map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
                .collect(),
        );
        assert!(multiset_equal(&got, &want, 1e-10).equal);
    }

    #[test]
    fn complex_hermitian_spectrum() {
        let h = MatrixC::from_rows(&[[c(2.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(2.0, 0.0)]]);
        let v = spectrum(&h).unwrap().values;
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-12 && (v[1] - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn matching_rules() {
        let a = SpectrumMultiset::new(vec![c(1.0, 0.0), c(5.0, 0.0)]);
        let b = SpectrumMultiset::new(vec![c(5.0, 0.0), c(1.0 + 1e-12, 0.0)]);
        assert!(multiset_equal(&a, &b, 1e-9).equal);
        let one = SpectrumMultiset::new(vec![c(1.0, 0.0)]);
        let two = SpectrumMultiset::new(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let rep = multiset_equal(&two, &one, 1.0);
        assert!(!rep.equal);
        assert_eq!(rep.unmatched_left.len(), 1);
    }

    #[test]
    fn radius_equality_examples() {
        let rep =
            check_radius_equality(&gallery::order12_adjacency(), &gallery::order12_phi()).unwrap();
        assert!(rep.equal);
        assert!((rep.rho_matrix - (2.0 + 2f64.sqrt())).abs() < 1e-8);

        let single = MatrixC::from_real_rows(&[[3.5]]);
        assert!(
            check_radius_equality(&single, &Permutation::identity(1))
                .unwrap()
                .equal
        );

        // eigenvalues ±4
        let two_cycle = MatrixC::from_real_rows(&[[0.0, 2.0], [8.0, 0.0]]);
        let rep = check_radius_equality(&two_cycle, &Permutation::identity(2)).unwrap();
        assert!((rep.rho_matrix - 4.0).abs() < 1e-12 && rep.equal);

        let split = MatrixC::from_real_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(
            check_radius_equality(&split, &Permutation::identity(3)),
            Err(Error::NotIrreducible)
        ));
        let neg = MatrixC::from_real_rows(&[[0.0, -1.0], [1.0, 0.0]]);
        assert!(matches!(
            check_radius_equality(&neg, &Permutation::identity(2)),
            Err(Error::NotNonnegative)
        ));
    }

    #[test]
    fn block_circulant_examples() {
        let (ra, rb) = block_circulant_radius(&[
            MatrixC::from_real_rows(&[[0.0]]),
            MatrixC::from_real_rows(&[[1.0]]),
        ])
        .unwrap();
        assert!((ra - 1.0).abs() < 1e-14 && (rb - 1.0).abs() < 1e-14);

        // blocks C_0, C_1, C_1 from the second round of the order-9 example
        let c0 = MatrixC::from_real_rows(&[[0.0, 3.0], [1.0, 2.0]]);
        let c1 = MatrixC::identity(2);
        let (ra, rb) = block_circulant_radius(&[c0.clone(), c1.clone(), c1.clone()]).unwrap();
        let direct = spectral_radius(&(&c0 + &c1.scale(c(2.0, 0.0)))).unwrap();
        assert!((ra - rb).abs() < 1e-8 && (rb - direct).abs() < 1e-12);
        assert!((rb - 5.0).abs() < 1e-12);
    }

    fn arb_matrix(max_n: usize) -> impl Strategy<Value = MatrixC> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec(-3.0f64..3.0, n * n)
                .prop_map(move |v| MatrixC::from_fn(n, n, |i, j| c(v[i * n + j], 0.0)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_and_conjugate_closure(m in arb_matrix(12)) {
            let s = spectrum(&m).unwrap();
            prop_assert_eq!(s.len(), m.rows());
            let sum: C64 = s.values.iter().sum();
            prop_assert!((sum - m.trace()).norm() < 1e-9 * m.max_abs().max(1.0) * m.rows() as f64);
            let conj = SpectrumMultiset::new(s.values.iter().map(|z| z.conj()).collect());
            prop_assert!(multiset_equal(&s, &conj, 1e-7).equal);
        }

        #[test]
        fn perron_root_is_an_eigenvalue(m in arb_matrix(8)) {
            let pos = m.map(|z| c(z.re.abs() + 0.01, 0.0));
            let s = spectrum(&pos).unwrap();
            let rho = s.radius();
            prop_assert!(s.values.iter().any(|z| (z - c(rho, 0.0)).norm() < 1e-8 * rho.max(1.0)));
        }
    }
}
