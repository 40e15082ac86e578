use crate::error::{Error, Result};
use crate::matrix::MatrixC;
use crate::partition::TransversalPlan;

/// A matrix permuted into `T_F, T_0, …, T_{k−1}` order, with its blocks.
///
/// With `k = p^N` and `w = r·p^{N−1}`:
/// `F` is `f×f`, `H` is `f×w`, `L` is `w×f`, each `C_m` is `r×r`
/// (`m < k`) and each `D_s` is `w×w` (`s < p`).
#[derive(Clone, Debug)]
pub struct BlockLayout {
    pub f: usize,
    pub r: usize,
    pub p: usize,
    pub n_exp: u32,
    pub reordered: MatrixC,
    pub f_block: MatrixC,
    pub h: MatrixC,
    pub l: MatrixC,
    pub c: Vec<MatrixC>,
    pub d: Vec<MatrixC>,
    /// Labels in layout order.
    pub index_map: Vec<usize>,
}

impl BlockLayout {
    pub fn k(&self) -> usize {
        self.p.pow(self.n_exp)
    }

    /// Width `r·p^{N−1}` of the `D_s` blocks.
    pub fn w(&self) -> usize {
        self.r * self.k() / self.p
    }

    pub fn dim(&self) -> usize {
        self.f + self.r * self.k()
    }
}

/// Permutes `m` (whose rows carry `labels`) into the layout of `plan` and
/// extracts the blocks, checking the strip repetition and the two
/// block-circulant structures to `1e-12 · max(1, max|M|)`.
pub fn reorder_for_prime_power(
    m: &MatrixC,
    labels: &[usize],
    plan: &TransversalPlan,
    p: usize,
    n_exp: u32,
) -> Result<BlockLayout> {
    let k = p.pow(n_exp);
    if plan.k() != k {
        return Err(Error::DimensionMismatch(format!(
            "plan has {} transversals, expected {p}^{n_exp}",
            plan.k()
        )));
    }
    if !m.is_square() || m.rows() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for a {}x{} matrix",
            labels.len(),
            m.rows(),
            m.cols()
        )));
    }
    let index_map = plan.index_order();
    let mut sorted_map = index_map.clone();
    sorted_map.sort_unstable();
    let mut sorted_labels = labels.to_vec();
    sorted_labels.sort_unstable();
    if sorted_map != sorted_labels {
        return Err(Error::DimensionMismatch(
            "plan does not cover the index set".into(),
        ));
    }
    let positions: Vec<usize> = index_map
        .iter()
        .map(|v| labels.iter().position(|x| x == v).expect("label present"))
        .collect();
    let reordered = m.submatrix(&positions, &positions);

    let (f, r) = (plan.f(), plan.r());
    let w = r * k / p;
    let f_block = reordered.block(0, 0, f, f);
    let h = reordered.block(0, f, f, w);
    let l = reordered.block(f, 0, w, f);
    let c: Vec<MatrixC> = (0..k)
        .map(|j| reordered.block(f, f + j * r, r, r))
        .collect();
    let d: Vec<MatrixC> = (0..p)
        .map(|s| reordered.block(f, f + s * w, w, w))
        .collect();

    let tol = 1e-12 * m.max_abs().max(1.0);
    let check = |ok: bool, what: String| {
        if ok {
            Ok(())
        } else {
            Err(Error::NotBlockCirculant(what))
        }
    };
    for s in 1..p {
        check(
            reordered.block(0, f + s * w, f, w).approx_eq(&h, tol),
            format!("H strip {s}"),
        )?;
        check(
            reordered.block(f + s * w, 0, w, f).approx_eq(&l, tol),
            format!("L strip {s}"),
        )?;
    }
    for a in 0..k {
        for b in 0..k {
            let blk = reordered.block(f + a * r, f + b * r, r, r);
            check(
                blk.approx_eq(&c[(b + k - a) % k], tol),
                format!("C block ({a},{b})"),
            )?;
        }
    }
    for a in 0..p {
        for b in 0..p {
            let blk = reordered.block(f + a * w, f + b * w, w, w);
            check(
                blk.approx_eq(&d[(b + p - a) % p], tol),
                format!("D block ({a},{b})"),
            )?;
        }
    }
    // D_s rebuilt from the C_m
    let kp = k / p;
    for (s, ds) in d.iter().enumerate() {
        for u in 0..kp {
            for v in 0..kp {
                let cm = &c[(s * kp + v + k - u) % k];
                check(
                    ds.block(u * r, v * r, r, r).approx_eq(cm, tol),
                    format!("D_{s} from C"),
                )?;
            }
        }
    }

    Ok(BlockLayout {
        f,
        r,
        p,
        n_exp,
        reordered,
        f_block,
        h,
        l,
        c,
        d,
        index_map,
    })
}
