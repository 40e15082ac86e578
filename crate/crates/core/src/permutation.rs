//! Permutations of `{1..n}`: cycle notation, orbits, order, powers and the
//! Bézout exponents used to move between the stages of a decomposition.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::matrix::MatrixC;

/// A bijection of `{1..n}` stored as 1-based images.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    /// `images[i - 1]` is the image of `i`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n {
                return Err(Error::OutOfRange { point: v, n });
            }
            if seen[v - 1] {
                return Err(Error::RepeatedPoint(v));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation on `{1..n}` from disjoint cycles; unlisted points are fixed.
    pub fn from_cycles(cycles: &[Vec<usize>], n: usize) -> Result<Self> {
        let mut images: Vec<usize> = (1..=n).collect();
        let mut used = vec![false; n + 1];
        for cycle in cycles {
            for &v in cycle {
                if v == 0 || v > n {
                    return Err(Error::OutOfRange { point: v, n });
                }
                if used[v] {
                    return Err(Error::RepeatedPoint(v));
                }
                used[v] = true;
            }
            for (k, &v) in cycle.iter().enumerate() {
                images[v - 1] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Parses cycle notation such as `"(1 2 3)(4, 5)"`. Whitespace and commas
    /// separate points; an empty string is the identity.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Self> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut current: Option<Vec<usize>> = None;
        let mut token = String::new();

        fn flush(token: &mut String, current: &mut Option<Vec<usize>>) -> Result<()> {
            if token.is_empty() {
                return Ok(());
            }
            let v: usize = token
                .parse()
                .map_err(|_| Error::Parse(format!("bad point {token:?}")))?;
            match current {
                Some(c) => c.push(v),
                None => return Err(Error::Parse(format!("point {v} outside parentheses"))),
            }
            token.clear();
            Ok(())
        }

        for ch in text.chars() {
            match ch {
                '(' => {
                    if current.is_some() {
                        return Err(Error::Parse("nested '('".into()));
                    }
                    current = Some(Vec::new());
                }
                ')' => {
                    flush(&mut token, &mut current)?;
                    match current.take() {
                        Some(c) => cycles.push(c),
                        None => return Err(Error::Parse("unmatched ')'".into())),
                    }
                }
                c if c.is_ascii_digit() => {
                    if current.is_none() {
                        return Err(Error::Parse("point outside parentheses".into()));
                    }
                    token.push(c);
                }
                c if c.is_whitespace() || c == ',' => flush(&mut token, &mut current)?,
                c => return Err(Error::Parse(format!("unexpected character {c:?}"))),
            }
        }
        if current.is_some() {
            return Err(Error::Parse("unterminated cycle".into()));
        }
        Permutation::from_cycles(&cycles, n)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of the 1-based point `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.n(),
            other.n(),
            "composing permutations of different degree"
        );
        Permutation {
            images: other.images.iter().map(|&j| self.apply(j)).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j - 1] = i + 1;
        }
        Permutation { images: inv }
    }

    /// `self^e`; negative exponents give inverse powers.
    pub fn pow(&self, e: i64) -> Permutation {
        let mut images = vec![0; self.n()];
        for orbit in self.orbits().orbits {
            let len = orbit.len() as i64;
            let shift = e.rem_euclid(len) as usize;
            for (k, &v) in orbit.iter().enumerate() {
                images[v - 1] = orbit[(k + shift) % orbit.len()];
            }
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i + 1 == j)
    }

    /// Least common multiple of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.orbits()
            .orbits
            .iter()
            .fold(1u64, |acc, o| acc.lcm(&(o.len() as u64)))
    }

    /// Nontrivial cycles, each starting at its smallest point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        self.orbits()
            .orbits
            .into_iter()
            .filter(|o| o.len() > 1)
            .collect()
    }

    /// Orbit of `i` in the order `i, φ(i), φ²(i), …`.
    pub fn orbit_of(&self, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        let mut j = self.apply(i);
        while j != i {
            out.push(j);
            j = self.apply(j);
        }
        out
    }

    pub fn orbit_len(&self, i: usize) -> usize {
        let mut len = 1;
        let mut j = self.apply(i);
        while j != i {
            len += 1;
            j = self.apply(j);
        }
        len
    }

    pub fn orbits(&self) -> OrbitPartition {
        let all: Vec<usize> = (1..=self.n()).collect();
        self.orbits_on(&all)
    }

    /// Orbits through the given points. The point set should be invariant
    /// (see [`Permutation::preserves`]); orbits are listed from their
    /// smallest point and sorted by it.
    pub fn orbits_on(&self, points: &[usize]) -> OrbitPartition {
        let mut seen = BTreeSet::new();
        let mut sorted = points.to_vec();
        sorted.sort_unstable();
        let mut orbits = Vec::new();
        for &p in &sorted {
            if seen.contains(&p) {
                continue;
            }
            let orbit = self.orbit_of(p);
            seen.extend(orbit.iter().copied());
            // p is the smallest point of its orbit only if the set is invariant;
            // rotate anyway so the listing starts at the minimum.
            let min_pos = orbit
                .iter()
                .enumerate()
                .min_by_key(|&(_, &v)| v)
                .map(|(k, _)| k)
                .unwrap_or(0);
            let mut rotated = orbit[min_pos..].to_vec();
            rotated.extend_from_slice(&orbit[..min_pos]);
            orbits.push(rotated);
        }
        orbits.sort_by_key(|o| o[0]);
        OrbitPartition { orbits }
    }

    /// True when the permutation maps `points` onto itself.
    pub fn preserves(&self, points: &[usize]) -> bool {
        let set: BTreeSet<usize> = points.iter().copied().collect();
        points
            .iter()
            .all(|&p| p <= self.n() && set.contains(&self.apply(p)))
    }

    /// Checks `M[φ(i), φ(j)] = M[i, j]` for all `i, j`, up to
    /// `1e-12 · max(1, max|M|)`.
    pub fn is_automorphism(&self, m: &MatrixC) -> Result<bool> {
        if !m.is_square() || m.rows() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "permutation on {} points against a {}x{} matrix",
                self.n(),
                m.rows(),
                m.cols()
            )));
        }
        let tol = 1e-12 * m.max_abs().max(1.0);
        let n = self.n();
        for i in 0..n {
            let pi = self.images[i] - 1;
            for j in 0..n {
                let pj = self.images[j] - 1;
                if (m[(pi, pj)] - m[(i, j)]).norm() > tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, v) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.n(), self)
    }
}

/// Orbits of a permutation, each listed cyclically from its smallest point,
/// sorted by that point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub orbits: Vec<Vec<usize>>,
}

impl OrbitPartition {
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn representatives(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o[0]).collect()
    }

    pub fn max_len(&self) -> usize {
        self.orbits.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Index of the orbit containing `v`.
    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.orbits.iter().position(|o| o.contains(&v))
    }
}

/// Prime factors of `l` in ascending order with their exponents.
pub fn prime_factorization(mut l: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= l {
        if l.is_multiple_of(p) {
            let mut e = 0;
            while l.is_multiple_of(p) {
                l /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if l > 1 {
        out.push((l, 1));
    }
    out
}

/// `(α, β)` with `1 = l·α + q·β` and `0 ≤ α < q`.
pub fn bezout_exponents(l: u64, q: u64) -> Result<(i64, i64)> {
    let (li, qi) = (l as i64, q as i64);
    let eg = li.extended_gcd(&qi);
    if eg.gcd != 1 {
        return Err(Error::NotCoprime { a: l, b: q });
    }
    let alpha = eg.x.rem_euclid(qi);
    let beta = (1 - li * alpha) / qi;
    Ok((alpha, beta))
}
