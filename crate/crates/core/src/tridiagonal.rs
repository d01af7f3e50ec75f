//! Symmetric tridiagonal eigensolver for the lowest part of the spectrum.
//!
//! Eigenvalues come from Sturm-sequence bisection, which is accurate to a few
//! ulps of the local matrix entries, so well-separated small eigenvalues of
//! stiff operators keep absolute errors far below `eps * ||T||`. Eigenvectors
//! come from inverse iteration with a partially pivoted LU of `T - lambda I`,
//! reorthogonalized within clusters. The matrix is split wherever an
//! off-diagonal entry is negligible, so block-diagonal inputs are solved block
//! by block.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len().saturating_sub(1),
                got: off.len(),
            });
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "tridiagonal entries must be finite".into(),
            ));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    fn norm1(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |e| e.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Index ranges of the unreduced diagonal blocks.
    fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, &e) in self.off.iter().enumerate() {
            let scale = (self.diag[i].abs() * self.diag[i + 1].abs()).sqrt();
            if e == 0.0 || e.abs() <= f64::EPSILON * scale {
                out.push(start..i + 1);
                start = i + 1;
            }
        }
        out.push(start..self.dim());
        out
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        self.blocks()
            .into_iter()
            .map(|r| Block::new(self, r).count_below(x))
            .sum()
    }

    /// The `k` smallest eigenvalues in ascending order.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        Ok(self.select_lowest(k)?.into_iter().map(|(v, _, _)| v).collect())
    }

    /// The `k` smallest eigenpairs, eigenvalues ascending, eigenvectors with
    /// unit Euclidean norm. Deterministic for identical input.
    pub fn lowest_eigenpairs(&self, k: usize) -> Result<Vec<(f64, Vec<f64>)>> {
        let chosen = self.select_lowest(k)?;
        let n = self.dim();
        let norm = self.norm1();
        let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);
        // previously computed vectors per block, for cluster reorthogonalization
        let mut per_block: Vec<Vec<(f64, usize)>> = vec![Vec::new(); self.blocks().len()];
        let blocks = self.blocks();
        for (value, b, _) in chosen {
            let block = Block::new(self, blocks[b].clone());
            let cluster_tol = 1e-3 * norm;
            let mut shift = value;
            let prior: Vec<&[f64]> = per_block[b]
                .iter()
                .filter(|(v, _)| (value - v).abs() <= cluster_tol)
                .map(|&(_, idx)| &out[idx].1[blocks[b].clone()])
                .collect();
            // separate exactly coincident shifts so the LU differs
            let pertol = 10.0 * f64::EPSILON * value.abs().max(norm * f64::EPSILON);
            for &(v, _) in &per_block[b] {
                if (shift - v).abs() < pertol {
                    shift = v + pertol;
                }
            }
            let local = block.inverse_iteration(shift, norm, &prior, out.len());
            let mut full = vec![0.0; n];
            full[blocks[b].clone()].copy_from_slice(&local);
            per_block[b].push((value, out.len()));
            out.push((value, full));
        }
        Ok(out)
    }

    /// `(eigenvalue, block index, index within block)` of the `k` smallest.
    fn select_lowest(&self, k: usize) -> Result<Vec<(f64, usize, usize)>> {
        if k == 0 || k > self.dim() {
            return Err(Error::LevelCountOutOfRange { k, dim: self.dim() });
        }
        let mut all = Vec::new();
        for (b, r) in self.blocks().into_iter().enumerate() {
            let block = Block::new(self, r);
            let m = k.min(block.len());
            for j in 0..m {
                all.push((block.kth_eigenvalue(j), b, j));
            }
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        all.truncate(k);
        Ok(all)
    }
}

struct Block<'a> {
    diag: &'a [f64],
    off: &'a [f64],
    pivmin: f64,
}

impl<'a> Block<'a> {
    fn new(t: &'a SymmetricTridiagonal, r: std::ops::Range<usize>) -> Self {
        let diag = &t.diag[r.clone()];
        let off = &t.off[r.start..r.end - 1];
        let max_e2 = off.iter().map(|e| e * e).fold(1.0, f64::max);
        Self {
            diag,
            off,
            pivmin: f64::MIN_POSITIVE * max_e2,
        }
    }

    fn len(&self) -> usize {
        self.diag.len()
    }

    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < self.pivmin {
            q = -self.pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.len() {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = self.off.get(i).map_or(0.0, |e| e.abs());
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        let pad = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + self.pivmin;
        (lo - pad, hi + pad)
    }

    /// `j`-th smallest eigenvalue (0-based) by bisection to full precision.
    fn kth_eigenvalue(&self, j: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..256 {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo + 0.5 * (hi - lo)
    }

    /// Inverse iteration for the eigenvector at `shift`.
    fn inverse_iteration(&self, shift: f64, norm: f64, prior: &[&[f64]], seed: usize) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            return vec![1.0];
        }
        let lu = TridiagLu::factor(self.diag, self.off, shift, norm);
        let mut rng = SplitMix(0x5eed_0000_u64 ^ (seed as u64).wrapping_mul(0x9e37_79b9));
        let mut x: Vec<f64> = (0..n).map(|_| rng.next_unit()).collect();
        for _ in 0..4 {
            let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
            x.iter_mut().for_each(|v| *v /= scale);
            x = lu.solve(x);
            for p in prior {
                let dot: f64 = p.iter().zip(&x).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(p.iter()).for_each(|(v, a)| *v -= dot * a);
            }
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= nrm);
        }
        x
    }
}

/// LU of a tridiagonal matrix with row interchanges: `P (T - s I) = L U`, with
/// `U` upper triangular of bandwidth two.
struct TridiagLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64, norm: f64) -> Self {
        let n = diag.len();
        let tiny = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
        let mut u0: Vec<f64> = diag.iter().map(|d| d - shift).collect();
        let mut u1: Vec<f64> = off.to_vec();
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut sub: Vec<f64> = off.to_vec();
        let mut l = vec![0.0; n - 1];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if sub[i].abs() > u0[i].abs() {
                // swap rows i and i + 1
                swapped[i] = true;
                let factor = u0[i] / sub[i];
                l[i] = factor;
                u0[i] = sub[i];
                let tmp = u1[i];
                u1[i] = u0[i + 1];
                u0[i + 1] = tmp - factor * u0[i + 1];
                if i + 1 < n - 1 {
                    u2[i] = u1[i + 1];
                    u1[i + 1] = -factor * u1[i + 1];
                }
            } else {
                if u0[i] == 0.0 {
                    u0[i] = tiny;
                }
                let factor = sub[i] / u0[i];
                l[i] = factor;
                u0[i + 1] -= factor * u1[i];
            }
            sub[i] = 0.0;
        }
        if u0[n - 1] == 0.0 {
            u0[n - 1] = tiny;
        }
        Self {
            u0,
            u1,
            u2,
            l,
            swapped,
        }
    }

    fn solve(&self, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.l[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.u2[i] * b[i + 2];
            }
            b[i] = v / self.u0[i];
            if !b[i].is_finite() {
                b[i] = b[i].signum() * f64::MAX.sqrt();
            }
        }
        b
    }
}

/// Small deterministic generator for inverse-iteration start vectors.
struct SplitMix(u64);

impl SplitMix {
    fn next_unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        2.0 * ((z >> 11) as f64 / (1u64 << 53) as f64) - 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};
    use proptest::prelude::*;

    fn dense(t: &SymmetricTridiagonal) -> DMatrix<f64> {
        let n = t.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = t.diag()[i];
            if i + 1 < n {
                m[(i, i + 1)] = t.off()[i];
                m[(i + 1, i)] = t.off()[i];
            }
        }
        m
    }

    fn residual(t: &SymmetricTridiagonal, value: f64, v: &[f64]) -> f64 {
        let n = t.dim();
        (0..n)
            .map(|i| {
                let mut r = (t.diag()[i] - value) * v[i];
                if i > 0 {
                    r += t.off()[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    r += t.off()[i] * v[i + 1];
                }
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn diagonal_matrix() {
        let t = SymmetricTridiagonal::new(vec![3.0, 1.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(t.lowest_eigenvalues(3).unwrap(), vec![1.0, 2.0, 3.0]);
        let pairs = t.lowest_eigenpairs(3).unwrap();
        assert_eq!(pairs[0].1.iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn free_laplacian_closed_form() {
        // eigenvalues of tridiag(-1, 2, -1): 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let t = SymmetricTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let vals = t.lowest_eigenvalues(10).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-14, "k={k}: {v} vs {exact}");
        }
    }

    #[test]
    fn split_blocks_with_exact_degeneracy() {
        // two identical decoupled blocks: every eigenvalue doubly degenerate
        let mut diag = vec![2.0; 10];
        diag.extend(vec![2.0; 10]);
        let mut off = vec![-1.0; 9];
        off.push(0.0);
        off.extend(vec![-1.0; 9]);
        let t = SymmetricTridiagonal::new(diag, off).unwrap();
        let pairs = t.lowest_eigenpairs(6).unwrap();
        for k in 0..3 {
            assert_eq!(pairs[2 * k].0, pairs[2 * k + 1].0);
        }
        for (a, (_, va)) in pairs.iter().enumerate() {
            for (_, vb) in pairs.iter().skip(a + 1) {
                let dot: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
                assert!(dot.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SymmetricTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymmetricTridiagonal::new(vec![], vec![]).is_err());
        let t = SymmetricTridiagonal::new(vec![1.0, 2.0], vec![0.5]).unwrap();
        assert_eq!(
            t.lowest_eigenvalues(3),
            Err(Error::LevelCountOutOfRange { k: 3, dim: 2 })
        );
        assert!(t.lowest_eigenvalues(0).is_err());
    }

    #[test]
    fn stiff_spectrum_keeps_small_eigenvalues_accurate() {
        // harmonic-oscillator-like matrix with a huge potential wall: the low
        // eigenvalues stay accurate to a few ulps of the kinetic scale
        let n = 400;
        let h = 0.05;
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let x = -10.0 + i as f64 * h;
                1.0 / (h * h) + 0.5 * x.powi(6)
            })
            .collect();
        let t = SymmetricTridiagonal::new(diag, vec![-0.5 / (h * h); n - 1]).unwrap();
        let ours = t.lowest_eigenvalues(5).unwrap();
        let eig = SymmetricEigen::new(dense(&t));
        let mut reference: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    proptest! {
        #[test]
        fn matches_dense_eigensolver(
            diag in proptest::collection::vec(-5.0f64..5.0, 12),
            off in proptest::collection::vec(-2.0f64..2.0, 11),
            k in 1usize..12,
        ) {
            let t = SymmetricTridiagonal::new(diag, off).unwrap();
            let eig = SymmetricEigen::new(dense(&t));
            let mut reference: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            let pairs = t.lowest_eigenpairs(k).unwrap();
            for (i, (value, vec)) in pairs.iter().enumerate() {
                prop_assert!((value - reference[i]).abs() < 1e-12);
                let nrm: f64 = vec.iter().map(|v| v * v).sum();
                prop_assert!((nrm - 1.0).abs() < 1e-12);
                prop_assert!(residual(&t, *value, vec) < 1e-11);
            }
            for i in 0..pairs.len() {
                for j in i + 1..pairs.len() {
                    let dot: f64 = pairs[i].1.iter().zip(&pairs[j].1).map(|(a, b)| a * b).sum();
                    prop_assert!(dot.abs() < 1e-9);
                }
            }
        }

        #[test]
        fn sturm_count_is_monotone(
            diag in proptest::collection::vec(-5.0f64..5.0, 8),
            off in proptest::collection::vec(-2.0f64..2.0, 7),
            a in -10.0f64..10.0, b in -10.0f64..10.0,
        ) {
            let t = SymmetricTridiagonal::new(diag, off).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(t.count_below(lo) <= t.count_below(hi));
        }
    }
}
