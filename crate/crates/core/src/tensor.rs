//! Multipartite operators and the tensor-index arithmetic built on them.
//!
//! Basis states of `H_1 ⊗ … ⊗ H_n` are enumerated row-major in mixed radix
//! over `dims`, party 1 most significant. Every module uses this ordering.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grassmann::SubspaceBasis;
use crate::tolerance::ToleranceConfig;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Largest total dimension accepted by [`MultiState::new`].
pub const MAX_DIM: usize = 4096;

/// A set of parties, stored as a bitset (bit `i` is party `i + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct SubsetMask(u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn from_bits(bits: u32) -> Self {
        SubsetMask(bits)
    }

    /// Builds a mask from 1-based party labels.
    pub fn from_parties(parties: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &p in parties {
            if p == 0 || p > 32 {
                return Err(Error::IndexOutOfRange(p, 32));
            }
            bits |= 1 << (p - 1);
        }
        Ok(SubsetMask(bits))
    }

    pub fn full(n: usize) -> Self {
        SubsetMask(if n >= 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `party` is 0-based here.
    pub fn contains(self, party: usize) -> bool {
        party < 32 && self.0 & (1 << party) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn xor(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 ^ other.0)
    }

    pub fn complement(self, n: usize) -> SubsetMask {
        SubsetMask(!self.0 & SubsetMask::full(n).0)
    }

    /// Sorted 1-based party labels.
    pub fn parties(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).map(|i| i + 1).collect()
    }

    pub fn check(self, n: usize) -> Result<()> {
        if self.0 & !SubsetMask::full(n).0 != 0 {
            return Err(Error::InvalidSubset(self.0, n));
        }
        Ok(())
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parties().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubsetMask {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parties = Vec::<usize>::deserialize(d)?;
        SubsetMask::from_parties(&parties).map_err(serde::de::Error::custom)
    }
}

/// Mixed-radix digits of a flat index, party 1 first.
pub(crate) fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = idx % d;
        idx /= d;
    }
    out
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Tensor product of a list of vectors.
pub fn kron_vectors(factors: &[CVec]) -> CVec {
    let mut out = CVec::from_element(1, C64::new(1.0, 0.0));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Reorders the tensor factors of `v`: party `k` of the result is party
/// `order[k]` of the input.
pub fn permute_parties(v: &CVec, dims: &[usize], order: &[usize]) -> CVec {
    let new_dims: Vec<usize> = order.iter().map(|&p| dims[p]).collect();
    let st = strides(dims);
    CVec::from_fn(v.len(), |idx, _| {
        let dg = digits(idx, &new_dims);
        v[dg.iter().zip(order).map(|(&x, &p)| x * st[p]).sum::<usize>()]
    })
}

/// Inverse of a permutation given as a list.
pub fn inverse_order(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (k, &p) in order.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// A Hermitian operator on `H_1 ⊗ … ⊗ H_n`, not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiState {
    matrix: CMat,
    dims: Vec<usize>,
    cfg: ToleranceConfig,
}

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl SpectralData {
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0).max(0.0)
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues above `tol * λ_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let cut = tol * self.lambda_max();
        if self.lambda_max() <= 0.0 {
            return 0;
        }
        self.eigenvalues.iter().filter(|&&l| l > cut).count()
    }
}

/// Result of restricting every party to the support of its reduced state.
#[derive(Debug, Clone)]
pub struct CompressedState {
    pub state: MultiState,
    /// One `d_i × r_i` isometry per original party.
    pub isometries: Vec<CMat>,
    /// Original 0-based party indices that survive compression.
    pub kept: Vec<usize>,
    /// Original 0-based party indices with a rank-one reduced state.
    pub dropped: Vec<usize>,
}

impl CompressedState {
    /// Maps a vector of the compressed space back into the original space.
    pub fn lift(&self, v: &CVec) -> CVec {
        let iso = self
            .isometries
            .iter()
            .fold(CMat::from_element(1, 1, C64::new(1.0, 0.0)), |acc, v| acc.kronecker(v));
        iso * v
    }

    /// Maps per-party factors of a compressed product vector back to the
    /// original parties (dropped parties get their one-dimensional support).
    pub fn lift_factors(&self, factors: &[CVec]) -> Vec<CVec> {
        let mut out = Vec::with_capacity(self.isometries.len());
        let mut next = 0;
        for (party, iso) in self.isometries.iter().enumerate() {
            if self.kept.contains(&party) {
                out.push(iso * &factors[next]);
                next += 1;
            } else {
                out.push(iso.column(0).into_owned());
            }
        }
        out
    }
}

impl MultiState {
    /// Validates and symmetrizes a matrix into a state.
    pub fn new(matrix: CMat, dims: Vec<usize>, cfg: ToleranceConfig) -> Result<Self> {
        cfg.validate()?;
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!("invalid party dimensions {dims:?}")));
        }
        let d: usize = dims.iter().product();
        if d != matrix.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "product of dims {dims:?} is {d}, matrix has order {}",
                matrix.nrows()
            )));
        }
        if d > MAX_DIM {
            return Err(Error::TooLarge(d, MAX_DIM));
        }
        for ((r, c), z) in matrix.iter().enumerate().map(|(i, z)| ((i % d, i / d), z)) {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(r, c));
            }
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let asym = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale > 0.0 && asym > cfg.tol_herm * scale {
            return Err(Error::NotHermitian(asym / scale));
        }
        let matrix = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        let state = MultiState { matrix, dims, cfg };
        let spec = state.spectral()?;
        let (min, max) = (spec.lambda_min(), spec.lambda_max());
        if min < -cfg.tol_psd * max || (max <= 0.0 && min < 0.0) {
            return Err(Error::NotPositive { min, max });
        }
        Ok(state)
    }

    /// Wraps an operator that is Hermitian by construction (e.g. a partial
    /// transpose), skipping the positivity check.
    pub(crate) fn from_hermitian(matrix: CMat, dims: Vec<usize>, cfg: ToleranceConfig) -> Self {
        MultiState { matrix, dims, cfg }
    }

    /// Sum of `|v⟩⟨v|` over the given vectors, weighted.
    pub fn from_weighted_vectors(
        terms: &[(f64, CVec)],
        dims: Vec<usize>,
        cfg: ToleranceConfig,
    ) -> Result<Self> {
        let d: usize = dims.iter().product();
        let mut m = CMat::zeros(d, d);
        for (w, v) in terms {
            if v.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "vector of length {} for dims {dims:?}",
                    v.len()
                )));
            }
            m += v * v.adjoint() * C64::new(*w, 0.0);
        }
        MultiState::new(m, dims, cfg)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn config(&self) -> &ToleranceConfig {
        &self.cfg
    }

    pub fn with_config(mut self, cfg: ToleranceConfig) -> Self {
        self.cfg = cfg;
        self
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Merges consecutive parties: `sizes = [1, 2]` on three parties yields
    /// the bipartition `A₁ : A₂A₃`. The matrix is unchanged.
    pub fn regrouped(&self, sizes: &[usize]) -> Result<MultiState> {
        if sizes.iter().sum::<usize>() != self.n_parties() || sizes.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "grouping {sizes:?} does not cover {} parties",
                self.n_parties()
            )));
        }
        let mut dims = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &s in sizes {
            dims.push(self.dims[start..start + s].iter().product());
            start += s;
        }
        Ok(MultiState::from_hermitian(self.matrix.clone(), dims, self.cfg))
    }

    /// Returns `ρ^{Γ_S}`: the row and column digits of every party in `S`
    /// are exchanged. This only moves entries, so applying it twice is exact.
    pub fn partial_transpose(&self, subset: SubsetMask) -> Result<MultiState> {
        subset.check(self.n_parties())?;
        let d = self.dim();
        if subset.is_empty() {
            return Ok(self.clone());
        }
        let st = strides(&self.dims);
        let table: Vec<Vec<usize>> = (0..d).map(|i| digits(i, &self.dims)).collect();
        let parties: Vec<usize> = (0..self.n_parties()).filter(|&i| subset.contains(i)).collect();
        let mut out = CMat::zeros(d, d);
        for c in 0..d {
            for r in 0..d {
                let (mut nr, mut nc) = (r as isize, c as isize);
                for &p in &parties {
                    let delta = (table[c][p] as isize - table[r][p] as isize) * st[p] as isize;
                    nr += delta;
                    nc -= delta;
                }
                out[(nr as usize, nc as usize)] = self.matrix[(r, c)];
            }
        }
        Ok(MultiState::from_hermitian(out, self.dims.clone(), self.cfg))
    }

    /// Partial trace over every party not in `keep`.
    pub fn reduced_state(&self, keep: SubsetMask) -> Result<MultiState> {
        keep.check(self.n_parties())?;
        if keep.is_empty() {
            return Err(Error::EmptySubset);
        }
        let n = self.n_parties();
        if keep == SubsetMask::full(n) {
            return Ok(self.clone());
        }
        let kept: Vec<usize> = (0..n).filter(|&i| keep.contains(i)).collect();
        let new_dims: Vec<usize> = kept.iter().map(|&i| self.dims[i]).collect();
        let new_st = strides(&new_dims);
        let d = self.dim();
        let dk: usize = new_dims.iter().product();
        let table: Vec<Vec<usize>> = (0..d).map(|i| digits(i, &self.dims)).collect();
        let kept_index = |dg: &[usize]| -> usize {
            kept.iter().zip(&new_st).map(|(&p, &s)| dg[p] * s).sum()
        };
        let traced: Vec<usize> = (0..n).filter(|&i| !keep.contains(i)).collect();
        let mut out = CMat::zeros(dk, dk);
        for r in 0..d {
            for c in 0..d {
                if traced.iter().all(|&p| table[r][p] == table[c][p]) {
                    out[(kept_index(&table[r]), kept_index(&table[c]))] += self.matrix[(r, c)];
                }
            }
        }
        Ok(MultiState::from_hermitian(out, new_dims, self.cfg))
    }

    pub fn spectral(&self) -> Result<SpectralData> {
        hermitian_eigen(&self.matrix)
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.spectral()?.rank(self.cfg.tol_rank))
    }

    /// Orthonormal basis of `R(ρ)`, eigenvectors with the largest eigenvalues first.
    pub fn range_basis(&self) -> Result<SubspaceBasis> {
        let spec = self.spectral()?;
        let r = spec.rank(self.cfg.tol_rank);
        let rows = spec.eigenvectors.columns(0, r).transpose();
        Ok(SubspaceBasis::from_orthonormal(rows, self.dims.clone()))
    }

    /// Orthonormal basis of `ker ρ`.
    pub fn kernel_basis(&self) -> Result<SubspaceBasis> {
        let spec = self.spectral()?;
        let r = spec.rank(self.cfg.tol_rank);
        let d = self.dim();
        let rows = spec.eigenvectors.columns(r, d - r).transpose();
        Ok(SubspaceBasis::from_orthonormal(rows, self.dims.clone()))
    }

    /// Ranks of the single-party reduced states.
    pub fn local_ranks(&self) -> Result<Vec<usize>> {
        (0..self.n_parties())
            .map(|i| self.reduced_state(SubsetMask::from_bits(1 << i))?.rank())
            .collect()
    }

    /// Restricts each party to the range of its reduced state and removes the
    /// parties whose reduced state has rank one.
    pub fn compress_support(&self) -> Result<CompressedState> {
        let n = self.n_parties();
        let mut isometries = Vec::with_capacity(n);
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for i in 0..n {
            let reduced = self.reduced_state(SubsetMask::from_bits(1 << i))?;
            let spec = reduced.spectral()?;
            let r = spec.rank(self.cfg.tol_rank).max(1);
            isometries.push(spec.eigenvectors.columns(0, r).into_owned());
            if r == 1 {
                dropped.push(i);
            } else {
                kept.push(i);
            }
        }
        if kept.is_empty() {
            return Err(Error::AllPartiesTrivial);
        }
        let iso = isometries
            .iter()
            .fold(CMat::from_element(1, 1, C64::new(1.0, 0.0)), |acc, v| acc.kronecker(v));
        let m = iso.adjoint() * &self.matrix * &iso;
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let dims = kept.iter().map(|&i| isometries[i].ncols()).collect();
        Ok(CompressedState {
            state: MultiState::from_hermitian(m, dims, self.cfg),
            isometries,
            kept,
            dropped,
        })
    }

    /// Reorders parties: party `k` of the result is party `order[k]` here.
    pub fn permuted(&self, order: &[usize]) -> Result<MultiState> {
        let n = self.n_parties();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::NotBijective(n));
        }
        let d = self.dim();
        let cols: Vec<CVec> = (0..d)
            .map(|c| {
                let mut e = CVec::zeros(d);
                e[c] = C64::new(1.0, 0.0);
                permute_parties(&e, &self.dims, order)
            })
            .collect();
        let p = CMat::from_columns(&cols);
        let m = &p * &self.matrix * p.adjoint();
        let dims = order.iter().map(|&i| self.dims[i]).collect();
        Ok(MultiState::from_hermitian(m, dims, self.cfg))
    }

    /// `ρ ↦ c·ρ` for `c > 0`.
    pub fn scaled(&self, c: f64) -> MultiState {
        MultiState::from_hermitian(&self.matrix * C64::new(c, 0.0), self.dims.clone(), self.cfg)
    }

    /// `ρ ↦ U ρ U†` for a unitary `U` on the full space.
    pub fn conjugated(&self, u: &CMat) -> Result<MultiState> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("unitary order differs from state order".into()));
        }
        let m = u * &self.matrix * u.adjoint();
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Ok(MultiState::from_hermitian(m, self.dims.clone(), self.cfg))
    }
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eigen(m: &CMat) -> Result<SpectralData> {
    let n = m.nrows();
    if n == 0 {
        return Ok(SpectralData { eigenvalues: vec![], eigenvectors: CMat::zeros(0, 0) });
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0).ok_or(Error::EigFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralData { eigenvalues, eigenvectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ket(dims: &[usize], digits_: &[usize]) -> CVec {
        let st = strides(dims);
        let d: usize = dims.iter().product();
        let mut v = CVec::zeros(d);
        v[digits_.iter().zip(&st).map(|(a, b)| a * b).sum::<usize>()] = c(1.0);
        v
    }

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn identity_is_valid() {
        let s = MultiState::new(CMat::identity(4, 4), vec![2, 2], cfg()).unwrap();
        assert!((s.trace() - 4.0).abs() < 1e-15);
        assert_eq!(s.rank().unwrap(), 4);
    }

    #[test]
    fn pure_product_has_rank_one() {
        let v = ket(&[2, 2, 2], &[0, 0, 0]);
        let s = MultiState::new(&v * v.adjoint(), vec![2, 2, 2], cfg()).unwrap();
        assert_eq!(s.rank().unwrap(), 1);
        assert_eq!(s.local_ranks().unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0), c(1.0), c(1.0), c(-0.1)]));
        assert!(matches!(MultiState::new(m, vec![2, 2], cfg()), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            MultiState::new(CMat::identity(4, 4), vec![2, 3], cfg()),
            Err(Error::DimensionMismatch(_))
        ));
        let mut m = CMat::identity(2, 2);
        m[(0, 1)] = c(0.5);
        assert!(matches!(MultiState::new(m, vec![2], cfg()), Err(Error::NotHermitian(_))));
        let mut m = CMat::identity(2, 2);
        m[(0, 0)] = c(f64::NAN);
        assert!(matches!(MultiState::new(m, vec![2], cfg()), Err(Error::NonFinite(0, 0))));
        let mut m = CMat::identity(2, 2);
        m[(0, 1)] = c(1e-13);
        // tiny asymmetry is symmetrized away
        let s = MultiState::new(m, vec![2], cfg()).unwrap();
        assert_eq!(s.matrix()[(0, 1)], s.matrix()[(1, 0)].conj());
    }

    #[test]
    fn partial_transpose_of_product() {
        let a = CVec::from_vec(vec![C64::new(1.0, 2.0), C64::new(0.5, -1.0)]);
        let b = CVec::from_vec(vec![C64::new(0.3, 0.0), C64::new(-1.0, 0.7), C64::new(0.0, 1.0)]);
        let v = a.kronecker(&b);
        let s = MultiState::new(&v * v.adjoint(), vec![2, 3], cfg()).unwrap();
        let t = s.partial_transpose(SubsetMask::from_parties(&[1]).unwrap()).unwrap();
        let w = a.conjugate().kronecker(&b);
        assert!((t.matrix() - &w * w.adjoint()).norm() < 1e-14);
        assert_eq!(s.partial_transpose(SubsetMask::EMPTY).unwrap(), s);
    }

    #[test]
    fn full_transpose_of_real_symmetric_is_identity_map() {
        let m = CMat::from_fn(6, 6, |r, cc| c(((r + 1) * (cc + 1)) as f64 + if r == cc { 10.0 } else { 0.0 }));
        let s = MultiState::new(m, vec![2, 3], cfg()).unwrap();
        let t = s.partial_transpose(SubsetMask::full(2)).unwrap();
        assert_eq!(t.matrix(), s.matrix());
    }

    #[test]
    fn ghz_marginal() {
        let v = ket(&[2, 2, 2], &[0, 0, 0]) + ket(&[2, 2, 2], &[1, 1, 1]);
        let s = MultiState::new(&v * v.adjoint(), vec![2, 2, 2], cfg()).unwrap();
        let r = s.reduced_state(SubsetMask::from_parties(&[1]).unwrap()).unwrap();
        assert_eq!(r.dims(), &[2]);
        assert!((r.matrix() - CMat::identity(2, 2)).norm() < 1e-15);
        let all = s.reduced_state(SubsetMask::full(3)).unwrap();
        assert_eq!(all.matrix(), s.matrix());
        assert_eq!(s.reduced_state(SubsetMask::EMPTY), Err(Error::EmptySubset));
    }

    #[test]
    fn reduced_state_of_product_is_factor() {
        let a = CVec::from_vec(vec![c(1.0), C64::new(0.0, 1.0)]);
        let b = CVec::from_vec(vec![c(2.0), c(0.0), c(1.0)]);
        let v = a.kronecker(&b);
        let s = MultiState::new(&v * v.adjoint(), vec![2, 3], cfg()).unwrap();
        let r = s.reduced_state(SubsetMask::from_parties(&[2]).unwrap()).unwrap();
        let expected = &b * b.adjoint() * c(a.norm_squared());
        assert!((r.matrix() - expected).norm() < 1e-14);
    }

    #[test]
    fn spectra() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0), c(3.0)]));
        let s = MultiState::new(m, vec![2], cfg()).unwrap();
        assert_eq!(s.spectral().unwrap().eigenvalues, vec![3.0, 1.0]);
        let s = MultiState::new(CMat::from_element(2, 2, c(1.0)), vec![2], cfg()).unwrap();
        let ev = s.spectral().unwrap().eigenvalues;
        assert!((ev[0] - 2.0).abs() < 1e-14 && ev[1].abs() < 1e-14);
    }

    #[test]
    fn range_and_kernel_partition_the_space() {
        let v = ket(&[2, 3], &[1, 2]) + ket(&[2, 3], &[0, 0]);
        let w = ket(&[2, 3], &[0, 1]);
        let s = MultiState::from_weighted_vectors(&[(1.0, v), (2.0, w)], vec![2, 3], cfg()).unwrap();
        let r = s.range_basis().unwrap();
        let k = s.kernel_basis().unwrap();
        assert_eq!(r.dim() + k.dim(), 6);
        assert_eq!(r.dim(), 2);
        let overlap = r.rows().conjugate() * k.rows().transpose();
        assert!(overlap.norm() < 1e-12);
    }

    #[test]
    fn compress_drops_rank_one_party() {
        // |0⟩⟨0| ⊗ σ, σ a rank-2 two-qutrit state
        let dims = [2, 3, 3];
        let v = ket(&dims, &[0, 0, 0]) + ket(&dims, &[0, 1, 1]) + ket(&dims, &[0, 2, 2]);
        let w = ket(&dims, &[0, 1, 2]);
        let s = MultiState::from_weighted_vectors(&[(1.0, v), (1.0, w)], dims.to_vec(), cfg()).unwrap();
        let comp = s.compress_support().unwrap();
        assert_eq!(comp.dropped, vec![0]);
        assert_eq!(comp.state.dims(), &[3, 3]);
        assert_eq!(comp.state.rank().unwrap(), 2);
        let iso = comp.isometries.iter().fold(CMat::from_element(1, 1, c(1.0)), |a, v| a.kronecker(v));
        let back = &iso * comp.state.matrix() * iso.adjoint();
        assert!((back - s.matrix()).norm() < 1e-12);
    }

    #[test]
    fn compress_all_trivial() {
        let v = ket(&[2, 2], &[1, 0]);
        let s = MultiState::new(&v * v.adjoint(), vec![2, 2], cfg()).unwrap();
        assert!(matches!(s.compress_support(), Err(Error::AllPartiesTrivial)));
    }

    #[test]
    fn subset_mask_helpers() {
        let s = SubsetMask::from_parties(&[1, 3]).unwrap();
        assert_eq!(s.bits(), 0b101);
        assert_eq!(s.parties(), vec![1, 3]);
        assert_eq!(s.complement(3).parties(), vec![2]);
        assert!(s.check(2).is_err());
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3]");
        let back: SubsetMask = serde_json::from_str("[3,1]").unwrap();
        assert_eq!(back, s);
    }
}
