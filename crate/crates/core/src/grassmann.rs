//! Plücker coordinates of subspaces.

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{CMat, C64};

/// A `k × d` coordinate matrix whose rows span a subspace of `H_1 ⊗ … ⊗ H_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    rows: CMat,
    dims: Vec<usize>,
}

impl SubspaceBasis {
    /// Checks that the rows are linearly independent: the smallest singular
    /// value must exceed `tol_rank` times the largest.
    pub fn new(rows: CMat, dims: Vec<usize>, tol_rank: f64) -> Result<Self> {
        let d: usize = dims.iter().product();
        if rows.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "basis rows have length {}, dims {dims:?} need {d}",
                rows.ncols()
            )));
        }
        if rows.nrows() > d {
            return Err(Error::RankDeficientBasis);
        }
        if rows.nrows() > 0 {
            let s = SVD::new(rows.clone(), false, false).singular_values;
            let max = s.max();
            let min = s.min();
            if !(max > 0.0) || min <= tol_rank * max {
                return Err(Error::RankDeficientBasis);
            }
        }
        Ok(SubspaceBasis { rows, dims })
    }

    pub(crate) fn from_orthonormal(rows: CMat, dims: Vec<usize>) -> Self {
        SubspaceBasis { rows, dims }
    }

    pub fn rows(&self) -> &CMat {
        &self.rows
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Dimension of the subspace (number of rows).
    pub fn dim(&self) -> usize {
        self.rows.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.rows.ncols()
    }

    /// Rows of an orthonormal basis of the same subspace.
    pub fn orthonormalized(&self) -> CMat {
        // QR of the transpose: columns of Q span the same space as the rows
        let qr = self.rows.transpose().qr();
        qr.q().transpose()
    }

    /// Orthogonal projector onto the subspace, acting on column vectors.
    pub fn projector(&self) -> CMat {
        let q = self.orthonormalized();
        // rows of q are coordinate vectors u_j; P = Σ u_j u_j†
        q.transpose() * q.conjugate()
    }

    /// Distance of `v` from the subspace relative to `‖v‖`.
    pub fn membership_residual(&self, v: &crate::tensor::CVec) -> f64 {
        let p = self.projector();
        (v - &p * v).norm() / v.norm()
    }
}

/// Maximal minors of a basis matrix, indexed by increasing column tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct PlueckerVector {
    k: usize,
    d: usize,
    entries: Vec<C64>,
    normalized: Vec<C64>,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Position of a strictly increasing 0-based tuple in the lexicographic
/// enumeration of `k`-subsets of `0..d`.
pub(crate) fn tuple_rank(tuple: &[usize], d: usize) -> usize {
    let k = tuple.len();
    let mut rank = 0;
    let mut prev = 0;
    for (i, &c) in tuple.iter().enumerate() {
        for x in prev..c {
            rank += binomial(d - 1 - x, k - 1 - i);
        }
        prev = c + 1;
    }
    rank
}

impl PlueckerVector {
    /// Builds a vector from entries listed in lexicographic tuple order.
    pub fn from_entries(k: usize, d: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != binomial(d, k) {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for G({k},{d}), need {}",
                entries.len(),
                binomial(d, k)
            )));
        }
        let normalized = normalize(&entries);
        Ok(PlueckerVector { k, d, entries, normalized })
    }

    /// Builds a vector from 1-based tuple/value pairs; unlisted tuples are zero.
    pub fn from_map(k: usize, d: usize, values: &[(Vec<usize>, C64)]) -> Result<Self> {
        let mut entries = vec![C64::new(0.0, 0.0); binomial(d, k)];
        for (t, v) in values {
            let zero: Vec<usize> = check_tuple(t, k, d)?;
            entries[tuple_rank(&zero, d)] = *v;
        }
        Self::from_entries(k, d, entries)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Copy with unit mean-square modulus and the first nonzero entry real
    /// and positive.
    pub fn normalized(&self) -> &[C64] {
        &self.normalized
    }

    /// All tuples (1-based) in storage order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> {
        (1..=self.d).combinations(self.k)
    }

    /// Raw coordinate for a strictly increasing 1-based tuple.
    pub fn get(&self, tuple: &[usize]) -> Result<C64> {
        let zero = check_tuple(tuple, self.k, self.d)?;
        Ok(self.entries[tuple_rank(&zero, self.d)])
    }

    /// Coordinate for an arbitrary 1-based index sequence, using antisymmetry.
    pub fn signed_get(&self, seq: &[usize], normalized: bool) -> C64 {
        let src = if normalized { &self.normalized } else { &self.entries };
        match sort_with_sign(seq) {
            None => C64::new(0.0, 0.0),
            Some((sign, sorted)) => {
                let zero: Vec<usize> = sorted.iter().map(|&i| i - 1).collect();
                src[tuple_rank(&zero, self.d)] * sign as f64
            }
        }
    }

    /// JSON map `"i1,…,ik" → [re, im]`.
    pub fn to_json_map(&self) -> BTreeMap<String, [f64; 2]> {
        self.tuples()
            .zip(&self.entries)
            .map(|(t, z)| (t.iter().map(|i| i.to_string()).join(","), [z.re, z.im]))
            .collect()
    }

    pub fn from_json_map(k: usize, d: usize, map: &BTreeMap<String, [f64; 2]>) -> Result<Self> {
        let mut values = Vec::with_capacity(map.len());
        for (key, [re, im]) in map {
            let t = key
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{key}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            values.push((t, C64::new(*re, *im)));
        }
        Self::from_map(k, d, &values)
    }
}

fn check_tuple(t: &[usize], k: usize, d: usize) -> Result<Vec<usize>> {
    if t.len() != k {
        return Err(Error::ShapeMismatch(format!("tuple {t:?} has length {}, expected {k}", t.len())));
    }
    for (i, &x) in t.iter().enumerate() {
        if x == 0 || x > d {
            return Err(Error::IndexOutOfRange(x, d));
        }
        if i > 0 && t[i - 1] >= x {
            return Err(Error::ShapeMismatch(format!("tuple {t:?} is not strictly increasing")));
        }
    }
    Ok(t.iter().map(|&x| x - 1).collect())
}

/// Scales to Euclidean norm `√N` over the `N` coordinates (unit mean
/// square) and rotates the first nonzero entry to the positive real axis.
/// Unitary changes of the ambient space keep this scaling, so `|F|` on it is
/// invariant under local unitaries; unit norm would push degree-6 forms on
/// generic subspaces down towards rounding noise.
fn normalize(entries: &[C64]) -> Vec<C64> {
    let norm = entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return entries.to_vec();
    }
    let max = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = entries.iter().find(|z| z.norm() > 1e-12 * max).copied().unwrap_or(C64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    let scale = (entries.len() as f64).sqrt() / norm;
    entries.iter().map(|z| z * phase * scale).collect()
}

/// Sorts a sequence, returning the permutation sign, or `None` on a repeat.
pub(crate) fn sort_with_sign(seq: &[usize]) -> Option<(i8, Vec<usize>)> {
    let mut v = seq.to_vec();
    let mut sign = 1i8;
    // insertion sort, counting swaps
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// Computes every maximal minor of the basis matrix.
pub fn pluecker(basis: &SubspaceBasis) -> Result<PlueckerVector> {
    let k = basis.dim();
    let d = basis.ambient_dim();
    if k == 0 || k > d {
        return Err(Error::RankDeficientBasis);
    }
    let rows = basis.rows();
    let entries: Vec<C64> = (0..d)
        .combinations(k)
        .map(|cols| rows.select_columns(cols.iter()).determinant())
        .collect();
    if entries.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::RankDeficientBasis);
    }
    PlueckerVector::from_entries(k, d, entries)
}

/// Largest absolute residual of the quadratic Plücker relations
/// `Σ_l (-1)^l p(I, j_l) p(J \ j_l) = 0` over all `(k-1)`-subsets `I` and
/// `(k+1)`-subsets `J`, evaluated on the vector scaled to largest modulus 1.
pub fn pluecker_relations_residual(p: &PlueckerVector) -> f64 {
    let (k, d) = (p.k(), p.d());
    if k <= 1 || k + 1 > d {
        return 0.0;
    }
    let max = p.normalized().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for small in (1..=d).combinations(k - 1) {
        for big in (1..=d).combinations(k + 1) {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..=k {
                let mut left = small.clone();
                left.push(big[l]);
                let right: Vec<usize> = big.iter().enumerate().filter(|&(i, _)| i != l).map(|(_, &x)| x).collect();
                let term = p.signed_get(&left, true) * p.signed_get(&right, true);
                if l % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            worst = worst.max(acc.norm());
        }
    }
    worst / (max * max)
}

/// Dual coordinate index translation: `q_{r_1…r_m} = ε p_{r'}` where `r'` is
/// the increasing complement of `{r_i}` in `1..=ambient` and `ε` is the sign
/// of the permutation `r'_1 … r'_s r_1 … r_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualIndex {
    pub sign: i8,
    pub complement: Vec<usize>,
}

pub fn dual_pluecker(q_index: &[usize], ambient: usize) -> Result<DualIndex> {
    let mut seen = vec![false; ambient + 1];
    for &r in q_index {
        if r == 0 || r > ambient {
            return Err(Error::IndexOutOfRange(r, ambient));
        }
        if seen[r] {
            return Err(Error::DuplicateIndex(r));
        }
        seen[r] = true;
    }
    let complement: Vec<usize> = (1..=ambient).filter(|&i| !seen[i]).collect();
    let concat: Vec<usize> = complement.iter().chain(q_index).copied().collect();
    let inversions = (0..concat.len())
        .flat_map(|i| (i + 1..concat.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| concat[i] > concat[j])
        .count();
    Ok(DualIndex { sign: if inversions % 2 == 0 { 1 } else { -1 }, complement })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn tuple_rank_matches_enumeration() {
        for (i, t) in (0..7).combinations(3).enumerate() {
            assert_eq!(tuple_rank(&t, 7), i);
        }
    }

    #[test]
    fn coordinate_subspace() {
        let rows = CMat::from_fn(4, 9, |r, col| if r == col { c(1.0) } else { c(0.0) });
        let b = SubspaceBasis::new(rows, vec![3, 3], 1e-9).unwrap();
        let p = pluecker(&b).unwrap();
        assert_eq!(p.get(&[1, 2, 3, 4]).unwrap(), c(1.0));
        let nonzero = p.entries().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn scaling_a_row_scales_all_entries() {
        let rows = CMat::from_fn(2, 4, |r, col| C64::new((r * 4 + col) as f64 % 3.0 + 0.5, col as f64 - r as f64));
        let b = SubspaceBasis::new(rows.clone(), vec![2, 2], 1e-9).unwrap();
        let mut scaled = rows;
        scaled.row_mut(0).scale_mut(2.0);
        let b2 = SubspaceBasis::new(scaled, vec![2, 2], 1e-9).unwrap();
        let (p, p2) = (pluecker(&b).unwrap(), pluecker(&b2).unwrap());
        for (x, y) in p.entries().iter().zip(p2.entries()) {
            assert!((x * 2.0 - y).norm() < 1e-13);
        }
        assert!(pluecker_relations_residual(&p) < 1e-12);
    }

    #[test]
    fn dependent_rows_rejected() {
        let rows = CMat::from_fn(2, 4, |_, col| c(col as f64));
        assert!(matches!(SubspaceBasis::new(rows, vec![2, 2], 1e-9), Err(Error::RankDeficientBasis)));
    }

    #[test]
    fn non_decomposable_vector_violates_relation() {
        let p = PlueckerVector::from_map(2, 4, &[(vec![1, 2], c(1.0)), (vec![3, 4], c(1.0))]).unwrap();
        assert!((pluecker_relations_residual(&p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn signed_lookup_uses_antisymmetry() {
        let p = PlueckerVector::from_map(2, 3, &[(vec![1, 2], c(3.0))]).unwrap();
        assert_eq!(p.signed_get(&[2, 1], false), c(-3.0));
        assert_eq!(p.signed_get(&[1, 1], false), c(0.0));
    }

    #[test]
    fn dual_index_examples() {
        assert_eq!(dual_pluecker(&[1, 2, 3], 4).unwrap(), DualIndex { sign: -1, complement: vec![4] });
        assert_eq!(dual_pluecker(&[2, 3, 4], 4).unwrap(), DualIndex { sign: 1, complement: vec![1] });
        assert_eq!(dual_pluecker(&[1, 1, 3], 4), Err(Error::DuplicateIndex(1)));
        assert_eq!(dual_pluecker(&[1, 5, 3], 4), Err(Error::IndexOutOfRange(5, 4)));
        // swapping two q-indices leaves the complement alone and flips ε
        let a = dual_pluecker(&[1, 3, 4], 6).unwrap();
        let b = dual_pluecker(&[3, 1, 4], 6).unwrap();
        assert_eq!(a.complement, b.complement);
        assert_eq!(a.sign, -b.sign);
    }

    #[test]
    fn json_map_roundtrip() {
        let p = PlueckerVector::from_map(2, 4, &[(vec![1, 3], C64::new(1.0, -2.0)), (vec![2, 4], c(0.5))]).unwrap();
        let m = p.to_json_map();
        assert_eq!(m["1,3"], [1.0, -2.0]);
        let back = PlueckerVector::from_json_map(2, 4, &m).unwrap();
        assert_eq!(back, p);
    }
}
