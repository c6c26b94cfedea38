//! Product-vector recognition via single-party flattenings.

use nalgebra::SVD;

use crate::error::{Error, Result};
use crate::tensor::{digits, strides, CMat, CVec};

/// Reshapes `v` into a `d_party × (d / d_party)` matrix. Columns enumerate
/// the remaining parties in their original order.
pub fn flatten(v: &CVec, dims: &[usize], party: usize) -> CMat {
    let d: usize = dims.iter().product();
    let dp = dims[party];
    let rest = d / dp;
    let mut out = CMat::zeros(dp, rest);
    // column index: flat index with the party digit removed
    let rest_dims: Vec<usize> = dims.iter().enumerate().filter(|&(i, _)| i != party).map(|(_, &x)| x).collect();
    let rest_st = strides(&rest_dims);
    for idx in 0..d {
        let dg = digits(idx, dims);
        let mut col = 0;
        let mut k = 0;
        for (i, &x) in dg.iter().enumerate() {
            if i != party {
                col += x * rest_st[k];
                k += 1;
            }
        }
        out[(dg[party], col)] = v[idx];
    }
    out
}

/// Inverse of [`flatten`].
pub fn unflatten(m: &CMat, dims: &[usize], party: usize) -> CVec {
    let d: usize = dims.iter().product();
    let rest_dims: Vec<usize> = dims.iter().enumerate().filter(|&(i, _)| i != party).map(|(_, &x)| x).collect();
    let rest_st = strides(&rest_dims);
    let mut out = CVec::zeros(d);
    for idx in 0..d {
        let dg = digits(idx, dims);
        let mut col = 0;
        let mut k = 0;
        for (i, &x) in dg.iter().enumerate() {
            if i != party {
                col += x * rest_st[k];
                k += 1;
            }
        }
        out[idx] = m[(dg[party], col)];
    }
    out
}

/// Singular values of a matrix, descending.
pub(crate) fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `max_i σ₂/σ₁` over the single-party flattenings; zero for exact products.
pub fn product_residual(v: &CVec, dims: &[usize]) -> f64 {
    (0..dims.len())
        .filter(|&i| dims[i] > 1)
        .map(|i| {
            let s = singular_values(&flatten(v, dims, i));
            if s.len() < 2 || s[0] == 0.0 {
                0.0
            } else {
                s[1] / s[0]
            }
        })
        .fold(0.0, f64::max)
}

/// Leading left singular vector of `m`, unit norm.
pub(crate) fn leading_left_singular(m: &CMat) -> CVec {
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("requested U");
    let (best, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |(bi, bv), (i, &s)| if s > bv { (i, s) } else { (bi, bv) });
    u.column(best).into_owned()
}

/// Splits `v` into per-party factors by peeling off leading singular vectors
/// party by party. The norm and global phase end up in the last factor.
pub fn extract_factors(v: &CVec, dims: &[usize]) -> Vec<CVec> {
    let mut rest = v.clone();
    let mut rest_dims = dims.to_vec();
    let mut factors = Vec::with_capacity(dims.len());
    while rest_dims.len() > 1 {
        let m = flatten(&rest, &rest_dims, 0);
        let u = leading_left_singular(&m);
        let u = fix_phase(u);
        // contract the first index with ū
        let next = m.adjoint() * &u;
        rest = next.conjugate();
        factors.push(u);
        rest_dims.remove(0);
    }
    factors.push(rest);
    factors
}

/// Rotates the phase so the largest-magnitude entry is real and positive.
pub(crate) fn fix_phase(mut u: CVec) -> CVec {
    if let Some(big) = u.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        if big.norm() > 0.0 {
            let ph = big.conj() / big.norm();
            u *= ph;
        }
    }
    u
}

/// Outcome of [`is_product`].
#[derive(Debug, Clone)]
pub struct ProductCheck {
    pub is_product: bool,
    pub residual: f64,
    /// Present when `is_product` holds; their tensor product reproduces `v`.
    pub factors: Option<Vec<CVec>>,
}

/// Decides whether `v` is a product vector for `dims` within `tol`
/// (second singular value of every flattening at most `tol · ‖v‖`).
pub fn is_product(v: &CVec, dims: &[usize], tol: f64) -> Result<ProductCheck> {
    let d: usize = dims.iter().product();
    if v.len() != d {
        return Err(Error::DimensionMismatch(format!("vector of length {} for dims {dims:?}", v.len())));
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut worst = 0.0f64;
    for i in 0..dims.len() {
        if dims[i] == 1 {
            continue;
        }
        let s = singular_values(&flatten(v, dims, i));
        if s.len() > 1 {
            worst = worst.max(s[1] / norm);
        }
    }
    let ok = worst <= tol;
    Ok(ProductCheck {
        is_product: ok,
        residual: worst,
        factors: ok.then(|| extract_factors(v, dims)),
    })
}
