//! Chow-free cross-checks: numerical product-vector search, algebraic
//! counting of product vectors in 3⊗3 kernels, the reciprocal-basis
//! construction for three qubits, and greedy separable decompositions.

mod decompose;
mod kernel33;
mod poly;
mod reciprocal;
pub(crate) mod search;

use itertools::Itertools;
use nalgebra::SVD;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grassmann::SubspaceBasis;
use crate::product::{extract_factors, product_residual};
use crate::tensor::{CVec, SubsetMask, C64};

pub use decompose::{greedy_decompose, Decomposition, DecompositionTerm};
pub use kernel33::count_kernel_product_vectors_3x3;
pub use reciprocal::bipartite_kernel_product_vectors_2x2x2;

use search::{Frame, ProductSearch};

/// Default number of random restarts for [`find_product_vector`].
pub const DEFAULT_RESTARTS: usize = 200;

/// A product vector found inside a subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductVectorHit {
    /// Coordinates with respect to the rows of the searched basis.
    pub coefficients: Vec<C64>,
    /// The unit vector itself.
    #[serde(with = "crate::serde_util::cvec")]
    pub vector: CVec,
    #[serde(with = "crate::serde_util::cvecs")]
    pub factors: Vec<CVec>,
    /// Largest `σ₂/σ₁` over the single-party flattenings.
    pub residual: f64,
}

/// Per-restart generator: restarts are independent streams of one seed.
pub(crate) fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Expresses `v` in the (not necessarily orthonormal) rows of `basis`.
fn coefficients_in(basis: &SubspaceBasis, v: &CVec) -> Vec<C64> {
    let bt = basis.rows().transpose();
    let svd = SVD::new(bt, true, true);
    let eps = 1e-14 * svd.singular_values.max();
    svd.solve(v, eps).map(|c| c.iter().copied().collect()).unwrap_or_default()
}

/// Builds a hit from unit factors approximately inside the subspace with
/// projector `p`, projecting the product back onto the subspace.
pub(crate) fn hit_from_factors(basis: &SubspaceBasis, p: &crate::tensor::CMat, factors: &[CVec]) -> Option<ProductVectorHit> {
    let phi = crate::tensor::kron_vectors(factors);
    let x = p * phi;
    let norm = x.norm();
    if norm == 0.0 {
        return None;
    }
    let x = x / C64::new(norm, 0.0);
    let residual = product_residual(&x, basis.dims());
    Some(ProductVectorHit {
        coefficients: coefficients_in(basis, &x),
        factors: extract_factors(&x, basis.dims()),
        vector: x,
        residual,
    })
}

/// Searches the subspace spanned by `basis` for a product vector using
/// `restarts` random starts derived from `seed`. Returns the first restart
/// (in order) whose result has residual `≤ tol_product`. A `None` only says
/// that the search failed, not that the subspace is completely entangled.
pub fn find_product_vector(
    basis: &SubspaceBasis,
    restarts: usize,
    seed: u64,
    tol_product: f64,
) -> Option<ProductVectorHit> {
    let p = basis.projector();
    let search = ProductSearch::new(basis.dims(), vec![Frame { subset: SubsetMask::EMPTY, projector: p.clone() }]);
    (0..restarts).find_map(|r| {
        let cand = search.attempt(&mut restart_rng(seed, r));
        if cand.objective > 1e-6 {
            return None;
        }
        hit_from_factors(basis, &p, &cand.factors).filter(|h| h.residual <= tol_product)
    })
}

/// Checks that for every party `j` and every set of at most `d_j` vectors,
/// their `j`-th factors are linearly independent.
pub fn check_general_position(vectors: &[Vec<CVec>]) -> bool {
    let Some(first) = vectors.first() else { return true };
    let dims: Vec<usize> = first.iter().map(|f| f.len()).collect();
    if vectors.iter().any(|v| v.len() != dims.len() || v.iter().zip(&dims).any(|(f, &d)| f.len() != d)) {
        return false;
    }
    for (party, &dp) in dims.iter().enumerate() {
        let cols: Vec<CVec> = vectors.iter().map(|v| v[party].normalize()).collect();
        for size in 1..=dp.min(cols.len()) {
            for subset in (0..cols.len()).combinations(size) {
                let m = crate::tensor::CMat::from_columns(&subset.iter().map(|&i| cols[i].clone()).collect::<Vec<_>>());
                let s = SVD::new(m, false, false).singular_values;
                if s.min() <= 1e-8 * s.max().max(1.0) {
                    return false;
                }
            }
        }
    }
    true
}

/// Drops vectors equal to an earlier one up to scale.
pub(crate) fn dedup_up_to_scale(hits: Vec<ProductVectorHit>) -> Vec<ProductVectorHit> {
    let mut out: Vec<ProductVectorHit> = Vec::new();
    for h in hits {
        let u = h.vector.normalize();
        if !out.iter().any(|o| o.vector.normalize().dotc(&u).norm() > 1.0 - 1e-8) {
            out.push(h);
        }
    }
    out
}
