//! Named states and seeded random families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{kron_vectors, CMat, CVec, MultiState, C64};
use crate::tolerance::ToleranceConfig;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn v(xs: &[f64]) -> CVec {
    CVec::from_iterator(xs.len(), xs.iter().map(|&x| c(x)))
}

/// A list of product vectors, each given by its per-party factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductBasisSpec {
    pub dims: Vec<usize>,
    #[serde(with = "crate::serde_util::cvec_lists")]
    pub vectors: Vec<Vec<CVec>>,
}

impl ProductBasisSpec {
    pub fn assembled(&self) -> Result<Vec<CVec>> {
        self.vectors
            .iter()
            .map(|fs| {
                if fs.len() != self.dims.len() || fs.iter().zip(&self.dims).any(|(f, &d)| f.len() != d) {
                    return Err(Error::DimensionMismatch("factor lengths do not match dims".into()));
                }
                Ok(kron_vectors(fs))
            })
            .collect()
    }
}

/// The three-qubit UPB `|000⟩, |+,1,−⟩, |1,−,+⟩, |−,+,1⟩`.
pub fn shifts_upb() -> ProductBasisSpec {
    let s = 1.0 / 2f64.sqrt();
    let zero = v(&[1.0, 0.0]);
    let one = v(&[0.0, 1.0]);
    let plus = v(&[s, s]);
    let minus = v(&[s, -s]);
    ProductBasisSpec {
        dims: vec![2, 2, 2],
        vectors: vec![
            vec![zero.clone(), zero.clone(), zero],
            vec![plus.clone(), one.clone(), minus.clone()],
            vec![one.clone(), minus.clone(), plus.clone()],
            vec![minus, plus, one],
        ],
    }
}

/// Three-qubit PPT entangled state of rank four:
/// `|+,ψ₁⟩⟨·| + |−,ψ₂⟩⟨·| + |0,ψ₃⟩⟨·| + |1,ψ₄⟩⟨·|`. The four vectors are
/// orthonormal, so this is the projector onto the complement of [`shifts_upb`].
pub fn divincenzo_state() -> MultiState {
    let s = 1.0 / 2f64.sqrt();
    let (r6, r3, r12) = (6f64.sqrt(), 3f64.sqrt(), 12f64.sqrt());
    // amplitudes on |00⟩, |01⟩, |10⟩, |11⟩
    let psi1 = v(&[0.0, 2.0, 1.0, 1.0]) / c(r6);
    let psi2 = v(&[0.0, -1.0, -2.0, 1.0]) / c(r6);
    let psi3 = v(&[0.0, -1.0, 1.0, 1.0]) / c(r3);
    let psi4 = v(&[3.0, -1.0, 1.0, 1.0]) / c(r12);
    let terms = [
        (v(&[s, s]), psi1),
        (v(&[s, -s]), psi2),
        (v(&[1.0, 0.0]), psi3),
        (v(&[0.0, 1.0]), psi4),
    ];
    let weighted: Vec<(f64, CVec)> = terms.iter().map(|(a, p)| (1.0, a.kronecker(p))).collect();
    MultiState::from_weighted_vectors(&weighted, vec![2, 2, 2], ToleranceConfig::default())
        .expect("sum of projectors is a valid state")
}

/// Rows span the range of [`example_ab_state`]; coordinates in the basis
/// `|00⟩, |01⟩, …, |22⟩`.
pub fn example_ab_range_matrix(a: C64, b: C64) -> CMat {
    let (o, z) = (c(1.0), c(0.0));
    CMat::from_row_slice(
        4,
        9,
        &[
            o, z, z, z, a, z, z, z, z, //
            z, a, z, o, z, z, z, b, z, //
            z, z, z, z, o, z, b, z, o, //
            z, z, z, z, z, o, z, o, z,
        ],
    )
}

/// Two-qutrit PPT state of rank four, entangled exactly when `ab ≠ 0`:
/// `Σ|ψ_i⟩⟨ψ_i|` with `ψ₁ = |00⟩+a|11⟩`, `ψ₂ = a|01⟩+|10⟩+b|21⟩`,
/// `ψ₃ = |11⟩+b|20⟩+|22⟩`, `ψ₄ = |12⟩+|21⟩`.
pub fn example_ab_state(a: C64, b: C64) -> MultiState {
    let r = example_ab_range_matrix(a, b);
    let terms: Vec<(f64, CVec)> = r.row_iter().map(|row| (1.0, row.transpose())).collect();
    MultiState::from_weighted_vectors(&terms, vec![3, 3], ToleranceConfig::default())
        .expect("sum of projectors is a valid state")
}

/// `P / dim(span^⊥)` where `P` projects onto the orthocomplement of the
/// span of the given product vectors. Unextendibility is not checked.
pub fn upb_complement_state(spec: &ProductBasisSpec) -> Result<MultiState> {
    let vecs = spec.assembled()?;
    let d: usize = spec.dims.iter().product();
    if vecs.is_empty() {
        return Err(Error::DependentVectors);
    }
    let m = CMat::from_columns(&vecs);
    let svd = m.clone().svd(true, false);
    let smax = svd.singular_values.max();
    if svd.singular_values.iter().any(|&s| s <= 1e-10 * smax) {
        return Err(Error::DependentVectors);
    }
    let comp_dim = d - vecs.len();
    if comp_dim == 0 {
        return Err(Error::DegenerateComplement);
    }
    let q = m.qr().q();
    let p = CMat::identity(d, d) - &q * q.adjoint();
    MultiState::new(p / c(comp_dim as f64), spec.dims.clone(), ToleranceConfig::default())
}

pub fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) / c(2f64.sqrt())
}

pub fn random_vector<R: Rng>(d: usize, rng: &mut R) -> CVec {
    CVec::from_fn(d, |_, _| complex_gaussian(rng))
}

pub fn random_unit_vector<R: Rng>(d: usize, rng: &mut R) -> CVec {
    random_vector(d, rng).normalize()
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase of `R` removed).
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let ph = rjj / rjj.norm();
            let col = q.column(j) * ph;
            q.set_column(j, &col);
        }
    }
    q
}

/// `U₁ ⊗ … ⊗ U_n` with independent Haar-random factors.
pub fn random_local_unitary<R: Rng>(dims: &[usize], rng: &mut R) -> CMat {
    dims.iter()
        .fold(CMat::from_element(1, 1, c(1.0)), |acc, &d| acc.kronecker(&random_unitary(d, rng)))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random product vector with unit-norm Gaussian factors.
pub fn random_product_factors<R: Rng>(dims: &[usize], rng: &mut R) -> Vec<CVec> {
    dims.iter().map(|&d| random_unit_vector(d, rng)).collect()
}

/// Sum of `terms` random pure product states.
pub fn random_separable(dims: &[usize], terms: usize, seed: u64) -> Result<MultiState> {
    let mut rng = seeded_rng(seed);
    let vecs: Vec<(f64, CVec)> =
        (0..terms).map(|_| (1.0, kron_vectors(&random_product_factors(dims, &mut rng)))).collect();
    MultiState::from_weighted_vectors(&vecs, dims.to_vec(), ToleranceConfig::default())
}

/// [`example_ab_state`] with random nonzero real `(a, b)` under a random
/// local unitary. Returns the parameters alongside the state.
///
/// The parameters are real because the state is NPT for most complex ones.
pub fn random_ppt_rank4_33_with_params(seed: u64) -> (MultiState, C64, C64) {
    let mut rng = seeded_rng(seed);
    let nonzero = |rng: &mut ChaCha8Rng| loop {
        let x: f64 = rng.sample(StandardNormal);
        if x.abs() > 0.25 {
            break c(1.5 * x);
        }
    };
    let a = nonzero(&mut rng);
    let b = nonzero(&mut rng);
    let u = random_local_unitary(&[3, 3], &mut rng);
    let state = example_ab_state(a, b).conjugated(&u).expect("dimensions agree");
    (state, a, b)
}

pub fn random_ppt_rank4_33(seed: u64) -> MultiState {
    random_ppt_rank4_33_with_params(seed).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SubsetMask;

    #[test]
    fn divincenzo_annihilates_upb() {
        let rho = divincenzo_state();
        let spec = rho.spectral().unwrap();
        assert_eq!(rho.rank().unwrap(), 4);
        for l in &spec.eigenvalues[..4] {
            assert!((l - 1.0).abs() < 1e-12);
        }
        for u in shifts_upb().assembled().unwrap() {
            assert!((rho.matrix() * &u).norm() <= 1e-12 * spec.lambda_max());
        }
        assert_eq!(rho.local_ranks().unwrap(), vec![2, 2, 2]);
    }

    #[test]
    fn upb_complement_matches_divincenzo() {
        let comp = upb_complement_state(&shifts_upb()).unwrap();
        let diff = comp.matrix() * c(4.0) - divincenzo_state().matrix();
        assert!(diff.norm() < 1e-12);
    }

    #[test]
    fn complement_edge_cases() {
        let e = |i: usize| {
            let mut x = CVec::zeros(2);
            x[i] = c(1.0);
            x
        };
        let full = ProductBasisSpec {
            dims: vec![2, 2],
            vectors: (0..4).map(|i| vec![e(i / 2), e(i % 2)]).collect(),
        };
        assert!(matches!(upb_complement_state(&full), Err(Error::DegenerateComplement)));
        let two = ProductBasisSpec { dims: vec![2, 2], vectors: vec![vec![e(0), e(0)], vec![e(1), e(1)]] };
        let s = upb_complement_state(&two).unwrap();
        assert_eq!(s.rank().unwrap(), 2);
        assert!((s.trace() - 1.0).abs() < 1e-12);
        let dep = ProductBasisSpec { dims: vec![2, 2], vectors: vec![vec![e(0), e(0)], vec![e(0), e(0)]] };
        assert!(matches!(upb_complement_state(&dep), Err(Error::DependentVectors)));
    }

    #[test]
    fn example_state_range_is_row_space() {
        let (a, b) = (C64::new(0.7, -0.2), c(1.3));
        let rho = example_ab_state(a, b);
        assert_eq!(rho.rank().unwrap(), 4);
        let r = example_ab_range_matrix(a, b);
        let p = rho.range_basis().unwrap().projector();
        for row in r.row_iter() {
            let x = row.transpose();
            assert!((&x - &p * &x).norm() <= 1e-10 * x.norm());
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded_rng(3);
        let u = random_unitary(4, &mut rng);
        assert!((u.adjoint() * &u - CMat::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn random_separable_is_seed_deterministic() {
        let a = random_separable(&[2, 3], 2, 9).unwrap();
        let b = random_separable(&[2, 3], 2, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rank().unwrap(), 2);
        let pt = a.partial_transpose(SubsetMask::from_bits(1)).unwrap();
        assert!(pt.spectral().unwrap().lambda_min() > -1e-12);
    }
}
