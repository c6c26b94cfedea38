//! Greedy separable decompositions.
//!
//! Each step looks for a product vector `φ` with `φ^S ∈ R(W^{Γ_S})` for every
//! representative subset `S`, where `W` is what remains of the state, and
//! removes `t|φ⟩⟨φ|` with the largest `t` that keeps every partial transpose
//! of the remainder positive:
//! `t = min_S 1/⟨φ^S|(W^{Γ_S})⁺|φ^S⟩`. The remainder therefore stays PPT.

use serde::{Deserialize, Serialize};

use super::restart_rng;
use super::search::{Frame, ProductSearch};
use crate::ppt::representative_subsets;
use crate::tensor::{hermitian_eigen, kron_vectors, CMat, CVec, MultiState, C64};

const RESTARTS_PER_STEP: usize = 200;
const HITS_PER_STEP: usize = 4;
const SEED_ROUNDS: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    pub weight: f64,
    /// Unit factors, one per party.
    #[serde(with = "crate::serde_util::cvecs")]
    pub factors: Vec<CVec>,
}

/// `ρ ≈ Σ weight · |⊗factors⟩⟨⊗factors|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub terms: Vec<DecompositionTerm>,
    /// Frobenius norm of `ρ − Σ terms`.
    pub residual: f64,
    /// Number of terms, an upper bound on the length of `ρ`.
    pub length_upper_bound: usize,
}

impl Decomposition {
    pub fn reconstruct(&self, d: usize) -> CMat {
        let mut m = CMat::zeros(d, d);
        for t in &self.terms {
            let v = kron_vectors(&t.factors);
            m += &v * v.adjoint() * C64::new(t.weight, 0.0);
        }
        m
    }
}

struct FrameData {
    frame: Frame,
    pinv: CMat,
}

fn frame_data(state: &MultiState, floor: f64) -> Vec<FrameData> {
    representative_subsets(state.n_parties())
        .into_iter()
        .map(|subset| {
            let pt = state.partial_transpose(subset).expect("representative subsets are valid");
            let spec = hermitian_eigen(pt.matrix()).expect("Hermitian eigenproblem");
            let cut = (1e-9 * spec.lambda_max()).max(floor);
            let d = state.dim();
            let mut projector = CMat::zeros(d, d);
            let mut pinv = CMat::zeros(d, d);
            for (k, &l) in spec.eigenvalues.iter().enumerate() {
                if l > cut {
                    let v = spec.eigenvectors.column(k);
                    let outer = v * v.adjoint();
                    projector += &outer;
                    pinv += outer * C64::new(1.0 / l, 0.0);
                }
            }
            FrameData { frame: Frame { subset, projector }, pinv }
        })
        .collect()
}

/// Largest admissible peel weight for unit factors, or `None` if some framed
/// copy of the product leaves the corresponding range.
fn peel_weight(frames: &[FrameData], factors: &[CVec]) -> Option<f64> {
    let mut t = f64::INFINITY;
    for fd in frames {
        let fs: Vec<CVec> = factors
            .iter()
            .enumerate()
            .map(|(i, f)| if fd.frame.subset.contains(i) { f.conjugate() } else { f.clone() })
            .collect();
        let phi = kron_vectors(&fs);
        let outside = (&phi - &fd.frame.projector * &phi).norm();
        if outside > 1e-7 {
            return None;
        }
        let q = phi.dotc(&(&fd.pinv * &phi)).re;
        if q <= 0.0 {
            return None;
        }
        t = t.min(1.0 / q);
    }
    t.is_finite().then_some(t)
}

fn run(rho: &MultiState, max_terms: usize, seed: u64) -> Option<Decomposition> {
    let scale = rho.spectral().ok()?.lambda_max();
    if scale <= 0.0 {
        return None;
    }
    let floor = 1e-11 * scale;
    let trace = rho.trace();
    let d = rho.dim();
    let mut w = rho.matrix().clone();
    let mut terms: Vec<DecompositionTerm> = Vec::new();
    let mut step = 0usize;
    loop {
        let current = MultiState::from_hermitian(w.clone(), rho.dims().to_vec(), *rho.config());
        let spec = current.spectral().ok()?;
        if spec.eigenvalues.iter().all(|&l| l <= floor) {
            break;
        }
        if terms.len() >= max_terms {
            return None;
        }
        let frames = frame_data(&current, floor);
        let search = ProductSearch::new(
            rho.dims(),
            frames
                .iter()
                .map(|f| Frame { subset: f.frame.subset, projector: f.frame.projector.clone() })
                .collect(),
        );
        let mut best: Option<(f64, Vec<CVec>)> = None;
        let mut found = 0;
        for r in 0..RESTARTS_PER_STEP {
            let mut rng = restart_rng(seed.wrapping_add(step as u64 * 0x9e37_79b9), r);
            let cand = search.attempt(&mut rng);
            if cand.objective > 1e-18 {
                continue;
            }
            if let Some(t) = peel_weight(&frames, &cand.factors) {
                found += 1;
                if best.as_ref().is_none_or(|(bt, _)| t > *bt) {
                    best = Some((t, cand.factors));
                }
                if found >= HITS_PER_STEP {
                    break;
                }
            }
        }
        let (t, factors) = best?;
        let phi = kron_vectors(&factors);
        w -= &phi * phi.adjoint() * C64::new(t, 0.0);
        w = (&w + w.adjoint()) * C64::new(0.5, 0.0);
        terms.push(DecompositionTerm { weight: t, factors });
        step += 1;
    }
    let residual = w.norm();
    if residual > 1e-8 * trace {
        return None;
    }
    let length_upper_bound = terms.len();
    let dec = Decomposition { terms, residual, length_upper_bound };
    debug_assert!((dec.reconstruct(d) - rho.matrix()).norm() <= 1e-8 * trace + 1e-12);
    Some(dec)
}

/// Best-effort decomposition of a PPT state into at most `max_terms` pure
/// product states. `None` means the search failed; it says nothing about
/// separability.
pub fn greedy_decompose(rho: &MultiState, max_terms: usize, seed: u64) -> Option<Decomposition> {
    (0..SEED_ROUNDS).find_map(|round| run(rho, max_terms, seed.wrapping_add(round << 40)))
}
