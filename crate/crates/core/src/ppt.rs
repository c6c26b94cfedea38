//! Positivity of partial transposes and biranks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{MultiState, SubsetMask};

/// Spectrum summary of one partial transpose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetRecord {
    pub subset: SubsetMask,
    pub min_eigenvalue: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    pub is_ppt: bool,
    /// One record per `{S, S^c}` pair, `S` never containing the last party.
    pub records: Vec<SubsetRecord>,
    /// Subset with the most negative minimum eigenvalue.
    pub worst_subset: SubsetMask,
}

impl PptReport {
    pub fn record(&self, subset: SubsetMask) -> Option<&SubsetRecord> {
        self.records.iter().find(|r| r.subset == subset)
    }
}

/// Subsets of the first `n-1` parties ordered by size, then lexicographically
/// by their sorted party lists. The empty subset comes first.
pub fn representative_subsets(n: usize) -> Vec<SubsetMask> {
    if n == 0 {
        return vec![SubsetMask::EMPTY];
    }
    let mut out: Vec<SubsetMask> = (0u32..(1u32 << (n - 1))).map(SubsetMask::from_bits).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.parties().cmp(&b.parties())));
    out
}

/// Evaluates every representative partial transpose of `rho`.
pub fn is_ppt(rho: &MultiState) -> Result<PptReport> {
    let cfg = rho.config();
    let lambda_max = rho.spectral()?.lambda_max();
    let cut = -cfg.tol_psd * lambda_max;
    let mut records = Vec::new();
    for subset in representative_subsets(rho.n_parties()) {
        let spec = rho.partial_transpose(subset)?.spectral()?;
        let rank = if lambda_max > 0.0 {
            spec.eigenvalues.iter().filter(|l| l.abs() > cfg.tol_rank * lambda_max).count()
        } else {
            0
        };
        records.push(SubsetRecord { subset, min_eigenvalue: spec.lambda_min(), rank });
    }
    let worst = records
        .iter()
        .min_by(|a, b| a.min_eigenvalue.total_cmp(&b.min_eigenvalue))
        .map(|r| r.subset)
        .unwrap_or(SubsetMask::EMPTY);
    Ok(PptReport { is_ppt: records.iter().all(|r| r.min_eigenvalue >= cut), records, worst_subset: worst })
}

/// `(r(ρ), r(ρ^{Γ_1}))` for a bipartite state.
pub fn birank(rho: &MultiState) -> Result<(usize, usize)> {
    if rho.n_parties() != 2 {
        return Err(Error::NotBipartite(rho.n_parties()));
    }
    let lambda_max = rho.spectral()?.lambda_max();
    let pt = rho.partial_transpose(SubsetMask::from_bits(1))?.spectral()?;
    let tol = rho.config().tol_rank * lambda_max;
    Ok((rho.rank()?, pt.eigenvalues.iter().filter(|l| l.abs() > tol).count()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{divincenzo_state, example_ab_state, random_separable};
    use crate::tensor::{CVec, C64};
    use crate::ToleranceConfig;

    fn ghz() -> MultiState {
        let mut v = CVec::zeros(8);
        v[0] = C64::new(1.0, 0.0);
        v[7] = C64::new(1.0, 0.0);
        MultiState::from_weighted_vectors(&[(1.0, v)], vec![2, 2, 2], ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn subset_order() {
        let got: Vec<Vec<usize>> = representative_subsets(4).iter().map(|s| s.parties()).collect();
        let want: Vec<Vec<usize>> =
            vec![vec![], vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3]];
        assert_eq!(got, want);
        assert_eq!(representative_subsets(1).len(), 1);
    }

    #[test]
    fn separable_states_are_ppt() {
        for seed in 0..5 {
            let rho = random_separable(&[2, 3, 2], 3, seed).unwrap();
            let rep = is_ppt(&rho).unwrap();
            assert!(rep.is_ppt);
            assert_eq!(rep.records.len(), 4);
        }
    }

    #[test]
    fn ghz_is_npt() {
        let rep = is_ppt(&ghz()).unwrap();
        assert!(!rep.is_ppt);
        // the off-diagonal |000⟩⟨111| lands on a 2x2 block [[0,1],[1,0]]
        assert!((rep.record(rep.worst_subset).unwrap().min_eigenvalue + 1.0).abs() < 1e-12);
    }

    #[test]
    fn example_state_is_ppt() {
        let rho = example_ab_state(C64::new(2.0, 0.0), C64::new(0.5, 0.0));
        assert!(is_ppt(&rho).unwrap().is_ppt);
    }

    #[test]
    fn biranks() {
        let rho = example_ab_state(C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        assert_eq!(birank(&rho).unwrap(), (4, 4));
        let prod = random_separable(&[2, 3], 1, 4).unwrap();
        assert_eq!(birank(&prod).unwrap(), (1, 1));
        let dv = divincenzo_state();
        assert!(matches!(birank(&dv), Err(Error::NotBipartite(3))));
        assert_eq!(birank(&dv.regrouped(&[1, 2]).unwrap()).unwrap(), (4, 4));
    }

    #[test]
    fn divincenzo_transposes_have_rank_four() {
        let rep = is_ppt(&divincenzo_state()).unwrap();
        assert!(rep.is_ppt);
        assert!(rep.records.iter().all(|r| r.rank == 4));
    }
}
