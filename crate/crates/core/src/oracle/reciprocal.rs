//! Kernel product vectors of a three-qubit PPT entangled state of rank four
//! with respect to a one-versus-two cut.
//!
//! Across the cut `A_c : rest` the range is spanned by exactly four vectors
//! `|a_i⟩⊗|ψ_i⟩`. They are found as the zeros of `det N(u)`, where
//! `N(u)_{l,j} = (u† R_j)_l` and `R_j` is the 2×4 reshaping of the `j`-th
//! range vector: `u ⊥ a_i` makes `N(u)` singular. With `{ψ'_i}` the basis
//! reciprocal to `{ψ_i}`, the vectors `|a_i^⊥⟩⊗|ψ'_i⟩` lie in the kernel.

use nalgebra::SVD;

use super::poly::{circle_points, interpolate_on_circle, min_separation, roots};
use super::restart_rng;
use crate::chow::subspace_meets_segre;
use crate::error::{Error, Result};
use crate::gallery::random_unitary;
use crate::ppt::is_ppt;
use crate::product::{flatten, leading_left_singular};
use crate::tensor::{inverse_order, permute_parties, CMat, CVec, MultiState, C64};

/// `N` as a function of `ū`, which keeps `det N` a polynomial.
fn n_matrix(flats: &[CMat], u_bar: &CVec) -> CMat {
    CMat::from_fn(4, 4, |l, j| (0..2).map(|p| u_bar[p] * flats[j][(p, l)]).sum())
}

/// Four kernel vectors `|a_i^⊥⟩⊗|ψ'_i⟩` for the cut separating party `cut`
/// (1-based) from the other two, in the original party order.
pub fn bipartite_kernel_product_vectors_2x2x2(rho: &MultiState, cut: usize) -> Result<Vec<CVec>> {
    if rho.dims() != [2, 2, 2] {
        return Err(Error::NotApplicable(format!("dims {:?} are not [2, 2, 2]", rho.dims())));
    }
    if !(1..=3).contains(&cut) {
        return Err(Error::NotApplicable(format!("cut {cut} is not a party of three")));
    }
    let cfg = *rho.config();
    if rho.rank()? != 4 {
        return Err(Error::NotApplicable("rank is not four".into()));
    }
    if !is_ppt(rho)?.is_ppt {
        return Err(Error::NotApplicable("state is not PPT".into()));
    }
    if subspace_meets_segre(&rho.range_basis()?, cfg.tol_chow)?.meets {
        return Err(Error::NotApplicable("range contains a product vector".into()));
    }

    let mut order = vec![cut - 1];
    order.extend((0..3).filter(|&p| p != cut - 1));
    let sigma = rho.permuted(&order)?;
    let range = sigma.range_basis()?;
    let rows = range.rows();
    let flats: Vec<CMat> = (0..4).map(|j| flatten(&rows.row(j).transpose(), &[2, 2, 2], 0)).collect();
    let lambda_max = sigma.spectral()?.lambda_max();

    let mut last_err = String::new();
    for attempt in 0..3 {
        let g = random_unitary(2, &mut restart_rng(0x5eed, attempt));
        let u_bar_of = |t: C64| &g * CVec::from_vec(vec![C64::new(1.0, 0.0), t]);
        let vals: Vec<C64> = circle_points(8)
            .iter()
            .map(|&t| n_matrix(&flats, &u_bar_of(t)).determinant())
            .collect();
        let coeffs = interpolate_on_circle(&vals);
        let max = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if coeffs[5..].iter().any(|z| z.norm() > 1e-8 * max) {
            last_err = "determinant exceeds degree four".into();
            continue;
        }
        let Some(ts) = roots(&coeffs[..5]) else {
            last_err = "companion eigenvalues did not converge".into();
            continue;
        };
        if ts.len() != 4 || min_separation(&ts) < 1e-6 {
            last_err = format!("expected four distinct roots, got {}", ts.len());
            continue;
        }
        let mut perp = Vec::new();
        let mut psis = Vec::new();
        for &t in &ts {
            let u_bar = u_bar_of(t).normalize();
            let svd = SVD::new(n_matrix(&flats, &u_bar), false, true);
            let s = &svd.singular_values;
            let imin = (0..4).min_by(|&a, &b| s[a].total_cmp(&s[b])).expect("four values");
            let coef: CVec = svd.v_t.as_ref().expect("requested V").row(imin).adjoint();
            let v: CVec = rows.transpose() * coef;
            let m = flatten(&v, &[2, 2, 2], 0);
            let a = leading_left_singular(&m);
            let psi: CVec = m.adjoint() * &a;
            perp.push(u_bar.conjugate());
            psis.push(psi.conjugate());
        }
        let psi_mat = CMat::from_columns(&psis);
        let Some(inv) = psi_mat.clone().try_inverse() else {
            last_err = "range factors are linearly dependent".into();
            continue;
        };
        let reciprocal = inv.adjoint();
        let back = inverse_order(&order);
        let kernel: Vec<CVec> = (0..4)
            .map(|i| {
                let k = perp[i].kronecker(&reciprocal.column(i).into_owned()).normalize();
                permute_parties(&k, &[2, 2, 2], &back)
            })
            .collect();
        let worst = kernel.iter().map(|k| (rho.matrix() * k).norm()).fold(0.0, f64::max);
        if worst > 1e-8 * lambda_max {
            last_err = format!("kernel residual {worst:.2e}");
            continue;
        }
        return Ok(kernel);
    }
    Err(Error::DegenerateConfiguration(last_err))
}
