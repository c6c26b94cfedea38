//! Product vectors in a five-dimensional subspace of 3⊗3.
//!
//! `|a,b⟩` lies in `K` iff `M(a) b = 0`, where row `j` of the 4×3 matrix
//! `M(a)` is `⟨w_j|a⊗·⟩` for a basis `w_j` of `K^⊥`. Nonzero `b` exists iff
//! all four 3×3 minors of `M(a)` vanish. After a random projective change of
//! coordinates `a = T(x, y, 1)` the minors are plane cubics; a resultant of
//! two of them in `y` leaves a univariate polynomial of degree at most nine
//! whose roots are lifted back and filtered against the other two minors.

use itertools::Itertools;
use nalgebra::SVD;

use super::poly::{circle_points, det3, interpolate_on_circle, min_separation, resultant_cubic, roots, trim, Bivariate};
use super::search::{Frame, ProductSearch};
use super::{dedup_up_to_scale, hit_from_factors, restart_rng, ProductVectorHit};
use crate::error::{Error, Result};
use crate::gallery::random_unitary;
use crate::grassmann::SubspaceBasis;
use crate::tensor::{hermitian_eigen, CMat, CVec, SubsetMask, C64};

const ATTEMPTS: usize = 3;
const CLUSTER: f64 = 1e-6;
// inaccurate roots still land near a true point; polishing settles them
const PREFILTER: f64 = 1e-2;

enum Attempt {
    Count(Vec<ProductVectorHit>),
    Unreliable(String),
}

/// Orthonormal basis of `K^⊥` as columns.
fn complement(p: &CMat) -> CMat {
    let d = p.nrows();
    let q = CMat::identity(d, d) - p;
    let spec = hermitian_eigen(&((&q + q.adjoint()) * C64::new(0.5, 0.0))).expect("9x9 Hermitian eigenproblem");
    let r = spec.eigenvalues.iter().filter(|&&l| l > 0.5).count();
    spec.eigenvectors.columns(0, r).into_owned()
}

/// Evaluates `M(a)`.
fn coefficient_matrix(w: &CMat, a: &CVec) -> CMat {
    CMat::from_fn(w.ncols(), 3, |j, q| (0..3).map(|p| w[(3 * p + q, j)].conj() * a[p]).sum())
}

/// Resultant in `y` of two cubics, as a polynomial in `x` (ascending).
fn resultant_in_x(f: &Bivariate, g: &Bivariate) -> Vec<C64> {
    let pts = circle_points(16);
    let vals: Vec<C64> = pts.iter().map(|&x| resultant_cubic(&f.in_y_at(x), &g.in_y_at(x))).collect();
    interpolate_on_circle(&vals)
}

/// Newton iteration on `f = g = 0`.
fn refine_point(f: &Bivariate, g: &Bivariate, mut x: C64, mut y: C64) -> (C64, C64) {
    let (fx, fy, gx, gy) = (f.dx(), f.dy(), g.dx(), g.dy());
    for _ in 0..8 {
        let (a, b, c, d) = (fx.eval(x, y), fy.eval(x, y), gx.eval(x, y), gy.eval(x, y));
        let det = a * d - b * c;
        if det.norm() == 0.0 {
            break;
        }
        let (fv, gv) = (f.eval(x, y), g.eval(x, y));
        let dx = (d * fv - b * gv) / det;
        let dy = (a * gv - c * fv) / det;
        x -= dx;
        y -= dy;
        if dx.norm() + dy.norm() < 1e-15 * (1.0 + x.norm() + y.norm()) {
            break;
        }
    }
    (x, y)
}

fn attempt(basis: &SubspaceBasis, p: &CMat, w: &CMat, search: &ProductSearch, t: &CMat) -> Attempt {
    // linear forms of M(T(x,y,1))
    let lin = |j: usize, q: usize| {
        let coef = |col: usize| (0..3).map(|p| w[(3 * p + q, j)].conj() * t[(p, col)]).sum::<C64>();
        Bivariate::linear(coef(0), coef(1), coef(2))
    };
    let minors: Vec<Bivariate> = (0..4)
        .map(|skip| {
            let rows: Vec<usize> = (0..4).filter(|&r| r != skip).collect();
            let m = [0, 1, 2].map(|i| [0, 1, 2].map(|q| lin(rows[i], q)));
            det3(&m)
        })
        .collect();
    let mut hits = Vec::new();
    let mut usable = false;
    let mut why = "every pair of minors has a vanishing resultant";
    for (i, j) in (0..4).tuple_combinations() {
        let (f, g) = (&minors[i], &minors[j]);
        let scale = (f.norm() * g.norm()).powi(3);
        if scale == 0.0 {
            continue;
        }
        let res = resultant_in_x(f, g);
        let max = res.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max <= 1e-10 * scale {
            continue;
        }
        if res[10..].iter().any(|z| z.norm() > 1e-8 * max) {
            why = "resultant exceeds degree nine";
            continue;
        }
        let Some(xs) = roots(&trim(&res[..10], 1e-12)) else {
            why = "companion eigenvalues did not converge";
            continue;
        };
        if min_separation(&xs) < CLUSTER {
            why = "resultant roots cluster";
            continue;
        }
        usable = true;
        for &x0 in &xs {
            let Some(ys) = roots(&f.in_y_at(x0)) else { continue };
            for y0 in ys {
                let (x, y) = refine_point(f, g, x0, y0);
                let a = (t * CVec::from_vec(vec![x, y, C64::new(1.0, 0.0)])).normalize();
                let m = coefficient_matrix(w, &a);
                let svd = SVD::new(m, false, true);
                let s = &svd.singular_values;
                let (imin, smin) = s.iter().enumerate().fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
                if smin > PREFILTER * s.max() {
                    continue;
                }
                let b: CVec = svd.v_t.as_ref().expect("requested V").row(imin).adjoint();
                let cand = search.polish(vec![a, b.normalize()]);
                if let Some(hit) = hit_from_factors(basis, p, &cand.factors) {
                    if hit.residual <= 1e-8 && basis.membership_residual(&crate::tensor::kron_vectors(&hit.factors)) <= 1e-8 {
                        hits.push(hit);
                    }
                }
            }
        }
    }
    if usable {
        Attempt::Count(dedup_up_to_scale(hits))
    } else {
        Attempt::Unreliable(why.into())
    }
}

/// All product vectors (up to scale) in a five-dimensional subspace of 3⊗3.
/// Verified hits from three random coordinate changes are pooled; if none of
/// them is numerically reliable the configuration is reported as degenerate.
pub fn count_kernel_product_vectors_3x3(kernel: &SubspaceBasis, seed: u64) -> Result<Vec<ProductVectorHit>> {
    if kernel.dims() != [3, 3] {
        return Err(Error::DimensionMismatch(format!("expected dims [3, 3], got {:?}", kernel.dims())));
    }
    if kernel.dim() != 5 {
        return Err(Error::WrongDimension { expected: 5, got: kernel.dim() });
    }
    let p = kernel.projector();
    let w = complement(&p);
    let search = ProductSearch::new(&[3, 3], vec![Frame { subset: SubsetMask::EMPTY, projector: p.clone() }]);
    let mut found = Vec::new();
    let mut reliable = false;
    let mut reasons = Vec::new();
    for k in 0..ATTEMPTS {
        let t = random_unitary(3, &mut restart_rng(seed, k));
        match attempt(kernel, &p, &w, &search, &t) {
            Attempt::Count(h) => {
                reliable = true;
                found.extend(h);
            }
            Attempt::Unreliable(why) => reasons.push(why),
        }
    }
    if !reliable {
        return Err(Error::DegenerateConfiguration(reasons.join("; ")));
    }
    Ok(dedup_up_to_scale(found))
}
