//! Numerical search for unit product vectors `φ = a₁⊗…⊗a_n` whose partial
//! conjugates `φ^S` lie in prescribed subspaces, one subspace per frame `S`.
//!
//! The objective `Σ_S (1 − ⟨φ^S|P_S|φ^S⟩)` is decreased by block-coordinate
//! ascent (each factor becomes the top eigenvector of its quadratic form)
//! and then polished by Gauss–Newton on the tangent space of the factors.

use nalgebra::{DMatrix, DVector, SVD};
use rand::Rng;

use crate::gallery::random_unit_vector;
use crate::tensor::{digits, hermitian_eigen, kron_vectors, CMat, CVec, SubsetMask, C64};

pub(crate) struct Frame {
    pub subset: SubsetMask,
    /// Orthogonal projector onto the target subspace in this frame.
    pub projector: CMat,
}

pub(crate) struct ProductSearch {
    dims: Vec<usize>,
    frames: Vec<Frame>,
    table: Vec<Vec<usize>>,
}

pub(crate) struct Candidate {
    pub factors: Vec<CVec>,
    pub objective: f64,
}

const MAX_SWEEPS: usize = 200;
const POLISH_START: f64 = 1e-2;
const POLISH_STEPS: usize = 30;

fn conj_if(v: &CVec, flag: bool) -> CVec {
    if flag {
        v.conjugate()
    } else {
        v.clone()
    }
}

impl ProductSearch {
    pub fn new(dims: &[usize], frames: Vec<Frame>) -> Self {
        let d: usize = dims.iter().product();
        let table = (0..d).map(|i| digits(i, dims)).collect();
        ProductSearch { dims: dims.to_vec(), frames, table }
    }

    fn framed(&self, factors: &[CVec], subset: SubsetMask) -> CVec {
        let fs: Vec<CVec> = factors.iter().enumerate().map(|(i, f)| conj_if(f, subset.contains(i))).collect();
        kron_vectors(&fs)
    }

    pub fn objective(&self, factors: &[CVec]) -> f64 {
        self.frames
            .iter()
            .map(|fr| {
                let phi = self.framed(factors, fr.subset);
                (1.0 - phi.dotc(&(&fr.projector * &phi)).re).max(0.0)
            })
            .sum()
    }

    /// `d × d_party` matrix sending `x` to the product with `x` at `party`
    /// and the (framed) other factors elsewhere.
    fn embedding(&self, factors: &[CVec], party: usize, subset: SubsetMask) -> CMat {
        let d = self.table.len();
        let mut e = CMat::zeros(d, self.dims[party]);
        for (idx, dg) in self.table.iter().enumerate() {
            let mut w = C64::new(1.0, 0.0);
            for (l, f) in factors.iter().enumerate() {
                if l != party {
                    let z = f[dg[l]];
                    w *= if subset.contains(l) { z.conj() } else { z };
                }
            }
            e[(idx, dg[party])] = w;
        }
        e
    }

    fn sweep(&self, factors: &mut [CVec]) {
        for party in 0..self.dims.len() {
            let dp = self.dims[party];
            let mut h = CMat::zeros(dp, dp);
            for fr in &self.frames {
                let e = self.embedding(factors, party, fr.subset);
                let g = e.adjoint() * &fr.projector * &e;
                if fr.subset.contains(party) {
                    h += g.transpose();
                } else {
                    h += g;
                }
            }
            let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
            if let Ok(spec) = hermitian_eigen(&h) {
                factors[party] = spec.eigenvectors.column(0).into_owned();
            }
        }
    }

    /// Block-coordinate ascent until the objective stalls.
    pub fn descend(&self, mut factors: Vec<CVec>) -> Candidate {
        let mut f = self.objective(&factors);
        for _ in 0..MAX_SWEEPS {
            self.sweep(&mut factors);
            let next = self.objective(&factors);
            let gain = f - next;
            f = next;
            if gain < 1e-14 || f < 1e-24 {
                break;
            }
        }
        Candidate { factors, objective: f }
    }

    fn residual(&self, factors: &[CVec]) -> DVector<f64> {
        let d = self.table.len();
        let mut r = DVector::zeros(2 * d * self.frames.len());
        for (k, fr) in self.frames.iter().enumerate() {
            let phi = self.framed(factors, fr.subset);
            let v = &phi - &fr.projector * &phi;
            for i in 0..d {
                r[2 * d * k + i] = v[i].re;
                r[2 * d * k + d + i] = v[i].im;
            }
        }
        r
    }

    /// Gauss–Newton with steps restricted to `δa_i ⊥ a_i`, so neither norms
    /// nor phases of the factors drift.
    pub fn polish(&self, mut factors: Vec<CVec>) -> Candidate {
        let d = self.table.len();
        let n_rows = 2 * d * self.frames.len();
        let mut r = self.residual(&factors);
        for _ in 0..POLISH_STEPS {
            if r.norm() < 1e-15 {
                break;
            }
            let tangents: Vec<CMat> = factors
                .iter()
                .map(|a| {
                    let dp = a.len();
                    let p = CMat::identity(dp, dp) - a * a.adjoint();
                    let spec = hermitian_eigen(&p).expect("small Hermitian eigenproblem");
                    spec.eigenvectors.columns(0, dp - 1).into_owned()
                })
                .collect();
            let n_cols: usize = tangents.iter().map(|t| 2 * t.ncols()).sum();
            let mut jac = DMatrix::<f64>::zeros(n_rows, n_cols);
            let mut col = 0;
            for (party, basis) in tangents.iter().enumerate() {
                for l in 0..basis.ncols() {
                    for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                        let dir: CVec = basis.column(l) * unit;
                        for (k, fr) in self.frames.iter().enumerate() {
                            let mut fs: Vec<CVec> = factors
                                .iter()
                                .enumerate()
                                .map(|(i, f)| conj_if(f, fr.subset.contains(i)))
                                .collect();
                            fs[party] = conj_if(&dir, fr.subset.contains(party));
                            let dphi = kron_vectors(&fs);
                            let v = &dphi - &fr.projector * &dphi;
                            for i in 0..d {
                                jac[(2 * d * k + i, col)] = v[i].re;
                                jac[(2 * d * k + d + i, col)] = v[i].im;
                            }
                        }
                        col += 1;
                    }
                }
            }
            let svd = SVD::new(jac, true, true);
            let eps = 1e-12 * svd.singular_values.max();
            let Ok(step) = svd.solve(&(-&r), eps) else { break };
            let mut scale = 1.0;
            let mut improved = false;
            for _ in 0..6 {
                let mut trial = factors.clone();
                let mut col = 0;
                for (party, basis) in tangents.iter().enumerate() {
                    let mut delta = CVec::zeros(basis.nrows());
                    for l in 0..basis.ncols() {
                        let z = C64::new(step[col], step[col + 1]) * scale;
                        delta += basis.column(l) * z;
                        col += 2;
                    }
                    trial[party] = (&factors[party] + delta).normalize();
                }
                let rt = self.residual(&trial);
                if rt.norm() < r.norm() {
                    factors = trial;
                    r = rt;
                    improved = true;
                    break;
                }
                scale *= 0.5;
            }
            if !improved {
                break;
            }
        }
        let objective = self.objective(&factors);
        Candidate { factors, objective }
    }

    /// One randomized restart: ascent, then polishing if close enough.
    pub fn attempt<R: Rng>(&self, rng: &mut R) -> Candidate {
        let start: Vec<CVec> = self.dims.iter().map(|&d| random_unit_vector(d, rng)).collect();
        self.refine(start)
    }

    pub fn refine(&self, start: Vec<CVec>) -> Candidate {
        let c = self.descend(start);
        if c.objective < POLISH_START {
            self.polish(c.factors)
        } else {
            c
        }
    }
}
