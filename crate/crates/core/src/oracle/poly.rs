//! Small polynomial toolkit: univariate roots via companion matrices,
//! coefficient recovery by sampling on the unit circle, and dense
//! bivariate polynomials of total degree at most three.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use nalgebra::Schur;

use crate::tensor::{CMat, C64};

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Evaluates `Σ c_k z^k` (ascending coefficients).
pub(crate) fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(zero(), |acc, &c| acc * z + c)
}

fn derivative(coeffs: &[C64]) -> Vec<C64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

/// Coefficients of a polynomial of degree `< n` from its values at the
/// `n`-th roots of unity `ω^s`, `s = 0..n`.
pub(crate) fn interpolate_on_circle(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            let sum = values.iter().enumerate().fold(zero(), |acc, (s, &v)| {
                let ang = -2.0 * PI * (s * k % n) as f64 / n as f64;
                acc + v * C64::from_polar(1.0, ang)
            });
            sum / n as f64
        })
        .collect()
}

/// Sample points matching [`interpolate_on_circle`].
pub(crate) fn circle_points(n: usize) -> Vec<C64> {
    (0..n).map(|s| C64::from_polar(1.0, 2.0 * PI * s as f64 / n as f64)).collect()
}

/// Drops high-order coefficients below `rel · max|c|`.
pub(crate) fn trim(coeffs: &[C64], rel: f64) -> Vec<C64> {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut out = coeffs.to_vec();
    while out.last().is_some_and(|c| c.norm() <= rel * max) {
        out.pop();
    }
    out
}

/// All complex roots of `Σ c_k z^k`, from the eigenvalues of the companion
/// matrix followed by a few Newton steps. Returns `None` if the eigenvalue
/// iteration does not converge.
pub(crate) fn roots(coeffs: &[C64]) -> Option<Vec<C64>> {
    let c = trim(coeffs, 1e-13);
    if c.len() <= 1 {
        return Some(Vec::new());
    }
    let n = c.len() - 1;
    let lead = c[n];
    let mut comp = CMat::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let schur = Schur::try_new(comp, f64::EPSILON, 10_000)?;
    let (_, t) = schur.unpack();
    let dc = derivative(&c);
    let mut out: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    for z in &mut out {
        for _ in 0..4 {
            let p = horner(&c, *z);
            let dp = horner(&dc, *z);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *z - p / dp;
            if horner(&c, next).norm() < p.norm() {
                *z = next;
            } else {
                break;
            }
        }
    }
    Some(out)
}

/// Smallest distance between two roots, relative to their size.
pub(crate) fn min_separation(roots: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let scale = 1.0 + roots[i].norm().max(roots[j].norm());
            best = best.min((roots[i] - roots[j]).norm() / scale);
        }
    }
    best
}

const N: usize = 4;

/// `Σ c[i][j] x^i y^j` with `i, j ≤ 3`; products must stay within that box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bivariate {
    c: [[C64; N]; N],
}

impl Bivariate {
    pub fn zero() -> Self {
        Bivariate { c: [[zero(); N]; N] }
    }

    /// `α x + β y + γ`.
    pub fn linear(alpha: C64, beta: C64, gamma: C64) -> Self {
        let mut p = Self::zero();
        p.c[1][0] = alpha;
        p.c[0][1] = beta;
        p.c[0][0] = gamma;
        p
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        let cols: Vec<C64> = (0..N).map(|j| self.in_y_at(x)[j]).collect();
        horner(&cols, y)
    }

    /// Coefficients in `y` after fixing `x`.
    pub fn in_y_at(&self, x: C64) -> [C64; N] {
        let mut out = [zero(); N];
        for (j, o) in out.iter_mut().enumerate() {
            let col: Vec<C64> = (0..N).map(|i| self.c[i][j]).collect();
            *o = horner(&col, x);
        }
        out
    }

    pub fn dx(&self) -> Self {
        let mut p = Self::zero();
        for i in 1..N {
            for j in 0..N {
                p.c[i - 1][j] = self.c[i][j] * i as f64;
            }
        }
        p
    }

    pub fn dy(&self) -> Self {
        let mut p = Self::zero();
        for i in 0..N {
            for j in 1..N {
                p.c[i][j - 1] = self.c[i][j] * j as f64;
            }
        }
        p
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Add for Bivariate {
    type Output = Bivariate;
    fn add(mut self, o: Bivariate) -> Bivariate {
        for i in 0..N {
            for j in 0..N {
                self.c[i][j] += o.c[i][j];
            }
        }
        self
    }
}

impl Sub for Bivariate {
    type Output = Bivariate;
    fn sub(mut self, o: Bivariate) -> Bivariate {
        for i in 0..N {
            for j in 0..N {
                self.c[i][j] -= o.c[i][j];
            }
        }
        self
    }
}

impl Mul for Bivariate {
    type Output = Bivariate;
    fn mul(self, o: Bivariate) -> Bivariate {
        let mut p = Bivariate::zero();
        for i in 0..N {
            for j in 0..N {
                if self.c[i][j] == zero() {
                    continue;
                }
                for k in 0..N {
                    for l in 0..N {
                        if o.c[k][l] == zero() {
                            continue;
                        }
                        debug_assert!(i + k < N && j + l < N, "bivariate product overflows degree box");
                        if i + k < N && j + l < N {
                            p.c[i + k][j + l] += self.c[i][j] * o.c[k][l];
                        }
                    }
                }
            }
        }
        p
    }
}

/// Determinant of a 3×3 matrix of bivariate polynomials.
pub(crate) fn det3(m: &[[Bivariate; 3]; 3]) -> Bivariate {
    let minor = |a: usize, b: usize, c: usize, d: usize| m[1][a] * m[2][b] - m[1][c] * m[2][d];
    m[0][0] * minor(1, 2, 2, 1) - m[0][1] * minor(0, 2, 2, 0) + m[0][2] * minor(0, 1, 1, 0)
}

/// Sylvester resultant of two cubics `Σ f_k y^k`, `Σ g_k y^k`, treating
/// both as formally of degree three.
pub(crate) fn resultant_cubic(f: &[C64; 4], g: &[C64; 4]) -> C64 {
    let mut s = CMat::zeros(6, 6);
    for r in 0..3 {
        for k in 0..4 {
            s[(r, r + k)] = f[3 - k];
            s[(r + 3, r + k)] = g[3 - k];
        }
    }
    s.determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn roots_of_product_form() {
        let want = [c(1.0), c(-2.0), C64::new(0.5, 1.5)];
        // (z-1)(z+2)(z-(0.5+1.5i)), expanded
        let mut coeffs = vec![c(1.0)];
        for r in want {
            let mut next = vec![zero(); coeffs.len() + 1];
            for (k, &a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            coeffs = next;
        }
        let mut got = roots(&coeffs).unwrap();
        assert_eq!(got.len(), 3);
        for r in want {
            let (i, _) = got.iter().enumerate().min_by(|a, b| (a.1 - r).norm().total_cmp(&(b.1 - r).norm())).unwrap();
            assert!((got[i] - r).norm() < 1e-12);
            got.remove(i);
        }
    }

    #[test]
    fn trailing_zero_coefficients_lower_degree() {
        let r = roots(&[c(-1.0), c(1.0), c(0.0), c(1e-20)]).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let coeffs: Vec<C64> = (0..10).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let vals: Vec<C64> = circle_points(16).iter().map(|&z| horner(&coeffs, z)).collect();
        let got = interpolate_on_circle(&vals);
        for k in 0..16 {
            let want = coeffs.get(k).copied().unwrap_or(zero());
            assert!((got[k] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn resultant_detects_common_root() {
        // (y-1)(y-2)(y-3) and (y-3)(y+1)(y+2) share y = 3
        let f = [c(-6.0), c(11.0), c(-6.0), c(1.0)];
        let g = [c(-6.0), c(-7.0), c(0.0), c(1.0)];
        assert!(resultant_cubic(&f, &g).norm() < 1e-9);
        let h = [c(6.0), c(11.0), c(6.0), c(1.0)];
        // roots -1,-2,-3 versus 1,2,3: resultant is Π (r_i - s_j) ≠ 0
        assert!(resultant_cubic(&f, &h).norm() > 1.0);
    }

    #[test]
    fn bivariate_determinant_matches_pointwise() {
        let l = |a: f64, b: f64, g: f64| Bivariate::linear(c(a), c(b), c(g));
        let m = [
            [l(1.0, 0.0, 2.0), l(0.0, 1.0, 0.0), l(1.0, 1.0, 1.0)],
            [l(2.0, -1.0, 0.0), l(0.5, 0.0, 1.0), l(0.0, 0.0, 3.0)],
            [l(0.0, 2.0, 1.0), l(1.0, 1.0, 0.0), l(-1.0, 0.0, 1.0)],
        ];
        let det = det3(&m);
        let (x, y) = (C64::new(0.3, -0.7), C64::new(-1.1, 0.4));
        let num = CMat::from_fn(3, 3, |i, j| m[i][j].eval(x, y));
        assert!((det.eval(x, y) - num.determinant()).norm() < 1e-12);
        let h = 1e-6;
        let fd = (det.eval(x + h, y) - det.eval(x - h, y)) / (2.0 * h);
        assert!((det.dx().eval(x, y) - fd).norm() < 1e-6);
    }
}
