//! Determinantal Chow forms of Segre varieties.
//!
//! A subspace `V ⊂ H_1 ⊗ … ⊗ H_n` of dimension
//! `δ₁ = d − 1 − Σ (d_i − 1)` contains a product vector exactly when its
//! Plücker coordinates (in the lexicographic product basis) are a zero of the
//! Chow form `F`. Each form here is the determinant of a square matrix whose
//! cells are signed sums of Plücker coordinates.

use std::fmt;

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grassmann::{pluecker, sort_with_sign, tuple_rank, PlueckerVector, SubspaceBasis};
use crate::tensor::C64;

const TABLE_2X2: &str = include_str!("../data/chow_2x2.txt");
const TABLE_3X2: &str = include_str!("../data/chow_3x2.txt");
const TABLE_4X2: &str = include_str!("../data/chow_4x2.txt");
const TABLE_2X3: &str = include_str!("../data/chow_2x3.txt");
const TABLE_3X3: &str = include_str!("../data/chow_3x3.txt");
const TABLE_2X2X2: &str = include_str!("../data/chow_2x2x2.txt");

/// The built-in tables: label, party dimensions, file contents.
pub const TABLES: [(&str, &[usize], &str); 6] = [
    ("2x2", &[2, 2], TABLE_2X2),
    ("3x2", &[3, 2], TABLE_3X2),
    ("4x2", &[4, 2], TABLE_4X2),
    ("2x3", &[2, 3], TABLE_2X3),
    ("3x3", &[3, 3], TABLE_3X3),
    ("2x2x2", &[2, 2, 2], TABLE_2X2X2),
];

/// One signed Plücker coordinate `±p_{i1…ik}` (1-based, increasing).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    pub sign: i8,
    pub tuple: Vec<usize>,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign < 0 { '-' } else { '+' };
        if self.tuple.iter().all(|&i| i < 10) {
            write!(f, "{s}p{}", self.tuple.iter().join(""))
        } else {
            write!(f, "{s}p{{{}}}", self.tuple.iter().join(","))
        }
    }
}

/// A Chow form stored as a square matrix of signed-term lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChowForm {
    pub dims: Vec<usize>,
    pub size: usize,
    /// Length of every Plücker tuple (the subspace dimension `δ₁`).
    pub k: usize,
    /// Ambient dimension `Π d_i`.
    pub d: usize,
    pub entries: Vec<Vec<Vec<Term>>>,
}

/// `δ₁ = d − 1 − Σ (d_i − 1)`, or `None` when it is not positive.
pub fn critical_dimension(dims: &[usize]) -> Option<usize> {
    let d: usize = dims.iter().product();
    let s: usize = dims.iter().map(|&x| x.saturating_sub(1)).sum();
    (d > s + 1).then(|| d - 1 - s)
}

impl ChowForm {
    fn new(dims: Vec<usize>, entries: Vec<Vec<Vec<Term>>>) -> Result<Self> {
        let d: usize = dims.iter().product();
        let k = critical_dimension(&dims).ok_or_else(|| Error::UnsupportedSystem(dims.clone()))?;
        let size = entries.len();
        for row in &entries {
            if row.len() != size {
                return Err(Error::ShapeMismatch(format!("Chow matrix row of length {} in a {size}x{size} form", row.len())));
            }
            for term in row.iter().flatten() {
                if term.tuple.len() != k {
                    return Err(Error::ShapeMismatch(format!("tuple {:?} for subspace dimension {k}", term.tuple)));
                }
                if term.tuple.iter().any(|&i| i == 0 || i > d) {
                    return Err(Error::IndexOutOfRange(*term.tuple.iter().max().unwrap(), d));
                }
                if term.tuple.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::ShapeMismatch(format!("tuple {:?} is not increasing", term.tuple)));
                }
            }
        }
        Ok(ChowForm { dims, size, k, d, entries })
    }

    /// Polynomial degree of `F` in the Plücker coordinates.
    pub fn degree(&self) -> usize {
        self.size
    }

    /// Cell-by-cell equality with term order ignored.
    pub fn same_terms(&self, other: &ChowForm) -> bool {
        self.size == other.size
            && self.entries.iter().flatten().zip(other.entries.iter().flatten()).all(|(a, b)| {
                let mut a = a.clone();
                let mut b = b.clone();
                a.sort();
                b.sort();
                a == b
            })
    }

    /// Equality up to negating every term of every cell.
    pub fn same_terms_up_to_sign(&self, other: &ChowForm) -> bool {
        self.same_terms(other) || self.same_terms(&other.negated())
    }

    fn negated(&self) -> ChowForm {
        let mut out = self.clone();
        for t in out.entries.iter_mut().flatten().flatten() {
            t.sign = -t.sign;
        }
        out
    }

    /// Numeric matrix of the form at the given coordinates.
    pub fn matrix_at(&self, p: &PlueckerVector, normalized: bool) -> Result<DMatrix<C64>> {
        if p.k() != self.k || p.d() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "form expects G({},{}), got G({},{})",
                self.k,
                self.d,
                p.k(),
                p.d()
            )));
        }
        let src = if normalized { p.normalized() } else { p.entries() };
        Ok(DMatrix::from_fn(self.size, self.size, |r, c| {
            self.entries[r][c]
                .iter()
                .map(|t| {
                    let zero: Vec<usize> = t.tuple.iter().map(|&i| i - 1).collect();
                    src[tuple_rank(&zero, self.d)] * t.sign as f64
                })
                .sum()
        }))
    }

    /// Single-line `[[+p1],[+p2];[+p3],[+p4]]` rendering.
    pub fn render(&self) -> String {
        let mut rows = self.entries.iter().map(|row| {
            row.iter().map(|cell| format!("[{}]", cell.iter().map(|t| t.to_string()).join(""))).join(",")
        });
        format!("[{}]", rows.join(";"))
    }
}

/// Parses a table file: one row per line, cells separated by `|`, terms as
/// optional sign followed by one digit per index. `#` starts a comment line.
pub fn parse_table(dims: &[usize], text: &str) -> Result<ChowForm> {
    let mut entries = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let mut row = Vec::new();
        for cell in line.split('|') {
            let mut terms = Vec::new();
            let mut sign = 1i8;
            for tok in cell.split_whitespace() {
                let (s, digits) = match tok.as_bytes()[0] {
                    b'+' => (1, &tok[1..]),
                    b'-' => (-1, &tok[1..]),
                    _ => (1, tok),
                };
                if digits.is_empty() {
                    sign = s;
                    continue;
                }
                let tuple = digits
                    .chars()
                    .map(|ch| ch.to_digit(10).map(|x| x as usize).ok_or_else(|| Error::Parse(format!("bad term {tok:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                terms.push(Term { sign: sign * s, tuple });
                sign = 1;
            }
            row.push(terms);
        }
        entries.push(row);
    }
    ChowForm::new(dims.to_vec(), entries)
}

/// Chow form of `P^{M−1} × P^1`: entry `(i, j)` sums `p_k` over the
/// sequences obtained from `(1, 3, …, 2M−1)` with `2(M−i)+1` removed by
/// incrementing exactly `j−1` of the terms.
pub fn generate_chow_mx2(m: usize) -> Result<ChowForm> {
    if m < 2 {
        return Err(Error::UnsupportedSystem(vec![m, 2]));
    }
    let mut entries = Vec::with_capacity(m);
    for i in 1..=m {
        let skip = 2 * (m - i) + 1;
        let base: Vec<usize> = (0..m).map(|t| 2 * t + 1).filter(|&x| x != skip).collect();
        let mut row = Vec::with_capacity(m);
        for j in 1..=m {
            let cell = (0..base.len())
                .combinations(j - 1)
                .map(|bumped| {
                    let mut tuple = base.clone();
                    for b in bumped {
                        tuple[b] += 1;
                    }
                    tuple.sort_unstable();
                    Term { sign: 1, tuple }
                })
                .collect();
            row.push(cell);
        }
        entries.push(row);
    }
    ChowForm::new(vec![m, 2], entries)
}

/// Rewrites every coordinate `p_{i1…ik}` as `p_{π(i1)…π(ik)}`, re-sorting the
/// indices and folding the permutation sign into the term. `perm` is 1-based:
/// `perm[i-1] = π(i)`. The result keeps the dimensions of `form`.
pub fn permute_form(form: &ChowForm, perm: &[usize]) -> Result<ChowForm> {
    let d = form.d;
    if perm.len() != d {
        return Err(Error::NotBijective(d));
    }
    let mut seen = vec![false; d + 1];
    for &x in perm {
        if x == 0 || x > d || seen[x] {
            return Err(Error::NotBijective(d));
        }
        seen[x] = true;
    }
    let mut out = form.clone();
    for t in out.entries.iter_mut().flatten().flatten() {
        let mapped: Vec<usize> = t.tuple.iter().map(|&i| perm[i - 1]).collect();
        let (s, sorted) = sort_with_sign(&mapped).expect("bijection keeps indices distinct");
        t.sign *= s;
        t.tuple = sorted;
    }
    Ok(out)
}

/// Index permutation taking the lex basis of `M ⊗ N` to the lex basis of
/// `N ⊗ M` (the basis `|i,j⟩` lands at position `jM + i + 1`).
pub fn swap_permutation(m: usize, n: usize) -> Vec<usize> {
    let mut perm = vec![0; m * n];
    for i in 0..m {
        for j in 0..n {
            perm[i * n + j] = j * m + i + 1;
        }
    }
    perm
}

/// Chow form of `N ⊗ M` obtained from that of `M ⊗ N`.
pub fn swap_parties(form: &ChowForm) -> Result<ChowForm> {
    if form.dims.len() != 2 {
        return Err(Error::NotBipartite(form.dims.len()));
    }
    let (m, n) = (form.dims[0], form.dims[1]);
    let mut out = permute_form(form, &swap_permutation(m, n))?;
    out.dims = vec![n, m];
    Ok(out)
}

/// Returns the Chow form for a supported system.
pub fn builtin_chow(dims: &[usize]) -> Result<ChowForm> {
    if let Some((_, d, text)) = TABLES.iter().find(|(_, d, _)| *d == dims) {
        return parse_table(d, text);
    }
    match *dims {
        [m, 2] if m > 4 => generate_chow_mx2(m),
        [2, n] if n > 3 => swap_parties(&generate_chow_mx2(n)?),
        _ => Err(Error::UnsupportedSystem(dims.to_vec())),
    }
}

/// Hex SHA-256 of every built-in table file.
pub fn table_checksums() -> Vec<(&'static str, String)> {
    TABLES
        .iter()
        .map(|(label, _, text)| (*label, hex::encode(Sha256::digest(text.as_bytes()))))
        .collect()
}

/// `F(p)` on the normalized coordinates (unit mean-square modulus).
pub fn eval_chow(form: &ChowForm, p: &PlueckerVector) -> Result<C64> {
    Ok(form.matrix_at(p, true)?.determinant())
}

/// `F(p)` on the raw minors; scales with the basis.
pub fn eval_chow_unnormalized(form: &ChowForm, p: &PlueckerVector) -> Result<C64> {
    Ok(form.matrix_at(p, false)?.determinant())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegreTest {
    /// The subspace contains a product vector.
    pub meets: bool,
    /// `F` on the normalized coordinates.
    pub value: C64,
    pub abs_value: f64,
}

/// Decides whether a `δ₁`-dimensional subspace contains a product vector.
pub fn subspace_meets_segre(basis: &SubspaceBasis, tol_chow: f64) -> Result<SegreTest> {
    let form = builtin_chow(basis.dims())?;
    if basis.dim() != form.k {
        return Err(Error::WrongDimension { expected: form.k, got: basis.dim() });
    }
    let p = pluecker(basis)?;
    let value = eval_chow(&form, &p)?;
    Ok(SegreTest { meets: value.norm() <= tol_chow, value, abs_value: value.norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_parse_with_expected_shapes() {
        for (label, dims, text) in TABLES {
            let f = parse_table(dims, text).unwrap();
            let expected = match label {
                "2x2" => 2,
                "3x2" | "2x3" => 3,
                "4x2" => 4,
                _ => 6,
            };
            assert_eq!(f.size, expected, "{label}");
        }
    }

    #[test]
    fn two_by_two_is_p1p4_minus_p2p3() {
        let f = builtin_chow(&[2, 2]).unwrap();
        assert_eq!(f.render(), "[[+p1],[+p2];[+p3],[+p4]]");
        let p = PlueckerVector::from_entries(
            1,
            4,
            vec![C64::new(2.0, 0.0), C64::new(3.0, 0.0), C64::new(5.0, 0.0), C64::new(7.0, 0.0)],
        )
        .unwrap();
        assert!((eval_chow_unnormalized(&f, &p).unwrap() - C64::new(2.0 * 7.0 - 3.0 * 5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn spot_entries() {
        let f = builtin_chow(&[3, 3]).unwrap();
        assert_eq!(f.entries[0][0], vec![Term { sign: 1, tuple: vec![1, 2, 4, 5] }]);
        let f = builtin_chow(&[2, 2, 2]).unwrap();
        assert_eq!(
            f.entries[0][4],
            vec![Term { sign: 1, tuple: vec![1, 2, 5, 7] }, Term { sign: -1, tuple: vec![1, 3, 5, 6] }]
        );
    }

    #[test]
    fn generator_small_cases() {
        let g3 = generate_chow_mx2(3).unwrap();
        let mut b12 = g3.entries[0][1].clone();
        b12.sort();
        assert_eq!(b12, vec![Term { sign: 1, tuple: vec![1, 4] }, Term { sign: 1, tuple: vec![2, 3] }]);
        let g5 = generate_chow_mx2(5).unwrap();
        assert_eq!(g5.size, 5);
        assert_eq!(g5.k, 4);
        // row 1 drops 9 from (1,3,5,7,9); column j has C(4, j-1) terms
        assert_eq!(g5.entries[0][0], vec![Term { sign: 1, tuple: vec![1, 3, 5, 7] }]);
        let counts: Vec<usize> = g5.entries[0].iter().map(|c| c.len()).collect();
        assert_eq!(counts, vec![1, 4, 6, 4, 1]);
        assert_eq!(g5.entries[0][4], vec![Term { sign: 1, tuple: vec![2, 4, 6, 8] }]);
        assert!(generate_chow_mx2(1).is_err());
    }

    #[test]
    fn permute_identity_and_inverse() {
        let f = builtin_chow(&[3, 3]).unwrap();
        let id: Vec<usize> = (1..=9).collect();
        assert_eq!(permute_form(&f, &id).unwrap(), f);
        let perm = vec![3, 1, 2, 9, 8, 7, 4, 6, 5];
        let mut inv = vec![0; 9];
        for (i, &x) in perm.iter().enumerate() {
            inv[x - 1] = i + 1;
        }
        let back = permute_form(&permute_form(&f, &perm).unwrap(), &inv).unwrap();
        assert!(back.same_terms(&f));
        assert_eq!(permute_form(&f, &[1, 1, 2, 3, 4, 5, 6, 7, 8]), Err(Error::NotBijective(9)));
    }

    #[test]
    fn swap_permutation_three_by_two() {
        assert_eq!(swap_permutation(3, 2), vec![1, 4, 2, 5, 3, 6]);
    }

    #[test]
    fn unsupported_systems() {
        assert!(matches!(builtin_chow(&[3, 4]), Err(Error::UnsupportedSystem(_))));
        assert!(matches!(builtin_chow(&[2, 2, 2, 2]), Err(Error::UnsupportedSystem(_))));
        assert_eq!(builtin_chow(&[6, 2]).unwrap().size, 6);
        assert_eq!(builtin_chow(&[2, 5]).unwrap().dims, vec![2, 5]);
    }

    #[test]
    fn critical_dimensions() {
        assert_eq!(critical_dimension(&[3, 3]), Some(4));
        assert_eq!(critical_dimension(&[2, 2, 2]), Some(4));
        assert_eq!(critical_dimension(&[2, 2]), Some(1));
        assert_eq!(critical_dimension(&[5, 2]), Some(4));
    }

    #[test]
    fn checksums_are_stable_hex() {
        let sums = table_checksums();
        assert_eq!(sums.len(), 6);
        assert!(sums.iter().all(|(_, h)| h.len() == 64));
    }
}
