//! The classifier: support compression, PPT test, rank branching, and Chow
//! form evaluation for the two shapes where rank-four PPT entanglement exists.

use serde::{Deserialize, Serialize};

use crate::chow::subspace_meets_segre;
use crate::error::{Error, Result};
use crate::oracle::{find_product_vector, greedy_decompose, Decomposition, DecompositionTerm, DEFAULT_RESTARTS};
use crate::ppt::{is_ppt, PptReport};
use crate::product::is_product;
use crate::tensor::{CompressedState, MultiState, SubsetMask, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Separable,
    Entangled,
    OutOfScope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "NPT")]
    Npt,
    Rank1Product,
    Rank1NonProduct,
    #[serde(rename = "PPTRank2")]
    PptRank2,
    #[serde(rename = "PPTRank3")]
    PptRank3,
    #[serde(rename = "PPTRank4Shape")]
    PptRank4Shape,
    Chow33,
    Chow222,
    RankAbove4,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Npt => "NPT",
            Rule::Rank1Product => "Rank1Product",
            Rule::Rank1NonProduct => "Rank1NonProduct",
            Rule::PptRank2 => "PPTRank2",
            Rule::PptRank3 => "PPTRank3",
            Rule::PptRank4Shape => "PPTRank4Shape",
            Rule::Chow33 => "Chow33",
            Rule::Chow222 => "Chow222",
            Rule::RankAbove4 => "RankAbove4",
        }
    }
}

/// Value of the Chow form on the range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChowWitness {
    pub system: Vec<usize>,
    /// `F` on the normalized Plücker coordinates.
    pub value: C64,
    pub abs_value: f64,
    pub tol_chow: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBounds {
    pub lo: usize,
    pub hi: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub rule_fired: Rule,
    pub dims: Vec<usize>,
    pub compressed_dims: Vec<usize>,
    /// 1-based parties whose reduced state has rank one.
    pub dropped_parties: Vec<usize>,
    pub rank: usize,
    pub local_ranks: Vec<usize>,
    /// PPT data of the compressed state; absent when every party is trivial.
    pub ppt: Option<PptReport>,
    /// Subset whose partial transpose has a negative eigenvalue.
    pub npt_witness: Option<SubsetMask>,
    pub chow: Option<ChowWitness>,
    /// Outcome of the numerical product-vector search on the range, run
    /// alongside every Chow evaluation.
    pub oracle_found_product: Option<bool>,
    /// Separable decomposition in the original coordinates (best effort).
    pub decomposition: Option<Decomposition>,
    pub length_bounds: Option<LengthBounds>,
    pub justification: Vec<String>,
    pub low_confidence: bool,
    pub warnings: Vec<String>,
    pub seed: u64,
}

/// Knobs for [`classify_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub seed: u64,
    /// Attempt a separable decomposition on separable verdicts.
    pub decompose: bool,
    /// Cross-check Chow verdicts with the numerical search.
    pub oracle_check: bool,
    pub restarts: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { seed: 0, decompose: true, oracle_check: true, restarts: DEFAULT_RESTARTS }
    }
}

/// Classifies with default options.
pub fn classify(rho: &MultiState) -> Result<ClassificationReport> {
    classify_with(rho, &ClassifyOptions::default())
}

/// Upper and lower bounds on the length of a separable state.
pub fn length_bounds(report: &ClassificationReport) -> Result<LengthBounds> {
    if report.verdict != Verdict::Separable {
        return Err(Error::NotSeparableVerdict);
    }
    Ok(bounds_for(report.rank, &report.compressed_dims))
}

/// `local` holds the ranks of the nontrivial parties.
fn bounds_for(rank: usize, local: &[usize]) -> LengthBounds {
    let n = local.len();
    let max_r = local.iter().copied().max().unwrap_or(1);
    let hi = match rank {
        0 | 1 => rank,
        2 => 2,
        3 if n >= 3 || local.contains(&3) => 3,
        3 => 4,
        4 if local.contains(&4) => 4,
        4 if n > 2 && max_r > 2 => 5,
        4 => 6,
        _ => rank,
    };
    LengthBounds { lo: rank, hi }
}

fn one_based(parties: &[usize]) -> Vec<usize> {
    parties.iter().map(|p| p + 1).collect()
}

struct Builder {
    report: ClassificationReport,
}

impl Builder {
    fn done(mut self, verdict: Verdict, rule: Rule, why: impl Into<String>) -> ClassificationReport {
        self.report.verdict = verdict;
        self.report.rule_fired = rule;
        self.report.justification.push(why.into());
        self.report
    }
}

fn lift_decomposition(comp: &CompressedState, dec: Decomposition) -> Decomposition {
    let terms = dec
        .terms
        .into_iter()
        .map(|t| DecompositionTerm { weight: t.weight, factors: comp.lift_factors(&t.factors) })
        .collect();
    Decomposition { terms, ..dec }
}

pub fn classify_with(rho: &MultiState, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    let cfg = *rho.config();
    cfg.validate()?;
    let spec = rho.spectral()?;
    if spec.lambda_max() <= 0.0 {
        return Err(Error::ZeroState);
    }
    let rank = spec.rank(cfg.tol_rank);
    let local_ranks = rho.local_ranks()?;
    let mut b = Builder {
        report: ClassificationReport {
            verdict: Verdict::OutOfScope,
            rule_fired: Rule::RankAbove4,
            dims: rho.dims().to_vec(),
            compressed_dims: Vec::new(),
            dropped_parties: Vec::new(),
            rank,
            local_ranks,
            ppt: None,
            npt_witness: None,
            chow: None,
            oracle_found_product: None,
            decomposition: None,
            length_bounds: None,
            justification: Vec::new(),
            low_confidence: false,
            warnings: Vec::new(),
            seed: opts.seed,
        },
    };

    let comp = match rho.compress_support() {
        Ok(c) => c,
        Err(Error::AllPartiesTrivial) => {
            // every reduced state is pure, so ρ is a single product projector
            b.report.dropped_parties = (1..=rho.n_parties()).collect();
            if opts.decompose {
                let factors = (0..rho.n_parties())
                    .map(|i| {
                        let red = rho.reduced_state(SubsetMask::from_bits(1 << i))?;
                        Ok(red.spectral()?.eigenvectors.column(0).into_owned())
                    })
                    .collect::<Result<Vec<_>>>()?;
                b.report.decomposition = Some(Decomposition {
                    terms: vec![DecompositionTerm { weight: spec.lambda_max(), factors }],
                    residual: 0.0,
                    length_upper_bound: 1,
                });
            }
            b.report.length_bounds = Some(bounds_for(1, &[]));
            return Ok(b.done(
                Verdict::Separable,
                Rule::Rank1Product,
                "every single-party reduced state is pure, so the state is a product state",
            ));
        }
        Err(e) => return Err(e),
    };
    b.report.compressed_dims = comp.state.dims().to_vec();
    b.report.dropped_parties = one_based(&comp.dropped);
    let sigma = &comp.state;
    let cdims = sigma.dims().to_vec();
    if !comp.dropped.is_empty() {
        b.report.justification.push(format!(
            "parties {:?} have pure reduced states and factor off; rank and separability are decided on the remaining parties",
            b.report.dropped_parties
        ));
    }

    if rank == 1 {
        let v = sigma.range_basis()?.rows().row(0).transpose();
        let chk = is_product(&v, &cdims, cfg.tol_product)?;
        return Ok(if let Some(f) = chk.factors {
            if opts.decompose {
                let lam = spec.lambda_max();
                let unit: Vec<_> = f.iter().map(|x| x.normalize()).collect();
                let dec = Decomposition {
                    terms: vec![DecompositionTerm { weight: lam, factors: unit }],
                    residual: 0.0,
                    length_upper_bound: 1,
                };
                b.report.decomposition = Some(lift_decomposition(&comp, dec));
            }
            b.report.length_bounds = Some(bounds_for(1, &cdims));
            b.done(Verdict::Separable, Rule::Rank1Product, "the state is a single pure product state")
        } else {
            b.done(
                Verdict::Entangled,
                Rule::Rank1NonProduct,
                format!("the state is pure and its vector is not a product (flattening residual {:.3e})", chk.residual),
            )
        });
    }

    let ppt = is_ppt(sigma)?;
    let worst = ppt.worst_subset;
    let ppt_ok = ppt.is_ppt;
    let min_eig = ppt.record(worst).map(|r| r.min_eigenvalue).unwrap_or(0.0);
    b.report.ppt = Some(ppt);
    if !ppt_ok {
        let parties: Vec<usize> = worst.parties().iter().map(|&p| comp.kept[p - 1] + 1).collect();
        b.report.npt_witness = Some(SubsetMask::from_parties(&parties)?);
        return Ok(b.done(
            Verdict::Entangled,
            Rule::Npt,
            format!(
                "the partial transpose on parties {parties:?} has eigenvalue {min_eig:.3e}; separable states have positive partial transposes"
            ),
        ));
    }

    let separable = |mut b: Builder, rule: Rule, why: String| -> ClassificationReport {
        let lb = bounds_for(rank, &cdims);
        b.report.length_bounds = Some(lb);
        if opts.decompose {
            let max_terms = lb.hi.max(rank + 1) + 1;
            match greedy_decompose(sigma, max_terms, opts.seed) {
                Some(dec) => b.report.decomposition = Some(lift_decomposition(&comp, dec)),
                None => b.report.warnings.push("greedy decomposition did not converge; the verdict does not depend on it".into()),
            }
        }
        b.done(Verdict::Separable, rule, why)
    };

    match rank {
        2 => Ok(separable(b, Rule::PptRank2, "PPT state of rank two; PPT states of rank at most three are separable, and rank two has length two".into())),
        3 => Ok(separable(b, Rule::PptRank3, "PPT state of rank three; PPT states of rank at most three are separable".into())),
        4 => {
            let chow_rule = match cdims.as_slice() {
                [3, 3] => Some(Rule::Chow33),
                [2, 2, 2] => Some(Rule::Chow222),
                _ => None,
            };
            let Some(rule) = chow_rule else {
                let why = if cdims.len() == 2 {
                    format!("PPT state of rank four supported on {cdims:?}; bipartite PPT entangled states of rank four are supported on 3⊗3")
                } else {
                    format!("PPT state of rank four supported on {cdims:?}; multipartite PPT entangled states of rank four are supported on 2⊗2⊗2")
                };
                return Ok(separable(b, Rule::PptRank4Shape, why));
            };
            let range = sigma.range_basis()?;
            let test = subspace_meets_segre(&range, cfg.tol_chow)?;
            b.report.chow = Some(ChowWitness {
                system: cdims.clone(),
                value: test.value,
                abs_value: test.abs_value,
                tol_chow: cfg.tol_chow,
            });
            if test.abs_value >= cfg.tol_chow / 10.0 && test.abs_value <= cfg.tol_chow * 10.0 {
                b.report.low_confidence = true;
                b.report.warnings.push(format!(
                    "|F| = {:.3e} is within a factor of ten of tol_chow = {:.1e}",
                    test.abs_value, cfg.tol_chow
                ));
            }
            if opts.oracle_check {
                let found = find_product_vector(&range, opts.restarts, opts.seed, cfg.tol_product).is_some();
                b.report.oracle_found_product = Some(found);
                if found != test.meets {
                    b.report.warnings.push(format!(
                        "numerical search {} a product vector in the range, the Chow form says it {}",
                        if found { "found" } else { "did not find" },
                        if test.meets { "exists" } else { "does not" }
                    ));
                }
            }
            if test.meets {
                let why = format!(
                    "PPT state of rank four on {cdims:?} whose range meets the product vectors (|F| = {:.3e} <= {:.1e}); such states are separable",
                    test.abs_value, cfg.tol_chow
                );
                Ok(separable(b, rule, why))
            } else {
                if rule == Rule::Chow222 {
                    if let Some(p) = &b.report.ppt {
                        if p.records.iter().any(|r| r.rank != 4) {
                            b.report.warnings.push(
                                "some partial transpose does not have rank four, which three-qubit PPT entangled states of rank four require; check tolerances".into(),
                            );
                        }
                    }
                }
                let why = format!(
                    "PPT state of rank four on {cdims:?} whose range contains no product vector (|F| = {:.3e} > {:.1e}); such a state is entangled",
                    test.abs_value, cfg.tol_chow
                );
                Ok(b.done(Verdict::Entangled, rule, why))
            }
        }
        _ => Ok(b.done(
            Verdict::OutOfScope,
            Rule::RankAbove4,
            format!("PPT state of rank {rank}; the criterion covers rank at most four"),
        )),
    }
}
