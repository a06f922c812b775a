//! Finite prefixes of odometer chains `Γ_1 ⊃ Γ_2 ⊃ …` and their classification.
//!
//! Nothing here can be decided from a finite prefix alone, so verdicts are
//! three-valued and carry the evidence they were derived from.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::int::divides;
use crate::lattice::{norm_sq, LatticeBasis};
use crate::subgroup::SubgroupTriple;

/// Stage numbers in errors are 1-based.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain has no stages")]
    Empty,
    #[error("stage {0} is not a normal subgroup")]
    NotNormal(usize),
    #[error("stage {} is not contained in stage {}", .0 + 1, .0)]
    NotNested(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageDiagnostics {
    pub stage: usize,
    pub index: BigInt,
    pub m: BigInt,
    pub shortest: Vec<BigInt>,
    pub shortest_norm_sq: BigInt,
    pub defect: BigInt,
}

/// Asymptotic triviality diagnosis. A finite prefix never certifies
/// `∩ Γ_n = {e}`; `Consistent` only says the prefix shows no stagnation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Triviality {
    Consistent,
    Stagnant { stage: usize, reason: String },
}

impl fmt::Display for Triviality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Triviality::Consistent => {
                write!(f, "consistent with trivial intersection (asymptotic, not certified)")
            }
            Triviality::Stagnant { stage, reason } => {
                write!(f, "warning: Stagnant between stages {} and {}: {}", stage, stage + 1, reason)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdometerChain {
    stages: Vec<SubgroupTriple>,
    diagnostics: Vec<StageDiagnostics>,
    triviality: Triviality,
}

impl OdometerChain {
    pub fn stages(&self) -> &[SubgroupTriple] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Stage `n`, 1-based.
    pub fn stage(&self, n: usize) -> Option<&SubgroupTriple> {
        n.checked_sub(1).and_then(|k| self.stages.get(k))
    }

    pub fn diagnostics(&self) -> &[StageDiagnostics] {
        &self.diagnostics
    }

    pub fn triviality(&self) -> &Triviality {
        &self.triviality
    }

    pub fn associated_z2(&self) -> Vec<LatticeBasis> {
        associated_z2(self)
    }

    pub fn classify(&self) -> ClassificationReport {
        classify(self)
    }
}

fn diagnose(stage: usize, t: &SubgroupTriple) -> StageDiagnostics {
    let shortest = t
        .lat()
        .shortest_vector()
        .expect("two-dimensional lattices always have a shortest vector");
    StageDiagnostics {
        stage,
        index: t.index(),
        m: t.m().clone(),
        shortest_norm_sq: norm_sq(&shortest),
        shortest,
        defect: t.defect(),
    }
}

pub fn validate_chain(stages: Vec<SubgroupTriple>) -> Result<OdometerChain, ChainError> {
    if stages.is_empty() {
        return Err(ChainError::Empty);
    }
    if let Some(k) = stages.iter().position(|t| !t.is_normal()) {
        return Err(ChainError::NotNormal(k + 1));
    }
    for (k, pair) in stages.windows(2).enumerate() {
        if !pair[1].leq(&pair[0]) {
            return Err(ChainError::NotNested(k + 1));
        }
    }
    let diagnostics: Vec<StageDiagnostics> = stages
        .iter()
        .enumerate()
        .map(|(k, t)| diagnose(k + 1, t))
        .collect();
    let mut triviality = Triviality::Consistent;
    for pair in diagnostics.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let reason = if b.index <= a.index {
            Some(format!("index stays at {}", b.index))
        } else if b.m <= a.m {
            Some(format!("m does not increase ({} -> {})", a.m, b.m))
        } else if b.shortest_norm_sq <= a.shortest_norm_sq {
            Some(format!(
                "shortest vector norm^2 does not increase ({} -> {})",
                a.shortest_norm_sq, b.shortest_norm_sq
            ))
        } else {
            None
        };
        if let Some(reason) = reason {
            triviality = Triviality::Stagnant { stage: a.stage, reason };
            break;
        }
    }
    Ok(OdometerChain {
        stages,
        diagnostics,
        triviality,
    })
}

/// The projected lattices `A_n·Z²`.
pub fn associated_z2(chain: &OdometerChain) -> Vec<LatticeBasis> {
    chain.stages.iter().map(|t| t.lat().clone()).collect()
}

/// `true` when `m_k(a) | row_k(b)` for every axis `k`.
pub fn product_step(a: &LatticeBasis, b: &LatticeBasis) -> bool {
    (0..a.dim()).all(|k| {
        let mk = a.min_multiple(k).expect("nonsingular lattice");
        b.matrix().row(k).iter().all(|e| divides(&mk, e))
    })
}

/// Longest increasing run of stage positions (0-based) whose consecutive
/// members satisfy [`product_step`]. `None` when no pair qualifies.
pub fn product_witness(lattices: &[LatticeBasis]) -> Option<Vec<usize>> {
    let n = lattices.len();
    // best[j]: longest valid subsequence ending at j, with predecessor links
    let mut best = vec![1usize; n];
    let mut prev: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        for i in 0..j {
            if best[i] + 1 > best[j] && product_step(&lattices[i], &lattices[j]) {
                best[j] = best[i] + 1;
                prev[j] = Some(i);
            }
        }
    }
    let (mut end, &len) = best.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
    if len < 2 {
        return None;
    }
    let mut seq = vec![end];
    while let Some(p) = prev[end] {
        seq.push(p);
        end = p;
    }
    seq.reverse();
    Some(seq)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    NoWitnessInPrefix,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "Yes",
            Verdict::No => "No",
            Verdict::NoWitnessInPrefix => "No-witness-in-prefix",
            Verdict::Unknown => "Unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub verdict: Verdict,
    pub evidence: Vec<String>,
}

/// `A_n·Z² ⊃ Δ_n·Z² ⊃ A_{n'}·Z²` for consecutive witness stages `n < n'`
/// (1-based), with `Δ_n = diag(m_1(A_n), m_2(A_n))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalSandwich {
    pub stage: usize,
    pub next_stage: usize,
    pub delta: Vec<BigInt>,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub flat: Finding,
    pub xy_product: Finding,
    pub pure_product: Finding,
    /// 1-based stages of the longest product witness.
    pub witness: Option<Vec<usize>>,
    pub sandwich: Vec<DiagonalSandwich>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn class_name(&self) -> &'static str {
        use Verdict::*;
        match (self.flat.verdict, self.xy_product.verdict) {
            (Yes, Yes) => "pure product",
            (Yes, NoWitnessInPrefix) => "flat, no (x,y)-product witness in prefix",
            (No, Yes) => "(x,y)-product, not flat",
            (No, NoWitnessInPrefix) => "not flat, no (x,y)-product witness in prefix",
            _ => "undetermined from this prefix",
        }
    }
}

fn fmt_stages(v: &[usize]) -> String {
    v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

fn flat_finding(chain: &OdometerChain) -> Finding {
    let diags = &chain.diagnostics;
    if chain.stages.iter().all(SubgroupTriple::is_flat) {
        return Finding {
            verdict: Verdict::Yes,
            evidence: vec!["i = 0 at every stage".to_string()],
        };
    }
    let d = &diags[0].defect;
    let constant = diags.iter().all(|s| &s.defect == d);
    let growing = diags.windows(2).all(|w| w[1].m > w[0].m);
    if diags.len() >= 2 && constant && growing {
        let ms: Vec<String> = diags.iter().map(|s| s.m.to_string()).collect();
        return Finding {
            verdict: Verdict::No,
            evidence: vec![
                format!("defect gcd(i1, i2, m_n) = {} at every stage", d),
                format!("m_n strictly increasing: {}", ms.join(", ")),
                format!(
                    "every stage contains an element with z = {}, so a flat factor would need m'_n | {} for all n",
                    d, d
                ),
                "asymptotic certificate: valid if the exhibited pattern persists".to_string(),
            ],
        };
    }
    let defects: Vec<String> = diags.iter().map(|s| s.defect.to_string()).collect();
    Finding {
        verdict: Verdict::Unknown,
        evidence: vec![format!(
            "not flat as given, and no bounded-defect pattern (defects: {})",
            defects.join(", ")
        )],
    }
}

pub fn classify(chain: &OdometerChain) -> ClassificationReport {
    let lattices = associated_z2(chain);
    let n = lattices.len();
    let flat = flat_finding(chain);

    let witness = product_witness(&lattices);
    let mut sandwich = Vec::new();
    let xy_product = match &witness {
        None if n < 2 => Finding {
            verdict: Verdict::Unknown,
            evidence: vec!["a single stage carries no product information".to_string()],
        },
        None => Finding {
            verdict: Verdict::NoWitnessInPrefix,
            evidence: vec![format!(
                "no pair of stages n < n' has m_k(A_n) | row_k(A_n') for k = 1, 2 (checked {} pairs)",
                n * (n - 1) / 2
            )],
        },
        Some(w) => {
            let stages: Vec<usize> = w.iter().map(|k| k + 1).collect();
            for pair in w.windows(2) {
                let a = &lattices[pair[0]];
                let b = &lattices[pair[1]];
                let delta: Vec<BigInt> = (0..2).map(|k| a.min_multiple(k).expect("nonsingular")).collect();
                let dl = LatticeBasis::diagonal(&delta).expect("positive diagonal");
                let verified = a.contains(&dl).unwrap_or(false) && dl.contains(b).unwrap_or(false);
                sandwich.push(DiagonalSandwich {
                    stage: pair[0] + 1,
                    next_stage: pair[1] + 1,
                    delta,
                    verified,
                });
            }
            let mut evidence = vec![format!(
                "m_k(A_n) | row_k(A_n') along stages {}",
                fmt_stages(&stages)
            )];
            for s in &sandwich {
                evidence.push(format!(
                    "A_{} ⊃ diag({}, {}) ⊃ A_{}{}",
                    s.stage,
                    s.delta[0],
                    s.delta[1],
                    s.next_stage,
                    if s.verified { "" } else { " FAILED" }
                ));
            }
            if w.len() == n {
                Finding {
                    verdict: Verdict::Yes,
                    evidence,
                }
            } else {
                evidence.push(format!("witness covers {} of {} stages", w.len(), n));
                Finding {
                    verdict: Verdict::Unknown,
                    evidence,
                }
            }
        }
    };

    let pure_product = match (flat.verdict, xy_product.verdict) {
        (Verdict::Yes, Verdict::Yes) => Finding {
            verdict: Verdict::Yes,
            evidence: vec!["flat and (x,y)-product".to_string()],
        },
        (Verdict::No, _) => Finding {
            verdict: Verdict::No,
            evidence: vec!["not flat".to_string()],
        },
        _ => Finding {
            verdict: Verdict::Unknown,
            evidence: vec!["requires both flat and (x,y)-product".to_string()],
        },
    };

    let mut notes = vec![chain.triviality.to_string()];
    for s in &chain.diagnostics {
        let mk: Vec<String> = (0..2)
            .map(|k| lattices[s.stage - 1].min_multiple(k).expect("nonsingular").to_string())
            .collect();
        notes.push(format!("stage {}: m_1(A) = {}, m_2(A) = {}", s.stage, mk[0], mk[1]));
    }

    ClassificationReport {
        flat,
        xy_product,
        pure_product,
        witness: witness.map(|w| w.into_iter().map(|k| k + 1).collect()),
        sandwich,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;
    use crate::lattice::IntMatrix;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn cormat(n: u32) -> [[BigInt; 2]; 2] {
        let p3 = BigInt::from(3).pow(n);
        let p11 = BigInt::from(11).pow(n);
        [
            [&p3 * 3, &p11 * 7],
            [&p3 * 7, &p11 * 11],
        ]
    }

    fn scaled(k: &BigInt, c: [[BigInt; 2]; 2]) -> IntMatrix {
        IntMatrix::from_rows(c.iter().map(|r| r.iter().map(|e| k * e).collect()).collect()).unwrap()
    }

    fn pure_product_stages() -> Vec<SubgroupTriple> {
        (1..=4)
            .map(|n| {
                let k = 1i64 << n;
                crate::subgroup::triple_i64([[k, 0], [0, k]], k, [0, 0]).unwrap()
            })
            .collect()
    }

    fn flat_non_product_stages() -> Vec<SubgroupTriple> {
        (1..=3)
            .map(|n| {
                let k = BigInt::from(2).pow(n);
                SubgroupTriple::new(&scaled(&k, cormat(n)), k, [b(0), b(0)]).unwrap()
            })
            .collect()
    }

    fn kn() -> [i64; 3] {
        [2, 6, 42]
    }

    fn xy_product_stages() -> Vec<SubgroupTriple> {
        kn().iter()
            .map(|&k| crate::subgroup::triple_i64([[k, 0], [0, k]], k, [1, 0]).unwrap())
            .collect()
    }

    fn neither_stages() -> Vec<SubgroupTriple> {
        (1..=3u32)
            .map(|n| {
                let k = BigInt::from(kn()[n as usize - 1]);
                let c = cormat(n);
                let ivals = [c[0][0].clone(), c[0][1].clone()];
                SubgroupTriple::new(&scaled(&k, c), k, ivals).unwrap()
            })
            .collect()
    }

    #[test]
    fn bundled_patterns_validate() {
        for stages in [
            pure_product_stages(),
            flat_non_product_stages(),
            xy_product_stages(),
            neither_stages(),
        ] {
            let chain = validate_chain(stages).unwrap();
            assert_eq!(chain.triviality(), &Triviality::Consistent);
        }
    }

    #[test]
    fn i_conflict_is_not_nested() {
        let stages = vec![
            crate::subgroup::triple_i64([[2, 0], [0, 2]], 2, [0, 0]).unwrap(),
            crate::subgroup::triple_i64([[2, 0], [0, 2]], 2, [1, 0]).unwrap(),
        ];
        assert_eq!(validate_chain(stages), Err(ChainError::NotNested(1)));
        assert_eq!(validate_chain(vec![]), Err(ChainError::Empty));
    }

    #[test]
    fn non_normal_stage_rejected() {
        let nn = SubgroupTriple::new_allow_non_normal(&IntMatrix::from([[2, 0], [0, 2]]), 4, [b(0), b(0)]).unwrap();
        let stages = vec![SubgroupTriple::whole(), nn];
        assert_eq!(validate_chain(stages), Err(ChainError::NotNormal(2)));
    }

    #[test]
    fn repeated_stage_is_stagnant() {
        let t = crate::subgroup::triple_i64([[2, 0], [0, 2]], 2, [0, 0]).unwrap();
        let chain = validate_chain(vec![t.clone(), t]).unwrap();
        assert!(matches!(chain.triviality(), Triviality::Stagnant { stage: 1, .. }));
    }

    #[test]
    fn associated_lattices() {
        let chain = validate_chain(pure_product_stages()).unwrap();
        let lats = chain.associated_z2();
        for (n, l) in lats.iter().enumerate() {
            let k = b(1 << (n + 1));
            assert_eq!(l, &LatticeBasis::diagonal(&[k.clone(), k]).unwrap());
        }
        let single = validate_chain(vec![pure_product_stages().remove(0)]).unwrap();
        assert_eq!(single.associated_z2(), vec![LatticeBasis::diagonal(&[b(2), b(2)]).unwrap()]);

        let chain = validate_chain(flat_non_product_stages()).unwrap();
        for (n, l) in chain.associated_z2().iter().enumerate() {
            let n = n as u32 + 1;
            let k = BigInt::from(2).pow(n);
            assert_eq!(l, &LatticeBasis::from_matrix(&scaled(&k, cormat(n))).unwrap());
        }
    }

    #[test]
    fn witness_examples() {
        let diag: Vec<LatticeBasis> = validate_chain(pure_product_stages()).unwrap().associated_z2();
        assert_eq!(product_witness(&diag), Some(vec![0, 1, 2, 3]));

        let raw: Vec<LatticeBasis> = (1..=3)
            .map(|n| LatticeBasis::from_matrix(&scaled(&b(1), cormat(n))).unwrap())
            .collect();
        assert_eq!(product_witness(&raw), None);
        for (n, l) in raw.iter().enumerate() {
            let expect = b(16) * BigInt::from(33).pow(n as u32 + 1);
            assert_eq!(l.min_multiple(0).unwrap(), expect);
            assert_eq!(l.min_multiple(1).unwrap(), expect);
        }

        let ex = validate_chain(flat_non_product_stages()).unwrap().associated_z2();
        assert_eq!(product_witness(&ex), None);
    }

    #[test]
    fn partial_witness_is_unknown() {
        // stage 2 breaks the pattern, stage 3 refines stage 1 directly
        let stages = vec![
            crate::subgroup::triple_i64([[2, 0], [1, 2]], 1, [0, 0]).unwrap(),
            crate::subgroup::triple_i64([[2, 0], [1, 4]], 1, [0, 0]).unwrap(),
            crate::subgroup::triple_i64([[4, 0], [2, 4]], 1, [0, 0]).unwrap(),
        ];
        let chain = validate_chain(stages).unwrap();
        let report = classify(&chain);
        assert_eq!(report.witness, Some(vec![1, 3]));
        assert_eq!(report.xy_product.verdict, Verdict::Unknown);
    }

    #[test]
    fn classification_of_four_patterns() {
        let r = classify(&validate_chain(pure_product_stages()).unwrap());
        assert_eq!((r.flat.verdict, r.xy_product.verdict, r.pure_product.verdict), (Verdict::Yes, Verdict::Yes, Verdict::Yes));
        assert!(r.sandwich.iter().all(|s| s.verified));
        assert_eq!(r.sandwich.len(), 3);
        assert_eq!(r.class_name(), "pure product");

        let r = classify(&validate_chain(flat_non_product_stages()).unwrap());
        assert_eq!((r.flat.verdict, r.xy_product.verdict), (Verdict::Yes, Verdict::NoWitnessInPrefix));
        assert_eq!(r.pure_product.verdict, Verdict::Unknown);

        let r = classify(&validate_chain(xy_product_stages()).unwrap());
        assert_eq!((r.flat.verdict, r.xy_product.verdict), (Verdict::No, Verdict::Yes));
        assert!(r.flat.evidence[0].contains("= 1 at every stage"));
        assert_eq!(r.pure_product.verdict, Verdict::No);

        let r = classify(&validate_chain(neither_stages()).unwrap());
        assert_eq!((r.flat.verdict, r.xy_product.verdict), (Verdict::No, Verdict::NoWitnessInPrefix));
    }

    #[test]
    fn single_stage_product_is_unknown() {
        let chain = validate_chain(vec![pure_product_stages().remove(0)]).unwrap();
        let r = classify(&chain);
        assert_eq!(r.flat.verdict, Verdict::Yes);
        assert_eq!(r.xy_product.verdict, Verdict::Unknown);
        assert_eq!(r.pure_product.verdict, Verdict::Unknown);
    }

    #[test]
    fn witness_rechecked_by_scan() {
        for stages in [pure_product_stages(), xy_product_stages()] {
            let lats: Vec<LatticeBasis> = stages.iter().map(|t| t.lat().clone()).collect();
            let w = product_witness(&lats).unwrap();
            for pair in w.windows(2) {
                for k in 0..2 {
                    let mk = lats[pair[0]].min_multiple_by_scan(k, 1_000_000).unwrap();
                    for e in lats[pair[1]].matrix().row(k) {
                        assert!(divides(&mk, e));
                    }
                }
            }
        }
    }

    /// gcd of z-values over members `(x, y, z)` with `|x|,|y| ≤ r` and `z` in
    /// one period.
    fn defect_by_members(t: &SubgroupTriple, r: i64) -> BigInt {
        let mut g = t.m().clone();
        for x in -r..=r {
            for y in -r..=r {
                let xy = [b(x), b(y)];
                if let Some(i) = t.i_value(&xy) {
                    let member = GroupElement::new(x, y, i);
                    assert!(t.member(&member));
                    g = g.gcd(&member.z);
                }
            }
        }
        g
    }

    #[test]
    fn defect_matches_member_scan() {
        let stages: Vec<SubgroupTriple> = xy_product_stages()[..2]
            .iter()
            .chain(&pure_product_stages()[..2])
            .cloned()
            .collect();
        for t in &stages {
            let r: i64 = (t.lat().diag(0) * 2u32).try_into().unwrap();
            assert_eq!(defect_by_members(t, r), t.defect());
        }
    }

    fn small_normal() -> impl Strategy<Value = SubgroupTriple> {
        (1i64..=4, 1i64..=3, 1i64..=3, 0i64..3, 0i64..12, 0i64..12).prop_map(|(m, a, d, c, i1, i2)| {
            crate::subgroup::triple_i64([[m * a, 0], [m * c, m * d]], m, [i1, i2]).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn defect_equals_member_gcd(t in small_normal()) {
            let r: i64 = (t.lat().diag(0) + t.lat().diag(1)).try_into().unwrap();
            prop_assert_eq!(defect_by_members(&t, r), t.defect());
        }

        #[test]
        fn full_witness_implies_sandwich(ks in proptest::collection::vec(1i64..=3, 2..4)) {
            // diagonal chains with growing factors always carry a full witness
            let mut acc = 1i64;
            let mut stages = Vec::new();
            for f in ks {
                acc *= f + 1;
                stages.push(crate::subgroup::triple_i64([[acc, 0], [0, acc * 2]], 1, [0, 0]).unwrap());
            }
            let chain = validate_chain(stages).unwrap();
            let r = classify(&chain);
            prop_assert_eq!(r.xy_product.verdict, Verdict::Yes);
            prop_assert!(r.sandwich.iter().all(|s| s.verified));
        }
    }
}
