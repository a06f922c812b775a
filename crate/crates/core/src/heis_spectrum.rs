//! Finite-dimensional irreducible representations of H that factor through a
//! finite quotient `H/Γ`, in the parametrization by triples `(α, ξ, ℓ/p)`:
//!
//! ```text
//! U(x,y,z) ε_j = e^{2πi c(j')} ε_{j'},   j' = (j − x) mod p,
//! c(j') = yξ + (z + j'y)·ℓ/p + ⌊(x + j')/p⌋·α
//! ```
//!
//! The exponent is evaluated at the target index `j'`; this is what makes the
//! map multiplicative under `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`.
//! A triple factors through `H/Γ` exactly when `p | m` and
//! `(x/p)·α + y·ξ + i(x,y)·ℓ/p ∈ Z` on the lattice of Γ.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::chain::OdometerChain;
use crate::coset_sim::{CosetSpace, SimError};
use crate::group::GroupElement;
use crate::int::{divides, divisors, gcd_u64};
use crate::lattice::{IntMatrix, LatticeBasis, LatticeError};
use crate::subgroup::SubgroupTriple;
use crate::zd_spectrum::{eigenvalues, solve_transpose, EigenPair, Phase};

/// Decision band for character inner products.
pub const INNER_PRODUCT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("modulus {0} is too large to factor")]
    ModulusTooLarge(BigInt),
    #[error("triple {0} does not factor through the quotient")]
    NotQuotientRep(Box<SpectralTriple>),
    #[error("inner product of {a} and {b} is {value}, outside the decision band")]
    NumericalAmbiguity {
        a: Box<SpectralTriple>,
        b: Box<SpectralTriple>,
        value: f64,
    },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// `(α, ξ, ℓ/p)` with `gcd(ℓ, p) = 1`, `0 ≤ ℓ < p` (`ℓ = 0` only for `p = 1`).
/// Ordered by `(p, ℓ, α, ξ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectralTriple {
    pub p: u64,
    pub ell: u64,
    pub alpha: Phase,
    pub xi: Phase,
}

impl SpectralTriple {
    /// Panics unless `ℓ/p` is reduced with `0 ≤ ℓ < p`.
    pub fn new(alpha: Phase, xi: Phase, ell: u64, p: u64) -> Self {
        assert!(p >= 1 && ell < p && gcd_u64(ell, p) == 1 || (p == 1 && ell == 0));
        SpectralTriple { p, ell, alpha, xi }
    }

    pub fn eta(&self) -> Phase {
        Phase::new(self.ell, self.p)
    }

    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.p,
            self.ell,
            self.alpha.num(),
            self.alpha.den(),
            self.xi.num(),
            self.xi.den()
        )
    }
}

impl fmt::Display for SpectralTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}/{})", self.alpha, self.xi, self.ell, self.p)
    }
}

/// `M ε_j = e^{2πi·phases[j]} ε_{perm[j]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMatrix {
    pub perm: Vec<usize>,
    pub phases: Vec<Phase>,
}

impl MonomialMatrix {
    pub fn identity(p: usize) -> Self {
        MonomialMatrix {
            perm: (0..p).collect(),
            phases: vec![Phase::zero(); p],
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// `self · other`.
    pub fn compose(&self, other: &MonomialMatrix) -> MonomialMatrix {
        let perm = other.perm.iter().map(|&k| self.perm[k]).collect();
        let phases = other
            .phases
            .iter()
            .zip(&other.perm)
            .map(|(ph, &k)| ph + &self.phases[k])
            .collect();
        MonomialMatrix { perm, phases }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(j, &k)| j == k) && self.phases.iter().all(Phase::is_zero)
    }

    /// Phases on the diagonal; the trace is the sum of their exponentials.
    pub fn trace_phases(&self) -> Vec<Phase> {
        let mut v: Vec<Phase> = self
            .perm
            .iter()
            .enumerate()
            .filter(|(j, &k)| *j == k)
            .map(|(j, _)| self.phases[j].clone())
            .collect();
        v.sort();
        v
    }

    pub fn trace(&self) -> Complex64 {
        self.trace_phases().iter().map(unit).sum()
    }
}

fn unit(ph: &Phase) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * ph.to_f64())
}

pub fn build_rep(t: &SpectralTriple, g: &GroupElement) -> MonomialMatrix {
    let p = BigInt::from(t.p);
    // Numerators over the common denominator d.
    let d = t.alpha.den().lcm(t.xi.den()).lcm(&p);
    let a = t.alpha.num() * (&d / t.alpha.den());
    let e = BigInt::from(t.ell) * (&d / &p);
    let base = &g.y * t.xi.num() * (&d / t.xi.den());
    let mut perm = Vec::with_capacity(t.p as usize);
    let mut phases = Vec::with_capacity(t.p as usize);
    for j in 0..t.p {
        let target = (BigInt::from(j) - &g.x).mod_floor(&p);
        let jt = target.to_usize().expect("target index below p");
        let level = (&g.x + &target).div_floor(&p);
        let c = &base + (&g.z + &target * &g.y) * &e + level * &a;
        perm.push(jt);
        phases.push(Phase::new(c.mod_floor(&d), d.clone()));
    }
    MonomialMatrix { perm, phases }
}

/// `true` when `t` factors through `H/Γ`.
pub fn admits(sub: &SubgroupTriple, t: &SpectralTriple) -> bool {
    let p = BigInt::from(t.p);
    if !sub.is_normal() || !divides(&p, sub.m()) {
        return false;
    }
    let eta = t.eta();
    sub.lat().columns().iter().zip(sub.ivals()).all(|(c, i)| {
        if !divides(&p, &c[0]) {
            return false;
        }
        let s = &(&t.alpha.scale(&(&c[0] / &p)) + &t.xi.scale(&c[1])) + &eta.scale(i);
        s.is_zero()
    })
}

/// Least 1-based stage admitting `t`.
pub fn stage_of(chain: &OdometerChain, t: &SpectralTriple) -> Option<usize> {
    chain.stages().iter().position(|s| admits(s, t)).map(|k| k + 1)
}

/// Solutions `(α, ξ)` of `(x_c/p)·α + y_c·ξ ≡ −i(c)·ℓ/p` over the basis
/// columns: a particular solution plus the eigenvalues of `diag(1/p, 1)·A`.
fn cell(sub: &SubgroupTriple, p: u64, ell: u64) -> Result<Vec<SpectralTriple>, SpectrumError> {
    let pb = BigInt::from(p);
    let a = sub.lat().matrix();
    let mut rows = a.to_rows();
    for e in rows[0].iter_mut() {
        *e = &*e / &pb;
    }
    let b = IntMatrix::from_rows(rows)?;
    let rhs = sub
        .ivals()
        .clone()
        .map(|i| -BigRational::new(i * BigInt::from(ell), pb.clone()));
    let w0 = solve_transpose(&b, rhs);
    let kernel = eigenvalues(&LatticeBasis::from_matrix(&b)?)?;
    let mut out: Vec<SpectralTriple> = kernel
        .iter()
        .map(|e| {
            let w = &w0 + e;
            SpectralTriple::new(w.alpha, w.xi, ell, p)
        })
        .collect();
    out.sort();
    Ok(out)
}

fn cells(m: &BigInt) -> Result<Vec<(u64, u64)>, SpectrumError> {
    let ps = divisors(m).ok_or_else(|| SpectrumError::ModulusTooLarge(m.clone()))?;
    let mut out = Vec::new();
    for p in ps {
        if p == 1 {
            out.push((1, 0));
            continue;
        }
        for ell in 1..p {
            if gcd_u64(ell, p) == 1 {
                out.push((p, ell));
            }
        }
    }
    Ok(out)
}

/// Every triple factoring through `H/Γ`, sorted; `|det A|/p` per `(p, ℓ)` cell.
pub fn spectral_triples(sub: &SubgroupTriple) -> Result<Vec<SpectralTriple>, SpectrumError> {
    if !sub.is_normal() {
        return Err(SpectrumError::NotNormal);
    }
    let mut out = Vec::new();
    for (p, ell) in cells(sub.m())? {
        out.extend(cell(sub, p, ell)?);
    }
    Ok(out)
}

/// Character of a triple on `H/Γ`: exact diagonal phases per coset plus a
/// floating-point evaluation.
#[derive(Clone, Debug)]
pub struct Character {
    pub triple: SpectralTriple,
    pub phases: Vec<Vec<Phase>>,
    pub values: Vec<Complex64>,
}

pub fn character(t: &SpectralTriple, cosets: &CosetSpace) -> Result<Character, SpectrumError> {
    if !admits(cosets.subgroup(), t) {
        return Err(SpectrumError::NotQuotientRep(Box::new(t.clone())));
    }
    let phases: Vec<Vec<Phase>> = cosets
        .reps()
        .iter()
        .map(|c| {
            // No fixed points unless p | x.
            if (&c.x % BigInt::from(t.p)).is_zero() {
                build_rep(t, c).trace_phases()
            } else {
                Vec::new()
            }
        })
        .collect();
    let values = phases.iter().map(|ps| ps.iter().map(unit).sum()).collect();
    Ok(Character {
        triple: t.clone(),
        phases,
        values,
    })
}

/// Neumaier-compensated sum.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `(1/|G|) Σ χ(g)·conj χ'(g)`.
pub fn inner_product(a: &Character, b: &Character) -> Complex64 {
    let n = a.values.len() as f64;
    let terms: Vec<Complex64> = a.values.iter().zip(&b.values).map(|(x, y)| x * y.conj()).collect();
    let re = compensated_sum(terms.iter().map(|z| z.re));
    let im = compensated_sum(terms.iter().map(|z| z.im));
    Complex64::new(re / n, im / n)
}

/// Classifies an inner product as 0 or 1, or reports it as ambiguous.
fn decide(v: Complex64) -> Option<bool> {
    let tol = INNER_PRODUCT_TOLERANCE;
    if v.im.abs() > tol {
        return None;
    }
    if v.re.abs() <= tol {
        Some(false)
    } else if (v.re - 1.0).abs() <= tol {
        Some(true)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrepClass {
    pub representative: SpectralTriple,
    pub members: Vec<SpectralTriple>,
}

impl IrrepClass {
    pub fn dim(&self) -> u64 {
        self.representative.p
    }
}

/// Groups equivalent triples by comparing characters within each `(p, ℓ)`
/// cell. Classes come out sorted by representative, the least member.
pub fn dedup(triples: &[SpectralTriple], cosets: &CosetSpace) -> Result<Vec<IrrepClass>, SpectrumError> {
    let mut by_cell: BTreeMap<(u64, u64), Vec<&SpectralTriple>> = BTreeMap::new();
    for t in triples {
        by_cell.entry((t.p, t.ell)).or_default().push(t);
    }
    let mut classes = Vec::new();
    for (_, mut members) in by_cell {
        members.sort();
        members.dedup();
        let mut reps: Vec<(Character, Vec<SpectralTriple>)> = Vec::new();
        for t in members {
            let chi = character(t, cosets)?;
            let mut placed = false;
            for (rep, group) in reps.iter_mut() {
                let v = inner_product(&chi, rep);
                match decide(v) {
                    Some(true) => {
                        group.push(t.clone());
                        placed = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        return Err(SpectrumError::NumericalAmbiguity {
                            a: Box::new(t.clone()),
                            b: Box::new(rep.triple.clone()),
                            value: v.re,
                        })
                    }
                }
            }
            if !placed {
                reps.push((chi, vec![t.clone()]));
            }
        }
        for (rep, members) in reps {
            classes.push(IrrepClass {
                representative: rep.triple,
                members,
            });
        }
    }
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(classes)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessReport {
    /// Class representatives not trivial on some generator of Γ.
    pub not_trivial_on_subgroup: Vec<SpectralTriple>,
    /// Class representatives with `⟨χ,χ⟩` outside the band around 1.
    pub not_irreducible: Vec<(SpectralTriple, f64)>,
    pub sum_p_squared: BigInt,
    pub index: BigInt,
}

impl CompletenessReport {
    pub fn passed(&self) -> bool {
        self.not_trivial_on_subgroup.is_empty() && self.not_irreducible.is_empty() && self.sum_p_squared == self.index
    }

    /// `sum p^2 = N = |G| OK` or a failure line naming the failed checks.
    pub fn certificate_line(&self) -> String {
        if self.passed() {
            return format!("sum p^2 = {} = |G| OK", self.sum_p_squared);
        }
        let mut why = Vec::new();
        if !self.not_trivial_on_subgroup.is_empty() {
            let ts: Vec<String> = self.not_trivial_on_subgroup.iter().map(|t| t.to_string()).collect();
            why.push(format!("(a) not trivial on the subgroup: {}", ts.join(" ")));
        }
        if !self.not_irreducible.is_empty() {
            let ts: Vec<String> = self
                .not_irreducible
                .iter()
                .map(|(t, v)| format!("{} <chi,chi> = {}", t, v))
                .collect();
            why.push(format!("(b) not irreducible: {}", ts.join(" ")));
        }
        if self.sum_p_squared != self.index {
            why.push("(c) dimensions do not exhaust the group".to_string());
        }
        format!(
            "sum p^2 = {} != |G| = {} FAILED {}",
            self.sum_p_squared,
            self.index,
            why.join("; ")
        )
    }
}

pub fn verify_complete(
    classes: &[IrrepClass],
    sub: &SubgroupTriple,
    cosets: &CosetSpace,
) -> Result<CompletenessReport, SpectrumError> {
    let gens = sub.generators();
    let mut not_trivial = Vec::new();
    let mut not_irreducible = Vec::new();
    let mut sum = BigInt::zero();
    for class in classes {
        let t = &class.representative;
        sum += BigInt::from(t.p) * BigInt::from(t.p);
        if !gens.iter().all(|g| build_rep(t, g).is_identity()) {
            not_trivial.push(t.clone());
            continue;
        }
        let chi = character(t, cosets)?;
        let v = inner_product(&chi, &chi);
        if decide(v) != Some(true) {
            not_irreducible.push((t.clone(), v.re));
        }
    }
    Ok(CompletenessReport {
        not_trivial_on_subgroup: not_trivial,
        not_irreducible,
        sum_p_squared: sum,
        index: sub.index(),
    })
}

/// Triples, classes and the completeness report for one subgroup.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub triples: Vec<SpectralTriple>,
    pub classes: Vec<IrrepClass>,
    pub report: CompletenessReport,
}

impl Decomposition {
    /// Class index of every triple, by position in `classes`.
    pub fn class_ids(&self) -> BTreeMap<&SpectralTriple, usize> {
        let mut ids = BTreeMap::new();
        for (k, c) in self.classes.iter().enumerate() {
            for t in &c.members {
                ids.insert(t, k);
            }
        }
        ids
    }
}

pub fn decompose(sub: &SubgroupTriple) -> Result<Decomposition, SpectrumError> {
    let cosets = CosetSpace::new(sub)?;
    let triples = spectral_triples(sub)?;
    let classes = dedup(&triples, &cosets)?;
    let report = verify_complete(&classes, sub, &cosets)?;
    Ok(Decomposition {
        triples,
        classes,
        report,
    })
}

pub const CSV_HEADER: &str = "p,ell,alpha_num,alpha_den,xi_num,xi_den,class_id";

/// Sorted rows; `class_id` is left empty when no classes are given.
pub fn to_csv(triples: &[SpectralTriple], classes: Option<&[IrrepClass]>) -> String {
    let mut ids = BTreeMap::new();
    if let Some(cs) = classes {
        for (k, c) in cs.iter().enumerate() {
            for t in &c.members {
                ids.insert(t, k);
            }
        }
    }
    let mut sorted: Vec<&SpectralTriple> = triples.iter().collect();
    sorted.sort();
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for t in sorted {
        let id = ids.get(t).map(|k| k.to_string()).unwrap_or_default();
        s.push_str(&format!("{},{}\n", t.csv_fields(), id));
    }
    s
}

/// The one-dimensional slice as eigenvalue pairs.
pub fn one_dimensional(triples: &[SpectralTriple]) -> Vec<EigenPair> {
    triples
        .iter()
        .filter(|t| t.p == 1)
        .map(|t| EigenPair::new(t.alpha.clone(), t.xi.clone()))
        .collect()
}
