//! Eigenvalues of Z² odometers.
//!
//! A pair `(α, ξ) ∈ (Q/Z)²` is an eigenvalue at stage `A` when the character
//! `(x, y) ↦ e^{2πi(αx + ξy)}` is trivial on `A·Z²`, i.e. `Aᵀ(α, ξ)ᵀ ∈ Z²`.
//! These form the group `E(A) = (Aᵀ)⁻¹Z² / Z²` of order `|det A|`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::int::ext_gcd;
use crate::lattice::{diag_factor, IntMatrix, LatticeBasis, LatticeError};

/// An element of Q/Z, stored reduced in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(BigRational);

impl Phase {
    pub fn zero() -> Self {
        Phase(BigRational::zero())
    }

    /// `num/den mod 1`. Panics when `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Phase::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_rational(r: BigRational) -> Self {
        let f = r.floor();
        Phase(r - f)
    }

    pub fn num(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn den(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `k·self mod 1`.
    pub fn scale(&self, k: &BigInt) -> Phase {
        Phase::from_rational(&self.0 * BigRational::from_integer(k.clone()))
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(0.0)
    }
}

impl Add for &Phase {
    type Output = Phase;
    fn add(self, rhs: &Phase) -> Phase {
        Phase::from_rational(&self.0 + &rhs.0)
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        &self + &rhs
    }
}

impl Sub for &Phase {
    type Output = Phase;
    fn sub(self, rhs: &Phase) -> Phase {
        Phase::from_rational(&self.0 - &rhs.0)
    }
}

impl Neg for &Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase::from_rational(-&self.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EigenPair {
    pub alpha: Phase,
    pub xi: Phase,
}

impl EigenPair {
    pub fn new(alpha: Phase, xi: Phase) -> Self {
        EigenPair { alpha, xi }
    }

    pub fn zero() -> Self {
        EigenPair::new(Phase::zero(), Phase::zero())
    }

    /// `x·α + y·ξ mod 1`.
    pub fn pairing(&self, x: &BigInt, y: &BigInt) -> Phase {
        &self.alpha.scale(x) + &self.xi.scale(y)
    }

    /// `true` when the character is trivial on every column of `lat`.
    pub fn annihilates(&self, lat: &LatticeBasis) -> bool {
        lat.columns().iter().all(|c| self.pairing(&c[0], &c[1]).is_zero())
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.alpha.num(), self.alpha.den(), self.xi.num(), self.xi.den())
    }
}

impl Add for &EigenPair {
    type Output = EigenPair;
    fn add(self, rhs: &EigenPair) -> EigenPair {
        EigenPair::new(&self.alpha + &rhs.alpha, &self.xi + &rhs.xi)
    }
}

impl fmt::Display for EigenPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.xi)
    }
}

pub const CSV_HEADER: &str = "alpha_num,alpha_den,xi_num,xi_den";

/// `(Mᵀ)⁻¹·v mod 1` for a 2×2 matrix `M` and any rational vector `v`.
pub(crate) fn solve_transpose(m: &IntMatrix, v: [BigRational; 2]) -> EigenPair {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let det = BigRational::from_integer(a * d - b * c);
    let r = |x: &BigInt| BigRational::from_integer(x.clone());
    // Mᵀ = [[a, c], [b, d]], inverse = [[d, -c], [-b, a]] / det
    let alpha = (r(d) * &v[0] - r(c) * &v[1]) / &det;
    let xi = (r(a) * &v[1] - r(b) * &v[0]) / &det;
    EigenPair::new(Phase::from_rational(alpha), Phase::from_rational(xi))
}

/// `E(A)`: all `|det A|` eigenvalues of the stage, from the coset
/// representatives of `Aᵀ·Z²`.
pub fn eigenvalues(lat: &LatticeBasis) -> Result<BTreeSet<EigenPair>, LatticeError> {
    if lat.dim() != 2 {
        return Err(LatticeError::UnsupportedDimension(lat.dim()));
    }
    let a = lat.matrix();
    let dual = LatticeBasis::from_matrix(&a.transpose())?;
    let reps = dual.coset_reps()?;
    Ok(reps
        .into_iter()
        .map(|v| {
            let [x, y] = [v[0].clone(), v[1].clone()].map(BigRational::from_integer);
            solve_transpose(a, [x, y])
        })
        .collect())
}

/// Least `u ≥ 0` (when a choice exists) with `d·u − c·v = 1`; requires `gcd(c, d) = 1`.
fn unimodular_uv(c: &BigInt, d: &BigInt) -> (BigInt, BigInt) {
    if c.is_zero() {
        // d = ±1 since the row is coprime
        return (d.clone(), BigInt::zero());
    }
    let modulus = c.abs();
    let (_, s, _) = ext_gcd(d, &modulus);
    let u = s.mod_floor(&modulus);
    let v = (d * &u - BigInt::one()) / c;
    (u, v)
}

/// The explicit listing of `E(A)` through `A = Δ·Â`: with `d̂u − ĉv = 1` and
/// `ℓ̂ = −b̂u + âv`, the pairs
/// `((q + j·det Â)/(g₁·det Â), (q·ℓ̂ + j'·det Â)/(g₂·det Â))`
/// for `0 ≤ q < |det Â|`, `0 ≤ j < g₁`, `0 ≤ j' < g₂`, where `g₁, g₂` are the
/// row gcds of `A`.
pub fn eigenvalues_listed(a: &IntMatrix) -> Result<Vec<EigenPair>, LatticeError> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(LatticeError::UnsupportedDimension(a.rows()));
    }
    let f = diag_factor(a)?;
    let h = &f.ahat;
    let (ah, bh, ch, dh) = (h.get(0, 0), h.get(0, 1), h.get(1, 0), h.get(1, 1));
    let det_hat = ah * dh - bh * ch;
    let (u, v) = unimodular_uv(ch, dh);
    debug_assert!((dh * &u - ch * &v).is_one());
    let ell_hat = -(bh * &u) + ah * &v;
    let g1 = f.delta_entry(0).clone();
    let g2 = f.delta_entry(1).clone();
    let span = det_hat.abs();
    let mut out = Vec::new();
    let mut q = BigInt::zero();
    while q < span {
        let mut j = BigInt::zero();
        while j < g1 {
            let mut jp = BigInt::zero();
            while jp < g2 {
                let alpha = Phase::new(&q + &j * &det_hat, &g1 * &det_hat);
                let xi = Phase::new(&q * &ell_hat + &jp * &det_hat, &g2 * &det_hat);
                out.push(EigenPair::new(alpha, xi));
                jp += 1;
            }
            j += 1;
        }
        q += 1;
    }
    Ok(out)
}

/// `Δ⁻¹·E(Â) + E(Δ)` computed from the two factors separately.
pub fn eigenvalues_decomposed(a: &IntMatrix) -> Result<BTreeSet<EigenPair>, LatticeError> {
    let f = diag_factor(a)?;
    let e_hat = eigenvalues(&LatticeBasis::from_matrix(&f.ahat)?)?;
    let e_delta = eigenvalues(&LatticeBasis::from_matrix(&f.delta)?)?;
    let g = [f.delta_entry(0).clone(), f.delta_entry(1).clone()];
    let shrink = |p: &Phase, k: &BigInt| Phase::from_rational(p.as_rational() / BigRational::from_integer(k.clone()));
    let mut out = BTreeSet::new();
    for e in &e_hat {
        let scaled = EigenPair::new(shrink(&e.alpha, &g[0]), shrink(&e.xi, &g[1]));
        for d in &e_delta {
            out.insert(&scaled + d);
        }
    }
    Ok(out)
}

/// Least 1-based stage whose lattice is annihilated by `pair`.
pub fn eigen_stage(chain: &[LatticeBasis], pair: &EigenPair) -> Option<usize> {
    chain.iter().position(|l| pair.annihilates(l)).map(|k| k + 1)
}

/// Header plus one sorted row per pair.
pub fn to_csv<'a>(pairs: impl IntoIterator<Item = &'a EigenPair>) -> String {
    let sorted: BTreeSet<&EigenPair> = pairs.into_iter().collect();
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for p in sorted {
        s.push_str(&p.csv_row());
        s.push('\n');
    }
    s
}
