//! Finite-index subgroups Γ < H as canonical triples `(A·Z², m, i)`.
//!
//! Γ is the set `{(x, y, i(x,y) + k·m) : (x,y) ∈ A·Z², k ∈ Z}` where `A·Z²` is
//! the projection of Γ and `m·Z = Γ ∩ center`. The offset function `i` is
//! stored only on the two HNF basis columns `h1, h2`; its value elsewhere is
//! the z-coordinate of the word `lift(h1)^u · lift(h2)^v`, which is
//!
//! ```text
//! i(u·h1 + v·h2) = u·i1 + v·i2 + C(u,2)·h1x·h1y + C(v,2)·h2x·h2y + u·v·h1x·h2y  (mod m)
//! ```
//!
//! For normal Γ, `m` divides every entry of `A`, the quadratic terms vanish
//! and `i` is additive mod `m`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::group::{commutator, GroupElement};
use crate::int::{choose2, divides, modp};
use crate::lattice::{hnf, hnf_of_generators, IntMatrix, LatticeBasis, LatticeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubgroupError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("matrix must be 2x2, got {rows}x{cols}")]
    NotTwoByTwo { rows: usize, cols: usize },
    #[error("modulus must be at least 1, got {0}")]
    InvalidModulus(BigInt),
    #[error("not normal: m = {m} does not divide every entry of A = {a}")]
    NotNormal { m: BigInt, a: IntMatrix },
    #[error("not a subgroup: m = {m} does not divide det(A) = {det}")]
    ModulusDoesNotDivideDet { m: BigInt, det: BigInt },
    #[error("generators span a subgroup of infinite index")]
    InfiniteIndex,
}

/// Canonical form of a finite-index subgroup of H.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupTriple {
    lat: LatticeBasis,
    m: BigInt,
    ivals: [BigInt; 2],
    normal: bool,
}

/// z-coordinate of `lift(c1)^u · lift(c2)^v` where `lift(ck) = (ck, ik)`.
fn word_z(cols: &[Vec<BigInt>; 2], ivals: [&BigInt; 2], u: &BigInt, v: &BigInt) -> BigInt {
    let [c1, c2] = cols;
    u * ivals[0]
        + v * ivals[1]
        + choose2(u) * &c1[0] * &c1[1]
        + choose2(v) * &c2[0] * &c2[1]
        + u * v * &c1[0] * &c2[1]
}

fn check_2x2(a: &IntMatrix) -> Result<(), SubgroupError> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(SubgroupError::NotTwoByTwo {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(())
}

fn divides_all(m: &BigInt, a: &IntMatrix) -> bool {
    a.entries().all(|e| divides(m, e))
}

impl SubgroupTriple {
    /// Builds the normal subgroup `Γ_{A,i,m}` from a matrix, a modulus and the
    /// values of `i` on the columns of the given `A`.
    pub fn new(a: &IntMatrix, m: impl Into<BigInt>, ivals: [BigInt; 2]) -> Result<Self, SubgroupError> {
        let m = m.into();
        check_2x2(a)?;
        if !m.is_positive() {
            return Err(SubgroupError::InvalidModulus(m));
        }
        if !divides_all(&m, a) {
            return Err(SubgroupError::NotNormal { m, a: a.clone() });
        }
        Self::build(a, m, ivals)
    }

    /// Like [`SubgroupTriple::new`] but also accepts non-normal subgroups,
    /// interpreting the data as the subgroup generated by `(a1, i1)`,
    /// `(a2, i2)` and `(0, 0, m)`. Requires `m | det(A)`.
    pub fn new_allow_non_normal(
        a: &IntMatrix,
        m: impl Into<BigInt>,
        ivals: [BigInt; 2],
    ) -> Result<Self, SubgroupError> {
        let m = m.into();
        check_2x2(a)?;
        if !m.is_positive() {
            return Err(SubgroupError::InvalidModulus(m));
        }
        Self::build(a, m, ivals)
    }

    fn build(a: &IntMatrix, m: BigInt, ivals: [BigInt; 2]) -> Result<Self, SubgroupError> {
        let h = hnf(a)?;
        let det = a.det()?;
        if !divides(&m, &det) {
            return Err(SubgroupError::ModulusDoesNotDivideDet { m, det });
        }
        let given = [a.column(0), a.column(1)];
        let t = &h.transform;
        let canon = [0, 1].map(|k| {
            let z = word_z(&given, [&ivals[0], &ivals[1]], t.get(0, k), t.get(1, k));
            modp(&z, &m)
        });
        let normal = divides_all(&m, a);
        Ok(SubgroupTriple {
            lat: h.basis,
            m,
            ivals: canon,
            normal,
        })
    }

    /// The whole group H.
    pub fn whole() -> Self {
        SubgroupTriple::new(&IntMatrix::identity(2), 1, [BigInt::zero(), BigInt::zero()])
            .expect("identity triple is valid")
    }

    pub fn lat(&self) -> &LatticeBasis {
        &self.lat
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    /// Values of `i` on the two HNF basis columns, in `[0, m)`.
    pub fn ivals(&self) -> &[BigInt; 2] {
        &self.ivals
    }

    pub fn is_normal(&self) -> bool {
        self.normal
    }

    pub fn is_flat(&self) -> bool {
        self.ivals.iter().all(Zero::is_zero)
    }

    /// `[H : Γ] = |det A|·m`.
    pub fn index(&self) -> BigInt {
        self.lat.det() * &self.m
    }

    /// `gcd(i1, i2, m)`: the z-values of members of a normal Γ form `d·Z`.
    pub fn defect(&self) -> BigInt {
        self.ivals[0].gcd(&self.ivals[1]).gcd(&self.m)
    }

    fn cols(&self) -> [Vec<BigInt>; 2] {
        [self.lat.column(0), self.lat.column(1)]
    }

    /// The elements `(h1, i1)` and `(h2, i2)` of Γ over the HNF basis.
    pub fn basis_lifts(&self) -> [GroupElement; 2] {
        let [c1, c2] = self.cols();
        let [i1, i2] = self.ivals.clone();
        [
            GroupElement::new(c1[0].clone(), c1[1].clone(), i1),
            GroupElement::new(c2[0].clone(), c2[1].clone(), i2),
        ]
    }

    /// A generating set: both basis lifts and `(0, 0, m)`.
    pub fn generators(&self) -> Vec<GroupElement> {
        let [g1, g2] = self.basis_lifts();
        vec![g1, g2, GroupElement::central(self.m.clone())]
    }

    /// `i(x, y)` reduced into `[0, m)`, or `None` off the lattice.
    pub fn i_value(&self, xy: &[BigInt; 2]) -> Option<BigInt> {
        let uv = self.lat.member(xy)?;
        let z = word_z(&self.cols(), [&self.ivals[0], &self.ivals[1]], &uv[0], &uv[1]);
        Some(modp(&z, &self.m))
    }

    pub fn member(&self, g: &GroupElement) -> bool {
        match self.i_value(&g.project()) {
            Some(i) => modp(&(&g.z - i), &self.m).is_zero(),
            None => false,
        }
    }

    /// `true` iff `self ≤ other`: `self`'s generators all lie in `other`.
    pub fn leq(&self, other: &SubgroupTriple) -> bool {
        if !other.lat.contains(&self.lat).unwrap_or(false) || !divides(&other.m, &self.m) {
            return false;
        }
        self.basis_lifts().iter().all(|g| other.member(g))
    }

    /// Canonical triple of the subgroup generated by `gens`.
    pub fn from_generators(gens: &[GroupElement]) -> Result<Self, SubgroupError> {
        if gens.is_empty() {
            return Err(SubgroupError::InfiniteIndex);
        }
        let projected: Vec<Vec<BigInt>> = gens.iter().map(|g| g.project().to_vec()).collect();
        let pm = IntMatrix::from_columns(&projected)?;
        let gh = match hnf_of_generators(&pm) {
            Ok(gh) => gh,
            Err(LatticeError::SingularMatrix) => return Err(SubgroupError::InfiniteIndex),
            Err(e) => return Err(e.into()),
        };
        let t = &gh.transform;
        let words = [0, 1].map(|k| {
            gens.iter()
                .enumerate()
                .fold(GroupElement::identity(), |acc, (j, g)| &acc * &g.pow(t.get(j, k)))
        });
        let lift = |xy: &[BigInt; 2]| -> GroupElement {
            let uv = gh.basis.member(xy).expect("generator projections lie in their span");
            &words[0].pow(&uv[0]) * &words[1].pow(&uv[1])
        };

        let mut m = BigInt::zero();
        for g in gens {
            let defect = g * &lift(&g.project()).inv();
            debug_assert!(defect.is_central());
            m = m.gcd(&defect.z);
        }
        for (a, g) in gens.iter().enumerate() {
            for h in &gens[a + 1..] {
                m = m.gcd(&commutator(g, h).z);
            }
        }
        if m.is_zero() {
            return Err(SubgroupError::InfiniteIndex);
        }
        let ivals = [modp(&words[0].z, &m), modp(&words[1].z, &m)];
        let normal = divides_all(&m, gh.basis.matrix());
        Ok(SubgroupTriple {
            lat: gh.basis,
            m,
            ivals,
            normal,
        })
    }
}

pub fn make_triple(a: &IntMatrix, m: impl Into<BigInt>, ivals: [BigInt; 2]) -> Result<SubgroupTriple, SubgroupError> {
    SubgroupTriple::new(a, m, ivals)
}

pub fn from_generators(gens: &[GroupElement]) -> Result<SubgroupTriple, SubgroupError> {
    SubgroupTriple::from_generators(gens)
}

impl fmt::Display for SubgroupTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(A={}, m={}, i=({}, {}){})",
            self.lat,
            self.m,
            self.ivals[0],
            self.ivals[1],
            if self.normal { "" } else { ", non-normal" }
        )
    }
}

/// Convenience used by tests and examples: a normal triple from small integers.
pub fn triple_i64(a: [[i64; 2]; 2], m: i64, ivals: [i64; 2]) -> Result<SubgroupTriple, SubgroupError> {
    SubgroupTriple::new(&IntMatrix::from(a), m, ivals.map(BigInt::from))
}

impl SubgroupTriple {
    /// `true` when `m` divides `det(A)`; always holds for valid triples.
    pub fn modulus_divides_det(&self) -> bool {
        divides(&self.m, &self.lat.det())
    }

    /// `true` when the triple is the whole group.
    pub fn is_whole(&self) -> bool {
        self.m.is_one() && self.lat.det().is_one()
    }
}
