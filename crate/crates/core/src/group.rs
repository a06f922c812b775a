//! The discrete Heisenberg group on the set Z³.
//!
//! Multiplication is `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`. The center
//! is `{(0,0,z)}` and the projection `(x,y,z) -> (x,y)` is a homomorphism onto
//! Z² whose kernel is exactly the center.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::int::choose2;

/// An element `(x, y, z)` of the discrete Heisenberg group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

impl GroupElement {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, z: impl Into<BigInt>) -> Self {
        GroupElement {
            x: x.into(),
            y: y.into(),
            z: z.into(),
        }
    }

    pub fn identity() -> Self {
        GroupElement::new(0, 0, 0)
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn is_central(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn central(z: impl Into<BigInt>) -> Self {
        GroupElement::new(0, 0, z)
    }

    /// Image under the projection onto Z².
    pub fn project(&self) -> [BigInt; 2] {
        [self.x.clone(), self.y.clone()]
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            x: &self.x + &other.x,
            y: &self.y + &other.y,
            z: &self.z + &other.z + &self.x * &other.y,
        }
    }

    pub fn inv(&self) -> GroupElement {
        GroupElement {
            x: -&self.x,
            y: -&self.y,
            z: -&self.z + &self.x * &self.y,
        }
    }

    /// `self^n` for any integer `n`, via `(x,y,z)^n = (nx, ny, nz + C(n,2)xy)`.
    pub fn pow(&self, n: &BigInt) -> GroupElement {
        GroupElement {
            x: n * &self.x,
            y: n * &self.y,
            z: n * &self.z + choose2(n) * &self.x * &self.y,
        }
    }

    /// `self · other · self⁻¹ · other⁻¹`, always central.
    pub fn commutator(&self, other: &GroupElement) -> GroupElement {
        commutator(self, other)
    }

    /// `self · g · self⁻¹`.
    pub fn conjugate(&self, g: &GroupElement) -> GroupElement {
        conjugate(self, g)
    }
}

pub fn mul(g: &GroupElement, h: &GroupElement) -> GroupElement {
    g.mul(h)
}

pub fn inv(g: &GroupElement) -> GroupElement {
    g.inv()
}

pub fn commutator(g: &GroupElement, h: &GroupElement) -> GroupElement {
    GroupElement::central(&g.x * &h.y - &g.y * &h.x)
}

pub fn conjugate(h: &GroupElement, g: &GroupElement) -> GroupElement {
    GroupElement {
        x: g.x.clone(),
        y: g.y.clone(),
        z: &g.z + &h.x * &g.y - &h.y * &g.x,
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: &GroupElement) -> GroupElement {
        GroupElement::mul(self, rhs)
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        GroupElement::mul(&self, &rhs)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}
