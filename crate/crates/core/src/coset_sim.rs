//! Finite stages `H/Γ` of an odometer: canonical coset representatives, the
//! left action of H, cylinder eigenfunctions and compatibility between
//! consecutive stages.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::group::GroupElement;
use crate::int::modp;
use crate::subgroup::SubgroupTriple;
use crate::zd_spectrum::{EigenPair, Phase};

/// Largest quotient [`CosetSpace::new`] will enumerate.
pub const COSET_LIMIT: u64 = 1_000_000;

/// Below this index `projection_check` is exhaustive over the generators.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("quotient has {index} cosets, above the limit {limit}")]
    TooLarge { index: BigInt, limit: u64 },
    #[error("{0} is not a canonical coset representative")]
    UnknownCoset(Box<GroupElement>),
    #[error("pair {0} is not trivial on the subgroup")]
    NotInvariant(Box<EigenPair>),
    #[error("finer stage is not contained in the coarser stage")]
    NotNested,
}

/// Canonical representative `(x₀, y₀, z₀)` of `g·Γ`: `(x₀, y₀)` is the box
/// representative of `(x, y)` modulo the lattice and `z₀ ∈ [0, m)`.
pub fn normalize(sub: &SubgroupTriple, g: &GroupElement) -> GroupElement {
    let xy = g.project();
    let r = sub.lat().reduce(&xy);
    let dx = &xy[0] - &r[0];
    let dy = &xy[1] - &r[1];
    let i = sub
        .i_value(&[dx, dy.clone()])
        .expect("difference from the box representative lies in the lattice");
    // r⁻¹·g = (dx, dy, z − z₀ − x₀·dy) must have z ≡ i(dx, dy)
    let z0 = modp(&(&g.z - &r[0] * &dy - i), sub.m());
    GroupElement {
        x: r[0].clone(),
        y: r[1].clone(),
        z: z0,
    }
}

#[derive(Clone, Debug)]
pub struct CosetSpace {
    subgroup: SubgroupTriple,
    reps: Vec<GroupElement>,
    lookup: HashMap<GroupElement, usize>,
}

impl CosetSpace {
    pub fn new(subgroup: &SubgroupTriple) -> Result<Self, SimError> {
        if !subgroup.is_normal() {
            return Err(SimError::NotNormal);
        }
        let index = subgroup.index();
        if index > BigInt::from(COSET_LIMIT) {
            return Err(SimError::TooLarge {
                index,
                limit: COSET_LIMIT,
            });
        }
        let m = subgroup.m().to_u64().expect("bounded by the index");
        let planar = subgroup.lat().coset_reps().expect("bounded by the index");
        let mut reps = Vec::with_capacity(index.to_usize().unwrap_or(0));
        for v in &planar {
            for z in 0..m {
                reps.push(GroupElement::new(v[0].clone(), v[1].clone(), z));
            }
        }
        let lookup = reps.iter().enumerate().map(|(k, r)| (r.clone(), k)).collect();
        Ok(CosetSpace {
            subgroup: subgroup.clone(),
            reps,
            lookup,
        })
    }

    pub fn subgroup(&self) -> &SubgroupTriple {
        &self.subgroup
    }

    pub fn reps(&self) -> &[GroupElement] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn normalize(&self, g: &GroupElement) -> GroupElement {
        normalize(&self.subgroup, g)
    }

    /// Position of a canonical representative in [`CosetSpace::reps`].
    pub fn position(&self, c: &GroupElement) -> Option<usize> {
        self.lookup.get(c).copied()
    }

    pub fn position_of(&self, g: &GroupElement) -> usize {
        self.lookup[&self.normalize(g)]
    }

    /// `g·c`, normalized.
    pub fn act(&self, g: &GroupElement, c: &GroupElement) -> Result<GroupElement, SimError> {
        if !self.lookup.contains_key(c) {
            return Err(SimError::UnknownCoset(Box::new(c.clone())));
        }
        Ok(self.normalize(&(g * c)))
    }

    /// The permutation `k ↦ position(g·reps[k])`.
    pub fn permutation(&self, g: &GroupElement) -> Vec<usize> {
        self.reps.iter().map(|c| self.position_of(&(g * c))).collect()
    }

    /// Orbit of `start` under `gens`, in breadth-first order.
    pub fn orbit(&self, start: &GroupElement, gens: &[GroupElement]) -> Result<Vec<GroupElement>, SimError> {
        let start = self.position(start).ok_or_else(|| SimError::UnknownCoset(Box::new(start.clone())))?;
        let mut seen = vec![false; self.reps.len()];
        seen[start] = true;
        let mut order = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(k) = queue.pop_front() {
            for g in gens {
                let next = self.position_of(&(g * &self.reps[k]));
                if !seen[next] {
                    seen[next] = true;
                    order.push(next);
                    queue.push_back(next);
                }
            }
        }
        Ok(order.into_iter().map(|k| self.reps[k].clone()).collect())
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(&GroupElement::identity(), &unit_generators())
            .map(|o| o.len() == self.reps.len())
            .unwrap_or(false)
    }
}

/// `(±1,0,0), (0,±1,0), (0,0,±1)`.
pub fn unit_generators() -> Vec<GroupElement> {
    vec![
        GroupElement::new(1, 0, 0),
        GroupElement::new(-1, 0, 0),
        GroupElement::new(0, 1, 0),
        GroupElement::new(0, -1, 0),
        GroupElement::new(0, 0, 1),
        GroupElement::new(0, 0, -1),
    ]
}

/// CSV rows `x,y,z` in the given order.
pub fn orbit_csv(orbit: &[GroupElement]) -> String {
    let mut s = String::from("step,x,y,z\n");
    for (k, c) in orbit.iter().enumerate() {
        s.push_str(&format!("{},{},{},{}\n", k, c.x, c.y, c.z));
    }
    s
}

/// `φ(g) = αx + ξy mod 1`.
pub fn character_phase(pair: &EigenPair, g: &GroupElement) -> Phase {
    pair.pairing(&g.x, &g.y)
}

/// Checks that `f = φ` on cosets is an eigenfunction of `(U(g)f)(c) = f(g⁻¹c)`
/// with eigenvalue `φ(g⁻¹) = conj φ(g)`, in exact phase arithmetic.
pub fn eigenfunction_check(space: &CosetSpace, pair: &EigenPair, g: &GroupElement) -> Result<bool, SimError> {
    if !pair.annihilates(space.subgroup.lat()) {
        return Err(SimError::NotInvariant(Box::new(pair.clone())));
    }
    let lambda = character_phase(pair, &g.inv());
    let ginv = g.inv();
    Ok(space.reps.iter().all(|c| {
        let moved = space.normalize(&(&ginv * c));
        character_phase(pair, &moved) == &lambda + &character_phase(pair, c)
    }))
}

fn random_element(rng: &mut ChaCha8Rng, bound: i64) -> GroupElement {
    GroupElement::new(
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
    )
}

/// Equivariance of the quotient map `H/fine → H/coarse`: `π(g·c) = g·π(c)`.
///
/// When the finer quotient has at most [`EXHAUSTIVE_LIMIT`] cosets every coset
/// is checked against every unit generator, which implies equivariance for
/// all of H; `samples` random pairs are checked in every case.
pub fn projection_check(
    coarse: &SubgroupTriple,
    fine: &SubgroupTriple,
    samples: usize,
    seed: u64,
) -> Result<bool, SimError> {
    if !fine.leq(coarse) {
        return Err(SimError::NotNested);
    }
    if !coarse.is_normal() || !fine.is_normal() {
        return Err(SimError::NotNormal);
    }
    let pi = |c: &GroupElement| normalize(coarse, c);
    let holds = |g: &GroupElement, c: &GroupElement| {
        let upstairs = normalize(fine, &(g * c));
        pi(&upstairs) == normalize(coarse, &(g * &pi(c)))
    };
    if fine.index() <= BigInt::from(EXHAUSTIVE_LIMIT) {
        let space = CosetSpace::new(fine)?;
        let gens = unit_generators();
        for c in space.reps() {
            if !gens.iter().all(|g| holds(g, c)) {
                return Ok(false);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let g = random_element(&mut rng, 1000);
        let c = normalize(fine, &random_element(&mut rng, 1000));
        if !holds(&g, &c) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroup::triple_i64;
    use proptest::prelude::*;

    fn e(x: i64, y: i64, z: i64) -> GroupElement {
        GroupElement::new(x, y, z)
    }

    /// Counts cosets by partitioning a box of elements with `member(a⁻¹b)`.
    fn coset_count_oracle(t: &SubgroupTriple, r: i64) -> usize {
        let mut classes: Vec<GroupElement> = Vec::new();
        for x in 0..r {
            for y in 0..r {
                for z in 0..r {
                    let g = e(x, y, z);
                    if !classes.iter().any(|c| t.member(&(&c.inv() * &g))) {
                        classes.push(g);
                    }
                }
            }
        }
        classes.len()
    }

    #[test]
    fn space_sizes() {
        let t = triple_i64([[2, 0], [0, 2]], 2, [0, 0]).unwrap();
        let s = CosetSpace::new(&t).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(coset_count_oracle(&t, 4), 8);
        assert_eq!(CosetSpace::new(&SubgroupTriple::whole()).unwrap().len(), 1);
        let t = triple_i64([[4, 0], [2, 2]], 2, [1, 0]).unwrap();
        assert_eq!(CosetSpace::new(&t).unwrap().len(), coset_count_oracle(&t, 6));
    }

    #[test]
    fn normalize_examples() {
        let t = triple_i64([[2, 0], [0, 2]], 2, [1, 0]).unwrap();
        let g = e(2, 0, 0);
        let r = normalize(&t, &g);
        assert_eq!(r, e(0, 0, 1));
        assert!(t.member(&(&r.inv() * &g)));
    }

    #[test]
    fn reps_are_fixed_points() {
        let t = triple_i64([[6, 0], [0, 6]], 6, [1, 0]).unwrap();
        let s = CosetSpace::new(&t).unwrap();
        assert_eq!(s.len(), 216);
        for c in s.reps() {
            assert_eq!(&s.normalize(c), c);
        }
    }

    #[test]
    fn act_examples() {
        let t = triple_i64([[2, 0], [0, 2]], 2, [0, 0]).unwrap();
        let s = CosetSpace::new(&t).unwrap();
        assert_eq!(s.act(&e(1, 0, 0), &e(1, 0, 0)).unwrap(), e(0, 0, 0));
        let z = s.permutation(&e(0, 0, 1));
        assert!(z.iter().enumerate().all(|(k, &j)| j != k && z[j] == k));
        let id = s.permutation(&GroupElement::identity());
        assert!(id.iter().enumerate().all(|(k, &j)| j == k));
        assert_eq!(s.act(&e(1, 0, 0), &e(5, 0, 0)), Err(SimError::UnknownCoset(Box::new(e(5, 0, 0)))));
    }

    #[test]
    fn eigenfunction_examples() {
        let t = triple_i64([[2, 0], [0, 2]], 2, [0, 0]).unwrap();
        let s = CosetSpace::new(&t).unwrap();
        let half = EigenPair::new(Phase::new(1, 2), Phase::zero());
        assert!(eigenfunction_check(&s, &half, &e(1, 0, 0)).unwrap());
        assert_eq!(character_phase(&half, &e(1, 0, 0)), Phase::new(1, 2));
        assert!(eigenfunction_check(&s, &half, &e(0, 1, 0)).unwrap());
        assert_eq!(character_phase(&half, &e(0, 1, 0)), Phase::zero());
        for g in unit_generators() {
            assert!(eigenfunction_check(&s, &EigenPair::zero(), &g).unwrap());
        }
        let third = EigenPair::new(Phase::new(1, 3), Phase::zero());
        assert!(matches!(eigenfunction_check(&s, &third, &e(1, 0, 0)), Err(SimError::NotInvariant(_))));
    }

    #[test]
    fn non_unit_eigenvalue_is_conjugated() {
        let t = triple_i64([[4, 0], [0, 4]], 4, [0, 0]).unwrap();
        let s = CosetSpace::new(&t).unwrap();
        let pair = EigenPair::new(Phase::new(1, 4), Phase::zero());
        let g = e(1, 0, 0);
        assert!(eigenfunction_check(&s, &pair, &g).unwrap());
        // f(g⁻¹c) = φ(g)^{-1} f(c): the factor is 3/4, not 1/4
        let c = &s.reps()[0];
        let moved = s.normalize(&(&g.inv() * c));
        assert_eq!(character_phase(&pair, &moved), Phase::new(3, 4));
    }

    #[test]
    fn eigenfunctions_are_orthogonal() {
        let t = triple_i64([[2, 0], [2, 4]], 2, [1, 0]).unwrap();
        let s = CosetSpace::new(&t).unwrap();
        let pairs: Vec<EigenPair> = crate::zd_spectrum::eigenvalues(t.lat()).unwrap().into_iter().collect();
        assert_eq!(BigInt::from(pairs.len()), t.lat().det());
        for (a, p) in pairs.iter().enumerate() {
            for q in &pairs[a..] {
                let (mut re, mut im) = (0.0f64, 0.0f64);
                for c in s.reps() {
                    let d = (&character_phase(p, c) - &character_phase(q, c)).to_f64();
                    re += (2.0 * std::f64::consts::PI * d).cos();
                    im += (2.0 * std::f64::consts::PI * d).sin();
                }
                let expect = if p == q { s.len() as f64 } else { 0.0 };
                assert!((re - expect).abs() < 1e-9 && im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn transitive_and_orbit_csv() {
        let t = triple_i64([[2, 0], [0, 2]], 2, [1, 0]).unwrap();
        let s = CosetSpace::new(&t).unwrap();
        assert!(s.is_transitive());
        let o = s.orbit(&GroupElement::identity(), &unit_generators()).unwrap();
        let csv = orbit_csv(&o);
        assert!(csv.starts_with("step,x,y,z\n0,0,0,0\n"));
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn projection_examples() {
        let k2 = triple_i64([[2, 0], [0, 2]], 2, [1, 0]).unwrap();
        let k6 = triple_i64([[6, 0], [0, 6]], 6, [1, 0]).unwrap();
        assert!(projection_check(&k2, &k6, 500, 0).unwrap());
        assert!(projection_check(&k6, &k6, 50, 0).unwrap());
        let d2 = triple_i64([[2, 0], [0, 2]], 2, [0, 0]).unwrap();
        let d4 = triple_i64([[4, 0], [0, 4]], 4, [0, 0]).unwrap();
        assert!(projection_check(&d2, &d4, 500, 0).unwrap());
        assert_eq!(projection_check(&d4, &d2, 1, 0), Err(SimError::NotNested));
    }

    fn normal_triple() -> impl Strategy<Value = SubgroupTriple> {
        (1i64..=3, 1i64..=2, 1i64..=2, 0i64..2, 0i64..6, 0i64..6).prop_map(|(m, a, d, c, i1, i2)| {
            triple_i64([[m * a, 0], [m * c, m * d]], m, [i1, i2]).unwrap()
        })
    }

    fn elem() -> impl Strategy<Value = GroupElement> {
        (-20i64..=20, -20i64..=20, -20i64..=20).prop_map(|(x, y, z)| e(x, y, z))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn normalize_is_a_coset_choice(t in normal_triple(), g in elem()) {
            let r = normalize(&t, &g);
            prop_assert!(t.member(&(&r.inv() * &g)));
            prop_assert!(t.member(&(&g * &r.inv())));
            prop_assert_eq!(normalize(&t, &r), r);
        }

        #[test]
        fn action_is_a_permutation(t in normal_triple(), g in elem(), h in elem()) {
            let s = CosetSpace::new(&t).unwrap();
            let mut p = s.permutation(&g);
            p.sort_unstable();
            prop_assert!(p.iter().enumerate().all(|(k, &j)| k == j));
            for c in s.reps() {
                let lhs = s.act(&g, &s.act(&h, c).unwrap()).unwrap();
                prop_assert_eq!(lhs, s.act(&(&g * &h), c).unwrap());
            }
            prop_assert!(s.is_transitive());
        }
    }
}
