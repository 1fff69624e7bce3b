//! Twisted K-theory and K-homology of `SU(n)`, `SU(∞)`, the 3-sphere and
//! countable disjoint unions of 3-spheres.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::fgab::{FgAbGroup, GroupError};
use crate::towers::{
    self, CyclicFamily, DirectTower, InverseTower, KGradedGroup, KGroup, LevelSource, LimitDescriptor, TailClass,
    TowerError,
};

/// Largest number of cyclic factors materialized for a single `SU(n)` level.
pub const MAX_FACTORS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KTwistError {
    #[error("{name} = {value} is out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: String,
        expected: &'static str,
    },
    #[error("(Z/{c})^(2^{}) has too many factors to materialize", .n - 1)]
    TooLarge { n: usize, c: BigInt },
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn out_of_range(name: &'static str, value: impl ToString, expected: &'static str) -> KTwistError {
    KTwistError::OutOfRange {
        name,
        value: value.to_string(),
        expected,
    }
}

/// `C(l + i, i) - 1` for `i = 1, 2, ...`.
fn shifted_binomials(level: u64) -> impl Iterator<Item = BigInt> {
    let l = BigInt::from(level);
    let mut binom = BigInt::one();
    (1u64..).map(move |i| {
        binom = &binom * (&l + i) / i;
        &binom - 1
    })
}

/// `c(n, l) = gcd{C(l + i, i) - 1 : 1 ≤ i ≤ n - 1}`.
pub fn c(n: usize, level: u64) -> Result<BigInt, KTwistError> {
    Ok(c_sequence(n, level)?.pop().expect("n >= 2"))
}

/// `[c(2, l), c(3, l), ..., c(n_max, l)]`.
pub fn c_sequence(n_max: usize, level: u64) -> Result<Vec<BigInt>, KTwistError> {
    if n_max < 2 {
        return Err(out_of_range("n", n_max, "at least 2"));
    }
    if level == 0 {
        return Err(out_of_range("level", level, "at least 1"));
    }
    let mut g = BigInt::zero();
    Ok(shifted_binomials(level)
        .take(n_max - 1)
        .map(|b| {
            g = g.gcd(&b);
            g.clone()
        })
        .collect())
}

/// `(Z/c)^(2^(n-1))`, refusing sizes that cannot be stored.
fn su_total_group(n: usize, c: &BigInt) -> Result<FgAbGroup, KTwistError> {
    if c.is_one() {
        return Ok(FgAbGroup::trivial());
    }
    let count = u32::try_from(n - 1)
        .ok()
        .and_then(|e| 1u64.checked_shl(e))
        .filter(|&k| k <= MAX_FACTORS)
        .ok_or_else(|| KTwistError::TooLarge { n, c: c.clone() })?;
    Ok(FgAbGroup::cyclic(c.clone()).power(count as usize))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistedSpace {
    /// `SU(n)` with twist `l ∈ H³(SU(n), Z) ≅ Z`.
    SUFinite { n: usize, level: u64 },
    SUInfinite { level: u64 },
    /// `S³` with twist `m`.
    Sphere3 { twist: BigInt },
    /// `⊔_n S³` with twist `m(n)` on the `n`-th component.
    SphereDisjointUnion(CyclicFamily),
}

impl TwistedSpace {
    pub fn su(n: usize, level: u64) -> Result<Self, KTwistError> {
        let s = TwistedSpace::SUFinite { n, level };
        s.validate()?;
        Ok(s)
    }

    pub fn su_infinite(level: u64) -> Result<Self, KTwistError> {
        let s = TwistedSpace::SUInfinite { level };
        s.validate()?;
        Ok(s)
    }

    pub fn sphere3(twist: impl Into<BigInt>) -> Result<Self, KTwistError> {
        let s = TwistedSpace::Sphere3 { twist: twist.into() };
        s.validate()?;
        Ok(s)
    }

    /// Components indexed from 1 with twist `m(n) = n`.
    pub fn sphere_union() -> Self {
        TwistedSpace::SphereDisjointUnion(CyclicFamily::identity(1))
    }

    /// Component twists are checked when a truncation reaches them.
    pub fn sphere_union_with(family: CyclicFamily) -> Self {
        TwistedSpace::SphereDisjointUnion(family)
    }

    pub fn validate(&self) -> Result<(), KTwistError> {
        match self {
            TwistedSpace::SUFinite { n, level } => {
                if *n < 2 {
                    return Err(out_of_range("n", n, "at least 2"));
                }
                if *level == 0 {
                    return Err(out_of_range("level", level, "at least 1"));
                }
            }
            TwistedSpace::SUInfinite { level } => {
                if *level == 0 {
                    return Err(out_of_range("level", level, "at least 1"));
                }
            }
            TwistedSpace::Sphere3 { twist } => {
                if !twist.is_positive() {
                    return Err(out_of_range("twist", twist, "at least 1"));
                }
            }
            TwistedSpace::SphereDisjointUnion(_) => {}
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        match self {
            TwistedSpace::SUFinite { n, level } => format!("(SU({n}), {level})"),
            TwistedSpace::SUInfinite { level } => format!("(SU(inf), {level})"),
            TwistedSpace::Sphere3 { twist } => format!("(S^3, {twist})"),
            TwistedSpace::SphereDisjointUnion(f) => {
                format!("(disjoint union of S^3 over n >= {}, twist {})", f.first(), f.label())
            }
        }
    }
}

/// Levels `n ≥ 2` of the `SU(∞)` tower: the total twisted K-group of
/// `(SU(n), l)`. The connecting maps are not known, so none are provided.
#[derive(Debug, Clone)]
pub struct SuLevels {
    level: u64,
}

impl SuLevels {
    pub fn new(level: u64) -> Result<Self, KTwistError> {
        if level == 0 {
            return Err(out_of_range("level", level, "at least 1"));
        }
        Ok(SuLevels { level })
    }
}

fn unavailable(n: usize, e: KTwistError) -> TowerError {
    TowerError::LevelUnavailable {
        level: n,
        reason: e.to_string(),
    }
}

impl LevelSource for SuLevels {
    fn base(&self) -> usize {
        2
    }
    fn group(&self, n: usize) -> Result<FgAbGroup, TowerError> {
        let cn = c(n, self.level).map_err(|e| unavailable(n, e))?;
        su_total_group(n, &cn).map_err(|e| unavailable(n, e))
    }
    fn is_trivial(&self, n: usize) -> Result<bool, TowerError> {
        Ok(c(n, self.level).map_err(|e| unavailable(n, e))?.is_one())
    }
    fn free_rank(&self, _n: usize) -> Result<usize, TowerError> {
        Ok(0)
    }
    fn describe(&self) -> String {
        format!("K(SU(n), {}) for n >= 2", self.level)
    }
}

pub fn su_inverse_tower(level: u64, bound: usize) -> Result<InverseTower, KTwistError> {
    Ok(InverseTower::from_arc(Arc::new(SuLevels::new(level)?), TailClass::LevelwiseFinite, bound)?)
}

pub fn su_direct_tower(level: u64, bound: usize) -> Result<DirectTower, KTwistError> {
    Ok(DirectTower::from_arc(Arc::new(SuLevels::new(level)?), TailClass::LevelwiseFinite, bound)?)
}

/// A graded answer together with the rules and formulas that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KResult {
    pub graded: KGradedGroup,
    pub provenance: Vec<String>,
}

impl KResult {
    /// A total group given directly, e.g. for consistency checks.
    pub fn from_total(group: FgAbGroup, note: impl Into<String>) -> Self {
        let note = note.into();
        KResult {
            graded: KGradedGroup::Total(KGroup::exact(group, note.clone())),
            provenance: vec![note],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.graded.is_trivial()
    }

    pub fn is_unproven(&self) -> bool {
        self.graded.is_unproven()
    }
}

const C_FORMULA: &str = "c(n, l) = gcd{C(l+i, i) - 1 : 1 <= i <= n-1}";

fn su_finite_result(n: usize, level: u64) -> Result<KResult, KTwistError> {
    let cn = c(n, level)?;
    let group = su_total_group(n, &cn)?;
    let note = format!("K^0 + K^1 of (SU({n}), {level}) = (Z/c(n, l))^(2^(n-1)) with c = {cn}");
    Ok(KResult {
        graded: KGradedGroup::Total(KGroup::exact(group, note.clone())),
        provenance: vec![C_FORMULA.into(), note],
    })
}

fn su_infinite_provenance(level: u64, verdict: &LimitDescriptor, bound: usize) -> Vec<String> {
    let mut p = vec![
        C_FORMULA.into(),
        format!("levels K(SU(n), {level}) = (Z/c(n, l))^(2^(n-1)) are finite"),
    ];
    p.push(match verdict {
        LimitDescriptor::Trivial(towers::TrivialReason::CofinalTriviality { from_level, .. }) => {
            format!("c({from_level}, {level}) = 1, so every level from {from_level} to {bound} is trivial")
        }
        _ => format!("no n <= {bound} with c(n, {level}) = 1"),
    });
    p
}

/// Twisted K-theory. For `SU(∞)` the answer is certified only up to `bound`.
pub fn twisted_k(space: &TwistedSpace, bound: usize) -> Result<KResult, KTwistError> {
    space.validate()?;
    match space {
        TwistedSpace::SUFinite { n, level } => su_finite_result(*n, *level),
        TwistedSpace::SUInfinite { level } => {
            let tower = su_inverse_tower(*level, bound)?;
            let graded = towers::milnor_assemble_total(&tower)?;
            let KGradedGroup::Total(KGroup::Limit(d)) = &graded else {
                unreachable!("total assembly yields a limit descriptor")
            };
            let mut provenance = su_infinite_provenance(*level, d, tower.bound());
            provenance.insert(2, "lim1 vanishes: inverse system of finite groups".into());
            provenance.push("Milnor sequence: K of the limit is lim of the levels".into());
            Ok(KResult { graded, provenance })
        }
        TwistedSpace::Sphere3 { twist } => Ok(KResult {
            graded: KGradedGroup::Split {
                even: KGroup::exact(FgAbGroup::trivial(), "K^0(S^3, m) = 0"),
                odd: KGroup::exact(FgAbGroup::cyclic(twist.clone()), format!("K^1(S^3, m) = Z/{twist}")),
            },
            provenance: vec![format!("K^0(S^3, m) = 0 and K^1(S^3, m) = Z/m with m = {twist}")],
        }),
        TwistedSpace::SphereDisjointUnion(family) => Ok(KResult {
            graded: KGradedGroup::Split {
                even: KGroup::exact(FgAbGroup::trivial(), "product of zero groups"),
                odd: KGroup::Product(family.clone()),
            },
            provenance: vec![
                "K^1(S^3, m) = Z/m on each component".into(),
                "K-theory takes countable disjoint unions to products".into(),
            ],
        }),
    }
}

/// Twisted K-homology. The parity of the answer is only asserted where it is
/// known degreewise.
pub fn twisted_khomology(space: &TwistedSpace, bound: usize) -> Result<KResult, KTwistError> {
    space.validate()?;
    match space {
        TwistedSpace::SUFinite { n, level } => {
            let mut r = su_finite_result(*n, *level)?;
            r.provenance.push("K-homology of (SU(n), l) has the same total group".into());
            Ok(r)
        }
        TwistedSpace::SUInfinite { level } => {
            let tower = su_direct_tower(*level, bound)?;
            let d = towers::direct_limit(&tower)?;
            let mut provenance = su_infinite_provenance(*level, &d, tower.bound());
            provenance.push("K-homology of the union is the colimit of the levels".into());
            Ok(KResult {
                graded: KGradedGroup::Total(KGroup::Limit(d)),
                provenance,
            })
        }
        TwistedSpace::Sphere3 { twist } => Ok(KResult {
            graded: KGradedGroup::Total(KGroup::exact(
                FgAbGroup::cyclic(twist.clone()),
                format!("K_0 + K_1 of (S^3, {twist})"),
            )),
            provenance: vec![format!("total K-homology of (S^3, m) is Z/m with m = {twist}")],
        }),
        TwistedSpace::SphereDisjointUnion(family) => Ok(KResult {
            graded: KGradedGroup::Total(KGroup::Sum(family.clone())),
            provenance: vec![
                "total K-homology of (S^3, m) is Z/m on each component".into(),
                "K-homology takes countable disjoint unions to direct sums".into(),
            ],
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityTable {
    pub level: u64,
    /// `(n, c(n, l))` for `n = 2..=n_max`.
    pub values: Vec<(usize, BigInt)>,
    /// Whether `c(n, l)` divides `c(m, l)` for all `n ≥ m` in the table.
    pub divisibility_holds: bool,
    /// Least `n` with `c(n, l) = 1`, if one occurs in the table.
    pub first_one: Option<usize>,
}

pub fn divisibility_table(level: u64, n_max: usize) -> Result<DivisibilityTable, KTwistError> {
    let values: Vec<(usize, BigInt)> = (2..).zip(c_sequence(n_max, level)?).collect();
    let divisibility_holds = values
        .iter()
        .enumerate()
        .all(|(i, (_, cm))| values[i..].iter().all(|(_, cn)| cm.is_multiple_of(cn)));
    let first_one = values.iter().find(|(_, v)| v.is_one()).map(|&(n, _)| n);
    Ok(DivisibilityTable {
        level,
        values,
        divisibility_holds,
        first_one,
    })
}

/// Tensoring with the compact operators leaves K-theory unchanged.
pub fn stabilize(k: &KResult) -> KResult {
    let mut out = k.clone();
    out.provenance
        .push("stabilized by the compact operators; K-theory is stable".into());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn c_values() {
        assert_eq!(c(2, 7).unwrap(), z(7));
        assert_eq!(c(3, 2).unwrap(), z(1));
        assert_eq!(c(3, 3).unwrap(), z(3));
        assert_eq!(c(4, 3).unwrap(), z(1));
        assert!(c(1, 3).is_err());
        assert!(c(3, 0).is_err());
    }

    #[test]
    fn tables() {
        let t = divisibility_table(3, 4).unwrap();
        assert_eq!(t.values, vec![(2, z(3)), (3, z(3)), (4, z(1))]);
        assert!(t.divisibility_holds);
        assert_eq!(t.first_one, Some(4));
        let t = divisibility_table(6, 4).unwrap();
        assert_eq!(t.values, vec![(2, z(6)), (3, z(3)), (4, z(1))]);
        assert_eq!(divisibility_table(1, 5).unwrap().first_one, Some(2));
    }

    #[test]
    fn su_finite() {
        let k = twisted_k(&TwistedSpace::su(2, 2).unwrap(), 64).unwrap();
        let g = k.graded.total_group().unwrap();
        assert_eq!(g, FgAbGroup::cyclic(2).power(2));
        assert_eq!(k.graded.degree(0), None, "parity is not asserted");
        let h = twisted_khomology(&TwistedSpace::su(2, 4).unwrap(), 64).unwrap();
        assert_eq!(h.graded.total_group().unwrap(), FgAbGroup::cyclic(4).power(2));
        assert!(TwistedSpace::su(1, 2).is_err());
        assert!(TwistedSpace::su(3, 0).is_err());
    }

    #[test]
    fn su_infinite_is_trivial() {
        let s = TwistedSpace::su_infinite(3).unwrap();
        let k = twisted_k(&s, 64).unwrap();
        assert!(k.is_trivial());
        assert!(k.graded.degree(1).unwrap().is_trivial());
        assert!(twisted_khomology(&s, 64).unwrap().is_trivial());
    }

    #[test]
    fn small_bounds_are_unproven() {
        // c(2, 6) = 6, c(3, 6) = 3: no trivial level below 4.
        let s = TwistedSpace::su_infinite(6).unwrap();
        assert!(twisted_k(&s, 3).unwrap().is_unproven());
        assert!(twisted_khomology(&s, 3).unwrap().is_unproven());
        assert!(twisted_k(&s, 4).unwrap().is_trivial());
    }

    #[test]
    fn spheres() {
        let k = twisted_k(&TwistedSpace::sphere3(5).unwrap(), 64).unwrap();
        assert!(k.graded.degree(0).unwrap().is_trivial());
        assert_eq!(k.graded.degree(1).unwrap().exact_group(), Some(FgAbGroup::cyclic(5)));
        assert!(TwistedSpace::sphere3(0).is_err());
        let k = twisted_k(&TwistedSpace::sphere_union(), 64).unwrap();
        assert!(matches!(k.graded.degree(1), Some(KGroup::Product(_))));
    }

    #[test]
    fn stabilization_is_identity_on_groups() {
        let k = twisted_k(&TwistedSpace::su(3, 3).unwrap(), 64).unwrap();
        let s = stabilize(&stabilize(&k));
        assert_eq!(s.graded, k.graded);
        assert_eq!(s.provenance.len(), k.provenance.len() + 2);
    }
}
