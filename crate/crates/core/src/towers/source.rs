use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Pow};

use super::TowerError;
use crate::fgab::{FgAbGroup, Homomorphism};
use crate::intlin::IntMatrix;

/// Level data of a tower. The direction of [`LevelSource::map`] is fixed by
/// the tower type the source is placed in.
pub trait LevelSource: Send + Sync {
    fn base(&self) -> usize;

    fn group(&self, n: usize) -> Result<FgAbGroup, TowerError>;

    /// Whether [`LevelSource::map`] is available.
    fn has_maps(&self) -> bool {
        false
    }

    /// The connecting map leaving level `n`.
    fn map(&self, _n: usize) -> Result<Homomorphism, TowerError> {
        Err(TowerError::MapsUnspecified(self.describe()))
    }

    fn is_trivial(&self, n: usize) -> Result<bool, TowerError> {
        Ok(self.group(n)?.is_trivial())
    }

    fn free_rank(&self, n: usize) -> Result<usize, TowerError> {
        Ok(self.group(n)?.free_rank())
    }

    /// Inverse limit known in closed form for the whole (infinite) tower,
    /// with a note on why it holds.
    fn closed_form_inverse_limit(&self) -> Option<(FgAbGroup, String)> {
        None
    }

    /// Last level with data, for finitely given towers.
    fn last_level(&self) -> Option<usize> {
        None
    }

    fn describe(&self) -> String;
}

/// The same group at every level, identity maps.
#[derive(Debug, Clone)]
pub struct ConstantLevels {
    base: usize,
    group: FgAbGroup,
}

impl ConstantLevels {
    pub fn new(base: usize, group: FgAbGroup) -> Self {
        ConstantLevels { base, group }
    }
}

impl LevelSource for ConstantLevels {
    fn base(&self) -> usize {
        self.base
    }
    fn group(&self, _n: usize) -> Result<FgAbGroup, TowerError> {
        Ok(self.group.clone())
    }
    fn has_maps(&self) -> bool {
        true
    }
    fn map(&self, _n: usize) -> Result<Homomorphism, TowerError> {
        Ok(Homomorphism::identity(&self.group))
    }
    fn describe(&self) -> String {
        format!("constant {}", self.group)
    }
}

/// `Z` at every level with multiplication by a fixed factor as connecting map.
#[derive(Debug, Clone)]
pub struct ScaledIntegers {
    factor: BigInt,
}

impl ScaledIntegers {
    pub fn new(factor: impl Into<BigInt>) -> Self {
        ScaledIntegers {
            factor: factor.into(),
        }
    }
}

impl LevelSource for ScaledIntegers {
    fn base(&self) -> usize {
        0
    }
    fn group(&self, _n: usize) -> Result<FgAbGroup, TowerError> {
        Ok(FgAbGroup::free(1))
    }
    fn has_maps(&self) -> bool {
        true
    }
    fn map(&self, _n: usize) -> Result<Homomorphism, TowerError> {
        let z = FgAbGroup::free(1);
        let m = IntMatrix::column_vector(vec![self.factor.clone()]);
        Ok(Homomorphism::new(z.clone(), z, m)?)
    }
    fn closed_form_inverse_limit(&self) -> Option<(FgAbGroup, String)> {
        Some(if self.factor.magnitude().is_one() {
            (FgAbGroup::free(1), "every connecting map is a unit".into())
        } else {
            (
                FgAbGroup::trivial(),
                format!("a compatible sequence lies in every {}^k Z, whose intersection is 0", self.factor),
            )
        })
    }
    fn describe(&self) -> String {
        format!("(Z, x{})", self.factor)
    }
}

/// `Z/p^n` for `n ≥ 1` with reduction maps `Z/p^n → Z/p^(n-1)`; inverse only.
#[derive(Debug, Clone)]
pub struct CyclicReductions {
    prime: BigInt,
}

impl CyclicReductions {
    pub fn new(prime: impl Into<BigInt>) -> Self {
        CyclicReductions {
            prime: prime.into(),
        }
    }
}

impl LevelSource for CyclicReductions {
    fn base(&self) -> usize {
        1
    }
    fn group(&self, n: usize) -> Result<FgAbGroup, TowerError> {
        Ok(FgAbGroup::cyclic(Pow::pow(&self.prime, n)))
    }
    fn has_maps(&self) -> bool {
        true
    }
    fn map(&self, n: usize) -> Result<Homomorphism, TowerError> {
        let m = IntMatrix::column_vector(vec![BigInt::one()]);
        Ok(Homomorphism::new(self.group(n)?, self.group(n - 1)?, m)?)
    }
    fn free_rank(&self, _n: usize) -> Result<usize, TowerError> {
        Ok(0)
    }
    fn describe(&self) -> String {
        format!("Z/{}^n with reductions", self.prime)
    }
}

/// A finitely given tower: explicit groups for levels `base..base+len` and the
/// maps between consecutive levels. `maps[i]` connects levels `base+i` and
/// `base+i+1`, pointing down for inverse towers and up for direct ones.
#[derive(Debug, Clone)]
pub struct PrefixLevels {
    base: usize,
    groups: Vec<FgAbGroup>,
    maps: Vec<Homomorphism>,
    downward: bool,
}

impl PrefixLevels {
    /// Prefix of an inverse tower: `maps[i]: G_{base+i+1} → G_{base+i}`.
    pub fn inverse(base: usize, groups: Vec<FgAbGroup>, maps: Vec<Homomorphism>) -> Result<Self, TowerError> {
        Self::build(base, groups, maps, true)
    }

    /// Prefix of a direct tower: `maps[i]: G_{base+i} → G_{base+i+1}`.
    pub fn direct(base: usize, groups: Vec<FgAbGroup>, maps: Vec<Homomorphism>) -> Result<Self, TowerError> {
        Self::build(base, groups, maps, false)
    }

    fn build(base: usize, groups: Vec<FgAbGroup>, maps: Vec<Homomorphism>, downward: bool) -> Result<Self, TowerError> {
        if groups.is_empty() {
            return Err(TowerError::Invalid("prefix has no groups".into()));
        }
        if maps.len() + 1 != groups.len() {
            return Err(TowerError::Invalid(format!(
                "{} groups need {} maps, got {}",
                groups.len(),
                groups.len() - 1,
                maps.len()
            )));
        }
        for (i, f) in maps.iter().enumerate() {
            let (from, to) = if downward {
                (&groups[i + 1], &groups[i])
            } else {
                (&groups[i], &groups[i + 1])
            };
            if f.source() != from || f.target() != to {
                return Err(TowerError::MapMismatch {
                    level: base + if downward { i + 1 } else { i },
                });
            }
        }
        Ok(PrefixLevels {
            base,
            groups,
            maps,
            downward,
        })
    }

    fn index(&self, n: usize) -> Result<usize, TowerError> {
        n.checked_sub(self.base)
            .filter(|&i| i < self.groups.len())
            .ok_or_else(|| TowerError::LevelUnavailable {
                level: n,
                reason: "outside the given prefix".into(),
            })
    }
}

impl LevelSource for PrefixLevels {
    fn base(&self) -> usize {
        self.base
    }
    fn group(&self, n: usize) -> Result<FgAbGroup, TowerError> {
        Ok(self.groups[self.index(n)?].clone())
    }
    fn has_maps(&self) -> bool {
        true
    }
    fn map(&self, n: usize) -> Result<Homomorphism, TowerError> {
        let i = self.index(n)?;
        let k = if self.downward { i.checked_sub(1) } else { Some(i) };
        k.and_then(|k| self.maps.get(k))
            .cloned()
            .ok_or_else(|| TowerError::LevelUnavailable {
                level: n,
                reason: "no connecting map given".into(),
            })
    }
    fn last_level(&self) -> Option<usize> {
        Some(self.base + self.groups.len() - 1)
    }
    fn describe(&self) -> String {
        format!("prefix of {} levels", self.groups.len())
    }
}

type GroupFn = dyn Fn(usize) -> Result<FgAbGroup, TowerError> + Send + Sync;
type MapFn = dyn Fn(usize) -> Result<Homomorphism, TowerError> + Send + Sync;

/// A tower given by closures.
#[derive(Clone)]
pub struct FnLevels {
    base: usize,
    label: String,
    groups: Arc<GroupFn>,
    maps: Option<Arc<MapFn>>,
}

impl FnLevels {
    pub fn new(
        base: usize,
        label: impl Into<String>,
        groups: impl Fn(usize) -> Result<FgAbGroup, TowerError> + Send + Sync + 'static,
        maps: impl Fn(usize) -> Result<Homomorphism, TowerError> + Send + Sync + 'static,
    ) -> Self {
        FnLevels {
            base,
            label: label.into(),
            groups: Arc::new(groups),
            maps: Some(Arc::new(maps)),
        }
    }

    /// Groups without connecting maps; only map-independent rules apply.
    pub fn groups_only(
        base: usize,
        label: impl Into<String>,
        groups: impl Fn(usize) -> Result<FgAbGroup, TowerError> + Send + Sync + 'static,
    ) -> Self {
        FnLevels {
            base,
            label: label.into(),
            groups: Arc::new(groups),
            maps: None,
        }
    }
}

impl LevelSource for FnLevels {
    fn base(&self) -> usize {
        self.base
    }
    fn group(&self, n: usize) -> Result<FgAbGroup, TowerError> {
        (self.groups)(n)
    }
    fn has_maps(&self) -> bool {
        self.maps.is_some()
    }
    fn map(&self, n: usize) -> Result<Homomorphism, TowerError> {
        match &self.maps {
            Some(f) => f(n),
            None => Err(TowerError::MapsUnspecified(self.label.clone())),
        }
    }
    fn describe(&self) -> String {
        self.label.clone()
    }
}
