use num_bigint::BigInt;

use super::{DirectTower, InverseTower, TailClass, TowerError};
use crate::fgab::{self, FgAbGroup, Homomorphism, Subgroup};

/// Structural rule that settles a verdict without searching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Decreasing chains of finite subgroups stabilize.
    LevelwiseFinite,
    /// Constant tail with identity maps.
    EventuallyConstant,
    /// Decreasing chains of finite-dimensional subspaces stabilize.
    FiniteDimensional,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::LevelwiseFinite => "levelwise-finite",
            Rule::EventuallyConstant => "eventually-constant",
            Rule::FiniteDimensional => "finite-dimensional",
        }
    }

    /// Re-checks the rule's premise on `tower` up to its bound.
    pub fn premise_holds(&self, tower: &InverseTower) -> Result<bool, TowerError> {
        match self {
            Rule::EventuallyConstant => Ok(matches!(tower.tail(), TailClass::EventuallyConstant(_))),
            Rule::LevelwiseFinite => {
                for n in tower.base()..=tower.bound() {
                    match tower.free_rank_at(n) {
                        Ok(0) => {}
                        Ok(_) | Err(TowerError::NotFinite { .. }) => return Ok(false),
                        Err(e) => return Err(e),
                    }
                }
                Ok(true)
            }
            // Group towers never carry this rule; it belongs to vector-space
            // towers tracked by dimension.
            Rule::FiniteDimensional => Ok(false),
        }
    }
}

/// Evidence that an image chain was still shrinking at the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlFailure {
    pub level: usize,
    pub depth: usize,
    /// `[G_level : im(G_{level+k} → G_level)]` for `k = 0..=depth`; `None` for
    /// infinite index.
    pub indices: Vec<Option<BigInt>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MlVerdict {
    VerifiedUpTo(usize),
    FailedAt(MlFailure),
    ForcedByRule(Rule),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lim1Descriptor {
    Zero(Rule),
    NonzeroUncomputed(MlFailure),
    Unproven { bound: usize },
}

impl Lim1Descriptor {
    pub fn is_zero(&self) -> bool {
        matches!(self, Lim1Descriptor::Zero(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrivialReason {
    /// Every level from `from_level` up to `bound` is the trivial group.
    CofinalTriviality { from_level: usize, bound: usize },
    /// Each listed `(level, dead_at)` pair: the composite map from `level`
    /// to `dead_at` is zero.
    ElementsDie { deaths: Vec<(usize, usize)>, bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitDescriptor {
    ExactGroup { group: FgAbGroup, note: String },
    Trivial(TrivialReason),
    /// Stable images keep growing; the limit is a nontrivial profinite group.
    ProfiniteNontrivial { stable_orders: Vec<(usize, BigInt)> },
    Unrepresentable {
        reason: String,
        lim: Box<LimitDescriptor>,
        lim1: Lim1Descriptor,
    },
    Unproven { bound: usize },
}

impl LimitDescriptor {
    pub fn is_trivial(&self) -> bool {
        match self {
            LimitDescriptor::Trivial(_) => true,
            LimitDescriptor::ExactGroup { group, .. } => group.is_trivial(),
            _ => false,
        }
    }

    pub fn is_unproven(&self) -> bool {
        matches!(self, LimitDescriptor::Unproven { .. })
    }

    /// The exact group, if the descriptor pins one down.
    pub fn exact_group(&self) -> Option<FgAbGroup> {
        match self {
            LimitDescriptor::ExactGroup { group, .. } => Some(group.clone()),
            LimitDescriptor::Trivial(_) => Some(FgAbGroup::trivial()),
            _ => None,
        }
    }
}

/// Levels whose image chains reach at least half way to the bound.
fn window_top(base: usize, bound: usize) -> usize {
    base + (bound - base) / 2
}

/// `G_{level+depth} → G_level` as a single homomorphism.
fn composite_down(t: &InverseTower, level: usize, depth: usize) -> Result<Homomorphism, TowerError> {
    let mut comp = Homomorphism::identity(&t.group_at(level)?);
    for j in level + 1..=level + depth {
        comp = t.map_at(j)?.then(&comp)?;
    }
    Ok(comp)
}

/// `G_level → G_{level+depth}`.
fn composite_up(t: &DirectTower, level: usize, depth: usize) -> Result<Homomorphism, TowerError> {
    let mut comp = Homomorphism::identity(&t.group_at(level)?);
    for j in level..level + depth {
        comp = comp.then(&t.map_at(j)?)?;
    }
    Ok(comp)
}

/// `im(G_{level+k} → G_level)` for `k = 0..=depth`, as subgroups of `G_level`.
pub fn image_chain(t: &InverseTower, level: usize, depth: usize) -> Result<Vec<Subgroup>, TowerError> {
    if level + depth > t.bound() {
        return Err(TowerError::BoundExceeded {
            level: level + depth,
            bound: t.bound(),
        });
    }
    let mut comp = Homomorphism::identity(&t.group_at(level)?);
    let mut chain = vec![fgab::image(&comp)];
    for j in level + 1..=level + depth {
        comp = t.map_at(j)?.then(&comp)?;
        chain.push(fgab::image(&comp));
    }
    Ok(chain)
}

/// The image at maximal depth, provided the chain has stopped shrinking at
/// its last step.
fn stable_image(t: &InverseTower, level: usize) -> Result<Option<Subgroup>, TowerError> {
    let depth = t.bound() - level;
    let comp = composite_down(t, level, depth - 1)?;
    let before = fgab::image(&comp);
    let last = fgab::image(&t.map_at(level + depth)?.then(&comp)?);
    Ok(last.contains(&before).then_some(last))
}

pub fn is_mittag_leffler(t: &InverseTower) -> Result<MlVerdict, TowerError> {
    match t.tail() {
        TailClass::LevelwiseFinite => Ok(MlVerdict::ForcedByRule(Rule::LevelwiseFinite)),
        TailClass::EventuallyConstant(_) => Ok(MlVerdict::ForcedByRule(Rule::EventuallyConstant)),
        TailClass::General => {
            for level in t.base()..=window_top(t.base(), t.bound()) {
                if stable_image(t, level)?.is_none() {
                    let depth = t.bound() - level;
                    let indices = image_chain(t, level, depth)?
                        .iter()
                        .map(Subgroup::index)
                        .collect();
                    return Ok(MlVerdict::FailedAt(MlFailure {
                        level,
                        depth,
                        indices,
                    }));
                }
            }
            Ok(MlVerdict::VerifiedUpTo(t.bound()))
        }
    }
}

pub fn lim1(t: &InverseTower) -> Result<Lim1Descriptor, TowerError> {
    Ok(match is_mittag_leffler(t)? {
        MlVerdict::ForcedByRule(rule) => Lim1Descriptor::Zero(rule),
        MlVerdict::FailedAt(w) => Lim1Descriptor::NonzeroUncomputed(w),
        MlVerdict::VerifiedUpTo(bound) => Lim1Descriptor::Unproven { bound },
    })
}

/// Least `n0` such that every level in `n0..=bound` is trivial.
fn cofinal_triviality<D: super::Direction>(t: &super::Tower<D>) -> Result<Option<usize>, TowerError> {
    let mut from = None;
    for n in (t.base()..=t.bound()).rev() {
        if !t.is_trivial_at(n)? {
            break;
        }
        from = Some(n);
    }
    Ok(from)
}

pub fn inverse_limit(t: &InverseTower) -> Result<LimitDescriptor, TowerError> {
    if let TailClass::EventuallyConstant(n) = t.tail() {
        return Ok(LimitDescriptor::ExactGroup {
            group: t.group_at(n)?,
            note: format!("eventually constant from level {n}"),
        });
    }
    if let Some((group, note)) = t.closed_form_inverse_limit() {
        return Ok(LimitDescriptor::ExactGroup { group, note });
    }
    if t.tail() != TailClass::LevelwiseFinite {
        return Ok(LimitDescriptor::Unproven { bound: t.bound() });
    }
    if let Some(from_level) = cofinal_triviality(t)? {
        return Ok(LimitDescriptor::Trivial(TrivialReason::CofinalTriviality {
            from_level,
            bound: t.bound(),
        }));
    }
    if !t.has_maps() {
        return Ok(LimitDescriptor::Unproven { bound: t.bound() });
    }

    let top = window_top(t.base(), t.bound());
    let mut stable = Vec::new();
    for level in t.base()..=top {
        match stable_image(t, level)? {
            Some(s) => stable.push(s),
            None => return Ok(LimitDescriptor::Unproven { bound: t.bound() }),
        }
    }
    let orders: Vec<(usize, BigInt)> = stable
        .iter()
        .enumerate()
        .map(|(i, s)| (t.base() + i, s.group.order().expect("levels are finite")))
        .collect();

    let settled_from = t.base() + stable.len() / 2;
    let tail_orders = &orders[settled_from - t.base()..];
    if tail_orders.windows(2).any(|w| w[1].1 > w[0].1) {
        return Ok(LimitDescriptor::ProfiniteNontrivial {
            stable_orders: orders,
        });
    }
    // Orders have settled; confirm each connecting map carries the stable
    // image onto the one below.
    for level in settled_from.max(t.base() + 1)..=top {
        let upper = &stable[level - t.base()];
        let lower = &stable[level - 1 - t.base()];
        let carried = fgab::image(&upper.inclusion.then(&t.map_at(level)?)?);
        if !carried.same_as(lower) || upper.group.order() != lower.group.order() {
            return Ok(LimitDescriptor::Unproven { bound: t.bound() });
        }
    }
    let group = stable[top - t.base()].group.clone();
    Ok(LimitDescriptor::ExactGroup {
        note: format!(
            "stable images carried isomorphically by the connecting maps from level {settled_from} to {top}"
        ),
        group,
    })
}

pub fn direct_limit(t: &DirectTower) -> Result<LimitDescriptor, TowerError> {
    if let TailClass::EventuallyConstant(n) = t.tail() {
        return Ok(LimitDescriptor::ExactGroup {
            group: t.group_at(n)?,
            note: format!("eventually constant from level {n}"),
        });
    }
    if let Some(from_level) = cofinal_triviality(t)? {
        return Ok(LimitDescriptor::Trivial(TrivialReason::CofinalTriviality {
            from_level,
            bound: t.bound(),
        }));
    }
    if !t.has_maps() {
        return Ok(LimitDescriptor::Unproven { bound: t.bound() });
    }

    let top = window_top(t.base(), t.bound());
    // Connecting maps that are isomorphisms all the way to the bound.
    let mut iso_from = None;
    for n in (t.base()..t.bound()).rev() {
        if !t.map_at(n)?.is_isomorphism() {
            break;
        }
        iso_from = Some(n);
    }
    if let Some(n) = iso_from.filter(|&n| n <= top) {
        return Ok(LimitDescriptor::ExactGroup {
            group: t.group_at(n)?,
            note: format!("connecting maps are isomorphisms from level {n} to {}", t.bound()),
        });
    }

    let mut deaths = Vec::new();
    for level in t.base()..=top {
        if t.free_rank_at(level)? > 0 {
            return Ok(LimitDescriptor::Unproven { bound: t.bound() });
        }
        let mut dead_at = None;
        let mut comp = composite_up(t, level, 0)?;
        for target in level..=t.bound() {
            if target > level {
                comp = comp.then(&t.map_at(target - 1)?)?;
            }
            if comp.is_zero() {
                dead_at = Some(target);
                break;
            }
        }
        match dead_at {
            Some(d) => deaths.push((level, d)),
            None => return Ok(LimitDescriptor::Unproven { bound: t.bound() }),
        }
    }
    Ok(LimitDescriptor::Trivial(TrivialReason::ElementsDie {
        deaths,
        bound: t.bound(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::IntMatrix;
    use crate::towers::{ConstantLevels, CyclicReductions, FnLevels, PrefixLevels, ScaledIntegers};

    fn z(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn image_chain_examples() {
        let g = FgAbGroup::new(1, vec![z(3)]).unwrap();
        let t = InverseTower::new(ConstantLevels::new(0, g.clone()), TailClass::General, 6).unwrap();
        let chain = image_chain(&t, 0, 4).unwrap();
        assert_eq!(chain.len(), 5);
        assert!(chain.iter().all(|s| s.group == g));

        let t = InverseTower::new(CyclicReductions::new(2), TailClass::LevelwiseFinite, 10).unwrap();
        let chain = image_chain(&t, 1, 5).unwrap();
        assert!(chain.iter().all(|s| s.group == FgAbGroup::cyclic(2)));

        let t = InverseTower::new(ScaledIntegers::new(2), TailClass::General, 10).unwrap();
        let chain = image_chain(&t, 0, 4).unwrap();
        assert!(chain.iter().all(|s| s.group == FgAbGroup::free(1)));
        for w in chain.windows(2) {
            assert!(w[0].contains(&w[1]));
            assert!(!w[1].contains(&w[0]), "2^k Z strictly decreases");
        }
        assert!(image_chain(&t, 8, 4).is_err());
    }

    #[test]
    fn mittag_leffler_verdicts() {
        let t = InverseTower::new(CyclicReductions::new(2), TailClass::LevelwiseFinite, 10).unwrap();
        assert_eq!(is_mittag_leffler(&t).unwrap(), MlVerdict::ForcedByRule(Rule::LevelwiseFinite));
        assert_eq!(lim1(&t).unwrap(), Lim1Descriptor::Zero(Rule::LevelwiseFinite));

        let t = InverseTower::new(ScaledIntegers::new(2), TailClass::General, 10).unwrap();
        let MlVerdict::FailedAt(w) = is_mittag_leffler(&t).unwrap() else {
            panic!("(Z, x2) is not Mittag-Leffler");
        };
        assert_eq!(w.level, 0);
        let expected: Vec<Option<BigInt>> = (0..=10).map(|k| Some(z(1) << k)).collect();
        assert_eq!(w.indices, expected);
        assert!(matches!(lim1(&t).unwrap(), Lim1Descriptor::NonzeroUncomputed(ref f) if f.level == 0));

        let t = InverseTower::new(
            ConstantLevels::new(0, FgAbGroup::free(2)),
            TailClass::EventuallyConstant(0),
            10,
        )
        .unwrap();
        assert_eq!(lim1(&t).unwrap(), Lim1Descriptor::Zero(Rule::EventuallyConstant));

        // Stabilizing general tower: identity on Z.
        let t = InverseTower::new(ConstantLevels::new(0, FgAbGroup::free(1)), TailClass::General, 8).unwrap();
        assert_eq!(is_mittag_leffler(&t).unwrap(), MlVerdict::VerifiedUpTo(8));
        assert_eq!(lim1(&t).unwrap(), Lim1Descriptor::Unproven { bound: 8 });
    }

    #[test]
    fn zero_rules_are_reproducible() {
        let t = InverseTower::new(CyclicReductions::new(3), TailClass::LevelwiseFinite, 12).unwrap();
        let Lim1Descriptor::Zero(rule) = lim1(&t).unwrap() else {
            panic!()
        };
        assert!(rule.premise_holds(&t).unwrap());
    }

    #[test]
    fn inverse_limit_examples() {
        let g = FgAbGroup::new(0, vec![z(2), z(4)]).unwrap();
        let t = InverseTower::new(ConstantLevels::new(0, g.clone()), TailClass::EventuallyConstant(0), 5).unwrap();
        assert_eq!(inverse_limit(&t).unwrap().exact_group(), Some(g));

        let t = InverseTower::new(
            FnLevels::groups_only(0, "Z/(6-n)", |n| Ok(FgAbGroup::cyclic(6usize.saturating_sub(n).max(1)))),
            TailClass::LevelwiseFinite,
            20,
        )
        .unwrap();
        assert_eq!(
            inverse_limit(&t).unwrap(),
            LimitDescriptor::Trivial(TrivialReason::CofinalTriviality { from_level: 5, bound: 20 })
        );

        let t = InverseTower::new(CyclicReductions::new(2), TailClass::LevelwiseFinite, 16).unwrap();
        let LimitDescriptor::ProfiniteNontrivial { stable_orders } = inverse_limit(&t).unwrap() else {
            panic!("Z/2^n limit is the 2-adic integers");
        };
        assert_eq!(stable_orders[0], (1, z(2)));
        assert!(stable_orders.windows(2).all(|w| w[1].1 == &w[0].1 * 2));

        let t = InverseTower::new(ScaledIntegers::new(2), TailClass::General, 8).unwrap();
        assert!(inverse_limit(&t).unwrap().is_trivial());

        // Same tower given only by closures: nothing is known past the bound.
        let closures = crate::towers::FnLevels::new(
            0,
            "doubling",
            |_| Ok(FgAbGroup::free(1)),
            |_| {
                let z = FgAbGroup::free(1);
                Ok(Homomorphism::new(z.clone(), z, crate::intlin::IntMatrix::from_rows(&[vec![2]]).unwrap())?)
            },
        );
        let t = InverseTower::new(closures, TailClass::General, 8).unwrap();
        assert!(inverse_limit(&t).unwrap().is_unproven());
    }

    #[test]
    fn stable_images_give_exact_limits() {
        // Z/2 ⊕ Z/4 at every level, connecting map (a, b) ↦ (0, b): stable image Z/4.
        let g = FgAbGroup::new(0, vec![z(2), z(4)]).unwrap();
        let f = Homomorphism::new(g.clone(), g.clone(), IntMatrix::from_rows(&[vec![0, 0], vec![0, 1]]).unwrap())
            .unwrap();
        let gg = g.clone();
        let t = InverseTower::new(
            FnLevels::new(0, "projection tower", move |_| Ok(gg.clone()), move |_| Ok(f.clone())),
            TailClass::LevelwiseFinite,
            12,
        )
        .unwrap();
        let lim = inverse_limit(&t).unwrap();
        assert_eq!(lim.exact_group(), Some(FgAbGroup::cyclic(4)));
    }

    #[test]
    fn direct_limit_examples() {
        let t = DirectTower::new(
            FnLevels::groups_only(0, "eventually trivial", |n| Ok(if n < 3 { FgAbGroup::cyclic(5) } else { FgAbGroup::trivial() })),
            TailClass::LevelwiseFinite,
            10,
        )
        .unwrap();
        assert!(matches!(
            direct_limit(&t).unwrap(),
            LimitDescriptor::Trivial(TrivialReason::CofinalTriviality { from_level: 3, .. })
        ));

        let g = FgAbGroup::new(1, vec![z(2)]).unwrap();
        let t = DirectTower::new(ConstantLevels::new(0, g.clone()), TailClass::General, 10).unwrap();
        let lim = direct_limit(&t).unwrap();
        assert_eq!(lim.exact_group(), Some(g.clone()));
        assert_eq!(lim.exact_group().unwrap().rationalized_rank(), t.group_at(10).unwrap().free_rank());

        // Z/4 with doubling maps: every element dies after two steps.
        let z4 = FgAbGroup::cyclic(4);
        let dbl = Homomorphism::new(z4.clone(), z4.clone(), IntMatrix::from_rows(&[vec![2]]).unwrap()).unwrap();
        let src = PrefixLevels::direct(0, vec![z4.clone(); 9], vec![dbl; 8]).unwrap();
        let t = DirectTower::new(src, TailClass::LevelwiseFinite, 8).unwrap();
        let LimitDescriptor::Trivial(TrivialReason::ElementsDie { deaths, .. }) = direct_limit(&t).unwrap() else {
            panic!()
        };
        assert!(deaths.iter().all(|&(l, d)| d == l + 2));

        let t = DirectTower::new(ScaledIntegers::new(2), TailClass::General, 10).unwrap();
        assert!(direct_limit(&t).unwrap().is_unproven());
    }
}
