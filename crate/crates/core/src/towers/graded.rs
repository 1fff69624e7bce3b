use super::limits::{inverse_limit, lim1, LimitDescriptor};
use super::product::CyclicFamily;
use super::{InverseTower, TowerError};
use crate::fgab::FgAbGroup;

/// One degree of a Z/2-graded K-group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KGroup {
    Limit(LimitDescriptor),
    /// `∏_n Z/m(n)`, kept symbolic.
    Product(CyclicFamily),
    /// `⊕_n Z/m(n)`, kept symbolic.
    Sum(CyclicFamily),
}

impl KGroup {
    pub fn exact(group: FgAbGroup, note: impl Into<String>) -> Self {
        KGroup::Limit(LimitDescriptor::ExactGroup {
            group,
            note: note.into(),
        })
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, KGroup::Limit(d) if d.is_trivial())
    }

    pub fn is_unproven(&self) -> bool {
        matches!(self, KGroup::Limit(d) if d.is_unproven())
    }

    pub fn exact_group(&self) -> Option<FgAbGroup> {
        match self {
            KGroup::Limit(d) => d.exact_group(),
            _ => None,
        }
    }

    /// Rank after tensoring with Q; `None` for descriptors that do not pin
    /// down a finitely generated group.
    pub fn rationalized_rank(&self) -> Option<usize> {
        self.exact_group().map(|g| g.rationalized_rank())
    }
}

/// A Z/2-graded group. Degrees `i` and `i + 2` are the same field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KGradedGroup {
    Split { even: KGroup, odd: KGroup },
    /// Only `K_0 ⊕ K_1` is known.
    Total(KGroup),
}

impl KGradedGroup {
    /// Degree `i` (any integer), when determined. A trivial total forces both
    /// degrees to be trivial.
    pub fn degree(&self, i: i64) -> Option<KGroup> {
        match self {
            KGradedGroup::Split { even, odd } => Some(if i.rem_euclid(2) == 0 { even } else { odd }.clone()),
            KGradedGroup::Total(t) if t.is_trivial() => Some(t.clone()),
            KGradedGroup::Total(_) => None,
        }
    }

    /// `K_0 ⊕ K_1` when both summands are exact groups.
    pub fn total_group(&self) -> Option<FgAbGroup> {
        match self {
            KGradedGroup::Split { even, odd } => Some(even.exact_group()?.direct_sum(&odd.exact_group()?)),
            KGradedGroup::Total(t) => t.exact_group(),
        }
    }

    pub fn rationalized_rank(&self) -> Option<usize> {
        match self {
            KGradedGroup::Split { even, odd } => Some(even.rationalized_rank()? + odd.rationalized_rank()?),
            KGradedGroup::Total(t) => t.rationalized_rank(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            KGradedGroup::Split { even, odd } => even.is_trivial() && odd.is_trivial(),
            KGradedGroup::Total(t) => t.is_trivial(),
        }
    }

    pub fn is_unproven(&self) -> bool {
        match self {
            KGradedGroup::Split { even, odd } => even.is_unproven() || odd.is_unproven(),
            KGradedGroup::Total(t) => t.is_unproven(),
        }
    }
}

/// Towers for the even and odd degree sharing a base index and bound.
#[derive(Debug, Clone)]
pub struct GradedInverseTower {
    even: InverseTower,
    odd: InverseTower,
}

impl GradedInverseTower {
    pub fn new(even: InverseTower, odd: InverseTower) -> Result<Self, TowerError> {
        if even.base() != odd.base() || even.bound() != odd.bound() {
            return Err(TowerError::Invalid(format!(
                "graded towers disagree: base {}/{} and bound {}/{}",
                even.base(),
                odd.base(),
                even.bound(),
                odd.bound()
            )));
        }
        Ok(GradedInverseTower { even, odd })
    }

    pub fn even(&self) -> &InverseTower {
        &self.even
    }

    pub fn odd(&self) -> &InverseTower {
        &self.odd
    }
}

/// Degree `i` of the limit: `lim` of the degree-`i` tower, provided `lim¹` of
/// the degree-`(1 − i)` tower vanishes.
fn assemble_degree(lim_tower: &InverseTower, lim1_tower: &InverseTower) -> Result<KGroup, TowerError> {
    let lim = inverse_limit(lim_tower)?;
    let obstruction = lim1(lim1_tower)?;
    Ok(KGroup::Limit(if obstruction.is_zero() {
        lim
    } else {
        LimitDescriptor::Unrepresentable {
            reason: "extension of lim by lim1 not determined".into(),
            lim: Box::new(lim),
            lim1: obstruction,
        }
    }))
}

pub fn milnor_assemble(t: &GradedInverseTower) -> Result<KGradedGroup, TowerError> {
    Ok(KGradedGroup::Split {
        even: assemble_degree(&t.even, &t.odd)?,
        odd: assemble_degree(&t.odd, &t.even)?,
    })
}

/// Milnor assembly when only the totals `K_0 ⊕ K_1` of the levels are known;
/// `lim¹` of the total tower is the sum of the degreewise `lim¹` terms.
pub fn milnor_assemble_total(t: &InverseTower) -> Result<KGradedGroup, TowerError> {
    Ok(KGradedGroup::Total(assemble_degree(t, t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::towers::{ConstantLevels, CyclicReductions, ScaledIntegers, TailClass};

    #[test]
    fn constant_towers_assemble_to_their_values() {
        let even = InverseTower::new(
            ConstantLevels::new(0, FgAbGroup::free(1)),
            TailClass::EventuallyConstant(0),
            10,
        )
        .unwrap();
        let odd = InverseTower::new(
            ConstantLevels::new(0, FgAbGroup::cyclic(3)),
            TailClass::EventuallyConstant(0),
            10,
        )
        .unwrap();
        let k = milnor_assemble(&GradedInverseTower::new(even, odd).unwrap()).unwrap();
        assert_eq!(k.degree(0).unwrap().exact_group(), Some(FgAbGroup::free(1)));
        assert_eq!(k.degree(1).unwrap().exact_group(), Some(FgAbGroup::cyclic(3)));
        assert_eq!(k.degree(-2), k.degree(4), "Bott periodicity");
        assert_eq!(k.degree(-1), k.degree(1));
    }

    #[test]
    fn cross_degree_gating() {
        let finite = InverseTower::new(CyclicReductions::new(2), TailClass::LevelwiseFinite, 10).unwrap();
        let doubling = InverseTower::new(ScaledIntegers::new(2), TailClass::General, 10).unwrap();
        assert!(GradedInverseTower::new(finite.clone(), doubling.clone()).is_err(), "bases differ");

        let finite0 = InverseTower::new(ConstantLevels::new(0, FgAbGroup::cyclic(2)), TailClass::LevelwiseFinite, 10)
            .unwrap();
        let k = milnor_assemble(&GradedInverseTower::new(finite0, doubling).unwrap()).unwrap();
        let KGradedGroup::Split { even, odd } = k else { panic!() };
        assert!(matches!(even, KGroup::Limit(LimitDescriptor::Unrepresentable { .. })));
        assert_eq!(odd.exact_group(), Some(FgAbGroup::trivial()));
    }

    #[test]
    fn trivial_total_determines_both_degrees() {
        let k = KGradedGroup::Total(KGroup::exact(FgAbGroup::trivial(), "test"));
        assert!(k.degree(0).unwrap().is_trivial());
        assert!(k.degree(1).unwrap().is_trivial());
        let k = KGradedGroup::Total(KGroup::exact(FgAbGroup::cyclic(2), "test"));
        assert_eq!(k.degree(0), None);
    }
}
