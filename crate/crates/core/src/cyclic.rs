//! Periodic cyclic homology of `SU(n)` and `SU(∞)` as graded dimensions of
//! exterior algebras, and the rank check between K-theory and HP.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::ktwist::{self, KResult, KTwistError, TwistedSpace};
use crate::towers::{Lim1Descriptor, Rule};

/// Subsets are enumerated explicitly only up to this many generators.
pub const ENUMERATION_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclicError {
    #[error("{name} = {value} is out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: usize,
        expected: &'static str,
    },
    #[error("generator degrees must be odd and strictly increasing, got {0:?}")]
    BadDegrees(Vec<u32>),
    #[error("{0} generators are too many to enumerate")]
    TooManyGenerators(usize),
    #[error("K-group is not an exact group ({0}); its rank cannot be computed")]
    DescriptorOnly(String),
    #[error("twisted HP is only computed for SU(n) and SU(inf), not {0}")]
    Unsupported(String),
    #[error("twisted K of {0} is not torsion")]
    NotTorsion(String),
    #[error(transparent)]
    KTwist(#[from] KTwistError),
}

/// `Λ_C(x_{d_1}, ..., x_{d_g})` with odd generator degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorAlgebra {
    generator_degrees: Vec<u32>,
}

impl ExteriorAlgebra {
    pub fn new(generator_degrees: Vec<u32>) -> Result<Self, CyclicError> {
        let odd = generator_degrees.iter().all(|d| d % 2 == 1);
        let increasing = generator_degrees.windows(2).all(|w| w[0] < w[1]);
        if !odd || !increasing {
            return Err(CyclicError::BadDegrees(generator_degrees));
        }
        Ok(ExteriorAlgebra { generator_degrees })
    }

    pub fn generator_degrees(&self) -> &[u32] {
        &self.generator_degrees
    }

    pub fn num_generators(&self) -> usize {
        self.generator_degrees.len()
    }
}

/// Dimensions of the even and odd parts of a Z/2-graded vector space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedDims {
    pub even: BigUint,
    pub odd: BigUint,
}

impl GradedDims {
    pub fn new(even: impl Into<BigUint>, odd: impl Into<BigUint>) -> Self {
        GradedDims {
            even: even.into(),
            odd: odd.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0u32, 0u32)
    }

    pub fn total(&self) -> BigUint {
        &self.even + &self.odd
    }
}

/// De Rham cohomology of `SU(n)`: `Λ(x_3, x_5, ..., x_{2n-1})`.
pub fn su_de_rham(n: usize) -> Result<ExteriorAlgebra, CyclicError> {
    if n < 2 {
        return Err(CyclicError::OutOfRange {
            name: "n",
            value: n,
            expected: "at least 2",
        });
    }
    let top = u32::try_from(n).map_err(|_| CyclicError::OutOfRange {
        name: "n",
        value: n,
        expected: "below 2^32",
    })?;
    ExteriorAlgebra::new((2..=top).map(|i| 2 * i - 1).collect())
}

/// Monomials counted by parity of total degree. With odd generators that is
/// the parity of the number of factors, so both parts have dimension
/// `2^(g-1)` once there is a generator.
pub fn graded_dims(a: &ExteriorAlgebra) -> GradedDims {
    match a.num_generators() {
        0 => GradedDims::new(1u32, 0u32),
        g => {
            let half = BigUint::one() << (g - 1);
            GradedDims::new(half.clone(), half)
        }
    }
}

/// Same count by listing every monomial and summing its degrees.
pub fn enumerate_graded_dims(a: &ExteriorAlgebra) -> Result<GradedDims, CyclicError> {
    let g = a.num_generators();
    if g > ENUMERATION_LIMIT {
        return Err(CyclicError::TooManyGenerators(g));
    }
    let (mut even, mut odd) = (0u64, 0u64);
    for subset in 0u64..(1 << g) {
        let degree: u64 = a
            .generator_degrees
            .iter()
            .enumerate()
            .filter(|(i, _)| subset >> i & 1 == 1)
            .map(|(_, &d)| u64::from(d))
            .sum();
        if degree.is_multiple_of(2) {
            even += 1;
        } else {
            odd += 1;
        }
    }
    Ok(GradedDims::new(even, odd))
}

/// The map `Λ(x_3, ..., x_{2n-1}) → Λ(x_3, ..., x_{2n-3})` induced by
/// `SU(n-1) ⊂ SU(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub n: usize,
    pub source: ExteriorAlgebra,
    pub target: ExteriorAlgebra,
    /// Image of each source generator: an index into the target generators,
    /// or `None` when it is sent to zero.
    pub generator_images: Vec<Option<usize>>,
    pub source_dims: GradedDims,
    pub target_dims: GradedDims,
    /// Dimensions of the image.
    pub image_dims: GradedDims,
    pub kernel_dim: BigUint,
}

impl Restriction {
    pub fn is_surjective(&self) -> bool {
        self.image_dims == self.target_dims
    }
}

pub fn restriction(n: usize) -> Result<Restriction, CyclicError> {
    if n < 3 {
        return Err(CyclicError::OutOfRange {
            name: "n",
            value: n,
            expected: "at least 3",
        });
    }
    let source = su_de_rham(n)?;
    let target = su_de_rham(n - 1)?;
    let generator_images: Vec<Option<usize>> = (0..source.num_generators())
        .map(|i| (i < target.num_generators()).then_some(i))
        .collect();
    // A monomial survives iff all its generators do, and distinct surviving
    // monomials have distinct images. The surviving monomials are exactly the
    // monomials in the surviving generators, with the same degrees.
    let surviving: Vec<u32> = generator_images
        .iter()
        .zip(source.generator_degrees())
        .filter_map(|(img, &d)| img.map(|_| d))
        .collect();
    let image_dims = graded_dims(&ExteriorAlgebra::new(surviving)?);
    let source_dims = graded_dims(&source);
    let kernel_dim = source_dims.total() - image_dims.total();
    Ok(Restriction {
        n,
        target_dims: graded_dims(&target),
        source,
        target,
        generator_images,
        source_dims,
        image_dims,
        kernel_dim,
    })
}

/// The inverse system `n ↦ HP_*(SU(n))` up to a truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpTowerReport {
    pub truncation: usize,
    /// `(n, dims)` for `n = 2..=truncation`.
    pub levels: Vec<(usize, GradedDims)>,
    pub restrictions_surjective: bool,
    pub lim1: Lim1Descriptor,
    /// Whether the dimensions strictly increase along the truncation.
    pub dims_unbounded: bool,
    pub limit: String,
}

pub fn hp_su_infinity(truncation: usize) -> Result<HpTowerReport, CyclicError> {
    if truncation < 2 {
        return Err(CyclicError::OutOfRange {
            name: "truncation",
            value: truncation,
            expected: "at least 2",
        });
    }
    let levels = (2..=truncation)
        .map(|n| Ok((n, graded_dims(&su_de_rham(n)?))))
        .collect::<Result<Vec<_>, CyclicError>>()?;
    let restrictions_surjective = (3..=truncation).try_fold(true, |ok, n| Ok::<_, CyclicError>(ok && restriction(n)?.is_surjective()))?;
    let dims_unbounded = levels.len() > 1 && levels.windows(2).all(|w| w[1].1.total() > w[0].1.total());
    Ok(HpTowerReport {
        truncation,
        levels,
        restrictions_surjective,
        lim1: Lim1Descriptor::Zero(Rule::FiniteDimensional),
        dims_unbounded,
        limit: "formal inverse limit of Λ(x_3, ..., x_{2n-1}); not finite-dimensional".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChernCheck {
    Pass,
    Fail { k_rank: usize, hp_dim: BigUint },
}

/// The Chern character is an isomorphism after tensoring with C, so the
/// rational rank of K must equal the total HP dimension.
pub fn chern_rank_check(k: &KResult, hp_total_dim: &BigUint) -> Result<ChernCheck, CyclicError> {
    let k_rank = k
        .graded
        .rationalized_rank()
        .ok_or_else(|| CyclicError::DescriptorOnly(format!("{:?}", k.graded)))?;
    Ok(if BigUint::from(k_rank) == *hp_total_dim {
        ChernCheck::Pass
    } else {
        ChernCheck::Fail {
            k_rank,
            hp_dim: hp_total_dim.clone(),
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedHp {
    pub dims: GradedDims,
    pub provenance: Vec<String>,
}

/// Twisted HP from twisted K: pure torsion K vanishes after `⊗ C`, and the
/// Chern character identifies the result with HP.
pub fn twisted_hp(space: &TwistedSpace, bound: usize) -> Result<TwistedHp, CyclicError> {
    space.validate()?;
    let mut provenance = Vec::new();
    match space {
        TwistedSpace::SUFinite { n, level } => {
            let k = ktwist::twisted_k(space, bound)?;
            let rank = k
                .graded
                .rationalized_rank()
                .ok_or_else(|| CyclicError::DescriptorOnly(space.describe()))?;
            if rank != 0 {
                return Err(CyclicError::NotTorsion(space.describe()));
            }
            provenance.push(format!("twisted K of (SU({n}), {level}) is finite"));
        }
        TwistedSpace::SUInfinite { level } => {
            let tower = ktwist::su_inverse_tower(*level, bound)?;
            for n in tower.base()..=tower.bound() {
                if tower.free_rank_at(n).map_err(KTwistError::from)? != 0 {
                    return Err(CyclicError::NotTorsion(space.describe()));
                }
            }
            provenance.push(format!(
                "every level (Z/c(n, {level}))^(2^(n-1)) is finite, so its rational rank is 0"
            ));
            provenance.push("twisted HP of every SU(n) level vanishes".into());
            provenance.push("lim1 of the zero tower vanishes; Milnor sequence gives HP = 0".into());
        }
        other => return Err(CyclicError::Unsupported(other.describe())),
    }
    provenance.push("K tensor C = 0".into());
    provenance.push("Chern character: HP = K tensor C".into());
    Ok(TwistedHp {
        dims: GradedDims::zero(),
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgab::FgAbGroup;
    use num_traits::Zero;

    #[test]
    fn de_rham_generators() {
        assert_eq!(su_de_rham(2).unwrap().generator_degrees(), &[3]);
        assert_eq!(su_de_rham(4).unwrap().generator_degrees(), &[3, 5, 7]);
        assert!(su_de_rham(1).is_err());
        assert!(ExteriorAlgebra::new(vec![3, 4]).is_err());
        assert!(ExteriorAlgebra::new(vec![5, 3]).is_err());
    }

    #[test]
    fn dims_match_enumeration() {
        for n in 2..=12 {
            let a = su_de_rham(n).unwrap();
            let d = graded_dims(&a);
            assert_eq!(d, enumerate_graded_dims(&a).unwrap());
            assert_eq!(d.even, BigUint::one() << (n - 2));
        }
        let empty = ExteriorAlgebra::new(vec![]).unwrap();
        assert_eq!(graded_dims(&empty), enumerate_graded_dims(&empty).unwrap());
    }

    #[test]
    fn restrictions_halve() {
        let r = restriction(3).unwrap();
        assert_eq!(r.generator_images, vec![Some(0), None]);
        assert_eq!(r.source_dims, GradedDims::new(2u32, 2u32));
        assert_eq!(r.target_dims, GradedDims::new(1u32, 1u32));
        assert!(r.is_surjective());
        assert_eq!(r.kernel_dim, BigUint::from(2u32));
        assert!(restriction(2).is_err());
    }

    #[test]
    fn hp_tower() {
        let r = hp_su_infinity(4).unwrap();
        let dims: Vec<u32> = r.levels.iter().map(|(_, d)| u32::try_from(&d.even).unwrap()).collect();
        assert_eq!(dims, vec![1, 2, 4]);
        assert!(r.restrictions_surjective && r.dims_unbounded);
        assert!(r.lim1.is_zero());
    }

    #[test]
    fn chern_checks() {
        let k = ktwist::twisted_k(&TwistedSpace::su(2, 2).unwrap(), 64).unwrap();
        assert_eq!(chern_rank_check(&k, &BigUint::zero()).unwrap(), ChernCheck::Pass);
        let g = FgAbGroup::free(2).direct_sum(&FgAbGroup::cyclic(3));
        let k = KResult::from_total(g, "test");
        assert_eq!(chern_rank_check(&k, &BigUint::from(2u32)).unwrap(), ChernCheck::Pass);
        let k = KResult::from_total(FgAbGroup::free(1), "test");
        assert!(matches!(chern_rank_check(&k, &BigUint::zero()).unwrap(), ChernCheck::Fail { .. }));
        let k = ktwist::twisted_k(&TwistedSpace::sphere_union(), 64).unwrap();
        assert!(chern_rank_check(&k, &BigUint::zero()).is_err());
    }

    #[test]
    fn twisted_hp_vanishes() {
        for s in [TwistedSpace::su(3, 5).unwrap(), TwistedSpace::su_infinite(2).unwrap()] {
            let hp = twisted_hp(&s, 64).unwrap();
            assert_eq!(hp.dims, GradedDims::zero());
            let k = ktwist::twisted_k(&s, 64).unwrap();
            assert_eq!(chern_rank_check(&k, &hp.dims.total()).unwrap(), ChernCheck::Pass);
        }
        assert!(twisted_hp(&TwistedSpace::sphere3(3).unwrap(), 64).is_err());
    }
}
