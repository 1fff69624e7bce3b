//! Countable inverse and direct systems of finitely generated abelian groups.
//!
//! Every "eventually" statement made here is certified only up to the tower's
//! bound. When no structural rule settles a question within the bound the
//! answer is `Unproven`, never a guess.

mod graded;
mod limits;
mod product;
mod source;

use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use thiserror::Error;

use crate::fgab::{FgAbGroup, GroupError, Homomorphism};

pub use graded::{milnor_assemble, milnor_assemble_total, GradedInverseTower, KGradedGroup, KGroup};
pub use limits::{
    direct_limit, image_chain, inverse_limit, is_mittag_leffler, lim1, Lim1Descriptor,
    LimitDescriptor, MlFailure, MlVerdict, Rule, TrivialReason,
};
pub use product::{
    all_ones_order, last_factor_inclusion, truncated_product, truncated_product_presentation,
    truncation_projection, unbounded_torsion_witness, CyclicFamily, TorsionWitness,
};
pub use source::{ConstantLevels, CyclicReductions, FnLevels, LevelSource, PrefixLevels, ScaledIntegers};

pub const DEFAULT_BOUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("level {level} exceeds the certification bound {bound}")]
    BoundExceeded { level: usize, bound: usize },
    #[error("level {level} is below the base index {base}")]
    BelowBase { level: usize, base: usize },
    #[error("level {level} is not available: {reason}")]
    LevelUnavailable { level: usize, reason: String },
    #[error("connecting maps of `{0}` are not specified")]
    MapsUnspecified(String),
    #[error("connecting map at level {level} does not run between the declared groups")]
    MapMismatch { level: usize },
    #[error("level {level} has free rank {rank} in a levelwise-finite tower")]
    NotFinite { level: usize, rank: usize },
    #[error("invalid tower: {0}")]
    Invalid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// What is known structurally about the tail of a tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailClass {
    /// Constant with identity maps strictly beyond the given level.
    EventuallyConstant(usize),
    /// Every level is a finite group.
    LevelwiseFinite,
    General,
}

pub trait Direction: Copy + Send + Sync + 'static {
    const NAME: &'static str;
    /// Level reached by the connecting map leaving `n`.
    fn neighbour(n: usize, base: usize) -> Option<usize>;
}

/// Connecting maps go `G_n → G_{n-1}`.
#[derive(Debug, Clone, Copy)]
pub struct Inverse;

/// Connecting maps go `G_n → G_{n+1}`.
#[derive(Debug, Clone, Copy)]
pub struct Direct;

impl Direction for Inverse {
    const NAME: &'static str = "inverse";
    fn neighbour(n: usize, base: usize) -> Option<usize> {
        (n > base).then(|| n - 1)
    }
}

impl Direction for Direct {
    const NAME: &'static str = "direct";
    fn neighbour(n: usize, _base: usize) -> Option<usize> {
        Some(n + 1)
    }
}

/// A lazily generated tower. Levels are produced on demand by its
/// [`LevelSource`] and validated against the tail class as they are queried.
pub struct Tower<D: Direction> {
    source: Arc<dyn LevelSource>,
    tail: TailClass,
    bound: usize,
    _direction: PhantomData<D>,
}

pub type InverseTower = Tower<Inverse>;
pub type DirectTower = Tower<Direct>;

impl<D: Direction> Clone for Tower<D> {
    fn clone(&self) -> Self {
        Tower {
            source: Arc::clone(&self.source),
            tail: self.tail,
            bound: self.bound,
            _direction: PhantomData,
        }
    }
}

impl<D: Direction> fmt::Debug for Tower<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tower")
            .field("direction", &D::NAME)
            .field("source", &self.source.describe())
            .field("tail", &self.tail)
            .field("bound", &self.bound)
            .finish()
    }
}

impl<D: Direction> Tower<D> {
    pub fn new(source: impl LevelSource + 'static, tail: TailClass, bound: usize) -> Result<Self, TowerError> {
        Self::from_arc(Arc::new(source), tail, bound)
    }

    /// Finite sources cap the bound at their last level unless the tail is
    /// eventually constant.
    pub fn from_arc(source: Arc<dyn LevelSource>, tail: TailClass, bound: usize) -> Result<Self, TowerError> {
        let base = source.base();
        let mut bound = bound;
        if let TailClass::EventuallyConstant(n) = tail {
            if n < base {
                return Err(TowerError::Invalid(format!(
                    "constant tail starts at {n}, below the base index {base}"
                )));
            }
            if source.last_level().is_some_and(|last| n > last) {
                return Err(TowerError::Invalid(format!(
                    "constant tail starts at {n}, beyond the last given level"
                )));
            }
        } else if let Some(last) = source.last_level() {
            bound = bound.min(last);
        }
        if bound <= base {
            return Err(TowerError::Invalid(format!(
                "bound {bound} leaves no connecting map above base {base}"
            )));
        }
        if tail == TailClass::General && !source.has_maps() {
            return Err(TowerError::Invalid(
                "a general tower must specify its connecting maps".into(),
            ));
        }
        Ok(Tower {
            source,
            tail,
            bound,
            _direction: PhantomData,
        })
    }

    pub fn with_bound(&self, bound: usize) -> Result<Self, TowerError> {
        Self::from_arc(Arc::clone(&self.source), self.tail, bound)
    }

    pub fn base(&self) -> usize {
        self.source.base()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn tail(&self) -> TailClass {
        self.tail
    }

    pub fn describe(&self) -> String {
        self.source.describe()
    }

    /// Closed-form limit of an inverse tower whose source knows its whole tail.
    fn closed_form_inverse_limit(&self) -> Option<(FgAbGroup, String)> {
        match self.tail {
            TailClass::EventuallyConstant(_) => None,
            _ => self.source.closed_form_inverse_limit(),
        }
    }

    /// Whether connecting maps can be queried at all.
    pub fn has_maps(&self) -> bool {
        self.source.has_maps()
    }

    fn check_level(&self, n: usize) -> Result<(), TowerError> {
        if n < self.base() {
            return Err(TowerError::BelowBase {
                level: n,
                base: self.base(),
            });
        }
        if n > self.bound {
            return Err(TowerError::BoundExceeded {
                level: n,
                bound: self.bound,
            });
        }
        Ok(())
    }

    fn source_level(&self, n: usize) -> usize {
        match self.tail {
            TailClass::EventuallyConstant(last) => n.min(last),
            _ => n,
        }
    }

    pub fn group_at(&self, n: usize) -> Result<FgAbGroup, TowerError> {
        self.check_level(n)?;
        let g = self.source.group(self.source_level(n))?;
        if self.tail == TailClass::LevelwiseFinite && !g.is_finite() {
            return Err(TowerError::NotFinite {
                level: n,
                rank: g.free_rank(),
            });
        }
        Ok(g)
    }

    pub fn is_trivial_at(&self, n: usize) -> Result<bool, TowerError> {
        self.check_level(n)?;
        self.source.is_trivial(self.source_level(n))
    }

    pub fn free_rank_at(&self, n: usize) -> Result<usize, TowerError> {
        self.check_level(n)?;
        let rank = self.source.free_rank(self.source_level(n))?;
        if self.tail == TailClass::LevelwiseFinite && rank > 0 {
            return Err(TowerError::NotFinite { level: n, rank });
        }
        Ok(rank)
    }

    /// The connecting map leaving level `n`.
    pub fn map_at(&self, n: usize) -> Result<Homomorphism, TowerError> {
        self.check_level(n)?;
        let Some(m) = D::neighbour(n, self.base()) else {
            return Err(TowerError::LevelUnavailable {
                level: n,
                reason: format!("no {} map leaves the base level", D::NAME),
            });
        };
        self.check_level(m)?;
        if let TailClass::EventuallyConstant(last) = self.tail {
            if n >= last && m >= last {
                return Ok(Homomorphism::identity(&self.group_at(n)?));
            }
        }
        if !self.source.has_maps() {
            return Err(TowerError::MapsUnspecified(self.describe()));
        }
        let f = self.source.map(n)?;
        if *f.source() != self.group_at(n)? || *f.target() != self.group_at(m)? {
            return Err(TowerError::MapMismatch { level: n });
        }
        Ok(f)
    }
}
