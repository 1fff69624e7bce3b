use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::TowerError;
use crate::fgab::{self, ElementOrder, FgAbGroup, Homomorphism, Presentation};
use crate::intlin::IntMatrix;

type OrderFn = dyn Fn(usize) -> BigInt + Send + Sync;

/// A countable family of cyclic groups `Z/m(n)`, `n ≥ first`, with `m(n) ≥ 1`.
#[derive(Clone)]
pub struct CyclicFamily {
    first: usize,
    label: String,
    order_at: Arc<OrderFn>,
}

impl fmt::Debug for CyclicFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CyclicFamily")
            .field("first", &self.first)
            .field("label", &self.label)
            .finish()
    }
}

impl PartialEq for CyclicFamily {
    /// Families compare by description only.
    fn eq(&self, other: &Self) -> bool {
        self.first == other.first && self.label == other.label
    }
}

impl Eq for CyclicFamily {}

impl CyclicFamily {
    /// `n ↦ n`.
    pub fn identity(first: usize) -> Self {
        Self::from_fn(first, "n", BigInt::from)
    }

    pub fn constant(first: usize, m: impl Into<BigInt>) -> Self {
        let m = m.into();
        Self::from_fn(first, m.to_string(), move |_| m.clone())
    }

    pub fn from_fn(first: usize, label: impl Into<String>, f: impl Fn(usize) -> BigInt + Send + Sync + 'static) -> Self {
        CyclicFamily {
            first,
            label: label.into(),
            order_at: Arc::new(f),
        }
    }

    pub fn first(&self) -> usize {
        self.first
    }

    /// Description of `n ↦ m(n)`, e.g. `"n"` for the identity family.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self, n: usize) -> Result<BigInt, TowerError> {
        if n < self.first {
            return Err(TowerError::BelowBase {
                level: n,
                base: self.first,
            });
        }
        let m = (self.order_at)(n);
        if !m.is_positive() {
            return Err(TowerError::Invalid(format!(
                "family order at index {n} is {m}; cyclic orders must be at least 1"
            )));
        }
        Ok(m)
    }

    fn orders_through(&self, n: usize) -> Result<Vec<BigInt>, TowerError> {
        if n < self.first {
            return Err(TowerError::BelowBase {
                level: n,
                base: self.first,
            });
        }
        (self.first..=n).map(|k| self.order(k)).collect()
    }
}

/// `∏_{first ≤ k ≤ n} Z/m(k)` with coordinates indexed by `k`.
pub fn truncated_product_presentation(family: &CyclicFamily, n: usize) -> Result<Presentation, TowerError> {
    Ok(fgab::present(&IntMatrix::diagonal(&family.orders_through(n)?)))
}

/// Canonical form of the finite product over indices `≤ n`. For finite
/// truncations the product and the direct sum coincide.
pub fn truncated_product(family: &CyclicFamily, n: usize) -> Result<FgAbGroup, TowerError> {
    Ok(truncated_product_presentation(family, n)?.group)
}

/// Order of `(1, 1, ..., 1)` in the truncation at `n`, computed in the
/// canonical form of the truncated product.
pub fn all_ones_order(family: &CyclicFamily, n: usize) -> Result<ElementOrder, TowerError> {
    let p = truncated_product_presentation(family, n)?;
    let ones = vec![BigInt::one(); n + 1 - family.first];
    Ok(p.element(&ones)?.order())
}

/// Coordinate projection from the truncation at `n + 1` onto the one at `n`.
pub fn truncation_projection(family: &CyclicFamily, n: usize) -> Result<Homomorphism, TowerError> {
    let upper = truncated_product_presentation(family, n + 1)?;
    let lower = truncated_product_presentation(family, n)?;
    let k = n + 1 - family.first;
    let mut drop_last = IntMatrix::zeros(k, k + 1);
    for i in 0..k {
        drop_last.set(i, i, BigInt::one());
    }
    let matrix = &(&lower.to_canonical * &drop_last) * &upper.from_canonical;
    Ok(Homomorphism::new(upper.group, lower.group, matrix)?)
}

/// Inclusion of the factor `Z/m(n + 1)` into the truncation at `n + 1`.
pub fn last_factor_inclusion(family: &CyclicFamily, n: usize) -> Result<Homomorphism, TowerError> {
    let upper = truncated_product_presentation(family, n + 1)?;
    let factor = fgab::present(&IntMatrix::diagonal(&[family.order(n + 1)?]));
    let k = n + 2 - family.first;
    let mut last = IntMatrix::zeros(k, 1);
    last.set(k - 1, 0, BigInt::one());
    let matrix = &(&upper.to_canonical * &last) * &factor.from_canonical;
    Ok(Homomorphism::new(factor.group, upper.group, matrix)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TorsionWitness {
    /// `(n, order)` at each truncation where the order of `(1, 1, ...)` jumps.
    Witness(Vec<(usize, BigInt)>),
    None,
}

/// Tracks the order of `(1, 1, ...)` through the truncations up to `bound`.
/// A witness is reported when the order jumps at least twice and is still
/// jumping in the upper half of the range.
pub fn unbounded_torsion_witness(family: &CyclicFamily, bound: usize) -> Result<TorsionWitness, TowerError> {
    let mut jumps = Vec::new();
    let mut order = BigInt::one();
    for n in family.first..=bound {
        let next = order.lcm(&family.order(n)?);
        if next > order {
            jumps.push((n, next.clone()));
        }
        order = next;
    }
    let halfway = family.first + bound.saturating_sub(family.first) / 2;
    let still_growing = jumps.last().is_some_and(|&(n, _)| n > halfway);
    Ok(if jumps.len() >= 2 && still_growing {
        TorsionWitness::Witness(jumps)
    } else {
        TorsionWitness::None
    })
}
