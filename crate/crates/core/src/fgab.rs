//! Finitely generated abelian groups in invariant-factor form, homomorphisms
//! between them, and the kernel/image/cokernel/exactness toolkit.
//!
//! Coordinates against the canonical generating set list the torsion
//! generators first (in chain order) followed by the free generators.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::intlin::{self, IntMatrix, LinAlgError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("torsion list {0:?} is not a canonical invariant-factor chain")]
    NotCanonical(Vec<String>),
    #[error("matrix is {rows}x{cols} but the groups need {expected_rows}x{expected_cols}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("not a homomorphism: image of source generator {generator} violates its order {order}")]
    InvalidHomomorphism { generator: usize, order: BigInt },
    #[error("maps {index} and {next} are not composable: target {target} differs from source {source_group}")]
    NonComposable {
        index: usize,
        next: usize,
        target: FgAbGroup,
        source_group: FgAbGroup,
    },
    #[error("element has {found} coordinates but the group has {expected} generators")]
    ElementShape { expected: usize, found: usize },
}

/// `Z^free_rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k` with `1 < d_1 | d_2 | ... | d_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl FgAbGroup {
    /// Checked constructor for data that is already canonical.
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self, GroupError> {
        let chain_ok = torsion.iter().all(|d| d > &BigInt::one())
            && torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        if !chain_ok {
            return Err(GroupError::NotCanonical(
                torsion.iter().map(ToString::to_string).collect(),
            ));
        }
        Ok(FgAbGroup { free_rank, torsion })
    }

    pub fn trivial() -> Self {
        FgAbGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// `Z/m`. `m = 0` gives `Z`, `m = ±1` the trivial group.
    pub fn cyclic(m: impl Into<BigInt>) -> Self {
        let m = m.into().abs();
        if m.is_zero() {
            Self::free(1)
        } else if m.is_one() {
            Self::trivial()
        } else {
            FgAbGroup {
                free_rank: 0,
                torsion: vec![m],
            }
        }
    }

    /// Canonical form of `⊕ Z/o_i` for arbitrary cyclic orders (0 meaning `Z`).
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        present(&IntMatrix::diagonal(orders)).group
    }

    pub fn from_presentation(relations: &IntMatrix) -> Self {
        present(relations).group
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn num_generators(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    /// Order of each canonical generator, 0 for free generators.
    pub fn generator_orders(&self) -> Vec<BigInt> {
        let mut v = self.torsion.clone();
        v.extend(std::iter::repeat_n(BigInt::zero(), self.free_rank));
        v
    }

    /// Square diagonal relation matrix of the canonical presentation.
    pub fn relation_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.generator_orders())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Cardinality, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.torsion.iter().fold(BigInt::one(), |acc, d| acc * d))
    }

    /// Dimension after tensoring with a field of characteristic zero.
    pub fn rationalized_rank(&self) -> usize {
        self.free_rank
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut orders = self.generator_orders();
        orders.extend(other.generator_orders());
        Self::from_cyclic_orders(&orders)
    }

    /// `k`-fold direct sum. Repeating every invariant factor `k` times keeps
    /// the divisibility chain, so no elimination is needed.
    pub fn power(&self, k: usize) -> FgAbGroup {
        FgAbGroup {
            free_rank: self.free_rank * k,
            torsion: self
                .torsion
                .iter()
                .flat_map(|d| std::iter::repeat_n(d.clone(), k))
                .collect(),
        }
    }

    /// Reduces a coordinate vector into normal form.
    fn reduce(&self, coords: &mut [BigInt]) {
        for (c, d) in coords.iter_mut().zip(&self.torsion) {
            *c = c.mod_floor(d);
        }
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let d = &self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|e| *e == d).count();
            if run == 1 {
                parts.push(format!("Z/{d}"));
            } else {
                parts.push(format!("(Z/{d})^{run}"));
            }
            i += run;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical form of `Z^g / (column span of the relations)` together with
/// mutually inverse coordinate transports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub group: FgAbGroup,
    /// Presentation coordinates to canonical coordinates (`k x g`).
    pub to_canonical: IntMatrix,
    /// Canonical generators written in presentation coordinates (`g x k`).
    pub from_canonical: IntMatrix,
}

impl Presentation {
    pub fn element(&self, coords: &[BigInt]) -> Result<GroupElement, GroupError> {
        let v = IntMatrix::column_vector(coords.to_vec());
        let c = self.to_canonical.checked_mul(&v)?;
        GroupElement::new(self.group.clone(), c.column(0))
    }
}

/// Columns of `relations` are the relations; rows index the generators.
pub fn present(relations: &IntMatrix) -> Presentation {
    let gens = relations.rows();
    let d = intlin::snf(relations);
    let mut torsion = Vec::new();
    let mut kept = Vec::new();
    for (i, f) in d.factors.iter().enumerate() {
        if !f.is_one() {
            torsion.push(f.clone());
            kept.push(i);
        }
    }
    kept.extend(d.rank()..gens);
    Presentation {
        group: FgAbGroup {
            free_rank: gens - d.rank(),
            torsion,
        },
        to_canonical: d.u.select_rows(&kept),
        from_canonical: d.u_inv.select_cols(&kept),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    group: FgAbGroup,
    coords: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(BigInt),
    Infinite,
}

impl GroupElement {
    pub fn new(group: FgAbGroup, mut coords: Vec<BigInt>) -> Result<Self, GroupError> {
        if coords.len() != group.num_generators() {
            return Err(GroupError::ElementShape {
                expected: group.num_generators(),
                found: coords.len(),
            });
        }
        group.reduce(&mut coords);
        Ok(GroupElement { group, coords })
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn order(&self) -> ElementOrder {
        let t = self.group.torsion.len();
        if self.coords[t..].iter().any(|c| !c.is_zero()) {
            return ElementOrder::Infinite;
        }
        let n = self.coords[..t]
            .iter()
            .zip(&self.group.torsion)
            .fold(BigInt::one(), |acc, (c, d)| acc.lcm(&(d / c.gcd(d))));
        ElementOrder::Finite(n)
    }
}

pub fn element_order(x: &GroupElement) -> ElementOrder {
    x.order()
}

/// A homomorphism written against the canonical generators: column `j` is the
/// image of source generator `j`. Torsion rows are kept reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Homomorphism {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: IntMatrix,
}

impl Homomorphism {
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self, GroupError> {
        if matrix.rows() != target.num_generators() || matrix.cols() != source.num_generators() {
            return Err(GroupError::MatrixShape {
                rows: matrix.rows(),
                cols: matrix.cols(),
                expected_rows: target.num_generators(),
                expected_cols: source.num_generators(),
            });
        }
        let relations = target.relation_matrix();
        let decomposition = intlin::snf(&relations);
        for (j, order) in source.generator_orders().into_iter().enumerate() {
            let image = IntMatrix::column_vector(matrix.column(j)).scale(&order);
            let solvable =
                intlin::solve_with(&decomposition, relations.cols(), &image)?.is_some();
            if !solvable {
                return Err(GroupError::InvalidHomomorphism {
                    generator: j,
                    order,
                });
            }
        }
        let mut matrix = matrix;
        for (i, d) in target.torsion.iter().enumerate() {
            for j in 0..matrix.cols() {
                let e = matrix.get(i, j).mod_floor(d);
                matrix.set(i, j, e);
            }
        }
        Ok(Homomorphism {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(group: &FgAbGroup) -> Self {
        Homomorphism {
            source: group.clone(),
            target: group.clone(),
            matrix: IntMatrix::identity(group.num_generators()),
        }
    }

    pub fn zero(source: &FgAbGroup, target: &FgAbGroup) -> Self {
        Homomorphism {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.num_generators(), source.num_generators()),
        }
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &Homomorphism) -> Result<Homomorphism, GroupError> {
        if self.target != then.source {
            return Err(GroupError::NonComposable {
                index: 0,
                next: 1,
                target: self.target.clone(),
                source_group: then.source.clone(),
            });
        }
        let matrix = &then.matrix * &self.matrix;
        Homomorphism::new(self.source.clone(), then.target.clone(), matrix)
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement, GroupError> {
        if x.group != self.source {
            return Err(GroupError::ElementShape {
                expected: self.source.num_generators(),
                found: x.coords.len(),
            });
        }
        let v = &self.matrix * &IntMatrix::column_vector(x.coords.clone());
        GroupElement::new(self.target.clone(), v.column(0))
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn is_injective(&self) -> bool {
        kernel(self).group.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        cokernel(self).is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }
}

/// A subgroup as an abstract group with its inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub group: FgAbGroup,
    pub inclusion: Homomorphism,
}

impl Subgroup {
    pub fn ambient(&self) -> &FgAbGroup {
        self.inclusion.target()
    }

    /// Whether `other` is contained in `self`; both must live in the same group.
    pub fn contains(&self, other: &Subgroup) -> bool {
        assert_eq!(self.ambient(), other.ambient(), "subgroups of different groups");
        let lattice = self
            .inclusion
            .matrix()
            .hconcat(&self.ambient().relation_matrix())
            .expect("row counts agree");
        intlin::solve_integral(&lattice, other.inclusion.matrix())
            .expect("row counts agree")
            .is_some()
    }

    pub fn same_as(&self, other: &Subgroup) -> bool {
        self.contains(other) && other.contains(self)
    }

    /// `[ambient : self]`, `None` when infinite.
    pub fn index(&self) -> Option<BigInt> {
        cokernel(&self.inclusion).order()
    }
}

/// The subgroup of `group` generated by the columns of `generators`.
pub fn subgroup_generated(group: &FgAbGroup, generators: &IntMatrix) -> Result<Subgroup, GroupError> {
    if generators.rows() != group.num_generators() {
        return Err(GroupError::MatrixShape {
            rows: generators.rows(),
            cols: generators.cols(),
            expected_rows: group.num_generators(),
            expected_cols: generators.cols(),
        });
    }
    let relations = group.relation_matrix();
    let basis = intlin::lattice_basis(&generators.hconcat(&relations)?);
    let coeffs = intlin::solve_integral(&basis, &relations)?
        .expect("relations lie in the lattice they help span");
    let p = present(&coeffs);
    let inclusion = Homomorphism::new(p.group.clone(), group.clone(), &basis * &p.from_canonical)?;
    Ok(Subgroup {
        group: p.group,
        inclusion,
    })
}

pub fn kernel(f: &Homomorphism) -> Subgroup {
    // x lies in the kernel iff M x = E y for some y.
    let system = f
        .matrix
        .hconcat(&f.target.relation_matrix().scale(&-BigInt::one()))
        .expect("row counts agree");
    let solutions = intlin::kernel_basis(&system);
    let idx: Vec<usize> = (0..f.source.num_generators()).collect();
    subgroup_generated(&f.source, &solutions.select_rows(&idx)).expect("shape matches source")
}

pub fn image(f: &Homomorphism) -> Subgroup {
    subgroup_generated(&f.target, &f.matrix).expect("shape matches target")
}

pub fn cokernel(f: &Homomorphism) -> FgAbGroup {
    cokernel_presentation(f).group
}

/// Canonical projection `target → cokernel`.
pub fn cokernel_projection(f: &Homomorphism) -> Homomorphism {
    let p = cokernel_presentation(f);
    Homomorphism::new(f.target.clone(), p.group, p.to_canonical).expect("projection is well defined")
}

fn cokernel_presentation(f: &Homomorphism) -> Presentation {
    let relations = f
        .matrix
        .hconcat(&f.target.relation_matrix())
        .expect("row counts agree");
    present(&relations)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeReport {
    /// Position of the group in the sequence `G_0 → G_1 → ... → G_k`.
    pub node: usize,
    pub group: FgAbGroup,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactnessReport {
    pub nodes: Vec<NodeReport>,
    pub first_failure: Option<usize>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks `im f_i = ker f_{i+1}` at every interior group of the sequence.
pub fn check_exact(maps: &[Homomorphism]) -> Result<ExactnessReport, GroupError> {
    for (i, w) in maps.windows(2).enumerate() {
        if w[0].target != w[1].source {
            return Err(GroupError::NonComposable {
                index: i,
                next: i + 1,
                target: w[0].target.clone(),
                source_group: w[1].source.clone(),
            });
        }
    }
    let nodes: Vec<NodeReport> = maps
        .windows(2)
        .enumerate()
        .map(|(i, w)| NodeReport {
            node: i + 1,
            group: w[0].target.clone(),
            exact: image(&w[0]).same_as(&kernel(&w[1])),
        })
        .collect();
    let first_failure = nodes.iter().find(|n| !n.exact).map(|n| n.node);
    Ok(ExactnessReport {
        nodes,
        first_failure,
    })
}
