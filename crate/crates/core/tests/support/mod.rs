//! Brute-force oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use twistk_core::fgab::{self, FgAbGroup, Homomorphism};
use twistk_core::intlin::IntMatrix;

/// Every finite abelian group of order at most `max_order`, canonical form.
pub fn finite_groups(max_order: u64) -> Vec<FgAbGroup> {
    fn extend(chain: &mut Vec<u64>, order: u64, max: u64, out: &mut Vec<Vec<u64>>) {
        out.push(chain.clone());
        let last = chain.last().copied().unwrap_or(1);
        let mut d = if last == 1 { 2 } else { last };
        while order * d <= max {
            chain.push(d);
            extend(chain, order * d, max, out);
            chain.pop();
            d += last;
        }
    }
    let mut chains = Vec::new();
    extend(&mut Vec::new(), 1, max_order, &mut chains);
    chains
        .into_iter()
        .map(|c| FgAbGroup::new(0, c.into_iter().map(BigInt::from).collect()).unwrap())
        .collect()
}

fn order_of(g: &FgAbGroup) -> u64 {
    u64::try_from(g.order().expect("finite")).unwrap()
}

/// All elements of a finite group as coordinate vectors.
pub fn elements(g: &FgAbGroup) -> Vec<Vec<BigInt>> {
    let mut out = vec![Vec::new()];
    for d in g.torsion() {
        let d = u64::try_from(d).unwrap();
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..d).map(move |k| {
                    let mut w = v.clone();
                    w.push(BigInt::from(k));
                    w
                })
            })
            .collect();
    }
    out
}

fn reduce(g: &FgAbGroup, mut x: Vec<BigInt>) -> Vec<BigInt> {
    for (c, d) in x.iter_mut().zip(g.torsion()) {
        *c = c.mod_floor(d);
    }
    x
}

pub fn apply(m: &IntMatrix, target: &FgAbGroup, x: &[BigInt]) -> Vec<BigInt> {
    let y: Vec<BigInt> = (0..m.rows())
        .map(|i| m.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
        .collect();
    reduce(target, y)
}

/// A homomorphism `g → h` from arbitrary integers: entry `(i, j)` is scaled so
/// that the image of generator `j` is killed by its order.
pub fn hom_from_seeds(g: &FgAbGroup, h: &FgAbGroup, seeds: &[i64]) -> Homomorphism {
    let (rows, cols) = (h.num_generators(), g.num_generators());
    let mut m = IntMatrix::zeros(rows, cols);
    let mut k = 0;
    for i in 0..rows {
        for j in 0..cols {
            let hi = &h.torsion()[i];
            let dj = &g.torsion()[j];
            let step = hi / hi.gcd(dj);
            let seed = BigInt::from(seeds[k % seeds.len().max(1)]);
            m.set(i, j, (step * seed).mod_floor(hi));
            k += 1;
        }
    }
    Homomorphism::new(g.clone(), h.clone(), m).unwrap()
}

/// Number of elements of each order in a set of elements of `g`.
fn order_profile(g: &FgAbGroup, xs: &HashSet<Vec<BigInt>>) -> BTreeMap<BigInt, usize> {
    let mut p = BTreeMap::new();
    for x in xs {
        let o = x
            .iter()
            .zip(g.torsion())
            .fold(BigInt::one(), |acc, (c, d)| acc.lcm(&(d / c.gcd(d))));
        *p.entry(o).or_insert(0) += 1;
    }
    p
}

fn image_set(m: &IntMatrix, source: &FgAbGroup, target: &FgAbGroup) -> HashSet<Vec<BigInt>> {
    elements(source).iter().map(|x| apply(m, target, x)).collect()
}

/// Kernel, image and cokernel of `f` against element enumeration: the
/// inclusions hit exactly the enumerated subsets, the subgroups are
/// abstractly the groups returned, and the cokernel projection is onto with
/// kernel the image.
pub fn check_against_enumeration(f: &Homomorphism) -> Result<(), String> {
    let (g, h) = (f.source(), f.target());
    let zero_h = vec![BigInt::zero(); h.num_generators()];
    let ker_set: HashSet<Vec<BigInt>> = elements(g)
        .into_iter()
        .filter(|x| apply(f.matrix(), h, x) == zero_h)
        .collect();
    let im_set = image_set(f.matrix(), g, h);

    let ker = fgab::kernel(f);
    let ker_hit = image_set(ker.inclusion.matrix(), &ker.group, g);
    if ker_hit != ker_set || order_of(&ker.group) as usize != ker_set.len() {
        return Err(format!("kernel of {f:?}: {} vs {} elements", ker.group, ker_set.len()));
    }
    let all_ker: HashSet<_> = elements(&ker.group).into_iter().collect();
    if order_profile(&ker.group, &all_ker) != order_profile(g, &ker_set) {
        return Err(format!("kernel of {f:?} has the wrong isomorphism type {}", ker.group));
    }

    let im = fgab::image(f);
    let im_hit = image_set(im.inclusion.matrix(), &im.group, h);
    if im_hit != im_set || order_of(&im.group) as usize != im_set.len() {
        return Err(format!("image of {f:?}: {} vs {} elements", im.group, im_set.len()));
    }

    let p = fgab::cokernel_projection(f);
    let c = p.target().clone();
    if c != fgab::cokernel(f) {
        return Err("cokernel and cokernel projection disagree".into());
    }
    if image_set(p.matrix(), h, &c).len() as u64 != order_of(&c) {
        return Err(format!("cokernel projection of {f:?} is not onto {c}"));
    }
    let zero_c = vec![BigInt::zero(); c.num_generators()];
    let p_ker: HashSet<Vec<BigInt>> = elements(h)
        .into_iter()
        .filter(|x| apply(p.matrix(), &c, x) == zero_c)
        .collect();
    if p_ker != im_set {
        return Err(format!("kernel of the cokernel projection of {f:?} is not the image"));
    }
    if order_of(h) != order_of(&c) * im_set.len() as u64 {
        return Err(format!("|coker| wrong for {f:?}"));
    }
    Ok(())
}
