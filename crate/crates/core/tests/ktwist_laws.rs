use num_bigint::BigInt;
use twistk_core::fgab::FgAbGroup;
use twistk_core::ktwist::{self, TwistedSpace};

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `c(n, l)` from Pascal's triangle in machine integers.
fn c_pascal(n: usize, l: usize) -> u128 {
    let size = l + n + 1;
    let mut row = vec![1u128];
    let mut binom = vec![vec![1u128]];
    for _ in 1..size {
        let mut next = vec![1u128; row.len() + 1];
        for k in 1..row.len() {
            next[k] = row[k - 1] + row[k];
        }
        binom.push(next.clone());
        row = next;
    }
    (1..n).fold(0, |g, i| gcd(g, binom[l + i][i] - 1))
}

#[test]
fn c_matches_pascal_oracle() {
    for n in 2..=24 {
        for l in 1..=24 {
            assert_eq!(ktwist::c(n, l as u64).unwrap(), BigInt::from(c_pascal(n, l)), "c({n}, {l})");
        }
    }
}

#[test]
fn c_divisibility_chain() {
    for l in 1..=24u64 {
        let cs = ktwist::c_sequence(24, l).unwrap();
        for m in 0..cs.len() {
            for n in m..cs.len() {
                assert!((&cs[m] % &cs[n]) == BigInt::from(0), "c({}, {l}) does not divide c({}, {l})", n + 2, m + 2);
            }
        }
    }
}

#[test]
fn su_finite_shapes() {
    for n in 2..=10 {
        for l in 1..=10u64 {
            let c = ktwist::c(n, l).unwrap();
            let k = ktwist::twisted_k(&TwistedSpace::su(n, l).unwrap(), 64).unwrap();
            let g = k.graded.total_group().unwrap();
            if c == BigInt::from(1) {
                assert!(g.is_trivial());
            } else {
                assert_eq!(g.torsion().len(), 1 << (n - 1));
                assert!(g.torsion().iter().all(|d| *d == c));
                assert_eq!(g.free_rank(), 0);
            }
            assert_eq!(k.graded.rationalized_rank(), Some(0));
            let h = ktwist::twisted_khomology(&TwistedSpace::su(n, l).unwrap(), 64).unwrap();
            assert_eq!(h.graded.total_group(), Some(g));
        }
    }
}

#[test]
fn su_infinite_agrees_with_table() {
    for l in 1..=24u64 {
        for bound in [3usize, 4, 5, 8, 64] {
            let table = ktwist::divisibility_table(l, bound).unwrap();
            let s = TwistedSpace::su_infinite(l).unwrap();
            let k = ktwist::twisted_k(&s, bound).unwrap();
            let h = ktwist::twisted_khomology(&s, bound).unwrap();
            assert_eq!(k.is_trivial(), table.first_one.is_some(), "l = {l}, bound = {bound}");
            assert_eq!(h.is_trivial(), table.first_one.is_some());
            assert_eq!(k.is_unproven(), table.first_one.is_none());
        }
    }
}

#[test]
fn sphere_union_truncations_agree() {
    use twistk_core::towers::{self, KGroup};
    let s = TwistedSpace::sphere_union();
    let k = ktwist::twisted_k(&s, 64).unwrap();
    let h = ktwist::twisted_khomology(&s, 64).unwrap();
    let Some(KGroup::Product(pf)) = k.graded.degree(1) else { panic!() };
    let twistk_core::towers::KGradedGroup::Total(KGroup::Sum(sf)) = h.graded else { panic!() };
    for n in 1..=12 {
        let direct: FgAbGroup = (1..=n).fold(FgAbGroup::trivial(), |acc, k| acc.direct_sum(&FgAbGroup::cyclic(k)));
        assert_eq!(towers::truncated_product(&pf, n).unwrap(), direct);
        assert_eq!(towers::truncated_product(&sf, n).unwrap(), direct);
    }
}

#[test]
fn rejected_twists() {
    assert!(TwistedSpace::su(4, 0).is_err());
    assert!(TwistedSpace::su_infinite(0).is_err());
    assert!(TwistedSpace::sphere3(0).is_err());
    assert!(TwistedSpace::sphere3(-2).is_err());
}
