//! Finite abelian groups in primary-decomposition form.
//!
//! Every group is stored as a map from primes to the (descending) multiset of
//! exponents of its cyclic prime-power factors, so `C4 x C12` is kept as
//! `{2: [2, 2], 3: [1]}`. This is the form every realizability rule reads:
//! Sylow subgroups, the minimal 2-exponent and squareness are all per-prime
//! questions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{factorize, is_prime};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianGroup {
    parts: BTreeMap<u64, Vec<u32>>,
    order: u128,
}

impl Default for AbelianGroup {
    fn default() -> Self {
        Self::trivial()
    }
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            parts: BTreeMap::new(),
            order: 1,
        }
    }

    /// Z/nZ. `cyclic(1)` is the trivial group.
    pub fn cyclic(n: u128) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("cyclic group of order 0".into()));
        }
        Self::from_prime_powers(factorize(n))
    }

    /// Builds a group from `(p, e)` pairs, one cyclic factor Z/p^e per pair.
    /// Pairs with `e == 0` are identity factors and are ignored.
    pub fn from_prime_powers<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> Result<Self> {
        let mut parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        let mut order: u128 = 1;
        for (p, e) in pairs {
            if e == 0 {
                continue;
            }
            if !is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            let pe = (p as u128)
                .checked_pow(e)
                .ok_or(Error::Overflow("group order"))?;
            order = order.checked_mul(pe).ok_or(Error::Overflow("group order"))?;
            parts.entry(p).or_default().push(e);
        }
        for exps in parts.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        Ok(AbelianGroup { parts, order })
    }

    /// Canonical form of Z/a_1 x ... x Z/a_n. Entries equal to 1 are dropped;
    /// zero or negative entries are rejected.
    pub fn normalize(orders: &[i64]) -> Result<Self> {
        let mut pairs = Vec::new();
        for &a in orders {
            if a <= 0 {
                return Err(Error::InvalidArgument(format!(
                    "cyclic factor order must be positive, got {a}"
                )));
            }
            pairs.extend(factorize(a as u128));
        }
        Self::from_prime_powers(pairs)
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &BTreeMap<u64, Vec<u32>> {
        &self.parts
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.parts.keys().copied()
    }

    /// Exponent multiset of the p-part, descending; empty if p does not divide the order.
    pub fn exponents(&self, p: u64) -> &[u32] {
        self.parts.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All cyclic prime-power factors as `(p, e)` pairs.
    pub fn prime_powers(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.parts
            .iter()
            .flat_map(|(&p, exps)| exps.iter().map(move |&e| (p, e)))
    }

    pub fn direct_product(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut parts = self.parts.clone();
        for (&p, exps) in &other.parts {
            let entry = parts.entry(p).or_default();
            entry.extend_from_slice(exps);
            entry.sort_unstable_by(|a, b| b.cmp(a));
        }
        AbelianGroup {
            parts,
            order: self.order * other.order,
        }
    }

    /// The p-Sylow subgroup.
    pub fn sylow(&self, p: u64) -> Result<AbelianGroup> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        Ok(self.sylow_unchecked(p))
    }

    pub(crate) fn sylow_unchecked(&self, p: u64) -> AbelianGroup {
        let exps = self.exponents(p);
        AbelianGroup::from_prime_powers(exps.iter().map(|&e| (p, e)))
            .expect("sub-multiset of a valid group")
    }

    /// The complement of the p-Sylow subgroup.
    pub fn without_prime(&self, p: u64) -> AbelianGroup {
        let mut g = self.clone();
        if let Some(exps) = g.parts.remove(&p) {
            for e in exps {
                g.order /= (p as u128).pow(e);
            }
        }
        g
    }

    /// True iff the group is K x K for some K: every exponent occurs with even multiplicity.
    pub fn is_square(&self) -> bool {
        self.parts.values().all(|exps| {
            let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
            for &e in exps {
                *counts.entry(e).or_default() += 1;
            }
            counts.values().all(|c| c % 2 == 0)
        })
    }

    /// The K with `self = K x K`, if it exists.
    pub fn square_root(&self) -> Option<AbelianGroup> {
        if !self.is_square() {
            return None;
        }
        let pairs = self
            .parts
            .iter()
            .flat_map(|(&p, exps)| exps.iter().step_by(2).map(move |&e| (p, e)));
        Some(AbelianGroup::from_prime_powers(pairs).expect("valid"))
    }

    /// Minimum exponent in the 2-part, 0 when the order is odd.
    pub fn min_two_exponent(&self) -> u32 {
        self.exponents(2).iter().copied().min().unwrap_or(0)
    }

    pub fn is_cyclic(&self) -> bool {
        self.parts.values().all(|exps| exps.len() == 1)
    }

    /// Invariant factors d_1 >= d_2 >= ... with d_{i+1} | d_i.
    pub fn invariant_factors(&self) -> Vec<u128> {
        let width = self.parts.values().map(Vec::len).max().unwrap_or(0);
        (0..width)
            .map(|i| {
                self.parts
                    .iter()
                    .filter_map(|(&p, exps)| exps.get(i).map(|&e| (p as u128).pow(e)))
                    .product()
            })
            .collect()
    }

    /// Exponent (largest element order).
    pub fn exponent(&self) -> u128 {
        self.invariant_factors().first().copied().unwrap_or(1)
    }

    /// True iff Z/m is (isomorphic to) a direct factor.
    pub fn has_cyclic_factor(&self, m: u128) -> bool {
        self.remove_cyclic_factor(m).is_some()
    }

    /// Returns K with `self = Z/m x K`, when Z/m is a direct factor.
    pub fn remove_cyclic_factor(&self, m: u128) -> Option<AbelianGroup> {
        if m == 0 {
            return None;
        }
        let mut g = self.clone();
        for (p, k) in factorize(m) {
            let exps = g.parts.get_mut(&p)?;
            let pos = exps.iter().position(|&e| e == k)?;
            exps.remove(pos);
            if exps.is_empty() {
                g.parts.remove(&p);
            }
            g.order /= (p as u128).pow(k);
        }
        Some(g)
    }

    /// Removes one copy of each cyclic factor of `sub`, if `sub` is a direct factor.
    pub fn quotient_by_factor(&self, sub: &AbelianGroup) -> Option<AbelianGroup> {
        let mut g = self.clone();
        for (p, e) in sub.prime_powers() {
            let exps = g.parts.get_mut(&p)?;
            let pos = exps.iter().position(|&x| x == e)?;
            exps.remove(pos);
            if exps.is_empty() {
                g.parts.remove(&p);
            }
            g.order /= (p as u128).pow(e);
        }
        Some(g)
    }

    /// Every decomposition `self = G1 x G2` obtained by splitting each prime's
    /// exponent multiset into two sub-multisets. Each unordered split of a
    /// multiset is listed once per side assignment, so `(G1, G2)` and
    /// `(G2, G1)` both appear when they differ.
    pub fn splittings(&self) -> Vec<(AbelianGroup, AbelianGroup)> {
        let mut acc: Vec<(Vec<(u64, u32)>, Vec<(u64, u32)>)> = vec![(Vec::new(), Vec::new())];
        for (&p, exps) in &self.parts {
            let splits = multiset_splits(exps);
            let mut next = Vec::with_capacity(acc.len() * splits.len());
            for (l, r) in &acc {
                for (sl, sr) in &splits {
                    let mut nl = l.clone();
                    nl.extend(sl.iter().map(|&e| (p, e)));
                    let mut nr = r.clone();
                    nr.extend(sr.iter().map(|&e| (p, e)));
                    next.push((nl, nr));
                }
            }
            acc = next;
        }
        acc.into_iter()
            .map(|(l, r)| {
                (
                    AbelianGroup::from_prime_powers(l).expect("valid"),
                    AbelianGroup::from_prime_powers(r).expect("valid"),
                )
            })
            .collect()
    }

    /// Number of elements of each order, computed from the decomposition.
    pub fn order_statistics(&self) -> BTreeMap<u128, u128> {
        let mut stats: BTreeMap<u128, u128> = BTreeMap::from([(1, 1)]);
        for (&p, exps) in &self.parts {
            let local = p_group_order_counts(p, exps);
            let mut next = BTreeMap::new();
            for (&o1, &c1) in &stats {
                for (&o2, &c2) in &local {
                    *next.entry(o1 * o2).or_insert(0) += c1 * c2;
                }
            }
            stats = next;
        }
        stats
    }

    /// Recovers the unique abelian group of order `n` with the given
    /// element-order counts, by enumerating candidate exponent partitions
    /// prime by prime and confirming the full statistics at the end.
    pub fn structure_from_order_statistics(
        counts: &BTreeMap<u128, u128>,
        n: u128,
    ) -> Result<AbelianGroup> {
        if n == 0 || counts.values().sum::<u128>() != n {
            return Err(Error::NoMatchingGroup(n));
        }
        if counts.keys().any(|&d| d == 0 || n % d != 0) {
            return Err(Error::NoMatchingGroup(n));
        }
        let mut pairs = Vec::new();
        for (p, a) in factorize(n) {
            let cofactor = n / (p as u128).pow(a);
            // elements whose order has p-valuation <= k
            let marginal: Vec<u128> = (0..=a)
                .map(|k| {
                    counts
                        .iter()
                        .filter(|(&d, _)| crate::arith::valuation(d, p) <= k)
                        .map(|(_, &c)| c)
                        .sum()
                })
                .collect();
            if marginal.iter().any(|m| m % cofactor != 0) {
                return Err(Error::NoMatchingGroup(n));
            }
            let target: Vec<u128> = marginal.iter().map(|m| m / cofactor).collect();
            let found = partitions(a).into_iter().find(|lambda| {
                (0..=a).all(|k| {
                    let s: u32 = lambda.iter().map(|&e| e.min(k)).sum();
                    (p as u128).pow(s) == target[k as usize]
                })
            });
            match found {
                Some(lambda) => pairs.extend(lambda.into_iter().map(|e| (p, e))),
                None => return Err(Error::NoMatchingGroup(n)),
            }
        }
        let g = AbelianGroup::from_prime_powers(pairs)?;
        if &g.order_statistics() != counts {
            return Err(Error::NoMatchingGroup(n));
        }
        Ok(g)
    }

    /// All abelian groups of order `n`, up to isomorphism.
    pub fn all_of_order(n: u128) -> Vec<AbelianGroup> {
        let mut acc = vec![Vec::<(u64, u32)>::new()];
        for (p, a) in factorize(n) {
            let parts = partitions(a);
            acc = acc
                .iter()
                .flat_map(|base| {
                    parts.iter().map(move |lambda| {
                        let mut v = base.clone();
                        v.extend(lambda.iter().map(|&e| (p, e)));
                        v
                    })
                })
                .collect();
        }
        acc.into_iter()
            .map(|v| AbelianGroup::from_prime_powers(v).expect("valid"))
            .collect()
    }

    /// Human-friendly invariant-factor form, e.g. `Z/12 x Z/2`.
    pub fn invariant_factor_string(&self) -> String {
        if self.is_trivial() {
            return "Z/1".into();
        }
        self.invariant_factors()
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

/// Element-order counts of the p-group with the given exponents.
fn p_group_order_counts(p: u64, exps: &[u32]) -> BTreeMap<u128, u128> {
    let max = exps.iter().copied().max().unwrap_or(0);
    let divides = |k: u32| -> u128 {
        let s: u32 = exps.iter().map(|&e| e.min(k)).sum();
        (p as u128).pow(s)
    };
    let mut out = BTreeMap::new();
    out.insert(1, 1);
    for k in 1..=max {
        out.insert((p as u128).pow(k), divides(k) - divides(k - 1));
    }
    out
}

/// Partitions of `n` into positive parts, each listed in descending order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            current.push(part);
            go(remaining - part, part, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Distinct ways to split a descending multiset into (left, right).
fn multiset_splits(exps: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut groups: Vec<(u32, usize)> = Vec::new();
    for &e in exps {
        match groups.last_mut() {
            Some((v, c)) if *v == e => *c += 1,
            _ => groups.push((e, 1)),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new())];
    for (e, count) in groups {
        let mut next = Vec::new();
        for (l, r) in &out {
            for take in 0..=count {
                let mut nl: Vec<u32> = l.clone();
                nl.extend(std::iter::repeat(e).take(take));
                let mut nr: Vec<u32> = r.clone();
                nr.extend(std::iter::repeat(e).take(count - take));
                next.push((nl, nr));
            }
        }
        out = next;
    }
    out
}

impl fmt::Display for AbelianGroup {
    /// Primary form in the `C<d>^<e>` grammar, primes ascending, exponents descending.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "C1");
        }
        let mut terms = Vec::new();
        for (&p, exps) in &self.parts {
            let mut i = 0;
            while i < exps.len() {
                let e = exps[i];
                let run = exps[i..].iter().take_while(|&&x| x == e).count();
                let d = (p as u128).pow(e);
                if run == 1 {
                    terms.push(format!("C{d}"));
                } else {
                    terms.push(format!("C{d}^{run}"));
                }
                i += run;
            }
        }
        write!(f, "{}", terms.join(" x "))
    }
}

impl FromStr for AbelianGroup {
    type Err = Error;

    /// Parses `C4 x C11^2`-style text. Whitespace is ignored and factors need
    /// not be prime powers (`C12` is accepted). `1`, `C1` and the empty string
    /// denote the trivial group.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "1" {
            return Ok(AbelianGroup::trivial());
        }
        let mut orders = Vec::new();
        for term in compact.split(['x', 'X', '*']) {
            let body = term
                .strip_prefix(['C', 'c'])
                .ok_or_else(|| Error::Parse(format!("group term `{term}` must start with C")))?;
            let (d, e) = match body.split_once('^') {
                Some((d, e)) => (d, e),
                None => (body, "1"),
            };
            let d: i64 = d
                .parse()
                .map_err(|_| Error::Parse(format!("bad cyclic order in `{term}`")))?;
            let e: usize = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad multiplicity in `{term}`")))?;
            if d <= 0 {
                return Err(Error::Parse(format!("cyclic order must be positive in `{term}`")));
            }
            orders.extend(std::iter::repeat(d).take(e));
        }
        AbelianGroup::normalize(&orders)
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn normalize_examples() {
        let a = AbelianGroup::normalize(&[12, 2]).unwrap();
        assert_eq!(a.exponents(2), &[2, 1]);
        assert_eq!(a.exponents(3), &[1]);
        assert_eq!(a.order(), 24);

        let t = AbelianGroup::normalize(&[]).unwrap();
        assert!(t.is_trivial());
        assert_eq!(t.order(), 1);

        let b = AbelianGroup::normalize(&[4, 11, 11]).unwrap();
        assert_eq!(b.exponents(2), &[2]);
        assert_eq!(b.exponents(11), &[1, 1]);
        assert_eq!(b.order(), 484);

        assert_eq!(AbelianGroup::normalize(&[1, 1, 6]).unwrap(), g("C6"));
        assert!(AbelianGroup::normalize(&[0]).is_err());
        assert!(AbelianGroup::normalize(&[-3]).is_err());
    }

    #[test]
    fn direct_product_examples() {
        assert_eq!(g("C2").direct_product(&g("C3")), g("C6"));
        assert_eq!(AbelianGroup::trivial().direct_product(&g("C9 x C3")), g("C9 x C3"));
        let prod = g("C4").direct_product(&g("C4 x C11"));
        assert_eq!(prod.exponents(2), &[2, 2]);
        assert_eq!(prod.exponents(11), &[1]);
        // order statistics agree with the multiset union
        let expected = AbelianGroup::from_prime_powers([(2, 2), (2, 2), (11, 1)]).unwrap();
        assert_eq!(prod.order_statistics(), expected.order_statistics());
    }

    #[test]
    fn sylow_examples() {
        assert_eq!(g("C4 x C11^2").sylow(11).unwrap(), g("C11^2"));
        assert!(g("C6").sylow(5).unwrap().is_trivial());
        assert!(g("C6").sylow(4).is_err());
        let p = g("C8 x C4");
        let h = g("C4").direct_product(&p).direct_product(&g("C5"));
        assert_eq!(h.sylow(2).unwrap(), g("C4").direct_product(&p));
    }

    #[test]
    fn squares() {
        assert!(g("C11^2").is_square());
        assert!(!g("C11").is_square());
        assert!(g("C9^2 x C3^2").is_square());
        assert!(!g("C9 x C3").is_square());
        assert!(AbelianGroup::trivial().is_square());
        let k = g("C9 x C3 x C4");
        assert!(k.direct_product(&k).is_square());
        assert_eq!(k.direct_product(&k).square_root(), Some(k));
    }

    #[test]
    fn min_two_exponent_examples() {
        assert_eq!(g("C8 x C4").min_two_exponent(), 2);
        assert_eq!(g("C2 x C4").min_two_exponent(), 1);
        assert_eq!(g("C3").min_two_exponent(), 0);
    }

    #[test]
    fn recognition_examples() {
        let klein = BTreeMap::from([(1, 1), (2, 3)]);
        assert_eq!(AbelianGroup::structure_from_order_statistics(&klein, 4).unwrap(), g("C2^2"));
        let c4 = BTreeMap::from([(1, 1), (2, 1), (4, 2)]);
        assert_eq!(AbelianGroup::structure_from_order_statistics(&c4, 4).unwrap(), g("C4"));
        let bad = BTreeMap::from([(1, 1), (2, 2)]);
        assert!(AbelianGroup::structure_from_order_statistics(&bad, 3).is_err());
        // counts of the non-abelian quaternion group: 1, 1, 6 of orders 1, 2, 4
        let q8 = BTreeMap::from([(1, 1), (2, 1), (4, 6)]);
        assert!(AbelianGroup::structure_from_order_statistics(&q8, 8).is_err());
    }

    #[test]
    fn recognition_is_left_inverse_up_to_512() {
        for n in 1..=512u128 {
            for grp in AbelianGroup::all_of_order(n) {
                let stats = grp.order_statistics();
                let back = AbelianGroup::structure_from_order_statistics(&stats, n).unwrap();
                assert_eq!(back, grp);
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(g("C4 x C11^2").to_string(), "C4 x C11^2");
        assert_eq!(g("C12").to_string(), "C4 x C3");
        assert_eq!(g("  C2x C2 xC2 ").to_string(), "C2^3");
        assert_eq!(g("C1").to_string(), "C1");
        assert_eq!(g("C8 x C4 x C2^0").to_string(), "C8 x C4");
        assert!("D4".parse::<AbelianGroup>().is_err());
        assert!("C0".parse::<AbelianGroup>().is_err());
        assert_eq!(g("C12 x C2").invariant_factor_string(), "Z/12 x Z/2");
    }

    #[test]
    fn splittings_cover_all_side_assignments() {
        let grp = g("C4^2 x C11");
        let s = grp.splittings();
        // {2,2} splits 3 ways, {1} splits 2 ways
        assert_eq!(s.len(), 6);
        for (a, b) in &s {
            assert_eq!(a.direct_product(b), grp);
        }
    }

    #[test]
    fn cyclic_factor_removal() {
        assert_eq!(g("C4 x C4 x C11").remove_cyclic_factor(44), Some(g("C4")));
        assert_eq!(g("C8 x C3").remove_cyclic_factor(4), None);
        assert!(g("C2 x C9").has_cyclic_factor(18));
        assert_eq!(g("C4 x C16").quotient_by_factor(&g("C16")), Some(g("C4")));
    }

    fn arb_orders() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(1i64..60, 0..6)
    }

    proptest! {
        #[test]
        fn normalize_is_permutation_invariant(mut orders in arb_orders(), seed in any::<u64>()) {
            let a = AbelianGroup::normalize(&orders).unwrap();
            let n = orders.len().max(1);
            orders.rotate_left((seed as usize) % n);
            orders.reverse();
            let b = AbelianGroup::normalize(&orders).unwrap();
            prop_assert_eq!(&a, &b);
            // idempotent through the primary form
            let again: Vec<i64> = a.prime_powers().map(|(p, e)| (p as i64).pow(e)).collect();
            prop_assert_eq!(AbelianGroup::normalize(&again).unwrap(), a);
        }

        #[test]
        fn product_orders_multiply_and_sylows_reconstruct(x in arb_orders(), y in arb_orders()) {
            let a = AbelianGroup::normalize(&x).unwrap();
            let b = AbelianGroup::normalize(&y).unwrap();
            let ab = a.direct_product(&b);
            prop_assert_eq!(ab.order(), a.order() * b.order());
            let rebuilt = ab
                .primes()
                .map(|p| ab.sylow(p).unwrap())
                .fold(AbelianGroup::trivial(), |acc, s| acc.direct_product(&s));
            prop_assert_eq!(rebuilt, ab);
        }

        #[test]
        fn square_groups_have_square_order(x in arb_orders()) {
            let a = AbelianGroup::normalize(&x).unwrap();
            let sq = a.direct_product(&a);
            prop_assert!(sq.is_square());
            let r = (sq.order() as f64).sqrt().round() as u128;
            prop_assert_eq!(r * r, sq.order());
            if a.is_square() {
                let r = (a.order() as f64).sqrt().round() as u128;
                prop_assert_eq!(r * r, a.order());
            }
        }

        #[test]
        fn text_form_round_trips(x in arb_orders()) {
            let a = AbelianGroup::normalize(&x).unwrap();
            prop_assert_eq!(a.to_string().parse::<AbelianGroup>().unwrap(), a);
        }
    }
}
