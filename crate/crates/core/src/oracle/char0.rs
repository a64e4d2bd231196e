//! Unit groups of the characteristic-zero witness rings.
//!
//! The ring carries a designated nil ideal N and lifts of the units of
//! A/N. The candidate set is {rho (1 + n)}; each candidate is checked to be
//! a unit, the set is checked to be closed under multiplication, and the
//! count must equal |1 + N| times the number of listed quotient units.

use std::collections::{BTreeMap, HashSet};

use super::{check_bound, designated_nil_ideal, structure_of, Elem, ModuleRing, UnitGroupReport};
use crate::error::{Error, Result};

/// Checks `(1 + n) * sum_j (-n)^j = 1`.
fn one_plus_nilpotent_is_unit(r: &ModuleRing, n: &Elem) -> bool {
    let one = r.one();
    let minus_n = r.neg(n);
    let mut inverse = one.clone();
    let mut term = one.clone();
    for _ in 0..=r.rank() {
        term = r.mul(&term, &minus_n);
        if r.is_zero(&term) {
            break;
        }
        inverse = r.add(&inverse, &term);
    }
    r.mul(&r.add(&one, n), &inverse) == one
}

pub fn unit_group_char0_witness(r: &ModuleRing, bound: u64) -> Result<UnitGroupReport> {
    let lifts_base = r
        .quotient_unit_lifts()
        .ok_or_else(|| Error::Unsupported("ring has no designated quotient units".into()))?;
    let lifts: Vec<Elem> = lifts_base.iter().map(|v| r.from_base(v)).collect::<Result<_>>()?;
    let nil = designated_nil_ideal(r, bound)?;
    let nil_set: HashSet<&Elem> = nil.elements.iter().collect();

    for (a, x) in lifts.iter().enumerate() {
        for y in &lifts[..a] {
            if nil_set.contains(&r.sub(x, y)) {
                return Err(Error::Verification("two listed quotient units agree modulo the nilradical".into()));
            }
        }
    }
    let one = r.one();
    let one_plus: Vec<Elem> = nil.elements.iter().map(|n| r.add(&one, n)).collect();
    for n in &nil.elements {
        if !one_plus_nilpotent_is_unit(r, n) {
            return Err(Error::Verification(format!("1 + {n:?} is not invertible")));
        }
    }

    let expected = nil.elements.len() as u128 * lifts.len() as u128;
    check_bound("unit candidate set", expected, bound)?;
    let mut candidates: Vec<Elem> = Vec::with_capacity(expected as usize);
    let mut seen: HashSet<Elem> = HashSet::new();
    for rho in &lifts {
        for u in &one_plus {
            let c = r.mul(rho, u);
            if seen.insert(c.clone()) {
                candidates.push(c);
            }
        }
    }

    // U * S inside U for S = lifts and 1 + N, which generate U
    for c in &candidates {
        for s in lifts.iter().chain(&one_plus) {
            if !seen.contains(&r.mul(c, s)) {
                return Err(Error::Verification("candidate unit set is not closed under multiplication".into()));
            }
        }
    }

    let mut orders: BTreeMap<u128, u128> = BTreeMap::new();
    let limit = candidates.len() as u64;
    for c in &candidates {
        let k = r
            .multiplicative_order(c, limit)
            .ok_or_else(|| Error::Verification(format!("candidate {c:?} has no finite order, so is not a unit")))?;
        *orders.entry(k as u128).or_insert(0) += 1;
    }
    let unit_count = candidates.len() as u128;
    if unit_count != expected {
        return Err(Error::Verification(format!(
            "cardinality identity fails: {unit_count} candidates vs |1+N| * |(A/N)^*| = {expected}"
        )));
    }
    Ok(UnitGroupReport {
        unit_count,
        structure: structure_of(&orders)?,
        nilradical_size: nil.elements.len() as u128,
        quotient_unit_count: lifts.len() as u128,
        exact_sequence_ok: true,
    })
}

/// Searches the quotient A/N for units of finite order (exponent at most
/// `max_order`) that are not among the listed lifts; free coordinates range
/// over [-radius, radius]. An empty result supports, but does not prove,
/// the completeness of the listed quotient units.
pub fn probe_quotient_units(r: &ModuleRing, radius: i128, max_order: u64, bound: u64) -> Result<Vec<Vec<i128>>> {
    let lifts_base = r
        .quotient_unit_lifts()
        .ok_or_else(|| Error::Unsupported("ring has no designated quotient units".into()))?;
    let nil = designated_nil_ideal(r, bound)?;
    let gens: Vec<_> = nil.generators.iter().map(|g| r.to_base(g)).collect();
    let q = r.quotient(&gens)?;
    let listed: HashSet<Elem> = lifts_base.iter().map(|v| q.from_base(v)).collect::<Result<_>>()?;

    let ranges: Vec<i128> = q.moduli().iter().map(|&m| if m == 0 { 2 * radius + 1 } else { m }).collect();
    let total = ranges.iter().try_fold(1u128, |acc, &k| acc.checked_mul(k as u128)).ok_or(Error::Overflow("probe size"))?;
    check_bound("quotient unit probe", total, bound)?;
    let mut extra = Vec::new();
    for mut idx in 0..total {
        let mut x = q.zero();
        for (a, (&k, &m)) in ranges.iter().zip(q.moduli()).enumerate() {
            let digit = (idx % k as u128) as i128;
            idx /= k as u128;
            x[a] = if m == 0 { digit - radius } else { digit };
        }
        if !listed.contains(&x) && q.multiplicative_order(&x, max_order).is_some() {
            extra.push(x);
        }
    }
    Ok(extra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::AbelianGroup;
    use crate::gaussian::GaussianInt;
    use crate::poly::{build_module_ring, Base, RingPresentation};

    fn report(base: Base, moduli: &[GaussianInt]) -> UnitGroupReport {
        let p = RingPresentation::nilpotent_extension(base, moduli.to_vec());
        unit_group_char0_witness(&build_module_ring(&p).unwrap(), 1 << 20).unwrap()
    }

    #[test]
    fn integer_extensions() {
        let r = report(Base::Z, &[GaussianInt::from_int(5)]);
        assert_eq!(r.structure, "C2 x C5".parse().unwrap());
        assert_eq!((r.unit_count, r.nilradical_size, r.quotient_unit_count), (10, 5, 2));
        assert_eq!(report(Base::Z, &[]).structure, AbelianGroup::cyclic(2).unwrap());
        let r = report(Base::Z, &[GaussianInt::from_int(4), GaussianInt::from_int(2)]);
        assert_eq!(r.structure, "C2^2 x C4".parse().unwrap());
    }

    #[test]
    fn gaussian_extensions() {
        let r = report(Base::Zi, &[GaussianInt::from_int(3)]);
        assert_eq!(r.structure, "C4 x C3^2".parse().unwrap());
        let r = report(Base::Zi, &[GaussianInt::new(2, 1)]);
        assert_eq!(r.structure, "C4 x C5".parse().unwrap());
        // (1+i)^5 gives Z/8 x Z/4 additively
        let r = report(Base::Zi, &[GaussianInt::new(1, 1).pow(5)]);
        assert_eq!(r.structure, "C4^2 x C8".parse().unwrap());
    }

    #[test]
    fn missing_lifts_are_rejected() {
        let r = build_module_ring(&RingPresentation::an_ring(0)).unwrap();
        assert!(matches!(unit_group_char0_witness(&r, 1 << 20), Err(Error::Unsupported(_))));
    }

    #[test]
    fn incomplete_lifts_fail_closure() {
        // listing only {1, i}: i * i = -1 is missing
        let r = build_module_ring(&RingPresentation::base_ring(Base::Zi)).unwrap();
        let lifts = vec![vec![GaussianInt::from_int(1)], vec![GaussianInt::new(0, 1)]];
        let r = r.with_quotient_units(lifts).unwrap();
        assert!(matches!(unit_group_char0_witness(&r, 1 << 20), Err(Error::Verification(_))));
    }
}
