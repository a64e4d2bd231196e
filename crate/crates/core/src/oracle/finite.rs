//! Brute-force unit groups of finite rings.
//!
//! Each element is classified by walking its powers: reaching 1 makes it a
//! unit of known order, reaching 0 makes it nilpotent, and falling into a
//! cycle that avoids 1 makes it neither. Powers inherit the classification
//! (x^j has order k / gcd(j, k) when x has order k), so most elements are
//! settled by someone else's walk.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::{check_bound, structure_of, Elem, ModuleRing, UnitGroupReport};
use crate::arith::gcd;
use crate::error::{Error, Result};

const UNKNOWN: u64 = 0;
const NILPOTENT: u64 = 1;
const NON_UNIT: u64 = 2;
/// Units are stored as `UNIT_BASE + order`.
const UNIT_BASE: u64 = 2;

struct Classification {
    status: Vec<u64>,
}

impl Classification {
    fn unit_orders(&self) -> BTreeMap<u128, u128> {
        let mut counts = BTreeMap::new();
        for &s in &self.status {
            if s > UNIT_BASE {
                *counts.entry((s - UNIT_BASE) as u128).or_insert(0) += 1;
            }
        }
        counts
    }

    fn nilpotent_indices(&self) -> impl Iterator<Item = u128> + '_ {
        self.status.iter().enumerate().filter(|(_, &s)| s == NILPOTENT).map(|(i, _)| i as u128)
    }
}

fn ring_size(r: &ModuleRing, bound: u64) -> Result<u128> {
    let size = r
        .size()
        .ok_or_else(|| Error::InvalidArgument("brute force needs a finite ring".into()))?;
    check_bound("finite ring enumeration", size, bound)?;
    Ok(size)
}

fn classify(r: &ModuleRing, bound: u64) -> Result<Classification> {
    let size = ring_size(r, bound)? as usize;
    let mut status = vec![UNKNOWN; size];
    let zero = r.index_of(&r.zero()) as usize;
    let one = r.index_of(&r.one()) as usize;
    status[zero] = NILPOTENT;
    status[one] = UNIT_BASE + 1;
    for start in 0..size {
        if status[start] != UNKNOWN {
            continue;
        }
        let x = r.torsion_element(start as u128);
        let mut path = vec![start];
        let mut pos: HashMap<usize, usize> = HashMap::from([(start, 0)]);
        let mut cur = x.clone();
        let verdict = loop {
            cur = r.mul(&cur, &x);
            let ci = r.index_of(&cur) as usize;
            if ci == one {
                break None;
            }
            match status[ci] {
                NILPOTENT => break Some(NILPOTENT),
                NON_UNIT => break Some(NON_UNIT),
                _ => {}
            }
            if pos.contains_key(&ci) {
                break Some(NON_UNIT);
            }
            pos.insert(ci, path.len());
            path.push(ci);
        };
        match verdict {
            Some(s) => {
                for &p in &path {
                    status[p] = s;
                }
            }
            None => {
                let k = path.len() as u128 + 1;
                for (j, &p) in path.iter().enumerate() {
                    let order = k / gcd(j as u128 + 1, k);
                    status[p] = UNIT_BASE + order as u64;
                }
            }
        }
    }
    Ok(Classification { status })
}

pub(crate) fn nilpotent_elements(r: &ModuleRing, bound: u64) -> Result<Vec<Elem>> {
    let c = classify(r, bound)?;
    Ok(c.nilpotent_indices().map(|i| r.torsion_element(i)).collect())
}

/// Greedy additive generators of a subgroup given by its elements.
fn additive_generators(r: &ModuleRing, elements: &[Elem]) -> Vec<Elem> {
    let mut span: HashSet<Elem> = HashSet::from([r.zero()]);
    let mut gens = Vec::new();
    for z in elements {
        if span.contains(z) {
            continue;
        }
        gens.push(z.clone());
        let base: Vec<Elem> = span.iter().cloned().collect();
        let mut shift = z.clone();
        while !span.contains(&shift) {
            for s in &base {
                span.insert(r.add(s, &shift));
            }
            shift = r.add(&shift, z);
        }
    }
    gens
}

/// Unit group of a finite ring by exhaustive classification, with the
/// quotient by the nilradical built and enumerated separately.
pub fn unit_group_finite(r: &ModuleRing, bound: u64) -> Result<UnitGroupReport> {
    let c = classify(r, bound)?;
    let orders = c.unit_orders();
    let unit_count: u128 = orders.values().sum();
    let structure = structure_of(&orders)?;
    let nil: Vec<Elem> = c.nilpotent_indices().map(|i| r.torsion_element(i)).collect();
    let nilradical_size = nil.len() as u128;

    let quotient_unit_count = if nilradical_size == 1 {
        unit_count
    } else {
        let gens: Vec<_> = additive_generators(r, &nil).iter().map(|g| r.to_base(g)).collect();
        let q = r.quotient(&gens)?;
        let qc = classify(&q, bound)?;
        if qc.nilpotent_indices().count() != 1 {
            return Err(Error::Verification("quotient by the nilradical is not reduced".into()));
        }
        qc.unit_orders().values().sum()
    };
    Ok(UnitGroupReport {
        unit_count,
        structure,
        nilradical_size,
        quotient_unit_count,
        exact_sequence_ok: unit_count == nilradical_size * quotient_unit_count,
    })
}
