//! Ground-truth unit groups: brute force for finite rings, lifting through
//! the nilradical for the characteristic-zero families, and F_3 linear
//! algebra for the rings A_n.

mod an;
mod char0;
mod finite;
mod module_ring;

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

pub use an::{an_verify, psi_image, AnVerification};
pub use char0::{probe_quotient_units, unit_group_char0_witness};
pub use finite::unit_group_finite;
pub use module_ring::{Elem, ModuleRing};

use crate::abelian::AbelianGroup;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::poly::{build_module_ring, Family, RingPresentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitGroupReport {
    pub unit_count: u128,
    pub structure: AbelianGroup,
    pub nilradical_size: u128,
    pub quotient_unit_count: u128,
    pub exact_sequence_ok: bool,
}

impl UnitGroupReport {
    /// Report for a product of rings.
    pub fn product(&self, other: &UnitGroupReport) -> UnitGroupReport {
        UnitGroupReport {
            unit_count: self.unit_count * other.unit_count,
            structure: self.structure.direct_product(&other.structure),
            nilradical_size: self.nilradical_size * other.nilradical_size,
            quotient_unit_count: self.quotient_unit_count * other.quotient_unit_count,
            exact_sequence_ok: self.exact_sequence_ok && other.exact_sequence_ok,
        }
    }
}

/// Which finite additive subset to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subset {
    All,
    Torsion,
    Nilradical,
}

/// Explicit elements of the requested finite subset, at most `bound` of them.
pub fn enumerate_additive(r: &ModuleRing, subset: Subset, bound: u64) -> Result<Vec<Elem>> {
    match subset {
        Subset::All | Subset::Torsion => {
            if subset == Subset::All && r.free_rank() > 0 {
                return Err(Error::InvalidArgument(format!(
                    "additive group has free rank {}; request the torsion part or the nilradical",
                    r.free_rank()
                )));
            }
            let size = r.torsion_size().ok_or(Error::Overflow("additive group size"))?;
            check_bound("additive enumeration", size, bound)?;
            Ok((0..size).map(|i| r.torsion_element(i)).collect())
        }
        Subset::Nilradical => {
            if !r.nilradical_gens().is_empty() {
                return designated_nil_ideal(r, bound).map(|n| n.elements);
            }
            if r.size().is_some() {
                return finite::nilpotent_elements(r, bound);
            }
            if r.nilradical_gens().is_empty() && r.torsion_size() == Some(1) {
                // torsion-free rings without designated nilpotents are taken as reduced
                return Ok(vec![r.zero()]);
            }
            Err(Error::InvalidArgument("no finite nilradical is designated for this ring".into()))
        }
    }
}

pub(crate) fn check_bound(what: &str, needed: u128, bound: u64) -> Result<()> {
    if needed > bound as u128 {
        Err(Error::BoundExceeded { what: what.to_string(), needed, bound: bound as u128 })
    } else {
        Ok(())
    }
}

pub(crate) struct NilIdeal {
    pub elements: Vec<Elem>,
    /// Additive generators: designated generators times reduced basis elements.
    pub generators: Vec<Elem>,
}

/// The ideal generated by the designated nilpotent generators, enumerated
/// as the additive span of g * e_a. Every element must be torsion and
/// nilpotent.
pub(crate) fn designated_nil_ideal(r: &ModuleRing, bound: u64) -> Result<NilIdeal> {
    let mut generators = Vec::new();
    for g in r.nilradical_gens() {
        let g = r.from_base(g)?;
        for a in 0..r.dim() {
            let mut e = r.zero();
            e[a] = 1;
            let p = r.mul(&g, &e);
            if !r.is_zero(&p) && !generators.contains(&p) {
                generators.push(p);
            }
        }
    }
    for g in &generators {
        if !r.is_torsion(g) {
            return Err(Error::Verification("designated nilradical is not finite".into()));
        }
    }
    let elements = additive_span(r, &generators, bound)?;
    let limit = r.rank().max(1) as u64;
    for x in &elements {
        if !r.is_zero(&r.pow(x, limit)) {
            return Err(Error::Verification(format!("element {x:?} of the designated nilradical is not nilpotent")));
        }
    }
    Ok(NilIdeal { elements, generators })
}

/// Additive subgroup spanned by torsion generators, by breadth-first search.
pub(crate) fn additive_span(r: &ModuleRing, gens: &[Elem], bound: u64) -> Result<Vec<Elem>> {
    let mut seen: HashSet<Elem> = HashSet::from([r.zero()]);
    let mut order = vec![r.zero()];
    let mut queue = VecDeque::from([r.zero()]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = r.add(&x, g);
            if seen.insert(y.clone()) {
                check_bound("nilradical enumeration", seen.len() as u128, bound)?;
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(order)
}

/// Element-order counts of a finite set of units, turned into a group.
pub(crate) fn structure_of(orders: &BTreeMap<u128, u128>) -> Result<AbelianGroup> {
    let n: u128 = orders.values().sum();
    AbelianGroup::structure_from_order_statistics(orders, n)
}

/// |A^*| = |1 + N| * |(A/N)^*|, with the unit group computed by whichever
/// oracle applies to `r`.
pub fn exact_sequence_check(r: &ModuleRing, config: &Config) -> Result<bool> {
    let report = if r.size().is_some() {
        unit_group_finite(r, config.oracle_bound)?
    } else {
        unit_group_char0_witness(r, config.oracle_bound)?
    };
    Ok(report.unit_count == report.nilradical_size * report.quotient_unit_count)
}

/// Unit group of a presented ring, by the oracle matching its family.
pub fn evaluate(p: &RingPresentation, config: &Config) -> Result<UnitGroupReport> {
    p.validate()?;
    match &p.family {
        Family::DirectProduct { components } => {
            let mut acc: Option<UnitGroupReport> = None;
            for c in components {
                let rep = evaluate(c, config)?;
                acc = Some(match acc {
                    None => rep,
                    Some(a) => a.product(&rep),
                });
            }
            acc.ok_or_else(|| Error::InvalidArgument("empty product".into()))
        }
        Family::AnRing { n } => Ok(an_verify(*n, config)?.report),
        _ if p.base.is_finite() => unit_group_finite(&build_module_ring(p)?, config.oracle_bound),
        _ => unit_group_char0_witness(&build_module_ring(p)?, config.oracle_bound),
    }
}
