//! Witness rings for the sufficient realizability rules, each paired with
//! the oracle that checks it.

use serde::{Deserialize, Serialize};

use crate::abelian::AbelianGroup;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::gaussian::{split_prime, GaussianInt, ONE_PLUS_I};
use crate::oracle::{evaluate, UnitGroupReport};
use crate::poly::{Base, Family, RingPresentation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verification {
    FiniteBruteForce,
    Char0Lift,
    AnLinearAlgebra,
    /// Component-wise evaluation of a direct product.
    ProductAssembly,
}

impl Verification {
    /// The method that applies to a presentation's family.
    pub fn for_presentation(p: &RingPresentation) -> Verification {
        match &p.family {
            Family::DirectProduct { .. } => Verification::ProductAssembly,
            Family::AnRing { .. } => Verification::AnLinearAlgebra,
            _ if p.base.is_finite() => Verification::FiniteBruteForce,
            _ => Verification::Char0Lift,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub presentation: RingPresentation,
    pub claimed_group: AbelianGroup,
    pub verification: Verification,
    /// Identifier of the rule that produced the witness.
    pub citation: String,
}

impl WitnessCertificate {
    pub fn new(presentation: RingPresentation, claimed_group: AbelianGroup, citation: &str) -> Self {
        WitnessCertificate {
            verification: Verification::for_presentation(&presentation),
            presentation,
            claimed_group,
            citation: citation.to_string(),
        }
    }

    /// Product certificate; the claim is the product of the claims.
    pub fn product(parts: Vec<WitnessCertificate>, citation: &str) -> Self {
        let claimed = parts
            .iter()
            .fold(AbelianGroup::trivial(), |acc, c| acc.direct_product(&c.claimed_group));
        let mut components = Vec::new();
        for c in parts {
            match c.presentation.family {
                Family::DirectProduct { components: inner } => components.extend(inner),
                _ => components.push(c.presentation),
            }
        }
        Self::new(RingPresentation::product(components), claimed, citation)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationOutcome {
    pub report: UnitGroupReport,
    pub matches: bool,
}

/// Replays a certificate through the oracle.
pub fn verify_certificate(cert: &WitnessCertificate, config: &Config) -> Result<VerificationOutcome> {
    let method = Verification::for_presentation(&cert.presentation);
    if method != cert.verification {
        return Err(Error::Verification(format!(
            "method {:?} does not apply to a {} presentation (expected {:?})",
            cert.verification,
            cert.presentation.family_name(),
            method
        )));
    }
    let report = evaluate(&cert.presentation, config)?;
    let matches = report.structure == cert.claimed_group;
    Ok(VerificationOutcome { report, matches })
}

/// Z[x_1..x_n]/(a_i x_i, x_i x_j) with the a_i the invariant factors of H,
/// whose unit group is Z/2 x H.
pub fn witness_z2_times_h(h: &AbelianGroup) -> WitnessCertificate {
    let moduli = h.invariant_factors().into_iter().map(|d| GaussianInt::from_int(d as i128)).collect();
    let claim = AbelianGroup::cyclic(2).expect("valid").direct_product(h);
    WitnessCertificate::new(RingPresentation::nilpotent_extension(Base::Z, moduli), claim, "char0.z2-times-h")
}

/// Splits a 2-group's exponents into consecutive pairs differing by at
/// most one, returning the pairs (smaller first).
fn pair_two_exponents(exps: &[u32]) -> Option<Vec<(u32, u32)>> {
    if exps.len() % 2 != 0 {
        return None;
    }
    let mut sorted = exps.to_vec();
    sorted.sort_unstable();
    let pairs: Vec<(u32, u32)> = sorted.chunks(2).map(|c| (c[0], c[1])).collect();
    pairs.iter().all(|&(lo, hi)| hi - lo <= 1).then_some(pairs)
}

/// Gaussian moduli realizing H as the additive group of the nilradical of a
/// Z[i] nilpotent extension, plus whether an extra Z[i] factor is needed for
/// a leftover Z/4. None when H is not of that shape.
pub fn h2_moduli(h: &AbelianGroup) -> Option<(Vec<GaussianInt>, bool)> {
    let mut moduli = Vec::new();
    let two = h.exponents(2);
    let (pairs, extra) = match pair_two_exponents(two) {
        Some(p) => (p, false),
        None => {
            let pos = two.iter().position(|&e| e == 2)?;
            let mut rest = two.to_vec();
            rest.remove(pos);
            (pair_two_exponents(&rest)?, true)
        }
    };
    let mut two_moduli: Vec<u32> = pairs.iter().map(|&(lo, hi)| if lo == hi { 2 * lo } else { 2 * lo + 1 }).collect();
    two_moduli.sort_unstable_by(|a, b| b.cmp(a));
    moduli.extend(two_moduli.into_iter().map(|k| ONE_PLUS_I.pow(k).canonical()));

    for p in h.primes().filter(|&p| p != 2) {
        let exps = h.exponents(p);
        if p % 4 == 3 {
            let sylow = h.sylow(p).ok()?;
            let root = sylow.square_root()?;
            for &e in root.exponents(p) {
                moduli.push(GaussianInt::from_int((p as i128).pow(e)));
            }
        } else {
            let pi = split_prime(p).ok()?;
            moduli.extend(exps.iter().map(|&e| pi.pow(e)));
        }
    }
    Some((moduli, extra))
}

/// Z[i][x_1..x_n]/(a_i x_i, x_i x_j), whose unit group is Z/4 x H; a
/// trailing Z[i] factor supplies a second Z/4 when H needs it.
pub fn witness_h2(h: &AbelianGroup) -> Result<WitnessCertificate> {
    let (moduli, extra) = h2_moduli(h).ok_or_else(|| {
        Error::InvalidArgument(format!("{h} is not of the Gaussian nilpotent-extension shape"))
    })?;
    let claim = AbelianGroup::cyclic(4).expect("valid").direct_product(h);
    let ext = RingPresentation::nilpotent_extension(Base::Zi, moduli);
    let presentation = if extra {
        RingPresentation::product(vec![ext, RingPresentation::base_ring(Base::Zi)])
    } else {
        ext
    };
    Ok(WitnessCertificate::new(presentation, claim, "char0.gaussian-h2"))
}

/// Z^a x Z[i]^b when c = 0, else Z^(a-1) x Z[i]^b x A_(c-1); unit group
/// (Z/2)^a x (Z/4)^b x (Z/3)^c.
pub fn witness_torsion_free(a: u32, b: u32, c: u32) -> Result<WitnessCertificate> {
    if a + b == 0 {
        return Err(Error::InvalidArgument("a torsion-free ring needs a + b >= 1".into()));
    }
    if c >= 1 && a == 0 {
        return Err(Error::InvalidArgument("a torsion-free ring with 3-torsion units needs a >= 1".into()));
    }
    let zs = if c == 0 { a } else { a - 1 };
    let mut components: Vec<RingPresentation> = Vec::new();
    components.extend((0..zs).map(|_| RingPresentation::base_ring(Base::Z)));
    components.extend((0..b).map(|_| RingPresentation::base_ring(Base::Zi)));
    if c >= 1 {
        components.push(RingPresentation::an_ring(c - 1));
    }
    let claim = AbelianGroup::from_prime_powers(
        std::iter::repeat((2, 1))
            .take(a as usize)
            .chain(std::iter::repeat((2, 2)).take(b as usize))
            .chain(std::iter::repeat((3, 1)).take(c as usize)),
    )?;
    Ok(WitnessCertificate::new(RingPresentation::product(components), claim, "torsion-free.block"))
}

#[derive(Deserialize)]
struct RegistryEntry {
    #[allow(dead_code)]
    name: String,
    certificate: WitnessCertificate,
}

const REGISTRY: &str = include_str!("../data/registry.json");

/// Every registered certificate.
pub fn registry() -> Vec<WitnessCertificate> {
    let entries: Vec<RegistryEntry> = serde_json::from_str(REGISTRY).expect("bundled registry parses");
    entries.into_iter().map(|e| e.certificate).collect()
}

/// The registered certificate whose claim is G, if any.
pub fn registry_lookup(g: &AbelianGroup) -> Option<WitnessCertificate> {
    registry().into_iter().find(|c| &c.claimed_group == g)
}
