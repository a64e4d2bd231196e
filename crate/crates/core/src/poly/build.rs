use crate::arith::prime_power;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianInt, I, ONE, ZERO};
use crate::oracle::ModuleRing;

use super::expr::Poly;
use super::presentation::{Base, EliminatedQuotient, Family, RingPresentation};

/// Largest A_n index the builder accepts (rank 2^{n+1}).
pub const MAX_AN_INDEX: u32 = 8;

type Table = Vec<Vec<Vec<(usize, GaussianInt)>>>;

/// Module presentation of a ring presentation.
pub fn build_module_ring(p: &RingPresentation) -> Result<ModuleRing> {
    p.validate()?;
    match &p.family {
        Family::NilpotentExtension { moduli } => nilpotent_extension(p.base, moduli),
        Family::AnRing { n } => an_ring(*n),
        Family::EliminatedQuotient(q) => eliminated(p.base, q),
        Family::DirectProduct { components } => {
            let rings = components.iter().map(build_module_ring).collect::<Result<Vec<_>>>()?;
            direct_product(&rings)
        }
    }
}

/// Z/nZ.
pub fn zmod(n: u64) -> Result<RingPresentation> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Z/{n}Z needs n >= 2")));
    }
    Ok(RingPresentation::base_ring(Base::Zmod(n)))
}

/// F_q as Z/p for q = p, else F_p[t]/(f) with f the first monic
/// irreducible polynomial of degree k in coefficient-index order.
pub fn finite_field(q: u64) -> Result<RingPresentation> {
    let (p, k) = prime_power(q as u128).ok_or_else(|| Error::InvalidArgument(format!("{q} is not a prime power")))?;
    if k == 1 {
        return zmod(p);
    }
    let f = first_irreducible_mod_p(p, k)?;
    let names = vec!["t".to_string()];
    let mut poly = Poly::zero(1);
    for (d, &c) in f.iter().enumerate() {
        poly = poly.add(&Poly::var(1, 0).pow(d as u32).scale(GaussianInt::from_int(c as i128)));
    }
    Ok(RingPresentation {
        base: Base::Zmod(p),
        family: Family::EliminatedQuotient(EliminatedQuotient {
            generators: names,
            substitutions: Default::default(),
            relations: vec![poly.display_with(&["t"])],
            nilradical: Vec::new(),
            quotient_units: Vec::new(),
        }),
    })
}

/// Coefficients (lowest first, monic) of the first irreducible polynomial of
/// degree k over F_p, enumerating c_0 + c_1 p + ... in increasing order.
pub fn first_irreducible_mod_p(p: u64, k: u32) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let count = (p as u128).checked_pow(k).filter(|&c| c <= 1 << 24).ok_or(Error::Overflow("field size"))?;
    for index in 0..count as u64 {
        let f = monic_from_index(p, k, index);
        if is_irreducible_mod_p(&f, p) {
            return Ok(f);
        }
    }
    Err(Error::InvalidArgument(format!("no irreducible polynomial of degree {k} mod {p}")))
}

fn monic_from_index(p: u64, k: u32, mut index: u64) -> Vec<u64> {
    let mut f = Vec::with_capacity(k as usize + 1);
    for _ in 0..k {
        f.push(index % p);
        index /= p;
    }
    f.push(1);
    f
}

fn is_irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let k = f.len() as u32 - 1;
    for d in 1..=k / 2 {
        for index in 0..p.pow(d) {
            let g = monic_from_index(p, d, index);
            if rem_mod_p(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Remainder of f by a monic g over F_p.
fn rem_mod_p(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().expect("nonempty");
        let shift = r.len() - 1 - dg;
        for (j, &c) in g.iter().enumerate() {
            r[shift + j] = (r[shift + j] + p * p - lead * c % p) % p;
        }
        r.pop();
    }
    r
}

fn unit_lifts(base: Base, rank: usize) -> Option<Vec<Vec<GaussianInt>>> {
    let units: Vec<GaussianInt> = match base {
        Base::Z => vec![ONE, -ONE],
        Base::Zi => vec![ONE, -ONE, I, -I],
        Base::Zmod(_) => return None,
    };
    Some(
        units
            .into_iter()
            .map(|u| {
                let mut v = vec![ZERO; rank];
                v[0] = u;
                v
            })
            .collect(),
    )
}

fn nilpotent_extension(base: Base, moduli: &[GaussianInt]) -> Result<ModuleRing> {
    let rank = moduli.len() + 1;
    let mut table: Table = vec![vec![Vec::new(); rank]; rank];
    for j in 0..rank {
        table[0][j] = vec![(j, ONE)];
        table[j][0] = vec![(j, ONE)];
    }
    let relations: Vec<Vec<GaussianInt>> = moduli
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let mut row = vec![ZERO; rank];
            row[k + 1] = *a;
            row
        })
        .collect();
    let mut one = vec![ZERO; rank];
    one[0] = ONE;
    let nil: Vec<Vec<GaussianInt>> = (1..rank)
        .map(|k| {
            let mut v = vec![ZERO; rank];
            v[k] = ONE;
            v
        })
        .collect();
    let ring = ModuleRing::from_sparse(base, table, relations, one)?.with_nilradical(nil)?;
    match unit_lifts(base, rank) {
        Some(l) => ring.with_quotient_units(l),
        None => Ok(ring),
    }
}

/// Index of the basis element x^e y_S (S a bitmask).
pub(crate) fn an_index(s: usize, e: usize) -> usize {
    2 * s + e
}

/// A_n = Z[x, y_1..y_n]/(x^2+x+1, y_i^2+y_i+1) over the basis {y_S, x y_S}.
fn an_ring(n: u32) -> Result<ModuleRing> {
    if n > MAX_AN_INDEX {
        return Err(Error::BoundExceeded {
            what: "A_n index".into(),
            needed: n as u128,
            bound: MAX_AN_INDEX as u128,
        });
    }
    let subsets = 1usize << n;
    let rank = 2 * subsets;
    // x^e with e in {0,1,2}, expanded in {1, x}
    let x_pow: [Vec<(usize, i128)>; 3] = [vec![(0, 1)], vec![(1, 1)], vec![(0, -1), (1, -1)]];
    let mut table: Table = vec![vec![Vec::new(); rank]; rank];
    for s in 0..subsets {
        for t in 0..subsets {
            let common = s & t;
            let sign = if common.count_ones() % 2 == 0 { 1 } else { -1 };
            // y_S y_T = (-1)^{|C|} sum_{R subset of C} y_{(S xor T) | R}
            let mut y_terms = Vec::new();
            let mut r = common;
            loop {
                y_terms.push((s ^ t) | r);
                if r == 0 {
                    break;
                }
                r = (r - 1) & common;
            }
            for e1 in 0..2 {
                for e2 in 0..2 {
                    let mut entry = Vec::new();
                    for &(ex, cx) in &x_pow[e1 + e2] {
                        for &u in &y_terms {
                            entry.push((an_index(u, ex), GaussianInt::from_int(sign * cx)));
                        }
                    }
                    table[an_index(s, e1)][an_index(t, e2)] = entry;
                }
            }
        }
    }
    let mut one = vec![ZERO; rank];
    one[an_index(0, 0)] = ONE;
    ModuleRing::from_sparse(Base::Z, table, Vec::new(), one)
}

fn reduce_poly(base: Base, p: &Poly) -> Result<Poly> {
    for (_, c) in p.terms() {
        base.reduce(c)?;
    }
    Ok(p.map_coeffs(|c| base.reduce(c).expect("checked above")))
}

fn reduce_vec(base: Base, v: &mut [GaussianInt]) {
    for c in v.iter_mut() {
        *c = base.reduce(*c).expect("coefficients already over the base");
    }
}

/// f mod g for monic g, as a vector of length deg g.
fn rem_monic(base: Base, f: &[GaussianInt], g: &[GaussianInt]) -> Vec<GaussianInt> {
    let d = g.len() - 1;
    let mut r = f.to_vec();
    reduce_vec(base, &mut r);
    while r.len() > d {
        let lead = r.pop().expect("nonempty");
        let shift = r.len() - d;
        for j in 0..d {
            r[shift + j] = r[shift + j] - lead * g[j];
        }
        reduce_vec(base, &mut r);
    }
    r.resize(d, ZERO);
    r
}

fn eliminated(base: Base, q: &EliminatedQuotient) -> Result<ModuleRing> {
    let names = &q.generators;
    let parse = |s: &String| Poly::parse(s, names).and_then(|p| reduce_poly(base, &p));
    let mut relations = q.relations.iter().map(parse).collect::<Result<Vec<_>>>()?;
    let mut nil = q.nilradical.iter().map(parse).collect::<Result<Vec<_>>>()?;
    let mut units = q.quotient_units.iter().map(parse).collect::<Result<Vec<_>>>()?;

    let keep = if names.len() == 2 {
        if q.substitutions.len() != 1 {
            return Err(Error::Elimination("two generators need exactly one substitution".into()));
        }
        let (var, expr) = q.substitutions.iter().next().expect("one substitution");
        let vi = names
            .iter()
            .position(|n| n == var)
            .ok_or_else(|| Error::Elimination(format!("substitution for unknown generator `{var}`")))?;
        let value = parse(expr)?;
        if value.uses_var(vi) {
            return Err(Error::Elimination(format!("substitution for `{var}` refers to `{var}`")));
        }
        let target = Poly::var(2, vi).sub(&value);
        let justified = relations.iter().any(|r| {
            let lead = r
                .terms()
                .find(|(e, _)| e[vi] == 1 && e[1 - vi] == 0)
                .map(|(_, c)| c)
                .unwrap_or(ZERO);
            base.is_unit(lead) && reduce_poly(base, &target.scale(lead)).map_or(false, |t| t == *r)
        });
        if !justified {
            return Err(Error::Elimination(format!(
                "no relation of the form unit*({var} - ({expr})) justifies the substitution"
            )));
        }
        for p in relations.iter_mut().chain(nil.iter_mut()).chain(units.iter_mut()) {
            *p = reduce_poly(base, &p.substitute(vi, &value))?;
        }
        1 - vi
    } else {
        if !q.substitutions.is_empty() {
            return Err(Error::Elimination("a single generator admits no substitution".into()));
        }
        0
    };

    let to_uni = |p: &Poly| p.univariate(keep);
    let rel_uni = relations.iter().map(to_uni).collect::<Result<Vec<_>>>()?;
    let reducer = rel_uni
        .iter()
        .filter(|f| f.len() >= 2 && base.is_unit(*f.last().expect("nonempty")))
        .min_by_key(|f| f.len())
        .ok_or_else(|| {
            Error::Elimination("no relation with unit leading coefficient, so the ring is not module-finite".into())
        })?;
    let inv = base.unit_inverse(*reducer.last().expect("nonempty")).expect("unit");
    let mut g: Vec<GaussianInt> = reducer.iter().map(|c| *c * inv).collect();
    reduce_vec(base, &mut g);
    let d = g.len() - 1;

    // x^k mod g for k < 2d - 1
    let mut powers: Vec<Vec<GaussianInt>> = Vec::with_capacity(2 * d);
    for k in 0..(2 * d).saturating_sub(1).max(1) {
        let mut mono = vec![ZERO; k + 1];
        mono[k] = ONE;
        powers.push(rem_monic(base, &mono, &g));
    }
    let mut table: Table = vec![vec![Vec::new(); d]; d];
    for a in 0..d {
        for b in 0..d {
            table[a][b] = powers[a + b].iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(l, c)| (l, *c)).collect();
        }
    }
    let mut rows = Vec::new();
    for f in &rel_uni {
        let mut cur = rem_monic(base, f, &g);
        for _ in 0..d {
            if cur.iter().any(|c| !c.is_zero()) {
                rows.push(cur.clone());
            }
            let mut shifted = vec![ZERO];
            shifted.extend(cur.iter().copied());
            cur = rem_monic(base, &shifted, &g);
        }
    }
    let mut one = vec![ZERO; d];
    one[0] = ONE;
    let nil_vecs = nil.iter().map(|p| to_uni(p).map(|f| rem_monic(base, &f, &g))).collect::<Result<Vec<_>>>()?;
    let unit_vecs = units.iter().map(|p| to_uni(p).map(|f| rem_monic(base, &f, &g))).collect::<Result<Vec<_>>>()?;
    let ring = ModuleRing::from_sparse(base, table, rows, one)?.with_nilradical(nil_vecs)?;
    if unit_vecs.is_empty() {
        Ok(ring)
    } else {
        ring.with_quotient_units(unit_vecs)
    }
}

/// Block-diagonal product. Bases must agree, except that Z/nZ components
/// are rewritten over Z when mixed with other bases.
fn direct_product(rings: &[ModuleRing]) -> Result<ModuleRing> {
    let first = rings[0].base();
    let base = if rings.iter().all(|r| r.base() == first) {
        first
    } else if rings.iter().all(|r| r.base() != Base::Zi) {
        Base::Z
    } else {
        return Err(Error::Unsupported("products mixing Z[i] with other bases have no common module form".into()));
    };
    let rank: usize = rings.iter().map(ModuleRing::rank).sum();
    let mut table: Table = vec![vec![Vec::new(); rank]; rank];
    let mut relations = Vec::new();
    let mut one = Vec::with_capacity(rank);
    let mut nil = Vec::new();
    let mut offset = 0;
    for r in rings {
        let k = r.rank();
        for a in 0..k {
            for b in 0..k {
                table[offset + a][offset + b] = r.mult_table()[a][b].iter().map(|&(l, c)| (offset + l, c)).collect();
            }
        }
        let embed = |v: &[GaussianInt]| {
            let mut row = vec![ZERO; rank];
            row[offset..offset + k].copy_from_slice(v);
            row
        };
        relations.extend(r.relations().iter().map(|v| embed(v)));
        if let (Base::Zmod(n), Base::Z) = (r.base(), base) {
            for j in 0..k {
                let mut row = vec![ZERO; rank];
                row[offset + j] = GaussianInt::from_int(n as i128);
                relations.push(row);
            }
        }
        nil.extend(r.nilradical_gens().iter().map(|v| embed(v)));
        one.extend_from_slice(r.one_vector());
        offset += k;
    }
    ModuleRing::from_sparse(base, table, relations, one)?.with_nilradical(nil)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nonsplit() -> RingPresentation {
        serde_json::from_str(
            r#"{"base":"Zi","family":"EliminatedQuotient","params":{
                "generators":["x","y"],
                "substitutions":{"y":"x^2 - 1"},
                "relations":["x^2 - y - 1","(1+i)*y","y^3"],
                "nilradical":["y"],
                "quotient_units":["1","-1","i","-i","x","-x","i*x","-i*x"]}}"#,
        )
        .unwrap()
    }

    #[test]
    fn an_zero_is_eisenstein() {
        let r = build_module_ring(&RingPresentation::an_ring(0)).unwrap();
        assert_eq!(r.rank(), 2);
        assert_eq!(r.free_rank(), 2);
        let x = r.basis_element(1);
        let lhs = r.mul(&x, &x);
        let rhs = r.neg(&r.add(&x, &r.one()));
        assert_eq!(lhs, rhs);
        assert_eq!(r.multiplicative_order(&x, 10), Some(3));
    }

    #[test]
    fn an_rank_and_torsion_free() {
        for n in 0..=3 {
            let r = build_module_ring(&RingPresentation::an_ring(n)).unwrap();
            assert_eq!(r.rank(), 1 << (n + 1));
            assert_eq!(r.free_rank(), 1 << (n + 1));
            assert_eq!(r.torsion_size(), Some(1));
        }
    }

    #[test]
    fn an_generators_satisfy_relations() {
        let r = build_module_ring(&RingPresentation::an_ring(2)).unwrap();
        for i in 0..2 {
            let y = r.basis_element(an_index(1 << i, 0));
            let lhs = r.add(&r.add(&r.mul(&y, &y), &y), &r.one());
            assert!(r.is_zero(&lhs));
        }
        let y1 = r.basis_element(an_index(1, 0));
        let y2 = r.basis_element(an_index(2, 0));
        assert_eq!(r.mul(&y1, &y2), r.basis_element(an_index(3, 0)));
    }

    #[test]
    fn nilpotent_extension_over_z() {
        let p = RingPresentation::nilpotent_extension(Base::Z, vec![GaussianInt::from_int(2)]);
        let r = build_module_ring(&p).unwrap();
        assert_eq!(r.rank(), 2);
        let x = r.basis_element(1);
        assert!(r.is_zero(&r.mul(&x, &x)));
        assert!(r.is_zero(&r.scale(2, &x)));
        assert!(!r.is_zero(&x));
        assert_eq!(r.torsion_size(), Some(2));
    }

    #[test]
    fn nilpotent_extension_torsion_matches_moduli() {
        let p = RingPresentation::nilpotent_extension(Base::Zi, vec![GaussianInt::from_int(3), GaussianInt::new(2, 1)]);
        let r = build_module_ring(&p).unwrap();
        assert_eq!(r.torsion_size(), Some(9 * 5));
        assert_eq!(r.quotient_unit_lifts().unwrap().len(), 4);
    }

    #[test]
    fn nonsplit_elimination() {
        let r = build_module_ring(&nonsplit()).unwrap();
        assert_eq!(r.rank(), 6);
        assert_eq!(r.base(), Base::Zi);
        // the relation (1+i)y kills y, xy, y^2, xy^2 up to (1+i)
        let (free, tors) = r.additive_structure().unwrap();
        assert_eq!(free, 4);
        assert_eq!(tors.to_string(), "C2^4");
    }

    #[test]
    fn elimination_failures() {
        let mut p = nonsplit();
        if let Family::EliminatedQuotient(q) = &mut p.family {
            q.relations[0] = "x^2 - y - 2".into();
        }
        assert!(matches!(build_module_ring(&p), Err(Error::Elimination(_))));
        let mut p = nonsplit();
        if let Family::EliminatedQuotient(q) = &mut p.family {
            q.relations = vec!["x^2 - y - 1".into(), "2*y^3".into()];
        }
        assert!(matches!(build_module_ring(&p), Err(Error::Elimination(_))));
    }

    #[test]
    fn finite_fields() {
        assert_eq!(first_irreducible_mod_p(3, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(first_irreducible_mod_p(2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(first_irreducible_mod_p(2, 3).unwrap(), vec![1, 1, 0, 1]);
        let f9 = build_module_ring(&finite_field(9).unwrap()).unwrap();
        assert_eq!(f9.size(), Some(9));
        let f8 = build_module_ring(&finite_field(8).unwrap()).unwrap();
        assert_eq!(f8.size(), Some(8));
        assert!(finite_field(12).is_err());
    }

    #[test]
    fn products() {
        let p = RingPresentation::product(vec![finite_field(9).unwrap(), finite_field(4).unwrap()]);
        let r = build_module_ring(&p).unwrap();
        assert_eq!(r.size(), Some(36));
        let mixed = RingPresentation::product(vec![zmod(4).unwrap(), RingPresentation::base_ring(Base::Z)]);
        let r = build_module_ring(&mixed).unwrap();
        assert_eq!(r.base(), Base::Z);
        assert_eq!(r.additive_structure().unwrap().0, 1);
        let bad = RingPresentation::product(vec![zmod(4).unwrap(), RingPresentation::base_ring(Base::Zi)]);
        assert!(matches!(build_module_ring(&bad), Err(Error::Unsupported(_))));
    }
}
