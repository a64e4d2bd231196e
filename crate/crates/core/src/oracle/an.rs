//! Unit group of A_n = Z[x, y_1..y_n]/(x^2+x+1, y_i^2+y_i+1).
//!
//! Upper bound on the 3-part: A_n embeds in B = Z[w]^{2^n} (w a primitive
//! cube root of unity) with component T sending y_i to w or w^2 according to
//! i in T. Reducing mod 3 gives an F_3-subspace V of B/3B; units of 3-power
//! order land in the affine set W where every first coordinate is 1, so
//! their number is at most |V & W|. Upper bound on the 2-part: the map to
//! F_3 sending x and every y_i to 1 kills the ideals I_S + I_T but not 2,
//! so any unit squaring to 1 is +1 or -1. Lower bounds come from -1 and
//! the set of monomials x^e_0 y_1^e_1 ... y_n^e_n with exponents below 3.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{structure_of, Elem, UnitGroupReport};
use crate::abelian::AbelianGroup;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::poly::{an_index, build_module_ring, RingPresentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnVerification {
    pub n: u32,
    pub report: UnitGroupReport,
    /// dim_F3 of the image V of A_n in B/3B.
    pub span_dim: usize,
    /// |V & W|, the upper bound on the 3-part.
    pub three_part_upper: u128,
    /// Distinct monomial units found, the lower bound on the 3-part.
    pub three_part_lower: u128,
    /// Upper bound on the 2-part from the evaluation argument.
    pub two_part_upper: u128,
}

/// Element a + b w of Z[w], w^2 = -w - 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Eisenstein(i64, i64);

impl Eisenstein {
    const ONE: Eisenstein = Eisenstein(1, 0);
    const W: Eisenstein = Eisenstein(0, 1);
    const W2: Eisenstein = Eisenstein(-1, -1);

    fn mul(self, o: Eisenstein) -> Eisenstein {
        let (a, b, c, d) = (self.0, self.1, o.0, o.1);
        Eisenstein(a * c - b * d, a * d + b * c - b * d)
    }

    /// Coordinates mod 3 in the basis {1, w - 1}.
    fn mod3(self) -> [u8; 2] {
        [(self.0 + self.1).rem_euclid(3) as u8, self.1.rem_euclid(3) as u8]
    }
}

/// Image of the basis element x^e y_S of A_n in B/3B, as 2^{n+1}
/// coordinates over F_3 (component T occupies positions 2T, 2T+1).
pub fn psi_image(n: u32, s: usize, e: usize) -> Vec<u8> {
    let subsets = 1usize << n;
    let mut out = Vec::with_capacity(2 * subsets);
    for t in 0..subsets {
        let mut z = if e == 1 { Eisenstein::W } else { Eisenstein::ONE };
        for i in 0..n as usize {
            if s >> i & 1 == 1 {
                z = z.mul(if t >> i & 1 == 1 { Eisenstein::W2 } else { Eisenstein::W });
            }
        }
        out.extend(z.mod3());
    }
    out
}

/// Row echelon form over F_3; returns the nonzero rows.
fn row_reduce(mut rows: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        // 1 and 2 are their own inverses mod 3
        let inv = rows[rank][c];
        for x in rows[rank].iter_mut() {
            *x = *x * inv % 3;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c];
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] + 3 * 3 - f * rows[rank][k] % 3) % 3;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

fn rank_f3(rows: Vec<Vec<u8>>) -> usize {
    row_reduce(rows).len()
}

/// Number of v in span(basis) with v[2T] = 1 for every component T.
fn affine_count(basis: &[Vec<u8>], subsets: usize) -> u128 {
    let d = basis.len();
    // unknowns: coefficients on the basis; one equation per component
    let coeff: Vec<Vec<u8>> = (0..subsets).map(|t| basis.iter().map(|b| b[2 * t]).collect()).collect();
    let augmented: Vec<Vec<u8>> = coeff.iter().map(|row| row.iter().copied().chain([1]).collect()).collect();
    let r = rank_f3(coeff);
    if rank_f3(augmented) != r {
        return 0;
    }
    3u128.pow((d - r) as u32)
}

/// Evaluation at x = y_i = 1 over F_3. Every monomial maps to 1, so a
/// polynomial maps to the sum of its coefficients.
fn evaluation_separates_two() -> bool {
    let ev = |coeffs: &[i64]| coeffs.iter().sum::<i64>().rem_euclid(3);
    // generators of I_S + I_T: x^2 + x + 1, y_i - x, y_i - x^2, and 3
    let kills = [ev(&[1, 1, 1]), ev(&[1, -1]), ev(&[1, -1]), ev(&[3])].iter().all(|&v| v == 0);
    kills && ev(&[2]) != 0
}

pub fn an_verify(n: u32, config: &Config) -> Result<AnVerification> {
    if n > config.an_bound {
        return Err(Error::BoundExceeded {
            what: "A_n index".into(),
            needed: n as u128,
            bound: config.an_bound as u128,
        });
    }
    let ring = build_module_ring(&RingPresentation::an_ring(n))?;
    let subsets = 1usize << n;

    let images: Vec<Vec<u8>> = (0..subsets).flat_map(|s| (0..2).map(move |e| psi_image(n, s, e))).collect();
    let basis = row_reduce(images);
    let span_dim = basis.len();
    let three_part_upper = affine_count(&basis, subsets);

    if !evaluation_separates_two() {
        return Err(Error::Verification("evaluation map does not separate 2 from I_S + I_T".into()));
    }
    let minus_one = ring.neg(&ring.one());
    if minus_one == ring.one() || ring.mul(&minus_one, &minus_one) != ring.one() {
        return Err(Error::Verification("-1 is not an element of order 2".into()));
    }
    let two_part_upper = 2;

    let gens: Vec<Elem> = std::iter::once(ring.basis_element(an_index(0, 1)))
        .chain((0..n as usize).map(|i| ring.basis_element(an_index(1 << i, 0))))
        .collect();
    let mut monomials: Vec<Elem> = vec![ring.one()];
    for g in &gens {
        let g2 = ring.mul(g, g);
        let mut next = Vec::with_capacity(monomials.len() * 3);
        for m in &monomials {
            next.push(m.clone());
            next.push(ring.mul(m, g));
            next.push(ring.mul(m, &g2));
        }
        monomials = next;
    }
    let distinct: HashSet<&Elem> = monomials.iter().collect();
    let three_part_lower = distinct.len() as u128;
    for m in &monomials {
        if ring.pow(m, 3) != ring.one() {
            return Err(Error::Verification("a monomial unit does not have order dividing 3".into()));
        }
    }
    if three_part_lower != three_part_upper {
        return Err(Error::Verification(format!(
            "3-part bounds do not meet: lower {three_part_lower}, upper {three_part_upper}"
        )));
    }

    let mut orders: BTreeMap<u128, u128> = BTreeMap::new();
    let mut all: HashSet<Elem> = HashSet::new();
    for m in &monomials {
        for u in [m.clone(), ring.neg(m)] {
            let k = ring
                .multiplicative_order(&u, 6)
                .ok_or_else(|| Error::Verification("unit of unexpected order".into()))?;
            if all.insert(u) {
                *orders.entry(k as u128).or_insert(0) += 1;
            }
        }
    }
    let unit_count = all.len() as u128;
    if unit_count != two_part_upper * three_part_upper {
        return Err(Error::Verification("units +-U are not distinct".into()));
    }
    let structure: AbelianGroup = structure_of(&orders)?;
    Ok(AnVerification {
        n,
        report: UnitGroupReport {
            unit_count,
            structure,
            nilradical_size: 1,
            quotient_unit_count: unit_count,
            exact_sequence_ok: true,
        },
        span_dim,
        three_part_upper,
        three_part_lower,
        two_part_upper,
    })
}
