//! A commutative ring given as a finitely generated module over Z, Z[i] or
//! Z/nZ together with structure constants.
//!
//! Internally everything is rewritten over Z: a Z[i]-basis e_j becomes the
//! Z-basis {e_j, i e_j}, and Z/nZ adds the relations n e_j. The Smith form
//! `U R V = D` of the relation lattice gives coordinates `y = x V` in which
//! the quotient is a product of cyclic groups; coordinates with d = 1 are
//! dropped, torsion coordinates are reduced mod d, free ones are kept as is.
//! Elements are vectors in these reduced coordinates, so equality of
//! vectors is equality in the ring.

use crate::abelian::AbelianGroup;
use crate::error::{Error, Result};
use crate::gaussian::{smith_normal_form, GaussianInt, Matrix, I, ZERO};
use crate::poly::Base;

/// Element of a [`ModuleRing`] in reduced coordinates.
pub type Elem = Vec<i128>;

type Sparse = Vec<(usize, i128)>;

/// Exhaustive associativity checks up to this reduced dimension.
const EXHAUSTIVE_CHECK_DIM: usize = 64;
const RANDOM_TRIPLES: usize = 100_000;

#[derive(Clone, Debug)]
pub struct ModuleRing {
    base: Base,
    rank: usize,
    mult_table: Vec<Vec<Vec<(usize, GaussianInt)>>>,
    relations: Vec<Vec<GaussianInt>>,
    one_vector: Vec<GaussianInt>,
    nilradical_gens: Vec<Vec<GaussianInt>>,
    quotient_unit_lifts: Option<Vec<Vec<GaussianInt>>>,
    red: Reduced,
}

#[derive(Clone, Debug)]
struct Reduced {
    /// Z-rank of the ambient lattice.
    z_rank: usize,
    /// Per reduced coordinate: 0 for a free coordinate, else its order d >= 2.
    moduli: Vec<i128>,
    /// Row p of V restricted to kept columns, sparse in the reduced index.
    v_rows: Vec<Sparse>,
    /// Reduced basis vector a lifted to Z coordinates (row of V^{-1}).
    lifts: Vec<Sparse>,
    /// Z-structure constants: e_p e_q = sum c_l e_l.
    z_table: Vec<Vec<Sparse>>,
    /// Reduced structure constants.
    table: Vec<Vec<Sparse>>,
    one: Elem,
    /// Relation lattice over Z, kept for the ideal check.
    z_relations: Matrix<i128>,
}

impl ModuleRing {
    /// Builds the ring from dense structure constants over the base:
    /// `mult_table[i][j][l]` is the coefficient of e_l in e_i e_j.
    pub fn new(
        base: Base,
        mult_table: Vec<Vec<Vec<GaussianInt>>>,
        relations: Vec<Vec<GaussianInt>>,
        one_vector: Vec<GaussianInt>,
    ) -> Result<Self> {
        let sparse: Vec<Vec<Vec<(usize, GaussianInt)>>> = mult_table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(l, c)| (l, *c)).collect())
                    .collect()
            })
            .collect();
        Self::from_sparse(base, sparse, relations, one_vector)
    }

    /// As [`ModuleRing::new`] with `mult_table[i][j]` listing nonzero
    /// `(l, c_ij^l)` pairs.
    pub fn from_sparse(
        base: Base,
        mult_table: Vec<Vec<Vec<(usize, GaussianInt)>>>,
        relations: Vec<Vec<GaussianInt>>,
        one_vector: Vec<GaussianInt>,
    ) -> Result<Self> {
        let rank = one_vector.len();
        if mult_table.len() != rank || mult_table.iter().any(|r| r.len() != rank) {
            return Err(Error::MalformedRing(format!("structure constants must be {rank} x {rank}")));
        }
        if relations.iter().any(|r| r.len() != rank) {
            return Err(Error::MalformedRing("relation rows must have length rank".into()));
        }
        if mult_table.iter().flatten().flatten().any(|(l, _)| *l >= rank) {
            return Err(Error::MalformedRing("structure constant index out of range".into()));
        }
        let red = Reduced::new(base, rank, &mult_table, &relations, &one_vector)?;
        let ring = ModuleRing {
            base,
            rank,
            mult_table,
            relations,
            one_vector,
            nilradical_gens: Vec::new(),
            quotient_unit_lifts: None,
            red,
        };
        ring.check_axioms()?;
        Ok(ring)
    }

    /// Designates generators of a nil ideal (base coordinates).
    pub fn with_nilradical(mut self, gens: Vec<Vec<GaussianInt>>) -> Result<Self> {
        if gens.iter().any(|g| g.len() != self.rank) {
            return Err(Error::MalformedRing("nilradical generator has wrong length".into()));
        }
        self.nilradical_gens = gens;
        Ok(self)
    }

    /// Lifts of the units of the quotient by the designated nil ideal.
    pub fn with_quotient_units(mut self, lifts: Vec<Vec<GaussianInt>>) -> Result<Self> {
        if lifts.iter().any(|g| g.len() != self.rank) {
            return Err(Error::MalformedRing("quotient unit lift has wrong length".into()));
        }
        self.quotient_unit_lifts = Some(lifts);
        Ok(self)
    }

    pub fn base(&self) -> Base {
        self.base
    }

    /// Number of base-module generators.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn mult_table(&self) -> &[Vec<Vec<(usize, GaussianInt)>>] {
        &self.mult_table
    }

    pub fn relations(&self) -> &[Vec<GaussianInt>] {
        &self.relations
    }

    pub fn one_vector(&self) -> &[GaussianInt] {
        &self.one_vector
    }

    pub fn nilradical_gens(&self) -> &[Vec<GaussianInt>] {
        &self.nilradical_gens
    }

    pub fn quotient_unit_lifts(&self) -> Option<&[Vec<GaussianInt>]> {
        self.quotient_unit_lifts.as_deref()
    }

    /// Number of reduced coordinates.
    pub fn dim(&self) -> usize {
        self.red.moduli.len()
    }

    /// Order of each reduced coordinate, 0 for free coordinates.
    pub fn moduli(&self) -> &[i128] {
        &self.red.moduli
    }

    pub fn free_rank(&self) -> usize {
        self.red.moduli.iter().filter(|&&m| m == 0).count()
    }

    /// Additive group as (free rank, torsion subgroup).
    pub fn additive_structure(&self) -> Result<(usize, AbelianGroup)> {
        let orders: Vec<i64> = self
            .red
            .moduli
            .iter()
            .filter(|&&m| m > 0)
            .map(|&m| i64::try_from(m).map_err(|_| Error::Overflow("additive invariant")))
            .collect::<Result<_>>()?;
        Ok((self.free_rank(), AbelianGroup::normalize(&orders)?))
    }

    /// |torsion part| if it fits in u128.
    pub fn torsion_size(&self) -> Option<u128> {
        self.red.moduli.iter().filter(|&&m| m > 0).try_fold(1u128, |acc, &m| acc.checked_mul(m as u128))
    }

    /// |R| for a finite ring.
    pub fn size(&self) -> Option<u128> {
        if self.free_rank() > 0 {
            None
        } else {
            self.torsion_size()
        }
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.dim()]
    }

    pub fn one(&self) -> Elem {
        self.red.one.clone()
    }

    pub fn is_zero(&self, x: &Elem) -> bool {
        x.iter().all(|&c| c == 0)
    }

    pub fn is_torsion(&self, x: &Elem) -> bool {
        x.iter().zip(&self.red.moduli).all(|(&c, &m)| m > 0 || c == 0)
    }

    fn reduce(&self, x: &mut Elem) {
        for (c, &m) in x.iter_mut().zip(&self.red.moduli) {
            if m > 0 {
                *c = c.rem_euclid(m);
            }
        }
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        let mut z: Elem = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.reduce(&mut z);
        z
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        let mut z: Elem = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.reduce(&mut z);
        z
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        let mut z: Elem = x.iter().map(|a| -a).collect();
        self.reduce(&mut z);
        z
    }

    pub fn scale(&self, k: i128, x: &Elem) -> Elem {
        let mut z: Elem = x.iter().map(|a| a * k).collect();
        self.reduce(&mut z);
        z
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        let mut z = vec![0i128; self.dim()];
        let ys: Vec<(usize, i128)> = y.iter().copied().enumerate().filter(|(_, c)| *c != 0).collect();
        for (a, &xa) in x.iter().enumerate() {
            if xa == 0 {
                continue;
            }
            for &(b, yb) in &ys {
                let k = xa * yb;
                for &(l, c) in &self.red.table[a][b] {
                    z[l] += k * c;
                }
            }
        }
        self.reduce(&mut z);
        z
    }

    pub fn pow(&self, x: &Elem, mut e: u64) -> Elem {
        let mut acc = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Multiplicative order of `x` if x^k = 1 for some k <= limit.
    pub fn multiplicative_order(&self, x: &Elem, limit: u64) -> Option<u64> {
        let one = self.one();
        let mut p = x.clone();
        for k in 1..=limit {
            if p == one {
                return Some(k);
            }
            p = self.mul(&p, x);
        }
        None
    }

    /// Image of a vector in base coordinates.
    pub fn from_base(&self, v: &[GaussianInt]) -> Result<Elem> {
        if v.len() != self.rank {
            return Err(Error::InvalidArgument(format!("expected {} coordinates, got {}", self.rank, v.len())));
        }
        let z = to_z_coords(self.base, v)?;
        Ok(self.red.to_reduced(&z))
    }

    /// Image of the base-module generator e_j.
    pub fn basis_element(&self, j: usize) -> Elem {
        let mut v = vec![ZERO; self.rank];
        v[j] = GaussianInt::from_int(1);
        self.from_base(&v).expect("valid basis index")
    }

    /// A representative of `x` in base coordinates.
    pub fn to_base(&self, x: &Elem) -> Vec<GaussianInt> {
        let mut z = vec![0i128; self.red.z_rank];
        for (a, &xa) in x.iter().enumerate() {
            for &(p, c) in &self.red.lifts[a] {
                z[p] += xa * c;
            }
        }
        match self.base {
            Base::Zi => (0..self.rank).map(|j| GaussianInt::new(z[2 * j], z[2 * j + 1])).collect(),
            _ => z.into_iter().map(GaussianInt::from_int).collect(),
        }
    }

    /// Mixed-radix index of a torsion element (free coordinates must vanish).
    pub fn index_of(&self, x: &Elem) -> u128 {
        let mut idx = 0u128;
        for (&c, &m) in x.iter().zip(&self.red.moduli).rev() {
            if m > 0 {
                idx = idx * m as u128 + c as u128;
            }
        }
        idx
    }

    /// Inverse of [`ModuleRing::index_of`].
    pub fn torsion_element(&self, mut idx: u128) -> Elem {
        let mut x = self.zero();
        for (c, &m) in x.iter_mut().zip(&self.red.moduli) {
            if m > 0 {
                *c = (idx % m as u128) as i128;
                idx /= m as u128;
            }
        }
        x
    }

    /// The same ring with extra relations, i.e. the quotient by the
    /// additive subgroup they span; designated data is dropped.
    pub fn quotient(&self, extra: &[Vec<GaussianInt>]) -> Result<ModuleRing> {
        let mut relations = self.relations.clone();
        relations.extend(extra.iter().cloned());
        Self::from_sparse(self.base, self.mult_table.clone(), relations, self.one_vector.clone())
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.dim();
        let one = self.one();
        let basis: Vec<Elem> = (0..n).map(|a| unit_vector(n, a)).collect();
        for (a, e) in basis.iter().enumerate() {
            if self.mul(&one, e) != *e {
                return Err(Error::MalformedRing(format!("identity fails on reduced basis element {a}")));
            }
        }
        let assoc = |a: usize, b: usize, c: usize| {
            let left = self.mul(&self.mul(&basis[a], &basis[b]), &basis[c]);
            let right = self.mul(&basis[a], &self.mul(&basis[b], &basis[c]));
            if left == right {
                Ok(())
            } else {
                Err(Error::MalformedRing(format!("multiplication not associative at ({a}, {b}, {c})")))
            }
        };
        if n <= EXHAUSTIVE_CHECK_DIM {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        assoc(a, b, c)?;
                    }
                }
            }
        } else {
            let mut state = 0x9E37_79B9_7F4A_7C15u64;
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % n as u64) as usize
            };
            for _ in 0..RANDOM_TRIPLES {
                let (a, b, c) = (next(), next(), next());
                assoc(a, b, c)?;
            }
        }
        self.red.check_ideal()
    }
}

fn unit_vector(n: usize, a: usize) -> Elem {
    let mut e = vec![0; n];
    e[a] = 1;
    e
}

fn to_z_coords(base: Base, v: &[GaussianInt]) -> Result<Vec<i128>> {
    match base {
        Base::Zi => Ok(v.iter().flat_map(|c| [c.re, c.im]).collect()),
        _ => v
            .iter()
            .map(|c| {
                if c.im != 0 {
                    Err(Error::MalformedRing(format!("coefficient {c} is not an integer over {base}")))
                } else {
                    Ok(c.re)
                }
            })
            .collect(),
    }
}

impl Reduced {
    fn new(
        base: Base,
        rank: usize,
        table: &[Vec<Vec<(usize, GaussianInt)>>],
        relations: &[Vec<GaussianInt>],
        one: &[GaussianInt],
    ) -> Result<Self> {
        let z_rank = if base == Base::Zi { 2 * rank } else { rank };
        let mut z_table = vec![vec![Sparse::new(); z_rank]; z_rank];
        match base {
            Base::Zi => {
                let units = [GaussianInt::from_int(1), I];
                for a in 0..rank {
                    for b in 0..rank {
                        for s in 0..2 {
                            for t in 0..2 {
                                let u = units[s] * units[t];
                                let entry = &mut z_table[2 * a + s][2 * b + t];
                                for &(l, c) in &table[a][b] {
                                    let g = u * c;
                                    if g.re != 0 {
                                        entry.push((2 * l, g.re));
                                    }
                                    if g.im != 0 {
                                        entry.push((2 * l + 1, g.im));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            _ => {
                for a in 0..rank {
                    for b in 0..rank {
                        for &(l, c) in &table[a][b] {
                            if c.im != 0 {
                                return Err(Error::MalformedRing(format!("structure constant {c} over {base}")));
                            }
                            z_table[a][b].push((l, c.re));
                        }
                    }
                }
            }
        }

        let mut z_rel: Matrix<i128> = Vec::new();
        for r in relations {
            z_rel.push(to_z_coords(base, r)?);
            if base == Base::Zi {
                let turned: Vec<GaussianInt> = r.iter().map(|c| *c * I).collect();
                z_rel.push(to_z_coords(base, &turned)?);
            }
        }
        if let Base::Zmod(n) = base {
            for j in 0..rank {
                let mut row = vec![0i128; rank];
                row[j] = n as i128;
                z_rel.push(row);
            }
        }
        z_rel.retain(|r| r.iter().any(|&c| c != 0));
        if z_rel.is_empty() {
            // no relations: keep the identity change of basis
            z_rel.push(vec![0; z_rank]);
        }
        let snf = smith_normal_form(&z_rel);
        let diag = snf.diagonal();
        let kept: Vec<usize> = (0..z_rank).filter(|&j| diag.get(j).copied().unwrap_or(0) != 1).collect();
        let moduli: Vec<i128> = kept.iter().map(|&j| diag.get(j).copied().unwrap_or(0)).collect();
        let mut position = vec![usize::MAX; z_rank];
        for (a, &j) in kept.iter().enumerate() {
            position[j] = a;
        }
        let v_rows: Vec<Sparse> = snf
            .v
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, c)| **c != 0 && position[*j] != usize::MAX)
                    .map(|(j, c)| (position[j], *c))
                    .collect()
            })
            .collect();
        let lifts: Vec<Sparse> = kept
            .iter()
            .map(|&j| snf.v_inv[j].iter().enumerate().filter(|(_, c)| **c != 0).map(|(p, c)| (p, *c)).collect())
            .collect();
        let mut red = Reduced {
            z_rank,
            moduli,
            v_rows,
            lifts,
            z_table,
            table: Vec::new(),
            one: Vec::new(),
            z_relations: Vec::new(),
        };
        red.one = red.to_reduced(&to_z_coords(base, one)?);
        let n = red.moduli.len();
        let mut reduced_table = vec![vec![Sparse::new(); n]; n];
        for a in 0..n {
            for b in 0..=a {
                let prod = red.z_mul(&red.lifts[a], &red.lifts[b]);
                let y = red.to_reduced(&prod);
                let sparse: Sparse = y.into_iter().enumerate().filter(|(_, c)| *c != 0).collect();
                reduced_table[a][b] = sparse.clone();
                reduced_table[b][a] = sparse;
            }
        }
        // the symmetric fill hides non-commutativity; compare against the raw products
        for a in 0..n {
            for b in 0..a {
                let other = red.to_reduced(&red.z_mul(&red.lifts[b], &red.lifts[a]));
                let sparse: Sparse = other.into_iter().enumerate().filter(|(_, c)| *c != 0).collect();
                if sparse != reduced_table[a][b] {
                    return Err(Error::MalformedRing(format!("multiplication not commutative at ({a}, {b})")));
                }
            }
        }
        red.table = reduced_table;
        red.z_relations = z_rel;
        Ok(red)
    }
}

impl Reduced {
    fn z_mul(&self, x: &Sparse, y: &Sparse) -> Vec<i128> {
        let mut z = vec![0i128; self.z_rank];
        for &(p, xp) in x {
            for &(q, yq) in y {
                let k = xp * yq;
                for &(l, c) in &self.z_table[p][q] {
                    z[l] += k * c;
                }
            }
        }
        z
    }

    fn to_reduced(&self, x: &[i128]) -> Elem {
        let mut y = vec![0i128; self.moduli.len()];
        for (p, &xp) in x.iter().enumerate() {
            if xp == 0 {
                continue;
            }
            for &(a, v) in &self.v_rows[p] {
                y[a] += xp * v;
            }
        }
        for (c, &m) in y.iter_mut().zip(&self.moduli) {
            if m > 0 {
                *c = c.rem_euclid(m);
            }
        }
        y
    }

    /// The relation lattice must be an ideal: relation times generator stays in it.
    fn check_ideal(&self) -> Result<()> {
        for (k, row) in self.z_relations.iter().enumerate() {
            let r: Sparse = row.iter().enumerate().filter(|(_, c)| **c != 0).map(|(p, c)| (p, *c)).collect();
            for p in 0..self.z_rank {
                let prod = self.z_mul(&r, &vec![(p, 1)]);
                if self.to_reduced(&prod).iter().any(|&c| c != 0) {
                    return Err(Error::MalformedRing(format!(
                        "relations do not form an ideal (relation {k} times generator {p})"
                    )));
                }
            }
        }
        Ok(())
    }
}
