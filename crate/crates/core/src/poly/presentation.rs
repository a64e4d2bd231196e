use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::gaussian::GaussianInt;

/// Coefficient ring of a presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base {
    Z,
    Zi,
    /// Z/nZ with n >= 2.
    Zmod(u64),
}

impl Base {
    /// Whether `c` is a unit of the base ring. Coefficients of Z and Z/n must be real.
    pub fn is_unit(&self, c: GaussianInt) -> bool {
        match *self {
            Base::Z => c.im == 0 && c.re.abs() == 1,
            Base::Zi => c.is_unit(),
            Base::Zmod(n) => c.im == 0 && gcd(c.re.rem_euclid(n as i128) as u128, n as u128) == 1,
        }
    }

    /// Inverse of a unit of the base ring.
    pub fn unit_inverse(&self, c: GaussianInt) -> Option<GaussianInt> {
        if !self.is_unit(c) {
            return None;
        }
        match *self {
            Base::Z => Some(c),
            Base::Zi => Some(c.conj()),
            Base::Zmod(n) => {
                let n = n as i128;
                let a = c.re.rem_euclid(n);
                (1..n).find(|b| a * b % n == 1).map(GaussianInt::from_int)
            }
        }
    }

    /// Canonical representative of a coefficient; rejects imaginary parts outside Z[i].
    pub fn reduce(&self, c: GaussianInt) -> Result<GaussianInt> {
        match *self {
            Base::Zi => Ok(c),
            _ if c.im != 0 => Err(Error::InvalidArgument(format!("coefficient {c} is not an integer over {self}"))),
            Base::Z => Ok(c),
            Base::Zmod(n) => Ok(GaussianInt::from_int(c.re.rem_euclid(n as i128))),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Base::Zmod(_))
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Z => f.write_str("Z"),
            Base::Zi => f.write_str("Zi"),
            Base::Zmod(n) => write!(f, "Zmod:{n}"),
        }
    }
}

impl FromStr for Base {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" => Ok(Base::Z),
            "Zi" | "Z[i]" => Ok(Base::Zi),
            other => {
                let n = other
                    .strip_prefix("Zmod:")
                    .and_then(|n| n.trim().parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown base `{other}`")))?;
                if n < 2 {
                    return Err(Error::InvalidArgument(format!("Zmod:{n} needs n >= 2")));
                }
                Ok(Base::Zmod(n))
            }
        }
    }
}

impl Serialize for Base {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Base {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Quotient of a polynomial ring in at most two generators, given by
/// relation strings. A two-generator ring needs one substitution
/// `var := expr` backed by a relation of the form `unit * (var - expr)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminatedQuotient {
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub substitutions: BTreeMap<String, String>,
    pub relations: Vec<String>,
    /// Elements generating a nil ideal, used by the characteristic-zero oracle.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nilradical: Vec<String>,
    /// Lifts of the units of the quotient by that nil ideal.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quotient_units: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
pub enum Family {
    DirectProduct { components: Vec<RingPresentation> },
    /// base[x_1..x_n]/(a_i x_i, x_i x_j).
    NilpotentExtension { moduli: Vec<GaussianInt> },
    AnRing { n: u32 },
    EliminatedQuotient(EliminatedQuotient),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingPresentation {
    pub base: Base,
    #[serde(flatten)]
    pub family: Family,
}

impl RingPresentation {
    pub fn nilpotent_extension(base: Base, moduli: Vec<GaussianInt>) -> Self {
        RingPresentation { base, family: Family::NilpotentExtension { moduli } }
    }

    pub fn an_ring(n: u32) -> Self {
        RingPresentation { base: Base::Z, family: Family::AnRing { n } }
    }

    /// Product of the components; a single component is returned unchanged.
    pub fn product(mut components: Vec<RingPresentation>) -> Self {
        if components.len() == 1 {
            return components.pop().expect("one component");
        }
        RingPresentation { base: Base::Z, family: Family::DirectProduct { components } }
    }

    /// The base ring itself.
    pub fn base_ring(base: Base) -> Self {
        Self::nilpotent_extension(base, Vec::new())
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::DirectProduct { .. } => "DirectProduct",
            Family::NilpotentExtension { .. } => "NilpotentExtension",
            Family::AnRing { .. } => "AnRing",
            Family::EliminatedQuotient(_) => "EliminatedQuotient",
        }
    }

    /// True when the ring is finite, i.e. every leaf has base Z/nZ.
    pub fn is_finite(&self) -> bool {
        match &self.family {
            Family::DirectProduct { components } => components.iter().all(RingPresentation::is_finite),
            _ => self.base.is_finite(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.family {
            Family::DirectProduct { components } => {
                if self.base != Base::Z {
                    return Err(Error::InvalidArgument("a direct product is presented over base Z".into()));
                }
                if components.is_empty() {
                    return Err(Error::InvalidArgument("a direct product needs at least one component".into()));
                }
                components.iter().try_for_each(RingPresentation::validate)
            }
            Family::NilpotentExtension { moduli } => {
                for a in moduli {
                    if a.is_zero() {
                        return Err(Error::InvalidArgument("moduli must be nonzero".into()));
                    }
                    self.base.reduce(*a)?;
                }
                Ok(())
            }
            Family::AnRing { .. } => {
                if self.base != Base::Z {
                    return Err(Error::InvalidArgument("A_n is presented over Z".into()));
                }
                Ok(())
            }
            Family::EliminatedQuotient(q) => {
                if q.generators.is_empty() || q.generators.len() > 2 {
                    return Err(Error::Unsupported(format!(
                        "eliminated quotients take 1 or 2 generators, got {}",
                        q.generators.len()
                    )));
                }
                let mut seen = q.generators.clone();
                seen.sort();
                seen.dedup();
                if seen.len() != q.generators.len() {
                    return Err(Error::InvalidArgument("repeated generator name".into()));
                }
                if q.relations.is_empty() {
                    return Err(Error::InvalidArgument("an eliminated quotient needs relations".into()));
                }
                Ok(())
            }
        }
    }
}
