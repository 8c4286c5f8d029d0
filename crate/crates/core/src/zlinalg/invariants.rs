use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::matrix::{Int, IntMatrix};
use super::normal_form::invariant_factors;
use crate::error::{Error, Result};

/// A finitely generated abelian group `Z^r + Z/d_1 + ... + Z/d_t` with
/// `d_1 | d_2 | ... | d_t` and every `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AbelianGroupInvariants {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
}

impl AbelianGroupInvariants {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroupInvariants { free_rank: rank, torsion: Vec::new() }
    }

    /// Builds the canonical form from an arbitrary list of cyclic orders,
    /// where `0` stands for an infinite cyclic factor.
    pub fn from_cyclic_orders(orders: &[Int]) -> Self {
        let n = orders.len();
        let m = IntMatrix::from_rows(
            n,
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { orders[i].abs() } else { Int::zero() }).collect())
                .collect(),
        );
        Self::from_invariant_factors(n, &invariant_factors(&m))
    }

    /// Invariants of `Z^ambient / L` where `L` has the given nonzero invariant factors.
    pub fn from_invariant_factors(ambient: usize, factors: &[Int]) -> Self {
        AbelianGroupInvariants {
            free_rank: ambient - factors.len(),
            torsion: factors.iter().filter(|d| !d.is_one()).cloned().collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> Int {
        self.torsion.iter().fold(Int::one(), |a, b| a * b)
    }

    /// Order of the group, `None` if infinite.
    pub fn order(&self) -> Option<Int> {
        (self.free_rank == 0).then(|| self.torsion_order())
    }

    /// Direct sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut orders: Vec<Int> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        orders.extend(std::iter::repeat_n(Int::zero(), self.free_rank + other.free_rank));
        Self::from_cyclic_orders(&orders)
    }
}

impl fmt::Display for AbelianGroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl FromStr for AbelianGroupInvariants {
    type Err = Error;

    /// Accepts the `Display` syntax; factors may appear in any order and need
    /// not be canonical (`"Z/2 + Z/3"` parses to `Z/6`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse { input: s.to_string(), position: 0, message: msg.to_string() };
        let t = s.trim();
        if t == "0" || t == "1" {
            return Ok(Self::trivial());
        }
        let mut orders = Vec::new();
        for part in t.split('+') {
            let p = part.trim().replace('ℤ', "Z");
            if p == "Z" {
                orders.push(Int::zero());
            } else if let Some(r) = p.strip_prefix("Z^") {
                let r: usize = r.trim().parse().map_err(|_| bad("bad free rank"))?;
                orders.extend(std::iter::repeat_n(Int::zero(), r));
            } else if let Some(d) = p.strip_prefix("Z/") {
                let d: Int = d.trim().parse().map_err(|_| bad("bad cyclic order"))?;
                if !d.is_positive() {
                    return Err(bad("cyclic order must be positive"));
                }
                orders.push(d);
            } else if p == "0" {
                continue;
            } else {
                return Err(bad("expected Z, Z^r or Z/d"));
            }
        }
        Ok(Self::from_cyclic_orders(&orders))
    }
}

impl Serialize for AbelianGroupInvariants {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let torsion: Vec<serde_json::Value> = self
            .torsion
            .iter()
            .map(|d| match d.to_u64() {
                Some(x) => serde_json::Value::from(x),
                None => serde_json::Value::from(d.to_string()),
            })
            .collect();
        let mut st = serializer.serialize_struct("AbelianGroupInvariants", 3)?;
        st.serialize_field("free_rank", &self.free_rank)?;
        st.serialize_field("torsion", &torsion)?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}

/// Invariants of `Z^rows / (column lattice of M)`.
pub fn cokernel_invariants(m: &IntMatrix) -> AbelianGroupInvariants {
    AbelianGroupInvariants::from_invariant_factors(m.nrows(), &invariant_factors(m))
}
