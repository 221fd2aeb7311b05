// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Truth table of a Boolean function of up to six inputs.
///
/// Bit `x` holds the output on input row `x`, where `x1` is the most
/// significant input bit. Strings list rows in the same order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruthTable {
    bits: u64,
    inputs: usize,
}

impl TruthTable {
    pub fn from_bits(bits: u64, inputs: usize) -> Self {
        assert!(inputs <= 6);
        TruthTable {
            bits: bits & Self::mask_for(inputs),
            inputs,
        }
    }

    pub fn from_fn(inputs: usize, f: impl Fn(usize) -> bool) -> Self {
        let bits = (0..1usize << inputs)
            .filter(|&x| f(x))
            .fold(0u64, |acc, x| acc | 1 << x);
        TruthTable::from_bits(bits, inputs)
    }

    pub fn constant(inputs: usize, value: bool) -> Self {
        TruthTable::from_fn(inputs, |_| value)
    }

    fn mask_for(inputs: usize) -> u64 {
        if inputs >= 6 {
            u64::MAX
        } else {
            (1u64 << (1 << inputs)) - 1
        }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Number of rows, `2^d`.
    pub fn len(&self) -> usize {
        1 << self.inputs
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, row: usize) -> bool {
        assert!(row < self.len());
        self.bits >> row & 1 == 1
    }

    pub fn complement(&self) -> Self {
        TruthTable::from_bits(!self.bits, self.inputs)
    }

    /// Rows on which the two tables agree.
    pub fn agreement(&self, other: &TruthTable) -> u32 {
        (!(self.bits ^ other.bits) & Self::mask_for(self.inputs)).count_ones()
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len())
            .map(|x| if self.get(x) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({self})")
    }
}

impl FromStr for TruthTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if !n.is_power_of_two() || n > 64 {
            return Err(Error::Usage(format!(
                "truth table length {n} is not 2^d with d <= 6"
            )));
        }
        let inputs = n.trailing_zeros() as usize;
        let mut bits = 0u64;
        for (x, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << x,
                other => {
                    return Err(Error::Usage(format!(
                        "invalid truth table character {other:?}"
                    )))
                }
            }
        }
        Ok(TruthTable::from_bits(bits, inputs))
    }
}

impl Serialize for TruthTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TruthTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_order_is_lexicographic() {
        let or = TruthTable::from_fn(2, |x| x != 0);
        assert_eq!(or.to_string(), "0111");
        assert_eq!("0111".parse::<TruthTable>().unwrap(), or);
        assert!("011".parse::<TruthTable>().is_err());
        assert!("01a1".parse::<TruthTable>().is_err());
    }

    #[test]
    fn complement_and_agreement() {
        let t: TruthTable = "0110100110010110".parse().unwrap();
        assert_eq!(t.agreement(&t), 16);
        assert_eq!(t.agreement(&t.complement()), 0);
        assert_eq!(t.len(), 16);
    }
}
