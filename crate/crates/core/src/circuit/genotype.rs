// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Fixed-length bit string encoding a circuit wiring.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`; bits past `len` are zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Genotype {
    words: Vec<u64>,
    len: usize,
}

impl Genotype {
    pub fn zeros(len: usize) -> Self {
        Genotype {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut g = Genotype {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        g.clear_tail();
        g
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut g = Genotype {
            words: (0..len.div_ceil(64)).map(|_| rng.random()).collect(),
            len,
        };
        g.clear_tail();
        g
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut g = Genotype::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            g.set(i, b);
        }
        g
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit {i} out of range for genome of {}",
            self.len
        );
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(
            i < self.len,
            "bit {i} out of range for genome of {}",
            self.len
        );
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit {i} out of range for genome of {}",
            self.len
        );
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Reads `width` bits starting at `start` as an unsigned integer, first bit most significant.
    pub fn read_uint(&self, start: usize, width: usize) -> usize {
        assert!(
            start + width <= self.len,
            "field {start}+{width} out of range for genome of {}",
            self.len
        );
        assert!(width < usize::BITS as usize, "field width {width} too wide");
        if width == 0 {
            return 0;
        }
        let w = start / 64;
        let lo = u128::from(self.words[w]);
        let hi = u128::from(self.words.get(w + 1).copied().unwrap_or(0));
        let chunk = ((hi << 64 | lo) >> (start % 64)) as u64;
        // Genome bit `start` is the field's most significant bit.
        (chunk.reverse_bits() >> (64 - width)) as usize
    }

    /// Writes `value` into `width` bits starting at `start`, most significant first.
    pub fn write_uint(&mut self, start: usize, width: usize, value: usize) {
        for k in 0..width {
            self.set(start + k, value >> (width - 1 - k) & 1 == 1);
        }
    }

    /// Child taking bits `[0, point)` from `a` and `[point, len)` from `b`.
    pub fn crossover(a: &Genotype, b: &Genotype, point: usize) -> Genotype {
        assert_eq!(a.len, b.len);
        assert!(point <= a.len);
        let mut child = b.clone();
        let full = point / 64;
        child.words[..full].copy_from_slice(&a.words[..full]);
        let rem = point % 64;
        if rem != 0 {
            let mask = (1u64 << rem) - 1;
            child.words[full] = (a.words[full] & mask) | (b.words[full] & !mask);
        }
        child
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Short stable digest, 16 hex digits.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.len as u64).to_le_bytes());
        for w in &self.words {
            h.update(w.to_le_bytes());
        }
        h.finalize()[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Number of differing bits; the reconfiguration cost between circuits.
pub fn hamming(a: &Genotype, b: &Genotype) -> Result<u32> {
    if a.len != b.len {
        return Err(Error::Usage(format!(
            "hamming distance of genomes with lengths {} and {}",
            a.len, b.len
        )));
    }
    Ok(a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones())
        .sum())
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genotype({self})")
    }
}

impl FromStr for Genotype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Usage(format!("invalid genome character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Genotype::from_bits(&bits))
    }
}

impl Serialize for Genotype {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Genotype {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::Seed;
    use proptest::prelude::*;

    #[test]
    fn hamming_examples() {
        let z = Genotype::zeros(100);
        assert_eq!(hamming(&z, &z).unwrap(), 0);
        let mut one = z.clone();
        one.flip(57);
        assert_eq!(hamming(&z, &one).unwrap(), 1);
        assert_eq!(hamming(&z, &Genotype::ones(100)).unwrap(), 100);
        assert!(hamming(&z, &Genotype::zeros(99)).is_err());
    }

    #[test]
    fn uint_fields_are_msb_first() {
        let g: Genotype = "00000001".parse().unwrap();
        assert_eq!(g.read_uint(0, 4), 0);
        assert_eq!(g.read_uint(4, 4), 1);
        let mut h = Genotype::zeros(8);
        h.write_uint(4, 4, 1);
        assert_eq!(h, g);
    }

    #[test]
    fn crossover_splices_at_point() {
        let a = Genotype::ones(130);
        let b = Genotype::zeros(130);
        for point in [0, 1, 63, 64, 65, 100, 130] {
            let c = Genotype::crossover(&a, &b, point);
            for i in 0..130 {
                assert_eq!(c.get(i), i < point, "point {point} bit {i}");
            }
        }
    }

    #[test]
    fn string_round_trip_and_tail() {
        let g = Genotype::random(100, &mut Seed(3).rng());
        let s = g.to_string();
        assert_eq!(s.len(), 100);
        assert_eq!(s.parse::<Genotype>().unwrap(), g);
        assert!("01x".parse::<Genotype>().is_err());
        assert_eq!(Genotype::ones(70).count_ones(), 70);
    }

    fn genome(len: usize) -> impl Strategy<Value = Genotype> {
        proptest::collection::vec(any::<bool>(), len).prop_map(|b| Genotype::from_bits(&b))
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric(a in genome(100), b in genome(100), c in genome(100)) {
            let ab = hamming(&a, &b).unwrap();
            prop_assert_eq!(hamming(&a, &a).unwrap(), 0);
            prop_assert_eq!(ab, hamming(&b, &a).unwrap());
            prop_assert_eq!(ab == 0, a == b);
            prop_assert!(hamming(&a, &c).unwrap() <= ab + hamming(&b, &c).unwrap());
        }
    }
}
