// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest input count whose truth table fits one `u64` lane word.
pub const MAX_INPUTS: usize = 6;

/// Largest gate count; gate sets are tracked as `u64` bitmasks.
pub const MAX_GATES: usize = 64;

/// Size of the evolvable NAND circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    /// Primary inputs `d`.
    pub inputs: usize,
    /// NAND gates `M`.
    pub gates: usize,
}

impl Default for CircuitParams {
    fn default() -> Self {
        CircuitParams {
            inputs: 4,
            gates: 12,
        }
    }
}

impl CircuitParams {
    pub fn new(inputs: usize, gates: usize) -> Result<Self> {
        let p = CircuitParams { inputs, gates };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs == 0 || self.inputs > MAX_INPUTS {
            return Err(Error::Config(format!(
                "circuit.inputs must be in 1..={MAX_INPUTS}, got {}",
                self.inputs
            )));
        }
        if self.gates == 0 || self.gates > MAX_GATES {
            return Err(Error::Config(format!(
                "circuit.gates must be in 1..={MAX_GATES}, got {}",
                self.gates
            )));
        }
        Ok(())
    }

    /// Number of wire sources: primary inputs followed by gate outputs.
    pub fn sources(&self) -> usize {
        self.inputs + self.gates
    }

    /// Bits per wire index, `ceil(log2(M + d))`.
    pub fn wire_bits(&self) -> usize {
        let n = self.sources();
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }

    /// Genome length `m * (2M + 1)`.
    pub fn genome_len(&self) -> usize {
        self.wire_bits() * (2 * self.gates + 1)
    }

    /// Rows of the truth table, `2^d`.
    pub fn table_len(&self) -> usize {
        1 << self.inputs
    }

    /// True when every `m`-bit field already names a valid source, so
    /// decoding needs no modulo reduction.
    pub fn is_dense(&self) -> bool {
        1usize << self.wire_bits() == self.sources()
    }
}
