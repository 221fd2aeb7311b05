// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};

/// True iff `a` Pareto-dominates `b`: no component of `b` exceeds `a` and at
/// least one is strictly smaller. Larger performance is better.
pub fn pareto_dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Usage(format!(
            "performance vectors must have equal nonzero length, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if y > x {
            return Ok(false);
        }
        strict |= y < x;
    }
    Ok(strict)
}
