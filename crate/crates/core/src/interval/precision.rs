use std::fmt;

use serde::{Deserialize, Serialize};

/// Significand width of the arithmetic used for one certification attempt.
///
/// 53 bits selects the native `f64` backend; any other width selects
/// [`BigFloat`](super::BigFloat) at that width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrecisionLevel {
    significand_bits: u32,
}

impl PrecisionLevel {
    pub const DOUBLE: PrecisionLevel = PrecisionLevel { significand_bits: 53 };

    /// Levels below 2 bits cannot represent a rounding interval and are rejected.
    pub fn new(significand_bits: u32) -> Option<Self> {
        (significand_bits >= 2).then_some(PrecisionLevel { significand_bits })
    }

    pub fn significand_bits(self) -> u32 {
        self.significand_bits
    }

    pub fn is_double(self) -> bool {
        self.significand_bits == 53
    }

    /// Unit roundoff `u = 2^-p` for a `p`-bit significand.
    pub fn unit_roundoff(self) -> f64 {
        pow2(-(self.significand_bits as i32))
    }

    /// `u^(-1/4)`, the inflation factor applied to Newton residuals.
    pub fn inflation_factor(self) -> f64 {
        2f64.powf(self.significand_bits as f64 / 4.0)
    }
}

impl fmt::Display for PrecisionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.significand_bits)
    }
}

/// Exact power of two, flushing to zero below the subnormal range.
pub(crate) fn pow2(e: i32) -> f64 {
    if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        f64::from_bits(1u64 << 52) * pow2(e + 1022)
    }
}

/// Escalation ladder `53, 128, 256, 512, ...` truncated at `max_bits`.
///
/// The double level is always present, so the ladder is never empty.
pub fn default_ladder(max_bits: u32) -> Vec<PrecisionLevel> {
    let mut ladder = vec![PrecisionLevel::DOUBLE];
    let mut bits = 128u32;
    while bits <= max_bits {
        ladder.push(PrecisionLevel { significand_bits: bits });
        bits = match bits.checked_mul(2) {
            Some(b) => b,
            None => break,
        };
    }
    ladder
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_roundoff_of_double() {
        assert_eq!(PrecisionLevel::DOUBLE.unit_roundoff(), 2f64.powi(-53));
        assert!((PrecisionLevel::DOUBLE.inflation_factor() - 9741.98).abs() < 0.01);
    }

    #[test]
    fn ladder_is_strictly_decreasing_in_u() {
        let ladder = default_ladder(512);
        let bits: Vec<u32> = ladder.iter().map(|l| l.significand_bits()).collect();
        assert_eq!(bits, vec![53, 128, 256, 512]);
        for w in ladder.windows(2) {
            assert!(w[1].unit_roundoff() < w[0].unit_roundoff());
        }
        assert_eq!(default_ladder(53).len(), 1);
        assert_eq!(default_ladder(300).len(), 3);
    }

    #[test]
    fn pow2_is_exact() {
        assert_eq!(pow2(0), 1.0);
        assert_eq!(pow2(-1), 0.5);
        assert_eq!(pow2(10), 1024.0);
        assert_eq!(pow2(-1074), f64::from_bits(1));
    }
}
