//! Order-independent summation.
//!
//! Each term is converted once to a signed fixed-point integer with
//! [`FRAC_BITS`] fractional bits; integer addition is associative, so any
//! partition of the same terms into partial sums (tiles, threads) reduces to
//! the same value. The single rounding back to `f64` happens at the end.

/// Fractional bits of the fixed-point representation (resolution ≈ 8.3e-25).
pub const FRAC_BITS: i32 = 80;
/// Largest term magnitude accepted; leaves 15 bits of headroom in an `i128`.
pub const MAX_TERM: f64 = 4_294_967_296.0;

const SCALE: f64 = (1u128 << FRAC_BITS) as f64;
const INV_SCALE: f64 = 1.0 / SCALE;

/// Converts a term to fixed point, truncating toward zero below the
/// resolution. Returns `None` for non-finite or out-of-range values.
#[inline]
pub fn to_fixed(x: f64) -> Option<i128> {
    if x.is_finite() && x.abs() <= MAX_TERM {
        Some((x * SCALE) as i128)
    } else {
        None
    }
}

#[inline]
pub fn from_fixed(v: i128) -> f64 {
    v as f64 * INV_SCALE
}

/// Exact (up to the fixed-point resolution) running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExactSum(i128);

impl ExactSum {
    pub fn new() -> Self {
        ExactSum(0)
    }

    /// Adds a term; returns `false` (and leaves the sum untouched) when the
    /// term is not representable.
    #[inline]
    pub fn add(&mut self, x: f64) -> bool {
        match to_fixed(x) {
            Some(v) => {
                self.0 += v;
                true
            }
            None => false,
        }
    }

    #[inline]
    pub fn add_fixed(&mut self, v: i128) {
        self.0 += v;
    }

    pub fn merge(&mut self, other: ExactSum) {
        self.0 += other.0;
    }

    pub fn raw(self) -> i128 {
        self.0
    }

    pub fn value(self) -> f64 {
        from_fixed(self.0)
    }
}
