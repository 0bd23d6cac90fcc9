//! Extended reals and the closed interval shapes taken by the bound sets.
//!
//! Every bound set this crate computes (`L`, `U`, `L*`, `U*`) is one of
//! `∅`, `{a}`, `[a, b]`, `(-∞, b]`, `[a, ∞)` or `ℝ`. [`ExtInterval`] encodes
//! exactly those shapes; anything else is unrepresentable.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

/// A member of `ℝ ∪ {-∞, +∞}`. NaN is never stored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const POS_INF: ExtReal = ExtReal(f64::INFINITY);
    pub const NEG_INF: ExtReal = ExtReal(f64::NEG_INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Panics on NaN.
    pub fn new(value: f64) -> Self {
        assert!(!value.is_nan(), "ExtReal cannot hold NaN");
        ExtReal(value)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl From<f64> for ExtReal {
    fn from(value: f64) -> Self {
        ExtReal::new(value)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).expect("ExtReal is never NaN")
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            f.write_str("-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            serializer.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExtRealVisitor;

        impl Visitor<'_> for ExtRealVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"+inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                if v.is_nan() {
                    return Err(E::custom("NaN is not an extended real"));
                }
                Ok(ExtReal(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
                match v {
                    "inf" | "+inf" => Ok(ExtReal::POS_INF),
                    "-inf" => Ok(ExtReal::NEG_INF),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        deserializer.deserialize_any(ExtRealVisitor)
    }
}

/// Shape tag of an [`ExtInterval`], also used as the `kind` field on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalKind {
    Empty,
    Singleton,
    Closed,
    LeftRay,
    RightRay,
    All,
}

/// A closed connected subset of `ℝ` (possibly empty or unbounded).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtInterval {
    Empty,
    Singleton(f64),
    /// `[a, b]` with `a < b`, both finite.
    Closed(f64, f64),
    /// `(-∞, b]`.
    LeftRay(f64),
    /// `[a, ∞)`.
    RightRay(f64),
    All,
}

impl ExtInterval {
    /// Builds `{u : lo ≤ u ≤ hi}` over the reals. Crossed endpoints give `Empty`.
    pub fn from_bounds(lo: f64, hi: f64) -> Self {
        debug_assert!(!lo.is_nan() && !hi.is_nan());
        if lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return ExtInterval::Empty;
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) if lo == hi => ExtInterval::Singleton(lo),
            (true, true) => ExtInterval::Closed(lo, hi),
            (false, true) => ExtInterval::LeftRay(hi),
            (true, false) => ExtInterval::RightRay(lo),
            (false, false) => ExtInterval::All,
        }
    }

    pub fn kind(&self) -> IntervalKind {
        match self {
            ExtInterval::Empty => IntervalKind::Empty,
            ExtInterval::Singleton(_) => IntervalKind::Singleton,
            ExtInterval::Closed(..) => IntervalKind::Closed,
            ExtInterval::LeftRay(_) => IntervalKind::LeftRay,
            ExtInterval::RightRay(_) => IntervalKind::RightRay,
            ExtInterval::All => IntervalKind::All,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ExtInterval::Empty)
    }

    /// Infimum, with `inf ∅ = +∞`.
    pub fn inf(&self) -> f64 {
        match *self {
            ExtInterval::Empty => f64::INFINITY,
            ExtInterval::Singleton(a) | ExtInterval::Closed(a, _) | ExtInterval::RightRay(a) => a,
            ExtInterval::LeftRay(_) | ExtInterval::All => f64::NEG_INFINITY,
        }
    }

    /// Supremum, with `sup ∅ = -∞`.
    pub fn sup(&self) -> f64 {
        match *self {
            ExtInterval::Empty => f64::NEG_INFINITY,
            ExtInterval::Singleton(b) | ExtInterval::Closed(_, b) | ExtInterval::LeftRay(b) => b,
            ExtInterval::RightRay(_) | ExtInterval::All => f64::INFINITY,
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        !self.is_empty() && self.inf() <= u && u <= self.sup()
    }

    pub fn intersect(&self, other: &ExtInterval) -> ExtInterval {
        if self.is_empty() || other.is_empty() {
            return ExtInterval::Empty;
        }
        ExtInterval::from_bounds(self.inf().max(other.inf()), self.sup().min(other.sup()))
    }

    /// Like [`intersect`](Self::intersect), but endpoints within `rel_tol`
    /// (relative, floored at 1) of touching give a singleton at the
    /// endpoint of `self`.
    pub fn intersect_snapped(&self, other: &ExtInterval, rel_tol: f64) -> ExtInterval {
        if self.is_empty() || other.is_empty() {
            return ExtInterval::Empty;
        }
        let lo = self.inf().max(other.inf());
        let hi = self.sup().min(other.sup());
        if lo.is_finite() && hi.is_finite() && (lo - hi).abs() <= rel_tol * lo.abs().max(hi.abs()).max(1.0) {
            let at = if lo == self.inf() || lo == self.sup() { lo } else { hi };
            if self.contains(at) {
                return ExtInterval::Singleton(at);
            }
        }
        ExtInterval::from_bounds(lo, hi)
    }

    pub fn intersects(&self, other: &ExtInterval) -> bool {
        !self.intersect(other).is_empty()
    }

    /// `self ∩ [0, ∞) ≠ ∅`.
    pub fn meets_nonnegative(&self) -> bool {
        !self.is_empty() && self.sup() >= 0.0
    }

    /// `self ⊆ other`, allowing endpoints to differ by `tol`.
    pub fn is_subset_of(&self, other: &ExtInterval, tol: f64) -> bool {
        if self.is_empty() {
            return true;
        }
        if other.is_empty() {
            return false;
        }
        let lo_ok = other.inf() <= self.inf() || (self.inf() - other.inf()).abs() <= tol;
        let hi_ok = self.sup() <= other.sup() || (self.sup() - other.sup()).abs() <= tol;
        lo_ok && hi_ok
    }
}

impl fmt::Display for ExtInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ExtInterval::Empty => f.write_str("∅"),
            ExtInterval::Singleton(a) => write!(f, "{{{a}}}"),
            ExtInterval::Closed(a, b) => write!(f, "[{a}, {b}]"),
            ExtInterval::LeftRay(b) => write!(f, "(-inf, {b}]"),
            ExtInterval::RightRay(a) => write!(f, "[{a}, inf)"),
            ExtInterval::All => f.write_str("(-inf, inf)"),
        }
    }
}

// Wire form: {"kind": ..., "a": inf-or-number|null, "b": ...}.
impl Serialize for ExtInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (a, b) =
            if self.is_empty() { (None, None) } else { (Some(ExtReal(self.inf())), Some(ExtReal(self.sup()))) };
        let mut st = serializer.serialize_struct("ExtInterval", 3)?;
        st.serialize_field("kind", &self.kind())?;
        st.serialize_field("a", &a)?;
        st.serialize_field("b", &b)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ExtInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            kind: IntervalKind,
            a: Option<ExtReal>,
            b: Option<ExtReal>,
        }
        let w = Wire::deserialize(deserializer)?;
        if w.kind == IntervalKind::Empty {
            return Ok(ExtInterval::Empty);
        }
        let a = w.a.map(ExtReal::get).unwrap_or(f64::NEG_INFINITY);
        let b = w.b.map(ExtReal::get).unwrap_or(f64::INFINITY);
        let iv = ExtInterval::from_bounds(a, b);
        if iv.kind() != w.kind {
            return Err(de::Error::custom(format!("interval endpoints ({a}, {b}) do not match kind {:?}", w.kind)));
        }
        Ok(iv)
    }
}
