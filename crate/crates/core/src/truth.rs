//! Two-component truth values and the evidence functions used by the engine.
//!
//! Frequency is the proportion of positive evidence, confidence the share of
//! total evidence relative to the evidential horizon `k`:
//! `f = w+ / w`, `c = w / (w + k)`.

use std::fmt;

use thiserror::Error;

/// Default evidential horizon.
pub const DEFAULT_HORIZON: f64 = 1.0;

/// Largest representable confidence; keeps `c < 1` under float rounding.
pub const MAX_CONFIDENCE: f64 = 1.0 - 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TruthError {
    #[error("frequency {0} outside [0, 1]")]
    Frequency(f64),
    #[error("confidence {0} outside [0, 1)")]
    Confidence(f64),
    #[error("evidence total must be positive (got {0})")]
    EmptyEvidence(f64),
    #[error("positive evidence {positive} exceeds total {total}")]
    Evidence { positive: f64, total: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruthValue {
    frequency: f64,
    confidence: f64,
}

impl TruthValue {
    pub fn new(frequency: f64, confidence: f64) -> Result<Self, TruthError> {
        if !(0.0..=1.0).contains(&frequency) || !frequency.is_finite() {
            return Err(TruthError::Frequency(frequency));
        }
        if !(0.0..1.0).contains(&confidence) || !confidence.is_finite() {
            return Err(TruthError::Confidence(confidence));
        }
        Ok(TruthValue { frequency, confidence })
    }

    /// Build from computed components, clamping into the valid domain.
    pub(crate) fn clamped(frequency: f64, confidence: f64) -> Self {
        TruthValue {
            frequency: if frequency.is_nan() { 0.0 } else { frequency.clamp(0.0, 1.0) },
            confidence: if confidence.is_nan() { 0.0 } else { confidence.clamp(0.0, MAX_CONFIDENCE) },
        }
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn expectation(&self) -> f64 {
        expectation(*self)
    }
}

impl Default for TruthValue {
    /// Truth assigned to input events that carry no annotation.
    fn default() -> Self {
        TruthValue { frequency: 1.0, confidence: 0.9 }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Truth: frequency={:.6} confidence={:.6}",
            self.frequency, self.confidence
        )
    }
}

/// Positive and total evidence weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evidence {
    positive: f64,
    total: f64,
}

impl Evidence {
    pub fn new(positive: f64, total: f64) -> Result<Self, TruthError> {
        if !(positive >= 0.0 && positive.is_finite()) || !(total >= positive && total.is_finite()) {
            return Err(TruthError::Evidence { positive, total });
        }
        Ok(Evidence { positive, total })
    }

    /// One positive observation.
    pub fn confirmation() -> Self {
        Evidence { positive: 1.0, total: 1.0 }
    }

    pub fn positive(&self) -> f64 {
        self.positive
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Pool two disjoint bodies of evidence.
    pub fn pooled(&self, other: &Evidence) -> Evidence {
        Evidence {
            positive: self.positive + other.positive,
            total: self.total + other.total,
        }
    }
}

pub fn w2c(w: f64, horizon: f64) -> f64 {
    w / (w + horizon)
}

pub fn c2w(c: f64, horizon: f64) -> f64 {
    horizon * c / (1.0 - c)
}

/// `c * (f - 0.5) + 0.5`.
pub fn expectation(t: TruthValue) -> f64 {
    t.confidence * (t.frequency - 0.5) + 0.5
}

/// Pool two truth values from disjoint evidential bases.
pub fn revise(a: TruthValue, b: TruthValue, horizon: f64) -> TruthValue {
    let w1 = c2w(a.confidence, horizon);
    let w2 = c2w(b.confidence, horizon);
    let w = w1 + w2;
    if w == 0.0 {
        return TruthValue::clamped((a.frequency + b.frequency) / 2.0, 0.0);
    }
    let f = (w1 * a.frequency + w2 * b.frequency) / w;
    TruthValue::clamped(f, w2c(w, horizon))
}

pub fn induction_from_counts(e: Evidence, horizon: f64) -> Result<TruthValue, TruthError> {
    if e.total <= 0.0 {
        return Err(TruthError::EmptyEvidence(e.total));
    }
    Ok(TruthValue::clamped(e.positive / e.total, w2c(e.total, horizon)))
}

pub fn deduction(a: TruthValue, b: TruthValue) -> TruthValue {
    let f = a.frequency * b.frequency;
    TruthValue::clamped(f, f * a.confidence * b.confidence)
}

pub fn comparison(a: TruthValue, b: TruthValue, horizon: f64) -> TruthValue {
    let f0 = a.frequency * b.frequency;
    let denom = a.frequency + b.frequency - f0;
    let f = if denom == 0.0 { 0.0 } else { f0 / denom };
    TruthValue::clamped(f, w2c(denom * a.confidence * b.confidence, horizon))
}

/// Truth of an event carried across an equivalence.
pub fn analogy(event: TruthValue, equivalence: TruthValue) -> TruthValue {
    TruthValue::clamped(
        event.frequency * equivalence.frequency,
        event.confidence * equivalence.confidence * equivalence.frequency,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(f: f64, c: f64) -> TruthValue {
        TruthValue::new(f, c).unwrap()
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(TruthValue::new(1.2, 0.5).is_err());
        assert!(TruthValue::new(0.5, 1.0).is_err());
        assert!(TruthValue::new(f64::NAN, 0.5).is_err());
        assert!(Evidence::new(2.0, 1.0).is_err());
    }

    #[test]
    fn induction_rejects_empty_evidence() {
        let e = Evidence::new(0.0, 0.0).unwrap();
        assert_eq!(induction_from_counts(e, 1.0), Err(TruthError::EmptyEvidence(0.0)));
    }

    #[test]
    fn expectation_edges() {
        assert_eq!(expectation(tv(0.5, 0.7)), 0.5);
        assert_eq!(expectation(tv(1.0, 0.0)), 0.5);
    }

    #[test]
    fn deduction_zero_confidence() {
        assert_eq!(deduction(tv(1.0, 0.9), tv(1.0, 0.0)).confidence(), 0.0);
    }

    #[test]
    fn comparison_all_negative() {
        let t = comparison(tv(0.0, 0.9), tv(0.0, 0.9), 1.0);
        assert_eq!((t.frequency(), t.confidence()), (0.0, 0.0));
    }

    #[test]
    fn analogy_zero_frequency_equivalence() {
        assert_eq!(analogy(tv(1.0, 0.9), tv(0.0, 0.9)).confidence(), 0.0);
    }

    #[test]
    fn near_certain_limits() {
        let hi = tv(1.0, MAX_CONFIDENCE);
        let d = deduction(hi, hi);
        assert!((d.confidence() - 1.0).abs() < 1e-9);
        let e = tv(1.0, 0.9);
        let s = analogy(e, hi);
        assert!((s.confidence() - 0.9).abs() < 1e-9);
    }

    #[test]
    fn display_format() {
        assert_eq!(
            tv(1.0, 0.5).to_string(),
            "Truth: frequency=1.000000 confidence=0.500000"
        );
    }
}
