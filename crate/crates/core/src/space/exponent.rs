//! Exponent sequences `(p_n)` with a finite description.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rule applied to indices past the explicit prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tail {
    Constant { value: f64 },
    Periodic { pattern: Vec<f64> },
}

/// Which side of 2 the exponents fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Every exponent lies in `[1, 2)`.
    AllBelowTwo,
    /// Every exponent lies in `(2, inf)`.
    AllAboveTwo,
    /// Neither; any exponent equal to 2 lands here.
    Mixed,
}

impl Regime {
    pub fn is_restricted(self) -> bool {
        !matches!(self, Regime::Mixed)
    }
}

/// An exponent sequence given by an explicit prefix followed by a constant
/// or periodic tail. Every value is finite and at least 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExponentSequence")]
pub struct ExponentSequence {
    prefix: Vec<f64>,
    tail: Tail,
}

#[derive(Deserialize)]
struct RawExponentSequence {
    #[serde(default)]
    prefix: Vec<f64>,
    tail: Tail,
}

impl TryFrom<RawExponentSequence> for ExponentSequence {
    type Error = Error;

    fn try_from(raw: RawExponentSequence) -> Result<Self> {
        Self::new(raw.prefix, raw.tail)
    }
}

fn check_value(position: usize, value: f64) -> Result<()> {
    if value.is_finite() && value >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent { position, value })
    }
}

impl ExponentSequence {
    pub fn new(prefix: Vec<f64>, tail: Tail) -> Result<Self> {
        for (i, &v) in prefix.iter().enumerate() {
            check_value(i + 1, v)?;
        }
        let start = prefix.len() + 1;
        match &tail {
            Tail::Constant { value } => check_value(start, *value)?,
            Tail::Periodic { pattern } => {
                if pattern.is_empty() {
                    return Err(Error::EmptyPattern);
                }
                for (i, &v) in pattern.iter().enumerate() {
                    check_value(start + i, v)?;
                }
            }
        }
        Ok(Self { prefix, tail })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(Vec::new(), Tail::Constant { value })
    }

    pub fn periodic(pattern: Vec<f64>) -> Result<Self> {
        Self::new(Vec::new(), Tail::Periodic { pattern })
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// `p_n` for `n >= 1`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn at(&self, n: usize) -> f64 {
        assert!(n >= 1, "exponent sequences are indexed from 1");
        if n <= self.prefix.len() {
            return self.prefix[n - 1];
        }
        let offset = n - self.prefix.len();
        match &self.tail {
            Tail::Constant { value } => *value,
            Tail::Periodic { pattern } => pattern[(offset - 1) % pattern.len()],
        }
    }

    /// Every value the sequence attains: the prefix followed by the tail values.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let tail: &[f64] = match &self.tail {
            Tail::Constant { value } => std::slice::from_ref(value),
            Tail::Periodic { pattern } => pattern,
        };
        self.prefix.iter().chain(tail.iter()).copied()
    }

    pub fn max_value(&self) -> f64 {
        self.values().fold(1.0, f64::max)
    }

    pub fn regime(&self) -> Regime {
        let mut below = true;
        let mut above = true;
        for v in self.values() {
            below &= v < 2.0;
            above &= v > 2.0;
        }
        match (below, above) {
            (true, _) => Regime::AllBelowTwo,
            (_, true) => Regime::AllAboveTwo,
            _ => Regime::Mixed,
        }
    }

    /// If the whole sequence (prefix included) is constant, its value.
    pub fn constant_value(&self) -> Option<f64> {
        let mut values = self.values();
        let first = values.next()?;
        values.all(|v| v == first).then_some(first)
    }

    /// Smallest `L >= 1` with `p_{n+L} = p_n` for every `n`, when the
    /// sequence is purely periodic (no prefix breaking the pattern).
    pub fn minimal_period(&self) -> Option<usize> {
        let full: Vec<f64> = match &self.tail {
            Tail::Constant { value } => vec![*value],
            Tail::Periodic { pattern } => pattern.clone(),
        };
        let len = full.len();
        let period = (1..=len)
            .filter(|l| len.is_multiple_of(*l))
            .find(|&l| (0..len).all(|i| full[i] == full[i % l]))?;
        let consistent = (1..=self.prefix.len()).all(|n| self.at(n) == self.at(n + period));
        consistent.then_some(period)
    }
}

pub fn exponent_at(p: &ExponentSequence, n: usize) -> f64 {
    p.at(n)
}

pub fn classify_regime(p: &ExponentSequence) -> Regime {
    p.regime()
}
