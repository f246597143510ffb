//! The finite-rank stratified universe.
//!
//! A [`HyperModel`] interprets the hypernaturals as the integer interval
//! `[0, M]` together with strictly increasing thresholds `t_0 < ... < t_{L-1} < M`.
//! Level `k` is the initial segment `[0, t_k)`; level 0 holds the standard
//! numbers and the top level is the whole universe. The band `Omega_k = [t_k, M]`
//! holds the `k`-infinite numbers.
//!
//! Levels at or above `L` collapse onto the top level, so a sort such as `N1`
//! is meaningful (and equal to `*N`) in a single-threshold model.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model needs at least one threshold")]
    NoLevels,
    #[error("least threshold must be at least 2, got {0}")]
    StandardTooSmall(u64),
    #[error("thresholds must be strictly increasing ({prev} then {next})")]
    NotIncreasing { prev: u64, next: u64 },
    #[error("threshold {threshold} must lie below the largest element {max}")]
    ThresholdAboveMax { threshold: u64, max: u64 },
    #[error("{value} lies outside the universe [0, {max}]")]
    OutOfUniverse { value: u64, max: u64 },
    #[error("level {level} has no infinite band in a model with {levels} level(s)")]
    NoBand { level: Level, levels: usize },
    #[error("sample count must be positive")]
    ZeroCount,
    #[error("malformed model literal `{0}`")]
    Syntax(String),
}

/// A level of the stratification: `Finite(k)` is `N_k = [0, t_k)` and `Top` is
/// the whole universe. Level 0 is the standard part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    Finite(usize),
    Top,
}

impl Level {
    pub const STANDARD: Level = Level::Finite(0);
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(0) => write!(f, "N"),
            Level::Finite(k) => write!(f, "N{k}"),
            Level::Top => write!(f, "*N"),
        }
    }
}

/// An element of the universe of some model. Constructed through
/// [`HyperModel::hypernat`], which range-checks it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct HyperNat(u64);

impl HyperNat {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for HyperNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Band {
    pub lo: u64,
    pub hi: u64,
}

impl Band {
    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: u64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn midpoint(&self) -> u64 {
        self.lo + (self.hi - self.lo) / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HyperModel {
    max_element: u64,
    thresholds: Vec<u64>,
}

impl HyperModel {
    pub fn new(max_element: u64, thresholds: Vec<u64>) -> Result<Self, ModelError> {
        let first = *thresholds.first().ok_or(ModelError::NoLevels)?;
        if first < 2 {
            return Err(ModelError::StandardTooSmall(first));
        }
        for w in thresholds.windows(2) {
            if w[0] >= w[1] {
                return Err(ModelError::NotIncreasing { prev: w[0], next: w[1] });
            }
        }
        let last = *thresholds.last().unwrap();
        if last >= max_element {
            return Err(ModelError::ThresholdAboveMax { threshold: last, max: max_element });
        }
        Ok(HyperModel { max_element, thresholds })
    }

    /// `M = 2048`, thresholds `[16, 128]`.
    pub fn default_model() -> Self {
        HyperModel::new(2048, vec![16, 128]).unwrap()
    }

    pub fn max_element(&self) -> u64 {
        self.max_element
    }

    pub fn thresholds(&self) -> &[u64] {
        &self.thresholds
    }

    pub fn level_count(&self) -> usize {
        self.thresholds.len()
    }

    /// `t_0`, the exclusive bound of the standard part.
    pub fn standard_bound(&self) -> u64 {
        self.thresholds[0]
    }

    /// Exclusive upper bound of the elements of `level`. Levels `>= L` and
    /// `Top` give `M + 1`.
    pub fn level_bound(&self, level: Level) -> u64 {
        match level {
            Level::Finite(k) if k < self.thresholds.len() => self.thresholds[k],
            _ => self.max_element + 1,
        }
    }

    /// Exclusive bound of `N_1`, the 1-finite numbers.
    pub fn first_extension_bound(&self) -> u64 {
        self.level_bound(Level::Finite(1))
    }

    pub fn hypernat(&self, value: u64) -> Result<HyperNat, ModelError> {
        if value > self.max_element {
            return Err(ModelError::OutOfUniverse { value, max: self.max_element });
        }
        Ok(HyperNat(value))
    }

    pub fn contains(&self, value: u64) -> bool {
        value <= self.max_element
    }

    /// Least level containing `n`.
    pub fn level_of(&self, n: HyperNat) -> Result<Level, ModelError> {
        let n = self.hypernat(n.0)?.0;
        Ok(self
            .thresholds
            .iter()
            .position(|&t| n < t)
            .map(Level::Finite)
            .unwrap_or(Level::Top))
    }

    pub fn is_k_finite(&self, n: HyperNat, level: Level) -> Result<bool, ModelError> {
        let n = self.hypernat(n.0)?.0;
        Ok(n < self.level_bound(level))
    }

    /// `Omega_k = [t_k, M]`.
    pub fn omega_band(&self, level: Level) -> Result<Band, ModelError> {
        match level {
            Level::Finite(k) if k < self.thresholds.len() => {
                Ok(Band { lo: self.thresholds[k], hi: self.max_element })
            }
            _ => Err(ModelError::NoBand { level, levels: self.thresholds.len() }),
        }
    }

    /// A deterministic sample of the band at `level`, sorted ascending.
    ///
    /// Always contains `t_k`, `t_k + 1`, the midpoint, `M - 1` and `M` (as far as
    /// the band has them); seeded uniform draws fill the list up to `count`.
    pub fn sample_omegas(&self, level: Level, count: usize, seed: u64) -> Result<Vec<HyperNat>, ModelError> {
        if count == 0 {
            return Err(ModelError::ZeroCount);
        }
        let band = self.omega_band(level)?;
        let mut picked: Vec<u64> = [band.lo, band.lo + 1, band.midpoint(), band.hi - 1, band.hi]
            .into_iter()
            .filter(|v| band.contains(*v))
            .collect();
        picked.sort_unstable();
        picked.dedup();
        let target = (count as u64).max(picked.len() as u64).min(band.len()) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while picked.len() < target {
            let v = rng.gen_range(band.lo..=band.hi);
            if let Err(pos) = picked.binary_search(&v) {
                picked.insert(pos, v);
            }
        }
        Ok(picked.into_iter().map(HyperNat).collect())
    }
}

impl Default for HyperModel {
    fn default() -> Self {
        HyperModel::default_model()
    }
}

impl fmt::Display for HyperModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let levels: Vec<String> = self.thresholds.iter().map(u64::to_string).collect();
        write!(f, "model M={} levels={}", self.max_element, levels.join(","))
    }
}

/// Accepts `model M=2048 levels=16,128`, `M=2048,levels=16,128` and mixes of
/// the two.
impl FromStr for HyperModel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::Syntax(s.to_string());
        let mut max = None;
        let mut levels = Vec::new();
        let mut in_levels = false;
        for tok in s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            if tok == "model" && max.is_none() && levels.is_empty() {
                continue;
            }
            if let Some(v) = tok.strip_prefix("M=") {
                max = Some(v.parse::<u64>().map_err(|_| bad())?);
                in_levels = false;
            } else if let Some(v) = tok.strip_prefix("levels=") {
                in_levels = true;
                levels.push(v.parse::<u64>().map_err(|_| bad())?);
            } else if in_levels {
                levels.push(tok.parse::<u64>().map_err(|_| bad())?);
            } else {
                return Err(bad());
            }
        }
        HyperModel::new(max.ok_or_else(bad)?, levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> HyperModel {
        HyperModel::default_model()
    }

    fn n(v: u64) -> HyperNat {
        m().hypernat(v).unwrap()
    }

    #[test]
    fn level_of_examples() {
        assert_eq!(m().level_of(n(5)).unwrap(), Level::Finite(0));
        assert_eq!(m().level_of(n(16)).unwrap(), Level::Finite(1));
        assert_eq!(m().level_of(n(500)).unwrap(), Level::Top);
        assert!(m().hypernat(2049).is_err());
    }

    #[test]
    fn k_finite_examples() {
        assert!(m().is_k_finite(n(5), Level::Finite(0)).unwrap());
        assert!(!m().is_k_finite(n(16), Level::Finite(0)).unwrap());
        assert!(m().is_k_finite(n(16), Level::Finite(1)).unwrap());
        assert!(!m().is_k_finite(n(2048), Level::Finite(1)).unwrap());
        assert!(m().is_k_finite(n(2048), Level::Top).unwrap());
    }

    #[test]
    fn bands() {
        assert_eq!(m().omega_band(Level::Finite(0)).unwrap(), Band { lo: 16, hi: 2048 });
        assert_eq!(m().omega_band(Level::Finite(1)).unwrap(), Band { lo: 128, hi: 2048 });
        let tiny = HyperModel::new(3, vec![2]).unwrap();
        assert_eq!(tiny.omega_band(Level::Finite(0)).unwrap(), Band { lo: 2, hi: 3 });
        assert!(m().omega_band(Level::Top).is_err());
        assert!(m().omega_band(Level::Finite(2)).is_err());
    }

    #[test]
    fn sampling() {
        let s: Vec<u64> = m()
            .sample_omegas(Level::Finite(0), 5, 99)
            .unwrap()
            .into_iter()
            .map(HyperNat::value)
            .collect();
        assert_eq!(s, vec![16, 17, 1032, 2047, 2048]);

        let tiny = HyperModel::new(3, vec![2]).unwrap();
        let s: Vec<u64> = tiny.sample_omegas(Level::Finite(0), 10, 1).unwrap().into_iter().map(HyperNat::value).collect();
        assert_eq!(s, vec![2, 3]);

        let a = m().sample_omegas(Level::Finite(1), 40, 7).unwrap();
        let b = m().sample_omegas(Level::Finite(1), 40, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(a.iter().all(|v| (128..=2048).contains(&v.value())));
    }

    #[test]
    fn rejects_bad_models() {
        assert_eq!(HyperModel::new(10, vec![]), Err(ModelError::NoLevels));
        assert_eq!(HyperModel::new(10, vec![1]), Err(ModelError::StandardTooSmall(1)));
        assert!(matches!(HyperModel::new(10, vec![4, 4]), Err(ModelError::NotIncreasing { .. })));
        assert!(matches!(HyperModel::new(10, vec![4, 10]), Err(ModelError::ThresholdAboveMax { .. })));
    }

    #[test]
    fn literal_round_trip() {
        let parsed: HyperModel = "model M=2048 levels=16,128".parse().unwrap();
        assert_eq!(parsed, m());
        let parsed: HyperModel = "M=2048,levels=16,128".parse().unwrap();
        assert_eq!(parsed, m());
        assert_eq!(m().to_string(), "model M=2048 levels=16,128");
        assert!("M=2048 foo=3".parse::<HyperModel>().is_err());
    }

    #[test]
    fn collapsed_levels() {
        let one = HyperModel::new(100, vec![10]).unwrap();
        assert_eq!(one.first_extension_bound(), 101);
        assert_eq!(one.level_bound(Level::Finite(3)), 101);
    }
}
