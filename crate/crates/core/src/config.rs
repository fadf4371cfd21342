//! Configurations: finite multisets of agents over states.
//!
//! A configuration is stored as a sorted sparse list of `(state, count)`
//! pairs with all zero counts dropped, so structural equality and hashing
//! coincide with mathematical equality. Counts are machine-width naturals
//! with checked arithmetic; overflow is reported, never wrapped.

use std::fmt;

use crate::error::{Error, Result};
use crate::state::{State, StateSet};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Configuration {
    /// Sorted by state name; counts are strictly positive.
    entries: Vec<(State, u64)>,
}

impl Configuration {
    /// The zero configuration (no agents).
    pub fn zero() -> Self {
        Configuration::default()
    }

    /// The configuration with a single agent in `state`.
    pub fn singleton(state: impl Into<State>) -> Self {
        Configuration {
            entries: vec![(state.into(), 1)],
        }
    }

    /// Builds a configuration from `(state, count)` pairs. Duplicate states
    /// are summed with overflow checking; zero counts are dropped.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<State>,
    {
        let mut entries: Vec<(State, u64)> = Vec::new();
        for (state, count) in pairs {
            let state = state.into();
            match entries.binary_search_by(|(s, _)| s.cmp(&state)) {
                Ok(i) => {
                    entries[i].1 =
                        entries[i].1.checked_add(count).ok_or(Error::CountOverflow {
                            state: state.name().to_string(),
                        })?;
                }
                Err(i) => entries.insert(i, (state, count)),
            }
        }
        entries.retain(|&(_, c)| c > 0);
        let cfg = Configuration { entries };
        cfg.checked_agents()?;
        Ok(cfg)
    }

    /// Number of agents: the sum of all counts.
    pub fn agents(&self) -> u64 {
        // Construction guarantees the total fits in a u64.
        self.entries.iter().map(|&(_, c)| c).sum()
    }

    fn checked_agents(&self) -> Result<u64> {
        let mut total: u64 = 0;
        for (state, count) in &self.entries {
            total = total.checked_add(*count).ok_or(Error::CountOverflow {
                state: state.name().to_string(),
            })?;
        }
        Ok(total)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Count of agents in `state` (zero when absent).
    pub fn count(&self, state: &State) -> u64 {
        self.entries
            .binary_search_by(|(s, _)| s.cmp(state))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn get(&self, name: &str) -> u64 {
        self.count(&State::new(name))
    }

    /// Largest count over all states.
    pub fn norm_inf(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c).max().unwrap_or(0)
    }

    /// States with a strictly positive count, in canonical order.
    pub fn support(&self) -> impl Iterator<Item = &State> {
        self.entries.iter().map(|(s, _)| s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&State, u64)> {
        self.entries.iter().map(|(s, c)| (s, *c))
    }

    /// Restriction to the states of `q`: counts are kept on `q ∩ support`
    /// and zero elsewhere. `q` need not be a subset of this configuration's
    /// state set.
    pub fn restrict(&self, q: &StateSet) -> Configuration {
        Configuration {
            entries: self
                .entries
                .iter()
                .filter(|(s, _)| q.contains(s))
                .cloned()
                .collect(),
        }
    }

    /// Componentwise sum with overflow checking.
    pub fn checked_add(&self, other: &Configuration) -> Result<Configuration> {
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let take_left = match (self.entries.get(i), other.entries.get(j)) {
                (Some((a, _)), Some((b, _))) => a.cmp(b),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => unreachable!(),
            };
            match take_left {
                std::cmp::Ordering::Less => {
                    entries.push(self.entries[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    entries.push(other.entries[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let (s, a) = &self.entries[i];
                    let b = other.entries[j].1;
                    let sum = a.checked_add(b).ok_or(Error::CountOverflow {
                        state: s.name().to_string(),
                    })?;
                    entries.push((s.clone(), sum));
                    i += 1;
                    j += 1;
                }
            }
        }
        let cfg = Configuration { entries };
        cfg.checked_agents()?;
        Ok(cfg)
    }

    /// Componentwise difference; `None` if `other` is not dominated.
    pub fn checked_sub(&self, other: &Configuration) -> Option<Configuration> {
        if !self.dominates(other) {
            return None;
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for (s, c) in &self.entries {
            let rest = c - other.count(s);
            if rest > 0 {
                entries.push((s.clone(), rest));
            }
        }
        Some(Configuration { entries })
    }

    /// `n · self`, checked.
    pub fn checked_scale(&self, n: u64) -> Result<Configuration> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for (s, c) in &self.entries {
            let scaled = c.checked_mul(n).ok_or(Error::CountOverflow {
                state: s.name().to_string(),
            })?;
            if scaled > 0 {
                entries.push((s.clone(), scaled));
            }
        }
        let cfg = Configuration { entries };
        cfg.checked_agents()?;
        Ok(cfg)
    }

    /// Componentwise `self ≥ other`.
    pub fn dominates(&self, other: &Configuration) -> bool {
        other.entries.iter().all(|(s, c)| self.count(s) >= *c)
    }

    /// Componentwise `self ≤ other` with `self ≠ other`.
    pub fn strictly_below(&self, other: &Configuration) -> bool {
        other.dominates(self) && self != other
    }

    /// Dense view in the index order of `states`. States outside `states`
    /// are ignored.
    pub fn to_dense(&self, states: &StateSet) -> Vec<u64> {
        states.iter().map(|s| self.count(s)).collect()
    }
}

impl fmt::Display for Configuration {
    /// Literal syntax: `i=3,ibar=2`; the zero configuration prints as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("-");
        }
        for (i, (s, c)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={}", s.name(), c)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pairs: &[(&str, u64)]) -> Configuration {
        Configuration::from_pairs(pairs.iter().map(|&(s, c)| (s, c))).unwrap()
    }

    #[test]
    fn agents_examples() {
        assert_eq!(Configuration::zero().agents(), 0);
        assert_eq!(cfg(&[("i", 1), ("ibar", 1)]).agents(), 2);
        assert_eq!(cfg(&[("ibar", 2), ("i", 3)]).agents(), 5);
    }

    #[test]
    fn restrict_examples() {
        let q_i = StateSet::new(["i"]).unwrap();
        assert_eq!(cfg(&[("i", 2), ("p", 1)]).restrict(&q_i), cfg(&[("i", 2)]));
        assert_eq!(
            cfg(&[("i", 2)]).restrict(&StateSet::empty()),
            Configuration::zero()
        );
        let q_pq = StateSet::new(["p", "q"]).unwrap();
        assert_eq!(cfg(&[("i", 2)]).restrict(&q_pq), Configuration::zero());
    }

    #[test]
    fn zeros_are_canonical() {
        let a = Configuration::from_pairs([("i", 0u64), ("p", 2)]).unwrap();
        let b = cfg(&[("p", 2)]);
        assert_eq!(a, b);
        assert_eq!(a.count(&State::new("i")), 0);
    }

    #[test]
    fn duplicate_pairs_sum() {
        let a = Configuration::from_pairs([("p", 1u64), ("p", 2)]).unwrap();
        assert_eq!(a, cfg(&[("p", 3)]));
    }

    #[test]
    fn overflow_reported() {
        assert!(Configuration::from_pairs([("p", u64::MAX), ("p", 1)]).is_err());
        let big = cfg(&[("p", u64::MAX)]);
        assert!(big.checked_add(&cfg(&[("p", 1)])).is_err());
        // total agent count over distinct states is also checked
        assert!(Configuration::from_pairs([("a", u64::MAX), ("b", 1u64)]).is_err());
    }

    #[test]
    fn add_sub_roundtrip() {
        let a = cfg(&[("i", 2), ("p", 1)]);
        let b = cfg(&[("i", 1), ("q", 4)]);
        let sum = a.checked_add(&b).unwrap();
        assert_eq!(sum.checked_sub(&b).unwrap(), a);
        assert_eq!(sum.agents(), a.agents() + b.agents());
        assert!(b.checked_sub(&a).is_none());
    }

    #[test]
    fn domination() {
        let a = cfg(&[("i", 2), ("p", 1)]);
        assert!(a.dominates(&cfg(&[("i", 1)])));
        assert!(!a.dominates(&cfg(&[("q", 1)])));
        assert!(a.dominates(&Configuration::zero()));
        assert!(cfg(&[("i", 1)]).strictly_below(&a));
        assert!(!a.strictly_below(&a));
    }

    #[test]
    fn display_literal() {
        assert_eq!(cfg(&[("ibar", 2), ("i", 3)]).to_string(), "i=3,ibar=2");
        assert_eq!(Configuration::zero().to_string(), "-");
    }
}
