//! Actions: integer-valued displacement vectors over states.

use std::fmt;

use crate::config::Configuration;
use crate::state::{State, StateSet};

/// A mapping from states to signed integers, stored sparsely (zeros
/// dropped). Values are `i128` so that any difference of two `u64` counts
/// is representable without overflow.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Action {
    entries: Vec<(State, i128)>,
}

impl Action {
    pub fn zero() -> Self {
        Action::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, i128)>,
        S: Into<State>,
    {
        let mut entries: Vec<(State, i128)> = Vec::new();
        for (state, value) in pairs {
            let state = state.into();
            match entries.binary_search_by(|(s, _)| s.cmp(&state)) {
                Ok(i) => entries[i].1 += value,
                Err(i) => entries.insert(i, (state, value)),
            }
        }
        entries.retain(|&(_, v)| v != 0);
        Action { entries }
    }

    /// `post − pre`, componentwise.
    pub fn displacement(pre: &Configuration, post: &Configuration) -> Self {
        let mut pairs: Vec<(State, i128)> = Vec::new();
        for (s, c) in pre.iter() {
            pairs.push((s.clone(), -(c as i128)));
        }
        for (s, c) in post.iter() {
            pairs.push((s.clone(), c as i128));
        }
        Action::from_pairs(pairs)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn value(&self, state: &State) -> i128 {
        self.entries
            .binary_search_by(|(s, _)| s.cmp(state))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn get(&self, name: &str) -> i128 {
        self.value(&State::new(name))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&State, i128)> {
        self.entries.iter().map(|(s, v)| (s, *v))
    }

    pub fn add(&self, other: &Action) -> Action {
        let pairs: Vec<(State, i128)> = self
            .entries
            .iter()
            .map(|(s, v)| (s.clone(), *v))
            .chain(other.entries.iter().map(|(s, v)| (s.clone(), *v)))
            .collect();
        Action::from_pairs(pairs)
    }

    pub fn scale(&self, n: i128) -> Action {
        Action::from_pairs(self.entries.iter().map(|(s, v)| (s.clone(), v * n)))
    }

    pub fn restrict(&self, q: &StateSet) -> Action {
        Action {
            entries: self
                .entries
                .iter()
                .filter(|(s, _)| q.contains(s))
                .cloned()
                .collect(),
        }
    }

    /// Sum of absolute values.
    pub fn norm_1(&self) -> u128 {
        self.entries.iter().map(|&(_, v)| v.unsigned_abs()).sum()
    }

    /// Largest absolute value.
    pub fn norm_inf(&self) -> u128 {
        self.entries
            .iter()
            .map(|&(_, v)| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("-");
        }
        for (i, (s, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}={:+}", s.name(), v)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displacement_of_example_transition() {
        // t = (i+ibar, p+q)
        let pre = Configuration::from_pairs([("i", 1u64), ("ibar", 1)]).unwrap();
        let post = Configuration::from_pairs([("p", 1u64), ("q", 1)]).unwrap();
        let d = Action::displacement(&pre, &post);
        assert_eq!(d.get("i"), -1);
        assert_eq!(d.get("ibar"), -1);
        assert_eq!(d.get("p"), 1);
        assert_eq!(d.get("q"), 1);
        assert_eq!(d.norm_1(), 4);
        assert_eq!(d.norm_inf(), 1);
    }

    #[test]
    fn self_loop_is_zero() {
        let p = Configuration::singleton("p");
        assert!(Action::displacement(&p, &p).is_zero());
    }

    #[test]
    fn creation() {
        let p = Configuration::singleton("p");
        let pp = Configuration::from_pairs([("p", 2u64)]).unwrap();
        let d = Action::displacement(&p, &pp);
        assert_eq!(d.get("p"), 1);
        assert_eq!(d.iter().count(), 1);
    }

    #[test]
    fn sums_cancel() {
        let a = Action::from_pairs([("p", 2i128), ("q", -1)]);
        let b = Action::from_pairs([("p", -2i128), ("q", 1)]);
        assert!(a.add(&b).is_zero());
    }
}
