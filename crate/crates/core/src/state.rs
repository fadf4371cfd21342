//! State identifiers and ordered finite state sets.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A state identifier. Cheap to clone; compared by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(Arc<str>);

impl State {
    pub fn new(name: impl AsRef<str>) -> Self {
        State(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for State {
    fn from(s: &str) -> Self {
        State::new(s)
    }
}

/// An ordered finite set of distinct states. Iteration order is the
/// declaration order, which is the canonical order used everywhere a
/// configuration is viewed as a dense vector.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct StateSet {
    names: Vec<State>,
}

impl StateSet {
    /// Builds a state set, rejecting duplicate identifiers.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<State>,
    {
        let mut out: Vec<State> = Vec::new();
        for name in names {
            let state = name.into();
            if out.contains(&state) {
                return Err(Error::DuplicateState {
                    state: state.name().to_string(),
                });
            }
            out.push(state);
        }
        Ok(StateSet { names: out })
    }

    pub fn empty() -> Self {
        StateSet::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, state: &State) -> bool {
        self.names.contains(state)
    }

    pub fn index_of(&self, state: &State) -> Option<usize> {
        self.names.iter().position(|s| s == state)
    }

    pub fn get(&self, index: usize) -> Option<&State> {
        self.names.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &State> {
        self.names.iter()
    }

    pub fn as_slice(&self) -> &[State] {
        &self.names
    }

    pub fn is_subset_of(&self, other: &StateSet) -> bool {
        self.names.iter().all(|s| other.contains(s))
    }

    /// States of `self` that are not in `other`, in declaration order.
    pub fn difference(&self, other: &StateSet) -> StateSet {
        StateSet {
            names: self
                .names
                .iter()
                .filter(|s| !other.contains(s))
                .cloned()
                .collect(),
        }
    }

    /// States of `self` that are also in `other`, in declaration order.
    pub fn intersection(&self, other: &StateSet) -> StateSet {
        StateSet {
            names: self
                .names
                .iter()
                .filter(|s| other.contains(s))
                .cloned()
                .collect(),
        }
    }

    /// Union keeping `self`'s order first, then new states of `other`.
    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut names = self.names.clone();
        for s in &other.names {
            if !names.contains(s) {
                names.push(s.clone());
            }
        }
        StateSet { names }
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.names.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(s.name())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declaration_order_is_kept() {
        let s = StateSet::new(["q", "a", "m"]).unwrap();
        let names: Vec<_> = s.iter().map(|x| x.name().to_string()).collect();
        assert_eq!(names, ["q", "a", "m"]);
        assert_eq!(s.index_of(&State::new("a")), Some(1));
    }

    #[test]
    fn duplicates_rejected() {
        assert!(StateSet::new(["p", "p"]).is_err());
    }

    #[test]
    fn set_algebra() {
        let a = StateSet::new(["i", "p", "q"]).unwrap();
        let b = StateSet::new(["q", "r"]).unwrap();
        assert_eq!(a.difference(&b).as_slice().len(), 2);
        assert_eq!(a.intersection(&b).as_slice().len(), 1);
        assert_eq!(a.union(&b).len(), 4);
        assert!(a.intersection(&b).is_subset_of(&a));
    }
}
