//! Transitions, Petri nets, output maps, and protocols.

use std::collections::BTreeMap;
use std::fmt;

use crate::action::Action;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::state::{State, StateSet};

/// A transition is a pair of configurations: what it consumes and what it
/// produces. Firing `t` from `c` requires `c ≥ pre` and yields
/// `c − pre + post`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Transition {
    pre: Configuration,
    post: Configuration,
}

impl Transition {
    pub fn new(pre: Configuration, post: Configuration) -> Self {
        Transition { pre, post }
    }

    pub fn pre(&self) -> &Configuration {
        &self.pre
    }

    pub fn post(&self) -> &Configuration {
        &self.post
    }

    /// Interaction width `|t| = max(|pre|, |post|)`: the number of agents
    /// touched by one firing.
    pub fn interaction_width(&self) -> u64 {
        self.pre.agents().max(self.post.agents())
    }

    /// Largest multiset coefficient on either side.
    pub fn norm_inf(&self) -> u64 {
        self.pre.norm_inf().max(self.post.norm_inf())
    }

    /// `post − pre` as an integer vector.
    pub fn displacement(&self) -> Action {
        Action::displacement(&self.pre, &self.post)
    }

    /// Projection of both sides to the states of `q`.
    pub fn restrict(&self, q: &StateSet) -> Transition {
        Transition {
            pre: self.pre.restrict(q),
            post: self.post.restrict(q),
        }
    }

    pub fn is_conservative(&self) -> bool {
        self.pre.agents() == self.post.agents()
    }
}

impl fmt::Display for Transition {
    /// Multiset arrow syntax: `i ibar -> p q`, with `-` for the empty side.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", multiset(&self.pre), multiset(&self.post))
    }
}

/// Renders a configuration in multiset syntax (`a a b`; `-` when empty).
pub(crate) fn multiset(c: &Configuration) -> String {
    if c.is_zero() {
        return "-".to_string();
    }
    let mut parts = Vec::new();
    for (s, n) in c.iter() {
        for _ in 0..n {
            parts.push(s.name().to_string());
        }
    }
    parts.join(" ")
}

/// A finite set of transitions over a fixed state set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PetriNet {
    states: StateSet,
    transitions: Vec<Transition>,
}

impl PetriNet {
    /// Builds a net, checking that every transition mentions only declared
    /// states and that no transition is listed twice.
    pub fn new(states: StateSet, transitions: Vec<Transition>) -> Result<Self> {
        for t in &transitions {
            for s in t.pre.support().chain(t.post.support()) {
                if !states.contains(s) {
                    return Err(Error::UnknownState {
                        state: s.name().to_string(),
                    });
                }
            }
        }
        for (i, t) in transitions.iter().enumerate() {
            if transitions[..i].contains(t) {
                return Err(Error::DuplicateTransition {
                    transition: t.to_string(),
                });
            }
        }
        Ok(PetriNet {
            states,
            transitions,
        })
    }

    pub fn states(&self) -> &StateSet {
        &self.states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, index: usize) -> Result<&Transition> {
        self.transitions.get(index).ok_or(Error::BadTransitionIndex {
            index,
            len: self.transitions.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// `‖T‖∞`: the largest multiset coefficient over all transitions.
    /// Zero for the empty net.
    pub fn norm_inf(&self) -> u64 {
        self.transitions.iter().map(Transition::norm_inf).max().unwrap_or(0)
    }

    /// Largest interaction width over all transitions; zero for the empty
    /// net.
    pub fn interaction_width(&self) -> u64 {
        self.transitions
            .iter()
            .map(Transition::interaction_width)
            .max()
            .unwrap_or(0)
    }

    /// True when every transition preserves the number of agents.
    pub fn is_conservative(&self) -> bool {
        self.transitions.iter().all(Transition::is_conservative)
    }

    /// The projected net `T|_Q` over the states of `q`. Projections that
    /// coincide are kept once, in first-occurrence order.
    pub fn restrict(&self, q: &StateSet) -> PetriNet {
        let projected_states = q.clone();
        let mut transitions: Vec<Transition> = Vec::new();
        for t in &self.transitions {
            let tq = t.restrict(q);
            if !transitions.contains(&tq) {
                transitions.push(tq);
            }
        }
        PetriNet {
            states: projected_states,
            transitions,
        }
    }
}

/// Output value of a single state.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Output {
    Zero,
    Star,
    One,
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Output::Zero => "0",
            Output::Star => "*",
            Output::One => "1",
        })
    }
}

/// Total assignment of outputs to the states of a protocol.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OutputMap {
    assignment: BTreeMap<State, Output>,
}

impl OutputMap {
    /// Builds the map from the 0-class and 1-class; every other state of
    /// `states` gets `⋆`. The classes must be disjoint subsets of `states`.
    pub fn from_classes(states: &StateSet, zeros: &StateSet, ones: &StateSet) -> Result<Self> {
        for s in zeros.iter().chain(ones.iter()) {
            if !states.contains(s) {
                return Err(Error::UnknownState {
                    state: s.name().to_string(),
                });
            }
        }
        let mut assignment = BTreeMap::new();
        for s in states.iter() {
            let value = match (zeros.contains(s), ones.contains(s)) {
                (true, true) => {
                    return Err(Error::Precondition(format!(
                        "state `{s}` assigned both output 0 and output 1"
                    )))
                }
                (true, false) => Output::Zero,
                (false, true) => Output::One,
                (false, false) => Output::Star,
            };
            assignment.insert(s.clone(), value);
        }
        Ok(OutputMap { assignment })
    }

    pub fn output(&self, state: &State) -> Option<Output> {
        self.assignment.get(state).copied()
    }

    /// `γ⁻¹({value})` in the canonical order of `states`.
    pub fn class(&self, states: &StateSet, value: Output) -> StateSet {
        StateSet::new(
            states
                .iter()
                .filter(|s| self.assignment.get(*s) == Some(&value))
                .cloned(),
        )
        .expect("class of a valid output map has no duplicates")
    }
}

/// A population protocol: a Petri net together with leaders, input states,
/// and an output function.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Protocol {
    net: PetriNet,
    leaders: Configuration,
    inputs: StateSet,
    output: OutputMap,
}

impl Protocol {
    pub fn new(
        net: PetriNet,
        leaders: Configuration,
        inputs: StateSet,
        output: OutputMap,
    ) -> Result<Self> {
        for s in leaders.support() {
            if !net.states().contains(s) {
                return Err(Error::UnknownState {
                    state: s.name().to_string(),
                });
            }
        }
        if !inputs.is_subset_of(net.states()) {
            let missing = inputs.difference(net.states());
            return Err(Error::UnknownState {
                state: missing.as_slice()[0].name().to_string(),
            });
        }
        for s in net.states().iter() {
            if output.output(s).is_none() {
                return Err(Error::Precondition(format!(
                    "output map not total: state `{s}` unassigned"
                )));
            }
        }
        Ok(Protocol {
            net,
            leaders,
            inputs,
            output,
        })
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn states(&self) -> &StateSet {
        self.net.states()
    }

    pub fn leaders(&self) -> &Configuration {
        &self.leaders
    }

    pub fn inputs(&self) -> &StateSet {
        &self.inputs
    }

    pub fn output_map(&self) -> &OutputMap {
        &self.output
    }

    pub fn output(&self, state: &State) -> Output {
        self.output
            .output(state)
            .expect("output map is total on the protocol's states")
    }

    /// `γ⁻¹({value})`.
    pub fn output_class(&self, value: Output) -> StateSet {
        self.output.class(self.net.states(), value)
    }

    /// The initial configuration `ρ_L + ρ|_P` for input `ρ`.
    pub fn initial(&self, input: &Configuration) -> Result<Configuration> {
        self.leaders.checked_add(&input.restrict(self.net.states()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pairs: &[(&str, u64)]) -> Configuration {
        Configuration::from_pairs(pairs.iter().map(|&(s, c)| (s, c))).unwrap()
    }

    fn t(pre: &[(&str, u64)], post: &[(&str, u64)]) -> Transition {
        Transition::new(cfg(pre), cfg(post))
    }

    #[test]
    fn interaction_width_examples() {
        assert_eq!(t(&[("i", 1), ("ibar", 1)], &[("p", 1), ("q", 1)]).interaction_width(), 2);
        assert_eq!(t(&[], &[]).interaction_width(), 0);
        assert_eq!(t(&[("i", 3)], &[("p", 1)]).interaction_width(), 3);
    }

    #[test]
    fn net_norm_examples() {
        let states = StateSet::new(["i", "p"]).unwrap();
        assert_eq!(PetriNet::new(states.clone(), vec![]).unwrap().norm_inf(), 0);
        let n = PetriNet::new(states, vec![t(&[("i", 3)], &[("p", 1)])]).unwrap();
        assert_eq!(n.norm_inf(), 3);
    }

    #[test]
    fn duplicate_transitions_rejected() {
        let states = StateSet::new(["p", "q"]).unwrap();
        let tr = t(&[("p", 1)], &[("q", 1)]);
        assert!(PetriNet::new(states, vec![tr.clone(), tr]).is_err());
    }

    #[test]
    fn unknown_state_rejected() {
        let states = StateSet::new(["p"]).unwrap();
        assert!(PetriNet::new(states, vec![t(&[("q", 1)], &[])]).is_err());
    }

    #[test]
    fn projection_dedups() {
        let states = StateSet::new(["p", "q", "r"]).unwrap();
        let n = PetriNet::new(
            states,
            vec![
                t(&[("p", 1), ("q", 1)], &[("r", 1)]),
                t(&[("p", 1), ("r", 1)], &[("r", 1)]),
            ],
        )
        .unwrap();
        let q = StateSet::new(["p"]).unwrap();
        let proj = n.restrict(&q);
        // both project to (p, -)
        assert_eq!(proj.len(), 1);
        assert_eq!(proj.states().len(), 1);
    }

    #[test]
    fn transition_display() {
        assert_eq!(
            t(&[("i", 1), ("ibar", 1)], &[("p", 2)]).to_string(),
            "i ibar -> p p"
        );
        assert_eq!(t(&[], &[("p", 1)]).to_string(), "- -> p");
    }

    #[test]
    fn output_map_classes() {
        let states = StateSet::new(["i", "ibar", "x"]).unwrap();
        let zeros = StateSet::new(["ibar"]).unwrap();
        let ones = StateSet::new(["i"]).unwrap();
        let om = OutputMap::from_classes(&states, &zeros, &ones).unwrap();
        assert_eq!(om.output(&State::new("x")), Some(Output::Star));
        assert_eq!(om.class(&states, Output::One).as_slice().len(), 1);
    }

    #[test]
    fn overlapping_classes_rejected() {
        let states = StateSet::new(["i"]).unwrap();
        let c = StateSet::new(["i"]).unwrap();
        assert!(OutputMap::from_classes(&states, &c, &c).is_err());
    }
}
