//! Output stability: extended outputs, membership in the 0/1-output stable
//! sets, `(T,F)`-stabilization, and the small-value region check.

use std::collections::BTreeSet;
use std::fmt;

use crate::config::Configuration;
use crate::error::Result;
use crate::net::{Output, PetriNet, Protocol};
use crate::reach::{
    coverable, explore, CoverabilityOracle, ExplorationBudget, FiringWord,
};
use crate::state::{State, StateSet};

/// Verdict of [`output_stable`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OutputVerdict {
    /// Every reachable configuration has outputs `⊆ {0}`.
    StableZero,
    /// Every reachable configuration has outputs exactly `{1}`.
    StableOne,
    /// Neither; carries replayable evidence for both failures.
    Unstable(Box<UnstableWitness>),
    /// The zero-reachability sub-query of the 1-stability check ran out of
    /// budget; no verdict.
    Unknown,
}

impl fmt::Display for OutputVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputVerdict::StableZero => "STABLE0",
            OutputVerdict::StableOne => "STABLE1",
            OutputVerdict::Unstable(_) => "UNSTABLE",
            OutputVerdict::Unknown => "UNKNOWN",
        })
    }
}

/// A replayable reachability trace that violates one stability class.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub word: FiringWord,
    pub reached: Configuration,
    /// The populated state whose output breaks the class, or `None` when
    /// the violation is reaching the zero configuration.
    pub state: Option<State>,
}

/// Evidence that a configuration is neither 0- nor 1-output stable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnstableWitness {
    /// A reachable configuration populating a state with output `⋆` or `1`.
    pub not_zero_stable: Violation,
    /// A reachable configuration populating a state with output `0` or `⋆`,
    /// or reaching the zero configuration.
    pub not_one_stable: Violation,
}

/// The extended output `γ(ρ)`: outputs of all populated states.
pub fn gamma_extended(protocol: &Protocol, c: &Configuration) -> BTreeSet<Output> {
    c.support().map(|s| protocol.output(s)).collect()
}

/// `(T,F)`-stabilization: no state outside `f` is coverable from `c`.
/// This matches the definition on reachable configurations because a state
/// is populated by some reachable configuration iff its singleton is
/// coverable.
pub fn is_stabilized(net: &PetriNet, f: &StateSet, c: &Configuration) -> bool {
    let mut oracle = CoverabilityOracle::new(net);
    is_stabilized_with(&mut oracle, f, c)
}

/// As [`is_stabilized`], reusing a memoized coverability oracle. Sweeping
/// many configurations against one net pays for each backward basis once.
pub fn is_stabilized_with(
    oracle: &mut CoverabilityOracle<'_>,
    f: &StateSet,
    c: &Configuration,
) -> bool {
    stabilization_breaker(oracle, f, c).is_none()
}

/// First state outside `f` (in declaration order) coverable from `c`.
fn stabilization_breaker(
    oracle: &mut CoverabilityOracle<'_>,
    f: &StateSet,
    c: &Configuration,
) -> Option<State> {
    let states: Vec<State> = oracle.net().states().iter().cloned().collect();
    states
        .into_iter()
        .filter(|p| !f.contains(p))
        .find(|p| oracle.can_cover(c, &Configuration::singleton(p.clone())))
}

/// Decides membership of `c` in the 0- and 1-output stable sets.
///
/// 0-stability reduces to `(T, γ⁻¹({0}))`-stabilization. 1-stability holds
/// iff no state with output `0` or `⋆` is coverable, `c` is not the zero
/// configuration, and the zero configuration is unreachable; the last part
/// is exact for conservative nets and budget-limited otherwise, surfacing
/// `Unknown` when the budget runs out.
pub fn output_stable(
    protocol: &Protocol,
    c: &Configuration,
    budget: &ExplorationBudget,
) -> Result<OutputVerdict> {
    let net = protocol.net();
    let f0 = protocol.output_class(Output::Zero);
    let f1 = protocol.output_class(Output::One);
    let mut oracle = CoverabilityOracle::new(net);

    let not_zero_stable = match stabilization_breaker(&mut oracle, &f0, c) {
        None => return Ok(OutputVerdict::StableZero),
        Some(state) => {
            let witness = coverable(net, c, &Configuration::singleton(state.clone()))?
                .expect("oracle verdict and witness search agree");
            Violation {
                word: witness.word,
                reached: witness.reached,
                state: Some(state),
            }
        }
    };

    let not_one_stable = match stabilization_breaker(&mut oracle, &f1, c) {
        Some(state) => {
            let witness = coverable(net, c, &Configuration::singleton(state.clone()))?
                .expect("oracle verdict and witness search agree");
            Some(Violation {
                word: witness.word,
                reached: witness.reached,
                state: Some(state),
            })
        }
        None if c.is_zero() => Some(Violation {
            word: FiringWord::empty(),
            reached: Configuration::zero(),
            state: None,
        }),
        None if net.is_conservative() => None,
        None => {
            // Zero is reachable only through agent destruction; search for it.
            let graph = explore(net, c, budget)?;
            match graph.index.get(&Configuration::zero()) {
                Some(&node) => Some(Violation {
                    word: graph.word_to(node),
                    reached: Configuration::zero(),
                    state: None,
                }),
                None if graph.exhausted => None,
                None => return Ok(OutputVerdict::Unknown),
            }
        }
    };

    match not_one_stable {
        None => Ok(OutputVerdict::StableOne),
        Some(not_one_stable) => Ok(OutputVerdict::Unstable(Box::new(UnstableWitness {
            not_zero_stable,
            not_one_stable,
        }))),
    }
}

/// Outcome of one sample in [`stabilized_region_check`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SampleOutcome {
    /// The sample does not satisfy `α|_R ≤ ρ|_R` and was skipped.
    Filtered,
    /// The sample satisfies the filter and is stabilized.
    Stabilized,
    /// The sample satisfies the filter but is not stabilized.
    Counterexample,
}

/// Report of [`stabilized_region_check`], one outcome per sample in input
/// order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RegionReport {
    /// `R = {p | ρ(p) < h}`.
    pub region: StateSet,
    /// Whether the reference configuration itself is stabilized.
    pub rho_stabilized: bool,
    pub outcomes: Vec<SampleOutcome>,
}

impl RegionReport {
    /// Indices of samples that falsify the small-value characterization.
    pub fn counterexamples(&self) -> Vec<usize> {
        self.outcomes
            .iter()
            .enumerate()
            .filter_map(|(i, o)| (*o == SampleOutcome::Counterexample).then_some(i))
            .collect()
    }
}

/// Falsification harness for the small-value characterization of
/// stabilized configurations: computes `R = {p | ρ(p) < h}`, filters the
/// samples to those with `α|_R ≤ ρ|_R`, and checks each for stabilization.
/// When `h` is at least `‖T‖∞(1+‖T‖∞)^(|P|^|P|)` and `ρ` is stabilized, no
/// counterexample can exist; for smaller `h` the filter is weaker and
/// counterexamples are reported as such.
pub fn stabilized_region_check(
    net: &PetriNet,
    f: &StateSet,
    rho: &Configuration,
    h: u64,
    samples: &[Configuration],
) -> RegionReport {
    let region = StateSet::new(
        net.states()
            .iter()
            .filter(|p| rho.count(p) < h)
            .cloned(),
    )
    .expect("subset of a state set has no duplicates");
    let mut oracle = CoverabilityOracle::new(net);
    let rho_stabilized = is_stabilized_with(&mut oracle, f, rho);
    let rho_region = rho.restrict(&region);
    let outcomes = samples
        .iter()
        .map(|alpha| {
            if !rho_region.dominates(&alpha.restrict(&region)) {
                SampleOutcome::Filtered
            } else if is_stabilized_with(&mut oracle, f, alpha) {
                SampleOutcome::Stabilized
            } else {
                SampleOutcome::Counterexample
            }
        })
        .collect();
    RegionReport {
        region,
        rho_stabilized,
        outcomes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::example2_protocol;

    fn cfg(pairs: &[(&str, u64)]) -> Configuration {
        Configuration::from_pairs(pairs.iter().map(|&(s, c)| (s, c))).unwrap()
    }

    fn budget() -> ExplorationBudget {
        ExplorationBudget::new(100_000).unwrap()
    }

    #[test]
    fn gamma_extended_examples() {
        let p = example2_protocol(2).unwrap();
        assert!(gamma_extended(&p, &Configuration::zero()).is_empty());
        assert_eq!(
            gamma_extended(&p, &cfg(&[("p", 1), ("q", 1)])),
            BTreeSet::from([Output::One])
        );
        assert_eq!(
            gamma_extended(&p, &cfg(&[("i", 1), ("ibar", 1)])),
            BTreeSet::from([Output::Zero, Output::One])
        );
    }

    #[test]
    fn is_stabilized_examples() {
        let p = example2_protocol(2).unwrap();
        let net = p.net();
        // F = P: vacuous
        assert!(is_stabilized(net, net.states(), &cfg(&[("i", 9), ("p", 4)])));
        let f = p.output_class(Output::Zero);
        assert!(is_stabilized(net, &f, &cfg(&[("ibar", 2), ("pbar", 1)])));
        assert!(!is_stabilized(net, &f, &cfg(&[("i", 1), ("ibar", 1)])));
    }

    #[test]
    fn output_stable_examples() {
        let p = example2_protocol(2).unwrap();
        assert_eq!(
            output_stable(&p, &Configuration::zero(), &budget()).unwrap(),
            OutputVerdict::StableZero
        );
        assert_eq!(
            output_stable(&p, &cfg(&[("pbar", 1), ("qbar", 1), ("ibar", 2)]), &budget()).unwrap(),
            OutputVerdict::StableZero
        );
        assert_eq!(
            output_stable(&p, &cfg(&[("p", 1), ("q", 1)]), &budget()).unwrap(),
            OutputVerdict::StableOne
        );
    }

    #[test]
    fn unstable_witness_replays() {
        let p = example2_protocol(2).unwrap();
        // i+ibar can still flip either way
        let c = cfg(&[("i", 1), ("ibar", 1)]);
        let OutputVerdict::Unstable(w) = output_stable(&p, &c, &budget()).unwrap() else {
            panic!("expected UNSTABLE");
        };
        for v in [&w.not_zero_stable, &w.not_one_stable] {
            let reached = crate::reach::fire_word(p.net(), &c, &v.word).unwrap().unwrap();
            assert_eq!(reached, v.reached);
            if let Some(state) = &v.state {
                assert!(reached.count(state) > 0);
            } else {
                assert!(reached.is_zero());
            }
        }
        // the not-zero-stable side must populate a ⋆/1 state, the other a 0/⋆ state
        let s0 = w.not_zero_stable.state.as_ref().unwrap();
        assert_ne!(p.output(s0), Output::Zero);
        let s1 = w.not_one_stable.state.as_ref().unwrap();
        assert_ne!(p.output(s1), Output::One);
    }

    #[test]
    fn zero_config_never_stable_one() {
        let p = example2_protocol(1).unwrap();
        let v = output_stable(&p, &Configuration::zero(), &budget()).unwrap();
        assert_eq!(v, OutputVerdict::StableZero);
    }

    #[test]
    fn region_check_reference_passes() {
        let p = example2_protocol(2).unwrap();
        let f = p.output_class(Output::Zero);
        let rho = cfg(&[("ibar", 2)]);
        let report = stabilized_region_check(p.net(), &f, &rho, 1, &[rho.clone()]);
        assert!(report.rho_stabilized);
        assert_eq!(report.outcomes, vec![SampleOutcome::Stabilized]);
        assert!(report.counterexamples().is_empty());
    }

    #[test]
    fn region_check_h_zero_filters_nothing() {
        let p = example2_protocol(2).unwrap();
        let f = p.output_class(Output::Zero);
        let rho = cfg(&[("ibar", 1)]);
        // h = 0: R is empty, so even non-stabilized samples pass the filter
        let report = stabilized_region_check(
            p.net(),
            &f,
            &rho,
            0,
            &[cfg(&[("i", 1), ("ibar", 1)]), cfg(&[("ibar", 5)])],
        );
        assert!(report.region.is_empty());
        assert_eq!(
            report.outcomes,
            vec![SampleOutcome::Counterexample, SampleOutcome::Stabilized]
        );
        assert_eq!(report.counterexamples(), vec![0]);
    }

    #[test]
    fn region_check_example2_sample() {
        let p = example2_protocol(2).unwrap();
        let f = p.output_class(Output::Zero);
        let rho = cfg(&[("ibar", 1)]);
        let report = stabilized_region_check(p.net(), &f, &rho, 1, &[cfg(&[("ibar", 5)])]);
        assert_eq!(report.outcomes, vec![SampleOutcome::Stabilized]);
    }

    #[test]
    fn stabilization_antitone_in_f_complement() {
        let p = example2_protocol(2).unwrap();
        let net = p.net();
        let f_small = p.output_class(Output::Zero);
        let f_large = f_small.union(&StateSet::new(["p"]).unwrap());
        for c in [
            cfg(&[("ibar", 2)]),
            cfg(&[("i", 1), ("ibar", 1)]),
            cfg(&[("p", 1), ("qbar", 2)]),
        ] {
            if is_stabilized(net, &f_small, &c) {
                assert!(is_stabilized(net, &f_large, &c));
            }
        }
    }
}
