//! Firing semantics, reachability exploration, and coverability.
//!
//! Coverability is decided backwards, as a fixpoint over minimal bases of
//! upward-closed sets. The forward Rackoff-style bound is exposed only as a
//! formula; it is far too large to drive a search even for tiny nets.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::net::{PetriNet, Transition};
use crate::state::{State, StateSet};

/// A word of transition indices into a fixed net.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct FiringWord(pub Vec<usize>);

impl FiringWord {
    pub fn empty() -> Self {
        FiringWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn concat(&self, other: &FiringWord) -> FiringWord {
        let mut steps = self.0.clone();
        steps.extend_from_slice(&other.0);
        FiringWord(steps)
    }
}

impl fmt::Display for FiringWord {
    /// Words print as 1-based transition tokens: `t1 t3 t1`; `-` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "t{}", t + 1)?;
        }
        Ok(())
    }
}

/// Caps on state-space exploration. Needed because non-conservative nets
/// can have infinite reachability sets.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ExplorationBudget {
    max_configurations: usize,
    max_depth: Option<usize>,
}

impl ExplorationBudget {
    pub fn new(max_configurations: usize) -> Result<Self> {
        if max_configurations == 0 {
            return Err(Error::ZeroBudget);
        }
        Ok(ExplorationBudget {
            max_configurations,
            max_depth: None,
        })
    }

    pub fn with_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = Some(max_depth);
        self
    }

    pub fn max_configurations(&self) -> usize {
        self.max_configurations
    }

    pub fn max_depth(&self) -> Option<usize> {
        self.max_depth
    }
}

/// Witness that `target` is coverable: firing `word` from the query source
/// reaches `reached ≥ target`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoverWitness {
    pub word: FiringWord,
    pub reached: Configuration,
}

/// Fires a single transition: `Some(c − pre + post)` when `c ≥ pre`,
/// `None` when disabled. Overflow on the addition is reported.
pub fn fire(c: &Configuration, t: &Transition) -> Result<Option<Configuration>> {
    match c.checked_sub(t.pre()) {
        None => Ok(None),
        Some(rest) => Ok(Some(rest.checked_add(t.post())?)),
    }
}

/// Left fold of [`fire`] over a word; `None` as soon as a step is disabled.
pub fn fire_word(net: &PetriNet, c: &Configuration, word: &FiringWord) -> Result<Option<Configuration>> {
    let mut current = c.clone();
    for index in word.iter() {
        let t = net.transition(index)?;
        match fire(&current, t)? {
            Some(next) => current = next,
            None => return Ok(None),
        }
    }
    Ok(Some(current))
}

/// Breadth-first reachability graph. Nodes are stored in discovery order;
/// node 0 is the root. `exhausted` is true only when the whole forward
/// closure fit in the budget.
#[derive(Clone, Debug)]
pub(crate) struct ReachGraph {
    pub nodes: Vec<Configuration>,
    pub index: HashMap<Configuration, usize>,
    /// Outgoing edges per node as `(transition index, successor node)`.
    pub succs: Vec<Vec<(usize, usize)>>,
    /// BFS tree parent: `(parent node, transition index)`.
    pub parent: Vec<Option<(usize, usize)>>,
    pub depth: Vec<usize>,
    pub exhausted: bool,
}

impl ReachGraph {
    /// The BFS-tree word from the root to `node`.
    pub fn word_to(&self, node: usize) -> FiringWord {
        let mut steps = Vec::new();
        let mut current = node;
        while let Some((parent, transition)) = self.parent[current] {
            steps.push(transition);
            current = parent;
        }
        steps.reverse();
        FiringWord(steps)
    }

    /// Nodes from which some node of `targets` is reachable (reverse BFS).
    pub fn backward_closure(&self, targets: &[bool]) -> Vec<bool> {
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (from, out) in self.succs.iter().enumerate() {
            for &(_, to) in out {
                preds[to].push(from);
            }
        }
        let mut marked = targets.to_vec();
        let mut queue: Vec<usize> =
            (0..self.nodes.len()).filter(|&i| marked[i]).collect();
        while let Some(n) = queue.pop() {
            for &p in &preds[n] {
                if !marked[p] {
                    marked[p] = true;
                    queue.push(p);
                }
            }
        }
        marked
    }
}

/// BFS closure of `{from}` under firing, transitions scanned in declaration
/// order. Deterministic node numbering.
pub(crate) fn explore(
    net: &PetriNet,
    from: &Configuration,
    budget: &ExplorationBudget,
) -> Result<ReachGraph> {
    let mut graph = ReachGraph {
        nodes: vec![from.clone()],
        index: HashMap::from([(from.clone(), 0)]),
        succs: vec![Vec::new()],
        parent: vec![None],
        depth: vec![0],
        exhausted: true,
    };
    let mut frontier = 0usize;
    while frontier < graph.nodes.len() {
        let node = frontier;
        frontier += 1;
        if let Some(max_depth) = budget.max_depth() {
            if graph.depth[node] >= max_depth {
                // Node is not expanded; only a genuinely new successor
                // makes the computed set incomplete.
                let current = graph.nodes[node].clone();
                for t in net.transitions() {
                    if let Some(next) = fire(&current, t)? {
                        if !graph.index.contains_key(&next) {
                            graph.exhausted = false;
                            break;
                        }
                    }
                }
                continue;
            }
        }
        let current = graph.nodes[node].clone();
        for (ti, t) in net.transitions().iter().enumerate() {
            let Some(next) = fire(&current, t)? else {
                continue;
            };
            if let Some(&existing) = graph.index.get(&next) {
                graph.succs[node].push((ti, existing));
                continue;
            }
            if graph.nodes.len() >= budget.max_configurations() {
                graph.exhausted = false;
                continue;
            }
            let id = graph.nodes.len();
            graph.index.insert(next.clone(), id);
            graph.nodes.push(next);
            graph.succs.push(Vec::new());
            graph.succs[node].push((ti, id));
            graph.parent.push(Some((node, ti)));
            graph.depth.push(graph.depth[node] + 1);
        }
    }
    Ok(graph)
}

/// Result of [`reachable_set`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReachSet {
    /// Reached configurations in BFS discovery order (the source first).
    pub configurations: Vec<Configuration>,
    /// True iff the forward closure completed within the budget; the set is
    /// then exactly the reachability set, otherwise an under-approximation.
    pub exhausted: bool,
}

impl ReachSet {
    pub fn contains(&self, c: &Configuration) -> bool {
        self.configurations.contains(c)
    }
}

/// Breadth-first closure of `{from}` under firing, within `budget`.
pub fn reachable_set(
    net: &PetriNet,
    from: &Configuration,
    budget: &ExplorationBudget,
) -> Result<ReachSet> {
    let graph = explore(net, from, budget)?;
    Ok(ReachSet {
        configurations: graph.nodes,
        exhausted: graph.exhausted,
    })
}

/// Minimal configuration that must hold before firing `t` so that the
/// result dominates `after`. Saturates at `u64::MAX`; a saturated entry can
/// never be met by a real configuration at desk scale.
fn cover_pred(after: &Configuration, t: &Transition) -> Configuration {
    let mut pairs: Vec<(State, u64)> = Vec::new();
    let mut states: Vec<&State> = after.support().collect();
    for s in t.pre().support().chain(t.post().support()) {
        if !states.contains(&s) {
            states.push(s);
        }
    }
    for s in states {
        let needed = (after.count(s) as i128) + (t.pre().count(s) as i128)
            - (t.post().count(s) as i128);
        let needed = needed.max(t.pre().count(s) as i128);
        let needed = u64::try_from(needed.max(0)).unwrap_or(u64::MAX);
        if needed > 0 {
            pairs.push((s.clone(), needed));
        }
    }
    Configuration::from_pairs(pairs).expect("pred entries are clamped to u64")
}

fn dominated_by_any(basis: &[Configuration], c: &Configuration) -> bool {
    basis.iter().any(|b| c.dominates(b))
}

fn minimize(mut basis: Vec<Configuration>) -> Vec<Configuration> {
    basis.sort();
    basis.dedup();
    // distinct elements cannot dominate each other mutually
    let keep: Vec<bool> = basis
        .iter()
        .enumerate()
        .map(|(i, c)| {
            !basis
                .iter()
                .enumerate()
                .any(|(j, other)| i != j && c.dominates(other))
        })
        .collect();
    basis
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

/// Backward-coverability fixpoint, one minimal antichain per step bound:
/// `levels[k]` is a minimal basis of the configurations from which `target`
/// is coverable in at most `k` steps. Terminates by the well-quasi-order on
/// configurations.
pub(crate) fn backward_cover_levels(net: &PetriNet, target: &Configuration) -> Vec<Vec<Configuration>> {
    let mut levels: Vec<Vec<Configuration>> = vec![minimize(vec![target.clone()])];
    loop {
        let current = levels.last().expect("at least one level");
        let mut next = current.clone();
        let mut changed = false;
        for b in current {
            for t in net.transitions() {
                let p = cover_pred(b, t);
                if !dominated_by_any(&next, &p) {
                    next.push(p);
                    changed = true;
                }
            }
        }
        if !changed {
            return levels;
        }
        levels.push(minimize(next));
    }
}

/// Minimal basis of the upward-closed set of configurations from which
/// `target` is coverable.
pub fn backward_cover_basis(net: &PetriNet, target: &Configuration) -> Vec<Configuration> {
    backward_cover_levels(net, target)
        .pop()
        .expect("at least one level")
}

fn cover_level(levels: &[Vec<Configuration>], c: &Configuration) -> Option<usize> {
    levels
        .iter()
        .position(|basis| dominated_by_any(basis, c))
}

/// Decides whether `target` is coverable from `from` and, if so, returns a
/// replayable witness. The word has minimal length, ties broken towards the
/// lexicographically smallest word in transition declaration order.
pub fn coverable(
    net: &PetriNet,
    from: &Configuration,
    target: &Configuration,
) -> Result<Option<CoverWitness>> {
    let levels = backward_cover_levels(net, target);
    let Some(total) = cover_level(&levels, from) else {
        return Ok(None);
    };
    let mut word = Vec::with_capacity(total);
    let mut current = from.clone();
    let mut remaining = total;
    while remaining > 0 {
        let mut advanced = false;
        for (ti, t) in net.transitions().iter().enumerate() {
            let Some(next) = fire(&current, t)? else {
                continue;
            };
            match cover_level(&levels, &next) {
                Some(level) if level < remaining => {
                    word.push(ti);
                    current = next;
                    remaining -= 1;
                    advanced = true;
                    break;
                }
                _ => {}
            }
        }
        if !advanced {
            return Err(Error::Internal(
                "backward basis admitted no forward step".to_string(),
            ));
        }
    }
    debug_assert!(current.dominates(target));
    Ok(Some(CoverWitness {
        word: FiringWord(word),
        reached: current,
    }))
}

/// Memoizing coverability oracle for repeated queries against one net.
/// Bases are keyed by target, so sweeping many sources against few targets
/// costs one fixpoint per target.
pub struct CoverabilityOracle<'a> {
    net: &'a PetriNet,
    bases: HashMap<Configuration, Vec<Configuration>>,
}

impl<'a> CoverabilityOracle<'a> {
    pub fn new(net: &'a PetriNet) -> Self {
        CoverabilityOracle {
            net,
            bases: HashMap::new(),
        }
    }

    pub fn net(&self) -> &'a PetriNet {
        self.net
    }

    /// Coverability verdict without witness construction.
    pub fn can_cover(&mut self, from: &Configuration, target: &Configuration) -> bool {
        let basis = self
            .bases
            .entry(target.clone())
            .or_insert_with(|| backward_cover_basis(self.net, target));
        dominated_by_any(basis, from)
    }
}

/// Lifts a projected run back to the full net. `word` names transitions
/// of `net`; the run `α|_Q → ρ` must hold in the projected net, and every
/// state outside `q` must carry at least `|word|·‖T‖∞` agents in `alpha`.
/// Returns the configuration `β` reached by firing `word` from `alpha`;
/// it satisfies `β|_Q = ρ` and `β(p) ≥ α(p) − |word|·‖T‖∞` outside `q`.
pub fn lift(
    net: &PetriNet,
    alpha: &Configuration,
    q: &StateSet,
    word: &FiringWord,
    rho: &Configuration,
) -> Result<Configuration> {
    // Validate the projected run.
    let mut projected = alpha.restrict(q);
    for (step, index) in word.iter().enumerate() {
        let t = net.transition(index)?.restrict(q);
        match fire(&projected, &t)? {
            Some(next) => projected = next,
            None => {
                return Err(Error::Precondition(format!(
                    "projected word is not fireable: step {} (t{}) disabled",
                    step + 1,
                    index + 1
                )))
            }
        }
    }
    if projected != *rho {
        return Err(Error::Precondition(format!(
            "projected run ends in {projected}, expected {rho}"
        )));
    }
    // Validate the margin on states outside q.
    let margin = (word.len() as u128) * (net.norm_inf() as u128);
    for p in net.states().iter() {
        if !q.contains(p) && (alpha.count(p) as u128) < margin {
            return Err(Error::Precondition(format!(
                "state `{p}` carries {} agents, lifting needs at least {margin}",
                alpha.count(p)
            )));
        }
    }
    // The margins make every step enabled in the full net.
    let beta = fire_word(net, alpha, word)?
        .expect("validated projected run and margins make the full run fireable");
    debug_assert_eq!(beta.restrict(q), *rho);
    Ok(beta)
}

/// The coverability length bound `(target_norm + net_norm)^(n^n)` with
/// `n = num_states` and the convention `0^0 = 1`. Exact arbitrary-precision
/// evaluation; intended for desk-scale arguments (the exponent must fit in
/// a machine word to materialize).
pub fn rackoff_bound(num_states: u64, target_norm: u64, net_norm: u64) -> BigUint {
    let base = BigUint::from(target_norm) + BigUint::from(net_norm);
    let exponent: u64 = if num_states == 0 {
        1
    } else {
        let mut e: u64 = 1;
        for _ in 0..num_states {
            e = e
                .checked_mul(num_states)
                .expect("rackoff exponent exceeds machine range");
        }
        e
    };
    if base == BigUint::from(0u32) {
        return BigUint::from(0u32);
    }
    base.pow(u32::try_from(exponent).expect("rackoff exponent too large to materialize"))
}
