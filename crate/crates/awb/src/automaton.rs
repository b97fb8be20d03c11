//! Automata with boundary: reflexive graphs whose motions carry one action
//! per boundary.
//!
//! Every state owns exactly one designated reflexive motion, a self-loop
//! that is trivial on every boundary. Composite automata built by the
//! algebra keep their state spaces as products ([`StateSpace::Pair`]) so
//! that a state of a composed system decomposes back into the local states
//! of its components without storing one name string per product state.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::action::{ActionId, BoundarySignature};
use crate::error::InputError;

/// Index of a state within its automaton.
pub type StateId = u32;
/// Index of a motion within its automaton.
pub type MotionId = u32;

static LEAF_UID: AtomicU64 = AtomicU64::new(1);

/// The set of states of an automaton, with enough structure to render the
/// original identifiers and to decompose product states into coordinates.
#[derive(Clone)]
pub enum StateSpace {
    /// Explicitly named states (leaf automata). The `uid` identifies the
    /// construction site so composites built from the same operands can be
    /// matched coordinate-wise.
    Named { uid: u64, names: Arc<Vec<String>> },
    /// Row-major Cartesian product: index `i` denotes the pair
    /// `(i / right.len(), i % right.len())`.
    Pair(Arc<StateSpace>, Arc<StateSpace>),
    /// A subset of a base space, in strictly increasing base order.
    Subset {
        base: Arc<StateSpace>,
        kept: Arc<Vec<StateId>>,
    },
}

impl StateSpace {
    pub fn named(names: Vec<String>) -> Self {
        StateSpace::Named {
            uid: LEAF_UID.fetch_add(1, Ordering::Relaxed),
            names: Arc::new(names),
        }
    }

    pub fn pair(left: &StateSpace, right: &StateSpace) -> Self {
        StateSpace::Pair(Arc::new(left.clone()), Arc::new(right.clone()))
    }

    /// Subset of `base` given by `kept` (must be strictly increasing).
    /// A subset of a subset flattens to a subset of the original base, so
    /// repeated restriction is idempotent on the representation.
    pub fn subset(base: &StateSpace, kept: Vec<StateId>) -> Self {
        debug_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        match base {
            StateSpace::Subset {
                base: inner,
                kept: inner_kept,
            } => StateSpace::Subset {
                base: inner.clone(),
                kept: Arc::new(kept.iter().map(|&i| inner_kept[i as usize]).collect()),
            },
            other => StateSpace::Subset {
                base: Arc::new(other.clone()),
                kept: Arc::new(kept),
            },
        }
    }

    pub fn len(&self) -> usize {
        match self {
            StateSpace::Named { names, .. } => names.len(),
            StateSpace::Pair(l, r) => l.len() * r.len(),
            StateSpace::Subset { kept, .. } => kept.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self, i: StateId) -> String {
        match self {
            StateSpace::Named { names, .. } => names[i as usize].clone(),
            StateSpace::Pair(l, r) => {
                let n = r.len() as StateId;
                format!("({},{})", l.name(i / n), r.name(i % n))
            }
            StateSpace::Subset { base, kept } => base.name(kept[i as usize]),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<StateId> {
        (0..self.len() as StateId).find(|&i| self.name(i) == name)
    }

    /// Sizes of the leaf factors, left to right. `None` when the space has
    /// been restricted to a subset and is no longer a full product.
    pub fn leaf_radices(&self) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        if self.collect_radices(&mut out) {
            Some(out)
        } else {
            None
        }
    }

    fn collect_radices(&self, out: &mut Vec<usize>) -> bool {
        match self {
            StateSpace::Named { names, .. } => {
                out.push(names.len());
                true
            }
            StateSpace::Pair(l, r) => l.collect_radices(out) && r.collect_radices(out),
            StateSpace::Subset { .. } => false,
        }
    }

    /// Construction-site uids of the leaf factors, left to right.
    pub fn leaf_uids(&self) -> Option<Vec<u64>> {
        match self {
            StateSpace::Named { uid, .. } => Some(vec![*uid]),
            StateSpace::Pair(l, r) => {
                let mut out = l.leaf_uids()?;
                out.extend(r.leaf_uids()?);
                Some(out)
            }
            StateSpace::Subset { .. } => None,
        }
    }

    /// Decomposes a state index into leaf coordinates (mixed radix, most
    /// significant leaf first). For subsets the index is first translated to
    /// the base space.
    pub fn coords(&self, i: StateId, out: &mut Vec<StateId>) {
        match self {
            StateSpace::Named { .. } => out.push(i),
            StateSpace::Pair(l, r) => {
                let n = r.len() as StateId;
                l.coords(i / n, out);
                r.coords(i % n, out);
            }
            StateSpace::Subset { base, kept } => base.coords(kept[i as usize], out),
        }
    }
}

impl PartialEq for StateSpace {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (StateSpace::Named { uid: a, .. }, StateSpace::Named { uid: b, .. }) if a == b => {
                return true;
            }
            (
                StateSpace::Subset { base: a, kept: ka },
                StateSpace::Subset { base: b, kept: kb },
            ) => return ka == kb && a == b,
            _ => {}
        }
        self.len() == other.len()
            && (0..self.len() as StateId).all(|i| self.name(i) == other.name(i))
    }
}

impl Eq for StateSpace {}

impl fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateSpace[{}]", self.len())
    }
}

/// Motion storage, one row per motion. Labels are flattened row-major:
/// motion `m` carries `labels[m * arity .. (m + 1) * arity]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Motions {
    arity: usize,
    sources: Vec<StateId>,
    targets: Vec<StateId>,
    labels: Vec<ActionId>,
}

impl Motions {
    pub fn new(arity: usize) -> Self {
        Motions {
            arity,
            sources: Vec::new(),
            targets: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn with_capacity(arity: usize, cap: usize) -> Self {
        Motions {
            arity,
            sources: Vec::with_capacity(cap),
            targets: Vec::with_capacity(cap),
            labels: Vec::with_capacity(cap.saturating_mul(arity)),
        }
    }

    pub fn push(&mut self, source: StateId, target: StateId, labels: &[ActionId]) -> MotionId {
        debug_assert_eq!(labels.len(), self.arity);
        self.sources.push(source);
        self.targets.push(target);
        self.labels.extend_from_slice(labels);
        (self.sources.len() - 1) as MotionId
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn source(&self, m: MotionId) -> StateId {
        self.sources[m as usize]
    }

    pub fn target(&self, m: MotionId) -> StateId {
        self.targets[m as usize]
    }

    pub fn labels(&self, m: MotionId) -> &[ActionId] {
        &self.labels[m as usize * self.arity..(m as usize + 1) * self.arity]
    }

    pub fn label(&self, m: MotionId, boundary: usize) -> ActionId {
        self.labels[m as usize * self.arity + boundary]
    }

    pub fn iter(&self) -> impl Iterator<Item = MotionId> + '_ {
        0..self.len() as MotionId
    }
}

/// An automaton with boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    signature: BoundarySignature,
    states: StateSpace,
    motions: Motions,
    /// Designated reflexive motion of each state.
    reflexive_of: Vec<MotionId>,
    initial: Option<StateId>,
}

impl Automaton {
    /// Assembles an automaton without validating the reflexivity and
    /// labelling invariants; pair with [`Automaton::validate`].
    pub fn from_raw_parts(
        signature: BoundarySignature,
        states: StateSpace,
        motions: Motions,
        reflexive_of: Vec<MotionId>,
        initial: Option<StateId>,
    ) -> Self {
        Automaton {
            signature,
            states,
            motions,
            reflexive_of,
            initial,
        }
    }

    pub fn signature(&self) -> &BoundarySignature {
        &self.signature
    }

    pub fn arity(&self) -> usize {
        self.signature.arity()
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, i: StateId) -> String {
        self.states.name(i)
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.index_of(name)
    }

    pub fn motions(&self) -> &Motions {
        &self.motions
    }

    pub fn motion_count(&self) -> usize {
        self.motions.len()
    }

    pub fn reflexive_of(&self, state: StateId) -> MotionId {
        self.reflexive_of[state as usize]
    }

    pub fn is_reflexive(&self, m: MotionId) -> bool {
        self.reflexive_of[self.motions.source(m) as usize] == m
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub fn with_initial(mut self, initial: Option<StateId>) -> Self {
        self.initial = initial;
        self
    }

    /// A motion performing the trivial action on every boundary.
    pub fn is_internal(&self, m: MotionId) -> bool {
        let labels = self.motions.labels(m);
        labels
            .iter()
            .enumerate()
            .all(|(i, &a)| self.signature.boundary(i).is_trivial(a))
    }

    /// Number of boundaries on which the motion acts nontrivially.
    pub fn nontrivial_degree(&self, m: MotionId) -> usize {
        self.motions
            .labels(m)
            .iter()
            .enumerate()
            .filter(|&(i, &a)| !self.signature.boundary(i).is_trivial(a))
            .count()
    }

    /// Nontrivial on at most one boundary.
    pub fn is_linear_motion(&self, m: MotionId) -> bool {
        self.nontrivial_degree(m) <= 1
    }

    /// Every motion is linear.
    pub fn is_linear(&self) -> bool {
        self.motions.iter().all(|m| self.is_linear_motion(m))
    }

    pub fn linear_motions(&self) -> Vec<MotionId> {
        self.motions
            .iter()
            .filter(|&m| self.is_linear_motion(m))
            .collect()
    }

    /// Outgoing motion lists per state.
    pub fn adjacency(&self) -> Vec<Vec<MotionId>> {
        let mut adj = vec![Vec::new(); self.state_count()];
        for m in self.motions.iter() {
            adj[self.motions.source(m) as usize].push(m);
        }
        adj
    }

    /// A state whose only outgoing motion is its reflexive motion.
    pub fn is_deadlock_state(&self, adjacency: &[Vec<MotionId>], v: StateId) -> bool {
        adjacency[v as usize]
            .iter()
            .all(|&m| self.is_reflexive(m))
    }

    /// All deadlock states, in index order.
    pub fn deadlock_states(&self) -> Vec<StateId> {
        let adj = self.adjacency();
        (0..self.state_count() as StateId)
            .filter(|&v| self.is_deadlock_state(&adj, v))
            .collect()
    }

    /// Checks every structural invariant, returning the violations found.
    /// An automaton constructed by this crate's operations always validates;
    /// the report exists for externally assembled data.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n_states = self.state_count();
        let arity = self.arity();
        if self.motions.arity() != arity {
            out.push(Violation::LabelArity {
                motion: None,
                expected: arity,
                found: self.motions.arity(),
            });
            return out;
        }
        if self.reflexive_of.len() != n_states {
            out.push(Violation::MissingReflexive {
                state: self.reflexive_of.len() as StateId,
            });
            return out;
        }
        for m in self.motions.iter() {
            let (src, tgt) = (self.motions.source(m), self.motions.target(m));
            if src as usize >= n_states || tgt as usize >= n_states {
                out.push(Violation::DanglingEndpoint { motion: m });
                continue;
            }
            for (i, &a) in self.motions.labels(m).iter().enumerate() {
                if a as usize >= self.signature.boundary(i).len() {
                    out.push(Violation::UnknownAction {
                        motion: m,
                        boundary: i,
                    });
                }
            }
        }
        for (v, &r) in self.reflexive_of.iter().enumerate() {
            let v = v as StateId;
            if r as usize >= self.motions.len() {
                out.push(Violation::MissingReflexive { state: v });
                continue;
            }
            if self.motions.source(r) != v || self.motions.target(r) != v {
                out.push(Violation::ReflexiveNotSelfLoop { state: v, motion: r });
            }
            for (i, &a) in self.motions.labels(r).iter().enumerate() {
                if i < arity && !self.signature.boundary(i).is_trivial(a) {
                    out.push(Violation::ReflexiveNontrivial {
                        state: v,
                        motion: r,
                        boundary: i,
                    });
                }
            }
        }
        if let Some(init) = self.initial {
            if init as usize >= n_states {
                out.push(Violation::BadInitial { state: init });
            }
        }
        out
    }

    /// Labels of a behaviour's motions on one boundary.
    pub fn appearance(
        &self,
        behaviour: &Behaviour,
        boundary: usize,
    ) -> Result<Vec<ActionId>, InputError> {
        if boundary >= self.arity() {
            return Err(InputError::BoundaryOutOfRange {
                index: boundary,
                arity: self.arity(),
            });
        }
        behaviour.check_valid(self)?;
        Ok(behaviour
            .steps
            .iter()
            .map(|&m| self.motions.label(m, boundary))
            .collect())
    }

    /// Appearance with all trivial actions elided.
    pub fn reduced_appearance(
        &self,
        behaviour: &Behaviour,
        boundary: usize,
    ) -> Result<Vec<ActionId>, InputError> {
        let trivial = self.signature.boundary(boundary).reflexive();
        Ok(self
            .appearance(behaviour, boundary)?
            .into_iter()
            .filter(|&a| a != trivial)
            .collect())
    }

    /// The subautomaton of states path-reachable from `from`, with all
    /// motions between them and `from` as initial state. State identifiers
    /// are preserved.
    pub fn reachable(&self, from: StateId) -> Result<Automaton, InputError> {
        Ok(self.reachable_with_maps(from)?.0)
    }

    /// Restriction of the automaton to its reachable part from its initial
    /// state.
    pub fn reachable_from_initial(&self) -> Result<Automaton, InputError> {
        let init = self.initial.ok_or(InputError::MissingInitial {
            name: "<anonymous>".into(),
        })?;
        self.reachable(init)
    }

    /// As [`Automaton::reachable`], also returning the old-to-new index maps
    /// for states and motions.
    pub fn reachable_with_maps(
        &self,
        from: StateId,
    ) -> Result<(Automaton, Vec<Option<StateId>>, Vec<Option<MotionId>>), InputError> {
        if from as usize >= self.state_count() {
            return Err(InputError::StateOutOfRange {
                index: from as usize,
                count: self.state_count(),
            });
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.state_count()];
        let mut queue = VecDeque::new();
        seen[from as usize] = true;
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            for &m in &adj[v as usize] {
                let t = self.motions.target(m);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    queue.push_back(t);
                }
            }
        }
        let kept: Vec<StateId> = (0..self.state_count() as StateId)
            .filter(|&v| seen[v as usize])
            .collect();
        let mut state_map = vec![None; self.state_count()];
        for (new, &old) in kept.iter().enumerate() {
            state_map[old as usize] = Some(new as StateId);
        }
        let mut motions = Motions::new(self.arity());
        let mut motion_map = vec![None; self.motion_count()];
        let mut reflexive_of = vec![0; kept.len()];
        for m in self.motions.iter() {
            let (src, tgt) = (self.motions.source(m), self.motions.target(m));
            if let (Some(ns), Some(nt)) = (state_map[src as usize], state_map[tgt as usize]) {
                let nm = motions.push(ns, nt, self.motions.labels(m));
                motion_map[m as usize] = Some(nm);
                if self.reflexive_of[src as usize] == m {
                    reflexive_of[ns as usize] = nm;
                }
            }
        }
        let aut = Automaton {
            signature: self.signature.clone(),
            states: StateSpace::subset(&self.states, kept),
            motions,
            reflexive_of,
            initial: Some(state_map[from as usize].unwrap()),
        };
        Ok((aut, state_map, motion_map))
    }

    /// The subautomaton with all states but only the linear motions.
    /// Reflexive motions are trivial everywhere, hence linear, hence kept.
    pub fn linearize(&self) -> Automaton {
        let mut motions = Motions::new(self.arity());
        let mut reflexive_of = vec![0; self.state_count()];
        for m in self.motions.iter() {
            if self.is_linear_motion(m) {
                let nm = motions.push(
                    self.motions.source(m),
                    self.motions.target(m),
                    self.motions.labels(m),
                );
                if self.reflexive_of[self.motions.source(m) as usize] == m {
                    reflexive_of[self.motions.source(m) as usize] = nm;
                }
            }
        }
        Automaton {
            signature: self.signature.clone(),
            states: self.states.clone(),
            motions,
            reflexive_of,
            initial: self.initial,
        }
    }

    /// Enumerates behaviours of exactly `len` steps starting at `from`.
    /// Intended for small automata; the count grows with `out-degree^len`.
    pub fn behaviours_of_length(&self, from: StateId, len: usize) -> Vec<Behaviour> {
        let adj = self.adjacency();
        let mut out = Vec::new();
        let mut steps = Vec::with_capacity(len);
        self.enumerate_behaviours(&adj, from, from, len, &mut steps, &mut out);
        out
    }

    fn enumerate_behaviours(
        &self,
        adj: &[Vec<MotionId>],
        start: StateId,
        at: StateId,
        remaining: usize,
        steps: &mut Vec<MotionId>,
        out: &mut Vec<Behaviour>,
    ) {
        if remaining == 0 {
            out.push(Behaviour {
                start,
                steps: steps.clone(),
            });
            return;
        }
        for &m in &adj[at as usize] {
            steps.push(m);
            self.enumerate_behaviours(adj, start, self.motions.target(m), remaining - 1, steps, out);
            steps.pop();
        }
    }
}

/// An invariant violation found by [`Automaton::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    LabelArity {
        motion: Option<MotionId>,
        expected: usize,
        found: usize,
    },
    DanglingEndpoint {
        motion: MotionId,
    },
    UnknownAction {
        motion: MotionId,
        boundary: usize,
    },
    MissingReflexive {
        state: StateId,
    },
    ReflexiveNotSelfLoop {
        state: StateId,
        motion: MotionId,
    },
    ReflexiveNontrivial {
        state: StateId,
        motion: MotionId,
        boundary: usize,
    },
    BadInitial {
        state: StateId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LabelArity {
                motion,
                expected,
                found,
            } => match motion {
                Some(m) => write!(f, "motion {m}: label vector has length {found}, expected {expected}"),
                None => write!(f, "label storage arity {found} does not match signature arity {expected}"),
            },
            Violation::DanglingEndpoint { motion } => {
                write!(f, "motion {motion}: endpoint is not a state")
            }
            Violation::UnknownAction { motion, boundary } => {
                write!(f, "motion {motion}: label on boundary {boundary} is not in the action set")
            }
            Violation::MissingReflexive { state } => {
                write!(f, "state {state}: no designated reflexive motion")
            }
            Violation::ReflexiveNotSelfLoop { state, motion } => {
                write!(f, "state {state}: reflexive motion {motion} is not a self-loop")
            }
            Violation::ReflexiveNontrivial {
                state,
                motion,
                boundary,
            } => write!(
                f,
                "state {state}: reflexive motion {motion} performs a nontrivial action on boundary {boundary}"
            ),
            Violation::BadInitial { state } => write!(f, "initial state {state} is not a state"),
        }
    }
}

/// A path in the state space: a start state and a sequence of motions, each
/// motion's source matching the previous target. Infinite behaviours are
/// represented by their finite prefixes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Behaviour {
    pub start: StateId,
    pub steps: Vec<MotionId>,
}

impl Behaviour {
    pub fn new(start: StateId, steps: Vec<MotionId>) -> Self {
        Behaviour { start, steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self, a: &Automaton) -> StateId {
        self.steps
            .last()
            .map(|&m| a.motions().target(m))
            .unwrap_or(self.start)
    }

    pub fn check_valid(&self, a: &Automaton) -> Result<(), InputError> {
        if self.start as usize >= a.state_count() {
            return Err(InputError::BadBehaviour {
                reason: format!("start state {} out of range", self.start),
            });
        }
        let mut at = self.start;
        for (k, &m) in self.steps.iter().enumerate() {
            if m as usize >= a.motion_count() {
                return Err(InputError::BadBehaviour {
                    reason: format!("step {k}: motion {m} out of range"),
                });
            }
            if a.motions().source(m) != at {
                return Err(InputError::BadBehaviour {
                    reason: format!(
                        "step {k}: motion source {} does not continue from {}",
                        a.motions().source(m),
                        at
                    ),
                });
            }
            at = a.motions().target(m);
        }
        Ok(())
    }
}

/// Incremental construction of a leaf automaton with named states.
pub struct AutomatonBuilder {
    signature: BoundarySignature,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    motions: Vec<(StateId, StateId, Vec<ActionId>)>,
    initial: Option<StateId>,
}

impl AutomatonBuilder {
    pub fn new(signature: BoundarySignature) -> Self {
        AutomatonBuilder {
            signature,
            names: Vec::new(),
            index: HashMap::new(),
            motions: Vec::new(),
            initial: None,
        }
    }

    pub fn state(&mut self, name: impl Into<String>) -> Result<StateId, InputError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(InputError::invalid(
                "state declaration",
                format!("duplicate state `{name}`"),
            ));
        }
        let id = self.names.len() as StateId;
        self.index.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn states<I, S>(&mut self, names: I) -> Result<&mut Self, InputError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for n in names {
            self.state(n)?;
        }
        Ok(self)
    }

    fn resolve(&self, name: &str) -> Result<StateId, InputError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| InputError::UnknownState { name: name.into() })
    }

    /// Adds a nonreflexive motion labelled by action names, `"tau"` for the
    /// trivial action.
    pub fn motion(
        &mut self,
        source: &str,
        target: &str,
        labels: &[&str],
    ) -> Result<&mut Self, InputError> {
        if labels.len() != self.signature.arity() {
            return Err(InputError::invalid(
                format!("motion {source} -> {target}"),
                format!(
                    "label vector has length {}, expected {}",
                    labels.len(),
                    self.signature.arity()
                ),
            ));
        }
        let src = self.resolve(source)?;
        let tgt = self.resolve(target)?;
        let mut ids = Vec::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            let set = self.signature.boundary(i);
            let id = set.index_of(l).ok_or_else(|| {
                InputError::invalid(
                    format!("motion {source} -> {target}"),
                    format!("action `{l}` is not in action set {}", set.name()),
                )
            })?;
            ids.push(id);
        }
        self.motions.push((src, tgt, ids));
        Ok(self)
    }

    pub fn initial(&mut self, name: &str) -> Result<&mut Self, InputError> {
        self.initial = Some(self.resolve(name)?);
        Ok(self)
    }

    /// Finishes construction, generating one reflexive self-loop per state.
    pub fn build(&self) -> Automaton {
        let arity = self.signature.arity();
        let trivial: Vec<ActionId> = (0..arity)
            .map(|i| self.signature.boundary(i).reflexive())
            .collect();
        let mut motions = Motions::new(arity);
        let mut reflexive_of = Vec::with_capacity(self.names.len());
        for v in 0..self.names.len() as StateId {
            reflexive_of.push(motions.push(v, v, &trivial));
        }
        for (src, tgt, labels) in &self.motions {
            motions.push(*src, *tgt, labels);
        }
        Automaton {
            signature: self.signature.clone(),
            states: StateSpace::named(self.names.clone()),
            motions,
            reflexive_of,
            initial: self.initial,
        }
    }

    /// Index of the k-th declared (nonreflexive) motion in the built
    /// automaton. Reflexive motions occupy indices `0..state_count`.
    pub fn declared_motion_id(&self, k: usize) -> MotionId {
        (self.names.len() + k) as MotionId
    }
}

/// Outcome of the linearizability check: either a refining behaviour for
/// every (motion, boundary order) pair, or the first pair with no
/// refinement.
#[derive(Debug, Clone)]
pub enum Linearizability {
    Linearizable {
        /// One `(motion, order, refinement)` certificate per pair, where
        /// `order` lists the nontrivially acted boundaries of the motion in
        /// the order their actions must occur.
        witnesses: Vec<(MotionId, Vec<usize>, Behaviour)>,
    },
    Not {
        motion: MotionId,
        order: Vec<usize>,
    },
}

impl Linearizability {
    pub fn holds(&self) -> bool {
        matches!(self, Linearizability::Linearizable { .. })
    }
}

/// Whether every motion refines into a sequence of linear motions, for every
/// total order on the boundaries it acts on.
///
/// A refinement of `e` is a path of linear motions from `source(e)` to
/// `target(e)` in which each boundary where `e` is nontrivial is acted on
/// exactly once, with `e`'s action, in the given order; no boundary is acted
/// on nontrivially more than once. The check enumerates all orders of the
/// nontrivial boundaries of each motion, so it is meant for component
/// automata with few boundaries, not composites.
pub fn is_linearizable(a: &Automaton) -> Linearizability {
    let adj = a.adjacency();
    let mut witnesses = Vec::new();
    for e in a.motions().iter() {
        let nontrivial: Vec<usize> = (0..a.arity())
            .filter(|&i| !a.signature().boundary(i).is_trivial(a.motions().label(e, i)))
            .collect();
        for order in permutations(&nontrivial) {
            match find_refinement(a, &adj, e, &order) {
                Some(b) => witnesses.push((e, order, b)),
                None => return Linearizability::Not { motion: e, order },
            }
        }
    }
    Linearizability::Linearizable { witnesses }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Searches for a refining behaviour for motion `e` with the required
/// boundary order. Search state: (current state, next position in `order`,
/// set of other boundaries already acted on).
fn find_refinement(
    a: &Automaton,
    adj: &[Vec<MotionId>],
    e: MotionId,
    order: &[usize],
) -> Option<Behaviour> {
    let start = a.motions().source(e);
    let goal = a.motions().target(e);
    let in_order: HashSet<usize> = order.iter().copied().collect();
    // (state, stage, touched-mask over boundaries outside the order)
    type Key = (StateId, usize, u64);
    let start_key: Key = (start, 0, 0);
    let mut parents: HashMap<Key, (Key, MotionId)> = HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(start_key);
    let mut seen = HashSet::new();
    seen.insert(start_key);
    while let Some(key) = queue.pop_front() {
        let (state, stage, mask) = key;
        if state == goal && stage == order.len() {
            let mut steps = Vec::new();
            let mut cur = key;
            while cur != start_key {
                let (prev, m) = parents[&cur];
                steps.push(m);
                cur = prev;
            }
            steps.reverse();
            return Some(Behaviour::new(start, steps));
        }
        for &m in &adj[state as usize] {
            if !a.is_linear_motion(m) {
                continue;
            }
            let acted = (0..a.arity()).find(|&i| {
                !a.signature()
                    .boundary(i)
                    .is_trivial(a.motions().label(m, i))
            });
            let next = match acted {
                None => (a.motions().target(m), stage, mask),
                Some(i) if in_order.contains(&i) => {
                    // Must be the next boundary in the order, with e's action.
                    if stage >= order.len() || order[stage] != i {
                        continue;
                    }
                    if a.motions().label(m, i) != a.motions().label(e, i) {
                        continue;
                    }
                    (a.motions().target(m), stage + 1, mask)
                }
                Some(i) => {
                    // A boundary e is trivial on: allowed at most once.
                    let bit = 1u64 << i;
                    if mask & bit != 0 {
                        continue;
                    }
                    (a.motions().target(m), stage, mask | bit)
                }
            };
            if seen.insert(next) {
                parents.insert(next, (key, m));
                queue.push_back(next);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionSet;

    pub(crate) fn lock_set() -> ActionSet {
        ActionSet::new("L", ["lock", "unlock"]).unwrap()
    }

    /// The four-state philosopher: lock left, lock right, unlock left,
    /// unlock right, cyclically.
    pub(crate) fn philosopher() -> Automaton {
        let l = lock_set();
        let mut b = AutomatonBuilder::new(BoundarySignature::arrow(l.clone(), l));
        b.states(["0", "1", "2", "3"]).unwrap();
        b.motion("0", "1", &["lock", "tau"]).unwrap();
        b.motion("1", "2", &["tau", "lock"]).unwrap();
        b.motion("2", "3", &["unlock", "tau"]).unwrap();
        b.motion("3", "0", &["tau", "unlock"]).unwrap();
        b.initial("0").unwrap();
        b.build()
    }

    /// The three-state fork: unacquired, or held via the left or right
    /// boundary.
    pub(crate) fn fork() -> Automaton {
        let l = lock_set();
        let mut b = AutomatonBuilder::new(BoundarySignature::arrow(l.clone(), l));
        b.states(["u", "l", "r"]).unwrap();
        b.motion("u", "l", &["lock", "tau"]).unwrap();
        b.motion("l", "u", &["unlock", "tau"]).unwrap();
        b.motion("u", "r", &["tau", "lock"]).unwrap();
        b.motion("r", "u", &["tau", "unlock"]).unwrap();
        b.initial("u").unwrap();
        b.build()
    }

    #[test]
    fn philosopher_validates() {
        assert!(philosopher().validate().is_empty());
        assert!(fork().validate().is_empty());
    }

    #[test]
    fn corrupted_reflexive_label_is_reported() {
        let mut p = philosopher();
        // Overwrite the reflexive motion of state 0 with a nontrivial label.
        let r = p.reflexive_of(0);
        p.motions.labels[r as usize * 2] = 1;
        let report = p.validate();
        assert_eq!(report.len(), 1);
        assert!(matches!(
            report[0],
            Violation::ReflexiveNontrivial { state: 0, boundary: 0, .. }
        ));
    }

    #[test]
    fn wrong_label_arity_is_reported() {
        let p = philosopher();
        let mut motions = Motions::new(1);
        motions.push(0, 0, &[0]);
        let bad = Automaton::from_raw_parts(
            p.signature().clone(),
            StateSpace::named(vec!["0".into()]),
            motions,
            vec![0],
            None,
        );
        let report = bad.validate();
        assert!(report
            .iter()
            .any(|v| matches!(v, Violation::LabelArity { .. })));
    }

    #[test]
    fn appearance_of_philosopher_cycle() {
        let p = philosopher();
        // Nonreflexive motions start after the 4 reflexive self-loops.
        let b = Behaviour::new(0, vec![4, 5, 6, 7]);
        let left = p.appearance(&b, 0).unwrap();
        let names: Vec<&str> = left
            .iter()
            .map(|&a| p.signature().boundary(0).action_name(a))
            .collect();
        assert_eq!(names, ["lock", "tau", "unlock", "tau"]);
        let reduced = p.reduced_appearance(&b, 0).unwrap();
        let names: Vec<&str> = reduced
            .iter()
            .map(|&a| p.signature().boundary(0).action_name(a))
            .collect();
        assert_eq!(names, ["lock", "unlock"]);
    }

    #[test]
    fn empty_behaviour_has_empty_appearance() {
        let p = philosopher();
        let b = Behaviour::new(2, vec![]);
        assert!(p.appearance(&b, 1).unwrap().is_empty());
    }

    #[test]
    fn fork_right_appearance_of_left_cycle() {
        let q = fork();
        let u_to_l = 3; // first declared motion after 3 reflexive loops
        let l_to_u = 4;
        let b = Behaviour::new(0, vec![u_to_l, l_to_u]);
        let right = q.appearance(&b, 1).unwrap();
        assert!(right.iter().all(|&a| a == 0));
        let left_reduced = q.reduced_appearance(&b, 0).unwrap();
        let names: Vec<&str> = left_reduced
            .iter()
            .map(|&a| q.signature().boundary(0).action_name(a))
            .collect();
        assert_eq!(names, ["lock", "unlock"]);
    }

    #[test]
    fn invalid_behaviour_rejected() {
        let p = philosopher();
        let b = Behaviour::new(0, vec![5]); // motion 5 starts at state 1
        assert!(p.appearance(&b, 0).is_err());
        assert!(p.appearance(&Behaviour::new(0, vec![]), 7).is_err());
    }

    #[test]
    fn reachable_singleton() {
        let l = lock_set();
        let mut b = AutomatonBuilder::new(BoundarySignature::arrow(l.clone(), l));
        b.states(["x"]).unwrap();
        let a = b.build();
        let r = a.reachable(0).unwrap();
        assert_eq!(r.state_count(), 1);
        assert_eq!(r.state_name(0), "x");
        assert_eq!(r.initial(), Some(0));
    }

    #[test]
    fn reachable_is_idempotent() {
        let p = philosopher();
        let r1 = p.reachable(1).unwrap();
        let r2 = r1.reachable(r1.initial().unwrap()).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn philosopher_and_fork_are_linear() {
        assert!(philosopher().is_linear());
        assert!(fork().is_linear());
        assert_eq!(philosopher().linear_motions().len(), 8);
    }

    #[test]
    fn linearize_is_identity_on_linear() {
        let p = philosopher();
        assert_eq!(p.linearize(), p);
    }

    #[test]
    fn linear_automaton_is_linearizable() {
        assert!(is_linearizable(&philosopher()).holds());
        assert!(is_linearizable(&fork()).holds());
    }

    #[test]
    fn lone_concurrent_motion_is_not_linearizable() {
        let l = lock_set();
        let mut b = AutomatonBuilder::new(BoundarySignature::arrow(l.clone(), l));
        b.states(["v"]).unwrap();
        b.motion("v", "v", &["lock", "unlock"]).unwrap();
        let a = b.build();
        let result = is_linearizable(&a);
        assert!(!result.holds());
        match result {
            Linearizability::Not { motion, .. } => assert_eq!(motion, 1),
            _ => unreachable!(),
        }
    }

    #[test]
    fn behaviours_enumeration_counts() {
        let p = philosopher();
        // From each state: the reflexive loop and one nonreflexive motion.
        assert_eq!(p.behaviours_of_length(0, 1).len(), 2);
        assert_eq!(p.behaviours_of_length(0, 3).len(), 8);
    }

    #[test]
    fn deadlock_states_of_a_chain() {
        let l = lock_set();
        let mut b = AutomatonBuilder::new(BoundarySignature::arrow(l.clone(), l));
        b.states(["0", "d"]).unwrap();
        b.motion("0", "d", &["lock", "tau"]).unwrap();
        let a = b.build();
        assert_eq!(a.deadlock_states(), vec![1]);
    }
}
