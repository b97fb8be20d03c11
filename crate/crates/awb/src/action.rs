//! Action sets and boundary signatures.
//!
//! An action set is a finite alphabet with one distinguished *trivial*
//! (reflexive) action, conventionally written `tau` in model files. Every
//! boundary of an automaton is typed by an action set, and a boundary
//! signature is the ordered list of those types together with an optional
//! left/right split used when an automaton is presented as an arrow
//! `X -> Y`.

use std::fmt;
use std::sync::Arc;

use crate::error::InputError;

/// Index of an action within its [`ActionSet`].
pub type ActionId = u32;

#[derive(Debug)]
struct ActionSetInner {
    name: String,
    actions: Vec<String>,
    reflexive: ActionId,
}

/// A finite set of synchronization actions with a distinguished trivial one.
///
/// Cheap to clone; equality compares contents, not identity, so two files
/// declaring the same alphabet produce interchangeable values.
#[derive(Clone)]
pub struct ActionSet(Arc<ActionSetInner>);

impl ActionSet {
    /// Builds an action set from the nontrivial action names. The trivial
    /// action is named `tau` and placed at index 0.
    pub fn new(
        name: impl Into<String>,
        nontrivial: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, InputError> {
        let mut actions = vec!["tau".to_string()];
        actions.extend(nontrivial.into_iter().map(Into::into));
        Self::with_reflexive(name, actions, 0)
    }

    /// Builds an action set from a full action list and the index of the
    /// trivial action within it.
    pub fn with_reflexive(
        name: impl Into<String>,
        actions: Vec<String>,
        reflexive: ActionId,
    ) -> Result<Self, InputError> {
        let name = name.into();
        if actions.get(reflexive as usize).is_none() {
            return Err(InputError::BadActionSet {
                name,
                reason: "reflexive action index out of range".into(),
            });
        }
        for (i, a) in actions.iter().enumerate() {
            if actions[..i].iter().any(|b| b == a) {
                return Err(InputError::BadActionSet {
                    name,
                    reason: format!("duplicate action `{a}`"),
                });
            }
        }
        Ok(ActionSet(Arc::new(ActionSetInner {
            name,
            actions,
            reflexive,
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    /// Number of actions, including the trivial one.
    pub fn len(&self) -> usize {
        self.0.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always holds the reflexive action
    }

    /// Index of the trivial action.
    pub fn reflexive(&self) -> ActionId {
        self.0.reflexive
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        &self.0.actions[id as usize]
    }

    pub fn actions(&self) -> impl Iterator<Item = (ActionId, &str)> {
        self.0
            .actions
            .iter()
            .enumerate()
            .map(|(i, a)| (i as ActionId, a.as_str()))
    }

    pub fn index_of(&self, action: &str) -> Option<ActionId> {
        self.0
            .actions
            .iter()
            .position(|a| a == action)
            .map(|i| i as ActionId)
    }

    pub fn is_trivial(&self, id: ActionId) -> bool {
        id == self.0.reflexive
    }
}

impl PartialEq for ActionSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.name == other.0.name
                && self.0.actions == other.0.actions
                && self.0.reflexive == other.0.reflexive)
    }
}

impl Eq for ActionSet {}

impl std::hash::Hash for ActionSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.name.hash(state);
        self.0.actions.hash(state);
        self.0.reflexive.hash(state);
    }
}

impl fmt::Debug for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ActionSet({} {:?})", self.0.name, self.0.actions)
    }
}

impl fmt::Display for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

/// The ordered boundary types of an automaton.
///
/// Boundary indices `0..len()` are stable and identify boundaries in every
/// downstream structure (labels, designs, wiring diagrams). When `split` is
/// present, boundaries `0..split` form the left boundary and the rest the
/// right boundary of the two-boundary presentation `X -> Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySignature {
    boundaries: Vec<ActionSet>,
    split: Option<usize>,
}

impl BoundarySignature {
    pub fn new(boundaries: Vec<ActionSet>, split: Option<usize>) -> Result<Self, InputError> {
        if let Some(s) = split {
            if s > boundaries.len() {
                return Err(InputError::BadSplit {
                    split: s,
                    arity: boundaries.len(),
                });
            }
        }
        Ok(BoundarySignature { boundaries, split })
    }

    /// Two-boundary presentation `left -> right`.
    pub fn arrow(left: ActionSet, right: ActionSet) -> Self {
        BoundarySignature {
            boundaries: vec![left, right],
            split: Some(1),
        }
    }

    /// Signature with no boundaries (a closed system).
    pub fn closed() -> Self {
        BoundarySignature {
            boundaries: Vec::new(),
            split: None,
        }
    }

    pub fn arity(&self) -> usize {
        self.boundaries.len()
    }

    pub fn boundary(&self, i: usize) -> &ActionSet {
        &self.boundaries[i]
    }

    pub fn boundaries(&self) -> &[ActionSet] {
        &self.boundaries
    }

    pub fn split(&self) -> Option<usize> {
        self.split
    }

    pub fn with_split(mut self, split: Option<usize>) -> Self {
        debug_assert!(split.map_or(true, |s| s <= self.boundaries.len()));
        self.split = split;
        self
    }

    /// Boundary types agree, position by position. The split is presentation
    /// metadata and is ignored.
    pub fn same_types(&self, other: &Self) -> bool {
        self.boundaries == other.boundaries
    }
}

impl fmt::Display for BoundarySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.boundaries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if self.split == Some(i) {
                write!(f, "; ")?;
            }
            write!(f, "{}", b.name())?;
        }
        if self.split == Some(self.boundaries.len()) && !self.boundaries.is_empty() {
            write!(f, " ;")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_set_basics() {
        let l = ActionSet::new("L", ["lock", "unlock"]).unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(l.reflexive(), 0);
        assert_eq!(l.action_name(0), "tau");
        assert_eq!(l.index_of("unlock"), Some(2));
        assert!(l.is_trivial(0));
        assert!(!l.is_trivial(1));
    }

    #[test]
    fn duplicate_actions_rejected() {
        assert!(ActionSet::new("L", ["lock", "lock"]).is_err());
    }

    #[test]
    fn equality_is_structural() {
        let a = ActionSet::new("L", ["lock"]).unwrap();
        let b = ActionSet::new("L", ["lock"]).unwrap();
        let c = ActionSet::new("L", ["unlock"]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn split_bounds_checked() {
        let l = ActionSet::new("L", ["a"]).unwrap();
        assert!(BoundarySignature::new(vec![l.clone()], Some(2)).is_err());
        assert!(BoundarySignature::new(vec![l], Some(1)).is_ok());
    }
}
