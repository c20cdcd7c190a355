//! Index newtypes for the finite state, action and observation spaces.

use std::fmt;

macro_rules! index_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub const fn index(self) -> usize {
                self.0
            }
        }

        impl From<usize> for $name {
            #[inline]
            fn from(i: usize) -> Self {
                Self(i)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

index_type!(
    /// Index into a domain's state space.
    StateIndex
);
index_type!(
    /// Index into a domain's action space.
    ActionIndex
);
index_type!(
    /// Index into a domain's observation space.
    ObservationIndex
);

/// Sizes of the three spaces of a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Spaces {
    pub states: usize,
    pub actions: usize,
    pub observations: usize,
}

impl Spaces {
    pub const fn new(states: usize, actions: usize, observations: usize) -> Self {
        Self {
            states,
            actions,
            observations,
        }
    }

    #[inline]
    pub fn contains(&self, s: StateIndex, a: ActionIndex, z: ObservationIndex) -> bool {
        s.0 < self.states && a.0 < self.actions && z.0 < self.observations
    }
}
