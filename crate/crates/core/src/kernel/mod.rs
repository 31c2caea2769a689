//! Finite categories, quivers, functors, Set-valued functors and the handful
//! of universal constructions the rest of the crate is built from.

mod category;
mod comma;
mod functor;
mod limit;
mod quiver;
mod set_functor;
mod union_find;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::id::Id;

pub use category::{validate_category, Arrow, CategoryBuilder, FinCategory};
pub use comma::{comma_category, connected_components, CommaCategory, CommaObject};
pub use functor::{validate_functor, CatFunctor};
pub use limit::{set_limit, Diagram, LimitCone};
pub use quiver::{
    discrete_quiver, free_category, quiver_pushout, underlying_quiver, FreeCategory, Quiver,
    QuiverPushout, Side,
};
pub use set_functor::{natural_iso_check, validate_set_functor, NaturalIso, SetFunctor};
pub use union_find::UnionFind;

/// One broken law or table inconsistency found by a validator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnknownObject {
        at: Id,
        object: Id,
    },
    UnknownMorphism {
        at: Id,
        morphism: Id,
    },
    MissingIdentity {
        object: Id,
    },
    BadIdentity {
        object: Id,
        morphism: Id,
    },
    IdentityNotNeutral {
        identity: Id,
        morphism: Id,
    },
    NotComposable {
        second: Id,
        first: Id,
    },
    MissingComposite {
        second: Id,
        first: Id,
    },
    CompositeEndpoints {
        second: Id,
        first: Id,
        composite: Id,
    },
    NotAssociative {
        third: Id,
        second: Id,
        first: Id,
        left: Id,
        right: Id,
    },
    NotTotal {
        at: Id,
    },
    EndpointsNotPreserved {
        morphism: Id,
    },
    IdentityNotPreserved {
        object: Id,
    },
    CompositionNotPreserved {
        second: Id,
        first: Id,
    },
    ActionOutOfRange {
        morphism: Id,
        element: Id,
    },
    ProjectionMismatch {
        at: Id,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            UnknownObject { at, object } => write!(f, "`{at}` refers to unknown object `{object}`"),
            UnknownMorphism { at, morphism } => {
                write!(f, "`{at}` refers to unknown morphism `{morphism}`")
            }
            MissingIdentity { object } => write!(f, "object `{object}` has no identity"),
            BadIdentity { object, morphism } => {
                write!(f, "identity `{morphism}` of `{object}` is not an endomorphism of it")
            }
            IdentityNotNeutral { identity, morphism } => {
                write!(f, "`{identity}` is not neutral for `{morphism}`")
            }
            NotComposable { second, first } => {
                write!(f, "composite `{second}∘{first}` listed but endpoints do not match")
            }
            MissingComposite { second, first } => {
                write!(f, "composite `{second}∘{first}` is missing")
            }
            CompositeEndpoints { second, first, composite } => write!(
                f,
                "composite `{second}∘{first}` = `{composite}` has the wrong endpoints"
            ),
            NotAssociative { third, second, first, left, right } => write!(
                f,
                "`{third}∘({second}∘{first})` = `{left}` but `({third}∘{second})∘{first}` = `{right}`"
            ),
            NotTotal { at } => write!(f, "map is undefined at `{at}`"),
            EndpointsNotPreserved { morphism } => {
                write!(f, "image of `{morphism}` has the wrong endpoints")
            }
            IdentityNotPreserved { object } => write!(f, "identity of `{object}` is not preserved"),
            CompositionNotPreserved { second, first } => {
                write!(f, "composite `{second}∘{first}` is not preserved")
            }
            ActionOutOfRange { morphism, element } => {
                write!(f, "action of `{morphism}` sends `{element}` outside its target set")
            }
            ProjectionMismatch { at } => write!(f, "projections disagree at `{at}`"),
        }
    }
}
