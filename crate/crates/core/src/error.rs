use thiserror::Error;

use crate::id::Id;
use crate::kernel::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown object `{0}`")]
    UnknownObject(Id),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(Id),
    #[error("unknown quiver edge `{0}`")]
    UnknownEdge(Id),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(Id),
    #[error("`{second}` cannot follow `{first}`: endpoints do not match")]
    NotComposable { first: Id, second: Id },
    #[error("empty path has no endpoint")]
    EmptyPath,
    #[error("hom-sets are infinite (directed cycle through `{0}`); supply a bound")]
    UnboundedHomSet(Id),
    #[error("vertex sets differ")]
    VertexMismatch,
    #[error("functors are defined over different base categories")]
    BaseMismatch,
    #[error("invalid category: {}", join(.0))]
    InvalidCategory(Vec<Violation>),
    #[error("invalid functor: {}", join(.0))]
    InvalidFunctor(Vec<Violation>),
    #[error("invalid set-valued functor: {}", join(.0))]
    InvalidSetFunctor(Vec<Violation>),
    #[error("not a discrete fibration: {lifts} lifts of `{morphism}` at `{object}`")]
    NotAFibration {
        object: Id,
        morphism: Id,
        lifts: usize,
    },
    #[error("composite would carry {edges} quiver edges, bound is {bound}")]
    BoundExceeded { edges: usize, bound: usize },
    #[error("category is truncated (not closed under composition)")]
    NotClosed,
    #[error("missing action for quiver edge `{0}`")]
    MissingEdgeAction(Id),
    #[error("explanation diagram does not land in the speaker's language")]
    DiagramOutsideLanguage,
    #[error("speakers do not share a language")]
    LanguageMismatch,
    #[error("fibre over `{object}` already has {size} elements; use the merged acquisition")]
    FibreNotEmpty { object: Id, size: usize },
    #[error("example set is empty")]
    EmptyExample,
    #[error("example element `{0}` is not in the teacher's fibre")]
    ExampleNotInTeacherFibre(Id),
    #[error("merge map is not total on the fibre over `{object}` (missing `{element}`)")]
    MergeNotTotal { object: Id, element: Id },
    #[error("merge map sends `{element}` outside the example set")]
    MergeOutsideExample { element: Id },
    #[error("explanation is not valid for the teacher")]
    InvalidExplanation,
    #[error("explanation is vacuous for the teacher (empty limit)")]
    VacuousExplanation,
    #[error("meaning-action out of `{object}` is not determined for: {}", join(.morphisms))]
    UnforcedActionAtL { object: Id, morphisms: Vec<Id> },
    #[error("generated element name `{0}` collides with an existing one")]
    NameCollision(Id),
    #[error("action override for `{0}` is not on a morphism out of the explained object")]
    OverrideNotAtTarget(Id),
    #[error("explanation explains `{found}`, not `{expected}`")]
    TargetMismatch { expected: Id, found: Id },
    #[error("unknown word `{0}`")]
    UnknownWord(Id),
    #[error("unknown basic type `{0}`")]
    UnknownBasicType(Id),
    #[error("cannot parse type `{0}`")]
    TypeSyntax(String),
    #[error("adjoint order of `{ty}` exceeds {z_max}")]
    AdjointOrderTooLarge { ty: String, z_max: u32 },
    #[error("order is not antisymmetric: `{0}` and `{1}` are both below each other")]
    OrderNotAntisymmetric(Id, Id),
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
