use thiserror::Error;

/// Errors raised by the geometric and probabilistic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate ray: origin and target coincide")]
    DegenerateRay,
    #[error("error angle {0} is not strictly inside (-pi, pi)")]
    ErrorAngleOutOfRange(f64),
    #[error("degenerate overlap: rays share a supporting line")]
    DegenerateOverlap,
    #[error("improper cone: bounding directions are equal or opposite")]
    ImproperCone,
    #[error("ray origin does not match cone apex")]
    ApexMismatch,
    #[error("degenerate triangle: vertices coincide or are collinear")]
    DegenerateTriangle,
    #[error("target on line")]
    TargetOnLine,
    #[error("duplicate line at index {0}")]
    DuplicateLine(usize),
    #[error("scenario is not in general position: {0}")]
    GeneralPosition(String),
    #[error("site index {index} out of range for {n} sites")]
    SiteIndex { index: usize, n: usize },
    #[error("model has {model} sites but scenario has {scenario}")]
    SiteCountMismatch { model: usize, scenario: usize },
    #[error("invalid site model: {0}")]
    InvalidSiteModel(String),
    #[error("improper support cone at site {0}: support spans at least pi")]
    ImproperSupportCone(usize),
    #[error("scenario admits no constrained model")]
    NoConstrainedModel,
    #[error("pairwise-intersection condition violated: {0}")]
    PairwiseIntersection(String),
    #[error("conditioning event empty: no trial formed a cocked hat")]
    ConditioningEventEmpty,
    #[error("operation requires {expected} sites, got {got}")]
    WrongSiteCount { expected: &'static str, got: usize },
    #[error("operation requires two-ray site models")]
    NotTwoRay,
    #[error("lines formulation requires error supports within [-pi/2, pi/2]")]
    LinesSupport,
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("enumeration too large: 2^{n} patterns exceeds cap 2^{cap}")]
    EnumerationTooLarge { n: usize, cap: usize },
    #[error("degenerate arc: tangent points are antipodal at site {0}")]
    DegenerateArc(usize),
    #[error("arc condition ({condition}) violated for sites {sites:?}")]
    ArcCondition {
        condition: &'static str,
        sites: Vec<usize>,
    },
    #[error("degenerate selection: chosen tangent points span exactly half the circle")]
    DegenerateSelection,
    #[error("degenerate hull: {0}")]
    DegenerateHull(String),
    #[error("case {0:?} does not match the scenario")]
    CaseMismatch(crate::scenarios::HullCase),
    #[error("rejection budget of {0} attempts exhausted")]
    RejectionBudget(usize),
    #[error("counterexample {id} failed verification: {detail}")]
    CounterexampleUnverified { id: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
