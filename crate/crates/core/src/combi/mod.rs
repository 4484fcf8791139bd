//! Combinatorics of (n,k)-assignments: one chosen element per size-n
//! subset of {1..n+k}, exact disagreement counts by Hamming distance,
//! the counting identities behind the lower bounds, and searches for
//! assignments with few distant disagreements. A separate triple space
//! carries the Q statistic.

mod assignment;
mod qcount;
mod search;
mod space;

pub use assignment::{
    Assignment, DisagreementProfile, DistantBoundCheck, PerturbedBoundCheck,
    PAIR_SCAN_CAP,
};
pub use qcount::{falling_5, q_pair_total, q_search, QSearchReport, QSpace};
pub use search::{
    exhaustive_min_distant, local_search_min_distant, ExhaustiveReport, SearchReport,
    SEARCH_CAP,
};
pub use space::{
    binomial, check_combi_identity, check_step_inequality, check_step_inequality_eps,
    distance_profile, distant_pair_threshold, multinomial_pair, pair_totals,
    total_disagreement_lower, IdentityCheck, StepCheck, SubsetSpace, MAX_SUBSETS,
};
