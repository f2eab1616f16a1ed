//! Unmixed Beauville structures on finite groups: construction, verification,
//! exhaustive search, class and character counting, and Monte Carlo estimation
//! over PSL(2,q), alternating and symmetric groups, and Z/n x Z/n.

pub mod arith;
pub mod beauville;
pub mod counting;
pub mod field;
pub mod group;
pub mod par;
pub mod perm;
pub mod probability;
pub mod psl2;

pub use field::{Field, FieldElement, FieldError};
pub use group::{closure, AbelianGroup, AbelianPair, Group, GroupError, GroupKind};
pub use psl2::{Psl2Group, SplitType, SubgroupClass};
pub use perm::{CycleShape, PermGroup, Permutation};

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_b0a7_2011;
