//! p-th power images in `U(n,q)`: exhaustive censuses, the canonical families and
//! their explicit roots.

pub mod bitmap;
pub mod bounds;
pub mod cache;
pub mod census;
pub mod closure;
pub mod families;

pub use bitmap::Bitmap;
pub use bounds::{bu_trichotomy_check, lbound_terms, lbound_value, theorem_a_check, BuBranch, BuReport, TheoremAReport};
pub use cache::{CacheEntry, CensusCache};
pub use census::{u_image_census, CensusConfig, CensusMethod, ImageCensus};
pub use closure::subgroup_closure;
pub use families::{canonical_element, pth_root_of_family, CanonicalFamilySpec, FamilyKind};
