//! p-th power images in `T(n,q)`, counted by diagonal type and checked by brute force.

pub mod brute;
pub mod corollary;
pub mod formula;
pub mod partition;
pub mod power;
pub mod types;

pub use brute::{t_image_brute, BruteConfig, TImageBrute};
pub use corollary::{corollary_c_check, triangular_order, CorollaryCReport};
pub use formula::{t_image_by_formula, CensusSource, FixedCounts, LiveCensus, TImageFormula, TypeSummand};
pub use partition::{partitions_up_to_length, Partition};
pub use power::{element_order, p_part_decompose};
pub use types::{
    cent_structure_check, cent_structure_sweep, centralizer_order, class_index, d_delta_count, diagonal_group,
    diagonal_type, standard_form, CentReport,
};
