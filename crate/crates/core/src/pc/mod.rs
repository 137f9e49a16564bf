//! Polycyclic presentations of nilpotent groups: collection, subgroups,
//! homomorphisms, quotients and the standard series.

mod group;
mod hom;
mod ops;
mod series;
mod subgroup;

pub use group::{DefiningRelation, PcElement, PcGroup, PcRelations};
pub use hom::{kernel_of_map, PcHom, RankCertificate};
pub use ops::{direct_product, subgroup_as_group, DirectProduct, Quotient};
pub use series::{derived_series, derived_subgroup, intersect_normal, lower_central_series, upper_central_series, Series};
pub use subgroup::{center, centralizer, kernel_to_cyclic, PcSubgroup};
