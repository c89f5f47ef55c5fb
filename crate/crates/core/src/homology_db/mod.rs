//! Known homologies and constructors for derived ones.

mod record;
mod strings;

pub use record::{parse_orbits, parse_records, Database, HomologyRecord, Kind, RecordValue};
pub use strings::{
    cone_divide, cone_factor, cone_total_reduce_knot, connected_sum, x_string_total_reduce, FamilyStringModule, Orbit,
    OrbitLength, StringModule, TotalReduction, COKER_SHIFT, KER_SHIFT,
};
