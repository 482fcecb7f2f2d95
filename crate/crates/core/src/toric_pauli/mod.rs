//! Pauli algebra on the square-lattice Toric Code, the reduction of local
//! operators to stabilizers and boundary operators, and the boundary
//! algebras with their states.

pub mod boundary;
pub mod lattice;
pub mod pauli;
pub mod reduction;

pub use boundary::{
    boundary_algebra, chain_image, fusion_net_iso, lattice_generators, BoundaryAlgebraReport, BoundaryElement,
    IsoReport,
};
pub use lattice::{
    region_relation, stabilizer_generators, BoundaryKind, Interval, Region, Relation, Side, Site, Stabilizer, Window,
};
pub use pauli::{commutant_basis, Letter, PauliMonomial};
pub use reduction::{boundary_channel, pauli_reduce, Channel, ReduceOutcome, Reduction};
