//! Numerical geodesics, parallel transport, holonomy sampling, spectral
//! analysis of parallel endomorphisms, and invariant-subspace search for
//! matrix sets.
//!
//! The loops sampled here probe the Levi-Civita holonomy of a chart.  That
//! is deliberately not the same thing as the holonomy morphism of a
//! geometric structure (the representation of the fundamental group attached
//! to an atlas of model charts): the two are related but distinct, and the
//! matrix-set search in [`splitting`] is the tool that speaks to the latter,
//! group-theoretic side.

pub mod curves;
pub mod eigen;
pub mod geodesics;
pub mod holonomy;
pub mod splitting;

pub use curves::CurveSegment;
pub use eigen::{
    decomposability_probe, eigen_structure, DecomposabilityReport, EigenCluster, EigenStructure,
    ProbeOptions, ProbeVerdict,
};
pub use geodesics::{geodesic_between, geodesic_integrate, Geodesic};
pub use holonomy::{
    holonomy_loop, parallel_transport, rotation_angle_2d, HolonomySample, TransportedObject,
};
pub use splitting::{
    commutant_dimension, invariant_splitting_search, selfadjoint_commutant_dimension,
    subspace_invariance_defect, SearchOptions, SearchOutcome,
};
