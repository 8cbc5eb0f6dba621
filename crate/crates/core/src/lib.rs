//! Witness-based Delaunay complexes over Euclidean, power, hyperbolic,
//! hemispherical and spherical geometries.
//!
//! A simplex belongs to the Delaunay complex of a finite site set exactly when
//! it has a strong witness: a point equidistant from its vertices and no
//! farther from them than from any other site. The crate provides witness
//! predicates, the bisector-reduction construction of strong witnesses from
//! weak ones, an LP feasibility oracle for the linear geometries, and
//! complex builders including the spherical pipeline and witness complexes.

pub mod complexes;
pub mod error;
pub mod geometry;
pub mod hull;
pub mod linalg;
pub mod lp;
pub mod sampling;
pub mod witness;

pub use complexes::{
    balls_cover_sphere, counterexample, delaunay_strong, delaunay_weak, maxmin_landmarks, random_landmarks,
    sphere_delaunay_via_stereo, sphere_generic, witness_complex, Counterexample, CounterexampleKind, Coverage,
    Genericity, Landmarks, LandmarkMethod, SimplicialComplex,
};
pub use error::{Error, Result};
pub use geometry::{check_axioms, AxiomReport, Geometry, GeometryKind, MetricBall, Point};
pub use lp::{circumsphere, max_margin_witness, witness_exists, FeasibilityResult, FeasibilityStatus, WitnessMode};
pub use witness::{
    construct_strong_witness, is_robust_witness, is_strong_witness, is_weak_witness, reduce_to_bisector, robustify,
    RobustificationCertificate, Simplex, WitnessCertificate, WitnessFamily, WitnessKind,
};
