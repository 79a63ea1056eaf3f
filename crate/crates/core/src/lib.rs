//! Discrete-time quantum walks on graphs and hypergraphs.
//!
//! The crate builds the evolution operators of five walk models (coined walk
//! on a line, scattering coined walk, Szegedy walk, staggered walk and the
//! hypergraph walk), converts walks between models and checks that converted
//! walks reproduce the original vertex distributions.
//!
//! ```
//! use hyperwalk::structures::Hypergraph;
//! use hyperwalk::walks::{build_grover_hyperwalk, run};
//!
//! let h = Hypergraph::new(4, vec![vec![0, 1, 2], vec![0, 1], vec![2, 3]]).unwrap();
//! let walk = build_grover_hyperwalk(&h).unwrap();
//! let start = walk.basis_state(&hyperwalk::BasisLabel::Incidence { vertex: 0, edge: 0 }).unwrap();
//! let trajectory = run(&walk, &start, 5).unwrap();
//! let p = trajectory.distributions(&walk).unwrap();
//! assert!((p[5].iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! ```

pub mod equivalence;
pub mod error;
pub mod random;
pub mod state;
pub mod structures;
pub mod transforms;
pub mod walks;

pub use error::{Error, Result};
pub use state::{
    apply, certify_unitary, measure_vertices, BasisLabel, BasisMap, CMatrix, CVector, MeasurementMap, StateVector,
    UnitaryOperator, C64,
};
pub use structures::{clique_check, validate_tessellation, Graph, Hypergraph, Tessellation};
pub use walks::{run, ModelKind, ModelParts, SizeReport, Trajectory, WalkInstance};
pub use transforms::{apply_transform, transform_chain_size, StepMap, TransformKind, TransformResult};
pub use equivalence::{check_instance, check_strong_instance, randomized_suite, EquivalenceReport, Verdict};
pub use walks::spec::WalkSpec;
