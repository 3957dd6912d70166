//! Exact computer algebra for finite-dimensional strongly homotopy
//! associative (A-infinity) algebras and categories: structure checking,
//! bar-construction views, homotopy transfer and minimal models,
//! obstruction-style cochain calculus, unit strictification,
//! Maurer-Cartan twisting and categories of twisted objects.
//!
//! All arithmetic is exact (arbitrary-precision rationals or a prime field);
//! every check either passes or returns a concrete failing witness.

pub mod ainf;
pub mod bar;
pub mod error;
pub mod field;
pub mod graded;
pub mod hochschild;
pub mod linalg;
pub mod morphism;
pub mod multilinear;
pub mod polydules;
pub mod transfer;

pub use ainf::{AInfStructure, StasheffReport, UnitReport, Witness};
pub use bar::{
    contract_bar_strictly_unital, AcyclicityCertificate, BarContractionReport,
    BarDifferentialReport, TruncatedBarCoalgebra, WordSum,
};
pub use error::{Error, Result};
pub use field::{FieldSpec, K};
pub use graded::{BasisElt, Space, Sv};
pub use morphism::{cohomology, quasi_iso, AInfMorphism, Family, Homotopy, MorphismReport};
pub use multilinear::{koszul_sign, shift_to_bar, unshift_from_bar, MultilinearMap};
pub use hochschild::{
    cochain_slots, hochschild_delta, hom_differential, hom_differential_mixed, is_reduced,
    obstruction_algebra, obstruction_minimal, obstruction_morphism, strictify_morphism,
    strictify_units, Bimodule, HochschildCochain, ObstructionCycle,
};
pub use polydules::{
    cone, deform_module_morphism, gauge_module, ModuleBar, Polydule, PolyduleHomotopy,
    PolyduleMorphism, PolyduleReport,
};
pub use transfer::{
    enumerate_trees, kernel_data, kernel_morphism, minimal_model, minimal_model_contraction,
    split_complex, transfer, transfer_via_perturbation, tree_composite, Complex, Contraction,
    PlanarTree, TransferOutput,
};
