//! Complexes, double complexes, spectral sequences and hypercohomology.

pub mod complex;
pub mod double;
pub mod hyper;
pub mod pages;

pub use complex::{cohomology_sheaves, GroupComplex, SheafComplex};
pub use double::{total_complex, total_complex_with, DoubleComplex, SignRule, TotalComplex};
pub use pages::{spectral_sequence, spectral_sequence_of, stabilization_bound, Axis, Page, PageMap, SpectralPages};
pub use hyper::{
    acyclic_resolution_check, godement_double_complex, hypercohomology, AcyclicReport, AcyclicVerdict, Hypercohomology,
    TermAcyclicity,
};
