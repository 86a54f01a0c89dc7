//! Sheaves, presheaf tables, sheafification and exactness.

pub mod exact;
pub mod sheaf;
pub mod table;

pub use sheaf::{
    build_sheaf, constant_sheaf, global_sections, restriction_map, sections, sections_map, skyscraper,
    zero_sheaf, Sections, Sheaf, SheafHom,
};
pub use table::{
    check_sheaf_axioms, factors_through_unit, minimal_open_cover, sheafify, sheafify_hom, stalk_of_table,
    unit_is_isomorphism, AxiomReport, PresheafTable, Sheafification,
};
pub use exact::{
    direct_sum_hom, direct_sum_sheaf, is_exact_sequence, is_short_exact, sections_left_exactness, sheaf_hom_parts,
    subquotient_sheaf, ExactnessReport, LeftExactnessReport, SheafHomParts,
};
