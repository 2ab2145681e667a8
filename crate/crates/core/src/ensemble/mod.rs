//! Wigner matrices `X_N = W_N/√N` and finite-rank deformations `U Θ U*`.

mod deformation;
mod law;
mod wigner;

pub use deformation::{
    assemble, build_deformation, tail_tolerance, DelocalizationMethod, Deformation, DeformationMode,
    DeformedMatrix, Spike,
};
pub use law::{resolve_entry_law, EntryLaw, LawKind};
pub use wigner::{sample_wigner, RowProfile, WignerSpec, WindowOverride, DEFAULT_MAX_N};
