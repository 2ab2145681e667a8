//! Ordered spectra, resolvent bilinear forms and semicircle analytics.

mod resolvent;
mod semicircle;

pub use crate::linalg::{eig_projected, eig_sym, ProjectedSpectrum, SpectralData};
pub use resolvent::{
    resolvent_bilinear, resolvent_bilinear_sq, spectral_apply, unit, Resolvent, DEFAULT_SPECTRUM_TOLERANCE,
};
pub use semicircle::Semicircle;
