//! Helffer–Sjöstrand functional calculus and checks of the resolvent and
//! cumulant identities used alongside it.

mod hs;
mod jet;
mod testfn;
mod validators;

pub use hs::{hs_apply, hs_error_estimate, spectral_bounds, sturm_count, Bump, HSQuadrature};
pub use testfn::{Cutoff, NormReport, TestFunction};
pub use validators::{
    block_perturbation_shift, check_block_perturbation, check_decoupling, check_resolvent_derivatives,
    check_resolvent_identity, cumulant_moment_constant, decoupling_constant, BlockPerturbation, DecouplingCheck,
    DerivativeCheck, IdentityCheck,
};
