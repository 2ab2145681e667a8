//! Outlier prediction, the `Ξ`/`Z_N` determinant machinery and the
//! reduction residuals.

mod predict;
mod xi;
mod zeta;

pub use predict::{predict_outliers, OutlierGroup, OutlierPrediction, Side};
pub use xi::{
    master_det, master_det_with_tolerance, prop1_residuals, xi_full, xi_matrix, z_matrix, MasterDet, XiBlock,
    SYMMETRY_TOLERANCE,
};
pub use zeta::{zeta_at, zeta_scan, ResolventWindow, ZetaScan};
