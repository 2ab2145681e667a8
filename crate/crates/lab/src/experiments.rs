//! One Monte Carlo trial per `(N, trial index)`.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use deformed_wigner::ensemble::{assemble, build_deformation, sample_wigner, Deformation};
use deformed_wigner::linalg::{dot, eig_projected, eig_sym, lift, Mat, Scalar};
use deformed_wigner::outlier::{master_det_with_tolerance, predict_outliers, prop1_residuals, zeta_scan, ResolventWindow, Side};
use deformed_wigner::rng::{derived_seed, splitmix64, stream, Purpose, TrialRng};
use deformed_wigner::spectral::{Resolvent, Semicircle};
use deformed_wigner::Result;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::checks;
use crate::config::{Experiment, ExperimentConfig, ResolvedEnsemble};
use crate::record::{Row, TrialRecord};

/// Everything a trial needs, resolved once per run.
#[derive(Clone, Debug)]
pub struct Context {
    pub config: ExperimentConfig,
    pub ensemble: ResolvedEnsemble,
}

impl Context {
    pub fn new(config: ExperimentConfig) -> std::result::Result<Self, crate::config::ConfigError> {
        let ensemble = config.ensemble.resolve()?;
        Ok(Self { config, ensemble })
    }

    pub fn sigma(&self) -> f64 {
        self.ensemble.sigma()
    }
}

/// Master seed of the streams used at dimension `n`.
pub fn dimension_seed(master_seed: u64, n: usize) -> u64 {
    let mut s = master_seed ^ (n as u64).wrapping_mul(0xA24B_AED4_963E_E407);
    splitmix64(&mut s)
}

fn rng(ctx: &Context, n: usize, trial: u64, p: Purpose) -> TrialRng {
    stream(dimension_seed(ctx.config.master_seed, n), trial, p)
}

/// Fixed random unit pair for the bilinear experiment at dimension `n`.
pub fn fixed_pair(master_seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut r = stream(master_seed, n as u64, Purpose::Auxiliary);
    let mut unit = || {
        let v: Vec<f64> = (0..n).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / s).collect::<Vec<_>>()
    };
    let u = unit();
    (u, unit())
}

/// `u_k ∝ ratio^k`, truncated to `n` coordinates and normalized.
pub fn geometric_vector(n: usize, ratio: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|k| ratio.powi(k as i32)).collect();
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / s).collect()
}

#[derive(Default)]
struct Outcome {
    rows: Vec<Row>,
    aux: BTreeMap<String, f64>,
    spectrum: Vec<f64>,
}

impl Outcome {
    fn put(&mut self, k: &str, v: f64) {
        self.aux.insert(k.to_string(), v);
    }
}

/// Runs one trial; failures are captured in the record.
pub fn run_trial(ctx: &Context, n: usize, trial: u64) -> TrialRecord {
    let res = catch_unwind(AssertUnwindSafe(|| {
        if ctx.ensemble.beta == 1 {
            trial_in::<f64>(ctx, n, trial)
        } else {
            trial_in::<Complex64>(ctx, n, trial)
        }
    }));
    let seed = derived_seed(dimension_seed(ctx.config.master_seed, n), trial);
    let mut rec = TrialRecord {
        trial,
        n,
        seed,
        rows: Vec::new(),
        aux: BTreeMap::new(),
        spectrum: Vec::new(),
        error: None,
    };
    match res {
        Ok(Ok(o)) => {
            let finite = o.rows.iter().all(|r| {
                r.lambda.is_finite() && r.scaled_fluct.is_finite() && r.prop1_residual.is_none_or(f64::is_finite)
            }) && o.aux.values().all(|v| v.is_finite())
                && o.spectrum.iter().all(|v| v.is_finite());
            if finite {
                rec.rows = o.rows;
                rec.aux = o.aux;
                rec.spectrum = o.spectrum;
            } else {
                rec.error = Some("non-finite trial output".into());
            }
        }
        Ok(Err(e)) => rec.error = Some(e.to_string()),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            rec.error = Some(format!("panic: {msg}"));
        }
    }
    rec
}

fn trial_in<T: Scalar>(ctx: &Context, n: usize, trial: u64) -> Result<Outcome> {
    let cfg = &ctx.config;
    if cfg.experiment == Experiment::Validators {
        return validators_trial(ctx, n, trial);
    }
    let x: Mat<T> = sample_wigner(&ctx.ensemble.spec(n), &mut rng(ctx, n, trial, Purpose::Matrix))?;
    let deformation = || -> Result<Deformation> {
        if cfg.deformation.spikes.is_empty() {
            return Ok(Deformation::empty(n));
        }
        build_deformation(
            &cfg.deformation.spikes,
            &cfg.deformation.layout,
            n,
            &mut rng(ctx, n, trial, Purpose::Deformation),
        )
    };
    match cfg.experiment {
        Experiment::Semicircle => {
            let d = deformation()?;
            let m = if d.rank() == 0 { x } else { assemble(x, d)?.m() };
            let sd = eig_sym(&m, false)?;
            let mut o = Outcome::default();
            o.put("lambda1", sd.largest());
            o.put("lambda_n", sd.smallest());
            o.spectrum = sd.eigenvalues;
            Ok(o)
        }
        Experiment::DetCharacterization => det_trial(x, deformation()?),
        Experiment::BilinearVariance => bilinear_trial(ctx, x),
        Experiment::ZetaBound => zeta_trial(ctx, x, deformation()?),
        Experiment::LocalL2 => local_trial(ctx, x),
        e if e.uses_outliers() => outlier_trial(ctx, x, deformation()?, e == Experiment::Prop1Reduction),
        _ => unreachable!("every experiment is dispatched"),
    }
}

fn outlier_trial<T: Scalar>(ctx: &Context, x: Mat<T>, d: Deformation, prop1: bool) -> Result<Outcome> {
    let sigma = ctx.sigma();
    let n = x.rows();
    let root = (n as f64).sqrt();
    let pred = predict_outliers(&d.spikes, sigma, n)?;
    let dm = assemble(x, d)?;
    let sd = eig_sym(&dm.m(), false)?;
    let mut o = Outcome::default();
    for g in &pred.groups {
        let residuals = if prop1 && g.side == Side::Upper {
            Some(prop1_residuals(&sd, &dm.x, &dm.deformation, g.spike, sigma)?)
        } else {
            None
        };
        for (i, idx) in g.indices.clone().enumerate() {
            let lambda = sd.eigenvalues[idx];
            o.rows.push(Row {
                block: g.spike,
                eig_index: i,
                lambda,
                rho: g.rho,
                scaled_fluct: g.c_theta * root * (lambda - g.rho),
                prop1_residual: residuals.as_ref().map(|r| r[i]),
            });
        }
    }
    o.put("lambda1", sd.largest());
    o.put("lambda_n", sd.smallest());
    o.put("predicted_top", pred.top());
    Ok(o)
}

/// Points within this distance of `Sp(X)` are skipped.
const DET_EXCLUSION: f64 = 1e-6;

fn det_trial<T: Scalar>(x: Mat<T>, d: Deformation) -> Result<Outcome> {
    let sx = eig_sym(&x, false)?;
    let dm = assemble(x, d)?;
    let sm = eig_sym(&dm.m(), false)?;
    let mut at_eig = 0.0f64;
    let mut at_mid = f64::INFINITY;
    let (mut checked, mut skipped) = (0usize, 0usize);
    for &l in &sm.eigenvalues {
        if sx.distance_to(l) <= DET_EXCLUSION {
            skipped += 1;
            continue;
        }
        checked += 1;
        at_eig = at_eig.max(master_det_with_tolerance(&dm.x, &dm.deformation, l, 1e-12)?.relative());
    }
    for w in sm.eigenvalues.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if sx.distance_to(mid) <= DET_EXCLUSION {
            continue;
        }
        at_mid = at_mid.min(master_det_with_tolerance(&dm.x, &dm.deformation, mid, 1e-12)?.value.abs());
    }
    let mut o = Outcome::default();
    o.put("det_at_eigenvalues", at_eig);
    if at_mid.is_finite() {
        o.put("det_at_midpoints", at_mid);
    }
    o.put("det_checked", checked as f64);
    o.put("det_skipped", skipped as f64);
    Ok(o)
}

fn bilinear_trial<T: Scalar>(ctx: &Context, x: Mat<T>) -> Result<Outcome> {
    let n = x.rows();
    let f = ctx.config.params.test_function();
    let (u, v) = fixed_pair(ctx.config.master_seed, n);
    let (ut, vt): (Vec<T>, Vec<T>) = (lift(&u), lift(&v));
    let proj = eig_projected(&x, &[&ut, &vt])?;
    let b = proj.bilinear(0, 1, |t| f.eval(t));
    let uv = dot(&u, &v);
    let integral = Semicircle::new(ctx.sigma())?.integrate(|t| f.eval(t));
    let mut o = Outcome::default();
    o.put("bilinear", b.re());
    if ctx.ensemble.beta == 2 {
        o.put("bilinear_im", b.im());
    }
    o.put("uv", uv);
    o.put("limit", uv * integral);
    o.put("sup_f", f.norms(0).c_n);
    Ok(o)
}

fn zeta_trial<T: Scalar>(ctx: &Context, x: Mat<T>, d: Deformation) -> Result<Outcome> {
    let n = x.rows();
    let sigma = ctx.sigma();
    let w = ResolventWindow::for_spikes(sigma, &d.column_thetas(), n, ctx.config.params.delta)?;
    let u: Vec<T> = d.column(0);
    let s = zeta_scan(&x, &w, &u, &u, sigma)?;
    let mut o = Outcome::default();
    o.put("zeta_max", s.max_abs);
    o.put("zeta_max_cutoff", s.max_abs_cutoff);
    o.put("zeta_argmax", s.argmax);
    o.put("zeta_bound", ResolventWindow::bound(n));
    o.put("zeta_delta", w.delta);
    Ok(o)
}

fn local_trial<T: Scalar>(ctx: &Context, x: Mat<T>) -> Result<Outcome> {
    let n = x.rows();
    let sigma = ctx.sigma();
    let point = ctx.config.params.point.unwrap_or(2.5 * sigma);
    let u: Vec<T> = lift(&geometric_vector(n, ctx.config.params.ratio()));
    let g = Semicircle::new(sigma)?.stieltjes_real(point)?;
    let r = Resolvent::real(&x, point)?;
    let mut o = Outcome::default();
    o.put("local_stat", (n as f64).sqrt() * (r.bilinear(&u, &u).re() - g));
    Ok(o)
}

/// Block coupling used by the two-by-two check.
pub const BLOCK_EPSILON: f64 = 0.01;

fn validators_trial(ctx: &Context, n: usize, trial: u64) -> Result<Outcome> {
    let mut r = rng(ctx, n, trial, Purpose::Auxiliary);
    let mut o = Outcome::default();
    o.put("decoupling", checks::decoupling_defect()?);
    o.put("identity", checks::identity_defect(n, &mut r)?);
    o.put("derivative", checks::derivative_defect(n, &mut r)?);
    let t = checks::two_by_two(BLOCK_EPSILON, &mut r)?;
    o.put("block_shift", t.shift);
    o.put("block_closed_form_gap", t.closed_form_gap);
    o.put("block_bound_ratio", checks::random_block_ratio(0.05, 10, &mut r)?);
    if trial == 0 {
        let h = checks::hs_check(ctx.config.params.hs_dim(), &mut r)?;
        o.put("hs_rel_error", h.rel_error);
        o.put("hs_variant_gap", h.variant_gap);
        o.put("hs_quad_error", h.quad_error);
    }
    Ok(o)
}
