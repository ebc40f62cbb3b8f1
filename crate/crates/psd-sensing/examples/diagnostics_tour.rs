//! Tour of the model diagnostics: empirical boundedness ratios of the
//! induced asymmetric map, the covariance spectrum conditions, the trace band
//! of the transformed feasible set, and the evaluable recovery error bound.
//!
//!     cargo run --release --example diagnostics_tour

use psd_sensing::diagnostics::{
    decaying_spectrum_matrix, error_bound_rhs, sigma_condition_check, srub_estimate,
    trace_flatness_check, BoundInputs,
};
use psd_sensing::harness::planted_diag;
use psd_sensing::sensing::{build_transform, sample_ensemble, Distribution, NoiseModel};
use psd_sensing::spectral::tail_nuclear_norm;

fn main() -> psd_sensing::Result<()> {
    let (n, m) = (30, 1200);
    let z = sample_ensemble(n, m, 5, Distribution::UnitSphere);

    // two-sided boundedness of the induced asymmetric map on rank-1 matrices
    let est = srub_estimate(&z, 1, 200, 6)?;
    println!("restricted boundedness over {} rank-1 samples:", est.trials);
    println!("  c1_hat = {:.4}, c2_hat = {:.4}, spread {:.2}", est.c1_hat, est.c2_hat, est.c2_hat / est.c1_hat);

    // covariance spectrum conditions behind the coordinate transform
    let ctx = build_transform(&z)?;
    let sig = sigma_condition_check(&ctx);
    println!("covariance spectrum: ratio {:.4} (<= sqrt 2: {}), min {:.4} (>= 2 sqrt 2 - 2: {})",
        sig.ratio, sig.pass_ratio, sig.min, sig.pass_min);

    // the transformed feasible set is trace-flat: band width 2*noise_l1/m
    let x0 = planted_diag(n, 2);
    let ms = z.measure(&x0, &NoiseModel::Uniform(1e-3), 7)?;
    let y = ctx.g_forward(&x0)?;
    let band = trace_flatness_check(&y, &ms.b, ms.noise_l1, m);
    println!("trace band: [{:.6}, {:.6}], trace {:.6}, inside: {}", band.lo, band.hi, band.trace, band.pass);

    // error bound on a full-rank target, evaluated at increasing cut ranks
    let full = decaying_spectrum_matrix(n);
    println!("error bound on the decaying-spectrum matrix (c1 = c2 = 1):");
    for r in [1usize, 2, 4, 8] {
        let rhs = error_bound_rhs(&BoundInputs {
            c1: 1.0,
            c2: 1.0,
            r,
            tail_norm: tail_nuclear_norm(&full, n - r)?,
            noise_l1: ms.noise_l1,
            m,
        })?;
        println!("  r = {r}: bound {rhs:.4e}");
    }
    Ok(())
}
