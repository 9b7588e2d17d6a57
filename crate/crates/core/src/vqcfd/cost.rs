use crate::quantum::{multiproduct, norm, real_amplitudes, AnsatzConfig, ShotNoise};
use crate::{Error, Result};

fn measured_overlap(
    theta: &[f64],
    target: &[f64],
    cfg: &AnsatzConfig,
    noise: Option<&mut ShotNoise>,
) -> Result<(f64, f64)> {
    let psi = real_amplitudes(theta, cfg)?;
    if psi.len() != target.len() {
        return Err(Error::LengthMismatch {
            expected: psi.len(),
            got: target.len(),
        });
    }
    let target_norm = norm(target);
    let exact = multiproduct(&[&psi, target])?;
    // |<psi, t>| <= |t| for a unit psi, which bounds the estimator spread.
    let mp = match noise {
        Some(noise) => noise.estimate(exact, target_norm),
        None => exact,
    };
    Ok((mp, target_norm))
}

/// `scale^2 - 2 scale MP(psi(theta), target) + |target|^2`, with the
/// multi-product optionally shot-noised.
pub fn cost(
    theta: &[f64],
    scale: f64,
    target: &[f64],
    cfg: &AnsatzConfig,
    noise: Option<&mut ShotNoise>,
) -> Result<f64> {
    let (mp, target_norm) = measured_overlap(theta, target, cfg, noise)?;
    Ok(scale * scale - 2.0 * scale * mp + target_norm * target_norm)
}

/// Cost at the least-squares optimal scale `s = MP`, i.e.
/// `|t|^2 - MP^2`. Returns the cost and the multi-product used.
pub fn projected_cost(
    theta: &[f64],
    target: &[f64],
    cfg: &AnsatzConfig,
    noise: Option<&mut ShotNoise>,
) -> Result<(f64, f64)> {
    let (mp, target_norm) = measured_overlap(theta, target, cfg, noise)?;
    Ok((target_norm * target_norm - mp * mp, mp))
}

/// `|scale psi(theta) - target|^2` evaluated element by element.
pub fn direct_cost(theta: &[f64], scale: f64, target: &[f64], cfg: &AnsatzConfig) -> Result<f64> {
    let psi = real_amplitudes(theta, cfg)?;
    Ok(psi
        .iter()
        .zip(target)
        .map(|(p, t)| (scale * p - t).powi(2))
        .sum())
}
