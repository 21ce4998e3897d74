//! Rigid-motion fitting used to decide whether two sampled surfaces are
//! congruent.
//!
//! Two point clouds with known correspondence are compared by orthogonal
//! Procrustes: the proper rotation + translation minimizing the RMS distance
//! (Kabsch, via an SVD of the cross-covariance). Congruence testing needs
//! both branches of O(3), so the score carries the best direct fit and the
//! best fit against a mirrored copy — an improper motion is a proper one
//! composed with any fixed reflection, so reflecting once covers them all.
//!
//! Scores are computed on a few random corresponding subsets and the worst
//! subset is reported: a genuinely congruent pair fits on every subset,
//! while a lucky partial overlap does not.

use crate::error::{Error, Result};
use crate::quat::Vec3;
use nalgebra::{Matrix3, Vector3};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest subset size used per Procrustes fit; beyond this the RMS of a
/// rigid fit is statistically stable and more points only cost time.
const MAX_SUBSET: usize = 512;

/// Number of random corresponding subsets tested.
const SUBSETS: usize = 3;

/// RMS distances after the best rigid alignment of corresponding clouds.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct CongruenceScore {
    /// Worst-subset RMS for the best proper rigid motion (rotation + translation).
    pub direct: f64,
    /// Worst-subset RMS after mirroring the second cloud (orientation-reversing branch).
    pub mirrored: f64,
}

/// RMS distance between corresponding points after the optimal proper rigid
/// alignment (rotation + translation) of `a` onto `b`.
pub fn best_rigid_rms(a: &[Vec3], b: &[Vec3]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 3 {
        return Err(Error::GridMismatch(format!(
            "rigid alignment needs two equal clouds with ≥ 3 points (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    let n = a.len() as f64;
    let mut ca = Vector3::zeros();
    let mut cb = Vector3::zeros();
    for (p, q) in a.iter().zip(b) {
        ca += Vector3::new(p.x, p.y, p.z);
        cb += Vector3::new(q.x, q.y, q.z);
    }
    ca /= n;
    cb /= n;
    let mut h = Matrix3::zeros();
    for (p, q) in a.iter().zip(b) {
        let pa = Vector3::new(p.x, p.y, p.z) - ca;
        let pb = Vector3::new(q.x, q.y, q.z) - cb;
        h += pb * pa.transpose(); // H = Σ b̃ ãᵀ, so that R = U D Vᵀ maps a → b
    }
    let svd = h.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::DegenerateJacobian),
    };
    // Flip the smallest singular direction if needed to stay in SO(3).
    let d = (u * v_t).determinant().signum();
    let r = u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * v_t;
    let mut sum = 0.0;
    for (p, q) in a.iter().zip(b) {
        let pa = Vector3::new(p.x, p.y, p.z) - ca;
        let pb = Vector3::new(q.x, q.y, q.z) - cb;
        sum += (r * pa - pb).norm_squared();
    }
    Ok((sum / n).sqrt())
}

/// Mirror image of a cloud through the plane x = 0. Which plane is used does
/// not matter for congruence scoring: composing with the proper-rotation fit
/// reaches every orientation-reversing motion.
fn mirrored(cloud: &[Vec3]) -> Vec<Vec3> {
    cloud.iter().map(|p| Vec3::new(-p.x, p.y, p.z)).collect()
}

/// Congruence score of two corresponding clouds: worst-subset best-fit RMS
/// for the direct and the mirrored branch. Subset choice is deterministic in
/// `seed`.
pub fn congruence_score(a: &[Vec3], b: &[Vec3], seed: u64) -> Result<CongruenceScore> {
    if a.len() != b.len() || a.len() < 3 {
        return Err(Error::GridMismatch(format!(
            "congruence scoring needs two equal clouds with ≥ 3 points (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    let b_mirror = mirrored(b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = a.len().min(MAX_SUBSET);
    let mut direct: f64 = 0.0;
    let mut mirror: f64 = 0.0;
    let mut indices: Vec<usize> = (0..a.len()).collect();
    for _ in 0..SUBSETS {
        let (chosen, _) = indices.partial_shuffle(&mut rng, m);
        let sa: Vec<Vec3> = chosen.iter().map(|&i| a[i]).collect();
        let sb: Vec<Vec3> = chosen.iter().map(|&i| b[i]).collect();
        let sm: Vec<Vec3> = chosen.iter().map(|&i| b_mirror[i]).collect();
        direct = direct.max(best_rigid_rms(&sa, &sb)?);
        mirror = mirror.max(best_rigid_rms(&sa, &sm)?);
    }
    Ok(CongruenceScore { direct, mirrored: mirror })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quat;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn random_cloud(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec3> {
        (0..n)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
            })
            .collect()
    }

    fn moved(cloud: &[Vec3], g: Quat, t: Vec3) -> Vec<Vec3> {
        cloud.iter().map(|&p| g.rotate(p) + t).collect()
    }

    #[test]
    fn recovers_a_random_rigid_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cloud = random_cloud(&mut rng, 200);
        let g = Quat::new(0.4, -1.1, 0.3, 0.8).normalized();
        let b = moved(&cloud, g, Vec3::new(0.7, -2.0, 1.3));
        let rms = best_rigid_rms(&cloud, &b).unwrap();
        assert_abs_diff_eq!(rms, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mirror_image_is_caught_only_by_the_mirrored_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cloud = random_cloud(&mut rng, 400);
        // Reflect through y = 0, then move rigidly: an improper motion.
        let reflected: Vec<Vec3> = cloud.iter().map(|p| Vec3::new(p.x, -p.y, p.z)).collect();
        let g = Quat::new(0.9, 0.2, -0.5, 0.1).normalized();
        let b = moved(&reflected, g, Vec3::new(-0.4, 0.0, 2.2));
        let score = congruence_score(&cloud, &b, 1).unwrap();
        assert!(score.mirrored < 1e-10, "mirrored branch should fit, got {}", score.mirrored);
        assert!(score.direct > 1e-2, "direct branch should fail, got {}", score.direct);
    }

    #[test]
    fn unrelated_clouds_score_high_on_both_branches() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_cloud(&mut rng, 300);
        let b = random_cloud(&mut rng, 300);
        let score = congruence_score(&a, &b, 2).unwrap();
        assert!(score.direct > 1e-1);
        assert!(score.mirrored > 1e-1);
    }

    #[test]
    fn scoring_is_deterministic_in_the_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = random_cloud(&mut rng, 700);
        let g = Quat::new(0.1, 0.9, -0.2, 0.4).normalized();
        let b = moved(&a, g, Vec3::new(0.0, 0.5, -0.1));
        let s1 = congruence_score(&a, &b, 42).unwrap();
        let s2 = congruence_score(&a, &b, 42).unwrap();
        assert_eq!(s1.direct, s2.direct);
        assert_eq!(s1.mirrored, s2.mirrored);
        assert!(s1.direct < 1e-12);
    }

    #[test]
    fn rejects_mismatched_clouds() {
        let a = vec![Vec3::ZERO; 4];
        let b = vec![Vec3::ZERO; 5];
        assert!(best_rigid_rms(&a, &b).is_err());
        assert!(congruence_score(&a, &b, 0).is_err());
    }
}
