//! Synthetic two-view scenes for the five-point relative pose fixture.
//!
//! Camera 1 sits at the origin looking down `+z`. Points fill a box of size
//! `1 × 1 × depth` centred at distance 1. Camera 2 sits `baseline` away from
//! camera 1 and looks at the box centre.

use std::collections::HashMap;

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SceneInstance {
    pub points: Vec<Vector3<f64>>,
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
    /// Normalized image coordinates in camera 1 and camera 2.
    pub q1: Vec<[f64; 2]>,
    pub q2: Vec<[f64; 2]>,
}

#[derive(Clone, Copy, Debug)]
pub struct SceneParams {
    pub distance: f64,
    pub width: f64,
    pub depth: f64,
    pub baseline: f64,
    pub npoints: usize,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams { distance: 1.0, width: 1.0, depth: 0.5, baseline: 0.3, npoints: 5 }
    }
}

impl SceneParams {
    /// Nearly planar scene; makes the five-point problem ill-conditioned.
    pub fn near_planar(depth: f64) -> Self {
        SceneParams { depth, ..Self::default() }
    }
}

impl SceneInstance {
    pub fn random(params: &SceneParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = params.width / 2.0;
        let h = params.depth / 2.0;
        let points: Vec<Vector3<f64>> = (0..params.npoints)
            .map(|_| {
                Vector3::new(
                    rng.gen_range(-w..=w),
                    rng.gen_range(-w..=w),
                    params.distance + rng.gen_range(-h..=h),
                )
            })
            .collect();
        // Random direction for the second centre, orientation looking at the box.
        let dir: Vector3<f64> = loop {
            let v = Vector3::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                break v / n;
            }
        };
        let centre: Vector3<f64> = dir * params.baseline;
        let target = Vector3::new(0.0, 0.0, params.distance);
        let forward = (target - centre).normalize();
        let axis = Vector3::z().cross(&forward);
        let look = if axis.norm() < 1e-12 {
            Rotation3::identity()
        } else {
            Rotation3::from_axis_angle(&Unit::new_normalize(axis), Vector3::z().angle(&forward))
        };
        let roll = Rotation3::from_axis_angle(&Unit::new_normalize(forward), rng.gen_range(-0.3..=0.3));
        // World-from-camera orientation; the camera maps X to R (X − c).
        let rotation = (roll * look).inverse().into_inner();
        let translation = -rotation * centre;
        let q1 = points.iter().map(|p| [p.x / p.z, p.y / p.z]).collect();
        let q2 = points
            .iter()
            .map(|p| {
                let x = rotation * p + translation;
                [x.x / x.z, x.y / x.z]
            })
            .collect();
        SceneInstance { points, rotation, translation, q1, q2 }
    }

    /// `E = [t]× R`, so that `q2ᵀ E q1 = 0`.
    pub fn essential(&self) -> Matrix3<f64> {
        self.translation.cross_matrix() * self.rotation
    }

    /// Raw data for the five-point problem file.
    pub fn data(&self) -> HashMap<String, f64> {
        let mut out = HashMap::new();
        for (k, (a, b)) in self.q1.iter().zip(&self.q2).enumerate() {
            let i = k + 1;
            out.insert(format!("x1_{i}"), a[0]);
            out.insert(format!("y1_{i}"), a[1]);
            out.insert(format!("x2_{i}"), b[0]);
            out.insert(format!("y2_{i}"), b[1]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projections_satisfy_the_epipolar_constraint() {
        let s = SceneInstance::random(&SceneParams::default(), 3);
        let e = s.essential();
        assert!((s.translation.norm() - 0.3).abs() < 1e-12);
        for (a, b) in s.q1.iter().zip(&s.q2) {
            let r = Vector3::new(b[0], b[1], 1.0).dot(&(e * Vector3::new(a[0], a[1], 1.0)));
            assert!(r.abs() < 1e-14);
        }
        // Camera 2 sees every point in front of it.
        for p in &s.points {
            assert!((s.rotation * p + s.translation).z > 0.0);
        }
    }
}
