//! Cross-checks cone membership against brute-force geometric oracles.
//!
//! The implementation decides membership through a wrapped angular distance.
//! The primary oracle here never wraps an angle: it treats the cone as the
//! intersection of the two half-planes bounded by its edge rays and tests
//! sign conditions on cross products, which is exact to machine precision.
//! A secondary check sweeps densely sampled boundary rays and accepts its own
//! sampling resolution as the comparison band.

use airprox_core::avoidance::Cone;
use airprox_core::geometry::PlanarVec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Half-plane oracle: `w` is in the wedge iff it lies counterclockwise of
/// the right edge and clockwise of the left edge. Valid for half-angles
/// below PI/2, which the cone clamp guarantees.
fn oracle_contains(cone: &Cone, v: PlanarVec) -> bool {
    let w = v - cone.apex;
    if w.x == 0.0 && w.y == 0.0 {
        return true;
    }
    let right_edge = PlanarVec::from_bearing(cone.axis_bearing - cone.half_angle);
    let left_edge = PlanarVec::from_bearing(cone.axis_bearing + cone.half_angle);
    right_edge.cross(w) >= 0.0 && w.cross(left_edge) >= 0.0
}

/// Signed angular distance from `v` to the cone boundary (negative inside).
fn boundary_distance(cone: &Cone, v: PlanarVec) -> f64 {
    let w = v - cone.apex;
    let off = airprox_core::geometry::wrap_angle(w.bearing() - cone.axis_bearing).abs();
    off - cone.half_angle
}

fn random_cone(rng: &mut ChaCha8Rng) -> Cone {
    Cone {
        apex: PlanarVec::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        axis_bearing: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        half_angle: rng.gen_range(0.05..1.55),
    }
}

#[test]
fn membership_agrees_with_half_plane_oracle_on_10k_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut checked = 0usize;
    let mut disagreements = 0usize;
    while checked < 10_000 {
        let cone = random_cone(&mut rng);
        let v = PlanarVec::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        // Points inside a 1e-9 angular band around the boundary are the only
        // ones where the two formulations may legitimately differ.
        if boundary_distance(&cone, v).abs() <= 1e-9 {
            continue;
        }
        checked += 1;
        if cone.contains(v) != oracle_contains(&cone, v) {
            disagreements += 1;
        }
    }
    assert_eq!(
        disagreements, 0,
        "membership disagreed with the half-plane oracle outside the boundary band"
    );
}

#[test]
fn membership_agrees_with_dense_boundary_sampling() {
    // Sampling oracle: the cone interval is swept with N rays; a vector is
    // accepted when its bearing is within half a sampling step of some ray.
    // Test points closer to the boundary than the sampling resolution are
    // skipped, since the oracle cannot resolve them.
    const RAYS: usize = 20_001;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0usize;
    while checked < 1_000 {
        let cone = random_cone(&mut rng);
        let v = PlanarVec::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let step = 2.0 * cone.half_angle / (RAYS - 1) as f64;
        if boundary_distance(&cone, v).abs() <= step {
            continue;
        }
        checked += 1;

        let w = v - cone.apex;
        let mut sampled_inside = false;
        for k in 0..RAYS {
            let phi = cone.axis_bearing - cone.half_angle + k as f64 * step;
            let to_ray = airprox_core::geometry::wrap_angle(w.bearing() - phi).abs();
            if to_ray <= step * 0.5 {
                sampled_inside = true;
                break;
            }
        }
        assert_eq!(
            cone.contains(v),
            sampled_inside,
            "dense sampling disagreed for cone {cone:?} and v {v:?}"
        );
    }
}
