//! Frames, planar vectors, and polar/Cartesian conversions.
//!
//! Body frames follow the x-forward / y-right / z-down convention; a positive
//! bearing therefore points towards +y. All angles are kept in `(-PI, PI]`.

use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

const TAU: f64 = 2.0 * PI;

/// A planar vector in meters, or m/s when used as a velocity.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanarVec {
    pub x: f64,
    pub y: f64,
}

impl PlanarVec {
    pub const ZERO: PlanarVec = PlanarVec { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing at `bearing` (0 = +x, PI/2 = +y).
    pub fn from_bearing(bearing: f64) -> Self {
        Self::new(bearing.cos(), bearing.sin())
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dot(&self, other: PlanarVec) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product `self x other`.
    pub fn cross(&self, other: PlanarVec) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Planar bearing of this vector; `atan2(0, 0)` is defined as 0.
    pub fn bearing(&self) -> f64 {
        wrap_angle(self.y.atan2(self.x))
    }

    pub fn scaled_to(&self, magnitude: f64) -> PlanarVec {
        let n = self.norm();
        if n == 0.0 {
            PlanarVec::ZERO
        } else {
            *self * (magnitude / n)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for PlanarVec {
    type Output = PlanarVec;
    fn add(self, rhs: PlanarVec) -> PlanarVec {
        PlanarVec::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for PlanarVec {
    type Output = PlanarVec;
    fn sub(self, rhs: PlanarVec) -> PlanarVec {
        PlanarVec::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for PlanarVec {
    type Output = PlanarVec;
    fn neg(self) -> PlanarVec {
        PlanarVec::new(-self.x, -self.y)
    }
}

impl Mul<f64> for PlanarVec {
    type Output = PlanarVec;
    fn mul(self, rhs: f64) -> PlanarVec {
        PlanarVec::new(self.x * rhs, self.y * rhs)
    }
}

/// Relative pose of one vehicle expressed in another vehicle's body frame.
///
/// `rho` is the 3D range between frame origins, `beta` the planar bearing,
/// `z_rel` the height difference, and `psi_rel` the relative yaw.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RelativePose {
    pub rho: f64,
    pub beta: f64,
    pub z_rel: f64,
    pub psi_rel: f64,
}

impl RelativePose {
    /// Builds a pose with `beta` and `psi_rel` normalized to `(-PI, PI]`.
    pub fn new(rho: f64, beta: f64, z_rel: f64, psi_rel: f64) -> Self {
        debug_assert!(rho >= 0.0, "range must be non-negative");
        Self {
            rho,
            beta: wrap_angle(beta),
            z_rel,
            psi_rel: wrap_angle(psi_rel),
        }
    }

    /// Pose of a relative Cartesian position plus yaw difference.
    pub fn from_cartesian(p: PlanarVec, z_rel: f64, psi_rel: f64) -> Self {
        let (rho, beta) = to_polar(p, z_rel);
        Self::new(rho, beta, z_rel, psi_rel)
    }
}

/// Normalizes an angle to `(-PI, PI]`. Non-finite inputs yield NaN.
///
/// Idempotent: values already in range are returned unchanged (bit-exact).
pub fn wrap_angle(a: f64) -> f64 {
    debug_assert!(a.is_finite(), "wrap_angle expects a finite angle");
    if a > -PI && a <= PI {
        return a;
    }
    let mut t = (a + PI) % TAU;
    if t < 0.0 {
        t += TAU;
    }
    if t == 0.0 {
        PI
    } else {
        t - PI
    }
}

/// Converts a relative Cartesian position to (range, bearing).
///
/// The range includes the height difference; the bearing is planar. A zero
/// vector maps to `(|z_rel|, 0)` since `atan2(0, 0)` is defined as 0.
pub fn to_polar(p: PlanarVec, z_rel: f64) -> (f64, f64) {
    let rho = (p.x * p.x + p.y * p.y + z_rel * z_rel).sqrt();
    (rho, p.bearing())
}

/// Rotates `v` by `angle`: positive angles turn +x towards +y.
pub fn rotate2d(v: PlanarVec, angle: f64) -> PlanarVec {
    let (s, c) = angle.sin_cos();
    PlanarVec::new(c * v.x - s * v.y, s * v.x + c * v.y)
}
