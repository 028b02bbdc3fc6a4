//! Small velocity-space vector.
//!
//! Simulations run in dimension 2 or 3. The same fixed-size storage serves
//! both: for `dim == 2` the z component is kept exactly zero, so dot products
//! and norms over all three components agree with the 2-D values.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Build from the first `slice.len()` components, padding the rest with zero.
    pub fn from_slice(slice: &[f64]) -> Self {
        let mut v = Self::ZERO;
        if !slice.is_empty() {
            v.x = slice[0];
        }
        if slice.len() > 1 {
            v.y = slice[1];
        }
        if slice.len() > 2 {
            v.z = slice[2];
        }
        v
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Largest absolute component.
    pub fn norm_inf(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Components up to `dim`, for output and per-axis loops.
    pub fn components(self, dim: usize) -> [f64; 3] {
        debug_assert!(dim <= 3);
        let mut c = [self.x, self.y, self.z];
        for entry in c.iter_mut().skip(dim) {
            *entry = 0.0;
        }
        c
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        match k {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("vector component index {k} out of range"),
        }
    }
}

impl Add for Vec3 {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Self) {
        self.x += rhs.x;
        self.y += rhs.y;
        self.z += rhs.z;
    }
}

impl Sub for Vec3 {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, rhs: Self) {
        self.x -= rhs.x;
        self.y -= rhs.y;
        self.z -= rhs.z;
    }
}

impl Mul<f64> for Vec3 {
    type Output = Self;

    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;

    fn mul(self, rhs: Vec3) -> Vec3 {
        rhs * self
    }
}

impl Neg for Vec3 {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padded_components_stay_zero() {
        let v = Vec3::from_slice(&[1.0, -2.0]);
        assert_eq!(v.z, 0.0);
        assert_eq!(v.norm_sq(), 5.0);
        assert_eq!(v.components(2), [1.0, -2.0, 0.0]);
    }

    #[test]
    fn arithmetic() {
        let a = Vec3::new(1.0, 2.0, 3.0);
        let b = Vec3::new(-1.0, 0.5, 2.0);
        assert_eq!(a + b, Vec3::new(0.0, 2.5, 5.0));
        assert_eq!(a - b, Vec3::new(2.0, 1.5, 1.0));
        assert_eq!(2.0 * a, Vec3::new(2.0, 4.0, 6.0));
        assert_eq!(a.dot(b), 6.0);
        assert_eq!((-a).norm_inf(), 3.0);
    }
}
