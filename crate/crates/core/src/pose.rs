//! Planar pose `(x, y, theta)`, also used for every other R³ quantity in the
//! toolkit: pose rates, coupling signals and stacked error blocks.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Pose<T> {
    pub x: T,
    pub y: T,
    pub theta: T,
}

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Pose<T> {
    pub const fn new(x: T, y: T, theta: T) -> Self {
        Self { x, y, theta }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.theta]
    }

    pub fn position(self) -> Vec2<T> {
        Vec2::new(self.x, self.y)
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.theta * other.theta
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.theta.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }

    pub fn cast<U: Real>(self) -> Pose<U> {
        Pose::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()), U::lit(self.theta.as_f64()))
    }
}

impl<T: Real> Add for Pose<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.theta + rhs.theta)
    }
}

impl<T: Real> Sub for Pose<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.theta - rhs.theta)
    }
}

impl<T: Real> Neg for Pose<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.theta)
    }
}

impl<T: Real> Mul<T> for Pose<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.theta * k)
    }
}

impl<T: Real> AddAssign for Pose<T> {
    fn add_assign(&mut self, rhs: Self) {
        self.x += rhs.x;
        self.y += rhs.y;
        self.theta += rhs.theta;
    }
}

impl<T: Real> SubAssign for Pose<T> {
    fn sub_assign(&mut self, rhs: Self) {
        self.x -= rhs.x;
        self.y -= rhs.y;
        self.theta -= rhs.theta;
    }
}

impl<T: Real> std::iter::Sum for Pose<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, p| acc + p)
    }
}

impl<T: Real> Vec2<T> {
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Euclidean norm of a stacked vector of poses.
pub fn stacked_norm<T: Real>(v: &[Pose<T>]) -> T {
    v.iter().map(|p| p.norm_squared()).sum::<T>().sqrt()
}

/// Largest absolute component across a stacked vector.
pub fn stacked_max_abs<T: Real>(v: &[Pose<T>]) -> T {
    v.iter().fold(T::zero(), |m, p| m.max(p.max_abs()))
}
