//! Exact half-integer quantum numbers.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A half-integer stored as twice its value, so `Half::from_twice(3)` is 3/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Half(i32);

impl Half {
    pub const ZERO: Half = Half(0);
    pub const HALF: Half = Half(1);
    pub const MINUS_HALF: Half = Half(-1);
    pub const THREE_HALVES: Half = Half(3);
    pub const MINUS_THREE_HALVES: Half = Half(-3);
    pub const ONE: Half = Half(2);

    pub const fn from_twice(twice: i32) -> Self {
        Half(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        Half(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        Half(self.0.abs())
    }

    /// Magnetic quantum numbers `-j, -j+1, ..., j`.
    pub fn projections(self) -> impl Iterator<Item = Half> {
        let j = self.0;
        (-j..=j).step_by(2).map(Half)
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
