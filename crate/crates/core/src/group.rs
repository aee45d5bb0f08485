//! Exact log-domain capacities.
//!
//! A [`GroupValue`] `(count, w)` stands for the additive quantity
//! `count·Ω + log w`, where `Ω` is larger than any logarithm that can occur.
//! Addition of log values becomes multiplication of the rational weights, so
//! sums of `log d_e` are carried exactly and exponentiating a value is just
//! reading off its weight.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupValue {
    count: i64,
    weight: BigRational,
}

impl GroupValue {
    /// `(count, weight)`; `weight` must be positive.
    pub fn new(count: i64, weight: BigRational) -> Self {
        assert!(weight.is_positive(), "log-weight must be positive");
        GroupValue { count, weight }
    }

    pub fn zero() -> Self {
        GroupValue { count: 0, weight: BigRational::one() }
    }

    /// `log d` for an integer `d ≥ 1`.
    pub fn log_of(d: &BigUint) -> Self {
        GroupValue::new(0, BigRational::from_integer(BigInt::from(d.clone())))
    }

    /// A pure integer count with unit weight.
    pub fn count_only(count: i64) -> Self {
        GroupValue { count, weight: BigRational::one() }
    }

    pub fn count(&self) -> i64 {
        self.count
    }

    /// `exp` of the logarithmic part.
    pub fn weight(&self) -> &BigRational {
        &self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.count == 0 && self.weight.is_one()
    }

    pub fn is_positive(&self) -> bool {
        *self > GroupValue::zero()
    }

    pub fn is_nonnegative(&self) -> bool {
        *self >= GroupValue::zero()
    }

    pub fn min(a: GroupValue, b: GroupValue) -> GroupValue {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Default for GroupValue {
    fn default() -> Self {
        GroupValue::zero()
    }
}

impl Ord for GroupValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count.cmp(&other.count).then_with(|| self.weight.cmp(&other.weight))
    }
}

impl PartialOrd for GroupValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &GroupValue {
    type Output = GroupValue;
    fn add(self, rhs: &GroupValue) -> GroupValue {
        GroupValue { count: self.count + rhs.count, weight: &self.weight * &rhs.weight }
    }
}

impl Add for GroupValue {
    type Output = GroupValue;
    fn add(self, rhs: GroupValue) -> GroupValue {
        &self + &rhs
    }
}

impl Sub for &GroupValue {
    type Output = GroupValue;
    fn sub(self, rhs: &GroupValue) -> GroupValue {
        GroupValue { count: self.count - rhs.count, weight: &self.weight / &rhs.weight }
    }
}

impl Sub for GroupValue {
    type Output = GroupValue;
    fn sub(self, rhs: GroupValue) -> GroupValue {
        &self - &rhs
    }
}

impl Neg for &GroupValue {
    type Output = GroupValue;
    fn neg(self) -> GroupValue {
        GroupValue { count: -self.count, weight: self.weight.recip() }
    }
}

impl std::iter::Sum for GroupValue {
    fn sum<I: Iterator<Item = GroupValue>>(iter: I) -> GroupValue {
        iter.fold(GroupValue::zero(), |a, b| a + b)
    }
}

impl fmt::Display for GroupValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.count, self.weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gv(count: i64, n: i64, d: i64) -> GroupValue {
        GroupValue::new(count, BigRational::new(n.into(), d.into()))
    }

    fn arb() -> impl Strategy<Value = GroupValue> {
        (0i64..5, 1i64..40, 1i64..40).prop_map(|(c, n, d)| gv(c, n, d))
    }

    #[test]
    fn lexicographic_order() {
        assert!(gv(1, 1, 100) > gv(0, 1000, 1));
        assert!(gv(0, 3, 1) > gv(0, 2, 1));
        assert_eq!(gv(0, 2, 1) + gv(0, 3, 1), gv(0, 6, 1));
        assert!(GroupValue::zero().is_zero());
        assert!(gv(1, 1, 7).is_positive());
        assert!(!gv(0, 1, 7).is_nonnegative());
    }

    proptest! {
        #[test]
        fn group_laws(a in arb(), b in arb(), c in arb()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!(&a + &-&a, GroupValue::zero());
            // translation invariance of the order
            prop_assert_eq!(a.cmp(&b), (&a + &c).cmp(&(&b + &c)));
            if b <= a {
                prop_assert!((&a - &b).is_nonnegative());
            }
        }
    }
}
