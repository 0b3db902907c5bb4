use std::fmt;
use std::ops::{Add, Mul};

/// Vanishing order of a series or polynomial at the origin.
///
/// `Infinity` is the order of the zero element. The derived ordering puts every
/// finite order below `Infinity`, so `min` drops infinite entries naturally.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u64),
    Infinity,
}

impl Order {
    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinity)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Infinity => None,
        }
    }

    /// Minimum over an iterator; the empty minimum is `Infinity`.
    pub fn min_of<I: IntoIterator<Item = Order>>(it: I) -> Order {
        it.into_iter().fold(Order::Infinity, std::cmp::min)
    }

    /// Order of the m-th power.
    pub fn scale(self, m: u64) -> Order {
        match self {
            Order::Finite(k) => Order::Finite(k * m),
            Order::Infinity => Order::Infinity,
        }
    }
}

impl Add for Order {
    type Output = Order;

    fn add(self, rhs: Order) -> Order {
        match (self, rhs) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::Infinity,
        }
    }
}

impl Add<u64> for Order {
    type Output = Order;

    fn add(self, rhs: u64) -> Order {
        self + Order::Finite(rhs)
    }
}

impl Mul<u64> for Order {
    type Output = Order;

    fn mul(self, rhs: u64) -> Order {
        self.scale(rhs)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinity => f.write_str("inf"),
        }
    }
}

impl serde::Serialize for Order {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Finite(k) => s.serialize_u64(*k),
            Order::Infinity => s.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_addition() {
        assert_eq!(Order::Infinity + 3, Order::Infinity);
        assert_eq!(Order::Finite(2) + Order::Infinity, Order::Infinity);
        assert_eq!(Order::Finite(2) + 3, Order::Finite(5));
    }

    #[test]
    fn min_drops_infinity() {
        assert_eq!(
            Order::min_of([Order::Infinity, Order::Finite(4), Order::Finite(7)]),
            Order::Finite(4)
        );
        assert_eq!(Order::min_of([]), Order::Infinity);
        assert_eq!(Order::Infinity.scale(5), Order::Infinity);
        assert_eq!(Order::Finite(3) * 5, Order::Finite(15));
    }
}
