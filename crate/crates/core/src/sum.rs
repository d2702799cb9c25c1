//! Compensated summation.
//!
//! Double sums over support points are reduced with Neumaier's variant of
//! Kahan summation, so the result does not depend on the order in which
//! terms arrive beyond a few ulps.

#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator of floats.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<Neumaier>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(terms), 2.0);
        let naive: f64 = terms.iter().sum();
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(sum(std::iter::empty()), 0.0);
    }
}
