//! Capacities on a finite set and the discrete Choquet integral.
//!
//! A capacity is stored as a dense table of length `2^n`, indexed by the
//! bitmask of the subset (bit `i` is element `i + 1`).

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::multimatrix::{AlgebraShape, RankVector};
use crate::scale::RankFunction;

/// Largest ground set a dense table may have.
pub const MAX_GROUND_SIZE: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Capacity {
    n: usize,
    values: Vec<f64>,
}

/// A pair `X ⊂ Y = X ∪ {i}` with `μ(X) > μ(Y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityViolation {
    pub smaller: u32,
    pub larger: u32,
    pub smaller_value: f64,
    pub larger_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityReport {
    pub empty_set_value: f64,
    pub negative_values: Vec<u32>,
    pub violations: Vec<MonotonicityViolation>,
}

impl CapacityReport {
    pub fn is_valid(&self) -> bool {
        self.empty_set_value == 0.0 && self.negative_values.is_empty() && self.violations.is_empty()
    }
}

impl Capacity {
    /// A table of the right length. Use [`Capacity::validate`] for the
    /// capacity axioms.
    pub fn from_table(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > MAX_GROUND_SIZE {
            return Err(Error::Resource(format!("ground set of size {n} exceeds the limit {MAX_GROUND_SIZE}")));
        }
        if values.len() != 1usize << n {
            return validation(format!("capacity on {n} elements needs {} values, got {}", 1usize << n, values.len()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return validation(format!("capacity value {v} is not finite"));
        }
        Ok(Capacity { n, values })
    }

    /// Table built from `f(mask)`.
    pub fn from_fn(n: usize, f: impl Fn(u32) -> f64) -> Result<Self> {
        if n > MAX_GROUND_SIZE {
            return Err(Error::Resource(format!("ground set of size {n} exceeds the limit {MAX_GROUND_SIZE}")));
        }
        Self::from_table(n, (0..1u32 << n).map(f).collect())
    }

    /// A validated capacity; fails on the first axiom violation.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        let c = Self::from_table(n, values)?;
        let report = c.validate();
        if !report.is_valid() {
            return validation(format!(
                "not a capacity: μ(∅) = {}, {} negative values, {} monotonicity violations",
                report.empty_set_value,
                report.negative_values.len(),
                report.violations.len()
            ));
        }
        Ok(c)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, mask: u32) -> f64 {
        self.values[mask as usize]
    }

    /// Checks `μ(∅) = 0`, non-negativity, and `μ(X) ≤ μ(X ∪ {i})` for all
    /// `X` and `i ∉ X`.
    pub fn validate(&self) -> CapacityReport {
        let mut violations = Vec::new();
        let mut negative_values = Vec::new();
        for mask in 0..self.values.len() as u32 {
            if self.value(mask) < 0.0 {
                negative_values.push(mask);
            }
            for i in 0..self.n {
                let bit = 1u32 << i;
                if mask & bit == 0 {
                    let larger = mask | bit;
                    if self.value(mask) > self.value(larger) {
                        violations.push(MonotonicityViolation {
                            smaller: mask,
                            larger,
                            smaller_value: self.value(mask),
                            larger_value: self.value(larger),
                        });
                    }
                }
            }
        }
        CapacityReport { empty_set_value: self.values[0], negative_values, violations }
    }
}

fn integral_with_order(c: &Capacity, x: &[f64], order: &[usize]) -> f64 {
    let mut total = 0.0;
    let mut mask = 0u32;
    for (pos, &i) in order.iter().enumerate() {
        mask |= 1 << i;
        let next = order.get(pos + 1).map_or(0.0, |&j| x[j]);
        total += (x[i] - next) * c.value(mask);
    }
    total
}

/// `Σ_i (x_σ(i) − x_σ(i+1)) μ({σ(1), …, σ(i)})` with `x_σ(n+1) = 0`, where
/// `σ` sorts `x` in non-increasing order.
pub fn choquet_integral(c: &Capacity, x: &[f64]) -> Result<f64> {
    if x.len() != c.n {
        return validation(format!("vector has {} coordinates, capacity has ground size {}", x.len(), c.n));
    }
    if let Some(i) = x.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
        return validation(format!("coordinate {} is {}, expected a finite non-negative value", i + 1, x[i]));
    }
    let mut order: Vec<usize> = (0..c.n).collect();
    order.sort_by(|&i, &j| x[j].total_cmp(&x[i]).then(i.cmp(&j)));
    let value = integral_with_order(c, x, &order);

    // ties carry zero weight, so the opposite tie-break gives the same sum
    let mut reversed: Vec<usize> = (0..c.n).collect();
    reversed.sort_by(|&i, &j| x[j].total_cmp(&x[i]).then(j.cmp(&i)));
    let check = integral_with_order(c, x, &reversed);
    assert!(
        (value - check).abs() <= 1e-12 * (1.0 + value.abs()),
        "Choquet integral depends on the tie-break: {value} vs {check}"
    );
    Ok(value)
}

/// Capacity on the diagonal matrix-unit slots of `shape`: slots of block
/// `s` occupy the consecutive positions after those of blocks `1..s`, and
/// `μ(S) = α(number of slots of S in each block)`.
pub fn capacity_from_scale(shape: &AlgebraShape, alpha: &dyn RankFunction) -> Result<Capacity> {
    let n = shape.total_dimension();
    if n > MAX_GROUND_SIZE {
        return Err(Error::Resource(format!("shape {shape} has {n} diagonal slots, more than {MAX_GROUND_SIZE}")));
    }
    alpha.check_shape(shape)?;
    let mut owner = Vec::with_capacity(n);
    for (s, &k) in shape.block_sizes().iter().enumerate() {
        owner.extend(std::iter::repeat_n(s, k));
    }
    let values = (0..1u32 << n)
        .map(|mask| {
            let mut ranks = vec![0usize; shape.block_count()];
            for (i, &s) in owner.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    ranks[s] += 1;
                }
            }
            alpha.value(&RankVector(ranks))
        })
        .collect::<Result<Vec<f64>>>()?;
    Capacity::from_table(n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::LevelScale;

    fn additive(n: usize) -> Capacity {
        Capacity::from_fn(n, |m| m.count_ones() as f64 / n as f64).unwrap()
    }

    fn sqrt_capacity(n: usize) -> Capacity {
        Capacity::from_fn(n, |m| (m.count_ones() as f64 / n as f64).sqrt()).unwrap()
    }

    #[test]
    fn validation_reports() {
        assert!(additive(4).validate().is_valid());
        assert!(sqrt_capacity(4).validate().is_valid());
        let n = 3;
        let full = (1u32 << n) - 1;
        let bad = Capacity::from_fn(n, |m| if m == 0 || m == full { 0.0 } else { 1.0 }).unwrap();
        let report = bad.validate();
        assert!(!report.is_valid());
        assert_eq!(report.violations.len(), 3);
        assert!(report.violations.iter().all(|v| v.larger == full));
        assert!(Capacity::from_table(2, vec![0.0; 3]).is_err());
        assert!(Capacity::new(1, vec![0.5, 1.0]).is_err());
        assert!(matches!(Capacity::from_fn(21, |_| 0.0), Err(Error::Resource(_))));
    }

    #[test]
    fn integral_examples() {
        assert_eq!(choquet_integral(&sqrt_capacity(3), &[0.0; 3]).unwrap(), 0.0);
        let x = [0.3, 2.0, 1.1, 0.0];
        let mean = x.iter().sum::<f64>() / 4.0;
        assert!((choquet_integral(&additive(4), &x).unwrap() - mean).abs() < 1e-15);
        let v = choquet_integral(&sqrt_capacity(3), &[3.0, 1.0, 2.0]).unwrap();
        let expected = (1.0f64 / 3.0).sqrt() + (2.0f64 / 3.0).sqrt() + 1.0;
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 2.39385).abs() < 1e-5);
    }

    #[test]
    fn integral_rejects_bad_input() {
        assert!(choquet_integral(&additive(2), &[1.0, -0.5]).is_err());
        assert!(choquet_integral(&additive(2), &[1.0]).is_err());
    }

    #[test]
    fn ties_do_not_matter() {
        let c = Capacity::from_fn(4, |m| ((m * 7 + 3) % 5) as f64 * m.count_ones() as f64).unwrap();
        // not monotone, but tie handling is still order independent
        let v = choquet_integral(&c, &[1.0, 2.0, 1.0, 2.0]).unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn capacity_from_scale_examples() {
        let shape = AlgebraShape::new(vec![2]).unwrap();
        let table = LevelScale::from_fn(&shape, |r| Ok((r.ranks()[0] as f64).powi(2))).unwrap();
        let c = capacity_from_scale(&shape, &table).unwrap();
        assert_eq!(c.value(0b01), 1.0);
        assert_eq!(c.value(0b11), 4.0);

        let shape = AlgebraShape::new(vec![1, 1]).unwrap();
        let table = LevelScale::from_fn(&shape, |r| Ok(r.ranks()[0] as f64 + 2.0 * r.ranks()[1] as f64)).unwrap();
        let c = capacity_from_scale(&shape, &table).unwrap();
        assert_eq!(c.value(0b10), 2.0);

        let shape = AlgebraShape::new(vec![2, 1]).unwrap();
        let unit = shape.order_unit();
        let table = LevelScale::from_fn(&shape, |r| Ok(if *r == unit { 1.0 } else { 0.0 })).unwrap();
        let c = capacity_from_scale(&shape, &table).unwrap();
        for mask in 0..8u32 {
            assert_eq!(c.value(mask), if mask == 7 { 1.0 } else { 0.0 });
        }

        let big = AlgebraShape::new(vec![11, 10]).unwrap();
        let t = LevelScale::from_fn(&big, |_| Ok(0.0)).unwrap();
        assert!(matches!(capacity_from_scale(&big, &t), Err(Error::Resource(_))));
    }
}
