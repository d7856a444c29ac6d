//! Dimension scales of the levels of an AF algebra, the connecting maps
//! between them, and increasing scale functions `α`.
//!
//! The scale of the inductive limit is never materialized. A point of it is
//! a [`ScaleElement`] `(level, rank vector)`, and two such points are equal
//! when they agree after being pushed to a common level.

use serde::{Deserialize, Serialize};

use crate::bratteli::BratteliDiagram;
use crate::error::{validation, Error, Result};
use crate::multimatrix::{AlgebraShape, Multiplicity, RankVector};

/// Tolerance of the consistency and normalization checks on a [`K0State`].
pub const STATE_TOL: f64 = 1e-10;

/// Something that assigns a value to every rank vector of one level.
pub trait RankFunction {
    fn check_shape(&self, shape: &AlgebraShape) -> Result<()>;
    fn value(&self, r: &RankVector) -> Result<f64>;
}

/// Monotone `f: [0, ∞) → [0, ∞)` with `f(0) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Transform {
    Identity,
    Power { lambda: f64 },
    /// Linear interpolation through `(x, y)` points, starting from `(0, 0)`
    /// and constant after the last point.
    PiecewiseLinear { points: Vec<(f64, f64)> },
}

impl Transform {
    pub fn validate(&self) -> Result<()> {
        match self {
            Transform::Identity => Ok(()),
            Transform::Power { lambda } => {
                if *lambda > 0.0 && *lambda <= 1.0 {
                    Ok(())
                } else {
                    validation(format!("power exponent must lie in (0, 1], got {lambda}"))
                }
            }
            Transform::PiecewiseLinear { points } => {
                if points.is_empty() {
                    return validation("piecewise-linear transform needs at least one point");
                }
                let mut prev = (0.0, 0.0);
                for (i, &(x, y)) in points.iter().enumerate() {
                    if !(x.is_finite() && y.is_finite()) {
                        return validation(format!("piecewise-linear point {} is not finite", i + 1));
                    }
                    if i == 0 && x == 0.0 {
                        if y != 0.0 {
                            return validation("piecewise-linear transform must satisfy f(0) = 0");
                        }
                    } else if !(x > prev.0) {
                        return validation("piecewise-linear abscissae must be positive and strictly increasing");
                    }
                    if y < prev.1 {
                        return validation(format!("piecewise-linear transform decreases at point {}", i + 1));
                    }
                    prev = (x, y);
                }
                Ok(())
            }
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            Transform::Identity => x,
            Transform::Power { lambda } => {
                if x == 0.0 {
                    0.0
                } else {
                    x.powf(*lambda)
                }
            }
            Transform::PiecewiseLinear { points } => {
                let mut prev = (0.0, 0.0);
                for &(px, py) in points {
                    if x <= px {
                        if px == prev.0 {
                            return py;
                        }
                        return prev.1 + (py - prev.1) * (x - prev.0) / (px - prev.0);
                    }
                    prev = (px, py);
                }
                prev.1
            }
        }
    }
}

/// Per-level weight vectors of a tracial state: `τ(p) = Σ_s w_{n,s} · rk_s(p)`
/// for a projection `p` at level `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct K0State {
    weights: Vec<Vec<f64>>,
}

impl K0State {
    /// Weights for levels `1..=weights.len()`. Only non-negativity is
    /// checked here; see [`K0State::check_against`].
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        if weights.is_empty() {
            return validation("a state needs weights for at least one level");
        }
        for (n, w) in weights.iter().enumerate() {
            if w.is_empty() {
                return validation(format!("level {} has no weights", n + 1));
            }
            if let Some(x) = w.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
                return validation(format!("level {} weight {x} is not a finite non-negative number", n + 1));
            }
        }
        Ok(K0State { weights })
    }

    /// A state on a single finite-dimensional algebra.
    pub fn for_shape(shape: &AlgebraShape, weights: Vec<f64>) -> Result<Self> {
        let state = Self::new(vec![weights])?;
        state.check_normalized(1, shape)?;
        Ok(state)
    }

    pub fn depth(&self) -> usize {
        self.weights.len()
    }

    pub fn all_weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn weights_at(&self, level: usize) -> Result<&[f64]> {
        if level == 0 || level > self.depth() {
            return validation(format!("level {level} is outside the state's levels 1..={}", self.depth()));
        }
        Ok(&self.weights[level - 1])
    }

    pub fn tau(&self, level: usize, r: &RankVector) -> Result<f64> {
        let w = self.weights_at(level)?;
        if w.len() != r.ranks().len() {
            return validation(format!("rank vector {r} has {} entries, level {level} has {} blocks", r.ranks().len(), w.len()));
        }
        Ok(dot(w, r.ranks()))
    }

    fn check_normalized(&self, level: usize, shape: &AlgebraShape) -> Result<()> {
        let w = self.weights_at(level)?;
        if w.len() != shape.block_count() {
            return validation(format!("level {level}: {} weights for {} blocks", w.len(), shape.block_count()));
        }
        let total = dot(w, shape.block_sizes());
        if (total - 1.0).abs() > STATE_TOL {
            return validation(format!("state is not normalized at level {level}: τ(1) = {total}"));
        }
        Ok(())
    }

    /// Normalization at every level and `w_n = Mᵀ_n w_{n+1}` for every
    /// pair of consecutive levels, both within [`STATE_TOL`].
    pub fn check_against(&self, diagram: &BratteliDiagram) -> Result<()> {
        if self.depth() > diagram.depth() {
            return validation(format!("state has {} levels, diagram only {}", self.depth(), diagram.depth()));
        }
        for level in 1..=self.depth() {
            self.check_normalized(level, diagram.shape_at(level)?)?;
        }
        for level in 1..self.depth() {
            let defect = self.consistency_defect(level, diagram.multiplicity(level)?)?;
            if defect > STATE_TOL {
                return validation(format!("state weights at levels {level} and {} are inconsistent (defect {defect:e})", level + 1));
            }
        }
        Ok(())
    }

    /// `max_s |w_n − Mᵀ w_{n+1}|`.
    pub fn consistency_defect(&self, level: usize, m: &Multiplicity) -> Result<f64> {
        let lower = self.weights_at(level)?;
        let upper = self.weights_at(level + 1)?;
        if m.rows() != upper.len() || m.cols() != lower.len() {
            return validation("multiplicity matrix does not match the state's block counts");
        }
        Ok((0..lower.len())
            .map(|s| {
                let pulled: f64 = (0..upper.len()).map(|t| m.get(t, s) as f64 * upper[t]).sum();
                (lower[s] - pulled).abs()
            })
            .fold(0.0, f64::max))
    }
}

fn dot(w: &[f64], r: &[usize]) -> f64 {
    w.iter().zip(r).map(|(w, &r)| w * r as f64).sum()
}

/// Values of `α` on every point of one finite dimension scale, indexed
/// lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelScale {
    shape: AlgebraShape,
    values: Vec<f64>,
}

/// A covering pair `lower ⋖ upper` with `α(lower) > α(upper)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderViolation {
    pub lower: RankVector,
    pub upper: RankVector,
    pub lower_value: f64,
    pub upper_value: f64,
}

impl LevelScale {
    pub fn from_fn(shape: &AlgebraShape, mut f: impl FnMut(&RankVector) -> Result<f64>) -> Result<Self> {
        let values = shape.scale_points()?.map(|r| f(&r)).collect::<Result<Vec<f64>>>()?;
        Ok(LevelScale { shape: shape.clone(), values })
    }

    pub fn from_values(shape: &AlgebraShape, values: Vec<f64>) -> Result<Self> {
        let n = shape.check_enumerable()?;
        if values.len() != n {
            return validation(format!("scale table for shape {shape} needs {n} values, got {}", values.len()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return validation(format!("scale value {v} is not finite"));
        }
        Ok(LevelScale { shape: shape.clone(), values })
    }

    /// Builds a table from `(rank, value)` pairs. The shape is the
    /// componentwise maximum rank and every point must appear exactly once.
    pub fn from_entries(entries: &[(RankVector, f64)]) -> Result<Self> {
        let Some(first) = entries.first() else {
            return validation("scale table has no entries");
        };
        let blocks = first.0.ranks().len();
        if entries.iter().any(|(r, _)| r.ranks().len() != blocks) {
            return validation("scale table entries have rank vectors of different lengths");
        }
        let sizes: Vec<usize> = (0..blocks).map(|s| entries.iter().map(|(r, _)| r.ranks()[s]).max().unwrap_or(0)).collect();
        let shape = AlgebraShape::new(sizes)
            .map_err(|_| Error::Validation("scale table must contain the order unit (every block rank ≥ 1)".into()))?;
        let n = shape.check_enumerable()?;
        let mut values = vec![None; n];
        for (r, v) in entries {
            let slot = &mut values[shape.index_of(r)];
            if slot.is_some() {
                return validation(format!("scale table lists rank {r} twice"));
            }
            *slot = Some(*v);
        }
        if let Some(i) = values.iter().position(Option::is_none) {
            return validation(format!("scale table is missing rank {}", shape.rank_at(i)));
        }
        Self::from_values(&shape, values.into_iter().map(Option::unwrap).collect())
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, r: &RankVector) -> Result<f64> {
        self.shape.check_rank(r)?;
        Ok(self.values[self.shape.index_of(r)])
    }

    pub fn entries(&self) -> impl Iterator<Item = (RankVector, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.shape.rank_at(i), v))
    }

    /// Every covering pair on which the table decreases.
    pub fn order_violations(&self) -> Vec<OrderViolation> {
        let mut out = Vec::new();
        for (i, &v) in self.values.iter().enumerate() {
            let lower = self.shape.rank_at(i);
            for s in 0..self.shape.block_count() {
                if lower.ranks()[s] < self.shape.block_sizes()[s] {
                    let mut upper = lower.clone();
                    upper.0[s] += 1;
                    let w = self.values[self.shape.index_of(&upper)];
                    if v > w {
                        out.push(OrderViolation { lower: lower.clone(), upper, lower_value: v, upper_value: w });
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &LevelScale) -> Result<f64> {
        if self.shape != other.shape {
            return validation(format!("scale tables have different shapes {} and {}", self.shape, other.shape));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

impl Serialize for LevelScale {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.values().len()))?;
        for entry in self.entries() {
            seq.serialize_element(&entry)?;
        }
        seq.end()
    }
}

impl RankFunction for LevelScale {
    fn check_shape(&self, shape: &AlgebraShape) -> Result<()> {
        if shape != &self.shape {
            return validation(format!("scale table is defined on shape {}, element has shape {shape}", self.shape));
        }
        Ok(())
    }

    fn value(&self, r: &RankVector) -> Result<f64> {
        self.get(r)
    }
}

/// `α = f ∘ τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositeScale {
    pub state: K0State,
    pub transform: Transform,
}

/// An increasing map on a dimension scale with `α(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum ScaleFunction {
    /// Defined on every level the state covers; compatible with the
    /// connecting maps whenever the state is.
    Composite(CompositeScale),
    /// Explicit values on one fixed level.
    Table { level: usize, table: LevelScale },
}

impl ScaleFunction {
    pub fn composite(state: K0State, transform: Transform) -> Result<Self> {
        transform.validate()?;
        Ok(ScaleFunction::Composite(CompositeScale { state, transform }))
    }

    pub fn table(level: usize, table: LevelScale) -> Self {
        ScaleFunction::Table { level, table }
    }

    pub fn is_composite(&self) -> bool {
        matches!(self, ScaleFunction::Composite(_))
    }

    /// The restriction of `α` to level `level`.
    pub fn at_level(&self, level: usize) -> Result<LevelView<'_>> {
        match self {
            ScaleFunction::Composite(c) => Ok(LevelView::Composite { level, weights: c.state.weights_at(level)?, transform: &c.transform }),
            ScaleFunction::Table { level: table_level, table } => {
                if *table_level != level {
                    return validation(format!("scale table is defined at level {table_level}, not level {level}"));
                }
                Ok(LevelView::Table(table))
            }
        }
    }
}

/// [`ScaleFunction`] restricted to one level.
#[derive(Clone, Copy, Debug)]
pub enum LevelView<'a> {
    Composite { level: usize, weights: &'a [f64], transform: &'a Transform },
    Table(&'a LevelScale),
}

impl LevelView<'_> {
    /// `τ(r)` for composite scales.
    pub fn tau(&self, r: &RankVector) -> Option<f64> {
        match self {
            LevelView::Composite { weights, .. } if weights.len() == r.ranks().len() => Some(dot(weights, r.ranks())),
            _ => None,
        }
    }
}

impl RankFunction for LevelView<'_> {
    fn check_shape(&self, shape: &AlgebraShape) -> Result<()> {
        match self {
            LevelView::Composite { level, weights, .. } => {
                if weights.len() != shape.block_count() {
                    return validation(format!("scale has {} weights at level {level}, element has {} blocks", weights.len(), shape.block_count()));
                }
                Ok(())
            }
            LevelView::Table(t) => t.check_shape(shape),
        }
    }

    fn value(&self, r: &RankVector) -> Result<f64> {
        match self {
            LevelView::Composite { level, weights, transform } => {
                if weights.len() != r.ranks().len() {
                    return validation(format!("rank vector {r} does not match the {} blocks of level {level}", weights.len()));
                }
                Ok(transform.apply(dot(weights, r.ranks())))
            }
            LevelView::Table(t) => t.get(r),
        }
    }
}

/// A representative `(level, rank)` of a point of the limit scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleElement {
    pub level: usize,
    pub rank: RankVector,
}

impl ScaleElement {
    pub fn new(level: usize, rank: RankVector) -> Self {
        ScaleElement { level, rank }
    }
}

/// `γ(r) = M · r`.
pub fn scale_map(r: &RankVector, m: &Multiplicity) -> Result<RankVector> {
    Ok(RankVector(m.apply(r.ranks())?))
}

/// Pushes `e` forward through the connecting maps to level `target`.
pub fn push_to_level(e: &ScaleElement, target: usize, diagram: &BratteliDiagram) -> Result<ScaleElement> {
    if target < e.level {
        return validation(format!("cannot push a level-{} scale element down to level {target}", e.level));
    }
    diagram.shape_at(target)?;
    diagram.shape_at(e.level)?.check_rank(&e.rank)?;
    let mut rank = e.rank.clone();
    for level in e.level..target {
        rank = scale_map(&rank, diagram.multiplicity(level)?)?;
    }
    Ok(ScaleElement { level: target, rank })
}

/// Equality in the limit scale, decided by pushing both elements to their
/// common level and, failing that, further down to the diagram's depth.
/// A `false` answer therefore means "distinct up to the materialized depth".
pub fn scale_equal(e1: &ScaleElement, e2: &ScaleElement, diagram: &BratteliDiagram) -> Result<bool> {
    let common = e1.level.max(e2.level);
    let mut a = push_to_level(e1, common, diagram)?;
    let mut b = push_to_level(e2, common, diagram)?;
    loop {
        if a.rank == b.rank {
            return Ok(true);
        }
        if a.level == diagram.depth() {
            return Ok(false);
        }
        a = push_to_level(&a, a.level + 1, diagram)?;
        b = push_to_level(&b, b.level + 1, diagram)?;
    }
}

/// `α(e)`.
pub fn evaluate(alpha: &ScaleFunction, e: &ScaleElement) -> Result<f64> {
    alpha.at_level(e.level)?.value(&e.rank)
}

/// Report of [`check_increasing`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncreasingReport {
    pub level: usize,
    pub points_checked: usize,
    pub value_at_zero: f64,
    pub violations: Vec<OrderViolation>,
}

impl IncreasingReport {
    pub fn is_increasing(&self) -> bool {
        self.violations.is_empty() && self.value_at_zero == 0.0
    }
}

/// Exhaustive check over covering pairs of `Γ(A_level)`.
pub fn check_increasing(alpha: &ScaleFunction, level: usize, diagram: &BratteliDiagram) -> Result<IncreasingReport> {
    let shape = diagram.shape_at(level)?;
    let view = alpha.at_level(level)?;
    view.check_shape(shape)?;
    let table = LevelScale::from_fn(shape, |r| view.value(r))?;
    Ok(IncreasingReport {
        level,
        points_checked: table.values().len(),
        value_at_zero: table.values()[0],
        violations: table.order_violations(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bratteli::{fibonacci_diagram, tracial_state, uhf_diagram};

    fn rv(r: &[usize]) -> RankVector {
        RankVector(r.to_vec())
    }

    #[test]
    fn transforms() {
        assert_eq!(Transform::Identity.apply(0.3), 0.3);
        assert_eq!(Transform::Power { lambda: 0.5 }.apply(0.0), 0.0);
        assert!((Transform::Power { lambda: 0.5 }.apply(0.25) - 0.5).abs() < 1e-15);
        assert!(Transform::Power { lambda: 1.5 }.validate().is_err());
        assert!(Transform::Power { lambda: 0.0 }.validate().is_err());
        let pl = Transform::PiecewiseLinear { points: vec![(0.5, 1.0), (1.0, 1.5)] };
        pl.validate().unwrap();
        assert_eq!(pl.apply(0.0), 0.0);
        assert_eq!(pl.apply(0.25), 0.5);
        assert_eq!(pl.apply(0.75), 1.25);
        assert_eq!(pl.apply(3.0), 1.5);
        assert!(Transform::PiecewiseLinear { points: vec![(0.0, 0.1)] }.validate().is_err());
        assert!(Transform::PiecewiseLinear { points: vec![(0.5, 1.0), (0.7, 0.9)] }.validate().is_err());
        assert!(Transform::PiecewiseLinear { points: vec![(0.5, 1.0), (0.5, 1.0)] }.validate().is_err());
    }

    #[test]
    fn scale_map_examples() {
        let f = Multiplicity(vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(scale_map(&rv(&[1, 0]), &f).unwrap(), rv(&[1, 1]));
        assert_eq!(scale_map(&rv(&[0, 0]), &f).unwrap(), rv(&[0, 0]));
        assert_eq!(scale_map(&rv(&[1, 1]), &f).unwrap(), rv(&[2, 1]));
        assert!(scale_map(&rv(&[1]), &f).is_err());
    }

    #[test]
    fn push_forward_on_fibonacci() {
        let d = fibonacci_diagram(6).unwrap();
        let e = ScaleElement::new(1, rv(&[1, 0]));
        assert_eq!(push_to_level(&e, 1, &d).unwrap(), e);
        assert_eq!(push_to_level(&e, 3, &d).unwrap(), ScaleElement::new(3, rv(&[2, 1])));
        let staged = push_to_level(&push_to_level(&e, 2, &d).unwrap(), 5, &d).unwrap();
        assert_eq!(staged, push_to_level(&e, 5, &d).unwrap());
        assert!(push_to_level(&ScaleElement::new(3, rv(&[1, 0])), 2, &d).is_err());
        assert!(push_to_level(&e, 7, &d).is_err());
        for n in 1..=6 {
            let unit = ScaleElement::new(1, d.shape_at(1).unwrap().order_unit());
            assert_eq!(push_to_level(&unit, n, &d).unwrap().rank, d.shape_at(n).unwrap().order_unit());
        }
    }

    #[test]
    fn equality_in_the_limit() {
        let d = fibonacci_diagram(5).unwrap();
        let e = ScaleElement::new(1, rv(&[1, 0]));
        assert!(scale_equal(&e, &push_to_level(&e, 3, &d).unwrap(), &d).unwrap());
        assert!(scale_equal(&e, &ScaleElement::new(2, rv(&[1, 1])), &d).unwrap());
        assert!(!scale_equal(&e, &ScaleElement::new(1, rv(&[0, 1])), &d).unwrap());
    }

    #[test]
    fn equality_found_after_non_injective_map() {
        // both level-1 blocks collapse into one block of size 2
        let d = BratteliDiagram::new(vec![1, 1], vec![Multiplicity(vec![vec![1, 1]])]).unwrap();
        let a = ScaleElement::new(1, rv(&[1, 0]));
        let b = ScaleElement::new(1, rv(&[0, 1]));
        assert!(scale_equal(&a, &b, &d).unwrap());
    }

    #[test]
    fn evaluate_examples() {
        let d = uhf_diagram(&[2], 5).unwrap();
        let alpha = ScaleFunction::composite(tracial_state(&d, None).unwrap(), Transform::Power { lambda: 0.5 }).unwrap();
        assert_eq!(evaluate(&alpha, &ScaleElement::new(1, rv(&[0]))).unwrap(), 0.0);
        let v = evaluate(&alpha, &ScaleElement::new(1, rv(&[1]))).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(evaluate(&alpha, &ScaleElement::new(6, rv(&[1]))).is_err());

        let d = fibonacci_diagram(4).unwrap();
        let alpha = ScaleFunction::composite(tracial_state(&d, None).unwrap(), Transform::Identity).unwrap();
        let v = evaluate(&alpha, &ScaleElement::new(1, rv(&[1, 1]))).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composite_evaluation_is_compatible_with_pushforward() {
        let d = fibonacci_diagram(6).unwrap();
        let alpha = ScaleFunction::composite(tracial_state(&d, None).unwrap(), Transform::Power { lambda: 0.3 }).unwrap();
        for level in 1..6 {
            for r in d.shape_at(level).unwrap().scale_points().unwrap() {
                let e = ScaleElement::new(level, r);
                let here = evaluate(&alpha, &e).unwrap();
                let next = evaluate(&alpha, &push_to_level(&e, level + 1, &d).unwrap()).unwrap();
                assert!((here - next).abs() <= 1e-10, "{e:?}: {here} vs {next}");
            }
        }
    }

    #[test]
    fn table_level_mismatch() {
        let shape = AlgebraShape::new(vec![2]).unwrap();
        let table = LevelScale::from_values(&shape, vec![0.0, 1.0, 2.0]).unwrap();
        let alpha = ScaleFunction::table(1, table);
        assert!(evaluate(&alpha, &ScaleElement::new(2, rv(&[1]))).is_err());
        assert_eq!(evaluate(&alpha, &ScaleElement::new(1, rv(&[1]))).unwrap(), 1.0);
    }

    #[test]
    fn increasing_checks() {
        let d = fibonacci_diagram(3).unwrap();
        let composite = ScaleFunction::composite(tracial_state(&d, None).unwrap(), Transform::Power { lambda: 0.5 }).unwrap();
        assert!(check_increasing(&composite, 3, &d).unwrap().is_increasing());

        let shape = d.shape_at(1).unwrap().clone();
        let inverted = LevelScale::from_values(&shape, vec![0.0, 0.5, 0.7, 0.6]).unwrap();
        let report = check_increasing(&ScaleFunction::table(1, inverted), 1, &d).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].lower, rv(&[1, 0]));
        assert_eq!(report.violations[0].upper, rv(&[1, 1]));

        let zero = LevelScale::from_values(&shape, vec![0.0; 4]).unwrap();
        assert!(check_increasing(&ScaleFunction::table(1, zero), 1, &d).unwrap().is_increasing());
    }

    #[test]
    fn table_from_entries() {
        let entries = vec![(rv(&[0]), 0.0), (rv(&[2]), 2.0), (rv(&[1]), 1.0)];
        let t = LevelScale::from_entries(&entries).unwrap();
        assert_eq!(t.values(), &[0.0, 1.0, 2.0]);
        assert!(LevelScale::from_entries(&entries[..2]).is_err());
        let dup = vec![(rv(&[0]), 0.0), (rv(&[1]), 1.0), (rv(&[1]), 1.0)];
        assert!(LevelScale::from_entries(&dup).is_err());
    }

    #[test]
    fn state_checks() {
        let shape = AlgebraShape::new(vec![2, 1]).unwrap();
        assert!(K0State::for_shape(&shape, vec![0.25, 0.5]).is_ok());
        assert!(K0State::for_shape(&shape, vec![0.5, 0.5]).is_err());
        assert!(K0State::new(vec![vec![-0.1]]).is_err());
        let d = fibonacci_diagram(3).unwrap();
        let bad = K0State::new(vec![vec![0.5, 0.0], vec![0.25, 0.5]]).unwrap();
        assert!(bad.check_against(&d).is_err());
    }
}
