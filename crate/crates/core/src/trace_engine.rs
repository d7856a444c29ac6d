//! Choquet traces: the spectral formula, its grid form, evaluation on AF
//! algebras, recovery of the scale function from a trace, and spectral
//! snapping.
//!
//! For a positive `a` with distinct spectral values `λ_1 > … > λ_K ≥ 0` the
//! trace is `Σ_j (λ_j − λ_{j+1}) α(r_j(a))`, `λ_{K+1} = 0`, where `r_j(a)`
//! is the rank vector of the spectral projection `E_a([λ_j, ∞))`.

use serde::Serialize;

use crate::bratteli::{embed_to_level, BratteliDiagram};
use crate::error::{domain, validation, Error, Result};
use crate::multimatrix::{projection_of_rank, rank_vector_from_eigen, AlgebraShape, Element, JointSpectrum, SpectrumProfile};
use crate::scale::{LevelScale, OrderViolation, RankFunction, ScaleFunction};

/// Tolerance used when checking a reconstructed scale for `α(0) = 0` and
/// monotonicity.
pub const RECONSTRUCTION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceResult {
    pub value: f64,
    pub level: usize,
    pub spectrum_used: SpectrumProfile,
    pub tolerance: f64,
}

/// The Choquet sum for any rank function, returning the value and the
/// clustered spectrum it was computed from.
pub fn choquet_formula(a: &Element, alpha: &dyn RankFunction, tol: f64) -> Result<(f64, SpectrumProfile)> {
    alpha.check_shape(a.shape())?;
    let profile = JointSpectrum::of(a, tol)?.profile;
    let mut value = 0.0;
    for (j, (lambda, r)) in profile.distinct_values.iter().zip(&profile.rank_vectors).enumerate() {
        let next = profile.distinct_values.get(j + 1).copied().unwrap_or(0.0);
        let jump = lambda - next;
        if jump != 0.0 {
            value += jump * alpha.value(r)?;
        }
    }
    Ok((value, profile))
}

/// `φ_α(a)` for `a` at level `level`.
pub fn choquet_trace(a: &Element, alpha: &ScaleFunction, level: usize, tol: f64) -> Result<TraceResult> {
    let view = alpha.at_level(level)?;
    let (value, spectrum_used) = choquet_formula(a, &view, tol)?;
    Ok(TraceResult { value, level, spectrum_used, tolerance: tol })
}

/// Grid form of the trace, generic over the rank function.
pub fn choquet_grid_formula(a: &Element, grid: &[f64], alpha: &dyn RankFunction, tol: f64) -> Result<(f64, SpectrumProfile)> {
    if grid.is_empty() {
        return validation("grid is empty");
    }
    if let Some(t) = grid.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return validation(format!("grid point {t} is not a finite non-negative number"));
    }
    if let Some(i) = grid.windows(2).position(|w| !(w[0] > w[1])) {
        return validation(format!("grid is not strictly decreasing at position {}", i + 2));
    }
    alpha.check_shape(a.shape())?;
    let joint = JointSpectrum::of(a, tol)?;
    let missed: Vec<String> = joint
        .profile
        .distinct_values
        .iter()
        .filter(|&&lambda| !grid.iter().any(|t| (t - lambda).abs() <= tol))
        .map(|lambda| lambda.to_string())
        .collect();
    if !missed.is_empty() {
        return domain(format!("grid misses spectral value(s) {}", missed.join(", ")));
    }
    let mut value = 0.0;
    for (i, &t) in grid.iter().enumerate() {
        let next = grid.get(i + 1).copied().unwrap_or(0.0);
        let r = rank_vector_from_eigen(&joint.eigen, t, tol);
        if t - next != 0.0 && !r.is_zero() {
            value += (t - next) * alpha.value(&r)?;
        }
    }
    Ok((value, joint.profile))
}

/// `Σ_i (t_i − t_{i+1}) α(r(a; t_i))`, `t_{m+1} = 0`, for a strictly
/// decreasing grid containing the spectrum of `a`.
pub fn choquet_trace_grid(a: &Element, grid: &[f64], alpha: &ScaleFunction, level: usize, tol: f64) -> Result<TraceResult> {
    let view = alpha.at_level(level)?;
    let (value, spectrum_used) = choquet_grid_formula(a, grid, &view, tol)?;
    Ok(TraceResult { value, level, spectrum_used, tolerance: tol })
}

/// Value of the same element after one more embedding.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCheck {
    pub level: usize,
    pub value: f64,
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AfTrace {
    pub result: TraceResult,
    /// `None` when the element already sits at the deepest level.
    pub next_level: Option<LevelCheck>,
}

/// Trace on the AF algebra of `d` of an element living at `level`.
///
/// Only composite scales are accepted. The value is computed at the
/// element's own level and spot-checked one level deeper.
pub fn af_trace(d: &BratteliDiagram, a: &Element, level: usize, alpha: &ScaleFunction, tol: f64) -> Result<AfTrace> {
    let ScaleFunction::Composite(composite) = alpha else {
        return domain("scale not γ-compatible: a level table only describes one level, use a composite scale");
    };
    let shape = d.shape_at(level)?;
    if a.shape() != shape {
        return validation(format!("element has shape {}, level {level} of the diagram has shape {shape}", a.shape()));
    }
    if composite.state.depth() < level {
        return validation(format!("scale state covers levels 1..={}, element is at level {level}", composite.state.depth()));
    }
    composite.state.check_against(d)?;
    let result = choquet_trace(a, alpha, level, tol)?;
    let next_level = if level < d.depth().min(composite.state.depth()) {
        let deeper = embed_to_level(d, a, level, level + 1)?;
        let value = choquet_trace(&deeper, alpha, level + 1, tol)?.value;
        Some(LevelCheck { level: level + 1, value, difference: value - result.value })
    } else {
        None
    };
    Ok(AfTrace { result, next_level })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reconstruction {
    pub table: LevelScale,
    pub value_at_zero: f64,
    pub violations: Vec<OrderViolation>,
}

impl Reconstruction {
    pub fn is_choquet_trace(&self) -> bool {
        self.value_at_zero.abs() <= RECONSTRUCTION_TOL && self.violations.is_empty()
    }

    pub fn diagnostic(&self) -> Option<String> {
        if self.is_choquet_trace() {
            return None;
        }
        let mut reasons = Vec::new();
        if self.value_at_zero.abs() > RECONSTRUCTION_TOL {
            reasons.push(format!("value at 0 is {}", self.value_at_zero));
        }
        if let Some(v) = self.violations.first() {
            reasons.push(format!(
                "{} decreasing covering pair(s), first {} -> {} ({} > {})",
                self.violations.len(),
                v.lower,
                v.upper,
                v.lower_value,
                v.upper_value
            ));
        }
        Some(format!("input is not a Choquet trace: {}", reasons.join("; ")))
    }
}

/// `α(x) := φ(p(x))` for the diagonal projection `p(x)` of rank `x`, on
/// every point of the dimension scale of `shape`. Axiom failures of the
/// recovered table are reported, not raised.
pub fn reconstruct_scale(phi: &dyn Fn(&Element) -> Result<f64>, shape: &AlgebraShape) -> Result<Reconstruction> {
    let table = LevelScale::from_fn(shape, |r| phi(&projection_of_rank(shape, r)?))?;
    let value_at_zero = table.values()[0];
    let violations = table
        .order_violations()
        .into_iter()
        .filter(|v| v.lower_value - v.upper_value > RECONSTRUCTION_TOL)
        .collect();
    Ok(Reconstruction { table, value_at_zero, violations })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snap {
    pub element: Element,
    /// `max |λ − snap(λ)|` over all eigenvalues, equal to `‖result − b‖`.
    pub distance: f64,
}

/// Replaces every eigenvalue of `b` by the nearest point of
/// `target_spectrum` (the smaller one on ties).
pub fn spectral_snap(b: &Element, target_spectrum: &[f64], tol: f64) -> Result<Snap> {
    if target_spectrum.is_empty() {
        return validation("target spectrum is empty");
    }
    if let Some(t) = target_spectrum.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return validation(format!("target value {t} is not a finite non-negative number"));
    }
    let mut target = target_spectrum.to_vec();
    target.sort_by(f64::total_cmp);
    let nearest = |x: f64| {
        target.iter().copied().fold(target[0], |best, t| if (t - x).abs() < (best - x).abs() { t } else { best })
    };
    let eigen = b.eigen_blocks()?;
    for (s, e) in eigen.iter().enumerate() {
        if let Some(&worst) = e.values.last() {
            if worst < -tol {
                return Err(Error::Domain(format!("element not positive: block {} eigenvalue {}", s + 1, worst)));
            }
        }
    }
    let mut distance = 0.0f64;
    let blocks = eigen
        .iter()
        .map(|e| {
            e.map_values(|_, x| {
                let y = nearest(x);
                distance = distance.max((y - x).abs());
                y
            })
        })
        .collect();
    Ok(Snap { element: Element::new(blocks)?, distance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bratteli::{fibonacci_diagram, tracial_state};
    use crate::multimatrix::RankVector;
    use crate::scale::{K0State, Transform};

    fn table(shape: &[usize], f: impl Fn(&[usize]) -> f64) -> ScaleFunction {
        let shape = AlgebraShape::new(shape.to_vec()).unwrap();
        ScaleFunction::table(1, LevelScale::from_fn(&shape, |r| Ok(f(r.ranks()))).unwrap())
    }

    fn sqrt_rank() -> ScaleFunction {
        table(&[2], |r| (r[0] as f64).sqrt())
    }

    #[test]
    fn formula_on_diagonal_examples() {
        let a = Element::diagonal(&[vec![3.0, 1.0]]).unwrap();
        let v = choquet_trace(&a, &sqrt_rank(), 1, 1e-9).unwrap().value;
        assert!((v - (2.0 + 2f64.sqrt())).abs() < 1e-15);

        let a = Element::diagonal(&[vec![2.0, 1.0], vec![3.0]]).unwrap();
        let linear = table(&[2, 1], |r| r[0] as f64 + 2.0 * r[1] as f64);
        let v = choquet_trace(&a, &linear, 1, 1e-9).unwrap().value;
        assert!((v - 9.0).abs() < 1e-15);
        let traces = a.block_traces();
        assert!((v - (traces[0] + 2.0 * traces[1])).abs() < 1e-15);
    }

    #[test]
    fn projections_evaluate_to_scale_values() {
        let alpha = table(&[2, 3], |r| ((r[0] * 3 + r[1]) as f64).sqrt());
        let shape = AlgebraShape::new(vec![2, 3]).unwrap();
        for r in shape.scale_points().unwrap() {
            let p = projection_of_rank(&shape, &r).unwrap();
            let v = choquet_trace(&p, &alpha, 1, 1e-9).unwrap().value;
            assert_eq!(v, ((r.ranks()[0] * 3 + r.ranks()[1]) as f64).sqrt());
        }
    }

    #[test]
    fn level_and_shape_mismatch() {
        let a = Element::diagonal(&[vec![1.0]]).unwrap();
        assert!(choquet_trace(&a, &sqrt_rank(), 1, 1e-9).is_err());
        let a = Element::diagonal(&[vec![1.0, 0.0]]).unwrap();
        assert!(choquet_trace(&a, &sqrt_rank(), 2, 1e-9).is_err());
        let a = Element::diagonal(&[vec![1.0, -1.0]]).unwrap();
        assert!(matches!(choquet_trace(&a, &sqrt_rank(), 1, 1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn grid_examples() {
        let a = Element::diagonal(&[vec![3.0, 1.0]]).unwrap();
        let v = choquet_trace_grid(&a, &[3.0, 2.0, 1.0], &sqrt_rank(), 1, 1e-9).unwrap().value;
        assert!((v - (2.0 + 2f64.sqrt())).abs() < 1e-15);
        let exact = choquet_trace(&a, &sqrt_rank(), 1, 1e-9).unwrap().value;
        let canonical = choquet_trace_grid(&a, &[3.0, 1.0], &sqrt_rank(), 1, 1e-9).unwrap().value;
        assert_eq!(exact, canonical);
        let zero = Element::zeros(a.shape());
        assert_eq!(choquet_trace_grid(&zero, &[0.0], &sqrt_rank(), 1, 1e-9).unwrap().value, 0.0);
    }

    #[test]
    fn grid_errors() {
        let a = Element::diagonal(&[vec![3.0, 1.0]]).unwrap();
        let err = choquet_trace_grid(&a, &[3.0, 2.0], &sqrt_rank(), 1, 1e-9).unwrap_err();
        assert!(matches!(&err, Error::Domain(m) if m.contains("misses spectral value(s) 1")), "{err}");
        assert!(choquet_trace_grid(&a, &[1.0, 3.0], &sqrt_rank(), 1, 1e-9).is_err());
        assert!(choquet_trace_grid(&a, &[], &sqrt_rank(), 1, 1e-9).is_err());
        assert!(choquet_trace_grid(&a, &[3.0, 1.0, -1.0], &sqrt_rank(), 1, 1e-9).is_err());
    }

    #[test]
    fn af_trace_on_fibonacci() {
        let d = fibonacci_diagram(5).unwrap();
        let alpha = ScaleFunction::composite(tracial_state(&d, None).unwrap(), Transform::Power { lambda: 0.5 }).unwrap();
        let p = projection_of_rank(d.shape_at(2).unwrap(), &RankVector(vec![1, 0])).unwrap();
        let out = af_trace(&d, &p, 2, &alpha, 1e-9).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((out.result.value - 1.0 / phi).abs() < 1e-12);
        let check = out.next_level.unwrap();
        assert_eq!(check.level, 3);
        assert!(check.difference.abs() < 1e-12);

        let unit = Element::identity(d.shape_at(4).unwrap());
        let out = af_trace(&d, &unit, 4, &alpha, 1e-9).unwrap();
        assert!((out.result.value - 1.0).abs() < 1e-12);

        let top = Element::identity(d.shape_at(5).unwrap());
        assert!(af_trace(&d, &top, 5, &alpha, 1e-9).unwrap().next_level.is_none());
    }

    #[test]
    fn af_trace_rejects_tables_and_bad_levels() {
        let d = fibonacci_diagram(3).unwrap();
        let t = table(&[1, 1], |r| (r[0] + r[1]) as f64);
        let p = Element::identity(d.shape_at(1).unwrap());
        let err = af_trace(&d, &p, 1, &t, 1e-9).unwrap_err();
        assert!(err.to_string().contains("not γ-compatible"));
        let alpha = ScaleFunction::composite(tracial_state(&d, None).unwrap(), Transform::Identity).unwrap();
        assert!(af_trace(&d, &p, 2, &alpha, 1e-9).is_err());
        assert!(af_trace(&d, &p, 4, &alpha, 1e-9).is_err());
        let unnormalized = ScaleFunction::composite(K0State::new(vec![vec![1.0, 1.0]]).unwrap(), Transform::Identity).unwrap();
        assert!(af_trace(&d, &p, 1, &unnormalized, 1e-9).is_err());
    }

    #[test]
    fn reconstruction_examples() {
        let shape = AlgebraShape::new(vec![2]).unwrap();
        let trace = |a: &Element| Ok(a.block_traces().iter().sum::<f64>());
        let rec = reconstruct_scale(&trace, &shape).unwrap();
        assert_eq!(rec.table.values(), &[0.0, 1.0, 2.0]);
        assert!(rec.is_choquet_trace());

        let shape = AlgebraShape::new(vec![2, 2]).unwrap();
        let norm = |a: &Element| a.norm();
        let rec = reconstruct_scale(&norm, &shape).unwrap();
        for (r, v) in rec.table.entries() {
            assert_eq!(v, if r.is_zero() { 0.0 } else { 1.0 });
        }

        let bad = |a: &Element| Ok(1.0 - a.block_traces()[0] / 2.0);
        let rec = reconstruct_scale(&bad, &shape).unwrap();
        assert!(!rec.is_choquet_trace());
        assert!(rec.diagnostic().unwrap().starts_with("input is not a Choquet trace"));
    }

    #[test]
    fn snapping_examples() {
        let b = Element::diagonal(&[vec![2.9, 1.05]]).unwrap();
        let s = spectral_snap(&b, &[3.0, 1.0], 1e-9).unwrap();
        assert!(s.element.approx_eq(&Element::diagonal(&[vec![3.0, 1.0]]).unwrap(), 1e-12));
        assert!((s.distance - 0.1).abs() < 1e-12);

        let s = spectral_snap(&b, &[2.9, 1.05, 7.0], 1e-9).unwrap();
        assert!(s.element.approx_eq(&b, 1e-12));
        assert_eq!(s.distance, 0.0);

        let s = spectral_snap(&b, &[0.0], 1e-9).unwrap();
        assert!(s.element.approx_eq(&Element::zeros(b.shape()), 1e-12));
        assert!((s.distance - 2.9).abs() < 1e-12);

        assert!(spectral_snap(&b, &[], 1e-9).is_err());
        assert!(spectral_snap(&b, &[-1.0], 1e-9).is_err());
    }
}
