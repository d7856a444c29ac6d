//! Bratteli diagrams of unital AF algebras, the UHF and Fibonacci
//! generators, and tracial states.

use crate::error::{validation, Error, Result};
use crate::multimatrix::{embed, AlgebraShape, Element, Multiplicity};
use crate::scale::K0State;

const PERRON_TOL: f64 = 1e-13;
const PERRON_MAX_ITER: usize = 100_000;

/// Incidence matrix of the Fibonacci algebra.
pub const FIBONACCI_MATRIX: [[usize; 2]; 2] = [[1, 1], [1, 0]];

/// A finite-depth truncation of a Bratteli diagram. `multiplicities[n-1]`
/// embeds level `n` into level `n + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BratteliDiagram {
    initial_sizes: Vec<usize>,
    multiplicities: Vec<Multiplicity>,
    shapes: Vec<AlgebraShape>,
}

impl BratteliDiagram {
    pub fn new(initial_sizes: Vec<usize>, multiplicities: Vec<Multiplicity>) -> Result<Self> {
        let mut shapes = vec![AlgebraShape::new(initial_sizes.clone())?];
        for (i, m) in multiplicities.iter().enumerate() {
            let level = i + 1;
            let source = &shapes[i];
            if m.rows() == 0 {
                return validation(format!("multiplicity matrix {level} has no rows"));
            }
            if m.0.iter().any(|row| row.len() != source.block_count()) {
                return validation(format!(
                    "multiplicity matrix {level} must have {} columns (one per block of level {level})",
                    source.block_count()
                ));
            }
            if let Some(t) = m.0.iter().position(|row| row.iter().all(|&x| x == 0)) {
                return validation(format!("multiplicity matrix {level} has a zero row {}: the embedding would not be unital", t + 1));
            }
            let sizes = m.apply(source.block_sizes())?;
            shapes.push(AlgebraShape::new(sizes)?);
        }
        Ok(BratteliDiagram { initial_sizes, multiplicities, shapes })
    }

    pub fn initial_sizes(&self) -> &[usize] {
        &self.initial_sizes
    }

    pub fn multiplicities(&self) -> &[Multiplicity] {
        &self.multiplicities
    }

    /// Number of materialized levels.
    pub fn depth(&self) -> usize {
        self.shapes.len()
    }

    pub fn shape_at(&self, level: usize) -> Result<&AlgebraShape> {
        if level == 0 || level > self.depth() {
            return validation(format!("level {level} is outside the diagram's levels 1..={}", self.depth()));
        }
        Ok(&self.shapes[level - 1])
    }

    /// The matrix embedding level `level` into level `level + 1`.
    pub fn multiplicity(&self, level: usize) -> Result<&Multiplicity> {
        if level == 0 || level >= self.depth() {
            return validation(format!("no connecting map out of level {level} (diagram depth {})", self.depth()));
        }
        Ok(&self.multiplicities[level - 1])
    }

    /// All connecting matrices equal (and at least one present).
    pub fn is_stationary(&self) -> bool {
        match self.multiplicities.split_first() {
            Some((first, rest)) => rest.iter().all(|m| m == first),
            None => false,
        }
    }
}

/// UHF diagram with `N_k = n_1 ⋯ n_k`. Level 1 is `M_{n_1}`; the factors are
/// reused cyclically when `depth` exceeds their number.
pub fn uhf_diagram(factors: &[usize], depth: usize) -> Result<BratteliDiagram> {
    if factors.is_empty() {
        return validation("UHF diagram needs at least one factor");
    }
    if let Some(f) = factors.iter().find(|&&f| f < 2) {
        return validation(format!("UHF factors must be at least 2, got {f}"));
    }
    if depth == 0 {
        return validation("depth must be at least 1");
    }
    let mults = (1..depth).map(|k| Multiplicity(vec![vec![factors[k % factors.len()]]])).collect();
    BratteliDiagram::new(vec![factors[0]], mults)
}

/// Fibonacci diagram starting from two one-dimensional blocks.
pub fn fibonacci_diagram(depth: usize) -> Result<BratteliDiagram> {
    if depth == 0 {
        return validation("depth must be at least 1");
    }
    let f = Multiplicity(FIBONACCI_MATRIX.iter().map(|r| r.to_vec()).collect());
    BratteliDiagram::new(vec![1, 1], vec![f; depth - 1])
}

/// Positivity of some power `M^k`, `k ≤ L²`.
pub fn is_primitive(m: &Multiplicity) -> bool {
    let n = m.rows();
    if n == 0 || m.cols() != n {
        return false;
    }
    let pattern: Vec<Vec<bool>> = m.0.iter().map(|row| row.iter().map(|&x| x > 0).collect()).collect();
    let mut power = pattern.clone();
    for _ in 0..n * n {
        if power.iter().all(|row| row.iter().all(|&x| x)) {
            return true;
        }
        power = (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| power[i][k] && pattern[k][j])).collect()).collect();
    }
    false
}

/// Perron eigenvalue and eigenvector (unit 1-norm) of `Mᵀ` by power iteration.
pub fn perron_transpose(m: &Multiplicity) -> Result<(f64, Vec<f64>)> {
    let n = m.rows();
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..PERRON_MAX_ITER {
        let mut next: Vec<f64> = (0..n).map(|s| (0..n).map(|t| m.get(t, s) as f64 * v[t]).sum()).collect();
        let rho: f64 = next.iter().sum();
        if !(rho > 0.0) {
            return Err(Error::Domain("Perron iteration collapsed to zero".into()));
        }
        for x in next.iter_mut() {
            *x /= rho;
        }
        let change = next.iter().zip(&v).map(|(a, b)| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
        v = next;
        if change <= PERRON_TOL {
            return Ok((rho, v));
        }
    }
    Err(Error::Convergence(format!("Perron iteration did not converge in {PERRON_MAX_ITER} steps")))
}

/// Tracial-state weights on every materialized level.
///
/// Stationary primitive diagrams use the Perron eigenvector of `Mᵀ` at the
/// deepest level. Otherwise `terminal_weights` are required, except when
/// the deepest level is a single block (the trace is then unique). In every
/// case the weights are propagated backward by `w_n = Mᵀ_n w_{n+1}` and
/// normalized so that the unit has trace one.
pub fn tracial_state(d: &BratteliDiagram, terminal_weights: Option<&[f64]>) -> Result<K0State> {
    let deepest = d.shape_at(d.depth())?;
    let terminal: Vec<f64> = match terminal_weights {
        Some(w) => {
            if w.len() != deepest.block_count() {
                return validation(format!("{} terminal weights given for {} blocks at level {}", w.len(), deepest.block_count(), d.depth()));
            }
            w.to_vec()
        }
        None if d.is_stationary() && is_primitive(&d.multiplicities[0]) => perron_transpose(&d.multiplicities[0])?.1,
        None if deepest.block_count() == 1 => vec![1.0],
        None if d.is_stationary() => {
            return Err(Error::Domain("trace not unique / not computable: stationary matrix is not primitive; supply terminal weights".into()))
        }
        None => return Err(Error::Domain("trace not unique / not computable: non-stationary diagram needs terminal weights".into())),
    };
    if let Some(x) = terminal.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return validation(format!("terminal weight {x} is not a finite non-negative number"));
    }

    let mut weights = vec![terminal];
    for level in (1..d.depth()).rev() {
        let m = d.multiplicity(level)?;
        let upper = weights.last().unwrap();
        let lower = (0..m.cols()).map(|s| (0..m.rows()).map(|t| m.get(t, s) as f64 * upper[t]).sum()).collect();
        weights.push(lower);
    }
    weights.reverse();

    let unit: f64 = weights[0].iter().zip(d.initial_sizes()).map(|(w, &k)| w * k as f64).sum();
    if !(unit > 0.0) {
        return Err(Error::Domain("state vanishes on the unit; weights cannot be normalized".into()));
    }
    for w in weights.iter_mut() {
        for x in w.iter_mut() {
            *x /= unit;
        }
    }
    K0State::new(weights)
}

/// `ρ_{level, target}(a)` by iterated block embeddings.
pub fn embed_to_level(d: &BratteliDiagram, a: &Element, level: usize, target: usize) -> Result<Element> {
    let shape = d.shape_at(level)?;
    if a.shape() != shape {
        return validation(format!("element has shape {}, level {level} has shape {shape}", a.shape()));
    }
    if target < level {
        return validation(format!("cannot embed a level-{level} element into level {target}"));
    }
    d.shape_at(target)?;
    let mut out = a.clone();
    for n in level..target {
        out = embed(&out, d.multiplicity(n)?, d.shape_at(n + 1)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multimatrix::RankVector;

    #[test]
    fn fibonacci_shapes() {
        let d = fibonacci_diagram(5).unwrap();
        let sizes: Vec<&[usize]> = (1..=5).map(|n| d.shape_at(n).unwrap().block_sizes()).collect();
        assert_eq!(sizes, vec![&[1, 1][..], &[2, 1], &[3, 2], &[5, 3], &[8, 5]]);
        assert!(d.shape_at(0).is_err());
        assert!(d.shape_at(6).is_err());
        assert!(d.is_stationary());
        for m in d.multiplicities() {
            assert_eq!(m.0, vec![vec![1, 1], vec![1, 0]]);
        }
    }

    #[test]
    fn uhf_shapes() {
        let d = uhf_diagram(&[2, 2, 2], 3).unwrap();
        let sizes: Vec<usize> = (1..=3).map(|n| d.shape_at(n).unwrap().block_sizes()[0]).collect();
        assert_eq!(sizes, vec![2, 4, 8]);
        let d = uhf_diagram(&[2, 3], 2).unwrap();
        assert_eq!(d.shape_at(2).unwrap().block_sizes(), &[6]);
        let d = uhf_diagram(&[2], 5).unwrap();
        assert_eq!(d.shape_at(5).unwrap().block_sizes(), &[32]);
        assert!(uhf_diagram(&[1], 3).is_err());
        assert!(uhf_diagram(&[], 3).is_err());
    }

    #[test]
    fn diagram_validation() {
        assert!(BratteliDiagram::new(vec![1, 1], vec![Multiplicity(vec![vec![1, 0], vec![0, 0]])]).is_err());
        assert!(BratteliDiagram::new(vec![1, 1], vec![Multiplicity(vec![vec![1]])]).is_err());
        assert!(BratteliDiagram::new(vec![0], vec![]).is_err());
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&Multiplicity(vec![vec![1, 1], vec![1, 0]])));
        assert!(!is_primitive(&Multiplicity(vec![vec![1, 0], vec![0, 1]])));
        assert!(!is_primitive(&Multiplicity(vec![vec![0, 1], vec![1, 0]])));
        assert!(is_primitive(&Multiplicity(vec![vec![2]])));
    }

    #[test]
    fn fibonacci_trace() {
        let d = fibonacci_diagram(8).unwrap();
        let state = tracial_state(&d, None).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let w1 = state.weights_at(1).unwrap();
        assert!((w1[0] - 1.0 / phi).abs() < 1e-12 && (w1[1] - 1.0 / (phi * phi)).abs() < 1e-12, "{w1:?}");
        state.check_against(&d).unwrap();
    }

    #[test]
    fn uhf_trace() {
        let d = uhf_diagram(&[2], 6).unwrap();
        let state = tracial_state(&d, None).unwrap();
        for k in 1..=6 {
            assert!((state.weights_at(k).unwrap()[0] - 0.5f64.powi(k as i32)).abs() < 1e-15);
        }
        // non-stationary UHF still has a unique trace
        let d = uhf_diagram(&[2, 3, 5], 3).unwrap();
        let state = tracial_state(&d, None).unwrap();
        assert!((state.weights_at(3).unwrap()[0] - 1.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn trace_needs_terminal_weights_when_not_unique() {
        let identity = Multiplicity(vec![vec![1, 0], vec![0, 1]]);
        let d = BratteliDiagram::new(vec![1, 2], vec![identity.clone(), identity]).unwrap();
        let err = tracial_state(&d, None).unwrap_err();
        assert!(err.to_string().contains("trace not unique"));
        let state = tracial_state(&d, Some(&[1.0, 1.0])).unwrap();
        state.check_against(&d).unwrap();
        assert!((state.weights_at(1).unwrap()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!(tracial_state(&d, Some(&[1.0])).is_err());
        assert!(tracial_state(&d, Some(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn embedding_along_the_diagram() {
        let d = fibonacci_diagram(5).unwrap();
        let a = Element::diagonal(&[vec![2.0], vec![5.0]]).unwrap();
        assert_eq!(embed_to_level(&d, &a, 1, 1).unwrap(), a);
        let b = embed_to_level(&d, &a, 1, 2).unwrap();
        assert_eq!(b, Element::diagonal(&[vec![2.0, 5.0], vec![2.0]]).unwrap());
        let direct = embed_to_level(&d, &a, 1, 5).unwrap();
        let staged = embed_to_level(&d, &embed_to_level(&d, &a, 1, 3).unwrap(), 3, 5).unwrap();
        assert_eq!(direct, staged);
        assert!(embed_to_level(&d, &a, 2, 3).is_err());
        assert!(embed_to_level(&d, &a, 1, 6).is_err());
    }

    #[test]
    fn rank_of_embedded_projection_is_pushed_rank() {
        use crate::multimatrix::{projection_of_rank, spectrum};
        use crate::scale::{push_to_level, ScaleElement};
        let d = fibonacci_diagram(5).unwrap();
        for r in d.shape_at(2).unwrap().scale_points().unwrap() {
            if r.is_zero() {
                continue;
            }
            let p = projection_of_rank(d.shape_at(2).unwrap(), &r).unwrap();
            let q = embed_to_level(&d, &p, 2, 4).unwrap();
            let pushed = push_to_level(&ScaleElement::new(2, r.clone()), 4, &d).unwrap().rank;
            let rank: RankVector = spectrum(&q, 1e-9).unwrap().rank_vectors[0].clone();
            assert_eq!(rank, pushed);
        }
    }
}
