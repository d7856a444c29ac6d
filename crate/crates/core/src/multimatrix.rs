//! Finite direct sums `M_{k_1} ⊕ … ⊕ M_{k_L}`: shapes, rank vectors,
//! elements, their joint spectrum, and unital block embeddings.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, validation, Result};
use crate::linalg::{cluster_labels, eigh, EigenDecomposition, HermitianMatrix, SquareMatrix};

/// Upper bound on `Π(k_s + 1)` for anything that enumerates a dimension scale.
pub const SCALE_ENUMERATION_LIMIT: usize = 1_000_000;

/// Block sizes `(k_1, …, k_L)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraShape {
    block_sizes: Vec<usize>,
}

impl AlgebraShape {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return validation("an algebra needs at least one block");
        }
        if let Some(s) = block_sizes.iter().position(|&k| k == 0) {
            return validation(format!("block {} has size 0", s + 1));
        }
        Ok(AlgebraShape { block_sizes })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn block_count(&self) -> usize {
        self.block_sizes.len()
    }

    /// Sum of the block sizes.
    pub fn total_dimension(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// The class of the unit: every rank equal to the block size.
    pub fn order_unit(&self) -> RankVector {
        RankVector(self.block_sizes.clone())
    }

    pub fn zero_rank(&self) -> RankVector {
        RankVector(vec![0; self.block_count()])
    }

    /// `Π(k_s + 1)`, or `None` on overflow.
    pub fn scale_cardinality(&self) -> Option<usize> {
        self.block_sizes.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k + 1))
    }

    /// Fails with a resource error when the dimension scale is larger than
    /// [`SCALE_ENUMERATION_LIMIT`].
    pub fn check_enumerable(&self) -> Result<usize> {
        match self.scale_cardinality() {
            Some(n) if n <= SCALE_ENUMERATION_LIMIT => Ok(n),
            _ => Err(crate::Error::Resource(format!(
                "dimension scale of shape {self} has more than {SCALE_ENUMERATION_LIMIT} points"
            ))),
        }
    }

    pub fn contains(&self, r: &RankVector) -> bool {
        r.0.len() == self.block_count() && r.0.iter().zip(&self.block_sizes).all(|(x, k)| x <= k)
    }

    pub fn check_rank(&self, r: &RankVector) -> Result<()> {
        if r.0.len() != self.block_count() {
            return validation(format!("rank vector {r} has {} entries, shape {self} has {} blocks", r.0.len(), self.block_count()));
        }
        if let Some(s) = r.0.iter().zip(&self.block_sizes).position(|(x, k)| x > k) {
            return validation(format!("rank {} exceeds block size {} in block {} ({r} vs {self})", r.0[s], self.block_sizes[s], s + 1));
        }
        Ok(())
    }

    /// Position of `r` in lexicographic order (first block most significant).
    pub fn index_of(&self, r: &RankVector) -> usize {
        debug_assert!(self.contains(r));
        r.0.iter().zip(&self.block_sizes).fold(0, |acc, (&x, &k)| acc * (k + 1) + x)
    }

    pub fn rank_at(&self, mut index: usize) -> RankVector {
        let mut ranks = vec![0; self.block_count()];
        for (s, &k) in self.block_sizes.iter().enumerate().rev() {
            ranks[s] = index % (k + 1);
            index /= k + 1;
        }
        RankVector(ranks)
    }

    /// All points of the dimension scale in lexicographic order.
    pub fn scale_points(&self) -> Result<impl Iterator<Item = RankVector> + '_> {
        let n = self.check_enumerable()?;
        Ok((0..n).map(move |i| self.rank_at(i)))
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.block_sizes)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, xs: &[usize]) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

/// A point of the finite dimension scale: one rank per block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankVector(pub Vec<usize>);

impl RankVector {
    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    /// Product order.
    pub fn le(&self, other: &RankVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn lt(&self, other: &RankVector) -> bool {
        self.le(other) && self != other
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for RankVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

/// Non-negative integer matrix `M` with `target sizes = M · source sizes`.
/// Row `t` lists how many copies of each source block sit in target block `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multiplicity(pub Vec<Vec<usize>>);

impl Multiplicity {
    pub fn rows(&self) -> usize {
        self.0.len()
    }

    pub fn cols(&self) -> usize {
        self.0.first().map_or(0, Vec::len)
    }

    pub fn get(&self, t: usize, s: usize) -> usize {
        self.0[t][s]
    }

    /// `M · x` for an integer vector.
    pub fn apply(&self, x: &[usize]) -> Result<Vec<usize>> {
        if self.0.iter().any(|row| row.len() != x.len()) {
            return validation(format!("multiplicity matrix with {} columns applied to a vector of length {}", self.cols(), x.len()));
        }
        Ok(self.0.iter().map(|row| row.iter().zip(x).map(|(m, v)| m * v).sum()).collect())
    }

    /// Checks that `self` is a unital embedding from `source` into `target`.
    pub fn check_unital(&self, source: &AlgebraShape, target: &AlgebraShape) -> Result<()> {
        if self.rows() != target.block_count() {
            return validation(format!("multiplicity matrix has {} rows, target shape {target} has {} blocks", self.rows(), target.block_count()));
        }
        let image = self.apply(source.block_sizes())?;
        if image != target.block_sizes() {
            return validation(format!(
                "embedding is not unital: M · {source} = {} but target shape is {target}",
                RankVector(image)
            ));
        }
        Ok(())
    }
}

/// A self-adjoint element `⊕ a_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    shape: AlgebraShape,
    blocks: Vec<HermitianMatrix>,
}

impl Element {
    pub fn new(blocks: Vec<HermitianMatrix>) -> Result<Self> {
        let shape = AlgebraShape::new(blocks.iter().map(HermitianMatrix::size).collect())?;
        Ok(Element { shape, blocks })
    }

    pub fn zeros(shape: &AlgebraShape) -> Self {
        Element { shape: shape.clone(), blocks: shape.block_sizes().iter().map(|&k| HermitianMatrix::zeros(k)).collect() }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Element { shape: shape.clone(), blocks: shape.block_sizes().iter().map(|&k| HermitianMatrix::identity(k)).collect() }
    }

    /// Element whose block `s` is `diag(diagonals[s])`.
    pub fn diagonal(diagonals: &[Vec<f64>]) -> Result<Self> {
        Self::new(diagonals.iter().map(|d| HermitianMatrix::diagonal(d)).collect())
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[HermitianMatrix] {
        &self.blocks
    }

    fn check_same_shape(&self, other: &Element) -> Result<()> {
        if self.shape != other.shape {
            return validation(format!("shape mismatch: {} vs {}", self.shape, other.shape));
        }
        Ok(())
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.check_same_shape(other)?;
        Ok(Element { shape: self.shape.clone(), blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b)).collect() })
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.check_same_shape(other)?;
        Ok(Element { shape: self.shape.clone(), blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.sub(b)).collect() })
    }

    pub fn scale(&self, t: f64) -> Element {
        Element { shape: self.shape.clone(), blocks: self.blocks.iter().map(|b| b.scale(t)).collect() }
    }

    /// `u a u*` with one unitary per block.
    pub fn conjugate_by_unitary(&self, unitaries: &[SquareMatrix]) -> Result<Element> {
        if unitaries.len() != self.blocks.len() {
            return validation(format!("{} unitaries supplied for {} blocks", unitaries.len(), self.blocks.len()));
        }
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (s, (b, u)) in self.blocks.iter().zip(unitaries).enumerate() {
            if u.size() != b.size() {
                return validation(format!("unitary for block {} has size {}, block has size {}", s + 1, u.size(), b.size()));
            }
            blocks.push(b.conjugate_by(u));
        }
        Ok(Element { shape: self.shape.clone(), blocks })
    }

    /// Operator norm: the largest block spectral radius.
    pub fn norm(&self) -> Result<f64> {
        self.blocks.iter().try_fold(0.0f64, |acc, b| Ok(acc.max(b.norm()?)))
    }

    pub fn block_traces(&self) -> Vec<f64> {
        self.blocks.iter().map(HermitianMatrix::trace).collect()
    }

    /// Largest entry-wise deviation; shapes must agree.
    pub fn max_abs_diff(&self, other: &Element) -> f64 {
        assert_eq!(self.shape, other.shape, "comparing elements of different shapes");
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Element, tol: f64) -> bool {
        self.shape == other.shape && self.max_abs_diff(other) <= tol
    }

    pub fn eigen_blocks(&self) -> Result<Vec<EigenDecomposition>> {
        self.blocks.iter().map(eigh).collect()
    }

    /// Block eigendecompositions with eigenvalues in `[-tol, 0)` clamped to
    /// zero. Fails if some eigenvalue is below `-tol`.
    pub fn positive_eigen_blocks(&self, tol: f64) -> Result<Vec<EigenDecomposition>> {
        let mut eig = self.eigen_blocks()?;
        for (s, e) in eig.iter_mut().enumerate() {
            if let Some(&worst) = e.values.last() {
                if worst < -tol {
                    return domain(format!("element not positive: block {} eigenvalue {}", s + 1, worst));
                }
            }
            for x in e.values.iter_mut() {
                if *x < 0.0 {
                    *x = 0.0;
                }
            }
        }
        Ok(eig)
    }

    pub fn is_positive(&self, tol: f64) -> Result<bool> {
        match self.positive_eigen_blocks(tol) {
            Ok(_) => Ok(true),
            Err(crate::Error::Domain(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

/// The clustered spectrum of a positive element with the ranks of its
/// spectral projections `E_a([λ_j, ∞))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumProfile {
    pub distinct_values: Vec<f64>,
    pub rank_vectors: Vec<RankVector>,
}

/// Everything the trace computations need from one diagonalization.
#[derive(Clone, Debug)]
pub struct JointSpectrum {
    pub eigen: Vec<EigenDecomposition>,
    /// `labels[s][i]` is the cluster of the `i`-th eigenvalue of block `s`.
    pub labels: Vec<Vec<usize>>,
    pub profile: SpectrumProfile,
}

impl JointSpectrum {
    pub fn of(a: &Element, tol: f64) -> Result<Self> {
        let eigen = a.positive_eigen_blocks(tol)?;
        let mut pooled: Vec<(f64, usize, usize)> = Vec::with_capacity(a.shape.total_dimension());
        for (s, e) in eigen.iter().enumerate() {
            pooled.extend(e.values.iter().enumerate().map(|(i, &x)| (x, s, i)));
        }
        pooled.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let sorted: Vec<f64> = pooled.iter().map(|p| p.0).collect();
        let pooled_labels = cluster_labels(&sorted, tol);
        let clusters = pooled_labels.last().map_or(0, |&l| l + 1);

        let mut labels: Vec<Vec<usize>> = eigen.iter().map(|e| vec![0; e.values.len()]).collect();
        let mut distinct_values = Vec::with_capacity(clusters);
        let mut counts = vec![vec![0usize; a.shape.block_count()]; clusters];
        for (&(x, s, i), &label) in pooled.iter().zip(&pooled_labels) {
            if label == distinct_values.len() {
                distinct_values.push(x);
            }
            labels[s][i] = label;
            counts[label][s] += 1;
        }
        let mut running = vec![0usize; a.shape.block_count()];
        let rank_vectors = counts
            .into_iter()
            .map(|c| {
                for (r, n) in running.iter_mut().zip(c) {
                    *r += n;
                }
                RankVector(running.clone())
            })
            .collect();
        Ok(JointSpectrum { eigen, labels, profile: SpectrumProfile { distinct_values, rank_vectors } })
    }
}

/// Distinct spectral values of a positive element (clustered jointly across
/// blocks) and the rank vectors of the corresponding spectral projections.
pub fn spectrum(a: &Element, tol: f64) -> Result<SpectrumProfile> {
    Ok(JointSpectrum::of(a, tol)?.profile)
}

/// Ranks of `E_a([t, ∞))`: per block, the number of eigenvalues `≥ t - tol`.
pub fn rank_vector_at(a: &Element, t: f64, tol: f64) -> Result<RankVector> {
    if !(t >= 0.0) {
        return validation(format!("threshold must be non-negative, got {t}"));
    }
    let eigen = a.positive_eigen_blocks(tol)?;
    Ok(rank_vector_from_eigen(&eigen, t, tol))
}

pub(crate) fn rank_vector_from_eigen(eigen: &[EigenDecomposition], t: f64, tol: f64) -> RankVector {
    RankVector(eigen.iter().map(|e| e.values.iter().filter(|&&x| x >= t - tol).count()).collect())
}

/// A function on the spectrum given by its values at finitely many points.
/// A spectral value `λ` is matched to the closest point within `tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectralMap(pub Vec<(f64, f64)>);

impl SpectralMap {
    pub fn lookup(&self, x: f64, tol: f64) -> Option<f64> {
        self.0
            .iter()
            .filter(|(p, _)| (p - x).abs() <= tol)
            .min_by(|a, b| (a.0 - x).abs().total_cmp(&(b.0 - x).abs()))
            .map(|&(_, v)| v)
    }
}

/// Replaces each eigenvalue by `f` evaluated at its cluster representative.
pub fn functional_calculus(a: &Element, f: &SpectralMap, tol: f64) -> Result<Element> {
    if let Some(&(x, v)) = f.0.iter().find(|(_, v)| !(*v >= 0.0) || !v.is_finite()) {
        return validation(format!("function value at {x} must be finite and non-negative, got {v}"));
    }
    let joint = JointSpectrum::of(a, tol)?;
    let mut images = Vec::with_capacity(joint.profile.distinct_values.len());
    for &lambda in &joint.profile.distinct_values {
        match f.lookup(lambda, tol) {
            Some(v) => images.push(v),
            None => return domain(format!("function is not defined at spectral value {lambda}")),
        }
    }
    let blocks = joint
        .eigen
        .iter()
        .zip(&joint.labels)
        .map(|(e, labels)| e.map_values(|i, _| images[labels[i]]))
        .collect();
    Ok(Element { shape: a.shape.clone(), blocks })
}

/// Diagonal projection with the leading `r_s` diagonal entries of block `s`
/// equal to one.
pub fn projection_of_rank(shape: &AlgebraShape, r: &RankVector) -> Result<Element> {
    shape.check_rank(r)?;
    let diagonals: Vec<Vec<f64>> = shape
        .block_sizes()
        .iter()
        .zip(r.ranks())
        .map(|(&k, &rank)| (0..k).map(|i| if i < rank { 1.0 } else { 0.0 }).collect())
        .collect();
    Element::diagonal(&diagonals)
}

/// Unital block-diagonal embedding: target block `t` is the direct sum of
/// `m[t][s]` copies of `a_s`, ordered by `s` then by copy.
pub fn embed(a: &Element, m: &Multiplicity, target_shape: &AlgebraShape) -> Result<Element> {
    m.check_unital(&a.shape, target_shape)?;
    let mut blocks = Vec::with_capacity(target_shape.block_count());
    for (t, &size) in target_shape.block_sizes().iter().enumerate() {
        let mut out = SquareMatrix::zeros(size);
        let mut offset = 0;
        for (s, block) in a.blocks.iter().enumerate() {
            let k = block.size();
            for _ in 0..m.get(t, s) {
                let src = block.as_matrix();
                for i in 0..k {
                    for j in 0..k {
                        out[(offset + i, offset + j)] = src[(i, j)];
                    }
                }
                offset += k;
            }
        }
        debug_assert_eq!(offset, size);
        blocks.push(HermitianMatrix::hermitize(out));
    }
    Ok(Element { shape: target_shape.clone(), blocks })
}
