//! Seeded property suites for the trace axioms and the structure identities.
//!
//! Every suite draws one independent random instance per trial from a seed
//! derived from `(config.seed, trial index)`. Trials run in parallel and are
//! reduced in trial order, so a report depends only on the configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bratteli::{embed_to_level, fibonacci_diagram, tracial_state, uhf_diagram, BratteliDiagram};
use crate::discrete_choquet::{capacity_from_scale, choquet_integral};
use crate::error::{Error, Result};
use crate::linalg::{random_psd_with, random_unitary_with, seeded_rng, TestRng, DEFAULT_TOL};
use crate::multimatrix::{functional_calculus, AlgebraShape, Element, JointSpectrum, SpectralMap};
use crate::scale::{K0State, LevelScale, RankFunction, ScaleFunction, Transform};
use crate::trace_engine::{choquet_formula, choquet_grid_formula, reconstruct_scale, spectral_snap};

/// Desk-scale limits on the shapes a suite accepts.
pub const MAX_BLOCK_SIZE: usize = 8;
pub const MAX_BLOCKS: usize = 4;

/// Size of violation the (C) negative control must exhibit.
pub const CONTROL_THRESHOLD: f64 = 1e-3;

/// Palette of spectral values shared across blocks, so that random elements
/// regularly have multiplicities and cross-block ties.
const PALETTE: [f64; 6] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Unitary,
    Monotone,
    Homogeneous,
    Comonotone,
    Grid,
    Embed,
    Lipschitz,
    Linear,
    Oracle,
    Roundtrip,
    Snap,
}

impl Suite {
    pub const AXIOMS: [Suite; 4] = [Suite::Unitary, Suite::Monotone, Suite::Homogeneous, Suite::Comonotone];
    pub const STRUCTURE: [Suite; 7] =
        [Suite::Grid, Suite::Embed, Suite::Lipschitz, Suite::Linear, Suite::Oracle, Suite::Roundtrip, Suite::Snap];

    pub fn all() -> impl Iterator<Item = Suite> {
        Self::AXIOMS.into_iter().chain(Self::STRUCTURE)
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Unitary => "U",
            Suite::Monotone => "M",
            Suite::Homogeneous => "H",
            Suite::Comonotone => "C",
            Suite::Grid => "grid",
            Suite::Embed => "embed",
            Suite::Lipschitz => "lipschitz",
            Suite::Linear => "linear",
            Suite::Oracle => "oracle",
            Suite::Roundtrip => "roundtrip",
            Suite::Snap => "snap",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Unitary | Suite::Monotone => 1e-8,
            Suite::Homogeneous | Suite::Oracle | Suite::Snap => 1e-10,
            Suite::Comonotone | Suite::Embed | Suite::Lipschitz | Suite::Linear => 1e-9,
            Suite::Grid | Suite::Roundtrip => 1e-12,
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::Oracle => 500,
            Suite::Embed | Suite::Snap => 100,
            _ => 200,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::all()
            .find(|suite| suite.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(format!("unknown suite {s:?}")))
    }
}

fn default_shapes() -> Vec<Vec<usize>> {
    vec![vec![2], vec![3], vec![2, 1], vec![2, 3], vec![4, 2, 1]]
}

fn default_seed() -> u64 {
    20_240_601
}

fn default_cluster_tol() -> f64 {
    DEFAULT_TOL
}

fn default_embed_depth() -> usize {
    5
}

/// Suite configuration. Every field has a documented default, so `{}` is a
/// valid configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_shapes")]
    pub shapes: Vec<Vec<usize>>,
    /// Trial count for every suite; `None` uses each suite's default.
    #[serde(default)]
    pub trials: Option<usize>,
    /// Per-suite trial counts, keyed by suite name; wins over `trials`.
    #[serde(default)]
    pub suite_trials: BTreeMap<String, usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Replaces every suite's violation tolerance.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Spectral clustering and positivity tolerance.
    #[serde(default = "default_cluster_tol")]
    pub cluster_tol: f64,
    /// Depth of the Fibonacci and UHF diagrams of the `embed` suite.
    #[serde(default = "default_embed_depth")]
    pub embed_depth: usize,
    /// Suites to run by name; empty runs all of them.
    #[serde(default)]
    pub suites: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            shapes: default_shapes(),
            trials: None,
            suite_trials: BTreeMap::new(),
            seed: default_seed(),
            tol: None,
            cluster_tol: default_cluster_tol(),
            embed_depth: default_embed_depth(),
            suites: Vec::new(),
        }
    }
}

impl SuiteConfig {
    pub fn trials_for(&self, suite: Suite) -> usize {
        self.suite_trials.get(suite.name()).copied().or(self.trials).unwrap_or_else(|| suite.default_trials())
    }

    pub fn tolerance_for(&self, suite: Suite) -> f64 {
        self.tol.unwrap_or_else(|| suite.default_tolerance())
    }

    pub fn selected_suites(&self) -> Result<Vec<Suite>> {
        if self.suites.is_empty() {
            return Ok(Suite::all().collect());
        }
        self.suites.iter().map(|s| s.parse()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub seed: u64,
    pub description: String,
}

/// Outcome of a negative control: a check that is expected to fail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ControlReport {
    pub description: String,
    pub max_violation: f64,
    pub threshold: f64,
    /// `max_violation > threshold`.
    pub exhibited: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite_name: String,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_violation: f64,
    pub failures: Vec<Failure>,
    pub passed: bool,
    /// Expected-fail control; never affects `passed`.
    pub control: Option<ControlReport>,
}

struct TrialOutcome {
    violation: f64,
    description: String,
    control: Option<f64>,
}

impl TrialOutcome {
    fn new(violation: f64, description: String) -> Self {
        TrialOutcome { violation, description, control: None }
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (trial as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trials<F>(suite: Suite, config: &SuiteConfig, control: Option<&str>, trial: F) -> SuiteReport
where
    F: Fn(usize, &mut TestRng) -> Result<TrialOutcome> + Sync,
{
    let trials = config.trials_for(suite);
    let tolerance = config.tolerance_for(suite);
    let outcomes: Vec<(usize, u64, Result<TrialOutcome>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(config.seed, i);
            (i, seed, trial(i, &mut seeded_rng(seed)))
        })
        .collect();

    let mut max_violation = 0.0f64;
    let mut control_max = 0.0f64;
    let mut failures = Vec::new();
    for (i, seed, outcome) in outcomes {
        match outcome {
            Ok(o) => {
                max_violation = max_violation.max(o.violation);
                if let Some(c) = o.control {
                    control_max = control_max.max(c);
                }
                if !(o.violation <= tolerance) {
                    failures.push(Failure { trial: i, seed, description: format!("violation {:e}: {}", o.violation, o.description) });
                }
            }
            Err(e) => {
                max_violation = f64::INFINITY;
                failures.push(Failure { trial: i, seed, description: format!("error: {e}") });
            }
        }
    }
    let control = control.map(|description| ControlReport {
        description: description.to_string(),
        max_violation: control_max,
        threshold: CONTROL_THRESHOLD,
        exhibited: control_max > CONTROL_THRESHOLD,
    });
    SuiteReport {
        suite_name: suite.name().to_string(),
        trials,
        seed: config.seed,
        tolerance,
        max_violation,
        passed: failures.is_empty(),
        failures,
        control,
    }
}

fn guard_report(suite: Suite, config: &SuiteConfig, problem: String) -> SuiteReport {
    SuiteReport {
        suite_name: suite.name().to_string(),
        trials: 0,
        seed: config.seed,
        tolerance: config.tolerance_for(suite),
        max_violation: f64::INFINITY,
        failures: vec![Failure { trial: 0, seed: config.seed, description: problem }],
        passed: false,
        control: None,
    }
}

fn checked_shapes(config: &SuiteConfig) -> std::result::Result<Vec<AlgebraShape>, String> {
    if config.shapes.is_empty() {
        return Err("configuration lists no shapes".into());
    }
    config
        .shapes
        .iter()
        .map(|ks| {
            if ks.len() > MAX_BLOCKS || ks.iter().any(|&k| k > MAX_BLOCK_SIZE) {
                return Err(format!("shape {ks:?} exceeds the desk-scale guard (≤ {MAX_BLOCKS} blocks of size ≤ {MAX_BLOCK_SIZE})"));
            }
            AlgebraShape::new(ks.clone()).map_err(|e| e.to_string())
        })
        .collect()
}

/// Random instances used by the suites.
pub mod generate {
    use super::*;

    /// `u · diag(values) · u*` per block, with values drawn from a shared
    /// palette or uniformly from `[0, 3]`.
    pub fn positive_element<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> Result<Element> {
        let blocks = shape
            .block_sizes()
            .iter()
            .map(|&k| {
                let values: Vec<f64> = (0..k)
                    .map(|_| if rng.random_bool(0.5) { PALETTE[rng.random_range(0..PALETTE.len())] } else { rng.random_range(0.0..3.0) })
                    .collect();
                Ok(random_unitary_with(rng, k)?.conjugate_diagonal(&values))
            })
            .collect::<Result<Vec<_>>>()?;
        Element::new(blocks)
    }

    pub fn diagonal_element<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> Result<Element> {
        let diagonals: Vec<Vec<f64>> = shape
            .block_sizes()
            .iter()
            .map(|&k| {
                (0..k)
                    .map(|_| if rng.random_bool(0.5) { PALETTE[rng.random_range(0..PALETTE.len())] } else { rng.random_range(0.0..3.0) })
                    .collect()
            })
            .collect();
        Element::diagonal(&diagonals)
    }

    pub fn unitaries<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> Result<Vec<crate::linalg::SquareMatrix>> {
        shape.block_sizes().iter().map(|&k| random_unitary_with(rng, k)).collect()
    }

    /// Random increasing table with `α(0) = 0`: the running maximum over
    /// the product order of independent values, some of them zero.
    pub fn increasing_table<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> Result<LevelScale> {
        let n = shape.check_enumerable()?;
        let mut values = vec![0.0; n];
        for i in 1..n {
            let r = shape.rank_at(i);
            let mut v: f64 = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..2.0) };
            for s in 0..shape.block_count() {
                if r.ranks()[s] > 0 {
                    let mut lower = r.clone();
                    lower.0[s] -= 1;
                    v = v.max(values[shape.index_of(&lower)]);
                }
            }
            values[i] = v;
        }
        LevelScale::from_values(shape, values)
    }

    /// Normalized random weights for a state on `shape`.
    pub fn state<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> Result<K0State> {
        let raw: Vec<f64> = shape.block_sizes().iter().map(|_| rng.random_range(0.1..1.0)).collect();
        let unit: f64 = raw.iter().zip(shape.block_sizes()).map(|(w, &k)| w * k as f64).sum();
        K0State::for_shape(shape, raw.iter().map(|w| w / unit).collect())
    }

    pub fn transform<R: Rng>(rng: &mut R) -> Transform {
        match rng.random_range(0..3) {
            0 => Transform::Identity,
            1 => Transform::Power { lambda: rng.random_range(0.1..=1.0) },
            _ => {
                let mut x = 0.0;
                let mut y = 0.0;
                let points = (0..4)
                    .map(|_| {
                        x += rng.random_range(0.1..0.5);
                        y += rng.random_range(0.0..1.0);
                        (x, y)
                    })
                    .collect();
                Transform::PiecewiseLinear { points }
            }
        }
    }

    /// A composite or a table scale on a single level, with equal odds.
    pub fn scale<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> Result<ScaleFunction> {
        if rng.random_bool(0.5) {
            ScaleFunction::composite(state(rng, shape)?, transform(rng))
        } else {
            Ok(ScaleFunction::table(1, increasing_table(rng, shape)?))
        }
    }

    /// Value table on `k` points: non-decreasing, with occasional plateaus.
    pub fn increasing_values<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
        let mut v = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..1.0) };
        (0..k)
            .map(|_| {
                let out = v;
                if !rng.random_bool(0.25) {
                    v += rng.random_range(0.1..1.0);
                }
                out
            })
            .collect()
    }
}

fn trace_of(a: &Element, alpha: &ScaleFunction, tol: f64) -> Result<f64> {
    Ok(choquet_formula(a, &alpha.at_level(1)?, tol)?.0)
}

fn unit_value(alpha: &ScaleFunction, shape: &AlgebraShape) -> Result<f64> {
    alpha.at_level(1)?.value(&shape.order_unit())
}

/// One of the four trace axioms.
pub fn run_axiom_suite(which: Suite, config: &SuiteConfig) -> SuiteReport {
    assert!(Suite::AXIOMS.contains(&which), "{which} is not an axiom suite");
    let shapes = match checked_shapes(config) {
        Ok(s) => s,
        Err(problem) => return guard_report(which, config, problem),
    };
    let tol = config.cluster_tol;
    let pick = |i: usize| &shapes[i % shapes.len()];
    match which {
        Suite::Unitary => run_trials(which, config, None, |i, rng| {
            let shape = pick(i);
            let a = generate::positive_element(rng, shape)?;
            let alpha = generate::scale(rng, shape)?;
            let b = a.conjugate_by_unitary(&generate::unitaries(rng, shape)?)?;
            let (x, y) = (trace_of(&a, &alpha, tol)?, trace_of(&b, &alpha, tol)?);
            Ok(TrialOutcome::new((x - y).abs() / (1.0 + a.norm()?), format!("shape {shape}: φ(a) = {x}, φ(uau*) = {y}")))
        }),
        Suite::Monotone => run_trials(which, config, None, |i, rng| {
            let shape = pick(i);
            let a = generate::positive_element(rng, shape)?;
            let alpha = generate::scale(rng, shape)?;
            let bound = 10f64.powf(rng.random_range(-6.0..0.3));
            let c = shape.block_sizes().iter().map(|&k| random_psd_with(rng, k, bound)).collect::<Result<Vec<_>>>()?;
            let b = a.add(&Element::new(c)?)?;
            let (x, y) = (trace_of(&a, &alpha, tol)?, trace_of(&b, &alpha, tol)?);
            Ok(TrialOutcome::new((x - y).max(0.0), format!("shape {shape}: φ(a) = {x} > φ(a + c) = {y}")))
        }),
        Suite::Homogeneous => run_trials(which, config, None, |i, rng| {
            let shape = pick(i);
            let a = generate::positive_element(rng, shape)?;
            let alpha = generate::scale(rng, shape)?;
            let base = trace_of(&a, &alpha, tol)?;
            let mut worst = (0.0f64, 0.0);
            for t in [0.0, 0.5, 1.0, 3.0] {
                let dev = (trace_of(&a.scale(t), &alpha, tol)? - t * base).abs();
                if dev > worst.0 {
                    worst = (dev, t);
                }
            }
            Ok(TrialOutcome::new(worst.0, format!("shape {shape}: |φ(ta) − tφ(a)| at t = {}", worst.1)))
        }),
        Suite::Comonotone => run_trials(
            which,
            config,
            Some("f increasing, g decreasing: |φ(f(a) + g(a)) − φ(f(a)) − φ(g(a))| must exceed the threshold somewhere"),
            |i, rng| {
                let shape = pick(i);
                let a = generate::positive_element(rng, shape)?;
                let alpha = generate::scale(rng, shape)?;
                let mut points = JointSpectrum::of(&a, tol)?.profile.distinct_values;
                points.reverse();
                let k = points.len();
                let table = |values: Vec<f64>| SpectralMap(points.iter().copied().zip(values).collect());
                let increasing_f = generate::increasing_values(rng, k);
                let increasing_g = generate::increasing_values(rng, k);
                let (f, g) = if i % 2 == 0 {
                    (table(increasing_f.clone()), table(increasing_g.clone()))
                } else {
                    (table(increasing_f.iter().rev().copied().collect()), table(increasing_g.iter().rev().copied().collect()))
                };
                let defect = |f: &SpectralMap, g: &SpectralMap| -> Result<f64> {
                    let fa = functional_calculus(&a, f, tol)?;
                    let ga = functional_calculus(&a, g, tol)?;
                    Ok((trace_of(&fa.add(&ga)?, &alpha, tol)? - trace_of(&fa, &alpha, tol)? - trace_of(&ga, &alpha, tol)?).abs())
                };
                let violation = defect(&f, &g)?;
                let anti = table(increasing_g.iter().rev().copied().collect());
                let control = defect(&table(increasing_f), &anti)?;
                let kind = if i % 2 == 0 { "increasing/increasing" } else { "decreasing/decreasing" };
                Ok(TrialOutcome { violation, description: format!("shape {shape}, {kind} pair on {k} spectral points"), control: Some(control) })
            },
        ),
        _ => unreachable!(),
    }
}

/// Fibonacci and UHF 2^∞ diagrams with their tracial states.
fn embed_diagrams(depth: usize) -> Result<Vec<(&'static str, BratteliDiagram, K0State)>> {
    let fib = fibonacci_diagram(depth)?;
    let uhf = uhf_diagram(&[2], depth)?;
    let fib_state = tracial_state(&fib, None)?;
    let uhf_state = tracial_state(&uhf, None)?;
    Ok(vec![("fibonacci", fib, fib_state), ("uhf 2^∞", uhf, uhf_state)])
}

/// One of the structure identities.
pub fn run_structure_suite(which: Suite, config: &SuiteConfig) -> SuiteReport {
    assert!(Suite::STRUCTURE.contains(&which), "{which} is not a structure suite");
    let tol = config.cluster_tol;
    if which == Suite::Embed {
        let diagrams = match embed_diagrams(config.embed_depth) {
            Ok(d) if config.embed_depth >= 2 => d,
            Ok(_) => return guard_report(which, config, "embed suite needs depth ≥ 2".into()),
            Err(e) => return guard_report(which, config, e.to_string()),
        };
        return run_trials(which, config, None, |_, rng| {
            let mut worst = (0.0f64, String::new());
            for (name, d, state) in &diagrams {
                let alpha = ScaleFunction::composite(state.clone(), generate::transform(rng))?;
                for level in 1..d.depth() {
                    let a = generate::positive_element(rng, d.shape_at(level)?)?;
                    let here = choquet_formula(&a, &alpha.at_level(level)?, tol)?.0;
                    let b = embed_to_level(d, &a, level, level + 1)?;
                    let there = choquet_formula(&b, &alpha.at_level(level + 1)?, tol)?.0;
                    let dev = (here - there).abs();
                    if dev >= worst.0 {
                        worst = (dev, format!("{name} level {level}: {here} vs {there} after embedding"));
                    }
                }
            }
            Ok(TrialOutcome::new(worst.0, worst.1))
        });
    }

    let shapes = match checked_shapes(config) {
        Ok(s) => s,
        Err(problem) => return guard_report(which, config, problem),
    };
    let pick = |i: usize| &shapes[i % shapes.len()];
    match which {
        Suite::Grid => run_trials(which, config, None, |i, rng| {
            let shape = pick(i);
            let a = generate::positive_element(rng, shape)?;
            let alpha = generate::scale(rng, shape)?;
            let view = alpha.at_level(1)?;
            let (exact, profile) = choquet_formula(&a, &view, tol)?;
            let top = profile.distinct_values[0] + 1.0;
            let mut grid = profile.distinct_values.clone();
            for _ in 0..rng.random_range(0..=4) {
                let t = rng.random_range(0.0..top);
                if grid.iter().all(|g| (g - t).abs() > 1e-6) {
                    grid.push(t);
                }
            }
            if rng.random_bool(0.5) && grid.iter().all(|&g| g > 1e-6) {
                grid.push(0.0);
            }
            grid.sort_by(|x, y| y.total_cmp(x));
            let (value, _) = choquet_grid_formula(&a, &grid, &view, tol)?;
            Ok(TrialOutcome::new((value - exact).abs(), format!("shape {shape}, grid of {} points: {value} vs {exact}", grid.len())))
        }),
        Suite::Lipschitz => run_trials(which, config, None, |i, rng| {
            let shape = pick(i);
            let a = generate::positive_element(rng, shape)?;
            let b = if rng.random_bool(0.5) {
                generate::positive_element(rng, shape)?
            } else {
                let bound = rng.random_range(1e-6..0.1);
                a.add(&Element::new(shape.block_sizes().iter().map(|&k| random_psd_with(rng, k, bound)).collect::<Result<Vec<_>>>()?)?)?
            };
            let alpha = generate::scale(rng, shape)?;
            let lip = unit_value(&alpha, shape)?;
            let dist = a.sub(&b)?.norm()?;
            let gap = (trace_of(&a, &alpha, tol)? - trace_of(&b, &alpha, tol)?).abs();
            Ok(TrialOutcome::new((gap - lip * dist).max(0.0), format!("shape {shape}: |Δφ| = {gap}, α(1)·‖a − b‖ = {}", lip * dist)))
        }),
        Suite::Linear => run_trials(which, config, None, |i, rng| {
            let shape = pick(i);
            let state = generate::state(rng, shape)?;
            let weights = state.weights_at(1)?.to_vec();
            let alpha = ScaleFunction::composite(state, Transform::Identity)?;
            let a = generate::positive_element(rng, shape)?;
            let b = generate::positive_element(rng, shape)?;
            let (x, y, z) = (trace_of(&a, &alpha, tol)?, trace_of(&b, &alpha, tol)?, trace_of(&a.add(&b)?, &alpha, tol)?);
            let weighted: f64 = a.block_traces().iter().zip(&weights).map(|(t, w)| t * w).sum();
            let additivity = (z - x - y).abs();
            let trace_form = (x - weighted).abs();
            Ok(TrialOutcome::new(
                additivity.max(trace_form),
                format!("shape {shape}: |φ(a+b) − φ(a) − φ(b)| = {additivity:e}, |φ(a) − Σ w Tr| = {trace_form:e}"),
            ))
        }),
        Suite::Oracle => {
            let small: Vec<&AlgebraShape> = shapes.iter().filter(|s| s.total_dimension() <= 8).collect();
            if small.is_empty() {
                return guard_report(which, config, "oracle suite needs a shape with at most 8 diagonal slots".into());
            }
            run_trials(which, config, None, |i, rng| {
                let shape = small[i % small.len()];
                let a = generate::diagonal_element(rng, shape)?;
                let alpha = generate::scale(rng, shape)?;
                let view = alpha.at_level(1)?;
                let matrix = choquet_formula(&a, &view, tol)?.0;
                let capacity = capacity_from_scale(shape, &view)?;
                let x: Vec<f64> = a.blocks().iter().flat_map(|b| (0..b.size()).map(move |j| b.as_matrix()[(j, j)].re)).collect();
                let discrete = choquet_integral(&capacity, &x)?;
                Ok(TrialOutcome::new((matrix - discrete).abs(), format!("shape {shape}: matrix {matrix} vs discrete {discrete}")))
            })
        }
        Suite::Roundtrip => run_trials(which, config, None, |i, rng| {
            let shape = pick(i);
            let table = generate::increasing_table(rng, shape)?;
            let phi = |a: &Element| choquet_formula(a, &table, tol).map(|(v, _)| v);
            let recovered = reconstruct_scale(&phi, shape)?;
            let roundtrip = recovered.table.max_abs_diff(&table)?;
            let norm = reconstruct_scale(&|a: &Element| a.norm(), shape)?;
            let step = LevelScale::from_fn(shape, |r| Ok(if r.is_zero() { 0.0 } else { 1.0 }))?;
            let norm_dev = norm.table.max_abs_diff(&step)?;
            let mut description = format!("shape {shape}: table deviation {roundtrip:e}, norm step deviation {norm_dev:e}");
            if !recovered.is_choquet_trace() {
                description.push_str("; recovered table fails the axioms");
            }
            let axioms = if recovered.is_choquet_trace() && norm.is_choquet_trace() { 0.0 } else { 1.0 };
            Ok(TrialOutcome::new(roundtrip.max(norm_dev).max(axioms), description))
        }),
        Suite::Snap => run_trials(which, config, None, |i, rng| {
            let shape = pick(i);
            let b = generate::positive_element(rng, shape)?;
            let mut target: Vec<f64> = (0..rng.random_range(1..=5)).map(|_| rng.random_range(0.0..3.5)).collect();
            if rng.random_bool(0.3) {
                target.push(0.0);
            }
            let snap = spectral_snap(&b, &target, tol)?;
            let outside = snap
                .element
                .eigen_blocks()?
                .iter()
                .flat_map(|e| e.values.clone())
                .map(|x| target.iter().map(|t| (t - x).abs()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            let moved = snap.element.sub(&b)?.norm()?;
            let norm_dev = (moved - snap.distance).abs();
            let inclusion = if outside <= tol { 0.0 } else { outside };
            Ok(TrialOutcome::new(
                norm_dev.max(inclusion),
                format!("shape {shape}: ‖snap − b‖ = {moved}, snap distance {}, spectrum off target by {outside:e}", snap.distance),
            ))
        }),
        _ => unreachable!(),
    }
}

pub fn run_suite(which: Suite, config: &SuiteConfig) -> SuiteReport {
    if Suite::AXIOMS.contains(&which) {
        run_axiom_suite(which, config)
    } else {
        run_structure_suite(which, config)
    }
}

/// Every suite selected by the configuration, in a fixed order.
pub fn run_all(config: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    Ok(config.selected_suites()?.into_iter().map(|s| run_suite(s, config)).collect())
}
