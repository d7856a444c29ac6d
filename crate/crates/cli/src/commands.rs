//! Subcommand implementations. Every input file is parsed before any
//! computation starts.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use choquet_core::bratteli::{embed_to_level, fibonacci_diagram, tracial_state, uhf_diagram, BratteliDiagram};
use choquet_core::discrete_choquet::choquet_integral;
use choquet_core::multimatrix::{projection_of_rank, AlgebraShape, Element, RankVector};
use choquet_core::scale::{LevelScale, LevelView, RankFunction, ScaleFunction, Transform, STATE_TOL};
use choquet_core::trace_engine::{af_trace, choquet_formula, choquet_trace, choquet_trace_grid, reconstruct_scale};
use choquet_core::verifier::{run_all, SuiteConfig};

use crate::formats::{
    read_json, to_json_string, CapacityFile, DiagramFile, ElementFile, GridFile, ScaleFile, TableEntry, TraceJson,
};
use crate::{CliError, Output, EXIT_VERIFY_FAILED};

fn check_tol(tol: f64) -> Result<(), CliError> {
    if !(tol >= 0.0) || !tol.is_finite() {
        return Err(CliError::schema(format!("--tol must be a finite non-negative number, got {tol}")));
    }
    Ok(())
}

fn json_output<T: Serialize>(value: &T) -> Result<Output, CliError> {
    Ok(Output::ok(to_json_string(value)))
}

/// Rejects scales that cannot be evaluated on `shape` at `level` without a
/// diagram: unnormalized composite states and non-increasing tables.
fn check_standalone_scale(alpha: &ScaleFunction, level: usize, shape: &AlgebraShape) -> Result<(), CliError> {
    let view = alpha.at_level(level)?;
    view.check_shape(shape)?;
    match alpha {
        ScaleFunction::Composite(_) => {
            let unit = view.tau(&shape.order_unit()).unwrap_or(f64::NAN);
            if !((unit - 1.0).abs() <= STATE_TOL) {
                return Err(CliError::schema(format!("scale state is not normalized at level {level}: τ(1) = {unit}")));
            }
        }
        ScaleFunction::Table { table, .. } => {
            let at_zero = table.values()[0];
            if at_zero != 0.0 {
                return Err(CliError::domain(format!("scale is not increasing: value at 0 is {at_zero}")));
            }
            if let Some(v) = table.order_violations().first() {
                return Err(CliError::domain(format!(
                    "scale is not increasing: {} -> {} ({} > {})",
                    v.lower, v.upper, v.lower_value, v.upper_value
                )));
            }
        }
    }
    Ok(())
}

fn trace_json(result: &choquet_core::trace_engine::TraceResult) -> Value {
    serde_json::to_value(TraceJson::from(result)).expect("trace result serializes")
}

pub fn eval(element: &Path, scale: &Path, grid: Option<&Path>, tol: f64) -> Result<Output, CliError> {
    check_tol(tol)?;
    let element_file: ElementFile = read_json(element, "element")?;
    let scale_file: ScaleFile = read_json(scale, "scale")?;
    let grid = grid.map(|g| read_json::<GridFile>(g, "grid")).transpose()?;
    let a = element_file.to_element()?;
    let alpha = scale_file.to_scale()?;
    let level = element_file.level;

    check_standalone_scale(&alpha, level, a.shape())?;
    let result = choquet_trace(&a, &alpha, level, tol)?;
    let mut out = trace_json(&result);
    if let Some(grid) = grid {
        let via_grid = choquet_trace_grid(&a, &grid.points(), &alpha, level, tol)?;
        out["value"] = json!(via_grid.value);
        out["grid_value"] = json!(via_grid.value);
        out["formula_value"] = json!(result.value);
        out["difference"] = json!(via_grid.value - result.value);
    }
    json_output(&out)
}

pub fn eval_af(diagram: &Path, element: &Path, scale: Option<&Path>, lambda: f64, tol: f64) -> Result<Output, CliError> {
    check_tol(tol)?;
    let diagram_file: DiagramFile = read_json(diagram, "diagram")?;
    let element_file: ElementFile = read_json(element, "element")?;
    let scale_file = scale.map(|s| read_json::<ScaleFile>(s, "scale")).transpose()?;
    let d = diagram_file.to_diagram()?;
    let a = element_file.to_element()?;
    let level = element_file.level;
    if level > d.depth() {
        return Err(CliError::schema(format!("element level {level} exceeds the diagram depth {}", d.depth())));
    }
    let alpha = match scale_file {
        Some(f) => f.to_scale()?,
        None => ScaleFunction::composite(tracial_state(&d, None)?, Transform::Power { lambda })?,
    };

    let af = af_trace(&d, &a, level, &alpha, tol)?;
    let mut out = trace_json(&af.result);
    out["consistency"] = match af.next_level {
        Some(c) => json!({ "next_level": c.level, "value": c.value, "difference": c.difference }),
        None => Value::Null,
    };
    json_output(&out)
}

pub fn verify(config: Option<&Path>, seed: Option<u64>, trials: Option<usize>, suites: &[String]) -> Result<Output, CliError> {
    let mut config: SuiteConfig = match config {
        Some(path) => read_json(path, "verification config")?,
        None => SuiteConfig::default(),
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if trials.is_some() {
        config.trials = trials;
    }
    if !suites.is_empty() {
        config.suites = suites.to_vec();
    }
    let reports = run_all(&config)?;
    let passed = reports.iter().all(|r| r.passed);
    let text = to_json_string(&json!({ "passed": passed, "suites": reports }));
    Ok(Output { text, code: if passed { 0 } else { EXIT_VERIFY_FAILED } })
}

#[derive(Serialize)]
struct TableRow {
    rank: Vec<usize>,
    tau: Option<f64>,
    alpha: f64,
}

pub fn scale_table(diagram: Option<&Path>, level: Option<usize>, scale: &Path, csv: bool) -> Result<Output, CliError> {
    let diagram_file = diagram.map(|d| read_json::<DiagramFile>(d, "diagram")).transpose()?;
    let scale_file: ScaleFile = read_json(scale, "scale")?;
    let d = diagram_file.map(|f| f.to_diagram()).transpose()?;
    let alpha = scale_file.to_scale()?;

    let level = match (&alpha, level) {
        (_, Some(l)) => l,
        (ScaleFunction::Table { level, .. }, None) => *level,
        (ScaleFunction::Composite(_), None) => 1,
    };
    let shape = match (&alpha, &d) {
        (_, Some(d)) => d.shape_at(level)?.clone(),
        (ScaleFunction::Table { table, .. }, None) => table.shape().clone(),
        (ScaleFunction::Composite(_), None) => return Err(CliError::schema("a composite scale needs --diagram to fix the block sizes")),
    };
    if let (ScaleFunction::Composite(c), Some(d)) = (&alpha, &d) {
        c.state.check_against(d)?;
    }
    let view = alpha.at_level(level)?;
    view.check_shape(&shape)?;
    shape.check_enumerable()?;

    let rows = shape
        .scale_points()?
        .map(|r| Ok(TableRow { tau: view.tau(&r), alpha: view.value(&r)?, rank: r.0 }))
        .collect::<Result<Vec<_>, CliError>>()?;

    if csv {
        let mut text = String::new();
        let header: Vec<String> = (1..=shape.block_count()).map(|s| format!("r{s}")).chain(["tau".into(), "alpha".into()]).collect();
        text.push_str(&header.join(","));
        for row in &rows {
            let mut cells: Vec<String> = row.rank.iter().map(|x| x.to_string()).collect();
            cells.push(row.tau.map(|t| format!("{t:.16e}")).unwrap_or_default());
            cells.push(format!("{:.16e}", row.alpha));
            text.push('\n');
            text.push_str(&cells.join(","));
        }
        return Ok(Output::ok(text));
    }
    json_output(&json!({ "level": level, "shape": shape.block_sizes(), "rows": rows }))
}

pub fn embed(diagram: &Path, element: &Path, target: usize) -> Result<Output, CliError> {
    let diagram_file: DiagramFile = read_json(diagram, "diagram")?;
    let element_file: ElementFile = read_json(element, "element")?;
    let d = diagram_file.to_diagram()?;
    let a = element_file.to_element()?;
    let level = element_file.level;
    if level > d.depth() || target > d.depth() {
        return Err(CliError::schema(format!("levels {level} -> {target} exceed the diagram depth {}", d.depth())));
    }
    if target < level {
        return Err(CliError::schema(format!("cannot embed from level {level} up to level {target}")));
    }
    let embedded = embed_to_level(&d, &a, level, target)?;
    json_output(&ElementFile::from_element(&embedded, target))
}

pub enum Example {
    Fibonacci,
    Uhf(Vec<usize>),
}

/// Writes `diagram.json`, `scale.json` and `element.json` for a standard
/// diagram with the scale `τ^λ` of its canonical trace.
pub fn example(which: Example, depth: usize, lambda: f64, out_dir: &Path) -> Result<Output, CliError> {
    let d: BratteliDiagram = match which {
        Example::Fibonacci => fibonacci_diagram(depth)?,
        Example::Uhf(factors) => uhf_diagram(&factors, depth)?,
    };
    let state = tracial_state(&d, None)?;
    let alpha = ScaleFunction::composite(state, Transform::Power { lambda })?;

    // the projection onto the first basis vector of block 1 at level 1
    let shape = d.shape_at(1)?;
    let mut rank = shape.zero_rank();
    rank.0[0] = 1;
    let p = projection_of_rank(shape, &rank)?;
    let value = choquet_trace(&p, &alpha, 1, choquet_core::linalg::DEFAULT_TOL)?.value;

    fs::create_dir_all(out_dir).map_err(|e| CliError::domain(format!("cannot create {}: {e}", out_dir.display())))?;
    let files = [
        ("diagram.json", to_json_string(&DiagramFile::from_diagram(&d))),
        ("scale.json", to_json_string(&ScaleFile::from_scale(&alpha))),
        ("element.json", to_json_string(&ElementFile::from_element(&p, 1))),
    ];
    let mut written = serde_json::Map::new();
    for (name, text) in files {
        let path = out_dir.join(name);
        fs::write(&path, text + "\n").map_err(|e| CliError::domain(format!("cannot write {}: {e}", path.display())))?;
        written.insert(name.trim_end_matches(".json").into(), json!(path.display().to_string()));
    }
    json_output(&json!({ "files": written, "depth": d.depth(), "element_value": value }))
}

type Trace<'a> = dyn Fn(&Element) -> choquet_core::Result<f64> + 'a;

#[derive(Clone, Copy)]
pub enum TraceSource {
    Scale,
    Norm,
    Trace,
}

pub fn reconstruct(scale: Option<&Path>, shape: Option<Vec<usize>>, level: usize, source: TraceSource) -> Result<Output, CliError> {
    let scale_file = scale.map(|s| read_json::<ScaleFile>(s, "scale")).transpose()?;
    let shape = shape.map(AlgebraShape::new).transpose()?;

    // tables are taken as given: the point is to diagnose them
    let (input_table, shape) = match (&scale_file, source) {
        (Some(ScaleFile::Table { entries, .. }), TraceSource::Scale) => {
            let pairs: Vec<(RankVector, f64)> = entries.iter().map(|e| (RankVector(e.rank.clone()), e.value)).collect();
            let table = LevelScale::from_entries(&pairs)?;
            if let Some(s) = &shape {
                if s != table.shape() {
                    return Err(CliError::schema(format!("--shape {s} does not match the table shape {}", table.shape())));
                }
            }
            let shape = table.shape().clone();
            (Some(table), shape)
        }
        (Some(f @ ScaleFile::Composite { .. }), TraceSource::Scale) => {
            let shape = shape.ok_or_else(|| CliError::schema("a composite scale needs --shape"))?;
            let alpha = f.to_scale()?;
            let view = alpha.at_level(level)?;
            view.check_shape(&shape)?;
            shape.check_enumerable()?;
            let table = LevelScale::from_fn(&shape, |r| view.value(r))?;
            (Some(table), shape)
        }
        (None, TraceSource::Scale) => return Err(CliError::schema("--trace scale needs --scale")),
        (_, _) => (None, shape.ok_or_else(|| CliError::schema("--trace norm|trace needs --shape"))?),
    };
    shape.check_enumerable()?;

    let tol = choquet_core::linalg::DEFAULT_TOL;
    let phi: Box<Trace<'_>> = match (&input_table, source) {
        (Some(table), _) => {
            let view = LevelView::Table(table);
            Box::new(move |a: &Element| choquet_formula(a, &view, tol).map(|(v, _)| v))
        }
        (None, TraceSource::Norm) => Box::new(|a: &Element| a.norm()),
        (None, _) => Box::new(|a: &Element| Ok(a.block_traces().iter().sum())),
    };
    let rec = reconstruct_scale(&*phi, &shape)?;

    let table: Vec<TableEntry> = rec.table.entries().map(|(r, value)| TableEntry { rank: r.0, value }).collect();
    let max_abs_diff = input_table.as_ref().map(|t| rec.table.max_abs_diff(t)).transpose()?;
    json_output(&json!({
        "shape": shape.block_sizes(),
        "table": table,
        "max_abs_diff": max_abs_diff,
        "is_choquet_trace": rec.is_choquet_trace(),
        "diagnostic": rec.diagnostic(),
    }))
}

pub fn integrate(capacity: &Path, x: &[f64]) -> Result<Output, CliError> {
    let capacity_file: CapacityFile = read_json(capacity, "capacity")?;
    let c = capacity_file.to_capacity()?;
    let report = c.validate();
    let value = choquet_integral(&c, x)?;
    json_output(&json!({
        "value": value,
        "capacity_valid": report.is_valid(),
        "empty_set_value": report.empty_set_value,
        "monotonicity_violations": report.violations.len(),
    }))
}
