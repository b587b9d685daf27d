use std::io::Write;
use std::path::{Path, PathBuf};

use hpspline::fit::{default_knots, max_relative_residual};
use hpspline::grid::linspace;
use hpspline::scenario::{Scenario, ScenarioResult};
use hpspline::{
    effective_df, fit_on_grid, fit_report, select_lambda, FitProblem, FitReport, HpSplineModel,
    KnotGrid, LambdaSearchSpec, SelectionMethod,
};
use serde_json::{json, Map, Value};

use crate::dataset::read_dataset;
use crate::error::{CliError, CliResult};
use crate::model_file::ModelFile;
use crate::output::{num, sibling, write_atomic, Table, TableFormat};
use crate::{DemoArgs, EvalArgs, FitArgs, Method};

fn stdout_error(source: std::io::Error) -> CliError {
    CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

/// Key/value report, printed as JSON or as `key,value` lines.
fn render_report(report: &Map<String, Value>, format: TableFormat) -> String {
    match format {
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        TableFormat::Csv => {
            let mut s = String::from("key,value\n");
            for (k, v) in report {
                let text = match v {
                    Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), num),
                    Value::String(t) => t.clone(),
                    Value::Null => String::new(),
                    other => other.to_string(),
                };
                s.push_str(&format!("{k},{text}\n"));
            }
            s
        }
    }
}

fn report_fields(report: &FitReport, problem: &FitProblem, fitted: &[f64]) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("alpha".into(), json!(report.alpha));
    map.insert("lambda".into(), json!(report.lambda));
    map.insert("n".into(), json!(report.n));
    map.insert("m".into(), json!(problem.len()));
    map.insert("rss".into(), json!(report.rss));
    map.insert("max_abs_residual".into(), json!(report.max_abs_residual));
    map.insert(
        "max_relative_residual".into(),
        json!(max_relative_residual(problem.values(), fitted)),
    );
    map.insert("moment0_discrepancy".into(), json!(report.moment0_discrepancy));
    map.insert("moment0_relative".into(), json!(report.moment0_relative));
    map.insert("moment1_discrepancy".into(), json!(report.moment1_discrepancy));
    map.insert("moment1_relative".into(), json!(report.moment1_relative));
    map
}

fn fitted_table(problem: &FitProblem, fitted: &[f64]) -> Table {
    let residual = problem.values().iter().zip(fitted).map(|(y, f)| y - f).collect();
    Table::new(
        vec!["x", "y", "fitted", "residual"],
        vec![problem.sites().to_vec(), problem.values().to_vec(), fitted.to_vec(), residual],
    )
}

fn curve_table(model: &HpSplineModel, points: usize) -> CliResult<Table> {
    let grid = model.grid();
    let x = linspace(grid.a(), grid.b(), points);
    let s = model.predict(&x)?;
    Ok(Table::new(vec!["x", "s"], vec![x, s]))
}

fn method(m: Method) -> SelectionMethod {
    match m {
        Method::Gcv => SelectionMethod::Gcv,
        Method::Lcurve => SelectionMethod::LCurve,
        Method::Discrepancy => SelectionMethod::Discrepancy,
    }
}

pub fn cmd_fit(args: &FitArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.grid_points < 2 {
        return Err(CliError::Usage("--grid-points must be at least 2".into()));
    }
    let problem = read_dataset(&args.input)?;
    let (a, b) = problem.domain();
    let n = args.knots.unwrap_or_else(|| default_knots(problem.len()));
    let grid = KnotGrid::new(a, b, n)?;

    let (lambda, selected_by) = match (args.lambda, args.select) {
        (Some(l), _) => (l, None),
        (None, Some(m)) => {
            let spec = LambdaSearchSpec::with_default_grid(method(m), args.noise_level)?;
            (select_lambda(&problem, &grid, args.alpha, &spec)?.lambda, Some(m))
        }
        (None, None) => (1.0, None),
    };

    let model = fit_on_grid(&problem, &grid, args.alpha, lambda)?;
    let fitted = model.predict(problem.sites())?;
    let report = fit_report(&model, &problem)?;

    let model_path = args
        .output
        .clone()
        .unwrap_or_else(|| sibling(&args.input, "model", "json"));
    let ext = args.format.extension();
    let fitted_path = sibling(&model_path, "fitted", ext);
    let dense_path = sibling(&model_path, "dense", ext);

    ModelFile::from_model(&model).save(&model_path)?;
    write_atomic(&fitted_path, fitted_table(&problem, &fitted).render(args.format).as_bytes())?;
    write_atomic(&dense_path, curve_table(&model, args.grid_points)?.render(args.format).as_bytes())?;

    let mut fields = report_fields(&report, &problem, &fitted);
    if let Some(m) = selected_by {
        fields.insert("selected_by".into(), json!(m.name()));
    }
    fields.insert("effective_df".into(), json!(effective_df(&problem, &grid, args.alpha, lambda)?));
    if let Some(c) = model.diagnostics().condition_estimate {
        fields.insert("condition_estimate".into(), json!(c));
    }
    fields.insert("model".into(), json!(model_path.display().to_string()));
    fields.insert("fitted_table".into(), json!(fitted_path.display().to_string()));
    fields.insert("dense_table".into(), json!(dense_path.display().to_string()));
    out.write_all(render_report(&fields, args.format).as_bytes())
        .map_err(stdout_error)
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = ModelFile::load(&args.model)?.to_model()?;
    let sites = match (&args.at, args.grid) {
        (Some(at), _) => at.clone(),
        (None, Some(count)) if count >= 2 => linspace(model.grid().a(), model.grid().b(), count),
        (None, Some(_)) => return Err(CliError::Usage("--grid needs at least 2 points".into())),
        (None, None) => return Err(CliError::Usage("either --at or --grid is required".into())),
    };
    let values = model.predict(&sites)?;
    let text = Table::new(vec!["x", "s"], vec![sites, values]).to_csv();
    match &args.output {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => out.write_all(text.as_bytes()).map_err(stdout_error),
    }
}

/// Files written by one demo panel, relative to the output directory.
#[derive(Debug, Clone)]
pub struct DemoFiles {
    pub data: PathBuf,
    pub hp_curve: PathBuf,
    pub pspline_curve: PathBuf,
    pub true_curve: PathBuf,
    pub report: PathBuf,
}

impl DemoFiles {
    pub fn for_panel(figure: u8, panel: u8) -> Self {
        let name = |suffix: &str| PathBuf::from(format!("fig{figure}_panel{panel}_{suffix}"));
        Self {
            data: name("data.csv"),
            hp_curve: name("hp.csv"),
            pspline_curve: name("pspline.csv"),
            true_curve: name("true.csv"),
            report: name("report.json"),
        }
    }

    pub fn all(&self) -> [&Path; 5] {
        [&self.data, &self.hp_curve, &self.pspline_curve, &self.true_curve, &self.report]
    }
}

fn demo_report(result: &ScenarioResult, seed: u64, files: &DemoFiles) -> CliResult<Map<String, Value>> {
    let s = &result.scenario;
    let fitted = result.model.predict(result.problem.sites())?;
    let pfitted = result.pspline.predict(result.problem.sites())?;
    let file = |p: &Path| json!(p.display().to_string());

    let mut map = Map::new();
    map.insert("figure".into(), json!(s.figure));
    map.insert("panel".into(), json!(s.panel));
    map.insert("function".into(), json!(s.function.label()));
    map.insert("caption_alpha".into(), json!(s.caption_alpha));
    map.insert("alpha".into(), json!(s.alpha));
    map.insert("sigma".into(), json!(s.sigma));
    map.insert("lambda".into(), json!(s.lambda));
    map.insert("seed".into(), json!(seed));
    map.insert("sites".into(), json!(s.sites));
    map.insert("knots".into(), json!(s.knots));
    map.insert("interval".into(), json!([s.interval.0, s.interval.1]));
    map.insert("hp_spline".into(), Value::Object(report_fields(&result.report, &result.problem, &fitted)));
    map.insert(
        "p_spline".into(),
        Value::Object(report_fields(&result.pspline_report, &result.problem, &pfitted)),
    );
    map.insert(
        "files".into(),
        json!({
            "data": file(&files.data),
            "hp_curve": file(&files.hp_curve),
            "pspline_curve": file(&files.pspline_curve),
            "true_curve": file(&files.true_curve),
        }),
    );
    Ok(map)
}

/// Runs one figure panel and writes its tables into `outdir`.
pub fn write_demo(figure: u8, panel: u8, seed: u64, outdir: &Path) -> CliResult<(ScenarioResult, DemoFiles)> {
    let scenario = Scenario::panel(figure, panel)?;
    let result = scenario.run(seed)?;
    std::fs::create_dir_all(outdir).map_err(|source| CliError::Write {
        path: outdir.to_path_buf(),
        source,
    })?;
    let files = DemoFiles::for_panel(figure, panel);
    let truth: Vec<f64> = result
        .problem
        .sites()
        .iter()
        .map(|&x| scenario.function.eval(x))
        .collect();
    let data = Table::new(
        vec!["x", "y", "truth"],
        vec![result.problem.sites().to_vec(), result.problem.values().to_vec(), truth],
    );
    let curve = |values: &[f64]| Table::new(vec!["x", "s"], vec![result.curve_x.clone(), values.to_vec()]);

    write_atomic(&outdir.join(&files.data), data.to_csv().as_bytes())?;
    write_atomic(&outdir.join(&files.hp_curve), curve(&result.hp_curve).to_csv().as_bytes())?;
    write_atomic(&outdir.join(&files.pspline_curve), curve(&result.pspline_curve).to_csv().as_bytes())?;
    write_atomic(&outdir.join(&files.true_curve), curve(&result.true_curve).to_csv().as_bytes())?;
    let report = render_report(&demo_report(&result, seed, &files)?, TableFormat::Json);
    write_atomic(&outdir.join(&files.report), report.as_bytes())?;
    Ok((result, files))
}

pub fn cmd_demo(args: &DemoArgs, out: &mut dyn Write) -> CliResult<()> {
    let (_, files) = write_demo(args.figure, args.panel, args.seed, &args.outdir)?;
    let report = std::fs::read(args.outdir.join(&files.report)).map_err(|source| CliError::Read {
        path: files.report.clone(),
        source,
    })?;
    out.write_all(&report).map_err(stdout_error)
}
