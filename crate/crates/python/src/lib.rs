//! Python bindings for the crosspanel pipeline.
//!
//! Exposes panels, the synthetic generator, correlation scans, the 66-column
//! feature grid, quantile labeling, the two classifiers, and the
//! cross-validated experiment runner. Configs and reports cross the boundary
//! as JSON strings; dates as ISO `YYYY-MM-DD` strings.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use crosspanel::correlation;
use crosspanel::date::DateRange;
use crosspanel::error::Error;
use crosspanel::eval;
use crosspanel::features;
use crosspanel::ingest;
use crosspanel::labeling::{self, PredictionTask, QuantileScheme, SchemeMode};
use crosspanel::learn;
use crosspanel::panel::{ActivityType, FillPolicy, VendorPanel};
use crosspanel::synth;
use crosspanel::Date;

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::Io(_) => PyIOError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn parse_date(text: &str) -> PyResult<Date> {
    text.parse()
        .map_err(|_| PyValueError::new_err(format!("invalid date {text:?}, expected YYYY-MM-DD")))
}

fn parse_type(text: &str) -> PyResult<ActivityType> {
    text.parse().map_err(to_py_err)
}

fn parse_range(start: &str, end: &str) -> PyResult<DateRange> {
    DateRange::new(parse_date(start)?, parse_date(end)?).map_err(to_py_err)
}

fn epoch_range() -> DateRange {
    let day = Date::from_ymd_opt(1970, 1, 1).unwrap();
    DateRange::new(day, day).unwrap()
}

/// Six aligned daily activity series for one vendor.
#[pyclass(frozen)]
struct Panel {
    inner: VendorPanel,
}

#[pymethods]
impl Panel {
    #[getter]
    fn vendor_id(&self) -> &str {
        self.inner.vendor_id()
    }

    #[getter]
    fn category(&self) -> &str {
        self.inner.category()
    }

    #[getter]
    fn start_date(&self) -> String {
        self.inner.start_date().to_string()
    }

    #[getter]
    fn end_date(&self) -> String {
        self.inner.end_date().to_string()
    }

    fn len_days(&self) -> usize {
        self.inner.len_days()
    }

    /// Daily counts of one stream (`post`, `repost`, `comment`, `search`,
    /// `clickthrough`, `order`).
    fn series(&self, activity_type: &str) -> PyResult<Vec<u64>> {
        Ok(self
            .inner
            .series(parse_type(activity_type)?)
            .values()
            .to_vec())
    }

    fn slice(&self, start: &str, end: &str) -> PyResult<Panel> {
        let range = parse_range(start, end)?;
        Ok(Panel {
            inner: self.inner.slice(&range).map_err(to_py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Panel(vendor_id={:?}, category={:?}, days={})",
            self.inner.vendor_id(),
            self.inner.category(),
            self.inner.len_days()
        )
    }
}

/// A trained forest or logistic model.
#[pyclass(frozen)]
struct Model {
    inner: learn::TrainedModel,
}

#[pymethods]
impl Model {
    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    #[getter]
    fn classes(&self) -> usize {
        self.inner.classes
    }

    /// Predicts `(class, probabilities)` for one feature row.
    fn predict(&self, row: Vec<f64>) -> PyResult<(usize, Vec<f64>)> {
        self.inner.predict_row(&row).map_err(to_py_err)
    }

    fn feature_importance(&self) -> Vec<f64> {
        self.inner.feature_importance()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py_err)
    }

    #[staticmethod]
    fn from_json(json: &str) -> PyResult<Model> {
        Ok(Model {
            inner: learn::TrainedModel::from_json(json).map_err(to_py_err)?,
        })
    }
}

/// Generates one synthetic panel from a SynthConfig JSON string.
#[pyfunction]
fn generate_panel(config_json: &str) -> PyResult<Panel> {
    let config: synth::SynthConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(Panel {
        inner: synth::generate(&config).map_err(to_py_err)?,
    })
}

/// Generates a vendor fleet from a FleetConfig JSON string.
#[pyfunction]
fn generate_fleet(config_json: &str) -> PyResult<Vec<Panel>> {
    let config: synth::FleetConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(synth::generate_fleet(&config)
        .map_err(to_py_err)?
        .into_iter()
        .map(|inner| Panel { inner })
        .collect())
}

/// Loads panels from a canonical-schema CSV (zero-fill policy).
#[pyfunction]
fn load_panels(path: &str) -> PyResult<Vec<Panel>> {
    let (panels, _) =
        ingest::ingest_csv(path, &ingest::LoadOptions::default(), FillPolicy::ZeroFill)
            .map_err(to_py_err)?;
    Ok(panels.into_values().map(|inner| Panel { inner }).collect())
}

/// Pearson correlation; `None` when either input has zero variance.
#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<Option<f64>> {
    correlation::pearson(&x, &y).map_err(to_py_err)
}

/// Median of pairwise slopes.
#[pyfunction]
fn theil_sen(values: Vec<f64>) -> PyResult<f64> {
    features::theil_sen(&values).map_err(to_py_err)
}

/// Next-day correlation cells as `(sma, epa, r_or_None)` triples.
#[pyfunction]
fn next_day_matrix(panel: &Panel) -> PyResult<Vec<(String, String, Option<f64>)>> {
    let matrix = correlation::next_day_matrix(&panel.inner).map_err(to_py_err)?;
    let mut cells = Vec::with_capacity(9);
    for (r, &sma) in matrix.rows.iter().enumerate() {
        for (c, &epa) in matrix.cols.iter().enumerate() {
            cells.push((sma.to_string(), epa.to_string(), matrix.cells[r][c]));
        }
    }
    Ok(cells)
}

/// Rolling correlation points as `(end_date, r_or_None)` pairs.
#[pyfunction]
fn rolling(
    panel: &Panel,
    sma: &str,
    epa: &str,
    window_days: usize,
    lag_days: usize,
) -> PyResult<Vec<(String, Option<f64>)>> {
    let series = correlation::rolling(
        panel.inner.series(parse_type(sma)?),
        panel.inner.series(parse_type(epa)?),
        window_days,
        lag_days,
    )
    .map_err(to_py_err)?;
    Ok(series
        .points
        .into_iter()
        .map(|(date, r)| (date.to_string(), r))
        .collect())
}

/// Per-lag mean coefficients plus the best lag:
/// `(best_lag_or_None, [(lag, mean_or_None), ...])`.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn lag_scan(
    panel: &Panel,
    sma: &str,
    epa: &str,
    window_days: usize,
    max_lag: usize,
) -> PyResult<(Option<usize>, Vec<(usize, Option<f64>)>)> {
    let scan = correlation::lag_scan(
        panel.inner.series(parse_type(sma)?),
        panel.inner.series(parse_type(epa)?),
        window_days,
        max_lag,
    )
    .map_err(to_py_err)?;
    let means = scan.entries.iter().map(|e| (e.lag, e.mean)).collect();
    Ok((scan.best_lag, means))
}

/// The canonical 66 feature names.
#[pyfunction]
fn feature_names() -> Vec<String> {
    features::feature_names().to_vec()
}

/// The 66 features of `panel` at prediction day `t_p`.
#[pyfunction]
fn build_features(panel: &Panel, t_p: &str) -> PyResult<Vec<f64>> {
    Ok(features::build_features(&panel.inner, parse_date(t_p)?)
        .map_err(to_py_err)?
        .values()
        .to_vec())
}

/// Sum of an EPA stream over the `horizon_days` after `t_p`.
#[pyfunction]
fn cumulative_target(panel: &Panel, epa: &str, t_p: &str, horizon_days: u32) -> PyResult<f64> {
    labeling::cumulative_target(
        panel.inner.series(parse_type(epa)?),
        parse_date(t_p)?,
        horizon_days,
    )
    .map_err(to_py_err)
}

/// Quantile thresholds fitted on training targets.
#[pyfunction]
fn fit_quantiles(training_targets: Vec<f64>, q: usize) -> PyResult<Vec<f64>> {
    Ok(QuantileScheme::fit(&training_targets, q, epoch_range())
        .map_err(to_py_err)?
        .thresholds)
}

/// Class of `value` under thresholds fitted on `training_targets`.
#[pyfunction]
fn quantile_label(training_targets: Vec<f64>, q: usize, value: f64) -> PyResult<usize> {
    let scheme = QuantileScheme::fit(&training_targets, q, epoch_range()).map_err(to_py_err)?;
    Ok(scheme.assign_label(value))
}

/// Builds a labeled dataset over `[start, end]`:
/// `(feature_rows, target_values, labels, thresholds)`.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn build_dataset(
    panel: &Panel,
    epa: &str,
    horizon_days: u32,
    q: usize,
    start: &str,
    end: &str,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>, Vec<usize>, Vec<f64>)> {
    let task = PredictionTask::new(parse_type(epa)?, horizon_days, q).map_err(to_py_err)?;
    let range = parse_range(start, end)?;
    let dataset =
        labeling::build_dataset(&panel.inner, &task, &range, SchemeMode::Fit).map_err(to_py_err)?;
    let rows = dataset
        .examples
        .iter()
        .map(|e| e.features.values().to_vec())
        .collect();
    let targets = dataset.examples.iter().map(|e| e.target_value).collect();
    let labels = dataset.examples.iter().map(|e| e.label).collect();
    Ok((rows, targets, labels, dataset.scheme.thresholds))
}

/// Trains a random forest; `config_json` overrides the defaults.
#[pyfunction]
#[pyo3(signature = (x, y, q, config_json=None))]
fn train_forest(
    x: Vec<Vec<f64>>,
    y: Vec<usize>,
    q: usize,
    config_json: Option<&str>,
) -> PyResult<Model> {
    let config: learn::ForestConfig = match config_json {
        Some(json) => {
            serde_json::from_str(json).map_err(|e| PyValueError::new_err(e.to_string()))?
        }
        None => Default::default(),
    };
    Ok(Model {
        inner: learn::train_forest(&x, &y, q, &config).map_err(to_py_err)?,
    })
}

/// Trains a multinomial logistic regression; `config_json` overrides the
/// defaults.
#[pyfunction]
#[pyo3(signature = (x, y, q, config_json=None))]
fn train_logistic(
    x: Vec<Vec<f64>>,
    y: Vec<usize>,
    q: usize,
    config_json: Option<&str>,
) -> PyResult<Model> {
    let config: learn::LogisticConfig = match config_json {
        Some(json) => {
            serde_json::from_str(json).map_err(|e| PyValueError::new_err(e.to_string()))?
        }
        None => Default::default(),
    };
    Ok(Model {
        inner: learn::train_logistic(&x, &y, q, &config).map_err(to_py_err)?,
    })
}

/// The 12 sliding folds over `[start, end]` as
/// `(train_start, train_end, test_start, test_end)` tuples.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn make_folds(start: &str, end: &str) -> PyResult<Vec<(String, String, String, String)>> {
    let folds = eval::make_folds(&parse_range(start, end)?).map_err(to_py_err)?;
    Ok(folds
        .into_iter()
        .map(|f| {
            (
                f.train.start.to_string(),
                f.train.end.to_string(),
                f.test.start.to_string(),
                f.test.end.to_string(),
            )
        })
        .collect())
}

/// Runs the cross-validated experiment grid; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (panels, config_json=None))]
fn run_experiment(panels: Vec<PyRef<Panel>>, config_json: Option<&str>) -> PyResult<String> {
    let config: eval::ExperimentConfig = match config_json {
        Some(json) => {
            serde_json::from_str(json).map_err(|e| PyValueError::new_err(e.to_string()))?
        }
        None => Default::default(),
    };
    let owned: Vec<VendorPanel> = panels.iter().map(|p| p.inner.clone()).collect();
    let report = eval::run_experiment(&owned, &config).map_err(to_py_err)?;
    report.to_json().map_err(to_py_err)
}

/// Paired two-sided t-test; returns `(t, p)`.
#[pyfunction]
fn paired_t_test(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64)> {
    let result = eval::paired_t_test(&a, &b).map_err(to_py_err)?;
    Ok((result.t, result.p))
}

/// `1/q`, the uniform random per-class precision baseline.
#[pyfunction]
fn random_baseline(q: usize) -> f64 {
    eval::random_baseline(q)
}

#[pymodule]
fn crosspanel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Panel>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(generate_panel, m)?)?;
    m.add_function(wrap_pyfunction!(generate_fleet, m)?)?;
    m.add_function(wrap_pyfunction!(load_panels, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(theil_sen, m)?)?;
    m.add_function(wrap_pyfunction!(next_day_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(rolling, m)?)?;
    m.add_function(wrap_pyfunction!(lag_scan, m)?)?;
    m.add_function(wrap_pyfunction!(feature_names, m)?)?;
    m.add_function(wrap_pyfunction!(build_features, m)?)?;
    m.add_function(wrap_pyfunction!(cumulative_target, m)?)?;
    m.add_function(wrap_pyfunction!(fit_quantiles, m)?)?;
    m.add_function(wrap_pyfunction!(quantile_label, m)?)?;
    m.add_function(wrap_pyfunction!(build_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(train_forest, m)?)?;
    m.add_function(wrap_pyfunction!(train_logistic, m)?)?;
    m.add_function(wrap_pyfunction!(make_folds, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(paired_t_test, m)?)?;
    m.add_function(wrap_pyfunction!(random_baseline, m)?)?;
    Ok(())
}
