//! Time sweeps of entanglement measures along the +x trajectory.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closed_form::{self, ClosedFormError, ClosedFormTerms};
use crate::linalg::C64;
use crate::measures::{self, Bipartition, MeasureError};
use crate::model::{self, ClusterParams, EigenTable, Site, StateVector};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid config field `{field}`: {message}")]
    ConfigInvalid { field: &'static str, message: String },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl SweepError {
    fn config(field: &'static str, message: impl Into<String>) -> Self {
        SweepError::ConfigInvalid {
            field,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SweepError>;

/// Quantities that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Concurrence of the central pair.
    CAb,
    /// Entropy between the central pair and the side pair.
    #[serde(rename = "e_ab_12")]
    EAb12,
    /// Entropy of spin `a` against the rest.
    EA,
    /// Entropy of spin `1` against the rest.
    #[serde(rename = "e_1")]
    E1,
    /// Entanglement of formation of the central pair (bits).
    EofAb,
    /// Entanglement of formation of the side pair (bits).
    #[serde(rename = "eof_12")]
    Eof12,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::CAb,
        Measure::EAb12,
        Measure::EA,
        Measure::E1,
        Measure::EofAb,
        Measure::Eof12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::CAb => "c_ab",
            Measure::EAb12 => "e_ab_12",
            Measure::EA => "e_a",
            Measure::E1 => "e_1",
            Measure::EofAb => "eof_ab",
            Measure::Eof12 => "eof_12",
        }
    }

    /// Largest value the measure can take.
    pub fn upper_bound(self, log_base: f64) -> f64 {
        match self {
            Measure::CAb | Measure::EofAb | Measure::Eof12 => 1.0,
            Measure::EAb12 => 4f64.ln() / log_base.ln(),
            Measure::EA | Measure::E1 => 2f64.ln() / log_base.ln(),
        }
    }

    fn uses_log_base(self) -> bool {
        matches!(self, Measure::EAb12 | Measure::EA | Measure::E1)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| SweepError::config("measures", format!("unknown measure `{s}`")))
    }
}

/// Scaling applied to `t` in outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeAxis {
    /// Plain `t`.
    #[default]
    T,
    /// `(J_z − J)·t`.
    JzMinusJ,
    /// `J_0·t`.
    J0,
}

impl TimeAxis {
    pub fn scale(self, p: &ClusterParams) -> f64 {
        match self {
            TimeAxis::T => 1.0,
            TimeAxis::JzMinusJ => p.anisotropy(),
            TimeAxis::J0 => p.j0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TimeAxis::T => "t",
            TimeAxis::JzMinusJ => "(Jz - J) t",
            TimeAxis::J0 => "J0 t",
        }
    }
}

impl FromStr for TimeAxis {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" => Ok(TimeAxis::T),
            "jz_minus_j" => Ok(TimeAxis::JzMinusJ),
            "j0" => Ok(TimeAxis::J0),
            other => Err(SweepError::config("time_axis", format!("unknown time axis `{other}`"))),
        }
    }
}

/// Flat JSON layout of a sweep configuration; every field optional so that
/// files and command-line flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfigFile {
    pub j: Option<f64>,
    pub jz: Option<f64>,
    pub j0: Option<f64>,
    pub h: Option<f64>,
    pub hp: Option<f64>,
    pub ratio: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub measures: Option<Vec<Measure>>,
    pub log_base: Option<f64>,
    pub output_path: Option<String>,
    pub time_axis: Option<TimeAxis>,
    pub compare_closed_form: Option<bool>,
}

impl SweepConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SweepError::config("config", e.to_string()))
    }

    /// Applies `overrides` on top of `self`. Setting one of `j0`/`ratio` in the
    /// override layer clears the other from the base layer.
    pub fn merge(mut self, overrides: SweepConfigFile) -> Self {
        if overrides.j0.is_some() {
            self.ratio = None;
        }
        if overrides.ratio.is_some() {
            self.j0 = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if overrides.$f.is_some() { self.$f = overrides.$f; } )* };
        }
        take!(j, jz, j0, h, hp, ratio, t_max, steps, measures, log_base, output_path, time_axis, compare_closed_form);
        self
    }

    pub fn resolve(self) -> Result<SweepConfig> {
        if self.j0.is_some() && self.ratio.is_some() {
            return Err(SweepError::config("ratio", "`ratio` and `j0` are mutually exclusive"));
        }
        let j = self.j.unwrap_or(0.0);
        let jz = self.jz.unwrap_or(1.0);
        let j0 = match self.ratio {
            Some(r) => r * (jz - j),
            None => self.j0.unwrap_or(0.0),
        };
        let params = ClusterParams {
            j,
            jz,
            j0,
            h: self.h.unwrap_or(0.0),
            hp: self.hp.unwrap_or(0.0),
        };
        let cfg = SweepConfig {
            params,
            ratio: self.ratio,
            t_max: self.t_max.unwrap_or(4.0 * std::f64::consts::PI),
            steps: self.steps.unwrap_or(1001),
            measures: self.measures.unwrap_or_else(|| vec![Measure::CAb]),
            log_base: self.log_base.unwrap_or(2.0),
            output_path: self.output_path.unwrap_or_else(|| "sweep.csv".into()),
            time_axis: self.time_axis.unwrap_or_default(),
            compare_closed_form: self.compare_closed_form.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A validated sweep request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    /// Couplings with `j0` already resolved from `ratio` when given.
    pub params: ClusterParams,
    /// `J_0 / (J_z − J)` when the coupling was specified as a ratio.
    pub ratio: Option<f64>,
    pub t_max: f64,
    /// Number of grid points, endpoints included.
    pub steps: usize,
    pub measures: Vec<Measure>,
    pub log_base: f64,
    pub output_path: String,
    pub time_axis: TimeAxis,
    /// Also evaluate the closed-form expressions and record the deviation.
    pub compare_closed_form: bool,
}

impl SweepConfig {
    pub fn new(params: ClusterParams, t_max: f64, steps: usize, measures: Vec<Measure>, log_base: f64) -> Self {
        Self {
            params,
            ratio: None,
            t_max,
            steps,
            measures,
            log_base,
            output_path: "sweep.csv".into(),
            time_axis: TimeAxis::T,
            compare_closed_form: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        for (name, v) in [("j", p.j), ("jz", p.jz), ("j0", p.j0), ("h", p.h), ("hp", p.hp)] {
            if !v.is_finite() {
                return Err(SweepError::config(name, format!("must be finite, got {v}")));
            }
        }
        if let Some(r) = self.ratio {
            if !r.is_finite() {
                return Err(SweepError::config("ratio", format!("must be finite, got {r}")));
            }
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(SweepError::config("t_max", format!("must be positive, got {}", self.t_max)));
        }
        if self.steps < 2 {
            return Err(SweepError::config("steps", format!("need at least 2 grid points, got {}", self.steps)));
        }
        if self.measures.is_empty() {
            return Err(SweepError::config("measures", "at least one measure is required"));
        }
        if !(self.log_base.is_finite() && self.log_base > 1.0) {
            return Err(SweepError::config("log_base", format!("must exceed 1, got {}", self.log_base)));
        }
        if self.time_axis.scale(p) == 0.0 {
            return Err(SweepError::config("time_axis", "the chosen time scale is zero for these couplings"));
        }
        Ok(())
    }

    /// Uniform grid over `[0, t_max]`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps).map(|i| self.t_max * i as f64 / n as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesMeta {
    pub params: ClusterParams,
    pub log_base: f64,
    pub time_axis: TimeAxis,
    pub time_scale: f64,
}

/// Samples of one measure on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSeries {
    pub measure: Measure,
    /// Unscaled times.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: SeriesMeta,
    /// Largest |pipeline − closed form| when a comparison was requested.
    pub closed_form_max_deviation: Option<f64>,
}

impl MeasureSeries {
    pub fn scaled_times(&self) -> Vec<f64> {
        self.times.iter().map(|t| t * self.meta.time_scale).collect()
    }

    pub fn within_bounds(&self, tol: f64) -> bool {
        let hi = self.measure.upper_bound(self.meta.log_base);
        self.values.iter().all(|&v| v >= -tol && v <= hi + tol)
    }
}

/// Evaluates measures along the +x trajectory through the closed-form eigensystem.
#[derive(Debug, Clone)]
pub struct Trajectory {
    params: ClusterParams,
    table: EigenTable,
    coeffs: Vec<C64>,
}

impl Trajectory {
    pub fn new(params: &ClusterParams) -> Self {
        Self::with_table(params, model::analytic_eigensystem(params))
    }

    pub fn with_table(params: &ClusterParams, table: EigenTable) -> Self {
        let coeffs = model::decompose(&model::initial_plus_x(), &table);
        Self {
            params: *params,
            table,
            coeffs,
        }
    }

    pub fn params(&self) -> &ClusterParams {
        &self.params
    }

    pub fn state(&self, t: f64) -> StateVector {
        model::evolve_coefficients(&self.coeffs, &self.table, t)
    }

    /// `measure` of the evolved state through reduce → measure.
    pub fn measure(&self, measure: Measure, t: f64, log_base: f64) -> std::result::Result<f64, MeasureError> {
        measure_state(&self.state(t), measure, log_base)
    }
}

/// `measure` of an arbitrary cluster state.
pub fn measure_state(state: &StateVector, measure: Measure, log_base: f64) -> std::result::Result<f64, MeasureError> {
    use measures::{concurrence_mixed, eof_two_qubit, reduce, vn_entropy};
    match measure {
        Measure::CAb => Ok(concurrence_mixed(&reduce(state, &Bipartition::central_pair())?)?.value),
        Measure::EAb12 => vn_entropy(&reduce(state, &Bipartition::central_pair())?, log_base),
        Measure::EA => vn_entropy(&reduce(state, &Bipartition::single(Site::A))?, log_base),
        Measure::E1 => vn_entropy(&reduce(state, &Bipartition::single(Site::One))?, log_base),
        Measure::EofAb => eof_two_qubit(&reduce(state, &Bipartition::central_pair())?),
        Measure::Eof12 => eof_two_qubit(&reduce(state, &Bipartition::side_pair())?),
    }
}

/// The same measure from the closed-form layer.
pub fn measure_closed_form(p: &ClusterParams, measure: Measure, t: f64, log_base: f64) -> Result<f64> {
    let terms = ClosedFormTerms::new(p, t);
    let two_level = |(a, b): (f64, f64)| measures::entropy_of_spectrum(&[a, b], log_base);
    Ok(match measure {
        Measure::CAb => closed_form::concurrence_ab_closed(&terms)?,
        Measure::EAb12 => closed_form::entropy_ab12_closed(&terms, log_base)?,
        Measure::EA => two_level(closed_form::lambda_pm_spin_a(p, t)),
        Measure::E1 => two_level(closed_form::lambda_pm_spin_1(p, t)),
        Measure::EofAb => {
            measures::eof_from_concurrence(closed_form::concurrence_ab_closed(&terms)?.clamp(0.0, 1.0))?
        }
        Measure::Eof12 => 0.0,
    })
}

/// Evaluates every requested measure on the uniform grid.
///
/// Grid points are evaluated in parallel; results are assembled in time order,
/// so the output does not depend on the number of workers.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<MeasureSeries>> {
    cfg.validate()?;
    let trajectory = Trajectory::new(&cfg.params);
    let grid = cfg.grid();

    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&t| {
            let state = trajectory.state(t);
            cfg.measures
                .iter()
                .map(|&m| measure_state(&state, m, cfg.log_base))
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<_, _>>()?;

    let deviations: Option<Vec<f64>> = if cfg.compare_closed_form {
        let closed: Vec<Vec<f64>> = grid
            .par_iter()
            .map(|&t| {
                cfg.measures
                    .iter()
                    .map(|&m| measure_closed_form(&cfg.params, m, t, cfg.log_base))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Some(
            (0..cfg.measures.len())
                .map(|k| {
                    rows.iter()
                        .zip(&closed)
                        .map(|(a, b)| (a[k] - b[k]).abs())
                        .fold(0.0, f64::max)
                })
                .collect(),
        )
    } else {
        None
    };

    let meta = SeriesMeta {
        params: cfg.params,
        log_base: cfg.log_base,
        time_axis: cfg.time_axis,
        time_scale: cfg.time_axis.scale(&cfg.params),
    };
    Ok(cfg
        .measures
        .iter()
        .enumerate()
        .map(|(k, &measure)| MeasureSeries {
            measure,
            times: grid.clone(),
            values: rows.iter().map(|r| r[k]).collect(),
            meta: SeriesMeta {
                log_base: if measure.uses_log_base() { cfg.log_base } else { 2.0 },
                ..meta.clone()
            },
            closed_form_max_deviation: deviations.as_ref().map(|d| d[k]),
        })
        .collect())
}

/// Formats a value with 17 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes series sharing one time grid as `t_scaled,<measure>...` CSV.
pub fn write_csv<W: Write>(series: &[MeasureSeries], mut w: W) -> Result<()> {
    let first = series
        .first()
        .ok_or_else(|| SweepError::Csv("no series to write".into()))?;
    if series.iter().any(|s| s.times != first.times || s.meta.time_scale != first.meta.time_scale) {
        return Err(SweepError::Csv("series do not share a time grid".into()));
    }
    let mut header = String::from("t_scaled");
    for s in series {
        header.push(',');
        header.push_str(s.measure.name());
    }
    writeln!(w, "{header}")?;
    for (i, t) in first.scaled_times().iter().enumerate() {
        let mut line = format_value(*t);
        for s in series {
            line.push(',');
            line.push_str(&format_value(s.values[i]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Parsed CSV: column names and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.header
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }
}

pub fn read_csv<R: BufRead>(r: R) -> Result<CsvTable> {
    let mut lines = r.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| SweepError::Csv("empty input".into()))??
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut columns = vec![Vec::new(); header.len()];
    for (n, line) in lines.enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(SweepError::Csv(format!("row {} has {} fields", n + 2, fields.len())));
        }
        for (col, f) in columns.iter_mut().zip(fields) {
            col.push(
                f.parse()
                    .map_err(|_| SweepError::Csv(format!("row {}: bad number `{f}`", n + 2)))?,
            );
        }
    }
    Ok(CsvTable { header, columns })
}
