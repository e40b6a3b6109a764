//! Predefined time-evolution plots rendered as CSV + SVG.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::model::ClusterParams;
use crate::svg::{Line, LineChart};
use crate::sweep::{self, Measure, MeasureSeries, Result, SweepConfig, SweepError, TimeAxis};

/// Plot identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    F2a,
    F2b,
    F3a,
    F3b,
    F3c,
    F3d,
    F4a,
    F4b,
    F4c,
    F4d,
    F5,
}

const INTERVALS: usize = 10_000;
const LONG_INTERVALS: usize = 40_000;

impl FigureId {
    pub const ALL: [FigureId; 11] = [
        FigureId::F2a,
        FigureId::F2b,
        FigureId::F3a,
        FigureId::F3b,
        FigureId::F3c,
        FigureId::F3d,
        FigureId::F4a,
        FigureId::F4b,
        FigureId::F4c,
        FigureId::F4d,
        FigureId::F5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::F2a => "2a",
            FigureId::F2b => "2b",
            FigureId::F3a => "3a",
            FigureId::F3b => "3b",
            FigureId::F3c => "3c",
            FigureId::F3d => "3d",
            FigureId::F4a => "4a",
            FigureId::F4b => "4b",
            FigureId::F4c => "4c",
            FigureId::F4d => "4d",
            FigureId::F5 => "5",
        }
    }

    /// `J_0 / (J_z − J)` for the concurrence plots.
    pub fn ratio(self) -> Option<f64> {
        match self {
            FigureId::F2a => Some(0.3),
            FigureId::F2b => Some(10.0),
            FigureId::F3a => Some(0.01),
            FigureId::F3b => Some(0.1),
            FigureId::F3c => Some(0.9),
            FigureId::F3d => Some(0.99),
            FigureId::F4a => Some(1.0),
            FigureId::F4b => Some(2.0),
            FigureId::F4c => Some(5.0),
            FigureId::F4d => Some(20.0),
            FigureId::F5 => None,
        }
    }

    pub fn measure(self) -> Measure {
        match self {
            FigureId::F5 => Measure::EAb12,
            _ => Measure::CAb,
        }
    }

    pub fn log_base(self) -> f64 {
        match self {
            FigureId::F5 => 3.0,
            _ => 2.0,
        }
    }

    pub fn time_axis(self) -> TimeAxis {
        match self {
            FigureId::F5 => TimeAxis::J0,
            _ => TimeAxis::JzMinusJ,
        }
    }

    /// Period of the plotted series in the scaled time variable.
    pub fn period(self) -> f64 {
        match self {
            FigureId::F3a | FigureId::F3d => 200.0 * PI,
            FigureId::F2a | FigureId::F3b | FigureId::F3c => 20.0 * PI,
            _ => 2.0 * PI,
        }
    }

    /// Plotted range covers two periods.
    pub fn t_max_scaled(self) -> f64 {
        2.0 * self.period()
    }

    pub fn intervals(self) -> usize {
        match self {
            FigureId::F3a | FigureId::F3d => LONG_INTERVALS,
            _ => INTERVALS,
        }
    }

    pub fn params(self) -> ClusterParams {
        let j0 = self.ratio().unwrap_or(1.0);
        ClusterParams {
            j: 0.0,
            jz: 1.0,
            j0,
            h: 0.0,
            hp: 0.0,
        }
    }

    pub fn sweep_config(self) -> SweepConfig {
        let params = self.params();
        let scale = self.time_axis().scale(&params);
        let mut cfg = SweepConfig::new(
            params,
            self.t_max_scaled() / scale,
            self.intervals() + 1,
            vec![self.measure()],
            self.log_base(),
        );
        cfg.ratio = self.ratio();
        cfg.time_axis = self.time_axis();
        cfg.output_path = format!("fig{}.csv", self.name());
        cfg
    }

    fn title(self) -> String {
        match self.ratio() {
            Some(r) => format!("Fig. {}: central-pair concurrence, J0 = {r} (Jz - J)", self.name()),
            None => format!("Fig. {}: entropy between central and side pairs (log base 3)", self.name()),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().trim_start_matches("fig");
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| SweepError::ConfigInvalid {
                field: "figure",
                message: format!("unknown figure `{s}`"),
            })
    }
}

/// A computed figure: the main series plus dashed reference curves.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub id: FigureId,
    pub series: MeasureSeries,
    pub references: Vec<Line>,
}

pub fn compute_figure(id: FigureId) -> Result<FigureData> {
    let cfg = id.sweep_config();
    let series = sweep::run_sweep(&cfg)?.remove(0);
    let xs = series.scaled_times();
    let mut references = Vec::new();
    if matches!(id, FigureId::F2a | FigureId::F2b | FigureId::F4a | FigureId::F4b | FigureId::F4c | FigureId::F4d) {
        let mut free = cfg.clone();
        free.params.j0 = 0.0;
        free.ratio = None;
        let uncoupled = sweep::run_sweep(&free)?.remove(0);
        references.push(Line::dashed("J0 = 0", xs.clone(), uncoupled.values));
    }
    if matches!(id, FigureId::F2a | FigureId::F2b) {
        let r = id.ratio().unwrap_or(0.0);
        let envelope = xs.iter().map(|x| (r * x / 2.0).cos().powi(2)).collect();
        references.push(Line::dashed("cos^2(J0 t / 2)", xs.clone(), envelope));
    }
    Ok(FigureData { id, series, references })
}

impl FigureData {
    pub fn csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        sweep::write_csv(std::slice::from_ref(&self.series), &mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }

    pub fn svg(&self) -> String {
        let y_label = match self.id.measure() {
            Measure::CAb => "C_ab",
            _ => "E(rho_ab)",
        };
        let mut lines = vec![Line::solid(y_label, self.series.scaled_times(), self.series.values.clone())];
        lines.extend(self.references.iter().cloned());
        LineChart {
            title: self.id.title(),
            x_label: self.id.time_axis().label().into(),
            y_label: y_label.into(),
            lines,
            y_range: Some((0.0, 1.0)),
        }
        .render()
    }
}

/// Writes `fig<id>.csv` and `fig<id>.svg` into `out_dir`, returning both paths.
pub fn reproduce_figure(id: FigureId, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let data = compute_figure(id)?;
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("fig{}.csv", id.name()));
    let svg_path = out_dir.join(format!("fig{}.svg", id.name()));
    fs::write(&csv_path, data.csv()?)?;
    fs::write(&svg_path, data.svg())?;
    Ok(vec![csv_path, svg_path])
}
