use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::construction::Regime;
use crate::error::{Error, Result};

/// Column order of the sweep CSV.
pub const CSV_HEADER: &str =
    "regime,N,delta,q,c,t0,norm_u0,norm_U0,norm_U1,norm_u,norm_U2,ratio,grid_n,seconds,seed";

/// One row of an inflation sweep. Norms are `Ḃ^{−1/2}_{4,q}`; rows rejected
/// for resources leave every norm empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub regime: Regime,
    #[serde(rename = "N")]
    pub n: u32,
    pub delta: f64,
    pub q: f64,
    pub c: u32,
    pub t0: f64,
    pub norm_u0: Option<f64>,
    #[serde(rename = "norm_U0")]
    pub norm_big_u0: Option<f64>,
    #[serde(rename = "norm_U1")]
    pub norm_big_u1: Option<f64>,
    pub norm_u: Option<f64>,
    #[serde(rename = "norm_U2")]
    pub norm_big_u2: Option<f64>,
    pub ratio: Option<f64>,
    /// `"nx"` for square grids, `"nxXny"` otherwise; empty when rejected.
    pub grid_n: String,
    pub seconds: Option<f64>,
    pub seed: u64,
}

impl SweepRecord {
    pub fn rejected(&self) -> bool {
        self.norm_u0.is_none()
    }

    /// `‖u‖ ≥ ‖U₁‖ − ‖U₀‖ − ‖U₂‖ − tol`; `None` without solver columns.
    pub fn triangle_holds(&self, tol: f64) -> Option<bool> {
        let (u, u0, u1, u2) = (self.norm_u?, self.norm_big_u0?, self.norm_big_u1?, self.norm_big_u2?);
        Some(u >= u1 - u0 - u2 - tol)
    }
}

pub fn grid_label(nx: usize, ny: usize) -> String {
    if nx == ny {
        nx.to_string()
    } else {
        format!("{nx}x{ny}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

/// Column plotted by the SVG output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    NormU0,
    NormBigU0,
    NormBigU1,
    NormU,
    NormBigU2,
    Ratio,
}

impl Column {
    pub fn get(self, r: &SweepRecord) -> Option<f64> {
        match self {
            Column::NormU0 => r.norm_u0,
            Column::NormBigU0 => r.norm_big_u0,
            Column::NormBigU1 => r.norm_big_u1,
            Column::NormU => r.norm_u,
            Column::NormBigU2 => r.norm_big_u2,
            Column::Ratio => r.ratio,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Column::NormU0 => "norm_u0",
            Column::NormBigU0 => "norm_U0",
            Column::NormBigU1 => "norm_U1",
            Column::NormU => "norm_u",
            Column::NormBigU2 => "norm_U2",
            Column::Ratio => "ratio",
        }
    }
}

impl std::str::FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Column::NormU0, Column::NormBigU0, Column::NormBigU1, Column::NormU, Column::NormBigU2, Column::Ratio]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown column {s:?}")))
    }
}

pub fn to_csv_string(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::InvalidArgument(format!("unexpected CSV header {:?}", header.join(","))));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Log-log scatter of `column` against `N`, one series per regime.
pub fn to_svg(records: &[SweepRecord], column: Column) -> Result<String> {
    let pts: Vec<(Regime, f64, f64)> = records
        .iter()
        .filter_map(|r| column.get(r).filter(|v| *v > 0.0).map(|v| (r.regime, r.n as f64, v)))
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidArgument(format!("no positive {} values to plot", column.name())));
    }
    let (w, h, m) = (640.0, 420.0, 60.0);
    let lx: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.2.ln()).collect();
    let span = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        }
    };
    let (x0, x1) = span(&lx);
    let (y0, y1) = span(&ly);
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{} H{}" fill="none" stroke="black"/>"#,
        h - m,
        w - m
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">N (log scale)</text>"#,
        w / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" font-size="14" transform="rotate(-90 15 {})" text-anchor="middle">{} (log scale)</text>"#,
        h / 2.0,
        h / 2.0,
        column.name()
    );
    let mut ns: Vec<u32> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for n in ns {
        let x = sx((n as f64).ln());
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle" font-size="11">{n}</text>"#,
            h - m + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{:.3e}</text>"#,
        m - 4.0,
        sy(y0) ,
        y0.exp()
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{:.3e}</text>"#,
        m - 4.0,
        sy(y1) + 10.0,
        y1.exp()
    );
    for (regime, color) in [(Regime::Qlt2, "#1f77b4"), (Regime::Qgt2, "#d62728")] {
        let series: Vec<(f64, f64)> = pts
            .iter()
            .filter(|p| p.0 == regime)
            .map(|p| (sx(p.1.ln()), sy(p.2.ln())))
            .collect();
        if series.is_empty() {
            continue;
        }
        let path: Vec<String> = series.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}"/>"#,
            path.join(" ")
        );
        for (x, y) in &series {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}" font-size="12">{regime}</text>"#,
            w - m - 40.0,
            if regime == Regime::Qlt2 { m } else { m + 16.0 }
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes `records` to `path`; SVG plots `column`.
pub fn emit(records: &[SweepRecord], format: Format, column: Column, path: &Path) -> Result<()> {
    let text = match format {
        Format::Csv => to_csv_string(records)?,
        Format::Svg => {
            if records.is_empty() {
                return Err(Error::InvalidArgument("cannot plot an empty table".into()));
            }
            to_svg(records, column)?
        }
    };
    std::fs::write(path, text)?;
    Ok(())
}
