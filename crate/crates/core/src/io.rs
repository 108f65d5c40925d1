//! Loaders for the site, edge and polygon files and writers for datasets and
//! reports.
//!
//! Sites and edges are header-bearing CSV (`id,x,y,<attr>...` and
//! `from,to,length,cost`). Polygons are a JSON array of
//! `{"id", "rings", "attributes"}` records where the first ring is the
//! exterior and the rest are holes.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{ring_problem, Attributes, Edge, Point, PointSite, PolygonSite, SiteId};
use crate::detect::{ComparisonReport, DetectionResult};
use crate::error::{Error, Result};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn csv_error(label: &Path, err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line());
    Error::parse(label, line, err.to_string())
}

fn parse_number(label: &Path, line: u64, column: &str, raw: &str) -> Result<f64> {
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(
            label,
            Some(line),
            format!("column {column}: {raw:?} is not a finite number"),
        )),
    }
}

pub fn load_sites(path: &Path) -> Result<Vec<PointSite>> {
    read_sites(open(path)?, path)
}

/// Parses point sites from CSV text; `label` names the source in errors.
pub fn read_sites<R: Read>(reader: R, label: &Path) -> Result<Vec<PointSite>> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(label, e))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < 3 || cols[..3] != ["id", "x", "y"] {
        return Err(Error::parse(
            label,
            Some(1),
            "missing header: expected id,x,y followed by attribute columns",
        ));
    }
    let attrs = &cols[3..];
    let mut unique = HashSet::new();
    if let Some(dup) = attrs.iter().find(|a| !unique.insert(**a)) {
        return Err(Error::parse(
            label,
            Some(1),
            format!("duplicate column {dup}"),
        ));
    }

    let mut seen = HashSet::new();
    let mut sites = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(label, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let id = &record[0];
        if id.is_empty() {
            return Err(Error::parse(label, Some(line), "empty site id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::parse(
                label,
                Some(line),
                format!("duplicate site id {id}"),
            ));
        }
        let x = parse_number(label, line, "x", &record[1])?;
        let y = parse_number(label, line, "y", &record[2])?;
        let mut attributes = Attributes::new();
        for (i, name) in attrs.iter().enumerate() {
            attributes.insert(
                name.to_string(),
                parse_number(label, line, name, &record[3 + i])?,
            );
        }
        sites.push(PointSite::new(id, x, y, attributes));
    }
    Ok(sites)
}

pub fn load_edges(path: &Path) -> Result<Vec<Edge>> {
    read_edges(open(path)?, path)
}

pub fn read_edges<R: Read>(reader: R, label: &Path) -> Result<Vec<Edge>> {
    const COLUMNS: [&str; 4] = ["from", "to", "length", "cost"];
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(label, e))?.clone();
    if let Some(unknown) = header.iter().find(|c| !COLUMNS.contains(c)) {
        return Err(Error::parse(
            label,
            Some(1),
            format!("unknown column {unknown:?}"),
        ));
    }
    let mut index = [0usize; 4];
    for (slot, name) in index.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::parse(label, Some(1), format!("missing column {name}")))?;
    }
    if header.len() != COLUMNS.len() {
        return Err(Error::parse(label, Some(1), "duplicate column"));
    }

    let mut edges = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(label, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let (from, to) = (&record[index[0]], &record[index[1]]);
        if from.is_empty() || to.is_empty() {
            return Err(Error::parse(label, Some(line), "empty endpoint id"));
        }
        let length = parse_number(label, line, "length", &record[index[2]])?;
        let cost = parse_number(label, line, "cost", &record[index[3]])?;
        if length <= 0.0 {
            return Err(Error::parse(
                label,
                Some(line),
                format!("length {length} must be positive"),
            ));
        }
        if cost < 0.0 {
            return Err(Error::parse(
                label,
                Some(line),
                format!("cost {cost} must not be negative"),
            ));
        }
        edges.push(Edge::new(from, to, length, cost));
    }
    Ok(edges)
}

#[derive(Serialize, Deserialize)]
struct PolygonRecord {
    id: SiteId,
    rings: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    attributes: BTreeMap<String, f64>,
}

pub fn load_polygons(path: &Path) -> Result<Vec<PolygonSite>> {
    read_polygons(open(path)?, path)
}

pub fn read_polygons<R: Read>(reader: R, label: &Path) -> Result<Vec<PolygonSite>> {
    let records: Vec<PolygonRecord> = serde_json::from_reader(reader)
        .map_err(|e| Error::parse(label, Some(e.line() as u64), e.to_string()))?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(records.len());
    for (i, rec) in records.into_iter().enumerate() {
        let err =
            |msg: String| Error::parse(label, None, format!("record {i} (id {}): {msg}", rec.id));
        if rec.id.as_str().is_empty() {
            return Err(err("empty id".into()));
        }
        if !seen.insert(rec.id.clone()) {
            return Err(err("duplicate id".into()));
        }
        if rec.rings.is_empty() {
            return Err(err("no rings".into()));
        }
        if let Some((name, _)) = rec.attributes.iter().find(|(_, v)| !v.is_finite()) {
            return Err(err(format!("attribute {name} is not finite")));
        }
        let mut rings = rec
            .rings
            .iter()
            .map(|r| r.iter().map(|&[x, y]| Point::new(x, y)).collect::<Vec<_>>());
        let exterior = rings.next().unwrap_or_default();
        let polygon = PolygonSite::new(
            rec.id.clone(),
            exterior,
            rings.collect(),
            rec.attributes.clone(),
        );
        for (r, ring) in polygon.rings().enumerate() {
            if let Some(problem) = ring_problem(ring) {
                return Err(err(format!("ring {r}: {problem}")));
            }
        }
        out.push(polygon);
    }
    Ok(out)
}

/// Writes sites as CSV with the given attribute columns.
pub fn write_sites<W: Write>(
    sites: &[PointSite],
    attribute_names: &[String],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string(), "x".into(), "y".into()];
    header.extend(attribute_names.iter().cloned());
    w.write_record(&header).map_err(csv_write)?;
    for s in sites {
        let mut row = vec![
            s.id.to_string(),
            s.location.x.to_string(),
            s.location.y.to_string(),
        ];
        for name in attribute_names {
            row.push(
                s.attributes
                    .get(name)
                    .map(f64::to_string)
                    .unwrap_or_default(),
            );
        }
        w.write_record(&row).map_err(csv_write)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_edges<W: Write>(edges: &[Edge], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["from", "to", "length", "cost"])
        .map_err(csv_write)?;
    for e in edges {
        w.write_record([
            e.from.to_string(),
            e.to.to_string(),
            e.length.to_string(),
            e.cost.to_string(),
        ])
        .map_err(csv_write)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes polygons as a JSON array, one record per line.
pub fn write_polygons<W: Write>(polygons: &[PolygonSite], mut out: W) -> Result<()> {
    writeln!(out, "[")?;
    for (i, p) in polygons.iter().enumerate() {
        let rec = PolygonRecord {
            id: p.id.clone(),
            rings: p
                .rings()
                .map(|r| r.iter().map(|pt| [pt.x, pt.y]).collect())
                .collect(),
            attributes: p.attributes.clone(),
        };
        let sep = if i + 1 < polygons.len() { "," } else { "" };
        writeln!(
            out,
            "{}{sep}",
            serde_json::to_string(&rec).map_err(json_write)?
        )?;
    }
    writeln!(out, "]")?;
    Ok(())
}

fn csv_write(e: csv::Error) -> Error {
    Error::Write(std::io::Error::other(e))
}

fn json_write(e: serde_json::Error) -> Error {
    Error::Write(std::io::Error::other(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Detection(&'a DetectionResult),
    Comparison(&'a ComparisonReport),
}

/// Writes `report` to `path`, or to stdout when `path` is `None`.
pub fn write_report(report: Report<'_>, format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            render_report(report, format, &mut w)?;
            w.flush().map_err(|source| Error::Io {
                path: PathBuf::from(p),
                source,
            })
        }
        None => render_report(report, format, std::io::stdout().lock()),
    }
}

pub fn render_report<W: Write>(report: Report<'_>, format: Format, out: W) -> Result<()> {
    match (report, format) {
        (Report::Detection(r), Format::Csv) => detection_csv(r, out),
        (Report::Detection(r), Format::Json) => detection_json(r, out),
        (Report::Comparison(r), Format::Csv) => comparison_csv(r, out),
        (Report::Comparison(r), Format::Json) => comparison_json(r, out),
    }
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn by_z(result: &DetectionResult) -> Vec<&crate::detect::SiteScore> {
    let mut rows: Vec<_> = result.scores.iter().collect();
    rows.sort_by(|a, b| a.z.total_cmp(&b.z).then_with(|| a.site.cmp(&b.site)));
    rows
}

fn skipped_line(skipped: &[SiteId]) -> String {
    let ids: Vec<String> = skipped.iter().map(SiteId::to_string).collect();
    format!("# skipped: {}", ids.join(" "))
}

fn detection_csv<W: Write>(result: &DetectionResult, mut out: W) -> Result<()> {
    writeln!(out, "site_id,actual,expected,diff,z,outlier")?;
    for s in by_z(result) {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_field(s.site.as_str()),
            fixed(s.actual),
            fixed(s.expected),
            fixed(s.diff),
            fixed(s.z),
            s.is_outlier
        )?;
    }
    if !result.skipped.is_empty() {
        writeln!(out, "{}", skipped_line(&result.skipped))?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct ScoreRow<'a> {
    site_id: &'a SiteId,
    actual: f64,
    expected: f64,
    diff: f64,
    z: f64,
    outlier: bool,
}

#[derive(Serialize)]
struct DetectionDoc<'a> {
    attribute: &'a str,
    mu: f64,
    sigma: f64,
    theta: f64,
    scores: Vec<ScoreRow<'a>>,
    skipped: &'a [SiteId],
}

fn detection_json<W: Write>(result: &DetectionResult, mut out: W) -> Result<()> {
    let doc = DetectionDoc {
        attribute: &result.attribute,
        mu: round6(result.mu),
        sigma: round6(result.sigma),
        theta: result.theta,
        scores: by_z(result)
            .into_iter()
            .map(|s| ScoreRow {
                site_id: &s.site,
                actual: round6(s.actual),
                expected: round6(s.expected),
                diff: round6(s.diff),
                z: round6(s.z),
                outlier: s.is_outlier,
            })
            .collect(),
        skipped: &result.skipped,
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(json_write)?;
    writeln!(out)?;
    Ok(())
}

fn opt_fixed(v: Option<f64>) -> String {
    v.map(fixed).unwrap_or_default()
}

fn comparison_csv<W: Write>(report: &ComparisonReport, mut out: W) -> Result<()> {
    writeln!(
        out,
        "site_id,actual,expected_classical,expected_weighted,sq_error_classical,sq_error_weighted,sq_error_delta,improvement_pct"
    )?;
    for s in &report.per_site {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(s.site.as_str()),
            fixed(s.actual),
            fixed(s.expected_classical),
            fixed(s.expected_weighted),
            fixed(s.sq_error_classical),
            fixed(s.sq_error_weighted),
            fixed(s.sq_error_delta),
            opt_fixed(s.improvement_pct)
        )?;
    }
    writeln!(
        out,
        "# mean_improvement_pct: {}",
        opt_fixed(report.mean_improvement_pct)
    )?;
    writeln!(
        out,
        "# mean_sq_error_reduction_pct: {}",
        opt_fixed(report.mean_sq_error_reduction_pct)
    )?;
    if !report.skipped.is_empty() {
        writeln!(out, "{}", skipped_line(&report.skipped))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ComparisonRow<'a> {
    site_id: &'a SiteId,
    actual: f64,
    expected_classical: f64,
    expected_weighted: f64,
    sq_error_classical: f64,
    sq_error_weighted: f64,
    sq_error_delta: f64,
    improvement_pct: Option<f64>,
}

#[derive(Serialize)]
struct ComparisonDoc<'a> {
    attribute: &'a str,
    per_site: Vec<ComparisonRow<'a>>,
    mean_improvement_pct: Option<f64>,
    mean_sq_error_reduction_pct: Option<f64>,
    skipped: &'a [SiteId],
}

fn comparison_json<W: Write>(report: &ComparisonReport, mut out: W) -> Result<()> {
    let doc = ComparisonDoc {
        attribute: &report.attribute,
        per_site: report
            .per_site
            .iter()
            .map(|s| ComparisonRow {
                site_id: &s.site,
                actual: round6(s.actual),
                expected_classical: round6(s.expected_classical),
                expected_weighted: round6(s.expected_weighted),
                sq_error_classical: round6(s.sq_error_classical),
                sq_error_weighted: round6(s.sq_error_weighted),
                sq_error_delta: round6(s.sq_error_delta),
                improvement_pct: s.improvement_pct.map(round6),
            })
            .collect(),
        mean_improvement_pct: report.mean_improvement_pct.map(round6),
        mean_sq_error_reduction_pct: report.mean_sq_error_reduction_pct.map(round6),
        skipped: &report.skipped,
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(json_write)?;
    writeln!(out)?;
    Ok(())
}
