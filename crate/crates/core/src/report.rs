//! Window sweeps, relation classes and the CSV/SVG outputs.

use std::fmt::{self, Write as _};
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hal::build_matrix;
use crate::preprocess::{preprocess, Label, PreprocessConfig, RawDocument};
use crate::semspace::{correlate, Axis, Orientation};

/// Inclusive window range, written `A..B` (or `N` for a single window).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowRange {
    pub start: usize,
    pub end: usize,
}

impl WindowRange {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start < 2 {
            return Err(Error::InvalidWindow(start));
        }
        if end < start {
            return Err(Error::Range(format!("empty window range {start}..{end}")));
        }
        Ok(WindowRange { start, end })
    }

    pub fn single(window: usize) -> Result<Self> {
        Self::new(window, window)
    }

    pub fn windows(&self) -> Vec<usize> {
        (self.start..=self.end).collect()
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for WindowRange {
    fn default() -> Self {
        WindowRange { start: 4, end: 10 }
    }
}

impl fmt::Display for WindowRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for WindowRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |part: &str| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::Range(format!("invalid window `{part}`")))
        };
        match s.split_once("..") {
            Some((a, b)) => WindowRange::new(num(a)?, num(b)?),
            None => WindowRange::single(num(s)?),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalysisConfig {
    pub preprocess: PreprocessConfig,
    pub axis: Axis,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointValue {
    Measured {
        cosine: f64,
        r: f64,
        degenerate: bool,
    },
    /// One or both keywords do not occur in the document.
    Absent { missing: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoint {
    pub window: usize,
    pub value: PointValue,
}

impl ProfilePoint {
    pub fn cosine(&self) -> Option<f64> {
        match self.value {
            PointValue::Measured { cosine, .. } => Some(cosine),
            PointValue::Absent { .. } => None,
        }
    }

    pub fn r(&self) -> Option<f64> {
        match self.value {
            PointValue::Measured { r, .. } => Some(r),
            PointValue::Absent { .. } => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(
            self.value,
            PointValue::Measured {
                degenerate: true,
                ..
            }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSeries {
    pub doc_id: String,
    pub label: Label,
    pub stem_a: String,
    pub stem_b: String,
    pub points: Vec<ProfilePoint>,
}

impl ProfileSeries {
    pub fn windows(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.window).collect()
    }
}

/// One correlation per window. Missing keywords become absent points.
pub fn sweep(
    doc: &RawDocument,
    stem_a: &str,
    stem_b: &str,
    windows: &[usize],
    cfg: &AnalysisConfig,
) -> Result<ProfileSeries> {
    if windows.is_empty() {
        return Err(Error::EmptyInput("window list"));
    }
    if let Some(&w) = windows.iter().find(|&&w| w < 2) {
        return Err(Error::InvalidWindow(w));
    }
    if windows.windows(2).any(|pair| pair[0] >= pair[1]) {
        return Err(Error::Range("windows must be strictly increasing".into()));
    }
    cfg.preprocess.validate()?;

    let stems = preprocess(doc, &cfg.preprocess);
    let missing: Vec<String> = [stem_a, stem_b]
        .iter()
        .filter(|s| !stems.contains(s))
        .map(|s| s.to_string())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut points = Vec::with_capacity(windows.len());
    for &window in windows {
        let value = if missing.is_empty() {
            let m = build_matrix(&stems, window)?.with_doc_id(&doc.id);
            let res = correlate(&m, stem_a, stem_b, cfg.axis, cfg.orientation)?;
            PointValue::Measured {
                cosine: res.cosine,
                r: res.r,
                degenerate: res.degenerate,
            }
        } else {
            PointValue::Absent {
                missing: missing.clone(),
            }
        };
        points.push(ProfilePoint { window, value });
    }
    Ok(ProfileSeries {
        doc_id: doc.id.clone(),
        label: doc.label,
        stem_a: stem_a.to_string(),
        stem_b: stem_b.to_string(),
        points,
    })
}

/// Sweeps every document against every pair in parallel. Output is ordered
/// by document id, then by the position of the pair in `pairs`.
pub fn sweep_corpus(
    docs: &[RawDocument],
    pairs: &[(String, String)],
    windows: &[usize],
    cfg: &AnalysisConfig,
) -> Result<Vec<ProfileSeries>> {
    let mut jobs: Vec<(&RawDocument, usize)> = docs
        .iter()
        .flat_map(|doc| (0..pairs.len()).map(move |p| (doc, p)))
        .collect();
    jobs.sort_by(|(da, pa), (db, pb)| da.id.cmp(&db.id).then(pa.cmp(pb)));
    jobs.par_iter()
        .map(|&(doc, p)| sweep(doc, &pairs[p].0, &pairs[p].1, windows, cfg))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationClass {
    /// Low similarity with strong anticorrelation, `-(A*B)`.
    Opposition,
    /// Weak anticorrelation or none.
    Weak,
    /// Correlated meanings, `(A <-> B)`.
    Equivalence,
    /// Parallel keyword vectors.
    Degenerate,
}

impl RelationClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationClass::Opposition => "opposition",
            RelationClass::Weak => "weak",
            RelationClass::Equivalence => "equivalence",
            RelationClass::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for RelationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "opposition" => Ok(RelationClass::Opposition),
            "weak" => Ok(RelationClass::Weak),
            "equivalence" => Ok(RelationClass::Equivalence),
            "degenerate" => Ok(RelationClass::Degenerate),
            other => Err(Error::Csv(format!("unknown relation class `{other}`"))),
        }
    }
}

/// Upper cosine bound of the opposition band.
pub const OPPOSITION_MAX_CS: f64 = 0.5;
/// Upper cosine bound of the weak band.
pub const WEAK_MAX_CS: f64 = 0.7;
/// Slack for the `r` side of the band checks and for range checks.
pub const BAND_TOLERANCE: f64 = 1e-6;
const RANGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: RelationClass,
    /// Set when `r` falls outside the band its cosine implies.
    pub note: Option<String>,
}

impl Classification {
    pub fn is_consistent(&self) -> bool {
        self.note.is_none()
    }
}

/// Bands are half-open upward: `cs <= 0.5`, `0.5 < cs <= 0.7`, `cs > 0.7`.
/// The class follows the cosine; an `r` outside the matching band only adds
/// a note.
pub fn classify_relation(cs: f64, r: f64) -> Result<Classification> {
    if !(-RANGE_TOLERANCE..=1.0 + RANGE_TOLERANCE).contains(&cs) {
        return Err(Error::Range(format!("cosine {cs} outside [0, 1]")));
    }
    if !(-1.0 - RANGE_TOLERANCE..=1.0 + RANGE_TOLERANCE).contains(&r) {
        return Err(Error::Range(format!("correlation {r} outside [-1, 1]")));
    }
    let (class, r_band) = if cs <= OPPOSITION_MAX_CS {
        (RelationClass::Opposition, (-1.0, -0.5))
    } else if cs <= WEAK_MAX_CS {
        (RelationClass::Weak, (-0.5, 0.0))
    } else {
        // 2cs² - 1 just above cs = 0.7 is -0.02
        (RelationClass::Equivalence, (-0.02, 1.0))
    };
    let (lo, hi) = r_band;
    let note = (r < lo - BAND_TOLERANCE || r > hi + BAND_TOLERANCE)
        .then(|| format!("r = {r:.6} outside [{lo}, {hi}] expected for cs = {cs:.6}"));
    Ok(Classification { class, note })
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRecord {
    pub doc_id: String,
    pub label: Label,
    pub stem_a: String,
    pub stem_b: String,
    pub window: usize,
    pub cosine: Option<f64>,
    pub r: Option<f64>,
    pub degenerate: bool,
    /// `None` when a keyword is absent.
    pub relation: Option<RelationClass>,
}

impl AnalysisRecord {
    pub fn is_absent(&self) -> bool {
        self.cosine.is_none()
    }
}

pub fn records_from_series(series: &ProfileSeries) -> Result<Vec<AnalysisRecord>> {
    series
        .points
        .iter()
        .map(|point| {
            let (cosine, r, degenerate, relation) = match point.value {
                PointValue::Measured {
                    cosine,
                    r,
                    degenerate: true,
                } => (Some(cosine), Some(r), true, Some(RelationClass::Degenerate)),
                PointValue::Measured { cosine, r, .. } => {
                    let class = classify_relation(cosine, r)?.class;
                    (Some(cosine), Some(r), false, Some(class))
                }
                PointValue::Absent { .. } => (None, None, false, None),
            };
            Ok(AnalysisRecord {
                doc_id: series.doc_id.clone(),
                label: series.label,
                stem_a: series.stem_a.clone(),
                stem_b: series.stem_b.clone(),
                window: point.window,
                cosine,
                r,
                degenerate,
                relation,
            })
        })
        .collect()
}

pub const CSV_HEADER: [&str; 9] = [
    "doc_id",
    "label",
    "stem_a",
    "stem_b",
    "window",
    "cosine",
    "r",
    "degenerate",
    "relation_class",
];

fn fixed6(x: Option<f64>) -> String {
    match x {
        // avoid printing "-0.000000"
        Some(v) if v.abs() < 5e-7 => format!("{:.6}", 0.0),
        Some(v) => format!("{v:.6}"),
        None => String::new(),
    }
}

/// Reals are printed with six decimals. Absent rows leave `cosine` and `r`
/// empty and use the class `absent`.
pub fn emit_csv<W: Write>(records: &[AnalysisRecord], sink: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(sink);
    out.write_record(CSV_HEADER)?;
    for rec in records {
        out.write_record([
            rec.doc_id.as_str(),
            rec.label.as_str(),
            rec.stem_a.as_str(),
            rec.stem_b.as_str(),
            &rec.window.to_string(),
            &fixed6(rec.cosine),
            &fixed6(rec.r),
            if rec.degenerate { "true" } else { "false" },
            rec.relation.map_or("absent", RelationClass::as_str),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn parse_csv<R: Read>(source: R) -> Result<Vec<AnalysisRecord>> {
    let mut reader = csv::Reader::from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Csv(format!("unexpected header {header:?}")));
    }
    let real = |field: &str| -> Result<Option<f64>> {
        if field.is_empty() {
            return Ok(None);
        }
        field
            .parse()
            .map(Some)
            .map_err(|_| Error::Csv(format!("bad number `{field}`")))
    };
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        if row.len() != CSV_HEADER.len() {
            return Err(Error::Csv(format!("expected 9 fields, got {}", row.len())));
        }
        let degenerate = match &row[7] {
            "true" => true,
            "false" => false,
            other => return Err(Error::Csv(format!("bad boolean `{other}`"))),
        };
        let relation = match &row[8] {
            "absent" => None,
            other => Some(other.parse()?),
        };
        records.push(AnalysisRecord {
            doc_id: row[0].to_string(),
            label: row[1]
                .parse()
                .map_err(|e: Error| Error::Csv(e.to_string()))?,
            stem_a: row[2].to_string(),
            stem_b: row[3].to_string(),
            window: row[4]
                .parse()
                .map_err(|_| Error::Csv(format!("bad window `{}`", &row[4])))?,
            cosine: real(&row[5])?,
            r: real(&row[6])?,
            degenerate,
            relation,
        });
    }
    Ok(records)
}

/// Largest `|r_p - r_q|` over windows where both profiles are measured;
/// infinite when there is no such window.
pub fn profile_distance(p: &ProfileSeries, q: &ProfileSeries) -> Result<f64> {
    if p.windows() != q.windows() {
        return Err(Error::Range(format!(
            "profiles cover different windows ({:?} vs {:?})",
            p.windows(),
            q.windows()
        )));
    }
    let shared: Vec<f64> = p
        .points
        .iter()
        .zip(&q.points)
        .filter_map(|(a, b)| Some((a.r()? - b.r()?).abs()))
        .collect();
    if shared.is_empty() {
        return Ok(f64::INFINITY);
    }
    Ok(shared.into_iter().fold(0.0, f64::max))
}

const SVG_WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 280.0;
const PLOT_LEFT: f64 = 60.0;
const PLOT_RIGHT: f64 = 560.0;
const PLOT_TOP: f64 = 40.0;
const PLOT_BOTTOM: f64 = 240.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Runs of consecutive measured points, as (x, y) pixel pairs.
fn segments(
    points: &[(usize, Option<f64>)],
    x_of: impl Fn(usize) -> f64,
    y_of: impl Fn(f64) -> f64,
) -> Vec<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for &(window, value) in points {
        match value {
            Some(v) => current.push((x_of(window), y_of(v))),
            None if !current.is_empty() => out.push(std::mem::take(&mut current)),
            None => {}
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// One chart per document, in the order documents first appear in `series`.
/// x is the window length, y spans [-1, 1]; cosine is drawn solid and r
/// dashed, one colour per keyword pair.
pub fn emit_svg<W: Write>(series: &[ProfileSeries], mut sink: W) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptyInput("no profiles to plot"));
    }
    let mut docs: Vec<&str> = Vec::new();
    for s in series {
        if !docs.contains(&s.doc_id.as_str()) {
            docs.push(&s.doc_id);
        }
    }

    let height = PANEL_HEIGHT * docs.len() as f64;
    let mut svg = String::new();
    // writing to a String cannot fail
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH:.0}" height="{height:.0}" viewBox="0 0 {SVG_WIDTH:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    for (panel, doc_id) in docs.iter().enumerate() {
        let members: Vec<&ProfileSeries> = series.iter().filter(|s| s.doc_id == *doc_id).collect();
        let label = members[0].label;
        let all_windows: Vec<usize> = {
            let mut w: Vec<usize> = members.iter().flat_map(|s| s.windows()).collect();
            w.sort_unstable();
            w.dedup();
            w
        };
        let (w_min, w_max) = (all_windows[0], all_windows[all_windows.len() - 1]);
        let x_of = |w: usize| {
            if w_max == w_min {
                (PLOT_LEFT + PLOT_RIGHT) / 2.0
            } else {
                PLOT_LEFT + (w - w_min) as f64 / (w_max - w_min) as f64 * (PLOT_RIGHT - PLOT_LEFT)
            }
        };
        let y_of = |v: f64| PLOT_TOP + (1.0 - v.clamp(-1.0, 1.0)) / 2.0 * (PLOT_BOTTOM - PLOT_TOP);

        let _ = writeln!(
            svg,
            r#"<g transform="translate(0,{:.0})">"#,
            PANEL_HEIGHT * panel as f64
        );
        let _ = writeln!(
            svg,
            r#"<text x="{PLOT_LEFT:.0}" y="22" font-size="14" font-weight="bold">{} ({})</text>"#,
            xml_escape(doc_id),
            label
        );
        for tick in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let y = y_of(tick);
            let stroke = if tick == 0.0 { "#999999" } else { "#e0e0e0" };
            let _ = writeln!(
                svg,
                r#"<line x1="{PLOT_LEFT:.2}" y1="{y:.2}" x2="{PLOT_RIGHT:.2}" y2="{y:.2}" stroke="{stroke}"/>"#
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{tick:.1}</text>"#,
                PLOT_LEFT - 6.0,
                y + 4.0
            );
        }
        for &w in &all_windows {
            let x = x_of(w);
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.2}" y1="{PLOT_BOTTOM:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333333"/>"##,
                PLOT_BOTTOM + 4.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{w}</text>"#,
                PLOT_BOTTOM + 16.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">window</text>"#,
            (PLOT_LEFT + PLOT_RIGHT) / 2.0,
            PLOT_BOTTOM + 32.0
        );
        let _ = writeln!(
            svg,
            r##"<rect x="{PLOT_LEFT:.2}" y="{PLOT_TOP:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333333"/>"##,
            PLOT_RIGHT - PLOT_LEFT,
            PLOT_BOTTOM - PLOT_TOP
        );

        for (idx, s) in members.iter().enumerate() {
            let colour = PALETTE[idx % PALETTE.len()];
            let cs: Vec<(usize, Option<f64>)> =
                s.points.iter().map(|p| (p.window, p.cosine())).collect();
            let r: Vec<(usize, Option<f64>)> = s.points.iter().map(|p| (p.window, p.r())).collect();
            for (values, dash) in [(&cs, ""), (&r, r#" stroke-dasharray="6 4""#)] {
                for seg in segments(values, x_of, y_of) {
                    let pts: Vec<String> =
                        seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    let _ = writeln!(
                        svg,
                        r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"{dash}/>"#,
                        pts.join(" ")
                    );
                    for (x, y) in seg {
                        let _ = writeln!(
                            svg,
                            r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{colour}"/>"#
                        );
                    }
                }
            }

            let ly = PLOT_TOP + 8.0 + 36.0 * idx as f64;
            let lx = PLOT_RIGHT + 16.0;
            let pair = xml_escape(&format!("{}/{}", s.stem_a, s.stem_b));
            let absent = s.points.iter().all(|p| p.cosine().is_none());
            let _ = writeln!(
                svg,
                r#"<text x="{lx:.2}" y="{ly:.2}" fill="{colour}" font-weight="bold">{pair}{}</text>"#,
                if absent { " (absent)" } else { "" }
            );
            for (row, (name, dash)) in [("cs", ""), ("r", r#" stroke-dasharray="6 4""#)]
                .iter()
                .enumerate()
            {
                let y = ly + 12.0 * (row + 1) as f64;
                let _ = writeln!(
                    svg,
                    r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2"{dash}/>"#,
                    y - 4.0,
                    lx + 24.0,
                    y - 4.0
                );
                let _ = writeln!(
                    svg,
                    r#"<text x="{:.2}" y="{y:.2}">{name}</text>"#,
                    lx + 30.0
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</svg>");
    sink.write_all(svg.as_bytes())?;
    Ok(())
}
