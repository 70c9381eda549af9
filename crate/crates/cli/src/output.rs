//! Text, CSV and JSON rendering of command results.

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::ValueEnum;
use dctprune::{DcConvention, OpCount, QualityReport, Transform};
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

pub struct Out {
    format: Format,
    timestamp: bool,
    dest: Option<PathBuf>,
}

fn db(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".into()
    } else {
        format!("{v:.4}")
    }
}

fn opt4(v: Option<f64>) -> String {
    v.map(|s| format!("{s:.4}")).unwrap_or_default()
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Space-aligned columns.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(header.to_vec());
    for r in rows {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    s
}

#[derive(Serialize)]
struct ImageReport<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    image: Option<&'a str>,
    #[serde(flatten)]
    report: &'a QualityReport,
}

impl Out {
    pub fn new(format: Option<Format>, no_timestamp: bool, dest: Option<PathBuf>) -> Self {
        Out { format: format.unwrap_or(Format::Text), timestamp: !no_timestamp, dest }
    }

    fn emit(&self, s: &str) -> Result<()> {
        match &self.dest {
            Some(p) => std::fs::write(p, s).with_context(|| format!("writing {}", p.display())),
            None => {
                print!("{s}");
                Ok(())
            }
        }
    }

    fn emit_json(&self, mut body: Map<String, Value>) -> Result<()> {
        if self.timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            body.insert("generated_unix".into(), json!(secs));
        }
        self.emit(&(serde_json::to_string_pretty(&Value::Object(body))? + "\n"))
    }

    fn emit_rows(&self, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        match self.format {
            Format::Csv => self.emit(&csv_string(header, rows)?),
            _ => self.emit(&table(header, rows)),
        }
    }

    pub fn quality_rows(&self, rows: &[(Option<String>, QualityReport)]) -> Result<()> {
        if self.format == Format::Json {
            let list: Vec<ImageReport> =
                rows.iter().map(|(i, r)| ImageReport { image: i.as_deref(), report: r }).collect();
            let mut body = Map::new();
            body.insert("rows".into(), serde_json::to_value(list)?);
            return self.emit_json(body);
        }
        let with_image = rows.iter().any(|(i, _)| i.is_some());
        let mut header = vec!["transform", "K", "quality", "psnr_db", "ssim", "adds_2d", "shifts_2d", "mults_2d"];
        if with_image {
            header.push("image");
        }
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|(img, r)| {
                let mut c = vec![
                    r.transform.clone(),
                    r.prune_k.to_string(),
                    r.quality.to_string(),
                    db(r.psnr_db),
                    opt4(r.ssim),
                    r.op_count_2d.adds.to_string(),
                    r.op_count_2d.shifts.to_string(),
                    r.op_count_2d.mults.to_string(),
                ];
                if with_image {
                    c.push(img.clone().unwrap_or_default());
                }
                c
            })
            .collect();
        self.emit_rows(&header, &cells)
    }

    pub fn energy(&self, t: &Transform, k: usize, images: usize, rows: &[(DcConvention, f64)]) -> Result<()> {
        match self.format {
            Format::Json => {
                let mut ratios = Map::new();
                for (c, v) in rows {
                    ratios.insert(c.name().into(), json!(v));
                }
                let mut body = Map::new();
                body.insert("transform".into(), json!(t.name()));
                body.insert("K".into(), json!(k));
                body.insert("images".into(), json!(images));
                body.insert("energy_ratio".into(), Value::Object(ratios));
                self.emit_json(body)
            }
            Format::Csv => {
                let cells: Vec<Vec<String>> = rows
                    .iter()
                    .map(|(c, v)| vec![t.name(), k.to_string(), c.name().into(), format!("{v:.6}"), images.to_string()])
                    .collect();
                self.emit_rows(&["transform", "K", "convention", "energy_ratio", "images"], &cells)
            }
            Format::Text => {
                let mut s = format!("{} K={k} over {images} image(s)\n", t.name());
                for (c, v) in rows {
                    s.push_str(&format!("  {:<14} {:.6}  ({:.3}%)\n", c.name(), v, 100.0 * v));
                }
                self.emit(&s)
            }
        }
    }

    pub fn complexity(&self, rows: &[(String, usize, OpCount, OpCount)]) -> Result<()> {
        if self.format == Format::Json {
            let list: Vec<Value> = rows
                .iter()
                .map(|(n, k, a, b)| json!({"transform": n, "K": k, "op_count_1d": a, "op_count_2d": b}))
                .collect();
            let mut body = Map::new();
            body.insert("rows".into(), Value::Array(list));
            return self.emit_json(body);
        }
        if self.format == Format::Text {
            let cells: Vec<Vec<String>> =
                rows.iter().map(|(n, k, a, b)| vec![n.clone(), k.to_string(), a.to_string(), b.to_string()]).collect();
            return self.emit_rows(&["transform", "K", "1-D mult/add/shift", "2-D mult/add/shift"], &cells);
        }
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|(n, k, a, b)| {
                let counts = [a.mults, a.adds, a.shifts, b.mults, b.adds, b.shifts].map(|v| v.to_string());
                [n.clone(), k.to_string()].into_iter().chain(counts).collect()
            })
            .collect();
        self.emit_rows(
            &["transform", "K", "mults_1d", "adds_1d", "shifts_1d", "mults_2d", "adds_2d", "shifts_2d"],
            &cells,
        )
    }

    pub fn transform_output(
        &self,
        t: &Transform,
        x: &[f64],
        unscaled: &[f64],
        exact: Option<&[String]>,
        scaled: &[f64],
    ) -> Result<()> {
        match self.format {
            Format::Json => {
                let mut body = Map::new();
                body.insert("transform".into(), json!(t.name()));
                body.insert("K".into(), json!(t.prune_k()));
                body.insert("input".into(), json!(x));
                body.insert("unscaled".into(), json!(unscaled));
                if let Some(e) = exact {
                    body.insert("unscaled_exact".into(), json!(e));
                }
                body.insert("scaled".into(), json!(scaled));
                self.emit_json(body)
            }
            Format::Csv => {
                let cells: Vec<Vec<String>> = (0..unscaled.len())
                    .map(|i| vec![i.to_string(), format!("{}", unscaled[i]), format!("{}", scaled[i])])
                    .collect();
                self.emit_rows(&["index", "unscaled", "scaled"], &cells)
            }
            Format::Text => {
                let join = |v: Vec<String>| v.join(", ");
                let t_x = match exact {
                    Some(e) => join(e.to_vec()),
                    None => join(unscaled.iter().map(|v| format!("{v}")).collect()),
                };
                let s = format!(
                    "{} K={}\nx   = [{}]\nT·x = [{}]\nĈ·x = [{}]\n",
                    t.name(),
                    t.prune_k(),
                    join(x.iter().map(|v| format!("{v}")).collect()),
                    t_x,
                    join(scaled.iter().map(|v| format!("{v:.6}")).collect()),
                );
                self.emit(&s)
            }
        }
    }

    pub fn transform_matrix(&self, t: &Transform) -> Result<()> {
        let (rows, scaling): (Vec<Vec<String>>, String) = match t {
            Transform::Exact(c) => {
                (c.rows().iter().map(|r| r.iter().map(|v| format!("{v:.6}")).collect()).collect(), "identity".into())
            }
            Transform::Approx { spec, .. } => (
                spec.matrix.row_iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
                spec.scaling.to_string(),
            ),
        };
        let values = t.scaling();
        match self.format {
            Format::Json => {
                let mut body = Map::new();
                body.insert("transform".into(), json!(t.name()));
                body.insert("K".into(), json!(t.prune_k()));
                body.insert("matrix".into(), json!(rows));
                body.insert("scaling".into(), json!(scaling));
                body.insert("scaling_values".into(), json!(values));
                body.insert("op_count_1d".into(), json!(t.op_count_1d()));
                body.insert("op_count_2d".into(), json!(t.op_count_2d()));
                self.emit_json(body)
            }
            Format::Csv => {
                let cells: Vec<Vec<String>> = rows
                    .iter()
                    .zip(&values)
                    .enumerate()
                    .map(|(i, (r, s))| {
                        let mut c = vec![i.to_string()];
                        c.extend(r.iter().cloned());
                        c.push(format!("{s}"));
                        c
                    })
                    .collect();
                self.emit_rows(&["row", "c0", "c1", "c2", "c3", "c4", "c5", "c6", "c7", "scale"], &cells)
            }
            Format::Text => {
                let mut s = format!("{} K={}\nS = {scaling}\n", t.name(), t.prune_k());
                let header: Vec<String> = (0..8).map(|i| format!("c{i}")).collect();
                let header: Vec<&str> = header.iter().map(String::as_str).collect();
                s.push_str(&table(&header, &rows));
                s.push_str(&format!("ops 1-D {}  2-D {}\n", t.op_count_1d(), t.op_count_2d()));
                self.emit(&s)
            }
        }
    }
}
