//! Plain-text fit reports: a `key = value` header followed by CSV blocks
//! introduced by `[name]` lines.
//!
//! Floats are written in Rust's shortest round-trip form, so `parse`
//! recovers them exactly and a model read back from a report evaluates
//! identically to the original.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::BernsteinPHModel;
use crate::optimizer::Fit;

const MAGIC: &str = "# mable fit report";

#[derive(Debug, Clone, PartialEq)]
pub struct FitDocument {
    pub model: BernsteinPHModel,
    pub loglik: f64,
    pub kkt_residual: f64,
    pub converged: bool,
    pub outer_iters: usize,
    pub fixed_point_iters: usize,
    pub newton_iters: usize,
    pub standard_errors: Option<Vec<f64>>,
    pub loglik_trace: Vec<f64>,
}

impl FitDocument {
    pub fn from_fit(fit: &Fit) -> Self {
        let r = &fit.report;
        Self {
            model: fit.model.clone(),
            loglik: r.loglik(),
            kkt_residual: r.kkt_residual,
            converged: r.converged,
            outer_iters: r.outer_iters,
            fixed_point_iters: r.fixed_point_iters,
            newton_iters: r.newton_iters,
            standard_errors: r.standard_errors.clone(),
            loglik_trace: r.loglik_trace.clone(),
        }
    }

    pub fn render(&self) -> String {
        let m = &self.model;
        let mut s = format!("{MAGIC}\n");
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        kv("m", m.m.to_string());
        kv("has_tail", m.has_tail.to_string());
        kv("tau", num(m.tau));
        kv("dim", m.dim().to_string());
        kv("x0", join(&m.x0));
        kv("loglik", num(self.loglik));
        kv("kkt_residual", num(self.kkt_residual));
        kv("converged", self.converged.to_string());
        kv("outer_iters", self.outer_iters.to_string());
        kv("fixed_point_iters", self.fixed_point_iters.to_string());
        kv("newton_iters", self.newton_iters.to_string());

        if m.dim() > 0 {
            s.push_str("\n[gamma]\nindex,estimate,std_error\n");
            for (j, g) in m.gamma.iter().enumerate() {
                let se = self.standard_errors.as_ref().map_or(String::new(), |v| num(v[j]));
                s.push_str(&format!("{},{},{se}\n", j + 1, num(*g)));
            }
        }
        s.push_str("\n[p]\nindex,weight\n");
        for (i, p) in m.p.iter().enumerate() {
            s.push_str(&format!("{i},{}\n", num(*p)));
        }
        s.push_str("\n[loglik_trace]\niteration,loglik\n");
        for (i, v) in self.loglik_trace.iter().enumerate() {
            s.push_str(&format!("{i},{}\n", num(*v)));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(MAGIC) {
            return Err(Error::Data(format!("not a fit report: first line must be '{MAGIC}'")));
        }
        let mut header = BTreeMap::new();
        let mut blocks: BTreeMap<String, String> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (k, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                current = Some(name.to_string());
                blocks.insert(name.to_string(), String::new());
                continue;
            }
            match &current {
                Some(name) => {
                    let block = blocks.get_mut(name).expect("block registered");
                    block.push_str(line);
                    block.push('\n');
                }
                None => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| Error::Data(format!("report line {}: expected 'key = value'", k + 2)))?;
                    header.insert(key.trim().to_string(), value.trim().to_string());
                }
            }
        }

        let get = |key: &str| header.get(key).ok_or_else(|| Error::Data(format!("report is missing '{key}'")));
        let m: usize = parse_value(get("m")?, "m")?;
        let has_tail: bool = parse_value(get("has_tail")?, "has_tail")?;
        let tau: f64 = parse_value(get("tau")?, "tau")?;
        let dim: usize = parse_value(get("dim")?, "dim")?;
        let x0 = split_floats(get("x0")?, "x0")?;

        let p_rows = rows(&blocks, "p", 2)?;
        let p = p_rows.iter().map(|r| r[1].parse_f64("p")).collect::<Result<Vec<_>>>()?;
        let (gamma, standard_errors) = if dim > 0 {
            let g_rows = rows(&blocks, "gamma", 3)?;
            let gamma = g_rows.iter().map(|r| r[1].parse_f64("gamma")).collect::<Result<Vec<_>>>()?;
            let se = if g_rows.iter().all(|r| !r[2].0.is_empty()) {
                Some(g_rows.iter().map(|r| r[2].parse_f64("std_error")).collect::<Result<Vec<_>>>()?)
            } else {
                None
            };
            (gamma, se)
        } else {
            (vec![], None)
        };
        if gamma.len() != dim || x0.len() != dim {
            return Err(Error::Data(format!("report declares dim = {dim} but gamma/x0 disagree")));
        }
        let loglik_trace = match blocks.contains_key("loglik_trace") {
            true => rows(&blocks, "loglik_trace", 2)?
                .iter()
                .map(|r| r[1].parse_f64("loglik_trace"))
                .collect::<Result<Vec<_>>>()?,
            false => vec![],
        };
        let model = BernsteinPHModel::new(m, has_tail, p, gamma, x0, tau)?;
        Ok(Self {
            model,
            loglik: parse_value(get("loglik")?, "loglik")?,
            kkt_residual: parse_value(get("kkt_residual")?, "kkt_residual")?,
            converged: parse_value(get("converged")?, "converged")?,
            outer_iters: parse_value(get("outer_iters")?, "outer_iters")?,
            fixed_point_iters: parse_value(get("fixed_point_iters")?, "fixed_point_iters")?,
            newton_iters: parse_value(get("newton_iters")?, "newton_iters")?,
            standard_errors,
            loglik_trace,
        })
    }
}

pub(crate) fn num(v: f64) -> String {
    format!("{v:?}")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

fn parse_value<T: std::str::FromStr>(s: &str, key: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Data(format!("report field '{key}': cannot parse '{s}'")))
}

fn split_floats(s: &str, key: &str) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',').map(|v| parse_value(v.trim(), key)).collect()
}

struct Field(String);

impl Field {
    fn parse_f64(&self, block: &str) -> Result<f64> {
        parse_value(&self.0, block)
    }
}

fn rows(blocks: &BTreeMap<String, String>, name: &str, width: usize) -> Result<Vec<Vec<Field>>> {
    let text = blocks.get(name).ok_or_else(|| Error::Data(format!("report has no [{name}] block")))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Data(format!("[{name}] block: {e}")))?;
        if record.len() != width {
            return Err(Error::Data(format!("[{name}] block: expected {width} columns, got {}", record.len())));
        }
        out.push(record.iter().map(|f| Field(f.to_string())).collect());
    }
    Ok(out)
}
