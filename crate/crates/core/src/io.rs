//! CSV readers for observation files and covariate lists.
//!
//! Observation files carry a header `y1,y2,delta[,x1,...,xd]`. A blank `y2`
//! or the literal `inf` stands for `+∞` (right censoring).

use crate::error::{Error, Result};
use crate::model::Observation;

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes())
}

fn parse_time(field: &str, row: usize, column: &str) -> Result<f64> {
    match field.to_ascii_lowercase().as_str() {
        "" | "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        s => s
            .parse::<f64>()
            .map_err(|_| Error::Data(format!("row {row}, column {column}: cannot parse '{field}' as a time"))),
    }
}

fn parse_number(field: &str, row: usize, column: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Data(format!("row {row}, column {column}: cannot parse '{field}' as a number")))
}

pub fn parse_observations(text: &str) -> Result<Vec<Observation>> {
    let mut rdr = reader(text);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Data(format!("header: {e}")))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    if names.len() < 3 || names[..3] != ["y1", "y2", "delta"] {
        return Err(Error::Data(format!(
            "header must start with y1,y2,delta, found '{}'",
            names.join(",")
        )));
    }
    let mut out = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        // row numbers are 1-based and count the header line
        let row = k + 2;
        let record = record.map_err(|e| Error::Data(format!("row {row}: {e}")))?;
        let y1 = parse_time(&record[0], row, "y1")?;
        let y2 = parse_time(&record[1], row, "y2")?;
        let delta = match &record[2] {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Data(format!("row {row}, column delta: expected 0 or 1, got '{other}'")))
            }
        };
        let x = (3..record.len())
            .map(|c| parse_number(&record[c], row, names[c]))
            .collect::<Result<Vec<_>>>()?;
        let y2 = if delta == 0 && y2.is_infinite() && record[1].is_empty() { y1 } else { y2 };
        let obs = Observation::from_triplet(y1, y2, delta, x)
            .map_err(|e| Error::Data(format!("row {row}: {e}")))?;
        out.push(obs);
    }
    Ok(out)
}

/// Reads a covariate list with a header row; returns one vector per row.
pub fn parse_covariates(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rdr = reader(text);
    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Data(format!("header: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut out = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let row = k + 2;
        let record = record.map_err(|e| Error::Data(format!("row {row}: {e}")))?;
        let x = record
            .iter()
            .enumerate()
            .map(|(c, f)| parse_number(f, row, &names[c]))
            .collect::<Result<Vec<_>>>()?;
        out.push(x);
    }
    Ok(out)
}

/// Writes observations in the schema accepted by [`parse_observations`].
pub fn write_observations(obs: &[Observation]) -> String {
    let d = obs.first().map_or(0, |o| o.x.len());
    let mut s = String::from("y1,y2,delta");
    for j in 1..=d {
        s.push_str(&format!(",x{j}"));
    }
    s.push('\n');
    for o in obs {
        let y2 = if o.y2().is_infinite() { "inf".to_string() } else { o.y2().to_string() };
        s.push_str(&format!("{},{},{}", o.y1(), y2, o.delta()));
        for v in &o.x {
            s.push_str(&format!(",{v}"));
        }
        s.push('\n');
    }
    s
}
