//! Long-format panel CSV: `subject_id,time,count,z1,...,zd`, one row per
//! inspection.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::data::{Dataset, Subject};
use crate::error::{Error, Result};

/// How the `count` column is to be read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CountKind {
    /// Cumulative count `N(t)`.
    #[default]
    Cumulative,
    /// Events since the subject's previous inspection.
    Increments,
}

struct Pending {
    id: String,
    z: Vec<f64>,
    obs: Vec<(f64, u64)>,
}

fn check_header(header: &csv::StringRecord) -> Result<usize> {
    let fields: Vec<&str> = header.iter().collect();
    let d = fields.len().saturating_sub(3);
    let expected: Vec<String> = ["subject_id", "time", "count"]
        .iter()
        .map(|s| s.to_string())
        .chain((1..=d).map(|j| format!("z{j}")))
        .collect();
    if fields.len() < 3 || fields != expected {
        return Err(Error::input(format!(
            "header must be `subject_id,time,count,z1,...,zd`, got `{}`",
            fields.join(",")
        )));
    }
    Ok(d)
}

fn parse_field<T: std::str::FromStr>(raw: &str, what: &str, line: u64) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::input(format!("line {line}: cannot parse {what} `{raw}`")))
}

/// Reads a dataset, grouping rows by `subject_id` in order of first
/// appearance.
///
/// Rows may come in any order. Within a subject, times are sorted, repeated
/// times keep the larger cumulative count, and covariates must not change.
pub fn parse_csv<R: Read>(reader: R, kind: CountKind) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let d = check_header(rdr.headers()?)?;

    let mut pending: Vec<Pending> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let id = record[0].to_string();
        let time: f64 = parse_field(&record[1], "time", line)?;
        let count: u64 = parse_field(&record[2], "count", line)?;
        let z = (0..d)
            .map(|j| parse_field(&record[3 + j], "covariate", line))
            .collect::<Result<Vec<f64>>>()?;
        let slot = *index.entry(id.clone()).or_insert_with(|| {
            pending.push(Pending {
                id: id.clone(),
                z: z.clone(),
                obs: Vec::new(),
            });
            pending.len() - 1
        });
        let p = &mut pending[slot];
        if p.z != z {
            return Err(Error::validation(&id, format!("line {line}: covariates change within the subject")));
        }
        p.obs.push((time, count));
    }
    if pending.is_empty() {
        return Err(Error::input("no data rows"));
    }

    let subjects = pending
        .into_iter()
        .map(|mut p| {
            if kind == CountKind::Increments {
                if p.obs.iter().any(|(t, _)| t.is_nan()) {
                    return Err(Error::validation(&p.id, "NaN observation time"));
                }
                p.obs.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut total = 0u64;
                for o in &mut p.obs {
                    total = total
                        .checked_add(o.1)
                        .ok_or_else(|| Error::validation(&p.id, "cumulative count overflows"))?;
                    o.1 = total;
                }
            }
            Subject::from_observations(p.id, p.z, p.obs)
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(subjects)
}

/// Writes cumulative counts in the format read by [`parse_csv`].
pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["subject_id".to_string(), "time".into(), "count".into()];
    header.extend((1..=data.dim()).map(|j| format!("z{j}")));
    w.write_record(&header)?;
    for s in data.subjects() {
        for (t, n) in s.times().iter().zip(s.counts()) {
            let mut row = vec![s.id().to_string(), t.to_string(), n.to_string()];
            row.extend(s.z().iter().map(f64::to_string));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}
