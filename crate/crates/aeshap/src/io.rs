//! Flow CSV ingestion and export.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use aeshap_core::Dataset;

use crate::error::{Error, Result};

/// Reads a comma-separated flow table with one header row.
///
/// Every column except `label_column` must hold floats (`Infinity` and `NaN`
/// are accepted and left for sanitation). Header names are trimmed; a name
/// that repeats gets a `.1`, `.2`, ... suffix. Labels map to 0 when the trimmed
/// cell equals `benign_label` and to 1 otherwise.
pub fn load_csv(path: &Path, label_column: Option<&str>, benign_label: &str) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(std::io::BufReader::new(file));
    let header = reader.headers().map_err(|e| Error::format(path, format!("unreadable header: {e}")))?.clone();
    if header.is_empty() || header.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::format(path, "missing header row"));
    }
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();

    let label_at = match label_column {
        None => None,
        Some(wanted) => {
            let hits: Vec<usize> = (0..names.len()).filter(|&i| names[i] == wanted).collect();
            match hits.as_slice() {
                [] => return Err(Error::format(path, format!("label column {wanted:?} not found in header"))),
                [i] => Some(*i),
                _ => return Err(Error::format(path, format!("label column {wanted:?} appears {} times", hits.len()))),
            }
        }
    };

    let feature_cols: Vec<usize> = (0..names.len()).filter(|&i| Some(i) != label_at).collect();
    if feature_cols.is_empty() {
        return Err(Error::format(path, "no feature columns"));
    }
    let column_names = disambiguate(feature_cols.iter().map(|&i| names[i].as_str()));

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        // Row numbers are 1-based and count the header as row 1.
        let row_no = r + 2;
        let record = record.map_err(|e| Error::format(path, format!("row {row_no}: {e}")))?;
        if record.len() != names.len() {
            return Err(Error::format(
                path,
                format!("row {row_no}: expected {} fields, found {}", names.len(), record.len()),
            ));
        }
        for &c in &feature_cols {
            let cell = record[c].trim();
            let v: f64 = cell.parse().map_err(|_| {
                Error::format(path, format!("row {row_no}, column {:?}: {cell:?} is not a number", names[c]))
            })?;
            values.push(v);
        }
        if let Some(l) = label_at {
            labels.push(u8::from(record[l].trim() != benign_label));
        }
    }
    Ok(Dataset::new(values, column_names, label_at.map(|_| labels))?)
}

/// Whether the header row of `path` names `column` (after trimming).
pub fn has_column(path: &Path, column: &str) -> Result<bool> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(std::io::BufReader::new(file));
    let header = reader.headers().map_err(|e| Error::format(path, format!("unreadable header: {e}")))?;
    Ok(header.iter().any(|h| h.trim() == column))
}

fn disambiguate<'a>(names: impl Iterator<Item = &'a str>) -> Vec<String> {
    let names: Vec<&str> = names.collect();
    let mut taken: HashMap<String, usize> = names.iter().map(|n| (n.to_string(), 0)).collect();
    let mut out = Vec::with_capacity(names.len());
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for name in names {
        let count = seen.entry(name).or_insert(0);
        if *count == 0 {
            out.push(name.to_string());
        } else {
            let mut k = *count;
            let mut candidate = format!("{name}.{k}");
            while taken.contains_key(&candidate) {
                k += 1;
                candidate = format!("{name}.{k}");
            }
            taken.insert(candidate.clone(), 0);
            out.push(candidate);
        }
        *count += 1;
    }
    out
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_all(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(bytes).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Writes `d` with its column names; labels, when present, go to a final
/// `label_column` as `benign_label` or `attack_label`.
pub fn write_csv(path: &Path, d: &Dataset, label_column: &str, benign_label: &str, attack_label: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let csv_err = |e: csv::Error| Error::format(path, e.to_string());
    let mut header: Vec<&str> = d.column_names().iter().map(String::as_str).collect();
    if d.labels().is_some() {
        header.push(label_column);
    }
    w.write_record(&header).map_err(csv_err)?;
    let mut fields: Vec<String> = Vec::with_capacity(header.len());
    for (i, row) in d.rows().enumerate() {
        fields.clear();
        fields.extend(row.iter().map(|v| v.to_string()));
        if let Some(labels) = d.labels() {
            fields.push(if labels[i] == 0 { benign_label } else { attack_label }.to_string());
        }
        w.write_record(&fields).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
