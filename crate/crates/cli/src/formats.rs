//! Text formats: e-value CSV, GWAS summary-statistic TSV, and the float
//! serialization rule (shortest representation that parses back identically,
//! which is what Rust's default float Display produces).

use gdp_evalues::mechanism::EValue;

use crate::error::CliError;

/// Parsed e-value file: values in file order, with their labels when the
/// file carried an index column.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalueFile {
    pub values: Vec<EValue>,
    pub labels: Option<Vec<String>>,
}

impl EvalueFile {
    /// Label for position i: the retained index column, else the position.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(ls) => ls[i].clone(),
            None => i.to_string(),
        }
    }
}

/// Parse `evalue` or `index,evalue` CSV. Row numbers in errors are 1-based
/// and count the header line.
pub fn parse_evalue_csv(text: &str) -> Result<EvalueFile, CliError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::validation("empty e-value file"))?;
    let with_index = match header.trim() {
        "evalue" => false,
        "index,evalue" => true,
        other => {
            return Err(CliError::validation(format!(
                "row 1: expected header 'evalue' or 'index,evalue', got '{other}'"
            )))
        }
    };
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value_text = if with_index {
            let (label, value) = line.split_once(',').ok_or_else(|| {
                CliError::validation(format!("row {row}: expected 'index,evalue'"))
            })?;
            labels.push(label.trim().to_string());
            value
        } else {
            line
        };
        let v: f64 = value_text.trim().parse().map_err(|_| {
            CliError::validation(format!("row {row}: cannot parse e-value '{value_text}'"))
        })?;
        let e = EValue::new(v).map_err(|e| CliError::validation(format!("row {row}: {e}")))?;
        values.push(e);
    }
    if values.is_empty() {
        return Err(CliError::validation("e-value file has no data rows"));
    }
    Ok(EvalueFile {
        values,
        labels: with_index.then_some(labels),
    })
}

/// One GWAS summary-statistic record.
#[derive(Debug, Clone, PartialEq)]
pub struct GwasRecord {
    pub snp_id: String,
    pub z: f64,
}

/// Parse tab-separated `snp_id\tz` records; ids must be unique, z finite.
pub fn parse_gwas_tsv(text: &str) -> Result<Vec<GwasRecord>, CliError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::validation("empty GWAS file"))?;
    if header.trim_end() != "snp_id\tz" {
        return Err(CliError::validation(format!(
            "row 1: expected header 'snp_id\\tz', got '{header}'"
        )));
    }
    let mut records: Vec<GwasRecord> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in lines {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (snp_id, z_text) = line
            .split_once('\t')
            .ok_or_else(|| CliError::validation(format!("row {row}: expected 'snp_id\\tz'")))?;
        let snp_id = snp_id.trim();
        if snp_id.is_empty() {
            return Err(CliError::validation(format!("row {row}: empty snp_id")));
        }
        if !seen.insert(snp_id.to_string()) {
            return Err(CliError::validation(format!(
                "row {row}: duplicate snp_id '{snp_id}'"
            )));
        }
        let z: f64 = z_text.trim().parse().map_err(|_| {
            CliError::validation(format!("row {row}: cannot parse z-score '{z_text}'"))
        })?;
        if !z.is_finite() {
            return Err(CliError::validation(format!(
                "row {row}: z-score must be finite, got {z}"
            )));
        }
        records.push(GwasRecord {
            snp_id: snp_id.to_string(),
            z,
        });
    }
    if records.is_empty() {
        return Err(CliError::validation("GWAS file has no data rows"));
    }
    Ok(records)
}

/// Serialize values (with labels) back to `index,evalue` CSV.
pub fn evalue_csv(labels: &[String], values: &[f64]) -> String {
    let mut out = String::from("index,evalue\n");
    for (label, v) in labels.iter().zip(values) {
        out.push_str(label);
        out.push(',');
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

/// Parse a comma-separated list of floats (flag values like grid specs).
pub fn parse_float_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                CliError::validation(format!("{flag}: cannot parse '{s}' as a number"))
            })
        })
        .collect()
}

/// Parse a comma-separated list of counts.
pub fn parse_usize_list(text: &str, flag: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::validation(format!("{flag}: cannot parse '{s}' as a count")))
        })
        .collect()
}
