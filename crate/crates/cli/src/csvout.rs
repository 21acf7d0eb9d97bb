//! Minimal RFC-4180 CSV writing and reading for the tables this tool emits.
//! Fields are numbers or plain identifiers, so quoting only triggers on the
//! reserved characters.

use std::path::Path;

fn escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\r') || field.contains('\n')
    {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut out = String::new();
    out.push_str(&header.iter().map(|f| escape(f)).collect::<Vec<_>>().join(","));
    out.push_str("\r\n");
    for row in rows {
        out.push_str(&row.iter().map(|f| escape(f)).collect::<Vec<_>>().join(","));
        out.push_str("\r\n");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read back a CSV written by [`write_csv`]; no quoted fields expected.
pub fn read_csv(path: &Path) -> anyhow::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| anyhow::anyhow!("empty csv"))?
        .split(',')
        .map(|s| s.trim_end_matches('\r').to_string())
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        let row: Result<Vec<f64>, _> = line
            .split(',')
            .map(|s| s.trim_end_matches('\r').parse::<f64>())
            .collect();
        rows.push(row.map_err(|e| anyhow::anyhow!("bad csv number: {e}"))?);
    }
    Ok((header, rows))
}

pub fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}
