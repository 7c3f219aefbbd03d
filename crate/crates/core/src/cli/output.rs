use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::{Cell, OutputFormat, ResultBundle, Table};

/// 17 significant digits: every f64 survives a text round trip.
fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Real(v) => real(*v),
        Cell::Text(s) => s.clone(),
    }
}

fn header(bundle: &ResultBundle) -> String {
    let p = &bundle.provenance;
    format!(
        "iongradim {} command={} mode={} seed={} config_hash={}",
        p.version,
        p.command.name(),
        p.mode.label(),
        p.seed,
        p.config_hash
    )
}

/// One table as CSV, preceded by a `#` provenance line.
pub fn render_csv(bundle: &ResultBundle, table: &Table) -> io::Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&table.columns).map_err(io::Error::other)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(cell)).map_err(io::Error::other)?;
    }
    let body = writer.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    let body = String::from_utf8(body).map_err(io::Error::other)?;
    Ok(format!("# {} table={}\n{body}", header(bundle), table.name))
}

fn provenance(bundle: &ResultBundle) -> String {
    let mut out = format!("# {}\n", header(bundle));
    for note in &bundle.annotations {
        out.push_str("note: ");
        out.push_str(note);
        out.push('\n');
    }
    out
}

/// Human-readable rendering of the whole bundle.
pub fn render_text(bundle: &ResultBundle) -> String {
    let mut out = provenance(bundle);
    for table in &bundle.tables {
        let cells: Vec<Vec<String>> = table
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Real(v) => format!("{v:.12e}"),
                        other => cell(other),
                    })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..table.columns.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([table.columns[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let _ = writeln!(out, "\n[{}]", table.name);
        let line = |fields: Vec<&str>| {
            fields
                .iter()
                .zip(&widths)
                .map(|(f, w)| format!("{f:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let _ = writeln!(out, "{}", line(table.columns.clone()));
        for row in &cells {
            let _ = writeln!(out, "{}", line(row.iter().map(String::as_str).collect()));
        }
    }
    out
}

/// Writes the bundle under `dir` and returns the files written, in order.
///
/// Both formats write `config.toml` (the config echo) and `provenance.txt`.
/// CSV adds `<table>.csv` per table; text adds `report.txt`.
pub fn emit(bundle: &ResultBundle, format: OutputFormat, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = vec![
        (dir.join("config.toml"), bundle.config_echo.clone()),
        (dir.join("provenance.txt"), provenance(bundle)),
    ];
    match format {
        OutputFormat::Csv => {
            for table in &bundle.tables {
                files.push((dir.join(format!("{}.csv", table.name)), render_csv(bundle, table)?));
            }
        }
        OutputFormat::Text => files.push((dir.join("report.txt"), render_text(bundle))),
    }
    for (path, contents) in &files {
        fs::write(path, contents)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
