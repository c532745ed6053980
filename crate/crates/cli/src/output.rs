use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::{Command, Format};
use crate::CliError;

pub const OUTPUT_DIR_VAR: &str = "NESCAPE_OUTPUT_DIR";

pub type Record = Map<String, Value>;

/// Builds a record from `key => value` pairs, keeping their order.
#[macro_export]
macro_rules! record {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut m = $crate::output::Record::new();
        $( m.insert($k.to_string(), serde_json::json!($v)); )*
        m
    }};
}

pub fn resolve_path(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_VAR) {
            return Path::new(&dir).join(path);
        }
    }
    path.to_path_buf()
}

pub fn pick_format(explicit: Option<Format>, path: Option<&Path>) -> Format {
    explicit.unwrap_or_else(|| match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Json,
    })
}

fn columns(records: &[Record]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in records {
        for k in r.keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Object(m)) => m
            .iter()
            .map(|(k, v)| format!("{k}={}", cell(Some(v))))
            .collect::<Vec<_>>()
            .join(";"),
        Some(other) => other.to_string(),
    }
}

pub fn render_json(config: &Command, records: &[Record]) -> String {
    let doc = json!({
        "version": narrow_escape::FORMAT_VERSION,
        "config": config,
        "records": records,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("records are plain JSON");
    s.push('\n');
    s
}

fn config_line(config: &Command) -> String {
    format!("# config: {}\n", serde_json::to_string(config).expect("config serializes"))
}

fn csv_rows(records: &[Record], cols: &[String], header: bool) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if header {
        w.write_record(cols).map_err(CliError::io)?;
    }
    for r in records {
        w.write_record(cols.iter().map(|c| cell(r.get(c)))).map_err(CliError::io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render_csv(config: &Command, records: &[Record]) -> Result<String, CliError> {
    let cols = columns(records);
    let mut out = format!("# version: {}\n", narrow_escape::FORMAT_VERSION);
    out.push_str(&config_line(config));
    out.push_str(&csv_rows(records, &cols, true)?);
    Ok(out)
}

/// Appends rows to an existing CSV with identical columns; the new run's
/// config goes in as another comment line.
fn append_csv(path: &Path, config: &Command, records: &[Record]) -> Result<(), CliError> {
    let cols = columns(records);
    let existing = BufReader::new(File::open(path).map_err(CliError::io)?)
        .lines()
        .map_while(|l| l.ok())
        .find(|l| !l.starts_with('#'));
    let header = csv_rows(&[], &cols, true)?;
    if existing.as_deref() != Some(header.trim_end()) {
        return Err(CliError::domain(format!(
            "cannot append to {}: columns differ",
            path.display()
        )));
    }
    let mut f = OpenOptions::new().append(true).open(path).map_err(CliError::io)?;
    let mut chunk = config_line(config);
    chunk.push_str(&csv_rows(records, &cols, false)?);
    f.write_all(chunk.as_bytes()).map_err(CliError::io)
}

pub fn emit(
    config: &Command,
    records: &[Record],
    output: Option<&Path>,
    format: Option<Format>,
    append: bool,
) -> Result<(), CliError> {
    let path = output.map(resolve_path);
    let fmt = pick_format(format, path.as_deref());
    if append {
        let p = path.as_deref().ok_or_else(|| CliError::domain("--append needs --output"))?;
        if fmt != Format::Csv {
            return Err(CliError::domain("--append is only supported for CSV"));
        }
        if p.exists() {
            return append_csv(p, config, records);
        }
    }
    let text = match fmt {
        Format::Json => render_json(config, records),
        Format::Csv => render_csv(config, records)?,
    };
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(CliError::io)?;
            }
            std::fs::write(&p, text).map_err(CliError::io)
        }
        None => io::stdout().write_all(text.as_bytes()).map_err(CliError::io),
    }
}

/// Recovers the embedded config from a JSON document or a CSV file; for an
/// appended CSV the last config line wins.
pub fn read_config(path: &Path) -> Result<Command, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io)?;
    let bad = |msg: String| CliError::domain(format!("{}: {msg}", path.display()));
    if text.trim_start().starts_with('{') {
        let doc: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        let cfg = doc.get("config").ok_or_else(|| bad("no `config` field".into()))?;
        return serde_json::from_value(cfg.clone()).map_err(|e| bad(e.to_string()));
    }
    let line = text
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix("# config: "))
        .ok_or_else(|| bad("no `# config:` line".into()))?;
    serde_json::from_str(line).map_err(|e| bad(e.to_string()))
}
