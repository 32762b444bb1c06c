use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Provenance written ahead of the data: tool version, command and the settings that
/// determine the output. The worker count is deliberately absent.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Vec<(String, String)>,
}

impl Meta {
    pub fn new(command: &'static str) -> Self {
        Self {
            tool: "star",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    fn header_line(&self) -> String {
        let mut s = format!("# {} {} {}", self.tool, self.version, self.command);
        for (k, v) in &self.config {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }

    fn json(&self) -> serde_json::Value {
        let config: serde_json::Map<String, serde_json::Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        serde_json::json!({
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "config": config,
        })
    }
}

fn open(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes `rows` as CSV (header comment, column row, data) or as a JSON document
/// `{"meta": .., "rows": [..]}`.
pub fn emit<T: Serialize>(
    meta: &Meta,
    rows: &[T],
    format: Format,
    out: Option<&Path>,
) -> io::Result<()> {
    let mut w = open(out)?;
    match format {
        Format::Csv => {
            writeln!(w, "{}", meta.header_line())?;
            let mut c = csv::Writer::from_writer(&mut w);
            for r in rows {
                c.serialize(r).map_err(io::Error::other)?;
            }
            c.flush()?;
        }
        Format::Json => {
            let doc = serde_json::json!({ "meta": meta.json(), "rows": rows });
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
    }
    w.flush()
}

/// Writes a single JSON document with the provenance block attached.
pub fn emit_document<T: Serialize>(meta: &Meta, body: &T, out: Option<&Path>) -> io::Result<()> {
    let mut w = open(out)?;
    let doc = serde_json::json!({ "meta": meta.json(), "result": body });
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()
}
