use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// CSV table with a `#` header block naming version, config hash and seed.
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns.len(), "row width");
        self.rows.push(cells.join(","));
    }

    pub fn render<P: Serialize>(&self, run: &RunConfig<P>) -> String {
        let mut s = header(run, "# ");
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{r}");
        }
        s
    }

    pub fn write<P: Serialize>(&self, run: &RunConfig<P>, name: &str) -> Result<(), CliError> {
        write_file(&run.out, name, &self.render(run))
    }
}

pub fn header<P: Serialize>(run: &RunConfig<P>, prefix: &str) -> String {
    format!(
        "{prefix}kirchhoff {VERSION}\n{prefix}subcommand: {}\n{prefix}config_sha256: {}\n{prefix}seed: {}\n",
        run.subcommand,
        run.hash(),
        run.seed
    )
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
