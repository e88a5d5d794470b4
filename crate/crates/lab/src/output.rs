//! Output directory handling. Every file is written to a temporary file in
//! the target directory and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use dampwave_core::{CheckReport, GridFunction};

use crate::LabError;

/// Full-precision float formatting used in every CSV.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, LabError> {
        std::fs::create_dir_all(root).map_err(|e| LabError::io(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, LabError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| LabError::io(parent, e))?;
        }
        let dir = path.parent().unwrap_or(&self.root);
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| LabError::io(dir, e))?;
        tmp.write_all(contents.as_bytes()).map_err(|e| LabError::io(&path, e))?;
        tmp.persist(&path).map_err(|e| LabError::io(&path, e.error))?;
        Ok(path)
    }

    /// Writes a CSV with the given header; each row is already formatted.
    pub fn csv(&self, name: &str, header: &str, rows: &[String]) -> Result<PathBuf, LabError> {
        let mut text = String::with_capacity(rows.len() * 48);
        text.push_str(header);
        text.push('\n');
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        self.write(name, &text)
    }

    /// `# t=` header line followed by `x,value` rows.
    pub fn snapshot(&self, name: &str, t: f64, u: &GridFunction) -> Result<PathBuf, LabError> {
        let mut text = String::with_capacity(u.len() * 48);
        let _ = writeln!(text, "# t={}", num(t));
        text.push_str("x,value\n");
        for (x, v) in u.samples() {
            let _ = writeln!(text, "{},{}", num(x), num(v));
        }
        self.write(name, &text)
    }
}

fn clean(name: &str) -> String {
    name.replace([',', '\n'], ";")
}

pub fn report_row(r: &CheckReport) -> String {
    format!(
        "{},{},{},{},{},{}",
        clean(&r.name),
        r.passed,
        num(r.worst_value),
        num(r.worst_location.0),
        num(r.worst_location.1),
        r.empirical_constant.map(num).unwrap_or_default()
    )
}

pub const REPORT_HEADER: &str = "check,passed,worst_value,t,x,constant";

/// Human-readable block, one line per check.
pub fn summary(reports: &[(String, CheckReport)]) -> String {
    let mut s = String::new();
    let failed = reports.iter().filter(|r| !r.1.passed).count();
    let _ = writeln!(
        s,
        "checks: {}  passed: {}  failed: {}",
        reports.len(),
        reports.len() - failed,
        failed
    );
    for (cmd, r) in reports {
        let _ = write!(
            s,
            "[{}] {:<12} {}: worst {:.6e} at (t={}, x={})",
            if r.passed { "PASS" } else { "FAIL" },
            cmd,
            r.name,
            r.worst_value,
            r.worst_location.0,
            r.worst_location.1
        );
        if let Some(c) = r.empirical_constant {
            let _ = write!(s, ", constant {c:.6e}");
        }
        s.push('\n');
    }
    s
}
