//! Content-addressed cache of evaluated rows.
//!
//! Each row lives in `<dir>/<sha256>.csv`, keyed by the parameters that
//! determine it. Files are written to a temporary name and renamed into
//! place, so readers never see a partial row.

use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::Point;
use crate::rows::{fmt_f64, from_csv, to_csv, ResultRow};

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

/// Canonical text of the parameters a row depends on.
pub fn canonical_point(p: &Point) -> String {
    let mut s = format!("euqoe-row {}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in [
        ("omega1", p.omega1),
        ("omega2", p.omega2),
        ("alpha_aH", p.alpha_ah),
        ("aH2", p.a_h2),
        ("tau_a", p.tau_a),
        ("p", p.p),
        ("tol.rel", p.rel_tol),
        ("tol.abs", p.abs_tol),
    ] {
        s.push_str(&format!("{k}={}\n", fmt_f64(v)));
    }
    s.push_str(&format!(
        "dimension={}\nparity={}\n",
        p.dimension,
        p.parity.as_str()
    ));
    s
}

pub fn key(p: &Point) -> String {
    hex::encode(Sha256::digest(canonical_point(p).as_bytes()))
}

impl Cache {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.csv"))
    }

    pub fn get(&self, key: &str) -> Option<ResultRow> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        let mut rows = from_csv(&text)?;
        (rows.len() == 1).then(|| rows.remove(0))
    }

    pub fn put(&self, key: &str, row: &ResultRow) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(to_csv([row]).as_bytes())?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_tracks_row_parameters_only() {
        let a = Point::default();
        let mut b = a;
        assert_eq!(key(&a), key(&b));
        b.tau_a = 1.5;
        assert_ne!(key(&a), key(&b));
        assert_eq!(key(&a).len(), 64);
    }

    #[test]
    fn put_then_get() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(&dir.path().join("nested")).unwrap();
        let row = ResultRow {
            values: crate::rows::COLUMNS.iter().map(|c| c.to_string()).collect(),
        };
        assert!(cache.get("abc").is_none());
        cache.put("abc", &row).unwrap();
        assert_eq!(cache.get("abc"), Some(row));
    }
}
