//! The sweep output row: fixed column set, "NA" for anything unavailable,
//! deterministic formatting so identical runs produce identical bytes.

use anyhow::{bail, Context, Result};
use std::path::Path;

pub const HEADER: [&str; 21] = [
    "seed",
    "nu",
    "sigma",
    "gamma",
    "m_omega",
    "ell_max",
    "e0_num",
    "mu_num",
    "e_gc",
    "mu_gc",
    "lambda_gc",
    "lambda_num",
    "lbar",
    "gap",
    "gap_bound",
    "depletion_bound_modC",
    "phase",
    "c1",
    "c2",
    "wall_time",
    "reason",
];

#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct SweepRecord {
    pub seed: u64,
    pub nu: f64,
    pub sigma: Option<f64>, // None encodes the hard wall
    pub gamma: f64,
    pub m_omega: Option<usize>,
    pub ell_max: Option<f64>,
    pub e0_num: Option<f64>,
    pub mu_num: Option<f64>,
    pub e_gc: Option<f64>,
    pub mu_gc: Option<f64>,
    pub lambda_gc: Option<f64>,
    pub lambda_num: Option<f64>,
    pub lbar: Option<f64>,
    pub gap: Option<f64>,
    pub gap_bound: Option<f64>,
    pub depletion_bound_mod_c: Option<f64>,
    pub phase: Option<String>,
    pub c1: Option<f64>,
    #[serde(with = "maybe_inf")]
    pub c2: Option<f64>, // +inf for the hard wall, so it needs a JSON-safe encoding
    pub wall_time: Option<f64>,
    pub reason: String,
}

/// JSON has no Infinity literal; serde_json silently turns it into null, which
/// would corrupt journal round-trips. Encode infinite values as the string "inf".
mod maybe_inf {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if x.is_infinite() => Repr::Str("inf".to_string()).serialize(s),
            Some(x) => Repr::Num(*x).serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(match Option::<Repr>::deserialize(d)? {
            None => None,
            Some(Repr::Num(x)) => Some(x),
            Some(Repr::Str(_)) => Some(f64::INFINITY),
        })
    }
}

fn num(v: Option<f64>) -> String {
    match v {
        None => "NA".to_string(),
        Some(x) if x.is_infinite() && x > 0.0 => "inf".to_string(),
        Some(x) => format!("{x:.12e}"),
    }
}

impl SweepRecord {
    /// Sort key: (nu, gamma, sigma, seed), hard wall after every finite sigma.
    pub fn sort_key(&self) -> (f64, f64, f64, u64) {
        (self.nu, self.gamma, self.sigma.unwrap_or(f64::INFINITY), self.seed)
    }

    pub fn to_fields(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            format!("{:.12e}", self.nu),
            match self.sigma {
                None => "inf".to_string(),
                Some(s) => format!("{s:.12e}"),
            },
            format!("{:.12e}", self.gamma),
            self.m_omega.map_or("NA".to_string(), |m| m.to_string()),
            num(self.ell_max),
            num(self.e0_num),
            num(self.mu_num),
            num(self.e_gc),
            num(self.mu_gc),
            num(self.lambda_gc),
            num(self.lambda_num),
            num(self.lbar),
            num(self.gap),
            num(self.gap_bound),
            num(self.depletion_bound_mod_c),
            self.phase.clone().unwrap_or_else(|| "NA".to_string()),
            num(self.c1),
            num(self.c2),
            self.wall_time.map_or("NA".to_string(), |t| format!("{t:.3}")),
            self.reason.clone(),
        ]
    }
}

pub fn write_csv(path: &Path, rows: &[SweepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.to_fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Read back any CSV this tool wrote; used by the plot command.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Table> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let header: Vec<String> = rdr
            .headers()
            .context("CSV has no header row")?
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            rows.push(rec.iter().map(|s| s.to_string()).collect());
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("CSV lacks a {name:?} column (have {:?})", self.header))
    }

    /// Numeric cell; None for "NA"/"inf"/unparseable.
    pub fn value(&self, row: &[String], col: usize) -> Option<f64> {
        let cell = row.get(col)?;
        if cell == "NA" || cell == "inf" {
            return None;
        }
        cell.parse().ok()
    }

    pub fn require_rows(&self, what: &str) -> Result<()> {
        if self.rows.is_empty() {
            bail!("no data rows in CSV; nothing to {what}");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn na_and_inf_formatting() {
        let mut r = SweepRecord {
            seed: 3,
            nu: 30.0,
            sigma: None,
            gamma: 900.0,
            c2: Some(f64::INFINITY),
            reason: String::new(),
            ..Default::default()
        };
        r.e0_num = Some(1234.5678);
        let f = r.to_fields();
        assert_eq!(f.len(), HEADER.len());
        assert_eq!(f[2], "inf");
        assert_eq!(f[6], "1.234567800000e3");
        assert_eq!(f[8], "NA");
        assert_eq!(f[18], "inf");
        assert_eq!(f[19], "NA"); // wall time suppressed by default
    }

    #[test]
    fn round_trips_through_csv() {
        let dir = std::env::temp_dir().join(format!("gplab-record-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.csv");
        let rows = vec![SweepRecord {
            seed: 1,
            nu: 10.0,
            sigma: Some(100.0),
            gamma: 5.0,
            e0_num: Some(99.5),
            phase: Some("LOCALIZED".to_string()),
            ..Default::default()
        }];
        write_csv(&path, &rows).unwrap();
        let t = Table::read(&path).unwrap();
        assert_eq!(t.header, HEADER);
        assert_eq!(t.rows.len(), 1);
        let e0 = t.column("e0_num").unwrap();
        assert_eq!(t.value(&t.rows[0], e0), Some(99.5));
        let gap = t.column("gap").unwrap();
        assert_eq!(t.value(&t.rows[0], gap), None);
        std::fs::remove_dir_all(&dir).ok();
    }
}
