//! Figure grids: reduced-pair CHSH and Charlie-conditioned CHSH scans.

use crate::format::Table;
use anyhow::{bail, Result};
use qsym3::conditional::{conditional_chsh_fast, q_from_value, CharlieSetting};
use qsym3::conditional::eigen_by_magnitude;
use qsym3::correlations::{chsh_optimum, hilbert_schmidt_decompose, reduce_to_pair};
use qsym3::qsym::{canonical_d32, canonical_d33, Party, PureState3};
use rayon::prelude::*;
use serde_json::{Map, Value};
use std::f64::consts::{PI, TAU};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    D32,
    D33,
}

/// Grid and family parameters shared by the scan commands.
#[derive(Clone, Debug)]
pub struct ScanSpec {
    pub family: Family,
    /// Fixed `beta`; `None` scans `beta_steps` points.
    pub beta: Option<f64>,
    pub beta_steps: usize,
    pub theta_steps: usize,
    pub phi_steps: usize,
    /// Fixed `y` for d33; `None` scans `y_steps` points (scan-chsh only).
    pub y: Option<f64>,
    pub y_steps: usize,
    pub alpha: f64,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [
            ("beta-steps", self.beta_steps),
            ("theta-steps", self.theta_steps),
            ("phi-steps", self.phi_steps),
            ("y-steps", self.y_steps),
        ] {
            if n < 2 {
                bail!("--{name} must be at least 2 (got {n})");
            }
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b <= PI) {
                bail!("--beta {b} outside (0, pi]");
            }
        }
        if self.family == Family::D33 {
            if let Some(y) = self.y {
                if !(y > 0.0 && y <= 1.0) {
                    bail!("--y {y} outside (0, 1]");
                }
            }
            if !(0.0..=TAU).contains(&self.alpha) {
                bail!("--alpha {} outside [0, 2pi]", self.alpha);
            }
        }
        Ok(())
    }

    /// `pi k / n` for `k = 1..=n`, so the grid ends on `beta = pi`.
    pub fn betas(&self) -> Vec<f64> {
        match self.beta {
            Some(b) => vec![b],
            None => (1..=self.beta_steps).map(|k| PI * k as f64 / self.beta_steps as f64).collect(),
        }
    }

    /// `[0, pi]`, both ends included.
    pub fn thetas(&self) -> Vec<f64> {
        let n = self.theta_steps;
        (0..n).map(|k| PI * k as f64 / (n - 1) as f64).collect()
    }

    /// `[0, 2pi)` in equal steps.
    pub fn phis(&self) -> Vec<f64> {
        let n = self.phi_steps;
        (0..n).map(|k| TAU * k as f64 / n as f64).collect()
    }

    /// `k / n` for `k = 1..=n`.
    pub fn ys(&self) -> Vec<f64> {
        match self.y {
            Some(y) => vec![y],
            None => (1..=self.y_steps).map(|k| k as f64 / self.y_steps as f64).collect(),
        }
    }

    fn state(&self, beta: f64, y: f64) -> Result<PureState3<f64>> {
        Ok(match self.family {
            Family::D32 => canonical_d32(beta)?,
            Family::D33 => canonical_d33(y, self.alpha, beta)?,
        })
    }

    fn parameters(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("family".into(), Value::from(match self.family {
            Family::D32 => "d32",
            Family::D33 => "d33",
        }));
        if self.family == Family::D33 {
            m.insert("alpha".into(), Value::from(self.alpha));
        }
        m
    }
}

/// Rows `(beta, y, t1, t2, t3, chsh_opt)`; `t` ordered by decreasing modulus.
pub fn scan_chsh(spec: &ScanSpec) -> Result<Table> {
    spec.validate()?;
    let ys = match spec.family {
        Family::D32 => vec![f64::NAN],
        Family::D33 => spec.ys(),
    };
    let points: Vec<(f64, f64)> = spec.betas().into_iter().flat_map(|b| ys.iter().map(move |&y| (b, y))).collect();
    let rows = points
        .par_iter()
        .map(|&(b, y)| {
            let t = hilbert_schmidt_decompose(&reduce_to_pair(&spec.state(b, y)?, Party::C)).t;
            let ev = eigen_by_magnitude(&t);
            Ok(vec![b, y, ev[0], ev[1], ev[2], chsh_optimum(&t)])
        })
        .collect::<Result<Vec<_>>>()?;
    let (columns, rows) = match spec.family {
        Family::D32 => (
            vec!["beta", "t1", "t2", "t3", "chsh_opt"],
            rows.into_iter().map(|mut r| {
                r.remove(1);
                r
            }).collect(),
        ),
        Family::D33 => (vec!["beta", "y", "t1", "t2", "t3", "chsh_opt"], rows),
    };
    Ok(Table { command: "scan-chsh", columns, rows, parameters: spec.parameters() })
}

/// Rows `(beta, theta, phi)` in lexicographic grid order.
pub fn scan_conditional(spec: &ScanSpec) -> Result<Table> {
    spec.validate()?;
    let y = match spec.family {
        Family::D32 => f64::NAN,
        Family::D33 => spec.y.unwrap_or(1.0),
    };
    let (thetas, phis) = (spec.thetas(), spec.phis());
    let mut points = Vec::new();
    for b in spec.betas() {
        for &t in &thetas {
            for &p in &phis {
                points.push((b, t, p));
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(b, t, p)| {
            let state = spec.state(b, y)?;
            let r = conditional_chsh_fast(&state, &CharlieSetting::new(t, p)?);
            Ok(vec![b, t, p, r.p_plus, r.chsh_c_opt[0], r.chsh_c_opt[1], r.chsh_con_opt, q_from_value(r.chsh_con_opt)])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut parameters = spec.parameters();
    if spec.family == Family::D33 {
        parameters.insert("y".into(), Value::from(y));
    }
    Ok(Table {
        command: "scan-conditional",
        columns: vec!["beta", "theta", "phi", "p_plus", "chsh_plus_opt", "chsh_minus_opt", "chsh_con_opt", "q"],
        rows,
        parameters,
    })
}
