//! Single-state analysis.

use anyhow::{anyhow, bail, Context, Result};
use qsym3::conditional::{optimize_conditional, q_from_value, ConditionalGrid};
use qsym3::correlations::{chsh_optimum, hilbert_schmidt_decompose, reduce_to_pair};
use qsym3::invariants::{three_tangle, wootters_concurrence};
use qsym3::qsym::{canonical_d32, canonical_d33, is_permutation_symmetric, majorana_roots, slocc_class, Party, PureState3};
use qsym3::Complex;
use serde_json::{json, Value};

use crate::format::FORMAT_VERSION;
use crate::scan::Family;

/// Reads amplitudes from JSON: eight numbers or eight `[re, im]` pairs,
/// indexed `4 a + 2 b + c`.
pub fn parse_amplitudes(text: &str) -> Result<PureState3<f64>> {
    let v: Value = serde_json::from_str(text).context("amplitudes are not valid JSON")?;
    let Value::Array(items) = v else { bail!("amplitudes must be a JSON array") };
    if items.len() != 8 {
        bail!("expected 8 amplitudes, got {}", items.len());
    }
    let mut amp = [Complex::new(0.0, 0.0); 8];
    for (i, item) in items.iter().enumerate() {
        amp[i] = match item {
            Value::Number(n) => Complex::new(n.as_f64().unwrap(), 0.0),
            Value::Array(p) if p.len() == 2 => {
                let re = p[0].as_f64().ok_or_else(|| anyhow!("amplitude {i}: non-numeric entry"))?;
                let im = p[1].as_f64().ok_or_else(|| anyhow!("amplitude {i}: non-numeric entry"))?;
                Complex::new(re, im)
            }
            _ => bail!("amplitude {i}: expected a number or [re, im]"),
        };
    }
    Ok(PureState3::new(amp)?)
}

pub fn named_state(name: &str) -> Result<PureState3<f64>> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "ghz" => PureState3::ghz(),
        "w" => PureState3::w(),
        "000" | "zero" => PureState3::basis(0),
        other => bail!("unknown named state '{other}' (ghz, w, 000)"),
    })
}

pub fn family_state(family: Family, beta: Option<f64>, y: Option<f64>, alpha: f64) -> Result<PureState3<f64>> {
    let beta = beta.ok_or_else(|| anyhow!("--beta is required with --family"))?;
    Ok(match family {
        Family::D32 => canonical_d32(beta)?,
        Family::D33 => canonical_d33(y.unwrap_or(1.0), alpha, beta)?,
    })
}

fn pair(z: Complex<f64>) -> Value {
    json!([z.re, z.im])
}

pub fn analyze(state: &PureState3<f64>, tol: f64, grid: ConditionalGrid) -> Value {
    let sym = is_permutation_symmetric(state, tol);
    let (slocc, spinors, error) = match slocc_class(state, tol) {
        Ok(class) => {
            let spinors = if sym.symmetric {
                majorana_roots(state, tol).ok().map(|r| {
                    r.iter()
                        .map(|s| json!({ "amplitudes": [pair(s.a0()), pair(s.a1())], "bloch": s.bloch_vector() }))
                        .collect::<Vec<_>>()
                })
            } else {
                None
            };
            let error = (!sym.symmetric).then(|| qsym3::Error::NotSymmetric { residual: sym.residual }.to_string());
            (json!(class), json!(spinors), json!(error))
        }
        Err(e) => (Value::Null, Value::Null, json!(e.to_string())),
    };
    let rho = reduce_to_pair(state, Party::C);
    let best = optimize_conditional(state, grid);
    let r = &best.report;
    json!({
        "format_version": FORMAT_VERSION,
        "amplitudes": state.amplitudes().iter().map(|&z| pair(z)).collect::<Vec<_>>(),
        "symmetric": sym.symmetric,
        "symmetry_residual": sym.residual,
        "slocc": slocc,
        "spinors": spinors,
        "tau": three_tangle(state),
        "concurrence": wootters_concurrence(&rho),
        "chsh_opt": chsh_optimum(&hilbert_schmidt_decompose(&rho).t),
        "conditional": {
            "theta": best.setting.theta,
            "phi": best.setting.phi,
            "p_plus": r.p_plus,
            "p_minus": r.p_minus,
            "chsh_plus_opt": r.chsh_c_opt[0],
            "chsh_minus_opt": r.chsh_c_opt[1],
        },
        "chsh_con_opt": r.chsh_con_opt,
        "Q": q_from_value(r.chsh_con_opt),
        "error": error,
    })
}
