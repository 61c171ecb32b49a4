//! Table verification for the built-in (3,2,2) classes.

use anyhow::{bail, Result};
use qsym3::bell322::{verify_class, VerificationRow, SUPPORTED_CLASSES};

/// Parses `all`, an empty string, or a comma-separated class list.
pub fn parse_classes(arg: &str) -> Result<Vec<u32>> {
    let arg = arg.trim();
    if arg.eq_ignore_ascii_case("all") {
        return Ok(SUPPORTED_CLASSES.to_vec());
    }
    let mut out = Vec::new();
    for part in arg.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let k: u32 = part.parse().map_err(|_| anyhow::anyhow!("invalid class '{part}'"))?;
        if !SUPPORTED_CLASSES.contains(&k) {
            bail!("unknown class {k} (supported: 2, 5, 22, 26, 33, 39)");
        }
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}

pub fn verify(classes: &[u32]) -> Result<Vec<VerificationRow>> {
    classes.iter().map(|&k| Ok(verify_class(k)?)).collect()
}
