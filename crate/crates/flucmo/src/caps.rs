//! Cap overrides from `name=value` lists and the `FLUCMO_CAPS` environment variable.

use flucmo_core::Caps;

use crate::error::{CliError, CliResult};

/// Environment variable holding default cap overrides, e.g. `m2=8,frak_m2=7`.
pub const CAPS_ENV: &str = "FLUCMO_CAPS";

/// Sets one named cap.
pub fn set_cap(caps: &mut Caps, name: &str, value: usize) -> CliResult<()> {
    let slot = match name.trim() {
        "partitions" => &mut caps.partitions,
        "graphs" => &mut caps.graphs,
        "m2" => &mut caps.m2,
        "good_graphs" | "good-graphs" => &mut caps.good_graphs,
        "frak_m2" | "frak-m2" => &mut caps.frak_m2,
        other => return Err(CliError::Schema(format!("unknown cap {other:?}"))),
    };
    *slot = value;
    Ok(())
}

/// Applies a `name=value,...` list.
pub fn apply_overrides(caps: &mut Caps, spec: &str) -> CliResult<()> {
    for item in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Schema(format!("cap override {item:?} is not name=value")))?;
        let value = value
            .trim()
            .parse()
            .map_err(|_| CliError::Schema(format!("cap value {value:?} is not a count")))?;
        set_cap(caps, name, value)?;
    }
    Ok(())
}

/// Defaults, then `FLUCMO_CAPS`, then the explicit overrides.
pub fn resolve_caps(cli: Option<&str>) -> CliResult<Caps> {
    let mut caps = Caps::default();
    if let Ok(env) = std::env::var(CAPS_ENV) {
        apply_overrides(&mut caps, &env)?;
    }
    if let Some(spec) = cli {
        apply_overrides(&mut caps, spec)?;
    }
    Ok(caps)
}
