use std::path::Path;

use anyhow::{bail, Context, Result};
use rdigits::{NumerationSystem, SystemFile};

pub const BUNDLED: [(&str, &str); 7] = [
    ("zeckendorf", include_str!("../systems/zeckendorf.sys")),
    ("tribonacci", include_str!("../systems/tribonacci.sys")),
    ("two-one", include_str!("../systems/two-one.sys")),
    ("descending", include_str!("../systems/descending.sys")),
    ("base2", include_str!("../systems/base2.sys")),
    ("base3", include_str!("../systems/base3.sys")),
    ("base4", include_str!("../systems/base4.sys")),
];

/// Reads a system file, falling back to a bundled system of the same name
/// (with or without the `.sys` suffix) when no such file exists.
pub fn load(spec: &str) -> Result<SystemFile> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        return Ok(SystemFile::parse(&text)?);
    }
    let name = spec.strip_suffix(".sys").unwrap_or(spec);
    let name = Path::new(name).file_name().and_then(|n| n.to_str()).unwrap_or(name);
    match BUNDLED.iter().find(|(n, _)| *n == name) {
        Some((_, text)) => Ok(SystemFile::parse(text)?),
        None => {
            let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
            bail!("no system file {spec:?} and no bundled system of that name (bundled: {})", names.join(", "))
        }
    }
}

pub fn build(spec: &str) -> Result<NumerationSystem> {
    let file = load(spec)?;
    file.build().with_context(|| format!("system {spec}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_systems_are_valid() {
        for (name, _) in BUNDLED {
            let sys = build(name).unwrap();
            assert_eq!(sys.name(), Some(name));
            assert_eq!(build(&format!("{name}.sys")).unwrap(), sys);
        }
        assert_eq!(build("zeckendorf").unwrap(), NumerationSystem::zeckendorf());
        assert_eq!(build("base3").unwrap().coeffs(), [3]);
        assert!(build("nonesuch").is_err());
    }
}
