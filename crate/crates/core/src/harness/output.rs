use std::io::Write;

use crate::error::Result;

/// `# key = value` header lines.
pub fn write_metadata<W: Write>(w: &mut W, metadata: &[(String, String)]) -> Result<()> {
    for (k, v) in metadata {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

/// Provenance block with the effective configuration echoed line by line.
pub fn metadata_lines(config_hash: &str, seed: u64, config_text: &str) -> Vec<(String, String)> {
    let mut m = vec![
        ("version".to_string(), super::VERSION.to_string()),
        ("config_hash".to_string(), config_hash.to_string()),
        ("seed".to_string(), seed.to_string()),
    ];
    m.extend(
        config_text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| ("config".to_string(), l.to_string())),
    );
    m
}
