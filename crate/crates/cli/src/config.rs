//! `--config FILE` support: `key = value` lines become `--key=value` flags.

use std::fs;
use std::path::Path;

use qchaos::Error;

/// Parses a config file. Blank lines and lines starting with `#` are skipped.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>, Error> {
    let text = fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, Error> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("config line {}: expected key = value", no + 1))
        })?;
        let key = k.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(Error::InvalidConfig(format!("config line {}: bad key '{}'", no + 1, k.trim())));
        }
        out.push((key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Moves `--config FILE` out of `args` and splices the file's settings in
/// right after the subcommand, so flags given on the command line win.
pub fn splice_config(args: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>, Error> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let p = it
                .next()
                .ok_or_else(|| Error::InvalidConfig("--config needs a file".into()))?;
            path = Some(p);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let settings = read_config(Path::new(&path))?;
    let at = rest
        .iter()
        .position(|a| subcommands.contains(&a.as_str()))
        .ok_or_else(|| Error::InvalidConfig("--config needs a subcommand".into()))?;
    let flags = settings.into_iter().map(|(k, v)| format!("--{k}={v}"));
    rest.splice(at + 1..at + 1, flags);
    Ok(rest)
}
