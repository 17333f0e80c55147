//! Plain-text instance files.
//!
//! ```text
//! # comments and blank lines are ignored
//! channels 2 3
//! 0.1,-0.2 0.3,0.05 -0.4,0.0
//! 0.2,0.2 0.1,-0.1 0.05,0.3
//! sparsity 2 3
//! 1 0 1
//! 0 1 1
//! ```
//!
//! Channel rows hold `re,im` pairs; sparsity rows hold 0/1 entries. Numbers
//! are written in shortest round-trip form, so format then parse is lossless.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, SparsityPattern};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub channels: ChannelMatrix,
    pub pattern: SparsityPattern,
}

impl Instance {
    pub fn new(channels: ChannelMatrix, pattern: SparsityPattern) -> Result<Self> {
        if channels.num_agents() != pattern.num_agents() {
            return Err(Error::DimensionMismatch(format!(
                "channels have {} agents, sparsity has {}",
                channels.num_agents(),
                pattern.num_agents()
            )));
        }
        Ok(Self { channels, pattern })
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::InstanceFormat {
        line,
        message: message.into(),
    }
}

fn header(line_no: usize, text: &str, keyword: &str) -> Result<(usize, usize)> {
    let mut parts = text.split_whitespace();
    if parts.next() != Some(keyword) {
        return Err(bad(line_no, format!("expected `{keyword} ROWS COLS`, found `{text}`")));
    }
    let mut dim = |what: &str| -> Result<usize> {
        parts
            .next()
            .ok_or_else(|| bad(line_no, format!("missing {what} count")))?
            .parse()
            .map_err(|_| bad(line_no, format!("{what} count is not a non-negative integer")))
    };
    let rows = dim("row")?;
    let cols = dim("column")?;
    if parts.next().is_some() {
        return Err(bad(line_no, "trailing tokens after dimensions"));
    }
    Ok((rows, cols))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let last_line = text.lines().count();

    let (n, first) = lines.next().ok_or_else(|| bad(last_line, "empty instance"))?;
    let (k, m) = header(n, first, "channels")?;
    let mut gains = Vec::with_capacity(k * m);
    for row in 0..k {
        let (n, line) = lines
            .next()
            .ok_or_else(|| bad(last_line, format!("missing channel row {}", row + 1)))?;
        let before = gains.len();
        for token in line.split_whitespace() {
            let (re, im) = token
                .split_once(',')
                .ok_or_else(|| bad(n, format!("`{token}` is not a re,im pair")))?;
            let parse = |s: &str| s.parse::<f64>().map_err(|_| bad(n, format!("`{s}` is not a number")));
            gains.push(Complex64::new(parse(re)?, parse(im)?));
        }
        if gains.len() - before != m {
            return Err(bad(
                n,
                format!("expected {m} channel entries, found {}", gains.len() - before),
            ));
        }
    }
    let channels = ChannelMatrix::new(k, m, gains).map_err(|e| bad(n, e.to_string()))?;

    let (n, line) = lines
        .next()
        .ok_or_else(|| bad(last_line, "missing `sparsity` section"))?;
    let (ks, v) = header(n, line, "sparsity")?;
    if ks != k {
        return Err(bad(n, format!("sparsity has {ks} rows but there are {k} agents")));
    }
    let mut entries = Vec::with_capacity(k * v);
    for row in 0..k {
        let (n, line) = lines
            .next()
            .ok_or_else(|| bad(last_line, format!("missing sparsity row {}", row + 1)))?;
        let before = entries.len();
        for token in line.split_whitespace() {
            entries.push(match token {
                "0" => false,
                "1" => true,
                _ => return Err(bad(n, format!("sparsity entry `{token}` is not 0 or 1"))),
            });
        }
        if entries.len() - before != v {
            return Err(bad(
                n,
                format!("expected {v} sparsity entries, found {}", entries.len() - before),
            ));
        }
    }
    if let Some((n, _)) = lines.next() {
        return Err(bad(n, "unexpected content after the sparsity section"));
    }
    let pattern = SparsityPattern::new(k, v, entries).map_err(|e| bad(n, e.to_string()))?;
    Instance::new(channels, pattern)
}

pub fn format_instance(instance: &Instance) -> String {
    let h = &instance.channels;
    let s = &instance.pattern;
    let mut out = String::new();
    writeln!(out, "channels {} {}", h.num_agents(), h.num_subcarriers()).unwrap();
    for k in 0..h.num_agents() {
        let row: Vec<String> = h.row(k).iter().map(|g| format!("{:?},{:?}", g.re, g.im)).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    writeln!(out, "sparsity {} {}", s.num_agents(), s.num_voxels()).unwrap();
    for k in 0..s.num_agents() {
        let row: Vec<&str> = (0..s.num_voxels())
            .map(|v| if s.get(k, v) { "1" } else { "0" })
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, instance: &Instance) -> Result<()> {
    std::fs::write(path, format_instance(instance))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_channels, generate_sparsity, RicianParams};
    use proptest::prelude::*;

    const SAMPLE: &str = "# two agents\nchannels 2 3\n0.1,-0.2 0.3,0.05 -0.4,0.0\n0.2,0.2 0.1,-0.1 0.05,0.3\n\nsparsity 2 3\n1 0 1\n0 1 1\n";

    #[test]
    fn parses_sample() {
        let inst = parse_instance(SAMPLE).unwrap();
        assert_eq!(inst.channels.gain(0, 1), Complex64::new(0.3, 0.05));
        assert!(inst.pattern.get(1, 2));
        assert!(!inst.pattern.get(0, 1));
    }

    #[test]
    fn reports_line_numbers() {
        let broken = SAMPLE.replace("0 1 1", "0 2 1");
        match parse_instance(&broken) {
            Err(Error::InstanceFormat { line, .. }) => assert_eq!(line, 8),
            other => panic!("unexpected {other:?}"),
        }
        let short = SAMPLE.replace(" -0.4,0.0", "");
        match parse_instance(&short) {
            Err(Error::InstanceFormat { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_instance("").is_err());
        assert!(parse_instance("channels 1 1\n0,0\nsparsity 1 1\n1\n").is_err());
        assert!(parse_instance(&format!("{SAMPLE}extra\n")).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(k in 1usize..5, m in 1usize..9, seed in any::<u64>()) {
            let v = m;
            let inst = Instance::new(
                generate_channels(k, m, RicianParams::default(), seed).unwrap(),
                generate_sparsity(k, v, 0.4, seed ^ 1).unwrap(),
            ).unwrap();
            let text = format_instance(&inst);
            prop_assert_eq!(parse_instance(&text).unwrap(), inst);
        }
    }
}
