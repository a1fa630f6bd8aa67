//! Text dump of a bond configuration: a JSON header line, then one line of
//! run lengths for the horizontal edges and one for the vertical edges.
//! Runs alternate open/closed and start with an open run (possibly `0`).

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{BondConfig, LatticeBox};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeHeader {
    pub width: usize,
    pub height: usize,
    pub q: f64,
    pub seed: Option<u64>,
}

fn encode(flags: &[bool]) -> String {
    let mut runs = Vec::new();
    let mut current = true;
    let mut len = 0usize;
    for &f in flags {
        if f == current {
            len += 1;
        } else {
            runs.push(len.to_string());
            current = f;
            len = 1;
        }
    }
    runs.push(len.to_string());
    runs.join(" ")
}

fn decode(line: &str, expected: usize) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(expected);
    let mut open = true;
    for tok in line.split_whitespace() {
        let n: usize = tok.parse().map_err(|_| Error::Parse(format!("bad run length {tok:?}")))?;
        out.extend(std::iter::repeat_n(open, n));
        open = !open;
    }
    if out.len() != expected {
        return Err(Error::Parse(format!("runs cover {} edges, expected {expected}", out.len())));
    }
    Ok(out)
}

pub fn write_lattice_dump<W: Write>(w: &mut W, c: &BondConfig, seed: Option<u64>) -> Result<()> {
    let header = LatticeHeader { width: c.lbox.width, height: c.lbox.height, q: c.q, seed };
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    writeln!(w, "{}", encode(&c.horizontal))?;
    writeln!(w, "{}", encode(&c.vertical))?;
    Ok(())
}

pub fn read_lattice_dump<R: BufRead>(r: R) -> Result<(LatticeHeader, BondConfig)> {
    let mut lines = r.lines();
    let mut next = |what: &str| -> Result<String> {
        lines.next().transpose()?.ok_or_else(|| Error::Parse(format!("missing {what} line")))
    };
    let header: LatticeHeader = serde_json::from_str(&next("header")?)?;
    let lbox = LatticeBox::new(header.width, header.height)?;
    let horizontal = decode(&next("horizontal")?, lbox.num_horizontal())?;
    let vertical = decode(&next("vertical")?, lbox.num_vertical())?;
    let c = BondConfig::from_flags(lbox, horizontal, vertical, header.q)?;
    Ok((header, c))
}
