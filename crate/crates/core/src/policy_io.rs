//! Policy and value files.
//!
//! Both formats carry the run configuration so a policy can be replayed
//! without the original config files, and one record per `(k, node)` in
//! increasing `k`, then node order.
//!
//! CSV: `#` header lines
//!
//! ```text
//! # lobswitch policy v1
//! # config_hash: <16 hex digits>
//! # config: <key> = <value>        (one line per key)
//! ```
//!
//! then the column line
//! `k,node,qa,qb,z,pa,pb,v0,va,vb,action,u0a,u0b,ha,hb,uaa,uab,uba,ubb`.
//! `action` is `wait` or `trade`; `u0*` is the interior switch (zero when
//! waiting), `ha`/`hb` the dark-pool flags, `uaa`/`uab` the response to an
//! ask arrival and `uba`/`ubb` to a bid arrival. Floats are printed in
//! shortest round-trip form.
//!
//! Binary, all integers and floats little-endian:
//!
//! ```text
//! magic     8 bytes  "LOBSWPOL"
//! version   u32      1
//! config    u32 length + UTF-8 canonical config
//! hash      u32 length + UTF-8 config hash
//! layers    u32      K + 1
//! nodes     u32      nodes per layer
//! records   75 bytes each:
//!           v0 va vb f64, wait u8, u0a u0b f64, ha hb u8,
//!           uaa uab uba ubb f64
//! ```

use std::io::{BufRead, Read, Write};

use crate::accounting::{HiddenFlags, SwitchDecision};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::solver::{Action, Layer, NodePolicy, ValueTable};

pub const FORMAT_VERSION: u32 = 1;
pub const MAGIC: &[u8; 8] = b"LOBSWPOL";
const COLUMNS: &str = "k,node,qa,qb,z,pa,pb,v0,va,vb,action,u0a,u0b,ha,hb,uaa,uab,uba,ubb";

fn bad(msg: impl Into<String>) -> Error {
    Error::PolicyFormat(msg.into())
}

fn check_shape(config: &RunConfig, table: &ValueTable) -> Result<Grid> {
    let grid = Grid::build(config.grid)?;
    if table.layers.len() != config.grid.steps + 1 {
        return Err(bad(format!(
            "table has {} layers, config expects {}",
            table.layers.len(),
            config.grid.steps + 1
        )));
    }
    if table.layers.iter().any(|l| l.v0.len() != grid.len()) {
        return Err(bad("layer size does not match the grid"));
    }
    Ok(grid)
}

pub fn write_csv<W: Write>(mut w: W, config: &RunConfig, table: &ValueTable) -> Result<()> {
    let grid = check_shape(config, table)?;
    writeln!(w, "# lobswitch policy v{FORMAT_VERSION}")?;
    writeln!(w, "# config_hash: {}", config.hash())?;
    for line in config.canonical().lines() {
        writeln!(w, "# config: {line}")?;
    }
    writeln!(w, "{COLUMNS}")?;
    for (k, layer) in table.layers.iter().enumerate() {
        for i in 0..grid.len() {
            let n = grid.node(i);
            let p = &layer.policy[i];
            let (action, u0) = match p.interior {
                Action::Wait => ("wait", SwitchDecision::ZERO),
                Action::Trade(u) => ("trade", u),
            };
            writeln!(
                w,
                "{k},{i},{},{},{},{},{},{},{},{},{action},{},{},{},{},{},{},{},{}",
                n.qa,
                n.qb,
                n.z,
                n.pa,
                n.pb,
                layer.v0[i],
                layer.va[i],
                layer.vb[i],
                u0.ua,
                u0.ub,
                p.hidden.ha as u8,
                p.hidden.hb as u8,
                p.ask.ua,
                p.ask.ub,
                p.bid.ua,
                p.bid.ub
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

fn empty_table(layers: usize, nodes: usize) -> ValueTable {
    let blank = NodePolicy {
        interior: Action::Wait,
        hidden: HiddenFlags::NONE,
        ask: SwitchDecision::ZERO,
        bid: SwitchDecision::ZERO,
    };
    ValueTable {
        layers: (0..layers)
            .map(|_| Layer {
                v0: vec![0.0; nodes],
                va: vec![0.0; nodes],
                vb: vec![0.0; nodes],
                policy: vec![blank; nodes],
            })
            .collect(),
    }
}

fn flag(v: &str) -> Result<bool> {
    match v {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(bad(format!("flag must be 0 or 1, got '{v}'"))),
    }
}

pub fn read_csv<R: BufRead>(r: R) -> Result<(RunConfig, ValueTable)> {
    let mut lines = r.lines();
    let mut config_text = String::new();
    let mut hash = None;
    let mut version_seen = false;
    let mut header_done = false;
    for line in lines.by_ref() {
        let line = line?;
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some(v) = rest.strip_prefix("lobswitch policy v") {
                if v.trim() != FORMAT_VERSION.to_string() {
                    return Err(bad(format!("unsupported version '{v}'")));
                }
                version_seen = true;
            } else if let Some(h) = rest.strip_prefix("config_hash: ") {
                hash = Some(h.trim().to_string());
            } else if let Some(c) = rest.strip_prefix("config: ") {
                config_text.push_str(c);
                config_text.push('\n');
            }
            continue;
        }
        if line.trim() != COLUMNS {
            return Err(bad(format!("unexpected column line '{line}'")));
        }
        header_done = true;
        break;
    }
    if !version_seen || !header_done {
        return Err(bad("missing policy header"));
    }
    let config = RunConfig::parse(&config_text)?;
    if hash.as_deref() != Some(config.hash().as_str()) {
        return Err(bad("config hash does not match the embedded config"));
    }
    let grid = Grid::build(config.grid)?;
    let n_layers = config.grid.steps + 1;
    let mut table = empty_table(n_layers, grid.len());
    let mut expected = 0usize;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 19 {
            return Err(bad(format!("record {expected}: expected 19 fields, got {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number '{s}'")));
        let k: usize = f[0].parse().map_err(|_| bad(format!("bad layer '{}'", f[0])))?;
        let i: usize = f[1].parse().map_err(|_| bad(format!("bad node '{}'", f[1])))?;
        if k * grid.len() + i != expected || k >= n_layers || i >= grid.len() {
            return Err(bad(format!("record out of order at ({k}, {i})")));
        }
        expected += 1;
        let layer = &mut table.layers[k];
        layer.v0[i] = num(f[7])?;
        layer.va[i] = num(f[8])?;
        layer.vb[i] = num(f[9])?;
        let u0 = SwitchDecision::new(num(f[11])?, num(f[12])?);
        layer.policy[i] = NodePolicy {
            interior: match f[10] {
                "wait" => Action::Wait,
                "trade" => Action::Trade(u0),
                other => return Err(bad(format!("unknown action '{other}'"))),
            },
            hidden: HiddenFlags {
                ha: flag(f[13])?,
                hb: flag(f[14])?,
            },
            ask: SwitchDecision::new(num(f[15])?, num(f[16])?),
            bid: SwitchDecision::new(num(f[17])?, num(f[18])?),
        };
    }
    if expected != n_layers * grid.len() {
        return Err(bad(format!(
            "expected {} records, found {expected}",
            n_layers * grid.len()
        )));
    }
    Ok((config, table))
}

fn put_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

pub fn write_binary<W: Write>(mut w: W, config: &RunConfig, table: &ValueTable) -> Result<()> {
    let grid = check_shape(config, table)?;
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    put_str(&mut w, &config.canonical())?;
    put_str(&mut w, &config.hash())?;
    w.write_all(&(table.layers.len() as u32).to_le_bytes())?;
    w.write_all(&(grid.len() as u32).to_le_bytes())?;
    let mut rec = Vec::with_capacity(75);
    for layer in &table.layers {
        for i in 0..grid.len() {
            let p = &layer.policy[i];
            let (wait, u0) = match p.interior {
                Action::Wait => (1u8, SwitchDecision::ZERO),
                Action::Trade(u) => (0u8, u),
            };
            rec.clear();
            for v in [layer.v0[i], layer.va[i], layer.vb[i]] {
                rec.extend_from_slice(&v.to_le_bytes());
            }
            rec.push(wait);
            rec.extend_from_slice(&u0.ua.to_le_bytes());
            rec.extend_from_slice(&u0.ub.to_le_bytes());
            rec.push(p.hidden.ha as u8);
            rec.push(p.hidden.hb as u8);
            for v in [p.ask.ua, p.ask.ub, p.bid.ua, p.bid.ub] {
                rec.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|_| bad("truncated header"))?;
    Ok(u32::from_le_bytes(b))
}

fn get_str<R: Read>(r: &mut R) -> Result<String> {
    let len = get_u32(r)? as usize;
    if len > 1 << 20 {
        return Err(bad("header string too long"));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf).map_err(|_| bad("truncated header"))?;
    String::from_utf8(buf).map_err(|_| bad("header is not UTF-8"))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<(RunConfig, ValueTable)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
    if &magic != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = get_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let config = RunConfig::parse(&get_str(&mut r)?)?;
    let hash = get_str(&mut r)?;
    if hash != config.hash() {
        return Err(bad("config hash does not match the embedded config"));
    }
    let grid = Grid::build(config.grid)?;
    let n_layers = get_u32(&mut r)? as usize;
    let n_nodes = get_u32(&mut r)? as usize;
    if n_layers != config.grid.steps + 1 || n_nodes != grid.len() {
        return Err(bad("table shape does not match the embedded grid"));
    }
    let mut table = empty_table(n_layers, n_nodes);
    let mut rec = [0u8; 75];
    let f = |b: &[u8], at: usize| f64::from_le_bytes(b[at..at + 8].try_into().unwrap());
    let flag = |v: u8| match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(bad(format!("flag byte {v}"))),
    };
    for layer in table.layers.iter_mut() {
        for i in 0..n_nodes {
            r.read_exact(&mut rec).map_err(|_| bad("truncated records"))?;
            layer.v0[i] = f(&rec, 0);
            layer.va[i] = f(&rec, 8);
            layer.vb[i] = f(&rec, 16);
            let u0 = SwitchDecision::new(f(&rec, 25), f(&rec, 33));
            layer.policy[i] = NodePolicy {
                interior: if flag(rec[24])? {
                    Action::Wait
                } else {
                    Action::Trade(u0)
                },
                hidden: HiddenFlags {
                    ha: flag(rec[41])?,
                    hb: flag(rec[42])?,
                },
                ask: SwitchDecision::new(f(&rec, 43), f(&rec, 51)),
                bid: SwitchDecision::new(f(&rec, 59), f(&rec, 67)),
            };
        }
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(bad("trailing bytes after records"));
    }
    Ok((config, table))
}

/// Reads either format, recognizing the binary one by its magic.
pub fn read_any(bytes: &[u8]) -> Result<(RunConfig, ValueTable)> {
    if bytes.starts_with(MAGIC) {
        read_binary(bytes)
    } else {
        read_csv(bytes)
    }
}
