//! Binary model format.
//!
//! Layout: magic `STLF`, format version (u32 LE), cell kind (u8),
//! dimension block (input, hidden, output, layers as u32 LE), then every
//! parameter tensor in flatten order as little-endian f64. Round trips are
//! bitwise exact.

use std::io::{Read, Write};

use super::network::{CellKind, Dims, Network};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"STLF";
const FORMAT_VERSION: u32 = 1;

fn kind_byte(kind: CellKind) -> u8 {
    match kind {
        CellKind::Lstm => 0,
        CellKind::Rnn => 1,
        CellKind::Gru => 2,
    }
}

fn kind_from_byte(b: u8) -> Result<CellKind> {
    match b {
        0 => Ok(CellKind::Lstm),
        1 => Ok(CellKind::Rnn),
        2 => Ok(CellKind::Gru),
        other => Err(Error::BadModelFile(format!("unknown cell kind {other}"))),
    }
}

pub fn save_network<W: Write>(mut w: W, net: &Network) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    let dims = net.dims();
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&[kind_byte(net.kind())]).map_err(io_err)?;
    for d in [dims.input, dims.hidden, dims.output, dims.layers] {
        w.write_all(&(d as u32).to_le_bytes()).map_err(io_err)?;
    }
    for v in net.flatten() {
        w.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    Ok(())
}

pub fn load_network<R: Read>(mut r: R) -> Result<Network> {
    let io_err = |source| Error::Io {
        path: "<reader>".into(),
        source,
    };
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(Error::BadModelFile("bad magic bytes".into()));
    }
    let mut u32_buf = [0u8; 4];
    r.read_exact(&mut u32_buf).map_err(io_err)?;
    let version = u32::from_le_bytes(u32_buf);
    if version != FORMAT_VERSION {
        return Err(Error::BadModelFile(format!(
            "unsupported format version {version}"
        )));
    }
    let mut kind_buf = [0u8; 1];
    r.read_exact(&mut kind_buf).map_err(io_err)?;
    let kind = kind_from_byte(kind_buf[0])?;

    let mut dim = [0usize; 4];
    for d in dim.iter_mut() {
        r.read_exact(&mut u32_buf).map_err(io_err)?;
        *d = u32::from_le_bytes(u32_buf) as usize;
    }
    let dims = Dims {
        input: dim[0],
        hidden: dim[1],
        output: dim[2],
        layers: dim[3],
    };
    if dims.input == 0 || dims.hidden == 0 || dims.output == 0 || dims.layers == 0 {
        return Err(Error::BadModelFile(format!("degenerate dimensions {dims:?}")));
    }

    let mut net = Network::zeros(kind, dims);
    let mut flat = vec![0.0; net.param_count()];
    let mut f64_buf = [0u8; 8];
    for v in flat.iter_mut() {
        r.read_exact(&mut f64_buf).map_err(io_err)?;
        *v = f64::from_le_bytes(f64_buf);
    }
    // Trailing bytes mean the file does not match its own header.
    let mut extra = [0u8; 1];
    match r.read(&mut extra) {
        Ok(0) => {}
        Ok(_) => return Err(Error::BadModelFile("trailing bytes after tensors".into())),
        Err(source) => return Err(io_err(source)),
    }
    net.load_flat(&flat)?;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bitwise_exact() {
        let dims = Dims {
            input: 24,
            hidden: 10,
            output: 24,
            layers: 1,
        };
        for kind in [CellKind::Lstm, CellKind::Rnn, CellKind::Gru] {
            let net = Network::init(kind, dims, 42);
            let mut buf = Vec::new();
            save_network(&mut buf, &net).unwrap();
            let loaded = load_network(buf.as_slice()).unwrap();
            assert_eq!(loaded, net);
            let flat_a = net.flatten();
            let flat_b = loaded.flatten();
            for (a, b) in flat_a.iter().zip(&flat_b) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(load_network(&b"not a model"[..]).is_err());
        assert!(load_network(&b"STLF"[..]).is_err());
    }

    #[test]
    fn rejects_unknown_version() {
        let net = Network::zeros(
            CellKind::Rnn,
            Dims {
                input: 2,
                hidden: 2,
                output: 1,
                layers: 1,
            },
        );
        let mut buf = Vec::new();
        save_network(&mut buf, &net).unwrap();
        buf[4] = 99;
        assert!(matches!(
            load_network(buf.as_slice()),
            Err(Error::BadModelFile(_))
        ));
    }

    #[test]
    fn rejects_truncated_and_padded_files() {
        let net = Network::zeros(
            CellKind::Lstm,
            Dims {
                input: 2,
                hidden: 3,
                output: 2,
                layers: 1,
            },
        );
        let mut buf = Vec::new();
        save_network(&mut buf, &net).unwrap();
        assert!(load_network(&buf[..buf.len() - 4]).is_err());
        let mut padded = buf.clone();
        padded.extend_from_slice(&[0u8; 8]);
        assert!(load_network(padded.as_slice()).is_err());
    }
}
