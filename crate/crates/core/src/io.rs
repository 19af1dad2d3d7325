//! Binary artifacts. Every file ends with the SHA-256 of all preceding bytes.
//!
//! * `NLT1`: magic, `n: u8`, `r: u8`, base truth table as length-prefixed hex, monomial
//!   ordering tag (length-prefixed), then `2^C(n,r)` value bytes.
//! * `AMS1`: magic, `count: u64` LE, then `count` packed 6x6 matrices as `u64` LE, ascending.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::boolfn::{BooleanFunction, MonomialOrdering};
use crate::error::{Error, Result};
use crate::nonlin::NlTable;
use crate::orbit::MatrixSet;

const NLT_MAGIC: &[u8; 4] = b"NLT1";
const AMS_MAGIC: &[u8; 4] = b"AMS1";
const TRAILER: usize = 32;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn seal(mut body: Vec<u8>) -> Vec<u8> {
    let digest = Sha256::digest(&body);
    body.extend_from_slice(&digest);
    body
}

/// Checks the trailer and returns the body.
fn unseal(bytes: &[u8]) -> Result<&[u8]> {
    if bytes.len() < TRAILER {
        return Err(Error::InputHash(format!("file of {} bytes has no trailer", bytes.len())));
    }
    let (body, trailer) = bytes.split_at(bytes.len() - TRAILER);
    if Sha256::digest(body).as_slice() != trailer {
        return Err(Error::InputHash("trailer does not match contents".into()));
    }
    Ok(body)
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Format("unexpected end of data".into()));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn short_str(&mut self) -> Result<&'a str> {
        let len = self.u8()? as usize;
        std::str::from_utf8(self.take(len)?).map_err(|e| Error::Format(e.to_string()))
    }
}

pub fn encode_nl_table(table: &NlTable) -> Vec<u8> {
    let hex = table.base().to_hex();
    let tag = MonomialOrdering::TAG;
    let mut body = Vec::with_capacity(table.len() + 64);
    body.extend_from_slice(NLT_MAGIC);
    body.push(table.n() as u8);
    body.push(table.r() as u8);
    body.push(hex.len() as u8);
    body.extend_from_slice(hex.as_bytes());
    body.push(tag.len() as u8);
    body.extend_from_slice(tag.as_bytes());
    body.extend_from_slice(table.values());
    seal(body)
}

pub fn decode_nl_table(bytes: &[u8]) -> Result<NlTable> {
    let mut rd = Reader { buf: unseal(bytes)? };
    if rd.take(4)? != NLT_MAGIC {
        return Err(Error::Format("not an NLT1 table".into()));
    }
    let n = rd.u8()? as usize;
    let r = rd.u8()? as usize;
    let base = BooleanFunction::from_hex(n, rd.short_str()?)?;
    rd.short_str()?.parse::<MonomialOrdering>()?;
    NlTable::from_parts(base, r, rd.buf.to_vec())
}

pub fn encode_matrix_set(set: &MatrixSet) -> Vec<u8> {
    let mut body = Vec::with_capacity(12 + 8 * set.len());
    body.extend_from_slice(AMS_MAGIC);
    body.extend_from_slice(&(set.len() as u64).to_le_bytes());
    for &k in set.keys() {
        body.extend_from_slice(&k.to_le_bytes());
    }
    seal(body)
}

pub fn decode_matrix_set(bytes: &[u8]) -> Result<MatrixSet> {
    let mut rd = Reader { buf: unseal(bytes)? };
    if rd.take(4)? != AMS_MAGIC {
        return Err(Error::Format("not an AMS1 matrix set".into()));
    }
    let count = rd.u64()? as usize;
    if rd.buf.len() != 8 * count {
        return Err(Error::Format(format!(
            "expected {count} matrices, found {} bytes",
            rd.buf.len()
        )));
    }
    let keys: Vec<u64> = (0..count).map(|_| rd.u64()).collect::<Result<_>>()?;
    if keys.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Format("matrix keys are not strictly ascending".into()));
    }
    MatrixSet::from_keys(keys)
}

/// Writes the encoded bytes and returns their SHA-256.
fn write_sealed(path: &Path, bytes: &[u8]) -> Result<String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)?;
    Ok(sha256_hex(bytes))
}

pub fn write_nl_table(path: &Path, table: &NlTable) -> Result<String> {
    write_sealed(path, &encode_nl_table(table))
}

/// Loads a table together with the SHA-256 of the file.
pub fn read_nl_table(path: &Path) -> Result<(NlTable, String)> {
    let bytes = fs::read(path)?;
    Ok((decode_nl_table(&bytes)?, sha256_hex(&bytes)))
}

pub fn write_matrix_set(path: &Path, set: &MatrixSet) -> Result<String> {
    write_sealed(path, &encode_matrix_set(set))
}

pub fn read_matrix_set(path: &Path) -> Result<(MatrixSet, String)> {
    let bytes = fs::read(path)?;
    Ok((decode_matrix_set(&bytes)?, sha256_hex(&bytes)))
}
