//! Persistent content-addressed cache for character tables and Schur
//! polynomials. Entries are JSON files named by the SHA-256 of
//! `(operation, canonical arguments)`; each carries a checksum of its
//! payload, and unreadable or mismatching entries count as misses.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::partitions::{character_table, enumerate_partitions, seed_characters, Partition};
use crate::poly::MultiPoly;
use crate::schur::{schur_poly, seed_schur};

const FORMAT: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    pub corrupt: usize,
    pub writes: usize,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    format: u32,
    op: String,
    args: Value,
    checksum: String,
    payload: String,
}

pub struct Cache {
    dir: PathBuf,
    stats: Mutex<CacheStats>,
}

fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

impl Cache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Cache> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Cache {
            dir: dir.as_ref().to_path_buf(),
            stats: Mutex::new(CacheStats::default()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn stats(&self) -> CacheStats {
        *self.stats.lock().expect("cache stats poisoned")
    }

    fn bump(&self, f: impl FnOnce(&mut CacheStats)) {
        f(&mut self.stats.lock().expect("cache stats poisoned"));
    }

    /// File path for an operation and its arguments.
    pub fn path_for(&self, op: &str, args: &Value) -> PathBuf {
        // serde_json maps are ordered, so this serialization is canonical.
        let key = json!({ "format": FORMAT, "op": op, "args": args }).to_string();
        self.dir.join(format!("{}.json", sha256_hex(key.as_bytes())))
    }

    pub fn get<T: DeserializeOwned>(&self, op: &str, args: &Value) -> Option<T> {
        let path = self.path_for(op, args);
        let Ok(text) = fs::read_to_string(&path) else {
            self.bump(|s| s.misses += 1);
            return None;
        };
        let decoded = serde_json::from_str::<Entry>(&text).ok().filter(|e| {
            e.format == FORMAT && e.op == op && &e.args == args && sha256_hex(e.payload.as_bytes()) == e.checksum
        });
        match decoded.and_then(|e| serde_json::from_str(&e.payload).ok()) {
            Some(value) => {
                self.bump(|s| s.hits += 1);
                Some(value)
            }
            None => {
                self.bump(|s| {
                    s.corrupt += 1;
                    s.misses += 1;
                });
                None
            }
        }
    }

    pub fn put<T: Serialize>(&self, op: &str, args: &Value, value: &T) -> Result<()> {
        let payload = serde_json::to_string(value).expect("cache payload serializes");
        let entry = Entry {
            format: FORMAT,
            op: op.to_string(),
            args: args.clone(),
            checksum: sha256_hex(payload.as_bytes()),
            payload,
        };
        let path = self.path_for(op, args);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_string(&entry).expect("cache entry serializes"))?;
        fs::rename(&tmp, &path)?;
        self.bump(|s| s.writes += 1);
        Ok(())
    }

    /// Returns the cached value or computes and stores it.
    pub fn get_or_compute<T: Serialize + DeserializeOwned>(&self, op: &str, args: Value, f: impl FnOnce() -> T) -> Result<T> {
        if let Some(v) = self.get(op, &args) {
            return Ok(v);
        }
        let v = f();
        self.put(op, &args, &v)?;
        Ok(v)
    }

    /// Character table of `S_d`, loaded into the in-process memo.
    pub fn character_table(&self, d: usize) -> Result<Vec<(Partition, Partition, i64)>> {
        let table = self.get_or_compute("character_table", json!({ "d": d }), || character_table(d))?;
        seed_characters(table.iter().cloned());
        Ok(table)
    }

    /// Schur polynomials of all partitions of `d` in `nvars` variables, loaded into the memo.
    pub fn schur_polys(&self, d: usize, nvars: usize) -> Result<Vec<(Partition, MultiPoly)>> {
        let polys = self.get_or_compute("schur_polys", json!({ "d": d, "nvars": nvars }), || {
            enumerate_partitions(d)
                .into_iter()
                .map(|l| {
                    let p = schur_poly(&l, nvars);
                    (l, p)
                })
                .collect::<Vec<_>>()
        })?;
        seed_schur(polys.iter().map(|(l, p)| (l.clone(), nvars, p.clone())));
        Ok(polys)
    }

    /// Loads character tables up to `d_chars` and Schur polynomials up to
    /// `degree` in `nvars` variables.
    pub fn warm(&self, d_chars: usize, degree: usize, nvars: usize) -> Result<()> {
        for d in 1..=d_chars {
            self.character_table(d)?;
        }
        for d in 0..=degree {
            self.schur_polys(d, nvars)?;
        }
        Ok(())
    }
}
