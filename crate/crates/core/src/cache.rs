//! On-disk caches: JSON envelopes carrying a format version, a key and the
//! SHA-256 of the payload text.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chartable::{assemble, character_table, CharacterTable};
use crate::classfn::ClassFn;
use crate::error::{Error, Result};
use crate::gelfand_graev::BesselTable;
use crate::matgroup::FiniteGroup;

pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope {
    version: u32,
    kind: String,
    key: String,
    sha256: String,
    payload: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CacheStatus {
    Disabled,
    Hit,
    Miss,
}

pub fn store<T: Serialize>(path: &Path, kind: &str, key: &str, value: &T) -> Result<()> {
    let payload = serde_json::to_string(value)?;
    let env = Envelope { version: CACHE_VERSION, kind: kind.into(), key: key.into(), sha256: sha256_hex(payload.as_bytes()), payload };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_string(&env)?)?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

/// `Ok(None)` when the file is absent; `CacheCorrupt` on any integrity failure.
pub fn load<T: DeserializeOwned>(path: &Path, kind: &str, key: &str) -> Result<Option<T>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let corrupt = |what: &str| Error::CacheCorrupt(format!("{}: {what}", path.display()));
    let env: Envelope = serde_json::from_str(&text).map_err(|e| corrupt(&e.to_string()))?;
    if env.version != CACHE_VERSION {
        return Err(corrupt(&format!("version {} (expected {CACHE_VERSION})", env.version)));
    }
    if env.kind != kind || env.key != key {
        return Err(corrupt("key mismatch"));
    }
    if sha256_hex(env.payload.as_bytes()) != env.sha256 {
        return Err(corrupt("checksum mismatch"));
    }
    serde_json::from_str(&env.payload).map(Some).map_err(|e| corrupt(&e.to_string()))
}

/// Hash of the group's defining data and class inventory.
pub fn group_key(g: &FiniteGroup) -> String {
    let f = g.field();
    let cl = g.classes();
    let mut h = Sha256::new();
    h.update(format!("{}|{}|{:?}|{}|{}|", g.name, f.p(), f.modulus(), g.n(), g.order()));
    for k in 0..cl.len() {
        h.update(format!("{}:{}:{};", cl.sizes[k], cl.orders[k], g.elem(cl.reps[k]).key(f.size())));
    }
    hex::encode(h.finalize())
}

#[derive(Serialize, Deserialize)]
pub struct StoredFn {
    pub m: u32,
    pub den: i64,
    pub vals: Vec<Vec<(u32, i64)>>,
}

impl From<&ClassFn> for StoredFn {
    fn from(f: &ClassFn) -> Self {
        StoredFn { m: f.order(), den: f.den(), vals: (0..f.len()).map(|k| f.raw(k).clone()).collect() }
    }
}

impl StoredFn {
    pub fn to_classfn(&self) -> Result<ClassFn> {
        if self.m == 0 || self.den <= 0 || self.vals.iter().flatten().any(|t| t.0 >= self.m) {
            return Err(Error::CacheCorrupt("malformed class function".into()));
        }
        Ok(ClassFn::new(self.m, self.den, self.vals.clone()))
    }
}

/// Group header and class inventory, written next to the tables for inspection.
#[derive(Serialize, Deserialize)]
pub struct ContextRecord {
    pub name: String,
    pub n: usize,
    pub p: u32,
    pub modulus: Vec<u32>,
    pub order: u64,
    pub sizes: Vec<u64>,
    pub orders: Vec<u32>,
    pub reps: Vec<u64>,
}

impl ContextRecord {
    pub fn of(g: &FiniteGroup) -> ContextRecord {
        let f = g.field();
        let cl = g.classes();
        ContextRecord {
            name: g.name.clone(),
            n: g.n(),
            p: f.p(),
            modulus: f.modulus().to_vec(),
            order: g.order(),
            sizes: cl.sizes.clone(),
            orders: cl.orders.clone(),
            reps: cl.reps.iter().map(|&r| g.elem(r).key(f.size())).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StoredTable {
    degrees: Vec<u64>,
    chars: Vec<StoredFn>,
}

fn slug(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Cache {
        Cache { dir }
    }

    pub fn disabled() -> Cache {
        Cache { dir: None }
    }

    fn path(&self, kind: &str, g: &FiniteGroup, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{kind}-{}-{}.json", slug(&g.name), &key[..16])))
    }

    /// Character table of `g`, loaded and re-verified when cached, else computed and stored.
    pub fn character_table(&self, g: &FiniteGroup, seed: u64) -> Result<(CharacterTable, CacheStatus)> {
        let key = group_key(g);
        let Some(path) = self.path("table", g, &key) else {
            return Ok((character_table(g, seed)?, CacheStatus::Disabled));
        };
        if let Some(stored) = load::<StoredTable>(&path, "table", &key)? {
            let chars = stored.chars.iter().map(StoredFn::to_classfn).collect::<Result<Vec<_>>>()?;
            let t = assemble(g, chars, stored.degrees).map_err(|e| match e {
                Error::CacheCorrupt(_) => e,
                other => Error::CacheCorrupt(format!("{}: {other}", path.display())),
            })?;
            return Ok((t, CacheStatus::Hit));
        }
        let t = character_table(g, seed)?;
        let stored = StoredTable { degrees: t.degrees.clone(), chars: t.chars.iter().map(StoredFn::from).collect() };
        store(&path, "table", &key, &stored)?;
        if let Some(ctx) = self.path("context", g, &key) {
            store(&ctx, "context", &key, &ContextRecord::of(g))?;
        }
        Ok((t, CacheStatus::Miss))
    }

    /// Bessel tables keyed by the group and a label for `ψ`.
    pub fn store_bessel(&self, g: &FiniteGroup, psi_label: &str, tables: &[BesselTable]) -> Result<()> {
        let key = format!("{}|{psi_label}", group_key(g));
        let Some(path) = self.path(&format!("bessel-{}", slug(psi_label)), g, &group_key(g)) else { return Ok(()) };
        let stored: Vec<(usize, StoredFn)> = tables.iter().map(|b| (b.pi, StoredFn::from(&b.values))).collect();
        store(&path, "bessel", &key, &stored)
    }

    pub fn load_bessel(&self, g: &FiniteGroup, psi_label: &str) -> Result<Option<Vec<BesselTable>>> {
        let key = format!("{}|{psi_label}", group_key(g));
        let Some(path) = self.path(&format!("bessel-{}", slug(psi_label)), g, &group_key(g)) else { return Ok(None) };
        let Some(stored) = load::<Vec<(usize, StoredFn)>>(&path, "bessel", &key)? else { return Ok(None) };
        stored.iter().map(|(pi, f)| Ok(BesselTable { pi: *pi, values: f.to_classfn()? })).collect::<Result<Vec<_>>>().map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::matgroup::DEFAULT_BUDGET;
    use std::sync::Arc;

    fn tmpdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("wb-cache-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn table_round_trip_and_corruption() {
        let g = FiniteGroup::general_linear(Arc::new(Field::new(3, 1).unwrap()), 2, DEFAULT_BUDGET).unwrap();
        let dir = tmpdir("table");
        let cache = Cache::new(Some(dir.clone()));
        let (a, s1) = cache.character_table(&g, 1).unwrap();
        let (b, s2) = cache.character_table(&g, 1).unwrap();
        assert_eq!((s1, s2), (CacheStatus::Miss, CacheStatus::Hit));
        assert!(a.chars.iter().zip(&b.chars).all(|(x, y)| x.exact_eq(y)));
        assert_eq!(a.degrees, b.degrees);

        let file = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).find(|p| p.file_name().unwrap().to_str().unwrap().starts_with("table")).unwrap();
        let text = std::fs::read_to_string(&file).unwrap();
        let tampered = text.replacen("\\\"den\\\":1", "\\\"den\\\":2", 1);
        assert_ne!(text, tampered);
        std::fs::write(&file, tampered).unwrap();
        assert!(matches!(cache.character_table(&g, 1), Err(Error::CacheCorrupt(_))));

        // a consistent checksum over wrong content is still rejected by orthogonality
        let env: Envelope = serde_json::from_str(&text).unwrap();
        let mut stored: StoredTable = serde_json::from_str(&env.payload).unwrap();
        let last = stored.chars.len() - 1;
        stored.chars[last].vals[1].push((0, 1));
        store(&file, "table", &env.key, &stored).unwrap();
        assert!(matches!(cache.character_table(&g, 1), Err(Error::CacheCorrupt(_))));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn version_and_key_are_checked() {
        let dir = tmpdir("env");
        let path = dir.join("x.json");
        store(&path, "k", "key", &vec![1u32, 2, 3]).unwrap();
        assert_eq!(load::<Vec<u32>>(&path, "k", "key").unwrap(), Some(vec![1, 2, 3]));
        assert!(load::<Vec<u32>>(&path, "k", "other").is_err());
        let text = std::fs::read_to_string(&path).unwrap().replace("\"version\":1", "\"version\":0");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(load::<Vec<u32>>(&path, "k", "key"), Err(Error::CacheCorrupt(_))));
        assert_eq!(load::<Vec<u32>>(&dir.join("absent.json"), "k", "key").unwrap(), None);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
