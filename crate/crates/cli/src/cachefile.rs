//! Persistent map-count cache: JSON documents keyed `"g;i1,i2,..."` with
//! decimal integer values, a version tag, and producer provenance.
//! Merging is a union with an agreement check; a disagreement aborts with
//! both provenances printed.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use guekdv_core::rat::biguint_from_decimal;
use guekdv_core::store::{MapStore, Producer};

pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheDoc {
    version: u32,
    /// "oracle", "resolvent", or "mixed" (with per-entry tags below).
    producer: String,
    entries: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    entry_producers: BTreeMap<String, String>,
}

fn key_string(g: u32, i: &[u32]) -> String {
    let parts: Vec<String> = i.iter().map(|v| v.to_string()).collect();
    format!("{g};{}", parts.join(","))
}

fn parse_key(key: &str) -> Result<(u32, Vec<u32>)> {
    let (g, rest) = key
        .split_once(';')
        .ok_or_else(|| anyhow!("bad cache key {key:?}"))?;
    let g: u32 = g.parse().with_context(|| format!("bad genus in {key:?}"))?;
    let mut i = Vec::new();
    if !rest.is_empty() {
        for p in rest.split(',') {
            i.push(p.parse::<u32>().with_context(|| format!("bad index in {key:?}"))?);
        }
    }
    Ok((g, i))
}

pub fn load(path: &Path) -> Result<MapStore> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading cache {}", path.display()))?;
    let doc: CacheDoc =
        serde_json::from_str(&text).with_context(|| format!("parsing cache {}", path.display()))?;
    if doc.version != CACHE_VERSION {
        bail!(
            "cache {} has version {}, expected {CACHE_VERSION}",
            path.display(),
            doc.version
        );
    }
    let default_producer = Producer::from_tag(&doc.producer);
    let mut store = MapStore::new();
    for (key, value) in &doc.entries {
        let (g, i) = parse_key(key)?;
        let v = biguint_from_decimal(value)
            .ok_or_else(|| anyhow!("bad value {value:?} at {key:?}"))?;
        let producer = match doc.entry_producers.get(key) {
            Some(tag) => Producer::from_tag(tag)
                .ok_or_else(|| anyhow!("bad producer tag {tag:?} at {key:?}"))?,
            None => default_producer
                .ok_or_else(|| anyhow!("cache {} needs per-entry producers", path.display()))?,
        };
        store
            .insert(g, i, v, producer)
            .map_err(|e| anyhow!("cache {}: {e}", path.display()))?;
    }
    Ok(store)
}

pub fn save(store: &MapStore, path: &Path) -> Result<()> {
    let mut entries = BTreeMap::new();
    let mut entry_producers = BTreeMap::new();
    let mut tags: Vec<&'static str> = Vec::new();
    for ((g, i), (v, p)) in store.iter() {
        let key = key_string(*g, i);
        entries.insert(key.clone(), v.to_string());
        entry_producers.insert(key, p.tag().to_string());
        if !tags.contains(&p.tag()) {
            tags.push(p.tag());
        }
    }
    let uniform = if tags.len() == 1 { tags[0] } else { "mixed" };
    let doc = CacheDoc {
        version: CACHE_VERSION,
        producer: uniform.to_string(),
        entries,
        entry_producers: if tags.len() <= 1 {
            BTreeMap::new()
        } else {
            entry_producers
        },
    };
    let text = serde_json::to_string_pretty(&doc)?;
    std::fs::write(path, text).with_context(|| format!("writing cache {}", path.display()))?;
    Ok(())
}

/// Union of several cache files with the agreement check.
pub fn merge(paths: &[std::path::PathBuf]) -> Result<MapStore> {
    let mut acc = MapStore::new();
    for p in paths {
        let s = load(p)?;
        acc.merge(&s)
            .map_err(|e| anyhow!("merging {}: {e}", p.display()))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn save_load_merge() {
        let dir = std::env::temp_dir().join("guekdv-cache-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p1 = dir.join("a.json");
        let p2 = dir.join("b.json");

        let mut a = MapStore::new();
        a.insert(0, vec![4], BigUint::from(2u32), Producer::Oracle)
            .unwrap();
        save(&a, &p1).unwrap();

        let mut b = MapStore::new();
        b.insert(1, vec![4], BigUint::from(1u32), Producer::Resolvent)
            .unwrap();
        save(&b, &p2).unwrap();

        let m = merge(&[p1.clone(), p2.clone()]).unwrap();
        assert_eq!(m.len(), 2);

        // conflict aborts
        let mut c = MapStore::new();
        c.insert(0, vec![4], BigUint::from(3u32), Producer::Resolvent)
            .unwrap();
        let p3 = dir.join("c.json");
        save(&c, &p3).unwrap();
        let e = merge(&[p1, p3]);
        assert!(e.is_err());
        let msg = format!("{}", e.unwrap_err());
        assert!(msg.contains("oracle") && msg.contains("resolvent"), "{msg}");
    }
}
