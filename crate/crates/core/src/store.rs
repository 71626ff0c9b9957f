//! Shared store of map counts with provenance and conflict detection.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::error::{ExactError, Result};

/// Who computed a value.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Producer {
    Oracle,
    Resolvent,
}

impl Producer {
    pub fn tag(&self) -> &'static str {
        match self {
            Producer::Oracle => "oracle",
            Producer::Resolvent => "resolvent",
        }
    }

    pub fn from_tag(t: &str) -> Option<Producer> {
        match t {
            "oracle" => Some(Producer::Oracle),
            "resolvent" => Some(Producer::Resolvent),
            _ => None,
        }
    }
}

/// `(genus, sorted multiset)` key.
pub type MapKey = (u32, Vec<u32>);

/// Map-count store: idempotent inserts, values from different producers
/// must agree.
#[derive(Clone, Default, Debug)]
pub struct MapStore {
    entries: BTreeMap<MapKey, (BigUint, Producer)>,
}

impl MapStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, g: u32, i: &[u32]) -> Option<&BigUint> {
        debug_assert!(i.windows(2).all(|w| w[0] <= w[1]));
        self.entries.get(&(g, i.to_vec())).map(|(v, _)| v)
    }

    pub fn insert(&mut self, g: u32, mut i: Vec<u32>, v: BigUint, p: Producer) -> Result<()> {
        i.sort_unstable();
        let key = (g, i);
        match self.entries.get(&key) {
            Some((old, oldp)) if *old != v => Err(ExactError::CacheConflict(format!(
                "key g={} i={:?}: {} ({}) vs {} ({})",
                key.0,
                key.1,
                old,
                oldp.tag(),
                v,
                p.tag()
            ))),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(key, (v, p));
                Ok(())
            }
        }
    }

    /// Union with agreement check.
    pub fn merge(&mut self, other: &MapStore) -> Result<()> {
        for ((g, i), (v, p)) in &other.entries {
            self.insert(*g, i.clone(), v.clone(), *p)?;
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MapKey, &(BigUint, Producer))> {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn merge_rules() {
        let mut a = MapStore::new();
        a.insert(0, vec![4], BigUint::from(2u32), Producer::Oracle)
            .unwrap();
        let mut b = MapStore::new();
        b.insert(1, vec![4], BigUint::from(1u32), Producer::Resolvent)
            .unwrap();
        // disjoint merge: union
        a.merge(&b).unwrap();
        assert_eq!(a.len(), 2);
        // identical duplicate: unchanged
        a.insert(0, vec![4], BigUint::from(2u32), Producer::Resolvent)
            .unwrap();
        assert_eq!(a.len(), 2);
        // conflicting value: error
        let e = a.insert(0, vec![4], BigUint::from(3u32), Producer::Resolvent);
        assert!(matches!(e, Err(ExactError::CacheConflict(_))));
    }
}
