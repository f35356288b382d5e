//! Shared memo table: readers never block readers; a missing entry is
//! computed once, outside the map lock.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, OnceLock, RwLock};

use uqc_core::source::{MarginalFamily, QuantumSource};
use uqc_core::{DensityOperator, Result};

pub struct SharedCache<K, V> {
    slots: RwLock<HashMap<K, Arc<OnceLock<V>>>>,
}

impl<K, V> Default for SharedCache<K, V> {
    fn default() -> Self {
        Self {
            slots: RwLock::new(HashMap::new()),
        }
    }
}

impl<K: Eq + Hash + Clone, V: Clone> SharedCache<K, V> {
    pub fn new() -> Self {
        Self::default()
    }

    fn slot(&self, key: &K) -> Arc<OnceLock<V>> {
        if let Some(s) = self.slots.read().expect("cache lock").get(key) {
            return Arc::clone(s);
        }
        let mut w = self.slots.write().expect("cache lock");
        Arc::clone(w.entry(key.clone()).or_default())
    }

    /// Returns the cached value, computing it with `f` on first use.
    /// Concurrent callers for the same key wait for a single computation.
    pub fn get_or_insert_with(&self, key: K, f: impl FnOnce() -> V) -> V {
        self.slot(&key).get_or_init(f).clone()
    }

    pub fn get(&self, key: &K) -> Option<V> {
        self.slots
            .read()
            .expect("cache lock")
            .get(key)
            .and_then(|s| s.get().cloned())
    }

    pub fn len(&self) -> usize {
        self.slots
            .read()
            .expect("cache lock")
            .values()
            .filter(|s| s.get().is_some())
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

type Marginal = std::result::Result<Arc<DensityOperator>, String>;

/// A source whose marginals are memoized.
pub struct CachedSource {
    source: QuantumSource,
    marginals: SharedCache<usize, Marginal>,
}

impl CachedSource {
    pub fn new(source: QuantumSource) -> Self {
        Self {
            source,
            marginals: SharedCache::new(),
        }
    }

    pub fn source(&self) -> &QuantumSource {
        &self.source
    }

    pub fn marginal_arc(&self, n: usize) -> std::result::Result<Arc<DensityOperator>, String> {
        self.marginals.get_or_insert_with(n, || {
            self.source.marginal(n).map(Arc::new).map_err(|e| e.to_string())
        })
    }
}

impl MarginalFamily for CachedSource {
    fn site_dim(&self) -> usize {
        self.source.site_dim()
    }

    fn marginal(&self, n: usize) -> Result<DensityOperator> {
        match self.marginal_arc(n) {
            Ok(m) => Ok((*m).clone()),
            // Recompute to surface the typed error.
            Err(_) => self.source.marginal(n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn computes_once_under_contention() {
        let cache: SharedCache<u32, u64> = SharedCache::new();
        let calls = AtomicUsize::new(0);
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| {
                    for k in 0..16 {
                        let v = cache.get_or_insert_with(k, || {
                            calls.fetch_add(1, Ordering::SeqCst);
                            u64::from(k) * 3
                        });
                        assert_eq!(v, u64::from(k) * 3);
                    }
                });
            }
        });
        assert_eq!(calls.load(Ordering::SeqCst), 16);
        assert_eq!(cache.len(), 16);
        assert_eq!(cache.get(&5), Some(15));
    }

    #[test]
    fn cached_marginals_match() {
        let src = QuantumSource::iid(DensityOperator::diagonal(&[0.7, 0.3]).unwrap());
        let c = CachedSource::new(src.clone());
        let a = c.marginal(3).unwrap();
        assert_eq!(a, src.marginal(3).unwrap());
        assert!(Arc::ptr_eq(&c.marginal_arc(3).unwrap(), &c.marginal_arc(3).unwrap()));
    }
}
