//! Process-wide read-consistent memo table.
//!
//! Readers see either no entry or a fully computed one: values are computed
//! outside the lock and published whole.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, OnceLock, RwLock};

type Table = HashMap<(TypeId, &'static str), Box<dyn Any + Send + Sync>>;

fn table() -> &'static RwLock<Table> {
    static TABLE: OnceLock<RwLock<Table>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub(crate) fn memo<K, V>(tag: &'static str, key: K, compute: impl FnOnce() -> V) -> Arc<V>
where
    K: Hash + Eq + Send + Sync + 'static,
    V: Send + Sync + 'static,
{
    let slot = (TypeId::of::<(K, V)>(), tag);
    {
        let t = table().read().expect("memo table poisoned");
        if let Some(m) = t.get(&slot) {
            let m = m.downcast_ref::<HashMap<K, Arc<V>>>().expect("memo slot type");
            if let Some(v) = m.get(&key) {
                return v.clone();
            }
        }
    }
    let v = Arc::new(compute());
    let mut t = table().write().expect("memo table poisoned");
    let m = t
        .entry(slot)
        .or_insert_with(|| Box::new(HashMap::<K, Arc<V>>::new()))
        .downcast_mut::<HashMap<K, Arc<V>>>()
        .expect("memo slot type");
    m.entry(key).or_insert(v).clone()
}
