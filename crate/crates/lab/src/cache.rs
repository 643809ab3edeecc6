//! Thread-safe level cache for the commutator tables.

use dunkl_core::commutator::{CommutatorSetup, LevelSource, LevelTable};
use dunkl_core::Result;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type Slot = Arc<OnceLock<Result<Arc<LevelTable>>>>;

struct Entry {
    slot: Slot,
    last_use: u64,
}

#[derive(Default)]
struct State {
    entries: HashMap<i32, Entry>,
    clock: u64,
    builds: usize,
}

/// Insert-once cache of level tables shared by worker threads.
///
/// Each level is built by the first thread that asks for it; concurrent
/// requests for the same level wait on that build. When more than `capacity`
/// levels are resident, the least recently used one is dropped and rebuilt on
/// the next request. Tables are deterministic, so eviction never changes
/// results.
pub struct SharedLevels<'a> {
    setup: &'a CommutatorSetup,
    capacity: usize,
    state: Mutex<State>,
}

impl<'a> SharedLevels<'a> {
    /// `capacity == 0` keeps every level.
    pub fn new(setup: &'a CommutatorSetup, capacity: usize) -> Self {
        Self { setup, capacity, state: Mutex::new(State::default()) }
    }

    pub fn setup(&self) -> &CommutatorSetup {
        self.setup
    }

    pub fn resident(&self) -> usize {
        self.state.lock().unwrap().entries.len()
    }

    /// Number of table constructions so far, counting rebuilds after eviction.
    pub fn builds(&self) -> usize {
        self.state.lock().unwrap().builds
    }

    fn slot(&self, level: i32) -> (Slot, bool) {
        let mut st = self.state.lock().unwrap();
        st.clock += 1;
        let now = st.clock;
        if let Some(e) = st.entries.get_mut(&level) {
            e.last_use = now;
            return (e.slot.clone(), false);
        }
        let slot: Slot = Arc::default();
        st.entries.insert(level, Entry { slot: slot.clone(), last_use: now });
        st.builds += 1;
        if self.capacity > 0 && st.entries.len() > self.capacity {
            let victim = st
                .entries
                .iter()
                .filter(|(&l, e)| l != level && e.slot.get().is_some())
                .min_by_key(|(_, e)| e.last_use)
                .map(|(&l, _)| l);
            if let Some(l) = victim {
                st.entries.remove(&l);
            }
        }
        (slot, true)
    }
}

impl LevelSource for SharedLevels<'_> {
    fn level(&self, level: i32) -> Result<Arc<LevelTable>> {
        let (slot, _) = self.slot(level);
        slot.get_or_init(|| self.setup.build_level(level).map(Arc::new)).clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dunkl_core::commutator::{PanelLayout, TableLayout};
    use dunkl_core::geometry::RootSystem;
    use dunkl_core::kernels::builtin_riesz_kernel;
    use dunkl_core::measure::WeightedMeasure;

    fn setup() -> CommutatorSetup {
        let m = WeightedMeasure::new(RootSystem::rank1(1.0).unwrap());
        let ks = builtin_riesz_kernel(&m, 0).unwrap();
        let layout = TableLayout { output: PanelLayout { octaves: 4, ..Default::default() }, ..Default::default() };
        CommutatorSetup::new(&m, ks, layout).unwrap()
    }

    #[test]
    fn builds_each_level_once_across_threads() {
        let s = setup();
        let cache = SharedLevels::new(&s, 0);
        std::thread::scope(|sc| {
            for _ in 0..4 {
                sc.spawn(|| {
                    for l in [-2, -1, 0, 1, 0, -1] {
                        cache.level(l).unwrap();
                    }
                });
            }
        });
        assert_eq!(cache.builds(), 4);
        assert_eq!(cache.resident(), 4);
    }

    #[test]
    fn evicts_least_recently_used() {
        let s = setup();
        let cache = SharedLevels::new(&s, 2);
        let a = cache.level(0).unwrap();
        cache.level(1).unwrap();
        cache.level(0).unwrap();
        cache.level(2).unwrap();
        assert_eq!(cache.resident(), 2);
        cache.level(0).unwrap();
        assert_eq!(cache.builds(), 3);
        let again = cache.level(1).unwrap();
        assert_eq!(cache.builds(), 4);
        assert_eq!(a.entries(), cache.level(0).unwrap().entries());
        assert!(again.entries() > 0);
    }

    #[test]
    fn reports_levels_beyond_the_grid() {
        let s = setup();
        let cache = SharedLevels::new(&s, 0);
        assert!(cache.level(s.max_level() + 1).is_err());
    }
}
