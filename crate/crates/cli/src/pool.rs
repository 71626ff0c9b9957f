//! Deterministic parallel map: work items are computed by striped workers
//! and reassembled in input order, so output is byte-identical across
//! worker counts.

use std::sync::Mutex;

pub fn run_indexed<T, F>(n: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.max(1).min(n.max(1));
    if threads == 1 {
        return (0..n).map(f).collect();
    }
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for w in 0..threads {
            let f = &f;
            let slots = &slots;
            scope.spawn(move || {
                let mut idx = w;
                while idx < n {
                    let v = f(idx);
                    slots.lock().expect("pool lock").idx_set(idx, v);
                    idx += threads;
                }
            });
        }
    });
    slots
        .into_inner()
        .expect("pool lock")
        .into_iter()
        .map(|v| v.expect("all slots filled"))
        .collect()
}

trait IdxSet<T> {
    fn idx_set(&mut self, idx: usize, v: T);
}

impl<T> IdxSet<T> for Vec<Option<T>> {
    fn idx_set(&mut self, idx: usize, v: T) {
        self[idx] = Some(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_input_order_for_any_thread_count() {
        let inputs: Vec<usize> = (0..57).collect();
        let one = run_indexed(inputs.len(), 1, |i| i * i);
        for t in [2, 3, 8] {
            let multi = run_indexed(inputs.len(), t, |i| i * i);
            assert_eq!(one, multi);
        }
    }
}
