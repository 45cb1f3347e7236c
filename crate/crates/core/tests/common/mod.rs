#![allow(dead_code)]

pub mod fixtures;
pub mod lasso;
pub mod naive;
pub mod safety;
pub mod shapes;

use std::collections::HashMap;

use ceremony_checker::kernel::{EventLabel, Model, ModelDef};
use ceremony_checker::statespace::{explore, StateGraph};

/// Sizes of a graph that matched the naive enumerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Agreement {
    pub states: usize,
    pub transitions: usize,
}

/// Explores `def` with the kernel and with the naive enumerator and
/// compares state sets and transition multisets.
pub fn compare_with_naive(def: &ModelDef, limit: usize) -> Result<Agreement, String> {
    let model = Model::compile(def.clone()).map_err(|e| e.to_string())?;
    let ts = explore(&model, limit).map_err(|e| e.to_string())?;
    let naive = naive::Naive::new(def).enumerate(limit);

    let n = ts.state_count();
    let mut map = Vec::with_capacity(n);
    let mut hit = HashMap::new();
    for s in 0..n {
        let c = ts.config(s as u32);
        let key = (model.snapshot(&c.globals), model.render_term(&c.term));
        let Some(&i) = naive.index.get(&key) else {
            return Err(format!("kernel state {s} unknown to the naive enumerator: {}", key.1));
        };
        if let Some(prev) = hit.insert(i, s) {
            return Err(format!("kernel states {prev} and {s} render identically"));
        }
        map.push(i);
    }
    if n != naive.states.len() {
        return Err(format!("kernel has {n} states, naive enumerator {}", naive.states.len()));
    }

    let mut ours: Vec<(usize, EventLabel, usize)> =
        ts.transitions().map(|(a, l, b)| (map[a as usize], l.clone(), map[b as usize])).collect();
    let mut theirs = naive.transitions.clone();
    ours.sort();
    theirs.sort();
    if ours != theirs {
        let extra = ours.iter().find(|t| theirs.binary_search(t).is_err());
        let missing = theirs.iter().find(|t| ours.binary_search(t).is_err());
        return Err(format!(
            "transition multisets differ ({} vs {}); kernel-only {extra:?}, naive-only {missing:?}",
            ours.len(),
            theirs.len()
        ));
    }
    Ok(Agreement { states: n, transitions: ours.len() })
}
