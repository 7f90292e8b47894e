//! Class sizes of an equivalence presentation by explicit grouping.

use std::collections::BTreeMap;

use autostruct::conv::convolve;
use autostruct::equiv::EquivPresentation;

/// Class sizes among domain words of length at most `bound`, grouping
/// by membership in `E`.
pub fn brute_census(e: &EquivPresentation, bound: usize) -> BTreeMap<u64, u64> {
    let words: Vec<Vec<String>> = e
        .presentation()
        .domain()
        .words_up_to(bound)
        .unwrap()
        .into_iter()
        .map(|w| w.iter().map(|s| s.as_base().unwrap().to_string()).collect())
        .collect();
    let rel = e.relation();
    let mut classes: Vec<(Vec<String>, u64)> = Vec::new();
    for w in &words {
        match classes.iter_mut().find(|(r, _)| rel.accepts(&convolve(&[r.clone(), w.clone()]))) {
            Some((_, n)) => *n += 1,
            None => classes.push((w.clone(), 1)),
        }
    }
    let mut out = BTreeMap::new();
    for (_, n) in classes {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}
