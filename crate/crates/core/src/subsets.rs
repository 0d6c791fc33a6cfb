//! Colex enumeration of k-subsets of {0..n}, with ranking so the
//! sequence can be cut into independent chunks.

use crate::exec::Exec;

/// Subsets per work chunk. Fixed so chunk boundaries (and therefore the
/// reduction order) do not depend on the thread count.
pub const CHUNK: u128 = 2048;

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The subset of colex rank `rank` (sorted ascending).
pub fn unrank_colex(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = vec![0; k];
    let mut hi = n;
    for i in (1..=k).rev() {
        // largest c < hi with C(c, i) <= rank
        let mut c = hi - 1;
        while binomial(c, i) > rank {
            c -= 1;
        }
        rank -= binomial(c, i);
        out[i - 1] = c;
        hi = c;
    }
    out
}

/// Advances `comb` to its colex successor; false when it was the last one.
pub fn next_colex(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    for i in 0..k {
        let limit = if i + 1 < k { comb[i + 1] } else { n };
        if comb[i] + 1 < limit {
            comb[i] += 1;
            for (j, c) in comb.iter_mut().enumerate().take(i) {
                *c = j;
            }
            return true;
        }
    }
    false
}

/// Folds every k-subset chunk-wise (possibly in parallel) and merges the
/// per-chunk states in chunk order.
pub fn fold_subsets<T, I, F, M>(n: usize, k: usize, exec: Exec, init: I, fold: F, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &[usize]) + Sync + Send,
    M: Fn(T, T) -> T,
{
    let total = binomial(n, k);
    if total == 0 {
        return init();
    }
    let chunks = total.div_ceil(CHUNK) as usize;
    let parts = exec.map_indexed(chunks, |c| {
        let start = c as u128 * CHUNK;
        let len = CHUNK.min(total - start);
        let mut comb = unrank_colex(n, k, start);
        let mut state = init();
        for step in 0..len {
            fold(&mut state, &comb);
            if step + 1 < len {
                next_colex(&mut comb, n);
            }
        }
        state
    });
    let mut it = parts.into_iter();
    let first = it.next().expect("at least one chunk");
    it.fold(first, merge)
}

/// All k-subsets in colex order.
pub fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut comb: Vec<usize> = (0..k).collect();
    loop {
        out.push(comb.clone());
        if !next_colex(&mut comb, n) {
            break;
        }
    }
    out
}
