//! Connection cuts: every node cut S must be crossed by at least one
//! allocation arc or tree edge.

use crate::graph::{components, stoer_wagner};

pub const CUT_TOL: f64 = 1e-6;
const INT_TOL: f64 = 1e-9;

/// A violated connection cut. `set` is the shore that does not contain
/// node 0 (so a cut and its complement share one representation).
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionCut {
    pub set: Vec<usize>,
    /// Σ_{δ⁺(S)} x + Σ_{δ⁻(S)} x + Σ_{δ(S)} z at the separated point.
    pub lhs: f64,
}

impl ConnectionCut {
    pub fn violation(&self) -> f64 {
        1.0 - self.lhs
    }
}

fn is_integral(v: &[f64]) -> bool {
    v.iter().all(|&a| a.abs() <= INT_TOL || (a - 1.0).abs() <= INT_TOL)
}

/// Value of the connection-cut left-hand side for shore `set`.
/// `x` and `z` are row-major n×n (z read on i<j). `x` may be absent, in
/// which case only edges count.
pub fn connection_lhs(n: usize, x: Option<&[f64]>, z: &[f64], set: &[usize]) -> f64 {
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    let mut lhs = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j || inside[i] == inside[j] {
                continue;
            }
            if let Some(x) = x {
                lhs += x[i * n + j];
            }
            if i < j {
                lhs += z[i * n + j];
            }
        }
    }
    lhs
}

fn canonical(n: usize, set: &[usize]) -> Vec<usize> {
    if set.contains(&0) {
        let mut inside = vec![false; n];
        for &v in set {
            inside[v] = true;
        }
        (0..n).filter(|&v| !inside[v]).collect()
    } else {
        set.to_vec()
    }
}

/// Separates violated connection cuts at (x, z). Integer points use the
/// components of the support graph; fractional points a global min cut.
pub fn separate_connection_cut(n: usize, x: Option<&[f64]>, z: &[f64]) -> Vec<ConnectionCut> {
    if n < 2 {
        return Vec::new();
    }
    let integral = is_integral(z) && x.is_none_or(is_integral);
    let mut out: Vec<ConnectionCut> = Vec::new();
    if integral {
        let mut es = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let arc = x.is_some_and(|x| x[i * n + j] > 0.5);
                let edge = i < j && z[i * n + j] > 0.5;
                if arc || edge {
                    es.push((i, j));
                }
            }
        }
        let comps = components(n, &es);
        if comps.len() == 1 {
            return out;
        }
        for comp in comps {
            let set = canonical(n, &comp);
            if out.iter().any(|c| c.set == set) {
                continue;
            }
            let lhs = connection_lhs(n, x, z, &set);
            if lhs < 1.0 - CUT_TOL {
                out.push(ConnectionCut { set, lhs });
            }
        }
    } else {
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let mut v = z[i * n + j];
                if let Some(x) = x {
                    v += x[i * n + j] + x[j * n + i];
                }
                w[i * n + j] = v;
                w[j * n + i] = v;
            }
        }
        let (weight, shore) = stoer_wagner(n, &w);
        if weight < 1.0 - CUT_TOL {
            let set = canonical(n, &shore);
            let lhs = connection_lhs(n, x, z, &set);
            out.push(ConnectionCut { set, lhs });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_gives_component_cuts() {
        let n = 4;
        let cuts = separate_connection_cut(n, Some(&vec![0.0; 16]), &vec![0.0; 16]);
        let sets: Vec<Vec<usize>> = cuts.iter().map(|c| c.set.clone()).collect();
        assert_eq!(sets, vec![vec![1, 2, 3], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn two_clusters_dedupe_to_one() {
        // clusters {0,1,2} and {3,4,5}; 1->0, 2->0, 4->3, 5->3 and no tree edge
        let n = 6;
        let mut x = vec![0.0; n * n];
        for (i, j) in [(1, 0), (2, 0), (4, 3), (5, 3)] {
            x[i * n + j] = 1.0;
        }
        for v in [0, 3] {
            x[v * n + v] = 1.0;
        }
        let cuts = separate_connection_cut(n, Some(&x), &vec![0.0; n * n]);
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].set, vec![3, 4, 5]);
        assert_eq!(cuts[0].lhs, 0.0);
    }

    #[test]
    fn fractional_point_min_cut() {
        let n = 3;
        let mut z = vec![0.0; 9];
        z[1] = 0.4; // (0,1)
        z[5] = 0.3; // (1,2)
        let cuts = separate_connection_cut(n, None, &z);
        assert_eq!(cuts.len(), 1);
        assert!((cuts[0].lhs - 0.3).abs() < 1e-12);
        assert_eq!(cuts[0].set, vec![2]);
    }
}
