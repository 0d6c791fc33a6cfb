//! Subtour-elimination separation: Σ_{E(S)} z ≤ |S| − 1.

use crate::graph::{components, max_flow};

const TOL: f64 = 1e-6;
const INT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SubtourCut {
    /// Sorted node set S.
    pub set: Vec<usize>,
    /// z(E(S)) at the separated point.
    pub lhs: f64,
}

impl SubtourCut {
    pub fn rhs(&self) -> f64 {
        self.set.len() as f64 - 1.0
    }

    pub fn violation(&self) -> f64 {
        self.lhs - self.rhs()
    }
}

/// z(E(S)) for row-major z (read on i<j).
pub fn subtour_lhs(n: usize, z: &[f64], set: &[usize]) -> f64 {
    let mut s = 0.0;
    for (a, &i) in set.iter().enumerate() {
        for &j in &set[a + 1..] {
            s += z[i.min(j) * n + i.max(j)];
        }
    }
    s
}

/// Violated subtour rows at z (row-major n×n, read on i<j), most violated
/// first. Integer points: every component with a cycle. Fractional points:
/// one min cut per forced node, which finds the most violated set.
pub fn separate_subtour(n: usize, z: &[f64]) -> Vec<SubtourCut> {
    let integral = (0..n).all(|i| (i + 1..n).all(|j| {
        let v = z[i * n + j];
        v.abs() <= INT_TOL || (v - 1.0).abs() <= INT_TOL
    }));
    let mut out = if integral { integer_cycles(n, z) } else { min_cut_sets(n, z) };
    out.sort_by(|a, b| b.violation().total_cmp(&a.violation()).then_with(|| a.set.cmp(&b.set)));
    out
}

fn integer_cycles(n: usize, z: &[f64]) -> Vec<SubtourCut> {
    let mut es = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if z[i * n + j] > 0.5 {
                es.push((i, j));
            }
        }
    }
    let mut out = Vec::new();
    for comp in components(n, &es) {
        let lhs = subtour_lhs(n, z, &comp);
        if lhs > comp.len() as f64 - 1.0 + TOL {
            out.push(SubtourCut { set: comp, lhs });
        }
    }
    out
}

/// min_{S∋k} |S| − z(E(S)) = Σ_{v∈S}(1 − deg_v/2) + z(δ(S))/2, solved as
/// an s-t cut with S on the source side.
fn min_cut_sets(n: usize, z: &[f64]) -> Vec<SubtourCut> {
    let zz = |i: usize, j: usize| z[i.min(j) * n + i.max(j)];
    let deg: Vec<f64> = (0..n).map(|v| (0..n).filter(|&u| u != v).map(|u| zz(u, v)).sum()).collect();
    let s = n;
    let t = n + 1;
    let m = n + 2;
    let mut out: Vec<SubtourCut> = Vec::new();
    for k in 0..n {
        let mut cap = vec![0.0; m * m];
        let mut offset = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    cap[i * m + j] = zz(i, j) / 2.0;
                }
            }
            let a = 1.0 - deg[i] / 2.0;
            if a >= 0.0 {
                cap[i * m + t] = a;
            } else {
                cap[s * m + i] = -a;
                offset += a;
            }
        }
        cap[s * m + k] = f64::INFINITY;
        let (flow, reach) = max_flow(m, &cap, s, t);
        if flow + offset < 1.0 - TOL {
            let set: Vec<usize> = (0..n).filter(|&v| reach[v]).collect();
            let lhs = subtour_lhs(n, z, &set);
            if lhs > set.len() as f64 - 1.0 + TOL && !out.iter().any(|c| c.set == set) {
                out.push(SubtourCut { set, lhs });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zmat(n: usize, es: &[(usize, usize, f64)]) -> Vec<f64> {
        let mut z = vec![0.0; n * n];
        for &(i, j, v) in es {
            z[i.min(j) * n + i.max(j)] = v;
        }
        z
    }

    #[test]
    fn three_cycle_is_cut() {
        let z = zmat(4, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
        let cuts = separate_subtour(4, &z);
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].set, vec![0, 1, 2]);
        assert_eq!(cuts[0].lhs, 3.0);
    }

    #[test]
    fn tree_has_no_cut() {
        let z = zmat(4, &[(0, 1, 1.0), (1, 2, 1.0), (1, 3, 1.0)]);
        assert!(separate_subtour(4, &z).is_empty());
    }

    #[test]
    fn fractional_triangle() {
        let z = zmat(4, &[(0, 1, 0.9), (1, 2, 0.9), (0, 2, 0.9)]);
        let cuts = separate_subtour(4, &z);
        assert_eq!(cuts[0].set, vec![0, 1, 2]);
        assert!((cuts[0].violation() - 0.7).abs() < 1e-9);
    }
}
