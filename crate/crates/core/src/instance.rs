//! Instance and solution data model, JSON I/O, λ criteria and the seeded
//! instance generator.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{OmtError, Result};

/// Tolerance used when comparing floating costs for symmetry on load.
const SYM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Median,
    KCentrum,
    KTrimmed,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::Median, Criterion::KCentrum, Criterion::KTrimmed];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Median => "median",
            Criterion::KCentrum => "k_centrum",
            Criterion::KTrimmed => "k_trimmed",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = OmtError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "median" => Ok(Criterion::Median),
            "k_centrum" | "kcentrum" => Ok(Criterion::KCentrum),
            "k_trimmed" | "ktrimmed" | "k_trimmed_mean" => Ok(Criterion::KTrimmed),
            other => Err(OmtError::InvalidArgument(format!("unknown criterion `{other}`"))),
        }
    }
}

/// λ weights for a criterion over `n` sorted positions.
pub fn build_lambda(criterion: Criterion, n: usize) -> Vec<f64> {
    match criterion {
        Criterion::Median => vec![1.0; n],
        Criterion::KCentrum => {
            let zeros = 2 * n / 3;
            (0..n).map(|l| if l < zeros { 0.0 } else { 1.0 }).collect()
        }
        Criterion::KTrimmed => {
            let band = n / 3;
            (0..n)
                .map(|l| if l < band || l >= n - band { 0.0 } else { 1.0 })
                .collect()
        }
    }
}

/// A complete undirected network with symmetric costs, zero diagonal,
/// `p` facilities to locate and ordered weights λ.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    n: usize,
    p: usize,
    cost: Vec<f64>,
    lambda: Vec<f64>,
    pub criterion: Option<Criterion>,
    pub seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    p: usize,
    cost: Vec<Vec<f64>>,
    lambda: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    criterion: Option<Criterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

impl Instance {
    pub fn new(cost: Vec<Vec<f64>>, p: usize, lambda: Vec<f64>) -> Result<Self> {
        let n = cost.len();
        if n == 0 {
            return Err(OmtError::InvalidInstance("empty cost matrix".into()));
        }
        if cost.iter().any(|r| r.len() != n) {
            return Err(OmtError::InvalidInstance("cost matrix is not square".into()));
        }
        let flat: Vec<f64> = cost.into_iter().flatten().collect();
        Self::from_flat(n, flat, p, lambda)
    }

    pub fn from_flat(n: usize, cost: Vec<f64>, p: usize, lambda: Vec<f64>) -> Result<Self> {
        if cost.len() != n * n {
            return Err(OmtError::InvalidInstance(format!("expected {} costs, got {}", n * n, cost.len())));
        }
        if !(2..=n).contains(&p) {
            return Err(OmtError::InvalidInstance(format!("p={p} must satisfy 2 <= p <= n={n}")));
        }
        if lambda.len() != n {
            return Err(OmtError::InvalidInstance(format!("lambda has {} entries, expected {n}", lambda.len())));
        }
        if lambda.iter().any(|&l| !l.is_finite() || l < 0.0) {
            return Err(OmtError::InvalidInstance("lambda entries must be finite and nonnegative".into()));
        }
        if lambda.iter().sum::<f64>() <= 0.0 {
            return Err(OmtError::InvalidInstance("lambda must have a positive sum".into()));
        }
        for i in 0..n {
            if cost[i * n + i] != 0.0 {
                return Err(OmtError::InvalidInstance(format!("diagonal entry c[{0}][{0}] is not zero", i + 1)));
            }
            for j in 0..n {
                let c = cost[i * n + j];
                if !c.is_finite() || c < 0.0 {
                    return Err(OmtError::InvalidInstance(format!(
                        "cost c[{}][{}]={c} must be finite and nonnegative",
                        i + 1,
                        j + 1
                    )));
                }
                let d = cost[j * n + i];
                if (c - d).abs() > SYM_TOL * c.abs().max(d.abs()).max(1.0) {
                    return Err(OmtError::InvalidInstance(format!(
                        "cost matrix is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { n, p, cost, lambda, criterion: None, seed: None })
    }

    pub fn with_criterion(cost: Vec<Vec<f64>>, p: usize, criterion: Criterion) -> Result<Self> {
        let n = cost.len();
        let mut inst = Self::new(cost, p, build_lambda(criterion, n))?;
        inst.criterion = Some(criterion);
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.n + j]
    }

    /// Row-major n×n costs.
    pub fn cost_flat(&self) -> &[f64] {
        &self.cost
    }

    pub fn cost_rows(&self) -> Vec<Vec<f64>> {
        self.cost.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn lambda_sum(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// Same network with another facility count.
    pub fn with_p(&self, p: usize) -> Result<Self> {
        let mut out = Self::from_flat(self.n, self.cost.clone(), p, self.lambda.clone())?;
        out.criterion = self.criterion;
        out.seed = self.seed;
        Ok(out)
    }

    /// Same network with other weights.
    pub fn with_lambda(&self, lambda: Vec<f64>) -> Result<Self> {
        let mut out = Self::from_flat(self.n, self.cost.clone(), self.p, lambda)?;
        out.seed = self.seed;
        Ok(out)
    }

    /// Undirected edges (i, j), i < j, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        edges(self.n)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(text)?;
        if f.cost.len() != f.n {
            return Err(OmtError::InvalidInstance(format!("n={} but cost has {} rows", f.n, f.cost.len())));
        }
        let mut inst = Self::new(f.cost, f.p, f.lambda)?;
        inst.criterion = f.criterion;
        inst.seed = f.seed;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        let f = InstanceFile {
            n: self.n,
            p: self.p,
            cost: self.cost_rows(),
            lambda: self.lambda.clone(),
            criterion: self.criterion,
            seed: self.seed,
        };
        serde_json::to_string_pretty(&f).expect("instance serializes")
    }
}

pub fn edges(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// Seeded instance with integer costs drawn uniformly from `range` on the
/// upper triangle.
pub fn generate_instance(n: usize, p: usize, range: (u64, u64), seed: u64, criterion: Criterion) -> Result<Instance> {
    if n < 2 {
        return Err(OmtError::InvalidArgument(format!("n={n} must be at least 2")));
    }
    if !(2..=n).contains(&p) {
        return Err(OmtError::InvalidArgument(format!("p={p} must satisfy 2 <= p <= n={n}")));
    }
    let (lo, hi) = range;
    if lo == 0 || lo > hi {
        return Err(OmtError::InvalidArgument(format!("invalid cost range [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(lo..=hi) as f64;
            cost[i * n + j] = v;
            cost[j * n + i] = v;
        }
    }
    let mut inst = Instance::from_flat(n, cost, p, build_lambda(criterion, n))?;
    inst.criterion = Some(criterion);
    inst.seed = Some(seed);
    Ok(inst)
}

/// Facility counts used in the experimental groups: ⌊n/4⌋, ⌊n/3⌋, ⌊n/2⌋,
/// clamped to at least 2 and deduplicated.
pub fn standard_p_values(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = [n / 4, n / 3, n / 2].iter().map(|&p| p.max(2).min(n)).collect();
    out.dedup();
    out
}

/// Facilities, nearest-or-other allocation and the facility tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// Sorted facility ids.
    pub facilities: Vec<usize>,
    /// `allocation[i]` is the facility serving client `i`.
    pub allocation: Vec<usize>,
    /// Tree edges (a, b) with a < b, sorted.
    pub tree: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct SolutionFile {
    facilities: Vec<usize>,
    allocation: Vec<usize>,
    tree: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective: Option<f64>,
}

impl Solution {
    pub fn new(mut facilities: Vec<usize>, allocation: Vec<usize>, tree: Vec<(usize, usize)>) -> Self {
        facilities.sort_unstable();
        let mut tree: Vec<(usize, usize)> = tree.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        tree.sort_unstable();
        Self { facilities, allocation, tree }
    }

    pub fn is_facility_mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &f in &self.facilities {
            if f < n {
                m[f] = true;
            }
        }
        m
    }

    /// Checks every structural condition, naming the first that fails.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let n = inst.n();
        let p = inst.p();
        let bad = |m: String| Err(OmtError::Infeasible(m));
        if self.facilities.len() != p {
            return bad(format!("{} facilities open, expected p={p}", self.facilities.len()));
        }
        if self.facilities.iter().any(|&f| f >= n) {
            return bad("facility id out of range".into());
        }
        if self.facilities.windows(2).any(|w| w[0] >= w[1]) {
            return bad("facility set has duplicates".into());
        }
        if self.allocation.len() != n {
            return bad(format!("allocation covers {} clients, expected {n}", self.allocation.len()));
        }
        let open = self.is_facility_mask(n);
        for (i, &a) in self.allocation.iter().enumerate() {
            if a >= n || !open[a] {
                return bad(format!("client {} allocated to non-facility {}", i + 1, a + 1));
            }
            if open[i] && a != i {
                return bad(format!("facility {} does not serve itself", i + 1));
            }
        }
        if self.tree.len() != p - 1 {
            return bad(format!("tree has {} edges, expected p-1={}", self.tree.len(), p - 1));
        }
        let mut dsu = crate::graph::UnionFind::new(n);
        for &(a, b) in &self.tree {
            if a >= n || b >= n || a == b {
                return bad(format!("invalid tree edge ({}, {})", a + 1, b + 1));
            }
            if !open[a] || !open[b] {
                return bad(format!("tree edge ({}, {}) touches a non-facility", a + 1, b + 1));
            }
            if !dsu.union(a, b) {
                return bad(format!("tree edge ({}, {}) closes a cycle", a + 1, b + 1));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, objective: Option<f64>) -> String {
        let f = SolutionFile {
            facilities: self.facilities.iter().map(|f| f + 1).collect(),
            allocation: self.allocation.iter().map(|a| a + 1).collect(),
            tree: self.tree.iter().map(|&(a, b)| [a + 1, b + 1]).collect(),
            objective,
        };
        serde_json::to_string_pretty(&f).expect("solution serializes")
    }

    pub fn from_json(text: &str) -> Result<(Self, Option<f64>)> {
        let f: SolutionFile = serde_json::from_str(text)?;
        let dec = |v: usize| {
            v.checked_sub(1)
                .ok_or_else(|| OmtError::InvalidArgument("node ids are 1-based; found 0".into()))
        };
        let facilities = f.facilities.into_iter().map(dec).collect::<Result<Vec<_>>>()?;
        let allocation = f.allocation.into_iter().map(dec).collect::<Result<Vec<_>>>()?;
        let tree = f
            .tree
            .into_iter()
            .map(|[a, b]| Ok((dec(a)?, dec(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok((Self::new(facilities, allocation, tree), f.objective))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_patterns() {
        assert_eq!(build_lambda(Criterion::Median, 4), vec![1.0; 4]);
        let kt: Vec<u8> = build_lambda(Criterion::KTrimmed, 10).iter().map(|&v| v as u8).collect();
        assert_eq!(kt, vec![0, 0, 0, 1, 1, 1, 1, 0, 0, 0]);
        let kc: Vec<u8> = build_lambda(Criterion::KCentrum, 10).iter().map(|&v| v as u8).collect();
        assert_eq!(kc, vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1]);
        // n=5: one zero at each end, three ones in the middle
        let kt5: Vec<u8> = build_lambda(Criterion::KTrimmed, 5).iter().map(|&v| v as u8).collect();
        assert_eq!(kt5, vec![0, 1, 1, 1, 0]);
        assert_eq!(build_lambda(Criterion::KCentrum, 1), vec![1.0]);
    }

    #[test]
    fn generator_is_deterministic_and_in_range() {
        let a = generate_instance(12, 3, (1, 100_000), 42, Criterion::Median).unwrap();
        let b = generate_instance(12, 3, (1, 100_000), 42, Criterion::Median).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(12, 3, (1, 100_000), 43, Criterion::Median).unwrap();
        assert_ne!(a.cost_flat(), c.cost_flat());
        for i in 0..12 {
            assert_eq!(a.c(i, i), 0.0);
            for j in 0..12 {
                if i != j {
                    let v = a.c(i, j);
                    assert!((1.0..=100_000.0).contains(&v) && v.fract() == 0.0);
                    assert_eq!(v, a.c(j, i));
                }
            }
        }
        assert!(generate_instance(5, 2, (10, 1), 0, Criterion::Median).is_err());
        assert_eq!(standard_p_values(20), vec![5, 6, 10]);
    }

    #[test]
    fn rejects_bad_instances() {
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(Instance::new(asym, 2, vec![1.0, 1.0]).is_err());
        let diag = vec![vec![1.0, 1.0], vec![1.0, 0.0]];
        assert!(Instance::new(diag, 2, vec![1.0, 1.0]).is_err());
        let ok = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(Instance::new(ok.clone(), 1, vec![1.0, 1.0]).is_err());
        assert!(Instance::new(ok.clone(), 2, vec![0.0, 0.0]).is_err());
        assert!(Instance::new(ok, 2, vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn json_round_trip_is_one_based() {
        let inst = generate_instance(5, 2, (1, 9), 1, Criterion::KTrimmed).unwrap();
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(inst, back);
        let sol = Solution::new(vec![0, 3], vec![0, 0, 3, 3, 0], vec![(3, 0)]);
        let text = sol.to_json(Some(1.5));
        assert!(text.contains("\"facilities\": [\n    1,\n    4\n  ]"));
        let (back, obj) = Solution::from_json(&text).unwrap();
        assert_eq!(back, sol);
        assert_eq!(obj, Some(1.5));
    }
}
