//! Optimality cuts μ ≥ constant + Σ_i coef_i x_ii.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{OmtError, Result};
use crate::formulations::{ConSense, MilpModel};

use super::subproblem::{DualSolution, EdgeIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CutKind {
    /// (MST(S̄)/(p−1))·(Σ_{i∈S̄} x_ii − (p−1)) ≤ μ
    Classical,
    /// [ᾱ(p−1) − Σβ̄ − Σ(x_ii τ̄ + x_jj η̄)]/(p−1) ≤ μ
    Dual,
}

impl fmt::Display for CutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutKind::Classical => "classical",
            CutKind::Dual => "dual",
        })
    }
}

impl FromStr for CutKind {
    type Err = OmtError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(CutKind::Classical),
            "dual" => Ok(CutKind::Dual),
            _ => Err(OmtError::InvalidArgument(format!("unknown cut kind `{s}`; expected classical or dual"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalityCut {
    pub kind: CutKind,
    /// Sorted facility set the cut was generated at.
    pub generator: Vec<usize>,
    pub constant: f64,
    /// Coefficient of x_ii for every node i.
    pub coefs: Vec<f64>,
}

impl OptimalityCut {
    /// Right-hand side at the indicator of a facility set.
    pub fn rhs_at(&self, facilities: &[usize]) -> f64 {
        self.constant + facilities.iter().map(|&i| self.coefs[i]).sum::<f64>()
    }

    /// Right-hand side at an arbitrary diagonal x.
    pub fn rhs_at_diag(&self, x_diag: &[f64]) -> f64 {
        self.constant + self.coefs.iter().zip(x_diag).map(|(a, x)| a * x).sum::<f64>()
    }
}

/// Builds the cut of `kind` from a solved subproblem at `facilities`.
pub fn make_cut(kind: CutKind, facilities: &[usize], sp: (f64, &DualSolution), p: usize) -> OptimalityCut {
    let (cost, dual) = sp;
    let n = dual.n;
    let mut gen = facilities.to_vec();
    gen.sort_unstable();
    let w = 1.0 / (p as f64 - 1.0);
    match kind {
        CutKind::Classical => {
            let mut coefs = vec![0.0; n];
            for &i in &gen {
                coefs[i] = cost * w;
            }
            OptimalityCut { kind, generator: gen, constant: -cost, coefs }
        }
        CutKind::Dual => {
            let constant = (dual.alpha * (p as f64 - 1.0) - dual.beta.iter().sum::<f64>()) * w;
            let mut coefs = vec![0.0; n];
            for (e, &(i, j)) in EdgeIndex::new(n).list.iter().enumerate() {
                coefs[i] -= dual.tau[e] * w;
                coefs[j] -= dual.eta[e] * w;
            }
            OptimalityCut { kind, generator: gen, constant, coefs }
        }
    }
}

/// Adds `cut` to a master model built with μ: Σ coef x_ii − μ ≤ −constant.
pub fn add_optimality_cut(model: &mut MilpModel, cut: &OptimalityCut, name: &str) -> Result<()> {
    let mu = model.var("mu").ok_or_else(|| OmtError::InvalidArgument("model has no μ variable".into()))?;
    let mut terms = Vec::new();
    for (i, &a) in cut.coefs.iter().enumerate() {
        if a != 0.0 {
            let x = model
                .var(&format!("x_{}_{}", i + 1, i + 1))
                .ok_or_else(|| OmtError::InvalidArgument("model lacks x variables".into()))?;
            terms.push((x, a));
        }
    }
    terms.push((mu, -1.0));
    model.add_named(format!("optcut_{name}"), terms, ConSense::Le, -cut.constant);
    Ok(())
}
