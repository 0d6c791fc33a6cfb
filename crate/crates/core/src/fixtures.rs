//! Bundled worked instances (JSON files under `fixtures/`).

use serde::Deserialize;

use crate::covering::SortedAssignment;
use crate::instance::{build_lambda, Criterion, Instance};

pub const APPENDIX_B_JSON: &str = include_str!("../fixtures/appendixB.json");
pub const FIG1_JSON: &str = include_str!("../fixtures/fig1.json");
pub const PROPERTY3B_JSON: &str = include_str!("../fixtures/property3b.json");

/// Four nodes, p = 2, median weights; optimum opens nodes 1 and 3.
pub fn appendix_b() -> Instance {
    Instance::from_json(APPENDIX_B_JSON).expect("bundled fixture is valid")
}

/// The ten-node network with p = 5 under the given criterion.
pub fn fig1(criterion: Criterion) -> Instance {
    let base = Instance::from_json(FIG1_JSON).expect("bundled fixture is valid");
    let mut inst = base.with_lambda(build_lambda(criterion, base.n())).expect("valid weights");
    inst.criterion = Some(criterion);
    inst
}

/// Three-node matrix c = [[0,2,4],[2,0,0],[4,0,0]] (row-major).
pub fn small_example_matrix() -> Vec<f64> {
    vec![0.0, 2.0, 4.0, 2.0, 0.0, 0.0, 4.0, 0.0, 0.0]
}

/// Fractional point that satisfies the x^ℓ sorting rows but whose covering
/// image breaks monotonicity. The matrix is asymmetric with a nonzero
/// diagonal, and one facility is open.
#[derive(Clone, Debug)]
pub struct Property3b {
    pub n: usize,
    pub p: usize,
    pub cost: Vec<f64>,
    pub lambda: Vec<f64>,
    pub point: SortedAssignment,
}

#[derive(Deserialize)]
struct Property3bFile {
    n: usize,
    p: usize,
    cost: Vec<Vec<f64>>,
    lambda: Vec<f64>,
    x: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
    xl: Vec<Vec<Vec<f64>>>,
}

pub fn property3b() -> Property3b {
    let f: Property3bFile = serde_json::from_str(PROPERTY3B_JSON).expect("bundled fixture is valid");
    let flat = |m: Vec<Vec<f64>>| m.into_iter().flatten().collect::<Vec<f64>>();
    let point = SortedAssignment {
        n: f.n,
        x: flat(f.x),
        z: flat(f.z),
        xl: f.xl.into_iter().flat_map(flat).collect(),
    };
    Property3b { n: f.n, p: f.p, cost: flat(f.cost), lambda: f.lambda, point }
}
