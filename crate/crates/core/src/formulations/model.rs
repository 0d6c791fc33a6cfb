//! Model IR: named variables with bounds and integrality, linear rows
//! tagged by block, a linear objective and the formulation tags.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{OmtError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    F1,
    F2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sorting {
    Xl,
    U,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeKind {
    Mtz,
    Flow1,
    Flow2,
    Km,
    Sub,
}

/// Exponential row family handled by separation instead of being listed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LazyFamily {
    /// Σ_{E(S)} z ≤ |S| − 1
    Subtour,
    /// at least one allocation arc or tree edge crosses every cut
    ConnectionCut,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::F1, Family::F2];
}

impl Sorting {
    pub const ALL: [Sorting; 2] = [Sorting::Xl, Sorting::U];
}

impl TreeKind {
    pub const ALL: [TreeKind; 5] = [TreeKind::Mtz, TreeKind::Flow1, TreeKind::Flow2, TreeKind::Km, TreeKind::Sub];
    /// Trees with explicit compact rows.
    pub const COMPACT: [TreeKind; 4] = [TreeKind::Mtz, TreeKind::Flow1, TreeKind::Flow2, TreeKind::Km];
}

macro_rules! tag_strings {
    ($ty:ty, $($v:path => $s:literal),+) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($v => $s),+ })
            }
        }
        impl FromStr for $ty {
            type Err = OmtError;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_uppercase().as_str() {
                    $($s => Ok($v),)+
                    _ => Err(OmtError::InvalidArgument(format!(
                        "unknown {} `{s}`; expected one of: {}",
                        stringify!($ty),
                        [$($s),+].join(", ")
                    ))),
                }
            }
        }
    };
}

tag_strings!(Family, Family::F1 => "F1", Family::F2 => "F2");
tag_strings!(Sorting, Sorting::Xl => "XL", Sorting::U => "U");
tag_strings!(TreeKind, TreeKind::Mtz => "MTZ", TreeKind::Flow1 => "FLOW1", TreeKind::Flow2 => "FLOW2", TreeKind::Km => "KM", TreeKind::Sub => "SUB");
tag_strings!(LazyFamily, LazyFamily::Subtour => "SUBTOUR", LazyFamily::ConnectionCut => "CONNECTION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarType {
    Binary,
    Integer,
    Continuous,
}

/// Which formulation symbol a variable instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    X,
    Z,
    Xl,
    U,
    Y,
    L,
    F,
    R,
    Q,
    Mu,
}

impl Symbol {
    /// Symbol from a variable name (`x_1_2`, `xl_3_1_2`, `mu`, ...).
    pub fn from_name(name: &str) -> Option<Symbol> {
        let head = name.split('_').next()?;
        Some(match head {
            "x" => Symbol::X,
            "z" => Symbol::Z,
            "xl" => Symbol::Xl,
            "u" => Symbol::U,
            "y" => Symbol::Y,
            "l" => Symbol::L,
            "f" => Symbol::F,
            "r" => Symbol::R,
            "q" => Symbol::Q,
            "mu" => Symbol::Mu,
            _ => return None,
        })
    }

    /// Structural symbols counted in model dimension tables.
    pub fn is_structural(self) -> bool {
        matches!(self, Symbol::X | Symbol::Z | Symbol::Xl | Symbol::U)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub vtype: VarType,
    pub symbol: Symbol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConSense {
    Le,
    Ge,
    Eq,
}

impl ConSense {
    pub fn as_str(self) -> &'static str {
        match self {
            ConSense::Le => "<=",
            ConSense::Ge => ">=",
            ConSense::Eq => "=",
        }
    }
}

/// Row groups. Dimension tables count allocation, linking and sorting
/// rows; tree rows (including Σz) are replaced by |E| placeholder rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    Allocation,
    Linking,
    TreeCount,
    Tree,
    Sorting,
    Redundant,
    Cut,
}

impl Block {
    /// Block of a row from its name prefix.
    pub fn from_name(name: &str) -> Block {
        let head = name.split('_').next().unwrap_or(name);
        match head {
            "facilities" | "assign" | "open" | "f2open" | "f2close" => Block::Allocation,
            "link" | "f2edge" | "f2link" => Block::Linking,
            "treeedges" => Block::TreeCount,
            "sortlink" | "position" | "order" | "stair" | "cover" | "covmono" => Block::Sorting,
            "covred" => Block::Redundant,
            "optcut" => Block::Cut,
            _ => Block::Tree,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: ConSense,
    pub rhs: f64,
    pub block: Block,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v]).sum()
    }

    /// Amount by which the row is violated (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let a = self.activity(values);
        match self.sense {
            ConSense::Le => (a - self.rhs).max(0.0),
            ConSense::Ge => (self.rhs - a).max(0.0),
            ConSense::Eq => (a - self.rhs).abs(),
        }
    }
}

/// A minimisation MILP.
#[derive(Clone, Debug, PartialEq)]
pub struct MilpModel {
    pub name: String,
    pub family: Family,
    pub sorting: Sorting,
    /// `None` for the Benders master (no tree variables).
    pub tree: Option<TreeKind>,
    pub relaxed: bool,
    pub lazy: Option<LazyFamily>,
    pub n: usize,
    pub p: usize,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, f64)>,
    index: HashMap<String, usize>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>, family: Family, sorting: Sorting, tree: Option<TreeKind>, n: usize, p: usize) -> Self {
        Self {
            name: name.into(),
            family,
            sorting,
            tree,
            relaxed: false,
            lazy: None,
            n,
            p,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Declares a variable; names must be unique.
    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, vtype: VarType) -> Result<usize> {
        let name = name.into();
        let symbol = Symbol::from_name(&name)
            .ok_or_else(|| OmtError::InvalidArgument(format!("variable `{name}` has no known symbol prefix")))?;
        if self.index.contains_key(&name) {
            return Err(OmtError::InvalidArgument(format!("duplicate variable `{name}`")));
        }
        let id = self.variables.len();
        self.index.insert(name.clone(), id);
        self.variables.push(Variable { name, lower, upper, vtype, symbol });
        Ok(id)
    }

    pub fn add_con(&mut self, name: impl Into<String>, terms: Vec<(usize, f64)>, sense: ConSense, rhs: f64, block: Block) {
        let name = name.into();
        debug_assert!(terms.iter().all(|&(v, _)| v < self.variables.len()));
        self.constraints.push(Constraint { name, terms, sense, rhs, block });
    }

    /// Adds a row whose block follows from its name.
    pub fn add_named(&mut self, name: impl Into<String>, terms: Vec<(usize, f64)>, sense: ConSense, rhs: f64) {
        let name = name.into();
        let block = Block::from_name(&name);
        self.add_con(name, terms, sense, rhs, block);
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Variable id, panicking on an unknown name (builder-internal use).
    pub(crate) fn v(&self, name: &str) -> usize {
        self.index[name]
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn count_symbol(&self, s: Symbol) -> usize {
        self.variables.iter().filter(|v| v.symbol == s).count()
    }

    pub fn count_block(&self, b: Block) -> usize {
        self.constraints.iter().filter(|c| c.block == b).count()
    }

    /// (variables, constraints) as counted in the dimension table:
    /// x, z, x^ℓ and u variables; allocation, linking and non-redundant
    /// sorting rows plus |E| rows standing for z ∈ T.
    pub fn reported_size(&self) -> (usize, usize) {
        let vars = self.variables.iter().filter(|v| v.symbol.is_structural()).count();
        let e = self.n * (self.n - 1) / 2;
        let cons = self.count_block(Block::Allocation) + self.count_block(Block::Linking) + self.count_block(Block::Sorting) + e;
        (vars, cons)
    }

    /// Objective value at a dense value vector.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * values[v]).sum()
    }

    /// Drops integrality on every variable.
    pub fn relax(&mut self) {
        for v in &mut self.variables {
            v.vtype = VarType::Continuous;
        }
        self.relaxed = true;
    }

    /// Rebuilds the name index (after direct edits of `variables`).
    pub fn reindex(&mut self) -> Result<()> {
        self.index.clear();
        for (k, v) in self.variables.iter().enumerate() {
            if self.index.insert(v.name.clone(), k).is_some() {
                return Err(OmtError::InvalidArgument(format!("duplicate variable `{}`", v.name)));
            }
        }
        Ok(())
    }
}

/// Variable values by name.
pub type Assignment = HashMap<String, f64>;

/// Dense values for `model` from a name map; every variable must be set.
pub fn dense_values(model: &MilpModel, asg: &Assignment) -> Result<Vec<f64>> {
    model
        .variables
        .iter()
        .map(|v| asg.get(&v.name).copied().ok_or_else(|| OmtError::MissingValue(v.name.clone())))
        .collect()
}

pub(crate) fn x_name(i: usize, j: usize) -> String {
    format!("x_{}_{}", i + 1, j + 1)
}

pub(crate) fn z_name(i: usize, j: usize) -> String {
    format!("z_{}_{}", i.min(j) + 1, i.max(j) + 1)
}

pub(crate) fn xl_name(l: usize, i: usize, j: usize) -> String {
    format!("xl_{}_{}_{}", l + 1, i + 1, j + 1)
}

pub(crate) fn u_name(l: usize, h: usize) -> String {
    format!("u_{}_{}", l + 1, h)
}
