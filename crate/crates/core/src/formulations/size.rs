//! Closed-form model dimensions (x, z, x^ℓ/u variables; allocation,
//! linking and non-redundant sorting rows plus |E| rows for z ∈ T).

use super::model::{Family, Sorting};

/// Predicted (variables, constraints). `h_size` is ignored for XL.
/// F2 adds one linking row per edge over F1 (merged allocation row).
pub fn predicted_size(n: usize, h_size: usize, family: Family, sorting: Sorting) -> (usize, usize) {
    let e = n * n.saturating_sub(1) / 2;
    let (vars, cons) = match sorting {
        // n³ + 1.5n² − 0.5n and 3n² + n
        Sorting::Xl => (n * n * n + n * n + e, 3 * n * n + n),
        // nH + 1.5n² − 0.5n and 2n² + Hn − n + 1
        Sorting::U => (n * h_size + n * n + e, 2 * n * n + h_size * n + 1 - n),
    };
    match family {
        Family::F1 => (vars, cons),
        Family::F2 => (vars, cons + e),
    }
}
