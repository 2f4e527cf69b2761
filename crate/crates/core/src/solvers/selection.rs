use serde::Serialize;

use crate::error::{Error, Result};

/// Rows carrying the largest squared residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicBlockSelection {
    /// Ascending row indices.
    pub indices: Vec<usize>,
    /// `Σ r_i²` over the selected rows.
    pub score: f64,
}

/// Picks the `size` rows with the largest `r_i²`, ties going to the lower row
/// index. Average linear time (partial selection, no full sort of `r`).
pub fn select_residual_block(r: &[f64], size: usize) -> Result<DynamicBlockSelection> {
    let m = r.len();
    if size == 0 || size > m {
        return Err(Error::InvalidConfig(format!(
            "dynamic block size must be in [1, {m}], got {size}"
        )));
    }
    let mut idx: Vec<usize> = (0..m).collect();
    if size < m {
        idx.select_nth_unstable_by(size - 1, |&a, &b| {
            (r[b] * r[b]).total_cmp(&(r[a] * r[a])).then(a.cmp(&b))
        });
        idx.truncate(size);
    }
    idx.sort_unstable();
    let score = idx.iter().map(|&i| r[i] * r[i]).sum();
    Ok(DynamicBlockSelection {
        indices: idx,
        score,
    })
}
