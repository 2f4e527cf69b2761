//! Least squares on an upper Hessenberg matrix via Givens rotations.

use crate::error::{Error, Result};

use super::arnoldi::Hessenberg;

/// Incremental QR of `H̃_k` for `min ‖β e₁ − H̃_k y‖`.
///
/// Each new Hessenberg column is rotated by the accumulated rotations and one
/// new rotation zeroes its subdiagonal entry; the residual of the small
/// problem is then `|g_{k+1}|` without forming `y`.
#[derive(Debug, Clone)]
pub struct GivensLsq {
    /// Columns of the triangular factor, column `j` has `j + 1` entries.
    r: Vec<Vec<f64>>,
    rotations: Vec<(f64, f64)>,
    g: Vec<f64>,
}

impl GivensLsq {
    pub fn new(beta: f64) -> Self {
        Self {
            r: Vec::new(),
            rotations: Vec::new(),
            g: vec![beta],
        }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Appends column `j = len()` of `H̃`, which must have `j + 2` entries.
    /// Returns the updated small-problem residual.
    pub fn push_column(&mut self, h: &[f64]) -> f64 {
        let j = self.r.len();
        assert_eq!(
            h.len(),
            j + 2,
            "Hessenberg column {j} must have {} entries",
            j + 2
        );
        let mut col = h.to_vec();
        for (i, &(c, s)) in self.rotations.iter().enumerate() {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = c * a + s * b;
            col[i + 1] = -s * a + c * b;
        }
        let (a, b) = (col[j], col[j + 1]);
        let rho = a.hypot(b);
        let (c, s) = if rho == 0.0 {
            (1.0, 0.0)
        } else {
            (a / rho, b / rho)
        };
        col[j] = rho;
        col.truncate(j + 1);
        self.rotations.push((c, s));
        let gj = self.g[j];
        self.g[j] = c * gj;
        self.g.push(-s * gj);
        self.r.push(col);
        self.residual()
    }

    /// `‖β e₁ − H̃ y‖` at the minimizer.
    pub fn residual(&self) -> f64 {
        self.g.last().map_or(0.0, |g| g.abs())
    }

    /// Back substitution for the minimizer.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let k = self.r.len();
        let scale = self
            .r
            .iter()
            .map(|c| c[c.len() - 1].abs())
            .fold(0.0, f64::max);
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let diag = self.r[i][i];
            if diag.abs() <= f64::EPSILON * scale || diag == 0.0 {
                return Err(Error::RankDeficientLsq { column: i });
            }
            let mut acc = self.g[i];
            for (j, yj) in y.iter().enumerate().skip(i + 1) {
                acc -= self.r[j][i] * yj;
            }
            y[i] = acc / diag;
        }
        Ok(y)
    }
}

/// Minimizer of `‖β e₁ − H̃ y‖` and the minimal residual.
pub fn hessenberg_lsq(h: &Hessenberg, beta: f64) -> Result<(Vec<f64>, f64)> {
    let mut lsq = GivensLsq::new(beta);
    for col in h.columns() {
        lsq.push_column(col);
    }
    let y = lsq.solve()?;
    Ok((y, lsq.residual()))
}
