//! Synthetic consistent systems `b = A x_star` with `x_star ~ N(0, I)`.

use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, MatrixHandle};
use crate::rng::{normal_vec, seeded, SolverRng};
use crate::system::LinearSystem;

/// Where the coefficient matrix comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Dense `m×n` with standard normal entries.
    Randn { m: usize, n: usize },
    /// Dense `m×n` with entries uniform on `[1, 2)`.
    OnePlusRand { m: usize, n: usize },
    /// Matrix Market file; only the right-hand side is synthetic.
    FromFile { path: PathBuf },
}

impl GeneratorSpec {
    /// Parses `gen:randn:MxN`, `gen:onepr:MxN` or a file path.
    pub fn parse(src: &str) -> Result<Self> {
        let Some(rest) = src.strip_prefix("gen:") else {
            return Ok(GeneratorSpec::FromFile { path: src.into() });
        };
        let (kind, dims) = rest
            .split_once(':')
            .ok_or_else(|| Error::InvalidConfig(format!("malformed generator `{src}`")))?;
        let (m, n) = dims
            .split_once(['x', 'X'])
            .and_then(|(m, n)| Some((m.parse().ok()?, n.parse().ok()?)))
            .ok_or_else(|| Error::InvalidConfig(format!("malformed dimensions in `{src}`")))?;
        match kind {
            "randn" => Ok(GeneratorSpec::Randn { m, n }),
            "onepr" | "one-plus-rand" => Ok(GeneratorSpec::OnePlusRand { m, n }),
            other => Err(Error::InvalidConfig(format!("unknown generator `{other}`"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GeneratorSpec::Randn { m, n } => format!("randn-{m}x{n}"),
            GeneratorSpec::OnePlusRand { m, n } => format!("onepr-{m}x{n}"),
            GeneratorSpec::FromFile { path } => path.file_stem().map_or_else(
                || path.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            ),
        }
    }

    /// Builds the coefficient matrix only. Random matrices draw from `rng`.
    pub fn matrix(&self, rng: &mut SolverRng) -> Result<MatrixHandle> {
        match *self {
            GeneratorSpec::Randn { m, n } => {
                check_dims(m, n)?;
                Ok(DenseMatrix::new(m, n, normal_vec(rng, m * n))?.into())
            }
            GeneratorSpec::OnePlusRand { m, n } => {
                check_dims(m, n)?;
                let data = (0..m * n).map(|_| 1.0 + rng.random::<f64>()).collect();
                Ok(DenseMatrix::new(m, n, data)?.into())
            }
            GeneratorSpec::FromFile { ref path } => crate::mtx::read_matrix_market(path),
        }
    }
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidConfig(format!("invalid dimensions {m}x{n}")));
    }
    Ok(())
}

/// Draws `x_star ~ N(0, I)` and returns the consistent system over `a`.
pub fn planted_system(
    name: impl Into<String>,
    a: MatrixHandle,
    rng: &mut SolverRng,
) -> Result<LinearSystem> {
    let x_star = normal_vec(rng, a.cols());
    LinearSystem::with_solution(name, a, x_star)
}

/// Matrix and planted solution from a single seed.
pub fn generate_system(spec: &GeneratorSpec, seed: u64) -> Result<LinearSystem> {
    let mut rng = seeded(seed);
    let a = spec.matrix(&mut rng)?;
    planted_system(spec.label(), a, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector::norm2;

    #[test]
    fn randn_system_is_consistent() {
        let sys = generate_system(&GeneratorSpec::Randn { m: 4, n: 2 }, 7).unwrap();
        let r = sys
            .a
            .residual(&sys.b, sys.x_star.as_ref().unwrap())
            .unwrap();
        assert_eq!(norm2(&r), 0.0);
    }

    #[test]
    fn one_plus_rand_entries_in_range() {
        let sys = generate_system(&GeneratorSpec::OnePlusRand { m: 3, n: 3 }, 1).unwrap();
        let dense = sys.a.to_dense();
        assert!(dense.data().iter().all(|v| (1.0..2.0).contains(v)));
    }

    #[test]
    fn same_seed_same_system() {
        let spec = GeneratorSpec::Randn { m: 5, n: 3 };
        let s1 = generate_system(&spec, 9).unwrap();
        let s2 = generate_system(&spec, 9).unwrap();
        assert_eq!(s1.a.to_dense().data(), s2.a.to_dense().data());
        assert_eq!(s1.b, s2.b);
        assert_eq!(s1.x_star, s2.x_star);
        let s3 = generate_system(&spec, 10).unwrap();
        assert_ne!(s1.b, s3.b);
    }

    #[test]
    fn two_trials_share_the_matrix() {
        let a = GeneratorSpec::Randn { m: 6, n: 3 }
            .matrix(&mut seeded(0))
            .unwrap();
        let t1 = planted_system("a", a.clone(), &mut seeded(1)).unwrap();
        let t2 = planted_system("a", a, &mut seeded(2)).unwrap();
        assert_ne!(t1.b, t2.b);
        assert_eq!(t1.a.to_dense().data(), t2.a.to_dense().data());
    }

    #[test]
    fn parses_sources() {
        assert_eq!(
            GeneratorSpec::parse("gen:randn:40x5").unwrap(),
            GeneratorSpec::Randn { m: 40, n: 5 }
        );
        assert_eq!(
            GeneratorSpec::parse("gen:onepr:2000x200").unwrap(),
            GeneratorSpec::OnePlusRand { m: 2000, n: 200 }
        );
        assert!(matches!(
            GeneratorSpec::parse("data/a.mtx").unwrap(),
            GeneratorSpec::FromFile { .. }
        ));
        assert!(GeneratorSpec::parse("gen:randn:40").is_err());
        assert!(GeneratorSpec::parse("gen:foo:4x4").is_err());
        assert!(generate_system(&GeneratorSpec::Randn { m: 0, n: 3 }, 0).is_err());
    }
}
