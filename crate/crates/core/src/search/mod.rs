//! Floating-point search for operators `T` with a small ratio
//! `outer(T) / inner(T)`, followed by exact re-certification of the
//! rationalized optimum.
//!
//! Columns are rescaled to unit max-norm before every evaluation, so the
//! objective reduces to `max_v |T^-1 v|_1` over cube vertices `v`.

mod nelder_mead;

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{enumerate_nice_octahedra, is_nice_by_membership, normalize_matrix_columns, ratio, OperatorT};
use crate::error::{Error, Result};
use crate::linalg::{QMatrix, QVector};
use crate::polytope::{MAX_DIM, MIN_DIM};
use crate::rational::{int, q, rationalize, to_canonical, to_f64, Rational};

pub use nelder_mead::{minimize, Minimum, Options as NelderMeadOptions};

pub const DEFAULT_DET_GUARD: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub n: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub max_denominator: u64,
    pub det_guard: f64,
    /// Allowed relative excess of the exact ratio over the float ratio.
    pub slack: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n: 3,
            restarts: 200,
            max_iters: 5000,
            seed: 42,
            max_denominator: 1_000_000,
            det_guard: DEFAULT_DET_GUARD,
            slack: 1e-3,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_DIM..=MAX_DIM).contains(&self.n) {
            return Err(Error::UnsupportedDimension(self.n));
        }
        let positive = self.restarts > 0
            && self.max_iters > 0
            && self.max_denominator > 0
            && self.det_guard > 0.0
            && self.slack > 0.0;
        if !positive {
            return Err(Error::PreconditionViolated("search parameters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub ratio: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub n: usize,
    pub seed: u64,
    pub best_float_ratio: f64,
    pub best_float_matrix: Vec<Vec<f64>>,
    #[serde(serialize_with = "crate::json::ser_matrix")]
    pub rationalized: QMatrix,
    /// Largest denominator bound tried when the optimum was rationalized.
    pub denominator_bound: u64,
    #[serde(serialize_with = "crate::json::ser_rational")]
    pub exact_ratio: Rational,
    pub exact_ratio_f64: f64,
    /// Proven value of the optimum, where known.
    pub theorem_value: Option<String>,
    /// `sqrt(n / 2)`, the conjectured asymptotic lower-bound constant.
    pub conjecture_constant: f64,
    /// For `n = 3`, whether the rationalized optimum is one of the 192
    /// optimal matrices.
    pub is_nice: Option<bool>,
    pub trace: Vec<RestartTrace>,
}

/// Proven value of the minimal ratio for `n = 2, 3, 4`.
pub fn theorem_value(n: usize) -> Option<Rational> {
    match n {
        2 => Some(int(1)),
        3 => Some(q(9, 5)),
        4 => Some(int(2)),
        _ => None,
    }
}

/// Inverse and determinant by Gauss–Jordan elimination with partial pivoting.
fn invert(t: &[Vec<f64>]) -> Option<(Vec<Vec<f64>>, f64)> {
    let n = t.len();
    let mut a: Vec<Vec<f64>> = t.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col] == 0.0 || !a[p][col].is_finite() {
            return None;
        }
        if p != col {
            a.swap(p, col);
            inv.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col];
        det *= pivot;
        for j in 0..n {
            a[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for i in 0..n {
            if i == col || a[i][col] == 0.0 {
                continue;
            }
            let f = a[i][col];
            for j in 0..n {
                a[i][j] -= f * a[col][j];
                inv[i][j] -= f * inv[col][j];
            }
        }
    }
    Some((inv, det))
}

/// Float mirror of the exact ratio. Returns `+inf` when `|det T|` is below
/// `det_guard`.
pub fn float_ratio_guarded(t: &[Vec<f64>], det_guard: f64) -> f64 {
    let n = t.len();
    let Some((inv, det)) = invert(t) else {
        return f64::INFINITY;
    };
    if det.abs() < det_guard {
        return f64::INFINITY;
    }
    let outer = (0..n)
        .map(|j| (0..n).map(|i| t[i][j].abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for mask in 0..1u32 << n {
        let norm: f64 = inv
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, x)| if mask >> j & 1 == 1 { *x } else { -*x })
                    .sum::<f64>()
                    .abs()
            })
            .sum();
        worst = worst.max(norm);
    }
    outer * worst
}

pub fn float_ratio(t: &[Vec<f64>]) -> f64 {
    float_ratio_guarded(t, DEFAULT_DET_GUARD)
}

/// Rescales columns to unit max-norm; `None` if a column vanishes.
pub fn normalize_float_columns(t: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = t.len();
    let mut out = t.to_vec();
    for j in 0..n {
        let m = (0..n).map(|i| t[i][j].abs()).fold(0.0, f64::max);
        if m == 0.0 || !m.is_finite() {
            return None;
        }
        for row in out.iter_mut() {
            row[j] /= m;
        }
    }
    Some(out)
}

fn unflatten(x: &[f64], n: usize) -> Vec<Vec<f64>> {
    x.chunks(n).map(<[f64]>::to_vec).collect()
}

fn objective(x: &[f64], n: usize, det_guard: f64) -> f64 {
    match normalize_float_columns(&unflatten(x, n)) {
        Some(t) => float_ratio_guarded(&t, det_guard),
        None => f64::INFINITY,
    }
}

/// One restart: a random start, then repeated Nelder–Mead runs from the
/// incumbent with a halving initial step until the budget is spent or the
/// step becomes negligible.
fn run_restart(config: &SearchConfig, restart: usize) -> (Vec<Vec<f64>>, f64, usize) {
    let n = config.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);
    let mut x: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let f = |x: &[f64]| objective(x, n, config.det_guard);
    let mut fx = f(&x);
    let mut step = 0.5;
    let mut used = 0;
    while used < config.max_iters && step > 1e-10 {
        let m = minimize(
            f,
            &x,
            &NelderMeadOptions {
                max_iters: config.max_iters - used,
                initial_step: step,
                ftol: 1e-13,
            },
        );
        used += m.iterations.max(1);
        if m.f < fx - 1e-13 {
            x = m.x;
            fx = m.f;
        } else {
            step /= 2.0;
        }
    }
    let t = normalize_float_columns(&unflatten(&x, n)).unwrap_or_else(|| unflatten(&x, n));
    (t, fx, used)
}

fn cmp_candidates(a: &(Vec<Vec<f64>>, f64), b: &(Vec<Vec<f64>>, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then_with(|| {
        a.0.iter()
            .flatten()
            .zip(b.0.iter().flatten())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Denominator bounds tried in turn: powers of ten up to `max`, then `max`.
fn denominator_ladder(max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(1u64), |d| d.checked_mul(10))
        .take_while(|&d| d < max)
        .collect();
    out.push(max);
    out
}

fn rationalize_matrix(t: &[Vec<f64>], bound: u64) -> Result<QMatrix> {
    let rows = t
        .iter()
        .map(|row| row.iter().map(|&x| rationalize(x, bound)).collect::<Result<Vec<_>>>().map(QVector))
        .collect::<Result<Vec<_>>>()?;
    QMatrix::from_rows(rows)
}

/// Exact ratio of a candidate, enforcing the proven lower bound.
fn certify_candidate(m: &QMatrix) -> Result<Option<(QMatrix, Rational)>> {
    let Ok(normalized) = normalize_matrix_columns(m) else {
        return Ok(None);
    };
    let Ok(op) = OperatorT::new(normalized.clone()) else {
        return Ok(None);
    };
    let exact = ratio(&op);
    if let Some(bound) = theorem_value(m.n()) {
        if exact < bound {
            return Err(Error::TheoremViolation {
                ratio: to_canonical(&exact),
                bound: to_canonical(&bound),
            });
        }
    }
    Ok(Some((normalized, exact)))
}

/// Random-restart search followed by rationalization and exact certification.
///
/// Restarts run in parallel, each on its own stream of the seeded generator;
/// the best candidate is chosen by `(ratio, entries)` so the result does not
/// depend on scheduling. The optimum is rationalized entrywise at each
/// denominator bound of the ladder and the smallest exact ratio is kept.
pub fn optimize(config: &SearchConfig) -> Result<SearchReport> {
    config.validate()?;
    let n = config.n;
    let runs: Vec<(usize, Vec<Vec<f64>>, f64, usize)> = (0..config.restarts)
        .into_par_iter()
        .map(|i| {
            let (t, f, it) = run_restart(config, i);
            (i, t, f, it)
        })
        .collect();
    let trace = runs
        .iter()
        .map(|(i, _, f, it)| RestartTrace {
            restart: *i,
            ratio: *f,
            iterations: *it,
        })
        .collect();
    let (best_t, best_f) = runs
        .into_iter()
        .map(|(_, t, f, _)| (t, f))
        .min_by(cmp_candidates)
        .expect("at least one restart");
    if !best_f.is_finite() {
        return Err(Error::Degenerate("every restart stayed singular".into()));
    }

    let ladder = denominator_ladder(config.max_denominator);
    let certified = ladder
        .par_iter()
        .map(|&bound| Ok((bound, rationalize_matrix(&best_t, bound).and_then(|m| certify_candidate(&m))?)))
        .collect::<Result<Vec<_>>>()?;
    let (bound, (rationalized, exact)) = certified
        .into_iter()
        .filter_map(|(b, c)| c.map(|c| (b, c)))
        .min_by(|a, b| a.1 .1.cmp(&b.1 .1).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::Degenerate("no rationalization is invertible".into()))?;

    let exact_f = to_f64(&exact);
    if exact_f > best_f * (1.0 + config.slack) {
        return Err(Error::CertificationRegression {
            exact: exact_f,
            float: best_f,
        });
    }
    let is_nice = (n == 3).then(|| OperatorT::new(rationalized.clone()).map(|op| is_nice_by_membership(&op)).unwrap_or(false));
    Ok(SearchReport {
        n,
        seed: config.seed,
        best_float_ratio: best_f,
        best_float_matrix: best_t,
        rationalized,
        denominator_bound: bound,
        exact_ratio: exact,
        exact_ratio_f64: exact_f,
        theorem_value: theorem_value(n).map(|v| to_canonical(&v)),
        conjecture_constant: (n as f64 / 2.0).sqrt(),
        is_nice,
        trace,
    })
}

/// Nearest of the 192 optimal 3×3 matrices in entrywise max-distance, if
/// within `0.05`.
pub fn snap_to_nice(t: &[Vec<f64>]) -> Option<QMatrix> {
    if t.len() != 3 || t.iter().any(|r| r.len() != 3) {
        return None;
    }
    enumerate_nice_octahedra()
        .into_iter()
        .map(|m| {
            let d = m
                .to_f64()
                .iter()
                .flatten()
                .zip(t.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            (d, m)
        })
        .filter(|(d, _)| *d <= 0.05)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, m)| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{base_nice_matrix, four_dim_examples};

    fn identity(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
    }

    #[test]
    fn float_ratio_examples() {
        assert!((float_ratio(&identity(3)) - 3.0).abs() < 1e-12);
        assert!((float_ratio(&base_nice_matrix().to_f64()) - 1.8).abs() < 1e-12);
        assert!((float_ratio(&four_dim_examples()[0].to_f64()) - 2.0).abs() < 1e-12);
        let singular = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(float_ratio(&singular), f64::INFINITY);
    }

    #[test]
    fn float_ratio_matches_exact_on_small_rationals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 50 {
            let rows: Vec<QVector> = (0..3)
                .map(|_| {
                    QVector(
                        (0..3)
                            .map(|_| Rational::new(rng.random_range(-1000i64..=1000).into(), rng.random_range(1i64..=1000).into()))
                            .collect(),
                    )
                })
                .collect();
            let m = QMatrix::from_rows(rows).unwrap();
            let Ok(op) = OperatorT::new(m.clone()) else { continue };
            let exact = to_f64(&ratio(&op));
            let float = float_ratio(&m.to_f64());
            assert!(((float - exact) / exact).abs() < 1e-9, "{float} vs {exact}");
            checked += 1;
        }
    }

    #[test]
    fn ladder() {
        assert_eq!(denominator_ladder(1_000_000), vec![1, 10, 100, 1000, 10_000, 100_000, 1_000_000]);
        assert_eq!(denominator_ladder(50), vec![1, 10, 50]);
        assert_eq!(denominator_ladder(1), vec![1]);
    }

    #[test]
    fn snapping() {
        let mut t = base_nice_matrix().to_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for x in t.iter_mut().flatten() {
            *x += rng.random_range(-0.01..0.01);
        }
        assert_eq!(snap_to_nice(&t), Some(base_nice_matrix()));
        assert_eq!(snap_to_nice(&identity(3)), None);
    }

    #[test]
    fn invalid_configs() {
        let bad = SearchConfig { n: 1, ..SearchConfig::default() };
        assert_eq!(bad.validate(), Err(Error::UnsupportedDimension(1)));
        let bad = SearchConfig { restarts: 0, ..SearchConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn planar_search_finds_the_square() {
        let report = optimize(&SearchConfig {
            n: 2,
            restarts: 20,
            seed: 1,
            ..SearchConfig::default()
        })
        .unwrap();
        assert_eq!(report.exact_ratio, int(1));
        assert_eq!(report.trace.len(), 20);
    }

    #[test]
    fn search_is_deterministic() {
        let config = SearchConfig {
            n: 3,
            restarts: 8,
            max_iters: 500,
            seed: 5,
            ..SearchConfig::default()
        };
        assert_eq!(optimize(&config).unwrap(), optimize(&config).unwrap());
    }
}
