//! Implicit-feedback weighted matrix factorization solved by alternating
//! least squares.
//!
//! Preferences are binary (the corpus is deduplicated), so the confidence
//! of an observed pair is `1 + confidence_alpha` and unobserved pairs keep
//! the base weight 1. Each half-sweep solves one side's regularized normal
//! equations exactly, so the objective
//!
//! `J = sum_ui c_ui (p_ui - x_u . y_i)^2 + lambda (|X|^2 + |Y|^2)`
//!
//! is non-increasing across sweeps.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ids::{UserId, VenueId};
use crate::interactions::InteractionSet;
use crate::rng::SplitMix64;

use super::Recommender;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorModelParams {
    pub factors: usize,
    pub confidence_alpha: f64,
    pub lambda: f64,
    pub iterations: usize,
    /// Stop early when the relative objective change drops below this;
    /// `None` always runs the full `iterations` sweeps.
    pub early_stop: Option<f64>,
}

impl FactorModelParams {
    pub fn new(
        factors: usize,
        confidence_alpha: f64,
        lambda: f64,
        iterations: usize,
    ) -> Result<Self> {
        let p = Self {
            factors,
            confidence_alpha,
            lambda,
            iterations,
            early_stop: Some(1e-4),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.factors < 1 {
            return Err(Error::Config("factor count must be >= 1".into()));
        }
        if self.iterations < 1 {
            return Err(Error::Config("iteration count must be >= 1".into()));
        }
        if !self.confidence_alpha.is_finite() || self.confidence_alpha <= 0.0 {
            return Err(Error::Config(format!(
                "confidence alpha {} must be positive",
                self.confidence_alpha
            )));
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Config(format!(
                "lambda {} must be nonnegative",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Dense factor matrices for the users and venues seen at fit time.
#[derive(Debug, Clone)]
pub struct FactorModel {
    factors: usize,
    user_ids: Vec<UserId>,
    item_ids: Vec<VenueId>,
    /// |U| x f, row-major.
    user_factors: Vec<f64>,
    /// |I| x f, row-major.
    item_factors: Vec<f64>,
    /// Objective value after each completed sweep.
    objective_trace: Vec<f64>,
}

impl FactorModel {
    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn user_ids(&self) -> &[UserId] {
        &self.user_ids
    }

    pub fn item_ids(&self) -> &[VenueId] {
        &self.item_ids
    }

    pub fn user_factors(&self) -> &[f64] {
        &self.user_factors
    }

    pub fn item_factors(&self) -> &[f64] {
        &self.item_factors
    }

    pub fn objective_trace(&self) -> &[f64] {
        &self.objective_trace
    }

    pub fn user_row(&self, user: UserId) -> Option<&[f64]> {
        let idx = self.user_ids.binary_search(&user).ok()?;
        Some(&self.user_factors[idx * self.factors..(idx + 1) * self.factors])
    }

    pub fn item_row(&self, item: VenueId) -> Option<&[f64]> {
        let idx = self.item_ids.binary_search(&item).ok()?;
        Some(&self.item_factors[idx * self.factors..(idx + 1) * self.factors])
    }

    /// Binary dump: magic, version, dimension header, id arrays, then both
    /// factor matrices as little-endian f64 rows.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"FMDL")?;
        w.write_all(&1u32.to_le_bytes())?;
        w.write_all(&(self.user_ids.len() as u64).to_le_bytes())?;
        w.write_all(&(self.item_ids.len() as u64).to_le_bytes())?;
        w.write_all(&(self.factors as u64).to_le_bytes())?;
        for id in &self.user_ids {
            w.write_all(&id.0.to_le_bytes())?;
        }
        for id in &self.item_ids {
            w.write_all(&id.0.to_le_bytes())?;
        }
        for x in self.user_factors.iter().chain(self.item_factors.iter()) {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"FMDL" {
            return Err(Error::Data("factor model dump: bad magic".into()));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        if u32::from_le_bytes(u32buf) != 1 {
            return Err(Error::Data("factor model dump: unsupported version".into()));
        }
        let mut u64buf = [0u8; 8];
        let mut read_u64 = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut u64buf)?;
            Ok(u64::from_le_bytes(u64buf))
        };
        let n_users = read_u64(&mut r)? as usize;
        let n_items = read_u64(&mut r)? as usize;
        let factors = read_u64(&mut r)? as usize;

        let read_ids = |r: &mut R, n: usize| -> Result<Vec<u32>> {
            let mut ids = Vec::with_capacity(n);
            let mut buf = [0u8; 4];
            for _ in 0..n {
                r.read_exact(&mut buf)?;
                ids.push(u32::from_le_bytes(buf));
            }
            Ok(ids)
        };
        let user_ids: Vec<UserId> = read_ids(&mut r, n_users)?.into_iter().map(UserId).collect();
        let item_ids: Vec<VenueId> = read_ids(&mut r, n_items)?
            .into_iter()
            .map(VenueId)
            .collect();

        let read_matrix = |r: &mut R, n: usize| -> Result<Vec<f64>> {
            let mut m = Vec::with_capacity(n);
            let mut buf = [0u8; 8];
            for _ in 0..n {
                r.read_exact(&mut buf)?;
                m.push(f64::from_le_bytes(buf));
            }
            Ok(m)
        };
        let user_factors = read_matrix(&mut r, n_users * factors)?;
        let item_factors = read_matrix(&mut r, n_items * factors)?;
        Ok(Self {
            factors,
            user_ids,
            item_ids,
            user_factors,
            item_factors,
            objective_trace: Vec::new(),
        })
    }
}

impl Recommender for FactorModel {
    fn name(&self) -> &str {
        "hkv"
    }

    /// Dot product of the two factor rows; users or venues unseen at fit
    /// time cannot be scored.
    fn score(&self, user: UserId, venue: VenueId) -> Option<f64> {
        let x = self.user_row(user)?;
        let y = self.item_row(venue)?;
        Some(dot(x, y))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// f x f Gramian M^T M of a row-major n x f matrix.
fn gramian(matrix: &[f64], f: usize) -> Vec<f64> {
    let n = matrix.len() / f;
    let mut g = vec![0.0; f * f];
    for row in 0..n {
        let r = &matrix[row * f..(row + 1) * f];
        for a in 0..f {
            for b in a..f {
                g[a * f + b] += r[a] * r[b];
            }
        }
    }
    for a in 0..f {
        for b in 0..a {
            g[a * f + b] = g[b * f + a];
        }
    }
    g
}

/// Solve the symmetric positive-definite system `A x = b` in place via
/// Cholesky. Fails when a pivot collapses, which can only happen at
/// `lambda = 0`.
fn solve_spd(a: &mut [f64], b: &mut [f64], f: usize) -> std::result::Result<(), ()> {
    // decompose A = L L^T
    for j in 0..f {
        let mut d = a[j * f + j];
        for k in 0..j {
            d -= a[j * f + k] * a[j * f + k];
        }
        if d <= 1e-300 {
            return Err(());
        }
        let d = d.sqrt();
        a[j * f + j] = d;
        for i in (j + 1)..f {
            let mut s = a[i * f + j];
            for k in 0..j {
                s -= a[i * f + k] * a[j * f + k];
            }
            a[i * f + j] = s / d;
        }
    }
    // forward substitution L z = b
    for i in 0..f {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * f + k] * b[k];
        }
        b[i] = s / a[i * f + i];
    }
    // back substitution L^T x = z
    for i in (0..f).rev() {
        let mut s = b[i];
        for k in (i + 1)..f {
            s -= a[k * f + i] * b[k];
        }
        b[i] = s / a[i * f + i];
    }
    Ok(())
}

/// Solve every row of one side given the other side's factors.
///
/// For each row u with observed set L(u):
/// `(G + alpha * sum_{i in L(u)} y_i y_i^T + lambda I) x_u
///    = (1 + alpha) * sum_{i in L(u)} y_i`
/// where `G` is the Gramian of the fixed side.
fn solve_side(
    observed: &[Vec<usize>],
    fixed: &[f64],
    gram: &[f64],
    f: usize,
    alpha: f64,
    lambda: f64,
) -> std::result::Result<Vec<f64>, usize> {
    let mut out = vec![0.0; observed.len() * f];
    let results: Vec<std::result::Result<(), ()>> = out
        .par_chunks_mut(f)
        .enumerate()
        .map(|(row, x)| {
            let mut a = gram.to_vec();
            let mut b = vec![0.0; f];
            for &obs in &observed[row] {
                let y = &fixed[obs * f..(obs + 1) * f];
                for p in 0..f {
                    b[p] += (1.0 + alpha) * y[p];
                    for q in 0..f {
                        a[p * f + q] += alpha * y[p] * y[q];
                    }
                }
            }
            for p in 0..f {
                a[p * f + p] += lambda;
            }
            solve_spd(&mut a, &mut b, f)?;
            x.copy_from_slice(&b);
            Ok(())
        })
        .collect();
    match results.iter().position(|r| r.is_err()) {
        None => Ok(out),
        Some(row) => Err(row),
    }
}

/// Objective evaluated with the Gramian trick: the all-pairs base term is
/// `sum_u x_u^T G_y x_u`, corrected on observed pairs.
fn objective(
    observed_by_user: &[Vec<usize>],
    x: &[f64],
    y: &[f64],
    f: usize,
    alpha: f64,
    lambda: f64,
) -> f64 {
    let gy = gramian(y, f);
    let mut j = 0.0;
    for (u, obs) in observed_by_user.iter().enumerate() {
        let xu = &x[u * f..(u + 1) * f];
        // x_u^T G_y x_u
        let mut base = 0.0;
        for p in 0..f {
            let mut s = 0.0;
            for q in 0..f {
                s += gy[p * f + q] * xu[q];
            }
            base += xu[p] * s;
        }
        j += base;
        for &i in obs {
            let s = dot(xu, &y[i * f..(i + 1) * f]);
            j += (1.0 + alpha) * (1.0 - s) * (1.0 - s) - s * s;
        }
    }
    let norm2 = |m: &[f64]| m.iter().map(|v| v * v).sum::<f64>();
    j + lambda * (norm2(x) + norm2(y))
}

/// Fit the factorization on a nonempty training set.
///
/// Item factors start uniform in [0, 1/sqrt(f)] from `seed`; user rows are
/// solved first. Runs `iterations` full sweeps (user side then item side),
/// optionally stopping early on a small relative objective change.
pub fn fit_hkv(
    train: &InteractionSet,
    params: &FactorModelParams,
    seed: u64,
) -> Result<FactorModel> {
    params.validate()?;
    if train.is_empty() {
        return Err(Error::Data("cannot factorize an empty training set".into()));
    }

    let f = params.factors;
    let user_ids: Vec<UserId> = train.users().collect();
    let item_ids: Vec<VenueId> = train.venues().collect();
    let item_index: std::collections::HashMap<VenueId, usize> = item_ids
        .iter()
        .enumerate()
        .map(|(idx, &v)| (v, idx))
        .collect();
    let user_index: std::collections::HashMap<UserId, usize> = user_ids
        .iter()
        .enumerate()
        .map(|(idx, &u)| (u, idx))
        .collect();

    let observed_by_user: Vec<Vec<usize>> = user_ids
        .iter()
        .map(|&u| train.venues_of(u).iter().map(|v| item_index[v]).collect())
        .collect();
    let observed_by_item: Vec<Vec<usize>> = item_ids
        .iter()
        .map(|&v| train.users_of(v).iter().map(|u| user_index[u]).collect())
        .collect();

    let mut rng = SplitMix64::new(seed);
    let scale = 1.0 / (f as f64).sqrt();
    let mut item_factors: Vec<f64> = (0..item_ids.len() * f)
        .map(|_| rng.next_f64() * scale)
        .collect();
    let mut user_factors = vec![0.0; user_ids.len() * f];

    let alpha = params.confidence_alpha;
    let lambda = params.lambda;
    let mut trace = Vec::with_capacity(params.iterations);

    for _sweep in 0..params.iterations {
        let gy = gramian(&item_factors, f);
        user_factors = solve_side(&observed_by_user, &item_factors, &gy, f, alpha, lambda)
            .map_err(|row| Error::Numerical {
                user: Some(user_ids[row]),
                detail: "singular normal equations on the user side".into(),
            })?;

        let gx = gramian(&user_factors, f);
        item_factors = solve_side(&observed_by_item, &user_factors, &gx, f, alpha, lambda)
            .map_err(|row| Error::Numerical {
                user: None,
                detail: format!("singular normal equations for venue {}", item_ids[row].0),
            })?;

        let j = objective(
            &observed_by_user,
            &user_factors,
            &item_factors,
            f,
            alpha,
            lambda,
        );
        trace.push(j);
        if let Some(tol) = params.early_stop {
            if trace.len() >= 2 {
                let prev = trace[trace.len() - 2];
                if (prev - j).abs() <= tol * prev.abs().max(f64::MIN_POSITIVE) {
                    break;
                }
            }
        }
    }

    Ok(FactorModel {
        factors: f,
        user_ids,
        item_ids,
        user_factors,
        item_factors,
        objective_trace: trace,
    })
}

/// One extra user-side solve against the model's current item factors.
/// The result minimizes the objective in the user block exactly, which is
/// what makes per-row gradient checks meaningful.
pub fn resolve_user_side(
    train: &InteractionSet,
    model: &FactorModel,
    params: &FactorModelParams,
) -> Result<FactorModel> {
    let f = model.factors;
    let item_index: std::collections::HashMap<VenueId, usize> = model
        .item_ids
        .iter()
        .enumerate()
        .map(|(idx, &v)| (v, idx))
        .collect();
    let observed_by_user: Vec<Vec<usize>> = model
        .user_ids
        .iter()
        .map(|&u| train.venues_of(u).iter().map(|v| item_index[v]).collect())
        .collect();
    let gy = gramian(&model.item_factors, f);
    let user_factors = solve_side(
        &observed_by_user,
        &model.item_factors,
        &gy,
        f,
        params.confidence_alpha,
        params.lambda,
    )
    .map_err(|row| Error::Numerical {
        user: Some(model.user_ids[row]),
        detail: "singular normal equations on the user side".into(),
    })?;
    Ok(FactorModel {
        user_factors,
        objective_trace: Vec::new(),
        ..model.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(factors: usize, alpha: f64, lambda: f64, iterations: usize) -> FactorModelParams {
        FactorModelParams {
            factors,
            confidence_alpha: alpha,
            lambda,
            iterations,
            early_stop: None,
        }
    }

    fn one_by_one() -> InteractionSet {
        InteractionSet::from_triples([(UserId(0), VenueId(0), 0)]).unwrap()
    }

    #[test]
    fn scalar_problem_converges_to_fixed_point() {
        // 1 user, 1 item, f=1: x = 2y/(2y^2+.01), y = 2x/(2x^2+.01);
        // the fixed point has x*y = 0.995.
        let m = fit_hkv(&one_by_one(), &params(1, 1.0, 0.01, 10), 7).unwrap();
        let s = m.score(UserId(0), VenueId(0)).unwrap();
        assert!(s > 0.8 && s < 1.0, "got {s}");
        assert!((s - 0.995).abs() < 0.01);
    }

    #[test]
    fn huge_lambda_drives_factors_to_zero() {
        let m = fit_hkv(&one_by_one(), &params(1, 1.0, 1e6, 5), 7).unwrap();
        let s = m.score(UserId(0), VenueId(0)).unwrap();
        assert!(s.abs() < 1e-4, "got {s}");
    }

    #[test]
    fn identity_matrix_reconstruction() {
        let train =
            InteractionSet::from_triples((0..4).map(|i| (UserId(i), VenueId(i), 0i64))).unwrap();
        let m = fit_hkv(&train, &params(4, 1.0, 1e-6, 20), 11).unwrap();
        for u in 0..4u32 {
            for i in 0..4u32 {
                let s = m.score(UserId(u), VenueId(i)).unwrap();
                let r = reference_score(&train, 4, 1.0, 1e-6, 20, 11, u, i);
                if u == i {
                    assert!(s >= 0.5, "diagonal ({u},{i}) too small: {s}");
                    assert!(r >= 0.5, "reference diagonal ({u},{i}) too small: {r}");
                } else {
                    assert!(s <= 0.3, "off-diagonal ({u},{i}) too big: {s}");
                    assert!(r <= 0.3, "reference off-diagonal ({u},{i}) too big: {r}");
                }
            }
        }
    }

    /// Reference dense alternating least squares: explicit confidence
    /// weights over every (user, item) cell, normal equations assembled by
    /// direct loops and solved with Gaussian elimination. Shares nothing
    /// with the production path except the initialization stream.
    fn reference_dense_als(
        train: &InteractionSet,
        f: usize,
        alpha: f64,
        lambda: f64,
        sweeps: usize,
        seed: u64,
    ) -> (Vec<UserId>, Vec<VenueId>, Vec<f64>, Vec<f64>) {
        let users: Vec<UserId> = train.users().collect();
        let items: Vec<VenueId> = train.venues().collect();
        let mut rng = crate::rng::SplitMix64::new(seed);
        let scale = 1.0 / (f as f64).sqrt();
        let mut y: Vec<f64> = (0..items.len() * f)
            .map(|_| rng.next_f64() * scale)
            .collect();
        let mut x = vec![0.0; users.len() * f];

        let solve_rows =
            |rows: &mut [f64], own: &dyn Fn(usize) -> Vec<usize>, fixed: &[f64], n_fixed: usize| {
                let n_rows = rows.len() / f;
                for r in 0..n_rows {
                    let observed = own(r);
                    let mut a = vec![0.0; f * f];
                    let mut b = vec![0.0; f];
                    for j in 0..n_fixed {
                        let p = if observed.contains(&j) { 1.0 } else { 0.0 };
                        let c = if p > 0.0 { 1.0 + alpha } else { 1.0 };
                        let yj = &fixed[j * f..(j + 1) * f];
                        for s in 0..f {
                            b[s] += c * p * yj[s];
                            for t in 0..f {
                                a[s * f + t] += c * yj[s] * yj[t];
                            }
                        }
                    }
                    for s in 0..f {
                        a[s * f + s] += lambda;
                    }
                    let solved = gaussian_solve(&mut a, &mut b, f);
                    rows[r * f..(r + 1) * f].copy_from_slice(&solved);
                }
            };

        let item_index: std::collections::HashMap<VenueId, usize> =
            items.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let user_index: std::collections::HashMap<UserId, usize> =
            users.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        for _ in 0..sweeps {
            let yy = y.clone();
            let users_ref = &users;
            let own_u = |r: usize| -> Vec<usize> {
                train
                    .venues_of(users_ref[r])
                    .iter()
                    .map(|v| item_index[v])
                    .collect()
            };
            solve_rows(&mut x, &own_u, &yy, items.len());

            let xx = x.clone();
            let items_ref = &items;
            let own_i = |r: usize| -> Vec<usize> {
                train
                    .users_of(items_ref[r])
                    .iter()
                    .map(|u| user_index[u])
                    .collect()
            };
            solve_rows(&mut y, &own_i, &xx, users.len());
        }
        (users, items, x, y)
    }

    fn gaussian_solve(a: &mut [f64], b: &mut [f64], n: usize) -> Vec<f64> {
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[i * n + col]
                        .abs()
                        .partial_cmp(&a[j * n + col].abs())
                        .unwrap()
                })
                .unwrap();
            if pivot != col {
                for t in 0..n {
                    a.swap(col * n + t, pivot * n + t);
                }
                b.swap(col, pivot);
            }
            let d = a[col * n + col];
            for row in (col + 1)..n {
                let m = a[row * n + col] / d;
                for t in col..n {
                    a[row * n + t] -= m * a[col * n + t];
                }
                b[row] -= m * b[col];
            }
        }
        let mut out = vec![0.0; n];
        for row in (0..n).rev() {
            let mut s = b[row];
            for t in (row + 1)..n {
                s -= a[row * n + t] * out[t];
            }
            out[row] = s / a[row * n + row];
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn reference_score(
        train: &InteractionSet,
        f: usize,
        alpha: f64,
        lambda: f64,
        sweeps: usize,
        seed: u64,
        u: u32,
        i: u32,
    ) -> f64 {
        let (users, items, x, y) = reference_dense_als(train, f, alpha, lambda, sweeps, seed);
        let ui = users.iter().position(|&id| id == UserId(u)).unwrap();
        let ii = items.iter().position(|&id| id == VenueId(i)).unwrap();
        (0..f).map(|t| x[ui * f + t] * y[ii * f + t]).sum()
    }

    #[test]
    fn matches_reference_dense_solver_trajectory() {
        // 8 users x 6 items, moderate density; identical initialization
        // stream, so both solvers walk the same trajectory up to solver
        // roundoff
        let mut triples = Vec::new();
        for u in 0..8u32 {
            for i in 0..6u32 {
                if (u * 7 + i * 3) % 4 == 0 {
                    triples.push((UserId(u), VenueId(i), 0i64));
                }
            }
        }
        let train = InteractionSet::from_triples(triples).unwrap();
        let p = params(4, 1.5, 0.1, 6);
        let model = fit_hkv(&train, &p, 23).unwrap();
        let (users, items, x, y) = reference_dense_als(&train, 4, 1.5, 0.1, 6, 23);
        assert_eq!(model.user_ids(), users.as_slice());
        assert_eq!(model.item_ids(), items.as_slice());
        for (got, want) in model.user_factors().iter().zip(&x) {
            assert!(
                (got - want).abs() <= 1e-9,
                "user factors diverged: {got} vs {want}"
            );
        }
        for (got, want) in model.item_factors().iter().zip(&y) {
            assert!(
                (got - want).abs() <= 1e-9,
                "item factors diverged: {got} vs {want}"
            );
        }
    }

    #[test]
    fn objective_is_non_increasing() {
        let train = InteractionSet::from_triples([
            (UserId(0), VenueId(0), 0),
            (UserId(0), VenueId(1), 0),
            (UserId(1), VenueId(1), 0),
            (UserId(1), VenueId(2), 0),
            (UserId(2), VenueId(0), 0),
            (UserId(2), VenueId(2), 0),
        ])
        .unwrap();
        let m = fit_hkv(&train, &params(3, 10.0, 0.1, 15), 3).unwrap();
        let trace = m.objective_trace();
        assert_eq!(trace.len(), 15);
        for w in trace.windows(2) {
            assert!(
                w[1] <= w[0] * (1.0 + 1e-9),
                "objective rose: {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn unseen_users_and_items_cannot_be_scored() {
        let m = fit_hkv(&one_by_one(), &params(2, 1.0, 0.1, 3), 5).unwrap();
        assert_eq!(m.score(UserId(5), VenueId(0)), None);
        assert_eq!(m.score(UserId(0), VenueId(5)), None);
    }

    #[test]
    fn empty_train_is_rejected() {
        assert!(fit_hkv(&InteractionSet::empty(), &params(2, 1.0, 0.1, 3), 5).is_err());
    }

    #[test]
    fn early_stop_truncates_the_trace() {
        let mut p = params(2, 1.0, 0.5, 50);
        p.early_stop = Some(1e-4);
        let train = InteractionSet::from_triples([
            (UserId(0), VenueId(0), 0),
            (UserId(1), VenueId(0), 0),
            (UserId(1), VenueId(1), 0),
        ])
        .unwrap();
        let m = fit_hkv(&train, &p, 5).unwrap();
        assert!(m.objective_trace().len() < 50);
    }

    #[test]
    fn dump_round_trips() {
        let train = InteractionSet::from_triples([
            (UserId(3), VenueId(1), 0),
            (UserId(3), VenueId(2), 0),
            (UserId(8), VenueId(2), 0),
        ])
        .unwrap();
        let m = fit_hkv(&train, &params(2, 1.0, 0.1, 5), 13).unwrap();
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        let loaded = FactorModel::read_from(buf.as_slice()).unwrap();
        assert_eq!(loaded.user_ids(), m.user_ids());
        assert_eq!(loaded.item_ids(), m.item_ids());
        assert_eq!(loaded.user_factors(), m.user_factors());
        assert_eq!(loaded.item_factors(), m.item_factors());
        assert_eq!(
            loaded.score(UserId(3), VenueId(2)),
            m.score(UserId(3), VenueId(2))
        );
    }

    #[test]
    fn zero_lambda_on_degenerate_data_reports_numerical_error() {
        // two users sharing one item, f > observations: singular at lambda=0
        let train =
            InteractionSet::from_triples([(UserId(0), VenueId(0), 0), (UserId(1), VenueId(0), 0)])
                .unwrap();
        let r = fit_hkv(&train, &params(3, 1.0, 0.0, 3), 5);
        assert!(matches!(r, Err(Error::Numerical { .. })));
    }

    #[test]
    fn params_validation() {
        assert!(FactorModelParams::new(0, 1.0, 0.1, 5).is_err());
        assert!(FactorModelParams::new(2, -1.0, 0.1, 5).is_err());
        assert!(FactorModelParams::new(2, 1.0, -0.1, 5).is_err());
        assert!(FactorModelParams::new(2, 1.0, 0.1, 0).is_err());
        assert!(FactorModelParams::new(2, 1.0, 0.1, 5).is_ok());
    }
}
