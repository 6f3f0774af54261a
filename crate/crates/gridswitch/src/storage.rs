//! Quadratic storage-function synthesis for linear supply models.
//!
//! For a model (A, B, C, Dff) driven by u = -omega we search for a symmetric
//! matrix P such that V(x) = x'Px certifies input strict passivity with
//! penalty eps u^2, i.e. d/dt V <= u y - eps u^2 along the dynamics. This is
//! equivalent to negative semidefiniteness of the block matrix
//!
//!   M(P) = [ A'P + PA      PB - C'/2   ]
//!          [ B'P - C/2    -(Dff - eps) ]
//!
//! together with P >= 0. Instead of a semidefinite-programming dependency we
//! run a projected subgradient search: equality constraints forced by
//! integrator (kernel) directions of A are eliminated linearly, structurally
//! null directions of M are deflated, and Polyak-stepped subgradient descent
//! drives the largest remaining eigenvalue below zero. Every candidate is
//! re-checked by a randomized dissipation oracle before it is accepted.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::supply::{LinearStateSpace, SupplyError, SupplyModel};

/// Quadratic storage V(x) = (x - x_star)' P (x - x_star).
#[derive(Debug, Clone, PartialEq)]
pub struct StorageFunction {
    pub p: DMatrix<f64>,
    pub x_star: DVector<f64>,
}

impl StorageFunction {
    pub fn value(&self, x: &[f64]) -> f64 {
        let dx = DVector::from_row_slice(x) - &self.x_star;
        (dx.transpose() * &self.p * &dx)[(0, 0)]
    }

    /// Same matrix re-anchored at a different equilibrium internal state.
    pub fn with_shift(&self, x_star: &[f64]) -> StorageFunction {
        StorageFunction {
            p: self.p.clone(),
            x_star: DVector::from_row_slice(x_star),
        }
    }
}

/// Number of random (x, u) samples used by the acceptance oracle.
const ORACLE_SAMPLES: usize = 1000;
const ORACLE_TOL: f64 = 1e-8;

/// Search for a quadratic storage matrix certifying the dissipation
/// inequality with penalty `epsilon * u^2`. Failure is non-fatal for the
/// wider toolkit: the Lyapunov monitor falls back to supply-rate mode.
pub fn derive_storage(model: &SupplyModel, epsilon: f64) -> Result<StorageFunction, SupplyError> {
    let ss = model.to_state_space()?;
    let n = ss.a.nrows();
    if n == 0 {
        // stateless: inequality reduces to 0 <= (Dff - eps) u^2
        if ss.dff - epsilon < -1e-12 {
            return Err(SupplyError::StorageSearchFailed(format!(
                "feedthrough {} below requested margin {epsilon}",
                ss.dff
            )));
        }
        return Ok(StorageFunction {
            p: DMatrix::zeros(0, 0),
            x_star: DVector::zeros(0),
        });
    }

    let search = StorageSearch::new(&ss, epsilon);
    let seed = analytic_seed(model, epsilon).unwrap_or_else(|| DMatrix::identity(n, n) * 0.5);

    for delta in [1e-4, 1e-6, 1e-8] {
        if let Some(p) = search.solve(&seed, delta) {
            verify_dissipation_samples(&ss, &p, epsilon, ORACLE_TOL)?;
            return Ok(StorageFunction {
                p,
                x_star: DVector::zeros(n),
            });
        }
    }
    Err(SupplyError::StorageSearchFailed(
        "subgradient search did not reach a feasible storage matrix".into(),
    ))
}

/// Randomized check of 2 x'P(Ax + Bu) <= u (Cx + Dff u) - eps u^2 on a
/// seeded sample cloud. Errors with the worst violation when it fails.
pub fn verify_dissipation_samples(
    ss: &LinearStateSpace,
    p: &DMatrix<f64>,
    epsilon: f64,
    tol: f64,
) -> Result<(), SupplyError> {
    let n = ss.a.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5704_a6e1);
    let mut worst: f64 = 0.0;
    for _ in 0..ORACLE_SAMPLES {
        let x = DVector::from_iterator(n, (0..n).map(|_| rng.gen_range(-1.0..1.0)));
        let u: f64 = rng.gen_range(-1.0..1.0);
        let xdot = &ss.a * &x + &ss.b * u;
        let y = ss.c.dot(&x) + ss.dff * u;
        let lhs = 2.0 * (p * &xdot).dot(&x);
        let rhs = u * y - epsilon * u * u;
        worst = worst.max(lhs - rhs);
    }
    if worst > tol {
        return Err(SupplyError::StorageSearchFailed(format!(
            "dissipation oracle violated by {worst:.3e}"
        )));
    }
    Ok(())
}

/// Known closed-form storage for the PI-with-lag model, used to seed the
/// search: V = alpha^2/(2K) + (c tau/2)(alpha - beta)^2.
fn analytic_seed(model: &SupplyModel, epsilon: f64) -> Option<DMatrix<f64>> {
    if let SupplyModel::PiLag {
        k,
        k_tilde,
        d,
        tau_beta,
    } = model
    {
        let m = k * tau_beta - k_tilde;
        let c = if m > 1e-9 {
            1.0 / m
        } else {
            1.0 / (4.0 * (d - epsilon).max(1e-6))
        };
        let h = c * tau_beta / 2.0;
        return Some(DMatrix::from_row_slice(
            2,
            2,
            &[1.0 / (2.0 * k) + h, -h, -h, h],
        ));
    }
    None
}

/// Search state shared across restart attempts: constraint elimination,
/// deflation basis, and the symmetric parametrization.
struct StorageSearch {
    ss: LinearStateSpace,
    epsilon: f64,
    n: usize,
    /// particular solution of the equality constraints, in theta coordinates
    theta0: DVector<f64>,
    /// orthonormal basis of the constraint nullspace (columns)
    free: DMatrix<f64>,
    /// orthonormal basis of the non-deflated subspace of R^{n+1} (columns)
    keep: DMatrix<f64>,
}

impl StorageSearch {
    fn new(ss: &LinearStateSpace, epsilon: f64) -> StorageSearch {
        let n = ss.a.nrows();
        let n_theta = n * (n + 1) / 2;
        let marginal = (ss.dff - epsilon).abs() < 1e-12;
        let kernel = null_space(&ss.a);

        // linear equality constraints G theta = rhs forced by structurally
        // null directions of M
        let mut rows: Vec<DVector<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for xi in &kernel {
            // (A'P + PA) xi = A'P xi must vanish
            for i in 0..n {
                let mut row = DVector::zeros(n_theta);
                for t in 0..n_theta {
                    let e = basis_matrix(n, t);
                    row[t] = (ss.a.transpose() * e * xi)[i];
                }
                rows.push(row);
                rhs.push(0.0);
            }
            // B'P xi = C xi / 2
            let mut row = DVector::zeros(n_theta);
            for t in 0..n_theta {
                let e = basis_matrix(n, t);
                row[t] = ss.b.dot(&(e * xi));
            }
            rows.push(row);
            rhs.push(ss.c.dot(xi) / 2.0);
        }
        if marginal {
            // zero corner entry forces the off-diagonal block to vanish:
            // PB = C/2 exactly
            for i in 0..n {
                let mut row = DVector::zeros(n_theta);
                for t in 0..n_theta {
                    let e = basis_matrix(n, t);
                    row[t] = (e * &ss.b)[i];
                }
                rows.push(row);
                rhs.push(ss.c[i] / 2.0);
            }
        }

        let (theta0, free) = solve_affine_family(&rows, &rhs, n_theta);

        // deflate the directions of R^{n+1} along which M(P) is identically
        // zero once the constraints hold
        let mut deflated: Vec<DVector<f64>> = Vec::new();
        for xi in &kernel {
            let mut v = DVector::zeros(n + 1);
            for i in 0..n {
                v[i] = xi[i];
            }
            deflated.push(v);
        }
        if marginal {
            let mut v = DVector::zeros(n + 1);
            v[n] = 1.0;
            deflated.push(v);
        }
        let keep = orthonormal_complement(&deflated, n + 1);

        StorageSearch {
            ss: ss.clone(),
            epsilon,
            n,
            theta0,
            free,
            keep,
        }
    }

    fn dissipation_matrix(&self, p: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n + 1, n + 1);
        let top = self.ss.a.transpose() * p + p * &self.ss.a;
        let off = p * &self.ss.b - &self.ss.c * 0.5;
        m.view_mut((0, 0), (n, n)).copy_from(&top);
        for i in 0..n {
            m[(i, n)] = off[i];
            m[(n, i)] = off[i];
        }
        m[(n, n)] = -(self.ss.dff - self.epsilon);
        m
    }

    /// Polyak-stepped subgradient descent over the free coordinates,
    /// alternating between the eigenvalue objectives of M (deflated) and -P.
    /// Returns a candidate P when both reach feasibility.
    fn solve(&self, seed: &DMatrix<f64>, delta: f64) -> Option<DMatrix<f64>> {
        let n = self.n;
        let n_free = self.free.ncols();
        // project the seed onto the constraint manifold
        let theta_seed = pack_symmetric(seed);
        let mut coords = self.free.transpose() * (theta_seed - &self.theta0);
        let max_iter = if n_free == 0 { 1 } else { 20_000 };

        for _ in 0..max_iter {
            let theta = &self.theta0 + &self.free * &coords;
            let p = unpack_symmetric(n, &theta);
            let m = self.dissipation_matrix(&p);
            let md = self.keep.transpose() * &m * &self.keep;

            let (lam_m, vec_m) = max_eigenpair(&md);
            let (lam_p, vec_p) = min_eigenpair(&p);
            if lam_m <= 1e-10 && lam_p >= -1e-10 {
                return Some(p);
            }
            if n_free == 0 {
                return None;
            }

            // pick the violated objective with the larger residual
            let f_m = lam_m + delta;
            let f_p = -lam_p;
            if f_m >= f_p {
                // subgradient of lambda_max(M) through the lifted eigenvector
                let v = &self.keep * vec_m;
                let mut g = DVector::zeros(n_free);
                for j in 0..n_free {
                    let mut acc = 0.0;
                    for t in 0..n * (n + 1) / 2 {
                        let w = self.free[(t, j)];
                        if w == 0.0 {
                            continue;
                        }
                        let e = basis_matrix(n, t);
                        let top = self.ss.a.transpose() * &e + &e * &self.ss.a;
                        let vh = v.rows(0, n);
                        let eb = &e * &self.ss.b;
                        let d = (top * vh).dot(&vh.clone_owned()) + 2.0 * v[n] * eb.dot(&vh);
                        acc += w * d;
                    }
                    g[j] = acc;
                }
                let gn = g.norm_squared();
                if gn < 1e-30 {
                    return None;
                }
                coords -= g * (f_m / gn);
            } else {
                // subgradient of -lambda_min(P)
                let q = vec_p;
                let mut g = DVector::zeros(n_free);
                for j in 0..n_free {
                    let mut acc = 0.0;
                    for t in 0..n * (n + 1) / 2 {
                        let w = self.free[(t, j)];
                        if w == 0.0 {
                            continue;
                        }
                        let e = basis_matrix(n, t);
                        acc += w * -(&e * &q).dot(&q);
                    }
                    g[j] = acc;
                }
                let gn = g.norm_squared();
                if gn < 1e-30 {
                    return None;
                }
                coords -= g * (f_p / gn);
            }
        }
        None
    }
}

/// Index map for packing the upper triangle of a symmetric matrix into a
/// parameter vector; off-diagonal parameters fill both mirrored entries.
fn sym_index(n: usize) -> Vec<(usize, usize)> {
    let mut idx = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            idx.push((i, j));
        }
    }
    idx
}

fn basis_matrix(n: usize, t: usize) -> DMatrix<f64> {
    let (i, j) = sym_index(n)[t];
    let mut e = DMatrix::zeros(n, n);
    e[(i, j)] = 1.0;
    e[(j, i)] = 1.0;
    if i == j {
        e[(i, i)] = 1.0;
    }
    e
}

fn pack_symmetric(p: &DMatrix<f64>) -> DVector<f64> {
    let n = p.nrows();
    DVector::from_iterator(n * (n + 1) / 2, sym_index(n).into_iter().map(|(i, j)| p[(i, j)]))
}

fn unpack_symmetric(n: usize, theta: &DVector<f64>) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(n, n);
    for (t, (i, j)) in sym_index(n).into_iter().enumerate() {
        p[(i, j)] = theta[t];
        p[(j, i)] = theta[t];
    }
    p
}

/// Least-squares particular solution of G theta = rhs together with an
/// orthonormal basis of the nullspace of G, both obtained from the spectral
/// decomposition of G'G (robust when there are fewer rows than unknowns).
fn solve_affine_family(
    rows: &[DVector<f64>],
    rhs: &[f64],
    n_theta: usize,
) -> (DVector<f64>, DMatrix<f64>) {
    if rows.is_empty() {
        return (DVector::zeros(n_theta), DMatrix::identity(n_theta, n_theta));
    }
    let m = rows.len();
    let mut g = DMatrix::zeros(m, n_theta);
    for (i, r) in rows.iter().enumerate() {
        g.row_mut(i).copy_from(&r.transpose());
    }
    let b = DVector::from_row_slice(rhs);
    let gtg = g.transpose() * &g;
    let gtb = g.transpose() * &b;
    let eig = gtg.symmetric_eigen();
    let tol = 1e-12 * eig.eigenvalues.max().max(1.0);
    let mut theta0 = DVector::zeros(n_theta);
    let mut null_cols: Vec<DVector<f64>> = Vec::new();
    for k in 0..n_theta {
        let lam = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k).clone_owned();
        if lam > tol {
            theta0 += &v * (v.dot(&gtb) / lam);
        } else {
            null_cols.push(v);
        }
    }
    let mut free = DMatrix::zeros(n_theta, null_cols.len());
    for (j, v) in null_cols.iter().enumerate() {
        free.column_mut(j).copy_from(v);
    }
    (theta0, free)
}

/// All near-null right directions of a square matrix.
fn null_space(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = a.nrows();
    let eig = (a.transpose() * a).symmetric_eigen();
    let tol = 1e-10 * eig.eigenvalues.max().max(1.0);
    (0..n)
        .filter(|&k| eig.eigenvalues[k] < tol)
        .map(|k| eig.eigenvectors.column(k).clone_owned())
        .collect()
}

/// Orthonormal basis (columns) of the complement of the given directions.
fn orthonormal_complement(dirs: &[DVector<f64>], dim: usize) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let project = |v: &DVector<f64>, basis: &Vec<DVector<f64>>| {
        let mut w = v.clone();
        for b in basis {
            let c = b.dot(&w);
            w -= b * c;
        }
        w
    };
    for d in dirs {
        let w = project(d, &basis);
        let nrm = w.norm();
        if nrm > 1e-10 {
            basis.push(w / nrm);
        }
    }
    let n_defl = basis.len();
    for i in 0..dim {
        let mut e = DVector::zeros(dim);
        e[i] = 1.0;
        let w = project(&e, &basis);
        let nrm = w.norm();
        if nrm > 1e-10 {
            basis.push(w / nrm);
        }
    }
    let comp: Vec<&DVector<f64>> = basis[n_defl..].iter().collect();
    let mut out = DMatrix::zeros(dim, comp.len());
    for (j, v) in comp.iter().enumerate() {
        out.column_mut(j).copy_from(*v);
    }
    out
}

fn max_eigenpair(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    if m.nrows() == 0 {
        return (f64::NEG_INFINITY, DVector::zeros(0));
    }
    let eig = m.clone().symmetric_eigen();
    let mut best = 0;
    for k in 0..m.nrows() {
        if eig.eigenvalues[k] > eig.eigenvalues[best] {
            best = k;
        }
    }
    (eig.eigenvalues[best], eig.eigenvectors.column(best).clone_owned())
}

fn min_eigenpair(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    if m.nrows() == 0 {
        return (f64::INFINITY, DVector::zeros(0));
    }
    let eig = m.clone().symmetric_eigen();
    let mut best = 0;
    for k in 0..m.nrows() {
        if eig.eigenvalues[k] < eig.eigenvalues[best] {
            best = k;
        }
    }
    (eig.eigenvalues[best], eig.eigenvectors.column(best).clone_owned())
}
