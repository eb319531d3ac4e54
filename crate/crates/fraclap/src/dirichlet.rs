//! The nonlocal discrete Dirichlet problem
//!
//! ```text
//! (-Δ_h)^s u = f   in B_R^h = { hj : |hj| < R },
//!          u = g   in Z_h \ B_R^h,
//! ```
//!
//! assembled as the symmetric positive definite system
//! `A = Σ_s^h I - T`, `T_{jm} = K_s^h(j-m)` (zero diagonal), with the
//! exterior datum absorbed into the right-hand side
//! `b_j = f_j + Σ_{m exterior} K_s^h(j-m) g_m`. `A` is SPD on zero-exterior
//! functions because the energy form vanishes only on constants and the only
//! compactly supported constant is zero, so conjugate gradients applies. The
//! Toeplitz part is applied by circulant embedding and FFT above a size
//! crossover, directly below it.

use crate::fft::SymToeplitz;
use crate::grid::GridFunction;
use crate::kernels::{self, FracOrder, KernelSign, KernelTable};
use crate::operators::{frac_laplacian_on, FFT_CROSSOVER};
use crate::par;
use crate::{Error, Result};

/// Exterior Dirichlet datum.
#[derive(Debug, Clone)]
pub enum ExteriorDatum {
    Zero,
    /// `g` with finitely many nonzero values; only indices outside the
    /// interior contribute.
    Compact(GridFunction),
    /// `g ≡ c` outside; its contribution has the closed form
    /// `c (Σ_s^h - Σ_{m interior} K_s^h(j-m))`.
    Constant(f64),
}

/// Assembled diagonal-plus-Toeplitz system on the interior of `B_R^h`.
pub struct DirichletSystem {
    s: FracOrder,
    h: f64,
    radius_r: f64,
    j_max: i64,
    diagonal: f64,
    taps: Vec<f64>,
    toeplitz: SymToeplitz,
    rhs: Vec<f64>,
    exterior: ExteriorDatum,
}

/// Interior index bound: largest `j` with `h j < R` (ties broken towards the
/// smaller interior when `R/h` lands on a mesh point).
fn interior_j_max(r: f64, h: f64) -> i64 {
    ((r / h) - 1e-9).ceil() as i64 - 1
}

/// Signed-range kernel sum `Σ_{d=a}^{b} K_s^h(d)` from the exact telescoped
/// partial sums.
fn kernel_sum_signed_range(s: FracOrder, h: f64, a: i64, b: i64) -> f64 {
    debug_assert!(a <= b);
    let mut acc = 0.0;
    if a <= 0 && b >= 0 {
        // K(0) = 0
        if b >= 1 {
            acc += kernels::kernel_partial_sum(s, h, 1, b as u64);
        }
        if a <= -1 {
            acc += kernels::kernel_partial_sum(s, h, 1, (-a) as u64);
        }
    } else if a >= 1 {
        acc += kernels::kernel_partial_sum(s, h, a as u64, b as u64);
    } else {
        acc += kernels::kernel_partial_sum(s, h, (-b) as u64, (-a) as u64);
    }
    acc
}

/// Assembles the Dirichlet system for `(-Δ_h)^s u = f` in `B_R^h`, `u = g`
/// outside. `f` is read on the interior indices; `table` fixes `(s, h)`.
pub fn assemble(
    f: &GridFunction,
    g: ExteriorDatum,
    r: f64,
    table: &KernelTable,
) -> Result<DirichletSystem> {
    if table.sign() != KernelSign::Positive {
        return Err(Error::contract("Dirichlet system needs the positive-power kernel"));
    }
    let h = table.mesh();
    if f.h() != h {
        return Err(Error::contract("mesh mismatch between rhs and table"));
    }
    if !(r > h) {
        return Err(Error::domain(format!(
            "interior of B_R^h is empty for R = {r} <= h = {h}"
        )));
    }
    let s = table.order();
    let j_max = interior_j_max(r, h);
    let n = (2 * j_max + 1) as usize;
    let diagonal = kernels::kernel_sum(s, h);
    let taps: Vec<f64> = (0..n as i64).map(|d| table.value(d)).collect();
    let toeplitz = SymToeplitz::new(&taps);
    // effective rhs: f_j + Σ_{m exterior} K(j-m) g_m
    let mut rhs: Vec<f64> = (-j_max..=j_max).map(|j| f.value(j)).collect();
    match &g {
        ExteriorDatum::Zero => {}
        ExteriorDatum::Compact(gf) => {
            if gf.h() != h {
                return Err(Error::contract("mesh mismatch between exterior datum and table"));
            }
            for (i, j) in (-j_max..=j_max).enumerate() {
                let mut acc = 0.0;
                for (m, gm) in gf.iter() {
                    if m.abs() > j_max {
                        acc += table.value(j - m) * gm;
                    }
                }
                rhs[i] += acc;
            }
        }
        ExteriorDatum::Constant(c) => {
            for (i, j) in (-j_max..=j_max).enumerate() {
                let interior = kernel_sum_signed_range(s, h, -j_max - j, j_max - j);
                rhs[i] += c * (diagonal - interior);
            }
        }
    }
    Ok(DirichletSystem {
        s,
        h,
        radius_r: r,
        j_max,
        diagonal,
        taps,
        toeplitz,
        rhs,
        exterior: g,
    })
}

/// Solver outcome.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    /// Interior solution extended by the exterior datum (compact data only;
    /// a constant datum is reported on the interior window).
    pub solution: GridFunction,
    /// Smallest Ritz value of the CG tridiagonalization; positive for SPD
    /// systems. `None` when CG exits before its first iteration.
    pub min_ritz: Option<f64>,
}

impl DirichletSystem {
    pub fn order(&self) -> FracOrder {
        self.s
    }

    pub fn mesh(&self) -> f64 {
        self.h
    }

    pub fn radius(&self) -> f64 {
        self.radius_r
    }

    /// Number of interior points `N = #{j : |hj| < R}`.
    pub fn interior_len(&self) -> usize {
        (2 * self.j_max + 1) as usize
    }

    pub fn interior_range(&self) -> (i64, i64) {
        (-self.j_max, self.j_max)
    }

    /// Constant diagonal `Σ_s^h`.
    pub fn diagonal(&self) -> f64 {
        self.diagonal
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// `A x = Σ_s^h x - T x`; FFT above the crossover, direct below, both
    /// paths agreeing to ~1e-12.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        if x.len() > FFT_CROSSOVER {
            self.matvec_fft(x)
        } else {
            self.matvec_direct(x)
        }
    }

    pub fn matvec_direct(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.interior_len());
        let taps = &self.taps;
        let out = par::map_range(0, x.len() as i64 - 1, |j| {
            let j = j as usize;
            let mut acc = 0.0;
            for (m, &xm) in x.iter().enumerate() {
                acc += taps[j.abs_diff(m)] * xm;
            }
            self.diagonal * x[j] - acc
        });
        out
    }

    pub fn matvec_fft(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.interior_len());
        let tx = self.toeplitz.matvec(x);
        x.iter()
            .zip(tx)
            .map(|(&xj, t)| self.diagonal * xj - t)
            .collect()
    }

    /// Preconditioned conjugate gradients (the diagonal is constant, so the
    /// Jacobi preconditioner is a pure scaling and CG runs on `A` directly)
    /// with stop `‖Ax-b‖/‖b‖ <= tol`.
    pub fn solve(&self, tol: f64, max_iter: usize) -> Result<SolveReport> {
        if !(tol > 0.0) {
            return Err(Error::domain("solver tolerance must be positive"));
        }
        let n = self.interior_len();
        let b = &self.rhs;
        let b_norm = norm(b);
        let mut x = vec![0.0; n];
        if b_norm == 0.0 {
            return Ok(SolveReport {
                iterations: 0,
                relative_residual: 0.0,
                solution: self.extend_solution(&x)?,
                min_ritz: None,
            });
        }
        let mut r = b.clone();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        let mut iterations = 0;
        let mut residual = 1.0;
        for _ in 0..max_iter {
            let ap = self.matvec(&p);
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                return Err(Error::Numerical {
                    msg: "matrix not positive definite in CG".into(),
                    achieved: pap,
                    requested: 0.0,
                });
            }
            let alpha = rr / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            alphas.push(alpha);
            betas.push(beta);
            rr = rr_new;
            iterations += 1;
            residual = rr.sqrt() / b_norm;
            if residual <= tol {
                break;
            }
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
        if residual > tol {
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        let min_ritz = smallest_ritz(&alphas, &betas);
        Ok(SolveReport {
            iterations,
            relative_residual: residual,
            solution: self.extend_solution(&x)?,
            min_ritz,
        })
    }

    /// Solves from an explicit starting vector (used by uniqueness tests).
    pub fn solve_from(&self, x0: &[f64], tol: f64, max_iter: usize) -> Result<SolveReport> {
        assert_eq!(x0.len(), self.interior_len());
        // shift: solve A y = b - A x0, return x0 + y
        let ax0 = self.matvec(x0);
        let shifted: Vec<f64> = self.rhs.iter().zip(&ax0).map(|(b, a)| b - a).collect();
        let sub = DirichletSystem {
            s: self.s,
            h: self.h,
            radius_r: self.radius_r,
            j_max: self.j_max,
            diagonal: self.diagonal,
            taps: self.taps.clone(),
            toeplitz: SymToeplitz::new(&self.taps),
            rhs: shifted,
            exterior: ExteriorDatum::Zero,
        };
        let rep = sub.solve(tol, max_iter)?;
        let (lo, _) = self.interior_range();
        let combined: Vec<f64> = (0..self.interior_len())
            .map(|i| x0[i] + rep.solution.value(lo + i as i64))
            .collect();
        Ok(SolveReport {
            iterations: rep.iterations,
            relative_residual: rep.relative_residual,
            solution: self.extend_solution(&combined)?,
            min_ritz: rep.min_ritz,
        })
    }

    /// Interior vector extended by the exterior datum.
    fn extend_solution(&self, x: &[f64]) -> Result<GridFunction> {
        match &self.exterior {
            ExteriorDatum::Zero | ExteriorDatum::Constant(_) => {
                GridFunction::new(self.h, -self.j_max, x.to_vec())
            }
            ExteriorDatum::Compact(g) => {
                let lo = g.support().0.min(-self.j_max);
                let hi = g.support().1.max(self.j_max);
                let values = (lo..=hi)
                    .map(|j| {
                        if j.abs() <= self.j_max {
                            x[(j + self.j_max) as usize]
                        } else {
                            g.value(j)
                        }
                    })
                    .collect();
                GridFunction::new(self.h, lo, values)
            }
        }
    }

    /// Independent residual of a candidate interior solution: applies the
    /// full nonlocal operator to the extended function and compares against
    /// `f` on the interior.
    pub fn residual_sup(&self, solution: &GridFunction, f: &GridFunction, table: &KernelTable) -> Result<f64> {
        let (lo, hi) = self.interior_range();
        let lu = frac_laplacian_on(solution, table, lo, hi)?;
        let mut worst = 0.0f64;
        for j in lo..=hi {
            worst = worst.max((lu.value(j) - f.value(j)).abs());
        }
        Ok(worst)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Smallest eigenvalue of the CG tridiagonal (Lanczos) matrix by Sturm
/// bisection: `d_1 = 1/α_1`, `d_k = 1/α_k + β_{k-1}/α_{k-1}`,
/// `e_k = √β_k / α_k`.
fn smallest_ritz(alphas: &[f64], betas: &[f64]) -> Option<f64> {
    let k = alphas.len();
    if k == 0 {
        return None;
    }
    let mut d = vec![0.0; k];
    let mut e = vec![0.0; k.saturating_sub(1)];
    d[0] = 1.0 / alphas[0];
    for i in 1..k {
        d[i] = 1.0 / alphas[i] + betas[i - 1] / alphas[i - 1];
    }
    for i in 0..k - 1 {
        e[i] = betas[i].sqrt() / alphas[i];
    }
    let e_max = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut lo = d.iter().fold(f64::INFINITY, |m, v| m.min(*v)) - 2.0 * e_max - 1e-30;
    let mut hi = d.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) + 2.0 * e_max;
    // Sturm count of eigenvalues below λ
    let count_below = |lambda: f64| -> usize {
        let mut count = 0;
        let mut q = d[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..k {
            let denom = if q == 0.0 { 1e-300 } else { q };
            q = d[i] - lambda - e[i - 1] * e[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Barrier and maximum principle
// ---------------------------------------------------------------------------

/// The comparison barrier `W(x) = 4R² - |x|²` on `B_R^h`, zero outside.
/// Its fractional Laplacian is bounded below by a positive multiple of
/// `R^{2-2s}` on the interior, uniformly in `R`, `s` and `h`.
pub fn barrier(r: f64, h: f64) -> Result<GridFunction> {
    if !(r > h) {
        return Err(Error::domain("barrier requires R > h"));
    }
    let j_max = interior_j_max(r, h);
    let values = (-j_max..=j_max)
        .map(|j| 4.0 * r * r - (h * j as f64).powi(2))
        .collect();
    GridFunction::new(h, -j_max, values)
}

/// Outcome of the maximum-principle verification on a window.
#[derive(Debug, Clone, Copy)]
pub struct MaxPrincipleReport {
    /// `(-Δ_h)^s u <= slack` throughout the window.
    pub is_subsolution: bool,
    /// `(-Δ_h)^s u >= -slack` throughout the window.
    pub is_supersolution: bool,
    pub interior_max: f64,
    pub interior_min: f64,
    pub exterior_sup: f64,
    pub exterior_inf: f64,
    /// `max_B u <= sup_{Z\B} u` (meaningful when `is_subsolution`).
    pub max_principle_holds: bool,
    /// `min_B u >= inf_{Z\B} u` (meaningful when `is_supersolution`).
    pub min_principle_holds: bool,
}

/// Verifies the nonlocal maximum/minimum principle for `u` on the window
/// `lo..=hi`: wherever `(-Δ_h)^s u <= 0` (resp. `>= 0`) holds across the
/// window, the interior max (resp. min) must not exceed the exterior bound.
/// `slack` absorbs roundoff in the sign classification.
pub fn max_principle_check(
    u: &GridFunction,
    table: &KernelTable,
    lo: i64,
    hi: i64,
    slack: f64,
) -> Result<MaxPrincipleReport> {
    let lu = frac_laplacian_on(u, table, lo, hi)?;
    let mut is_sub = true;
    let mut is_super = true;
    for j in lo..=hi {
        if lu.value(j) > slack {
            is_sub = false;
        }
        if lu.value(j) < -slack {
            is_super = false;
        }
    }
    let mut interior_max = f64::NEG_INFINITY;
    let mut interior_min = f64::INFINITY;
    for j in lo..=hi {
        interior_max = interior_max.max(u.value(j));
        interior_min = interior_min.min(u.value(j));
    }
    // exterior: stored values outside the window plus the implicit zeros
    let mut exterior_sup = 0.0f64;
    let mut exterior_inf = 0.0f64;
    for (j, v) in u.iter() {
        if j < lo || j > hi {
            exterior_sup = exterior_sup.max(v);
            exterior_inf = exterior_inf.min(v);
        }
    }
    Ok(MaxPrincipleReport {
        is_subsolution: is_sub,
        is_supersolution: is_super,
        interior_max,
        interior_min,
        exterior_sup,
        exterior_inf,
        max_principle_holds: !is_sub || interior_max <= exterior_sup + slack,
        min_principle_holds: !is_super || interior_min >= exterior_inf - slack,
    })
}
