//! Single-qubit closed form.
//!
//! With `H_I = a·σ` and `H_0 = b·σ` for unit vectors `a`, `b`, the average
//! Hamiltonian is `H̄_I = m·σ` where, for `n = λa + ηb` and `θ = |n|`,
//!
//! ```text
//! m = [1 + sinc 2θ] a/2 - η (b∧a) sinc²θ
//!     + (1 - sinc 2θ)/(2θ²) [(n·a) n - η (b∧a)∧n]
//! ```
//!
//! and the optimal-probe QFI is `4|m|²`. The sweep engine evaluates
//! `|m|² = Q_max/4` along a λ grid and locates its minimum.

use std::io::{self, Write};

use serde::Serialize;

use crate::format::{fmt_f64, to_json_string};
use crate::linalg::{ComplexMatrix, C64};
use crate::model::{DisturbedModel, HermitianOperator};
use crate::{Error, Result};

pub type Vec3 = [f64; 3];

const THETA_TAYLOR_CUTOFF: f64 = 1e-6;
const GOLDEN_TOL: f64 = 1e-10;
const FLAT_TOL: f64 = 1e-12;
const DITHER_SCAN_POINTS: usize = 4001;
const DITHER_BISECT_TOL: f64 = 1e-8;

pub fn sigma_x() -> HermitianOperator {
    HermitianOperator::from_hermitian(ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).expect("2x2"))
}

pub fn sigma_y() -> HermitianOperator {
    let i = C64::new(0.0, 1.0);
    let zero = C64::new(0.0, 0.0);
    HermitianOperator::from_hermitian(ComplexMatrix::from_rows(&[vec![zero, -i], vec![i, zero]]).expect("2x2"))
}

pub fn sigma_z() -> HermitianOperator {
    HermitianOperator::from_hermitian(ComplexMatrix::diag(&[1.0, -1.0]))
}

/// `v·σ`.
pub fn pauli_operator(v: Vec3) -> HermitianOperator {
    let m = ComplexMatrix::from_rows(&[
        vec![C64::new(v[2], 0.0), C64::new(v[0], -v[1])],
        vec![C64::new(v[0], v[1]), C64::new(-v[2], 0.0)],
    ])
    .expect("2x2");
    HermitianOperator::from_hermitian(m)
}

/// Splits a qubit operator as `c·I + v·σ`, returning `(c, v)`.
pub fn bloch_decompose(h: &HermitianOperator) -> Option<(f64, Vec3)> {
    if h.dim() != 2 {
        return None;
    }
    let m = h.matrix();
    let c = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let z = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    Some((c, [m[(1, 0)].re, m[(1, 0)].im, z]))
}

fn dot(u: Vec3, v: Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn cross(u: Vec3, v: Vec3) -> Vec3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn norm(v: Vec3) -> f64 {
    dot(v, v).sqrt()
}

fn normalized(v: Vec3, name: &str) -> Result<Vec3> {
    let n = norm(v);
    if !n.is_finite() || n <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be a nonzero finite vector"
        )));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Unit Bloch directions of `H_I` and `H_0` plus the parameter point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochModel {
    a: Vec3,
    b: Vec3,
    pub lambda: f64,
    pub eta: f64,
}

impl BlochModel {
    /// Normalizes `a` and `b`.
    pub fn new(a: Vec3, b: Vec3, lambda: f64, eta: f64) -> Result<Self> {
        Ok(Self {
            a: normalized(a, "a")?,
            b: normalized(b, "b")?,
            lambda,
            eta,
        })
    }

    /// Unit vectors in the x-z plane with the given overlap `a·b`, `a = ẑ`.
    pub fn with_overlap(overlap: f64, lambda: f64, eta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&overlap) {
            return Err(Error::InvalidArgument(format!("a·b = {overlap} is outside [-1, 1]")));
        }
        let a = [0.0, 0.0, 1.0];
        let b = [(1.0 - overlap * overlap).sqrt(), 0.0, overlap];
        Ok(Self { a, b, lambda, eta })
    }

    pub fn a(&self) -> Vec3 {
        self.a
    }

    pub fn b(&self) -> Vec3 {
        self.b
    }

    pub fn at(&self, lambda: f64, eta: f64) -> Self {
        Self { lambda, eta, ..*self }
    }

    /// `(a·σ, b·σ)` as a general model at the same point.
    pub fn to_model(&self) -> DisturbedModel {
        DisturbedModel::new(pauli_operator(self.a), pauli_operator(self.b), self.lambda, self.eta)
            .expect("both operators are 2x2")
    }
}

pub fn m_vector(bm: &BlochModel) -> Vec3 {
    let (a, b, eta) = (bm.a, bm.b, bm.eta);
    let n = [
        bm.lambda * a[0] + eta * b[0],
        bm.lambda * a[1] + eta * b[1],
        bm.lambda * a[2] + eta * b[2],
    ];
    let theta = norm(n);
    let (sinc2, coeff, sinc_sq) = if theta < THETA_TAYLOR_CUTOFF {
        let t2 = theta * theta;
        (1.0 - 2.0 * t2 / 3.0, 1.0 / 3.0, (1.0 - t2 / 6.0).powi(2))
    } else {
        let s2 = sinc(2.0 * theta);
        (s2, (1.0 - s2) / (2.0 * theta * theta), sinc(theta).powi(2))
    };
    let ba = cross(b, a);
    let ba_n = cross(ba, n);
    let na = dot(n, a);
    let mut m = [0.0; 3];
    for k in 0..3 {
        m[k] = 0.5 * (1.0 + sinc2) * a[k] - eta * ba[k] * sinc_sq + coeff * (na * n[k] - eta * ba_n[k]);
    }
    m
}

/// `Q_max = 4|m|²`.
pub fn qmax_qubit(bm: &BlochModel) -> f64 {
    let m = m_vector(bm);
    4.0 * dot(m, m)
}

/// `Q_max / 4` along a λ grid with the located minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub q_over_4: Vec<f64>,
    pub lambda_min_located: f64,
    pub q_at_min: f64,
    /// The curve is constant on the grid; the minimum is reported at the
    /// first grid point.
    pub flat: bool,
}

impl SweepResult {
    /// CSV with header `lambda,q_over_4`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "lambda,q_over_4")?;
        for (l, q) in self.grid.iter().zip(&self.q_over_4) {
            writeln!(w, "{},{}", fmt_f64(*l), fmt_f64(*q))?;
        }
        Ok(())
    }
}

/// JSON sidecar written next to each sweep CSV.
#[derive(Clone, Debug, Serialize)]
pub struct SweepSidecar {
    pub a: Option<Vec3>,
    pub b: Option<Vec3>,
    pub eta: f64,
    pub lambda_min_located: f64,
    pub q_at_min: f64,
    pub flat: bool,
}

impl SweepSidecar {
    pub fn to_json(&self) -> String {
        to_json_string(self).expect("sidecar serializes")
    }
}

/// Locates the minimum of an already-evaluated curve, refining the best grid
/// point by golden-section search on `f` between its grid neighbours.
pub fn locate_minimum(grid: Vec<f64>, q_over_4: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<SweepResult> {
    if grid.len() < 2 {
        return Err(Error::InvalidArgument("sweep grid needs at least two points".into()));
    }
    if grid.len() != q_over_4.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: q_over_4.len(),
        });
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("sweep grid must be strictly ascending".into()));
    }
    let (lo, hi) = q_over_4
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &q| {
            (lo.min(q), hi.max(q))
        });
    if hi - lo <= FLAT_TOL {
        return Ok(SweepResult {
            lambda_min_located: grid[0],
            q_at_min: q_over_4[0],
            grid,
            q_over_4,
            flat: true,
        });
    }
    let best = q_over_4
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .expect("non-empty");
    let left = grid[best.saturating_sub(1)];
    let right = grid[(best + 1).min(grid.len() - 1)];
    let (mut x, mut fx) = golden_section(&f, left, right, GOLDEN_TOL);
    if fx > q_over_4[best] {
        x = grid[best];
        fx = q_over_4[best];
    }
    Ok(SweepResult {
        grid,
        q_over_4,
        lambda_min_located: x,
        q_at_min: fx,
        flat: false,
    })
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Evaluates `|m|²` on `grid` for the qubit pair `(a, b)` at fixed `η`.
pub fn sweep(a: Vec3, b: Vec3, eta: f64, grid: &[f64]) -> Result<SweepResult> {
    let base = BlochModel::new(a, b, 0.0, eta)?;
    let f = |l: f64| qmax_qubit(&base.at(l, eta)) / 4.0;
    let values = grid.iter().map(|&l| f(l)).collect();
    locate_minimum(grid.to_vec(), values, f)
}

/// `n` equally spaced points from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![from],
        _ => {
            let step = (to - from) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { to } else { from + step * i as f64 })
                .collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Interval of λ on which `Q_max(λ; η) < Q_max(λ; η̃)` with `η̃ > η ≥ 0`.
///
/// The window `[-10(η̃+1), 10(η̃+1)]` is scanned for runs where the
/// difference is positive. The run containing `-η a·b`, or failing that the
/// run nearest to it, is returned with its end points refined by bisection.
/// `None` means the larger disturbance never wins on the window.
pub fn dithering_interval(a: Vec3, b: Vec3, eta: f64, eta_tilde: f64) -> Result<Option<Interval>> {
    if !(eta >= 0.0 && eta_tilde > eta) || !eta_tilde.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need η̃ > η ≥ 0, got η = {eta}, η̃ = {eta_tilde}"
        )));
    }
    let base = BlochModel::new(a, b, 0.0, eta)?;
    let diff = |l: f64| qmax_qubit(&base.at(l, eta_tilde)) - qmax_qubit(&base.at(l, eta));
    let center = -eta * dot(base.a, base.b);
    let half = 10.0 * (eta_tilde + 1.0);
    let grid = linspace(-half, half, DITHER_SCAN_POINTS);
    let positive: Vec<bool> = grid.iter().map(|&l| diff(l) > 0.0).collect();

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if positive[i] {
            let start = i;
            while i + 1 < grid.len() && positive[i + 1] {
                i += 1;
            }
            runs.push((start, i));
        }
        i += 1;
    }
    let distance = |&(s, e): &(usize, usize)| {
        if center < grid[s] {
            grid[s] - center
        } else if center > grid[e] {
            center - grid[e]
        } else {
            0.0
        }
    };
    let Some(&(s, e)) = runs.iter().min_by(|x, y| distance(x).total_cmp(&distance(y))) else {
        return Ok(None);
    };

    let bisect = |mut inside: f64, mut outside: f64| {
        while (inside - outside).abs() > DITHER_BISECT_TOL {
            let mid = 0.5 * (inside + outside);
            if diff(mid) > 0.0 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let lo = if s == 0 { grid[0] } else { bisect(grid[s], grid[s - 1]) };
    let hi = if e == grid.len() - 1 {
        grid[e]
    } else {
        bisect(grid[e], grid[e + 1])
    };
    Ok(Some(Interval { lo, hi }))
}
