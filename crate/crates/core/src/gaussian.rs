//! Scalar and vector Gaussian rate-disturbance regions.
//!
//! The scalar region has a closed form traced by a power-control
//! parameter. The vector (MIMO) region is the convex hull of corner
//! points generated by pairs of signal covariances under a trace budget;
//! it is approximated by seeded random sampling of covariance pairs plus
//! deterministic power sweeps and per-budget radial refinement, and its
//! boundary can be probed by maximizing R - lambda R_d. The optimizer is
//! heuristic; every reported point is achievable.

use crate::region::{Frontier2, PointOrigin};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// PSD and trace checks run at this eigenvalue/slack tolerance.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GaussianError {
    #[error("transmit power must be positive, got {0}")]
    BadPower(f64),
    #[error("side noise variance {0} <= 1: the desired receiver is the degraded one and the disturbance rate equals the data rate")]
    SideNoiseNotDegraded(f64),
    #[error("{0} is not positive semidefinite (min eigenvalue {1:e})")]
    NotPsd(&'static str, f64),
    #[error("{0} is singular: determinant ratios are undefined")]
    Singular(&'static str),
    #[error("trace(Ku + Kv) = {got} exceeds the budget {budget}")]
    TraceBudget { got: f64, budget: f64 },
    #[error("dimension {0} exceeds the configured maximum {1}")]
    DimTooLarge(usize, usize),
    #[error("matrix rows malformed: {0}")]
    Parse(String),
}

/// Gaussian capacity function in bits: C(x) = (1/2) log2(1 + x).
pub fn gauss_cap(x: f64) -> f64 {
    0.5 * (1.0 + x).log2()
}

// ---------------------------------------------------------------------
// Small dense symmetric matrices
// ---------------------------------------------------------------------

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    d: usize,
    a: Vec<f64>,
}

impl SymMat {
    pub fn zeros(d: usize) -> Self {
        SymMat { d, a: vec![0.0; d * d] }
    }

    pub fn identity(d: usize) -> Self {
        SymMat::scaled_identity(d, 1.0)
    }

    pub fn scaled_identity(d: usize, c: f64) -> Self {
        let mut m = SymMat::zeros(d);
        for i in 0..d {
            m.a[i * d + i] = c;
        }
        m
    }

    /// Builds from rows, symmetrizing to absorb entry noise.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GaussianError> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(GaussianError::Parse(format!("expected {d} entries per row")));
        }
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                a[i * d + j] = 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        Ok(SymMat { d, a })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.d + j]
    }

    pub fn plus(&self, o: &SymMat) -> SymMat {
        debug_assert_eq!(self.d, o.d);
        SymMat { d: self.d, a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect() }
    }

    pub fn scale(&self, c: f64) -> SymMat {
        SymMat { d: self.d, a: self.a.iter().map(|x| x * c).collect() }
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self.a[i * self.d + i]).sum()
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let d = self.d;
        let mut m = self.a.clone();
        let mut det = 1.0f64;
        for col in 0..d {
            let mut pivot = col;
            for r in (col + 1)..d {
                if m[r * d + col].abs() > m[pivot * d + col].abs() {
                    pivot = r;
                }
            }
            if m[pivot * d + col].abs() < 1e-300 {
                return 0.0;
            }
            if pivot != col {
                for c in 0..d {
                    m.swap(col * d + c, pivot * d + c);
                }
                det = -det;
            }
            let p = m[col * d + col];
            det *= p;
            for r in (col + 1)..d {
                let f = m[r * d + col] / p;
                for c in col..d {
                    m[r * d + c] -= f * m[col * d + c];
                }
            }
        }
        det
    }

    /// Smallest eigenvalue by cyclic Jacobi rotations.
    pub fn min_eig(&self) -> f64 {
        let d = self.d;
        if d == 1 {
            return self.a[0];
        }
        let mut m = self.a.clone();
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for i in 0..d {
                for j in (i + 1)..d {
                    off += m[i * d + j] * m[i * d + j];
                }
            }
            if off < 1e-28 {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let apq = m[p * d + q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let app = m[p * d + p];
                    let aqq = m[q * d + q];
                    let theta = 0.5 * (aqq - app) / apq;
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..d {
                        let mkp = m[k * d + p];
                        let mkq = m[k * d + q];
                        m[k * d + p] = c * mkp - s * mkq;
                        m[k * d + q] = s * mkp + c * mkq;
                    }
                    for k in 0..d {
                        let mpk = m[p * d + k];
                        let mqk = m[q * d + k];
                        m[p * d + k] = c * mpk - s * mqk;
                        m[q * d + k] = s * mpk + c * mqk;
                    }
                }
            }
        }
        (0..d).map(|i| m[i * d + i]).fold(f64::INFINITY, f64::min)
    }

    fn check_psd(&self, name: &'static str) -> Result<(), GaussianError> {
        let e = self.min_eig();
        if e < -PSD_TOL {
            return Err(GaussianError::NotPsd(name, e));
        }
        Ok(())
    }
}

/// Q diag(vals) Q^T for an orthogonal Q given as rows.
fn conjugate(q: &[Vec<f64>], vals: &[f64]) -> SymMat {
    let d = vals.len();
    let mut a = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for (k, &v) in vals.iter().enumerate() {
                s += q[k][i] * v * q[k][j];
            }
            a[i * d + j] = s;
        }
    }
    SymMat { d, a }
}

/// Random orthogonal matrix (rows) via Gram-Schmidt on Gaussian vectors.
fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<f64>> {
    loop {
        let mut rows: Vec<Vec<f64>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        // Box-Muller keeps the draw order independent of
                        // rand's distribution internals.
                        let u1: f64 = rng.gen::<f64>().max(1e-12);
                        let u2: f64 = rng.gen();
                        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
                    })
                    .collect()
            })
            .collect();
        let mut ok = true;
        for i in 0..d {
            for j in 0..i {
                let dot: f64 = (0..d).map(|k| rows[i][k] * rows[j][k]).sum();
                for k in 0..d {
                    let sub = dot * rows[j][k];
                    rows[i][k] -= sub;
                }
            }
            let norm: f64 = rows[i].iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for x in &mut rows[i] {
                *x /= norm;
            }
        }
        if ok {
            return rows;
        }
    }
}

// ---------------------------------------------------------------------
// Scalar region
// ---------------------------------------------------------------------

/// Scalar Gaussian channel parameters: transmit power P and side-receiver
/// noise variance N (the desired receiver has unit noise).
#[derive(Debug, Clone, Copy)]
pub struct GaussianScalarSpec {
    pub p: f64,
    pub n: f64,
}

impl GaussianScalarSpec {
    pub fn new(p: f64, n: f64) -> Result<Self, GaussianError> {
        if !(p > 0.0) {
            return Err(GaussianError::BadPower(p));
        }
        if !(n > 1.0) {
            return Err(GaussianError::SideNoiseNotDegraded(n));
        }
        Ok(GaussianScalarSpec { p, n })
    }
}

/// Closed-form scalar frontier traced by the power fraction alpha in
/// [0,1]: (R, R_d) = (C(alpha P), C(alpha P / N)). Samples are the alpha
/// sweep itself, so the budget column is nonuniform.
pub fn scalar_region(spec: &GaussianScalarSpec, steps: usize) -> Frontier2 {
    let steps = steps.max(2);
    let mut budgets = Vec::with_capacity(steps);
    let mut rmax = Vec::with_capacity(steps);
    let mut hull = Vec::with_capacity(steps);
    let mut origins = Vec::with_capacity(steps);
    for i in 0..steps {
        let alpha = i as f64 / (steps - 1) as f64;
        let d = gauss_cap(alpha * spec.p / spec.n);
        let r = gauss_cap(alpha * spec.p);
        budgets.push(d);
        rmax.push(r);
        hull.push((d, r));
        origins.push(PointOrigin { px: vec![alpha], aux: format!("alpha={alpha:.6}") });
    }
    Frontier2 { budgets, rmax, hull, hull_origins: origins }
}

// ---------------------------------------------------------------------
// Vector region
// ---------------------------------------------------------------------

/// Vector Gaussian channel: trace budget P and noise covariances K1
/// (desired receiver) and K2 (side receiver).
#[derive(Debug, Clone)]
pub struct GaussianVectorSpec {
    pub p: f64,
    pub k1: SymMat,
    pub k2: SymMat,
}

/// A signal covariance pair (cloud layer Ku, satellite layer Kv).
#[derive(Debug, Clone)]
pub struct CovPair {
    pub ku: SymMat,
    pub kv: SymMat,
}

/// A rate-disturbance point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub r: f64,
    pub d: f64,
}

impl GaussianVectorSpec {
    pub fn new(p: f64, k1: SymMat, k2: SymMat) -> Result<Self, GaussianError> {
        if !(p > 0.0) {
            return Err(GaussianError::BadPower(p));
        }
        k1.check_psd("K1")?;
        k2.check_psd("K2")?;
        if k1.det().abs() < 1e-12 {
            return Err(GaussianError::Singular("K1"));
        }
        if k2.det().abs() < 1e-12 {
            return Err(GaussianError::Singular("K2"));
        }
        Ok(GaussianVectorSpec { p, k1, k2 })
    }

    pub fn dim(&self) -> usize {
        self.k1.dim()
    }
}

fn log2_det_ratio(num: &SymMat, den: &SymMat) -> Result<f64, GaussianError> {
    let dn = den.det();
    if dn.abs() < 1e-12 {
        return Err(GaussianError::Singular("denominator covariance"));
    }
    Ok((num.det() / dn).log2())
}

/// Corner points A (full rate) and B (power control) for one covariance
/// pair. A and B coincide when Ku = 0.
pub fn vector_corners(
    spec: &GaussianVectorSpec,
    pair: &CovPair,
) -> Result<(RdPoint, RdPoint), GaussianError> {
    pair.ku.check_psd("Ku")?;
    pair.kv.check_psd("Kv")?;
    let tr = pair.ku.trace() + pair.kv.trace();
    if tr > spec.p + PSD_TOL {
        return Err(GaussianError::TraceBudget { got: tr, budget: spec.p });
    }
    let kuv1 = pair.ku.plus(&pair.kv).plus(&spec.k1);
    let kv1 = pair.kv.plus(&spec.k1);
    let kv2 = pair.kv.plus(&spec.k2);
    let r_a = 0.5 * log2_det_ratio(&kuv1, &spec.k1)?;
    let r_b = 0.5 * log2_det_ratio(&kv1, &spec.k1)?;
    let d_b = 0.5 * log2_det_ratio(&kv2, &spec.k2)?;
    let d_a = d_b + (r_a - r_b);
    Ok((RdPoint { r: r_a, d: d_a }, RdPoint { r: r_b, d: d_b }))
}

/// Seeded sampler configuration for the vector region.
#[derive(Debug, Clone, Copy)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: usize,
    /// Bisection iterations in the per-budget radial refinement.
    pub refine_iters: usize,
    /// Maximum dimension accepted (cost guard).
    pub max_dim: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { seed: 1, samples: 512, refine_iters: 60, max_dim: 6 }
    }
}

/// Draws the shared covariance-pair sample cloud: random trace splits,
/// exponential eigenvalue profiles, random orthogonal conjugation.
fn sample_pairs(spec: &GaussianVectorSpec, cfg: &SamplerConfig) -> Vec<CovPair> {
    let d = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let total = spec.p * rng.gen::<f64>();
        let split = rng.gen::<f64>();
        let traces = [total * (1.0 - split), total * split]; // (Ku, Kv)
        let mut mats = Vec::with_capacity(2);
        for &t in &traces {
            let mut vals: Vec<f64> =
                (0..d).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
            let s: f64 = vals.iter().sum();
            for v in &mut vals {
                *v *= t / s;
            }
            let q = random_orthogonal(&mut rng, d);
            mats.push(conjugate(&q, &vals));
        }
        let kv = mats.pop().expect("two draws");
        let ku = mats.pop().expect("two draws");
        out.push(CovPair { ku, kv });
    }
    out
}

/// Deterministic satellite directions for sweeps and refinement: the
/// normalized identity plus the coordinate axes.
fn deterministic_directions(spec: &GaussianVectorSpec) -> Vec<SymMat> {
    let d = spec.dim();
    let mut dirs = vec![SymMat::scaled_identity(d, 1.0 / d as f64)];
    for i in 0..d.min(4) {
        let mut m = SymMat::zeros(d);
        m.a[i * d + i] = 1.0;
        dirs.push(m);
    }
    dirs
}

/// Largest scale c in [0, cmax] with `within(c)` true, by bisection;
/// `within` must be monotone (true near 0).
fn bisect_scale(cmax: f64, iters: usize, within: impl Fn(f64) -> bool) -> f64 {
    if within(cmax) {
        return cmax;
    }
    let mut lo = 0.0f64;
    let mut hi = cmax;
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if within(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Sampled and refined frontier of the vector region.
///
/// Collects corner points A and B over the random pair cloud and the
/// deterministic sweeps, then for every budget cell pushes the best
/// satellite covariance radially onto the budget surface. For dimension
/// one this reproduces the scalar region to bisection accuracy.
pub fn vector_region(
    spec: &GaussianVectorSpec,
    cfg: &SamplerConfig,
    budget_steps: usize,
) -> Result<Frontier2, GaussianError> {
    let d = spec.dim();
    if d > cfg.max_dim {
        return Err(GaussianError::DimTooLarge(d, cfg.max_dim));
    }
    let mut points: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let mut origins: Vec<PointOrigin> = vec![PointOrigin { px: vec![], aux: "zero".into() }];

    let pairs = sample_pairs(spec, cfg);
    for (i, pair) in pairs.iter().enumerate() {
        if let Ok((a, b)) = vector_corners(spec, pair) {
            points.push((a.d, a.r));
            origins.push(PointOrigin { px: vec![], aux: format!("sample{i}A") });
            points.push((b.d, b.r));
            origins.push(PointOrigin { px: vec![], aux: format!("sample{i}B") });
        }
    }
    let dirs = deterministic_directions(spec);
    let sweep_steps = 512usize;
    for (di, dir) in dirs.iter().enumerate() {
        let tr = dir.trace();
        if tr <= 0.0 {
            continue;
        }
        for s in 1..=sweep_steps {
            let c = spec.p * s as f64 / sweep_steps as f64 / tr;
            let pair = CovPair { ku: SymMat::zeros(d), kv: dir.scale(c) };
            if let Ok((_, b)) = vector_corners(spec, &pair) {
                points.push((b.d, b.r));
                origins.push(PointOrigin { px: vec![], aux: format!("sweep{di}:{s}") });
            }
        }
    }

    // Per-budget radial refinement along the deterministic directions and
    // the most rate-efficient sampled satellites.
    let dmax = points.iter().map(|p| p.0).fold(0.0f64, f64::max);
    let budgets: Vec<f64> = if budget_steps <= 1 {
        vec![0.0]
    } else {
        (0..budget_steps).map(|i| dmax * i as f64 / (budget_steps - 1) as f64).collect()
    };
    let mut refine_dirs = dirs;
    let mut best_pairs: Vec<(f64, usize)> = pairs
        .iter()
        .enumerate()
        .filter_map(|(i, pr)| {
            if pr.kv.trace() > 1e-12 {
                vector_corners(spec, pr).ok().map(|(_, b)| (b.r, i))
            } else {
                None
            }
        })
        .collect();
    best_pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite rates"));
    for &(_, i) in best_pairs.iter().take(4) {
        let tr = pairs[i].kv.trace();
        refine_dirs.push(pairs[i].kv.scale(1.0 / tr));
    }
    for &budget in &budgets {
        for (di, dir) in refine_dirs.iter().enumerate() {
            let tr = dir.trace();
            if tr <= 1e-12 {
                continue;
            }
            let cmax = spec.p / tr;
            let within = |c: f64| {
                let kv2 = dir.scale(c).plus(&spec.k2);
                0.5 * log2_det_ratio(&kv2, &spec.k2).unwrap_or(f64::INFINITY) <= budget
            };
            let c = bisect_scale(cmax, cfg.refine_iters, within);
            let pair = CovPair { ku: SymMat::zeros(d), kv: dir.scale(c) };
            if let Ok((_, b)) = vector_corners(spec, &pair) {
                points.push((b.d, b.r));
                origins.push(PointOrigin { px: vec![], aux: format!("refine{di}@{budget:.6}") });
            }
        }
    }
    Ok(Frontier2::from_points(&points, &origins, budgets))
}

/// Supporting boundary point for the weight lambda > 0: maximizes
/// R - lambda R_d over the shared sample cloud, then polishes by scale
/// searches. For lambda <= 1 the full-rate corner A supports the
/// optimum; beyond 1 the power-control corner B with Ku = 0 does.
pub fn lambda_boundary(
    spec: &GaussianVectorSpec,
    lambda: f64,
    cfg: &SamplerConfig,
) -> Result<(RdPoint, CovPair), GaussianError> {
    let d = spec.dim();
    if d > cfg.max_dim {
        return Err(GaussianError::DimTooLarge(d, cfg.max_dim));
    }
    let a_side = lambda <= 1.0;
    let objective = |pair: &CovPair| -> f64 {
        match vector_corners(spec, pair) {
            Ok((a, b)) => {
                if a_side {
                    a.r - lambda * a.d
                } else {
                    b.r - lambda * b.d
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let zero = CovPair { ku: SymMat::zeros(d), kv: SymMat::zeros(d) };
    let mut best = (objective(&zero), zero);
    let consider = |pair: CovPair, best: &mut (f64, CovPair)| {
        let v = objective(&pair);
        if v > best.0 {
            *best = (v, pair);
        }
    };
    for pair in sample_pairs(spec, cfg) {
        let b_pair = CovPair { ku: SymMat::zeros(d), kv: pair.kv.clone() };
        consider(b_pair, &mut best);
        if a_side {
            consider(pair, &mut best);
        }
    }
    for dir in deterministic_directions(spec) {
        let tr = dir.trace();
        if tr <= 0.0 {
            continue;
        }
        for s in 0..=64 {
            let c = spec.p * s as f64 / 64.0 / tr;
            consider(CovPair { ku: SymMat::zeros(d), kv: dir.scale(c) }, &mut best);
        }
    }
    // Scale polish: golden-section on the satellite scale, then (on the
    // full-rate side) on the cloud scale, keeping the trace feasible.
    let golden = |f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64| -> f64 {
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = f(x1);
        let mut f2 = f(x2);
        for _ in 0..80 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = f(x1);
            }
        }
        0.5 * (lo + hi)
    };
    for _round in 0..3 {
        let (ku0, kv0) = (best.1.ku.clone(), best.1.kv.clone());
        let tr_u = ku0.trace();
        let tr_v = kv0.trace();
        if tr_v > 1e-12 {
            let dir = kv0.scale(1.0 / tr_v);
            let room = (spec.p - tr_u).max(0.0);
            let f = |c: f64| objective(&CovPair { ku: ku0.clone(), kv: dir.scale(c) });
            let c = golden(&f, 0.0, room);
            consider(CovPair { ku: ku0.clone(), kv: dir.scale(c) }, &mut best);
        }
        if a_side && tr_u > 1e-12 {
            let (ku0, kv0) = (best.1.ku.clone(), best.1.kv.clone());
            let dir = ku0.scale(1.0 / ku0.trace());
            let room = (spec.p - kv0.trace()).max(0.0);
            let f = |c: f64| objective(&CovPair { ku: dir.scale(c), kv: kv0.clone() });
            let c = golden(&f, 0.0, room);
            consider(CovPair { ku: dir.scale(c), kv: kv0.clone() }, &mut best);
        }
    }
    let (a, b) = vector_corners(spec, &best.1)?;
    Ok((if a_side { a } else { b }, best.1))
}

/// Parses the vector Gaussian document: `gaussian <d> <P>` followed by
/// `K1` and `K2` blocks of d rows each.
pub fn parse_gaussian(text: &str) -> Result<GaussianVectorSpec, GaussianError> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| GaussianError::Parse("empty document".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "gaussian" {
        return Err(GaussianError::Parse("expected: gaussian <d> <P>".into()));
    }
    let d: usize = toks[1].parse().map_err(|_| GaussianError::Parse("bad dimension".into()))?;
    let p: f64 = toks[2].parse().map_err(|_| GaussianError::Parse("bad power".into()))?;
    let read_block = |name: &str, lines: &mut dyn Iterator<Item = String>| {
        let head =
            lines.next().ok_or_else(|| GaussianError::Parse(format!("missing {name}")))?;
        if head != name {
            return Err(GaussianError::Parse(format!("expected {name}, got {head}")));
        }
        let mut rows = Vec::with_capacity(d);
        for _ in 0..d {
            let row = lines
                .next()
                .ok_or_else(|| GaussianError::Parse(format!("{name}: missing row")))?;
            let vals: Result<Vec<f64>, _> = row.split_whitespace().map(str::parse).collect();
            rows.push(vals.map_err(|_| GaussianError::Parse(format!("{name}: bad entry")))?);
        }
        SymMat::from_rows(&rows)
    };
    let k1 = read_block("K1", &mut lines)?;
    let k2 = read_block("K2", &mut lines)?;
    GaussianVectorSpec::new(p, k1, k2)
}
