//! Exact finite-alphabet probability objects and information measures.
//!
//! [`JointPmf`] is a dense joint pmf over a product of named finite
//! alphabets. All information quantities are returned in bits; the
//! convention `0 log 0 = 0` is applied, and masses below
//! [`MASS_ZERO_TOL`] are treated as exact zeros inside log terms.

use thiserror::Error;

/// Tolerance on the total mass of a valid pmf.
pub const PMF_SUM_TOL: f64 = 1e-12;
/// Masses at or below this value are treated as exact zeros in log terms.
pub const MASS_ZERO_TOL: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum InfoError {
    #[error("negative mass {mass:e} at cell {cell}")]
    NegativeMass { cell: usize, mass: f64 },
    #[error("pmf mass sums to {sum} (must be 1 within {tol:e})")]
    BadSum { sum: f64, tol: f64 },
    #[error("axis {0} appears in more than one argument set")]
    OverlappingAxes(usize),
    #[error("axis index {index} out of range ({naxes} axes)")]
    AxisOutOfRange { index: usize, naxes: usize },
    #[error("mass vector has {got} cells, axes require {want}")]
    ShapeMismatch { got: usize, want: usize },
    #[error("grid parameters must satisfy k >= 1 and m >= 1")]
    BadGrid,
}

/// One named finite alphabet in a joint pmf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub name: String,
    pub size: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Axis { name: name.into(), size }
    }
}

/// A joint pmf over a product of named finite alphabets.
///
/// Mass is stored densely in row-major order (last axis fastest).
#[derive(Debug, Clone)]
pub struct JointPmf {
    axes: Vec<Axis>,
    mass: Vec<f64>,
}

impl JointPmf {
    /// Builds a validated pmf. Tiny negative masses (within `-1e-12`,
    /// arithmetic noise from conditioning) are clamped to zero.
    pub fn new(axes: Vec<Axis>, mut mass: Vec<f64>) -> Result<Self, InfoError> {
        let want: usize = axes.iter().map(|a| a.size).product();
        if mass.len() != want {
            return Err(InfoError::ShapeMismatch { got: mass.len(), want });
        }
        for (cell, w) in mass.iter_mut().enumerate() {
            if *w < 0.0 {
                if *w > -PMF_SUM_TOL {
                    *w = 0.0;
                } else {
                    return Err(InfoError::NegativeMass { cell, mass: *w });
                }
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > PMF_SUM_TOL {
            return Err(InfoError::BadSum { sum, tol: PMF_SUM_TOL });
        }
        Ok(JointPmf { axes, mass })
    }

    /// Single-axis pmf from a plain weight vector.
    pub fn from_vec(name: &str, mass: Vec<f64>) -> Result<Self, InfoError> {
        let n = mass.len();
        JointPmf::new(vec![Axis::new(name, n)], mass)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn num_axes(&self) -> usize {
        self.axes.len()
    }

    /// Index of the axis with the given name.
    pub fn axis_named(&self, name: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.name == name)
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.axes.len()];
        for i in (0..self.axes.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.axes[i + 1].size;
        }
        s
    }

    /// Flat index of a joint cell given per-axis symbol indices.
    pub fn flat_index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.axes.len());
        let strides = self.strides();
        coords.iter().zip(&strides).map(|(c, s)| c * s).sum()
    }

    /// Marginal pmf over the given axis subset (indices, any order; the
    /// result keeps the original axis order).
    pub fn marginal(&self, keep: &[usize]) -> Result<JointPmf, InfoError> {
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        for &k in &keep {
            if k >= self.axes.len() {
                return Err(InfoError::AxisOutOfRange { index: k, naxes: self.axes.len() });
            }
        }
        let out_axes: Vec<Axis> = keep.iter().map(|&k| self.axes[k].clone()).collect();
        let out_len: usize = out_axes.iter().map(|a| a.size).product::<usize>().max(1);
        let mut out = vec![0.0f64; out_len];
        let strides = self.strides();
        let mut out_strides = vec![1usize; keep.len()];
        for i in (0..keep.len().saturating_sub(1)).rev() {
            out_strides[i] = out_strides[i + 1] * out_axes[i + 1].size;
        }
        for (flat, &w) in self.mass.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mut oi = 0usize;
            for (j, &k) in keep.iter().enumerate() {
                let sym = (flat / strides[k]) % self.axes[k].size;
                oi += sym * out_strides[j];
            }
            out[oi] += w;
        }
        // Bypass re-validation: marginalization preserves nonnegativity and
        // total mass by construction.
        Ok(JointPmf { axes: out_axes, mass: out })
    }

    /// Joint entropy of the whole pmf, in bits.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for &p in &self.mass {
            if p > MASS_ZERO_TOL {
                h -= p * p.log2();
            }
        }
        h
    }

    /// Entropy of the marginal over an axis subset, in bits.
    pub fn entropy_of(&self, axes: &[usize]) -> Result<f64, InfoError> {
        Ok(self.marginal(axes)?.entropy())
    }

    /// Conditional entropy H(A | C) in bits. `a` and `c` must be disjoint.
    pub fn cond_entropy(&self, a: &[usize], c: &[usize]) -> Result<f64, InfoError> {
        check_disjoint(a, c)?;
        let ac = union(a, c);
        Ok(self.entropy_of(&ac)? - self.entropy_of(c)?)
    }

    /// Conditional mutual information I(A ; B | C) in bits.
    ///
    /// `c` must be disjoint from `a` and `b`; `a` and `b` may overlap
    /// (I(A;A|C) = H(A|C)).
    pub fn cond_mutual_info(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<f64, InfoError> {
        check_disjoint(a, c)?;
        check_disjoint(b, c)?;
        let ac = union(a, c);
        let bc = union(b, c);
        let abc = union(&union(a, b), c);
        Ok(self.entropy_of(&ac)? + self.entropy_of(&bc)?
            - self.entropy_of(&abc)?
            - self.entropy_of(c)?)
    }

    /// Mutual information I(A ; B) in bits.
    pub fn mutual_info(&self, a: &[usize], b: &[usize]) -> Result<f64, InfoError> {
        self.cond_mutual_info(a, b, &[])
    }
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn check_disjoint(a: &[usize], b: &[usize]) -> Result<(), InfoError> {
    for &x in a {
        if b.contains(&x) {
            return Err(InfoError::OverlappingAxes(x));
        }
    }
    Ok(())
}

/// Regular grid on the probability simplex: all pmfs over `k` cells whose
/// entries are multiples of `1/m`, enumerated once each in lexicographic
/// order of the numerator vectors.
#[derive(Debug, Clone, Copy)]
pub struct SimplexGrid {
    k: usize,
    m: u32,
}

impl SimplexGrid {
    pub fn new(k: usize, m: u32) -> Result<Self, InfoError> {
        if k < 1 || m < 1 {
            return Err(InfoError::BadGrid);
        }
        Ok(SimplexGrid { k, m })
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn resolution(&self) -> u32 {
        self.m
    }

    /// Number of grid points: C(m + k - 1, k - 1).
    pub fn count(&self) -> u128 {
        binomial(self.m as u128 + self.k as u128 - 1, self.k as u128 - 1)
    }

    /// Iterates the numerator vectors (compositions of m into k parts).
    pub fn compositions(&self) -> Compositions {
        Compositions { k: self.k, m: self.m, state: None, done: false }
    }

    /// Iterates the grid pmfs themselves.
    pub fn pmfs(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let m = self.m as f64;
        self.compositions().map(move |c| c.iter().map(|&x| x as f64 / m).collect())
    }
}

/// Lexicographic composition enumerator backing [`SimplexGrid`].
pub struct Compositions {
    k: usize,
    m: u32,
    state: Option<Vec<u32>>,
    done: bool,
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        match &mut self.state {
            None => {
                let mut first = vec![0u32; self.k];
                first[self.k - 1] = self.m;
                self.state = Some(first.clone());
                if self.k == 1 {
                    self.done = true;
                }
                Some(first)
            }
            Some(c) => {
                // Successor: bump the rightmost position (excluding the last)
                // that has positive mass to its right, dump the remainder
                // into the last slot.
                let k = self.k;
                let mut i = k - 1;
                let mut suffix: u32 = 0;
                loop {
                    if i == 0 {
                        self.done = true;
                        return None;
                    }
                    suffix += c[i];
                    i -= 1;
                    if suffix > 0 {
                        break;
                    }
                }
                c[i] += 1;
                for x in c[i + 1..].iter_mut() {
                    *x = 0;
                }
                c[k - 1] = suffix - 1;
                Some(c.clone())
            }
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
