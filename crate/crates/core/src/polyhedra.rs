//! Exact rational linear-inequality systems with Fourier-Motzkin
//! elimination.
//!
//! Every system is a finite set of closed rows `sum_i a_i x_i <= b` over
//! named variables with exact rational coefficients. Elimination pairs
//! rows of opposite sign in the chosen variable, so the result describes
//! exactly the projection of the feasible set. On top of that this module
//! provides projection with redundancy pruning, exact linear optimization
//! (by eliminating everything except a fresh objective variable), witness
//! extraction by reverse substitution, and the re-derivation check for the
//! two-constraint inner bound from its pre-elimination rate system.

use crate::info::JointPmf;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rat = BigRational;

/// Exact rational from a small integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact rational n/d.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Rounds a real to the nearest multiple of 2^-40 (exact dyadic rational).
pub fn dyadic40(x: f64) -> Rat {
    let scale = (1u64 << 40) as f64;
    let num = (x * scale).round() as i128;
    Rat::new(BigInt::from(num), BigInt::from(1u64 << 40))
}

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("row has {got} coefficients, system has {want} variables")]
    RowShape { got: usize, want: usize },
    #[error("negative information term {name} = {value}")]
    NegativeTerm { name: &'static str, value: f64 },
}

/// One closed inequality `coefs . x <= bound`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Row {
    pub coefs: Vec<Rat>,
    pub bound: Rat,
}

impl Row {
    pub fn new(coefs: Vec<Rat>, bound: Rat) -> Self {
        Row { coefs, bound }
    }

    fn is_zero(&self) -> bool {
        self.coefs.iter().all(|c| c.is_zero())
    }

    /// Trivially satisfied: 0 <= b with b >= 0.
    fn is_trivial(&self) -> bool {
        self.is_zero() && !self.bound.is_negative()
    }

    /// Infeasible marker: 0 <= b with b < 0.
    fn is_infeasible(&self) -> bool {
        self.is_zero() && self.bound.is_negative()
    }

    /// Scales by the positive rational that makes all entries coprime
    /// integers.
    fn canonicalize(&mut self) {
        let mut lcm = BigInt::one();
        for c in self.coefs.iter().chain(std::iter::once(&self.bound)) {
            lcm = lcm.lcm(c.denom());
        }
        let mut gcd = BigInt::zero();
        let scaled: Vec<BigInt> = self
            .coefs
            .iter()
            .chain(std::iter::once(&self.bound))
            .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
            .collect();
        for v in &scaled {
            gcd = gcd.gcd(v);
        }
        if gcd.is_zero() {
            return;
        }
        let scale = Rat::new(lcm, gcd);
        for c in &mut self.coefs {
            *c *= scale.clone();
        }
        self.bound *= scale;
    }

    fn eval(&self, point: &[Rat]) -> Rat {
        self.coefs.iter().zip(point).map(|(c, x)| c * x).sum()
    }

    pub fn holds_at(&self, point: &[Rat]) -> bool {
        self.eval(point) <= self.bound
    }
}

/// A finite system of closed linear inequalities over named variables.
#[derive(Debug, Clone)]
pub struct IneqSystem {
    vars: Vec<String>,
    rows: Vec<Row>,
}

impl IneqSystem {
    pub fn new(vars: Vec<String>) -> Self {
        IneqSystem { vars, rows: Vec::new() }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn var_index(&self, name: &str) -> Result<usize, PolyError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    pub fn push(&mut self, coefs: Vec<Rat>, bound: Rat) -> Result<(), PolyError> {
        if coefs.len() != self.vars.len() {
            return Err(PolyError::RowShape { got: coefs.len(), want: self.vars.len() });
        }
        let mut row = Row::new(coefs, bound);
        row.canonicalize();
        self.rows.push(row);
        Ok(())
    }

    /// Convenience: push `terms . x <= bound` with named sparse terms.
    pub fn push_named(&mut self, terms: &[(&str, Rat)], bound: Rat) -> Result<(), PolyError> {
        let mut coefs = vec![Rat::zero(); self.vars.len()];
        for (name, c) in terms {
            let i = self.var_index(name)?;
            coefs[i] += c.clone();
        }
        self.push(coefs, bound)
    }

    /// Drops duplicate and trivially-true rows; collapses on infeasibility.
    fn tidy(&mut self) {
        if self.rows.iter().any(|r| r.is_infeasible()) {
            self.rows = vec![Row::new(vec![Rat::zero(); self.vars.len()], rat(-1))];
            return;
        }
        self.rows.retain(|r| !r.is_trivial());
        self.rows.sort();
        self.rows.dedup();
        // Identical coefficient vectors: keep the tightest bound. Rows are
        // sorted, so equal coefficient vectors are adjacent with increasing
        // bounds.
        self.rows.dedup_by(|next, prev| next.coefs == prev.coefs && next.bound >= prev.bound);
    }

    pub fn is_infeasible_marker(&self) -> bool {
        self.rows.iter().any(|r| r.is_infeasible())
    }

    pub fn holds_at(&self, point: &[Rat]) -> bool {
        self.rows.iter().all(|r| r.holds_at(point))
    }

    /// Fourier-Motzkin elimination of one variable: pairs every
    /// positive-coefficient row with every negative-coefficient row and
    /// carries zero-coefficient rows through unchanged.
    pub fn fm_eliminate(&self, var: &str) -> Result<IneqSystem, PolyError> {
        let idx = self.var_index(var)?;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut out_rows: Vec<Row> = Vec::new();
        for row in &self.rows {
            let c = &row.coefs[idx];
            if c.is_zero() {
                out_rows.push(row.clone());
            } else if c.is_positive() {
                pos.push(row);
            } else {
                neg.push(row);
            }
        }
        for p in &pos {
            for n in &neg {
                let pc = p.coefs[idx].clone();
                let nc = -n.coefs[idx].clone();
                // nc * p + pc * n cancels the variable.
                let coefs: Vec<Rat> = p
                    .coefs
                    .iter()
                    .zip(&n.coefs)
                    .map(|(a, b)| a * nc.clone() + b * pc.clone())
                    .collect();
                let bound = &p.bound * nc.clone() + &n.bound * pc.clone();
                out_rows.push(Row::new(coefs, bound));
            }
        }
        let mut vars = self.vars.clone();
        vars.remove(idx);
        for row in &mut out_rows {
            row.coefs.remove(idx);
            row.canonicalize();
        }
        let mut sys = IneqSystem { vars, rows: out_rows };
        sys.tidy();
        Ok(sys)
    }

    /// True if `target` is a nonnegative combination of up to `max_combo`
    /// rows (excluding index `skip`), i.e. provably redundant.
    fn implied_by_combo(&self, skip: usize, max_combo: usize) -> bool {
        let target = &self.rows[skip];
        if target.is_trivial() {
            return true;
        }
        let others: Vec<&Row> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, r)| r)
            .collect();
        // Size-1: a positive multiple of another row dominates target.
        for r in &others {
            if let Some(mu) = single_multiplier(r, target) {
                if !mu.is_negative() && &r.bound * mu <= target.bound {
                    return true;
                }
            }
        }
        if max_combo < 2 {
            return false;
        }
        let n = others.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if combo_implies(&[others[i], others[j]], target) {
                    return true;
                }
            }
        }
        if max_combo < 3 || n > 40 {
            return false;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    if combo_implies(&[others[i], others[j], others[k]], target) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn prune(&mut self, max_combo: usize) {
        self.tidy();
        let mut i = 0;
        while i < self.rows.len() {
            if self.rows.len() > 1 && self.implied_by_combo(i, max_combo) {
                self.rows.remove(i);
            } else {
                i += 1;
            }
        }
    }

    /// Projects onto `keep`, eliminating the other variables in a cheapest
    /// first order (fewest positive/negative pairings), pruning implied
    /// rows along the way.
    pub fn project(&self, keep: &[&str]) -> Result<IneqSystem, PolyError> {
        for k in keep {
            self.var_index(k)?;
        }
        let mut sys = self.clone();
        sys.tidy();
        loop {
            let victims: Vec<String> = sys
                .vars
                .iter()
                .filter(|v| !keep.contains(&v.as_str()))
                .cloned()
                .collect();
            if victims.is_empty() {
                break;
            }
            let cheapest = victims
                .iter()
                .min_by_key(|v| {
                    let idx = sys.var_index(v).unwrap();
                    let pos = sys.rows.iter().filter(|r| r.coefs[idx].is_positive()).count();
                    let neg = sys.rows.iter().filter(|r| r.coefs[idx].is_negative()).count();
                    pos * neg
                })
                .unwrap()
                .clone();
            sys = sys.fm_eliminate(&cheapest)?;
            let combo = if sys.rows.len() <= 40 { 3 } else { 2 };
            sys.prune(combo);
        }
        sys.prune(3);
        Ok(sys)
    }

    /// Exact maximum of `objective . x` over the feasible set, computed by
    /// introducing t = objective . x and eliminating everything else.
    pub fn maximize(&self, objective: &[Rat]) -> Result<LpOutcome, PolyError> {
        if objective.len() != self.vars.len() {
            return Err(PolyError::RowShape { got: objective.len(), want: self.vars.len() });
        }
        let (aug, _) = self.eliminate_to_objective(objective)?;
        if aug.is_infeasible_marker() {
            return Ok(LpOutcome::Infeasible);
        }
        let (lo, hi) = t_range(&aug);
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                return Ok(LpOutcome::Infeasible);
            }
        }
        Ok(match hi {
            Some(h) => LpOutcome::Max(h),
            None => LpOutcome::Unbounded,
        })
    }

    /// Finds a feasible rational point with `objective . x > threshold`,
    /// if one exists, by eliminating down to the objective value and
    /// substituting back in reverse.
    pub fn witness_above(
        &self,
        objective: &[Rat],
        threshold: &Rat,
    ) -> Result<Option<Vec<Rat>>, PolyError> {
        let (aug, steps) = self.eliminate_to_objective(objective)?;
        if aug.is_infeasible_marker() {
            return Ok(None);
        }
        let (lo, hi) = t_range(&aug);
        // Pick a t value strictly above the threshold and inside [lo, hi].
        let t0 = match hi {
            Some(h) if &h <= threshold => return Ok(None),
            Some(h) => {
                let cand = (threshold + &h) / rat(2);
                match &lo {
                    Some(l) if *l > cand => l.clone(),
                    _ => cand,
                }
            }
            None => {
                let cand = threshold + Rat::one();
                match &lo {
                    Some(l) if *l > cand => l.clone(),
                    _ => cand,
                }
            }
        };
        if &t0 <= threshold {
            return Ok(None);
        }
        // Reverse substitution: fix t, then recover each eliminated
        // variable from the system it was eliminated from.
        let mut assignment: Vec<(String, Rat)> = vec![("__t".to_string(), t0)];
        for (sys_before, var) in steps.iter().rev() {
            let idx = sys_before.var_index(var)?;
            let mut lo: Option<Rat> = None;
            let mut hi: Option<Rat> = None;
            for row in &sys_before.rows {
                let c = &row.coefs[idx];
                if c.is_zero() {
                    continue;
                }
                // Sum over the already-assigned variables.
                let mut rest = Rat::zero();
                for (j, name) in sys_before.vars.iter().enumerate() {
                    if j == idx {
                        continue;
                    }
                    let val = assignment
                        .iter()
                        .find(|(n, _)| n == name)
                        .map(|(_, v)| v.clone())
                        .expect("later variables are already assigned");
                    rest += &row.coefs[j] * val;
                }
                let slack = (&row.bound - rest) / c.clone();
                if c.is_positive() {
                    hi = Some(match hi {
                        None => slack,
                        Some(h) => h.min(slack),
                    });
                } else {
                    lo = Some(match lo {
                        None => slack,
                        Some(l) => l.max(slack),
                    });
                }
            }
            let value = match (lo, hi) {
                (Some(l), Some(h)) => {
                    debug_assert!(l <= h, "FM guarantees a nonempty interval");
                    (l + h) / rat(2)
                }
                (Some(l), None) => l,
                (None, Some(h)) => h,
                (None, None) => Rat::zero(),
            };
            assignment.push((var.clone(), value));
        }
        let mut point = Vec::with_capacity(self.vars.len());
        for name in &self.vars {
            let v = assignment
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| v.clone())
                .expect("all variables assigned");
            point.push(v);
        }
        debug_assert!(self.holds_at(&point));
        Ok(Some(point))
    }

    fn eliminate_to_objective(
        &self,
        objective: &[Rat],
    ) -> Result<(IneqSystem, Vec<(IneqSystem, String)>), PolyError> {
        let mut vars = self.vars.clone();
        vars.push("__t".to_string());
        let mut aug = IneqSystem::new(vars);
        for row in &self.rows {
            let mut coefs = row.coefs.clone();
            coefs.push(Rat::zero());
            aug.push(coefs, row.bound.clone())?;
        }
        // t - obj.x <= 0 and obj.x - t <= 0.
        let mut up: Vec<Rat> = objective.iter().map(|c| -c.clone()).collect();
        up.push(Rat::one());
        aug.push(up, Rat::zero())?;
        let mut dn: Vec<Rat> = objective.to_vec();
        dn.push(-Rat::one());
        aug.push(dn, Rat::zero())?;

        let mut steps = Vec::new();
        loop {
            let victims: Vec<String> =
                aug.vars.iter().filter(|v| v.as_str() != "__t").cloned().collect();
            if victims.is_empty() {
                break;
            }
            let cheapest = victims
                .iter()
                .min_by_key(|v| {
                    let idx = aug.var_index(v).unwrap();
                    let pos = aug.rows.iter().filter(|r| r.coefs[idx].is_positive()).count();
                    let neg = aug.rows.iter().filter(|r| r.coefs[idx].is_negative()).count();
                    pos * neg
                })
                .unwrap()
                .clone();
            steps.push((aug.clone(), cheapest.clone()));
            aug = aug.fm_eliminate(&cheapest)?;
            let combo = if aug.rows.len() <= 40 { 3 } else { 2 };
            aug.prune(combo);
        }
        Ok((aug, steps))
    }
}

/// Outcome of exact linear maximization.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Max(Rat),
}

fn t_range(sys: &IneqSystem) -> (Option<Rat>, Option<Rat>) {
    let idx = sys.var_index("__t").expect("objective variable present");
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for row in &sys.rows {
        let c = &row.coefs[idx];
        if c.is_zero() {
            continue;
        }
        let v = &row.bound / c.clone();
        if c.is_positive() {
            hi = Some(match hi {
                None => v,
                Some(h) => h.min(v),
            });
        } else {
            lo = Some(match lo {
                None => v,
                Some(l) => l.max(v),
            });
        }
    }
    (lo, hi)
}

/// Multiplier mu with mu * r == target on coefficients, if one exists.
fn single_multiplier(r: &Row, target: &Row) -> Option<Rat> {
    let mut mu: Option<Rat> = None;
    for (a, t) in r.coefs.iter().zip(&target.coefs) {
        match (a.is_zero(), t.is_zero()) {
            (true, true) => continue,
            (true, false) | (false, true) => return None,
            (false, false) => {
                let m = t / a;
                match &mu {
                    None => mu = Some(m),
                    Some(prev) if *prev == m => {}
                    Some(_) => return None,
                }
            }
        }
    }
    mu
}

/// True if `target` is dominated by a nonnegative combination of `rows`
/// (coefficients match exactly, combined bound does not exceed target's).
fn combo_implies(rows: &[&Row], target: &Row) -> bool {
    let k = rows.len();
    let nvars = target.coefs.len();
    // Solve sum_j mu_j rows[j].coefs = target.coefs by Gaussian
    // elimination on the nvars x k column system.
    let mut mat: Vec<Vec<Rat>> = (0..nvars)
        .map(|v| {
            let mut row: Vec<Rat> = rows.iter().map(|r| r.coefs[v].clone()).collect();
            row.push(target.coefs[v].clone());
            row
        })
        .collect();
    let mut pivot_rows = Vec::new();
    let mut used = vec![false; nvars];
    for col in 0..k {
        let Some(pr) = (0..nvars).find(|&r| !used[r] && !mat[r][col].is_zero()) else {
            // Rank-deficient in this column; smaller subsets handle it.
            return false;
        };
        used[pr] = true;
        pivot_rows.push((pr, col));
        let piv = mat[pr][col].clone();
        for r in 0..nvars {
            if r != pr && !mat[r][col].is_zero() {
                let f = &mat[r][col] / &piv;
                for c in col..=k {
                    let sub = &mat[pr][c] * &f;
                    mat[r][c] -= sub;
                }
            }
        }
    }
    // Consistency: every non-pivot row must be all zero.
    for r in 0..nvars {
        if !used[r] {
            if mat[r][..k].iter().any(|c| !c.is_zero()) || !mat[r][k].is_zero() {
                return false;
            }
        }
    }
    let mut mu = vec![Rat::zero(); k];
    for (pr, col) in pivot_rows {
        mu[col] = &mat[pr][k] / &mat[pr][col];
    }
    if mu.iter().any(|m| m.is_negative()) {
        return false;
    }
    let combined: Rat = rows.iter().zip(&mu).map(|(r, m)| &r.bound * m).sum();
    combined <= target.bound
}

/// Containment check by exact optimization: `inner` is contained in
/// `outer` iff no row of `outer` can be pushed past its bound over
/// `inner`. Returns a violating point of `inner` if containment fails.
pub fn contained_in(
    inner: &IneqSystem,
    outer: &IneqSystem,
) -> Result<Option<Vec<Rat>>, PolyError> {
    if inner.is_infeasible_marker() {
        return Ok(None);
    }
    for row in outer.rows() {
        // Express outer's row over inner's variable order.
        let mut objective = vec![Rat::zero(); inner.vars().len()];
        for (j, name) in outer.vars().iter().enumerate() {
            let i = inner.var_index(name)?;
            objective[i] = row.coefs[j].clone();
        }
        match inner.maximize(&objective)? {
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => {
                let w = inner.witness_above(&objective, &row.bound)?;
                return Ok(Some(w.expect("unbounded objective exceeds any bound")));
            }
            LpOutcome::Max(m) => {
                if m > row.bound {
                    let w = inner.witness_above(&objective, &row.bound)?;
                    return Ok(Some(w.expect("maximum exceeds bound, witness exists")));
                }
            }
        }
    }
    Ok(None)
}

/// Information coefficients of the two-constraint inner bound, measured on
/// one joint pmf (axes named U, X, Y, Z1, Z2) with a deterministic channel.
#[derive(Debug, Clone, Copy)]
pub struct RateTerms {
    pub h_y: f64,
    pub h_y_u: f64,
    pub h_y_z1u: f64,
    pub h_y_z2u: f64,
    pub h_y_z12u: f64,
    pub i_z1z2_u: f64,
}

impl RateTerms {
    /// Evaluates the six information terms on a joint with axes named
    /// U, X, Y, Z1, Z2 (any order).
    pub fn from_joint(joint: &JointPmf) -> Result<Self, PolyError> {
        let ax = |name: &str| {
            joint
                .axis_named(name)
                .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
        };
        let u = ax("U")?;
        let y = ax("Y")?;
        let z1 = ax("Z1")?;
        let z2 = ax("Z2")?;
        let ce = |a: &[usize], c: &[usize]| joint.cond_entropy(a, c).expect("disjoint axis sets");
        Ok(RateTerms {
            h_y: joint.entropy_of(&[y]).expect("axis in range"),
            h_y_u: ce(&[y], &[u]),
            h_y_z1u: ce(&[y], &[z1, u]),
            h_y_z2u: ce(&[y], &[z2, u]),
            h_y_z12u: ce(&[y], &[z1, z2, u]),
            i_z1z2_u: joint.cond_mutual_info(&[z1], &[z2], &[u]).expect("disjoint axis sets"),
        })
    }

    fn validated_dyadic(&self) -> Result<[Rat; 6], PolyError> {
        let named = [
            ("H(Y)", self.h_y),
            ("H(Y|U)", self.h_y_u),
            ("H(Y|Z1,U)", self.h_y_z1u),
            ("H(Y|Z2,U)", self.h_y_z2u),
            ("H(Y|Z1,Z2,U)", self.h_y_z12u),
            ("I(Z1;Z2|U)", self.i_z1z2_u),
        ];
        let mut out = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
        for (i, (name, v)) in named.iter().enumerate() {
            if *v < -1e-9 {
                return Err(PolyError::NegativeTerm { name, value: *v });
            }
            out[i] = dyadic40(v.max(0.0));
        }
        Ok(out)
    }
}

/// Verdict of [`verify_thm4_projection`].
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionVerdict {
    Equal,
    /// A point in exactly one of the two systems (coordinates R, Rd1, Rd2).
    Mismatch { witness: Vec<Rat>, projection_side: bool },
}

/// Builds the pre-elimination rate system of the two-constraint coding
/// scheme (rate split R = R0+R1+R2+R3, bin excesses, covering and
/// anti-collision constraints, decoding constraints, disturbance
/// constraints), projects it onto (R, Rd1, Rd2) by exact Fourier-Motzkin
/// elimination, and compares the result with the six-inequality inner
/// bound instantiated at the same coefficients.
///
/// Strict inequalities of the coding analysis are modeled as closed: the
/// vanishing typicality slacks mean the closure of the achievable region
/// is the closed polytope. The covering constraint uses I(Z1;Z2|U) on the
/// right-hand side.
pub fn verify_thm4_projection(terms: &RateTerms) -> Result<ProjectionVerdict, PolyError> {
    let [h_y, h_y_u, h_y_z1u, h_y_z2u, h_y_z12u, i12] = terms.validated_dyadic()?;

    let vars: Vec<String> = ["R", "Rd1", "Rd2", "R0", "R1", "R2", "R3", "Rt1", "Rt2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut pre = IneqSystem::new(vars);
    let one = Rat::one;
    let neg = || -Rat::one();
    let half = || ratio(1, 2);

    // Nonnegative split rates; bin rates at least their message rates.
    for v in ["R0", "R1", "R2", "R3"] {
        pre.push_named(&[(v, neg())], Rat::zero())?;
    }
    pre.push_named(&[("R1", one()), ("Rt1", neg())], Rat::zero())?;
    pre.push_named(&[("R2", one()), ("Rt2", neg())], Rat::zero())?;
    // Rate split as two inequalities.
    pre.push_named(
        &[("R", one()), ("R0", neg()), ("R1", neg()), ("R2", neg()), ("R3", neg())],
        Rat::zero(),
    )?;
    pre.push_named(
        &[("R", neg()), ("R0", one()), ("R1", one()), ("R2", one()), ("R3", one())],
        Rat::zero(),
    )?;
    // Mutual covering: r1 + r2 >= I(Z1;Z2|U) with rj = Rtj - Rj.
    pre.push_named(
        &[("R1", one()), ("R2", one()), ("Rt1", neg()), ("Rt2", neg())],
        -i12.clone(),
    )?;
    // Anti-collision: r1/2 + r2 <= I12 and r1 + r2/2 <= I12.
    pre.push_named(
        &[("Rt1", half()), ("R1", -half()), ("Rt2", one()), ("R2", neg())],
        i12.clone(),
    )?;
    pre.push_named(
        &[("Rt1", one()), ("R1", neg()), ("Rt2", half()), ("R2", -half())],
        i12.clone(),
    )?;
    // Decoding.
    pre.push_named(&[("R3", one())], h_y_z12u.clone())?;
    pre.push_named(&[("Rt1", one()), ("R3", one())], &h_y_z2u + &i12)?;
    pre.push_named(&[("Rt2", one()), ("R3", one())], &h_y_z1u + &i12)?;
    pre.push_named(&[("Rt1", one()), ("Rt2", one()), ("R3", one())], &h_y_u + &i12)?;
    pre.push_named(
        &[("R0", one()), ("Rt1", one()), ("Rt2", one()), ("R3", one())],
        &h_y + &i12,
    )?;
    // Disturbance rates.
    pre.push_named(&[("R0", one()), ("Rt1", one()), ("Rd1", neg())], Rat::zero())?;
    pre.push_named(&[("R0", one()), ("Rt2", one()), ("Rd2", neg())], Rat::zero())?;

    let projected = pre.project(&["R", "Rd1", "Rd2"])?;

    // The six-inequality region, plus the nonnegativity the projection
    // inherits from the rate split.
    let mut thm = IneqSystem::new(vec!["R".into(), "Rd1".into(), "Rd2".into()]);
    thm.push_named(&[("R", one())], h_y.clone())?;
    thm.push_named(&[("Rd1", neg()), ("Rd2", neg())], -i12.clone())?;
    thm.push_named(&[("R", one()), ("Rd1", neg())], h_y_z1u.clone())?;
    thm.push_named(&[("R", one()), ("Rd2", neg())], h_y_z2u.clone())?;
    thm.push_named(&[("R", one()), ("Rd1", neg()), ("Rd2", neg())], &h_y_z12u - &i12)?;
    thm.push_named(
        &[("R", rat(2)), ("Rd1", neg()), ("Rd2", neg())],
        &h_y_z12u + &h_y_u - &i12,
    )?;
    thm.push_named(&[("R", neg())], Rat::zero())?;
    thm.push_named(&[("Rd1", neg())], Rat::zero())?;
    thm.push_named(&[("Rd2", neg())], Rat::zero())?;

    if let Some(w) = contained_in(&projected, &thm)? {
        return Ok(ProjectionVerdict::Mismatch { witness: w, projection_side: true });
    }
    if let Some(w) = contained_in(&thm, &projected)? {
        return Ok(ProjectionVerdict::Mismatch { witness: w, projection_side: false });
    }
    Ok(ProjectionVerdict::Equal)
}

/// Plain-text system format: a `vars` line followed by one row per line,
/// `a1 a2 .. <= b`, entries as integers, decimals, or `p/q` fractions.
pub fn parse_system(text: &str) -> Result<IneqSystem, PolyError> {
    let mut sys: Option<IneqSystem> = None;
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "vars" {
            sys = Some(IneqSystem::new(toks[1..].iter().map(|s| s.to_string()).collect()));
            continue;
        }
        let sys = sys
            .as_mut()
            .ok_or_else(|| PolyError::UnknownVariable("vars line must come first".into()))?;
        let sep = toks
            .iter()
            .position(|t| *t == "<=")
            .ok_or_else(|| PolyError::UnknownVariable("row needs a <= separator".into()))?;
        let coefs: Result<Vec<Rat>, _> = toks[..sep].iter().map(|t| parse_rat(t)).collect();
        let bound = parse_rat(toks[sep + 1])?;
        sys.push(coefs?, bound)?;
    }
    sys.ok_or_else(|| PolyError::UnknownVariable("empty system".into()))
}

/// Renders a system in the same plain-text format.
pub fn format_system(sys: &IneqSystem) -> String {
    let mut out = String::from("vars");
    for v in sys.vars() {
        out.push(' ');
        out.push_str(v);
    }
    out.push('\n');
    for row in sys.rows() {
        let mut line = String::new();
        for c in &row.coefs {
            line.push_str(&format!("{} ", c));
        }
        line.push_str(&format!("<= {}", row.bound));
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn parse_rat(tok: &str) -> Result<Rat, PolyError> {
    if let Some((n, d)) = tok.split_once('/') {
        let n: i64 = n.parse().map_err(|_| PolyError::UnknownVariable(tok.into()))?;
        let d: i64 = d.parse().map_err(|_| PolyError::UnknownVariable(tok.into()))?;
        return Ok(ratio(n, d));
    }
    if let Some((int, frac)) = tok.split_once('.') {
        let sign = if int.starts_with('-') { -1 } else { 1 };
        let int_part: i64 = int.parse().map_err(|_| PolyError::UnknownVariable(tok.into()))?;
        let scale = 10i64.pow(frac.len() as u32);
        let frac_part: i64 =
            frac.parse().map_err(|_| PolyError::UnknownVariable(tok.into()))?;
        return Ok(rat(int_part) + ratio(sign * frac_part, scale));
    }
    let n: i64 = tok.parse().map_err(|_| PolyError::UnknownVariable(tok.into()))?;
    Ok(rat(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelSpec;
    use crate::info::{Axis, JointPmf};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn sys2(rows: &[(&[i64], i64)]) -> IneqSystem {
        let mut s = IneqSystem::new(vec!["x".into(), "y".into()]);
        for (coefs, b) in rows {
            s.push(coefs.iter().map(|&c| rat(c)).collect(), rat(*b)).unwrap();
        }
        s
    }

    #[test]
    fn eliminate_single_pairing() {
        // {x + y <= 2, -y <= 0} eliminate y -> {x <= 2}.
        let s = sys2(&[(&[1, 1], 2), (&[0, -1], 0)]);
        let e = s.fm_eliminate("y").unwrap();
        assert_eq!(e.vars(), &["x".to_string()]);
        assert_eq!(e.rows().len(), 1);
        assert_eq!(e.rows()[0], Row::new(vec![rat(1)], rat(2)));
    }

    #[test]
    fn eliminate_absent_variable_is_noop() {
        // y present in the variable list but in no row.
        let s = sys2(&[(&[1, 0], 1)]);
        let e = s.fm_eliminate("y").unwrap();
        assert_eq!(e.rows(), &[Row::new(vec![rat(1)], rat(1))]);
        assert!(s.fm_eliminate("z").is_err());
    }

    #[test]
    fn eliminate_unit_square() {
        // {x + y <= 1, -x <= 0, -y <= 0} eliminate y -> {0 <= x <= 1}.
        let s = sys2(&[(&[1, 1], 1), (&[-1, 0], 0), (&[0, -1], 0)]);
        let e = s.fm_eliminate("y").unwrap();
        let mut rows = e.rows().to_vec();
        rows.sort();
        assert_eq!(rows, vec![Row::new(vec![rat(-1)], rat(0)), Row::new(vec![rat(1)], rat(1))]);
    }

    #[test]
    fn project_simplex_to_interval() {
        // 3-D simplex onto one variable -> unit interval.
        let mut s = IneqSystem::new(vec!["a".into(), "b".into(), "c".into()]);
        s.push(vec![rat(1), rat(1), rat(1)], rat(1)).unwrap();
        s.push(vec![rat(-1), rat(-1), rat(-1)], rat(-1)).unwrap();
        for i in 0..3 {
            let mut c = vec![rat(0), rat(0), rat(0)];
            c[i] = rat(-1);
            s.push(c, rat(0)).unwrap();
        }
        let p = s.project(&["a"]).unwrap();
        let mut rows = p.rows().to_vec();
        rows.sort();
        assert_eq!(rows, vec![Row::new(vec![rat(-1)], rat(0)), Row::new(vec![rat(1)], rat(1))]);

        // Projecting onto all variables canonicalizes without loss.
        let full = s.project(&["a", "b", "c"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let pt: Vec<Rat> =
                (0..3).map(|_| ratio(rng.gen_range(-4..8), rng.gen_range(1..5))).collect();
            assert_eq!(s.holds_at(&pt), full.holds_at(&pt));
        }
    }

    #[test]
    fn maximize_and_witness() {
        let s = sys2(&[(&[1, 1], 1), (&[-1, 0], 0), (&[0, -1], 0)]);
        match s.maximize(&[rat(1), rat(1)]).unwrap() {
            LpOutcome::Max(m) => assert_eq!(m, rat(1)),
            other => panic!("expected max, got {other:?}"),
        }
        match s.maximize(&[rat(-1), rat(0)]).unwrap() {
            LpOutcome::Max(m) => assert_eq!(m, rat(0)),
            other => panic!("expected max, got {other:?}"),
        }
        let w = s.witness_above(&[rat(1), rat(1)], &ratio(1, 2)).unwrap().unwrap();
        assert!(s.holds_at(&w));
        let val: Rat = w.iter().cloned().sum();
        assert!(val > ratio(1, 2));
        assert!(s.witness_above(&[rat(1), rat(1)], &rat(1)).unwrap().is_none());
    }

    fn random_system(rng: &mut ChaCha8Rng, nvars: usize, nrows: usize) -> IneqSystem {
        let vars = (0..nvars).map(|i| format!("v{i}")).collect();
        let mut s = IneqSystem::new(vars);
        for _ in 0..nrows {
            let coefs: Vec<Rat> = (0..nvars).map(|_| rat(rng.gen_range(-3..=3))).collect();
            s.push(coefs, rat(rng.gen_range(-2..=6))).unwrap();
        }
        // Keep things bounded so intervals are finite most of the time.
        for i in 0..nvars {
            let mut c = vec![Rat::zero(); nvars];
            c[i] = rat(1);
            s.push(c.clone(), rat(5)).unwrap();
            c[i] = rat(-1);
            s.push(c, rat(5)).unwrap();
        }
        s
    }

    #[test]
    fn elimination_is_exact_projection() {
        // A rational point satisfies the projected system iff its allowed
        // interval for the eliminated variable is nonempty.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let s = random_system(&mut rng, 3, 4);
            let proj = s.fm_eliminate("v2").unwrap();
            for _ in 0..60 {
                let pt: Vec<Rat> =
                    (0..2).map(|_| ratio(rng.gen_range(-10..=10), 2)).collect();
                let idx = s.var_index("v2").unwrap();
                let mut lo: Option<Rat> = None;
                let mut hi: Option<Rat> = None;
                let mut feasible_slice = true;
                for row in s.rows() {
                    let c = &row.coefs[idx];
                    let rest: Rat = row
                        .coefs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != idx)
                        .map(|(j, a)| {
                            let v = if j < idx { j } else { j - 1 };
                            a * &pt[v]
                        })
                        .sum();
                    if c.is_zero() {
                        if rest > row.bound {
                            feasible_slice = false;
                        }
                        continue;
                    }
                    let slack = (&row.bound - rest) / c.clone();
                    if c.is_positive() {
                        hi = Some(hi.map_or(slack.clone(), |h: Rat| h.min(slack)));
                    } else {
                        lo = Some(lo.map_or(slack.clone(), |l: Rat| l.max(slack)));
                    }
                }
                let has_extension = feasible_slice
                    && match (&lo, &hi) {
                        (Some(l), Some(h)) => l <= h,
                        _ => true,
                    };
                assert_eq!(proj.holds_at(&pt), has_extension);
            }
        }
    }

    #[test]
    fn elimination_order_does_not_change_the_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let s = random_system(&mut rng, 5, 5);
            let p1 = s
                .fm_eliminate("v3")
                .unwrap()
                .fm_eliminate("v4")
                .unwrap();
            let p2 = s
                .fm_eliminate("v4")
                .unwrap()
                .fm_eliminate("v3")
                .unwrap();
            // Feasible indicators agree on a coarse rational grid.
            for a in -6..6 {
                for b in -6..6 {
                    for c in -6..6 {
                        let pt = vec![ratio(a, 1), ratio(b, 1), ratio(c, 1)];
                        assert_eq!(p1.holds_at(&pt), p2.holds_at(&pt));
                    }
                }
            }
        }
    }

    #[test]
    fn thm4_identity_channel_instance() {
        // Identity channel, uniform binary input, empty U:
        // H(Y)=1, I(Z1;Z2|U)=1, all conditional Y-entropies 0, H(Y|U)=1.
        let terms = RateTerms {
            h_y: 1.0,
            h_y_u: 1.0,
            h_y_z1u: 0.0,
            h_y_z2u: 0.0,
            h_y_z12u: 0.0,
            i_z1z2_u: 1.0,
        };
        assert_eq!(verify_thm4_projection(&terms).unwrap(), ProjectionVerdict::Equal);

        // Hand-checked description of the same region.
        let mut hand = IneqSystem::new(vec!["R".into(), "Rd1".into(), "Rd2".into()]);
        let one = Rat::one;
        hand.push_named(&[("R", one())], rat(1)).unwrap();
        hand.push_named(&[("R", one()), ("Rd1", -one())], rat(0)).unwrap();
        hand.push_named(&[("R", one()), ("Rd2", -one())], rat(0)).unwrap();
        hand.push_named(&[("R", one()), ("Rd1", -one()), ("Rd2", -one())], rat(-1)).unwrap();
        hand.push_named(&[("R", rat(2)), ("Rd1", -one()), ("Rd2", -one())], rat(0)).unwrap();
        hand.push_named(&[("Rd1", -one()), ("Rd2", -one())], rat(-1)).unwrap();
        hand.push_named(&[("R", -one())], rat(0)).unwrap();
        hand.push_named(&[("Rd1", -one())], rat(0)).unwrap();
        hand.push_named(&[("Rd2", -one())], rat(0)).unwrap();

        let mut thm = IneqSystem::new(vec!["R".into(), "Rd1".into(), "Rd2".into()]);
        thm.push_named(&[("R", one())], rat(1)).unwrap();
        thm.push_named(&[("Rd1", -one()), ("Rd2", -one())], rat(-1)).unwrap();
        thm.push_named(&[("R", one()), ("Rd1", -one())], rat(0)).unwrap();
        thm.push_named(&[("R", one()), ("Rd2", -one())], rat(0)).unwrap();
        thm.push_named(&[("R", one()), ("Rd1", -one()), ("Rd2", -one())], rat(-1)).unwrap();
        thm.push_named(&[("R", rat(2)), ("Rd1", -one()), ("Rd2", -one())], rat(0)).unwrap();
        thm.push_named(&[("R", -one())], rat(0)).unwrap();
        thm.push_named(&[("Rd1", -one())], rat(0)).unwrap();
        thm.push_named(&[("Rd2", -one())], rat(0)).unwrap();
        assert!(contained_in(&hand, &thm).unwrap().is_none());
        assert!(contained_in(&thm, &hand).unwrap().is_none());
    }

    #[test]
    fn thm4_degenerate_terms() {
        // All info terms zero except H(Y) = 1: region collapses to
        // {0 <= R <= 1, Rd >= 0}.
        let terms = RateTerms {
            h_y: 1.0,
            h_y_u: 0.0,
            h_y_z1u: 0.0,
            h_y_z2u: 0.0,
            h_y_z12u: 0.0,
            i_z1z2_u: 0.0,
        };
        assert_eq!(verify_thm4_projection(&terms).unwrap(), ProjectionVerdict::Equal);
    }

    #[test]
    fn thm4_on_random_deterministic_joints() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..20 {
            let nx = rng.gen_range(2..=5usize);
            let nu = rng.gen_range(1..=3usize);
            let ch = ChannelSpec::deterministic(
                nx,
                vec![
                    ("Y", (0..nx).map(|_| rng.gen_range(0..3)).collect()),
                    ("Z1", (0..nx).map(|_| rng.gen_range(0..2)).collect()),
                    ("Z2", (0..nx).map(|_| rng.gen_range(0..2)).collect()),
                ],
            );
            let mut w: Vec<f64> = (0..nu * nx).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = w.iter().sum();
            for x in &mut w {
                *x /= s;
            }
            let input =
                JointPmf::new(vec![Axis::new("U", nu), Axis::new("X", nx)], w).unwrap();
            let joint = ch.induced_joint(&input).unwrap();
            let terms = RateTerms::from_joint(&joint).unwrap();
            assert_eq!(
                verify_thm4_projection(&terms).unwrap(),
                ProjectionVerdict::Equal,
                "trial {trial}"
            );
        }
    }

    #[test]
    fn parse_and_format_roundtrip() {
        let text = "vars x y\n1 1 <= 1\n-1 0 <= 0\n0 -1 <= 0\n1/2 0.25 <= 3/4\n";
        let s = parse_system(text).unwrap();
        assert_eq!(s.rows().len(), 4);
        let rendered = format_system(&s);
        let s2 = parse_system(&rendered).unwrap();
        assert_eq!(s.rows(), s2.rows());
    }
}
