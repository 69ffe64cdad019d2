//! Channel descriptions: one desired output Y and K side outputs Z_1..Z_K,
//! each a deterministic map of the input or a row-stochastic table, with an
//! optional full joint conditional when outputs are correlated given x.
//!
//! The text format is line oriented, `#` starts a comment:
//!
//! ```text
//! alphabet X 4
//! output Y det 0 1 1 2
//! output Z stoch 2
//! 0.9 0.1
//! 0.1 0.9
//! 0.2 0.8
//! 0.8 0.2
//! ```
//!
//! An optional `joint` keyword is followed by one row per input symbol over
//! the product of the output alphabets (Y fastest changing last).

use crate::info::{Axis, JointPmf};
use crate::partition::SetPartition;
use thiserror::Error;

/// Row sums and joint consistency are validated to this tolerance.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: row sums to {sum}, expected 1 within {ROW_SUM_TOL:e}")]
    RowSum { line: usize, sum: f64 },
    #[error("output {0:?} not found")]
    UnknownOutput(String),
    #[error("output {0:?} is stochastic, no partition")]
    NotDeterministic(String),
    #[error("input axis mismatch: channel has {channel} input symbols, pmf axis has {pmf}")]
    InputMismatch { channel: usize, pmf: usize },
    #[error("joint table row {row} is inconsistent with output {output:?}")]
    JointInconsistent { row: usize, output: String },
    #[error("channel needs at least one output")]
    NoOutputs,
}

/// One channel output: either a deterministic map X -> symbol or a
/// row-stochastic conditional table.
#[derive(Debug, Clone)]
pub enum OutputMap {
    Det(Vec<usize>),
    /// One row per input symbol; row length is the output alphabet size.
    Stoch(Vec<Vec<f64>>),
}

#[derive(Debug, Clone)]
pub struct ChannelOutput {
    pub name: String,
    pub map: OutputMap,
}

impl ChannelOutput {
    pub fn alphabet_size(&self) -> usize {
        match &self.map {
            OutputMap::Det(map) => map.iter().copied().max().map_or(1, |m| m + 1),
            OutputMap::Stoch(rows) => rows.first().map_or(0, |r| r.len()),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.map, OutputMap::Det(_))
    }

    /// p(symbol | x) for this output alone.
    fn prob(&self, x: usize, symbol: usize) -> f64 {
        match &self.map {
            OutputMap::Det(map) => {
                if map[x] == symbol {
                    1.0
                } else {
                    0.0
                }
            }
            OutputMap::Stoch(rows) => rows[x][symbol],
        }
    }
}

/// A discrete memoryless channel with named outputs; the first output is
/// the desired receiver Y, the remainder are side receivers.
#[derive(Debug, Clone)]
pub struct ChannelSpec {
    pub input_size: usize,
    outputs: Vec<ChannelOutput>,
    /// Optional p(all outputs | x): one row per input symbol over the
    /// product of output alphabets, outputs in declaration order, last
    /// output fastest.
    joint: Option<Vec<Vec<f64>>>,
}

impl ChannelSpec {
    /// Builds a fully deterministic channel from output maps.
    pub fn deterministic(input_size: usize, outputs: Vec<(&str, Vec<usize>)>) -> Self {
        let outputs = outputs
            .into_iter()
            .map(|(name, map)| {
                assert_eq!(map.len(), input_size);
                ChannelOutput { name: name.to_string(), map: OutputMap::Det(map) }
            })
            .collect();
        ChannelSpec { input_size, outputs, joint: None }
    }

    pub fn outputs(&self) -> &[ChannelOutput] {
        &self.outputs
    }

    /// Number of side receivers (outputs beyond Y).
    pub fn num_side(&self) -> usize {
        self.outputs.len().saturating_sub(1)
    }

    pub fn is_deterministic(&self) -> bool {
        self.outputs.iter().all(|o| o.is_deterministic())
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|o| o.name == name)
    }

    /// Canonical set partition of a deterministic output.
    pub fn output_partition(&self, name: &str) -> Result<SetPartition, ChannelError> {
        let idx = self.output_index(name).ok_or_else(|| ChannelError::UnknownOutput(name.into()))?;
        match &self.outputs[idx].map {
            OutputMap::Det(map) => Ok(SetPartition::from_labels(map).expect("nonempty map")),
            OutputMap::Stoch(_) => Err(ChannelError::NotDeterministic(name.into())),
        }
    }

    /// p(all outputs | x) as a dense row over the product output alphabet.
    pub fn conditional_row(&self, x: usize) -> Vec<f64> {
        if let Some(joint) = &self.joint {
            return joint[x].clone();
        }
        let sizes: Vec<usize> = self.outputs.iter().map(|o| o.alphabet_size()).collect();
        let total: usize = sizes.iter().product();
        let mut row = vec![0.0; total];
        for (flat, slot) in row.iter_mut().enumerate() {
            let mut rem = flat;
            let mut p = 1.0;
            for (k, out) in self.outputs.iter().enumerate().rev() {
                let sym = rem % sizes[k];
                rem /= sizes[k];
                p *= out.prob(x, sym);
                if p == 0.0 {
                    break;
                }
            }
            *slot = p;
        }
        row
    }

    /// Composes the channel with an input distribution whose last axis is X.
    ///
    /// The result ranges over (aux axes.., X, Y, Z_1..Z_K); its marginal on
    /// the input axes recovers `input` exactly.
    pub fn induced_joint(&self, input: &JointPmf) -> Result<JointPmf, ChannelError> {
        let in_axes = input.axes();
        let x_axis = in_axes.last().expect("input pmf has at least one axis");
        if x_axis.size != self.input_size {
            return Err(ChannelError::InputMismatch {
                channel: self.input_size,
                pmf: x_axis.size,
            });
        }
        let sizes: Vec<usize> = self.outputs.iter().map(|o| o.alphabet_size()).collect();
        let out_block: usize = sizes.iter().product();
        let mut axes: Vec<Axis> = in_axes.to_vec();
        for (o, &s) in self.outputs.iter().zip(&sizes) {
            axes.push(Axis::new(o.name.clone(), s));
        }
        let rows: Vec<Vec<f64>> = (0..self.input_size).map(|x| self.conditional_row(x)).collect();
        let mut mass = Vec::with_capacity(input.mass().len() * out_block);
        for (flat, &w) in input.mass().iter().enumerate() {
            let x = flat % self.input_size;
            for &q in &rows[x] {
                mass.push(w * q);
            }
        }
        JointPmf::new(axes, mass).map_err(|e| ChannelError::Parse {
            line: 0,
            msg: format!("induced joint failed validation: {e}"),
        })
    }
}

/// Parses the channel-spec text format.
pub fn parse_channel(text: &str) -> Result<ChannelSpec, ChannelError> {
    let mut input_size: Option<usize> = None;
    let mut outputs: Vec<ChannelOutput> = Vec::new();
    let mut joint: Option<Vec<Vec<f64>>> = None;

    // (line_no, tokens) with comments stripped and blanks skipped.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("");
            (i + 1, l.split_whitespace().map(str::to_string).collect::<Vec<_>>())
        })
        .filter(|(_, toks)| !toks.is_empty())
        .collect::<Vec<_>>()
        .into_iter()
        .peekable();

    let err = |line: usize, msg: &str| ChannelError::Parse { line, msg: msg.to_string() };

    while let Some((line, toks)) = lines.next() {
        match toks[0].as_str() {
            "alphabet" => {
                if toks.len() != 3 || toks[1] != "X" {
                    return Err(err(line, "expected: alphabet X <n>"));
                }
                let n: usize =
                    toks[2].parse().map_err(|_| err(line, "alphabet size must be an integer"))?;
                if n == 0 {
                    return Err(err(line, "alphabet size must be positive"));
                }
                input_size = Some(n);
            }
            "output" => {
                let n = input_size.ok_or_else(|| err(line, "alphabet X must come first"))?;
                if toks.len() < 3 {
                    return Err(err(line, "expected: output <name> det|stoch ..."));
                }
                let name = toks[1].clone();
                if outputs.iter().any(|o| o.name == name) {
                    return Err(err(line, "duplicate output name"));
                }
                match toks[2].as_str() {
                    "det" => {
                        let vals: Result<Vec<usize>, _> =
                            toks[3..].iter().map(|t| t.parse::<usize>()).collect();
                        let vals = vals.map_err(|_| err(line, "det map values must be integers"))?;
                        if vals.len() != n {
                            return Err(err(
                                line,
                                &format!("det map needs {n} values, got {}", vals.len()),
                            ));
                        }
                        outputs.push(ChannelOutput { name, map: OutputMap::Det(vals) });
                    }
                    "stoch" => {
                        if toks.len() != 4 {
                            return Err(err(line, "expected: output <name> stoch <m>"));
                        }
                        let m: usize = toks[3]
                            .parse()
                            .map_err(|_| err(line, "output alphabet size must be an integer"))?;
                        if m == 0 {
                            return Err(err(line, "output alphabet size must be positive"));
                        }
                        let mut rows = Vec::with_capacity(n);
                        for _ in 0..n {
                            let (rline, rtoks) = lines
                                .next()
                                .ok_or_else(|| err(line, "missing stochastic rows"))?;
                            let row: Result<Vec<f64>, _> =
                                rtoks.iter().map(|t| t.parse::<f64>()).collect();
                            let row =
                                row.map_err(|_| err(rline, "row entries must be decimals"))?;
                            if row.len() != m {
                                return Err(err(
                                    rline,
                                    &format!("row needs {m} entries, got {}", row.len()),
                                ));
                            }
                            if row.iter().any(|&p| p < 0.0) {
                                return Err(err(rline, "probabilities must be nonnegative"));
                            }
                            let sum: f64 = row.iter().sum();
                            if (sum - 1.0).abs() > ROW_SUM_TOL {
                                return Err(ChannelError::RowSum { line: rline, sum });
                            }
                            rows.push(row);
                        }
                        outputs.push(ChannelOutput { name, map: OutputMap::Stoch(rows) });
                    }
                    other => return Err(err(line, &format!("unknown output kind {other:?}"))),
                }
            }
            "joint" => {
                let n = input_size.ok_or_else(|| err(line, "alphabet X must come first"))?;
                if outputs.is_empty() {
                    return Err(err(line, "declare outputs before the joint block"));
                }
                let width: usize = outputs.iter().map(|o| o.alphabet_size()).product();
                let mut rows = Vec::with_capacity(n);
                for _ in 0..n {
                    let (rline, rtoks) =
                        lines.next().ok_or_else(|| err(line, "missing joint rows"))?;
                    let row: Result<Vec<f64>, _> =
                        rtoks.iter().map(|t| t.parse::<f64>()).collect();
                    let row = row.map_err(|_| err(rline, "row entries must be decimals"))?;
                    if row.len() != width {
                        return Err(err(
                            rline,
                            &format!("joint row needs {width} entries, got {}", row.len()),
                        ));
                    }
                    if row.iter().any(|&p| p < 0.0) {
                        return Err(err(rline, "probabilities must be nonnegative"));
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > ROW_SUM_TOL {
                        return Err(ChannelError::RowSum { line: rline, sum });
                    }
                    rows.push(row);
                }
                joint = Some(rows);
            }
            other => return Err(err(line, &format!("unknown directive {other:?}"))),
        }
    }

    let input_size = input_size.ok_or_else(|| err(0, "missing alphabet declaration"))?;
    if outputs.is_empty() {
        return Err(ChannelError::NoOutputs);
    }
    let spec = ChannelSpec { input_size, outputs, joint };

    // A joint block must marginalize to the declared per-output behavior.
    if spec.joint.is_some() {
        let sizes: Vec<usize> = spec.outputs.iter().map(|o| o.alphabet_size()).collect();
        for x in 0..spec.input_size {
            let row = spec.conditional_row(x);
            for (k, out) in spec.outputs.iter().enumerate() {
                let mut marg = vec![0.0; sizes[k]];
                for (flat, &p) in row.iter().enumerate() {
                    let mut rem = flat;
                    let mut sym = 0;
                    for (j, &s) in sizes.iter().enumerate().rev() {
                        let v = rem % s;
                        rem /= s;
                        if j == k {
                            sym = v;
                        }
                    }
                    marg[sym] += p;
                }
                for (sym, &p) in marg.iter().enumerate() {
                    if (p - out.prob(x, sym)).abs() > 1e-9 {
                        return Err(ChannelError::JointInconsistent {
                            row: x,
                            output: out.name.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(spec)
}
