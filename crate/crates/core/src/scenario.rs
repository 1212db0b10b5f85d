//! Scenarios, behaviors and Bell-expression coefficient tensors.
//!
//! Tensors are stored flat in mixed radix over `(o_1..o_N, i_1..i_N)`: all
//! outcomes first, then all inputs, last index fastest. For two parties the
//! entry `V_{abxy}` therefore lives at `((a*n_B + b)*m_A + x)*m_B + y`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::odometer::advance;
use crate::{Error, Result};

/// Tolerance for normalization and no-signaling checks on behaviors.
pub const BEHAVIOR_TOL: f64 = 1e-12;

/// Upper limit on the number of deterministic strategies we enumerate.
pub const MAX_STRATEGIES: u64 = 1_000_000;

/// Two strategies whose values differ by less than this are reported as tied.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scenario {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl Scenario {
    pub fn new(inputs: Vec<usize>, outputs: Vec<usize>) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::InvalidScenario(format!(
                "{} input counts but {} output counts",
                inputs.len(),
                outputs.len()
            )));
        }
        if !(2..=3).contains(&inputs.len()) {
            return Err(Error::InvalidScenario(format!(
                "{} parties; only 2 or 3 are supported",
                inputs.len()
            )));
        }
        if inputs.iter().chain(outputs.iter()).any(|&c| c == 0) {
            return Err(Error::InvalidScenario(
                "all counts must be at least 1".into(),
            ));
        }
        Ok(Scenario { inputs, outputs })
    }

    /// The bipartite `(m_A, m_B, n_A, n_B)` scenario.
    pub fn bipartite(m_a: usize, m_b: usize, n_a: usize, n_b: usize) -> Result<Self> {
        Self::new(vec![m_a, m_b], vec![n_a, n_b])
    }

    pub fn tripartite(inputs: [usize; 3], outputs: [usize; 3]) -> Result<Self> {
        Self::new(inputs.to_vec(), outputs.to_vec())
    }

    /// The (2,2,2,2) scenario.
    pub fn chsh() -> Self {
        Scenario {
            inputs: vec![2, 2],
            outputs: vec![2, 2],
        }
    }

    pub fn parties(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn is_2222(&self) -> bool {
        self.inputs == [2, 2] && self.outputs == [2, 2]
    }

    /// Number of tensor entries.
    pub fn len(&self) -> usize {
        self.inputs.iter().product::<usize>() * self.outputs.iter().product::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of the entry for the given outcome and input tuples.
    pub fn index(&self, outs: &[usize], ins: &[usize]) -> usize {
        debug_assert_eq!(outs.len(), self.parties());
        debug_assert_eq!(ins.len(), self.parties());
        let mut idx = 0;
        for (o, n) in outs.iter().zip(&self.outputs) {
            debug_assert!(o < n);
            idx = idx * n + o;
        }
        for (i, m) in ins.iter().zip(&self.inputs) {
            debug_assert!(i < m);
            idx = idx * m + i;
        }
        idx
    }

    /// Number of deterministic local strategies, `Π_p n_p^{m_p}`.
    pub fn strategy_count(&self) -> u128 {
        self.inputs
            .iter()
            .zip(&self.outputs)
            .fold(1u128, |acc, (&m, &n)| {
                acc.saturating_mul((n as u128).saturating_pow(m as u32))
            })
    }

    pub(crate) fn ensure_same(&self, other: &Scenario) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ScenarioMismatch {
                left: format!("{self}"),
                right: format!("{other}"),
            })
        }
    }

    /// Calls `f(outs, ins)` for every tensor entry in storage order.
    pub fn for_each_entry(&self, mut f: impl FnMut(&[usize], &[usize])) {
        let n = self.parties();
        let mut radix = self.outputs.clone();
        radix.extend_from_slice(&self.inputs);
        let mut digits = vec![0usize; 2 * n];
        loop {
            f(&digits[..n], &digits[n..]);
            if !advance(&mut digits, &radix) {
                break;
            }
        }
    }

    /// Calls `f(ins)` for every input tuple.
    pub fn for_each_setting(&self, mut f: impl FnMut(&[usize])) {
        let mut digits = vec![0usize; self.parties()];
        loop {
            f(&digits);
            if !advance(&mut digits, &self.inputs) {
                break;
            }
        }
    }

    /// Calls `f(outs)` for every outcome tuple.
    pub fn for_each_outcome(&self, mut f: impl FnMut(&[usize])) {
        let mut digits = vec![0usize; self.parties()];
        loop {
            f(&digits);
            if !advance(&mut digits, &self.outputs) {
                break;
            }
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(|c| format!("{c}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        if self.parties() == 2 {
            write!(f, "({},{})", join(&self.inputs), join(&self.outputs))
        } else {
            write!(f, "({};{})", join(&self.inputs), join(&self.outputs))
        }
    }
}

/// A conditional distribution `P(outs | ins)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    probs: Vec<f64>,
}

impl Behavior {
    pub fn new(scenario: Scenario, probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(scenario, probs, BEHAVIOR_TOL)
    }

    pub fn with_tolerance(scenario: Scenario, probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.len() != scenario.len() {
            return Err(Error::ShapeMismatch {
                expected: scenario.len(),
                found: probs.len(),
            });
        }
        let b = Behavior { scenario, probs };
        b.check(tol)?;
        Ok(b)
    }

    pub fn from_fn(
        scenario: Scenario,
        mut f: impl FnMut(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let mut probs = Vec::with_capacity(scenario.len());
        scenario.for_each_entry(|o, i| probs.push(f(o, i)));
        Self::new(scenario, probs)
    }

    pub(crate) fn new_unchecked(scenario: Scenario, probs: Vec<f64>) -> Self {
        Behavior { scenario, probs }
    }

    /// Every outcome tuple equally likely for every setting.
    pub fn uniform(scenario: Scenario) -> Self {
        let p = 1.0 / scenario.outputs().iter().product::<usize>() as f64;
        let probs = vec![p; scenario.len()];
        Behavior { scenario, probs }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, outs: &[usize], ins: &[usize]) -> f64 {
        self.probs[self.scenario.index(outs, ins)]
    }

    /// Convex mixture `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Behavior, w: f64) -> Result<Behavior> {
        self.scenario.ensure_same(&other.scenario)?;
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight {w} outside [0,1]"
            )));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| w * a + (1.0 - w) * b)
            .collect();
        Ok(Behavior {
            scenario: self.scenario.clone(),
            probs,
        })
    }

    /// Marginal of one party, read off at all other inputs set to zero.
    pub fn party_marginal(&self, party: usize, outcome: usize, input: usize) -> f64 {
        let s = &self.scenario;
        let mut ins = vec![0usize; s.parties()];
        ins[party] = input;
        let mut total = 0.0;
        s.for_each_outcome(|outs| {
            if outs[party] == outcome {
                total += self.prob(outs, &ins);
            }
        });
        total
    }

    /// Range, normalization and no-signaling checks.
    pub fn check(&self, tol: f64) -> Result<()> {
        let s = &self.scenario;
        if let Some(p) = self
            .probs
            .iter()
            .find(|p| !p.is_finite() || **p < -tol || **p > 1.0 + tol)
        {
            return Err(Error::InvalidBehavior(format!(
                "probability {p} outside [0,1]"
            )));
        }
        let mut err = None;
        s.for_each_setting(|ins| {
            if err.is_some() {
                return;
            }
            let mut total = 0.0;
            s.for_each_outcome(|outs| total += self.prob(outs, ins));
            if (total - 1.0).abs() > tol {
                err = Some(Error::InvalidBehavior(format!(
                    "probabilities for setting {ins:?} sum to {total}"
                )));
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        for party in 0..s.parties() {
            if let Some(e) = self.signaling_violation(party, tol) {
                return Err(e);
            }
        }
        Ok(())
    }

    // Marginal of everybody except `party` must not depend on `party`'s input.
    fn signaling_violation(&self, party: usize, tol: f64) -> Option<Error> {
        let s = &self.scenario;
        let mut found = None;
        s.for_each_setting(|ins| {
            if found.is_some() || ins[party] == 0 {
                return;
            }
            let mut reference = ins.to_vec();
            reference[party] = 0;
            s.for_each_outcome(|outs| {
                if found.is_some() || outs[party] != 0 {
                    return;
                }
                let mut o = outs.to_vec();
                let (mut here, mut there) = (0.0, 0.0);
                for op in 0..s.outputs()[party] {
                    o[party] = op;
                    here += self.prob(&o, ins);
                    there += self.prob(&o, &reference);
                }
                if (here - there).abs() > tol {
                    found = Some(Error::InvalidBehavior(format!(
                        "party {party} signals: marginal {here} at inputs {ins:?} vs {there} at {reference:?}"
                    )));
                }
            });
        });
        found
    }
}

/// A coefficient tensor `V` defining the linear functional `Σ V·P`.
///
/// Families with integer tables keep an exact mirror so that local bounds and
/// constancy checks are decided without float ties.
#[derive(Clone, Debug, PartialEq)]
pub struct BellExpression {
    scenario: Scenario,
    coeffs: Vec<f64>,
    exact: Option<Vec<i64>>,
    label: String,
}

impl BellExpression {
    pub fn new(scenario: Scenario, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != scenario.len() {
            return Err(Error::ShapeMismatch {
                expected: scenario.len(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(BellExpression {
            scenario,
            coeffs,
            exact: None,
            label: String::new(),
        })
    }

    pub fn from_integers(scenario: Scenario, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != scenario.len() {
            return Err(Error::ShapeMismatch {
                expected: scenario.len(),
                found: coeffs.len(),
            });
        }
        let floats = coeffs.iter().map(|&c| c as f64).collect();
        Ok(BellExpression {
            scenario,
            coeffs: floats,
            exact: Some(coeffs),
            label: String::new(),
        })
    }

    pub fn zeros(scenario: Scenario) -> Self {
        let n = scenario.len();
        BellExpression {
            scenario,
            coeffs: vec![0.0; n],
            exact: Some(vec![0; n]),
            label: String::new(),
        }
    }

    pub fn from_fn(
        scenario: Scenario,
        mut f: impl FnMut(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(scenario.len());
        scenario.for_each_entry(|o, i| coeffs.push(f(o, i)));
        Self::new(scenario, coeffs)
    }

    pub fn from_fn_int(scenario: Scenario, mut f: impl FnMut(&[usize], &[usize]) -> i64) -> Self {
        let mut coeffs = Vec::with_capacity(scenario.len());
        scenario.for_each_entry(|o, i| coeffs.push(f(o, i)));
        let floats = coeffs.iter().map(|&c| c as f64).collect();
        BellExpression {
            scenario,
            coeffs: floats,
            exact: Some(coeffs),
            label: String::new(),
        }
    }

    /// Builds a bipartite expression from its block table: row `x·n_A + a`,
    /// column `y·n_B + b`.
    pub fn from_table_rows(scenario: Scenario, rows: &[&[f64]]) -> Result<Self> {
        let (n_rows, n_cols) = table_shape(&scenario)?;
        check_rows(rows.iter().map(|r| r.len()), n_rows, n_cols)?;
        let mut e = BellExpression::zeros(scenario);
        e.exact = None;
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let idx = e.table_index(r, c);
                e.coeffs[idx] = v;
            }
        }
        if e.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(e)
    }

    pub fn from_int_table_rows(scenario: Scenario, rows: &[&[i64]]) -> Result<Self> {
        let (n_rows, n_cols) = table_shape(&scenario)?;
        check_rows(rows.iter().map(|r| r.len()), n_rows, n_cols)?;
        let mut e = BellExpression::zeros(scenario);
        let mut exact = vec![0i64; e.coeffs.len()];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let idx = e.table_index(r, c);
                e.coeffs[idx] = v as f64;
                exact[idx] = v;
            }
        }
        e.exact = Some(exact);
        Ok(e)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Exact integer mirror, if the table is integral by construction.
    pub fn exact(&self) -> Option<&[i64]> {
        self.exact.as_deref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn coeff(&self, outs: &[usize], ins: &[usize]) -> f64 {
        self.coeffs[self.scenario.index(outs, ins)]
    }

    /// Sets one coefficient; the exact mirror survives only for integral values.
    pub fn set(&mut self, outs: &[usize], ins: &[usize], value: f64) {
        let idx = self.scenario.index(outs, ins);
        self.coeffs[idx] = value;
        match (&mut self.exact, as_exact_int(value)) {
            (Some(ex), Some(v)) => ex[idx] = v,
            (ex, _) => *ex = None,
        }
    }

    fn table_index(&self, row: usize, col: usize) -> usize {
        let n_a = self.scenario.outputs()[0];
        let n_b = self.scenario.outputs()[1];
        let (x, a) = (row / n_a, row % n_a);
        let (y, b) = (col / n_b, col % n_b);
        self.scenario.index(&[a, b], &[x, y])
    }

    /// Entry of the bipartite block table at `(row, col)`.
    pub fn table_entry(&self, row: usize, col: usize) -> f64 {
        self.coeffs[self.table_index(row, col)]
    }

    /// Block-table dimensions `(n_A·m_A, n_B·m_B)` of a bipartite expression.
    pub fn table_shape(&self) -> Result<(usize, usize)> {
        table_shape(&self.scenario)
    }

    pub fn scaled(&self, k: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * k).collect();
        let exact = match (&self.exact, as_exact_int(k)) {
            (Some(ex), Some(ki)) => ex
                .iter()
                .map(|&c| c.checked_mul(ki))
                .collect::<Option<Vec<_>>>(),
            _ => None,
        };
        BellExpression {
            scenario: self.scenario.clone(),
            coeffs,
            exact,
            label: String::new(),
        }
    }

    /// `self + k·other`.
    pub fn add_scaled(&self, other: &BellExpression, k: f64) -> Result<Self> {
        self.scenario.ensure_same(&other.scenario)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + k * b)
            .collect();
        let exact = match (&self.exact, &other.exact, as_exact_int(k)) {
            (Some(x), Some(y), Some(ki)) => x
                .iter()
                .zip(y)
                .map(|(&a, &b)| b.checked_mul(ki).and_then(|kb| a.checked_add(kb)))
                .collect::<Option<Vec<_>>>(),
            _ => None,
        };
        Ok(BellExpression {
            scenario: self.scenario.clone(),
            coeffs,
            exact,
            label: String::new(),
        })
    }

    pub fn add(&self, other: &BellExpression) -> Result<Self> {
        self.add_scaled(other, 1.0)
    }

    pub fn sub(&self, other: &BellExpression) -> Result<Self> {
        self.add_scaled(other, -1.0)
    }

    pub fn max_abs_diff(&self, other: &BellExpression) -> Result<f64> {
        self.scenario.ensure_same(&other.scenario)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

fn as_exact_int(v: f64) -> Option<i64> {
    (v.fract() == 0.0 && v.abs() < 9.0e15).then_some(v as i64)
}

fn table_shape(s: &Scenario) -> Result<(usize, usize)> {
    if s.parties() != 2 {
        return Err(Error::UnsupportedScenario {
            required: "bipartite",
        });
    }
    Ok((
        s.outputs()[0] * s.inputs()[0],
        s.outputs()[1] * s.inputs()[1],
    ))
}

fn check_rows(
    lens: impl ExactSizeIterator<Item = usize>,
    n_rows: usize,
    n_cols: usize,
) -> Result<()> {
    if lens.len() != n_rows {
        return Err(Error::ShapeMismatch {
            expected: n_rows,
            found: lens.len(),
        });
    }
    for len in lens {
        if len != n_cols {
            return Err(Error::ShapeMismatch {
                expected: n_cols,
                found: len,
            });
        }
    }
    Ok(())
}

/// `Σ V·P`.
pub fn evaluate(expr: &BellExpression, p: &Behavior) -> Result<f64> {
    expr.scenario.ensure_same(&p.scenario)?;
    Ok(expr.coeffs.iter().zip(&p.probs).map(|(v, q)| v * q).sum())
}

/// A local deterministic strategy: for each party, a map from input to output.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    assignment: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    pub fn new(scenario: &Scenario, assignment: Vec<Vec<usize>>) -> Result<Self> {
        if assignment.len() != scenario.parties() {
            return Err(Error::ShapeMismatch {
                expected: scenario.parties(),
                found: assignment.len(),
            });
        }
        for (p, outs) in assignment.iter().enumerate() {
            if outs.len() != scenario.inputs()[p] {
                return Err(Error::ShapeMismatch {
                    expected: scenario.inputs()[p],
                    found: outs.len(),
                });
            }
            if outs.iter().any(|&o| o >= scenario.outputs()[p]) {
                return Err(Error::InvalidParameter(format!(
                    "party {p} output out of range"
                )));
            }
        }
        Ok(DeterministicStrategy { assignment })
    }

    pub fn assignment(&self) -> &[Vec<usize>] {
        &self.assignment
    }

    pub fn output(&self, party: usize, input: usize) -> usize {
        self.assignment[party][input]
    }

    fn outs_for(&self, ins: &[usize], outs: &mut [usize]) {
        for (p, o) in outs.iter_mut().enumerate() {
            *o = self.assignment[p][ins[p]];
        }
    }

    pub fn to_behavior(&self, scenario: &Scenario) -> Behavior {
        let mut probs = vec![0.0; scenario.len()];
        let mut outs = vec![0usize; scenario.parties()];
        scenario.for_each_setting(|ins| {
            self.outs_for(ins, &mut outs);
            probs[scenario.index(&outs, ins)] = 1.0;
        });
        Behavior::new_unchecked(scenario.clone(), probs)
    }

    /// Value of `expr` on this strategy without materializing the behavior.
    pub fn value(&self, expr: &BellExpression) -> f64 {
        let s = expr.scenario();
        let mut outs = vec![0usize; s.parties()];
        let mut total = 0.0;
        s.for_each_setting(|ins| {
            self.outs_for(ins, &mut outs);
            total += expr.coeffs[s.index(&outs, ins)];
        });
        total
    }

    fn value_exact(&self, scenario: &Scenario, exact: &[i64]) -> i64 {
        let mut outs = vec![0usize; scenario.parties()];
        let mut total = 0i64;
        scenario.for_each_setting(|ins| {
            self.outs_for(ins, &mut outs);
            total += exact[scenario.index(&outs, ins)];
        });
        total
    }
}

/// Iterator over every deterministic strategy of a scenario, in a fixed order.
pub struct Strategies {
    scenario: Scenario,
    digits: Vec<usize>,
    radix: Vec<usize>,
    done: bool,
}

impl Iterator for Strategies {
    type Item = DeterministicStrategy;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut assignment = Vec::with_capacity(self.scenario.parties());
        let mut at = 0;
        for &m in self.scenario.inputs() {
            assignment.push(self.digits[at..at + m].to_vec());
            at += m;
        }
        self.done = !advance(&mut self.digits, &self.radix);
        Some(DeterministicStrategy { assignment })
    }
}

pub fn strategies(scenario: &Scenario) -> Result<Strategies> {
    let count = scenario.strategy_count();
    if count > MAX_STRATEGIES as u128 {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: MAX_STRATEGIES,
        });
    }
    let mut radix = Vec::new();
    for (&m, &n) in scenario.inputs().iter().zip(scenario.outputs()) {
        radix.extend(core::iter::repeat(n).take(m));
    }
    Ok(Strategies {
        scenario: scenario.clone(),
        digits: vec![0; radix.len()],
        radix,
        done: false,
    })
}

pub fn deterministic_behaviors(scenario: &Scenario) -> Result<Vec<Behavior>> {
    Ok(strategies(scenario)?
        .map(|s| s.to_behavior(scenario))
        .collect())
}

/// Values of `expr` on every deterministic strategy, in enumeration order.
pub fn strategy_values(expr: &BellExpression) -> Result<Vec<f64>> {
    let s = expr.scenario();
    Ok(match expr.exact() {
        Some(ex) => strategies(s)?
            .map(|d| d.value_exact(s, ex) as f64)
            .collect(),
        None => strategies(s)?.map(|d| d.value(expr)).collect(),
    })
}

/// Maximum over local deterministic strategies, with every maximizer.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalBound {
    pub value: f64,
    pub maximizers: Vec<DeterministicStrategy>,
}

pub fn local_bound(expr: &BellExpression) -> Result<LocalBound> {
    let s = expr.scenario();
    if let Some(ex) = expr.exact() {
        let best = strategies(s)?
            .map(|d| d.value_exact(s, ex))
            .max()
            .unwrap_or(0);
        let maximizers = strategies(s)?
            .filter(|d| d.value_exact(s, ex) == best)
            .collect();
        return Ok(LocalBound {
            value: best as f64,
            maximizers,
        });
    }
    let best = strategies(s)?
        .map(|d| d.value(expr))
        .fold(f64::NEG_INFINITY, f64::max);
    let maximizers = strategies(s)?
        .filter(|d| d.value(expr) >= best - TIE_TOL)
        .collect();
    Ok(LocalBound {
        value: best,
        maximizers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::chsh_xor;

    #[test]
    fn rejects_bad_scenarios() {
        assert!(Scenario::new(vec![2], vec![2]).is_err());
        assert!(Scenario::bipartite(2, 0, 2, 2).is_err());
        assert!(Scenario::new(vec![2, 2, 2, 2], vec![2, 2, 2, 2]).is_err());
        assert!(Scenario::new(vec![2, 2], vec![2]).is_err());
    }

    #[test]
    fn index_layout_matches_table() {
        let s = Scenario::bipartite(2, 2, 3, 3).unwrap();
        assert_eq!(s.index(&[0, 0], &[0, 0]), 0);
        assert_eq!(s.index(&[0, 0], &[0, 1]), 1);
        assert_eq!(s.index(&[0, 1], &[0, 0]), 4);
        assert_eq!(s.index(&[2, 2], &[1, 1]), s.len() - 1);
    }

    #[test]
    fn strategy_counts() {
        assert_eq!(
            deterministic_behaviors(&Scenario::chsh()).unwrap().len(),
            16
        );
        assert_eq!(
            deterministic_behaviors(&Scenario::bipartite(2, 2, 3, 3).unwrap())
                .unwrap()
                .len(),
            81
        );
        let tri = Scenario::tripartite([2, 2, 2], [2, 2, 2]).unwrap();
        assert_eq!(deterministic_behaviors(&tri).unwrap().len(), 64);
    }

    #[test]
    fn size_guard() {
        let s = Scenario::bipartite(10, 10, 4, 4).unwrap();
        assert!(matches!(
            local_bound(&BellExpression::zeros(s)),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn deterministic_behaviors_are_valid_exactly() {
        let s = Scenario::tripartite([2, 2, 2], [2, 3, 2]).unwrap();
        for b in deterministic_behaviors(&s).unwrap() {
            b.check(0.0).unwrap();
            assert!(b.probs().iter().all(|&p| p == 0.0 || p == 1.0));
        }
    }

    #[test]
    fn uniform_behavior_chsh_value() {
        let v = evaluate(&chsh_xor(), &Behavior::uniform(Scenario::chsh())).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn chsh_xor_local_bound_ties() {
        let lb = local_bound(&chsh_xor()).unwrap();
        assert_eq!(lb.value, 3.0);
        // Each of the four blocks can be the one that loses.
        assert_eq!(lb.maximizers.len(), 8);
        for m in &lb.maximizers {
            assert_eq!(m.value(&chsh_xor()), 3.0);
        }
    }

    #[test]
    fn float_and_exact_bounds_agree() {
        let e = chsh_xor();
        let float = BellExpression::new(e.scenario().clone(), e.coeffs().to_vec()).unwrap();
        assert_eq!(local_bound(&float).unwrap(), local_bound(&e).unwrap());
    }

    #[test]
    fn evaluate_rejects_mismatch() {
        let p = Behavior::uniform(Scenario::bipartite(2, 2, 3, 3).unwrap());
        assert!(matches!(
            evaluate(&chsh_xor(), &p),
            Err(Error::ScenarioMismatch { .. })
        ));
    }

    #[test]
    fn signaling_behavior_is_rejected() {
        // Bob outputs Alice's input.
        let r = Behavior::from_fn(Scenario::chsh(), |o, i| {
            if o[0] == 0 && o[1] == i[0] {
                1.0
            } else {
                0.0
            }
        });
        assert!(matches!(r, Err(Error::InvalidBehavior(_))));
        let unnormalized = Behavior::new(Scenario::chsh(), vec![0.3; 16]);
        assert!(unnormalized.is_err());
    }

    #[test]
    fn exact_mirror_tracks_integral_ops() {
        let e = chsh_xor();
        assert!(e.scaled(2.0).exact().is_some());
        assert!(e.scaled(0.5).exact().is_none());
        assert!(e.add_scaled(&e, -3.0).unwrap().exact().is_some());
        let mut f = e.clone();
        f.set(&[0, 0], &[0, 0], 0.25);
        assert!(f.exact().is_none());
    }

    #[test]
    fn display() {
        assert_eq!(format!("{}", Scenario::chsh()), "(2,2,2,2)");
        let tri = Scenario::tripartite([2, 2, 2], [2, 2, 2]).unwrap();
        assert_eq!(format!("{tri}"), "(2,2,2;2,2,2)");
    }
}
