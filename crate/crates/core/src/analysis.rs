//! Decision procedures built on the proximity-matrix criteria.
//!
//! Eff-containment is decided exactly. Specialization is only ever
//! reported as proven when one of the known sufficient criteria applies;
//! Eff-containment alone never implies it.

use std::ops::ControlFlow;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::diagram::OrderedDiagram;
use crate::enumerate::{child_steps, BudgetExceeded, EnumerationBudget};
use crate::matrix::{transition, IntMatrix, MatrixError, ProximityMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("diagrams have different sizes: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("invalid sigma: {0}")]
    InvalidSigma(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

fn same_size(d1: &OrderedDiagram, d2: &OrderedDiagram) -> Result<(), AnalysisError> {
    if d1.r() != d2.r() {
        return Err(AnalysisError::SizeMismatch {
            left: d1.r(),
            right: d2.r(),
        });
    }
    Ok(())
}

/// `Eff(d2) ⊆ Eff(d)`, i.e. `P2^-1 P` has no negative entry.
pub fn eff_contains(d: &OrderedDiagram, d2: &OrderedDiagram) -> Result<bool, AnalysisError> {
    same_size(d, d2)?;
    Ok(transition(d, d2)?.is_nonnegative())
}

/// A negative entry of `P2^-1 P1`, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NegativeEntry {
    pub row: usize,
    pub col: usize,
    pub value: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NecessaryCheck {
    Pass,
    Refuted(NegativeEntry),
}

/// Necessary condition for `d1 ⤳ d2`: `P2^-1 P1 >= 0`. Reports the first
/// negative entry in row-major order.
pub fn specialization_necessary(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
) -> Result<NecessaryCheck, AnalysisError> {
    same_size(d1, d2)?;
    Ok(match transition(d1, d2)?.first_negative() {
        None => NecessaryCheck::Pass,
        Some((row, col, value)) => NecessaryCheck::Refuted(NegativeEntry {
            row: row + 1,
            col: col + 1,
            value,
        }),
    })
}

/// Why a diagram is known to be prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "criterion", rename_all = "kebab-case")]
pub enum PrimeCriterion {
    NoSatellites,
    AtMostOneSatellite,
    PoliUnibranchedOrdering,
    /// The first `truncation` vertices form a prime diagram and no later
    /// vertex is a satellite.
    SatelliteFreeTail {
        truncation: usize,
        inner: Box<PrimeCriterion>,
    },
    /// No competing diagram found by exhaustive search.
    Exhaustive,
}

impl PrimeCriterion {
    pub fn name(&self) -> &'static str {
        match self {
            PrimeCriterion::NoSatellites => "no-satellites",
            PrimeCriterion::AtMostOneSatellite => "at-most-one-satellite",
            PrimeCriterion::PoliUnibranchedOrdering => "poli-unibranched-ordering",
            PrimeCriterion::SatelliteFreeTail { .. } => "satellite-free-tail",
            PrimeCriterion::Exhaustive => "exhaustive",
        }
    }

    /// Re-checks the criterion against `d`.
    pub fn holds_for(&self, d: &OrderedDiagram, budget: &EnumerationBudget) -> bool {
        match self {
            PrimeCriterion::NoSatellites => d.satellites() == 0,
            PrimeCriterion::AtMostOneSatellite => d.satellites() <= 1,
            PrimeCriterion::PoliUnibranchedOrdering => d.is_poli_unibranched_ordering(),
            PrimeCriterion::SatelliteFreeTail { truncation, inner } => {
                *truncation >= 1
                    && *truncation < d.r()
                    && (truncation + 1..=d.r()).all(|j| d.second(j).is_none())
                    && inner.holds_for(&d.prefix(*truncation), budget)
            }
            PrimeCriterion::Exhaustive => {
                matches!(decide_prime(d, budget), PrimalityVerdict::Prime(_))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimalityVerdict {
    Prime(PrimeCriterion),
    /// A diagram `d2 != d` with `Eff(d2) ⊆ Eff(d)` and `dim d2 >= dim d`.
    NotPrime(OrderedDiagram),
    Unknown(String),
}

impl PrimalityVerdict {
    pub fn is_prime(&self) -> bool {
        matches!(self, PrimalityVerdict::Prime(_))
    }

    pub fn status(&self) -> &'static str {
        match self {
            PrimalityVerdict::Prime(_) => "Prime",
            PrimalityVerdict::NotPrime(_) => "NotPrime",
            PrimalityVerdict::Unknown(_) => "Unknown",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            PrimalityVerdict::Prime(c) => {
                let mut v = json!({"status": "Prime", "witness": c.name()});
                if let PrimeCriterion::SatelliteFreeTail { truncation, inner } = c {
                    v["truncation"] = json!(truncation);
                    v["truncation_witness"] = json!(inner.name());
                }
                v
            }
            PrimalityVerdict::NotPrime(d) => json!({"status": "NotPrime", "witness": d}),
            PrimalityVerdict::Unknown(note) => json!({"status": "Unknown", "witness": note}),
        }
    }
}

impl Serialize for PrimalityVerdict {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Largest truncation size for which the satellite-free tail criterion falls back to an
/// exhaustive primality check.
pub const TAIL_EXHAUSTIVE_MAX: usize = 6;

/// Cheap sufficient conditions for primality, tried in order. Never
/// returns `NotPrime`.
pub fn prime_sufficient(d: &OrderedDiagram) -> PrimalityVerdict {
    if let Some(c) = direct_criterion(d) {
        return PrimalityVerdict::Prime(c);
    }
    // satellite-free tail: the prefix ending at the last satellite must be prime
    let last_sat = (1..=d.r())
        .rev()
        .find(|&j| d.second(j).is_some())
        .expect("has satellites");
    if last_sat < d.r() {
        let head = d.prefix(last_sat);
        let inner = direct_criterion(&head).or_else(|| {
            if last_sat <= TAIL_EXHAUSTIVE_MAX {
                match decide_prime(&head, &EnumerationBudget::with_max_r(TAIL_EXHAUSTIVE_MAX)) {
                    PrimalityVerdict::Prime(c) => Some(c),
                    _ => None,
                }
            } else {
                None
            }
        });
        if let Some(inner) = inner {
            return PrimalityVerdict::Prime(PrimeCriterion::SatelliteFreeTail {
                truncation: last_sat,
                inner: Box::new(inner),
            });
        }
    }
    PrimalityVerdict::Unknown("no sufficient criterion applies".into())
}

fn direct_criterion(d: &OrderedDiagram) -> Option<PrimeCriterion> {
    if d.satellites() == 0 {
        Some(PrimeCriterion::NoSatellites)
    } else if d.satellites() <= 1 {
        Some(PrimeCriterion::AtMostOneSatellite)
    } else if d.is_poli_unibranched_ordering() {
        Some(PrimeCriterion::PoliUnibranchedOrdering)
    } else {
        None
    }
}

/// Visits, in enumeration order, every diagram `d2` with the same size as
/// `d` and `Eff(d2) ⊆ Eff(d)`.
///
/// Since `P2^-1 P` is lower triangular, its leading blocks are the
/// transition matrices of the truncations, so the search prunes any prefix
/// whose newest row already has a negative entry. `min_dim` additionally
/// prunes prefixes that cannot reach that dimension.
pub fn for_each_contained<F>(
    d: &OrderedDiagram,
    min_dim: usize,
    budget: &EnumerationBudget,
    mut visit: F,
) -> Result<Option<OrderedDiagram>, AnalysisError>
where
    F: FnMut(&OrderedDiagram) -> ControlFlow<()>,
{
    budget.check_r(d.r())?;
    let r = d.r();
    let p = ProximityMatrix::of(d);
    // best possible dimension gain from vertices k+1..r of any contained diagram
    let mut tail_gain = vec![0usize; r + 1];
    for k in (0..r).rev() {
        tail_gain[k] = tail_gain[k + 1] + if d.pred(k + 1).is_none() { 2 } else { 1 };
    }
    let mut search = Search {
        r,
        p: p.as_matrix(),
        inv_rows: Vec::with_capacity(r),
        tail_gain,
        min_dim,
        meter: budget.meter(),
    };
    let mut current = OrderedDiagram::single_root();
    search.inv_rows.push(unit_row(r, 0));
    search.dfs(&mut current, 2, &mut visit)
}

fn unit_row(r: usize, k: usize) -> Vec<i64> {
    let mut row = vec![0; r];
    row[k] = 1;
    row
}

struct Search<'a> {
    r: usize,
    p: &'a IntMatrix,
    /// rows of the inverse proximity matrix of the current prefix
    inv_rows: Vec<Vec<i64>>,
    tail_gain: Vec<usize>,
    min_dim: usize,
    meter: crate::enumerate::Meter,
}

impl Search<'_> {
    fn dfs<F>(
        &mut self,
        current: &mut OrderedDiagram,
        dim_so_far: usize,
        visit: &mut F,
    ) -> Result<Option<OrderedDiagram>, AnalysisError>
    where
        F: FnMut(&OrderedDiagram) -> ControlFlow<()>,
    {
        self.meter.tick()?;
        let k = current.r();
        if dim_so_far + self.tail_gain[k] < self.min_dim {
            return Ok(None);
        }
        if k == self.r {
            return Ok(match visit(current) {
                ControlFlow::Break(()) => Some(current.clone()),
                ControlFlow::Continue(()) => None,
            });
        }
        for (pred, second) in child_steps(current) {
            // row k of the inverse: X[k] = e_k + X[pred] + X[second]
            let mut row = unit_row(self.r, k);
            for t in pred.into_iter().chain(second) {
                for (a, b) in row.iter_mut().zip(&self.inv_rows[t - 1]) {
                    *a = a.checked_add(*b).ok_or(MatrixError::ArithmeticOverflow)?;
                }
            }
            if !self.row_nonnegative(&row, k)? {
                continue;
            }
            let gain = match (pred, second) {
                (None, _) => 2,
                (Some(_), None) => 1,
                _ => 0,
            };
            self.inv_rows.push(row);
            current.push_unchecked(pred, second);
            let found = self.dfs(current, dim_so_far + gain, visit)?;
            current.pop_unchecked();
            self.inv_rows.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    /// Row `k` (0-based) of `X P` has no negative entry in columns `0..=k`.
    fn row_nonnegative(&self, x_row: &[i64], k: usize) -> Result<bool, AnalysisError> {
        for c in 0..=k {
            let mut acc = 0i64;
            for (l, &a) in x_row.iter().enumerate().take(k + 1).skip(c) {
                if a != 0 {
                    let prod = a
                        .checked_mul(self.p.get(l, c))
                        .ok_or(MatrixError::ArithmeticOverflow)?;
                    acc = acc
                        .checked_add(prod)
                        .ok_or(MatrixError::ArithmeticOverflow)?;
                }
            }
            if acc < 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// All diagrams `d2` with `Eff(d2) ⊆ Eff(d)`, `d` itself included.
pub fn contained_diagrams(
    d: &OrderedDiagram,
    budget: &EnumerationBudget,
) -> Result<Vec<OrderedDiagram>, AnalysisError> {
    let mut out = Vec::new();
    for_each_contained(d, 0, budget, |d2| {
        out.push(d2.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Exact primality: `d` is prime iff every other diagram `d2` with
/// `P2^-1 P >= 0` has smaller dimension. The witness reported for a
/// non-prime diagram is the first such `d2` in enumeration order.
pub fn decide_prime(d: &OrderedDiagram, budget: &EnumerationBudget) -> PrimalityVerdict {
    let dim = d.dim();
    let found = for_each_contained(d, dim, budget, |d2| {
        if d2 != d && d2.dim() >= dim {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    match found {
        Ok(Some(w)) => PrimalityVerdict::NotPrime(w),
        Ok(None) => PrimalityVerdict::Prime(PrimeCriterion::Exhaustive),
        Err(e) => PrimalityVerdict::Unknown(format!("search incomplete: {e}")),
    }
}

/// Sufficient criteria first, exhaustive search as fallback.
pub fn primality(d: &OrderedDiagram, budget: &EnumerationBudget) -> PrimalityVerdict {
    match prime_sufficient(d) {
        v @ PrimalityVerdict::Prime(_) => v,
        _ => decide_prime(d, budget),
    }
}

/// One justified step in a specialization proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Derivation {
    /// `d1 = d2`.
    Reflexive,
    /// `d1` is prime and `P2^-1 P1 >= 0`.
    PrimeSource { primality: PrimeCriterion },
    /// Truncation-and-extension criterion with a map `sigma` on the first
    /// `s` vertices, requiring irreducible virtual divisors after `s`.
    Esten {
        s: usize,
        sigma: Vec<usize>,
        truncation: Box<Derivation>,
    },
    /// Variant of [`Derivation::Esten`] for pairs with no satellite after `s`.
    Esten2 {
        s: usize,
        sigma: Vec<usize>,
        truncation: Box<Derivation>,
    },
    /// `d1` is `d` plus an isolated root at position `s`, and `d2` is the
    /// extension of `d` at the vertex following it.
    Extension { s: usize },
}

impl Derivation {
    /// Re-checks every step against the pair.
    pub fn replay(
        &self,
        d1: &OrderedDiagram,
        d2: &OrderedDiagram,
        config: &SpecializationConfig,
    ) -> bool {
        if d1.r() != d2.r() {
            return false;
        }
        match self {
            Derivation::Reflexive => d1 == d2,
            Derivation::PrimeSource { primality } => {
                primality.holds_for(d1, &config.budget) && eff_contains(d1, d2).unwrap_or(false)
            }
            Derivation::Esten {
                s,
                sigma,
                truncation,
            } => {
                validate_sigma(d1.r(), *s, sigma).is_ok()
                    && esten_local(d1, d2, *s, sigma).ok() == Some(None)
                    && truncation.replay(&d1.prefix(*s), &d2.prefix(*s), config)
            }
            Derivation::Esten2 {
                s,
                sigma,
                truncation,
            } => {
                validate_sigma(d1.r(), *s, sigma).is_ok()
                    && esten2_local(d1, d2, *s, sigma).ok() == Some(None)
                    && truncation.replay(&d1.prefix(*s), &d2.prefix(*s), config)
            }
            Derivation::Extension { s } => is_extension_pair_at(d1, d2, *s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecializationVerdict {
    Proven(Derivation),
    Refuted(NegativeEntry),
    Unknown(String),
}

impl SpecializationVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            SpecializationVerdict::Proven(_) => "Proven",
            SpecializationVerdict::Refuted(_) => "Refuted",
            SpecializationVerdict::Unknown(_) => "Unknown",
        }
    }

    pub fn is_proven(&self) -> bool {
        matches!(self, SpecializationVerdict::Proven(_))
    }

    pub fn to_json(&self) -> Value {
        match self {
            SpecializationVerdict::Proven(d) => json!({"status": "Proven", "derivation": d}),
            SpecializationVerdict::Refuted(e) => {
                json!({"status": "Refuted", "entry": [e.row, e.col], "value": e.value})
            }
            SpecializationVerdict::Unknown(note) => json!({"status": "Unknown", "reason": note}),
        }
    }
}

impl Serialize for SpecializationVerdict {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpecializationConfig {
    /// Budget for exhaustive primality checks of the source diagram.
    pub budget: EnumerationBudget,
    /// Maximum nesting of truncation sub-proofs.
    pub max_depth: usize,
}

impl Default for SpecializationConfig {
    fn default() -> Self {
        SpecializationConfig {
            budget: EnumerationBudget::default(),
            max_depth: 8,
        }
    }
}

/// Outcome of checking one of the truncation criteria.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionCheck {
    Pass(Derivation),
    Fail { condition: u8 },
}

fn validate_sigma(r: usize, s: usize, sigma: &[usize]) -> Result<(), AnalysisError> {
    if s == 0 || s > r {
        return Err(AnalysisError::InvalidSigma(format!(
            "s = {s} outside 1..={r}"
        )));
    }
    if sigma.len() != r {
        return Err(AnalysisError::InvalidSigma(format!(
            "sigma has {} entries, expected {r}",
            sigma.len()
        )));
    }
    for (i, &v) in sigma.iter().enumerate().map(|(k, v)| (k + 1, v)) {
        if v == 0 || v > r {
            return Err(AnalysisError::InvalidSigma(format!(
                "sigma({i}) = {v} outside 1..={r}"
            )));
        }
        if i > s && v != i {
            return Err(AnalysisError::InvalidSigma(format!(
                "sigma({i}) = {v} but must fix indices after s = {s}"
            )));
        }
    }
    Ok(())
}

/// Whether `sigma(i) = c` is compatible with the proximities after `s`:
/// for every `j > s`, `j` is proximate to `i` in `d1` iff `j` is proximate
/// to `c` in `d2`.
fn proximity_compatible(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    s: usize,
    i: usize,
    c: usize,
) -> bool {
    (s + 1..=d1.r()).all(|j| d1.is_proximate(j, i) == d2.is_proximate(j, c))
}

/// Conditions 2-4 of the satellite-aware criterion; `Some(n)` names the
/// first failing one.
fn esten_local(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    s: usize,
    sigma: &[usize],
) -> Result<Option<u8>, AnalysisError> {
    let r = d1.r();
    let mut t = transition(d1, d2)?;
    for (i, &c) in sigma.iter().enumerate() {
        t.set(c - 1, i, t.get(c - 1, i) - 1);
    }
    if !t.is_nonnegative() {
        return Ok(Some(2));
    }
    for i in s + 1..=r {
        if let Some(k) = d1.second(i) {
            let j = d1.pred(i).expect("satellites have a predecessor");
            if j <= s || k <= s {
                return Ok(Some(3));
            }
        }
    }
    if !(1..=r).all(|i| proximity_compatible(d1, d2, s, i, sigma[i - 1])) {
        return Ok(Some(4));
    }
    Ok(None)
}

/// Conditions 2-4 of the satellite-free criterion.
fn esten2_local(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    s: usize,
    sigma: &[usize],
) -> Result<Option<u8>, AnalysisError> {
    let t = transition(d1, d2)?;
    if !t.is_nonnegative() {
        return Ok(Some(2));
    }
    // column i of the leading s x s block minus e_sigma(i) must stay >= 0
    if (1..=s).any(|i| sigma[i - 1] > s || t.get(sigma[i - 1] - 1, i - 1) < 1) {
        return Ok(Some(3));
    }
    if (s + 1..=d1.r()).any(|i| d1.second(i).is_some()) {
        return Ok(Some(4));
    }
    Ok(None)
}

fn truncation_condition(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    s: usize,
    config: &SpecializationConfig,
    depth: usize,
) -> Result<Option<Derivation>, AnalysisError> {
    if depth >= config.max_depth {
        return Ok(None);
    }
    Ok(
        match prove_at_depth(&d1.prefix(s), &d2.prefix(s), config, depth + 1)? {
            SpecializationVerdict::Proven(proof) => Some(proof),
            _ => None,
        },
    )
}

/// Checks the satellite-aware truncation criterion for `d1 ⤳ d2`:
/// 1. `d1^s ⤳ d2^s` (proved recursively),
/// 2. `P2^-1 P1 - Σ >= 0`,
/// 3. satellites after `s` are proximate only to vertices after `s`,
/// 4. for `j > s`, `j` is proximate to `i` in `d1` iff to `sigma(i)` in `d2`.
///
/// Conditions 2-4 are checked before the recursive condition 1.
pub fn check_esten(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    s: usize,
    sigma: &[usize],
    config: &SpecializationConfig,
) -> Result<ConditionCheck, AnalysisError> {
    check_esten_at(d1, d2, s, sigma, config, 0)
}

fn check_esten_at(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    s: usize,
    sigma: &[usize],
    config: &SpecializationConfig,
    depth: usize,
) -> Result<ConditionCheck, AnalysisError> {
    same_size(d1, d2)?;
    validate_sigma(d1.r(), s, sigma)?;
    if let Some(condition) = esten_local(d1, d2, s, sigma)? {
        return Ok(ConditionCheck::Fail { condition });
    }
    Ok(match truncation_condition(d1, d2, s, config, depth)? {
        Some(proof) => ConditionCheck::Pass(Derivation::Esten {
            s,
            sigma: sigma.to_vec(),
            truncation: Box::new(proof),
        }),
        None => ConditionCheck::Fail { condition: 1 },
    })
}

/// Checks the satellite-free truncation criterion for `d1 ⤳ d2`:
/// 1. `d1^s ⤳ d2^s`,
/// 2. `Eff(d2) ⊆ Eff(d1)`,
/// 3. column `i <= s` of `(P2^s)^-1 P1^s` minus `e_sigma(i)` is `>= 0`,
/// 4. no satellite after `s` in `d1`.
pub fn check_esten2(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    s: usize,
    sigma: &[usize],
    config: &SpecializationConfig,
) -> Result<ConditionCheck, AnalysisError> {
    check_esten2_at(d1, d2, s, sigma, config, 0)
}

fn check_esten2_at(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    s: usize,
    sigma: &[usize],
    config: &SpecializationConfig,
    depth: usize,
) -> Result<ConditionCheck, AnalysisError> {
    same_size(d1, d2)?;
    validate_sigma(d1.r(), s, sigma)?;
    if let Some(condition) = esten2_local(d1, d2, s, sigma)? {
        return Ok(ConditionCheck::Fail { condition });
    }
    Ok(match truncation_condition(d1, d2, s, config, depth)? {
        Some(proof) => ConditionCheck::Pass(Derivation::Esten2 {
            s,
            sigma: sigma.to_vec(),
            truncation: Box::new(proof),
        }),
        None => ConditionCheck::Fail { condition: 1 },
    })
}

/// Smallest sigma passing the local conditions of the satellite-aware
/// criterion at `s`. The conditions constrain each `sigma(i)` separately,
/// so picking the least admissible value per index is complete.
pub fn find_esten_sigma(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    s: usize,
) -> Result<Option<Vec<usize>>, AnalysisError> {
    same_size(d1, d2)?;
    let r = d1.r();
    let t = transition(d1, d2)?;
    if !t.is_nonnegative() {
        return Ok(None);
    }
    let mut sigma = Vec::with_capacity(r);
    for i in 1..=r {
        let pick = if i > s {
            proximity_compatible(d1, d2, s, i, i).then_some(i)
        } else {
            (1..=s).find(|&c| t.get(c - 1, i - 1) >= 1 && proximity_compatible(d1, d2, s, i, c))
        };
        match pick {
            Some(c) => sigma.push(c),
            None => return Ok(None),
        }
    }
    Ok(esten_local(d1, d2, s, &sigma)?.is_none().then_some(sigma))
}

/// Smallest sigma passing the local conditions of the satellite-free
/// criterion at `s`.
pub fn find_esten2_sigma(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    s: usize,
) -> Result<Option<Vec<usize>>, AnalysisError> {
    same_size(d1, d2)?;
    let r = d1.r();
    let t = transition(d1, d2)?;
    if !t.is_nonnegative() {
        return Ok(None);
    }
    let mut sigma: Vec<usize> = (1..=r).collect();
    for i in 1..=s {
        match (1..=s).find(|&c| t.get(c - 1, i - 1) >= 1) {
            Some(c) => sigma[i - 1] = c,
            None => return Ok(None),
        }
    }
    Ok(esten2_local(d1, d2, s, &sigma)?.is_none().then_some(sigma))
}

/// Whether `d1` is `d` with an isolated root at position `s` and `d2` is
/// the extension of `d` at its vertex `s`, with every vertex after it
/// infinitely near to it.
pub fn is_extension_pair_at(d1: &OrderedDiagram, d2: &OrderedDiagram, s: usize) -> bool {
    if d1.r() != d2.r() || s == 0 || s >= d1.r() {
        return false;
    }
    let Some(base) = d1.remove_isolated_root(s) else {
        return false;
    };
    base.is_extensible_at(s)
        && (s + 1..=base.r()).all(|v| base.is_infinitely_near(v, s))
        && base.extend(s).as_ref() == Ok(d2)
        && base.bullet_before(s).as_ref() == Ok(d1)
}

/// Tries, in order: reflexivity, refutation by the necessary condition,
/// primality of `d1`, the two truncation criteria for every `s < r`
/// (largest first), and recognition of an extension pair.
pub fn prove_specialization(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    config: &SpecializationConfig,
) -> Result<SpecializationVerdict, AnalysisError> {
    prove_at_depth(d1, d2, config, 0)
}

fn prove_at_depth(
    d1: &OrderedDiagram,
    d2: &OrderedDiagram,
    config: &SpecializationConfig,
    depth: usize,
) -> Result<SpecializationVerdict, AnalysisError> {
    same_size(d1, d2)?;
    if d1 == d2 {
        return Ok(SpecializationVerdict::Proven(Derivation::Reflexive));
    }
    if let NecessaryCheck::Refuted(entry) = specialization_necessary(d1, d2)? {
        return Ok(SpecializationVerdict::Refuted(entry));
    }
    let primality = match prime_sufficient(d1) {
        v @ PrimalityVerdict::Prime(_) => v,
        _ if d1.r() <= config.budget.max_r => decide_prime(d1, &config.budget),
        v => v,
    };
    if let PrimalityVerdict::Prime(c) = primality {
        return Ok(SpecializationVerdict::Proven(Derivation::PrimeSource {
            primality: c,
        }));
    }
    let r = d1.r();
    if depth < config.max_depth {
        for s in (1..r).rev() {
            if let Some(sigma) = find_esten_sigma(d1, d2, s)? {
                if let ConditionCheck::Pass(proof) =
                    check_esten_at(d1, d2, s, &sigma, config, depth)?
                {
                    return Ok(SpecializationVerdict::Proven(proof));
                }
            }
            if let Some(sigma) = find_esten2_sigma(d1, d2, s)? {
                if let ConditionCheck::Pass(proof) =
                    check_esten2_at(d1, d2, s, &sigma, config, depth)?
                {
                    return Ok(SpecializationVerdict::Proven(proof));
                }
            }
        }
    }
    if let Some(s) = (1..r).find(|&s| is_extension_pair_at(d1, d2, s)) {
        return Ok(SpecializationVerdict::Proven(Derivation::Extension { s }));
    }
    Ok(SpecializationVerdict::Unknown(match primality {
        PrimalityVerdict::NotPrime(_) => {
            "source diagram is not prime and no sufficient criterion applies".into()
        }
        _ => "primality of the source is unknown and no sufficient criterion applies".into(),
    }))
}
