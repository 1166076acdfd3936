//! Exhaustive generation of ordered Enriques diagrams.
//!
//! Diagrams on `r` vertices are produced by appending one vertex to each
//! diagram on `r - 1` vertices, in this order: a new root, a free
//! successor of each vertex `1..r`, then every legal satellite (by
//! predecessor, then by second target). Depth-first generation with this
//! child order yields the same sequence as level-by-level generation.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{validate, OrderedDiagram, RawDiagram};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BudgetExceeded {
    #[error("r = {r} exceeds the budget limit {max_r}")]
    TooLarge { r: usize, max_r: usize },
    #[error("more than {max_count} diagrams visited")]
    Count { max_count: u64 },
    #[error("time limit of {0:?} exceeded")]
    Time(Duration),
}

/// Limits on exhaustive operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    pub max_r: usize,
    pub max_count: u64,
    pub time_limit: Option<Duration>,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_r: 8,
            max_count: 50_000_000,
            time_limit: None,
        }
    }
}

impl EnumerationBudget {
    pub fn with_max_r(max_r: usize) -> Self {
        assert!(max_r >= 1);
        EnumerationBudget {
            max_r,
            ..Self::default()
        }
    }

    pub fn check_r(&self, r: usize) -> Result<(), BudgetExceeded> {
        if r > self.max_r {
            Err(BudgetExceeded::TooLarge {
                r,
                max_r: self.max_r,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn meter(&self) -> Meter {
        Meter {
            budget: *self,
            count: 0,
            start: Instant::now(),
        }
    }
}

/// Running count against a budget.
pub(crate) struct Meter {
    budget: EnumerationBudget,
    count: u64,
    start: Instant,
}

impl Meter {
    pub(crate) fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.count += 1;
        if self.count > self.budget.max_count {
            return Err(BudgetExceeded::Count {
                max_count: self.budget.max_count,
            });
        }
        if let Some(limit) = self.budget.time_limit {
            if self.count.is_multiple_of(1024) && self.start.elapsed() > limit {
                return Err(BudgetExceeded::Time(limit));
            }
        }
        Ok(())
    }
}

/// The vertex appended by one generation step: `(pred, second)`.
pub type Step = (Option<usize>, Option<usize>);

/// Legal last vertices for a diagram, in generation order.
pub fn child_steps(d: &OrderedDiagram) -> Vec<Step> {
    let n = d.r();
    let mut steps = Vec::with_capacity(2 * n + 1);
    steps.push((None, None));
    steps.extend((1..=n).map(|j| (Some(j), None)));
    for p in 1..=n {
        let mut targets: Vec<usize> = d.targets(p).collect();
        targets.sort_unstable();
        for k in targets {
            if d.can_append_satellite(p, k) {
                steps.push((Some(p), Some(k)));
            }
        }
    }
    steps
}

/// Depth-first stream over every ordered diagram with `r` vertices.
pub struct OrderedDiagrams {
    r: usize,
    current: OrderedDiagram,
    // pending steps per depth, reversed so `pop` yields generation order
    stack: Vec<Vec<Step>>,
    started: bool,
}

impl OrderedDiagrams {
    pub fn new(r: usize) -> Self {
        Self::from_prefix(OrderedDiagram::single_root(), r)
    }

    /// Every `r`-vertex diagram whose first vertices form `prefix`.
    pub fn from_prefix(prefix: OrderedDiagram, r: usize) -> Self {
        assert!(r >= prefix.r(), "prefix longer than target size");
        OrderedDiagrams {
            r,
            current: prefix,
            stack: Vec::new(),
            started: false,
        }
    }

    fn descend(&mut self) {
        while self.current.r() < self.r {
            let mut steps = child_steps(&self.current);
            steps.reverse();
            let (p, s) = steps.pop().expect("a root can always be appended");
            self.stack.push(steps);
            self.current.push_unchecked(p, s);
        }
    }
}

impl Iterator for OrderedDiagrams {
    type Item = OrderedDiagram;

    fn next(&mut self) -> Option<OrderedDiagram> {
        if !self.started {
            self.started = true;
            self.descend();
            return Some(self.current.clone());
        }
        loop {
            let steps = self.stack.last_mut()?;
            self.current.pop_unchecked();
            if let Some((p, s)) = steps.pop() {
                self.current.push_unchecked(p, s);
                self.descend();
                return Some(self.current.clone());
            }
            self.stack.pop();
        }
    }
}

/// All ordered diagrams with `r` vertices, in generation order.
pub fn enumerate_ordered(
    r: usize,
    budget: &EnumerationBudget,
) -> Result<Vec<OrderedDiagram>, BudgetExceeded> {
    budget.check_r(r)?;
    let mut meter = budget.meter();
    OrderedDiagrams::new(r)
        .map(|d| meter.tick().map(|_| d))
        .collect()
}

/// Same sequence as [`enumerate_ordered`], generated in parallel from the
/// prefixes of length `min(r, 4)` and concatenated in prefix order.
pub fn enumerate_ordered_par(
    r: usize,
    budget: &EnumerationBudget,
) -> Result<Vec<OrderedDiagram>, BudgetExceeded> {
    budget.check_r(r)?;
    let split = r.min(4);
    let prefixes: Vec<OrderedDiagram> = OrderedDiagrams::new(split).collect();
    let max_count = budget.max_count;
    let chunks: Vec<Vec<OrderedDiagram>> = prefixes
        .into_par_iter()
        .map(|p| {
            OrderedDiagrams::from_prefix(p, r)
                .take(max_count as usize + 1)
                .collect()
        })
        .collect();
    let total: u64 = chunks.iter().map(|c| c.len() as u64).sum();
    if total > max_count {
        return Err(BudgetExceeded::Count { max_count });
    }
    Ok(chunks.concat())
}

pub fn count_ordered(r: usize, budget: &EnumerationBudget) -> Result<u64, BudgetExceeded> {
    budget.check_r(r)?;
    let split = r.min(4);
    let prefixes: Vec<OrderedDiagram> = OrderedDiagrams::new(split).collect();
    let total: u64 = prefixes
        .into_par_iter()
        .map(|p| OrderedDiagrams::from_prefix(p, r).count() as u64)
        .sum();
    if total > budget.max_count {
        return Err(BudgetExceeded::Count {
            max_count: budget.max_count,
        });
    }
    Ok(total)
}

/// Brute force over every `(pred, second)` assignment with targets before
/// the vertex, filtered by [`validate`]. Independent of the generator
/// above; meant for small `r`.
pub fn oracle_enumerate(
    r: usize,
    budget: &EnumerationBudget,
) -> Result<Vec<OrderedDiagram>, BudgetExceeded> {
    budget.check_r(r)?;
    let mut meter = budget.meter();
    let mut out = Vec::new();
    // choice for vertex i is an index into {None, 1..i-1} x {None, 1..i-1}
    let sizes: Vec<usize> = (1..=r).map(|i| i * i).collect();
    let mut digits = vec![0usize; r];
    loop {
        meter.tick()?;
        let decode = |c: usize, i: usize| -> (Option<usize>, Option<usize>) {
            let (a, b) = (c / i, c % i);
            ((a > 0).then_some(a), (b > 0).then_some(b))
        };
        let (pred, second): (Vec<_>, Vec<_>) = digits
            .iter()
            .enumerate()
            .map(|(k, &c)| decode(c, k + 1))
            .unzip();
        if let Ok(d) = validate(&RawDiagram { r, pred, second }) {
            out.push(d);
        }
        // odometer increment
        let mut k = r;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < sizes[k] {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// One canonical representative per unordered diagram, in order of first
/// appearance in the ordered enumeration.
pub fn enumerate_unordered(
    r: usize,
    budget: &EnumerationBudget,
) -> Result<Vec<OrderedDiagram>, BudgetExceeded> {
    let ordered = enumerate_ordered_par(r, budget)?;
    let canon: Vec<OrderedDiagram> = ordered.par_iter().map(|d| d.canonical()).collect();
    let mut seen = HashSet::new();
    Ok(canon
        .into_iter()
        .filter(|c| seen.insert(c.clone()))
        .collect())
}
