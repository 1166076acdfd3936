//! Ordered Enriques diagrams.
//!
//! Vertices are numbered `1..=r` and the numbering is the admissible
//! ordering. Each vertex stores its immediate predecessor and, for
//! satellites, the second vertex it is proximate to.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unvalidated diagram data, exactly as it appears in the JSON interchange
/// format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDiagram {
    pub r: usize,
    pub pred: Vec<Option<usize>>,
    pub second: Vec<Option<usize>>,
}

/// A single reason a candidate diagram is rejected.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    #[error("a diagram needs at least one vertex")]
    Empty,
    #[error("{field} has {found} entries, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("vertex {vertex} refers to vertex {index}, which does not exist")]
    IndexOutOfRange { vertex: usize, index: usize },
    #[error("vertex {vertex} refers to vertex {target}, which does not precede it")]
    OrderingViolation { vertex: usize, target: usize },
    #[error("axiom {axiom} violated at vertices {vertices:?}")]
    AxiomViolation { axiom: u8, vertices: Vec<usize> },
}

/// Every violation found while validating a candidate diagram.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("invalid Enriques diagram: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("vertex {index} out of range 1..={r}")]
    IndexOutOfRange { index: usize, r: usize },
    #[error("vertex {vertex} is not a free vertex proximate only to its predecessor")]
    NotExtensible { vertex: usize },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexClass {
    Root,
    Free,
    Satellite,
}

/// Validated ordered Enriques diagram. Immutable once built.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedDiagram {
    pred: Vec<Option<usize>>,
    second: Vec<Option<usize>>,
}

impl fmt::Debug for OrderedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Diagram[")?;
        for i in 1..=self.r() {
            if i > 1 {
                write!(f, " ")?;
            }
            match (self.pred(i), self.second(i)) {
                (None, _) => write!(f, "{i}:root")?,
                (Some(p), None) => write!(f, "{i}<{p}")?,
                (Some(p), Some(s)) => write!(f, "{i}<{p},{s}")?,
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for OrderedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Checks the five axioms plus the ordering constraints and returns every
/// violation found.
pub fn validate(raw: &RawDiagram) -> Result<OrderedDiagram, ValidationError> {
    let mut violations = Vec::new();
    let r = raw.r;
    if r == 0 {
        violations.push(Violation::Empty);
    }
    for (field, len) in [("pred", raw.pred.len()), ("second", raw.second.len())] {
        if len != r {
            violations.push(Violation::LengthMismatch {
                field,
                expected: r,
                found: len,
            });
        }
    }
    if !violations.is_empty() {
        return Err(ValidationError { violations });
    }

    // index and ordering checks come first; the axioms need sane indices
    for i in 1..=r {
        for target in [raw.pred[i - 1], raw.second[i - 1]].into_iter().flatten() {
            if target == 0 || target > r {
                violations.push(Violation::IndexOutOfRange {
                    vertex: i,
                    index: target,
                });
            } else if target >= i {
                violations.push(Violation::OrderingViolation { vertex: i, target });
            }
        }
    }
    if !violations.is_empty() {
        return Err(ValidationError { violations });
    }

    let pred = |i: usize| raw.pred[i - 1];
    let second = |i: usize| raw.second[i - 1];
    for i in 1..=r {
        match (pred(i), second(i)) {
            (None, Some(k)) => violations.push(Violation::AxiomViolation {
                axiom: 1,
                vertices: vec![i, k],
            }),
            (Some(p), Some(k)) if k == p => violations.push(Violation::AxiomViolation {
                axiom: 4,
                vertices: vec![i, p],
            }),
            (Some(p), Some(k)) if pred(p) != Some(k) && second(p) != Some(k) => {
                violations.push(Violation::AxiomViolation {
                    axiom: 4,
                    vertices: vec![i, p, k],
                })
            }
            _ => {}
        }
    }
    for i in 1..=r {
        let (Some(p), Some(k)) = (pred(i), second(i)) else {
            continue;
        };
        if let Some(j) = (1..i).find(|&j| pred(j) == Some(p) && second(j) == Some(k)) {
            violations.push(Violation::AxiomViolation {
                axiom: 5,
                vertices: vec![j, i, p, k],
            });
        }
    }

    if violations.is_empty() {
        Ok(OrderedDiagram {
            pred: raw.pred.clone(),
            second: raw.second.clone(),
        })
    } else {
        Err(ValidationError { violations })
    }
}

impl OrderedDiagram {
    pub fn new(
        pred: Vec<Option<usize>>,
        second: Vec<Option<usize>>,
    ) -> Result<Self, ValidationError> {
        validate(&RawDiagram {
            r: pred.len(),
            pred,
            second,
        })
    }

    /// Builds a diagram whose vertices are all free: `pred[i]` is the
    /// predecessor of vertex `i + 1`.
    pub fn from_preds(pred: &[Option<usize>]) -> Result<Self, ValidationError> {
        Self::new(pred.to_vec(), vec![None; pred.len()])
    }

    pub fn single_root() -> Self {
        OrderedDiagram {
            pred: vec![None],
            second: vec![None],
        }
    }

    /// `1 <- 2 <- ... <- r`, all free.
    pub fn free_chain(r: usize) -> Self {
        assert!(r >= 1);
        let pred = (1..=r).map(|i| (i > 1).then(|| i - 1)).collect();
        OrderedDiagram {
            pred,
            second: vec![None; r],
        }
    }

    /// The ordinary cusp: a root, a free point on it and the satellite
    /// proximate to both.
    pub fn cusp() -> Self {
        OrderedDiagram {
            pred: vec![None, Some(1), Some(2)],
            second: vec![None, None, Some(1)],
        }
    }

    pub fn raw(&self) -> RawDiagram {
        RawDiagram {
            r: self.r(),
            pred: self.pred.clone(),
            second: self.second.clone(),
        }
    }

    pub fn r(&self) -> usize {
        self.pred.len()
    }

    pub fn pred(&self, i: usize) -> Option<usize> {
        self.pred[i - 1]
    }

    pub fn second(&self, i: usize) -> Option<usize> {
        self.second[i - 1]
    }

    /// The vertices `i` is proximate to, predecessor first.
    pub fn targets(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.pred(i).into_iter().chain(self.second(i))
    }

    /// Whether vertex `i` is proximate to vertex `j`.
    pub fn is_proximate(&self, i: usize, j: usize) -> bool {
        self.pred(i) == Some(j) || self.second(i) == Some(j)
    }

    /// Whether `j` is infinitely near to `i` (strictly after it in the
    /// natural order).
    pub fn is_infinitely_near(&self, j: usize, i: usize) -> bool {
        let mut cur = self.pred(j);
        while let Some(p) = cur {
            if p == i {
                return true;
            }
            cur = self.pred(p);
        }
        false
    }

    pub fn class(&self, i: usize) -> VertexClass {
        match (self.pred(i), self.second(i)) {
            (None, _) => VertexClass::Root,
            (Some(_), None) => VertexClass::Free,
            (Some(_), Some(_)) => VertexClass::Satellite,
        }
    }

    pub fn vertex_classes(&self) -> Vec<VertexClass> {
        (1..=self.r()).map(|i| self.class(i)).collect()
    }

    pub fn roots(&self) -> usize {
        self.pred.iter().filter(|p| p.is_none()).count()
    }

    pub fn satellites(&self) -> usize {
        self.second.iter().filter(|s| s.is_some()).count()
    }

    /// Non-satellite vertices, roots included.
    pub fn frees(&self) -> usize {
        self.r() - self.satellites()
    }

    pub fn dim(&self) -> usize {
        self.roots() + self.frees()
    }

    pub fn truncate(&self, i: usize) -> Result<OrderedDiagram, DiagramError> {
        if i == 0 || i > self.r() {
            return Err(DiagramError::IndexOutOfRange {
                index: i,
                r: self.r(),
            });
        }
        Ok(self.prefix(i))
    }

    pub(crate) fn prefix(&self, i: usize) -> OrderedDiagram {
        OrderedDiagram {
            pred: self.pred[..i].to_vec(),
            second: self.second[..i].to_vec(),
        }
    }

    /// Appends a vertex without re-validating; callers guarantee the axioms.
    pub(crate) fn push_unchecked(&mut self, pred: Option<usize>, second: Option<usize>) {
        self.pred.push(pred);
        self.second.push(second);
    }

    pub(crate) fn pop_unchecked(&mut self) {
        self.pred.pop();
        self.second.pop();
    }

    /// Whether appending a satellite with predecessor `p` and second
    /// target `k` keeps axioms 4 and 5.
    pub(crate) fn can_append_satellite(&self, p: usize, k: usize) -> bool {
        k != p
            && self.is_proximate(p, k)
            && !(1..=self.r()).any(|j| self.pred(j) == Some(p) && self.second(j) == Some(k))
    }

    /// Vertices whose immediate predecessor is `i`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (1..=self.r()).filter(move |&j| self.pred(j) == Some(i))
    }

    /// Renumbers vertices: new vertex `k + 1` is old vertex `order[k]`.
    /// Returns `None` when `order` is not an admissible ordering.
    pub fn relabel(&self, order: &[usize]) -> Option<OrderedDiagram> {
        let r = self.r();
        if order.len() != r {
            return None;
        }
        let mut position = vec![0usize; r + 1];
        for (k, &old) in order.iter().enumerate() {
            if old == 0 || old > r || position[old] != 0 {
                return None;
            }
            position[old] = k + 1;
        }
        let mut pred = Vec::with_capacity(r);
        let mut second = Vec::with_capacity(r);
        for (k, &old) in order.iter().enumerate() {
            let p = self.pred(old).map(|p| position[p]);
            if p.is_some_and(|p| p > k) {
                return None;
            }
            pred.push(p);
            second.push(self.second(old).map(|s| position[s]));
        }
        Some(OrderedDiagram { pred, second })
    }

    /// All admissible orderings, each given as the list of old vertices in
    /// their new order, sorted lexicographically.
    pub fn admissible_orderings(&self) -> Vec<Vec<usize>> {
        fn go(
            d: &OrderedDiagram,
            placed: &mut Vec<bool>,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if cur.len() == d.r() {
                out.push(cur.clone());
                return;
            }
            for v in 1..=d.r() {
                if placed[v] || d.pred(v).is_some_and(|p| !placed[p]) {
                    continue;
                }
                placed[v] = true;
                cur.push(v);
                go(d, placed, cur, out);
                cur.pop();
                placed[v] = false;
            }
        }
        let mut out = Vec::new();
        go(
            self,
            &mut vec![false; self.r() + 1],
            &mut Vec::new(),
            &mut out,
        );
        out
    }

    /// Row-major proximity matrix entries, used as the comparison key of the
    /// canonical form.
    fn matrix_key(&self) -> Vec<i8> {
        let r = self.r();
        let mut key = vec![0i8; r * r];
        for i in 1..=r {
            key[(i - 1) * r + (i - 1)] = 1;
            for j in self.targets(i) {
                key[(i - 1) * r + (j - 1)] = -1;
            }
        }
        key
    }

    /// Representative of the unordered diagram: the admissible reordering
    /// with the lexicographically smallest proximity matrix.
    pub fn canonical(&self) -> OrderedDiagram {
        self.admissible_orderings()
            .iter()
            .filter_map(|o| self.relabel(o))
            .min_by_key(|d| d.matrix_key())
            .expect("the identity ordering is always admissible")
    }

    pub fn same_unordered(&self, other: &OrderedDiagram) -> bool {
        self.r() == other.r()
            && self.satellites() == other.satellites()
            && self.roots() == other.roots()
            && self.canonical() == other.canonical()
    }

    /// One root and no vertex with two successors.
    pub fn is_unibranched(&self) -> bool {
        self.roots() == 1 && (1..=self.r()).all(|i| self.successors(i).nth(1).is_none())
    }

    /// Every vertex is a root or proximate to the vertex just before it.
    pub fn is_poli_unibranched_ordering(&self) -> bool {
        (1..=self.r()).all(|i| self.pred(i).is_none() || (i > 1 && self.is_proximate(i, i - 1)))
    }

    /// Whether `q` is a free vertex proximate to its predecessor only.
    pub fn is_extensible_at(&self, q: usize) -> bool {
        q >= 1 && q <= self.r() && self.class(q) == VertexClass::Free
    }

    /// Stable reordering putting `q` and every vertex infinitely near to it
    /// last. Returns the ordering and the new position of `q`.
    fn ordering_with_tail_at(&self, q: usize) -> (Vec<usize>, usize) {
        let (tail, head): (Vec<usize>, Vec<usize>) =
            (1..=self.r()).partition(|&v| v == q || self.is_infinitely_near(v, q));
        let s = head.len() + 1;
        (head.into_iter().chain(tail).collect(), s)
    }

    /// Inserts a vertex at position `at` (1-based), shifting later indices.
    fn insert_vertex(&self, at: usize, pred: Option<usize>) -> OrderedDiagram {
        let shift = |v: usize| if v >= at { v + 1 } else { v };
        let mut p: Vec<Option<usize>> = self.pred.iter().map(|x| x.map(shift)).collect();
        let mut s: Vec<Option<usize>> = self.second.iter().map(|x| x.map(shift)).collect();
        p.insert(at - 1, pred);
        s.insert(at - 1, None);
        OrderedDiagram { pred: p, second: s }
    }

    /// The diagram with one extra isolated root appended at the end.
    pub fn bullet(&self) -> OrderedDiagram {
        let mut d = self.clone();
        d.push_unchecked(None, None);
        d
    }

    /// The diagram with one extra isolated root, ordered so that the new
    /// root comes immediately before `q` and everything after it is
    /// infinitely near to `q`. This is the ordering paired with
    /// [`OrderedDiagram::extend`].
    pub fn bullet_before(&self, q: usize) -> Result<OrderedDiagram, DiagramError> {
        self.check_extensible(q)?;
        let (order, s) = self.ordering_with_tail_at(q);
        let base = self.relabel(&order).expect("tail reordering is admissible");
        Ok(base.insert_vertex(s, None))
    }

    /// Extension at `q`: a new free vertex `q'` is inserted between `q` and
    /// its predecessor `t`, and every vertex at or after `q` that was
    /// proximate to `t` becomes proximate to `q'` instead.
    ///
    /// The result is ordered with `q'` immediately before `q` and all later
    /// vertices infinitely near to `q`.
    pub fn extend(&self, q: usize) -> Result<OrderedDiagram, DiagramError> {
        self.check_extensible(q)?;
        let (order, s) = self.ordering_with_tail_at(q);
        let base = self.relabel(&order).expect("tail reordering is admissible");
        let t = base.pred(s).expect("extensible vertex has a predecessor");
        let mut d = base.insert_vertex(s, Some(t));
        let q_new = s;
        // q now sits at s + 1 and every later vertex is infinitely near to it
        for v in s + 1..=d.r() {
            if d.pred[v - 1] == Some(t) {
                d.pred[v - 1] = Some(q_new);
            }
            if d.second[v - 1] == Some(t) {
                d.second[v - 1] = Some(q_new);
            }
        }
        debug_assert!(validate(&d.raw()).is_ok());
        Ok(d)
    }

    /// `(bullet_before(q), extend(q))`.
    pub fn extension_pair(
        &self,
        q: usize,
    ) -> Result<(OrderedDiagram, OrderedDiagram), DiagramError> {
        Ok((self.bullet_before(q)?, self.extend(q)?))
    }

    fn check_extensible(&self, q: usize) -> Result<(), DiagramError> {
        if q == 0 || q > self.r() {
            return Err(DiagramError::IndexOutOfRange {
                index: q,
                r: self.r(),
            });
        }
        if !self.is_extensible_at(q) {
            return Err(DiagramError::NotExtensible { vertex: q });
        }
        Ok(())
    }

    /// Removes vertex `at`, which must be an isolated root.
    pub(crate) fn remove_isolated_root(&self, at: usize) -> Option<OrderedDiagram> {
        if self.r() < 2
            || self.pred(at).is_some()
            || (1..=self.r()).any(|v| self.targets(v).any(|t| t == at))
        {
            return None;
        }
        let shift = |v: usize| if v > at { v - 1 } else { v };
        let mut pred: Vec<Option<usize>> = self.pred.iter().map(|x| x.map(shift)).collect();
        let mut second: Vec<Option<usize>> = self.second.iter().map(|x| x.map(shift)).collect();
        pred.remove(at - 1);
        second.remove(at - 1);
        Some(OrderedDiagram { pred, second })
    }
}

impl Serialize for OrderedDiagram {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.raw().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrderedDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawDiagram::deserialize(deserializer)?;
        validate(&raw).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<RawDiagram> for OrderedDiagram {
    type Error = ValidationError;

    fn try_from(raw: RawDiagram) -> Result<Self, Self::Error> {
        validate(&raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(pred: &[Option<usize>], second: &[Option<usize>]) -> RawDiagram {
        RawDiagram {
            r: pred.len(),
            pred: pred.to_vec(),
            second: second.to_vec(),
        }
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&raw(&[None], &[None])).is_ok());
        assert_eq!(
            validate(&raw(&[None, Some(1), Some(2)], &[None, None, Some(1)])).unwrap(),
            OrderedDiagram::cusp()
        );
        let err = validate(&raw(&[None, Some(1), Some(2)], &[None, Some(1), None])).unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::AxiomViolation {
                axiom: 4,
                vertices: vec![2, 1]
            }]
        );
    }

    #[test]
    fn validate_reports_every_axiom() {
        let e = validate(&raw(&[None, None], &[None, Some(1)])).unwrap_err();
        assert!(matches!(
            e.violations[0],
            Violation::AxiomViolation { axiom: 1, .. }
        ));

        // 3 is proximate to 2 and 1, but 2 is a root so it is not proximate to 1
        let e = validate(&raw(&[None, None, Some(2)], &[None, None, Some(1)])).unwrap_err();
        assert_eq!(
            e.violations,
            vec![Violation::AxiomViolation {
                axiom: 4,
                vertices: vec![3, 2, 1]
            }]
        );

        // two satellites proximate to both 2 and 1
        let e = validate(&raw(
            &[None, Some(1), Some(2), Some(2)],
            &[None, None, Some(1), Some(1)],
        ))
        .unwrap_err();
        assert_eq!(
            e.violations,
            vec![Violation::AxiomViolation {
                axiom: 5,
                vertices: vec![3, 4, 2, 1]
            }]
        );
    }

    #[test]
    fn validate_rejects_bad_indices() {
        assert_eq!(
            validate(&raw(&[], &[])).unwrap_err().violations,
            vec![Violation::Empty]
        );
        assert!(matches!(
            validate(&raw(&[None, Some(2)], &[None, None]))
                .unwrap_err()
                .violations[0],
            Violation::OrderingViolation {
                vertex: 2,
                target: 2
            }
        ));
        assert!(matches!(
            validate(&raw(&[None, Some(7)], &[None, None]))
                .unwrap_err()
                .violations[0],
            Violation::IndexOutOfRange {
                vertex: 2,
                index: 7
            }
        ));
        assert!(matches!(
            validate(&raw(&[None], &[None, None]))
                .unwrap_err()
                .violations[0],
            Violation::LengthMismatch {
                field: "second",
                ..
            }
        ));
    }

    #[test]
    fn classes_and_dimension() {
        use VertexClass::*;
        assert_eq!(OrderedDiagram::single_root().vertex_classes(), vec![Root]);
        assert_eq!(OrderedDiagram::single_root().dim(), 2);
        let cusp = OrderedDiagram::cusp();
        assert_eq!(cusp.vertex_classes(), vec![Root, Free, Satellite]);
        assert_eq!(
            (cusp.roots(), cusp.frees(), cusp.satellites(), cusp.dim()),
            (1, 2, 1, 3)
        );
        let d = OrderedDiagram::from_preds(&[None, None, Some(2)]).unwrap();
        assert_eq!(d.vertex_classes(), vec![Root, Root, Free]);
    }

    #[test]
    fn interleaved_cusps_have_dimension_six() {
        let d = OrderedDiagram::new(
            vec![None, None, Some(1), Some(2), Some(3), Some(4)],
            vec![None, None, None, None, Some(1), Some(2)],
        )
        .unwrap();
        assert_eq!(d.dim(), 6);
    }

    #[test]
    fn truncation() {
        let cusp = OrderedDiagram::cusp();
        assert_eq!(cusp.truncate(2).unwrap(), OrderedDiagram::free_chain(2));
        assert_eq!(cusp.truncate(3).unwrap(), cusp);
        assert_eq!(cusp.truncate(1).unwrap(), OrderedDiagram::single_root());
        assert!(cusp.truncate(0).is_err());
        assert!(cusp.truncate(4).is_err());
    }

    #[test]
    fn orderings() {
        assert_eq!(
            OrderedDiagram::free_chain(3).admissible_orderings().len(),
            1
        );
        assert_eq!(
            OrderedDiagram::single_root().admissible_orderings().len(),
            1
        );
        let siblings = OrderedDiagram::from_preds(&[None, Some(1), Some(1)]).unwrap();
        assert_eq!(
            siblings.admissible_orderings(),
            vec![vec![1, 2, 3], vec![1, 3, 2]]
        );
    }

    #[test]
    fn unordered_comparison() {
        let siblings = OrderedDiagram::from_preds(&[None, Some(1), Some(1)]).unwrap();
        let swapped = siblings.relabel(&[1, 3, 2]).unwrap();
        assert!(siblings.same_unordered(&siblings));
        assert!(siblings.same_unordered(&swapped));
        assert!(!OrderedDiagram::free_chain(3).same_unordered(&OrderedDiagram::cusp()));

        let a = OrderedDiagram::from_preds(&[None, Some(1), None]).unwrap();
        let b = OrderedDiagram::from_preds(&[None, None, Some(2)]).unwrap();
        assert!(a.same_unordered(&b));
    }

    #[test]
    fn relabel_rejects_inadmissible() {
        assert!(OrderedDiagram::free_chain(3).relabel(&[2, 1, 3]).is_none());
        assert!(OrderedDiagram::free_chain(3).relabel(&[1, 1, 3]).is_none());
    }

    #[test]
    fn unibranched_checks() {
        let chain = OrderedDiagram::free_chain(4);
        assert!(chain.is_unibranched() && chain.is_poli_unibranched_ordering());
        assert!(OrderedDiagram::cusp().is_unibranched());
        let d = OrderedDiagram::from_preds(&[None, None, Some(1)]).unwrap();
        assert!(!d.is_poli_unibranched_ordering());
        assert!(!d.is_unibranched());
    }

    #[test]
    fn extension_of_chain() {
        let chain = OrderedDiagram::free_chain(3);
        let ext = chain.extend(3).unwrap();
        assert_eq!(ext, OrderedDiagram::free_chain(4));
        assert_eq!(ext.dim(), 5);
        let b = chain.bullet();
        assert_eq!((b.r(), b.roots(), b.dim()), (4, 2, 6));
        assert_eq!(
            chain.bullet_before(3).unwrap(),
            OrderedDiagram::from_preds(&[None, Some(1), None, Some(2)]).unwrap()
        );
    }

    #[test]
    fn extension_moves_satellites() {
        // 1 <- 2 <- 3, with 3 a satellite proximate to 1; extend at 2
        let cusp = OrderedDiagram::cusp();
        let ext = cusp.extend(2).unwrap();
        assert_eq!(
            ext,
            OrderedDiagram::new(
                vec![None, Some(1), Some(2), Some(3)],
                vec![None, None, None, Some(2)]
            )
            .unwrap()
        );
        assert_eq!(ext.satellites(), cusp.satellites());
    }

    #[test]
    fn extension_reorders_unrelated_vertices_first() {
        // 1 root, 2 <- 1, 3 <- 1, 4 <- 2 ; extend at 2 moves 3 before the tail
        let d = OrderedDiagram::from_preds(&[None, Some(1), Some(1), Some(2)]).unwrap();
        let ext = d.extend(2).unwrap();
        assert_eq!(
            ext,
            OrderedDiagram::from_preds(&[None, Some(1), Some(1), Some(3), Some(4)]).unwrap()
        );
        let bullet = d.bullet_before(2).unwrap();
        assert_eq!(
            bullet,
            OrderedDiagram::from_preds(&[None, Some(1), None, Some(1), Some(4)]).unwrap()
        );
    }

    #[test]
    fn extension_rejects_roots_and_satellites() {
        let cusp = OrderedDiagram::cusp();
        assert_eq!(
            cusp.extend(1),
            Err(DiagramError::NotExtensible { vertex: 1 })
        );
        assert_eq!(
            cusp.extend(3),
            Err(DiagramError::NotExtensible { vertex: 3 })
        );
        assert!(matches!(
            cusp.extend(9),
            Err(DiagramError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"r":3,"pred":[null,1,2],"second":[null,null,1]}"#;
        let d: OrderedDiagram = serde_json::from_str(json).unwrap();
        assert_eq!(d, OrderedDiagram::cusp());
        assert_eq!(serde_json::to_string(&d).unwrap(), json);
        let bad = r#"{"r":2,"pred":[null,1],"second":[null,1]}"#;
        assert!(serde_json::from_str::<OrderedDiagram>(bad).is_err());
    }
}
