//! The Eff-containment order on ordered diagrams of a fixed size.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{contained_diagrams, decide_prime, AnalysisError, PrimalityVerdict};
use crate::diagram::OrderedDiagram;
use crate::enumerate::{enumerate_ordered_par, EnumerationBudget};
use crate::render::compact_label;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosetNode {
    pub diagram: OrderedDiagram,
    pub dim: usize,
    pub roots: usize,
    pub satellites: usize,
    pub primality: PrimalityVerdict,
}

/// Nodes in enumeration order; an edge `(a, b)` means `Eff(b) ⊊ Eff(a)`
/// with nothing strictly in between.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffPoset {
    pub r: usize,
    pub nodes: Vec<PosetNode>,
    pub edges: Vec<(usize, usize)>,
}

/// Fixed-size bit set over node indices.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
}

pub fn build_eff_poset(r: usize, budget: &EnumerationBudget) -> Result<EffPoset, AnalysisError> {
    let diagrams = enumerate_ordered_par(r, budget)?;
    let index: HashMap<&OrderedDiagram, usize> =
        diagrams.iter().enumerate().map(|(i, d)| (d, i)).collect();
    let n = diagrams.len();

    let below: Vec<Vec<usize>> = diagrams
        .par_iter()
        .map(|d| {
            let mut ids: Vec<usize> = contained_diagrams(d, budget)?
                .iter()
                .map(|d2| index[d2])
                .filter(|&j| diagrams[j] != *d)
                .collect();
            ids.sort_unstable();
            Ok(ids)
        })
        .collect::<Result<_, AnalysisError>>()?;

    let sets: Vec<Bits> = below
        .iter()
        .map(|ids| {
            let mut b = Bits::new(n);
            ids.iter().for_each(|&j| b.insert(j));
            b
        })
        .collect();

    // b covers nothing in between iff no other c below a has b below it
    let edges: Vec<(usize, usize)> = below
        .par_iter()
        .enumerate()
        .flat_map_iter(|(a, ids)| {
            let mut reach = Bits::new(n);
            for &c in ids {
                reach.union_with(&sets[c]);
            }
            ids.iter()
                .filter(move |&&b| !reach.contains(b))
                .map(move |&b| (a, b))
                .collect::<Vec<_>>()
        })
        .collect();

    let nodes = diagrams
        .into_par_iter()
        .map(|d| PosetNode {
            dim: d.dim(),
            roots: d.roots(),
            satellites: d.satellites(),
            primality: decide_prime(&d, budget),
            diagram: d,
        })
        .collect();

    Ok(EffPoset { r, nodes, edges })
}

impl EffPoset {
    pub fn to_json(&self) -> Value {
        json!({
            "r": self.r,
            "nodes": self.nodes.iter().enumerate().map(|(i, node)| {
                let mut v = serde_json::to_value(node).expect("plain data");
                v["id"] = json!(i);
                v
            }).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        writeln!(out, "digraph eff_poset_r{} {{", self.r).unwrap();
        writeln!(out, "  rankdir=TB;").unwrap();
        writeln!(out, "  node [shape=box, fontname=\"monospace\"];").unwrap();
        for (i, node) in self.nodes.iter().enumerate() {
            let style = match node.primality {
                PrimalityVerdict::Prime(_) => "solid",
                PrimalityVerdict::NotPrime(_) => "dashed",
                PrimalityVerdict::Unknown(_) => "dotted",
            };
            writeln!(
                out,
                "  n{i} [label=\"#{i} dim={} {}\\n{}\", style={style}, satellites={}];",
                node.dim,
                node.primality.status(),
                compact_label(&node.diagram),
                node.satellites,
            )
            .unwrap();
        }
        for &(a, b) in &self.edges {
            writeln!(out, "  n{a} -> n{b};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}
