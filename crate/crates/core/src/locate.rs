//! Hierarchical point location over partitioning tuples.
//!
//! Each internal node stores a verified tuple; a query with strict signs
//! descends into the child for its sign condition, picking up W_σ, the
//! combined weight of the sets that contain the whole realization. Sets
//! meeting the realization only partially form the child's family. A query
//! landing exactly on the zero set of some P_j (a measure-zero locus the
//! strict conditions cannot see) falls back to a direct scan of the node's
//! family — exactness over asymptotics for degenerate inputs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::num::{format_rational, parse_rational, rat, Rational};
use crate::partition::{
    big_d, build_partition, PartitionConfig, PartitionReport, PartitionTuple,
};
use crate::semialg::SemiAlgSet;
use crate::semigroup::Semigroup;
use crate::sign::SignVector;

pub const TREE_FORMAT: &str = "geopart-tree/1";

/// Safety stop for the recursion; shrink guards make it unreachable in
/// practice.
pub(crate) const MAX_DEPTH: usize = 64;

#[derive(Clone, Debug)]
pub struct LocateConfig {
    pub k: u32,
    /// The constant C0' of the acceptance threshold D^{2-δ}/C0'.
    pub c0: Rational,
    /// Families of at most this size become leaves.
    pub n0: usize,
    pub max_retries: u32,
    pub solver_budget: u32,
    pub sample_size: Option<usize>,
    pub seed: u64,
}

impl Default for LocateConfig {
    fn default() -> Self {
        LocateConfig {
            k: 2,
            c0: rat(4, 3),
            n0: 16,
            max_retries: 10,
            solver_budget: 12,
            sample_size: None,
            seed: 0,
        }
    }
}

impl LocateConfig {
    pub(crate) fn partition_config(&self, seed: u64) -> PartitionConfig {
        PartitionConfig {
            k: self.k,
            c0: self.c0.clone(),
            sample_size: self.sample_size,
            max_retries: self.max_retries,
            solver_budget: self.solver_budget,
            seed,
        }
    }

    pub(crate) fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "c0": format_rational(&self.c0),
            "n0": self.n0,
            "max_retries": self.max_retries,
            "solver_budget": self.solver_budget,
            "sample_size": self.sample_size,
            "seed": self.seed,
        })
    }

    pub(crate) fn from_json(v: &Value) -> Result<Self> {
        let get = |key: &str| {
            v.get(key)
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::malformed(format!("tree config missing {key}")))
        };
        Ok(LocateConfig {
            k: get("k")? as u32,
            c0: parse_rational(
                v.get("c0")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::malformed("tree config missing c0"))?,
            )?,
            n0: get("n0")? as usize,
            max_retries: get("max_retries")? as u32,
            solver_budget: get("solver_budget")? as u32,
            sample_size: v
                .get("sample_size")
                .and_then(Value::as_u64)
                .map(|s| s as usize),
            seed: get("seed")?,
        })
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BuildStats {
    /// Some node accepted a below-target tuple or gave up splitting.
    pub degraded: bool,
    /// Nodes on the longest root-to-leaf path.
    pub depth: usize,
    pub nodes: usize,
    pub leaves: usize,
    /// Total id references stored across all nodes (families + residues).
    pub total_refs: usize,
}

struct ChildEntry<W> {
    weight: W,
    node: LocationNode<W>,
}

enum LocationNode<W> {
    Leaf {
        ids: Vec<u64>,
    },
    Internal {
        ids: Vec<u64>,
        tuple: PartitionTuple,
        children: BTreeMap<SignVector, ChildEntry<W>>,
        residue: Vec<u64>,
        /// Retained for audits on freshly built trees; not serialized.
        report: Option<Box<PartitionReport>>,
    },
}

pub struct LocationTree<G: Semigroup> {
    semigroup: G,
    config: LocateConfig,
    sets: Vec<SemiAlgSet>,
    by_id: BTreeMap<u64, usize>,
    weights: BTreeMap<u64, G::W>,
    root: LocationNode<G::W>,
    stats: BuildStats,
}

/// Weight plus walk diagnostics for one query.
#[derive(Clone, Debug)]
pub struct TracedAnswer<W> {
    pub weight: W,
    pub visits: usize,
    pub degenerate: bool,
}

/// Smallest t with n0 · shrink^t ≥ n, plus one, computed exactly; None when
/// the configuration does not guarantee shrinkage (shrink ≤ 1).
pub fn depth_bound(n: usize, n0: usize, shrink: &Rational) -> Option<usize> {
    if *shrink <= Rational::from_integer(1.into()) {
        return None;
    }
    let target = Rational::from_integer((n.max(1) as i64).into());
    let mut reach = Rational::from_integer((n0.max(1) as i64).into());
    let mut t = 0usize;
    while reach < target {
        reach *= shrink;
        t += 1;
        if t > 4096 {
            return None;
        }
    }
    Some(t + 1)
}

/// The guaranteed per-level shrink factor D^{2-δ}/C0' for a family whose
/// maximum boundary dimension is δ (dim tags clamped to 1, as in the
/// acceptance target).
pub fn shrink_factor(k: u32, c0: &Rational, sets: &[SemiAlgSet]) -> Result<Rational> {
    if !num_traits::Signed::is_positive(c0) {
        return Err(Error::out_of_range("c0 must be positive"));
    }
    let d = big_d(k)?;
    let delta = sets.iter().map(|s| s.dim_tag.min(1)).max().unwrap_or(0) as u32;
    let mut t = Rational::from_integer(1.into());
    for _ in 0..(2 - delta) {
        t *= Rational::from_integer(d.into());
    }
    Ok(t / c0)
}

impl<G: Semigroup> LocationTree<G> {
    pub fn build(sets: Vec<SemiAlgSet>, semigroup: G, config: LocateConfig) -> Result<Self> {
        if config.n0 < (1usize << config.k) {
            return Err(Error::out_of_range(format!(
                "n0 = {} must be at least 2^k = {}",
                config.n0,
                1u32 << config.k
            )));
        }
        let mut by_id = BTreeMap::new();
        let mut weights = BTreeMap::new();
        for (i, s) in sets.iter().enumerate() {
            s.validate()?;
            if by_id.insert(s.id, i).is_some() {
                return Err(Error::malformed(format!("duplicate set id {}", s.id)));
            }
            weights.insert(s.id, semigroup.parse(&s.weight)?);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut stats = BuildStats::default();
        let mut family: Vec<u64> = sets.iter().map(|s| s.id).collect();
        family.sort_unstable();
        let builder = Builder {
            config: &config,
            semigroup: &semigroup,
            sets: &sets,
            by_id: &by_id,
            weights: &weights,
        };
        let root = builder.node(family, 1, &mut rng, &mut stats)?;
        Ok(LocationTree {
            semigroup,
            config,
            sets,
            by_id,
            weights,
            root,
            stats,
        })
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub fn config(&self) -> &LocateConfig {
        &self.config
    }

    pub fn sets(&self) -> &[SemiAlgSet] {
        &self.sets
    }

    pub fn semigroup(&self) -> &G {
        &self.semigroup
    }

    pub fn query_weight(&self, x: &Rational, y: &Rational) -> Result<G::W> {
        Ok(self.query_traced(x, y)?.weight)
    }

    pub fn query_traced(&self, x: &Rational, y: &Rational) -> Result<TracedAnswer<G::W>> {
        let pt = [x.clone(), y.clone()];
        let mut acc = self.semigroup.neutral();
        let mut visits = 0usize;
        let mut node = &self.root;
        loop {
            visits += 1;
            match node {
                LocationNode::Leaf { ids } => {
                    acc = self.scan(ids, &pt, acc)?;
                    return Ok(TracedAnswer {
                        weight: acc,
                        visits,
                        degenerate: false,
                    });
                }
                LocationNode::Internal {
                    ids,
                    tuple,
                    children,
                    ..
                } => {
                    let mut signs = Vec::with_capacity(tuple.k() as usize);
                    for p in tuple.polys() {
                        signs.push(p.sign_eval(&pt)?);
                    }
                    if signs.contains(&0) {
                        // On Z(∏P_j): strict conditions see nothing here, so
                        // scan the whole current family directly.
                        acc = self.scan(ids, &pt, acc)?;
                        return Ok(TracedAnswer {
                            weight: acc,
                            visits,
                            degenerate: true,
                        });
                    }
                    match children.get(&SignVector(signs)) {
                        Some(entry) => {
                            acc = self.semigroup.combine(&acc, &entry.weight);
                            node = &entry.node;
                        }
                        None => {
                            // The query realizes a condition the build found
                            // unrealizable — only possible on malformed
                            // hand-edited trees. Fall back to a family scan.
                            acc = self.scan(ids, &pt, acc)?;
                            return Ok(TracedAnswer {
                                weight: acc,
                                visits,
                                degenerate: true,
                            });
                        }
                    }
                }
            }
        }
    }

    fn scan(&self, ids: &[u64], pt: &[Rational; 2], mut acc: G::W) -> Result<G::W> {
        for id in ids {
            let idx = *self
                .by_id
                .get(id)
                .ok_or_else(|| Error::malformed(format!("unknown set id {id}")))?;
            if self.sets[idx].contains_xy(&pt[0], &pt[1])? {
                acc = self.semigroup.combine(&acc, &self.weights[id]);
            }
        }
        Ok(acc)
    }

    /// Re-derive every W_σ from the retained reports and the declared set
    /// weights; errors on any mismatch. Skips nodes without reports (e.g.
    /// deserialized trees).
    pub fn audit_weights(&self) -> Result<()> {
        self.audit_node(&self.root)
    }

    fn audit_node(&self, node: &LocationNode<G::W>) -> Result<()> {
        let LocationNode::Internal {
            children, report, ..
        } = node
        else {
            return Ok(());
        };
        if let Some(report) = report {
            for (sigma, entry) in &report.conditions {
                let Some(child) = children.get(sigma) else {
                    if entry.realizable {
                        return Err(Error::malformed(format!(
                            "missing child for realizable condition {sigma}"
                        )));
                    }
                    continue;
                };
                let want = self
                    .semigroup
                    .combine_all(entry.contains.iter().map(|id| &self.weights[id]));
                if want != child.weight {
                    return Err(Error::malformed(format!(
                        "W_sigma mismatch at condition {sigma}"
                    )));
                }
                let child_ids = match &child.node {
                    LocationNode::Leaf { ids } => ids,
                    LocationNode::Internal { ids, .. } => ids,
                };
                if child_ids != &entry.meets {
                    return Err(Error::malformed(format!(
                        "child family mismatch at condition {sigma}"
                    )));
                }
            }
        }
        for child in children.values() {
            self.audit_node(&child.node)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "format": TREE_FORMAT,
            "semigroup": self.semigroup.name(),
            "config": self.config.to_json(),
            "stats": serde_json::to_value(&self.stats).expect("stats serialize"),
            "sets": serde_json::to_value(&self.sets).expect("sets serialize"),
            "root": self.node_to_json(&self.root),
        })
    }

    fn node_to_json(&self, node: &LocationNode<G::W>) -> Value {
        match node {
            LocationNode::Leaf { ids } => json!({ "kind": "leaf", "ids": ids }),
            LocationNode::Internal {
                ids,
                tuple,
                children,
                residue,
                report: _,
            } => {
                let kids: Vec<Value> = children
                    .iter()
                    .map(|(sigma, entry)| {
                        json!({
                            "sigma": sigma.to_string(),
                            "weight": self.semigroup.format(&entry.weight),
                            "child": self.node_to_json(&entry.node),
                        })
                    })
                    .collect();
                json!({
                    "kind": "internal",
                    "ids": ids,
                    "tuple": serde_json::to_value(tuple).expect("tuple serialize"),
                    "residue": residue,
                    "children": kids,
                })
            }
        }
    }

    pub fn from_json(v: &Value, semigroup: G) -> Result<Self> {
        let format = v.get("format").and_then(Value::as_str).unwrap_or("");
        if format != TREE_FORMAT {
            return Err(Error::UnknownKind(format!("tree format {format:?}")));
        }
        let name = v.get("semigroup").and_then(Value::as_str).unwrap_or("");
        if name != semigroup.name() {
            return Err(Error::malformed(format!(
                "tree was built with semigroup {name:?}, not {:?}",
                semigroup.name()
            )));
        }
        let config = LocateConfig::from_json(
            v.get("config")
                .ok_or_else(|| Error::malformed("tree missing config"))?,
        )?;
        let stats: BuildStats = serde_json::from_value(
            v.get("stats")
                .cloned()
                .ok_or_else(|| Error::malformed("tree missing stats"))?,
        )?;
        let sets: Vec<SemiAlgSet> = serde_json::from_value(
            v.get("sets")
                .cloned()
                .ok_or_else(|| Error::malformed("tree missing sets"))?,
        )?;
        let mut by_id = BTreeMap::new();
        let mut weights = BTreeMap::new();
        for (i, s) in sets.iter().enumerate() {
            s.validate()?;
            if by_id.insert(s.id, i).is_some() {
                return Err(Error::malformed(format!("duplicate set id {}", s.id)));
            }
            weights.insert(s.id, semigroup.parse(&s.weight)?);
        }
        let root = Self::node_from_json(
            v.get("root")
                .ok_or_else(|| Error::malformed("tree missing root"))?,
            &semigroup,
        )?;
        Ok(LocationTree {
            semigroup,
            config,
            sets,
            by_id,
            weights,
            root,
            stats,
        })
    }

    fn node_from_json(v: &Value, semigroup: &G) -> Result<LocationNode<G::W>> {
        let ids: Vec<u64> = serde_json::from_value(
            v.get("ids")
                .cloned()
                .ok_or_else(|| Error::malformed("node missing ids"))?,
        )?;
        match v.get("kind").and_then(Value::as_str) {
            Some("leaf") => Ok(LocationNode::Leaf { ids }),
            Some("internal") => {
                let tuple: PartitionTuple = serde_json::from_value(
                    v.get("tuple")
                        .cloned()
                        .ok_or_else(|| Error::malformed("node missing tuple"))?,
                )?;
                let residue: Vec<u64> = serde_json::from_value(
                    v.get("residue")
                        .cloned()
                        .ok_or_else(|| Error::malformed("node missing residue"))?,
                )?;
                let mut children = BTreeMap::new();
                let kids = v
                    .get("children")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::malformed("node missing children"))?;
                for kid in kids {
                    let sigma = SignVector::parse(
                        kid.get("sigma")
                            .and_then(Value::as_str)
                            .ok_or_else(|| Error::malformed("child missing sigma"))?,
                    )?;
                    let weight = semigroup.parse(
                        kid.get("weight")
                            .and_then(Value::as_str)
                            .ok_or_else(|| Error::malformed("child missing weight"))?,
                    )?;
                    let node = Self::node_from_json(
                        kid.get("child")
                            .ok_or_else(|| Error::malformed("child missing node"))?,
                        semigroup,
                    )?;
                    children.insert(sigma, ChildEntry { weight, node });
                }
                Ok(LocationNode::Internal {
                    ids,
                    tuple,
                    children,
                    residue,
                    report: None,
                })
            }
            other => Err(Error::UnknownKind(format!("node kind {other:?}"))),
        }
    }
}

struct Builder<'a, G: Semigroup> {
    config: &'a LocateConfig,
    semigroup: &'a G,
    sets: &'a [SemiAlgSet],
    by_id: &'a BTreeMap<u64, usize>,
    weights: &'a BTreeMap<u64, G::W>,
}

impl<G: Semigroup> Builder<'_, G> {
    fn node(
        &self,
        family: Vec<u64>,
        depth: usize,
        rng: &mut ChaCha8Rng,
        stats: &mut BuildStats,
    ) -> Result<LocationNode<G::W>> {
        stats.nodes += 1;
        stats.depth = stats.depth.max(depth);
        stats.total_refs += family.len();
        if family.len() <= self.config.n0 || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH {
                stats.degraded = true;
            }
            stats.leaves += 1;
            return Ok(LocationNode::Leaf { ids: family });
        }
        let family_sets: Vec<SemiAlgSet> = family
            .iter()
            .map(|id| self.sets[self.by_id[id]].clone())
            .collect();
        let pconfig = self.config.partition_config(rng.gen());
        let outcome = match build_partition(&family_sets, &pconfig) {
            Ok(o) => o,
            Err(Error::RetriesExhausted { .. }) => {
                // No usable tuple at all: keep the family as an oversized
                // leaf rather than failing the whole build.
                stats.degraded = true;
                stats.leaves += 1;
                return Ok(LocationNode::Leaf { ids: family });
            }
            Err(e) => return Err(e),
        };
        if !outcome.accepted {
            stats.degraded = true;
        }
        let report = outcome.report;
        let mut children = BTreeMap::new();
        for (sigma, entry) in &report.conditions {
            if !entry.realizable {
                continue;
            }
            let weight = self
                .semigroup
                .combine_all(entry.contains.iter().map(|id| &self.weights[id]));
            let child_ids = entry.meets.clone();
            let node = if child_ids.len() >= family.len() {
                // The tuple failed to split this condition; stop here so the
                // recursion always terminates.
                stats.degraded = true;
                stats.nodes += 1;
                stats.leaves += 1;
                stats.depth = stats.depth.max(depth + 1);
                stats.total_refs += child_ids.len();
                LocationNode::Leaf { ids: child_ids }
            } else {
                self.node(child_ids, depth + 1, rng, stats)?
            };
            children.insert(sigma.clone(), ChildEntry { weight, node });
        }
        stats.total_refs += report.residue.len();
        Ok(LocationNode::Internal {
            ids: family,
            tuple: outcome.tuple,
            residue: report.residue.clone(),
            report: Some(Box::new(report)),
            children,
        })
    }
}
