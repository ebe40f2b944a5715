//! Combination systems: entities, partial binary combinators, costs, and the
//! CoSM solver.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use super::SimplicityError;

/// Index of an entity within one [`CombinationSystem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub usize);

impl std::fmt::Display for EntityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One combinator application rule: operator `op` applied to `(left, right)`
/// yields every entity in `outputs`, at cost `cost` (the sigma* of the
/// triple). Multi-output operators price each output at the full cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Production {
    pub op: usize,
    pub left: EntityId,
    pub right: EntityId,
    pub outputs: Vec<EntityId>,
    pub cost: f64,
}

/// Finite combination system. Immutable once built; all solvers are pure.
#[derive(Clone, Debug)]
pub struct CombinationSystem {
    names: Vec<String>,
    name_index: BTreeMap<String, EntityId>,
    base_cost: Vec<f64>,
    num_ops: usize,
    productions: Vec<Production>,
    by_output: Vec<Vec<usize>>,
    by_input: Vec<Vec<usize>>,
    by_args: BTreeMap<(usize, usize, usize), usize>,
    /// Operators of the reference vocabulary used when pricing pattern
    /// targets and parts. Defaults to empty: every entity is priced at its
    /// base cost, so any production cheaper than the target's base cost is a
    /// pattern. Adding operators here makes the reference measure itself
    /// compositional.
    reference_ops: BTreeSet<usize>,
}

impl CombinationSystem {
    pub fn builder() -> SystemBuilder {
        SystemBuilder::default()
    }

    pub fn num_entities(&self) -> usize {
        self.names.len()
    }

    pub fn num_ops(&self) -> usize {
        self.num_ops
    }

    pub fn entity_ids(&self) -> impl Iterator<Item = EntityId> {
        (0..self.names.len()).map(EntityId)
    }

    pub fn name(&self, e: EntityId) -> &str {
        &self.names[e.0]
    }

    pub fn entity(&self, name: &str) -> Result<EntityId, SimplicityError> {
        self.name_index
            .get(name)
            .copied()
            .ok_or_else(|| SimplicityError::UnknownEntity(name.to_string()))
    }

    pub fn base_cost(&self, e: EntityId) -> f64 {
        self.base_cost[e.0]
    }

    pub fn base_costs(&self) -> &[f64] {
        &self.base_cost
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    /// Production indices producing `x`.
    pub fn producers_of(&self, x: EntityId) -> &[usize] {
        &self.by_output[x.0]
    }

    /// Production indices where `e` appears as an argument.
    pub fn uses_of(&self, e: EntityId) -> &[usize] {
        &self.by_input[e.0]
    }

    /// The production for `(op, left, right)`, if defined.
    pub fn production_for(&self, op: usize, left: EntityId, right: EntityId) -> Option<&Production> {
        self.by_args
            .get(&(op, left.0, right.0))
            .map(|&i| &self.productions[i])
    }

    /// Outputs of `op(left, right)`, empty when undefined.
    pub fn apply(&self, op: usize, left: EntityId, right: EntityId) -> &[EntityId] {
        self.production_for(op, left, right)
            .map(|p| p.outputs.as_slice())
            .unwrap_or(&[])
    }

    pub fn reference_ops(&self) -> &BTreeSet<usize> {
        &self.reference_ops
    }

    pub fn set_reference_ops(&mut self, ops: &[usize]) {
        self.reference_ops = ops.iter().copied().collect();
    }

    /// Solves the CoSM fixed point for the stored base costs.
    pub fn solve_cosm(&self) -> Result<SimplicityAssignment, SimplicityError> {
        self.solve_cosm_with(&self.base_cost, None)
    }

    /// Conditional simplicity: context entities are free (base cost 0).
    pub fn conditional_sigma(
        &self,
        context: &BTreeSet<EntityId>,
    ) -> Result<SimplicityAssignment, SimplicityError> {
        let mut base = self.base_cost.clone();
        for e in context {
            base[e.0] = 0.0;
        }
        self.solve_cosm_with(&base, None)
    }

    /// Reference-vocabulary simplicity (sigma_1): solved over the reference
    /// operator subset only, with context entities free. With the default
    /// empty reference vocabulary this is the conditioned base cost.
    pub fn reference_sigma(
        &self,
        context: &BTreeSet<EntityId>,
    ) -> Result<SimplicityAssignment, SimplicityError> {
        let mut base = self.base_cost.clone();
        for e in context {
            base[e.0] = 0.0;
        }
        self.solve_cosm_with(&base, Some(&self.reference_ops))
    }

    /// Shortest-hyperpath relaxation (Dijkstra generalized to two-tail
    /// hyperedges): settles entities in nondecreasing sigma order; a
    /// production relaxes its outputs once both tails are settled. Entities
    /// unreachable from finite-cost primitives keep infinite sigma.
    pub fn solve_cosm_with(
        &self,
        base: &[f64],
        op_filter: Option<&BTreeSet<usize>>,
    ) -> Result<SimplicityAssignment, SimplicityError> {
        assert_eq!(base.len(), self.names.len());
        if !base.iter().any(|c| c.is_finite()) && !self.names.is_empty() {
            return Err(SimplicityError::NoFinitePrimitive);
        }
        let enabled = |p: &Production| op_filter.map_or(true, |f| f.contains(&p.op));

        let mut sigma: Vec<f64> = base.to_vec();
        let mut settled = vec![false; self.names.len()];
        let mut heap: BinaryHeap<HeapEntry> = sigma
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_finite())
            .map(|(i, &c)| HeapEntry { cost: c, entity: i })
            .collect();

        while let Some(HeapEntry { cost, entity }) = heap.pop() {
            if settled[entity] || cost > sigma[entity] {
                continue;
            }
            settled[entity] = true;
            for &pi in &self.by_input[entity] {
                let p = &self.productions[pi];
                if !enabled(p) {
                    continue;
                }
                if !(settled[p.left.0] && settled[p.right.0]) {
                    continue;
                }
                let h = sigma[p.left.0] + sigma[p.right.0] + p.cost;
                for out in &p.outputs {
                    if !settled[out.0] && h < sigma[out.0] {
                        sigma[out.0] = h;
                        heap.push(HeapEntry { cost: h, entity: out.0 });
                    }
                }
            }
        }
        Ok(SimplicityAssignment { sigma })
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    cost: f64,
    entity: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Min-heap on cost, tie-broken by entity index for determinism.
        other
            .cost
            .partial_cmp(&self.cost)
            .expect("costs are finite")
            .then(other.entity.cmp(&self.entity))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The solved simplicity values, indexed by entity.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicityAssignment {
    sigma: Vec<f64>,
}

impl SimplicityAssignment {
    pub fn get(&self, e: EntityId) -> f64 {
        self.sigma[e.0]
    }

    pub fn values(&self) -> &[f64] {
        &self.sigma
    }

    /// Largest violation of the fixed-point equation
    /// `sigma(x) = min(base(x), min over productions of parts + cost)`.
    /// Zero (within float addition) for a correct solve.
    pub fn residual(&self, sys: &CombinationSystem, base: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for x in sys.entity_ids() {
            let mut best = base[x.0];
            for &pi in sys.producers_of(x) {
                let p = &sys.productions[pi];
                let h = self.sigma[p.left.0] + self.sigma[p.right.0] + p.cost;
                if h < best {
                    best = h;
                }
            }
            let s = self.sigma[x.0];
            let diff = if s.is_infinite() && best.is_infinite() {
                0.0
            } else {
                (s - best).abs()
            };
            worst = worst.max(diff);
        }
        worst
    }
}

/// Incremental constructor for [`CombinationSystem`].
#[derive(Default)]
pub struct SystemBuilder {
    names: Vec<String>,
    name_index: BTreeMap<String, EntityId>,
    base_cost: Vec<f64>,
    productions: Vec<Production>,
    by_args: BTreeMap<(usize, usize, usize), usize>,
    num_ops: usize,
}

impl SystemBuilder {
    /// Declares an entity; `base` may be infinite (not a primitive).
    pub fn entity(&mut self, name: &str, base: f64) -> Result<EntityId, SimplicityError> {
        if self.name_index.contains_key(name) {
            return Err(SimplicityError::DuplicateEntity(name.to_string()));
        }
        if base < 0.0 || base.is_nan() {
            return Err(SimplicityError::InvalidCost(base));
        }
        let id = EntityId(self.names.len());
        self.names.push(name.to_string());
        self.name_index.insert(name.to_string(), id);
        self.base_cost.push(base);
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<EntityId> {
        self.name_index.get(name).copied()
    }

    /// Declares `op(left, right) -> output` at `cost`. Repeating the same
    /// argument triple accumulates outputs; the cost must agree because it
    /// is a function of the triple.
    pub fn production(
        &mut self,
        op: usize,
        left: EntityId,
        right: EntityId,
        output: EntityId,
        cost: f64,
    ) -> Result<(), SimplicityError> {
        if !cost.is_finite() || cost < 0.0 {
            return Err(SimplicityError::InvalidCost(cost));
        }
        self.num_ops = self.num_ops.max(op + 1);
        match self.by_args.entry((op, left.0, right.0)) {
            Entry::Vacant(v) => {
                v.insert(self.productions.len());
                self.productions.push(Production {
                    op,
                    left,
                    right,
                    outputs: vec![output],
                    cost,
                });
            }
            Entry::Occupied(o) => {
                let p = &mut self.productions[*o.get()];
                if p.cost != cost {
                    return Err(SimplicityError::ConflictingCost {
                        op,
                        left: self.names[left.0].clone(),
                        right: self.names[right.0].clone(),
                    });
                }
                if !p.outputs.contains(&output) {
                    p.outputs.push(output);
                }
            }
        }
        Ok(())
    }

    pub fn build(self) -> CombinationSystem {
        let n = self.names.len();
        let mut by_output = vec![Vec::new(); n];
        let mut by_input = vec![Vec::new(); n];
        for (i, p) in self.productions.iter().enumerate() {
            for out in &p.outputs {
                by_output[out.0].push(i);
            }
            by_input[p.left.0].push(i);
            if p.right != p.left {
                by_input[p.right.0].push(i);
            }
        }
        CombinationSystem {
            names: self.names,
            name_index: self.name_index,
            base_cost: self.base_cost,
            num_ops: self.num_ops,
            productions: self.productions,
            by_output,
            by_input,
            by_args: self.by_args,
            reference_ops: BTreeSet::new(),
        }
    }
}

/// Writes the text form: `entity <id> [base=<cost>]` then
/// `op <i> <y> <z> -> <x> [cost=<c>]` lines. Infinite base costs are
/// omitted; zero production costs are omitted.
pub fn write_system(sys: &CombinationSystem) -> String {
    let mut out = String::new();
    for e in sys.entity_ids() {
        write!(out, "entity {}", sys.name(e)).unwrap();
        let b = sys.base_cost(e);
        if b.is_finite() {
            write!(out, " base={}", b).unwrap();
        }
        out.push('\n');
    }
    for p in sys.productions() {
        for o in &p.outputs {
            write!(
                out,
                "op {} {} {} -> {}",
                p.op,
                sys.name(p.left),
                sys.name(p.right),
                sys.name(*o)
            )
            .unwrap();
            if p.cost != 0.0 {
                write!(out, " cost={}", p.cost).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// Parses the text form written by [`write_system`]. Unknown entity names in
/// `op` lines are errors; `#` starts a comment.
pub fn parse_system(text: &str) -> Result<CombinationSystem, SimplicityError> {
    let mut b = CombinationSystem::builder();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |m: &str| SimplicityError::ParseError { line: lineno, message: m.to_string() };
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("entity") => {
                let name = tok.next().ok_or_else(|| perr("entity needs a name"))?;
                let mut base = f64::INFINITY;
                for t in tok {
                    if let Some(v) = t.strip_prefix("base=") {
                        base = v.parse().map_err(|_| perr("bad base cost"))?;
                    } else {
                        return Err(perr(&format!("unknown annotation {t:?}")));
                    }
                }
                b.entity(name, base).map_err(|e| SimplicityError::ParseError {
                    line: lineno,
                    message: e.to_string(),
                })?;
            }
            Some("op") => {
                let op: usize = tok
                    .next()
                    .ok_or_else(|| perr("op needs an index"))?
                    .parse()
                    .map_err(|_| perr("bad op index"))?;
                let mut need = |what: &str| {
                    tok.next()
                        .map(str::to_string)
                        .ok_or_else(|| perr(&format!("op line missing {what}")))
                };
                let y = need("left argument")?;
                let z = need("right argument")?;
                let arrow = need("->")?;
                if arrow != "->" {
                    return Err(perr("expected ->"));
                }
                let x = need("output")?;
                let mut cost = 0.0;
                for t in tok {
                    if let Some(v) = t.strip_prefix("cost=") {
                        cost = v.parse().map_err(|_| perr("bad cost"))?;
                    } else {
                        return Err(perr(&format!("unknown annotation {t:?}")));
                    }
                }
                let resolve = |name: &str, b: &SystemBuilder| {
                    b.lookup(name)
                        .ok_or_else(|| perr(&format!("unknown entity {name:?}")))
                };
                let (y, z, x) = (resolve(&y, &b)?, resolve(&z, &b)?, resolve(&x, &b)?);
                b.production(op, y, z, x, cost).map_err(|e| SimplicityError::ParseError {
                    line: lineno,
                    message: e.to_string(),
                })?;
            }
            Some(other) => return Err(perr(&format!("unknown record {other:?}"))),
            None => unreachable!("blank lines skipped"),
        }
    }
    Ok(b.build())
}
