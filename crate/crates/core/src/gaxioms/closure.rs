use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::enumerate::mask_to_set;
use super::{apply_axiom, Axiom, CiSet, CiStatement};
use crate::error::{Error, Result};
use crate::relcore::{Attr, AttrSet};

/// Which rule set the closure uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Symmetry, decomposition, weak union, contraction.
    #[default]
    Semigraphoid,
    /// Semigraphoid rules plus intersection. Only sound for strictly
    /// positive distributions.
    Graphoid,
}

impl Mode {
    pub fn axioms(self) -> &'static [Axiom] {
        match self {
            Mode::Semigraphoid => &[Axiom::Symmetry, Axiom::Decomposition, Axiom::WeakUnion, Axiom::Contraction],
            Mode::Graphoid => &[
                Axiom::Symmetry,
                Axiom::Decomposition,
                Axiom::WeakUnion,
                Axiom::Contraction,
                Axiom::Intersection,
            ],
        }
    }
}

/// Hard limits for closure computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureBounds {
    /// Maximum number of attributes mentioned within one context.
    pub max_universe: usize,
    /// Maximum number of statements derived within one context.
    pub max_statements: usize,
}

impl Default for ClosureBounds {
    fn default() -> Self {
        ClosureBounds {
            max_universe: 12,
            max_statements: 2_000_000,
        }
    }
}

/// One rule application in a derivation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub axiom: Axiom,
    pub premises: Vec<CiStatement>,
    pub conclusion: CiStatement,
}

/// A proof of `goal` from `given`. Premises of each step are either given or
/// concluded by an earlier step. Symmetry is implicit in the canonical
/// statement form and never appears as a step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationTrace {
    pub goal: CiStatement,
    pub given: Vec<CiStatement>,
    pub steps: Vec<TraceStep>,
}

impl DerivationTrace {
    /// Re-checks every step with [`apply_axiom`].
    pub fn replay(&self, universe: &AttrSet) -> Result<()> {
        let mut known: HashSet<&CiStatement> = self.given.iter().collect();
        for (i, step) in self.steps.iter().enumerate() {
            if let Some(p) = step.premises.iter().find(|p| !known.contains(p)) {
                return Err(Error::Precondition(format!("step {}: premise `{p}` not yet established", i + 1)));
            }
            let licensed = apply_axiom(step.axiom, &step.premises, universe)
                .iter()
                .any(|c| c.statement() == Some(&step.conclusion));
            if !licensed {
                return Err(Error::Precondition(format!(
                    "step {}: {} does not yield `{}`",
                    i + 1,
                    step.axiom,
                    step.conclusion
                )));
            }
            known.insert(&step.conclusion);
        }
        if known.contains(&self.goal) {
            Ok(())
        } else {
            Err(Error::Precondition(format!("trace does not establish `{}`", self.goal)))
        }
    }
}

/// Outcome of a derivability query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub derivable: bool,
    pub trace: Option<DerivationTrace>,
}

type Key = (u64, u64, u64);

fn key(x: u64, y: u64, z: u64) -> Key {
    (x.min(y), x.max(y), z)
}

/// Non-empty subsets of a mask (including the mask itself).
fn submasks(m: u64) -> impl Iterator<Item = u64> {
    let mut sub = m;
    std::iter::from_fn(move || {
        if sub == 0 {
            return None;
        }
        let cur = sub;
        sub = (sub - 1) & m;
        Some(cur)
    })
}

struct Origin {
    axiom: Axiom,
    premises: Vec<Key>,
}

/// Closure of one context's statements, bitmask encoded.
struct Engine {
    mode: Mode,
    max_statements: usize,
    seen: HashSet<Key>,
    origin: HashMap<Key, Origin>,
    processed: HashSet<Key>,
    // (left, cond) -> rights, over processed statements in both orientations
    index: HashMap<(u64, u64), Vec<u64>>,
    queue: VecDeque<Key>,
}

impl Engine {
    fn new(mode: Mode, max_statements: usize) -> Self {
        Engine {
            mode,
            max_statements,
            seen: HashSet::new(),
            origin: HashMap::new(),
            processed: HashSet::new(),
            index: HashMap::new(),
            queue: VecDeque::new(),
        }
    }

    fn add(&mut self, k: Key, origin: Option<Origin>) -> Result<bool> {
        if !self.seen.insert(k) {
            return Ok(false);
        }
        if self.seen.len() > self.max_statements {
            return Err(Error::ResourceLimit {
                what: "derived CI statements",
                actual: self.seen.len(),
                bound: self.max_statements,
            });
        }
        if let Some(o) = origin {
            self.origin.insert(k, o);
        }
        self.queue.push_back(k);
        Ok(true)
    }

    /// Processes queued statements until the queue is empty or `stop` is seen.
    fn run(&mut self, stop: Option<Key>) -> Result<()> {
        while let Some(s) = self.queue.pop_front() {
            if stop.is_some_and(|g| self.seen.contains(&g)) {
                return Ok(());
            }
            let derived = self.consequences(s);
            self.processed.insert(s);
            let (a, b, c) = s;
            self.index.entry((a, c)).or_default().push(b);
            if a != b {
                self.index.entry((b, c)).or_default().push(a);
            }
            for (k, axiom, premises) in derived {
                self.add(k, Some(Origin { axiom, premises }))?;
            }
        }
        Ok(())
    }

    /// Every conclusion obtainable from `s` alone or from `s` with a
    /// processed statement.
    fn consequences(&self, s: Key) -> Vec<(Key, Axiom, Vec<Key>)> {
        let mut out = Vec::new();
        let (a, b, c) = s;
        for (x, y) in [(a, b), (b, a)] {
            for part in submasks(y).filter(|&p| p != y) {
                out.push((key(x, part, c), Axiom::Decomposition, vec![s]));
                out.push((key(x, y & !part, c | part), Axiom::WeakUnion, vec![s]));
            }
            // s = I(x, c, y) as first contraction premise; second is I(x, c∪y, w)
            if let Some(ws) = self.index.get(&(x, c | y)) {
                for &w in ws {
                    out.push((key(x, y | w, c), Axiom::Contraction, vec![s, key(x, w, c | y)]));
                }
            }
            // s = I(x, c, w) as second premise; first is I(x, c\y, y) with y ⊆ c
            for yy in submasks(c) {
                let first = key(x, yy, c & !yy);
                if self.processed.contains(&first) {
                    out.push((key(x, yy | y, c & !yy), Axiom::Contraction, vec![first, s]));
                }
            }
            if self.mode == Mode::Graphoid {
                // s = I(x, z∪w, y), other = I(x, z∪y, w) with w ⊆ c
                for w in submasks(c) {
                    let z = c & !w;
                    let other = key(x, w, z | y);
                    if self.processed.contains(&other) {
                        out.push((key(x, y | w, z), Axiom::Intersection, vec![s, other]));
                    }
                }
            }
        }
        out
    }

    fn trace(&self, goal: Key, decode: &impl Fn(Key) -> CiStatement) -> DerivationTrace {
        let mut steps = Vec::new();
        let mut given = Vec::new();
        let mut done: HashSet<Key> = HashSet::new();
        // iterative post-order over origins
        let mut stack: Vec<(Key, bool)> = vec![(goal, false)];
        while let Some((k, expanded)) = stack.pop() {
            if done.contains(&k) {
                continue;
            }
            match self.origin.get(&k) {
                None => {
                    done.insert(k);
                    given.push(decode(k));
                }
                Some(o) if expanded => {
                    done.insert(k);
                    steps.push(TraceStep {
                        axiom: o.axiom,
                        premises: o.premises.iter().map(|&p| decode(p)).collect(),
                        conclusion: decode(k),
                    });
                }
                Some(o) => {
                    stack.push((k, true));
                    for &p in o.premises.iter().rev() {
                        if !done.contains(&p) {
                            stack.push((p, false));
                        }
                    }
                }
            }
        }
        given.sort();
        DerivationTrace {
            goal: decode(goal),
            given,
            steps,
        }
    }
}

struct Codec {
    items: Vec<Attr>,
    context: String,
}

impl Codec {
    fn for_group(stmts: &[CiStatement], context: &str, bounds: &ClosureBounds) -> Result<Self> {
        let attrs: AttrSet = stmts.iter().flat_map(|s| s.attrs()).collect();
        let bound = bounds.max_universe.min(63);
        if attrs.len() > bound {
            return Err(Error::ResourceLimit {
                what: "attributes in one CI context",
                actual: attrs.len(),
                bound,
            });
        }
        Ok(Codec {
            items: attrs.into_iter().collect(),
            context: context.to_owned(),
        })
    }

    fn mask(&self, set: &AttrSet) -> Option<u64> {
        let mut m = 0u64;
        for a in set.iter() {
            m |= 1 << self.items.iter().position(|b| b == a)?;
        }
        Some(m)
    }

    fn encode(&self, s: &CiStatement) -> Option<Key> {
        Some(key(self.mask(s.x())?, self.mask(s.y())?, self.mask(s.z())?))
    }

    fn decode(&self, (x, y, z): Key) -> CiStatement {
        CiStatement::new(
            mask_to_set(&self.items, x),
            mask_to_set(&self.items, y),
            mask_to_set(&self.items, z),
            self.context.as_str(),
        )
        .expect("closure keeps triples disjoint")
    }
}

/// Least superset of `base` closed under the rules of `mode`, computed
/// separately per context. Statements never gain attributes they did not
/// already mention, so the result stays within `base`'s universe.
pub fn closure(base: &CiSet, mode: Mode, bounds: &ClosureBounds) -> Result<CiSet> {
    let mut out = CiSet::new(base.universe().clone());
    for (context, stmts) in base.by_context() {
        let codec = Codec::for_group(&stmts, &context, bounds)?;
        let mut engine = Engine::new(mode, bounds.max_statements);
        for s in &stmts {
            engine.add(codec.encode(s).expect("own attributes"), None)?;
        }
        engine.run(None)?;
        let mut keys: Vec<Key> = engine.seen.into_iter().collect();
        keys.sort_unstable();
        for k in keys {
            out.insert(codec.decode(k))?;
        }
    }
    Ok(out)
}

/// Whether `goal` lies in the closure of `base`, with a proof trace when it
/// does. The search stops as soon as the goal is produced.
pub fn derivable(base: &CiSet, goal: &CiStatement, mode: Mode, bounds: &ClosureBounds) -> Result<Derivation> {
    let stmts: Vec<CiStatement> = base.iter().filter(|s| s.context() == goal.context()).cloned().collect();
    let codec = Codec::for_group(&stmts, goal.context(), bounds)?;
    let Some(target) = codec.encode(goal) else {
        // the goal mentions an attribute no premise does
        return Ok(Derivation {
            derivable: false,
            trace: None,
        });
    };
    let mut engine = Engine::new(mode, bounds.max_statements);
    for s in &stmts {
        engine.add(codec.encode(s).expect("own attributes"), None)?;
    }
    engine.run(Some(target))?;
    if !engine.seen.contains(&target) {
        return Ok(Derivation {
            derivable: false,
            trace: None,
        });
    }
    let trace = engine.trace(target, &|k| codec.decode(k));
    Ok(Derivation {
        derivable: true,
        trace: Some(trace),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(stmts: &[CiStatement]) -> CiSet {
        let universe = stmts.iter().flat_map(|s| s.attrs()).collect();
        CiSet::from_statements(universe, stmts.iter().cloned()).unwrap()
    }

    #[test]
    fn submask_enumeration() {
        let mut v: Vec<u64> = submasks(0b1011).collect();
        v.sort();
        assert_eq!(v, vec![1, 2, 3, 8, 9, 10, 11]);
        assert_eq!(submasks(0).count(), 0);
    }

    #[test]
    fn closure_of_single_statement() {
        // A ⊥ BC gives A⊥B, A⊥C, A⊥B|C, A⊥C|B
        let c = closure(&set(&[CiStatement::of("A", "B,C", "", "R")]), Mode::Semigraphoid, &Default::default()).unwrap();
        assert_eq!(c.len(), 5);
        assert!(c.contains(&CiStatement::of("A", "B", "C", "R")));
    }

    #[test]
    fn contraction_chain_with_trace() {
        let base = set(&[CiStatement::of("A", "B", "", "R"), CiStatement::of("A", "C", "B", "R")]);
        let goal = CiStatement::of("A", "C", "", "R");
        let d = derivable(&base, &goal, Mode::Semigraphoid, &Default::default()).unwrap();
        assert!(d.derivable);
        let trace = d.trace.unwrap();
        assert_eq!(trace.steps.len(), 2);
        assert_eq!(trace.steps[0].axiom, Axiom::Contraction);
        trace.replay(base.universe()).unwrap();
    }

    #[test]
    fn intersection_needs_graphoid_mode() {
        let base = set(&[CiStatement::of("A", "B", "C", "R"), CiStatement::of("A", "C", "B", "R")]);
        let goal = CiStatement::of("A", "B,C", "", "R");
        assert!(!derivable(&base, &goal, Mode::Semigraphoid, &Default::default()).unwrap().derivable);
        let d = derivable(&base, &goal, Mode::Graphoid, &Default::default()).unwrap();
        assert!(d.derivable);
        d.trace.unwrap().replay(base.universe()).unwrap();
    }

    #[test]
    fn contexts_do_not_mix() {
        let base = set(&[CiStatement::of("A", "B", "", "R"), CiStatement::of("A", "C", "B", "S")]);
        let c = closure(&base, Mode::Semigraphoid, &Default::default()).unwrap();
        assert!(!c.contains(&CiStatement::of("A", "C", "", "R")));
        assert!(!c.contains(&CiStatement::of("A", "C", "", "S")));
    }

    #[test]
    fn given_goal_has_empty_trace() {
        let base = set(&[CiStatement::of("A", "B", "", "R")]);
        let d = derivable(&base, &CiStatement::of("B", "A", "", "R"), Mode::Semigraphoid, &Default::default()).unwrap();
        assert!(d.trace.unwrap().steps.is_empty());
    }

    #[test]
    fn bounds_are_enforced() {
        let base = set(&[CiStatement::of("A", "B,C,D,E", "", "R")]);
        let tight = ClosureBounds {
            max_universe: 12,
            max_statements: 5,
        };
        assert!(matches!(closure(&base, Mode::Semigraphoid, &tight), Err(Error::ResourceLimit { .. })));
        let narrow = ClosureBounds {
            max_universe: 3,
            max_statements: 100,
        };
        assert!(matches!(closure(&base, Mode::Semigraphoid, &narrow), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn bad_trace_is_rejected() {
        let t = DerivationTrace {
            goal: CiStatement::of("A", "C", "", "R"),
            given: vec![CiStatement::of("A", "B", "", "R")],
            steps: vec![TraceStep {
                axiom: Axiom::Decomposition,
                premises: vec![CiStatement::of("A", "B", "", "R")],
                conclusion: CiStatement::of("A", "C", "", "R"),
            }],
        };
        assert!(t.replay(&AttrSet::of(&["A", "B", "C"])).is_err());
    }
}
