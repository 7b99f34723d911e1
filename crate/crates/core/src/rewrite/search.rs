//! Bounded bidirectional breadth-first search over canonical sums.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use rayon::prelude::*;

use super::{
    apply_step, instantiate_rules, letter_homs, synthetic_letters, ContextApplication, Direction,
    ProofStep, ProofTrace, RewriteError, RuleSet,
};
use crate::presentation::{ObjId, Presentation};
use crate::terms::{canonical_sum_form, FormalSum, Letter, Sign, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of steps in a returned trace.
    pub depth: usize,
    /// Maximum number of distinct states visited from each side.
    pub max_states: usize,
    /// Length bound on the contexts enumerated for steps whose consumed side
    /// is empty. Steps that match an existing summand take their contexts
    /// from the match and are not bounded by this.
    pub expansion_context: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            depth: 4,
            max_states: 200_000,
            expansion_context: 0,
        }
    }
}

impl Budget {
    pub fn with_depth(depth: usize) -> Self {
        Budget {
            depth,
            ..Budget::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchStats {
    pub left_states: usize,
    pub right_states: usize,
    pub left_layers: usize,
    pub right_layers: usize,
    /// True when a side hit `max_states` before the depth was exhausted.
    pub state_limit_hit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent(ProofTrace),
    Unknown(SearchStats),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent(_))
    }

    pub fn trace(&self) -> Option<&ProofTrace> {
        match self {
            Verdict::Equivalent(t) => Some(t),
            Verdict::Unknown(_) => None,
        }
    }
}

/// A consumed term of some rule side, found by its first letter.
#[derive(Clone, Copy, Debug)]
struct Pattern {
    rule: usize,
    direction: Direction,
    term: usize,
}

/// Instantiated rules indexed for matching; build once, reuse for many
/// searches or walks.
pub struct Rewriter<'a> {
    p: &'a Presentation,
    rules: RuleSet,
    by_first: HashMap<Letter, Vec<Pattern>>,
    /// Rule sides with no terms; applying them only adds summands.
    pure: Vec<(usize, Direction)>,
    alphabet: Vec<Letter>,
}

impl<'a> Rewriter<'a> {
    pub fn new(p: &'a Presentation) -> Self {
        let rules = instantiate_rules(p);
        let mut by_first: HashMap<Letter, Vec<Pattern>> = HashMap::new();
        let mut pure = Vec::new();
        for (ri, rule) in rules.rules().iter().enumerate() {
            for direction in [Direction::LhsToRhs, Direction::RhsToLhs] {
                let (from, _) = rule.sides(direction);
                if from.is_empty() {
                    pure.push((ri, direction));
                }
                for (ti, t) in from.terms().iter().enumerate() {
                    by_first
                        .entry(t.word.letters()[0])
                        .or_default()
                        .push(Pattern {
                            rule: ri,
                            direction,
                            term: ti,
                        });
                }
            }
        }
        let mut alphabet: Vec<Letter> = letter_homs(p).into_iter().map(Letter::Gen).collect();
        alphabet.extend(synthetic_letters(p));
        Rewriter {
            p,
            rules,
            by_first,
            pure,
            alphabet,
        }
    }

    /// Words of length `1..=max_len` from `dom` to `cod`, plus `None` when
    /// `dom == cod`.
    fn contexts(&self, dom: ObjId, cod: ObjId, max_len: usize) -> Vec<Option<Word>> {
        let mut out = Vec::new();
        if dom == cod {
            out.push(None);
        }
        let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for prefix in &layer {
                let at = prefix.last().map_or(dom, |l| l.cod(self.p));
                for &l in &self.alphabet {
                    if l.dom(self.p) == at {
                        let mut w = prefix.clone();
                        w.push(l);
                        if l.cod(self.p) == cod {
                            out.push(Some(Word::from_parts(w.clone(), dom, cod)));
                        }
                        next.push(w);
                    }
                }
            }
            layer = next;
        }
        out
    }

    fn candidate_apps(&self, state: &FormalSum, budget: &Budget) -> Vec<ContextApplication> {
        let mut apps = Vec::new();
        let mut seen = HashSet::new();
        let mut push = |app: ContextApplication, apps: &mut Vec<ContextApplication>| {
            if seen.insert(app.clone()) {
                apps.push(app);
            }
        };
        for term in state.terms() {
            let letters = term.word.letters();
            for (i, l) in letters.iter().enumerate() {
                let Some(patterns) = self.by_first.get(l) else {
                    continue;
                };
                for pat in patterns {
                    let rule = &self.rules.rules()[pat.rule];
                    let (from, _) = rule.sides(pat.direction);
                    let f = &from.terms()[pat.term];
                    let fl = f.word.letters();
                    if i + fl.len() > letters.len() || letters[i..i + fl.len()] != *fl {
                        continue;
                    }
                    let y = (i > 0).then(|| {
                        Word::from_parts(letters[..i].to_vec(), term.word.dom(), f.word.dom())
                    });
                    let j = i + fl.len();
                    let z = (j < letters.len()).then(|| {
                        Word::from_parts(letters[j..].to_vec(), f.word.cod(), term.word.cod())
                    });
                    let app = ContextApplication {
                        rule: rule.id.clone(),
                        direction: pat.direction,
                        sign: term.sign * f.sign,
                        y,
                        z,
                    };
                    push(app, &mut apps);
                }
            }
        }
        for &(ri, direction) in &self.pure {
            let rule = &self.rules.rules()[ri];
            let (rd, rc) = (rule.lhs.dom(), rule.lhs.cod());
            for y in self.contexts(state.dom(), rd, budget.expansion_context) {
                for z in self.contexts(rc, state.cod(), budget.expansion_context) {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let app = ContextApplication {
                            rule: rule.id.clone(),
                            direction,
                            sign,
                            y: y.clone(),
                            z: z.clone(),
                        };
                        push(app, &mut apps);
                    }
                }
            }
        }
        apps
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    /// Every usable letter: generator and identity homs, then synthetic
    /// letters.
    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    /// One-step successors of a canonical state, deduplicated by result.
    pub fn successors(&self, state: &FormalSum, budget: &Budget) -> Vec<ProofStep> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for app in self.candidate_apps(state, budget) {
            let rule = self.rules.get(&app.rule).expect("indexed rule");
            let step = apply_step(self.p, rule, state, &app).expect("indexed moves are well typed");
            if step.after != *state && seen.insert(step.after.clone()) {
                out.push(step);
            }
        }
        out
    }
}

/// Every state reachable in one step from the canonical form of `state`,
/// deduplicated, in a fixed order.
pub fn successors(p: &Presentation, state: &FormalSum, budget: &Budget) -> Vec<ProofStep> {
    Rewriter::new(p).successors(&canonical_sum_form(state), budget)
}

struct Node {
    parent: Option<usize>,
    step: Option<ProofStep>,
    depth: usize,
}

struct Frontier {
    visited: IndexMap<FormalSum, Node>,
    layer: Vec<usize>,
    layers: usize,
    limit_hit: bool,
}

impl Frontier {
    fn new(start: FormalSum) -> Self {
        let mut visited = IndexMap::new();
        visited.insert(
            start,
            Node {
                parent: None,
                step: None,
                depth: 0,
            },
        );
        Frontier {
            visited,
            layer: vec![0],
            layers: 0,
            limit_hit: false,
        }
    }

    fn expand(&mut self, engine: &Rewriter<'_>, budget: &Budget) {
        if self.limit_hit || self.layer.is_empty() {
            return;
        }
        let states: Vec<(usize, &FormalSum)> = self
            .layer
            .iter()
            .map(|&i| (i, self.visited.get_index(i).unwrap().0))
            .collect();
        let expanded: Vec<(usize, Vec<ProofStep>)> = states
            .par_iter()
            .map(|&(i, s)| (i, engine.successors(s, budget)))
            .collect();
        self.layers += 1;
        let mut next = Vec::new();
        'outer: for (parent, steps) in expanded {
            for step in steps {
                if self.visited.contains_key(&step.after) {
                    continue;
                }
                if self.visited.len() >= budget.max_states {
                    self.limit_hit = true;
                    break 'outer;
                }
                let (idx, _) = self.visited.insert_full(
                    step.after.clone(),
                    Node {
                        parent: Some(parent),
                        step: Some(step),
                        depth: self.layers,
                    },
                );
                next.push(idx);
            }
        }
        self.layer = next;
    }

    /// Steps from the root to node `idx`.
    fn path_to(&self, mut idx: usize) -> Vec<ProofStep> {
        let mut steps = Vec::new();
        loop {
            let node = &self.visited[idx];
            match (node.parent, &node.step) {
                (Some(parent), Some(step)) => {
                    steps.push(step.clone());
                    idx = parent;
                }
                _ => break,
            }
        }
        steps.reverse();
        steps
    }
}

/// Searches for a chain of at most `budget.depth` steps from `s1` to `s2`.
///
/// Both sides are explored layer by layer up to half the depth each, then
/// each side alone up to the full depth; among all meeting states the one
/// with the shortest total path wins, ties broken by the order on sums. The verdict and trace depend only on the inputs and
/// the budget.
pub fn decide_equiv(
    p: &Presentation,
    s1: &FormalSum,
    s2: &FormalSum,
    budget: &Budget,
) -> Result<Verdict, RewriteError> {
    Rewriter::new(p).decide(s1, s2, budget)
}

impl Rewriter<'_> {
    pub fn decide(
        &self,
        s1: &FormalSum,
        s2: &FormalSum,
        budget: &Budget,
    ) -> Result<Verdict, RewriteError> {
        let p = self.p;
        if (s1.dom(), s1.cod()) != (s2.dom(), s2.cod()) {
            return Err(RewriteError::Typing(format!(
                "{} -> {} vs {} -> {}",
                p.obj_name(s1.dom()),
                p.obj_name(s1.cod()),
                p.obj_name(s2.dom()),
                p.obj_name(s2.cod())
            )));
        }
        let start = canonical_sum_form(s1);
        let end = canonical_sum_form(s2);
        if start == end {
            return Ok(Verdict::Equivalent(ProofTrace {
                start,
                end,
                steps: Vec::new(),
            }));
        }
        let engine = self;
        let mut left = Frontier::new(start.clone());
        let mut right = Frontier::new(end.clone());
        let rounds = budget.depth.div_ceil(2);
        let mut meet = None;
        for _ in 0..rounds {
            left.expand(engine, budget);
            right.expand(engine, budget);
            meet = best_meet(&left, &right, budget.depth);
            if meet.is_some() || left.limit_hit || right.limit_hit {
                break;
            }
        }
        // Expansions are only tried in short contexts, so a step that is
        // easy forwards can be out of reach backwards. Deepen each side
        // alone before giving up.
        for deepen_left in [true, false] {
            while meet.is_none() && !left.limit_hit && !right.limit_hit {
                let f = if deepen_left { &mut left } else { &mut right };
                if f.layers >= budget.depth || f.layer.is_empty() {
                    break;
                }
                f.expand(engine, budget);
                meet = best_meet(&left, &right, budget.depth);
            }
        }
        if let Some((li, ri)) = meet {
            return Ok(Verdict::Equivalent(join(
                engine, &left, &right, li, ri, start, end,
            )));
        }
        Ok(Verdict::Unknown(SearchStats {
            left_states: left.visited.len(),
            right_states: right.visited.len(),
            left_layers: left.layers,
            right_layers: right.layers,
            state_limit_hit: left.limit_hit || right.limit_hit,
        }))
    }
}

fn best_meet(left: &Frontier, right: &Frontier, depth: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, &FormalSum, usize, usize)> = None;
    for (li, (state, node)) in left.visited.iter().enumerate() {
        let Some((ri, _, rnode)) = right.visited.get_full(state) else {
            continue;
        };
        let total = node.depth + rnode.depth;
        if total > depth {
            continue;
        }
        let better = match best {
            None => true,
            Some((bt, bs, _, _)) => (total, state) < (bt, bs),
        };
        if better {
            best = Some((total, state, li, ri));
        }
    }
    best.map(|(_, _, li, ri)| (li, ri))
}

fn join(
    engine: &Rewriter<'_>,
    left: &Frontier,
    right: &Frontier,
    li: usize,
    ri: usize,
    start: FormalSum,
    end: FormalSum,
) -> ProofTrace {
    let mut steps = left.path_to(li);
    let mut state = left.visited.get_index(li).unwrap().0.clone();
    // walk the right path backwards, inverting each step
    let mut back = right.path_to(ri);
    back.reverse();
    for step in back {
        let app = step.app.inverse();
        let rule = engine.rules.get(&app.rule).expect("indexed rule");
        let inv = apply_step(engine.p, rule, &state, &app).expect("inverse of a valid step");
        state = inv.after.clone();
        steps.push(inv);
    }
    debug_assert_eq!(state, end);
    ProofTrace { start, end, steps }
}
