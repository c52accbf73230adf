//! Exhaustive small-lasso satisfiability, independent of the library's
//! automata and evaluator.

use std::collections::{BTreeSet, HashMap};

use ltlbridge::automata::LassoWitness;
use ltlbridge::ltl::{AtomName, Formula};
use rand::Rng;

/// Subformulas in post-order (children before parents).
pub struct Subs {
    pub nodes: Vec<Formula>,
    kids: Vec<Vec<usize>>,
    index: HashMap<Formula, usize>,
}

impl Subs {
    pub fn new(f: &Formula) -> Self {
        let mut s = Subs { nodes: Vec::new(), kids: Vec::new(), index: HashMap::new() };
        s.add(f);
        s
    }

    fn add(&mut self, f: &Formula) -> usize {
        if let Some(&i) = self.index.get(f) {
            return i;
        }
        let kids = f.children().into_iter().map(|c| self.add(c)).collect();
        let i = self.nodes.len();
        self.nodes.push(f.clone());
        self.kids.push(kids);
        self.index.insert(f.clone(), i);
        i
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Value of node `i` at a position with atoms `event`. `now(c)` and
    /// `next(c)` give child values here and at the successor, `later` the
    /// value of `i` itself at the successor.
    fn eval(&self, i: usize, event: &BTreeSet<AtomName>, now: impl Fn(usize) -> bool, next: impl Fn(usize) -> bool, later: bool) -> bool {
        use Formula::*;
        let k = &self.kids[i];
        match &self.nodes[i] {
            True => true,
            False => false,
            Atom(a) => event.contains(a),
            Not(_) => !now(k[0]),
            And(..) => now(k[0]) && now(k[1]),
            Or(..) => now(k[0]) || now(k[1]),
            Implies(..) => !now(k[0]) || now(k[1]),
            Iff(..) => now(k[0]) == now(k[1]),
            Next(_) => next(k[0]),
            Globally(_) => now(k[0]) && later,
            Eventually(_) => now(k[0]) || later,
            Until(..) | WeakUntil(..) => now(k[1]) || (now(k[0]) && later),
            Release(..) => now(k[1]) && (now(k[0]) || later),
        }
    }

    /// Greatest-fixpoint operators start from true, least from false.
    fn greatest(&self, i: usize) -> bool {
        matches!(self.nodes[i], Formula::Globally(_) | Formula::WeakUntil(..) | Formula::Release(..))
    }

    /// Truth vector at the first position of the cycle `events`.
    pub fn on_loop(&self, events: &[BTreeSet<AtomName>]) -> Vec<bool> {
        let n = events.len();
        let mut vals = vec![vec![false; n]; self.nodes.len()];
        for i in 0..self.nodes.len() {
            let (done, rest) = vals.split_at_mut(i);
            let row = &mut rest[0];
            row.iter_mut().for_each(|x| *x = self.greatest(i));
            // nodes below `i` are final; iterate `i` to its fixpoint
            loop {
                let mut changed = false;
                for p in (0..n).rev() {
                    let s = (p + 1) % n;
                    let x = self.eval(i, &events[p], |c| done[c][p], |c| done[c][s], row[s]);
                    if x != row[p] {
                        row[p] = x;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        vals.iter().map(|row| row[0]).collect()
    }

    /// Truth vector at a prefix position with atoms `event` whose successor
    /// has vector `next`.
    pub fn before(&self, event: &BTreeSet<AtomName>, next: &[bool]) -> Vec<bool> {
        let mut now: Vec<bool> = Vec::with_capacity(self.nodes.len());
        for i in 0..self.nodes.len() {
            let x = self.eval(i, event, |c| now[c], |c| next[c], next[i]);
            now.push(x);
        }
        now
    }
}

/// Independent lasso evaluation.
pub fn holds_on(f: &Formula, w: &LassoWitness) -> bool {
    let subs = Subs::new(f);
    let mut v = subs.on_loop(&w.loop_);
    for e in w.prefix.iter().rev() {
        v = subs.before(e, &v);
    }
    v[subs.root()]
}

/// All events over `atoms`.
pub fn events(atoms: &[AtomName]) -> Vec<BTreeSet<AtomName>> {
    (0..1usize << atoms.len())
        .map(|m| atoms.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| a.clone()).collect())
        .collect()
}

fn sequences(alphabet: &[BTreeSet<AtomName>], len: usize) -> Vec<Vec<BTreeSet<AtomName>>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s| {
                alphabet.iter().map(move |e| {
                    let mut t = s.clone();
                    t.push(e.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Whether some lasso with prefix length <= `max_prefix` and loop length in
/// `1..=max_loop` over events of `atoms` satisfies `f`. Exhaustive: every
/// loop is evaluated, then prefixes are prepended one event at a time over
/// the distinct truth vectors reached so far.
pub fn small_model_exists(f: &Formula, atoms: &[AtomName], max_prefix: usize, max_loop: usize) -> bool {
    let subs = Subs::new(f);
    let alphabet = events(atoms);
    let mut frontier: BTreeSet<Vec<bool>> = BTreeSet::new();
    for len in 1..=max_loop {
        for cycle in sequences(&alphabet, len) {
            frontier.insert(subs.on_loop(&cycle));
        }
    }
    let root = subs.root();
    for _ in 0..=max_prefix {
        if frontier.iter().any(|v| v[root]) {
            return true;
        }
        frontier = frontier.iter().flat_map(|v| alphabet.iter().map(|e| subs.before(e, v))).collect();
    }
    false
}

/// Random formula in negation normal form over `atoms`, depth at most
/// `max_depth` (leaves have depth 1).
pub fn random_nnf<R: Rng>(rng: &mut R, atoms: &[AtomName], max_depth: usize) -> Formula {
    if max_depth <= 1 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            k => {
                let a = Formula::Atom(atoms[rng.gen_range(0..atoms.len())].clone());
                if k % 2 == 0 {
                    Formula::not(a)
                } else {
                    a
                }
            }
        };
    }
    let d = max_depth - 1;
    match rng.gen_range(0..6) {
        0 => Formula::and(random_nnf(rng, atoms, d), random_nnf(rng, atoms, d)),
        1 => Formula::or(random_nnf(rng, atoms, d), random_nnf(rng, atoms, d)),
        2 => Formula::next(random_nnf(rng, atoms, d)),
        3 => Formula::until(random_nnf(rng, atoms, d), random_nnf(rng, atoms, d)),
        4 => Formula::release(random_nnf(rng, atoms, d), random_nnf(rng, atoms, d)),
        // G and F shapes
        _ if rng.gen_bool(0.5) => Formula::release(Formula::False, random_nnf(rng, atoms, d)),
        _ => Formula::until(Formula::True, random_nnf(rng, atoms, d)),
    }
}
