use std::collections::{BTreeSet, HashMap};

use super::bitset::BitSet;
use super::{Edge, GenBuchiAutomaton, SymbolicLabel};
use crate::ltl::{AtomName, Formula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableauError {
    #[error("formula is not in negation normal form: {0}")]
    NotNnf(Formula),
    #[error("automaton exceeds {limit} edges")]
    TooLarge { limit: usize },
}

/// Interned subformula.
#[derive(Debug, Clone)]
enum Sub {
    True,
    False,
    Lit { atom: usize, positive: bool },
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

struct Closure {
    subs: Vec<Sub>,
    ids: HashMap<Formula, usize>,
    atoms: Vec<AtomName>,
    /// `(atom, positive)` -> sub id
    literals: HashMap<(usize, bool), usize>,
}

impl Closure {
    fn build(f: &Formula) -> Result<(Closure, usize), TableauError> {
        let atoms: Vec<AtomName> = f.atoms().into_iter().collect();
        let mut c = Closure { subs: Vec::new(), ids: HashMap::new(), atoms, literals: HashMap::new() };
        let root = c.intern(f)?;
        Ok((c, root))
    }

    fn atom_index(&self, a: &AtomName) -> usize {
        self.atoms.binary_search(a).expect("atom collected")
    }

    fn intern(&mut self, f: &Formula) -> Result<usize, TableauError> {
        if let Some(&id) = self.ids.get(f) {
            return Ok(id);
        }
        let sub = match f {
            Formula::True => Sub::True,
            Formula::False => Sub::False,
            Formula::Atom(a) => Sub::Lit { atom: self.atom_index(a), positive: true },
            Formula::Not(inner) => match &**inner {
                Formula::Atom(a) => Sub::Lit { atom: self.atom_index(a), positive: false },
                _ => return Err(TableauError::NotNnf(f.clone())),
            },
            Formula::And(a, b) => Sub::And(self.intern(a)?, self.intern(b)?),
            Formula::Or(a, b) => Sub::Or(self.intern(a)?, self.intern(b)?),
            Formula::Next(a) => Sub::Next(self.intern(a)?),
            Formula::Until(a, b) => Sub::Until(self.intern(a)?, self.intern(b)?),
            Formula::Release(a, b) => Sub::Release(self.intern(a)?, self.intern(b)?),
            _ => return Err(TableauError::NotNnf(f.clone())),
        };
        let id = self.subs.len();
        if let Sub::Lit { atom, positive } = sub {
            self.literals.insert((atom, positive), id);
        }
        self.subs.push(sub);
        self.ids.insert(f.clone(), id);
        Ok(id)
    }
}

struct Work {
    new: BitSet,
    old: BitSet,
    next: BitSet,
}

/// All consistent expansions of the obligation set `todo` into
/// `(old, next)` pairs: `old` holds what is asserted now, `next` what must
/// hold from the following position on.
fn expand(closure: &Closure, todo: &BitSet, width: usize, limit: usize) -> Result<Vec<(BitSet, BitSet)>, TableauError> {
    let empty = BitSet::with_capacity(width);
    let mut out = Vec::new();
    let mut stack = vec![Work { new: todo.clone(), old: empty.clone(), next: empty }];
    while let Some(mut w) = stack.pop() {
        let Some(eta) = w.new.first() else {
            out.push((w.old, w.next));
            if out.len() > limit {
                return Err(TableauError::TooLarge { limit });
            }
            continue;
        };
        w.new.remove(eta);
        if w.old.contains(eta) {
            stack.push(w);
            continue;
        }
        match closure.subs[eta] {
            Sub::False => {}
            Sub::True => {
                w.old.insert(eta);
                stack.push(w);
            }
            Sub::Lit { atom, positive } => {
                let clash = closure.literals.get(&(atom, !positive)).is_some_and(|&n| w.old.contains(n));
                if !clash {
                    w.old.insert(eta);
                    stack.push(w);
                }
            }
            Sub::And(a, b) => {
                w.old.insert(eta);
                for x in [a, b] {
                    if !w.old.contains(x) {
                        w.new.insert(x);
                    }
                }
                stack.push(w);
            }
            Sub::Next(a) => {
                w.old.insert(eta);
                w.next.insert(a);
                stack.push(w);
            }
            Sub::Or(a, b) | Sub::Until(a, b) | Sub::Release(a, b) => {
                w.old.insert(eta);
                // no split when the branch asking for less is already forced
                let forced = |x: usize| w.old.contains(x) || w.new.contains(x);
                let covered = match closure.subs[eta] {
                    Sub::Or(..) => forced(a) || forced(b),
                    Sub::Until(..) => forced(b),
                    _ => forced(a),
                };
                if covered {
                    if let Sub::Release(..) = closure.subs[eta] {
                        for x in [a, b] {
                            if !w.old.contains(x) {
                                w.new.insert(x);
                            }
                        }
                    }
                    stack.push(w);
                    continue;
                }
                let mut first = Work { new: w.new.clone(), old: w.old.clone(), next: w.next.clone() };
                let mut second = w;
                match closure.subs[eta] {
                    Sub::Or(..) => {
                        first.new.insert(a);
                        second.new.insert(b);
                    }
                    Sub::Until(..) => {
                        second.new.insert(a);
                        second.next.insert(eta);
                        first.new.insert(b);
                    }
                    _ => {
                        first.new.insert(a);
                        first.new.insert(b);
                        second.new.insert(b);
                        second.next.insert(eta);
                    }
                }
                for x in [&mut first, &mut second] {
                    let done: Vec<usize> = x.new.iter().filter(|i| x.old.contains(*i)).collect();
                    for i in done {
                        x.new.remove(i);
                    }
                }
                // LIFO: `first` is expanded before `second`
                stack.push(second);
                stack.push(first);
            }
        }
    }
    Ok(out)
}

/// Tableau states expanded on demand.
pub(crate) struct Tableau {
    closure: Closure,
    width: usize,
    /// `(a U b, b)` per acceptance set
    untils: Vec<(usize, usize)>,
    atoms: BTreeSet<AtomName>,
    states: Vec<BitSet>,
    index: HashMap<BitSet, usize>,
    pub(crate) edges: Vec<Edge>,
    /// Acceptance sets of each edge, ascending.
    pub(crate) marks: Vec<Vec<usize>>,
    out: Vec<Option<Vec<usize>>>,
    max_edges: usize,
}

impl Tableau {
    pub(crate) fn new(f: &Formula, max_edges: usize) -> Result<Tableau, TableauError> {
        let atoms = f.atoms();
        let f = simplify(f)?;
        let (closure, root) = Closure::build(&f)?;
        let width = closure.subs.len();
        let untils = closure
            .subs
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Sub::Until(_, b) => Some((i, *b)),
                _ => None,
            })
            .collect();
        let mut start = BitSet::with_capacity(width);
        start.insert(root);
        Ok(Tableau {
            closure,
            width,
            untils,
            atoms,
            states: vec![start.clone()],
            index: HashMap::from([(start, 0)]),
            edges: Vec::new(),
            marks: Vec::new(),
            out: vec![None],
            max_edges,
        })
    }

    pub(crate) fn num_sets(&self) -> usize {
        self.untils.len()
    }

    pub(crate) fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Outgoing edges of `s`, expanding the state on first use.
    pub(crate) fn successors(&mut self, s: usize) -> Result<&[usize], TableauError> {
        if self.out[s].is_none() {
            let ids = self.expand_state(s)?;
            self.out[s] = Some(ids);
        }
        Ok(self.out[s].as_deref().unwrap_or_default())
    }

    fn expand_state(&mut self, s: usize) -> Result<Vec<usize>, TableauError> {
        let closure = &self.closure;
        let natoms = closure.atoms.len();
        let mut branches = Vec::new();
        for (old, next) in expand(closure, &self.states[s], self.width, self.max_edges)? {
            let mut required = BitSet::with_capacity(natoms);
            let mut forbidden = BitSet::with_capacity(natoms);
            for i in old.iter() {
                if let Sub::Lit { atom, positive } = closure.subs[i] {
                    if positive {
                        required.insert(atom);
                    } else {
                        forbidden.insert(atom);
                    }
                }
            }
            let mut marks = BitSet::with_capacity(self.untils.len());
            for (k, &(u, b)) in self.untils.iter().enumerate() {
                if !old.contains(u) || old.contains(b) {
                    marks.insert(k);
                }
            }
            branches.push(Branch { next, required, forbidden, marks });
        }
        // drop a branch when another one to the same state asks for less and
        // accepts at least as much
        branches.sort_by_key(|b| (b.required.len() + b.forbidden.len(), usize::MAX - b.marks.len()));
        let mut kept: Vec<Branch> = Vec::new();
        let mut by_dst: HashMap<BitSet, Vec<usize>> = HashMap::new();
        for b in branches {
            let group = by_dst.entry(b.next.clone()).or_default();
            let subsumed = group.iter().any(|&k| {
                let o = &kept[k];
                o.required.is_subset(&b.required) && o.forbidden.is_subset(&b.forbidden) && b.marks.is_subset(&o.marks)
            });
            if !subsumed {
                group.push(kept.len());
                kept.push(b);
            }
        }
        let names = |set: &BitSet| -> BTreeSet<AtomName> { set.iter().map(|a| closure.atoms[a].clone()).collect() };
        let mut out: Vec<(usize, SymbolicLabel, Vec<usize>)> = Vec::with_capacity(kept.len());
        for b in kept {
            let label = SymbolicLabel { required: names(&b.required), forbidden: names(&b.forbidden) };
            let marks = b.marks.iter().collect();
            let dst = match self.index.get(&b.next) {
                Some(&d) => d,
                None => {
                    let d = self.states.len();
                    self.states.push(b.next.clone());
                    self.index.insert(b.next, d);
                    self.out.push(None);
                    d
                }
            };
            out.push((dst, label, marks));
        }
        out.sort();
        let mut ids = Vec::with_capacity(out.len());
        for (dst, label, marks) in out {
            ids.push(self.edges.len());
            self.edges.push(Edge { src: s, dst, label });
            self.marks.push(marks);
        }
        if self.edges.len() > self.max_edges {
            return Err(TableauError::TooLarge { limit: self.max_edges });
        }
        Ok(ids)
    }
}

struct Branch {
    next: BitSet,
    required: BitSet,
    forbidden: BitSet,
    marks: BitSet,
}

/// Builds a generalized Büchi automaton accepting exactly the traces that
/// satisfy `f`, which must be in negation normal form (see
/// [`crate::ltl::to_nnf`]).
///
/// The formula is first simplified with constant folding and idempotence
/// rules. Each state is a set of obligations, starting from `{f}`. Expanding
/// a state splits it on disjunctions, `U` and `R` into branches; every
/// consistent branch becomes an edge labelled with the branch's literals and
/// leading to the state made of its `X` obligations. An edge belongs to the
/// acceptance set of `a U b` unless it postpones `a U b` (asserts it without
/// `b`).
pub fn ltl_to_gba(f: &Formula) -> Result<GenBuchiAutomaton, TableauError> {
    ltl_to_gba_bounded(f, usize::MAX)
}

/// [`ltl_to_gba`] that gives up with [`TableauError::TooLarge`] once the
/// automaton, or the expansion of a single state, exceeds `max_edges` edges.
pub fn ltl_to_gba_bounded(f: &Formula, max_edges: usize) -> Result<GenBuchiAutomaton, TableauError> {
    let mut t = Tableau::new(f, max_edges)?;
    let mut s = 0;
    while s < t.num_states() {
        t.successors(s)?;
        s += 1;
    }
    // states are expanded in order, so edge ids are sorted by source
    let mut acceptance_sets = vec![Vec::new(); t.num_sets()];
    for (e, marks) in t.marks.iter().enumerate() {
        for &k in marks {
            acceptance_sets[k].push(e);
        }
    }
    Ok(GenBuchiAutomaton {
        atoms: t.atoms,
        num_states: t.states.len(),
        initial: vec![0],
        edges: t.edges,
        acceptance_sets,
    })
}

/// Language-preserving clean-up of an NNF formula.
fn simplify(f: &Formula) -> Result<Formula, TableauError> {
    use Formula::*;
    Ok(match f {
        True | False | Atom(_) => f.clone(),
        Not(a) if matches!(**a, Atom(_)) => f.clone(),
        And(a, b) => match (simplify(a)?, simplify(b)?) {
            (False, _) | (_, False) => False,
            (True, x) | (x, True) => x,
            (x, y) if x == y => x,
            (x, y) => Formula::and(x, y),
        },
        Or(a, b) => match (simplify(a)?, simplify(b)?) {
            (True, _) | (_, True) => True,
            (False, x) | (x, False) => x,
            (x, y) if x == y => x,
            (x, y) => Formula::or(x, y),
        },
        Next(a) => match simplify(a)? {
            x @ (True | False) => x,
            x => Formula::next(x),
        },
        Until(a, b) => match (simplify(a)?, simplify(b)?) {
            (_, x @ (True | False)) => x,
            (False, y) => y,
            (x, y) if x == y => x,
            (True, Until(c, d)) if *c == True => Formula::until(True, *d),
            (x, y) => Formula::until(x, y),
        },
        Release(a, b) => match (simplify(a)?, simplify(b)?) {
            (_, x @ (True | False)) => x,
            (True, y) => y,
            (x, y) if x == y => x,
            (False, Release(c, d)) if *c == False => Formula::release(False, *d),
            (x, y) => Formula::release(x, y),
        },
        _ => return Err(TableauError::NotNnf(f.clone())),
    })
}
