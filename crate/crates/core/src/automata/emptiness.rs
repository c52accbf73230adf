use std::collections::HashMap;

use super::tableau::Tableau;
use super::{Edge, Event, GenBuchiAutomaton, LassoWitness, StateId, TableauError};
use crate::ltl::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptinessResult {
    pub empty: bool,
    /// An accepted lasso, present exactly when `empty` is false.
    pub witness: Option<LassoWitness>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Color {
    White,
    Cyan,
    Blue,
    Red,
}

struct Frame {
    node: usize,
    /// Automaton edge used to enter the node, and whether the product edge
    /// is accepting.
    via: Option<(usize, bool)>,
    next: usize,
}

/// A generalized automaton whose successors may be computed on demand.
pub(crate) trait Explore {
    fn initial(&self) -> Vec<StateId>;
    fn num_sets(&self) -> usize;
    /// Edge ids leaving `s`.
    fn out(&mut self, s: StateId) -> Result<&[usize], TableauError>;
    fn edge(&self, e: usize) -> &Edge;
    /// Whether edge `e` belongs to acceptance set `k`.
    fn in_set(&self, e: usize, k: usize) -> bool;
}

struct Built<'a> {
    a: &'a GenBuchiAutomaton,
    succ: Vec<Vec<usize>>,
    membership: Vec<Vec<bool>>,
}

impl Explore for Built<'_> {
    fn initial(&self) -> Vec<StateId> {
        self.a.initial.clone()
    }
    fn num_sets(&self) -> usize {
        self.a.acceptance_sets.len()
    }
    fn out(&mut self, s: StateId) -> Result<&[usize], TableauError> {
        Ok(&self.succ[s])
    }
    fn edge(&self, e: usize) -> &Edge {
        &self.a.edges[e]
    }
    fn in_set(&self, e: usize, k: usize) -> bool {
        self.membership[e][k]
    }
}

impl Explore for Tableau {
    fn initial(&self) -> Vec<StateId> {
        vec![0]
    }
    fn num_sets(&self) -> usize {
        Tableau::num_sets(self)
    }
    fn out(&mut self, s: StateId) -> Result<&[usize], TableauError> {
        self.successors(s)
    }
    fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }
    fn in_set(&self, e: usize, k: usize) -> bool {
        self.marks[e].binary_search(&k).is_ok()
    }
}

/// Nested DFS over the counter product of a generalized automaton, built on
/// demand. Node `s * levels + c` is state `s` waiting for acceptance set `c`,
/// exactly as in [`degeneralize`](super::degeneralize).
struct Search<'g, G: Explore> {
    g: &'g mut G,
    levels: usize,
    color: Vec<Color>,
    /// Stack index of every cyan node.
    stack_pos: Vec<usize>,
    /// Accepting product edges `(source node, automaton edge)` whose split
    /// state is cyan, with the stack index of the source.
    cyan_edge: HashMap<(usize, usize), usize>,
    stack: Vec<Frame>,
}

/// Decides whether `a` accepts some infinite word.
///
/// The search runs on the degeneralized automaton (see
/// [`degeneralize`](super::degeneralize)), which is explored on the fly
/// rather than materialized. It is a nested depth-first search (blue search
/// with cyan stack detection, red search confined to blue states) in which
/// each accepting edge behaves like an accepting state placed in the middle
/// of the edge. Successors are explored in edge order, so the witness is
/// deterministic.
pub fn is_empty(a: &GenBuchiAutomaton) -> EmptinessResult {
    let mut g = Built { a, succ: a.successors(), membership: a.membership() };
    search(&mut g).expect("built automata need no expansion")
}

/// Emptiness of the automaton for the NNF formula `f`, deciding it while the
/// tableau is still being built. States are expanded only when the search
/// reaches them, so a witness is often found long before the automaton is
/// complete. Fails once more than `max_edges` edges have been created.
pub fn is_empty_on_the_fly(f: &Formula, max_edges: usize) -> Result<EmptinessResult, TableauError> {
    let mut t = Tableau::new(f, max_edges)?;
    search(&mut t)
}

fn search<G: Explore>(g: &mut G) -> Result<EmptinessResult, TableauError> {
    let levels = g.num_sets().max(1);
    let initial = g.initial();
    let mut s = Search { g, levels, color: Vec::new(), stack_pos: Vec::new(), cyan_edge: HashMap::new(), stack: Vec::new() };
    for init in initial {
        let node = init * levels;
        if s.color(node) == Color::White {
            if let Some(w) = s.blue(node)? {
                return Ok(EmptinessResult { empty: false, witness: Some(w) });
            }
        }
    }
    Ok(EmptinessResult { empty: true, witness: None })
}

impl<G: Explore> Search<'_, G> {
    fn color(&self, node: usize) -> Color {
        self.color.get(node).copied().unwrap_or(Color::White)
    }

    fn set_color(&mut self, node: usize, c: Color) {
        if node >= self.color.len() {
            self.color.resize(node + 1, Color::White);
            self.stack_pos.resize(node + 1, usize::MAX);
        }
        self.color[node] = c;
    }

    /// The `i`-th product edge out of `node`: automaton edge, target node,
    /// accepting.
    fn step(&mut self, node: usize, i: usize) -> Result<Option<(usize, usize, bool)>, TableauError> {
        let (s, c) = (node / self.levels, node % self.levels);
        let Some(&e) = self.g.out(s)?.get(i) else {
            return Ok(None);
        };
        let k = self.g.num_sets();
        let mut j = c;
        while j < k && self.g.in_set(e, j) {
            j += 1;
        }
        let (next, accepting) = if j >= k { (0, true) } else { (j, false) };
        Ok(Some((e, self.g.edge(e).dst * self.levels + next, accepting)))
    }

    fn push(&mut self, node: usize, via: Option<(usize, bool)>) {
        self.set_color(node, Color::Cyan);
        self.stack_pos[node] = self.stack.len();
        self.stack.push(Frame { node, via, next: 0 });
    }

    fn blue(&mut self, init: usize) -> Result<Option<LassoWitness>, TableauError> {
        self.push(init, None);
        while let Some(top) = self.stack.last_mut() {
            let (node, i) = (top.node, top.next);
            top.next += 1;
            if let Some((e, t, accepting)) = self.step(node, i)? {
                if !accepting {
                    if self.color(t) == Color::White {
                        self.push(t, Some((e, false)));
                    }
                    continue;
                }
                let src_pos = self.stack.len() - 1;
                match self.color(t) {
                    Color::Cyan => {
                        let start = self.stack_pos[t];
                        return Ok(Some(self.lasso(start, &[e])));
                    }
                    Color::White => {
                        self.cyan_edge.insert((node, e), src_pos);
                        self.push(t, Some((e, true)));
                    }
                    _ => {
                        self.cyan_edge.insert((node, e), src_pos);
                        let found = self.red(e, t)?;
                        self.cyan_edge.remove(&(node, e));
                        if found.is_some() {
                            return Ok(found);
                        }
                    }
                }
            } else {
                let frame = self.stack.pop().expect("non-empty");
                self.set_color(node, Color::Blue);
                if let Some((e, true)) = frame.via {
                    let src = self.stack.last().expect("accepting edge has a source").node;
                    let found = self.red(e, node)?;
                    self.cyan_edge.remove(&(src, e));
                    if found.is_some() {
                        return Ok(found);
                    }
                }
            }
        }
        Ok(None)
    }

    /// Red search behind the accepting edge `e` into node `t`; the edge's
    /// source is on top of the blue stack.
    fn red(&mut self, e: usize, t: usize) -> Result<Option<LassoWitness>, TableauError> {
        let top = self.stack.len() - 1;
        match self.color(t) {
            Color::Cyan => return Ok(Some(self.lasso(self.stack_pos[t], &[e]))),
            Color::Blue => self.set_color(t, Color::Red),
            _ => return Ok(None),
        }
        // (node, automaton edge used to enter it, next successor index)
        let mut path: Vec<(usize, usize, usize)> = vec![(t, e, 0)];
        while let Some(&mut (u, _, ref mut next)) = path.last_mut() {
            let i = *next;
            *next += 1;
            let Some((f, v, accepting)) = self.step(u, i)? else {
                path.pop();
                continue;
            };
            if accepting {
                if let Some(&pos) = self.cyan_edge.get(&(u, f)) {
                    // the loop closes at the source of `f`, which is `u`
                    let mut cycle = self.stack_edges(pos, top);
                    cycle.extend(path.iter().map(|p| p.1));
                    return Ok(Some(self.lasso_from(pos, cycle)));
                }
                continue;
            }
            match self.color(v) {
                Color::Cyan => {
                    let pos = self.stack_pos[v];
                    let mut cycle = self.stack_edges(pos, top);
                    cycle.extend(path.iter().map(|p| p.1));
                    cycle.push(f);
                    return Ok(Some(self.lasso_from(pos, cycle)));
                }
                Color::Blue => {
                    self.set_color(v, Color::Red);
                    path.push((v, f, 0));
                }
                _ => {}
            }
        }
        Ok(None)
    }

    /// Automaton edges leading from stack position `from` up to position `to`.
    fn stack_edges(&self, from: usize, to: usize) -> Vec<usize> {
        self.stack[from + 1..=to].iter().map(|f| f.via.expect("non-root frame").0).collect()
    }

    /// Lasso whose loop runs from stack position `start` to the top, then
    /// along `closing`.
    fn lasso(&self, start: usize, closing: &[usize]) -> LassoWitness {
        let mut cycle = self.stack_edges(start, self.stack.len() - 1);
        cycle.extend_from_slice(closing);
        self.lasso_from(start, cycle)
    }

    fn lasso_from(&self, start: usize, cycle: Vec<usize>) -> LassoWitness {
        let event = |e: usize| -> Event { self.g.edge(e).label.minimal_event() };
        LassoWitness {
            prefix: self.stack_edges(0, start).into_iter().map(event).collect(),
            loop_: cycle.into_iter().map(event).collect(),
        }
    }
}

/// Whether `a` has an accepting run over the trace denoted by `w`.
///
/// Builds the product of `a` with the positions of the lasso and looks for a
/// reachable strongly connected component that contains an edge of every
/// acceptance set. Independent of [`is_empty`]; used to replay witnesses.
pub fn accepts_lasso(a: &GenBuchiAutomaton, w: &LassoWitness) -> bool {
    if w.loop_.is_empty() {
        return false;
    }
    let n = w.prefix.len() + w.loop_.len();
    let node = |q: StateId, i: usize| q * n + i;
    let next_pos = |i: usize| if i + 1 < n { i + 1 } else { w.prefix.len() };
    let succ = a.successors();
    let membership = a.membership();
    // product edges: (target node, automaton edge)
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); a.num_states * n];
    for q in 0..a.num_states {
        for i in 0..n {
            for &e in &succ[q] {
                if a.edges[e].label.matches(w.event_at(i)) {
                    adj[node(q, i)].push((node(a.edges[e].dst, next_pos(i)), e));
                }
            }
        }
    }
    let roots: Vec<usize> = a.initial.iter().map(|&q| node(q, 0)).collect();
    let comp = tarjan(&adj, &roots);
    let k = a.acceptance_sets.len();
    let mut seen: std::collections::HashMap<usize, (bool, Vec<bool>)> = Default::default();
    for (x, out) in adj.iter().enumerate() {
        let Some(cx) = comp[x] else { continue };
        for &(y, e) in out {
            if comp[y] == Some(cx) {
                let entry = seen.entry(cx).or_insert_with(|| (false, vec![false; k]));
                entry.0 = true;
                for (j, m) in membership[e].iter().enumerate() {
                    entry.1[j] |= *m;
                }
            }
        }
    }
    seen.values().any(|(cyclic, sets)| *cyclic && sets.iter().all(|s| *s))
}

/// Component id for every node reachable from `roots`.
fn tarjan(adj: &[Vec<(usize, usize)>], roots: &[usize]) -> Vec<Option<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![None; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for &r in roots {
        if index[r] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(r, 0)];
        index[r] = counter;
        low[r] = counter;
        counter += 1;
        stack.push(r);
        on_stack[r] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if let Some(&(w, _)) = adj[v].get(*i) {
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    while let Some(x) = stack.pop() {
                        on_stack[x] = false;
                        comp[x] = Some(ncomp);
                        if x == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{evaluate_on_lasso, ltl_to_gba};
    use crate::ltl::{parse_infix, to_nnf, Formula};

    fn check(s: &str) -> (Formula, GenBuchiAutomaton, EmptinessResult) {
        let f = parse_infix(s).unwrap();
        let a = ltl_to_gba(&to_nnf(&f)).unwrap();
        let r = is_empty(&a);
        (f, a, r)
    }

    #[test]
    fn empty_languages() {
        for s in ["0", "p & !p", "(p U q) & G !q", "F p & G !p", "X p & X !p", "G F p & F G !p"] {
            let (_, _, r) = check(s);
            assert!(r.empty, "{s}");
            assert!(r.witness.is_none());
        }
    }

    #[test]
    fn witnesses_are_sound() {
        for s in [
            "1",
            "p",
            "G F p",
            "p U q",
            "G (p -> F q) & G F p",
            "(p U q) & (r U s)",
            "!(p U q) & F q",
            "G F p & G F !p",
            "X X X (p & X !p)",
            "(p R q) & F !q",
            "F G p & G F q",
        ] {
            let (f, a, r) = check(s);
            assert!(!r.empty, "{s}");
            let w = r.witness.unwrap();
            assert!(evaluate_on_lasso(&f, &w), "{s}: {w}");
            assert!(accepts_lasso(&a, &w), "{s}: {w}");
        }
    }

    #[test]
    fn gfp_witness_loop_has_p() {
        let (_, _, r) = check("G F p");
        let w = r.witness.unwrap();
        assert!(w.loop_.iter().any(|e| e.iter().any(|a| a.as_str() == "p")));
    }

    #[test]
    fn replay_rejects_wrong_traces() {
        let (_, a, _) = check("p U q");
        let no: crate::automata::Event = Default::default();
        let w = LassoWitness::new(vec![], vec![no]);
        assert!(!accepts_lasso(&a, &w));
    }
}
