use super::{Edge, GenBuchiAutomaton};

/// Counter construction: reduces `a` to an automaton with exactly one
/// acceptance set.
///
/// State `(s, c)` gets id `s * K + c` with `K = max(1, k)` for `k` acceptance
/// sets; `c` is the index of the next set the run is waiting for. Taking an
/// edge advances `c` past every consecutive set the edge belongs to. When the
/// counter runs past the last set the edge is accepting and the counter
/// resets. With zero sets every edge is accepting.
pub fn degeneralize(a: &GenBuchiAutomaton) -> GenBuchiAutomaton {
    let k = a.acceptance_sets.len();
    let levels = k.max(1);
    let membership = a.membership();
    let succ = a.successors();
    let mut edges = Vec::with_capacity(a.edges.len() * levels);
    let mut accepting = Vec::new();
    for s in 0..a.num_states {
        for c in 0..levels {
            for &i in &succ[s] {
                let e = &a.edges[i];
                let mut j = c;
                while j < k && membership[i][j] {
                    j += 1;
                }
                let (next, accept) = if j >= k { (0, true) } else { (j, false) };
                if accept {
                    accepting.push(edges.len());
                }
                edges.push(Edge { src: s * levels + c, dst: e.dst * levels + next, label: e.label.clone() });
            }
        }
    }
    GenBuchiAutomaton {
        atoms: a.atoms.clone(),
        num_states: a.num_states * levels,
        initial: a.initial.iter().map(|s| s * levels).collect(),
        edges,
        acceptance_sets: vec![accepting],
    }
}
