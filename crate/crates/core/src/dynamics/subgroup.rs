//! Finitely generated subgroups of a free group via Stallings folding.
//!
//! The folded graph reads exactly the reduced words of the subgroup as
//! non-backtracking closed walks at the base vertex, which turns orbit
//! counting and limit-set sampling into dynamic programs over
//! `(vertex, incoming letter)` states.

use std::collections::BTreeMap;

use serde::Serialize;

use super::classify_tree;
use crate::error::{Error, Result};
use crate::word::{GroupWord, Letter};

/// A folded Stallings graph with base vertex 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitAutomaton {
    rank: u8,
    // next[v][letter code]
    next: Vec<Vec<Option<usize>>>,
}

/// Outcome of the non-elementarity semi-decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonElementary {
    Yes,
    No,
    Inconclusive,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl OrbitAutomaton {
    /// The whole group: one vertex with a loop for every letter.
    pub fn full(rank: u8) -> Self {
        OrbitAutomaton {
            rank,
            next: vec![vec![Some(0); 2 * rank as usize]],
        }
    }

    pub fn from_generators(rank: u8, generators: &[GroupWord]) -> Result<Self> {
        for g in generators {
            if g.min_rank() > rank {
                return Err(Error::invalid_word(
                    g.to_string(),
                    format!("not a word in the rank-{rank} free group"),
                ));
            }
        }
        let mut vertices = 1usize;
        let mut edges: Vec<(usize, Letter, usize)> = Vec::new();
        for g in generators.iter().filter(|g| !g.is_empty()) {
            let mut at = 0;
            for (i, &l) in g.letters().iter().enumerate() {
                let to = if i + 1 == g.len() {
                    0
                } else {
                    vertices += 1;
                    vertices - 1
                };
                edges.push((at, l, to));
                at = to;
            }
        }
        let mut parent: Vec<usize> = (0..vertices).collect();
        loop {
            let mut changed = false;
            let mut seen: BTreeMap<(usize, Letter), usize> = BTreeMap::new();
            for &(u, l, v) in &edges {
                for (s, lab, t) in [(u, l, v), (v, l.inverse(), u)] {
                    let (s, t) = (find(&mut parent, s), find(&mut parent, t));
                    match seen.get(&(s, lab)) {
                        Some(&t0) => {
                            let t0 = find(&mut parent, t0);
                            if t0 != t {
                                // keep the smaller representative so the base stays 0
                                let (keep, drop) = (t0.min(t), t0.max(t));
                                parent[drop] = keep;
                                changed = true;
                            }
                        }
                        None => {
                            seen.insert((s, lab), t);
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
        for v in 0..vertices {
            let r = find(&mut parent, v);
            let next_id = ids.len();
            ids.entry(r).or_insert(next_id);
        }
        let mut next = vec![vec![None; 2 * rank as usize]; ids.len()];
        for &(u, l, v) in &edges {
            let (u, v) = (ids[&find(&mut parent, u)], ids[&find(&mut parent, v)]);
            next[u][l.code() as usize] = Some(v);
            next[v][l.inverse().code() as usize] = Some(u);
        }
        Ok(OrbitAutomaton { rank, next })
    }

    pub fn rank_ambient(&self) -> u8 {
        self.rank
    }

    pub fn vertices(&self) -> usize {
        self.next.len()
    }

    pub fn edges(&self) -> usize {
        self.next.iter().flatten().filter(|x| x.is_some()).count() / 2
    }

    /// Rank of the subgroup, `E − V + 1`.
    pub fn subgroup_rank(&self) -> usize {
        self.edges() + 1 - self.vertices()
    }

    pub fn step(&self, v: usize, l: Letter) -> Option<usize> {
        self.next[v][l.code() as usize]
    }

    /// Reads a reduced word from the base vertex.
    pub fn read(&self, w: &GroupWord) -> Option<usize> {
        w.letters().iter().try_fold(0, |v, &l| self.step(v, l))
    }

    pub fn contains(&self, w: &GroupWord) -> bool {
        self.read(w) == Some(0)
    }

    fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        Letter::alphabet(self.rank)
    }

    /// State index for `(vertex, incoming letter)`; slot `2k` means "none".
    fn state(&self, v: usize, incoming: Option<Letter>) -> usize {
        let slots = 2 * self.rank as usize + 1;
        v * slots + incoming.map_or(2 * self.rank as usize, |l| l.code() as usize)
    }

    fn state_count(&self) -> usize {
        self.vertices() * (2 * self.rank as usize + 1)
    }

    /// State reached by reading `w` from the base, if readable.
    pub fn state_after(&self, w: &GroupWord) -> Option<usize> {
        self.read(w).map(|v| self.state(v, w.last()))
    }

    /// Number of subgroup elements of each word length `0..=r`.
    pub fn sphere_counts(&self, r: usize) -> Result<Vec<u128>> {
        let mut cur = vec![0u128; self.state_count()];
        cur[self.state(0, None)] = 1;
        let mut out = Vec::with_capacity(r + 1);
        for step in 0..=r {
            let at_base: u128 = (0..=2 * self.rank as usize)
                .map(|slot| cur[slot])
                .try_fold(0u128, |a, b| a.checked_add(b))
                .ok_or_else(|| Error::Overflow("orbit count".into()))?;
            out.push(at_base);
            if step == r {
                break;
            }
            let mut nxt = vec![0u128; cur.len()];
            for v in 0..self.vertices() {
                for incoming in std::iter::once(None).chain(self.letters().map(Some)) {
                    let c = cur[self.state(v, incoming)];
                    if c == 0 {
                        continue;
                    }
                    for l in self.letters() {
                        if Some(l.inverse()) == incoming {
                            continue;
                        }
                        if let Some(to) = self.step(v, l) {
                            let s = self.state(to, Some(l));
                            nxt[s] = nxt[s]
                                .checked_add(c)
                                .ok_or_else(|| Error::Overflow("orbit count".into()))?;
                        }
                    }
                }
            }
            cur = nxt;
        }
        Ok(out)
    }

    /// `table[L][s]`: number of non-backtracking walks of length `L` from
    /// state `s` that end at the base vertex.
    pub fn continuation_table(&self, max_len: usize) -> Vec<Vec<f64>> {
        let n = self.state_count();
        let mut table = Vec::with_capacity(max_len + 1);
        let mut base = vec![0.0; n];
        // the states at the base vertex, one per incoming letter and the start
        base[..=2 * self.rank as usize].fill(1.0);
        table.push(base);
        for len in 1..=max_len {
            let prev = &table[len - 1];
            let mut cur = vec![0.0; n];
            for v in 0..self.vertices() {
                for incoming in std::iter::once(None).chain(self.letters().map(Some)) {
                    let mut acc = 0.0;
                    for l in self.letters() {
                        if Some(l.inverse()) == incoming {
                            continue;
                        }
                        if let Some(to) = self.step(v, l) {
                            acc += prev[self.state(to, Some(l))];
                        }
                    }
                    cur[self.state(v, incoming)] = acc;
                }
            }
            table.push(cur);
        }
        table
    }

    /// States from which some non-backtracking walk returns to the base.
    fn returning_states(&self) -> Vec<bool> {
        let mut ok = vec![false; self.state_count()];
        ok[..=2 * self.rank as usize].fill(true);
        loop {
            let mut changed = false;
            for v in 0..self.vertices() {
                for incoming in std::iter::once(None).chain(self.letters().map(Some)) {
                    let s = self.state(v, incoming);
                    if ok[s] {
                        continue;
                    }
                    let reach = self.letters().any(|l| {
                        Some(l.inverse()) != incoming
                            && self
                                .step(v, l)
                                .is_some_and(|to| ok[self.state(to, Some(l))])
                    });
                    if reach {
                        ok[s] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                return ok;
            }
        }
    }

    /// Depth-`n` cells containing subgroup elements of length `≥ n`, in
    /// shortlex order.
    pub fn limit_cells(&self, depth: usize) -> Vec<GroupWord> {
        if depth == 0 {
            return Vec::new();
        }
        let ok = self.returning_states();
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<Letter>, usize)> = vec![(Vec::new(), 0)];
        while let Some((prefix, v)) = stack.pop() {
            if prefix.len() == depth {
                if ok[self.state(v, prefix.last().copied())] {
                    out.push(GroupWord::from_reduced(prefix));
                }
                continue;
            }
            // push in reverse so the walk visits letters in alphabet order
            let letters: Vec<Letter> = self.letters().collect();
            for &l in letters.iter().rev() {
                if prefix.last() == Some(&l.inverse()) {
                    continue;
                }
                if let Some(to) = self.step(v, l) {
                    if ok[self.state(to, Some(l))] {
                        let mut p = prefix.clone();
                        p.push(l);
                        stack.push((p, to));
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Semi-decides non-elementarity: `No` when the subgroup is cyclic or
    /// trivial, `Yes` when at least three limit cells are visible at
    /// `depth` and two generators (or a generator and a product of two) have
    /// distinct fixed-point pairs, `Inconclusive` otherwise.
    pub fn is_non_elementary(&self, generators: &[GroupWord], depth: usize) -> NonElementary {
        if self.subgroup_rank() <= 1 {
            return NonElementary::No;
        }
        if self.limit_cells(depth).len() < 3 {
            return NonElementary::Inconclusive;
        }
        let gens: Vec<&GroupWord> = generators.iter().filter(|g| !g.is_empty()).collect();
        let mut candidates: Vec<GroupWord> = gens.iter().map(|g| (*g).clone()).collect();
        for (i, g) in gens.iter().enumerate() {
            for h in &gens[i + 1..] {
                candidates.push(g.mul(h));
            }
        }
        let pairs: Vec<_> = candidates
            .iter()
            .filter(|g| !g.is_empty())
            .filter_map(|g| classify_tree(g).fixed_points)
            .collect();
        let independent = pairs.iter().enumerate().any(|(i, (p, m))| {
            pairs[i + 1..]
                .iter()
                .any(|(q, n)| !((p == q && m == n) || (p == n && m == q)))
        });
        if independent {
            NonElementary::Yes
        } else {
            NonElementary::Inconclusive
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::FreeGroup;

    fn words(ws: &[&str]) -> Vec<GroupWord> {
        ws.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn folding_examples() {
        let h = OrbitAutomaton::from_generators(2, &words(&["a", "b"])).unwrap();
        assert_eq!(h.vertices(), 1);
        assert_eq!(h.subgroup_rank(), 2);
        // ⟨ab, aB⟩ folds to a graph of rank 2 with 2 vertices
        let h = OrbitAutomaton::from_generators(2, &words(&["ab", "aB"])).unwrap();
        assert_eq!(h.subgroup_rank(), 2);
        // (aB)⁻¹·ab = bb
        assert!(h.contains(&"bb".parse().unwrap()));
        assert!(!h.contains(&"a".parse().unwrap()));
        assert!(!h.contains(&"ba".parse().unwrap()));
        // redundant generators fold away
        let h = OrbitAutomaton::from_generators(2, &words(&["a", "aa", "ba", "b"])).unwrap();
        assert_eq!(h.subgroup_rank(), 2);
        assert_eq!(h.vertices(), 1);
        let h = OrbitAutomaton::from_generators(2, &words(&["ab", "abab"])).unwrap();
        assert_eq!(h.subgroup_rank(), 1);
    }

    /// Orbit counts agree with membership tests over the whole ball.
    #[test]
    fn sphere_counts_match_membership_scan() {
        let f = FreeGroup::new(2).unwrap();
        for gens in [
            vec!["a"],
            vec!["ab", "aB"],
            vec!["aab", "bA", "BBa"],
            vec![],
        ] {
            let h = OrbitAutomaton::from_generators(2, &words(&gens)).unwrap();
            let counts = h.sphere_counts(7).unwrap();
            for (n, &c) in counts.iter().enumerate() {
                let brute = f.sphere(n).into_iter().filter(|w| h.contains(w)).count();
                assert_eq!(c, brute as u128, "{gens:?} radius {n}");
            }
        }
        let full = OrbitAutomaton::full(2);
        assert_eq!(full.sphere_counts(4).unwrap(), vec![1, 4, 12, 36, 108]);
    }

    #[test]
    fn limit_cells() {
        let full = OrbitAutomaton::full(2);
        assert_eq!(full.limit_cells(3).len(), 36);
        let cyc = OrbitAutomaton::from_generators(2, &words(&["a"])).unwrap();
        let cells: Vec<String> = cyc.limit_cells(3).iter().map(|w| w.to_string()).collect();
        assert_eq!(cells, ["aaa", "AAA"]);
        let trivial = OrbitAutomaton::from_generators(2, &[]).unwrap();
        assert!(trivial.limit_cells(2).is_empty());
        // monotone under refinement
        let h = OrbitAutomaton::from_generators(2, &words(&["ab", "bA"])).unwrap();
        let coarse = h.limit_cells(3);
        for c in h.limit_cells(5) {
            assert!(coarse.contains(&c.prefix(3)));
        }
    }

    #[test]
    fn continuation_table_counts_returning_walks() {
        let h = OrbitAutomaton::from_generators(2, &words(&["ab", "aB"])).unwrap();
        let t = h.continuation_table(6);
        let f = FreeGroup::new(2).unwrap();
        // from the state after reading "a", count words "a"·s in H of length 1+L
        let a: GroupWord = "a".parse().unwrap();
        let s = h.state_after(&a).unwrap();
        for (len, row) in t.iter().enumerate() {
            let brute = f
                .sphere(len + 1)
                .into_iter()
                .filter(|w| w.first() == a.first() && h.contains(w))
                .count();
            assert_eq!(row[s], brute as f64);
        }
    }

    #[test]
    fn non_elementary_verdicts() {
        let check = |gens: &[&str]| {
            let g = words(gens);
            OrbitAutomaton::from_generators(2, &g)
                .unwrap()
                .is_non_elementary(&g, 4)
        };
        assert_eq!(check(&["a", "b"]), NonElementary::Yes);
        assert_eq!(check(&["a"]), NonElementary::No);
        assert_eq!(check(&[]), NonElementary::No);
        assert_eq!(check(&["ab", "abab"]), NonElementary::No);
        assert_eq!(check(&["aab", "bA"]), NonElementary::Yes);
    }
}
