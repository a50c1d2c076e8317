//! Todd–Coxeter coset enumeration over the trivial subgroup, Felsch strategy.
//!
//! Cosets are defined in order (first undefined table entry, lowest coset then
//! lowest column) and every definition is followed by full deduction processing,
//! so the output numbering is deterministic. After the table closes, every
//! relator is traced at every coset and the cosets are renumbered by
//! breadth-first search from the trivial coset.

use std::collections::{BTreeSet, VecDeque};

use crate::cover::GroupPresentation;
use crate::group::FiniteGroup;
use crate::words::FreeWord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CosetError {
    #[error("coset enumeration did not close within {cap} cosets")]
    CapExceeded { cap: usize },
    #[error("relator {relator} uses generator '{name}' outside the presentation")]
    UnknownGenerator { relator: usize, name: String },
    #[error("coset cap must be at least 1")]
    ZeroCap,
    #[error("closed table fails relator {relator} at coset {coset}")]
    VerificationFailed { relator: usize, coset: usize },
}

const NONE: usize = usize::MAX;

/// The enumerated group with each element named by its breadth-first representative word.
#[derive(Debug, Clone)]
pub struct CosetTable {
    pub group: FiniteGroup,
    pub representatives: Vec<FreeWord>,
    pub cosets_defined: usize,
}

struct Enumerator {
    columns: usize,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    deductions: Vec<(usize, usize)>,
    cycles_by_column: Vec<Vec<Vec<usize>>>,
    cap: usize,
}

fn inv(c: usize) -> usize {
    c ^ 1
}

impl Enumerator {
    fn new_coset(&mut self) -> Result<usize, CosetError> {
        if self.table.len() >= self.cap {
            return Err(CosetError::CapExceeded { cap: self.cap });
        }
        self.table.push(vec![NONE; self.columns]);
        self.parent.push(self.table.len() - 1);
        Ok(self.table.len() - 1)
    }

    fn live(&self, a: usize) -> bool {
        self.parent[a] == a
    }

    fn set(&mut self, a: usize, c: usize, b: usize) {
        self.table[a][c] = b;
        self.table[b][inv(c)] = a;
        self.deductions.push((a, c));
    }

    fn rep(&mut self, k: usize) -> usize {
        let mut r = k;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut k = k;
        while self.parent[k] != r {
            let next = self.parent[k];
            self.parent[k] = r;
            k = next;
        }
        r
    }

    fn merge(&mut self, k: usize, l: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(k), self.rep(l));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi] = lo;
            queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for c in 0..self.columns {
                let f = self.table[e][c];
                if f == NONE {
                    continue;
                }
                if self.table[f][inv(c)] == e {
                    self.table[f][inv(c)] = NONE;
                }
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                if self.table[e1][c] != NONE {
                    let t = self.table[e1][c];
                    self.merge(f1, t, &mut queue);
                } else if self.table[f1][inv(c)] != NONE {
                    let t = self.table[f1][inv(c)];
                    self.merge(e1, t, &mut queue);
                } else {
                    self.set(e1, c, f1);
                }
            }
        }
    }

    /// Scans `cycle` at `alpha`, deducing a single missing entry or recording a coincidence.
    fn scan(&mut self, alpha: usize, cycle: &[usize]) {
        let r = cycle.len();
        let mut f = alpha;
        let mut i = 0;
        while i < r && self.table[f][cycle[i]] != NONE {
            f = self.table[f][cycle[i]];
            i += 1;
        }
        if i == r {
            if f != alpha {
                self.coincidence(f, alpha);
            }
            return;
        }
        let mut b = alpha;
        let mut j = r;
        while j > i && self.table[b][inv(cycle[j - 1])] != NONE {
            b = self.table[b][inv(cycle[j - 1])];
            j -= 1;
        }
        if j == i {
            self.coincidence(f, b);
        } else if j == i + 1 {
            self.set(f, cycle[i], b);
        }
    }

    fn process_deductions(&mut self) {
        while let Some((a, c)) = self.deductions.pop() {
            if !self.live(a) {
                continue;
            }
            for k in 0..self.cycles_by_column[c].len() {
                if !self.live(a) {
                    break;
                }
                let cycle = self.cycles_by_column[c][k].clone();
                self.scan(a, &cycle);
            }
            let b = self.table[a][c];
            if b != NONE && self.live(b) {
                let ic = inv(c);
                for k in 0..self.cycles_by_column[ic].len() {
                    if !self.live(b) {
                        break;
                    }
                    let cycle = self.cycles_by_column[ic][k].clone();
                    self.scan(b, &cycle);
                }
            }
        }
    }

    fn first_gap(&self) -> Option<(usize, usize)> {
        (0..self.table.len())
            .filter(|&a| self.live(a))
            .find_map(|a| (0..self.columns).find(|&c| self.table[a][c] == NONE).map(|c| (a, c)))
    }
}

fn relator_columns(pres: &GroupPresentation) -> Result<Vec<Vec<usize>>, CosetError> {
    pres.relators
        .iter()
        .enumerate()
        .map(|(ri, r)| {
            let mut cols = Vec::new();
            for (sym, e) in r.cyclic_core().letters() {
                let g = pres
                    .generators
                    .iter()
                    .position(|s| *s == sym)
                    .ok_or_else(|| CosetError::UnknownGenerator { relator: ri, name: sym.to_string() })?;
                cols.push(2 * g + usize::from(e < 0));
            }
            Ok(cols)
        })
        .collect()
}

/// Enumerates `⟨X | R⟩` with at most `cap` coset definitions.
pub fn coset_enumerate(pres: &GroupPresentation, cap: usize) -> Result<CosetTable, CosetError> {
    if cap == 0 {
        return Err(CosetError::ZeroCap);
    }
    let columns = 2 * pres.generators.len();
    let relators = relator_columns(pres)?;
    let mut cycles = BTreeSet::new();
    for r in relators.iter().filter(|r| !r.is_empty()) {
        let inverse: Vec<usize> = r.iter().rev().map(|&c| inv(c)).collect();
        for w in [r, &inverse] {
            for k in 0..w.len() {
                let mut rot = w[k..].to_vec();
                rot.extend_from_slice(&w[..k]);
                cycles.insert(rot);
            }
        }
    }
    let mut cycles_by_column = vec![Vec::new(); columns];
    for cyc in cycles {
        cycles_by_column[cyc[0]].push(cyc);
    }

    let mut e = Enumerator {
        columns,
        table: Vec::new(),
        parent: Vec::new(),
        deductions: Vec::new(),
        cycles_by_column,
        cap,
    };
    e.new_coset()?;
    while let Some((a, c)) = e.first_gap() {
        let b = e.new_coset()?;
        e.set(a, c, b);
        e.process_deductions();
    }

    let live: Vec<usize> = (0..e.table.len()).filter(|&a| e.live(a)).collect();
    for (ri, r) in relators.iter().enumerate() {
        for &a in &live {
            let end = r.iter().fold(a, |x, &c| if x == NONE || !e.live(x) { NONE } else { e.table[x][c] });
            if end != a {
                return Err(CosetError::VerificationFailed { relator: ri, coset: a });
            }
        }
    }

    // Breadth-first renumbering; representatives are shortlex-minimal in column order.
    let mut number = vec![NONE; e.table.len()];
    let mut order = vec![0];
    let mut reps = vec![FreeWord::identity()];
    number[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(a) = queue.pop_front() {
        for c in 0..columns {
            let b = e.table[a][c];
            if number[b] == NONE {
                number[b] = order.len();
                order.push(b);
                let sym = pres.generators[c / 2].clone();
                let letter = FreeWord::power_of(sym, if c % 2 == 0 { 1 } else { -1 });
                reps.push(reps[number[a]].mul(&letter));
                queue.push_back(b);
            }
        }
    }

    let words: Vec<Vec<usize>> = reps
        .iter()
        .map(|w| {
            w.letters()
                .map(|(s, x)| {
                    let g = pres.generators.iter().position(|t| *t == s).expect("generator");
                    2 * g + usize::from(x < 0)
                })
                .collect()
        })
        .collect();
    let names = reps.iter().map(|w| w.to_string()).collect();
    let group = FiniteGroup::from_fn(names, |i, j| {
        let end = words[j].iter().fold(order[i], |x, &c| e.table[x][c]);
        number[end]
    })
    .expect("coset table of the trivial subgroup is a group");
    Ok(CosetTable { group, representatives: reps, cosets_defined: e.table.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::group::are_isomorphic;
    use crate::words::Symbol;
    use crate::Limits;

    fn pres(gens: &[&str], rels: &[&str]) -> GroupPresentation {
        GroupPresentation {
            generators: gens.iter().map(|g| Symbol::new(g)).collect(),
            relators: rels.iter().map(|r| FreeWord::parse(r).unwrap()).collect(),
        }
    }

    fn order_of(gens: &[&str], rels: &[&str]) -> usize {
        coset_enumerate(&pres(gens, rels), 10_000).unwrap().group.order()
    }

    #[test]
    fn small_groups() {
        let t = coset_enumerate(&pres(&["x"], &["x^2"]), 100).unwrap();
        assert_eq!(t.group.order(), 2);
        assert_eq!(t.group.names(), &["1", "x"]);
        assert_eq!(order_of(&["x"], &["x^-2"]), 2);
        assert_eq!(order_of(&["x", "y"], &["x^2", "y^3", "(xy)^2"]), 6);
        assert_eq!(order_of(&["x", "y"], &["x^2", "y^3", "(xy)^3"]), 12);
        assert_eq!(order_of(&["x", "y"], &["x^2", "y^3", "(xy)^4"]), 24);
        assert_eq!(order_of(&["x", "y"], &["x^2", "y^3", "(xy)^5"]), 60);
        assert_eq!(order_of(&["a", "b"], &["a^8", "b^2 a^4", "b^-1 a b a"]), 16);
    }

    #[test]
    fn free_generator_exhausts_the_cap() {
        assert_eq!(coset_enumerate(&pres(&["x"], &[]), 50).unwrap_err(), CosetError::CapExceeded { cap: 50 });
        assert_eq!(
            coset_enumerate(&pres(&["x", "y"], &["x y x^-1 y^-1"]), 100).unwrap_err(),
            CosetError::CapExceeded { cap: 100 }
        );
    }

    #[test]
    fn recognizes_s3() {
        let t = coset_enumerate(&pres(&["x", "y"], &["x^2", "y^2", "(xy)^3"]), 1000).unwrap();
        assert!(are_isomorphic(&t.group, &catalog::symmetric3(), &Limits::default()).unwrap().is_some());
    }

    #[test]
    fn no_generators_is_trivial() {
        assert_eq!(coset_enumerate(&pres(&[], &[]), 5).unwrap().group.order(), 1);
    }

    #[test]
    fn deterministic() {
        let p = pres(&["x", "y"], &["x^3", "y^2", "(xy)^2"]);
        let a = coset_enumerate(&p, 100).unwrap();
        let b = coset_enumerate(&p, 100).unwrap();
        assert_eq!(a.group, b.group);
        assert_eq!(a.cosets_defined, b.cosets_defined);
    }
}
