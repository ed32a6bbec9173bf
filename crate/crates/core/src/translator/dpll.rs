use crate::error::{Error, Result};

/// Every total assignment satisfying `clauses`, as `model[i]` for variable
/// `i + 1`, in lexicographic order (false before true). Unit propagation
/// prunes; unconstrained variables are enumerated both ways. `limit` caps
/// the number of models.
pub fn all_models(variable_count: usize, clauses: &[Vec<i64>], limit: Option<usize>) -> Result<Vec<Vec<bool>>> {
    let mut watch: Vec<Vec<usize>> = vec![Vec::new(); 2 * (variable_count + 1)];
    for (ci, c) in clauses.iter().enumerate() {
        for &l in c {
            if l == 0 || l.unsigned_abs() as usize > variable_count {
                return Err(Error::Dimacs(format!("literal {l} outside 1..={variable_count}")));
            }
            watch[slot(l)].push(ci);
        }
    }
    let mut s = Search { clauses, watch, value: vec![None; variable_count + 1], trail: Vec::new(), models: Vec::new(), limit };
    for c in clauses {
        if c.is_empty() || (c.len() == 1 && !s.assign(c[0])) {
            return Ok(Vec::new());
        }
    }
    if s.propagate(0) {
        s.search(1)?;
    }
    Ok(s.models)
}

fn slot(l: i64) -> usize {
    2 * l.unsigned_abs() as usize + usize::from(l < 0)
}

struct Search<'a> {
    clauses: &'a [Vec<i64>],
    /// Clauses containing each literal.
    watch: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    trail: Vec<i64>,
    models: Vec<Vec<bool>>,
    limit: Option<usize>,
}

impl Search<'_> {
    fn lit_value(&self, l: i64) -> Option<bool> {
        self.value[l.unsigned_abs() as usize].map(|v| v == (l > 0))
    }

    /// Records `l` as true; false on conflict with the current value.
    fn assign(&mut self, l: i64) -> bool {
        match self.lit_value(l) {
            Some(v) => v,
            None => {
                self.value[l.unsigned_abs() as usize] = Some(l > 0);
                self.trail.push(l);
                true
            }
        }
    }

    /// Propagates the trail from position `from`; false on conflict.
    fn propagate(&mut self, mut from: usize) -> bool {
        while from < self.trail.len() {
            let falsified = -self.trail[from];
            from += 1;
            for i in 0..self.watch[slot(falsified)].len() {
                let ci = self.watch[slot(falsified)][i];
                let mut unit = None;
                let mut open = 0;
                let mut satisfied = false;
                for &l in &self.clauses[ci] {
                    match self.lit_value(l) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open += 1;
                            unit = Some(l);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match (open, unit) {
                    (0, _) => return false,
                    (1, Some(l)) => {
                        self.assign(l);
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn undo(&mut self, to: usize) {
        for l in self.trail.drain(to..) {
            self.value[l.unsigned_abs() as usize] = None;
        }
    }

    fn search(&mut self, start: usize) -> Result<()> {
        let Some(v) = (start..self.value.len()).find(|&v| self.value[v].is_none()) else {
            if self.limit.is_some_and(|k| self.models.len() >= k) {
                return Err(Error::TooLarge(format!("more than {} models", self.models.len())));
            }
            self.models.push(self.value[1..].iter().map(|x| x.unwrap_or(false)).collect());
            return Ok(());
        };
        for l in [-(v as i64), v as i64] {
            let mark = self.trail.len();
            self.assign(l);
            if self.propagate(mark) {
                self.search(v + 1)?;
            }
            self.undo(mark);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(n: usize, clauses: &[Vec<i64>]) -> Vec<Vec<bool>> {
        (0u32..1 << n)
            .map(|m| (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect::<Vec<bool>>())
            .filter(|m| clauses.iter().all(|c| c.iter().any(|&l| m[l.unsigned_abs() as usize - 1] == (l > 0))))
            .collect()
    }

    #[test]
    fn small_cases() {
        assert_eq!(all_models(2, &[vec![1, 2], vec![-1, -2]], None).unwrap(), vec![vec![false, true], vec![true, false]]);
        assert_eq!(all_models(1, &[vec![1], vec![-1]], None).unwrap(), Vec::<Vec<bool>>::new());
        assert_eq!(all_models(2, &[], None).unwrap().len(), 4);
        assert_eq!(all_models(1, &[vec![]], None).unwrap().len(), 0);
        assert!(all_models(1, &[vec![2]], None).is_err());
        assert!(matches!(all_models(3, &[], Some(5)), Err(Error::TooLarge(_))));
    }

    proptest! {
        #[test]
        fn matches_truth_table(
            n in 1usize..7,
            raw in prop::collection::vec(prop::collection::vec((1i64..7, any::<bool>()), 1..4), 0..12),
        ) {
            let clauses: Vec<Vec<i64>> = raw
                .into_iter()
                .map(|c| c.into_iter().map(|(v, s)| { let v = (v - 1) % n as i64 + 1; if s { v } else { -v } }).collect())
                .collect();
            prop_assert_eq!(all_models(n, &clauses, None).unwrap(), brute(n, &clauses));
        }
    }
}
