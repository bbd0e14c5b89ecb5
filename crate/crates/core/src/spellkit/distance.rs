//! Edit distances used by the corrector.
//!
//! Candidate generation uses a Levenshtein distance in which substituting a
//! Turkish letter for its ASCII look-alike (or back) costs half a unit. Costs are
//! tracked in half units so all arithmetic stays integral.

/// ASCII stand-in / Turkish letter pairs.
pub const DEASCII_PAIRS: [(char, char); 6] = [('c', 'ç'), ('g', 'ğ'), ('i', 'ı'), ('o', 'ö'), ('s', 'ş'), ('u', 'ü')];

pub fn is_deascii_pair(a: char, b: char) -> bool {
    DEASCII_PAIRS
        .iter()
        .any(|&(x, y)| (a == x && b == y) || (a == y && b == x))
}

const FULL: u32 = 2;
const HALF: u32 = 1;

fn substitution_cost(a: char, b: char) -> u32 {
    if a == b {
        0
    } else if is_deascii_pair(a, b) {
        HALF
    } else {
        FULL
    }
}

/// Weighted distance in half units, or `None` once it provably exceeds `bound`.
pub fn weighted_distance_halves(a: &[char], b: &[char], bound: u32) -> Option<u32> {
    let (n, m) = (a.len(), b.len());
    if (n.abs_diff(m) as u32) * FULL > bound {
        return None;
    }
    let mut prev: Vec<u32> = (0..=m as u32).map(|j| j * FULL).collect();
    let mut cur = vec![0u32; m + 1];
    for i in 1..=n {
        cur[0] = i as u32 * FULL;
        let mut row_min = cur[0];
        for j in 1..=m {
            let v = (prev[j - 1] + substitution_cost(a[i - 1], b[j - 1]))
                .min(prev[j] + FULL)
                .min(cur[j - 1] + FULL);
            cur[j] = v;
            row_min = row_min.min(v);
        }
        if row_min > bound {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    (prev[m] <= bound).then_some(prev[m])
}

/// Convenience wrapper returning the weighted distance in (possibly fractional) units.
pub fn weighted_distance(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    f64::from(weighted_distance_halves(&a, &b, u32::MAX).expect("unbounded")) / 2.0
}

/// One step of an alignment between a typed word and an intended word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    Match(char),
    Substitute {
        typed: char,
        intended: char,
    },
    /// A typed character with no counterpart.
    Delete(char),
    /// An intended character that was not typed.
    Insert(char),
}

/// A minimal unit-cost Levenshtein alignment. Among equal-cost alignments the
/// one with the most substitutions wins; remaining ties place insertions and
/// deletions as far left as possible.
pub fn align(typed: &[char], intended: &[char]) -> Vec<EditOp> {
    let (n, m) = (typed.len(), intended.len());
    // (cost, indels), minimized lexicographically.
    let mut dp = vec![vec![(0u32, 0u32); m + 1]; n + 1];
    for i in 0..=n {
        dp[i][0] = (i as u32, i as u32);
    }
    for j in 0..=m {
        dp[0][j] = (j as u32, j as u32);
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = u32::from(typed[i - 1] != intended[j - 1]);
            let diag = (dp[i - 1][j - 1].0 + sub, dp[i - 1][j - 1].1);
            let up = (dp[i - 1][j].0 + 1, dp[i - 1][j].1 + 1);
            let left = (dp[i][j - 1].0 + 1, dp[i][j - 1].1 + 1);
            dp[i][j] = diag.min(up).min(left);
        }
    }

    // Tracing back from the end and preferring the diagonal pushes indels leftwards.
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i][j];
        if i > 0 && j > 0 {
            let (t, c) = (typed[i - 1], intended[j - 1]);
            let sub = u32::from(t != c);
            let (pc, pi) = dp[i - 1][j - 1];
            if (pc + sub, pi) == here {
                ops.push(if sub == 0 {
                    EditOp::Match(t)
                } else {
                    EditOp::Substitute { typed: t, intended: c }
                });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 {
            let (pc, pi) = dp[i - 1][j];
            if (pc + 1, pi + 1) == here {
                ops.push(EditOp::Delete(typed[i - 1]));
                i -= 1;
                continue;
            }
        }
        ops.push(EditOp::Insert(intended[j - 1]));
        j -= 1;
    }
    ops.reverse();
    ops
}
