use crate::text::normalize_label;

/// Character-level Levenshtein distance, two-row dynamic programme.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            curr[j + 1] = substitution.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// `1 - distance / max(len)` over casefolded, punctuation-stripped labels.
pub fn score_candidate(raw_label: &str, candidate_label: &str) -> f64 {
    let a = normalize_label(raw_label);
    let b = normalize_label(candidate_label);
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(&a, &b) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: plain recursion over prefixes with memoisation.
    fn oracle_distance(a: &[char], b: &[char]) -> usize {
        fn go(a: &[char], b: &[char], memo: &mut Vec<Vec<Option<usize>>>) -> usize {
            let (i, j) = (a.len(), b.len());
            if let Some(v) = memo[i][j] {
                return v;
            }
            let v = if i == 0 {
                j
            } else if j == 0 {
                i
            } else {
                let cost = usize::from(a[i - 1] != b[j - 1]);
                (go(&a[..i - 1], b, memo) + 1)
                    .min(go(a, &b[..j - 1], memo) + 1)
                    .min(go(&a[..i - 1], &b[..j - 1], memo) + cost)
            };
            memo[i][j] = Some(v);
            v
        }
        let mut memo = vec![vec![None; b.len() + 1]; a.len() + 1];
        go(a, b, &mut memo)
    }

    #[test]
    fn fixed_examples() {
        assert_eq!(score_candidate("Lorenzo Valla", "Lorenzo Valla"), 1.0);
        assert_eq!(score_candidate("abc", "xyz"), 0.0);
        // "lorenzo valla" vs "laurentius valla": distance 6 over 16 chars
        assert_eq!(levenshtein("lorenzo valla", "laurentius valla"), 6);
        assert_eq!(score_candidate("Lorenzo Valla", "Laurentius Valla"), 0.625);
        assert_eq!(score_candidate("Valla, Lorenzo.", "valla lorenzo"), 1.0);
    }

    proptest! {
        #[test]
        fn matches_oracle(a in "[a-zé ]{0,12}", b in "[a-zé ]{0,12}") {
            let ac: Vec<char> = a.chars().collect();
            let bc: Vec<char> = b.chars().collect();
            prop_assert_eq!(levenshtein(&a, &b), oracle_distance(&ac, &bc));
        }

        #[test]
        fn symmetric_and_reflexive(a in "\\PC{1,20}", b in "\\PC{1,20}") {
            prop_assert_eq!(score_candidate(&a, &b), score_candidate(&b, &a));
            prop_assert_eq!(score_candidate(&a, &a), 1.0);
            let s = score_candidate(&a, &b);
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }
}
