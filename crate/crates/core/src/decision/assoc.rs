//! Mutual associativity of combinatory operations and fold-order invariance.
//!
//! When every operator pair satisfies `Ci(Cj(x,y),z) = Cj(x,Ci(y,z))`, any
//! sequence of operator applications can be regrouped freely; a combinatory
//! decision process built from such operators can be computed as a fold in
//! either direction. The checker verifies the pairwise law exhaustively on a
//! finite domain and, on success, also confirms the grouping invariance it
//! implies: left folds and right folds of every tested operator sequence
//! coincide.

use std::fmt::Debug;

/// Outcome of [`check_mutual_associativity`].
#[derive(Clone, Debug, PartialEq)]
pub struct AssocCheck<X> {
    pub mutually_associative: bool,
    /// `(i, j, x, y, z)` with `Ci(Cj(x,y),z) != Cj(x,Ci(y,z))`.
    pub counterexample: Option<(usize, usize, X, X, X)>,
    /// Fold pairs compared (zero when the pairwise law already failed).
    pub sequences_checked: usize,
    /// Whether every tested left fold equals the matching right fold.
    pub fold_invariant: bool,
}

/// Elements used for fold sequences (the scan itself uses the full domain).
const FOLD_ELEMENTS: usize = 4;

/// Exhaustively checks `Ci(Cj(x,y),z) = Cj(x,Ci(y,z))` over the domain, then
/// verifies fold-order invariance on element lists up to `max_fold_len`.
pub fn check_mutual_associativity<X: Clone + Eq + Debug>(
    ops: &[&dyn Fn(&X, &X) -> X],
    domain: &[X],
    max_fold_len: usize,
) -> AssocCheck<X> {
    for (i, ci) in ops.iter().enumerate() {
        for (j, cj) in ops.iter().enumerate() {
            for x in domain {
                for y in domain {
                    for z in domain {
                        let lhs = ci(&cj(x, y), z);
                        let rhs = cj(x, &ci(y, z));
                        if lhs != rhs {
                            return AssocCheck {
                                mutually_associative: false,
                                counterexample: Some((i, j, x.clone(), y.clone(), z.clone())),
                                sequences_checked: 0,
                                fold_invariant: false,
                            };
                        }
                    }
                }
            }
        }
    }

    // Grouping invariance on lists over a bounded element subset.
    let elems: Vec<X> = domain.iter().take(FOLD_ELEMENTS).cloned().collect();
    let mut sequences_checked = 0usize;
    for len in 2..=max_fold_len {
        let mut list_idx = vec![0usize; len];
        loop {
            let list: Vec<&X> = list_idx.iter().map(|&i| &elems[i]).collect();
            let mut op_idx = vec![0usize; len - 1];
            loop {
                let left = {
                    let mut acc = list[0].clone();
                    for (k, &oi) in op_idx.iter().enumerate() {
                        acc = ops[oi](&acc, list[k + 1]);
                    }
                    acc
                };
                let right = {
                    let mut acc = list[len - 1].clone();
                    for (k, &oi) in op_idx.iter().enumerate().rev() {
                        acc = ops[oi](list[k], &acc);
                    }
                    acc
                };
                sequences_checked += 1;
                if left != right {
                    return AssocCheck {
                        mutually_associative: true,
                        counterexample: None,
                        sequences_checked,
                        fold_invariant: false,
                    };
                }
                if !advance(&mut op_idx, ops.len()) {
                    break;
                }
            }
            if !advance(&mut list_idx, elems.len()) {
                break;
            }
        }
    }
    AssocCheck {
        mutually_associative: true,
        counterexample: None,
        sequences_checked,
        fold_invariant: true,
    }
}

/// Odometer increment; false on wraparound.
fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitwise_and_or_are_not_mutually_associative() {
        let and = |x: &u8, y: &u8| x & y;
        let or = |x: &u8, y: &u8| x | y;
        let domain: Vec<u8> = (0..4).collect(); // 2-bit words
        let check = check_mutual_associativity(&[&and, &or], &domain, 4);
        assert!(!check.mutually_associative);
        let (i, j, x, y, z) = check.counterexample.expect("counterexample");
        // Replay the violation.
        let ops: [&dyn Fn(&u8, &u8) -> u8; 2] = [&and, &or];
        assert_ne!(ops[i](&ops[j](&x, &y), &z), ops[j](&x, &ops[i](&y, &z)));
    }

    #[test]
    fn max_is_associative_and_fold_invariant() {
        let max = |x: &u32, y: &u32| *x.max(y);
        let domain: Vec<u32> = vec![3, 1, 4, 1, 5];
        let check = check_mutual_associativity(&[&max], &domain, 5);
        assert!(check.mutually_associative);
        assert!(check.fold_invariant);
        assert!(check.sequences_checked > 0);
    }

    #[test]
    fn concatenation_is_associative() {
        let concat = |x: &String, y: &String| format!("{x}{y}");
        let domain: Vec<String> = ["a", "b", "cd"].iter().map(|s| s.to_string()).collect();
        let check = check_mutual_associativity(&[&concat], &domain, 4);
        assert!(check.mutually_associative);
        assert!(check.fold_invariant);
    }

    #[test]
    fn translation_family_is_mutually_associative() {
        let add0 = |x: &u32, y: &u32| (x + y) % 7;
        let add3 = |x: &u32, y: &u32| (x + y + 3) % 7;
        let domain: Vec<u32> = (0..7).collect();
        let check = check_mutual_associativity(&[&add0, &add3], &domain, 4);
        assert!(check.mutually_associative, "{:?}", check.counterexample);
        assert!(check.fold_invariant);
    }
}
