//! Balance of a binary feature over a point set.

/// `min(a/b, b/a)` for the two class counts of a binary feature.
///
/// Zero when either class is absent (including the empty set), one when the
/// counts are equal.
pub fn balance(count_zero: usize, count_one: usize) -> f64 {
    if count_zero == 0 || count_one == 0 {
        return 0.0;
    }
    let (a, b) = (count_zero as f64, count_one as f64);
    if a <= b {
        a / b
    } else {
        b / a
    }
}

/// Balance of the `true`/`false` split of `flags`.
pub fn balance_of<I: IntoIterator<Item = bool>>(flags: I) -> f64 {
    let (mut ones, mut zeros) = (0usize, 0usize);
    for f in flags {
        if f {
            ones += 1;
        } else {
            zeros += 1;
        }
    }
    balance(zeros, ones)
}

/// A point set is α-fair when its balance does not go below `alpha`.
pub fn is_alpha_fair(balance: f64, alpha: f64) -> bool {
    balance >= alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balance_extremes() {
        assert_eq!(balance(0, 7), 0.0);
        assert_eq!(balance(7, 0), 0.0);
        assert_eq!(balance(0, 0), 0.0);
        assert_eq!(balance(5, 5), 1.0);
    }

    #[test]
    fn balance_is_symmetric() {
        assert_eq!(balance(8, 2), 0.25);
        assert_eq!(balance(2, 8), 0.25);
    }

    #[test]
    fn balance_of_flags() {
        let flags = [true, true, true, true, false];
        assert_eq!(balance_of(flags), 0.25);
        assert!(is_alpha_fair(0.25, 0.25));
        assert!(!is_alpha_fair(0.2, 0.25));
    }
}
