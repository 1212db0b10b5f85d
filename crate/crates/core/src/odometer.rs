/// Advances a mixed-radix counter in place, last digit fastest.
///
/// Returns `false` once the counter wraps back to all zeros.
pub(crate) fn advance(digits: &mut [usize], radix: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visits_every_tuple_once() {
        let radix = [2, 3, 1, 2];
        let mut d = [0usize; 4];
        let mut count = 1;
        while advance(&mut d, &radix) {
            count += 1;
        }
        assert_eq!(count, 12);
        assert_eq!(d, [0, 0, 0, 0]);
    }

    #[test]
    fn empty_counter_has_one_state() {
        let mut d: [usize; 0] = [];
        assert!(!advance(&mut d, &[]));
    }
}
