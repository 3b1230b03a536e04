use crate::error::{domain, Result};

/// Length of the longest strictly increasing subsequence by patience
/// sorting. Values must be distinct and totally ordered.
pub fn lis_patience<T: PartialOrd + Copy>(values: &[T]) -> Result<usize> {
    let mut sorted = values.to_vec();
    let mut unordered = false;
    sorted.sort_by(|a, b| {
        a.partial_cmp(b).unwrap_or_else(|| {
            unordered = true;
            std::cmp::Ordering::Equal
        })
    });
    if unordered {
        return Err(domain("values are not totally ordered"));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(domain("duplicate values"));
    }

    // tops[i] is the smallest possible tail of an increasing run of length i+1
    let mut tops: Vec<T> = Vec::new();
    for &v in values {
        let pile = tops.partition_point(|t| *t < v);
        if pile == tops.len() {
            tops.push(v);
        } else {
            tops[pile] = v;
        }
    }
    Ok(tops.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_inputs() {
        let up: Vec<u32> = (1..=50).collect();
        let down: Vec<u32> = (1..=50).rev().collect();
        assert_eq!(lis_patience(&up).unwrap(), 50);
        assert_eq!(lis_patience(&down).unwrap(), 1);
        assert_eq!(lis_patience::<u32>(&[]).unwrap(), 0);
    }

    #[test]
    fn duplicates_and_nan_rejected() {
        assert!(lis_patience(&[3, 1, 3]).is_err());
        assert!(lis_patience(&[0.5, f64::NAN]).is_err());
    }

    #[test]
    fn floats() {
        assert_eq!(lis_patience(&[0.3, 0.1, 0.2, 0.9, 0.5]).unwrap(), 3);
    }
}
